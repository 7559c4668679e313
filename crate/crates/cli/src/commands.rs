//! Subcommand implementations. Each takes the parsed config plus its own
//! argument struct and returns a core error on failure; `main` maps those
//! to the data-error exit code.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use silpose_core::bank::{generate_bank, generate_bank_icosphere, save_bank};
use silpose_core::error::{Error, Result};
use silpose_core::eval::{evaluate_dataset, write_records, EvalParams};
use silpose_core::mesh::read_obj;
use silpose_core::report::{
    read_curve_points_csv, read_summary_csv, render_table, write_curve_points_csv,
    write_curves_csv, write_summary_csv,
};
use silpose_core::scene::{build_mesh, generate_scenes, load_dataset, SceneGenParams};

use crate::config::HarnessConfig;
use crate::{EvalArgs, GenBankArgs, GenScenesArgs, ReportArgs};

/// Write to stdout, treating a closed pipe (`silpose ... | head`) as a
/// clean stop instead of a panic or an error.
fn print_out(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(Error::Io),
    }
}

pub fn gen_bank(cfg: &HarnessConfig, args: &GenBankArgs) -> Result<()> {
    let mesh = match &args.mesh {
        Some(path) => read_obj(path)?,
        None => {
            let source = cfg.classes.get(&args.class).ok_or_else(|| {
                Error::UnknownClass(format!("{} (not in the class table)", args.class))
            })?;
            build_mesh(source, Path::new("."))?
        }
    };
    let resolution = args.resolution.unwrap_or(cfg.mask_resolution);
    let bank = match args.icosphere_level {
        Some(level) => generate_bank_icosphere(
            &mesh,
            &cfg.camera,
            &args.class,
            level,
            args.spins,
            resolution,
        )?,
        None => generate_bank(
            &mesh,
            &cfg.camera,
            &args.class,
            args.step,
            &args.elevations,
            resolution,
        )?,
    };
    let manifest = save_bank(&bank, &args.out)?;
    print_out(&format!(
        "wrote {} templates ({}x{}) to {}\n",
        bank.len(),
        resolution,
        resolution,
        manifest.display()
    ))
}

pub fn gen_scenes(cfg: &HarnessConfig, args: &GenScenesArgs) -> Result<()> {
    let resolution = args.resolution.unwrap_or(cfg.mask_resolution);
    fs::create_dir_all(&args.out).map_err(|e| Error::io_at(&args.out, e))?;

    // Every class gets a template bank in the dataset directory; `eval`
    // loads them through the manifest.
    let mut banks = BTreeMap::new();
    for (class_id, source) in &cfg.classes {
        let mesh = build_mesh(source, &args.out)?;
        let bank = generate_bank_icosphere(
            &mesh,
            &cfg.camera,
            class_id,
            args.bank_level,
            args.bank_spins,
            resolution,
        )?;
        save_bank(&bank, &args.out)?;
        banks.insert(class_id.clone(), format!("{class_id}_bank.json"));
    }

    let params = SceneGenParams {
        n_scenes: args.scenes,
        occlusion_level: args.occlusion,
        seed: args.seed,
        roi_jitter_sigma: args.jitter,
        mask_resolution: resolution,
    };
    let manifest = generate_scenes(
        &cfg.classes,
        &cfg.symmetry,
        &banks,
        &cfg.camera,
        &params,
        &args.out,
    )?;
    print_out(&format!(
        "wrote {} scenes and {} banks to {}\n",
        manifest.scenes.len(),
        banks.len(),
        args.out.display()
    ))
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let dataset = load_dataset(&args.manifest)?;
    let params = EvalParams {
        mode: args.mode.into(),
        roi: args.roi.into(),
        refine: !args.no_refine,
        seed: args.seed,
        flip_fraction: args.flip_fraction,
        timing: args.timing,
        adds_max_threshold: args.max_threshold,
        curve_steps: args.curve_steps,
    };
    let evaluation = evaluate_dataset(&dataset, &params)?;

    fs::create_dir_all(&args.out).map_err(|e| Error::io_at(&args.out, e))?;
    write_records(&args.out.join("records.json"), &evaluation.records)?;
    write_summary_csv(&args.out.join("summary.csv"), &evaluation.summary)?;
    write_curves_csv(&args.out.join("curves.csv"), &evaluation.curves)?;
    print_out(&render_table(&evaluation.summary))
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let rows = read_summary_csv(&args.summary)?;
    let mut text = render_table(&rows);

    let points = match &args.curves {
        Some(path) => Some(read_curve_points_csv(path)?),
        None => None,
    };
    if let Some(points) = &points {
        text.push_str("\naccuracy curve points:\n");
        for p in points {
            text.push_str(&format!("{} {:.6} {:.6}\n", p.class_id, p.threshold_m, p.accuracy));
        }
    }
    print_out(&text)?;

    if let Some(out) = &args.out {
        fs::create_dir_all(out).map_err(|e| Error::io_at(out, e))?;
        write_summary_csv(&out.join("summary.csv"), &rows)?;
        if let Some(points) = &points {
            write_curve_points_csv(&out.join("curves.csv"), points)?;
        }
    }
    Ok(())
}
