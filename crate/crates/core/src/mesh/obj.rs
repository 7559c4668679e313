//! Minimal Wavefront OBJ reader/writer.
//!
//! Supports `v` and `f` records; faces may use `i`, `i/t`, `i//n` or `i/t/n`
//! vertex references and negative (relative) indices, and polygons are
//! fan-triangulated. Everything else (`vt`, `vn`, `o`, `g`, `s`, `usemtl`,
//! `mtllib`, comments) is ignored.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::TriangleMesh;

pub fn read_obj(path: &Path) -> Result<TriangleMesh> {
    let file = std::fs::File::open(path).map_err(|e| Error::io_at(path.display().to_string(), e))?;
    parse_obj(BufReader::new(file), &path.display().to_string())
}

pub fn parse_obj<R: BufRead>(reader: R, source_name: &str) -> Result<TriangleMesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();

    let err = |line: usize, msg: String| Error::ObjParse {
        path: source_name.to_string(),
        line,
        msg,
    };

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io_at(source_name.to_string(), e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let mut coord = |name: &str| -> Result<f64> {
                    parts
                        .next()
                        .ok_or_else(|| err(lineno, format!("missing {name} coordinate")))?
                        .parse::<f64>()
                        .map_err(|e| err(lineno, format!("bad {name} coordinate: {e}")))
                };
                let x = coord("x")?;
                let y = coord("y")?;
                let z = coord("z")?;
                vertices.push(Vec3::new(x, y, z));
            }
            Some("f") => {
                let mut face: Vec<u32> = Vec::new();
                for tok in parts {
                    let vert = tok.split('/').next().unwrap_or("");
                    let raw: i64 = vert
                        .parse()
                        .map_err(|e| err(lineno, format!("bad vertex index '{tok}': {e}")))?;
                    let n = vertices.len() as i64;
                    let resolved = if raw > 0 {
                        raw - 1
                    } else if raw < 0 {
                        n + raw
                    } else {
                        return Err(err(lineno, "vertex index 0 is not valid".into()));
                    };
                    if resolved < 0 || resolved >= n {
                        return Err(err(
                            lineno,
                            format!("vertex index {raw} out of range ({n} vertices so far)"),
                        ));
                    }
                    face.push(resolved as u32);
                }
                if face.len() < 3 {
                    return Err(err(lineno, format!("face with {} vertices", face.len())));
                }
                for i in 1..face.len() - 1 {
                    triangles.push([face[0], face[i], face[i + 1]]);
                }
            }
            _ => {} // ignore all other records
        }
    }

    TriangleMesh::new(vertices, triangles)
}

pub fn write_obj(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let file =
        std::fs::File::create(path).map_err(|e| Error::io_at(path.display().to_string(), e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e| Error::io_at(path.display().to_string(), e);
    for v in mesh.vertices() {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z).map_err(io_err)?;
    }
    for t in mesh.triangles() {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}
