//! OBJ line-set and points3D text exports.

use std::fmt::Write as _;
use std::path::Path;

use wirefield_core::junctions::JunctionSet;
use wirefield_core::{Vec3, WireframeGraph3D};

use crate::error::{Error, Result};
use crate::fsutil::{read_to_string, write_atomic};

const GRAY: u8 = 128;

/// `v x y z` per junction, then `l u v` per edge with 1-based indices.
pub fn obj_text(wf: &WireframeGraph3D) -> String {
    let mut s = String::from("# wirefield wireframe\n");
    for p in wf.junctions() {
        writeln!(s, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    for &(u, v) in wf.edges() {
        writeln!(s, "l {} {}", u + 1, v + 1).unwrap();
    }
    s
}

pub fn export_obj(wf: &WireframeGraph3D, path: &Path) -> Result<()> {
    write_atomic(path, obj_text(wf).as_bytes())
}

fn parse_floats<const N: usize>(path: &Path, line: usize, fields: &[&str]) -> Result<[f64; N]> {
    let bad = || Error::Parse {
        path: path.to_path_buf(),
        line,
        column: 1,
        message: format!("expected {N} numbers"),
    };
    if fields.len() != N {
        return Err(bad());
    }
    let mut out = [0.0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse().map_err(|_| bad())?;
    }
    Ok(out)
}

/// Reads the `v` and `l` records of an OBJ file. Polylines with more than
/// two vertices become consecutive edges; other records are ignored.
pub fn parse_obj(path: &Path, text: &str) -> Result<WireframeGraph3D> {
    let mut junctions = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut fields = raw.split_whitespace();
        match fields.next() {
            Some("v") => {
                let f: Vec<&str> = fields.collect();
                // tolerate the optional w component
                let f = if f.len() == 4 { &f[..3] } else { &f[..] };
                junctions.push(Vec3::from(parse_floats::<3>(path, line, f)?));
            }
            Some("l") => {
                let idx = fields
                    .map(|f| {
                        f.split('/')
                            .next()
                            .and_then(|v| v.parse::<usize>().ok())
                            .filter(|&v| v >= 1)
                            .map(|v| v - 1)
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::Parse {
                        path: path.to_path_buf(),
                        line,
                        column: 1,
                        message: "expected 1-based vertex indices".into(),
                    })?;
                for w in idx.windows(2) {
                    edges.push((w[0].min(w[1]), w[0].max(w[1])));
                }
            }
            _ => {}
        }
    }
    WireframeGraph3D::new(junctions, edges).map_err(|e| Error::invalid(path, "l", e))
}

pub fn import_obj(path: &Path) -> Result<WireframeGraph3D> {
    parse_obj(path, &read_to_string(path)?)
}

/// Active junctions as a points3D listing: `POINT3D_ID X Y Z R G B ERROR`
/// with ids from 1, mid-gray color, zero error and empty tracks.
pub fn points3d_text(junctions: &JunctionSet) -> Result<String> {
    let active = junctions.active_positions();
    if active.is_empty() {
        return Err(Error::Input("no active junctions to export".into()));
    }
    let mut s = String::new();
    s.push_str("# 3D point list with one line of data per point:\n");
    s.push_str("#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n");
    writeln!(s, "# Number of points: {}, mean track length: 0", active.len()).unwrap();
    for (i, p) in active.iter().enumerate() {
        writeln!(s, "{} {:?} {:?} {:?} {GRAY} {GRAY} {GRAY} 0", i + 1, p.x, p.y, p.z).unwrap();
    }
    Ok(s)
}

pub fn export_gaussian_init(junctions: &JunctionSet, path: &Path) -> Result<()> {
    write_atomic(path, points3d_text(junctions)?.as_bytes())
}

/// Point positions of a points3D listing, in file order.
pub fn parse_points3d(path: &Path, text: &str) -> Result<Vec<Vec3>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.len() < 8 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                column: 1,
                message: "expected POINT3D_ID X Y Z R G B ERROR".into(),
            });
        }
        out.push(Vec3::from(parse_floats::<3>(path, i + 1, &fields[1..4])?));
    }
    Ok(out)
}
