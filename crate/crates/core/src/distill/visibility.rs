//! Removing 3D edges that no 2D observation supports.

use alloc::vec::Vec;

use crate::geometry::{
    line_angle_deg_2d, Camera, LineSegment2D, Vec2, WireframeGraph2D, WireframeGraph3D, EPS_LEN,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityParams {
    /// Degrees.
    pub ang_max: f64,
    /// Pixels.
    pub perp_max: f64,
    pub overlap_min: f64,
    pub vis_threshold: usize,
}

impl Default for VisibilityParams {
    fn default() -> Self {
        Self {
            ang_max: 10.0,
            perp_max: 5.0,
            overlap_min: 0.5,
            vis_threshold: 1,
        }
    }
}

/// How a detection relates to a projected edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    /// Angle between the two lines, degrees in `[0, 90]`.
    pub angle_deg: f64,
    /// Largest distance from the covered part of the projected edge to the
    /// detection's line, pixels. Infinite when nothing is covered.
    pub perpendicular: f64,
    /// Fraction of the projected edge covered by the detection's footprint.
    pub overlap: f64,
}

fn line_distance(p: &Vec2, seg: &LineSegment2D) -> f64 {
    let d = seg.q - seg.p;
    let r = p - seg.p;
    (d.x * r.y - d.y * r.x).abs() / d.norm()
}

/// Compares detection `det` against the projected edge `proj`.
pub fn alignment(proj: &LineSegment2D, det: &LineSegment2D) -> Alignment {
    let d = proj.q - proj.p;
    let len2 = d.norm_squared();
    let angle_deg = line_angle_deg_2d(&d, &(det.q - det.p));
    let s0 = (det.p - proj.p).dot(&d) / len2;
    let s1 = (det.q - proj.p).dot(&d) / len2;
    let lo = s0.min(s1).max(0.0);
    let hi = s0.max(s1).min(1.0);
    if !(hi > lo) || det.length() <= EPS_LEN {
        return Alignment {
            angle_deg,
            perpendicular: f64::INFINITY,
            overlap: 0.0,
        };
    }
    let perpendicular = line_distance(&(proj.p + d * lo), det).max(line_distance(&(proj.p + d * hi), det));
    Alignment {
        angle_deg,
        perpendicular,
        overlap: hi - lo,
    }
}

/// Whether `det` supports the projected edge `proj` under `params`.
pub fn supports(proj: &LineSegment2D, det: &LineSegment2D, params: &VisibilityParams) -> bool {
    let a = alignment(proj, det);
    a.angle_deg <= params.ang_max && a.perpendicular <= params.perp_max && a.overlap >= params.overlap_min
}

/// Number of views supporting each edge of `wf`. An edge whose projection
/// fails or is shorter than `EPS_LEN` pixels gets no support from that view.
pub fn edge_support_counts(
    wf: &WireframeGraph3D,
    views: &[WireframeGraph2D],
    cameras: &[Camera],
    params: &VisibilityParams,
) -> Result<Vec<usize>> {
    if views.len() != cameras.len() {
        return Err(Error::param("views", "one camera per view required"));
    }
    Ok(wf
        .segments()
        .map(|seg| {
            views
                .iter()
                .zip(cameras)
                .filter(|(view, cam)| {
                    let (Ok(p), Ok(q)) = (cam.project(&seg.a), cam.project(&seg.b)) else {
                        return false;
                    };
                    let Ok(proj) = LineSegment2D::new(p, q) else {
                        return false;
                    };
                    view.segments().any(|det| supports(&proj, &det, params))
                })
                .count()
        })
        .collect())
}

/// Keeps edges supported in at least `vis_threshold` views, then drops
/// isolated junctions.
pub fn visibility_filter(
    wf: &WireframeGraph3D,
    views: &[WireframeGraph2D],
    cameras: &[Camera],
    params: &VisibilityParams,
) -> Result<WireframeGraph3D> {
    if params.vis_threshold == 0 {
        return Err(Error::param("vis_threshold", "must be at least 1"));
    }
    let counts = edge_support_counts(wf, views, cameras, params)?;
    Ok(wf.retain_edges(|e| counts[e] >= params.vis_threshold))
}
