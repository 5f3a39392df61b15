//! Distilling a line cloud into a wireframe with the fitted junctions.
//!
//! Segments are indexed to their nearest junction pair, grouped per pair,
//! and the junctions adjusted so the pair lines agree with their members
//! ([`lsq`]). Unsupported edges are removed by projecting into the 2D
//! observations ([`visibility`]) and the surviving junctions are snapped
//! onto the surface along the SDF gradient.

pub mod lsq;
pub mod visibility;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{project_point_to_line_3d, LineCloud, LineSegment3D, Vec3, WireframeGraph3D, EPS_LEN};
use crate::junctions::JunctionSet;
use crate::math;
use crate::sdf::AnalyticSdf;
use crate::{Error, Result};

pub use lsq::{optimize_junctions, JacobianMode, LsqParams, LsqReport};
pub use visibility::{edge_support_counts, visibility_filter, VisibilityParams};

fn check_nondegenerate(seg: &LineSegment3D) -> Result<()> {
    let length = seg.length();
    if !(length > EPS_LEN) {
        return Err(Error::DegenerateSegment { length });
    }
    Ok(())
}

/// `1 - |<unit(l0), unit(li)>|`, in `[0, 1]`.
pub fn angular_distance(l0: &LineSegment3D, li: &LineSegment3D) -> Result<f64> {
    check_nondegenerate(l0)?;
    check_nondegenerate(li)?;
    let c = l0.direction().dot(&li.direction()).abs();
    Ok((1.0 - c).clamp(0.0, 1.0))
}

/// Sum of the distances from `l0`'s endpoints to the infinite line through `li`.
pub fn perpendicular_distance(l0: &LineSegment3D, li: &LineSegment3D) -> f64 {
    (l0.a - project_point_to_line_3d(&l0.a, li)).norm()
        + (l0.b - project_point_to_line_3d(&l0.b, li)).norm()
}

/// A cloud segment assigned to the junction pair `(u, v)`, `u < v`, with its
/// endpoints ordered so `segment.a` sits near `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexedSegment {
    pub segment: LineSegment3D,
    pub u: usize,
    pub v: usize,
    /// Position of the segment in the source cloud.
    pub source: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexParams {
    /// Largest accepted angle between a segment and its junction pair, degrees.
    pub theta_max_deg: f64,
    /// Largest accepted perpendicular distance, world units.
    pub d_max: f64,
}

impl Default for IndexParams {
    fn default() -> Self {
        Self {
            theta_max_deg: 10.0,
            d_max: 0.01,
        }
    }
}

impl IndexParams {
    /// The angle bound expressed as an angular distance, `1 - cos(theta_max)`.
    pub fn max_angular_distance(&self) -> f64 {
        1.0 - math::cos(math::to_radians(self.theta_max_deg))
    }
}

fn nearest_active(junctions: &JunctionSet, active: &[usize], p: &Vec3) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for &k in active {
        let d = (junctions.positions()[k] - p).norm_squared();
        if d < best.0 {
            best = (d, k);
        }
    }
    best.1
}

/// Assigns each cloud segment to the active junctions nearest its endpoints
/// and keeps it when it aligns with that pair within `params`.
pub fn index_endpoints(
    cloud: &LineCloud,
    junctions: &JunctionSet,
    params: &IndexParams,
) -> Result<Vec<IndexedSegment>> {
    let active: Vec<usize> = junctions.active_indices().collect();
    if active.len() < 2 {
        return Err(Error::param("junctions", "need at least two active junctions"));
    }
    let max_ang = params.max_angular_distance();
    let mut out = Vec::new();
    for (source, cs) in cloud.segments.iter().enumerate() {
        let seg = cs.segment;
        let ka = nearest_active(junctions, &active, &seg.a);
        let kb = nearest_active(junctions, &active, &seg.b);
        if ka == kb {
            continue;
        }
        let (u, v, seg) = if ka < kb {
            (ka, kb, seg)
        } else {
            (kb, ka, seg.reversed())
        };
        let pair = LineSegment3D {
            a: junctions.positions()[u],
            b: junctions.positions()[v],
        };
        let Ok(ang) = angular_distance(&pair, &seg) else {
            continue;
        };
        if ang <= max_ang && perpendicular_distance(&pair, &seg) <= params.d_max {
            out.push(IndexedSegment {
                segment: seg,
                u,
                v,
                source,
            });
        }
    }
    Ok(out)
}

/// Segments sharing one junction pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentGroup {
    pub u: usize,
    pub v: usize,
    pub members: Vec<LineSegment3D>,
}

/// Groups indexed segments by junction pair, ordered by `(u, v)`.
pub fn group_segments(indexed: &[IndexedSegment]) -> Vec<SegmentGroup> {
    let mut groups: BTreeMap<(usize, usize), Vec<LineSegment3D>> = BTreeMap::new();
    for s in indexed {
        groups.entry((s.u, s.v)).or_default().push(s.segment);
    }
    groups
        .into_iter()
        .map(|((u, v), members)| SegmentGroup { u, v, members })
        .collect()
}

/// Deactivates junctions indexed by fewer than `min_support` segments.
pub fn deactivate_unsupported(
    junctions: &mut JunctionSet,
    indexed: &[IndexedSegment],
    min_support: usize,
) {
    let mut support = vec![0usize; junctions.len()];
    for s in indexed {
        support[s.u] += 1;
        support[s.v] += 1;
    }
    for (k, &count) in support.iter().enumerate() {
        if count < min_support {
            junctions.set_active(k, false);
        }
    }
}

/// The graph of active junctions referenced by some group; groups touching
/// an inactive junction are dropped. Vertices keep ascending junction order.
pub fn build_wireframe(junctions: &JunctionSet, groups: &[SegmentGroup]) -> Result<WireframeGraph3D> {
    let keys: Vec<(usize, usize)> = groups
        .iter()
        .filter(|g| g.u < g.v && junctions.is_active(g.u) && junctions.is_active(g.v))
        .map(|g| (g.u, g.v))
        .collect();
    let mut remap = vec![usize::MAX; junctions.len()];
    for &(u, v) in &keys {
        remap[u] = 0;
        remap[v] = 0;
    }
    let mut vertices = Vec::new();
    for (k, slot) in remap.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = vertices.len();
            vertices.push(junctions.positions()[k]);
        }
    }
    let mut edges: Vec<(usize, usize)> = keys.iter().map(|&(u, v)| (remap[u], remap[v])).collect();
    edges.sort_unstable();
    edges.dedup();
    WireframeGraph3D::new(vertices, edges)
}

/// One step `J - d(J) * grad d(J)` toward the zero level set.
pub fn sdf_refine(junction: &Vec3, sdf: &AnalyticSdf) -> Result<Vec3> {
    let g = sdf.gradient(junction);
    let norm = g.norm();
    if norm < 1e-6 {
        return Err(Error::DegenerateGradient { norm });
    }
    Ok(junction - g * sdf.eval(junction))
}

/// Up to `steps` refinement steps (capped at 5), stopping once on the surface.
pub fn sdf_refine_steps(junction: &Vec3, sdf: &AnalyticSdf, steps: usize) -> Result<Vec3> {
    let mut j = *junction;
    for _ in 0..steps.clamp(1, 5) {
        j = sdf_refine(&j, sdf)?;
        if sdf.eval(&j).abs() <= 1e-12 {
            break;
        }
    }
    Ok(j)
}

/// Refines every junction of `wf`. Junctions with a degenerate gradient stay
/// put and are counted; edges that collapse are dropped.
pub fn refine_wireframe(
    wf: &WireframeGraph3D,
    sdf: &AnalyticSdf,
    steps: usize,
) -> (WireframeGraph3D, usize) {
    let mut unrefined = 0;
    let junctions: Vec<Vec3> = wf
        .junctions()
        .iter()
        .map(|j| {
            sdf_refine_steps(j, sdf, steps).unwrap_or_else(|_| {
                unrefined += 1;
                *j
            })
        })
        .collect();
    let edges: Vec<(usize, usize)> = wf
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| (junctions[u] - junctions[v]).norm() > EPS_LEN)
        .collect();
    let graph = WireframeGraph3D::new(junctions, edges)
        .map(|g| g.remove_isolated())
        .unwrap_or_else(|_| wf.clone());
    (graph, unrefined)
}
