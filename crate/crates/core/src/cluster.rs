//! DBSCAN over 3D points with a Euclidean metric.
//!
//! Bit-identical points are merged before the neighborhood search and carry
//! their multiplicity, which keeps heavily duplicated line clouds cheap.
//! Neighborhoods come from a uniform grid with cell size `eps`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Vec3;
use crate::math;
use crate::{Error, Result};

/// Partition of the input points into clusters and noise.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClusterResult {
    /// Member mean of each cluster.
    pub centroids: Vec<Vec3>,
    /// Input indices of each cluster, ascending.
    pub members: Vec<Vec<usize>>,
    /// Input indices labelled as noise, ascending.
    pub noise: Vec<usize>,
}

impl ClusterResult {
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    /// Per-point cluster label, `None` for noise.
    pub fn labels(&self, n_points: usize) -> Vec<Option<usize>> {
        let mut labels = vec![None; n_points];
        for (c, members) in self.members.iter().enumerate() {
            for &i in members {
                labels[i] = Some(c);
            }
        }
        labels
    }
}

type Cell = (i64, i64, i64);

fn cell_of(p: &Vec3, eps: f64) -> Cell {
    let f = |x: f64| math::floor(x / eps).clamp(i64::MIN as f64 / 2.0, i64::MAX as f64 / 2.0) as i64;
    (f(p.x), f(p.y), f(p.z))
}

fn bits(p: &Vec3) -> [u64; 3] {
    // +0.0 and -0.0 must merge
    let canon = |x: f64| if x == 0.0 { 0u64 } else { x.to_bits() };
    [canon(p.x), canon(p.y), canon(p.z)]
}

/// DBSCAN with `eps`-balls that include their center: a point is core when
/// at least `min_samples` points (itself included) lie within `eps`.
///
/// Clusters are the connected components of core points; each border point
/// joins the cluster of its nearest core neighbor (ties broken by the
/// neighbor's coordinates), so the partition does not depend on input order.
/// Clusters are numbered by their smallest member index.
pub fn dbscan(points: &[Vec3], eps: f64, min_samples: usize) -> Result<ClusterResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", "must be positive and finite"));
    }
    if min_samples == 0 {
        return Err(Error::param("min_samples", "must be at least 1"));
    }

    // unique points in order of first occurrence
    let mut slot_of: BTreeMap<[u64; 3], usize> = BTreeMap::new();
    let mut uniq: Vec<Vec3> = Vec::new();
    let mut owners: Vec<Vec<usize>> = Vec::new();
    let mut invalid = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !p.iter().all(|c| c.is_finite()) {
            invalid.push(i);
            continue;
        }
        let slot = *slot_of.entry(bits(p)).or_insert_with(|| {
            uniq.push(*p);
            owners.push(Vec::new());
            uniq.len() - 1
        });
        owners[slot].push(i);
    }

    let mut grid: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
    for (u, p) in uniq.iter().enumerate() {
        grid.entry(cell_of(p, eps)).or_default().push(u);
    }
    let eps2 = eps * eps;
    let neighbors = |u: usize| -> Vec<usize> {
        let p = &uniq[u];
        let (cx, cy, cz) = cell_of(p, eps);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(cell) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        out.extend(
                            cell.iter()
                                .copied()
                                .filter(|&v| (uniq[v] - p).norm_squared() <= eps2),
                        );
                    }
                }
            }
        }
        out
    };

    let adjacency: Vec<Vec<usize>> = (0..uniq.len()).map(neighbors).collect();
    let is_core: Vec<bool> = adjacency
        .iter()
        .map(|nb| nb.iter().map(|&v| owners[v].len()).sum::<usize>() >= min_samples)
        .collect();

    // connected components over core points
    const NONE: usize = usize::MAX;
    let mut component = vec![NONE; uniq.len()];
    let mut n_components = 0;
    for start in 0..uniq.len() {
        if !is_core[start] || component[start] != NONE {
            continue;
        }
        component[start] = n_components;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &adjacency[u] {
                if is_core[v] && component[v] == NONE {
                    component[v] = n_components;
                    stack.push(v);
                }
            }
        }
        n_components += 1;
    }

    // border points follow their nearest core neighbor
    for u in 0..uniq.len() {
        if is_core[u] {
            continue;
        }
        let nearest = adjacency[u]
            .iter()
            .copied()
            .filter(|&v| is_core[v])
            .min_by(|&a, &b| {
                let da = (uniq[a] - uniq[u]).norm_squared();
                let db = (uniq[b] - uniq[u]).norm_squared();
                da.total_cmp(&db).then_with(|| {
                    let ka = [uniq[a].x, uniq[a].y, uniq[a].z];
                    let kb = [uniq[b].x, uniq[b].y, uniq[b].z];
                    ka.iter()
                        .zip(&kb)
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(core::cmp::Ordering::Equal)
                })
            });
        if let Some(v) = nearest {
            component[u] = component[v];
        }
    }

    // relabel components by smallest member index
    let mut first_member = vec![usize::MAX; n_components];
    for (u, &c) in component.iter().enumerate() {
        if c != NONE {
            first_member[c] = first_member[c].min(owners[u][0]);
        }
    }
    let mut order: Vec<usize> = (0..n_components).collect();
    order.sort_by_key(|&c| first_member[c]);
    let mut label_of = vec![0; n_components];
    for (label, &c) in order.iter().enumerate() {
        label_of[c] = label;
    }

    let mut members = vec![Vec::new(); n_components];
    let mut noise = invalid;
    for (u, &c) in component.iter().enumerate() {
        if c == NONE {
            noise.extend_from_slice(&owners[u]);
        } else {
            members[label_of[c]].extend_from_slice(&owners[u]);
        }
    }
    noise.sort_unstable();
    for m in &mut members {
        m.sort_unstable();
    }
    let centroids = members
        .iter()
        .map(|m| {
            // offsets from the first member keep duplicates exact
            let base = points[m[0]];
            base + m.iter().fold(Vec3::zeros(), |acc, &i| acc + (points[i] - base)) / m.len() as f64
        })
        .collect();
    Ok(ClusterResult {
        centroids,
        members,
        noise,
    })
}
