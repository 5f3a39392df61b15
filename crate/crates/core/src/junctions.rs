//! Global junction perception: a fixed budget of `N` junction positions is
//! fitted to DBSCAN pseudo junctions of the line-cloud endpoints through
//! repeated Hungarian matching.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::{hungarian, CostMatrix};
use crate::cluster::{dbscan, ClusterResult};
use crate::geometry::{Camera, LineCloud, Vec3};
use crate::{Error, Result};

/// `N` junction positions, each flagged active or inactive.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionSet {
    positions: Vec<Vec3>,
    active: Vec<bool>,
}

impl JunctionSet {
    pub fn new(positions: Vec<Vec3>, active: Vec<bool>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::param("positions", "need at least one junction"));
        }
        if positions.len() != active.len() {
            return Err(Error::param("active", "one flag per junction required"));
        }
        Ok(Self { positions, active })
    }

    /// All junctions active.
    pub fn all_active(positions: Vec<Vec3>) -> Result<Self> {
        let n = positions.len();
        Self::new(positions, vec![true; n])
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn is_active(&self, k: usize) -> bool {
        self.active[k]
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.positions.len()).filter(|&k| self.active[k])
    }

    pub fn active_positions(&self) -> Vec<Vec3> {
        self.active_indices().map(|k| self.positions[k]).collect()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn set_position(&mut self, k: usize, p: Vec3) {
        self.positions[k] = p;
    }

    pub fn set_active(&mut self, k: usize, active: bool) {
        self.active[k] = active;
    }
}

/// `|J - P|_1 + lambda * mean_views |proj(J) - proj(P)|_1`.
///
/// Views where either point is at or behind the camera are skipped; with no
/// usable view the 2D term is zero.
pub fn junction_loss(junction: &Vec3, pseudo: &Vec3, cameras: &[Camera], lambda: f64) -> f64 {
    let l3 = (junction - pseudo).abs().sum();
    let (sum, count) = cameras
        .iter()
        .filter_map(|cam| {
            let a = cam.project(junction).ok()?;
            let b = cam.project(pseudo).ok()?;
            Some((a - b).abs().sum())
        })
        .fold((0.0, 0usize), |(s, c), l| (s + l, c + 1));
    if count == 0 {
        l3
    } else {
        l3 + lambda * sum / count as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub n_junctions: usize,
    pub eps: f64,
    pub min_samples: usize,
    pub max_iters: usize,
    /// Stop once no position moves by this much or more.
    pub tol: f64,
    pub seed: u64,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            n_junctions: 1024,
            eps: 0.01,
            min_samples: 2,
            max_iters: 20,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionFit {
    pub junctions: JunctionSet,
    /// The pseudo junctions the fit was matched against.
    pub clusters: ClusterResult,
    /// `(junction, cluster)` pairs of the final matching.
    pub matching: Vec<(usize, usize)>,
    /// Total matching cost of every iteration.
    pub matching_costs: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Fits `n_junctions` positions to the pseudo junctions of `cloud`.
///
/// Positions start uniformly inside the cloud's bounding box (seeded). Each
/// iteration matches positions to cluster centroids by Hungarian assignment
/// on Euclidean costs and moves every matched position onto its centroid.
/// Positions never matched are inactive.
pub fn fit_junctions(cloud: &LineCloud, params: &FitParams) -> Result<JunctionFit> {
    let (lo, hi) = cloud.bounds().ok_or(Error::EmptyInput("line cloud"))?;
    if params.n_junctions == 0 {
        return Err(Error::param("n_junctions", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut positions: Vec<Vec3> = (0..params.n_junctions)
        .map(|_| {
            Vec3::from_fn(|axis, _| lo[axis] + (hi[axis] - lo[axis]) * rng.random::<f64>())
        })
        .collect();

    // endpoints never move, so neither do their clusters
    let clusters = dbscan(&cloud.endpoints(), params.eps, params.min_samples)?;
    let centroids = &clusters.centroids;

    let mut matched_ever = vec![false; params.n_junctions];
    let mut matching = Vec::new();
    let mut matching_costs = Vec::new();
    let mut iterations = 0;
    let mut converged = centroids.is_empty();
    while !converged && iterations < params.max_iters {
        iterations += 1;
        let cost = CostMatrix::from_fn(positions.len(), centroids.len(), |k, i| {
            (positions[k] - centroids[i]).norm()
        });
        let m = hungarian(&cost)?;
        let mut max_change: f64 = 0.0;
        for &(k, i) in &m.pairs {
            max_change = max_change.max((positions[k] - centroids[i]).norm());
            positions[k] = centroids[i];
            matched_ever[k] = true;
        }
        matching_costs.push(m.total_cost);
        matching = m.pairs;
        converged = max_change < params.tol;
    }

    Ok(JunctionFit {
        junctions: JunctionSet::new(positions, matched_ever)?,
        clusters,
        matching,
        matching_costs,
        iterations,
        converged,
    })
}
