//! Accuracy/completeness over sampled clouds and junction/line
//! precision-recall under distance thresholds.

use alloc::vec::Vec;

use crate::geometry::{Vec3, WireframeGraph3D};
use crate::{Error, Result};

/// Points sampled along wireframe edges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampledCloud {
    pub points: Vec<Vec3>,
    /// `(edge, s)` for every point, `s` in `[0, 1]` along the edge.
    pub provenance: Vec<(usize, f64)>,
}

impl SampledCloud {
    /// A cloud of bare points (provenance `(i, 0)`).
    pub fn from_points(points: Vec<Vec3>) -> Self {
        let provenance = (0..points.len()).map(|i| (i, 0.0)).collect();
        Self { points, provenance }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `k` equally spaced points per edge, endpoints included.
pub fn sample_wireframe(wf: &WireframeGraph3D, k: usize) -> Result<SampledCloud> {
    if k < 2 {
        return Err(Error::param("k", "need at least two samples per edge"));
    }
    let mut cloud = SampledCloud::default();
    for (e, seg) in wf.segments().enumerate() {
        for i in 0..k {
            let s = i as f64 / (k - 1) as f64;
            cloud.points.push(seg.point_at(s));
            cloud.provenance.push((e, s));
        }
    }
    Ok(cloud)
}

fn mean_nearest(from: &[Vec3], to: &[Vec3]) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptyInput("point cloud"));
    }
    let total: f64 = from
        .iter()
        .map(|p| to.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .sum();
    Ok(total / from.len() as f64)
}

/// Mean distance from each predicted point to its nearest ground-truth point.
pub fn acc(pred: &SampledCloud, gt: &SampledCloud) -> Result<f64> {
    mean_nearest(&pred.points, &gt.points)
}

/// Mean distance from each ground-truth point to its nearest prediction.
pub fn comp(pred: &SampledCloud, gt: &SampledCloud) -> Result<f64> {
    mean_nearest(&gt.points, &pred.points)
}

/// Precision and recall of junctions and lines at several thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct PRReport {
    pub thresholds: Vec<f64>,
    pub precision_j: Vec<f64>,
    pub recall_j: Vec<f64>,
    pub precision_l: Vec<f64>,
    pub recall_l: Vec<f64>,
    pub pred_junctions: usize,
    pub gt_junctions: usize,
    pub pred_lines: usize,
    pub gt_lines: usize,
}

/// Greedy one-to-one matching: candidate pairs sorted by ascending
/// `(distance, pred, gt)` are taken whenever both sides are still free.
/// Returns the matched distances in the order taken.
pub fn greedy_match(distances: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let mut pairs: Vec<(f64, usize, usize)> = distances
        .iter()
        .enumerate()
        .flat_map(|(p, row)| row.iter().enumerate().map(move |(g, &d)| (d, p, g)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let n_gt = distances.first().map_or(0, Vec::len);
    let mut pred_used = alloc::vec![false; distances.len()];
    let mut gt_used = alloc::vec![false; n_gt];
    let mut out = Vec::new();
    for (d, p, g) in pairs {
        if !pred_used[p] && !gt_used[g] {
            pred_used[p] = true;
            gt_used[g] = true;
            out.push((p, g, d));
        }
    }
    out
}

/// Max endpoint distance between two segments under the better ordering.
pub fn line_distance(a: (&Vec3, &Vec3), b: (&Vec3, &Vec3)) -> f64 {
    let direct = (a.0 - b.0).norm().max((a.1 - b.1).norm());
    let flipped = (a.0 - b.1).norm().max((a.1 - b.0).norm());
    direct.min(flipped)
}

fn ratio(k: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

/// Greedy one-to-one junction and line matching, matched iff the pair
/// distance is within the threshold.
///
/// The greedy order does not depend on the threshold, so counts can only
/// grow with it.
pub fn precision_recall(pred: &WireframeGraph3D, gt: &WireframeGraph3D, thresholds: &[f64]) -> Result<PRReport> {
    if gt.edges().is_empty() {
        return Err(Error::EmptyInput("ground-truth wireframe"));
    }
    let jd: Vec<Vec<f64>> = pred
        .junctions()
        .iter()
        .map(|p| gt.junctions().iter().map(|g| (p - g).norm()).collect())
        .collect();
    let ld: Vec<Vec<f64>> = pred
        .segments()
        .map(|p| gt.segments().map(|g| line_distance((&p.a, &p.b), (&g.a, &g.b))).collect())
        .collect();
    let jm = greedy_match(&jd);
    let lm = greedy_match(&ld);

    let (np_j, ng_j) = (pred.junctions().len(), gt.junctions().len());
    let (np_l, ng_l) = (pred.edges().len(), gt.edges().len());
    let mut report = PRReport {
        thresholds: thresholds.to_vec(),
        precision_j: Vec::new(),
        recall_j: Vec::new(),
        precision_l: Vec::new(),
        recall_l: Vec::new(),
        pred_junctions: np_j,
        gt_junctions: ng_j,
        pred_lines: np_l,
        gt_lines: ng_l,
    };
    for &tau in thresholds {
        let kj = jm.iter().filter(|m| m.2 <= tau).count();
        let kl = lm.iter().filter(|m| m.2 <= tau).count();
        report.precision_j.push(ratio(kj, np_j));
        report.recall_j.push(ratio(kj, ng_j));
        report.precision_l.push(ratio(kl, np_l));
        report.recall_l.push(ratio(kl, ng_l));
    }
    Ok(report)
}

/// ACC/COMP of junctions and of 32-point edge samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChamferReport {
    pub acc_j: f64,
    pub comp_j: f64,
    pub acc_l: f64,
    pub comp_l: f64,
}

pub const SAMPLES_PER_EDGE: usize = 32;

pub fn chamfer_report(pred: &WireframeGraph3D, gt: &WireframeGraph3D) -> Result<ChamferReport> {
    let pj = SampledCloud::from_points(pred.junctions().to_vec());
    let gj = SampledCloud::from_points(gt.junctions().to_vec());
    let pl = sample_wireframe(pred, SAMPLES_PER_EDGE)?;
    let gl = sample_wireframe(gt, SAMPLES_PER_EDGE)?;
    Ok(ChamferReport {
        acc_j: acc(&pj, &gj)?,
        comp_j: comp(&pj, &gj)?,
        acc_l: acc(&pl, &gl)?,
        comp_l: comp(&pl, &gl)?,
    })
}
