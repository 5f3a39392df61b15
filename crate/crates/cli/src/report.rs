//! Metric reports as `key = value` text and as JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use wirefield_core::pipeline::{Metrics, Reconstruction};
use wirefield_core::WireframeGraph3D;

use crate::error::Result;
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub threshold: f64,
    pub precision_j: f64,
    pub recall_j: f64,
    pub precision_l: f64,
    pub recall_l: f64,
}

/// Counters of the stages before evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageStats {
    pub line_cloud_segments: usize,
    pub skipped_rays: usize,
    pub fit_iterations: usize,
    pub fit_converged: bool,
    pub fitted_junctions: usize,
    pub pseudo_junctions: usize,
    pub indexed_segments: usize,
    pub groups: usize,
    pub lsq_iterations: usize,
    pub lsq_initial_cost: f64,
    pub lsq_final_cost: f64,
    pub built_edges: usize,
    pub unrefined_junctions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub junctions: usize,
    pub edges: usize,
    pub acc_j: f64,
    pub comp_j: f64,
    pub acc_l: f64,
    pub comp_l: f64,
    pub pr: Vec<ThresholdRow>,
    pub baseline_junction_rate: f64,
    pub baseline_line_rate: f64,
    pub junction_loss: Option<f64>,
    pub stages: Option<StageStats>,
}

impl Report {
    pub fn from_metrics(wireframe: &WireframeGraph3D, m: &Metrics) -> Self {
        let pr = &m.pr;
        Self {
            junctions: wireframe.junctions().len(),
            edges: wireframe.edges().len(),
            acc_j: m.chamfer.acc_j,
            comp_j: m.chamfer.comp_j,
            acc_l: m.chamfer.acc_l,
            comp_l: m.chamfer.comp_l,
            pr: (0..pr.thresholds.len())
                .map(|i| ThresholdRow {
                    threshold: pr.thresholds[i],
                    precision_j: pr.precision_j[i],
                    recall_j: pr.recall_j[i],
                    precision_l: pr.precision_l[i],
                    recall_l: pr.recall_l[i],
                })
                .collect(),
            baseline_junction_rate: m.baseline.junction_rate,
            baseline_line_rate: m.baseline.line_rate,
            junction_loss: m.junction_loss,
            stages: None,
        }
    }

    pub fn from_reconstruction(r: &Reconstruction) -> Self {
        let d = &r.distilled;
        Self {
            stages: Some(StageStats {
                line_cloud_segments: r.line_cloud.len(),
                skipped_rays: r.skipped_rays,
                fit_iterations: r.fit.iterations,
                fit_converged: r.fit.converged,
                fitted_junctions: r.fit.junctions.active_count(),
                pseudo_junctions: r.fit.clusters.centroids.len(),
                indexed_segments: d.indexed_segments,
                groups: d.groups,
                lsq_iterations: d.lsq.iterations,
                lsq_initial_cost: d.lsq.initial_cost,
                lsq_final_cost: d.lsq.final_cost,
                built_edges: d.built_edges,
                unrefined_junctions: d.unrefined_junctions,
            }),
            ..Self::from_metrics(&d.wireframe, &r.metrics)
        }
    }
}

/// Shortest round-trip form with an exponent for tiny values.
struct Float(f64);

impl std::fmt::Display for Float {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Report {
    /// `key = value` lines in a fixed order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| writeln!(s, "{k} = {v}").unwrap();
        kv("junctions", &self.junctions);
        kv("edges", &self.edges);
        kv("acc_j", &Float(self.acc_j));
        kv("comp_j", &Float(self.comp_j));
        kv("acc_l", &Float(self.acc_l));
        kv("comp_l", &Float(self.comp_l));
        for row in &self.pr {
            let t = row.threshold;
            kv(&format!("precision_j@{t}"), &Float(row.precision_j));
            kv(&format!("recall_j@{t}"), &Float(row.recall_j));
            kv(&format!("precision_l@{t}"), &Float(row.precision_l));
            kv(&format!("recall_l@{t}"), &Float(row.recall_l));
        }
        kv("baseline_junction_rate", &Float(self.baseline_junction_rate));
        kv("baseline_line_rate", &Float(self.baseline_line_rate));
        if let Some(l) = self.junction_loss {
            kv("junction_loss", &Float(l));
        }
        if let Some(st) = &self.stages {
            kv("line_cloud_segments", &st.line_cloud_segments);
            kv("skipped_rays", &st.skipped_rays);
            kv("fit_iterations", &st.fit_iterations);
            kv("fit_converged", &st.fit_converged);
            kv("fitted_junctions", &st.fitted_junctions);
            kv("pseudo_junctions", &st.pseudo_junctions);
            kv("indexed_segments", &st.indexed_segments);
            kv("groups", &st.groups);
            kv("lsq_iterations", &st.lsq_iterations);
            kv("lsq_initial_cost", &Float(st.lsq_initial_cost));
            kv("lsq_final_cost", &Float(st.lsq_final_cost));
            kv("built_edges", &st.built_edges);
            kv("unrefined_junctions", &st.unrefined_junctions);
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.txt` and `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_atomic(&dir.join("report.txt"), self.to_text().as_bytes())?;
        write_atomic(&dir.join("report.json"), self.to_json().as_bytes())
    }
}

/// Value of `key` in a `key = value` report.
pub fn lookup<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| {
        let (k, v) = l.split_once(" = ")?;
        (k == key).then_some(v)
    })
}
