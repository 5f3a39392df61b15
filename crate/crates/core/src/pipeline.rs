//! End-to-end reconstruction of a synthetic scene, in memory.

use alloc::vec::Vec;

use crate::distill::{
    build_wireframe, deactivate_unsupported, group_segments, index_endpoints, optimize_junctions,
    refine_wireframe, visibility_filter, IndexParams, JacobianMode, LsqParams, LsqReport,
    VisibilityParams,
};
use crate::geometry::{CloudSegment, LineCloud, WireframeGraph3D};
use crate::junctions::{fit_junctions, junction_loss, FitParams, JunctionFit, JunctionSet};
use crate::metrics::{chamfer_report, precision_recall, ChamferReport, PRReport};
use crate::render::{
    attraction_rays, render_line_segment, DisplacementOracle, RenderQuadrature, SdfDensity,
};
use crate::synth::{ideal_baseline, synthesize_line_cloud, IdealBaseline, SyntheticScene};
use crate::{Error, Result};

/// Where the line cloud comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSource {
    /// Volume rendering along attraction rays with the exact displacement
    /// field of the scene's ground truth.
    Render,
    /// Noisy duplicates of the visible ground-truth edges.
    Synthesize {
        duplicates_per_view: usize,
        noise_sigma_3d: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Attraction distance, pixels.
    pub tau_ray: f64,
    pub beta: f64,
    pub n_samples: usize,
    pub n_junctions: usize,
    pub dbscan_eps: f64,
    pub dbscan_min_samples: usize,
    /// Degrees.
    pub theta_max: f64,
    pub d_max: f64,
    /// Degrees.
    pub ang_max: f64,
    /// Pixels.
    pub perp_max: f64,
    pub overlap_min: f64,
    pub vis_threshold: usize,
    pub lambda: f64,
    pub seed: u64,
    pub line_source: LineSource,
    /// Junctions indexed by fewer segments are dropped before building.
    pub min_support: usize,
    /// SDF snapping steps applied to the surviving junctions; 0 disables.
    pub refine_steps: usize,
    pub fit_max_iters: usize,
    pub lsq_max_iters: usize,
    pub eval_thresholds: Vec<f64>,
    /// Pixel tolerance of the ideal-baseline support test.
    pub baseline_tau_px: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tau_ray: 5.0,
            beta: 1e-3,
            n_samples: 256,
            n_junctions: 1024,
            dbscan_eps: 0.01,
            dbscan_min_samples: 2,
            theta_max: 10.0,
            d_max: 0.01,
            ang_max: 10.0,
            perp_max: 5.0,
            overlap_min: 0.5,
            vis_threshold: 1,
            lambda: 0.01,
            seed: 0,
            line_source: LineSource::Render,
            min_support: 1,
            refine_steps: 1,
            fit_max_iters: 20,
            lsq_max_iters: 100,
            eval_thresholds: alloc::vec![0.01, 0.02, 0.05],
            baseline_tau_px: 5.0,
        }
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be positive and finite"))
    }
}

fn at_least_one(name: &'static str, n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::param(name, "must be at least 1"))
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        positive("tau_ray", self.tau_ray)?;
        positive("beta", self.beta)?;
        positive("dbscan_eps", self.dbscan_eps)?;
        positive("d_max", self.d_max)?;
        positive("perp_max", self.perp_max)?;
        positive("baseline_tau_px", self.baseline_tau_px)?;
        if self.n_samples < 2 {
            return Err(Error::param("n_samples", "must be at least 2"));
        }
        at_least_one("n_junctions", self.n_junctions)?;
        at_least_one("dbscan_min_samples", self.dbscan_min_samples)?;
        at_least_one("vis_threshold", self.vis_threshold)?;
        at_least_one("fit_max_iters", self.fit_max_iters)?;
        for (name, deg) in [("theta_max", self.theta_max), ("ang_max", self.ang_max)] {
            if !(deg > 0.0 && deg <= 90.0) {
                return Err(Error::param(name, "must lie in (0, 90] degrees"));
            }
        }
        if !(0.0..=1.0).contains(&self.overlap_min) {
            return Err(Error::param("overlap_min", "must lie in [0, 1]"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", "must be finite and >= 0"));
        }
        if self.refine_steps > 5 {
            return Err(Error::param("refine_steps", "at most 5"));
        }
        if self.eval_thresholds.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::param("eval_thresholds", "must be finite and >= 0"));
        }
        if let LineSource::Synthesize {
            duplicates_per_view,
            noise_sigma_3d,
        } = self.line_source
        {
            at_least_one("duplicates_per_view", duplicates_per_view)?;
            if !(noise_sigma_3d >= 0.0 && noise_sigma_3d.is_finite()) {
                return Err(Error::param("noise_sigma_3d", "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn fit_params(&self) -> FitParams {
        FitParams {
            n_junctions: self.n_junctions,
            eps: self.dbscan_eps,
            min_samples: self.dbscan_min_samples,
            max_iters: self.fit_max_iters,
            seed: self.seed,
            ..FitParams::default()
        }
    }

    pub fn index_params(&self) -> IndexParams {
        IndexParams {
            theta_max_deg: self.theta_max,
            d_max: self.d_max,
        }
    }

    pub fn lsq_params(&self) -> LsqParams {
        LsqParams {
            max_iters: self.lsq_max_iters,
            ..LsqParams::default()
        }
    }

    pub fn visibility_params(&self) -> VisibilityParams {
        VisibilityParams {
            ang_max: self.ang_max,
            perp_max: self.perp_max,
            overlap_min: self.overlap_min,
            vis_threshold: self.vis_threshold,
        }
    }
}

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    LineCloud,
    FitJunctions,
    Index,
    Optimize,
    Build,
    Visibility,
    Refine,
    Metrics,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::LineCloud => "line-cloud",
            Stage::FitJunctions => "fit-junctions",
            Stage::Index => "index",
            Stage::Optimize => "optimize",
            Stage::Build => "build",
            Stage::Visibility => "visibility",
            Stage::Refine => "refine",
            Stage::Metrics => "metrics",
        }
    }
}

impl core::fmt::Display for Stage {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// A stage failure with the stage that raised it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("stage `{stage}` failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> core::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> core::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

/// Rays rendered into segments for one view, plus the number of rays that
/// produced none (too little surface mass or no associated edge).
pub fn render_view(scene: &SyntheticScene, view: usize, config: &PipelineConfig) -> Result<(Vec<CloudSegment>, usize)> {
    let camera = &scene.cameras[view];
    let rays = attraction_rays(&scene.views[view], camera, view, config.tau_ray)?;
    let field = SdfDensity::new(&scene.sdf, config.beta)?;
    let (center, radius) = scene.sdf.bounding_sphere();
    let quad = RenderQuadrature::enclosing(&camera.center(), &center, radius, config.n_samples)?;
    let oracle = DisplacementOracle::new(&scene.gt_wireframe, &scene.cameras);
    let mut out = Vec::new();
    let mut skipped = 0;
    for ray in &rays {
        match render_line_segment(ray, &field, &oracle, &quad).and_then(|r| r.segment()) {
            Ok(segment) => out.push(CloudSegment { segment, view }),
            Err(Error::NoSurface { .. } | Error::NoAssociation | Error::DegenerateSegment { .. }) => {
                skipped += 1
            }
            Err(e) => return Err(e),
        }
    }
    Ok((out, skipped))
}

/// The line cloud of `scene` under `config.line_source`, with the number of
/// skipped rays (always 0 when synthesizing).
pub fn line_cloud(scene: &SyntheticScene, config: &PipelineConfig) -> Result<(LineCloud, usize)> {
    match config.line_source {
        LineSource::Render => {
            let mut segments = Vec::new();
            let mut skipped = 0;
            for view in 0..scene.cameras.len() {
                let (segs, s) = render_view(scene, view, config)?;
                segments.extend(segs);
                skipped += s;
            }
            Ok((LineCloud::new(segments), skipped))
        }
        LineSource::Synthesize {
            duplicates_per_view,
            noise_sigma_3d,
        } => Ok((
            synthesize_line_cloud(scene, duplicates_per_view, noise_sigma_3d, config.seed)?,
            0,
        )),
    }
}

/// Everything evaluated on the final wireframe.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub chamfer: ChamferReport,
    pub pr: PRReport,
    pub baseline: IdealBaseline,
    /// Mean junction loss of the final matched junctions against their
    /// pseudo junctions, when the fit is known.
    pub junction_loss: Option<f64>,
}

/// Products of the stages after the junction fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Distilled {
    pub indexed_segments: usize,
    pub groups: usize,
    pub optimized: JunctionSet,
    pub lsq: LsqReport,
    /// Edge count before the visibility filter.
    pub built_edges: usize,
    /// Junctions left in place because their SDF gradient vanished.
    pub unrefined_junctions: usize,
    pub wireframe: WireframeGraph3D,
}

/// Intermediate and final products of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub line_cloud: LineCloud,
    pub skipped_rays: usize,
    pub fit: JunctionFit,
    pub distilled: Distilled,
    pub metrics: Metrics,
}

impl Reconstruction {
    pub fn wireframe(&self) -> &WireframeGraph3D {
        &self.distilled.wireframe
    }
}

/// Indexes `cloud` against fitted `junctions` and turns the groups into a
/// filtered, refined wireframe.
pub fn distill(
    scene: &SyntheticScene,
    cloud: &LineCloud,
    junctions: &JunctionSet,
    config: &PipelineConfig,
) -> core::result::Result<Distilled, StageError> {
    config.validate().at(Stage::Index)?;
    let indexed = index_endpoints(cloud, junctions, &config.index_params()).at(Stage::Index)?;
    let mut junctions = junctions.clone();
    deactivate_unsupported(&mut junctions, &indexed, config.min_support);
    let groups: Vec<_> = group_segments(&indexed)
        .into_iter()
        .filter(|g| junctions.is_active(g.u) && junctions.is_active(g.v))
        .collect();
    let (optimized, lsq) = optimize_junctions(&junctions, &groups, &config.lsq_params()).at(Stage::Optimize)?;
    let built = build_wireframe(&optimized, &groups).at(Stage::Build)?;
    let visible = visibility_filter(&built, &scene.views, &scene.cameras, &config.visibility_params())
        .at(Stage::Visibility)?;
    let (wireframe, unrefined_junctions) = if config.refine_steps > 0 {
        refine_wireframe(&visible, &scene.sdf, config.refine_steps)
    } else {
        (visible, 0)
    };
    Ok(Distilled {
        indexed_segments: indexed.len(),
        groups: groups.len(),
        optimized,
        lsq,
        built_edges: built.edges().len(),
        unrefined_junctions,
        wireframe,
    })
}

/// Distills an existing line cloud (stages after the line cloud).
pub fn reconstruct_from_cloud(
    scene: &SyntheticScene,
    cloud: LineCloud,
    skipped_rays: usize,
    config: &PipelineConfig,
) -> core::result::Result<Reconstruction, StageError> {
    config.validate().at(Stage::LineCloud)?;
    let fit = fit_junctions(&cloud, &config.fit_params()).at(Stage::FitJunctions)?;
    let distilled = distill(scene, &cloud, &fit.junctions, config)?;
    let metrics =
        evaluate(scene, &distilled.wireframe, Some((&fit, &distilled.optimized)), config).at(Stage::Metrics)?;
    Ok(Reconstruction {
        line_cloud: cloud,
        skipped_rays,
        fit,
        distilled,
        metrics,
    })
}

/// Runs every stage on `scene`.
pub fn reconstruct(scene: &SyntheticScene, config: &PipelineConfig) -> core::result::Result<Reconstruction, StageError> {
    config.validate().at(Stage::LineCloud)?;
    let (cloud, skipped) = line_cloud(scene, config).at(Stage::LineCloud)?;
    reconstruct_from_cloud(scene, cloud, skipped, config)
}

/// Metrics of `wireframe` against the scene's ground truth. An empty
/// reconstruction scores zero precision and recall and infinite distances.
pub fn evaluate(
    scene: &SyntheticScene,
    wireframe: &WireframeGraph3D,
    fit: Option<(&JunctionFit, &JunctionSet)>,
    config: &PipelineConfig,
) -> Result<Metrics> {
    let gt = &scene.gt_wireframe;
    let chamfer = if wireframe.edges().is_empty() {
        ChamferReport {
            acc_j: f64::INFINITY,
            comp_j: f64::INFINITY,
            acc_l: f64::INFINITY,
            comp_l: f64::INFINITY,
        }
    } else {
        chamfer_report(wireframe, gt)?
    };
    let pr = precision_recall(wireframe, gt, &config.eval_thresholds)?;
    let baseline = ideal_baseline(scene, &scene.views, config.baseline_tau_px)?;
    let junction_loss = fit.map(|(fit, optimized)| {
        let losses: Vec<f64> = fit
            .matching
            .iter()
            .filter(|&&(k, _)| optimized.is_active(k))
            .map(|&(k, i)| {
                junction_loss(
                    &optimized.positions()[k],
                    &fit.clusters.centroids[i],
                    &scene.cameras,
                    config.lambda,
                )
            })
            .collect();
        if losses.is_empty() {
            0.0
        } else {
            losses.iter().sum::<f64>() / losses.len() as f64
        }
    });
    Ok(Metrics {
        chamfer,
        pr,
        baseline,
        junction_loss,
    })
}

/// Least-squares settings with the analytic Jacobian, for callers that want
/// to compare against the default finite differences.
pub fn analytic_lsq(config: &PipelineConfig) -> LsqParams {
    LsqParams {
        jacobian: JacobianMode::Analytic,
        ..config.lsq_params()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::SceneSpec;

    fn synth_config(sigma: f64) -> PipelineConfig {
        PipelineConfig {
            line_source: LineSource::Synthesize {
                duplicates_per_view: 5,
                noise_sigma_3d: sigma,
            },
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn defaults_validate() {
        PipelineConfig::default().validate().unwrap();
        let bad = PipelineConfig {
            overlap_min: 2.0,
            ..PipelineConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn noiseless_cube_is_exact() {
        let scene = SyntheticScene::generate(&SceneSpec::default()).unwrap();
        let r = reconstruct(&scene, &synth_config(0.0)).unwrap();
        assert!(!r.line_cloud.is_empty());
        assert_eq!(r.wireframe().junctions().len(), 8);
        assert_eq!(r.wireframe().edges().len(), 12);
        assert!(r.metrics.chamfer.acc_j <= 1e-6);
        assert!(r.metrics.chamfer.acc_l <= 1e-6);
        assert_eq!(r.metrics.pr.precision_l[0], 1.0);
        assert_eq!(r.metrics.pr.recall_j[0], 1.0);
    }

    #[test]
    fn stage_errors_name_the_stage() {
        let scene = SyntheticScene::generate(&SceneSpec {
            n_views: 2,
            ..SceneSpec::default()
        })
        .unwrap();
        let err = reconstruct_from_cloud(&scene, LineCloud::default(), 0, &synth_config(0.0)).unwrap_err();
        assert_eq!(err.stage, Stage::FitJunctions);
    }
}
