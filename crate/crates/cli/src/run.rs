//! The pipeline driver over files.

use std::path::Path;

use wirefield_core::junctions::JunctionSet;
use wirefield_core::pipeline::{self, LineSource, PipelineConfig, Reconstruction, Stage, StageError};
use wirefield_core::synth::SyntheticScene;
use wirefield_core::LineCloud;

use crate::error::{Error, Result};
use crate::export::{export_gaussian_init, export_obj};
use crate::formats::{read_scene, write_junctions, write_line_cloud, write_wireframe};
use crate::report::Report;

/// Names of the files [`run_pipeline`] writes.
pub const LINE_CLOUD_FILE: &str = "line_cloud.ron";
pub const JUNCTIONS_FILE: &str = "junctions.ron";
pub const WIREFRAME_FILE: &str = "wireframe.ron";
pub const OBJ_FILE: &str = "wireframe.obj";
pub const POINTS3D_FILE: &str = "points3D.txt";

/// The line cloud of `scene`, rendering views in parallel when the
/// `parallel` feature is on. Segment order matches the sequential path.
pub fn line_cloud(scene: &SyntheticScene, config: &PipelineConfig) -> Result<(LineCloud, usize), StageError> {
    let at = |source| StageError {
        stage: Stage::LineCloud,
        source,
    };
    config.validate().map_err(at)?;
    if config.line_source != LineSource::Render {
        return pipeline::line_cloud(scene, config).map_err(at);
    }
    let views = 0..scene.cameras.len();
    #[cfg(feature = "parallel")]
    let per_view: Vec<_> = {
        use rayon::prelude::*;
        views.into_par_iter().map(|v| pipeline::render_view(scene, v, config)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_view: Vec<_> = views.map(|v| pipeline::render_view(scene, v, config)).collect();
    let mut segments = Vec::new();
    let mut skipped = 0;
    for r in per_view {
        let (segs, s) = r.map_err(at)?;
        segments.extend(segs);
        skipped += s;
    }
    Ok((LineCloud::new(segments), skipped))
}

pub fn reconstruct(scene: &SyntheticScene, config: &PipelineConfig) -> Result<Reconstruction> {
    let (cloud, skipped) = line_cloud(scene, config)?;
    Ok(pipeline::reconstruct_from_cloud(scene, cloud, skipped, config)?)
}

/// Writes the line cloud, fitted junctions, final wireframe (text and OBJ),
/// the points3D export of its junctions and the reports into `out_dir`.
pub fn write_outputs(r: &Reconstruction, out_dir: &Path) -> Result<Report> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_line_cloud(&out_dir.join(LINE_CLOUD_FILE), &r.line_cloud)?;
    write_junctions(&out_dir.join(JUNCTIONS_FILE), &r.fit.junctions)?;
    let wf = r.wireframe();
    write_wireframe(&out_dir.join(WIREFRAME_FILE), wf)?;
    export_obj(wf, &out_dir.join(OBJ_FILE))?;
    if !wf.junctions().is_empty() {
        let js = JunctionSet::all_active(wf.junctions().to_vec())?;
        export_gaussian_init(&js, &out_dir.join(POINTS3D_FILE))?;
    }
    let report = Report::from_reconstruction(r);
    report.write(out_dir)?;
    Ok(report)
}

/// Reads the scene, runs every stage and writes all outputs.
pub fn run_pipeline(config: &PipelineConfig, scene_path: &Path, out_dir: &Path) -> Result<Report> {
    let scene = read_scene(scene_path)?;
    let r = reconstruct(&scene, config)?;
    write_outputs(&r, out_dir)
}
