use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use wirefield::config::ConfigArgs;
use wirefield::export::{export_gaussian_init, export_obj};
use wirefield::formats::{
    read_junctions, read_line_cloud, read_scene, read_wireframe, write_junctions, write_line_cloud, write_scene,
    write_wireframe,
};
use wirefield::report::Report;
use wirefield::run::{self, run_pipeline};
use wirefield_core::junctions::{fit_junctions, JunctionSet};
use wirefield_core::pipeline::{distill, evaluate, Stage, StageError};
use wirefield_core::synth::{default_camera_distance, CorruptionSpec, SceneSpec, Shape, SyntheticScene};

#[derive(Parser)]
#[command(name = "wirefield", version, about = "Wireframe reconstruction from multi-view line observations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ShapeArg {
    Cube,
    Lbracket,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scene: ground truth, cameras and 2D views.
    Gen {
        #[arg(long, value_enum, default_value = "cube")]
        shape: ShapeArg,
        #[arg(long, default_value_t = 20)]
        n_views: usize,
        /// Camera distance from the origin (default sqrt(4.5)).
        #[arg(long)]
        distance: Option<f64>,
        #[arg(long, default_value_t = 60.0)]
        focal_mm: f64,
        #[arg(long, default_value_t = 32.0)]
        sensor_mm: f64,
        #[arg(long, default_value_t = 512)]
        resolution: u32,
        /// Hide edges occluded by the shape itself.
        #[arg(long)]
        occlusion: bool,
        /// Gaussian endpoint noise of the 2D views, pixels.
        #[arg(long, default_value_t = 0.0)]
        endpoint_noise_sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        drop_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        split_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Render (or synthesize) the line cloud of a scene.
    RenderLines {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Fit global junctions to a line cloud.
    FitJunctions {
        #[arg(long)]
        line_cloud: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Index, group, adjust, filter and refine into a wireframe.
    Distill {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        line_cloud: PathBuf,
        #[arg(long)]
        junctions: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Also write the wireframe as OBJ.
        #[arg(long)]
        obj: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Evaluate a wireframe against the scene's ground truth.
    Eval {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        wireframe: PathBuf,
        /// Directory for report.txt and report.json.
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Write active junctions (or wireframe junctions) as a points3D file.
    ExportGaussianInit {
        #[arg(long, conflicts_with = "wireframe", required_unless_present = "wireframe")]
        junctions: Option<PathBuf>,
        #[arg(long)]
        wireframe: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run every stage on a scene and write all outputs.
    Run {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Gen {
            shape,
            n_views,
            distance,
            focal_mm,
            sensor_mm,
            resolution,
            occlusion,
            endpoint_noise_sigma,
            drop_rate,
            split_rate,
            seed,
            out,
        } => {
            let corruption = CorruptionSpec {
                endpoint_noise_sigma,
                drop_rate,
                split_rate,
                seed,
            };
            let spec = SceneSpec {
                shape: match shape {
                    ShapeArg::Cube => Shape::Cube,
                    ShapeArg::Lbracket => Shape::LBracket,
                },
                n_views,
                distance: distance.unwrap_or_else(default_camera_distance),
                focal_mm,
                sensor_mm,
                resolution,
                occlusion,
                corruption: (corruption != CorruptionSpec { seed, ..CorruptionSpec::default() }).then_some(corruption),
                seed,
            };
            let scene = SyntheticScene::generate(&spec).context("generating scene")?;
            write_scene(&out, &scene)?;
        }
        Command::RenderLines { scene, out, config } => {
            let config = config.resolve()?;
            let scene = read_scene(&scene)?;
            let (cloud, skipped) = run::line_cloud(&scene, &config)?;
            write_line_cloud(&out, &cloud)?;
            eprintln!("{} segments, {skipped} rays skipped", cloud.len());
        }
        Command::FitJunctions { line_cloud, out, config } => {
            let config = config.resolve()?;
            let cloud = read_line_cloud(&line_cloud)?;
            let fit = fit_junctions(&cloud, &config.fit_params()).map_err(|source| StageError {
                stage: Stage::FitJunctions,
                source,
            })?;
            write_junctions(&out, &fit.junctions)?;
            eprintln!(
                "{} active junctions, {} iterations{}",
                fit.junctions.active_count(),
                fit.iterations,
                if fit.converged { "" } else { " (not converged)" }
            );
        }
        Command::Distill {
            scene,
            line_cloud,
            junctions,
            out,
            obj,
            config,
        } => {
            let config = config.resolve()?;
            let scene = read_scene(&scene)?;
            let cloud = read_line_cloud(&line_cloud)?;
            let junctions = read_junctions(&junctions)?;
            let d = distill(&scene, &cloud, &junctions, &config)?;
            write_wireframe(&out, &d.wireframe)?;
            if let Some(obj) = obj {
                export_obj(&d.wireframe, &obj)?;
            }
            eprintln!("{} junctions, {} edges", d.wireframe.junctions().len(), d.wireframe.edges().len());
        }
        Command::Eval {
            scene,
            wireframe,
            out_dir,
            config,
        } => {
            let config = config.resolve()?;
            let scene = read_scene(&scene)?;
            let wf = read_wireframe(&wireframe)?;
            let metrics = evaluate(&scene, &wf, None, &config).map_err(|source| StageError {
                stage: Stage::Metrics,
                source,
            })?;
            std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            let report = Report::from_metrics(&wf, &metrics);
            report.write(&out_dir)?;
            print!("{}", report.to_text());
        }
        Command::ExportGaussianInit { junctions, wireframe, out } => {
            let js = match (junctions, wireframe) {
                (Some(j), _) => read_junctions(&j)?,
                (None, Some(w)) => JunctionSet::all_active(read_wireframe(&w)?.junctions().to_vec())?,
                (None, None) => bail!("one of --junctions or --wireframe is required"),
            };
            export_gaussian_init(&js, &out)?;
        }
        Command::Run { scene, out_dir, config } => {
            let config = config.resolve()?;
            let report = run_pipeline(&config, &scene, &out_dir)?;
            print!("{}", report.to_text());
        }
    }
    Ok(())
}
