use std::path::Path;
use std::process::Command;

use wirefield::error::Error;
use wirefield::export::{export_gaussian_init, export_obj, import_obj, parse_points3d};
use wirefield::formats::*;
use wirefield::report::lookup;
use wirefield::run_pipeline;
use wirefield_core::junctions::JunctionSet;
use wirefield_core::pipeline::{LineSource, PipelineConfig};
use wirefield_core::synth::{synthesize_line_cloud, CorruptionSpec, SceneSpec, Shape, SyntheticScene};
use wirefield_core::Vec3;

fn noisy_scene() -> SyntheticScene {
    SyntheticScene::generate(&SceneSpec {
        shape: Shape::LBracket,
        n_views: 6,
        occlusion: true,
        corruption: Some(CorruptionSpec {
            endpoint_noise_sigma: 1.0,
            drop_rate: 0.1,
            split_rate: 0.1,
            seed: 0,
        }),
        seed: 5,
        ..SceneSpec::default()
    })
    .unwrap()
}

fn synth_config() -> PipelineConfig {
    PipelineConfig {
        line_source: LineSource::Synthesize {
            duplicates_per_view: 3,
            noise_sigma_3d: 0.003,
        },
        seed: 9,
        ..PipelineConfig::default()
    }
}

#[test]
fn scene_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.ron");
    let scene = noisy_scene();
    write_scene(&path, &scene).unwrap();
    assert_eq!(read_scene(&path).unwrap(), scene);
}

#[test]
fn cloud_junction_and_wireframe_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let scene = noisy_scene();
    let cloud = synthesize_line_cloud(&scene, 2, 0.01, 1).unwrap();
    let p = dir.path().join("cloud.ron");
    write_line_cloud(&p, &cloud).unwrap();
    assert_eq!(read_line_cloud(&p).unwrap(), cloud);

    let js = JunctionSet::new(
        vec![Vec3::new(0.1, 0.2, 0.3), Vec3::new(1.0 / 3.0, -2.0 / 7.0, 1e-300)],
        vec![true, false],
    )
    .unwrap();
    let p = dir.path().join("junctions.ron");
    write_junctions(&p, &js).unwrap();
    assert_eq!(read_junctions(&p).unwrap(), js);

    let p = dir.path().join("wireframe.ron");
    write_wireframe(&p, &scene.gt_wireframe).unwrap();
    assert_eq!(read_wireframe(&p).unwrap(), scene.gt_wireframe);
}

#[test]
fn missing_camera_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.ron");
    let text = to_text(&scene_to_file(&noisy_scene()));
    let first_width = text.find("width:").unwrap();
    let line_end = first_width + text[first_width..].find('\n').unwrap() + 1;
    std::fs::write(&path, format!("{}{}", &text[..first_width], &text[line_end..])).unwrap();
    let err = read_scene(&path).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, Error::Parse { .. }), "{msg}");
    assert!(msg.contains("width"), "{msg}");
}

#[test]
fn truncated_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.ron");
    let text = to_text(&scene_to_file(&noisy_scene()));
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert!(matches!(read_scene(&path), Err(Error::Parse { .. })));
}

#[test]
fn invalid_rotation_names_the_camera() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.ron");
    let mut f = scene_to_file(&noisy_scene());
    f.cameras[2].rotation[0][0] += 0.1;
    std::fs::write(&path, to_text(&f)).unwrap();
    let msg = read_scene(&path).unwrap_err().to_string();
    assert!(msg.contains("cameras[2]"), "{msg}");
}

#[test]
fn obj_and_points3d_files() {
    let dir = tempfile::tempdir().unwrap();
    let (cube, _) = Shape::Cube.build();
    let p = dir.path().join("cube.obj");
    export_obj(&cube, &p).unwrap();
    assert_eq!(import_obj(&p).unwrap(), cube);

    let mut active = vec![true; 8];
    active[3] = false;
    let js = JunctionSet::new(cube.junctions().to_vec(), active).unwrap();
    let p = dir.path().join("points3D.txt");
    export_gaussian_init(&js, &p).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    assert_eq!(parse_points3d(&p, &text).unwrap(), js.active_positions());
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 7);
}

#[test]
fn stage_failures_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, sdf) = Shape::Cube.build();
    let empty = SyntheticScene::new(gt, sdf, vec![], vec![], false).unwrap();
    let scene_path = dir.path().join("scene.ron");
    write_scene(&scene_path, &empty).unwrap();
    let msg = run_pipeline(&synth_config(), &scene_path, &dir.path().join("out"))
        .unwrap_err()
        .to_string();
    assert!(msg.contains("fit-junctions"), "{msg}");
}

#[test]
fn higher_visibility_threshold_keeps_fewer_edges() {
    let dir = tempfile::tempdir().unwrap();
    let scene_path = dir.path().join("scene.ron");
    write_scene(&scene_path, &noisy_scene()).unwrap();
    let edges = |k: usize| {
        let cfg = PipelineConfig {
            vis_threshold: k,
            ..synth_config()
        };
        run_pipeline(&cfg, &scene_path, &dir.path().join(format!("out{k}"))).unwrap().edges
    };
    assert!(edges(4) <= edges(1));
}

fn cli(args: &[&str], cwd: &Path) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_wirefield"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn cli_stages_chain_and_flags_beat_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("config.toml"),
        "line_source = \"synthesize\"\nduplicates_per_view = 2\nvis_threshold = 99\nseed = 4\n",
    )
    .unwrap();
    cli(&["gen", "--n-views", "5", "--distance", "4", "--seed", "2", "--out", "scene.ron"], d);
    let common = ["--config", "config.toml", "--vis-threshold", "1"];
    cli(&[&["render-lines", "--scene", "scene.ron", "-o", "cloud.ron"][..], &common].concat(), d);
    cli(&[&["fit-junctions", "--line-cloud", "cloud.ron", "-o", "j.ron"][..], &common].concat(), d);
    cli(
        &[
            &["distill", "--scene", "scene.ron", "--line-cloud", "cloud.ron", "--junctions", "j.ron", "-o", "w.ron"][..],
            &common,
        ]
        .concat(),
        d,
    );
    let report = cli(&["eval", "--scene", "scene.ron", "--wireframe", "w.ron", "--out-dir", "eval"], d);
    assert_eq!(lookup(&report, "edges"), Some("12"));
    assert_eq!(lookup(&report, "recall_l@0.01"), Some("1.0"));
    assert!(d.join("eval/report.json").exists());
    cli(&["export-gaussian-init", "--junctions", "j.ron", "-o", "p.txt"], d);
    let points = std::fs::read_to_string(d.join("p.txt")).unwrap();
    assert_eq!(points.lines().filter(|l| !l.starts_with('#')).count(), 8);

    let run = cli(&[&["run", "--scene", "scene.ron", "--out-dir", "run"][..], &common].concat(), d);
    assert_eq!(lookup(&run, "edges"), Some("12"));
    assert_eq!(
        std::fs::read(d.join("run/wireframe.ron")).unwrap(),
        std::fs::read(d.join("w.ron")).unwrap()
    );
}
