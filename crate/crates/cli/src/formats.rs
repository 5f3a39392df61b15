//! Versioned text files for scenes, line clouds, junction sets and
//! wireframes.
//!
//! Every file is a single record with a `version` field. Floats are written
//! in their shortest round-trip form, so a write/read cycle is lossless.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wirefield_core::junctions::JunctionSet;
use wirefield_core::sdf::AnalyticSdf;
use wirefield_core::synth::SyntheticScene;
use wirefield_core::{
    Camera, CloudSegment, LineCloud, LineSegment3D, Mat3, Vec2, Vec3, WireframeGraph2D, WireframeGraph3D,
};

use crate::error::{Error, Result};
use crate::fsutil::{read_to_string, write_atomic};

pub const FORMAT_VERSION: &str = "neat/1";

type Row3 = [f64; 3];

fn row3(v: &Vec3) -> Row3 {
    [v.x, v.y, v.z]
}

fn mat_rows(m: &Mat3) -> [Row3; 3] {
    [0, 1, 2].map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]])
}

fn mat_from_rows(r: &[Row3; 3]) -> Mat3 {
    Mat3::new(
        r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraRecord {
    pub intrinsics: [Row3; 3],
    pub rotation: [Row3; 3],
    pub translation: Row3,
    pub width: u32,
    pub height: u32,
}

impl From<&Camera> for CameraRecord {
    fn from(c: &Camera) -> Self {
        Self {
            intrinsics: mat_rows(c.intrinsics()),
            rotation: mat_rows(c.rotation()),
            translation: row3(c.translation()),
            width: c.width(),
            height: c.height(),
        }
    }
}

impl CameraRecord {
    fn to_camera(&self) -> wirefield_core::Result<Camera> {
        Camera::new(
            mat_from_rows(&self.intrinsics),
            mat_from_rows(&self.rotation),
            Vec3::from(self.translation),
            self.width,
            self.height,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewRecord {
    pub vertices: Vec<[f64; 2]>,
    pub edges: Vec<(usize, usize)>,
}

impl From<&WireframeGraph2D> for ViewRecord {
    fn from(g: &WireframeGraph2D) -> Self {
        Self {
            vertices: g.vertices().iter().map(|v| [v.x, v.y]).collect(),
            edges: g.edges().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphRecord {
    pub junctions: Vec<Row3>,
    pub edges: Vec<(usize, usize)>,
}

impl From<&WireframeGraph3D> for GraphRecord {
    fn from(g: &WireframeGraph3D) -> Self {
        Self {
            junctions: g.junctions().iter().map(row3).collect(),
            edges: g.edges().to_vec(),
        }
    }
}

impl GraphRecord {
    fn to_graph(&self) -> wirefield_core::Result<WireframeGraph3D> {
        WireframeGraph3D::new(self.junctions.iter().map(|&p| Vec3::from(p)).collect(), self.edges.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum SdfRecord {
    Sphere { center: Row3, radius: f64 },
    Box { center: Row3, half_extents: Row3 },
    Union(Vec<SdfRecord>),
}

impl From<&AnalyticSdf> for SdfRecord {
    fn from(s: &AnalyticSdf) -> Self {
        match s {
            AnalyticSdf::Sphere { center, radius } => SdfRecord::Sphere {
                center: row3(center),
                radius: *radius,
            },
            AnalyticSdf::Box {
                center,
                half_extents,
            } => SdfRecord::Box {
                center: row3(center),
                half_extents: row3(half_extents),
            },
            AnalyticSdf::Union(parts) => SdfRecord::Union(parts.iter().map(SdfRecord::from).collect()),
        }
    }
}

impl From<&SdfRecord> for AnalyticSdf {
    fn from(s: &SdfRecord) -> Self {
        match s {
            SdfRecord::Sphere { center, radius } => AnalyticSdf::sphere(Vec3::from(*center), *radius),
            SdfRecord::Box {
                center,
                half_extents,
            } => AnalyticSdf::cuboid(Vec3::from(*center), Vec3::from(*half_extents)),
            SdfRecord::Union(parts) => AnalyticSdf::Union(parts.iter().map(AnalyticSdf::from).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: String,
    pub occlusion: bool,
    pub sdf: SdfRecord,
    pub gt_wireframe: GraphRecord,
    pub cameras: Vec<CameraRecord>,
    pub views: Vec<ViewRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireframeFile {
    pub version: String,
    pub junctions: Vec<Row3>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudSegmentRecord {
    pub a: Row3,
    pub b: Row3,
    pub view: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineCloudFile {
    pub version: String,
    pub segments: Vec<CloudSegmentRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionsFile {
    pub version: String,
    pub positions: Vec<Row3>,
    pub active: Vec<bool>,
}

/// Serializes `value` as pretty text.
pub fn to_text<T: Serialize>(value: &T) -> String {
    let config = ron::ser::PrettyConfig::new().depth_limit(3).indentor("  ".to_string());
    let mut s = ron::ser::to_string_pretty(value, config).expect("records always serialize");
    s.push('\n');
    s
}

/// Parses `text`, reporting syntax errors and missing fields with their
/// position, then checks the version field.
pub fn from_text<T: DeserializeOwned>(path: &Path, text: &str, version: impl Fn(&T) -> &str) -> Result<T> {
    let value: T = ron::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.span.start.line,
        column: e.span.start.col,
        message: e.code.to_string(),
    })?;
    let found = version(&value);
    if found != FORMAT_VERSION {
        return Err(Error::Version {
            path: path.to_path_buf(),
            found: found.to_string(),
            expected: FORMAT_VERSION,
        });
    }
    Ok(value)
}

fn read_file<T: DeserializeOwned>(path: &Path, version: impl Fn(&T) -> &str) -> Result<T> {
    from_text(path, &read_to_string(path)?, version)
}

pub fn scene_to_file(scene: &SyntheticScene) -> SceneFile {
    SceneFile {
        version: FORMAT_VERSION.to_string(),
        occlusion: scene.occlusion,
        sdf: SdfRecord::from(&scene.sdf),
        gt_wireframe: GraphRecord::from(&scene.gt_wireframe),
        cameras: scene.cameras.iter().map(CameraRecord::from).collect(),
        views: scene.views.iter().map(ViewRecord::from).collect(),
    }
}

pub fn scene_from_file(path: &Path, f: &SceneFile) -> Result<SyntheticScene> {
    let gt = f
        .gt_wireframe
        .to_graph()
        .map_err(|e| Error::invalid(path, "gt_wireframe", e))?;
    let cameras = f
        .cameras
        .iter()
        .enumerate()
        .map(|(i, c)| c.to_camera().map_err(|e| Error::invalid(path, format!("cameras[{i}]"), e)))
        .collect::<Result<Vec<_>>>()?;
    let views = f
        .views
        .iter()
        .enumerate()
        .map(|(i, v)| {
            WireframeGraph2D::new(v.vertices.iter().map(|&p| Vec2::from(p)).collect(), v.edges.clone())
                .map_err(|e| Error::invalid(path, format!("views[{i}]"), e))
        })
        .collect::<Result<Vec<_>>>()?;
    SyntheticScene::new(gt, AnalyticSdf::from(&f.sdf), cameras, views, f.occlusion)
        .map_err(|e| Error::invalid(path, "views", e))
}

pub fn write_scene(path: &Path, scene: &SyntheticScene) -> Result<()> {
    write_atomic(path, to_text(&scene_to_file(scene)).as_bytes())
}

pub fn read_scene(path: &Path) -> Result<SyntheticScene> {
    let f: SceneFile = read_file(path, |f: &SceneFile| &f.version)?;
    scene_from_file(path, &f)
}

pub fn wireframe_to_file(wf: &WireframeGraph3D) -> WireframeFile {
    let g = GraphRecord::from(wf);
    WireframeFile {
        version: FORMAT_VERSION.to_string(),
        junctions: g.junctions,
        edges: g.edges,
    }
}

pub fn write_wireframe(path: &Path, wf: &WireframeGraph3D) -> Result<()> {
    write_atomic(path, to_text(&wireframe_to_file(wf)).as_bytes())
}

pub fn read_wireframe(path: &Path) -> Result<WireframeGraph3D> {
    let f: WireframeFile = read_file(path, |f: &WireframeFile| &f.version)?;
    GraphRecord {
        junctions: f.junctions,
        edges: f.edges,
    }
    .to_graph()
    .map_err(|e| Error::invalid(path, "edges", e))
}

pub fn line_cloud_to_file(cloud: &LineCloud) -> LineCloudFile {
    LineCloudFile {
        version: FORMAT_VERSION.to_string(),
        segments: cloud
            .segments
            .iter()
            .map(|s| CloudSegmentRecord {
                a: row3(&s.segment.a),
                b: row3(&s.segment.b),
                view: s.view,
            })
            .collect(),
    }
}

pub fn write_line_cloud(path: &Path, cloud: &LineCloud) -> Result<()> {
    write_atomic(path, to_text(&line_cloud_to_file(cloud)).as_bytes())
}

pub fn read_line_cloud(path: &Path) -> Result<LineCloud> {
    let f: LineCloudFile = read_file(path, |f: &LineCloudFile| &f.version)?;
    let segments = f
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            LineSegment3D::new(Vec3::from(s.a), Vec3::from(s.b))
                .map(|segment| CloudSegment { segment, view: s.view })
                .map_err(|e| Error::invalid(path, format!("segments[{i}]"), e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LineCloud::new(segments))
}

pub fn junctions_to_file(js: &JunctionSet) -> JunctionsFile {
    JunctionsFile {
        version: FORMAT_VERSION.to_string(),
        positions: js.positions().iter().map(row3).collect(),
        active: js.active().to_vec(),
    }
}

pub fn write_junctions(path: &Path, js: &JunctionSet) -> Result<()> {
    write_atomic(path, to_text(&junctions_to_file(js)).as_bytes())
}

pub fn read_junctions(path: &Path) -> Result<JunctionSet> {
    let f: JunctionsFile = read_file(path, |f: &JunctionsFile| &f.version)?;
    JunctionSet::new(f.positions.iter().map(|&p| Vec3::from(p)).collect(), f.active)
        .map_err(|e| Error::invalid(path, "active", e))
}
