//! Synthetic ground truth: normalized wireframes with matching SDFs, random
//! camera placements, projected (optionally occluded and corrupted) 2D
//! views, and noisy line clouds standing in for a learned line field.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::geometry::{
    Camera, CloudSegment, LineCloud, LineSegment2D, LineSegment3D, Vec2, Vec3, WireframeGraph2D,
    WireframeGraph3D, EPS_LEN,
};
use crate::math;
use crate::sdf::{sphere_trace, AnalyticSdf, TraceHit, TraceParams};
use crate::{Error, Result};

/// Samples per edge for the occlusion test.
pub const OCCLUSION_SAMPLES: usize = 64;
/// Shortest visible run, in pixels, that is reported as a 2D segment.
pub const MIN_RUN_PX: f64 = 5.0;
/// A surface hit this close before a sample point still counts as reaching it.
pub const OCCLUSION_SLACK: f64 = 5e-3;
/// Camera-space depth below which edges are clipped away.
pub const NEAR_PLANE: f64 = 1e-3;

/// `(center, scale)` such that `(x - center) * scale` maps the bounding box
/// of `wf` to a box centered at the origin with longest side 1.
pub fn normalization(wf: &WireframeGraph3D) -> Result<(Vec3, f64)> {
    let mut it = wf.junctions().iter();
    let first = it.next().ok_or(Error::EmptyInput("wireframe"))?;
    let (lo, hi) = it.fold((*first, *first), |(lo, hi), p| (lo.inf(p), hi.sup(p)));
    let side = (hi - lo).max();
    if !(side > EPS_LEN) {
        return Err(Error::InvalidGraph("wireframe has zero extent".into()));
    }
    Ok(((lo + hi) * 0.5, 1.0 / side))
}

pub fn normalize_wireframe(wf: &WireframeGraph3D) -> Result<WireframeGraph3D> {
    let (center, scale) = normalization(wf)?;
    wf.with_junctions(wf.junctions().iter().map(|p| (p - center) * scale).collect())
}

/// Built-in shapes, each a wireframe with a matching SDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Axis-aligned cube: 8 junctions, 12 edges.
    Cube,
    /// L-shaped prism: 12 junctions, 18 edges, one concave edge.
    LBracket,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Cube => "cube",
            Shape::LBracket => "lbracket",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "cube" => Some(Shape::Cube),
            "lbracket" => Some(Shape::LBracket),
            _ => None,
        }
    }

    fn raw(self) -> (WireframeGraph3D, AnalyticSdf) {
        match self {
            Shape::Cube => {
                let junctions = (0..8)
                    .map(|i| {
                        Vec3::new(
                            (i & 1) as f64,
                            ((i >> 1) & 1) as f64,
                            ((i >> 2) & 1) as f64,
                        )
                    })
                    .collect();
                let mut edges = Vec::new();
                for i in 0..8usize {
                    for bit in [1, 2, 4] {
                        if i & bit == 0 {
                            edges.push((i, i | bit));
                        }
                    }
                }
                edges.sort_unstable();
                let wf = WireframeGraph3D::new(junctions, edges).expect("cube is valid");
                (wf, AnalyticSdf::cuboid(Vec3::repeat(0.5), Vec3::repeat(0.5)))
            }
            Shape::LBracket => {
                // profile in the xz plane, extruded along y
                let profile = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)];
                let mut junctions = Vec::new();
                for y in [0.0, 1.0] {
                    for &(x, z) in &profile {
                        junctions.push(Vec3::new(x, y, z));
                    }
                }
                let mut edges = Vec::new();
                for k in 0..6 {
                    let next = (k + 1) % 6;
                    edges.push((k.min(next), k.max(next)));
                    edges.push((6 + k.min(next), 6 + k.max(next)));
                    edges.push((k, k + 6));
                }
                edges.sort_unstable();
                let wf = WireframeGraph3D::new(junctions, edges).expect("bracket is valid");
                let sdf = AnalyticSdf::Union(vec![
                    AnalyticSdf::cuboid(Vec3::new(1.0, 0.5, 0.5), Vec3::new(1.0, 0.5, 0.5)),
                    AnalyticSdf::cuboid(Vec3::new(0.5, 0.5, 1.5), Vec3::new(0.5, 0.5, 0.5)),
                ]);
                (wf, sdf)
            }
        }
    }

    /// The normalized wireframe and its SDF, transformed together.
    pub fn build(self) -> (WireframeGraph3D, AnalyticSdf) {
        let (wf, sdf) = self.raw();
        let (center, scale) = normalization(&wf).expect("preset is nonempty");
        let wf = wf
            .with_junctions(wf.junctions().iter().map(|p| (p - center) * scale).collect())
            .expect("scaling keeps edges valid");
        (wf, sdf.transformed(&center, scale))
    }
}

/// Ring distance of the camera placement, `sqrt(1.5^2 + 1.5^2)`.
pub fn default_camera_distance() -> f64 {
    math::sqrt(1.5 * 1.5 + 1.5 * 1.5)
}

/// `n` cameras at seeded uniform positions on the sphere of radius
/// `distance`, all looking at the origin with `fx = fy = focal_mm /
/// sensor_mm * resolution` and the principal point at the image center.
pub fn sample_cameras(
    n: usize,
    distance: f64,
    focal_mm: f64,
    sensor_mm: f64,
    resolution: u32,
    seed: u64,
) -> Result<Vec<Camera>> {
    if n == 0 {
        return Err(Error::param("n", "need at least one camera"));
    }
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::param("distance", "must be positive and finite"));
    }
    if !(focal_mm > 0.0 && sensor_mm > 0.0) || resolution == 0 {
        return Err(Error::param("intrinsics", "focal, sensor and resolution must be positive"));
    }
    let f = focal_mm / sensor_mm * resolution as f64;
    let c = resolution as f64 / 2.0;
    let k = Camera::intrinsics_matrix(f, f, c, c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cameras = Vec::with_capacity(n);
    while cameras.len() < n {
        let d = Vec3::from_fn(|_, _| StandardNormal.sample(&mut rng));
        let norm = d.norm();
        if norm < 1e-6 {
            continue;
        }
        let eye = d * (distance / norm);
        cameras.push(Camera::look_at(eye, Vec3::zeros(), Vec3::z(), k, resolution, resolution)?);
    }
    Ok(cameras)
}

/// Clips `seg` (camera space) to `z >= NEAR_PLANE`.
fn clip_near(a: Vec3, b: Vec3) -> Option<(Vec3, Vec3)> {
    match (a.z >= NEAR_PLANE, b.z >= NEAR_PLANE) {
        (true, true) => Some((a, b)),
        (false, false) => None,
        (a_in, _) => {
            let s = (NEAR_PLANE - a.z) / (b.z - a.z);
            let cut = a + (b - a) * s;
            if a_in {
                Some((a, cut))
            } else {
                Some((cut, b))
            }
        }
    }
}

/// Liang-Barsky clip of `p -> q` to `[0, w] x [0, h]`.
fn clip_rect(p: Vec2, q: Vec2, w: f64, h: f64) -> Option<(Vec2, Vec2)> {
    let d = q - p;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (pk, qk) in [(-d.x, p.x), (d.x, w - p.x), (-d.y, p.y), (d.y, h - p.y)] {
        if pk == 0.0 {
            if qk < 0.0 {
                return None;
            }
        } else {
            let r = qk / pk;
            if pk < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((p + d * t0, p + d * t1))
}

fn project_camera_space(camera: &Camera, pc: &Vec3) -> Vec2 {
    let k = camera.intrinsics();
    let (x, y) = (pc.x / pc.z, pc.y / pc.z);
    Vec2::new(k[(0, 0)] * x + k[(0, 1)] * y + k[(0, 2)], k[(1, 1)] * y + k[(1, 2)])
}

/// Whether the camera sees `point` unobstructed by `sdf`.
pub fn point_visible(camera: &Camera, sdf: &AnalyticSdf, point: &Vec3) -> bool {
    let Ok(pixel) = camera.project(point) else {
        return false;
    };
    if !camera.contains_pixel(&pixel) {
        return false;
    }
    let origin = camera.center();
    let to = point - origin;
    let dist = to.norm();
    match sphere_trace(sdf, &origin, &(to / dist), dist, TraceParams::default()) {
        TraceHit::Clear => true,
        TraceHit::Surface(t) => t >= dist - OCCLUSION_SLACK,
        TraceHit::Exhausted => false,
    }
}

/// The 2D segments under which `seg` appears in `camera`.
///
/// Without `sdf` the whole edge is projected (clipped to the near plane and
/// the image). With `sdf` the edge is sampled at [`OCCLUSION_SAMPLES`]
/// points and each maximal run of visible samples at least [`MIN_RUN_PX`]
/// long becomes a segment.
pub fn project_edge(seg: &LineSegment3D, camera: &Camera, sdf: Option<&AnalyticSdf>) -> Vec<LineSegment2D> {
    let (w, h) = (camera.width() as f64, camera.height() as f64);
    let Some(sdf) = sdf else {
        let clipped = clip_near(camera.to_camera(&seg.a), camera.to_camera(&seg.b))
            .and_then(|(a, b)| {
                clip_rect(project_camera_space(camera, &a), project_camera_space(camera, &b), w, h)
            });
        return clipped
            .and_then(|(p, q)| LineSegment2D::new(p, q).ok())
            .into_iter()
            .collect();
    };

    let last = OCCLUSION_SAMPLES - 1;
    let visible: Vec<Option<Vec2>> = (0..OCCLUSION_SAMPLES)
        .map(|k| {
            let x = seg.point_at(k as f64 / last as f64);
            if point_visible(camera, sdf, &x) {
                camera.project(&x).ok()
            } else {
                None
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < visible.len() {
        if visible[k].is_none() {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < visible.len() && visible[k + 1].is_some() {
            k += 1;
        }
        let (p, q) = (visible[start].unwrap(), visible[k].unwrap());
        if (q - p).norm() >= MIN_RUN_PX {
            if let Ok(s) = LineSegment2D::new(p, q) {
                out.push(s);
            }
        }
        k += 1;
    }
    out
}

/// Projects every edge of `wf` into `camera`; see [`project_edge`].
/// `occlusion` has no effect without an SDF.
pub fn project_wireframe(
    wf: &WireframeGraph3D,
    camera: &Camera,
    sdf: Option<&AnalyticSdf>,
    occlusion: bool,
) -> WireframeGraph2D {
    let sdf = if occlusion { sdf } else { None };
    let segments: Vec<LineSegment2D> = wf.segments().flat_map(|s| project_edge(&s, camera, sdf)).collect();
    WireframeGraph2D::from_segments(&segments)
}

/// Imperfections applied to a 2D view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionSpec {
    /// Pixels.
    pub endpoint_noise_sigma: f64,
    pub drop_rate: f64,
    pub split_rate: f64,
    pub seed: u64,
}

impl Default for CorruptionSpec {
    fn default() -> Self {
        Self {
            endpoint_noise_sigma: 0.0,
            drop_rate: 0.0,
            split_rate: 0.0,
            seed: 0,
        }
    }
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.endpoint_noise_sigma >= 0.0 && self.endpoint_noise_sigma.is_finite()) {
            return Err(Error::param("endpoint_noise_sigma", "must be finite and >= 0"));
        }
        for (name, p) in [("drop_rate", self.drop_rate), ("split_rate", self.split_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Perturbs every vertex, then drops or splits each edge.
///
/// Random draws happen in a fixed order (vertex noise first, then per edge
/// the drop draw and, for kept edges, the split draws), so the output is a
/// function of the input and `spec` alone. Edges that become degenerate are
/// dropped.
pub fn corrupt_view(view: &WireframeGraph2D, spec: &CorruptionSpec) -> Result<WireframeGraph2D> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut vertices: Vec<Vec2> = view.vertices().to_vec();
    if spec.endpoint_noise_sigma > 0.0 {
        let noise = Normal::new(0.0, spec.endpoint_noise_sigma).expect("validated sigma");
        for v in &mut vertices {
            v.x += noise.sample(&mut rng);
            v.y += noise.sample(&mut rng);
        }
    }
    let mut edges = Vec::new();
    let push = |edges: &mut Vec<(usize, usize)>, vertices: &[Vec2], u: usize, v: usize| {
        if (vertices[u] - vertices[v]).norm() > EPS_LEN {
            edges.push((u.min(v), u.max(v)));
        }
    };
    for &(u, v) in view.edges() {
        if rng.random::<f64>() < spec.drop_rate {
            continue;
        }
        if rng.random::<f64>() < spec.split_rate {
            let t: f64 = rng.random();
            let mid = vertices[u] + (vertices[v] - vertices[u]) * t;
            vertices.push(mid);
            let m = vertices.len() - 1;
            push(&mut edges, &vertices, u, m);
            push(&mut edges, &vertices, v, m);
        } else {
            push(&mut edges, &vertices, u, v);
        }
    }
    WireframeGraph2D::new(vertices, edges)
}

/// Ground truth plus its observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub gt_wireframe: WireframeGraph3D,
    pub sdf: AnalyticSdf,
    pub cameras: Vec<Camera>,
    pub views: Vec<WireframeGraph2D>,
    /// Whether edge visibility accounts for self-occlusion.
    pub occlusion: bool,
}

/// Parameters of [`SyntheticScene::generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub shape: Shape,
    pub n_views: usize,
    pub distance: f64,
    pub focal_mm: f64,
    pub sensor_mm: f64,
    pub resolution: u32,
    pub occlusion: bool,
    /// Applied to every view, reseeded per view from `seed`.
    pub corruption: Option<CorruptionSpec>,
    pub seed: u64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            shape: Shape::Cube,
            n_views: 20,
            distance: default_camera_distance(),
            focal_mm: 60.0,
            sensor_mm: 32.0,
            resolution: 512,
            occlusion: false,
            corruption: None,
            seed: 0,
        }
    }
}

impl SyntheticScene {
    pub fn new(
        gt_wireframe: WireframeGraph3D,
        sdf: AnalyticSdf,
        cameras: Vec<Camera>,
        views: Vec<WireframeGraph2D>,
        occlusion: bool,
    ) -> Result<Self> {
        if cameras.len() != views.len() {
            return Err(Error::param("views", "one view per camera required"));
        }
        Ok(Self {
            gt_wireframe,
            sdf,
            cameras,
            views,
            occlusion,
        })
    }

    pub fn generate(spec: &SceneSpec) -> Result<Self> {
        let (wf, sdf) = spec.shape.build();
        let cameras = sample_cameras(
            spec.n_views,
            spec.distance,
            spec.focal_mm,
            spec.sensor_mm,
            spec.resolution,
            spec.seed,
        )?;
        let mut views = Vec::with_capacity(cameras.len());
        for (i, cam) in cameras.iter().enumerate() {
            let view = project_wireframe(&wf, cam, Some(&sdf), spec.occlusion);
            views.push(match &spec.corruption {
                Some(c) => corrupt_view(&view, &c.with_seed(mix_seed(spec.seed, i as u64)))?,
                None => view,
            });
        }
        Self::new(wf, sdf, cameras, views, spec.occlusion)
    }

    fn occluder(&self) -> Option<&AnalyticSdf> {
        self.occlusion.then_some(&self.sdf)
    }

    /// Whether ground-truth edge `e` shows up in view `v`.
    pub fn edge_visible(&self, e: usize, v: usize) -> bool {
        !project_edge(&self.gt_wireframe.segment(e), &self.cameras[v], self.occluder()).is_empty()
    }
}

/// Derives a per-item seed from a base seed (splitmix64 finalizer).
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A redundant noisy cloud: for every view and every ground-truth edge
/// visible in it, `duplicates_per_view` copies with Gaussian endpoint noise.
pub fn synthesize_line_cloud(
    scene: &SyntheticScene,
    duplicates_per_view: usize,
    noise_sigma_3d: f64,
    seed: u64,
) -> Result<LineCloud> {
    if duplicates_per_view == 0 {
        return Err(Error::param("duplicates_per_view", "must be at least 1"));
    }
    if !(noise_sigma_3d >= 0.0 && noise_sigma_3d.is_finite()) {
        return Err(Error::param("noise_sigma_3d", "must be finite and >= 0"));
    }
    let noise = Normal::new(0.0, noise_sigma_3d).expect("validated sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |p: &Vec3| {
        if noise_sigma_3d > 0.0 {
            p + Vec3::from_fn(|_, _| noise.sample(&mut rng))
        } else {
            *p
        }
    };
    let mut segments = Vec::new();
    for view in 0..scene.cameras.len() {
        for (e, seg) in scene.gt_wireframe.segments().enumerate() {
            if !scene.edge_visible(e, view) {
                continue;
            }
            for _ in 0..duplicates_per_view {
                let (a, b) = (jitter(&seg.a), jitter(&seg.b));
                if let Ok(segment) = LineSegment3D::new(a, b) {
                    segments.push(CloudSegment { segment, view });
                }
            }
        }
    }
    Ok(LineCloud::new(segments))
}

/// Upper-bound reconstruction rates under a set of 2D detections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealBaseline {
    pub junction_rate: f64,
    pub line_rate: f64,
    pub junctions_supported: usize,
    pub junctions_total: usize,
    pub lines_supported: usize,
    pub lines_total: usize,
}

fn rate(k: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

/// Fraction of ground-truth junctions and lines some view supports.
///
/// A junction is supported when, in some view, an endpoint of a detected
/// segment lies within `tau_px` of its projection. A line is supported when
/// some detected segment matches its projected endpoints within `tau_px`
/// each, under the better of the two endpoint orderings.
pub fn ideal_baseline(
    scene: &SyntheticScene,
    detections: &[WireframeGraph2D],
    tau_px: f64,
) -> Result<IdealBaseline> {
    if detections.len() != scene.cameras.len() {
        return Err(Error::param("detections", "one detection graph per camera required"));
    }
    let gt = &scene.gt_wireframe;
    let mut junction_ok = vec![false; gt.junctions().len()];
    let mut line_ok = vec![false; gt.edges().len()];
    for (cam, det) in scene.cameras.iter().zip(detections) {
        let projected: Vec<Option<Vec2>> = gt.junctions().iter().map(|j| cam.project(j).ok()).collect();
        let dets: Vec<LineSegment2D> = det.segments().collect();
        for (k, p) in projected.iter().enumerate() {
            let Some(p) = p else { continue };
            if dets
                .iter()
                .any(|s| (s.p - p).norm() <= tau_px || (s.q - p).norm() <= tau_px)
            {
                junction_ok[k] = true;
            }
        }
        for (e, &(u, v)) in gt.edges().iter().enumerate() {
            let (Some(pu), Some(pv)) = (projected[u], projected[v]) else {
                continue;
            };
            if dets.iter().any(|s| {
                let direct = (s.p - pu).norm().max((s.q - pv).norm());
                let flipped = (s.p - pv).norm().max((s.q - pu).norm());
                direct.min(flipped) <= tau_px
            }) {
                line_ok[e] = true;
            }
        }
    }
    let js = junction_ok.iter().filter(|&&b| b).count();
    let ls = line_ok.iter().filter(|&&b| b).count();
    Ok(IdealBaseline {
        junction_rate: rate(js, junction_ok.len()),
        line_rate: rate(ls, line_ok.len()),
        junctions_supported: js,
        junctions_total: junction_ok.len(),
        lines_supported: ls,
        lines_total: line_ok.len(),
    })
}
