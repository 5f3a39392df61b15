//! Cameras, segments and wireframe graphs.
//!
//! World-to-camera convention: `x_cam = R * x_world + t`, camera looking down
//! its `+z` axis with `+x` right and `+y` down. Pixel `(i, j)` covers the
//! square `[i, i+1) x [j, j+1)`, so its center is `(i + 0.5, j + 0.5)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::math;
use crate::{Error, Result};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Segments shorter than this (world units or pixels) are rejected.
pub const EPS_LEN: f64 = 1e-8;

const ROTATION_TOL: f64 = 1e-9;

/// A pinhole camera without distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    intrinsics: Mat3,
    rotation: Mat3,
    translation: Vec3,
    width: u32,
    height: u32,
}

impl Camera {
    pub fn new(
        intrinsics: Mat3,
        rotation: Mat3,
        translation: Vec3,
        width: u32,
        height: u32,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidCamera(format!(
                "image size must be positive, got {width}x{height}"
            )));
        }
        let k = &intrinsics;
        if !(k[(0, 0)] > 0.0 && k[(1, 1)] > 0.0) {
            return Err(Error::InvalidCamera(format!(
                "focal lengths must be positive, got fx={} fy={}",
                k[(0, 0)],
                k[(1, 1)]
            )));
        }
        if k[(1, 0)] != 0.0 || k[(2, 0)] != 0.0 || k[(2, 1)] != 0.0 || k[(2, 2)] != 1.0 {
            return Err(Error::InvalidCamera(
                "intrinsics must be upper triangular with bottom row (0, 0, 1)".into(),
            ));
        }
        if !intrinsics.iter().all(|v| v.is_finite())
            || !rotation.iter().all(|v| v.is_finite())
            || !translation.iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidCamera("non-finite entry".into()));
        }
        let ortho = (rotation.transpose() * rotation - Mat3::identity()).abs().max();
        let det = rotation.determinant();
        if ortho > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::InvalidCamera(format!(
                "rotation is not a proper rotation (orthogonality error {ortho:e}, det {det})"
            )));
        }
        Ok(Self {
            intrinsics,
            rotation,
            translation,
            width,
            height,
        })
    }

    /// Builds the intrinsic matrix `[[fx, 0, cx], [0, fy, cy], [0, 0, 1]]`.
    pub fn intrinsics_matrix(fx: f64, fy: f64, cx: f64, cy: f64) -> Mat3 {
        Mat3::new(fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0)
    }

    /// A camera at `eye` looking at `target`.
    ///
    /// `up` is the preferred world up direction; when the viewing direction
    /// is within 1e-6 of `±up`, world `+x` is used instead.
    pub fn look_at(
        eye: Vec3,
        target: Vec3,
        up: Vec3,
        intrinsics: Mat3,
        width: u32,
        height: u32,
    ) -> Result<Self> {
        let forward = target - eye;
        let dist = forward.norm();
        if dist <= EPS_LEN {
            return Err(Error::InvalidCamera("eye coincides with target".into()));
        }
        let forward = forward / dist;
        let up_unit = up.normalize();
        let up = if 1.0 - forward.dot(&up_unit).abs() < 1e-6 {
            Vec3::x()
        } else {
            up_unit
        };
        let right = forward.cross(&up).normalize();
        let down = forward.cross(&right);
        let rotation = Mat3::from_rows(&[
            right.transpose(),
            down.transpose(),
            forward.transpose(),
        ]);
        let translation = -(rotation * eye);
        Self::new(intrinsics, rotation, translation, width, height)
    }

    pub fn intrinsics(&self) -> &Mat3 {
        &self.intrinsics
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Camera center in world coordinates, `-R^T t`.
    pub fn center(&self) -> Vec3 {
        -(self.rotation.transpose() * self.translation)
    }

    pub fn to_camera(&self, point: &Vec3) -> Vec3 {
        self.rotation * point + self.translation
    }

    /// Depth of `point` along the optical axis.
    pub fn depth(&self, point: &Vec3) -> f64 {
        self.to_camera(point).z
    }

    pub fn project(&self, point: &Vec3) -> Result<Vec2> {
        let pc = self.to_camera(point);
        if pc.z <= 0.0 {
            return Err(Error::BehindCamera { depth: pc.z });
        }
        let k = &self.intrinsics;
        let x = pc.x / pc.z;
        let y = pc.y / pc.z;
        Ok(Vec2::new(
            k[(0, 0)] * x + k[(0, 1)] * y + k[(0, 2)],
            k[(1, 1)] * y + k[(1, 2)],
        ))
    }

    /// Unit world-space direction of the ray through `pixel`.
    pub fn pixel_direction(&self, pixel: &Vec2) -> Vec3 {
        let k = &self.intrinsics;
        let y = (pixel.y - k[(1, 2)]) / k[(1, 1)];
        let x = (pixel.x - k[(0, 2)] - k[(0, 1)] * y) / k[(0, 0)];
        (self.rotation.transpose() * Vec3::new(x, y, 1.0)).normalize()
    }

    pub fn contains_pixel(&self, pixel: &Vec2) -> bool {
        pixel.x >= 0.0
            && pixel.y >= 0.0
            && pixel.x <= f64::from(self.width)
            && pixel.y <= f64::from(self.height)
    }
}

/// Pinhole projection of `point`; fails for points at or behind the camera.
pub fn project(camera: &Camera, point: &Vec3) -> Result<Vec2> {
    camera.project(point)
}

/// A non-degenerate 3D segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment3D {
    pub a: Vec3,
    pub b: Vec3,
}

impl LineSegment3D {
    pub fn new(a: Vec3, b: Vec3) -> Result<Self> {
        let length = (a - b).norm();
        if !(length > EPS_LEN) {
            return Err(Error::DegenerateSegment { length });
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn direction(&self) -> Vec3 {
        (self.b - self.a) / self.length()
    }

    pub fn midpoint(&self) -> Vec3 {
        (self.a + self.b) * 0.5
    }

    pub fn reversed(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }

    pub fn point_at(&self, s: f64) -> Vec3 {
        self.a + (self.b - self.a) * s
    }
}

/// A non-degenerate 2D segment in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment2D {
    pub p: Vec2,
    pub q: Vec2,
}

impl LineSegment2D {
    pub fn new(p: Vec2, q: Vec2) -> Result<Self> {
        let length = (p - q).norm();
        if !(length > EPS_LEN) {
            return Err(Error::DegenerateSegment { length });
        }
        Ok(Self { p, q })
    }

    pub fn length(&self) -> f64 {
        (self.q - self.p).norm()
    }

    pub fn direction(&self) -> Vec2 {
        (self.q - self.p) / self.length()
    }
}

/// Result of projecting a pixel onto a 2D segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentFoot {
    /// Distance from the point to the closed segment (equal to the distance
    /// to `foot` when `inside`).
    pub distance: f64,
    /// Perpendicular foot on the infinite line.
    pub foot: Vec2,
    /// Whether `foot` lies between the endpoints (inclusive).
    pub inside: bool,
}

pub fn point_to_segment_2d(p: &Vec2, seg: &LineSegment2D) -> SegmentFoot {
    let d = seg.q - seg.p;
    let s = (p - seg.p).dot(&d) / d.norm_squared();
    let foot = seg.p + d * s;
    let nearest = seg.p + d * s.clamp(0.0, 1.0);
    SegmentFoot {
        distance: (p - nearest).norm(),
        foot,
        inside: (0.0..=1.0).contains(&s),
    }
}

/// Distance from `p` to the closed segment (clamped to the endpoints).
pub fn distance_to_segment_2d(p: &Vec2, seg: &LineSegment2D) -> f64 {
    let d = seg.q - seg.p;
    let s = ((p - seg.p).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (p - (seg.p + d * s)).norm()
}

/// Closest point to `p` on the infinite line through `seg`.
pub fn project_point_to_line_3d(p: &Vec3, seg: &LineSegment3D) -> Vec3 {
    let d = seg.b - seg.a;
    let s = (p - seg.a).dot(&d) / d.norm_squared();
    seg.a + d * s
}

fn check_edges(
    n_vertices: usize,
    edges: &[(usize, usize)],
    length: impl Fn(usize, usize) -> f64,
) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (k, &(u, v)) in edges.iter().enumerate() {
        if u >= v {
            return Err(Error::InvalidGraph(format!(
                "edge {k} = ({u}, {v}) is not ordered u < v"
            )));
        }
        if v >= n_vertices {
            return Err(Error::InvalidGraph(format!(
                "edge {k} = ({u}, {v}) references a vertex out of range ({n_vertices} vertices)"
            )));
        }
        if !seen.insert((u, v)) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
        }
        let len = length(u, v);
        if !(len > EPS_LEN) {
            return Err(Error::InvalidGraph(format!(
                "edge ({u}, {v}) is degenerate (length {len:e})"
            )));
        }
    }
    Ok(())
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A per-view 2D wireframe: junction pixels plus segment edges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WireframeGraph2D {
    vertices: Vec<Vec2>,
    edges: Vec<(usize, usize)>,
}

impl WireframeGraph2D {
    pub fn new(vertices: Vec<Vec2>, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_edges(vertices.len(), &edges, |u, v| (vertices[u] - vertices[v]).norm())?;
        Ok(Self { vertices, edges })
    }

    /// Builds a graph from loose segments, merging bit-identical endpoints.
    /// Degenerate and duplicate segments are skipped.
    pub fn from_segments(segments: &[LineSegment2D]) -> Self {
        let mut vertices: Vec<Vec2> = Vec::new();
        let mut edges = Vec::new();
        let mut seen = BTreeSet::new();
        let index_of = |p: Vec2, vertices: &mut Vec<Vec2>| -> usize {
            match vertices.iter().position(|v| *v == p) {
                Some(i) => i,
                None => {
                    vertices.push(p);
                    vertices.len() - 1
                }
            }
        };
        for seg in segments {
            if !(seg.length() > EPS_LEN) {
                continue;
            }
            let u = index_of(seg.p, &mut vertices);
            let v = index_of(seg.q, &mut vertices);
            let key = ordered(u, v);
            if u != v && seen.insert(key) {
                edges.push(key);
            }
        }
        Self { vertices, edges }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn segment(&self, edge: usize) -> LineSegment2D {
        let (u, v) = self.edges[edge];
        LineSegment2D {
            p: self.vertices[u],
            q: self.vertices[v],
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = LineSegment2D> + '_ {
        (0..self.edges.len()).map(|e| self.segment(e))
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A 3D wireframe: junction positions plus edges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WireframeGraph3D {
    junctions: Vec<Vec3>,
    edges: Vec<(usize, usize)>,
}

impl WireframeGraph3D {
    pub fn new(junctions: Vec<Vec3>, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_edges(junctions.len(), &edges, |u, v| (junctions[u] - junctions[v]).norm())?;
        Ok(Self { junctions, edges })
    }

    pub fn junctions(&self) -> &[Vec3] {
        &self.junctions
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn segment(&self, edge: usize) -> LineSegment3D {
        let (u, v) = self.edges[edge];
        LineSegment3D {
            a: self.junctions[u],
            b: self.junctions[v],
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = LineSegment3D> + '_ {
        (0..self.edges.len()).map(|e| self.segment(e))
    }

    pub fn is_empty(&self) -> bool {
        self.junctions.is_empty() && self.edges.is_empty()
    }

    /// Every junction is referenced by at least one edge.
    pub fn is_finalized(&self) -> bool {
        let mut used = alloc::vec![false; self.junctions.len()];
        for &(u, v) in &self.edges {
            used[u] = true;
            used[v] = true;
        }
        used.into_iter().all(|u| u)
    }

    /// Keeps only `keep(edge_index)` edges, then drops junctions no longer
    /// referenced. Junction order is preserved.
    pub fn retain_edges(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let kept: Vec<(usize, usize)> = (0..self.edges.len())
            .filter(|&e| keep(e))
            .map(|e| self.edges[e])
            .collect();
        let mut remap = alloc::vec![usize::MAX; self.junctions.len()];
        let mut junctions = Vec::new();
        for &(u, v) in &kept {
            for j in [u, v] {
                if remap[j] == usize::MAX {
                    remap[j] = 0;
                }
            }
        }
        for (j, slot) in remap.iter_mut().enumerate() {
            if *slot != usize::MAX {
                *slot = junctions.len();
                junctions.push(self.junctions[j]);
            }
        }
        let edges = kept.iter().map(|&(u, v)| (remap[u], remap[v])).collect();
        Self { junctions, edges }
    }

    /// Drops junctions that no edge references.
    pub fn remove_isolated(&self) -> Self {
        self.retain_edges(|_| true)
    }

    pub fn with_junctions(&self, junctions: Vec<Vec3>) -> Result<Self> {
        if junctions.len() != self.junctions.len() {
            return Err(Error::InvalidGraph(format!(
                "expected {} junctions, got {}",
                self.junctions.len(),
                junctions.len()
            )));
        }
        Self::new(junctions, self.edges.clone())
    }
}

/// One segment of a line cloud, tagged with the view that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudSegment {
    pub segment: LineSegment3D,
    pub view: usize,
}

/// A redundant, noisy set of 3D segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineCloud {
    pub segments: Vec<CloudSegment>,
}

impl LineCloud {
    pub fn new(segments: Vec<CloudSegment>) -> Self {
        Self { segments }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Endpoints as a flat list `[a0, b0, a1, b1, ...]`.
    pub fn endpoints(&self) -> Vec<Vec3> {
        self.segments
            .iter()
            .flat_map(|s| [s.segment.a, s.segment.b])
            .collect()
    }

    /// Axis-aligned bounding box of all endpoints.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let mut it = self.endpoints().into_iter();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| (lo.inf(&p), hi.sup(&p))))
    }
}

/// Angle in degrees between two undirected 2D directions, in `[0, 90]`.
pub fn line_angle_deg_2d(a: &Vec2, b: &Vec2) -> f64 {
    let c = (a.dot(b) / (a.norm() * b.norm())).abs();
    math::acos(c) * (180.0 / core::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_camera(f: f64, c: f64) -> Camera {
        Camera::new(
            Camera::intrinsics_matrix(f, f, c, c),
            Mat3::identity(),
            Vec3::zeros(),
            512,
            512,
        )
        .unwrap()
    }

    #[test]
    fn projects_optical_axis_and_principal_point() {
        let p = identity_camera(1.0, 0.0).project(&Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p, Vec2::new(0.0, 0.0));
        let p = identity_camera(960.0, 256.0)
            .project(&Vec3::new(0.0, 0.0, 1.0))
            .unwrap();
        assert_eq!(p, Vec2::new(256.0, 256.0));
    }

    #[test]
    fn behind_camera_is_rejected() {
        let cam = identity_camera(1.0, 0.0);
        assert!(matches!(
            cam.project(&Vec3::new(0.0, 0.0, 0.0)),
            Err(Error::BehindCamera { .. })
        ));
        assert!(matches!(
            cam.project(&Vec3::new(1.0, 0.0, -2.0)),
            Err(Error::BehindCamera { .. })
        ));
    }

    #[test]
    fn look_at_projects_target_to_center() {
        let f = 60.0 / 32.0 * 512.0;
        assert_eq!(f, 960.0);
        let d = libm::sqrt(1.5 * 1.5 + 1.5 * 1.5);
        let cam = Camera::look_at(
            Vec3::new(0.0, 1.5, 1.5),
            Vec3::zeros(),
            Vec3::z(),
            Camera::intrinsics_matrix(f, f, 256.0, 256.0),
            512,
            512,
        )
        .unwrap();
        let p = cam.project(&Vec3::zeros()).unwrap();
        assert_close!(p.x, 256.0, 1e-9);
        assert_close!(p.y, 256.0, 1e-9);
        assert_close!(cam.center().norm(), d, 1e-12);
        assert_close!(cam.depth(&Vec3::zeros()), d, 1e-12);
        // world up should map to image up (negative y)
        let up = cam.project(&Vec3::new(0.0, 0.0, 0.1)).unwrap();
        assert!(up.y < 256.0);
    }

    #[test]
    fn look_at_straight_down_uses_fallback_up() {
        let cam = Camera::look_at(
            Vec3::new(0.0, 0.0, 3.0),
            Vec3::zeros(),
            Vec3::z(),
            Camera::intrinsics_matrix(100.0, 100.0, 50.0, 50.0),
            100,
            100,
        )
        .unwrap();
        let p = cam.project(&Vec3::zeros()).unwrap();
        assert_close!(p.x, 50.0, 1e-9);
        assert_close!(p.y, 50.0, 1e-9);
    }

    #[test]
    fn rejects_bad_cameras() {
        let k = Camera::intrinsics_matrix(1.0, 1.0, 0.0, 0.0);
        let mut r = Mat3::identity();
        r[(0, 0)] = 1.1;
        assert!(Camera::new(k, r, Vec3::zeros(), 1, 1).is_err());
        let reflect = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(Camera::new(k, reflect, Vec3::zeros(), 1, 1).is_err());
        let bad_k = Camera::intrinsics_matrix(-1.0, 1.0, 0.0, 0.0);
        assert!(Camera::new(bad_k, Mat3::identity(), Vec3::zeros(), 1, 1).is_err());
        let mut bottom = k;
        bottom[(2, 2)] = 2.0;
        assert!(Camera::new(bottom, Mat3::identity(), Vec3::zeros(), 1, 1).is_err());
        assert!(Camera::new(k, Mat3::identity(), Vec3::zeros(), 0, 1).is_err());
    }

    #[test]
    fn pixel_direction_inverts_projection() {
        let cam = Camera::look_at(
            Vec3::new(1.0, -2.0, 0.7),
            Vec3::new(0.1, 0.0, 0.0),
            Vec3::z(),
            Camera::intrinsics_matrix(700.0, 720.0, 250.0, 260.0),
            512,
            512,
        )
        .unwrap();
        let x = Vec3::new(0.2, 0.3, -0.1);
        let pix = cam.project(&x).unwrap();
        let dir = cam.pixel_direction(&pix);
        let expected = (x - cam.center()).normalize();
        assert!((dir - expected).norm() < 1e-12);
    }

    #[test]
    fn point_to_segment_examples() {
        let seg = LineSegment2D::new(Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0)).unwrap();
        let r = point_to_segment_2d(&Vec2::new(0.0, 1.0), &seg);
        assert_eq!((r.distance, r.foot, r.inside), (1.0, Vec2::new(0.0, 0.0), true));
        let r = point_to_segment_2d(&Vec2::new(-1.0, 0.0), &seg);
        assert_eq!((r.distance, r.foot, r.inside), (1.0, Vec2::new(-1.0, 0.0), false));
        let r = point_to_segment_2d(&Vec2::new(1.0, 0.0), &seg);
        assert_eq!((r.distance, r.foot, r.inside), (0.0, Vec2::new(1.0, 0.0), true));
    }

    #[test]
    fn project_point_to_line_examples() {
        let x_axis = LineSegment3D::new(Vec3::zeros(), Vec3::x()).unwrap();
        assert_eq!(
            project_point_to_line_3d(&Vec3::new(0.0, 0.0, 1.0), &x_axis),
            Vec3::zeros()
        );
        assert_eq!(
            project_point_to_line_3d(&Vec3::new(1.0, 0.0, 1.0), &x_axis),
            Vec3::new(1.0, 0.0, 0.0)
        );
        let p = Vec3::new(3.5, 0.0, 0.0);
        assert_eq!(project_point_to_line_3d(&p, &x_axis), p);
    }

    #[test]
    fn degenerate_segments_rejected() {
        assert!(LineSegment3D::new(Vec3::zeros(), Vec3::new(1e-9, 0.0, 0.0)).is_err());
        assert!(LineSegment2D::new(Vec2::zeros(), Vec2::zeros()).is_err());
    }

    #[test]
    fn graph_validation() {
        let v = alloc::vec![Vec3::zeros(), Vec3::x(), Vec3::y()];
        assert!(WireframeGraph3D::new(v.clone(), alloc::vec![(0, 1), (1, 2)]).is_ok());
        assert!(WireframeGraph3D::new(v.clone(), alloc::vec![(1, 0)]).is_err());
        assert!(WireframeGraph3D::new(v.clone(), alloc::vec![(0, 3)]).is_err());
        assert!(WireframeGraph3D::new(v.clone(), alloc::vec![(0, 1), (0, 1)]).is_err());
        let dup = alloc::vec![Vec3::zeros(), Vec3::zeros()];
        assert!(WireframeGraph3D::new(dup, alloc::vec![(0, 1)]).is_err());
    }

    #[test]
    fn retain_edges_reindexes() {
        let v = alloc::vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
        let g = WireframeGraph3D::new(v, alloc::vec![(0, 1), (2, 3)]).unwrap();
        let h = g.retain_edges(|e| e == 1);
        assert_eq!(h.junctions(), &[Vec3::y(), Vec3::z()]);
        assert_eq!(h.edges(), &[(0, 1)]);
        assert!(h.is_finalized());
    }

    #[test]
    fn from_segments_merges_shared_endpoints() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(1.0, 0.0);
        let c = Vec2::new(1.0, 1.0);
        let g = WireframeGraph2D::from_segments(&[
            LineSegment2D::new(a, b).unwrap(),
            LineSegment2D::new(c, b).unwrap(),
            LineSegment2D::new(b, a).unwrap(),
        ]);
        assert_eq!(g.vertices().len(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }
}
