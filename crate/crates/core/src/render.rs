//! Volume rendering of 3D line segments along attraction-field rays.
//!
//! Density comes from an SDF through the Laplace-CDF transform
//! `sigma = Psi_beta(-d) / beta`. Rays are discretized into strata; each
//! stratum contributes `w_i = T_i * (1 - exp(-sigma_i * dt_i))` with
//! `T_i = exp(-sum_{j<i} sigma_j * dt_j)`, so the weights of a ray never sum
//! past one. A rendered segment is the weight-normalized average of
//! `x_t + L(x_t)` over the ray.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{
    point_to_segment_2d, distance_to_segment_2d, Camera, LineSegment2D, LineSegment3D, Vec2, Vec3,
    WireframeGraph2D, WireframeGraph3D,
};
use crate::math;
use crate::sdf::AnalyticSdf;
use crate::{Error, Result};

/// Rays whose accumulated weight falls below this are treated as grazing or
/// background and discarded.
pub const MIN_SURFACE_MASS: f64 = 0.5;

/// `(1/beta) * Psi_beta(-d)` with `Psi_beta` the CDF of a zero-mean Laplace
/// distribution with scale `beta`.
pub fn density_from_sdf(d: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", "must be positive"));
    }
    Ok(laplace_density(d, beta))
}

fn laplace_density(d: f64, beta: f64) -> f64 {
    let s = -d;
    let psi = if s <= 0.0 {
        0.5 * math::exp(s / beta)
    } else {
        1.0 - 0.5 * math::exp(-s / beta)
    };
    psi / beta
}

/// Anything that assigns a volume density to points in space.
pub trait DensityField {
    fn density(&self, x: &Vec3) -> f64;
}

/// Density induced by an SDF and a scale `beta`.
#[derive(Debug, Clone, Copy)]
pub struct SdfDensity<'a> {
    sdf: &'a AnalyticSdf,
    beta: f64,
}

impl<'a> SdfDensity<'a> {
    pub fn new(sdf: &'a AnalyticSdf, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::param("beta", "must be positive"));
        }
        Ok(Self { sdf, beta })
    }

    pub fn sdf(&self) -> &AnalyticSdf {
        self.sdf
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl DensityField for SdfDensity<'_> {
    fn density(&self, x: &Vec3) -> f64 {
        laplace_density(self.sdf.eval(x), self.beta)
    }
}

/// Discretization of a ray interval `[t_near, t_far]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderQuadrature {
    t_near: f64,
    t_far: f64,
    n_samples: usize,
    stratified: bool,
}

impl RenderQuadrature {
    /// `stratified` places one node at the midpoint of each of `n_samples`
    /// equal strata; otherwise `n_samples` nodes span the interval including
    /// both ends.
    pub fn new(t_near: f64, t_far: f64, n_samples: usize, stratified: bool) -> Result<Self> {
        if !(t_near >= 0.0 && t_far > t_near && t_far.is_finite()) {
            return Err(Error::param("t_near/t_far", "need 0 <= t_near < t_far"));
        }
        if n_samples < 2 {
            return Err(Error::param("n_samples", "need at least 2 samples"));
        }
        Ok(Self {
            t_near,
            t_far,
            n_samples,
            stratified,
        })
    }

    /// Interval covering a bounding sphere as seen from `origin`.
    pub fn enclosing(origin: &Vec3, center: &Vec3, radius: f64, n_samples: usize) -> Result<Self> {
        let dist = (origin - center).norm();
        Self::new((dist - radius).max(0.0), dist + radius, n_samples, true)
    }

    pub fn t_near(&self) -> f64 {
        self.t_near
    }

    pub fn t_far(&self) -> f64 {
        self.t_far
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn stratified(&self) -> bool {
        self.stratified
    }

    pub fn with_samples(&self, n_samples: usize) -> Result<Self> {
        Self::new(self.t_near, self.t_far, n_samples, self.stratified)
    }

    /// `(t_i, dt_i)` nodes over `[a, b]` under this scheme.
    fn nodes(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
        let n = self.n_samples;
        let stratified = self.stratified;
        let step = if stratified {
            (b - a) / n as f64
        } else {
            (b - a) / (n - 1) as f64
        };
        (0..n).map(move |i| {
            if stratified {
                (a + (i as f64 + 0.5) * step, step)
            } else {
                // trapezoid weights
                let w = if i == 0 || i == n - 1 { 0.5 * step } else { step };
                (a + i as f64 * step, w)
            }
        })
    }
}

/// A camera ray through an attraction pixel of a 2D segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionRay {
    pub pixel: Vec2,
    pub origin: Vec3,
    /// Unit direction.
    pub direction: Vec3,
    pub target: LineSegment2D,
    pub view: usize,
}

impl AttractionRay {
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// `T(t) = exp(-int_{t_near}^{t} sigma)`, density before `t_near` taken as zero.
///
/// The optical depth is integrated on the quadrature's own grid over
/// `[t_near, t_far]`, with density constant per cell (the node value when
/// stratified, the mean of the two bounding nodes otherwise), so `T` is
/// continuous and non-increasing in `t`. Beyond `t_far` the last cell's
/// density is extended.
pub fn transmittance(
    ray: &AttractionRay,
    field: &impl DensityField,
    quad: &RenderQuadrature,
    t: f64,
) -> f64 {
    if t <= quad.t_near {
        return 1.0;
    }
    let n = quad.n_samples;
    let span = quad.t_far - quad.t_near;
    let cells = if quad.stratified { n } else { n - 1 };
    let width = span / cells as f64;
    let mut optical_depth = 0.0;
    for i in 0..cells {
        let lo = quad.t_near + i as f64 * width;
        if t <= lo {
            break;
        }
        let sigma = if quad.stratified {
            field.density(&ray.at(lo + 0.5 * width))
        } else {
            0.5 * (field.density(&ray.at(lo)) + field.density(&ray.at(lo + width)))
        };
        let covered = if i + 1 == cells { t - lo } else { (t - lo).min(width) };
        optical_depth += sigma * covered;
    }
    math::exp(-optical_depth)
}

/// One quadrature node of a rendered ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSample {
    pub t: f64,
    pub dt: f64,
    pub density: f64,
    /// Transmittance accumulated before this node.
    pub transmittance: f64,
    pub weight: f64,
}

pub fn render_weights(
    ray: &AttractionRay,
    field: &impl DensityField,
    quad: &RenderQuadrature,
) -> Vec<RenderSample> {
    let mut optical_depth = 0.0;
    quad.nodes(quad.t_near, quad.t_far)
        .map(|(t, dt)| {
            let density = field.density(&ray.at(t));
            let transmittance = math::exp(-optical_depth);
            let alpha = 1.0 - math::exp(-density * dt);
            optical_depth += density * dt;
            RenderSample {
                t,
                dt,
                density,
                transmittance,
                weight: transmittance * alpha,
            }
        })
        .collect()
}

/// Rays for every pixel attracted by a segment of `view`.
///
/// A pixel is attracted when its center projects perpendicularly inside some
/// segment at distance at most `tau_ray`; it is assigned to the nearest such
/// segment, the lowest edge index winning ties. Rays are returned in
/// row-major pixel order.
pub fn attraction_rays(
    view: &WireframeGraph2D,
    camera: &Camera,
    view_id: usize,
    tau_ray: f64,
) -> Result<Vec<AttractionRay>> {
    if !(tau_ray > 0.0) {
        return Err(Error::param("tau_ray", "must be positive"));
    }
    let width = camera.width() as usize;
    let height = camera.height() as usize;
    let mut best: Vec<Option<(f64, usize)>> = vec![None; width * height];
    for (edge, seg) in view.segments().enumerate() {
        let lo = seg.p.inf(&seg.q).add_scalar(-tau_ray);
        let hi = seg.p.sup(&seg.q).add_scalar(tau_ray);
        let Some((i0, i1)) = pixel_range(lo.x, hi.x, width) else {
            continue;
        };
        let Some((j0, j1)) = pixel_range(lo.y, hi.y, height) else {
            continue;
        };
        for j in j0..=j1 {
            for i in i0..=i1 {
                let center = Vec2::new(i as f64 + 0.5, j as f64 + 0.5);
                let foot = point_to_segment_2d(&center, &seg);
                if !foot.inside || foot.distance > tau_ray {
                    continue;
                }
                let slot = &mut best[j * width + i];
                if slot.is_none_or(|(d, _)| foot.distance < d) {
                    *slot = Some((foot.distance, edge));
                }
            }
        }
    }
    let origin = camera.center();
    Ok(best
        .iter()
        .enumerate()
        .filter_map(|(idx, slot)| {
            let (_, edge) = (*slot)?;
            let pixel = Vec2::new((idx % width) as f64 + 0.5, (idx / width) as f64 + 0.5);
            Some(AttractionRay {
                pixel,
                origin,
                direction: camera.pixel_direction(&pixel),
                target: view.segment(edge),
                view: view_id,
            })
        })
        .collect())
}

/// Pixel indices whose centers may fall within `[lo, hi]`.
fn pixel_range(lo: f64, hi: f64, size: usize) -> Option<(usize, usize)> {
    let first = math::floor(lo - 0.5).max(0.0);
    let last = math::ceil(hi - 0.5).min(size as f64 - 1.0);
    if size == 0 || last < first {
        return None;
    }
    Some((first as usize, last as usize))
}

/// Maps points along a ray to the displacements of the two endpoints of the
/// segment they belong to.
pub trait DisplacementField {
    fn displacements(&self, ray: &AttractionRay, points: &[Vec3]) -> Result<Vec<(Vec3, Vec3)>>;
}

/// The field that never displaces.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDisplacement;

impl DisplacementField for ZeroDisplacement {
    fn displacements(&self, _ray: &AttractionRay, points: &[Vec3]) -> Result<Vec<(Vec3, Vec3)>> {
        Ok(vec![(Vec3::zeros(), Vec3::zeros()); points.len()])
    }
}

/// Exact displacement field backed by a ground-truth wireframe.
///
/// A ray is associated with the ground-truth edge whose projection into the
/// ray's view best covers the ray's target segment (smallest worst-endpoint
/// distance, lowest edge index on ties). Every point on the ray is then
/// displaced onto that edge's endpoints, oriented to match the target.
#[derive(Debug, Clone, Copy)]
pub struct DisplacementOracle<'a> {
    wireframe: &'a WireframeGraph3D,
    cameras: &'a [Camera],
    truncate_to_view: bool,
}

/// The ground-truth edge a ray was associated with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub edge: usize,
    /// Endpoints ordered to match the target's `(p, q)`.
    pub start: Vec3,
    pub end: Vec3,
    /// Worst target-endpoint distance to the projected edge, in pixels.
    pub residual_px: f64,
}

impl<'a> DisplacementOracle<'a> {
    pub fn new(wireframe: &'a WireframeGraph3D, cameras: &'a [Camera]) -> Self {
        Self {
            wireframe,
            cameras,
            truncate_to_view: false,
        }
    }

    /// When enabled, the displaced endpoints are limited to the part of the
    /// edge that back-projects onto the ray's target segment.
    pub fn truncate_to_view(mut self, enabled: bool) -> Self {
        self.truncate_to_view = enabled;
        self
    }

    pub fn associate(&self, ray: &AttractionRay) -> Result<Association> {
        let camera = self
            .cameras
            .get(ray.view)
            .ok_or_else(|| Error::param("view", "ray view has no camera"))?;
        let mut best: Option<(f64, usize, LineSegment2D)> = None;
        for (edge, seg3) in self.wireframe.segments().enumerate() {
            let (Ok(pa), Ok(pb)) = (camera.project(&seg3.a), camera.project(&seg3.b)) else {
                continue;
            };
            let Ok(proj) = LineSegment2D::new(pa, pb) else {
                continue;
            };
            let cost = distance_to_segment_2d(&ray.target.p, &proj)
                .max(distance_to_segment_2d(&ray.target.q, &proj));
            if best.is_none_or(|(c, _, _)| cost < c) {
                best = Some((cost, edge, proj));
            }
        }
        let (residual_px, edge, proj) = best.ok_or(Error::NoAssociation)?;
        let seg3 = self.wireframe.segment(edge);
        let straight = (proj.p - ray.target.p).norm() + (proj.q - ray.target.q).norm();
        let swapped = (proj.p - ray.target.q).norm() + (proj.q - ray.target.p).norm();
        let seg3 = if swapped < straight { seg3.reversed() } else { seg3 };
        let (start, end) = if self.truncate_to_view {
            (
                back_project_onto(camera, &ray.target.p, &seg3),
                back_project_onto(camera, &ray.target.q, &seg3),
            )
        } else {
            (seg3.a, seg3.b)
        };
        Ok(Association {
            edge,
            start,
            end,
            residual_px,
        })
    }
}

/// Point of `seg` closest to the camera ray through `pixel`, clamped to the
/// segment.
fn back_project_onto(camera: &Camera, pixel: &Vec2, seg: &LineSegment3D) -> Vec3 {
    let c = camera.center();
    let r = camera.pixel_direction(pixel);
    let d = seg.b - seg.a;
    let w = seg.a - c;
    let a = d.dot(&d);
    let b = d.dot(&r);
    let e = r.dot(&r);
    let denom = a * e - b * b;
    if denom.abs() < 1e-15 * a * e {
        return seg.midpoint();
    }
    // minimize |seg.a + s d - (c + u r)|
    let s = (b * r.dot(&w) - e * d.dot(&w)) / denom;
    seg.point_at(s.clamp(0.0, 1.0))
}

impl DisplacementField for DisplacementOracle<'_> {
    fn displacements(&self, ray: &AttractionRay, points: &[Vec3]) -> Result<Vec<(Vec3, Vec3)>> {
        let assoc = self.associate(ray)?;
        Ok(points
            .iter()
            .map(|x| (assoc.start - x, assoc.end - x))
            .collect())
    }
}

/// Endpoints accumulated along one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderedSegment {
    pub start: Vec3,
    pub end: Vec3,
    /// Sum of the ray's render weights.
    pub mass: f64,
}

impl RenderedSegment {
    pub fn segment(&self) -> Result<LineSegment3D> {
        LineSegment3D::new(self.start, self.end)
    }
}

/// Renders the 3D segment seen by `ray`, normalizing by the accumulated
/// weight. Fails with [`Error::NoSurface`] when that weight is below
/// [`MIN_SURFACE_MASS`].
pub fn render_line_segment(
    ray: &AttractionRay,
    field: &impl DensityField,
    displacement: &impl DisplacementField,
    quad: &RenderQuadrature,
) -> Result<RenderedSegment> {
    let samples = render_weights(ray, field, quad);
    let mass: f64 = samples.iter().map(|s| s.weight).sum();
    if !(mass >= MIN_SURFACE_MASS) {
        return Err(Error::NoSurface {
            mass,
            required: MIN_SURFACE_MASS,
        });
    }
    let points: Vec<Vec3> = samples.iter().map(|s| ray.at(s.t)).collect();
    let offsets = displacement.displacements(ray, &points)?;
    let mut start = Vec3::zeros();
    let mut end = Vec3::zeros();
    for ((s, x), (d1, d2)) in samples.iter().zip(&points).zip(&offsets) {
        start += (x + d1) * s.weight;
        end += (x + d2) * s.weight;
    }
    Ok(RenderedSegment {
        start: start / mass,
        end: end / mass,
        mass,
    })
}

/// Squared pixel error between the projected rendered endpoints and the
/// target segment, `start <-> p` and `end <-> q`.
pub fn reprojection_loss(
    rendered: &LineSegment3D,
    target: &LineSegment2D,
    camera: &Camera,
) -> Result<f64> {
    let ps = camera.project(&rendered.a)?;
    let pt = camera.project(&rendered.b)?;
    Ok((ps - target.p).norm_squared() + (pt - target.q).norm_squared())
}
