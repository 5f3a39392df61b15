//! Analytic signed distance fields (negative inside).

use alloc::vec::Vec;

use crate::geometry::Vec3;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticSdf {
    Sphere { center: Vec3, radius: f64 },
    /// Axis-aligned box.
    Box { center: Vec3, half_extents: Vec3 },
    Union(Vec<AnalyticSdf>),
}

impl AnalyticSdf {
    pub fn sphere(center: Vec3, radius: f64) -> Self {
        AnalyticSdf::Sphere { center, radius }
    }

    pub fn cuboid(center: Vec3, half_extents: Vec3) -> Self {
        AnalyticSdf::Box {
            center,
            half_extents,
        }
    }

    /// Signed distance at `x`. Exact for spheres and for boxes; a union is
    /// exact outside and a bound inside.
    pub fn eval(&self, x: &Vec3) -> f64 {
        match self {
            AnalyticSdf::Sphere { center, radius } => (x - center).norm() - radius,
            AnalyticSdf::Box {
                center,
                half_extents,
            } => {
                let q = (x - center).abs() - half_extents;
                let outside = q.sup(&Vec3::zeros()).norm();
                let inside = q.max().min(0.0);
                outside + inside
            }
            AnalyticSdf::Union(parts) => parts
                .iter()
                .map(|p| p.eval(x))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Analytic gradient at `x`. It has unit norm wherever the field is
    /// differentiable and is the zero vector where no direction is defined
    /// (sphere center, empty union).
    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        match self {
            AnalyticSdf::Sphere { center, .. } => {
                let d = x - center;
                let n = d.norm();
                if n > 0.0 {
                    d / n
                } else {
                    Vec3::zeros()
                }
            }
            AnalyticSdf::Box {
                center,
                half_extents,
            } => {
                let p = x - center;
                let q = p.abs() - half_extents;
                let sign = p.map(|c| if c < 0.0 { -1.0 } else { 1.0 });
                let outer = q.sup(&Vec3::zeros());
                let n = outer.norm();
                if n > 0.0 {
                    (outer / n).component_mul(&sign)
                } else {
                    // inside or on a face: the nearest face wins (lowest axis on ties)
                    let axis = q.imax();
                    let mut g = Vec3::zeros();
                    g[axis] = sign[axis];
                    g
                }
            }
            AnalyticSdf::Union(parts) => {
                let mut best: Option<(f64, &AnalyticSdf)> = None;
                for part in parts {
                    let d = part.eval(x);
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, part));
                    }
                }
                best.map_or_else(Vec3::zeros, |(_, p)| p.gradient(x))
            }
        }
    }

    /// Bounding sphere `(center, radius)` of the zero level set.
    pub fn bounding_sphere(&self) -> (Vec3, f64) {
        match self {
            AnalyticSdf::Sphere { center, radius } => (*center, *radius),
            AnalyticSdf::Box {
                center,
                half_extents,
            } => (*center, half_extents.norm()),
            AnalyticSdf::Union(parts) => {
                let Some((lo, hi)) = parts
                    .iter()
                    .map(|p| {
                        let (c, r) = p.bounding_sphere();
                        (c.add_scalar(-r), c.add_scalar(r))
                    })
                    .reduce(|(l0, h0), (l1, h1)| (l0.inf(&l1), h0.sup(&h1)))
                else {
                    return (Vec3::zeros(), 0.0);
                };
                let center = (lo + hi) * 0.5;
                let radius = parts
                    .iter()
                    .map(|p| {
                        let (c, r) = p.bounding_sphere();
                        (c - center).norm() + r
                    })
                    .fold(0.0, f64::max);
                (center, radius)
            }
        }
    }

    /// Applies `x -> (x - offset) * scale` to the shape.
    pub fn transformed(&self, offset: &Vec3, scale: f64) -> Self {
        match self {
            AnalyticSdf::Sphere { center, radius } => AnalyticSdf::Sphere {
                center: (center - offset) * scale,
                radius: radius * scale,
            },
            AnalyticSdf::Box {
                center,
                half_extents,
            } => AnalyticSdf::Box {
                center: (center - offset) * scale,
                half_extents: half_extents * scale,
            },
            AnalyticSdf::Union(parts) => {
                AnalyticSdf::Union(parts.iter().map(|p| p.transformed(offset, scale)).collect())
            }
        }
    }
}

/// Sphere-tracing limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceParams {
    pub max_steps: usize,
    pub surface_tol: f64,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            max_steps: 256,
            surface_tol: 1e-4,
        }
    }
}

/// Outcome of marching a ray through the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceHit {
    /// The surface was reached at ray parameter `t`.
    Surface(f64),
    /// The ray travelled `t_max` without touching the surface.
    Clear,
    /// The step budget ran out first.
    Exhausted,
}

/// Sphere traces `origin + t * dir` for `t` in `[0, t_max]`; `dir` must be unit.
pub fn sphere_trace(
    sdf: &AnalyticSdf,
    origin: &Vec3,
    dir: &Vec3,
    t_max: f64,
    params: TraceParams,
) -> TraceHit {
    let mut t = 0.0;
    for _ in 0..params.max_steps {
        if t >= t_max {
            return TraceHit::Clear;
        }
        let d = sdf.eval(&(origin + dir * t));
        if d < params.surface_tol {
            return TraceHit::Surface(t);
        }
        t += d;
    }
    if t >= t_max {
        TraceHit::Clear
    } else {
        TraceHit::Exhausted
    }
}

/// Nearest intersection parameter of a unit-direction ray with a sphere.
pub fn ray_sphere_entry(origin: &Vec3, dir: &Vec3, center: &Vec3, radius: f64) -> Option<f64> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.norm_squared() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let s = math::sqrt(disc);
    let t0 = -b - s;
    let t1 = -b + s;
    if t0 >= 0.0 {
        Some(t0)
    } else if t1 >= 0.0 {
        Some(t1)
    } else {
        None
    }
}

/// Chord `(t_in, t_out)` of a unit-direction ray through a sphere.
pub fn ray_sphere_chord(origin: &Vec3, dir: &Vec3, center: &Vec3, radius: f64) -> Option<(f64, f64)> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.norm_squared() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let s = math::sqrt(disc);
    Some((-b - s, -b + s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> AnalyticSdf {
        AnalyticSdf::cuboid(Vec3::zeros(), Vec3::repeat(0.5))
    }

    #[test]
    fn sphere_values() {
        let s = AnalyticSdf::sphere(Vec3::zeros(), 1.0);
        assert_eq!(s.eval(&Vec3::new(2.0, 0.0, 0.0)), 1.0);
        assert_eq!(s.eval(&Vec3::zeros()), -1.0);
        assert_eq!(s.gradient(&Vec3::new(0.0, 0.0, 0.5)), Vec3::z());
        assert_eq!(s.gradient(&Vec3::zeros()), Vec3::zeros());
    }

    #[test]
    fn box_values() {
        let b = unit_cube();
        assert_eq!(b.eval(&Vec3::new(1.0, 0.0, 0.0)), 0.5);
        assert_eq!(b.eval(&Vec3::zeros()), -0.5);
        assert_close!(b.eval(&Vec3::new(1.5, 1.5, 0.0)), libm::sqrt(2.0), 1e-15);
        assert_close!(b.eval(&Vec3::new(0.4, 0.1, 0.0)), -0.1, 1e-15);
        assert_eq!(b.gradient(&Vec3::new(0.4, 0.1, 0.0)), Vec3::x());
        assert_eq!(b.gradient(&Vec3::new(-0.1, -0.4, 0.0)), -Vec3::y());
        let g = b.gradient(&Vec3::new(1.5, 1.5, 0.0));
        assert_close!(g.norm(), 1.0, 1e-15);
    }

    #[test]
    fn box_gradient_matches_finite_differences() {
        let b = unit_cube();
        let h = 1e-6;
        for x in [
            Vec3::new(0.9, 0.2, -0.1),
            Vec3::new(0.7, 0.8, 0.9),
            Vec3::new(0.1, -0.3, 0.05),
            Vec3::new(-0.6, 0.0, 0.61),
        ] {
            let g = b.gradient(&x);
            for axis in 0..3 {
                let mut e = Vec3::zeros();
                e[axis] = h;
                let fd = (b.eval(&(x + e)) - b.eval(&(x - e))) / (2.0 * h);
                assert_close!(g[axis], fd, 1e-6);
            }
        }
    }

    #[test]
    fn union_takes_nearest_part() {
        let u = AnalyticSdf::Union(alloc::vec![
            AnalyticSdf::sphere(Vec3::new(-2.0, 0.0, 0.0), 1.0),
            AnalyticSdf::sphere(Vec3::new(2.0, 0.0, 0.0), 1.0),
        ]);
        assert_eq!(u.eval(&Vec3::zeros()), 1.0);
        assert_eq!(u.gradient(&Vec3::new(2.5, 0.0, 2.0)), Vec3::new(0.5, 0.0, 2.0).normalize());
        let (c, r) = u.bounding_sphere();
        assert_close!(c.norm(), 0.0, 1e-15);
        assert_close!(r, 3.0, 1e-15);
    }

    #[test]
    fn transform_scales_distances() {
        let b = AnalyticSdf::cuboid(Vec3::repeat(1.0), Vec3::repeat(1.0));
        let t = b.transformed(&Vec3::repeat(1.0), 0.5);
        assert_eq!(t, unit_cube());
    }

    #[test]
    fn trace_hits_box_face() {
        let b = unit_cube();
        let hit = sphere_trace(
            &b,
            &Vec3::new(0.0, 0.0, 3.0),
            &-Vec3::z(),
            10.0,
            TraceParams::default(),
        );
        match hit {
            TraceHit::Surface(t) => assert_close!(t, 2.5, 1e-4),
            other => panic!("unexpected {other:?}"),
        }
        let miss = sphere_trace(
            &b,
            &Vec3::new(3.0, 0.0, 3.0),
            &Vec3::z(),
            10.0,
            TraceParams::default(),
        );
        assert_eq!(miss, TraceHit::Clear);
    }
}
