//! Levenberg-Marquardt adjustment of junction positions.
//!
//! Every member `l_i` of a group `(u, v)` contributes two residuals against
//! the pair line `l_0 = (J_u, J_v)`: the angular distance and the
//! perpendicular distance. The cost is the sum of their squares.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::SegmentGroup;
use crate::geometry::{LineSegment3D, Vec3};
use crate::junctions::JunctionSet;
use crate::{Error, Result};

/// `[d_ang, d_perp]` of `member` against the pair line `(ju, jv)`.
/// `NaN` when `ju == jv`.
pub fn member_residuals(ju: &Vec3, jv: &Vec3, member: &LineSegment3D) -> [f64; 2] {
    let d = ju - jv;
    let len = d.norm();
    if !(len > 0.0) {
        return [f64::NAN, f64::NAN];
    }
    let w = member.direction();
    let e = d / len;
    // 1 - |cos| written as sin^2 / (1 + |cos|) so parallel lines give exactly 0
    let ang = e.cross(&w).norm_squared() / (1.0 + e.dot(&w).abs());
    let m = member.b - member.a;
    let m_len = m.norm();
    let perp = |p: &Vec3| (p - member.a).cross(&m).norm() / m_len;
    [ang, perp(ju) + perp(jv)]
}

/// Analytic Jacobian of [`member_residuals`] with respect to
/// `(ju.x, ju.y, ju.z, jv.x, jv.y, jv.z)`.
pub fn member_jacobian(ju: &Vec3, jv: &Vec3, member: &LineSegment3D) -> [[f64; 6]; 2] {
    let d = ju - jv;
    let len = d.norm();
    let e = d / len;
    let w = member.direction();
    let s = e.dot(&w);
    // d(1 - |e.w|)/d(ju) = -sign(s) (w - s e) / |d|
    let g_ang = -(w - e * s) * (s.signum() / len);

    let perp_grad = |p: &Vec3| {
        let q = p - member.a;
        let r = q - w * q.dot(&w);
        let n = r.norm();
        if n > 0.0 {
            r / n
        } else {
            Vec3::zeros()
        }
    };
    let gu = perp_grad(ju);
    let gv = perp_grad(jv);
    [
        [g_ang.x, g_ang.y, g_ang.z, -g_ang.x, -g_ang.y, -g_ang.z],
        [gu.x, gu.y, gu.z, gv.x, gv.y, gv.z],
    ]
}

/// Forward-difference Jacobian of [`member_residuals`] with step `h`.
pub fn member_jacobian_fd(ju: &Vec3, jv: &Vec3, member: &LineSegment3D, h: f64) -> [[f64; 6]; 2] {
    let base = member_residuals(ju, jv, member);
    let mut jac = [[0.0; 6]; 2];
    for k in 0..6 {
        let mut u = *ju;
        let mut v = *jv;
        if k < 3 {
            u[k] += h;
        } else {
            v[k - 3] += h;
        }
        let r = member_residuals(&u, &v, member);
        for i in 0..2 {
            jac[i][k] = (r[i] - base[i]) / h;
        }
    }
    jac
}

/// Sum of squared residuals over all group members.
pub fn total_cost(positions: &[Vec3], groups: &[SegmentGroup]) -> f64 {
    groups
        .iter()
        .flat_map(|g| {
            g.members.iter().map(move |m| {
                let [a, p] = member_residuals(&positions[g.u], &positions[g.v], m);
                a * a + p * p
            })
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacobianMode {
    ForwardDifference { step: f64 },
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqParams {
    pub max_iters: usize,
    /// Stop once an accepted step is shorter than this.
    pub tol: f64,
    pub lambda_init: f64,
    pub jacobian: JacobianMode,
}

impl Default for LsqParams {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol: 1e-12,
            lambda_init: 1e-3,
            jacobian: JacobianMode::ForwardDifference { step: 1e-7 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LsqReport {
    pub initial_cost: f64,
    pub final_cost: f64,
    pub iterations: usize,
    /// Cost after every accepted step.
    pub accepted_costs: Vec<f64>,
}

const LAMBDA_MAX: f64 = 1e16;

/// Minimizes the group alignment cost over the positions of the junctions
/// the groups reference. Damping starts at `lambda_init`, is divided by 10
/// after an accepted step and multiplied by 10 after a rejected one.
pub fn optimize_junctions(
    junctions: &JunctionSet,
    groups: &[SegmentGroup],
    params: &LsqParams,
) -> Result<(JunctionSet, LsqReport)> {
    for g in groups {
        if g.u >= junctions.len() || g.v >= junctions.len() {
            return Err(Error::param("groups", "group references a missing junction"));
        }
        if !junctions.is_active(g.u) || !junctions.is_active(g.v) {
            return Err(Error::param("groups", "group references an inactive junction"));
        }
    }
    let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
    for g in groups {
        for k in [g.u, g.v] {
            let next = slot.len();
            slot.entry(k).or_insert(next);
        }
    }
    let dim = 3 * slot.len();
    let mut positions = junctions.positions().to_vec();
    let mut cost = total_cost(&positions, groups);
    let mut report = LsqReport {
        initial_cost: cost,
        final_cost: cost,
        ..LsqReport::default()
    };
    if !cost.is_finite() {
        return Err(Error::param("junctions", "initial configuration is degenerate"));
    }
    if cost == 0.0 || dim == 0 {
        return Ok((junctions.clone(), report));
    }

    let mut lambda = params.lambda_init;
    'outer: for _ in 0..params.max_iters {
        report.iterations += 1;
        let mut jtj = DMatrix::<f64>::zeros(dim, dim);
        let mut jtr = DVector::<f64>::zeros(dim);
        for g in groups {
            let (su, sv) = (3 * slot[&g.u], 3 * slot[&g.v]);
            let cols = [su, su + 1, su + 2, sv, sv + 1, sv + 2];
            for m in &g.members {
                let (ju, jv) = (&positions[g.u], &positions[g.v]);
                let r = member_residuals(ju, jv, m);
                let jac = match params.jacobian {
                    JacobianMode::ForwardDifference { step } => member_jacobian_fd(ju, jv, m, step),
                    JacobianMode::Analytic => member_jacobian(ju, jv, m),
                };
                for (row, res) in jac.iter().zip(r) {
                    for a in 0..6 {
                        jtr[cols[a]] += row[a] * res;
                        for b in 0..6 {
                            jtj[(cols[a], cols[b])] += row[a] * row[b];
                        }
                    }
                }
            }
        }

        loop {
            let mut damped = jtj.clone();
            for i in 0..dim {
                damped[(i, i)] += lambda;
            }
            let step = damped.cholesky().map(|c| c.solve(&-&jtr));
            let Some(step) = step else {
                lambda *= 10.0;
                if lambda > LAMBDA_MAX {
                    break 'outer;
                }
                continue;
            };
            let mut trial = positions.clone();
            for (&k, &s) in &slot {
                trial[k] += Vec3::new(step[3 * s], step[3 * s + 1], step[3 * s + 2]);
            }
            let trial_cost = total_cost(&trial, groups);
            if trial_cost < cost {
                positions = trial;
                cost = trial_cost;
                report.accepted_costs.push(cost);
                lambda = (lambda / 10.0).max(1e-15);
                if step.norm() < params.tol || cost == 0.0 {
                    break 'outer;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                break 'outer;
            }
        }
    }

    report.final_cost = cost;
    let mut out = junctions.clone();
    for &k in slot.keys() {
        out.set_position(k, positions[k]);
    }
    Ok((out, report))
}
