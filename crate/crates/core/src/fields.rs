//! Off-interface evaluation of the layer potentials and verification of
//! their jump and boundary relations.
//!
//! The double layer (w, q) and the single layer (u, Pi) are evaluated by the
//! plain trapezoid rule; the integrands are smooth away from the interface,
//! and points closer than a gate distance to the curve are rejected.
//! One-sided traces are recovered by polynomial extrapolation along the
//! normal, then compared against the direct-value formulas:
//!
//! * w± = -D(f)[beta] ± beta/2 and [T1(w,q)] nu = 0;
//! * Pi± = B1[beta.nu/omega]/2 + B2[beta.tau/omega]/2 ± beta.nu/(2 omega);
//! * d2 u± = T(f)[beta] -/+ (beta.tau) tau / (2 omega^2);
//! * omega (T1(u,Pi)± o Xi) nu = (-/+ 1/2 - D(f)*)[beta].

use crate::error::{Error, Result};
use crate::grid::{GeometryCache, Grid};
use crate::operators::{DoubleLayer, DoubleLayerAdjoint, LaplaceOps, TOp, VectorDensity};
use crate::quadrature::QuadratureConfig;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(&self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Velocity/pressure values of one layer potential at an off-interface point.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub point: [f64; 2],
    pub side: Side,
    pub velocity: [f64; 2],
    pub pressure: f64,
    pub velocity_gradient: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone)]
pub struct FieldConfig {
    /// Points closer than this many grid spacings to the curve are rejected.
    pub min_distance_factor: f64,
    /// Largest normal offset of the extrapolation ladder, in grid spacings.
    pub delta0_factor: f64,
    /// Number of extrapolation offsets.
    pub levels: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            min_distance_factor: 2.0,
            delta0_factor: 20.0,
            levels: 8,
        }
    }
}

impl FieldConfig {
    /// Geometric ladder from delta0 down to just above the near-boundary
    /// gate (10% margin absorbs the curvature of the interface, which makes
    /// the true point-to-curve distance slightly smaller than the offset).
    pub fn offsets(&self, grid: &Grid) -> Vec<f64> {
        let h = grid.spacing();
        let top = self.delta0_factor * h;
        let bottom = (1.1 * self.min_distance_factor * h).min(top);
        let m = (self.levels - 1).max(1) as f64;
        (0..self.levels)
            .map(|j| top * (bottom / top).powf(j as f64 / m))
            .collect()
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if self.levels < 2 || self.delta0_factor.is_nan() || self.delta0_factor <= 0.0
            || self.min_distance_factor.is_nan() || self.min_distance_factor <= 0.0
        {
            return Err(Error::Config(
                "field extrapolation needs >= 2 levels and positive offsets".into(),
            ));
        }
        if self.delta0_factor <= self.min_distance_factor {
            return Err(Error::Config(format!(
                "largest offset factor {} must exceed the gate factor {}",
                self.delta0_factor, self.min_distance_factor
            )));
        }
        let _ = grid;
        Ok(())
    }
}

fn distance_to_interface(geom: &GeometryCache, x: [f64; 2]) -> f64 {
    let grid = geom.grid();
    let mut d2 = f64::INFINITY;
    for i in 0..grid.len() {
        let dx = x[0] - grid.node(i);
        let dy = x[1] - geom.values()[i];
        d2 = d2.min(dx * dx + dy * dy);
    }
    // Beyond the grid ends the interface continues flat at height ~0.
    let beyond = x[0].abs() - grid.half_width();
    if beyond > 0.0 {
        d2 = d2.min(x[1] * x[1]);
    }
    d2.sqrt()
}

fn check_distance(geom: &GeometryCache, x: [f64; 2], cfg: &FieldConfig) -> Result<f64> {
    let d = distance_to_interface(geom, x);
    let min = cfg.min_distance_factor * geom.grid().spacing();
    if d < min {
        Err(Error::NearBoundary {
            distance: d,
            minimum: min,
        })
    } else {
        Ok(d)
    }
}

fn side_of(geom: &GeometryCache, x: [f64; 2]) -> Side {
    let grid = geom.grid();
    let f_at = grid
        .nearest_index(x[0])
        .map(|i| geom.values()[i])
        .unwrap_or(0.0);
    if x[1] >= f_at {
        Side::Plus
    } else {
        Side::Minus
    }
}

/// Double-layer velocity and pressure (w, q) at x off the interface.
pub fn double_layer_field(
    geom: &GeometryCache,
    beta: &VectorDensity,
    x: [f64; 2],
    cfg: &FieldConfig,
) -> Result<FieldSample> {
    check_distance(geom, x, cfg)?;
    let grid = geom.grid();
    let h = grid.spacing();
    let fp = geom.d1();
    let mut w = [0.0; 2];
    let mut q = 0.0;
    for k in 0..grid.len() {
        let r1 = x[0] - grid.node(k);
        let r2 = x[1] - geom.values()[k];
        let rr = r1 * r1 + r2 * r2;
        let a = (-fp[k] * r1 + r2) / (rr * rr);
        let b1 = beta.c1[k];
        let b2 = beta.c2[k];
        w[0] += a * (r1 * r1 * b1 + r1 * r2 * b2);
        w[1] += a * (r1 * r2 * b1 + r2 * r2 * b2);
        q += (-fp[k] * (r1 * r1 - r2 * r2) + 2.0 * r1 * r2) * b1 / (rr * rr)
            + (-fp[k] * 2.0 * r1 * r2 + r2 * r2 - r1 * r1) * b2 / (rr * rr);
    }
    let scale = h / PI;
    Ok(FieldSample {
        point: x,
        side: side_of(geom, x),
        velocity: [scale * w[0], scale * w[1]],
        pressure: scale * q,
        velocity_gradient: Some(double_layer_gradient(geom, beta, x)),
    })
}

/// Kernel-differentiated velocity gradient of the double layer,
/// d_l w_j = int d_l W_j^{ik}(r) (-f',1)_i beta_k ds.
fn double_layer_gradient(geom: &GeometryCache, beta: &VectorDensity, x: [f64; 2]) -> [[f64; 2]; 2] {
    let grid = geom.grid();
    let h = grid.spacing();
    let fp = geom.d1();
    let mut grad = [[0.0; 2]; 2]; // grad[l][j] = d_l w_j
    for k in 0..grid.len() {
        let r = [x[0] - grid.node(k), x[1] - geom.values()[k]];
        let rr = r[0] * r[0] + r[1] * r[1];
        let m = [-fp[k], 1.0];
        let b = [beta.c1[k], beta.c2[k]];
        for l in 0..2 {
            for j in 0..2 {
                let mut v = 0.0;
                for i in 0..2 {
                    for kk in 0..2 {
                        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let dw = (delta(l, i) * r[j] * r[kk]
                            + delta(l, j) * r[i] * r[kk]
                            + delta(l, kk) * r[i] * r[j])
                            / (rr * rr)
                            - 4.0 * r[i] * r[j] * r[kk] * r[l] / (rr * rr * rr);
                        v += dw * m[i] * b[kk];
                    }
                }
                grad[l][j] += v;
            }
        }
    }
    for row in grad.iter_mut() {
        for v in row.iter_mut() {
            *v *= h / PI;
        }
    }
    grad
}

/// Single-layer velocity and pressure (u, Pi) at x off the interface,
/// with the kernel-differentiated velocity gradient.
pub fn single_layer_field(
    geom: &GeometryCache,
    beta: &VectorDensity,
    x: [f64; 2],
    cfg: &FieldConfig,
) -> Result<FieldSample> {
    check_distance(geom, x, cfg)?;
    let grid = geom.grid();
    let h = grid.spacing();
    let mut u = [0.0; 2];
    let mut p = 0.0;
    let mut grad = [[0.0; 2]; 2];
    for k in 0..grid.len() {
        let r = [x[0] - grid.node(k), x[1] - geom.values()[k]];
        let rr = r[0] * r[0] + r[1] * r[1];
        let b = [beta.c1[k], beta.c2[k]];
        let rb = r[0] * b[0] + r[1] * b[1];
        let log_term = -0.5 * rr.ln(); // ln(1/|r|)
        for j in 0..2 {
            u[j] += log_term * b[j] + r[j] * rb / rr;
        }
        p += rb / rr;
        for l in 0..2 {
            for j in 0..2 {
                let delta = if l == j { 1.0 } else { 0.0 };
                grad[l][j] +=
                    (-r[l] * b[j] + delta * rb + r[j] * b[l]) / rr - 2.0 * r[l] * r[j] * rb / (rr * rr);
            }
        }
    }
    let su = h / (4.0 * PI);
    let sp = h / (2.0 * PI);
    for row in grad.iter_mut() {
        for v in row.iter_mut() {
            *v *= su;
        }
    }
    Ok(FieldSample {
        point: x,
        side: side_of(geom, x),
        velocity: [su * u[0], su * u[1]],
        pressure: sp * p,
        velocity_gradient: Some(grad),
    })
}

/// Result of a one-sided boundary-limit extrapolation.
#[derive(Debug, Clone)]
pub struct LimitResult {
    pub value: Vec<f64>,
    pub error_estimate: f64,
    /// False when the extrapolation tail did not shrink monotonically.
    pub reliable: bool,
}

/// Richardson limit of a vector-valued field along the normal at node i:
/// evaluates at Xi(xi_i) ± delta_j nu and extrapolates to delta = 0.
pub fn boundary_limit(
    field: &mut dyn FnMut([f64; 2]) -> Result<Vec<f64>>,
    geom: &GeometryCache,
    i: usize,
    side: Side,
    cfg: &FieldConfig,
) -> Result<LimitResult> {
    cfg.validate(geom.grid())?;
    let offsets = cfg.offsets(geom.grid());
    let base = geom.point(i);
    let nu = geom.normal()[i];
    let sgn = side.sign();
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(offsets.len());
    for &d in &offsets {
        let x = [base[0] + sgn * d * nu[0], base[1] + sgn * d * nu[1]];
        samples.push(field(x)?);
    }
    let dim = samples[0].len();
    let mut value = vec![0.0; dim];
    let mut error_estimate = 0.0_f64;
    let mut reliable = true;
    for c in 0..dim {
        let mut p: Vec<f64> = samples.iter().map(|s| s[c]).collect();
        let mut corrections = Vec::new();
        for lev in 1..p.len() {
            let before = p[0];
            for j in 0..p.len() - lev {
                p[j] = p[j + 1]
                    + (p[j + 1] - p[j]) * offsets[j + lev] / (offsets[j] - offsets[j + lev]);
            }
            corrections.push((p[0] - before).abs());
        }
        value[c] = p[0];
        let last = *corrections.last().unwrap();
        error_estimate = error_estimate.max(last);
        if corrections.len() >= 2 {
            let prev = corrections[corrections.len() - 2];
            if last > prev && last > 1e-13 {
                reliable = false;
            }
        }
    }
    Ok(LimitResult {
        value,
        error_estimate,
        reliable,
    })
}

/// Per-node outcome of the double-layer jump checks.
#[derive(Debug, Clone)]
pub struct DoubleJumpRow {
    pub xi: f64,
    /// ||(w+ - w-) - beta|| at the node.
    pub velocity_jump_defect: f64,
    /// ||(w+ + w-) + 2 D beta|| at the node.
    pub direct_value_defect: f64,
    /// ||T1(w,q)+ nu - T1(w,q)- nu|| (expected zero).
    pub stress_jump: f64,
    pub extrapolation_reliable: bool,
}

#[derive(Debug, Clone)]
pub struct DoubleJumpReport {
    pub rows: Vec<DoubleJumpRow>,
    /// ||jump - beta||_2 / ||beta||_2 over the sampled nodes.
    pub relative_jump_error: f64,
    pub max_stress_jump: f64,
}

/// Verifies w± = -D beta ± beta/2 and the vanishing of the traction jump
/// for the double layer, at the given sample nodes.
pub fn jump_check_double(
    geom: &GeometryCache,
    beta: &VectorDensity,
    samples: &[usize],
    fcfg: &FieldConfig,
    qcfg: &QuadratureConfig,
) -> Result<DoubleJumpReport> {
    let dl = DoubleLayer::new(geom, qcfg);
    let dbeta = dl.apply(beta)?;
    let mut rows = Vec::with_capacity(samples.len());
    let mut num = 0.0;
    let mut den = 0.0;
    let mut max_stress = 0.0_f64;
    for &i in samples {
        let mut field = |x: [f64; 2]| -> Result<Vec<f64>> {
            let s = double_layer_field(geom, beta, x, fcfg)?;
            let g = s.velocity_gradient.unwrap();
            // [w1, w2, q, T11, T12, T22] with T = -q I + grad + grad^T
            Ok(vec![
                s.velocity[0],
                s.velocity[1],
                s.pressure,
                -s.pressure + 2.0 * g[0][0],
                g[0][1] + g[1][0],
                -s.pressure + 2.0 * g[1][1],
            ])
        };
        let plus = boundary_limit(&mut field, geom, i, Side::Plus, fcfg)?;
        let minus = boundary_limit(&mut field, geom, i, Side::Minus, fcfg)?;
        let nu = geom.normal()[i];
        let jump = [
            plus.value[0] - minus.value[0],
            plus.value[1] - minus.value[1],
        ];
        let expect = [beta.c1[i], beta.c2[i]];
        let jd = ((jump[0] - expect[0]).powi(2) + (jump[1] - expect[1]).powi(2)).sqrt();
        let sum = [
            plus.value[0] + minus.value[0] + 2.0 * dbeta.c1[i],
            plus.value[1] + minus.value[1] + 2.0 * dbeta.c2[i],
        ];
        let dd = (sum[0] * sum[0] + sum[1] * sum[1]).sqrt();
        let traction = |v: &[f64]| -> [f64; 2] {
            [
                v[3] * nu[0] + v[4] * nu[1],
                v[4] * nu[0] + v[5] * nu[1],
            ]
        };
        let tp = traction(&plus.value);
        let tm = traction(&minus.value);
        let stress = ((tp[0] - tm[0]).powi(2) + (tp[1] - tm[1]).powi(2)).sqrt();
        num += jd * jd;
        den += expect[0] * expect[0] + expect[1] * expect[1];
        max_stress = max_stress.max(stress);
        rows.push(DoubleJumpRow {
            xi: geom.grid().node(i),
            velocity_jump_defect: jd,
            direct_value_defect: dd,
            stress_jump: stress,
            extrapolation_reliable: plus.reliable && minus.reliable,
        });
    }
    Ok(DoubleJumpReport {
        rows,
        relative_jump_error: (num / den.max(f64::MIN_POSITIVE)).sqrt(),
        max_stress_jump: max_stress,
    })
}

/// Per-node outcome of the single-layer boundary-relation checks.
#[derive(Debug, Clone)]
pub struct SingleJumpRow {
    pub xi: f64,
    /// |(Pi+ - Pi-) - beta.nu/omega|.
    pub pressure_jump_defect: f64,
    /// max over sides of |Pi± - (B1[..]/2 + B2[..]/2 ± beta.nu/(2 omega))|.
    pub pressure_direct_defect: f64,
    /// max over sides of ||d2u± - (T beta -/+ (beta.tau) tau/(2 omega^2))||.
    pub vertical_gradient_defect: f64,
    /// max over sides of ||omega T1(u,Pi)± nu - (-/+1/2 - D*) beta||.
    pub stress_identity_defect: f64,
    pub extrapolation_reliable: bool,
}

#[derive(Debug, Clone)]
pub struct SingleJumpReport {
    pub rows: Vec<SingleJumpRow>,
    /// |pressure jump - beta.nu/omega| relative L2 over the samples.
    pub relative_pressure_jump_error: f64,
    pub max_stress_identity_defect: f64,
}

/// Verifies the three single-layer boundary relations (pressure trace,
/// vertical velocity gradient, normal stress) at the given sample nodes.
pub fn jump_check_single(
    geom: &GeometryCache,
    beta: &VectorDensity,
    samples: &[usize],
    fcfg: &FieldConfig,
    qcfg: &QuadratureConfig,
) -> Result<SingleJumpReport> {
    let n = geom.grid().len();
    let laplace = LaplaceOps::new(geom, qcfg);
    let top = TOp::new(geom, qcfg);
    let dstar = DoubleLayerAdjoint::new(geom, qcfg);
    // beta.nu/omega and beta.tau/omega with the unit frame vectors
    let mut bnu = vec![0.0; n];
    let mut btau = vec![0.0; n];
    for i in 0..n {
        let nu = geom.normal()[i];
        let tau = geom.tangent()[i];
        let om = geom.omega()[i];
        bnu[i] = (beta.c1[i] * nu[0] + beta.c2[i] * nu[1]) / om;
        btau[i] = (beta.c1[i] * tau[0] + beta.c2[i] * tau[1]) / om;
    }
    let b1 = laplace.b1(&bnu)?;
    let b2 = laplace.b2(&btau)?;
    let tbeta = top.apply(beta)?;
    let dsbeta = dstar.apply(beta)?;

    let mut rows = Vec::with_capacity(samples.len());
    let mut num = 0.0;
    let mut den = 0.0;
    let mut max_stress = 0.0_f64;
    for &i in samples {
        let mut field = |x: [f64; 2]| -> Result<Vec<f64>> {
            let s = single_layer_field(geom, beta, x, fcfg)?;
            let g = s.velocity_gradient.unwrap();
            Ok(vec![
                s.pressure,
                g[1][0], // d2 u1
                g[1][1], // d2 u2
                -s.pressure + 2.0 * g[0][0],
                g[0][1] + g[1][0],
                -s.pressure + 2.0 * g[1][1],
            ])
        };
        let plus = boundary_limit(&mut field, geom, i, Side::Plus, fcfg)?;
        let minus = boundary_limit(&mut field, geom, i, Side::Minus, fcfg)?;
        let nu = geom.normal()[i];
        let tau = geom.tangent()[i];
        let om = geom.omega()[i];
        let beta_nu = beta.c1[i] * nu[0] + beta.c2[i] * nu[1];
        let beta_tau = beta.c1[i] * tau[0] + beta.c2[i] * tau[1];

        // pressure jump and direct values
        let pj = plus.value[0] - minus.value[0];
        let pj_defect = (pj - beta_nu / om).abs();
        let p_direct = 0.5 * b1[i] + 0.5 * b2[i];
        let pd = (plus.value[0] - (p_direct + beta_nu / (2.0 * om)))
            .abs()
            .max((minus.value[0] - (p_direct - beta_nu / (2.0 * om))).abs());

        // d2 u± = T beta -/+ (beta.tau) tau / (2 omega^2)
        let mut vg = 0.0_f64;
        for (limit, sgn) in [(&plus, 1.0), (&minus, -1.0)] {
            let want = [
                tbeta.c1[i] - sgn * beta_tau * tau[0] / (2.0 * om * om),
                tbeta.c2[i] - sgn * beta_tau * tau[1] / (2.0 * om * om),
            ];
            let got = [limit.value[1], limit.value[2]];
            vg = vg.max(((got[0] - want[0]).powi(2) + (got[1] - want[1]).powi(2)).sqrt());
        }

        // omega T1(u,Pi)± nu = (-/+1/2 - D*) beta
        let mut sd = 0.0_f64;
        for (limit, sgn) in [(&plus, 1.0), (&minus, -1.0)] {
            let t11 = limit.value[3];
            let t12 = limit.value[4];
            let t22 = limit.value[5];
            let got = [
                om * (t11 * nu[0] + t12 * nu[1]),
                om * (t12 * nu[0] + t22 * nu[1]),
            ];
            let want = [
                -sgn * 0.5 * beta.c1[i] - dsbeta.c1[i],
                -sgn * 0.5 * beta.c2[i] - dsbeta.c2[i],
            ];
            sd = sd.max(((got[0] - want[0]).powi(2) + (got[1] - want[1]).powi(2)).sqrt());
        }

        num += pj_defect * pj_defect;
        den += (beta_nu / om).powi(2);
        max_stress = max_stress.max(sd);
        rows.push(SingleJumpRow {
            xi: geom.grid().node(i),
            pressure_jump_defect: pj_defect,
            pressure_direct_defect: pd,
            vertical_gradient_defect: vg,
            stress_identity_defect: sd,
            extrapolation_reliable: plus.reliable && minus.reliable,
        });
    }
    Ok(SingleJumpReport {
        rows,
        relative_pressure_jump_error: (num / den.max(f64::MIN_POSITIVE)).sqrt(),
        max_stress_identity_defect: max_stress,
    })
}

/// Discrete divergence and Stokes residual of the double-layer field on a
/// centered stencil of half-width `step` at the given point.
pub fn stokes_residual_double(
    geom: &GeometryCache,
    beta: &VectorDensity,
    x: [f64; 2],
    step: f64,
    cfg: &FieldConfig,
) -> Result<(f64, [f64; 2])> {
    let w = |p: [f64; 2]| -> Result<([f64; 2], f64)> {
        let s = double_layer_field(geom, beta, p, cfg)?;
        Ok((s.velocity, s.pressure))
    };
    let (c, _) = w(x)?;
    let (xp, qxp) = w([x[0] + step, x[1]])?;
    let (xm, qxm) = w([x[0] - step, x[1]])?;
    let (yp, qyp) = w([x[0], x[1] + step])?;
    let (ym, qym) = w([x[0], x[1] - step])?;
    let div = (xp[0] - xm[0]) / (2.0 * step) + (yp[1] - ym[1]) / (2.0 * step);
    let lap =
        |comp: usize| (xp[comp] + xm[comp] + yp[comp] + ym[comp] - 4.0 * c[comp]) / (step * step);
    let grad_q = [(qxp - qxm) / (2.0 * step), (qyp - qym) / (2.0 * step)];
    Ok((div, [lap(0) - grad_q[0], lap(1) - grad_q[1]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{geometry, InterfaceProfile, ProfileShape};
    use approx::assert_abs_diff_eq;

    fn flat_geom(n: usize, l: f64) -> GeometryCache {
        let grid = Grid::new(l, n).unwrap();
        geometry(&InterfaceProfile::from_shape(grid, &ProfileShape::Zero, 1e-12).unwrap())
    }

    fn gaussian_geom(n: usize, l: f64, amp: f64) -> GeometryCache {
        let grid = Grid::new(l, n).unwrap();
        geometry(
            &InterfaceProfile::from_shape(
                grid,
                &ProfileShape::GaussianBump {
                    amplitude: amp,
                    width: 1.0,
                },
                1e-9,
            )
            .unwrap(),
        )
    }

    fn even_density(grid: &Grid) -> VectorDensity {
        let b: Vec<f64> = grid.nodes().iter().map(|&x| (-x * x).exp()).collect();
        VectorDensity::new(vec![0.0; grid.len()], b).unwrap()
    }

    #[test]
    fn zero_density_gives_zero_fields() {
        let geom = gaussian_geom(128, 16.0, 0.3);
        let beta = VectorDensity::zeros(128);
        let cfg = FieldConfig::default();
        let s = double_layer_field(&geom, &beta, [0.5, 2.0], &cfg).unwrap();
        assert_eq!(s.velocity, [0.0, 0.0]);
        assert_eq!(s.pressure, 0.0);
        let s = single_layer_field(&geom, &beta, [0.5, 2.0], &cfg).unwrap();
        assert_eq!(s.velocity, [0.0, 0.0]);
        assert_eq!(s.pressure, 0.0);
    }

    #[test]
    fn near_boundary_point_is_rejected() {
        let geom = flat_geom(128, 16.0);
        let beta = even_density(geom.grid());
        let cfg = FieldConfig::default();
        let h = geom.grid().spacing();
        match double_layer_field(&geom, &beta, [0.0, 0.5 * h], &cfg) {
            Err(Error::NearBoundary { .. }) => {}
            other => panic!("expected near-boundary rejection, got {other:?}"),
        }
    }

    #[test]
    fn flat_even_density_symmetries() {
        // f = 0, beta = (0, even): w1(0, y) = 0 by oddness in s.
        let geom = flat_geom(512, 32.0);
        let beta = even_density(geom.grid());
        let cfg = FieldConfig::default();
        let s = double_layer_field(&geom, &beta, [0.0, 1.5], &cfg).unwrap();
        assert!(s.velocity[0].abs() < 1e-12, "w1 = {}", s.velocity[0]);
        assert_eq!(s.side, Side::Plus);
        // beta = (even, 0): Pi(0, y) = 0 by oddness of the pressure kernel.
        let b: Vec<f64> = geom.grid().nodes().iter().map(|&x| (-x * x).exp()).collect();
        let beta_h = VectorDensity::new(b, vec![0.0; geom.grid().len()]).unwrap();
        let s = single_layer_field(&geom, &beta_h, [0.0, 1.5], &cfg).unwrap();
        assert!(s.pressure.abs() < 1e-12, "Pi = {}", s.pressure);
    }

    #[test]
    fn double_layer_far_field_decays() {
        let geom = gaussian_geom(512, 64.0, 0.3);
        let beta = even_density(geom.grid());
        let cfg = FieldConfig::default();
        let mut prev = f64::INFINITY;
        for r in [10.0, 20.0, 40.0] {
            let x = [r / 2.0_f64.sqrt(), r / 2.0_f64.sqrt()];
            let s = double_layer_field(&geom, &beta, x, &cfg).unwrap();
            let mag = (s.velocity[0].powi(2) + s.velocity[1].powi(2)).sqrt() + s.pressure.abs();
            assert!(mag < prev, "no decay at r = {r}");
            prev = mag;
        }
    }

    #[test]
    fn single_layer_gradient_and_pressure_decay_like_inverse_distance() {
        let geom = gaussian_geom(512, 64.0, 0.3);
        let beta = even_density(geom.grid());
        let cfg = FieldConfig::default();
        let mut scaled = Vec::new();
        for r in [10.0, 20.0, 40.0] {
            let x = [0.6 * r, 0.8 * r];
            let s = single_layer_field(&geom, &beta, x, &cfg).unwrap();
            let g = s.velocity_gradient.unwrap();
            let gmag = g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            scaled.push((r * gmag, r * s.pressure.abs()));
        }
        for w in scaled.windows(2) {
            for c in 0..2 {
                let (a, b) = match c {
                    0 => (w[0].0, w[1].0),
                    _ => (w[0].1, w[1].1),
                };
                let ratio = a / b;
                assert!(
                    (0.5..=2.0).contains(&ratio),
                    "r-scaled magnitude ratio {ratio} outside [1/2, 2]"
                );
            }
        }
    }

    #[test]
    fn boundary_limit_of_constant_field_is_exact() {
        let geom = gaussian_geom(128, 16.0, 0.3);
        let cfg = FieldConfig::default();
        let mut field = |_x: [f64; 2]| -> Result<Vec<f64>> { Ok(vec![3.25, -1.5]) };
        let i = geom.grid().nearest_index(0.4).unwrap();
        let lim = boundary_limit(&mut field, &geom, i, Side::Plus, &cfg).unwrap();
        assert_abs_diff_eq!(lim.value[0], 3.25, epsilon = 1e-12);
        assert_abs_diff_eq!(lim.value[1], -1.5, epsilon = 1e-12);
        assert!(lim.error_estimate < 1e-12);
    }

    #[test]
    fn flat_double_layer_jump_recovers_density() {
        // f = 0, beta = (0, e^{-xi^2}): w+ - w- = beta, w+ + w- = -2 D(0) beta = 0
        let geom = flat_geom(2048, 32.0);
        let beta = even_density(geom.grid());
        let fcfg = FieldConfig::default();
        let qcfg = QuadratureConfig::default();
        let i0 = geom.grid().nearest_index(0.0).unwrap();
        let report = jump_check_double(&geom, &beta, &[i0], &fcfg, &qcfg).unwrap();
        let row = &report.rows[0];
        assert!(
            row.velocity_jump_defect <= 1e-3,
            "jump defect {}",
            row.velocity_jump_defect
        );
        assert!(
            row.direct_value_defect <= 1e-3,
            "direct defect {}",
            row.direct_value_defect
        );
    }

    #[test]
    fn flat_single_layer_pressure_jump_is_beta_nu() {
        let geom = flat_geom(2048, 32.0);
        let beta = even_density(geom.grid());
        let fcfg = FieldConfig::default();
        let qcfg = QuadratureConfig::default();
        let i0 = geom.grid().nearest_index(0.0).unwrap();
        let report = jump_check_single(&geom, &beta, &[i0], &fcfg, &qcfg).unwrap();
        let row = &report.rows[0];
        // beta.nu/omega = 1 at xi = 0
        assert!(
            row.pressure_jump_defect <= 1e-3,
            "pressure jump defect {}",
            row.pressure_jump_defect
        );
    }

    #[test]
    fn gaussian_jump_checks_tighten_under_refinement() {
        let qcfg = QuadratureConfig::default();
        let fcfg = FieldConfig::default();
        let mut jump_errs = Vec::new();
        let mut stress_errs = Vec::new();
        for n in [256usize, 512] {
            let geom = gaussian_geom(n, 32.0, 0.3);
            let beta = even_density(geom.grid());
            let samples: Vec<usize> = [-1.0_f64, 0.0, 1.0]
                .iter()
                .map(|&x| geom.grid().nearest_index(x).unwrap())
                .collect();
            let d = jump_check_double(&geom, &beta, &samples, &fcfg, &qcfg).unwrap();
            let s = jump_check_single(&geom, &beta, &samples, &fcfg, &qcfg).unwrap();
            jump_errs.push(d.relative_jump_error);
            stress_errs.push(
                d.max_stress_jump
                    .max(s.max_stress_identity_defect),
            );
        }
        assert!(
            jump_errs[1] < jump_errs[0],
            "jump errors did not shrink: {jump_errs:?}"
        );
        assert!(
            stress_errs[1] < stress_errs[0],
            "stress residuals did not shrink: {stress_errs:?}"
        );
    }

    #[test]
    fn interior_field_is_divergence_free_and_stokes() {
        let geom = gaussian_geom(512, 32.0, 0.3);
        let beta = even_density(geom.grid());
        let cfg = FieldConfig::default();
        let h = geom.grid().spacing();
        let (div, stokes) =
            stokes_residual_double(&geom, &beta, [0.7, 2.0], 2.0 * h, &cfg).unwrap();
        assert!(div.abs() <= 1e-3, "divergence {div}");
        let smag = (stokes[0].powi(2) + stokes[1].powi(2)).sqrt();
        assert!(smag <= 5e-2, "stokes residual {smag}");
    }
}
