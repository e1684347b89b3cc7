//! Spectral and linearization diagnostics: resolvent scans of the dense
//! double-layer assembly, the exact directional derivative of Phi with its
//! frozen-coefficient multiplier approximation, and weighted-norm helpers.

use crate::bvp::{phi_coeffs, solve_second_kind, FluidParams, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::{derivative1, GeometryCache, Grid, ProfileShape};
use crate::operators::{DoubleLayer, DoubleLayerAdjoint, VectorDensity};
use crate::quadrature::{b_family_apply, bnm_apply_all, FamilyTerm, KernelSpec, QuadratureConfig};
use crate::spectral::ModeTransform;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

pub use crate::spectral::sobolev_norm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormFlavor {
    /// Plain stacked L2.
    Flat,
    /// Conjugation by the periodic Fourier weight (1+k^2)^{s_exp/2}.
    SobolevWeighted { s_exp: f64 },
}

#[derive(Debug, Clone)]
pub struct ResolventEntry {
    pub lambda: f64,
    pub node_count: usize,
    pub sigma_min: f64,
}

#[derive(Debug, Clone)]
pub struct ResolventReport {
    pub flavor: NormFlavor,
    pub adjoint: bool,
    pub entries: Vec<ResolventEntry>,
}

impl ResolventReport {
    /// Largest relative spread of sigma_min across grid sizes per lambda.
    pub fn max_relative_spread(&self) -> f64 {
        let mut spread = 0.0_f64;
        let mut lambdas: Vec<f64> = self.entries.iter().map(|e| e.lambda).collect();
        lambdas.dedup();
        for &l in &lambdas {
            let vals: Vec<f64> = self
                .entries
                .iter()
                .filter(|e| e.lambda == l)
                .map(|e| e.sigma_min)
                .collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(0.0_f64, f64::max);
            if hi > 0.0 {
                spread = spread.max((hi - lo) / hi);
            }
        }
        spread
    }

    pub fn min_sigma(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.sigma_min)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Smallest singular value by inverse power iteration on A^T A using two LU
/// factorizations; a full decomposition would dominate the runtime at the
/// scan sizes. Returns 0 for a singular matrix.
pub fn smallest_singular_value(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let lu = a.clone().lu();
    let lu_t = a.transpose().lu();
    // deterministic start with no special symmetry
    let mut v = DVector::from_fn(n, |i, _| {
        (0.3 + 0.7 * ((i * 2654435761) % 97) as f64 / 97.0) * if i % 2 == 0 { 1.0 } else { -1.0 }
    });
    v /= v.norm();
    let mut mu_prev = 0.0;
    for _ in 0..500 {
        let w = match lu_t.solve(&v) {
            Some(w) => w,
            None => return 0.0,
        };
        let z = match lu.solve(&w) {
            Some(z) => z,
            None => return 0.0,
        };
        let mu = z.norm();
        if mu == 0.0 {
            return 0.0;
        }
        v = z / mu;
        if (mu - mu_prev).abs() <= 1e-13 * mu {
            mu_prev = mu;
            break;
        }
        mu_prev = mu;
    }
    1.0 / mu_prev.sqrt()
}

/// Spectral norm estimate by power iteration on A^T A.
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut norm = 0.0;
    for _ in 0..60 {
        let w = a.transpose() * (a * &v);
        norm = w.norm().sqrt();
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        v = w / wn;
    }
    norm
}

fn conjugate_by_weight(a: &DMatrix<f64>, grid: &Grid, s_exp: f64) -> DMatrix<f64> {
    let n = grid.len();
    let tf = ModeTransform::new(grid);
    let weight = |v: &[f64], s: f64| tf.apply_real_multiplier(v, |k| (1.0 + k * k).powf(s / 2.0));
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    let mut col = vec![0.0; 2 * n];
    for j in 0..2 * n {
        col.fill(0.0);
        col[j] = 1.0;
        // W^{-1} e_j per component
        let w1 = weight(&col[..n], -s_exp);
        let w2 = weight(&col[n..], -s_exp);
        let mut x = DVector::zeros(2 * n);
        for i in 0..n {
            x[i] = w1[i];
            x[n + i] = w2[i];
        }
        let y = a * x;
        let y1 = weight(y.as_slice()[..n].as_ref(), s_exp);
        let y2 = weight(y.as_slice()[n..].as_ref(), s_exp);
        for i in 0..n {
            out[(i, j)] = y1[i];
            out[(n + i, j)] = y2[i];
        }
    }
    out
}

/// Assembles lambda - D(f) (or its adjoint) across grid sizes and reports
/// the smallest singular value per (lambda, N).
#[allow(clippy::too_many_arguments)]
pub fn resolvent_scan(
    shape: &ProfileShape,
    half_width: f64,
    lambdas: &[f64],
    sizes: &[usize],
    flavor: NormFlavor,
    adjoint: bool,
    qcfg: &QuadratureConfig,
) -> Result<ResolventReport> {
    let mut entries = Vec::new();
    for &n in sizes {
        let grid = Grid::new(half_width, n)?;
        let geom = crate::grid::geometry_from_values(grid, &shape.sample(&grid));
        let base = if adjoint {
            DoubleLayerAdjoint::new(&geom, qcfg).assemble()?
        } else {
            DoubleLayer::new(&geom, qcfg).assemble()?
        };
        let base = match flavor {
            NormFlavor::Flat => base,
            NormFlavor::SobolevWeighted { s_exp } => conjugate_by_weight(&base, &grid, s_exp),
        };
        for &lambda in lambdas {
            let mut m = -&base;
            for i in 0..m.nrows() {
                m[(i, i)] += lambda;
            }
            entries.push(ResolventEntry {
                lambda,
                node_count: n,
                sigma_min: smallest_singular_value(&m),
            });
        }
    }
    Ok(ResolventReport {
        flavor,
        adjoint,
        entries,
    })
}

/// Frechet-derivative coefficients of phi_i: d phi_i(f0)[u] = a_i(f0) u'.
/// a1 = f0'/(1+f0'^2)^{3/2} (the closed form collapses to this), a2 = (1+f0'^2)^{-3/2}.
pub fn phi_derivative_coeffs(geom: &GeometryCache) -> (Vec<f64>, Vec<f64>) {
    let a1 = geom
        .d1()
        .iter()
        .zip(geom.omega())
        .map(|(fp, om)| fp / (om * om * om))
        .collect();
    let a2 = geom
        .omega()
        .iter()
        .map(|om| 1.0 / (om * om * om))
        .collect();
    (a1, a2)
}

/// d B^0_{n,2}(g)[u][h] = n B_{n,2}(g,g)[u, g.., h] - 4 B_{n+2,3}(g,g,g)[u, g.., h].
fn db_apply(
    grid: &Grid,
    g: &[f64],
    n: usize,
    u: &[f64],
    h_arg: &[f64],
    qcfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let gl = grid.len();
    let mut out = vec![0.0; gl];
    if n >= 1 {
        let mut b = vec![u.to_vec()];
        b.extend(std::iter::repeat_n(g.to_vec(), n - 1));
        let spec = KernelSpec::new(*grid, vec![g.to_vec(); 2], b)?;
        let t = bnm_apply_all(&spec, h_arg, qcfg)?;
        for i in 0..gl {
            out[i] += n as f64 * t[i];
        }
    }
    let mut b = vec![u.to_vec()];
    b.extend(std::iter::repeat_n(g.to_vec(), n + 1));
    let spec = KernelSpec::new(*grid, vec![g.to_vec(); 3], b)?;
    let t = bnm_apply_all(&spec, h_arg, qcfg)?;
    for i in 0..gl {
        out[i] -= 4.0 * t[i];
    }
    Ok(out)
}

/// Exact directional derivative of the evolution operator along the
/// homotopy path: at tau = 1 this is the Frechet derivative of Phi at f0;
/// at tau = 0 it is the flat-state Fourier multiplier.
pub struct Linearization {
    grid: Grid,
    params: FluidParams,
    tau: f64,
    /// geometry of f0 (second-kind operator, dD, pairing slope)
    base: GeometryCache,
    /// geometry of tau * f0 (where dG is evaluated)
    scaled: GeometryCache,
    /// robust state y0 = (1 + 2 a_mu D(f0))^{-1} G(f0)
    y0: VectorDensity,
    dl: DoubleLayer,
    solver: SolverConfig,
    qcfg: QuadratureConfig,
}

/// Builds the linearization of Phi at f0 (tau = 1).
pub fn linearize_analytic(
    geom: &GeometryCache,
    params: &FluidParams,
    solver: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<Linearization> {
    linearize_on_path(geom, params, 1.0, solver, qcfg)
}

/// Builds the homotopy operator Psi(tau) between the flat multiplier and
/// the full linearization.
pub fn linearize_on_path(
    geom: &GeometryCache,
    params: &FluidParams,
    tau: f64,
    solver: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<Linearization> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Config(format!(
            "homotopy parameter must lie in [0,1], got {tau}"
        )));
    }
    let grid = *geom.grid();
    let g = crate::bvp::g_trace(geom, params, qcfg)?;
    let a_mu = params.contrast();
    let dl = DoubleLayer::new(geom, qcfg);
    let y0 = if a_mu == 0.0 {
        g
    } else {
        solve_second_kind(&dl, 2.0 * a_mu, &g, solver)?.0
    };
    let scaled_values: Vec<f64> = geom.values().iter().map(|v| tau * v).collect();
    let scaled = crate::grid::geometry_from_values(grid, &scaled_values);
    Ok(Linearization {
        grid,
        params: *params,
        tau,
        base: geom.clone(),
        scaled,
        y0,
        dl,
        solver: solver.clone(),
        qcfg: qcfg.clone(),
    })
}

impl Linearization {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Robust homotopy state (beta_0 = 2 a_mu y0).
    pub fn robust_state(&self) -> &VectorDensity {
        &self.y0
    }

    /// dG(tau f0)[u] by term-wise differentiation of the trace formula.
    fn dg_apply(&self, u: &[f64], du: &[f64]) -> Result<VectorDensity> {
        let geom = &self.scaled;
        let grid = &self.grid;
        let n = grid.len();
        let (phi1, phi2) = phi_coeffs(geom);
        let (a1, a2) = phi_derivative_coeffs(geom);
        let gp = geom.d1();
        let gv = geom.values();

        let mut arg_a = vec![0.0; n];
        let mut arg_b = vec![0.0; n];
        let mut arg_c = vec![0.0; n];
        let mut arg_d = vec![0.0; n];
        // coefficient of u' in the derivative of each argument
        let mut da = vec![0.0; n];
        let mut db = vec![0.0; n];
        let mut dc = vec![0.0; n];
        let mut dd = vec![0.0; n];
        for i in 0..n {
            arg_a[i] = phi1[i] + gp[i] * phi2[i];
            arg_b[i] = 3.0 * gp[i] * phi1[i] - phi2[i];
            arg_c[i] = gp[i] * phi1[i] + phi2[i];
            arg_d[i] = gp[i] * phi1[i] - 3.0 * phi2[i];
            da[i] = (a1[i] + phi2[i] + gp[i] * a2[i]) * du[i];
            db[i] = (3.0 * phi1[i] + 3.0 * gp[i] * a1[i] - a2[i]) * du[i];
            dc[i] = (phi1[i] + gp[i] * a1[i] + a2[i]) * du[i];
            dd[i] = (phi1[i] + gp[i] * a1[i] - 3.0 * a2[i]) * du[i];
        }
        // operator-derivative terms
        let d0a = db_apply(grid, gv, 0, u, &arg_a, &self.qcfg)?;
        let d2a = db_apply(grid, gv, 2, u, &arg_a, &self.qcfg)?;
        let d1b = db_apply(grid, gv, 1, u, &arg_b, &self.qcfg)?;
        let d3c = db_apply(grid, gv, 3, u, &arg_c, &self.qcfg)?;
        let d1a = db_apply(grid, gv, 1, u, &arg_a, &self.qcfg)?;
        let d3a = db_apply(grid, gv, 3, u, &arg_a, &self.qcfg)?;
        let d0c = db_apply(grid, gv, 0, u, &arg_c, &self.qcfg)?;
        let d2d = db_apply(grid, gv, 2, u, &arg_d, &self.qcfg)?;
        // argument-derivative terms through the undifferentiated operators
        let o = b_family_apply(
            grid,
            gv,
            2,
            &[
                FamilyTerm { t_power: 0, arg: &da },
                FamilyTerm { t_power: 2, arg: &da },
                FamilyTerm { t_power: 1, arg: &db },
                FamilyTerm { t_power: 3, arg: &dc },
                FamilyTerm { t_power: 1, arg: &da },
                FamilyTerm { t_power: 3, arg: &da },
                FamilyTerm { t_power: 0, arg: &dc },
                FamilyTerm { t_power: 2, arg: &dd },
            ],
            &self.qcfg,
        )?;
        let scale = self.params.sigma() / (4.0 * PI);
        let mut g1 = vec![0.0; n];
        let mut g2 = vec![0.0; n];
        for i in 0..n {
            g1[i] = scale
                * ((d0a[i] - d2a[i] + d1b[i] + d3c[i]) + (o[0][i] - o[1][i] + o[2][i] + o[3][i]));
            g2[i] = scale
                * ((d1a[i] - d3a[i] - d0c[i] + d2d[i]) + (o[4][i] - o[5][i] - o[6][i] + o[7][i]));
        }
        VectorDensity::new(g1, g2)
    }

    /// dD(f0)[u][y] by the same derivative rule on the block formula.
    fn dd_apply(&self, u: &[f64], du: &[f64], y: &VectorDensity) -> Result<VectorDensity> {
        let geom = &self.base;
        let grid = &self.grid;
        let n = grid.len();
        let fv = geom.values();
        let fp = geom.d1();
        let fpy1: Vec<f64> = (0..n).map(|i| fp[i] * y.c1[i]).collect();
        let fpy2: Vec<f64> = (0..n).map(|i| fp[i] * y.c2[i]).collect();
        let dpy1: Vec<f64> = (0..n).map(|i| du[i] * y.c1[i]).collect();
        let dpy2: Vec<f64> = (0..n).map(|i| du[i] * y.c2[i]).collect();

        let d0 = db_apply(grid, fv, 0, u, &fpy1, &self.qcfg)?;
        let d1b = db_apply(grid, fv, 1, u, &fpy2, &self.qcfg)?;
        let d1y = db_apply(grid, fv, 1, u, &y.c1, &self.qcfg)?;
        let d2y = db_apply(grid, fv, 2, u, &y.c2, &self.qcfg)?;
        let d1f = db_apply(grid, fv, 1, u, &fpy1, &self.qcfg)?;
        let d2f = db_apply(grid, fv, 2, u, &fpy2, &self.qcfg)?;
        let d2y1 = db_apply(grid, fv, 2, u, &y.c1, &self.qcfg)?;
        let d3y2 = db_apply(grid, fv, 3, u, &y.c2, &self.qcfg)?;

        let o = b_family_apply(
            grid,
            fv,
            2,
            &[
                FamilyTerm { t_power: 0, arg: &dpy1 },
                FamilyTerm { t_power: 1, arg: &dpy2 },
                FamilyTerm { t_power: 1, arg: &dpy1 },
                FamilyTerm { t_power: 2, arg: &dpy2 },
            ],
            &self.qcfg,
        )?;
        let mut r1 = vec![0.0; n];
        let mut r2 = vec![0.0; n];
        for i in 0..n {
            r1[i] = (d0[i] + d1b[i] - d1y[i] - d2y[i] + o[0][i] + o[1][i]) / PI;
            r2[i] = (d1f[i] + d2f[i] - d2y1[i] - d3y2[i] + o[2][i] + o[3][i]) / PI;
        }
        VectorDensity::new(r1, r2)
    }

    /// Applies Psi(tau) to a direction (Psi(1) is the Frechet derivative
    /// of Phi at f0).
    pub fn apply(&self, direction: &[f64]) -> Result<Vec<f64>> {
        if direction.len() != self.grid.len() {
            return Err(Error::GridMismatch(format!(
                "direction has {} samples for {} nodes",
                direction.len(),
                self.grid.len()
            )));
        }
        let du = derivative1(&self.grid, direction);
        let dg = self.dg_apply(direction, &du)?;
        let a_mu = self.params.contrast();
        let rhs = if self.tau == 0.0 || a_mu == 0.0 {
            dg
        } else {
            let dd = self.dd_apply(direction, &du, &self.y0)?;
            VectorDensity::new(
                dg.c1
                    .iter()
                    .zip(&dd.c1)
                    .map(|(g, d)| g - 2.0 * a_mu * self.tau * d)
                    .collect(),
                dg.c2
                    .iter()
                    .zip(&dd.c2)
                    .map(|(g, d)| g - 2.0 * a_mu * self.tau * d)
                    .collect(),
            )?
        };
        let z = if a_mu == 0.0 || self.tau == 0.0 {
            rhs
        } else {
            solve_second_kind(&self.dl, 2.0 * a_mu * self.tau, &rhs, &self.solver)?.0
        };
        let fp = self.base.d1();
        let scale = 2.0 / self.params.mu_sum();
        Ok((0..self.grid.len())
            .map(|i| {
                scale
                    * (-self.tau * fp[i] * z.c1[i] + z.c2[i]
                        - self.tau * self.y0.c1[i] * du[i])
            })
            .collect())
    }
}

/// Central finite-difference derivative of Phi at f0 in a given direction.
pub fn fd_phi_derivative(
    geom: &GeometryCache,
    direction: &[f64],
    eps: f64,
    params: &FluidParams,
    solver: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let grid = *geom.grid();
    let plus: Vec<f64> = geom
        .values()
        .iter()
        .zip(direction)
        .map(|(f, d)| f + eps * d)
        .collect();
    let minus: Vec<f64> = geom
        .values()
        .iter()
        .zip(direction)
        .map(|(f, d)| f - eps * d)
        .collect();
    let (pp, _) = crate::bvp::phi_rhs(
        &crate::grid::geometry_from_values(grid, &plus),
        params,
        solver,
        qcfg,
    )?;
    let (pm, _) = crate::bvp::phi_rhs(
        &crate::grid::geometry_from_values(grid, &minus),
        params,
        solver,
        qcfg,
    )?;
    Ok(pp
        .iter()
        .zip(&pm)
        .map(|(a, b)| (a - b) / (2.0 * eps))
        .collect())
}

/// Smooth squared partition of unity with interval supports of length eps
/// in |xi| <= 1/eps and a tail window beyond.
#[derive(Debug, Clone)]
pub struct LocalizationFamily {
    pub eps: f64,
    pub windows: Vec<Vec<f64>>,
    pub anchors: Vec<f64>,
    /// Index of the tail window (supported on |xi| >= 1/eps).
    pub tail_index: usize,
}

impl LocalizationFamily {
    /// max over nodes of |sum_j pi_j^2 - 1|.
    pub fn partition_defect(&self) -> f64 {
        let n = self.windows[0].len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            let s: f64 = self.windows.iter().map(|w| w[i] * w[i]).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }
}

/// Builds the family from overlapping polynomial bumps m_j normalized by
/// sqrt(sum m_l^2), so the squared partition property holds by construction.
pub fn build_localization(grid: &Grid, eps: f64) -> Result<LocalizationFamily> {
    if eps.is_nan() || eps <= 0.0 || eps >= 1.0 {
        return Err(Error::Config(format!(
            "localization scale must lie in (0,1), got {eps}"
        )));
    }
    let reach = 1.0 / eps;
    if reach + eps >= grid.half_width() {
        return Err(Error::Config(format!(
            "localization reach 1/eps = {reach} does not fit inside the grid"
        )));
    }
    let half = 0.5 * eps;
    let bump = |t: f64| -> f64 {
        let t2 = t * t;
        if t2 >= 1.0 {
            0.0
        } else {
            (1.0 - t2).powi(4)
        }
    };
    let smoothstep = |t: f64| -> f64 {
        let t = t.clamp(0.0, 1.0);
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    };
    let m = (reach / half).ceil() as i64 + 1;
    let anchors: Vec<f64> = (-m..=m).map(|j| j as f64 * half).collect();
    let n = grid.len();
    let mut raw: Vec<Vec<f64>> = anchors
        .iter()
        .map(|&c| {
            (0..n)
                .map(|i| bump((grid.node(i) - c) / half))
                .collect::<Vec<f64>>()
        })
        .collect();
    // tail ramps up across [1/eps, 1/eps + eps/2] and equals 1 beyond
    let tail: Vec<f64> = (0..n)
        .map(|i| smoothstep((grid.node(i).abs() - reach) / half))
        .collect();
    raw.push(tail);
    let mut denom = vec![0.0; n];
    for w in &raw {
        for i in 0..n {
            denom[i] += w[i] * w[i];
        }
    }
    for (i, d) in denom.iter().enumerate() {
        if *d <= 0.0 {
            return Err(Error::Config(format!(
                "localization family does not cover node {i}"
            )));
        }
    }
    for w in raw.iter_mut() {
        for i in 0..n {
            w[i] /= denom[i].sqrt();
        }
    }
    let tail_index = raw.len() - 1;
    Ok(LocalizationFamily {
        eps,
        windows: raw,
        anchors,
        tail_index,
    })
}

/// Frozen-coefficient multiplier A_{j,tau} = -alpha_tau(xi_j) |D| + beta_tau(xi_j) d/dxi.
pub struct FrozenCoefficients {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// tail coefficient alpha_N = sigma/(2(mu+ + mu-)), beta_N = 0
    pub alpha_tail: f64,
}

/// alpha_tau = sigma/(2(mu+ + mu-)) (a2(tau f0) + tau f0' a1(tau f0)),
/// beta_tau = -2 tau y0^1/(mu+ + mu-) (the viscosity-robust form of
/// -tau beta0^1/(mu+ - mu-)).
pub fn frozen_coefficients(lin: &Linearization, family: &LocalizationFamily) -> FrozenCoefficients {
    let params = lin.params;
    let c = params.sigma() / (2.0 * params.mu_sum());
    let (a1, a2) = phi_derivative_coeffs(&lin.scaled);
    let fp0 = lin.base.d1();
    let grid = lin.grid;
    let mut alpha = Vec::with_capacity(family.anchors.len());
    let mut beta = Vec::with_capacity(family.anchors.len());
    for &anchor in &family.anchors {
        let i = grid
            .nearest_index(anchor)
            .expect("anchors lie inside the grid");
        alpha.push(c * (a2[i] + lin.tau * fp0[i] * a1[i]));
        beta.push(-2.0 * lin.tau * lin.y0.c1[i] / params.mu_sum());
    }
    FrozenCoefficients {
        alpha,
        beta,
        alpha_tail: c,
    }
}

#[derive(Debug, Clone)]
pub struct FrozenCheckRow {
    pub window: usize,
    pub anchor: f64,
    pub wavenumber: f64,
    /// ||pi_j Psi(tau)[p] - A_{j,tau}[pi_j p]|| / ||A_{j,tau}[pi_j p]||.
    pub residual_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct FrozenReport {
    pub rows: Vec<FrozenCheckRow>,
    pub partition_defect: f64,
}

impl FrozenReport {
    /// Mean residual ratio per wavenumber, sorted by wavenumber.
    pub fn mean_ratio_by_wavenumber(&self) -> Vec<(f64, f64)> {
        let mut ks: Vec<f64> = self.rows.iter().map(|r| r.wavenumber).collect();
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ks.dedup();
        ks.iter()
            .map(|&k| {
                let vals: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.wavenumber == k)
                    .map(|r| r.residual_ratio)
                    .collect();
                (k, vals.iter().sum::<f64>() / vals.len() as f64)
            })
            .collect()
    }
}

/// Applies Psi(tau) to wave packets centered at the window anchors and
/// compares against the frozen multiplier prediction per window.
#[allow(clippy::too_many_arguments)]
pub fn frozen_multiplier_check(
    geom: &GeometryCache,
    params: &FluidParams,
    tau: f64,
    eps_loc: f64,
    wavenumbers: &[f64],
    anchor_stride: usize,
    solver: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<FrozenReport> {
    let grid = *geom.grid();
    let family = build_localization(&grid, eps_loc)?;
    let lin = linearize_on_path(geom, params, tau, solver, qcfg)?;
    let coeffs = frozen_coefficients(&lin, &family);
    let tf = ModeTransform::new(&grid);
    let packet_width = 2.0 * eps_loc;
    let mut rows = Vec::new();
    for (j, &anchor) in family.anchors.iter().enumerate().step_by(anchor_stride.max(1)) {
        for &k in wavenumbers {
            let packet: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let x = grid.node(i) - anchor;
                    (k * x).cos() * (-(x / packet_width).powi(2)).exp()
                })
                .collect();
            let psi = lin.apply(&packet)?;
            let window = &family.windows[j];
            let windowed_psi: Vec<f64> =
                psi.iter().zip(window).map(|(v, w)| v * w).collect();
            let windowed_packet: Vec<f64> =
                packet.iter().zip(window).map(|(v, w)| v * w).collect();
            let abs_part = tf.apply_real_multiplier(&windowed_packet, |kk| kk.abs());
            let der_part = tf.derivative(&windowed_packet);
            let predicted: Vec<f64> = (0..grid.len())
                .map(|i| -coeffs.alpha[j] * abs_part[i] + coeffs.beta[j] * der_part[i])
                .collect();
            let num: f64 = windowed_psi
                .iter()
                .zip(&predicted)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den: f64 = predicted.iter().map(|v| v * v).sum::<f64>().sqrt();
            rows.push(FrozenCheckRow {
                window: j,
                anchor,
                wavenumber: k,
                residual_ratio: num / den.max(f64::MIN_POSITIVE),
            });
        }
    }
    Ok(FrozenReport {
        partition_defect: family.partition_defect(),
        rows,
    })
}
