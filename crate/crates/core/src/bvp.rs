//! Fixed-time transmission problem on the interface: the single-layer trace
//! G(f), the second-kind density equation (1 + 2 a_mu D(f)) beta = 2 a_mu G(f),
//! the one-sided velocity traces and the normal-velocity right-hand side
//! Phi(f) driving the evolution.

use crate::error::{Error, Result};
use crate::grid::GeometryCache;
use crate::operators::{DoubleLayer, VectorDensity};
use crate::quadrature::{b_family_apply, FamilyTerm, QuadratureConfig};
use crate::solver::{gmres, solve_dense, LinearMap, SolveStats};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Viscosities and surface tension; the contrast a_mu = (mu+ - mu-)/(mu+ + mu-).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    mu_plus: f64,
    mu_minus: f64,
    sigma: f64,
}

impl FluidParams {
    pub fn new(mu_plus: f64, mu_minus: f64, sigma: f64) -> Result<Self> {
        for (name, v) in [("mu_plus", mu_plus), ("mu_minus", mu_minus), ("sigma", sigma)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            mu_plus,
            mu_minus,
            sigma,
        })
    }

    pub fn mu_plus(&self) -> f64 {
        self.mu_plus
    }

    pub fn mu_minus(&self) -> f64 {
        self.mu_minus
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// a_mu = (mu+ - mu-)/(mu+ + mu-), always in (-1, 1).
    pub fn contrast(&self) -> f64 {
        (self.mu_plus - self.mu_minus) / (self.mu_plus + self.mu_minus)
    }

    pub fn mu_sum(&self) -> f64 {
        self.mu_plus + self.mu_minus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Krylov,
    Dense,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: SolveMethod,
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub restart: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolveMethod::Krylov,
            // well below quadrature error so solver error never dominates
            residual_tol: 1e-10,
            max_iterations: 400,
            restart: 40,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.residual_tol.is_finite() || self.residual_tol <= 0.0 {
            return Err(Error::Config(format!(
                "residual tolerance must be positive, got {}",
                self.residual_tol
            )));
        }
        Ok(())
    }
}

/// phi_1 = f'^2/(omega + omega^2), phi_2 = f'/omega.
pub fn phi_coeffs(geom: &GeometryCache) -> (Vec<f64>, Vec<f64>) {
    let phi1 = geom
        .d1()
        .iter()
        .zip(geom.omega())
        .map(|(fp, om)| fp * fp / (om + om * om))
        .collect();
    let phi2 = geom
        .d1()
        .iter()
        .zip(geom.omega())
        .map(|(fp, om)| fp / om)
        .collect();
    (phi1, phi2)
}

/// Trace of the capillarity-driven single-layer solution,
///
///   4 pi / sigma * G1 = (B0 - B2)[phi1 + f' phi2] + B1[3 f' phi1 - phi2]
///                       + B3[f' phi1 + phi2],
///   4 pi / sigma * G2 = (B1 - B3)[phi1 + f' phi2] - B0[f' phi1 + phi2]
///                       + B2[f' phi1 - 3 phi2],
///
/// with the B^0_{n,2}(f) family.
pub fn g_trace(
    geom: &GeometryCache,
    params: &FluidParams,
    cfg: &QuadratureConfig,
) -> Result<VectorDensity> {
    let (phi1, phi2) = phi_coeffs(geom);
    let fp = geom.d1();
    let n = geom.grid().len();
    let mut arg_a = vec![0.0; n];
    let mut arg_b = vec![0.0; n];
    let mut arg_c = vec![0.0; n];
    let mut arg_d = vec![0.0; n];
    for i in 0..n {
        arg_a[i] = phi1[i] + fp[i] * phi2[i];
        arg_b[i] = 3.0 * fp[i] * phi1[i] - phi2[i];
        arg_c[i] = fp[i] * phi1[i] + phi2[i];
        arg_d[i] = fp[i] * phi1[i] - 3.0 * phi2[i];
    }
    let o = b_family_apply(
        geom.grid(),
        geom.values(),
        2,
        &[
            FamilyTerm { t_power: 0, arg: &arg_a },
            FamilyTerm { t_power: 2, arg: &arg_a },
            FamilyTerm { t_power: 1, arg: &arg_b },
            FamilyTerm { t_power: 3, arg: &arg_c },
            FamilyTerm { t_power: 1, arg: &arg_a },
            FamilyTerm { t_power: 3, arg: &arg_a },
            FamilyTerm { t_power: 0, arg: &arg_c },
            FamilyTerm { t_power: 2, arg: &arg_d },
        ],
        cfg,
    )?;
    let scale = params.sigma / (4.0 * PI);
    let mut g1 = vec![0.0; n];
    let mut g2 = vec![0.0; n];
    for i in 0..n {
        g1[i] = scale * (o[0][i] - o[1][i] + o[2][i] + o[3][i]);
        g2[i] = scale * (o[4][i] - o[5][i] - o[6][i] + o[7][i]);
    }
    VectorDensity::new(g1, g2)
}

/// Matrix-free action of 1 + coupling * D(f) on the stacked density.
pub struct SecondKindOp<'a> {
    pub double_layer: &'a DoubleLayer,
    pub coupling: f64,
}

impl LinearMap for SecondKindOp<'_> {
    fn dim(&self) -> usize {
        2 * self.double_layer.grid().len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let beta = VectorDensity::from_stacked(x);
        let dx = self
            .double_layer
            .apply(&beta)
            .expect("density and operator share the grid");
        for i in 0..x.len() {
            let d = if i < beta.len() {
                dx.c1[i]
            } else {
                dx.c2[i - beta.len()]
            };
            y[i] = x[i] + self.coupling * d;
        }
    }
}

/// Dense matrix of 1 + coupling * D(f).
pub fn second_kind_matrix(dl: &DoubleLayer, coupling: f64) -> Result<DMatrix<f64>> {
    let mut a = dl.assemble()?;
    a *= coupling;
    for i in 0..a.nrows() {
        a[(i, i)] += 1.0;
    }
    Ok(a)
}

/// Solves (1 + coupling D(f)) x = rhs by the configured method.
pub fn solve_second_kind(
    dl: &DoubleLayer,
    coupling: f64,
    rhs: &VectorDensity,
    cfg: &SolverConfig,
) -> Result<(VectorDensity, SolveStats)> {
    cfg.validate()?;
    let stacked = rhs.to_stacked();
    match cfg.method {
        SolveMethod::Krylov => {
            let op = SecondKindOp {
                double_layer: dl,
                coupling,
            };
            let (x, stats) = gmres(
                &op,
                &stacked,
                cfg.residual_tol,
                cfg.max_iterations,
                cfg.restart,
            )?;
            Ok((VectorDensity::from_stacked(&x), stats))
        }
        SolveMethod::Dense => {
            let a = second_kind_matrix(dl, coupling)?;
            let x = solve_dense(&a, &stacked)?;
            // report the true relative residual of the dense solve
            let op = SecondKindOp {
                double_layer: dl,
                coupling,
            };
            let mut ax = vec![0.0; x.len()];
            op.apply(&x, &mut ax);
            let rnorm = ax
                .iter()
                .zip(&stacked)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let bnorm = stacked.iter().map(|v| v * v).sum::<f64>().sqrt();
            let residual = if bnorm > 0.0 { rnorm / bnorm } else { 0.0 };
            Ok((
                VectorDensity::from_stacked(&x),
                SolveStats {
                    iterations: 0,
                    residual,
                    history: vec![residual],
                },
            ))
        }
    }
}

/// Double-layer density from the second-kind equation
/// (1 + 2 a_mu D(f)) beta = 2 a_mu G(f).
pub fn solve_density(
    geom: &GeometryCache,
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<(VectorDensity, SolveStats)> {
    let a_mu = params.contrast();
    let n = geom.grid().len();
    if a_mu == 0.0 {
        // equal viscosities: right-hand side vanishes identically
        return Ok((
            VectorDensity::zeros(n),
            SolveStats {
                iterations: 0,
                residual: 0.0,
                history: vec![0.0],
            },
        ));
    }
    let g = g_trace(geom, params, qcfg)?;
    let rhs = VectorDensity::new(
        g.c1.iter().map(|v| 2.0 * a_mu * v).collect(),
        g.c2.iter().map(|v| 2.0 * a_mu * v).collect(),
    )?;
    let dl = DoubleLayer::new(geom, qcfg);
    solve_second_kind(&dl, 2.0 * a_mu, &rhs, cfg)
}

/// One-sided velocity traces v± = G/mu± + (-D ± 1/2)[beta]/mu±.
pub fn velocity_traces(
    geom: &GeometryCache,
    params: &FluidParams,
    g: &VectorDensity,
    beta: &VectorDensity,
    qcfg: &QuadratureConfig,
) -> Result<(VectorDensity, VectorDensity)> {
    let dl = DoubleLayer::new(geom, qcfg);
    let dbeta = dl.apply(beta)?;
    let n = geom.grid().len();
    let mut vp = VectorDensity::zeros(n);
    let mut vm = VectorDensity::zeros(n);
    for i in 0..n {
        let common1 = g.c1[i] - dbeta.c1[i];
        let common2 = g.c2[i] - dbeta.c2[i];
        vp.c1[i] = (common1 + 0.5 * beta.c1[i]) / params.mu_plus();
        vp.c2[i] = (common2 + 0.5 * beta.c2[i]) / params.mu_plus();
        vm.c1[i] = (common1 - 0.5 * beta.c1[i]) / params.mu_minus();
        vm.c2[i] = (common2 - 0.5 * beta.c2[i]) / params.mu_minus();
    }
    Ok((vp, vm))
}

/// Normal-velocity right-hand side in the viscosity-robust form
///
///   Phi(f) = 2/(mu+ + mu-) <(1 + 2 a_mu D(f))^{-1} G(f) | (-f', 1)>,
///
/// algebraically equal to <beta | (-f',1)>/(mu+ - mu-) for distinct
/// viscosities and continuous through a_mu = 0.
pub fn phi_rhs(
    geom: &GeometryCache,
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<(Vec<f64>, SolveStats)> {
    let g = g_trace(geom, params, qcfg)?;
    let a_mu = params.contrast();
    let (y, stats) = if a_mu == 0.0 {
        (
            g.clone(),
            SolveStats {
                iterations: 0,
                residual: 0.0,
                history: vec![0.0],
            },
        )
    } else {
        let dl = DoubleLayer::new(geom, qcfg);
        solve_second_kind(&dl, 2.0 * a_mu, &g, cfg)?
    };
    let fp = geom.d1();
    let scale = 2.0 / params.mu_sum();
    let phi = (0..geom.grid().len())
        .map(|i| scale * (-fp[i] * y.c1[i] + y.c2[i]))
        .collect();
    Ok((phi, stats))
}

/// Phi via the contrast form <beta|(-f',1)>/(mu+ - mu-); requires
/// distinct viscosities.
pub fn phi_rhs_via_beta(
    geom: &GeometryCache,
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let dmu = params.mu_plus() - params.mu_minus();
    if dmu == 0.0 {
        return Err(Error::InvalidParameter(
            "contrast form of Phi needs distinct viscosities".into(),
        ));
    }
    let (beta, _) = solve_density(geom, params, cfg, qcfg)?;
    let fp = geom.d1();
    Ok((0..geom.grid().len())
        .map(|i| (-fp[i] * beta.c1[i] + beta.c2[i]) / dmu)
        .collect())
}

/// Phi via the plus-phase trace form
/// (1/mu+) <G - D beta + beta/2 | (-f', 1)>.
pub fn phi_rhs_via_trace(
    geom: &GeometryCache,
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let g = g_trace(geom, params, qcfg)?;
    let (beta, _) = solve_density(geom, params, cfg, qcfg)?;
    let dl = DoubleLayer::new(geom, qcfg);
    let dbeta = dl.apply(&beta)?;
    let fp = geom.d1();
    Ok((0..geom.grid().len())
        .map(|i| {
            let w1 = g.c1[i] - dbeta.c1[i] + 0.5 * beta.c1[i];
            let w2 = g.c2[i] - dbeta.c2[i] + 0.5 * beta.c2[i];
            (-fp[i] * w1 + w2) / params.mu_plus()
        })
        .collect())
}

/// Bundle of the fixed-time boundary fields for diagnostics output.
#[derive(Debug, Clone)]
pub struct TraceFields {
    pub g: VectorDensity,
    pub beta: VectorDensity,
    pub v_plus: VectorDensity,
    pub v_minus: VectorDensity,
    pub phi: Vec<f64>,
    pub stats: SolveStats,
}

pub fn compute_trace_fields(
    geom: &GeometryCache,
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<TraceFields> {
    let g = g_trace(geom, params, qcfg)?;
    let (beta, stats) = solve_density(geom, params, cfg, qcfg)?;
    let (v_plus, v_minus) = velocity_traces(geom, params, &g, &beta, qcfg)?;
    let (phi, _) = phi_rhs(geom, params, cfg, qcfg)?;
    Ok(TraceFields {
        g,
        beta,
        v_plus,
        v_minus,
        phi,
        stats,
    })
}

/// Pointwise R^2 pairing <v|(-f',1)> used by the evolution right-hand side.
pub fn normal_pairing(fp: &[f64], v: &VectorDensity) -> Vec<f64> {
    (0..v.len()).map(|i| -fp[i] * v.c1[i] + v.c2[i]).collect()
}
