//! Time integration of the interface evolution df/dt = Phi(f).
//!
//! Two steppers: classical RK4 on the method of lines with step-doubling
//! adaptivity, and a semi-implicit (IMEX) Euler step that treats the
//! flat-state multiplier -sigma/(2(mu+ + mu-)) |k| implicitly on the
//! periodic extension. Profiles vanish near +-L by the decay gate, so the
//! wrap-around of the periodic multiplier stays below that tolerance.

use crate::bvp::{phi_rhs, FluidParams, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::{geometry_from_values, l2_norm, linf_norm, InterfaceProfile};
use crate::quadrature::QuadratureConfig;
use crate::spectral::ModeTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ExplicitRk4,
    Imex,
}

#[derive(Debug, Clone)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Step-doubling error tolerance for the explicit scheme (L2 per step).
    pub adapt_tol: f64,
    pub horizon: f64,
    /// Snapshots are kept every this many accepted steps (plus first/last).
    pub snapshot_stride: usize,
    /// A run terminates (invariant breach) once ||f'||_inf exceeds this cap.
    pub slope_cap: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::ExplicitRk4,
            dt_init: 1e-2,
            dt_min: 1e-6,
            dt_max: 0.5,
            adapt_tol: 1e-7,
            horizon: 1.0,
            snapshot_stride: 5,
            slope_cap: 10.0,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        let ordered =
            self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max;
        if !ordered {
            return Err(Error::Config(format!(
                "need 0 < dt_min <= dt_init <= dt_max, got {} / {} / {}",
                self.dt_min, self.dt_init, self.dt_max
            )));
        }
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err(Error::Config(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot stride must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    HorizonReached,
    StepSizeUnderflow,
    InvariantBreach(String),
}

#[derive(Debug, Clone)]
pub struct StepDiagnostics {
    pub time: f64,
    pub dt: f64,
    pub solver_iterations: usize,
    pub solver_residual: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub profiles: Vec<InterfaceProfile>,
    pub steps: Vec<StepDiagnostics>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn final_profile(&self) -> &InterfaceProfile {
        self.profiles.last().expect("trajectory stores f(0)")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory stores t = 0")
    }
}

/// Evolution right-hand side Phi(f) on raw values (delegates to the
/// viscosity-robust fixed-time solve).
pub fn rhs(
    profile: &InterfaceProfile,
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<(Vec<f64>, crate::solver::SolveStats)> {
    let geom = crate::grid::geometry(profile);
    phi_rhs(&geom, params, cfg, qcfg)
}

struct RhsEval {
    values: Vec<f64>,
    iterations: usize,
    residual: f64,
}

fn rhs_values(
    grid: crate::grid::Grid,
    values: &[f64],
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<RhsEval> {
    let geom = geometry_from_values(grid, values);
    let (phi, stats) = phi_rhs(&geom, params, cfg, qcfg)?;
    Ok(RhsEval {
        values: phi,
        iterations: stats.iterations,
        residual: stats.residual,
    })
}

fn axpy(base: &[f64], scale: f64, dir: &[f64]) -> Vec<f64> {
    base.iter().zip(dir).map(|(b, d)| b + scale * d).collect()
}

fn finite(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}

/// One classical RK4 step on raw values; dt may be negative (used by the
/// parabolicity diagnostics).
fn rk4_raw(
    grid: crate::grid::Grid,
    values: &[f64],
    dt: f64,
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<(Vec<f64>, usize, f64)> {
    let k1 = rhs_values(grid, values, params, cfg, qcfg)?;
    let s2 = axpy(values, 0.5 * dt, &k1.values);
    if !finite(&s2) {
        return Err(Error::InvalidProfile("non-finite RK4 stage".into()));
    }
    let k2 = rhs_values(grid, &s2, params, cfg, qcfg)?;
    let s3 = axpy(values, 0.5 * dt, &k2.values);
    if !finite(&s3) {
        return Err(Error::InvalidProfile("non-finite RK4 stage".into()));
    }
    let k3 = rhs_values(grid, &s3, params, cfg, qcfg)?;
    let s4 = axpy(values, dt, &k3.values);
    if !finite(&s4) {
        return Err(Error::InvalidProfile("non-finite RK4 stage".into()));
    }
    let k4 = rhs_values(grid, &s4, params, cfg, qcfg)?;
    let out: Vec<f64> = (0..values.len())
        .map(|i| {
            values[i]
                + dt / 6.0
                    * (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] + k4.values[i])
        })
        .collect();
    if !finite(&out) {
        return Err(Error::InvalidProfile("non-finite RK4 result".into()));
    }
    let iters = k1.iterations + k2.iterations + k3.iterations + k4.iterations;
    let res = k1.residual.max(k2.residual).max(k3.residual).max(k4.residual);
    Ok((out, iters, res))
}

pub struct ExplicitStep {
    pub values: Vec<f64>,
    pub error_estimate: f64,
    pub solver_iterations: usize,
    pub solver_residual: f64,
}

/// One explicit step: full-dt RK4 against two half-dt RK4 steps; the
/// composite half-step result is returned with the step-doubling error
/// estimate ||full - halves|| / 15 driving adaptivity.
pub fn step_explicit(
    profile: &InterfaceProfile,
    dt: f64,
    params: &FluidParams,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<ExplicitStep> {
    let grid = *profile.grid();
    let (full, it1, res1) = rk4_raw(grid, profile.values(), dt, params, cfg, qcfg)?;
    let (half, it2, res2) = rk4_raw(grid, profile.values(), 0.5 * dt, params, cfg, qcfg)?;
    let (halves, it3, res3) = rk4_raw(grid, &half, 0.5 * dt, params, cfg, qcfg)?;
    let diff: Vec<f64> = full.iter().zip(&halves).map(|(a, b)| a - b).collect();
    Ok(ExplicitStep {
        values: halves,
        error_estimate: l2_norm(&grid, &diff) / 15.0,
        solver_iterations: it1 + it2 + it3,
        solver_residual: res1.max(res2).max(res3),
    })
}

/// Semi-implicit Euler: f_{n+1} = (I - dt A)^{-1} (f_n + dt (Phi(f_n) - A f_n))
/// with A the flat-state multiplier -sigma/(2(mu+ + mu-)) |k| applied via the
/// discrete Fourier transform on the periodic extension.
pub fn step_imex(
    profile: &InterfaceProfile,
    dt: f64,
    params: &FluidParams,
    transform: &ModeTransform,
    cfg: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<ExplicitStep> {
    let grid = *profile.grid();
    let rate = params.sigma() / (2.0 * params.mu_sum());
    let phi = rhs_values(grid, profile.values(), params, cfg, qcfg)?;
    let af = transform.apply_real_multiplier(profile.values(), |k| -rate * k.abs());
    let staged: Vec<f64> = (0..grid.len())
        .map(|i| profile.values()[i] + dt * (phi.values[i] - af[i]))
        .collect();
    let out = transform.apply_real_multiplier(&staged, |k| 1.0 / (1.0 + dt * rate * k.abs()));
    if !finite(&out) {
        return Err(Error::InvalidProfile("non-finite IMEX result".into()));
    }
    Ok(ExplicitStep {
        values: out,
        error_estimate: 0.0,
        solver_iterations: phi.iterations,
        solver_residual: phi.residual,
    })
}

/// Integrates to the horizon (or to termination), keeping snapshots at the
/// configured cadence.
pub fn simulate(
    f0: &InterfaceProfile,
    params: &FluidParams,
    stepper: &StepperConfig,
    solver: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<Trajectory> {
    stepper.validate()?;
    solver.validate()?;
    let grid = *f0.grid();
    let transform = ModeTransform::new(&grid);
    let mut times = vec![0.0];
    let mut profiles = vec![f0.clone()];
    let mut steps: Vec<StepDiagnostics> = Vec::new();
    let mut current = f0.clone();
    let mut t = 0.0;
    let mut dt = stepper.dt_init;
    let mut accepted = 0usize;

    let termination = 'outer: loop {
        if t >= stepper.horizon - 1e-14 * stepper.horizon {
            break Termination::HorizonReached;
        }
        if let Some(reason) = breach(&current, stepper) {
            break Termination::InvariantBreach(reason);
        }
        let dt_step = dt.min(stepper.horizon - t);
        let step = match stepper.scheme {
            Scheme::ExplicitRk4 => {
                let mut dt_try = dt_step;
                loop {
                    match step_explicit(&current, dt_try, params, solver, qcfg) {
                        Ok(s) if s.error_estimate <= stepper.adapt_tol => {
                            // grow cautiously when the estimate leaves room
                            if s.error_estimate < 0.02 * stepper.adapt_tol {
                                dt = (2.0 * dt_try).min(stepper.dt_max);
                            } else {
                                dt = dt_try;
                            }
                            break Ok((s, dt_try));
                        }
                        Ok(_) | Err(Error::InvalidProfile(_)) => {
                            let halved = 0.5 * dt_try;
                            if halved < stepper.dt_min {
                                break 'outer Termination::StepSizeUnderflow;
                            }
                            dt_try = halved;
                        }
                        Err(e) => break Err(e),
                    }
                }
            }
            Scheme::Imex => {
                step_imex(&current, dt_step, params, &transform, solver, qcfg)
                    .map(|s| (s, dt_step))
            }
        };
        let (step, dt_used) = match step {
            Ok(v) => v,
            Err(Error::InvalidProfile(reason)) => {
                break Termination::InvariantBreach(reason);
            }
            Err(e) => return Err(e),
        };
        let candidate = match InterfaceProfile::new(grid, step.values, f0.decay_tol()) {
            Ok(p) => p,
            Err(e) => break Termination::InvariantBreach(e.to_string()),
        };
        t += dt_used;
        accepted += 1;
        steps.push(StepDiagnostics {
            time: t,
            dt: dt_used,
            solver_iterations: step.solver_iterations,
            solver_residual: step.solver_residual,
            error_estimate: step.error_estimate,
        });
        current = candidate;
        let at_horizon = t >= stepper.horizon - 1e-14 * stepper.horizon;
        if accepted.is_multiple_of(stepper.snapshot_stride) || at_horizon {
            times.push(t);
            profiles.push(current.clone());
        }
        if at_horizon {
            break Termination::HorizonReached;
        }
    };
    // keep the final state even when terminating off-cadence
    if *times.last().unwrap() < t {
        times.push(t);
        profiles.push(current);
    }
    Ok(Trajectory {
        times,
        profiles,
        steps,
        termination,
    })
}

fn breach(profile: &InterfaceProfile, stepper: &StepperConfig) -> Option<String> {
    let d1 = crate::grid::derivative1(profile.grid(), profile.values());
    let slope = linf_norm(&d1);
    if !slope.is_finite() {
        return Some("non-finite slope".into());
    }
    if slope > stepper.slope_cap {
        return Some(format!(
            "slope {slope:.3} exceeds cap {}",
            stepper.slope_cap
        ));
    }
    None
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub lambda: f64,
    pub discrepancy: f64,
    pub reference_norm: f64,
    pub relative_discrepancy: f64,
    /// ||f(T) - f0||_2 of the reference run; guards against a vacuous pass
    /// on frozen dynamics.
    pub evolution_magnitude: f64,
}

/// Runs f0 to time T and the rescaled datum f0(lambda .)/lambda to time
/// T/lambda on the grid of half-width L/lambda, and reports
/// || f(T)(lambda .)/lambda - f_lambda(T/lambda) ||_2 / ||f0||_2.
/// The rescaled nodes lambda*xi'_i coincide with the original nodes, so the
/// comparison needs no interpolation.
pub fn scaling_check(
    f0: &InterfaceProfile,
    lambda: f64,
    params: &FluidParams,
    stepper: &StepperConfig,
    solver: &SolverConfig,
    qcfg: &QuadratureConfig,
) -> Result<ScalingReport> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Config(format!(
            "scaling factor must be positive, got {lambda}"
        )));
    }
    let grid = *f0.grid();
    let scaled_grid = crate::grid::Grid::new(grid.half_width() / lambda, grid.len())?;
    let scaled_values: Vec<f64> = f0.values().iter().map(|v| v / lambda).collect();
    let scaled_tol = f0.decay_tol() * lambda.recip().max(1.0);
    let scaled = InterfaceProfile::new(scaled_grid, scaled_values, scaled_tol)?;

    let run1 = simulate(f0, params, stepper, solver, qcfg)?;
    let mut stepper2 = stepper.clone();
    stepper2.horizon = stepper.horizon / lambda;
    stepper2.dt_init = stepper.dt_init / lambda;
    stepper2.dt_min = stepper.dt_min / lambda;
    stepper2.dt_max = stepper.dt_max / lambda;
    let run2 = simulate(&scaled, params, &stepper2, solver, qcfg)?;
    for (run, name) in [(&run1, "reference"), (&run2, "rescaled")] {
        if run.termination != Termination::HorizonReached {
            return Err(Error::Config(format!(
                "{name} scaling run terminated early: {:?}",
                run.termination
            )));
        }
    }
    let f_end = run1.final_profile().values();
    let g_end = run2.final_profile().values();
    let diff: Vec<f64> = f_end
        .iter()
        .zip(g_end)
        .map(|(fv, gv)| fv / lambda - gv)
        .collect();
    let discrepancy = l2_norm(&scaled_grid, &diff);
    let reference_norm = l2_norm(&grid, f0.values());
    let moved: Vec<f64> = f_end
        .iter()
        .zip(f0.values())
        .map(|(a, b)| a - b)
        .collect();
    Ok(ScalingReport {
        lambda,
        discrepancy,
        reference_norm,
        relative_discrepancy: discrepancy / reference_norm,
        evolution_magnitude: l2_norm(&grid, &moved),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, ProfileShape};
    use crate::spectral::ModeTransform;

    fn zero_profile(n: usize, l: f64) -> InterfaceProfile {
        let grid = Grid::new(l, n).unwrap();
        InterfaceProfile::from_shape(grid, &ProfileShape::Zero, 1e-12).unwrap()
    }

    // The interface velocity of a localized bump has algebraic tails, so on
    // these small test domains the decay tolerance must stay moderate.
    fn small_packet(n: usize, l: f64, amp: f64, k: f64, w: f64) -> InterfaceProfile {
        let grid = Grid::new(l, n).unwrap();
        InterfaceProfile::from_shape(
            grid,
            &ProfileShape::ModulatedWave {
                amplitude: amp,
                wavenumber: k,
                width: w,
            },
            1e-4,
        )
        .unwrap()
    }

    fn gaussian(n: usize, l: f64, amp: f64) -> InterfaceProfile {
        let grid = Grid::new(l, n).unwrap();
        InterfaceProfile::from_shape(
            grid,
            &ProfileShape::GaussianBump {
                amplitude: amp,
                width: 1.0,
            },
            1e-5,
        )
        .unwrap()
    }

    fn default_params() -> FluidParams {
        FluidParams::new(2.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn zero_profile_is_a_fixed_point() {
        let f0 = zero_profile(128, 16.0);
        let params = default_params();
        let scfg = SolverConfig::default();
        let qcfg = QuadratureConfig::default();
        let (phi, _) = rhs(&f0, &params, &scfg, &qcfg).unwrap();
        assert!(phi.iter().all(|&v| v == 0.0));
        let cfg = StepperConfig {
            horizon: 0.1,
            ..StepperConfig::default()
        };
        let traj = simulate(&f0, &params, &cfg, &scfg, &qcfg).unwrap();
        assert_eq!(traj.termination, Termination::HorizonReached);
        for p in &traj.profiles {
            assert!(p.values().iter().all(|&v| v == 0.0));
        }
        // IMEX preserves the fixed point too
        let cfg = StepperConfig {
            scheme: Scheme::Imex,
            horizon: 0.1,
            ..StepperConfig::default()
        };
        let traj = simulate(&f0, &params, &cfg, &scfg, &qcfg).unwrap();
        for p in &traj.profiles {
            assert!(p.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn rhs_is_deterministic() {
        let f0 = gaussian(128, 16.0, 0.2);
        let params = default_params();
        let scfg = SolverConfig::default();
        let qcfg = QuadratureConfig::default();
        let (a, _) = rhs(&f0, &params, &scfg, &qcfg).unwrap();
        let (b, _) = rhs(&f0, &params, &scfg, &qcfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn simulate_is_bit_reproducible() {
        let f0 = gaussian(128, 16.0, 0.2);
        let params = default_params();
        let scfg = SolverConfig::default();
        let qcfg = QuadratureConfig::default();
        let cfg = StepperConfig {
            horizon: 0.05,
            dt_init: 0.01,
            ..StepperConfig::default()
        };
        let t1 = simulate(&f0, &params, &cfg, &scfg, &qcfg).unwrap();
        let t2 = simulate(&f0, &params, &cfg, &scfg, &qcfg).unwrap();
        assert_eq!(t1.times, t2.times);
        for (p, q) in t1.profiles.iter().zip(&t2.profiles) {
            assert_eq!(p.values(), q.values());
        }
    }

    #[test]
    fn rk4_self_convergence_is_fourth_order() {
        let f0 = gaussian(128, 16.0, 0.2);
        let params = default_params();
        let scfg = SolverConfig::default();
        let qcfg = QuadratureConfig::default();
        let grid = *f0.grid();
        // reference: four quarter steps
        let dt = 0.04;
        let mut reference = f0.values().to_vec();
        for _ in 0..4 {
            reference = rk4_raw(grid, &reference, dt / 4.0, &params, &scfg, &qcfg)
                .unwrap()
                .0;
        }
        let (full, _, _) = rk4_raw(grid, f0.values(), dt, &params, &scfg, &qcfg).unwrap();
        let (h1, _, _) = rk4_raw(grid, f0.values(), dt / 2.0, &params, &scfg, &qcfg).unwrap();
        let (half, _, _) = rk4_raw(grid, &h1, dt / 2.0, &params, &scfg, &qcfg).unwrap();
        let err_full = l2_norm(
            &grid,
            &full
                .iter()
                .zip(&reference)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        let err_half = l2_norm(
            &grid,
            &half
                .iter()
                .zip(&reference)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        let ratio = err_full / err_half;
        assert!(
            (10.0..30.0).contains(&ratio),
            "step-doubling ratio {ratio} (errors {err_full:.3e}, {err_half:.3e})"
        );
    }

    #[test]
    fn imex_decays_linear_packet_at_symbol_rate() {
        // k = 2 packet, amplitude 1e-4: exact linear decay rate
        // sigma k / (2 (mu+ + mu-)) = 1/3; measured within 10% over t <= 1.
        let k = 2.0;
        let f0 = small_packet(1024, 64.0, 1e-4, k, 16.0);
        let params = default_params();
        let scfg = SolverConfig::default();
        let qcfg = QuadratureConfig::default();
        let cfg = StepperConfig {
            scheme: Scheme::Imex,
            dt_init: 0.01,
            dt_min: 0.01,
            dt_max: 0.01,
            horizon: 1.0,
            snapshot_stride: 100,
            ..StepperConfig::default()
        };
        let traj = simulate(&f0, &params, &cfg, &scfg, &qcfg).unwrap();
        assert_eq!(traj.termination, Termination::HorizonReached);
        let grid = *f0.grid();
        let tf = ModeTransform::new(&grid);
        let band_energy = |vals: &[f64]| -> f64 {
            tf.power_spectrum(&grid, vals)
                .iter()
                .zip(tf.wavenumbers())
                .filter(|(_, &kk)| (kk.abs() - k).abs() <= 0.5)
                .map(|(p, _)| p)
                .sum::<f64>()
        };
        let a0 = band_energy(f0.values()).sqrt();
        let a1 = band_energy(traj.final_profile().values()).sqrt();
        let rate = (a0 / a1).ln() / traj.final_time();
        let expected = params.sigma() * k / (2.0 * params.mu_sum());
        assert!(
            (rate - expected).abs() <= 0.1 * expected,
            "measured decay rate {rate}, expected {expected}"
        );
    }

    #[test]
    fn imex_stable_at_ten_times_explicit_limit() {
        // stiffest resolved mode k_max = pi/h; explicit RK4 needs
        // dt <~ 2.78/(rate k_max); IMEX runs at 10x that without blow-up.
        // Long horizons spread the bump, so the gate is kept loose here:
        // this test is about stability only.
        let grid = Grid::new(16.0, 256).unwrap();
        let f0 = InterfaceProfile::new(
            grid,
            ProfileShape::GaussianBump {
                amplitude: 0.2,
                width: 1.0,
            }
            .sample(&grid),
            1e-2,
        )
        .unwrap();
        let params = default_params();
        let scfg = SolverConfig::default();
        let qcfg = QuadratureConfig::default();
        let h = grid.spacing();
        let rate = params.sigma() / (2.0 * params.mu_sum());
        let dt_explicit = 2.78 / (rate * std::f64::consts::PI / h);
        let dt = 10.0 * dt_explicit;
        let cfg = StepperConfig {
            scheme: Scheme::Imex,
            dt_init: dt,
            dt_min: dt,
            dt_max: dt,
            horizon: 10.0 * dt,
            snapshot_stride: 100,
            ..StepperConfig::default()
        };
        let traj = simulate(&f0, &params, &cfg, &scfg, &qcfg).unwrap();
        assert_eq!(traj.termination, Termination::HorizonReached);
        let max0 = linf_norm(f0.values());
        assert!(linf_norm(traj.final_profile().values()) <= 2.0 * max0);
    }

    #[test]
    fn schemes_agree_for_small_amplitude() {
        let f0 = small_packet(256, 16.0, 1e-3, 1.0, 4.0);
        let params = default_params();
        let scfg = SolverConfig::default();
        let qcfg = QuadratureConfig::default();
        let explicit = StepperConfig {
            horizon: 0.5,
            dt_init: 0.02,
            adapt_tol: 1e-9,
            snapshot_stride: 1000,
            ..StepperConfig::default()
        };
        let imex = StepperConfig {
            scheme: Scheme::Imex,
            horizon: 0.5,
            dt_init: 2e-3,
            dt_min: 2e-3,
            dt_max: 2e-3,
            snapshot_stride: 1000,
            ..StepperConfig::default()
        };
        let te = simulate(&f0, &params, &explicit, &scfg, &qcfg).unwrap();
        let ti = simulate(&f0, &params, &imex, &scfg, &qcfg).unwrap();
        let grid = *f0.grid();
        let diff: Vec<f64> = te
            .final_profile()
            .values()
            .iter()
            .zip(ti.final_profile().values())
            .map(|(a, b)| a - b)
            .collect();
        let rel = l2_norm(&grid, &diff) / l2_norm(&grid, f0.values());
        // IMEX is first order in time; budget dt * O(rate^2 ||f||)
        assert!(rel <= 5e-3, "scheme disagreement {rel}");
    }

    #[test]
    fn small_data_max_norm_decreases() {
        let f0 = gaussian(256, 16.0, 0.05);
        let params = default_params();
        let cfg = StepperConfig {
            horizon: 0.5,
            dt_init: 0.05,
            snapshot_stride: 2,
            ..StepperConfig::default()
        };
        let traj = simulate(
            &f0,
            &params,
            &cfg,
            &SolverConfig::default(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        let norms: Vec<f64> = traj.profiles.iter().map(|p| linf_norm(p.values())).collect();
        for w in norms.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "max-norm grew: {norms:?}");
        }
    }

    #[test]
    fn backward_stepping_amplifies_high_modes() {
        // smooth forward, then step the reversed equation: the top-quartile
        // spectrum must grow (sign of parabolicity).
        let f0 = gaussian(256, 16.0, 0.2);
        let params = default_params();
        let scfg = SolverConfig::default();
        let qcfg = QuadratureConfig::default();
        let grid = *f0.grid();
        let forward = StepperConfig {
            horizon: 0.2,
            dt_init: 0.02,
            snapshot_stride: 100,
            ..StepperConfig::default()
        };
        let traj = simulate(&f0, &params, &forward, &scfg, &qcfg).unwrap();
        let smoothed = traj.final_profile().values().to_vec();
        let tf = ModeTransform::new(&grid);
        let top_quartile = |vals: &[f64]| -> f64 {
            let spectrum = tf.power_spectrum(&grid, vals);
            let kmax = std::f64::consts::PI / grid.spacing();
            spectrum
                .iter()
                .zip(tf.wavenumbers())
                .filter(|(_, &k)| k.abs() >= 0.75 * kmax)
                .map(|(p, _)| p)
                .sum()
        };
        let before = top_quartile(&smoothed);
        let mut vals = smoothed;
        for _ in 0..6 {
            vals = rk4_raw(grid, &vals, -0.02, &params, &scfg, &qcfg).unwrap().0;
        }
        let after = top_quartile(&vals);
        assert!(
            after > 3.0 * before.max(1e-300),
            "top-quartile energy before {before:.3e}, after {after:.3e}"
        );
    }

    #[test]
    fn slope_cap_terminates_run() {
        let grid = Grid::new(16.0, 128).unwrap();
        let steep = InterfaceProfile::new(
            grid,
            ProfileShape::GaussianBump {
                amplitude: 3.0,
                width: 0.8,
            }
            .sample(&grid),
            1e-6,
        )
        .unwrap();
        let cfg = StepperConfig {
            slope_cap: 1.0,
            horizon: 0.1,
            ..StepperConfig::default()
        };
        let traj = simulate(
            &steep,
            &default_params(),
            &cfg,
            &SolverConfig::default(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(matches!(traj.termination, Termination::InvariantBreach(_)));
    }

    #[test]
    fn scaling_identity_at_lambda_one() {
        let grid = Grid::new(16.0, 128).unwrap();
        let f0 = InterfaceProfile::new(
            grid,
            ProfileShape::GaussianBump {
                amplitude: 0.2,
                width: 1.0,
            }
            .sample(&grid),
            1e-4,
        )
        .unwrap();
        let params = default_params();
        let cfg = StepperConfig {
            scheme: Scheme::Imex,
            horizon: 0.1,
            dt_init: 0.01,
            dt_min: 0.005,
            dt_max: 0.02,
            ..StepperConfig::default()
        };
        let report = scaling_check(
            &f0,
            1.0,
            &params,
            &cfg,
            &SolverConfig::default(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!(report.discrepancy, 0.0);
        // zero datum: exact for any lambda
        let z = zero_profile(128, 16.0);
        let report = scaling_check(
            &z,
            2.0,
            &params,
            &cfg,
            &SolverConfig::default(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!(report.discrepancy, 0.0);
    }
}
