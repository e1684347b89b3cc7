//! Acceptance suite: one test per engine-level acceptance criterion, each
//! printing a PASS/FAIL line with the measured quantity.
//!
//! Default setup: f(xi) = 0.3 exp(-xi^2), mu+ = 2, mu- = 1, sigma = 1,
//! grid L = 64, N = 1024 unless stated by the criterion.

#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use stokes2p_core::bvp::{
    self, compute_trace_fields, g_trace, phi_rhs, solve_density, FluidParams, SolveMethod,
    SolverConfig,
};
use stokes2p_core::diagnostics::{
    fd_phi_derivative, linearize_analytic, resolvent_scan, NormFlavor,
};
use stokes2p_core::evolution::{
    scaling_check, simulate, Scheme, StepperConfig, Termination,
};
use stokes2p_core::fields::{jump_check_double, jump_check_single, FieldConfig};
use stokes2p_core::grid::{
    geometry, geometry_from_values, l2_norm, Grid, InterfaceProfile, ProfileShape,
};
use stokes2p_core::operators::{
    hilbert, DoubleLayer, DoubleLayerAdjoint, LaplaceOps, TOp, VectorDensity,
};
use stokes2p_core::quadrature::QuadratureConfig;

const L: f64 = 64.0;

fn default_params() -> FluidParams {
    FluidParams::new(2.0, 1.0, 1.0).unwrap()
}

fn default_profile(n: usize) -> InterfaceProfile {
    let grid = Grid::new(L, n).unwrap();
    InterfaceProfile::from_shape(
        grid,
        &ProfileShape::GaussianBump {
            amplitude: 0.3,
            width: 1.0,
        },
        1e-4,
    )
    .unwrap()
}

fn seeded_density(grid: &Grid, seed: u64) -> VectorDensity {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let env = |x: f64| (-(x / 16.0) * (x / 16.0) * 4.0).exp();
    let c1 = grid
        .nodes()
        .iter()
        .map(|&x| env(x) * rng.gen_range(-1.0..1.0))
        .collect();
    let c2 = grid
        .nodes()
        .iter()
        .map(|&x| env(x) * rng.gen_range(-1.0..1.0))
        .collect();
    VectorDensity::new(c1, c2).unwrap()
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[test]
fn criterion_01_flat_interface_is_steady() {
    let grid = Grid::new(L, 1024).unwrap();
    let f0 = InterfaceProfile::from_shape(grid, &ProfileShape::Zero, 1e-12).unwrap();
    let geom = geometry(&f0);
    let (phi, _) = phi_rhs(
        &geom,
        &default_params(),
        &SolverConfig::default(),
        &QuadratureConfig::default(),
    )
    .unwrap();
    let norm = l2_norm(&grid, &phi);
    let ok = norm <= 1e-12;
    println!("criterion 01 flat steady state: {} (||Phi(0)||_2 = {norm:.3e} <= 1e-12)", verdict(ok));
    assert!(ok);
}

#[test]
fn criterion_02_affine_profiles_annihilate_kernels() {
    let grid = Grid::new(L, 1024).unwrap();
    let vals: Vec<f64> = grid.nodes().iter().map(|&x| 0.4 * x + 0.1).collect();
    let profile = InterfaceProfile::unchecked(grid, vals, 1.0).unwrap();
    let geom = geometry(&profile);
    let qcfg = QuadratureConfig::default();
    let beta = seeded_density(&grid, 7);
    let dl = DoubleLayer::new(&geom, &qcfg).apply(&beta).unwrap();
    let rel_d = dl.l2_norm(&grid) / beta.l2_norm(&grid);
    let theta: Vec<f64> = grid.nodes().iter().map(|&x| (-x * x / 4.0).exp()).collect();
    let b1 = LaplaceOps::new(&geom, &qcfg).b1(&theta).unwrap();
    let rel_b = l2_norm(&grid, &b1) / l2_norm(&grid, &theta);
    let ok = rel_d <= 1e-12 && rel_b <= 1e-12;
    println!(
        "criterion 02 kernel annihilation on affine profiles: {} (D defect {rel_d:.3e}, B1 defect {rel_b:.3e} <= 1e-12)",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_03_hilbert_transform_oracle() {
    // relative L2 over the interior |xi| <= L/4, where the decay-gate
    // premise of the quadrature holds (the closed form is for the full
    // line; near the grid ends the truncated tail of the slowly decaying
    // Runge function dominates any quadrature).
    let qcfg = QuadratureConfig::default();
    let mut errs = Vec::new();
    for n in [512usize, 1024, 2048] {
        let grid = Grid::new(L, n).unwrap();
        let runge: Vec<f64> = grid.nodes().iter().map(|&x| 1.0 / (1.0 + x * x)).collect();
        let h = hilbert(&grid, &runge, &qcfg).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let x = grid.node(i);
            if x.abs() <= L / 4.0 {
                let exact = x / (1.0 + x * x);
                num += (h[i] - exact).powi(2);
                den += exact.powi(2);
            }
        }
        errs.push((num / den).sqrt());
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let ok = errs[2] <= 1e-4 && orders.iter().all(|&o| o >= 2.0);
    println!(
        "criterion 03 Hilbert oracle: {} (rel L2 at N=2048: {:.3e} <= 1e-4; orders {:.2}, {:.2} >= 2)",
        verdict(ok),
        errs[2],
        orders[0],
        orders[1]
    );
    assert!(ok);
}

#[test]
fn criterion_04_adjointness_of_dense_assemblies() {
    let qcfg = QuadratureConfig::default();
    let mut devs = Vec::new();
    for n in [512usize, 1024] {
        let geom = geometry(&default_profile(n));
        let d = DoubleLayer::new(&geom, &qcfg).assemble().unwrap();
        let ds = DoubleLayerAdjoint::new(&geom, &qcfg).assemble().unwrap();
        let dev = (&d - ds.transpose()).abs().max();
        devs.push(dev);
    }
    // the two kernels discretize to exact transposes; "decreasing under
    // refinement" holds up to the rounding floor
    let ok = devs[0] <= 1e-6 && devs[1] <= devs[0].max(1e-12);
    println!(
        "criterion 04 adjointness: {} (max|D - (D*)^T| = {:.3e} at N=512, {:.3e} at N=1024)",
        verdict(ok),
        devs[0],
        devs[1]
    );
    assert!(ok);
}

#[test]
fn criterion_05_skew_pairing_of_t_operator() {
    let geom = geometry(&default_profile(512));
    let qcfg = QuadratureConfig::default();
    let top = TOp::new(&geom, &qcfg);
    let grid = geom.grid();
    let mut worst: f64 = 0.0;
    for seed in 0..16 {
        let beta = seeded_density(grid, 100 + seed);
        let tb = top.apply(&beta).unwrap();
        let pairing = tb.l2_inner(&beta, grid).abs();
        worst = worst.max(pairing / beta.l2_norm(grid).powi(2));
    }
    let ok = worst <= 1e-8;
    println!(
        "criterion 05 skew pairing: {} (max |<T b|b>|/||b||^2 = {worst:.3e} <= 1e-8 over 16 seeds)",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_06_resolvent_lower_bound() {
    let qcfg = QuadratureConfig::default();
    let shape = ProfileShape::GaussianBump {
        amplitude: 0.3,
        width: 1.0,
    };
    let report = resolvent_scan(
        &shape,
        L,
        &[0.6, -0.6],
        &[256, 512, 1024],
        NormFlavor::Flat,
        false,
        &qcfg,
    )
    .unwrap();
    let spread = report.max_relative_spread();
    let min_sigma = report.min_sigma();
    // flat-profile exactness
    let flat = resolvent_scan(
        &ProfileShape::Zero,
        L,
        &[0.6, -0.6],
        &[256],
        NormFlavor::Flat,
        false,
        &qcfg,
    )
    .unwrap();
    let flat_dev = flat
        .entries
        .iter()
        .map(|e| (e.sigma_min - e.lambda.abs()).abs())
        .fold(0.0_f64, f64::max);
    let ok = min_sigma >= 0.05 && spread <= 0.2 && flat_dev <= 1e-12;
    println!(
        "criterion 06 resolvent bound: {} (sigma_min >= {min_sigma:.4} >= 0.05, spread {spread:.3} <= 0.2, flat exactness {flat_dev:.2e})",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_07_second_kind_solve_quality() {
    let params = default_params();
    let qcfg = QuadratureConfig::default();
    // Krylov vs dense at N = 512
    let geom = geometry(&default_profile(512));
    let (bk, _) = solve_density(&geom, &params, &SolverConfig::default(), &qcfg).unwrap();
    let dense_cfg = SolverConfig {
        method: SolveMethod::Dense,
        ..SolverConfig::default()
    };
    let (bd, _) = solve_density(&geom, &params, &dense_cfg, &qcfg).unwrap();
    let grid = geom.grid();
    let diff = VectorDensity::new(
        bk.c1.iter().zip(&bd.c1).map(|(a, b)| a - b).collect(),
        bk.c2.iter().zip(&bd.c2).map(|(a, b)| a - b).collect(),
    )
    .unwrap();
    let rel = diff.l2_norm(grid) / bd.l2_norm(grid);
    // iteration counts under refinement at fixed tolerance
    let mut iters = Vec::new();
    for n in [256usize, 512, 1024] {
        let geom = geometry(&default_profile(n));
        let (_, stats) = solve_density(&geom, &params, &SolverConfig::default(), &qcfg).unwrap();
        iters.push(stats.iterations);
    }
    let non_increasing = iters.windows(2).all(|w| w[1] <= w[0]);
    let ok = rel <= 1e-8 && non_increasing;
    println!(
        "criterion 07 second-kind solve: {} (krylov vs dense rel {rel:.3e} <= 1e-8; iterations {iters:?} non-increasing)",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_08_velocity_trace_continuity() {
    let params = default_params();
    let geom = geometry(&default_profile(1024));
    let tf = compute_trace_fields(
        &geom,
        &params,
        &SolverConfig::default(),
        &QuadratureConfig::default(),
    )
    .unwrap();
    let grid = geom.grid();
    let jump = VectorDensity::new(
        tf.v_plus
            .c1
            .iter()
            .zip(&tf.v_minus.c1)
            .map(|(a, b)| a - b)
            .collect(),
        tf.v_plus
            .c2
            .iter()
            .zip(&tf.v_minus.c2)
            .map(|(a, b)| a - b)
            .collect(),
    )
    .unwrap();
    let scale = tf.v_plus.l2_norm(grid).max(tf.beta.l2_norm(grid));
    let rel = jump.l2_norm(grid) / scale;
    let ok = rel <= 1e-8;
    println!(
        "criterion 08 trace continuity: {} (||v+ - v-||/max(||v+||,||beta||) = {rel:.3e} <= 1e-8)",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_09_jump_relations() {
    let params = default_params();
    let qcfg = QuadratureConfig::default();
    let fcfg = FieldConfig::default();
    let mut double_rel = Vec::new();
    let mut single_rel = Vec::new();
    let mut stress = Vec::new();
    for n in [512usize, 1024] {
        let profile = default_profile(n);
        let geom = geometry(&profile);
        let grid = geom.grid();
        let (beta, _) = solve_density(&geom, &params, &SolverConfig::default(), &qcfg).unwrap();
        // the physical density scaled to O(1) for well-conditioned ratios
        let bmax = beta
            .c1
            .iter()
            .chain(&beta.c2)
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let beta = VectorDensity::new(
            beta.c1.iter().map(|v| v / bmax).collect(),
            beta.c2.iter().map(|v| v / bmax).collect(),
        )
        .unwrap();
        let samples: Vec<usize> = [-2.0_f64, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|&x| grid.nearest_index(x).unwrap())
            .collect();
        let d = jump_check_double(&geom, &beta, &samples, &fcfg, &qcfg).unwrap();
        let s = jump_check_single(&geom, &beta, &samples, &fcfg, &qcfg).unwrap();
        double_rel.push(d.relative_jump_error);
        single_rel.push(s.relative_pressure_jump_error);
        stress.push(d.max_stress_jump.max(s.max_stress_identity_defect));
    }
    let ok = double_rel[1] <= 1e-2 && single_rel[1] <= 1e-2 && stress[1] < stress[0];
    println!(
        "criterion 09 jump relations: {} (velocity jump rel {:.3e} <= 1e-2, pressure jump rel {:.3e} <= 1e-2, stress residual {:.3e} -> {:.3e} decreasing)",
        verdict(ok),
        double_rel[1],
        single_rel[1],
        stress[0],
        stress[1]
    );
    assert!(ok);
}

#[test]
fn criterion_10_linearization_symbol_and_frechet_derivative() {
    let params = default_params();
    let qcfg = QuadratureConfig::default();
    let solver = SolverConfig::default();
    // finite-difference symbol on packets at the flat state, N = 2048
    let n = 2048;
    let grid = Grid::new(L, n).unwrap();
    let flat = geometry_from_values(grid, &vec![0.0; n]);
    let w = 16.0;
    let mut max_rel: f64 = 0.0;
    for k in [1.0, 2.0, 4.0] {
        let packet: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| (k * x).cos() * (-(x / w).powi(2)).exp())
            .collect();
        let fd = fd_phi_derivative(&flat, &packet, 1e-4, &params, &solver, &qcfg).unwrap();
        let symbol = -params.sigma() * k / (2.0 * params.mu_sum());
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            if grid.node(i).abs() <= w / 4.0 {
                num += (fd[i] - symbol * packet[i]).powi(2);
                den += (symbol * packet[i]).powi(2);
            }
        }
        max_rel = max_rel.max((num / den).sqrt());
    }
    // analytic derivative vs finite differences: O(eps^2) agreement
    let geom = geometry(&default_profile(512));
    let lin = linearize_analytic(&geom, &params, &solver, &qcfg).unwrap();
    let dir: Vec<f64> = geom
        .grid()
        .nodes()
        .iter()
        .map(|&x| (-(x * x) / 2.0).exp())
        .collect();
    let analytic = lin.apply(&dir).unwrap();
    let mut errs = Vec::new();
    for eps in [0.3, 0.1, 0.03] {
        let fd = fd_phi_derivative(&geom, &dir, eps, &params, &solver, &qcfg).unwrap();
        let diff: Vec<f64> = fd.iter().zip(&analytic).map(|(a, b)| a - b).collect();
        errs.push((eps, l2_norm(geom.grid(), &diff)));
    }
    let slope = ((errs[0].1 / errs[2].1).ln()) / ((errs[0].0 / errs[2].0).ln());
    let ok = max_rel <= 5e-2 && slope >= 1.8;
    println!(
        "criterion 10 linearization symbol: {} (packet symbol rel err {max_rel:.3e} <= 5e-2 for k in 1,2,4; FD agreement slope {slope:.2} >= 1.8)",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_11_linear_decay_rate() {
    let params = default_params();
    let k = 2.0;
    let grid = Grid::new(L, 1024).unwrap();
    let f0 = InterfaceProfile::from_shape(
        grid,
        &ProfileShape::ModulatedWave {
            amplitude: 1e-4,
            wavenumber: k,
            width: 16.0,
        },
        1e-5,
    )
    .unwrap();
    let cfg = StepperConfig {
        scheme: Scheme::Imex,
        dt_init: 0.01,
        dt_min: 0.01,
        dt_max: 0.01,
        horizon: 1.0,
        snapshot_stride: 100,
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
    assert_eq!(traj.termination, Termination::HorizonReached);
    let tf = stokes2p_core::spectral::ModeTransform::new(&grid);
    let band = |vals: &[f64]| -> f64 {
        tf.power_spectrum(&grid, vals)
            .iter()
            .zip(tf.wavenumbers())
            .filter(|(_, &kk)| (kk.abs() - k).abs() <= 0.5)
            .map(|(p, _)| p)
            .sum::<f64>()
            .sqrt()
    };
    let rate = (band(f0.values()) / band(traj.final_profile().values())).ln() / traj.final_time();
    let expected = params.sigma() * k / (2.0 * params.mu_sum());
    let rel = (rate - expected).abs() / expected;
    let ok = rel <= 0.1;
    println!(
        "criterion 11 linear decay: {} (measured rate {rate:.4} vs sigma k/(2(mu+ + mu-)) = {expected:.4}, rel dev {rel:.3} <= 0.1)",
        verdict(ok)
    );
    assert!(ok);
}

#[test]
fn criterion_12_scaling_invariance() {
    let params = default_params();
    let f0 = default_profile(2048);
    let cfg = StepperConfig {
        scheme: Scheme::Imex,
        dt_init: 0.02,
        dt_min: 0.02,
        dt_max: 0.02,
        horizon: 0.5,
        snapshot_stride: 1000,
        ..StepperConfig::default()
    };
    let report = scaling_check(
        &f0,
        2.0,
        &params,
        &cfg,
        &SolverConfig::default(),
        &QuadratureConfig::default(),
    )
    .unwrap();
    // the quadrature and steppers carry no absolute scale, so the discrete
    // evolution is scale-equivariant and lambda = 2 is even bitwise exact;
    // evolution_magnitude guards against passing on frozen dynamics
    let ok = report.relative_discrepancy <= 1e-2 && report.evolution_magnitude > 1e-3;
    println!(
        "criterion 12 scaling invariance: {} (lambda = 2 discrepancy {:.3e} <= 1e-2, interface moved by {:.3e})",
        verdict(ok),
        report.relative_discrepancy,
        report.evolution_magnitude
    );
    assert!(ok);
}

#[test]
fn criterion_13_equal_viscosity_consistency() {
    let qcfg = QuadratureConfig::default();
    let solver = SolverConfig::default();
    let geom = geometry(&default_profile(512));
    let grid = geom.grid();
    // robust Phi at equal viscosities equals the direct G pairing
    let params = FluidParams::new(1.5, 1.5, 1.0).unwrap();
    let (phi, _) = phi_rhs(&geom, &params, &solver, &qcfg).unwrap();
    let g = g_trace(&geom, &params, &qcfg).unwrap();
    let direct: Vec<f64> = bvp::normal_pairing(geom.d1(), &g)
        .iter()
        .map(|v| v / 1.5)
        .collect();
    let diff: Vec<f64> = phi.iter().zip(&direct).map(|(a, b)| a - b).collect();
    let rel_equal = l2_norm(grid, &diff) / l2_norm(grid, &direct);
    // continuity through a_mu = 0 at fixed mu+ + mu- = 3
    let mut vals = Vec::new();
    for a in [1e-6, -1e-6] {
        let params = FluidParams::new(1.5 * (1.0 + a), 1.5 * (1.0 - a), 1.0).unwrap();
        let (phi, _) = phi_rhs(&geom, &params, &solver, &qcfg).unwrap();
        vals.push(phi);
    }
    let diff: Vec<f64> = vals[0].iter().zip(&vals[1]).map(|(a, b)| a - b).collect();
    let rel_cont = l2_norm(grid, &diff) / l2_norm(grid, &vals[0]);
    let ok = rel_equal <= 1e-10 && rel_cont <= 1e-4;
    println!(
        "criterion 13 equal-viscosity consistency: {} (equal-mu defect {rel_equal:.3e} <= 1e-10, a_mu = +-1e-6 difference {rel_cont:.3e} <= 1e-4)",
        verdict(ok)
    );
    assert!(ok);
}
