//! The hydrodynamic layer-potential boundary operators.
//!
//! All operators act on grid functions sampled on the interface and are
//! built from the punctured-trapezoid PV machinery in [`crate::quadrature`].
//! With r = (xi - s, f(xi) - f(s)) and t = (f(xi) - f(s))/(xi - s):
//!
//! * the double layer D(f): kernel (r1 f'(s) - r2)/|r|^4 times the dyadic
//!   matrix [[r1^2, r1 r2], [r1 r2, r2^2]], equivalently the block
//!   combination of B^0_{0..3,2}(f);
//! * its L2-adjoint D*(f): same dyadic kernel with -r1 f'(xi) + r2, the
//!   slope frozen at the evaluation point;
//! * the scalar Laplace double layer B1(f) and its companion B2(f);
//! * the skew-adjoint T(f) arising as the direct value of the vertical
//!   derivative of the single-layer velocity;
//! * the Hilbert transform H = pi^{-1} B_{0,0}.

use crate::error::{Error, Result};
use crate::grid::{GeometryCache, Grid};
use crate::quadrature::{b_family_apply, FamilyTerm, QuadratureConfig};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Two-component boundary function on the profile grid (densities, traces).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorDensity {
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

impl VectorDensity {
    pub fn new(c1: Vec<f64>, c2: Vec<f64>) -> Result<Self> {
        if c1.len() != c2.len() {
            return Err(Error::GridMismatch(format!(
                "components have lengths {} and {}",
                c1.len(),
                c2.len()
            )));
        }
        Ok(Self { c1, c2 })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            c1: vec![0.0; n],
            c2: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.c1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c1.is_empty()
    }

    /// Flat L2 norm over both components.
    pub fn l2_norm(&self, grid: &Grid) -> f64 {
        (crate::grid::l2_inner(grid, &self.c1, &self.c1)
            + crate::grid::l2_inner(grid, &self.c2, &self.c2))
        .sqrt()
    }

    /// Flat L2 pairing <u|v> = h sum (u1 v1 + u2 v2).
    pub fn l2_inner(&self, other: &Self, grid: &Grid) -> f64 {
        crate::grid::l2_inner(grid, &self.c1, &other.c1)
            + crate::grid::l2_inner(grid, &self.c2, &other.c2)
    }

    /// Stacked (c1 | c2) vector for dense linear algebra.
    pub fn to_stacked(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.len());
        v.extend_from_slice(&self.c1);
        v.extend_from_slice(&self.c2);
        v
    }

    pub fn from_stacked(v: &[f64]) -> Self {
        let n = v.len() / 2;
        Self {
            c1: v[..n].to_vec(),
            c2: v[n..].to_vec(),
        }
    }
}

/// Hilbert transform H[theta] = pi^{-1} B_{0,0}[theta].
pub fn hilbert(grid: &Grid, theta: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    let zero = vec![0.0; grid.len()];
    let out = b_family_apply(
        grid,
        &zero,
        0,
        &[FamilyTerm {
            t_power: 0,
            arg: theta,
        }],
        cfg,
    )?;
    Ok(out.into_iter().next().unwrap().iter().map(|v| v / PI).collect())
}

fn pointwise(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Shared state for the interface-bound operators.
#[derive(Debug, Clone)]
struct OpCore {
    grid: Grid,
    f: Vec<f64>,
    fp: Vec<f64>,
    cfg: QuadratureConfig,
}

impl OpCore {
    fn new(geom: &GeometryCache, cfg: &QuadratureConfig) -> Self {
        Self {
            grid: *geom.grid(),
            f: geom.values().to_vec(),
            fp: geom.d1().to_vec(),
            cfg: cfg.clone(),
        }
    }

    fn family(&self, terms: &[FamilyTerm<'_>]) -> Result<Vec<Vec<f64>>> {
        b_family_apply(&self.grid, &self.f, 2, terms, &self.cfg)
    }

    fn check_density(&self, beta: &VectorDensity) -> Result<()> {
        if beta.len() != self.grid.len() {
            return Err(Error::GridMismatch(format!(
                "density has {} nodes, grid has {}",
                beta.len(),
                self.grid.len()
            )));
        }
        Ok(())
    }

    fn check_cap(&self) -> Result<()> {
        if self.grid.len() > self.cfg.dense_cap {
            return Err(Error::SizeCap {
                n: self.grid.len(),
                cap: self.cfg.dense_cap,
            });
        }
        Ok(())
    }
}

/// Direct value of the hydrodynamic double-layer potential, D(f).
#[derive(Debug, Clone)]
pub struct DoubleLayer {
    core: OpCore,
}

impl DoubleLayer {
    pub fn new(geom: &GeometryCache, cfg: &QuadratureConfig) -> Self {
        Self {
            core: OpCore::new(geom, cfg),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.core.grid
    }

    /// Block form: row1 = (B0[f'b1] + B1[f'b2] - B1[b1] - B2[b2])/pi, and the
    /// shifted-power analogue for row2.
    pub fn apply(&self, beta: &VectorDensity) -> Result<VectorDensity> {
        self.core.check_density(beta)?;
        let fpb1 = pointwise(&self.core.fp, &beta.c1);
        let fpb2 = pointwise(&self.core.fp, &beta.c2);
        let o = self.core.family(&[
            FamilyTerm { t_power: 0, arg: &fpb1 },
            FamilyTerm { t_power: 1, arg: &fpb2 },
            FamilyTerm { t_power: 1, arg: &beta.c1 },
            FamilyTerm { t_power: 2, arg: &beta.c2 },
            FamilyTerm { t_power: 1, arg: &fpb1 },
            FamilyTerm { t_power: 2, arg: &fpb2 },
            FamilyTerm { t_power: 2, arg: &beta.c1 },
            FamilyTerm { t_power: 3, arg: &beta.c2 },
        ])?;
        let n = self.core.grid.len();
        let mut r1 = vec![0.0; n];
        let mut r2 = vec![0.0; n];
        for i in 0..n {
            r1[i] = (o[0][i] + o[1][i] - o[2][i] - o[3][i]) / PI;
            r2[i] = (o[4][i] + o[5][i] - o[6][i] - o[7][i]) / PI;
        }
        Ok(VectorDensity { c1: r1, c2: r2 })
    }

    /// Direct quadrature of the dyadic kernel form, bypassing the block
    /// decomposition; used to cross-check the two representations.
    pub fn apply_direct_kernel(&self, beta: &VectorDensity) -> Result<VectorDensity> {
        self.core.check_density(beta)?;
        let grid = &self.core.grid;
        let n = grid.len();
        let h = grid.spacing();
        let f = &self.core.f;
        let fp = &self.core.fp;
        let mut out = VectorDensity::zeros(n);
        for i in 0..n {
            let xi = grid.node(i);
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for k in 0..n {
                if k == i {
                    continue;
                }
                let eta = xi - grid.node(k);
                let t = (f[i] - f[k]) / eta;
                let d = 1.0 + t * t;
                let c = (fp[k] - t) / (eta * d * d);
                s1 += c * (beta.c1[k] + t * beta.c2[k]);
                s2 += c * (t * beta.c1[k] + t * t * beta.c2[k]);
            }
            let mut v1 = h * s1 / PI;
            let mut v2 = h * s2 / PI;
            if self.core.cfg.diagonal_correction {
                let gval = |k: usize| -> (f64, f64) {
                    if k >= n {
                        return (0.0, 0.0);
                    }
                    let eta = xi - grid.node(k);
                    let t = (f[i] - f[k]) / eta;
                    let d = 1.0 + t * t;
                    let c = (fp[k] - t) / (d * d);
                    (
                        c * (beta.c1[k] + t * beta.c2[k]),
                        c * (t * beta.c1[k] + t * t * beta.c2[k]),
                    )
                };
                let gp = if i >= 1 { gval(i - 1) } else { (0.0, 0.0) };
                let gm = gval(i + 1);
                v1 += 0.5 * (gp.0 - gm.0) / PI;
                v2 += 0.5 * (gp.1 - gm.1) / PI;
            }
            out.c1[i] = v1;
            out.c2[i] = v2;
        }
        Ok(out)
    }

    /// Dense 2N x 2N matrix acting on the stacked density.
    pub fn assemble(&self) -> Result<DMatrix<f64>> {
        self.core.check_cap()?;
        assemble_dyadic(&self.core, |t, _fp_i, fp_k| fp_k - t)
    }
}

/// L2-adjoint D*(f): the slope factor is frozen at the target point.
#[derive(Debug, Clone)]
pub struct DoubleLayerAdjoint {
    core: OpCore,
}

impl DoubleLayerAdjoint {
    pub fn new(geom: &GeometryCache, cfg: &QuadratureConfig) -> Self {
        Self {
            core: OpCore::new(geom, cfg),
        }
    }

    pub fn apply(&self, beta: &VectorDensity) -> Result<VectorDensity> {
        self.core.check_density(beta)?;
        let o = self.core.family(&[
            FamilyTerm { t_power: 0, arg: &beta.c1 },
            FamilyTerm { t_power: 1, arg: &beta.c1 },
            FamilyTerm { t_power: 2, arg: &beta.c1 },
            FamilyTerm { t_power: 1, arg: &beta.c2 },
            FamilyTerm { t_power: 2, arg: &beta.c2 },
            FamilyTerm { t_power: 3, arg: &beta.c2 },
        ])?;
        let n = self.core.grid.len();
        let fp = &self.core.fp;
        let mut r1 = vec![0.0; n];
        let mut r2 = vec![0.0; n];
        for i in 0..n {
            // row1 = (-f'(xi)(B0[b1] + B1[b2]) + B1[b1] + B2[b2])/pi
            r1[i] = (-fp[i] * (o[0][i] + o[3][i]) + o[1][i] + o[4][i]) / PI;
            // row2 = (-f'(xi)(B1[b1] + B2[b2]) + B2[b1] + B3[b2])/pi
            r2[i] = (-fp[i] * (o[1][i] + o[4][i]) + o[2][i] + o[5][i]) / PI;
        }
        Ok(VectorDensity { c1: r1, c2: r2 })
    }

    pub fn assemble(&self) -> Result<DMatrix<f64>> {
        self.core.check_cap()?;
        assemble_dyadic(&self.core, |t, fp_i, _fp_k| t - fp_i)
    }
}

/// Shared dense assembly of the dyadic-kernel operators: entry factor
/// scalar(t, f'(xi_i), f'(xi_k)) / (pi eta (1+t^2)^2) times [[1, t], [t, t^2]].
fn assemble_dyadic(
    core: &OpCore,
    scalar: impl Fn(f64, f64, f64) -> f64,
) -> Result<DMatrix<f64>> {
    let grid = &core.grid;
    let n = grid.len();
    let h = grid.spacing();
    let f = &core.f;
    let fp = &core.fp;
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let xi = grid.node(i);
        for k in 0..n {
            if k == i {
                continue;
            }
            let eta = xi - grid.node(k);
            let t = (f[i] - f[k]) / eta;
            let d = 1.0 + t * t;
            let c = h * scalar(t, fp[i], fp[k]) / (PI * eta * d * d);
            a[(i, k)] += c;
            a[(i, n + k)] += c * t;
            a[(n + i, k)] += c * t;
            a[(n + i, n + k)] += c * t * t;
        }
        if core.cfg.diagonal_correction {
            // (g(+h) - g(-h))/2 with g = eta * kernel: both neighbors enter
            // with weight +h/2 * kernel.
            for k in [i.wrapping_sub(1), i + 1] {
                if k < n {
                    let eta = xi - grid.node(k);
                    let t = (f[i] - f[k]) / eta;
                    let d = 1.0 + t * t;
                    let c = 0.5 * h * scalar(t, fp[i], fp[k]) / (PI * eta * d * d);
                    a[(i, k)] += c;
                    a[(i, n + k)] += c * t;
                    a[(n + i, k)] += c * t;
                    a[(n + i, n + k)] += c * t * t;
                }
            }
        }
    }
    Ok(a)
}

/// Direct value of the vertical derivative of the single-layer velocity;
/// skew-adjoint on flat L2.
#[derive(Debug, Clone)]
pub struct TOp {
    core: OpCore,
}

impl TOp {
    pub fn new(geom: &GeometryCache, cfg: &QuadratureConfig) -> Self {
        Self {
            core: OpCore::new(geom, cfg),
        }
    }

    /// row1 = ((-B3 - 3 B1)[b1] + (B0 - B2)[b2]) / 4pi,
    /// row2 = ((B0 - B2)[b1] + (B1 - B3)[b2]) / 4pi.
    pub fn apply(&self, beta: &VectorDensity) -> Result<VectorDensity> {
        self.core.check_density(beta)?;
        let o = self.core.family(&[
            FamilyTerm { t_power: 0, arg: &beta.c1 },
            FamilyTerm { t_power: 1, arg: &beta.c1 },
            FamilyTerm { t_power: 2, arg: &beta.c1 },
            FamilyTerm { t_power: 3, arg: &beta.c1 },
            FamilyTerm { t_power: 0, arg: &beta.c2 },
            FamilyTerm { t_power: 1, arg: &beta.c2 },
            FamilyTerm { t_power: 2, arg: &beta.c2 },
            FamilyTerm { t_power: 3, arg: &beta.c2 },
        ])?;
        let n = self.core.grid.len();
        let c = 1.0 / (4.0 * PI);
        let mut r1 = vec![0.0; n];
        let mut r2 = vec![0.0; n];
        for i in 0..n {
            r1[i] = c * (-o[3][i] - 3.0 * o[1][i] + o[4][i] - o[6][i]);
            r2[i] = c * (o[0][i] - o[2][i] + o[5][i] - o[7][i]);
        }
        Ok(VectorDensity { c1: r1, c2: r2 })
    }

    pub fn assemble(&self) -> Result<DMatrix<f64>> {
        self.core.check_cap()?;
        let grid = &self.core.grid;
        let n = grid.len();
        let h = grid.spacing();
        let f = &self.core.f;
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        let add = |a: &mut DMatrix<f64>, i: usize, k: usize, c: f64, t: f64| {
            a[(i, k)] += c * (-t * t * t - 3.0 * t);
            a[(i, n + k)] += c * (1.0 - t * t);
            a[(n + i, k)] += c * (1.0 - t * t);
            a[(n + i, n + k)] += c * (t - t * t * t);
        };
        for i in 0..n {
            let xi = grid.node(i);
            for k in 0..n {
                if k == i {
                    continue;
                }
                let eta = xi - grid.node(k);
                let t = (f[i] - f[k]) / eta;
                let d = 1.0 + t * t;
                let c = h / (4.0 * PI * eta * d * d);
                add(&mut a, i, k, c, t);
            }
            if self.core.cfg.diagonal_correction {
                for k in [i.wrapping_sub(1), i + 1] {
                    if k < n {
                        let eta = xi - grid.node(k);
                        let t = (f[i] - f[k]) / eta;
                        let d = 1.0 + t * t;
                        let c = 0.5 * h / (4.0 * PI * eta * d * d);
                        add(&mut a, i, k, c, t);
                    }
                }
            }
        }
        Ok(a)
    }
}

/// Scalar double layer for the Laplacian, B1(f), and its companion B2(f).
#[derive(Debug, Clone)]
pub struct LaplaceOps {
    core: OpCore,
}

impl LaplaceOps {
    pub fn new(geom: &GeometryCache, cfg: &QuadratureConfig) -> Self {
        Self {
            core: OpCore::new(geom, cfg),
        }
    }

    /// B1(f)[theta] = (B_{1,1}[theta] - B_{0,1}[f' theta]) / pi.
    pub fn b1(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let fpt = pointwise(&self.core.fp, theta);
        let o = b_family_apply(
            &self.core.grid,
            &self.core.f,
            1,
            &[
                FamilyTerm { t_power: 1, arg: theta },
                FamilyTerm { t_power: 0, arg: &fpt },
            ],
            &self.core.cfg,
        )?;
        Ok((0..theta.len()).map(|i| (o[0][i] - o[1][i]) / PI).collect())
    }

    /// B2(f)[theta] = (B_{0,1}[theta] + B_{1,1}[f' theta]) / pi.
    pub fn b2(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let fpt = pointwise(&self.core.fp, theta);
        let o = b_family_apply(
            &self.core.grid,
            &self.core.f,
            1,
            &[
                FamilyTerm { t_power: 0, arg: theta },
                FamilyTerm { t_power: 1, arg: &fpt },
            ],
            &self.core.cfg,
        )?;
        Ok((0..theta.len()).map(|i| (o[0][i] + o[1][i]) / PI).collect())
    }
}
