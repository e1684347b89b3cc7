//! Uniform truncated grid, interface profiles and derived geometry.
//!
//! The interface is the graph of a function f on [-L, L), sampled at the
//! nodes xi_i = -L + i*(2L/N). Decay of f toward the ends stands in for the
//! decay-at-infinity of the continuous problem, so all principal-value
//! integrals reduce to sums over the grid.

use crate::error::{Error, Result};

/// Uniform grid of N nodes xi_i = -L + i*h, h = 2L/N, covering [-L, L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    node_count: usize,
}

impl Grid {
    pub fn new(half_width: f64, node_count: usize) -> Result<Self> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if node_count == 0 || !node_count.is_multiple_of(2) {
            return Err(Error::InvalidProfile(format!(
                "node count must be even and positive, got {node_count}"
            )));
        }
        Ok(Self {
            half_width,
            node_count,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.node_count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing h = 2L/N.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.node_count as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.node_count).map(|i| self.node(i)).collect()
    }

    /// Index of the grid node closest to xi, if inside the grid.
    pub fn nearest_index(&self, xi: f64) -> Option<usize> {
        let t = (xi + self.half_width) / self.spacing();
        let i = t.round();
        if i < 0.0 || i >= self.node_count as f64 {
            None
        } else {
            Some(i as usize)
        }
    }
}

/// Discrete trapezoid L2 norm sqrt(h * sum v_i^2) on the flat line pairing.
pub fn l2_norm(grid: &Grid, v: &[f64]) -> f64 {
    l2_inner(grid, v, v).sqrt()
}

/// Discrete flat inner product h * sum u_i v_i (no omega weight).
pub fn l2_inner(grid: &Grid, u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    grid.spacing() * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
}

pub fn linf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Closed-form profile presets selectable by name in the configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    Zero,
    /// A * exp(-(xi/W)^2)
    GaussianBump { amplitude: f64, width: f64 },
    /// A * cos(k xi) * exp(-(xi/W)^2)
    ModulatedWave {
        amplitude: f64,
        wavenumber: f64,
        width: f64,
    },
}

impl ProfileShape {
    pub fn eval(&self, xi: f64) -> f64 {
        match *self {
            ProfileShape::Zero => 0.0,
            ProfileShape::GaussianBump { amplitude, width } => {
                amplitude * (-(xi / width).powi(2)).exp()
            }
            ProfileShape::ModulatedWave {
                amplitude,
                wavenumber,
                width,
            } => amplitude * (wavenumber * xi).cos() * (-(xi / width).powi(2)).exp(),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.len()).map(|i| self.eval(grid.node(i))).collect()
    }
}

/// Sampled graph function f with decay metadata; the evolving unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceProfile {
    grid: Grid,
    values: Vec<f64>,
    decay_tol: f64,
}

impl InterfaceProfile {
    /// Validating constructor: finite values and the compact-support gate
    /// |f|, |f'| <= decay_tol on |xi| >= L/2.
    pub fn new(grid: Grid, values: Vec<f64>, decay_tol: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "profile has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if !decay_tol.is_finite() || decay_tol <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "decay tolerance must be positive, got {decay_tol}"
            )));
        }
        let p = Self {
            grid,
            values,
            decay_tol,
        };
        p.check_finite()?;
        p.check_decay()?;
        Ok(p)
    }

    /// Constructor without the decay gate, for operator studies on profiles
    /// that are not compactly supported (e.g. globally affine slopes). The
    /// singular operators are defined for any Lipschitz f.
    pub fn unchecked(grid: Grid, values: Vec<f64>, decay_tol: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "profile has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        let p = Self {
            grid,
            values,
            decay_tol,
        };
        p.check_finite()?;
        Ok(p)
    }

    pub fn from_shape(grid: Grid, shape: &ProfileShape, decay_tol: f64) -> Result<Self> {
        Self::new(grid, shape.sample(&grid), decay_tol)
    }

    /// Reads a two-column text table (xi_i, f_i) whose first column must
    /// reproduce the grid nodes.
    pub fn from_two_column_text(grid: Grid, text: &str, decay_tol: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        let mut row = 0usize;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let (xi, fv) = match (cols.next(), cols.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::InvalidProfile(format!(
                        "profile row {row}: expected two columns, got '{line}'"
                    )))
                }
            };
            let xi: f64 = xi.parse().map_err(|_| {
                Error::InvalidProfile(format!("profile row {row}: bad abscissa '{xi}'"))
            })?;
            let fv: f64 = fv.parse().map_err(|_| {
                Error::InvalidProfile(format!("profile row {row}: bad value '{fv}'"))
            })?;
            if row >= grid.len() {
                return Err(Error::GridMismatch(format!(
                    "profile file has more rows than the {} grid nodes",
                    grid.len()
                )));
            }
            let expect = grid.node(row);
            if (xi - expect).abs() > 1e-9 * grid.spacing().max(1.0) {
                return Err(Error::GridMismatch(format!(
                    "profile row {row}: abscissa {xi} does not match grid node {expect}"
                )));
            }
            values.push(fv);
            row += 1;
        }
        if row != grid.len() {
            return Err(Error::GridMismatch(format!(
                "profile file has {row} rows for a grid of {} nodes",
                grid.len()
            )));
        }
        Self::new(grid, values, decay_tol)
    }

    fn check_finite(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "non-finite value at node {i}"
            )));
        }
        Ok(())
    }

    fn check_decay(&self) -> Result<()> {
        let half = self.grid.half_width() / 2.0;
        let d1 = derivative1(&self.grid, &self.values);
        for i in 0..self.grid.len() {
            if self.grid.node(i).abs() >= half {
                if self.values[i].abs() > self.decay_tol {
                    return Err(Error::InvalidProfile(format!(
                        "|f({:.3})| = {:.3e} exceeds decay tolerance {:.3e}",
                        self.grid.node(i),
                        self.values[i].abs(),
                        self.decay_tol
                    )));
                }
                if d1[i].abs() > self.decay_tol {
                    return Err(Error::InvalidProfile(format!(
                        "|f'({:.3})| = {:.3e} exceeds decay tolerance {:.3e}",
                        self.grid.node(i),
                        d1[i].abs(),
                        self.decay_tol
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn decay_tol(&self) -> f64 {
        self.decay_tol
    }

    /// Same grid and decay tolerance, new values (validated).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid, values, self.decay_tol)
    }
}

fn stencil_value(values: &[f64], i: isize) -> f64 {
    // Exterior nodes are taken as zero under the decay assumption.
    if i < 0 || i as usize >= values.len() {
        0.0
    } else {
        values[i as usize]
    }
}

/// 4th-order centered first derivative; exterior values treated as zero.
pub fn derivative1(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let h = grid.spacing();
    (0..values.len() as isize)
        .map(|i| {
            (-stencil_value(values, i + 2) + 8.0 * stencil_value(values, i + 1)
                - 8.0 * stencil_value(values, i - 1)
                + stencil_value(values, i - 2))
                / (12.0 * h)
        })
        .collect()
}

/// 4th-order centered second derivative; exterior values treated as zero.
pub fn derivative2(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let h = grid.spacing();
    (0..values.len() as isize)
        .map(|i| {
            (-stencil_value(values, i + 2) + 16.0 * stencil_value(values, i + 1)
                - 30.0 * stencil_value(values, i)
                + 16.0 * stencil_value(values, i - 1)
                - stencil_value(values, i - 2))
                / (12.0 * h * h)
        })
        .collect()
}

/// Derived pointwise geometry of the interface graph: derivatives, metric
/// omega = sqrt(1 + f'^2), unit normal/tangent and curvature kappa = f''/omega^3.
#[derive(Debug, Clone)]
pub struct GeometryCache {
    grid: Grid,
    values: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    omega: Vec<f64>,
    normal: Vec<[f64; 2]>,
    tangent: Vec<[f64; 2]>,
    kappa: Vec<f64>,
}

impl GeometryCache {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn d1(&self) -> &[f64] {
        &self.d1
    }
    pub fn d2(&self) -> &[f64] {
        &self.d2
    }
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }
    pub fn normal(&self) -> &[[f64; 2]] {
        &self.normal
    }
    pub fn tangent(&self) -> &[[f64; 2]] {
        &self.tangent
    }
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// Interface point Xi(xi_i) = (xi_i, f_i).
    pub fn point(&self, i: usize) -> [f64; 2] {
        [self.grid.node(i), self.values[i]]
    }
}

/// First and second derivatives of the profile (the partial cache).
pub fn derivatives(profile: &InterfaceProfile) -> (Vec<f64>, Vec<f64>) {
    (
        derivative1(profile.grid(), profile.values()),
        derivative2(profile.grid(), profile.values()),
    )
}

/// Full geometric cache: nu = (-f',1)/omega, tau = (1,f')/omega, kappa = f''/omega^3.
pub fn geometry(profile: &InterfaceProfile) -> GeometryCache {
    geometry_from_values(*profile.grid(), profile.values())
}

/// Geometry of raw grid values; used for intermediate time-stepper stages
/// that need no profile validation.
pub fn geometry_from_values(grid: Grid, values: &[f64]) -> GeometryCache {
    let d1 = derivative1(&grid, values);
    let d2 = derivative2(&grid, values);
    let omega: Vec<f64> = d1.iter().map(|fp| (1.0 + fp * fp).sqrt()).collect();
    let normal: Vec<[f64; 2]> = d1
        .iter()
        .zip(&omega)
        .map(|(fp, om)| [-fp / om, 1.0 / om])
        .collect();
    let tangent: Vec<[f64; 2]> = d1
        .iter()
        .zip(&omega)
        .map(|(fp, om)| [1.0 / om, fp / om])
        .collect();
    let kappa: Vec<f64> = d2
        .iter()
        .zip(&omega)
        .map(|(fpp, om)| fpp / (om * om * om))
        .collect();
    GeometryCache {
        grid,
        values: values.to_vec(),
        d1,
        d2,
        omega,
        normal,
        tangent,
        kappa,
    }
}
