//! Shared setup for the kernel benchmarks.

use stokes2p_core::bvp::FluidParams;
use stokes2p_core::grid::{geometry, GeometryCache, Grid, InterfaceProfile, ProfileShape};
use stokes2p_core::operators::VectorDensity;

pub fn bench_geometry(n: usize) -> GeometryCache {
    let grid = Grid::new(64.0, n).unwrap();
    geometry(
        &InterfaceProfile::from_shape(
            grid,
            &ProfileShape::GaussianBump {
                amplitude: 0.3,
                width: 1.0,
            },
            1e-6,
        )
        .unwrap(),
    )
}

pub fn bench_density(geom: &GeometryCache) -> VectorDensity {
    let grid = geom.grid();
    let c: Vec<f64> = grid.nodes().iter().map(|&x| (-x * x).exp()).collect();
    VectorDensity::new(c.iter().map(|v| 0.5 * v).collect(), c).unwrap()
}

pub fn bench_params() -> FluidParams {
    FluidParams::new(2.0, 1.0, 1.0).unwrap()
}
