//! Periodic orbits and hyperbolicity of polynomial maps, circle-map mode
//! locking, and box-counting checks on point clouds.

mod circle;
mod fractal;
mod hyperbolic;
mod orbits;

pub use circle::{rotation_number, tongue_measure, TonguePoint, TongueReport, TongueSpec, LOCK_MARGIN, MAX_EPS};
pub use fractal::{
    box_counting_dimension, cantor_midpoints, injectivity_check, parse_point_cloud, write_point_cloud, BoxCount,
    InjectivityVerdict,
};
pub use hyperbolic::{classify_matrix, hyperbolicity, ray_unit_circle_hits, HyperbolicityVerdict, Verdict, TOL_HI, TOL_LO};
pub use orbits::{
    find_periodic_orbits, orbit_multiplier, OrbitSearch, PeriodicOrbit, SeedSpec, DEDUP_TOL, MAX_NEWTON_ITERS,
    RESIDUAL_TOL,
};
