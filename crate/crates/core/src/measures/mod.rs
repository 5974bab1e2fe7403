//! Discrete measures and their convolution algebra, exact interval-set
//! measures, and relative-prevalence densities.

mod density;
mod discrete;
mod intervals;
mod region;
mod text;

pub use density::{densities, lower_density, translation_grid_1d, upper_density, DensityReport};
pub use discrete::{
    convolve, convolve_sequence, measure_of, measure_of_translate, DiscreteMeasure, TruncatedConvolution, MASS_TOL,
    MERGE_TOL,
};
pub use intervals::{
    binary_shift_set, binary_shift_union, binary_shift_union_measure, liouville_neighborhood, IntervalSet,
    BINARY_SHIFT_MAX_N,
};
pub use region::{BoxRegion, EmptySet, FnRegion, FullSpace, HalfLine, Periodic, Region};
pub use text::{parse_intervals, parse_measure, write_intervals, write_measure};
