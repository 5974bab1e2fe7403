//! Sparse multivariate polynomial maps, exact differentiation and k-jets.

mod jet;
mod poly;
pub mod text;

pub use jet::{jet, Jet};
pub use poly::{MultiIndex, PolyMap, MAX_DEGREE, MAX_VARS};
pub use text::{parse_poly, write_poly_body};
