//! Exact sparse Laurent polynomial, vector, and matrix arithmetic over Q.

mod matrix;
mod parse;
mod poly;

pub use matrix::LaurentMatrix;
pub use parse::parse_poly;
pub use poly::{cmp_grevlex, ExpVec, LaurentPoly};

/// Parse a comma-separated row of polynomials.
pub fn parse_row(nvars: usize, src: &str) -> Result<Vec<LaurentPoly>, crate::error::ParseError> {
    src.split(',').map(|s| parse_poly(nvars, s)).collect()
}
