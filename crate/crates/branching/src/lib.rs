//! Path counts, branching graphs, central Markov chains and random walks for
//! the branching graphs of free partition diagram algebras.

pub mod algebraic;
pub mod chains;
pub mod error;
pub mod fusscat;
pub mod graphs;
pub mod montecarlo;
pub mod paths;
pub mod scalar;

pub use algebraic::Algebraic;
pub use error::{Error, Result};
pub use scalar::{GenFnScalar, Scalar};

/// Exact probabilities.
pub type Rational = num_rational::BigRational;
/// Exact path counts.
pub type CountInt = num_bigint::BigUint;

/// Quotes a CSV field when it contains a comma, quote or newline.
pub fn csv_field(text: &str) -> std::borrow::Cow<'_, str> {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\"")).into()
    } else {
        text.into()
    }
}
