//! Approximate variable elimination for binary Markov random fields.
//!
//! Energies are sparse pseudo-Boolean polynomials ([`pbf`]). Summing out a
//! variable at a time gives the exact normalising constant when every
//! neighbourhood stays small; capping the neighbourhood size at `nu` by
//! least-squares pair removal ([`approx::soir`]) or by bounding
//! ([`approx::bound_remove_pair`]) yields an approximation or certified
//! lower/upper bounds, plus a partially ordered Markov model ([`pomm`]) that
//! can be sampled and evaluated exactly.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod approx;
pub mod apps;
pub mod cli;
pub mod elimination;
pub mod error;
pub mod models;
pub mod pbf;
pub mod pomm;
pub mod rng;

pub use approx::{ApproximationReport, BoundDirection};
pub use elimination::{
    eliminate, EliminationConfig, EliminationResult, Marginal, Mode, PommVariant,
};
pub use error::{Error, Result};
pub use models::{LatticeSpec, MarkovRandomField, ModelConfig, ModelFamily, NeighbourhoodSystem};
pub use pbf::{DenseLocalFunction, InteractionSet, PseudoBooleanFunction, SubsetFamily};
pub use pomm::{PartiallyOrderedMarkovModel, SampleBatch};

/// Formats a real with 17 significant digits in scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}
