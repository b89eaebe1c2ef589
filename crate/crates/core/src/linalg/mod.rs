//! Dense Hermitian linear algebra: eigendecomposition, functional calculus,
//! norms, Löwner order and random generation.

mod exchange;
mod hermitian;
mod norms;
mod order;
mod random;

pub use exchange::MatrixJson;
#[allow(unused_imports)]
pub(crate) use hermitian::{cplx, spectral_norm};
pub use hermitian::{expm, logm, CMatrix, EigenSystem, HermitianMatrix, PdMatrix, PsdMatrix};
pub use norms::{ky_fan_norm, ky_fan_norms, op_norm, schatten_norm, singular_values, NormKind};
pub use order::{loewner_compare, loewner_leq, LoewnerRelation, LoewnerVerdict};
pub use random::{
    complex_gaussian, derive_seed, random_hermitian, random_ordered_pair, random_pd, random_unitary, seeded_rng,
    trial_rng, SpectrumSpec,
};
