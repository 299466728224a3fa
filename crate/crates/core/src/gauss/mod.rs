//! Gaussian-exponential sums `Σ c·h^a·e^{-b h²}` and what is built from them.

mod expr;
mod mellin;
mod melon;
mod moments;
mod xi;

pub use expr::{det_gexpr, GaussExpr, GaussTerm, TermJson, MAX_DET_SIZE, MAX_JSON_EXPONENT};
pub use mellin::{f_sum_asymptotic, f_sum_numeric, series_correction, HpReal, PRECISION_BITS};
pub use melon::{
    chi, chi_factored, hankel_det, hankel_value, kappa, normalizer, signed_hankel_det, tau,
};
pub use moments::{
    leading_coefficient, moment_asymptotic, second_coefficient, second_coefficient_unsimplified,
    table1, Table1Entry,
};
pub use xi::{constant_power_sum, xi0, xi1, Xi1Value};
