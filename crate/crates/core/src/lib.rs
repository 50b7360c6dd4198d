//! Bayes-risk and minimax-risk lower bounds from f-divergences and
//! f-informativities, with exact and Monte Carlo oracles to check them.

pub mod bounds;
pub mod covering;
pub mod divergence;
pub mod error;
pub mod informativity;
pub mod oracle;
pub mod phi;
pub mod quadrature;
pub mod report;
pub mod zoo;

pub use divergence::{
    f_divergence_discrete, gaussian_chi2_covariance, gaussian_chi2_location, gaussian_kl,
    hellinger_sq_discrete, ConvexGenerator, Covariance, DiscreteDistribution, GaussianMeasure,
    GeneratorKind,
};
pub use error::{BoundError, Result};
pub use informativity::{DiscreteProblem, Exactness, InformativityEstimate};
pub use phi::{invert_phi, phi, u_f, u_f_c, u_f_complement, PhiInversionResult};

/// `f_α`; see [`ConvexGenerator::power`].
pub fn power_generator(alpha: f64) -> ConvexGenerator {
    ConvexGenerator::power(alpha)
}

/// `|x - 1| / 2`.
pub fn tv_generator() -> ConvexGenerator {
    ConvexGenerator::tv()
}

/// `min(1, s) - min(x, s)`.
pub fn tsybakov_generator(s: f64) -> Result<ConvexGenerator> {
    ConvexGenerator::tsybakov(s)
}
