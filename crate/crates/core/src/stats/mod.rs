//! Ensembles, estimators and hypothesis tests.

mod ensemble;
mod estimators;
mod ks;

pub use ensemble::{
    annealed_ensemble, quenched_ensemble, quenched_window, stretched_exp_rate, EnsembleResult, EnsembleSpec, EnsembleSummary,
    Observable, Protocol, RatePoint,
};
pub use estimators::{
    empirical_abs_moment, fit_exponent, mean, median, quantile, studentize, tail_probability,
    tail_probability_below, variance, ExponentFit, NeumaierSum, TailEstimate,
};
pub use ks::{kolmogorov_survival, ks_two_sample, KSResult};
