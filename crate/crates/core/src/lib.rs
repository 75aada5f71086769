//! Exact and certified evaluation of rational deformations of multiple
//! zeta-star values, the associated maps on `(0, 1]`, and fractal-dimension
//! checks.

pub mod compositions;
pub mod deform;
pub mod enclosure;
pub mod error;
pub mod rational;
pub mod rigorous;

pub use compositions::{
    classify, lex_compare, tau, tau_expand, tau_inverse, Composition, DyadicPoint, Membership,
    Tail, TailSpec,
};
pub use deform::{tn_bruteforce, tn_exact, tn_monotone_table, DeformKey};
pub use enclosure::Enclosure;
pub use error::{Error, Result};
pub use rational::ExactRational;
pub mod series;
pub mod verify;

pub use series::{
    poly_tn, run_pipeline, series_delta, series_en, series_gn, CertifiedSeries, PipelinePlan, Seed,
};
pub mod deform_map;

pub use deform_map::{
    continuous_part, eta_tail, fn_enclosure, fn_preimage, hn_value, jump_part, Budget, JumpSite,
};
pub mod fractal;

pub use fractal::{box_count_dim, cantor_points, e2_points, moran_solve, DimEstimate, SimilitudeFamily};

pub use verify::{overall, run_suite, Status, SuiteConfig, VerificationReport, SUITES};
