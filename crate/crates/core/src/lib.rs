//! Formal series machinery for nonminimal real hypersurfaces and the
//! singular second-order ODEs attached to them.

pub mod autovec;
pub mod equiv;
pub mod error;
pub mod growth;
pub mod monodromy;
pub mod ode;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod segre;
pub mod series;

pub use num_complex::Complex64;
pub use num_rational::BigRational;

pub use autovec::{build_l, explicit_m0, lambda_map_check, tangency_residual, LambdaCheck, VectorField};
pub use equiv::{
    coupled_map_g, formal_solutions, map_residual, self_map_probe, FormalSolutionPair, ProbeLevel,
    ProbeReport,
};
pub use error::{Error, Result};
pub use growth::{gevrey_estimate, termination_detect, GrowthReport, Termination};
pub use monodromy::{
    numeric_monodromy, residue_analysis, MonodromyReport, NumericMonodromy, ResidueEigenvalues,
};
pub use ode::{parse_polynomial, AdmissibleOde, GaugeMap, RealData, RealStructure};
pub use pipeline::{run_pipeline, Check, ConfigFile, Member, Report, RunConfig, RunError};
pub use scalar::{parse_rational, Backend, GaussRat, Scalar};
pub use segre::{solve_psi, Hypersurface, RealForm, SegreFamily, Sign};
pub use series::{rat, Mismatch, Mismatch2, Series1, Series2};
