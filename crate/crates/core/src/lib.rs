//! Analysis toolkit for strong convexity with an error modulus, over scalar
//! parameters drawn from a subfield of the reals.
//!
//! The crate provides:
//! - dual-mode arithmetic (exact rationals / binary64) and the geometry
//!   primitives: points, open boxes, linear functionals ([`scalar`], [`geom`]);
//! - a catalog of moduli and candidate functions ([`modulus`], [`oracle`]);
//! - modulus amplification, feasibility and validity tests ([`amplify`]);
//! - convexity checking, subdivision certificates, directional derivatives,
//!   and support-functional search ([`convexity`], [`derivative`], [`support`]);
//! - monotonicity of set-valued maps and potential reconstruction
//!   ([`monotone`]).
//!
//! All types are immutable after construction and every operation is a pure
//! function of its inputs.

pub mod amplify;
pub mod convexity;
pub mod derivative;
pub mod error;
pub mod field;
pub mod geom;
pub mod harness;
pub mod modulus;
pub mod monotone;
pub mod oracle;
pub mod scalar;
pub mod support;

pub use amplify::{
    amplify_jensen, amplify_scaling, feasibility_check, modulus_validity, AmplifiedModulus,
    AmplifyResult, AmplifyValue, FeasibilityReport, FeasibilityVerdict, ValidityReport,
    ValidityVerdict,
};
pub use convexity::{
    check_jensen, check_strong_convexity, subdivision_certificate, CheckReport, Verdict, Witness,
};
pub use derivative::{directional_derivative, sublinearity_test, DerivativeResult};
pub use error::{Error, Result};
pub use field::{enumerate_t, FieldKind, FieldSpec, TSet};
pub use geom::{sample_domain, BoxDomain, LinearFunctional, Point};
pub use harness::{equivalence_suite, SupportSummary, EquivalenceReport};
pub use modulus::{InterpolationRule, Modulus};
pub use monotone::{
    alpha_cyclic_monotone, alpha_monotone, check_strengthened_subgradient, reconstruct, subdiff_1d,
    ChainGraph, MultiMap, SubdiffInterval,
};
pub use oracle::FunctionOracle;
pub use scalar::{Scalar, ScalarMode, DEFAULT_TOLERANCE};
pub use support::{support_search, SupportResult, SupportStatus};
