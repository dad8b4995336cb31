//! Exact construction and mechanical verification of group-invariant strictly
//! convex norms on sequence spaces, `L₁[0,1]`, and spaces of continuous
//! functions on Cantor-type spaces.

pub mod numerics;

pub use numerics::{cert_cmp, cert_pow, cert_sqrt, CertOrdering, CertReal, Precision, Rational};
pub mod linear;
pub mod seqspace;
pub mod words;
pub mod l1space;
pub mod cantorspace;
pub mod renormkit;

pub use linear::{RVec, Vector};
