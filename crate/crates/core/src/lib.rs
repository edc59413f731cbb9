//! Exact traces of Hecke operators and Hecke–Atkin–Lehner compositions on
//! spaces of modular forms for Γ₀(N) with Nebentypus.
//!
//! The closed formulas live in [`trace_formulas`]; two independent machines
//! re-derive the same numbers: the universal Hecke operator on the group ring
//! ℚ[M̄ₙ] ([`hecke_operator`]) and exact linear algebra on period-polynomial
//! spaces ([`period_oracle`]).

pub mod arith;
pub mod class_numbers;
pub mod cusp_terms;
pub mod cyclo;
pub mod dirichlet;
pub mod error;
pub mod hecke_operator;
pub mod local_counts;
pub mod matrix_forms;
pub mod p1;
pub mod par;
pub mod period_oracle;
pub mod suite;
pub mod trace_formulas;

pub use cyclo::CycloNum;
pub use dirichlet::DirichletChar;
pub use error::{Result, TraceError};
pub use matrix_forms::{IntMat2, ProjMat};

/// Exact rational numbers used throughout the crate.
pub type Rational = num_rational::BigRational;
