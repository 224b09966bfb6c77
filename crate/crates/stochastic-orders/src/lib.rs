//! Verification toolkit for stochastic orders on probability measures.
//!
//! The crate decides the usual stochastic order and the convex stochastic
//! order on finitely supported measures, evaluates convolution-inequality
//! gap functionals for the classical positive-operator families (Bernstein,
//! Szász-Mirakyan, Baskakov, beta), runs monotone-coupling simulations, and
//! verifies majorization-driven convex-order inequalities between
//! symmetrized convolution polynomials. Measures built from rational data
//! stay in exact big-rational arithmetic end to end, so those verdicts are
//! certificates, not approximations; float-regime checks carry explicit
//! tolerances and truncation ledgers.
//!
//! # Where to start
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run -p stochastic-orders --example convolution_algebra      # measures, mixtures, convolution
//! cargo run -p stochastic-orders --example family_constructors      # discrete + continuous families
//! cargo run -p stochastic-orders --example order_checks             # st / cx decision procedures
//! cargo run -p stochastic-orders --example rasa_gap_sweep           # gap functional parameter sweeps
//! cargo run -p stochastic-orders --example transfer_chains          # majorization transfer chains
//! cargo run -p stochastic-orders --example muirhead_verification    # symmetrized convolution orders
//! cargo run -p stochastic-orders --example coupling_audit           # monotone coupling Monte Carlo
//! cargo run -p stochastic-orders --example operator_evaluation      # positive linear operators
//! cargo run -p stochastic-orders --example counterexamples          # the two bundled counterexamples
//! ```
//!
//! A thin `stochastic-orders` binary exposes the same entry points as
//! subcommands (`check-st`, `check-cx`, `rasa-sweep`, `muirhead`, `chain`,
//! `counterexample`, `couple`, `eval-op`, `eval-poly`); see the README.
//!
//! # Regimes
//!
//! Every scalar is either an exact big rational or a binary64 float, and a
//! measure's regime is the join of its scalars' regimes. Exact-regime
//! operations never round; mixing regimes coerces exact values to float.
//! Truncated families (Poisson, negative binomial, discretized continuous
//! laws) record the omitted tail in `mass_defect`, which the order checks
//! refuse to ignore: a check fails up front if the defect can move its
//! margin by more than the tolerance.

pub mod cli;
pub mod counterexamples;
pub mod couplings;
pub mod families;
pub mod majorization;
pub mod measure;
pub mod muirhead;
pub mod orders;
pub(crate) mod quad;
pub mod scalar;

pub use counterexamples::{run_incomparable_pair, run_polynomial_pair};
pub use couplings::{audit, CoupledPair, CouplingAuditReport, CouplingKind, CouplingSampler};
pub use families::{binomial, geometric, negative_binomial, poisson, ContinuousFamily};
pub use majorization::{enumerate_tuples, transfer_chain, transfer_step, ExponentTuple};
pub use measure::FiniteMeasure;
pub use muirhead::{
    arrangement, eval_operator, rasa_gap, rasa_gap_m, symmetrize, verify_muirhead,
    DistributionPolynomial, MuirheadReport, OperatorKind, PolyTerm,
};
pub use orders::{
    check_cx, check_st, convex_battery, four_point_check, stop_loss, ConstraintKind,
    ConvexTestFunction, OrderVerdict,
};
pub use scalar::{Regime, Scalar};
