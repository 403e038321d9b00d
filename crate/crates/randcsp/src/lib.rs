//! Random boolean constraint-satisfaction ensembles, exact model counting,
//! and seeded statistical verification.
//!
//! The crate is organized around five layers:
//!
//! * [`formula`] — clause types (boolean functions on spin tuples), clause
//!   type distributions, placed clauses, formulas, exact evaluation, and the
//!   DIMACS / `gcsp` text formats.
//! * [`ensembles`] — seeded random samplers for the binomial clause-subset
//!   model, the fixed-`m` and Poisson models with i.i.d. indices, the
//!   two-block interpolated model, and monotone clause-addition coupling.
//! * [`counting`] — exact solution counters (bit-parallel brute force,
//!   component-caching backtracking, GF(2) elimination for parity formulas)
//!   plus the exact clause-addition checksum.
//! * [`hypotheses`] — θ-biased norms and the H1 checks, the replica
//!   functional Γ_l with three evaluation routes (direct enumeration,
//!   factorized closed form, Walsh–Hadamard), and numeric convexity probing
//!   for H2.
//! * [`experiments`] — Monte Carlo estimators (`P_n`, `ψ_n`, thresholds,
//!   critical windows, concentration profiles) and inequality verifiers
//!   (pseudo-superadditivity, interpolation monotonicity, geometric decay),
//!   all deterministic functions of `(spec, master_seed, samples)`.
//!
//! The [`runner`] module binds everything to JSON experiment configs, JSONL
//! result records, and SVG plots; the `randcsp` binary is a thin wrapper over
//! it. Every example under `examples/` is a runnable tour of one capability.

#![forbid(unsafe_code)]

pub mod counting;
pub mod ensembles;
pub mod experiments;
pub mod formula;
pub mod hypotheses;
pub mod rngstream;
pub mod runner;
