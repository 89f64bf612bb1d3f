//! Bit-accurate simulation of stochastic-computing (SC) function circuits
//! driven by quasi-random bit-stream generators.
//!
//! The crate models the full unipolar SC pipeline: deterministic number
//! sources (counter, Van der Corput group-reversal generators, maximal
//! LFSRs, Sobol), comparator bit-stream encoding, gate-level computation
//! with correlation-dependent semantics, declarative Horner-cascade circuits
//! for nine transcendental functions, an accuracy/correlation evaluation
//! harness, and two worked applications (image rotation and two-link arm
//! kinematics).
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --example generate_sequences
//! cargo run --example encode_decode
//! cargo run --example gate_semantics
//! cargo run --example evaluate_function
//! cargo run --example accuracy_sweep
//! cargo run --example correlation_profile
//! cargo run --example figure_of_merit
//! cargo run --example image_rotation
//! cargo run --example arm_kinematics
//! ```
//!
//! The same capabilities are exposed by the thin `scsim` binary
//! (`gen`, `eval`, `sweep`, `corr`, `fom`, `app` subcommands).

pub mod apps;
pub mod bitstream;
pub mod circuits;
pub mod cli;
pub mod error;
pub mod eval;
pub mod gates;
pub mod rng;

pub use bitstream::{encode, pair_counts, scc, zce, Bitstream, PairCounts};
pub use circuits::{
    builtin_spec, eval_circuit, eval_estimate, maclaurin_reference, true_reference,
    CircuitConfig, CircuitOutput, Combiner, FunctionId, HornerSpec, StageFactor, Variant,
};
pub use error::{Error, Result};
pub use eval::{correlation_profile, fom, mse_sweep, EvalReport};
pub use rng::{radical_inverse, Rational, SequenceSource};
