//! Rank-aware divergence metrics for the normative diversity of news
//! recommendations.
//!
//! The pipeline reads a MIND-style catalog and impression log ([`corpus`]),
//! annotates articles ([`enrich`]), turns article lists into discrete
//! distributions ([`distrib`]), compares them with KL or square-root
//! Jensen–Shannon divergence ([`divergence`]), and scores recommendation
//! lists on Calibration, Fragmentation, Activation, Representation and
//! Alternative Voices ([`metrics`]). [`harness`] holds the baseline
//! recommenders, run configuration and report writers behind the `newsdiv`
//! binary.

pub mod corpus;
pub mod distrib;
pub mod divergence;
pub mod enrich;
pub mod harness;
pub mod metrics;
pub mod synth;
