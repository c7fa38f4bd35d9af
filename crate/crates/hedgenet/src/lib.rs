//! Correlation-network factor hedging toolkit.
//!
//! The pipeline: build long-short sustainability factors from firm scores,
//! strip Fama-French common variation from stock returns, filter the residual
//! correlation matrix down to a maximal planar graph (TMFG), embed the graph
//! with biased random walks + skip-gram training, and rank stocks by Euclidean
//! distance from each factor node to form close / far / far-close portfolios.
//! Regression and risk-metric modules validate the result.

pub mod data;
pub mod error;

pub use error::{Error, Result};
