//! Rational verification for concurrent multi-player games with GR(1) or
//! mean-payoff goals: E-Nash, A-Nash, Non-emptiness and social-welfare
//! queries, with checkable witnesses.

pub mod buchi;
pub mod engine;
pub mod fixtures;
pub mod formula;
pub mod graph;
pub mod lasso_search;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod parity;
pub mod punish_gr1;
pub mod punish_mp;
pub mod rational;
pub mod welfare;

pub use rational::Rational;
