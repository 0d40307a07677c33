pub mod candidates;
pub mod funcexpr;
pub mod numerics;
pub mod pipeline;
pub mod poly;
pub mod remez;
pub mod search;
pub mod supnorm;

pub use pipeline::{interactive_session, polstar, ProblemConfig, Report};
