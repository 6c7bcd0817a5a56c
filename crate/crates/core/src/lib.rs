//! Temporal probabilistic logic programs.
//!
//! A PT-program annotates t-atoms such as `arrived(letter,paris)@Y` with
//! per-time probability intervals. This crate parses such programs,
//! grounds and unfolds them into interval-annotated p-programs, and
//! decides consistency, entailment and tightest bounds over possible
//! worlds by branch search plus linear programming.
//!
//! ```
//! use ptlogic::{parser, ground, psat};
//!
//! let src = "calendar 1..1. a@Y : <Y=1, [0.2], [0.8]>.";
//! let program = parser::parse_program(src).unwrap();
//! let gp = ground::ground_program(&program, ground::GroundingMode::Relevant).unwrap();
//! let pp = ground::unfold(&gp).unwrap();
//! let verdict = psat::check_consistency(&pp, &psat::SolveOptions::default()).unwrap();
//! assert!(verdict.is_consistent());
//! ```

pub mod compression;
pub mod ground;
pub mod interval;
pub mod model;
pub mod parser;
pub mod prob;
pub mod psat;

pub use interval::ProbInterval;
pub use prob::Prob;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/programs.md")]
    mod programs {}
    #[doc = include_str!("../../../book/src/unfolding.md")]
    mod unfolding {}
    #[doc = include_str!("../../../book/src/worlds.md")]
    mod worlds {}
    #[doc = include_str!("../../../book/src/maxent.md")]
    mod maxent {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    mod intervals {}
    #[doc = include_str!("../../../book/src/compression.md")]
    mod compression {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
