//! Controversy scores for conversation graphs.
//!
//! Build a graph from interaction records (or load an edge list), split it in two,
//! and measure how separated the two sides are:
//!
//! ```
//! use controversy::datasets::{karate_club, karate_factions};
//! use controversy::measures::gmck;
//!
//! let g = karate_club();
//! let p = karate_factions(&g);
//! let score = gmck(&g, &p).unwrap();
//! assert!(score.value > 0.0 && score.value < 1.0);
//! ```

pub mod build;
pub mod datasets;
pub mod error;
pub mod graph;
pub mod io;
pub mod measures;
pub mod partition;
pub mod pipeline;
pub mod records;
pub mod report;
pub mod sentiment;
pub mod synthetic;
pub mod topic;
pub mod user;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{largest_component, ConversationGraph, GraphBuilder};
pub use partition::{spectral_bisection, Partition, Side};
pub use records::{InteractionRecord, Topic};
pub use report::ControversyReport;
