//! Revenue maximization on weighted social networks under the uniform
//! additive valuation model.
//!
//! The crate is organised around five layers:
//!
//! * [`netmodel`]: the [`SocialNetwork`] type, edge-list I/O, generators and
//!   the small gadget networks used as fixtures.
//! * [`revenue`]: closed-form expected revenue of every strategy family,
//!   revenue bounds and the optimal ordering rule for undirected networks.
//! * [`strategies`]: constructors for influence-and-exploit (IE) strategies,
//!   randomized rounding of pricing vectors and multi-class generalized IE.
//! * [`sdprelax`]: the semidefinite relaxation of best-IE selection, a
//!   low-rank augmented-Lagrangian solver and rotation/hyperplane rounding.
//! * [`certificates`] and [`oracle`]: numeric ratio certificates,
//!   exhaustive and heuristic ground truth, and a Monte Carlo simulator of
//!   the sequential offer process.

pub mod certificates;
mod error;
pub mod netmodel;
pub mod numeric;
pub mod oracle;
pub mod revenue;
pub mod rng;
pub mod sdprelax;
pub mod strategies;

pub use error::{Error, Result};
pub use netmodel::{Directedness, SocialNetwork};
pub use revenue::{GeneralizedIeStrategy, IeStrategy, MarketingStrategy, Strategy};
