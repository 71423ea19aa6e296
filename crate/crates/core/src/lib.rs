//! Logarithmic and Grunsky coefficient toolkit for normalized univalent
//! functions `f(z) = z + a_2 z^2 + ...` on the unit disk.
//!
//! The crate is organized bottom-up:
//!
//! - [`series`] and [`biseries`]: truncated complex power series.
//! - [`zoo`]: classical univalent families and class-preserving transforms.
//! - [`coefficients`]: logarithmic coefficients, Grunsky tables and the
//!   identities relating them.
//! - [`bounds`]: the auxiliary majorants of the consecutive-difference
//!   estimates, their maximization and chain audits.
//! - [`corpus`], [`scan`], [`audit`]: seeded corpora, the difference scan and
//!   the identity report driven by the command-line tool.

pub mod audit;
pub mod biseries;
pub mod bounds;
pub mod coefficients;
pub mod corpus;
pub mod error;
pub mod scan;
pub mod series;
pub mod zoo;

pub use error::{Error, Result};
pub use series::Series;
