//! File formats, reports and the command-line front end for
//! [`shoaltrack_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod histogram;
pub mod mot;
pub mod report;

pub use error::{IoError, Result};
pub use mot::{parse_mot, write_mot, MotKind};
