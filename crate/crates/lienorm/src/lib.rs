//! Command-line front end for `lienorm-core`: argument parsing, the map
//! file format, CSV/JSON output, parallel Monte Carlo and the `verify`
//! property suites.

pub mod cli;
pub mod mapfile;
pub mod parallel;
pub mod parse;
pub mod verify;
