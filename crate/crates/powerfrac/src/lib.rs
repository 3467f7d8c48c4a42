//! Verification oracles, file formats and command-line plumbing on top of
//! `powerfrac-core`.

pub mod parse;
pub mod plot;
pub mod table;
pub mod verify;
