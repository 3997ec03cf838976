//! Command implementations, the instance file format, and the result-record
//! serialization behind the `surfdist` binary.

pub mod commands;
pub mod instance;
pub mod record;
