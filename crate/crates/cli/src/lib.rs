//! Front end for the `unialg` library: file formats, reports and the
//! commands run by the `unialg` binary.

pub mod commands;
pub mod files;
pub mod report;

pub use commands::{Mode, Workspace};
pub use files::InputError;
pub use report::{Format, Outcome, Report};
