pub mod commands;
pub mod format;
pub mod report;

pub use commands::{run, Cli};
pub use format::{parse_workspace, serialize_workspace, FormatError, Workspace};

/// Exit codes shared by every command.
pub mod exit {
    pub const OK: i32 = 0;
    pub const NEGATIVE: i32 = 1;
    pub const INCONCLUSIVE: i32 = 2;
    pub const USAGE: i32 = 3;
}
