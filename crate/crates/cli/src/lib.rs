//! Library side of the `dgs` command-line tool: input handling, the command
//! implementations, and the JSON report documents they emit.

pub mod commands;
pub mod report;

/// Process exit codes.
pub mod exit {
    pub const CERTIFIED: u8 = 0;
    pub const OK: u8 = 0;
    /// A check did not hold (oracle violation, density inconsistency, Q not
    /// a member).
    pub const CHECK_FAILED: u8 = 1;
    pub const INPUT_ERROR: u8 = 2;
    /// The supplied Q violates a structural invariant.
    pub const INVALID_Q: u8 = 3;
    pub const UNDECIDED: u8 = 10;
    pub const NOT_CONTROLLABLE: u8 = 11;
}
