//! Command-line front end (placeholder while the stack is under construction).

/// Entry point for the `vfric` binary; returns the process exit code.
pub fn run() -> i32 {
    0
}
