//! Counts primitive invocations on the current thread.
//!
//! The builder promises that a rejected configuration never reaches a
//! primitive; tests observe that through this counter. The counter is
//! thread-local so parallel tests do not interfere.

use std::cell::Cell;

thread_local! {
    static OP_COUNT: Cell<u64> = const { Cell::new(0) };
}

pub(crate) fn record_op() {
    OP_COUNT.with(|c| c.set(c.get() + 1));
}

/// Number of primitive operations (hash, KDF, cipher, RSA) executed on the
/// current thread since it started.
#[doc(hidden)]
pub fn op_count() -> u64 {
    OP_COUNT.with(|c| c.get())
}
