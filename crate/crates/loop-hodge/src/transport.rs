//! Parallel transport (in progress).
