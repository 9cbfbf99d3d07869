//! Fundamental cocycle (in progress).
