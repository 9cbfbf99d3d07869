//! Discrete harmonic bundles (in progress).
