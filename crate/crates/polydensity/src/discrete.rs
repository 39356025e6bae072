//! Discrete distributions over a grid.
