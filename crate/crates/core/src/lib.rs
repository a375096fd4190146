//! Homotopy-smoothed conditional gradient method for
//! `min_{x ∈ X} f(x) + Σⱼ gⱼ(Aⱼx)` over a compact convex `X`.

pub mod bounds;
pub mod config;
pub mod linalg;
pub mod oracles;
pub mod problem;
pub mod problems;
pub mod smoothing;
pub mod solver;
pub mod trace;
