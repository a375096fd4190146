//! Compact domains and their linear minimization oracles.
//!
//! Ties in arg-min/arg-max selections go to the smallest index. A zero
//! direction is legitimate at stationary points and yields a documented
//! canonical atom rather than an error.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::OracleError;
use crate::linalg::{self, DenseMatrix, EigConfig};

/// Atom returned by an LMO together with the inner-solver accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct LmoOutput {
    pub atom: Vec<f64>,
    /// Operator applications spent by an inner iterative solver (0 for closed forms).
    pub inner_iterations: usize,
    pub converged: bool,
    /// Inner-solver residual (0 for closed forms).
    pub residual: f64,
}

impl LmoOutput {
    fn exact(atom: Vec<f64>) -> Self {
        Self {
            atom,
            inner_iterations: 0,
            converged: true,
            residual: 0.0,
        }
    }
}

/// A compact convex set accessed only through its LMO.
pub trait Domain: Send + Sync {
    fn dim(&self) -> usize;
    fn name(&self) -> &'static str;

    /// `argmin_{s ∈ X} ⟨v, s⟩`. `seed` drives any randomized inner solver.
    fn lmo(&self, v: &[f64], seed: u64) -> LmoOutput;

    /// `D_X = max ‖x₁ − x₂‖` over the set.
    fn diameter(&self) -> f64;

    fn contains(&self, x: &[f64], tol: f64) -> bool;

    /// Canonical feasible starting point.
    fn start(&self) -> Vec<f64>;

    /// A random feasible point, for optimality probes.
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

fn random_simplex_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let nv = linalg::norm(&v);
        if nv > 0.0 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// Vertex `e_i` of the unit simplex with `i = argmin v_i`.
pub fn lmo_simplex(v: &[f64]) -> Result<Vec<f64>, OracleError> {
    if v.is_empty() {
        return Err(OracleError::Empty);
    }
    let mut best = 0;
    for (i, &vi) in v.iter().enumerate() {
        if vi < v[best] {
            best = i;
        }
    }
    let mut e = vec![0.0; v.len()];
    e[best] = 1.0;
    Ok(e)
}

/// `−ρ·sign(v_i)·e_i` with `i = argmax |v_i|`; a zero entry there gives `+ρe_i`.
pub fn lmo_l1_ball(v: &[f64], radius: f64) -> Result<Vec<f64>, OracleError> {
    if v.is_empty() {
        return Err(OracleError::Empty);
    }
    let mut best = 0;
    for (i, &vi) in v.iter().enumerate() {
        if vi.abs() > v[best].abs() {
            best = i;
        }
    }
    let mut out = vec![0.0; v.len()];
    out[best] = if v[best] > 0.0 { -radius } else { radius };
    Ok(out)
}

/// Coordinate `i` takes `lower_i` when `v_i ≥ 0`, `upper_i` otherwise.
pub fn lmo_box(v: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    v.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&vi, (&l, &u))| if vi < 0.0 { u } else { l })
        .collect()
}

/// `−ρ v/‖v‖`, or the center for `v = 0`.
pub fn lmo_euclidean_ball(v: &[f64], radius: f64) -> Vec<f64> {
    let nv = linalg::norm(v);
    if nv == 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| -radius * x / nv).collect()
}

/// `−ρ u₁v₁ᵀ` from the leading singular pair of `V`; `V = 0` gives `−ρe₁e₁ᵀ`.
pub fn lmo_nuclear_ball(v: &DenseMatrix, radius: f64, cfg: &EigConfig) -> LmoOutput {
    let triplet = linalg::top_singular_pair(v, cfg);
    let atom = DenseMatrix::outer(&triplet.left, &triplet.right, -radius).into_vec();
    LmoOutput {
        atom,
        inner_iterations: triplet.iterations,
        converged: triplet.converged,
        residual: triplet.residual,
    }
}

/// `ρqqᵀ` for the minimum eigenvector `q` of `sym(V)` when `λ_min < 0`, else 0.
///
/// Only the symmetric part of `V` matters on symmetric atoms, so non-symmetric
/// directions (e.g. adjoints of row-sum maps) are accepted.
pub fn lmo_spectrahedron(v: &DenseMatrix, radius: f64, cfg: &EigConfig) -> LmoOutput {
    let n = v.rows();
    let sym = v.symmetrized();
    let pair = linalg::min_eigpair(&sym, cfg).expect("symmetrized square matrix");
    let atom = if pair.value < 0.0 {
        DenseMatrix::outer(&pair.vector, &pair.vector, radius).into_vec()
    } else {
        vec![0.0; n * n]
    };
    LmoOutput {
        atom,
        inner_iterations: pair.iterations,
        converged: pair.converged,
        residual: pair.residual,
    }
}

/// Unit simplex `{x ≥ 0, Σx = 1}`.
#[derive(Debug, Clone)]
pub struct Simplex {
    dim: usize,
}

impl Simplex {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "simplex needs at least one coordinate");
        Self { dim }
    }
}

impl Domain for Simplex {
    fn dim(&self) -> usize {
        self.dim
    }
    fn name(&self) -> &'static str {
        "simplex"
    }
    fn lmo(&self, v: &[f64], _seed: u64) -> LmoOutput {
        LmoOutput::exact(lmo_simplex(v).expect("non-empty direction"))
    }
    fn diameter(&self) -> f64 {
        if self.dim > 1 {
            std::f64::consts::SQRT_2
        } else {
            0.0
        }
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim
            && x.iter().all(|&v| v >= -tol)
            && (x.iter().sum::<f64>() - 1.0).abs() <= tol
    }
    fn start(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.dim];
        e[0] = 1.0;
        e
    }
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        random_simplex_weights(self.dim, rng)
    }
}

/// `{‖x‖₁ ≤ ρ}`.
#[derive(Debug, Clone)]
pub struct L1Ball {
    dim: usize,
    radius: f64,
}

impl L1Ball {
    pub fn new(dim: usize, radius: f64) -> Self {
        Self { dim, radius }
    }
}

impl Domain for L1Ball {
    fn dim(&self) -> usize {
        self.dim
    }
    fn name(&self) -> &'static str {
        "l1_ball"
    }
    fn lmo(&self, v: &[f64], _seed: u64) -> LmoOutput {
        LmoOutput::exact(lmo_l1_ball(v, self.radius).expect("non-empty direction"))
    }
    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && x.iter().map(|v| v.abs()).sum::<f64>() <= self.radius + tol
    }
    fn start(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let w = random_simplex_weights(self.dim, rng);
        let r: f64 = rng.random_range(0.0..=1.0);
        w.into_iter()
            .map(|wi| {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * wi * r * self.radius
            })
            .collect()
    }
}

/// Axis-aligned box with finite bounds.
#[derive(Debug, Clone)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, OracleError> {
        if lower.len() != upper.len() {
            return Err(OracleError::Dimension {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        let valid = lower
            .iter()
            .zip(&upper)
            .all(|(l, u)| l.is_finite() && u.is_finite() && l <= u);
        if !valid {
            return Err(OracleError::Parameter(
                "box bounds must be finite with lower <= upper".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

impl Domain for BoxDomain {
    fn dim(&self) -> usize {
        self.lower.len()
    }
    fn name(&self) -> &'static str {
        "box"
    }
    fn lmo(&self, v: &[f64], _seed: u64) -> LmoOutput {
        LmoOutput::exact(lmo_box(v, &self.lower, &self.upper))
    }
    fn diameter(&self) -> f64 {
        linalg::distance(&self.lower, &self.upper)
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.lower.len()
            && x.iter()
                .enumerate()
                .all(|(i, &v)| v >= self.lower[i] - tol && v <= self.upper[i] + tol)
    }
    fn start(&self) -> Vec<f64> {
        self.lower.clone()
    }
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| if u > l { rng.random_range(l..=u) } else { l })
            .collect()
    }
}

/// `{‖x‖₂ ≤ ρ}` centered at the origin.
#[derive(Debug, Clone)]
pub struct EuclideanBall {
    dim: usize,
    radius: f64,
}

impl EuclideanBall {
    pub fn new(dim: usize, radius: f64) -> Self {
        Self { dim, radius }
    }
}

impl Domain for EuclideanBall {
    fn dim(&self) -> usize {
        self.dim
    }
    fn name(&self) -> &'static str {
        "euclidean_ball"
    }
    fn lmo(&self, v: &[f64], _seed: u64) -> LmoOutput {
        LmoOutput::exact(lmo_euclidean_ball(v, self.radius))
    }
    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && linalg::norm(x) <= self.radius + tol
    }
    fn start(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let u = random_unit(self.dim, rng);
        let r = self.radius * rng.random_range(0.0..=1.0f64).powf(1.0 / self.dim as f64);
        u.into_iter().map(|x| x * r).collect()
    }
}

/// `{X ∈ ℝ^{m×n} : ‖X‖_{S₁} ≤ ρ}`, row-major.
#[derive(Debug, Clone)]
pub struct NuclearBall {
    rows: usize,
    cols: usize,
    radius: f64,
    eig: EigConfig,
}

impl NuclearBall {
    pub fn new(rows: usize, cols: usize, radius: f64, eig: EigConfig) -> Self {
        Self {
            rows,
            cols,
            radius,
            eig,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Domain for NuclearBall {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }
    fn name(&self) -> &'static str {
        "nuclear_ball"
    }
    fn lmo(&self, v: &[f64], seed: u64) -> LmoOutput {
        let m = DenseMatrix::from_vec(self.rows, self.cols, v.to_vec()).expect("direction shape");
        lmo_nuclear_ball(&m, self.radius, &self.eig.with_seed(seed))
    }
    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let m = DenseMatrix::from_vec(self.rows, self.cols, x.to_vec()).expect("checked length");
        match linalg::nuclear_norm(&m) {
            Ok(nn) => nn <= self.radius * (1.0 + tol) + tol,
            // too large for the dense check; fall back to a necessary condition
            Err(_) => m.frobenius_norm() <= self.radius + tol,
        }
    }
    fn start(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let terms = 3;
        let w = random_simplex_weights(terms, rng);
        let r: f64 = rng.random_range(0.0..=1.0);
        let mut x = vec![0.0; self.dim()];
        for wk in w {
            let a = random_unit(self.rows, rng);
            let b = random_unit(self.cols, rng);
            let atom = DenseMatrix::outer(&a, &b, wk * r * self.radius);
            linalg::axpy(1.0, atom.as_slice(), &mut x);
        }
        x
    }
}

/// `{X ⪰ 0, tr X ≤ ρ}` on symmetric n×n matrices, row-major.
#[derive(Debug, Clone)]
pub struct Spectrahedron {
    n: usize,
    radius: f64,
    eig: EigConfig,
}

impl Spectrahedron {
    pub fn new(n: usize, radius: f64, eig: EigConfig) -> Self {
        Self { n, radius, eig }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Domain for Spectrahedron {
    fn dim(&self) -> usize {
        self.n * self.n
    }
    fn name(&self) -> &'static str {
        "spectrahedron"
    }
    fn lmo(&self, v: &[f64], seed: u64) -> LmoOutput {
        let m = DenseMatrix::from_vec(self.n, self.n, v.to_vec()).expect("direction shape");
        lmo_spectrahedron(&m, self.radius, &self.eig.with_seed(seed))
    }
    fn diameter(&self) -> f64 {
        // ‖X − Y‖²_F ≤ ‖X‖²_F + ‖Y‖²_F for PSD X, Y
        std::f64::consts::SQRT_2 * self.radius
    }
    fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let m = DenseMatrix::from_vec(self.n, self.n, x.to_vec()).expect("checked length");
        let scale = 1.0 + m.max_abs();
        if m.asymmetry() > tol * scale || m.trace() > self.radius + tol {
            return false;
        }
        let cfg = EigConfig {
            max_iterations: 4000,
            tolerance: 1e-12,
            seed: 1,
        };
        match linalg::min_eigpair(&m.symmetrized(), &cfg) {
            Ok(pair) => pair.value >= -tol * scale,
            Err(_) => false,
        }
    }
    fn start(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let terms = 3;
        let w = random_simplex_weights(terms, rng);
        let r: f64 = rng.random_range(0.0..=1.0);
        let mut x = vec![0.0; self.dim()];
        for wk in w {
            let q = random_unit(self.n, rng);
            let atom = DenseMatrix::outer(&q, &q, wk * r * self.radius);
            linalg::axpy(1.0, atom.as_slice(), &mut x);
        }
        x
    }
}
