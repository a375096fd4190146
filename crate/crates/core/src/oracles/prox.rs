//! Proximal and projection catalog.

use crate::linalg;

/// Euclidean projection onto the unit simplex `{x ≥ 0, Σx = 1}` by sorting
/// and thresholding.
pub fn proj_simplex(z: &[f64]) -> Vec<f64> {
    if z.is_empty() {
        return Vec::new();
    }
    let mut sorted = z.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    z.iter().map(|&zi| (zi - tau).max(0.0)).collect()
}

/// Coordinatewise clamp; bounds may be infinite.
pub fn proj_box(z: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    z.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&zi, (&l, &u))| zi.max(l).min(u))
        .collect()
}

/// The prox of the indicator of `{b}` ignores its input.
pub fn prox_point_indicator(_z: &[f64], b: &[f64]) -> Vec<f64> {
    b.to_vec()
}

fn positive(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// `prox_{β λ‖· − b‖₁}(z) = b + soft(z − b, βλ)`.
pub fn prox_l1_residual(z: &[f64], b: &[f64], lambda: f64, beta: f64) -> Vec<f64> {
    let t = beta * lambda;
    z.iter()
        .zip(b)
        .map(|(&zi, &bi)| bi + soft_threshold(zi - bi, t))
        .collect()
}

/// `prox_{β max}(z) = z − β·proj_Δ(z/β)` (the conjugate of `max` is the simplex
/// indicator).
pub fn prox_max(z: &[f64], beta: f64) -> Vec<f64> {
    let scaled: Vec<f64> = z.iter().map(|v| v / beta).collect();
    let p = proj_simplex(&scaled);
    z.iter().zip(&p).map(|(zi, pi)| zi - beta * pi).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermKind {
    /// Finite everywhere and `L`-Lipschitz in the Euclidean norm.
    Lipschitz { constant: f64 },
    /// Indicator of a closed convex set `K`; its prox is `proj_K`.
    Indicator,
}

impl TermKind {
    pub fn is_indicator(&self) -> bool {
        matches!(self, TermKind::Indicator)
    }

    pub fn lipschitz(&self) -> Option<f64> {
        match *self {
            TermKind::Lipschitz { constant } => Some(constant),
            TermKind::Indicator => None,
        }
    }
}

/// A proper closed convex `g: ℝᵈ → ℝ ∪ {+∞}` with a computable prox.
pub trait NonsmoothTerm: Send + Sync {
    fn dim(&self) -> usize;
    fn kind(&self) -> TermKind;
    fn name(&self) -> &'static str;

    /// `out = prox_{βg}(z)`.
    fn prox(&self, z: &[f64], beta: f64, out: &mut [f64]);

    /// `g(z)`; indicators return `0` on `K` and `+∞` off it.
    fn value(&self, z: &[f64]) -> f64;

    /// Fenchel conjugate `g*(y)`, `+∞` outside its domain.
    fn conjugate(&self, y: &[f64]) -> f64;

    /// `out = prox_{σ g*}(y)`, computed without going through `prox`.
    fn conjugate_prox(&self, y: &[f64], sigma: f64, out: &mut [f64]);

    /// `dist(z, K)` for indicators, `0` for finite terms.
    fn distance(&self, z: &[f64]) -> f64 {
        if self.kind().is_indicator() {
            let mut p = vec![0.0; z.len()];
            self.prox(z, 1.0, &mut p);
            linalg::distance(z, &p)
        } else {
            0.0
        }
    }

    fn prox_vec(&self, z: &[f64], beta: f64) -> Vec<f64> {
        let mut out = vec![0.0; z.len()];
        self.prox(z, beta, &mut out);
        out
    }

    /// Moreau envelope `min_u g(u) + ‖z − u‖²/(2β)`, equal to the smoothed `g_β(z)`.
    fn moreau_envelope(&self, z: &[f64], beta: f64) -> f64 {
        if self.kind().is_indicator() {
            let d = self.distance(z);
            return d * d / (2.0 * beta);
        }
        let p = self.prox_vec(z, beta);
        self.value(&p) + linalg::distance(z, &p).powi(2) / (2.0 * beta)
    }
}

/// Tolerance for deciding that a dual point lies in the domain of `g*`.
const CONJUGATE_DOMAIN_TOL: f64 = 1e-9;

/// `g = 0`.
#[derive(Debug, Clone)]
pub struct ZeroTerm {
    dim: usize,
}

impl ZeroTerm {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl NonsmoothTerm for ZeroTerm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn kind(&self) -> TermKind {
        TermKind::Lipschitz { constant: 0.0 }
    }
    fn name(&self) -> &'static str {
        "zero"
    }
    fn prox(&self, z: &[f64], _beta: f64, out: &mut [f64]) {
        out.copy_from_slice(z);
    }
    fn value(&self, _z: &[f64]) -> f64 {
        0.0
    }
    fn conjugate(&self, y: &[f64]) -> f64 {
        if y.iter().all(|v| v.abs() <= CONJUGATE_DOMAIN_TOL) {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn conjugate_prox(&self, _y: &[f64], _sigma: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// Indicator of the single point `{b}` (affine equality `Ax = b`).
#[derive(Debug, Clone)]
pub struct PointIndicator {
    target: Vec<f64>,
}

impl PointIndicator {
    pub fn new(target: Vec<f64>) -> Self {
        Self { target }
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }
}

impl NonsmoothTerm for PointIndicator {
    fn dim(&self) -> usize {
        self.target.len()
    }
    fn kind(&self) -> TermKind {
        TermKind::Indicator
    }
    fn name(&self) -> &'static str {
        "point_indicator"
    }
    fn prox(&self, _z: &[f64], _beta: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.target);
    }
    fn value(&self, z: &[f64]) -> f64 {
        if z == self.target.as_slice() {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn distance(&self, z: &[f64]) -> f64 {
        linalg::distance(z, &self.target)
    }
    fn conjugate(&self, y: &[f64]) -> f64 {
        linalg::dot(y, &self.target)
    }
    fn conjugate_prox(&self, y: &[f64], sigma: f64, out: &mut [f64]) {
        for ((o, &yi), &bi) in out.iter_mut().zip(y).zip(&self.target) {
            *o = yi - sigma * bi;
        }
    }
}

/// Indicator of the box `{lower ≤ z ≤ upper}`; infinite bounds allowed, so the
/// nonnegative orthant is `lower = 0, upper = +∞`.
#[derive(Debug, Clone)]
pub struct BoxIndicator {
    lower: Vec<f64>,
    upper: Vec<f64>,
    uniform: Option<(f64, f64)>,
}

impl BoxIndicator {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), upper.len());
        Self {
            lower,
            upper,
            uniform: None,
        }
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Self {
            uniform: Some((lower, upper)),
            ..Self::new(vec![lower; dim], vec![upper; dim])
        }
    }

    pub fn nonnegative(dim: usize) -> Self {
        Self::uniform(dim, 0.0, f64::INFINITY)
    }
}

impl NonsmoothTerm for BoxIndicator {
    fn dim(&self) -> usize {
        self.lower.len()
    }
    fn kind(&self) -> TermKind {
        TermKind::Indicator
    }
    fn name(&self) -> &'static str {
        "box_indicator"
    }
    fn prox(&self, z: &[f64], _beta: f64, out: &mut [f64]) {
        for ((o, &zi), (&lo, &hi)) in out
            .iter_mut()
            .zip(z)
            .zip(self.lower.iter().zip(&self.upper))
        {
            *o = if zi < lo {
                lo
            } else if zi > hi {
                hi
            } else {
                zi
            };
        }
    }
    fn value(&self, z: &[f64]) -> f64 {
        let inside = z
            .iter()
            .enumerate()
            .all(|(i, &zi)| zi >= self.lower[i] && zi <= self.upper[i]);
        if inside {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn distance(&self, z: &[f64]) -> f64 {
        if let Some((lo, hi)) = self.uniform {
            let sq = linalg::map_sum(z, |zi| (positive(lo - zi) + positive(zi - hi)).powi(2));
            return sq.sqrt();
        }
        let below = linalg::zip_sum(z, &self.lower, |zi, lo| positive(lo - zi).powi(2));
        let above = linalg::zip_sum(z, &self.upper, |zi, hi| positive(zi - hi).powi(2));
        (below + above).sqrt()
    }
    fn conjugate(&self, y: &[f64]) -> f64 {
        // support function of the box
        let mut total = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            let bound = if yi > 0.0 {
                self.upper[i]
            } else if yi < 0.0 {
                self.lower[i]
            } else {
                continue;
            };
            if !bound.is_finite() {
                return f64::INFINITY;
            }
            total += yi * bound;
        }
        total
    }
    fn conjugate_prox(&self, y: &[f64], sigma: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let p = (y[i] / sigma).max(self.lower[i]).min(self.upper[i]);
            *o = y[i] - sigma * p;
        }
    }
}

/// `g(z) = λ‖z − b‖₁`, Lipschitz with constant `λ√d`.
#[derive(Debug, Clone)]
pub struct L1Residual {
    target: Vec<f64>,
    weight: f64,
}

impl L1Residual {
    pub fn new(target: Vec<f64>, weight: f64) -> Self {
        Self { target, weight }
    }
}

impl NonsmoothTerm for L1Residual {
    fn dim(&self) -> usize {
        self.target.len()
    }
    fn kind(&self) -> TermKind {
        TermKind::Lipschitz {
            constant: self.weight * (self.target.len() as f64).sqrt(),
        }
    }
    fn name(&self) -> &'static str {
        "l1_residual"
    }
    fn prox(&self, z: &[f64], beta: f64, out: &mut [f64]) {
        let t = beta * self.weight;
        for ((o, &zi), &bi) in out.iter_mut().zip(z).zip(&self.target) {
            *o = bi + soft_threshold(zi - bi, t);
        }
    }
    fn value(&self, z: &[f64]) -> f64 {
        self.weight
            * z.iter()
                .zip(&self.target)
                .map(|(zi, bi)| (zi - bi).abs())
                .sum::<f64>()
    }
    fn conjugate(&self, y: &[f64]) -> f64 {
        let limit = self.weight * (1.0 + CONJUGATE_DOMAIN_TOL) + CONJUGATE_DOMAIN_TOL;
        if y.iter().all(|v| v.abs() <= limit) {
            linalg::dot(y, &self.target)
        } else {
            f64::INFINITY
        }
    }
    fn moreau_envelope(&self, z: &[f64], beta: f64) -> f64 {
        // Huber function of the residual, coordinatewise
        let t = beta * self.weight;
        linalg::zip_sum(z, &self.target, |zi, bi| {
            let r = (zi - bi).abs();
            let m = if r < t { r } else { t };
            m * (r - 0.5 * m)
        }) / beta
    }
    fn conjugate_prox(&self, y: &[f64], sigma: f64, out: &mut [f64]) {
        // g*(y) = ⟨b, y⟩ + ι{‖y‖∞ ≤ λ}
        for ((o, &yi), &bi) in out.iter_mut().zip(y).zip(&self.target) {
            *o = (yi - sigma * bi).clamp(-self.weight, self.weight);
        }
    }
}

/// `g(z) = max_i z_i`, the support function of the unit simplex. 1-Lipschitz.
#[derive(Debug, Clone)]
pub struct MaxTerm {
    dim: usize,
}

impl MaxTerm {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl NonsmoothTerm for MaxTerm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn kind(&self) -> TermKind {
        TermKind::Lipschitz { constant: 1.0 }
    }
    fn name(&self) -> &'static str {
        "max"
    }
    fn prox(&self, z: &[f64], beta: f64, out: &mut [f64]) {
        out.copy_from_slice(&prox_max(z, beta));
    }
    fn value(&self, z: &[f64]) -> f64 {
        z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
    fn conjugate(&self, y: &[f64]) -> f64 {
        let sum: f64 = y.iter().sum();
        let nonneg = y.iter().all(|&v| v >= -CONJUGATE_DOMAIN_TOL);
        if nonneg && (sum - 1.0).abs() <= CONJUGATE_DOMAIN_TOL {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn conjugate_prox(&self, y: &[f64], _sigma: f64, out: &mut [f64]) {
        out.copy_from_slice(&proj_simplex(y));
    }
}
