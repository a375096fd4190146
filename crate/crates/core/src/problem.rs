//! The composite template `min_{x ∈ X} f(x) + Σⱼ gⱼ(Aⱼx)`.

use thiserror::Error;

use crate::linalg::{self, DenseMatrix, EigConfig};
use crate::oracles::{Domain, LinearMap, NonsmoothTerm, TermKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("{what}: expected dimension {expected}, got {got}")]
    Dimension {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("start point is not in the domain")]
    InfeasibleStart,
}

/// Differentiable convex `f` with `L_f`-Lipschitz gradient.
pub trait SmoothFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    fn lipschitz(&self) -> f64;

    /// `dᵀ∇²f d` when `f` is quadratic.
    fn curvature(&self, _d: &[f64]) -> Option<f64> {
        None
    }

    fn gradient_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        self.gradient(x, &mut g);
        g
    }
}

#[derive(Debug, Clone)]
pub struct ZeroFunction {
    dim: usize,
}

impl ZeroFunction {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl SmoothFunction for ZeroFunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn curvature(&self, _d: &[f64]) -> Option<f64> {
        Some(0.0)
    }
}

/// `f(x) = ⟨c, x⟩`.
#[derive(Debug, Clone)]
pub struct LinearFunction {
    coefficients: Vec<f64>,
}

impl LinearFunction {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

impl SmoothFunction for LinearFunction {
    fn dim(&self) -> usize {
        self.coefficients.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.coefficients, x)
    }
    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.coefficients);
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn curvature(&self, _d: &[f64]) -> Option<f64> {
        Some(0.0)
    }
}

/// `f(x) = ½xᵀHx + cᵀx + c₀` with `H` symmetric positive semidefinite.
#[derive(Debug, Clone)]
pub struct QuadraticFunction {
    hessian: DenseMatrix,
    linear: Vec<f64>,
    constant: f64,
    lipschitz: f64,
}

impl QuadraticFunction {
    pub fn new(hessian: DenseMatrix, linear: Vec<f64>, constant: f64) -> Self {
        let hessian = hessian.symmetrized();
        let lipschitz = if hessian.rows() <= 200 {
            let (vals, _) = linalg::jacobi_eig_full(&hessian).expect("symmetrized");
            vals.last().copied().unwrap_or(0.0).max(0.0)
        } else {
            let cfg = EigConfig::default();
            linalg::spectral_norm(
                |x, o| hessian.matvec_into(x, o),
                |y, o| hessian.matvec_into(y, o),
                hessian.rows(),
                hessian.rows(),
                &cfg,
            )
            .value
        };
        Self {
            hessian,
            linear,
            constant,
            lipschitz,
        }
    }

    pub fn hessian(&self) -> &DenseMatrix {
        &self.hessian
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }
}

impl SmoothFunction for QuadraticFunction {
    fn dim(&self) -> usize {
        self.linear.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * linalg::dot(x, &self.hessian.matvec(x)) + linalg::dot(&self.linear, x) + self.constant
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.hessian.matvec_into(x, out);
        linalg::axpy(1.0, &self.linear, out);
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn curvature(&self, d: &[f64]) -> Option<f64> {
        Some(linalg::dot(d, &self.hessian.matvec(d)))
    }
}

/// `f(x) = ½‖Ax − b‖²`, `L_f = ‖A‖²`.
pub struct LeastSquares {
    map: Box<dyn LinearMap>,
    target: Vec<f64>,
}

impl LeastSquares {
    pub fn new(map: Box<dyn LinearMap>, target: Vec<f64>) -> Self {
        Self { map, target }
    }
}

impl SmoothFunction for LeastSquares {
    fn dim(&self) -> usize {
        self.map.dim_in()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let ax = self.map.apply_vec(x);
        0.5 * linalg::zip_sum(&ax, &self.target, |a, b| (a - b) * (a - b))
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let r = linalg::sub(&self.map.apply_vec(x), &self.target);
        self.map.adjoint(&r, out);
    }
    fn lipschitz(&self) -> f64 {
        let n = self.map.norm_estimate().value;
        n * n
    }
    fn curvature(&self, d: &[f64]) -> Option<f64> {
        let ad = self.map.apply_vec(d);
        Some(linalg::dot(&ad, &ad))
    }
}

/// One `(Aⱼ, gⱼ)` pair.
pub struct PenaltyTerm {
    pub label: String,
    pub map: Box<dyn LinearMap>,
    pub term: Box<dyn NonsmoothTerm>,
}

impl PenaltyTerm {
    pub fn new(
        label: impl Into<String>,
        map: Box<dyn LinearMap>,
        term: Box<dyn NonsmoothTerm>,
    ) -> Self {
        Self {
            label: label.into(),
            map,
            term,
        }
    }

    pub fn kind(&self) -> TermKind {
        self.term.kind()
    }
}

pub struct CompositeProblem {
    pub smooth: Box<dyn SmoothFunction>,
    pub domain: Box<dyn Domain>,
    pub terms: Vec<PenaltyTerm>,
    /// Overrides the domain's canonical start when set.
    pub start: Option<Vec<f64>>,
}

impl CompositeProblem {
    pub fn new(smooth: Box<dyn SmoothFunction>, domain: Box<dyn Domain>) -> Self {
        Self {
            smooth,
            domain,
            terms: Vec::new(),
            start: None,
        }
    }

    pub fn with_term(mut self, term: PenaltyTerm) -> Self {
        self.terms.push(term);
        self
    }

    pub fn with_start(mut self, start: Vec<f64>) -> Self {
        self.start = Some(start);
        self
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn start_point(&self) -> Vec<f64> {
        self.start.clone().unwrap_or_else(|| self.domain.start())
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let n = self.domain.dim();
        if self.smooth.dim() != n {
            return Err(ProblemError::Dimension {
                what: "smooth part".into(),
                expected: n,
                got: self.smooth.dim(),
            });
        }
        for t in &self.terms {
            if t.map.dim_in() != n {
                return Err(ProblemError::Dimension {
                    what: format!("map input of term {}", t.label),
                    expected: n,
                    got: t.map.dim_in(),
                });
            }
            if t.map.dim_out() != t.term.dim() {
                return Err(ProblemError::Dimension {
                    what: format!("map output of term {}", t.label),
                    expected: t.term.dim(),
                    got: t.map.dim_out(),
                });
            }
        }
        let start = self.start_point();
        if start.len() != n {
            return Err(ProblemError::Dimension {
                what: "start point".into(),
                expected: n,
                got: start.len(),
            });
        }
        if !self.domain.contains(&start, 1e-9) {
            return Err(ProblemError::InfeasibleStart);
        }
        Ok(())
    }

    /// `‖A‖` of the stacked map `x ↦ (A₁x, …, A_Jx)`, bounded by `√Σ‖Aⱼ‖²`.
    pub fn stacked_map_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.map.norm_estimate().value.powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `L_g` of the separable sum when every term is Lipschitz.
    pub fn penalty_lipschitz(&self) -> Option<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            total += t.kind().lipschitz()?.powi(2);
        }
        Some(total.sqrt())
    }

    pub fn all_indicators(&self) -> bool {
        !self.terms.is_empty() && self.terms.iter().all(|t| t.kind().is_indicator())
    }

    pub fn all_lipschitz(&self) -> bool {
        self.terms.iter().all(|t| !t.kind().is_indicator())
    }
}
