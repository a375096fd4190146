//! Quadratic smoothing of the non-smooth terms.
//!
//! For `β > 0` the smoothed term is `g_β(z) = max_y ⟨z, y⟩ − g*(y) − (β/2)‖y‖²`,
//! maximized at `y*_β(z) = (z − prox_{βg}(z))/β`, so `∇g_β(z) = y*_β(z)` and
//! `∇F_β(x) = ∇f(x) + Σⱼ Aⱼᵀ y*ⱼ`.

use thiserror::Error;

use crate::linalg;
use crate::oracles::{NonsmoothTerm, TermKind};
use crate::problem::CompositeProblem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothingError {
    #[error("smoothing parameter must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Distance below which an indicator term counts as satisfied when reporting `F`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

fn check_beta(beta: f64) -> Result<(), SmoothingError> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(SmoothingError::NonPositiveBeta(beta))
    }
}

/// `y*_β(z) = (z − prox_{βg}(z)) / β`.
pub fn y_star(z: &[f64], term: &dyn NonsmoothTerm, beta: f64) -> Result<Vec<f64>, SmoothingError> {
    check_beta(beta)?;
    if z.len() != term.dim() {
        return Err(SmoothingError::Dimension {
            expected: term.dim(),
            got: z.len(),
        });
    }
    let p = term.prox_vec(z, beta);
    Ok(z.iter().zip(&p).map(|(zi, pi)| (zi - pi) / beta).collect())
}

fn smoothed_from_parts(
    z: &[f64],
    prox: &[f64],
    y: &[f64],
    term: &dyn NonsmoothTerm,
    beta: f64,
) -> f64 {
    match term.kind() {
        TermKind::Indicator => {
            let d2: f64 = z.iter().zip(prox).map(|(a, b)| (a - b) * (a - b)).sum();
            d2 / (2.0 * beta)
        }
        TermKind::Lipschitz { .. } => {
            let conj = term.conjugate(y);
            if conj.is_finite() {
                linalg::dot(z, y) - conj - 0.5 * beta * linalg::dot(y, y)
            } else {
                // y* left dom g* by roundoff; use the Moreau-envelope form
                log::debug!(
                    "{}: conjugate infinite at y*, using envelope form",
                    term.name()
                );
                let d2: f64 = z.iter().zip(prox).map(|(a, b)| (a - b) * (a - b)).sum();
                term.value(prox) + d2 / (2.0 * beta)
            }
        }
    }
}

/// `g_β(z)`. Indicators use `dist²(z, K)/(2β)`; finite terms go through `g*`.
pub fn g_beta_value(z: &[f64], term: &dyn NonsmoothTerm, beta: f64) -> Result<f64, SmoothingError> {
    check_beta(beta)?;
    let prox = term.prox_vec(z, beta);
    let y: Vec<f64> = z
        .iter()
        .zip(&prox)
        .map(|(zi, pi)| (zi - pi) / beta)
        .collect();
    Ok(smoothed_from_parts(z, &prox, &y, term, beta))
}

/// Cached per-term quantities at one `(x, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermState {
    pub z: Vec<f64>,
    pub prox: Vec<f64>,
    pub y_star: Vec<f64>,
    pub smoothed_value: f64,
    /// `dist(z, K)` for indicators, 0 otherwise.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedState {
    pub beta: f64,
    pub terms: Vec<TermState>,
}

impl SmoothedState {
    pub fn new(x: &[f64], problem: &CompositeProblem, beta: f64) -> Result<Self, SmoothingError> {
        check_beta(beta)?;
        if x.len() != problem.dim() {
            return Err(SmoothingError::Dimension {
                expected: problem.dim(),
                got: x.len(),
            });
        }
        let terms = problem
            .terms
            .iter()
            .map(|t| {
                let z = t.map.apply_vec(x);
                let prox = t.term.prox_vec(&z, beta);
                let y: Vec<f64> = z.iter().zip(&prox).map(|(a, b)| (a - b) / beta).collect();
                let smoothed_value = smoothed_from_parts(&z, &prox, &y, t.term.as_ref(), beta);
                let distance = if t.kind().is_indicator() {
                    linalg::distance(&z, &prox)
                } else {
                    0.0
                };
                TermState {
                    z,
                    prox,
                    y_star: y,
                    smoothed_value,
                    distance,
                }
            })
            .collect();
        Ok(Self { beta, terms })
    }

    pub fn g_total(&self) -> f64 {
        self.terms.iter().map(|t| t.smoothed_value).sum()
    }

    /// `‖(y*₁, …, y*_J)‖`.
    pub fn dual_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| linalg::dot(&t.y_star, &t.y_star))
            .sum::<f64>()
            .sqrt()
    }

    /// Each cached `y*` agrees with `(z − prox)/β` to 1e-12.
    pub fn is_coherent(&self) -> bool {
        self.terms.iter().all(|t| {
            t.z.iter()
                .zip(&t.prox)
                .zip(&t.y_star)
                .all(|((z, p), y)| ((z - p) / self.beta - y).abs() <= 1e-12 * (1.0 + y.abs()))
        })
    }

    /// `∇F_β(x) = ∇f(x) + Σ Aⱼᵀ y*ⱼ`.
    pub fn gradient(&self, x: &[f64], problem: &CompositeProblem) -> Vec<f64> {
        let mut g = problem.smooth.gradient_vec(x);
        let mut buf = vec![0.0; x.len()];
        for (t, state) in problem.terms.iter().zip(&self.terms) {
            t.map.adjoint(&state.y_star, &mut buf);
            linalg::axpy(1.0, &buf, &mut g);
        }
        g
    }

    /// `v = β∇f(x) + Σ Aⱼᵀ(Aⱼx − prox_{βgⱼ}(Aⱼx))`.
    pub fn direction(&self, x: &[f64], problem: &CompositeProblem) -> Vec<f64> {
        let mut v = problem.smooth.gradient_vec(x);
        linalg::scale(self.beta, &mut v);
        let mut buf = vec![0.0; x.len()];
        for (t, state) in problem.terms.iter().zip(&self.terms) {
            let r = linalg::sub(&state.z, &state.prox);
            t.map.adjoint(&r, &mut buf);
            linalg::axpy(1.0, &buf, &mut v);
        }
        v
    }
}

pub fn grad_f_beta(
    x: &[f64],
    problem: &CompositeProblem,
    beta: f64,
) -> Result<Vec<f64>, SmoothingError> {
    Ok(SmoothedState::new(x, problem, beta)?.gradient(x, problem))
}

/// The scaled gradient `β∇F_β(x)` fed to the LMO. LMOs are invariant to
/// positive scaling, so this selects the same atom as `∇F_β(x)`.
pub fn lmo_direction(
    x: &[f64],
    problem: &CompositeProblem,
    beta: f64,
) -> Result<Vec<f64>, SmoothingError> {
    Ok(SmoothedState::new(x, problem, beta)?.direction(x, problem))
}

/// `F_β(x)` without forming dual points: each `g_β` is evaluated as a Moreau
/// envelope.
pub fn f_beta_value(
    x: &[f64],
    problem: &CompositeProblem,
    beta: f64,
) -> Result<f64, SmoothingError> {
    check_beta(beta)?;
    if x.len() != problem.dim() {
        return Err(SmoothingError::Dimension {
            expected: problem.dim(),
            got: x.len(),
        });
    }
    let mut total = problem.smooth.value(x);
    for t in &problem.terms {
        total += t.term.moreau_envelope(&t.map.apply_cow(x), beta);
    }
    Ok(total)
}

/// True objective, or the residual/feasibility split when an indicator is violated.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Value(f64),
    Infeasible {
        /// `f(x) + Σ` finite terms.
        finite_part: f64,
        /// `dist(Aⱼx, Kⱼ)` per term, 0 for finite terms.
        distances: Vec<f64>,
    },
}

impl Objective {
    pub fn value(&self) -> Option<f64> {
        match self {
            Objective::Value(v) => Some(*v),
            Objective::Infeasible { .. } => None,
        }
    }
}

pub fn f_value(x: &[f64], problem: &CompositeProblem) -> Objective {
    let mut finite_part = problem.smooth.value(x);
    let mut distances = Vec::with_capacity(problem.terms.len());
    let mut feasible = true;
    for t in &problem.terms {
        let z = t.map.apply_vec(x);
        if t.kind().is_indicator() {
            let d = t.term.distance(&z);
            feasible &= d <= FEASIBILITY_TOL;
            distances.push(d);
        } else {
            finite_part += t.term.value(&z);
            distances.push(0.0);
        }
    }
    if feasible {
        Objective::Value(finite_part)
    } else {
        Objective::Infeasible {
            finite_part,
            distances,
        }
    }
}

/// Signed slacks of the smoothing inequalities; each is `≥ 0` when the
/// inequality holds. `None` marks an inequality that does not apply.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingReport {
    /// `g_β(z₁) ≥ g_β(z₂) + ⟨∇g_β(z₂), z₁ − z₂⟩ + (β/2)‖y*(z₂) − y*(z₁)‖²`
    pub strong_lower_model: f64,
    /// `g(z₁) ≥ g_β(z₂) + ⟨∇g_β(z₂), z₁ − z₂⟩ + (β/2)‖y*(z₂)‖²`; for indicators
    /// only when `z₁ ∈ K`.
    pub true_lower_model: Option<f64>,
    /// `g_β(z₁) ≤ g_γ(z₁) + ((γ − β)/2)‖y*_β(z₁)‖²`
    pub parameter_change: f64,
    /// `g_β(z₁) ≤ g(z₁)`, finite terms only.
    pub sandwich_lower: Option<f64>,
    /// `g(z₁) ≤ g_β(z₁) + (β/2)L_g²`, finite terms only.
    pub sandwich_upper: Option<f64>,
}

impl SmoothingReport {
    pub fn worst(&self) -> f64 {
        [
            Some(self.strong_lower_model),
            self.true_lower_model,
            Some(self.parameter_change),
            self.sandwich_lower,
            self.sandwich_upper,
        ]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min)
    }
}

pub fn verify_smoothing_properties(
    term: &dyn NonsmoothTerm,
    beta: f64,
    gamma: f64,
    z1: &[f64],
    z2: &[f64],
) -> Result<SmoothingReport, SmoothingError> {
    check_beta(beta)?;
    check_beta(gamma)?;
    let gb1 = g_beta_value(z1, term, beta)?;
    let gb2 = g_beta_value(z2, term, beta)?;
    let gg1 = g_beta_value(z1, term, gamma)?;
    let y1 = y_star(z1, term, beta)?;
    let y2 = y_star(z2, term, beta)?;
    let diff = linalg::sub(z1, z2);
    let linear = gb2 + linalg::dot(&y2, &diff);
    let dy = linalg::sub(&y2, &y1);

    let strong_lower_model = gb1 - (linear + 0.5 * beta * linalg::dot(&dy, &dy));
    let parameter_change = gg1 + 0.5 * (gamma - beta) * linalg::dot(&y1, &y1) - gb1;

    let (g1, lipschitz) = match term.kind() {
        TermKind::Indicator => {
            let inside = term.distance(z1) <= FEASIBILITY_TOL;
            (if inside { Some(0.0) } else { None }, None)
        }
        TermKind::Lipschitz { constant } => (Some(term.value(z1)), Some(constant)),
    };
    let true_lower_model = g1.map(|g| g - (linear + 0.5 * beta * linalg::dot(&y2, &y2)));
    let sandwich_lower = lipschitz.and(g1).map(|g| g - gb1);
    let sandwich_upper = lipschitz.zip(g1).map(|(l, g)| gb1 + 0.5 * beta * l * l - g);

    Ok(SmoothingReport {
        strong_lower_model,
        true_lower_model,
        parameter_change,
        sandwich_lower,
        sandwich_upper,
    })
}
