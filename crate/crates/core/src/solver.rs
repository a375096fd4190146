//! The homotopy conditional gradient loop.
//!
//! At iteration `k` the solver forms `v_k = β_k∇f(x_k) + Σⱼ Aⱼᵀ(Aⱼx_k − prox_{β_k gⱼ}(Aⱼx_k))`,
//! calls the (possibly inexact) LMO and moves `x_{k+1} = x_k + η_k(s̃_k − x_k)`.
//!
//! Record `k` of the trace describes `x_{k+1}`, the point produced by
//! iteration `k`, with its smoothed quantities evaluated at `β_k`.

use std::ops::ControlFlow;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::oracles::Domain;
use crate::problem::{CompositeProblem, ProblemError};
use crate::smoothing::{self, Objective, SmoothedState, SmoothingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid problem: {0}")]
    Problem(#[from] ProblemError),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepVariant {
    #[default]
    Fixed,
    LineSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AdditiveStrategy {
    /// Reuse the previous atom whenever it meets the budget.
    #[default]
    Lazy,
    /// Perturb the exact atom toward the worst atom, spending most of the budget.
    Adversarial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleMode {
    #[default]
    Exact,
    Additive {
        delta: f64,
        #[serde(default)]
        strategy: AdditiveStrategy,
    },
    /// Uses the modified schedule `η_k = 2/(δ(k−1)+2)`, `β_k = β₀/√(δk+1)`.
    Multiplicative { delta: f64 },
}

impl OracleMode {
    /// Additive `δ`, or 0 for the other modes.
    pub fn additive_delta(&self) -> f64 {
        match self {
            OracleMode::Additive { delta, .. } => *delta,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub beta0: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub step: StepVariant,
    #[serde(default)]
    pub oracle: OracleMode,
    #[serde(default)]
    pub seed: u64,
    /// Record every `trace_every`-th iteration; the first and last are always kept.
    #[serde(default = "one")]
    pub trace_every: usize,
    /// Fill `elapsed_ms`; off by default so traces stay reproducible.
    #[serde(skip)]
    pub wall_clock: bool,
}

fn one() -> usize {
    1
}

impl SolverConfig {
    pub fn new(beta0: f64, max_iter: usize) -> Self {
        Self {
            beta0,
            max_iter,
            step: StepVariant::Fixed,
            oracle: OracleMode::Exact,
            seed: 0,
            trace_every: 1,
            wall_clock: false,
        }
    }

    pub fn with_oracle(mut self, oracle: OracleMode) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn with_step(mut self, step: StepVariant) -> Self {
        self.step = step;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trace_every(mut self, every: usize) -> Self {
        self.trace_every = every;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.beta0 > 0.0 && self.beta0.is_finite()) {
            return Err(SolveError::Config(format!(
                "beta0 must be positive, got {}",
                self.beta0
            )));
        }
        if self.trace_every == 0 {
            return Err(SolveError::Config("trace_every must be at least 1".into()));
        }
        match self.oracle {
            OracleMode::Exact => {}
            OracleMode::Additive { delta, .. } => {
                if !(delta >= 0.0 && delta.is_finite()) {
                    return Err(SolveError::Config(format!(
                        "additive delta must be >= 0, got {delta}"
                    )));
                }
            }
            OracleMode::Multiplicative { delta } => {
                if !(delta > 0.0 && delta <= 1.0) {
                    return Err(SolveError::Config(format!(
                        "multiplicative delta must lie in (0, 1], got {delta}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(η_k, β_k)` for this configuration's oracle mode.
    pub fn schedule(&self, k: usize) -> (f64, f64) {
        match self.oracle {
            OracleMode::Multiplicative { delta } => step_schedule_mult(k, self.beta0, delta),
            _ => step_schedule(k, self.beta0),
        }
    }
}

/// `η_k = 2/(k+1)`, `β_k = β₀/√(k+1)`, for `k ≥ 1`.
pub fn step_schedule(k: usize, beta0: f64) -> (f64, f64) {
    debug_assert!(k >= 1);
    let kp1 = (k + 1) as f64;
    (2.0 / kp1, beta0 / kp1.sqrt())
}

/// `η_k = 2/(δ(k−1)+2)`, `β_k = β₀/√(δk+1)`.
pub fn step_schedule_mult(k: usize, beta0: f64, delta: f64) -> (f64, f64) {
    debug_assert!(k >= 1);
    let k = k as f64;
    (
        2.0 / (delta * (k - 1.0) + 2.0),
        beta0 / (delta * k + 1.0).sqrt(),
    )
}

/// One row of the trace; describes the iterate produced by iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub eta: f64,
    pub beta: f64,
    pub f_value: f64,
    pub g_smoothed_total: f64,
    pub f_beta: f64,
    /// `F(x)`, or NaN when an indicator term is violated.
    pub f_or_nan: f64,
    /// `dist(Aⱼx, Kⱼ)` per term; 0 for finite terms.
    pub feas_gaps: Vec<f64>,
    pub lmo_inner_iters: usize,
    /// Milliseconds since the solve started; NaN unless wall-clock timing is on.
    pub elapsed_ms: f64,
}

impl IterationRecord {
    /// `√Σⱼ dist(Aⱼx, Kⱼ)²`.
    pub fn total_feas_gap(&self) -> f64 {
        self.feas_gaps.iter().map(|d| d * d).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Budget,
    UserStop,
    NonFinite { k: usize },
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    pub iterations: usize,
    /// `‖(y*₁, …, y*_J)‖` at the final iterate and final `β`.
    pub final_dual_norm: f64,
    /// Iterations whose inexact atom broke its contract (should stay 0).
    pub oracle_violations: usize,
    /// Iterations whose inner eigen/singular solver reported non-convergence.
    pub lmo_unconverged: usize,
}

/// Problem constants the additive budget depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConstants {
    pub diameter: f64,
    pub smooth_lipschitz: f64,
    pub map_norm: f64,
}

impl StepConstants {
    pub fn of(problem: &CompositeProblem) -> Self {
        Self {
            diameter: problem.domain.diameter(),
            smooth_lipschitz: problem.smooth.lipschitz(),
            map_norm: problem.stacked_map_norm(),
        }
    }

    /// Additive slack `δ(η/2)D²(L_f + ‖A‖²/β)` expressed in `∇F_β` units.
    pub fn additive_budget(&self, delta: f64, eta: f64, beta: f64) -> f64 {
        delta
            * 0.5
            * eta
            * self.diameter.powi(2)
            * (self.smooth_lipschitz + self.map_norm.powi(2) / beta)
    }
}

/// Atom picked by an oracle plus inner-solver accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleAtom {
    pub atom: Vec<f64>,
    pub inner_iterations: usize,
    pub converged: bool,
}

/// `s̃` with `⟨v, s̃⟩ ≤ ⟨v, s⟩ + budget` for the exact atom `s`.
///
/// `budget` is in the units of `v`. `previous` feeds the lazy strategy.
pub fn inexact_additive_oracle(
    v: &[f64],
    budget: f64,
    domain: &dyn Domain,
    strategy: AdditiveStrategy,
    previous: Option<&[f64]>,
    seed: u64,
) -> OracleAtom {
    let exact = domain.lmo(v, seed);
    let mut inner = exact.inner_iterations;
    let mut converged = exact.converged;
    let s = exact.atom;
    if budget <= 0.0 {
        return OracleAtom {
            atom: s,
            inner_iterations: inner,
            converged,
        };
    }
    let best = linalg::dot(v, &s);
    let atom = match strategy {
        AdditiveStrategy::Lazy => match previous {
            Some(p) if linalg::dot(v, p) <= best + budget => p.to_vec(),
            _ => s,
        },
        AdditiveStrategy::Adversarial => {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let worst = domain.lmo(&neg, seed.wrapping_add(1));
            inner += worst.inner_iterations;
            converged &= worst.converged;
            let spread = linalg::dot(v, &worst.atom) - best;
            if spread <= 0.0 {
                s
            } else {
                let t = (0.95 * budget / spread).min(1.0);
                s.iter()
                    .zip(&worst.atom)
                    .map(|(a, b)| a + t * (b - a))
                    .collect()
            }
        }
    };
    OracleAtom {
        atom,
        inner_iterations: inner,
        converged,
    }
}

/// `s̃ = x + δ(s − x)`, which meets `⟨v, s̃ − x⟩ ≤ δ⟨v, s − x⟩` with equality.
///
/// When the exact atom does not improve on `x` the point `x` itself is returned.
pub fn inexact_multiplicative_oracle(
    v: &[f64],
    x: &[f64],
    delta: f64,
    domain: &dyn Domain,
    seed: u64,
) -> OracleAtom {
    let exact = domain.lmo(v, seed);
    let d = linalg::sub(&exact.atom, x);
    let atom = if linalg::dot(v, &d) >= 0.0 {
        x.to_vec()
    } else {
        x.iter().zip(&d).map(|(xi, di)| xi + delta * di).collect()
    };
    OracleAtom {
        atom,
        inner_iterations: exact.inner_iterations,
        converged: exact.converged,
    }
}

/// Golden-section minimization of `η ↦ F_β(x + η(s − x))` on `[0, 1]`.
///
/// The interior candidate is compared against both endpoints, so a monotone
/// profile returns the better endpoint exactly.
pub fn line_search_eta(
    x: &[f64],
    s: &[f64],
    problem: &CompositeProblem,
    beta: f64,
) -> Result<f64, SmoothingError> {
    let d = linalg::sub(s, x);
    if linalg::norm(&d) == 0.0 {
        return Ok(0.0);
    }
    let mut point = vec![0.0; x.len()];
    let mut phi = |eta: f64| -> Result<f64, SmoothingError> {
        point.copy_from_slice(x);
        linalg::axpy(eta, &d, &mut point);
        smoothing::f_beta_value(&point, problem, beta)
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - ratio * (b - a);
    let mut e = a + ratio * (b - a);
    let mut fc = phi(c)?;
    let mut fe = phi(e)?;
    for _ in 0..60 {
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - ratio * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + ratio * (b - a);
            fe = phi(e)?;
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = (mid, phi(mid)?);
    for cand in [0.0, 1.0] {
        let val = phi(cand)?;
        if val < best.1 {
            best = (cand, val);
        }
    }
    Ok(best.0)
}

/// Outcome of a single iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub x_next: Vec<f64>,
    pub atom: Vec<f64>,
    pub eta: f64,
    pub inner_iterations: usize,
    pub converged: bool,
    /// Whether the returned atom satisfied its oracle contract.
    pub contract_ok: bool,
}

/// Per-solve state threaded through [`hcgm_step`].
pub struct StepContext {
    pub constants: StepConstants,
    pub step: StepVariant,
    pub previous_atom: Option<Vec<f64>>,
    rng: ChaCha8Rng,
}

impl StepContext {
    pub fn new(problem: &CompositeProblem, step: StepVariant, seed: u64) -> Self {
        Self {
            constants: StepConstants::of(problem),
            step,
            previous_atom: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

/// One iteration from `x_k` with the given `η_k`, `β_k`.
pub fn hcgm_step(
    x: &[f64],
    problem: &CompositeProblem,
    eta: f64,
    beta: f64,
    oracle: OracleMode,
    ctx: &mut StepContext,
) -> Result<StepOutput, SmoothingError> {
    let state = SmoothedState::new(x, problem, beta)?;
    let v = state.direction(x, problem);
    let seed = ctx.rng.next_u64();
    let domain = problem.domain.as_ref();
    let (picked, contract_ok) = match oracle {
        OracleMode::Exact => {
            let out = domain.lmo(&v, seed);
            (
                OracleAtom {
                    atom: out.atom,
                    inner_iterations: out.inner_iterations,
                    converged: out.converged,
                },
                true,
            )
        }
        OracleMode::Additive { delta, strategy } => {
            // v = β∇F_β, so the ∇F_β-scale budget is multiplied by β
            let budget = beta * ctx.constants.additive_budget(delta, eta, beta);
            let picked = inexact_additive_oracle(
                &v,
                budget,
                domain,
                strategy,
                ctx.previous_atom.as_deref(),
                seed,
            );
            let exact = domain.lmo(&v, seed).atom;
            let excess = linalg::dot(&v, &picked.atom) - linalg::dot(&v, &exact);
            let ok = excess <= budget + 1e-12 * (1.0 + budget.abs());
            (picked, ok)
        }
        OracleMode::Multiplicative { delta } => {
            let picked = inexact_multiplicative_oracle(&v, x, delta, domain, seed);
            let exact = domain.lmo(&v, seed).atom;
            let lhs = linalg::dot(&v, &linalg::sub(&picked.atom, x));
            let rhs = delta * linalg::dot(&v, &linalg::sub(&exact, x));
            let ok = lhs <= rhs + 1e-12 * (1.0 + rhs.abs());
            (picked, ok)
        }
    };
    let eta = match ctx.step {
        StepVariant::Fixed => eta,
        StepVariant::LineSearch => line_search_eta(x, &picked.atom, problem, beta)?,
    };
    let x_next: Vec<f64> = x
        .iter()
        .zip(&picked.atom)
        .map(|(xi, si)| xi + eta * (si - xi))
        .collect();
    Ok(StepOutput {
        x_next,
        atom: picked.atom,
        eta,
        inner_iterations: picked.inner_iterations,
        converged: picked.converged,
        contract_ok,
    })
}

fn record_for(
    k: usize,
    eta: f64,
    x: &[f64],
    problem: &CompositeProblem,
    state: &SmoothedState,
    inner: usize,
    elapsed_ms: f64,
) -> IterationRecord {
    let f_value = problem.smooth.value(x);
    let g_smoothed_total = state.g_total();
    let (f_or_nan, feas_gaps) = match smoothing::f_value(x, problem) {
        Objective::Value(v) => (v, state.terms.iter().map(|t| t.distance).collect()),
        Objective::Infeasible { distances, .. } => (f64::NAN, distances),
    };
    IterationRecord {
        k,
        eta,
        beta: state.beta,
        f_value,
        g_smoothed_total,
        f_beta: f_value + g_smoothed_total,
        f_or_nan,
        feas_gaps,
        lmo_inner_iters: inner,
        elapsed_ms,
    }
}

pub fn solve(problem: &CompositeProblem, config: &SolverConfig) -> Result<SolveResult, SolveError> {
    solve_with(problem, config, |_| ControlFlow::Continue(()))
}

/// [`solve`] with a callback on every recorded row; `Break` stops the run.
pub fn solve_with<F>(
    problem: &CompositeProblem,
    config: &SolverConfig,
    mut observe: F,
) -> Result<SolveResult, SolveError>
where
    F: FnMut(&IterationRecord) -> ControlFlow<()>,
{
    config.validate()?;
    problem.validate()?;
    let started = Instant::now();
    let mut ctx = StepContext::new(problem, config.step, config.seed);
    let mut x = problem.start_point();
    let mut trace = Vec::new();
    let mut termination = Termination::Budget;
    let mut oracle_violations = 0;
    let mut lmo_unconverged = 0;
    let mut last_beta = config.beta0;
    let mut iterations = 0;

    for k in 1..=config.max_iter {
        let (eta, beta) = config.schedule(k);
        let out = hcgm_step(&x, problem, eta, beta, config.oracle, &mut ctx)?;
        if !out.contract_ok {
            oracle_violations += 1;
        }
        if !out.converged {
            lmo_unconverged += 1;
        }
        ctx.previous_atom = Some(out.atom);
        x = out.x_next;
        last_beta = beta;
        iterations = k;

        let keep = k == 1 || k == config.max_iter || k % config.trace_every == 0;
        let finite = linalg::all_finite(&x);
        if !(keep || !finite) {
            continue;
        }
        let state = SmoothedState::new(&x, problem, beta)?;
        let elapsed = if config.wall_clock {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            f64::NAN
        };
        let rec = record_for(
            k,
            out.eta,
            &x,
            problem,
            &state,
            out.inner_iterations,
            elapsed,
        );
        let bad = !finite || !rec.f_beta.is_finite();
        let flow = observe(&rec);
        trace.push(rec);
        if bad {
            log::error!("non-finite smoothed objective at iteration {k}");
            termination = Termination::NonFinite { k };
            break;
        }
        if flow.is_break() {
            termination = Termination::UserStop;
            break;
        }
    }

    let final_dual_norm = if linalg::all_finite(&x) {
        SmoothedState::new(&x, problem, last_beta)?.dual_norm()
    } else {
        f64::NAN
    };
    if lmo_unconverged > 0 {
        log::warn!("{lmo_unconverged} LMO calls did not reach their tolerance");
    }
    Ok(SolveResult {
        x,
        trace,
        termination,
        iterations,
        final_dual_norm,
        oracle_violations,
        lmo_unconverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::oracles::{BoxDomain, EuclideanBall, IdentityMap, L1Ball, MaxTerm, Simplex};
    use crate::problem::{PenaltyTerm, QuadraticFunction, ZeroFunction};
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn schedule_examples() {
        let (eta, beta) = step_schedule(1, 1.0);
        assert_eq!(eta, 1.0);
        assert!((beta - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(step_schedule(3, 4.0), (0.5, 2.0));
        let (eta, beta) = step_schedule_mult(1, 1.0, 0.5);
        assert_eq!(eta, 1.0);
        assert!((beta - 1.0 / 1.5f64.sqrt()).abs() < 1e-15);
        let (eta, beta) = step_schedule_mult(3, 1.0, 0.5);
        assert!((eta - 2.0 / 3.0).abs() < 1e-15);
        assert!((beta - 1.0 / 2.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn schedules_are_monotone_and_agree_at_unit_delta() {
        let mut prev = step_schedule(1, 3.0);
        for k in 2..=1_000_000 {
            let cur = step_schedule(k, 3.0);
            assert!(cur.0 < prev.0 && cur.1 < prev.1);
            if k % 997 == 0 {
                assert_eq!(step_schedule_mult(k, 3.0, 1.0), cur);
            }
            prev = cur;
        }
    }

    fn counterexample() -> CompositeProblem {
        CompositeProblem::new(
            Box::new(ZeroFunction::new(2)),
            Box::new(EuclideanBall::new(2, 1.0)),
        )
        .with_term(PenaltyTerm::new(
            "max",
            Box::new(IdentityMap::new(2)),
            Box::new(MaxTerm::new(2)),
        ))
        .with_start(vec![1.0, 0.0])
    }

    #[test]
    fn unit_step_lands_on_atom() {
        let p = counterexample();
        let mut ctx = StepContext::new(&p, StepVariant::Fixed, 0);
        let out = hcgm_step(&[0.3, 0.2], &p, 1.0, 0.5, OracleMode::Exact, &mut ctx).unwrap();
        assert_eq!(out.x_next, out.atom);
    }

    #[test]
    fn first_step_from_corner_matches_hand_evaluation() {
        // β₁ = 4/√2; v₁ = x − prox_{β₁ max}(x) = β₁ proj_Δ(x/β₁) with x = [1, 0]
        let p = counterexample();
        let beta = 4.0 / 2f64.sqrt();
        let v = smoothing::lmo_direction(&[1.0, 0.0], &p, beta).unwrap();
        // x/β₁ = [0.3536, 0]; the projection splits the excess: [0.6768, 0.3232]
        let t = 1.0 / beta;
        let expected = [beta * (0.5 + t / 2.0), beta * (0.5 - t / 2.0)];
        assert!(linalg::distance(&v, &expected) < 1e-12);
        let mut ctx = StepContext::new(&p, StepVariant::Fixed, 0);
        let out = hcgm_step(&[1.0, 0.0], &p, 1.0, beta, OracleMode::Exact, &mut ctx).unwrap();
        let nv = linalg::norm(&expected);
        assert!(linalg::distance(&out.x_next, &[-expected[0] / nv, -expected[1] / nv]) < 1e-12);
    }

    #[test]
    fn zero_direction_keeps_feasibility() {
        let p = CompositeProblem::new(
            Box::new(ZeroFunction::new(3)),
            Box::new(L1Ball::new(3, 2.0)),
        );
        let cfg = SolverConfig::new(1.0, 5);
        let res = solve(&p, &cfg).unwrap();
        assert!(p.domain.contains(&res.x, 1e-12));
    }

    #[test]
    fn zero_budget_gives_empty_trace() {
        let p = counterexample();
        let res = solve(&p, &SolverConfig::new(4.0, 0)).unwrap();
        assert_eq!(res.x, vec![1.0, 0.0]);
        assert!(res.trace.is_empty());
        assert_eq!(res.termination, Termination::Budget);
    }

    fn quadratic_on_box() -> (CompositeProblem, DenseMatrix, Vec<f64>) {
        let h = DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let c = vec![-1.0, -0.5];
        let p = CompositeProblem::new(
            Box::new(QuadraticFunction::new(h.clone(), c.clone(), 0.0)),
            Box::new(BoxDomain::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap()),
        );
        (p, h, c)
    }

    #[test]
    fn line_search_matches_quadratic_closed_form() {
        let (p, h, c) = quadratic_on_box();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
            let d = linalg::sub(&s, &x);
            let mut grad = h.matvec(&x);
            linalg::axpy(1.0, &c, &mut grad);
            let curv = linalg::dot(&d, &h.matvec(&d));
            let closed = (-linalg::dot(&grad, &d) / curv).clamp(0.0, 1.0);
            let eta = line_search_eta(&x, &s, &p, 1.0).unwrap();
            assert!((eta - closed).abs() < 1e-6, "{eta} vs {closed}");
        }
    }

    #[test]
    fn line_search_beats_grid() {
        let p = counterexample();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let x = p.domain.random_point(&mut rng);
            let s = p.domain.random_point(&mut rng);
            let beta = rng.random_range(0.05..2.0);
            let eta = line_search_eta(&x, &s, &p, beta).unwrap();
            let at = |t: f64| {
                let mut y = x.clone();
                linalg::axpy(t, &linalg::sub(&s, &x), &mut y);
                smoothing::f_beta_value(&y, &p, beta).unwrap()
            };
            let best = at(eta);
            for i in 0..=1000 {
                assert!(best <= at(i as f64 * 1e-3) + 1e-10);
            }
        }
    }

    #[test]
    fn line_search_never_increases_smoothed_objective() {
        let p = counterexample();
        let mut ctx = StepContext::new(&p, StepVariant::LineSearch, 1);
        let mut x = vec![1.0, 0.0];
        for k in 1..200 {
            let (eta, beta) = step_schedule(k, 4.0);
            let before = smoothing::f_beta_value(&x, &p, beta).unwrap();
            let out = hcgm_step(&x, &p, eta, beta, OracleMode::Exact, &mut ctx).unwrap();
            let after = smoothing::f_beta_value(&out.x_next, &p, beta).unwrap();
            assert!(after <= before + 1e-12);
            x = out.x_next;
        }
    }

    #[test]
    fn additive_oracle_respects_budget() {
        let domain = Simplex::new(4);
        let v = [0.3, -0.2, 0.9, 0.1];
        let exact = domain.lmo(&v, 0).atom;
        for strategy in [AdditiveStrategy::Lazy, AdditiveStrategy::Adversarial] {
            let out = inexact_additive_oracle(&v, 0.0, &domain, strategy, None, 0);
            assert_eq!(out.atom, exact);
        }
        let budget = 0.4;
        let out =
            inexact_additive_oracle(&v, budget, &domain, AdditiveStrategy::Adversarial, None, 0);
        let used = linalg::dot(&v, &out.atom) - linalg::dot(&v, &exact);
        assert!(used <= budget && used >= 0.9 * budget);
        assert!(domain.contains(&out.atom, 1e-12));
        // lazy keeps a good-enough previous atom and drops a bad one
        let good = [0.0, 0.0, 0.0, 1.0];
        let out =
            inexact_additive_oracle(&v, budget, &domain, AdditiveStrategy::Lazy, Some(&good), 0);
        assert_eq!(out.atom, good.to_vec());
        let bad = [0.0, 0.0, 1.0, 0.0];
        let out =
            inexact_additive_oracle(&v, budget, &domain, AdditiveStrategy::Lazy, Some(&bad), 0);
        assert_eq!(out.atom, exact);
    }

    #[test]
    fn multiplicative_oracle_is_tight() {
        let domain = EuclideanBall::new(3, 1.0);
        let v = [1.0, -2.0, 0.5];
        let x = [0.1, 0.2, -0.3];
        let exact = domain.lmo(&v, 0).atom;
        let full = linalg::dot(&v, &linalg::sub(&exact, &x));
        let out = inexact_multiplicative_oracle(&v, &x, 1.0, &domain, 0);
        assert!(linalg::distance(&out.atom, &exact) < 1e-15);
        let out = inexact_multiplicative_oracle(&v, &x, 0.5, &domain, 0);
        let got = linalg::dot(&v, &linalg::sub(&out.atom, &x));
        assert!(got <= 0.5 * full + 1e-12 && got >= 1.05 * 0.5 * full);
        // no improvement available: x itself
        let at_atom = inexact_multiplicative_oracle(&v, &exact, 0.3, &domain, 0);
        assert_eq!(at_atom.atom, exact);
    }

    #[test]
    fn traces_are_deterministic() {
        let p = counterexample();
        let cfg = SolverConfig::new(4.0, 300)
            .with_oracle(OracleMode::Additive {
                delta: 1.0,
                strategy: AdditiveStrategy::Adversarial,
            })
            .with_seed(9);
        let a = solve(&p, &cfg).unwrap();
        let b = solve(&p, &cfg).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert_eq!(ra.f_beta.to_bits(), rb.f_beta.to_bits());
        }
        assert_eq!(a.oracle_violations, 0);
    }

    #[test]
    fn trace_every_thins_records() {
        let p = counterexample();
        let res = solve(&p, &SolverConfig::new(4.0, 100).with_trace_every(25)).unwrap();
        let ks: Vec<usize> = res.trace.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![1, 25, 50, 75, 100]);
        assert!(res.trace.iter().all(|r| r.elapsed_ms.is_nan()));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.0, 1).validate().is_err());
        let bad = SolverConfig::new(1.0, 1).with_oracle(OracleMode::Multiplicative { delta: 1.5 });
        assert!(bad.validate().is_err());
        let bad = SolverConfig::new(1.0, 1).with_trace_every(0);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn dimension_mismatch_fails_fast() {
        let p = CompositeProblem::new(
            Box::new(ZeroFunction::new(3)),
            Box::new(EuclideanBall::new(2, 1.0)),
        );
        assert!(matches!(
            solve(&p, &SolverConfig::new(1.0, 1)),
            Err(SolveError::Problem(_))
        ));
    }

    #[test]
    fn user_stop() {
        let p = counterexample();
        let res = solve_with(&p, &SolverConfig::new(4.0, 100), |r| {
            if r.k >= 10 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .unwrap();
        assert_eq!(res.termination, Termination::UserStop);
        assert_eq!(res.trace.len(), 10);
    }

    fn oracle_strategy() -> impl Strategy<Value = OracleMode> {
        prop_oneof![
            Just(OracleMode::Exact),
            (0.0..2.0f64).prop_map(|delta| OracleMode::Additive {
                delta,
                strategy: AdditiveStrategy::Adversarial,
            }),
            (0.05..=1.0f64).prop_map(|delta| OracleMode::Multiplicative { delta }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn trace_invariants_hold(
            beta0 in 0.1..10.0f64,
            seed in 0u64..1000,
            oracle in oracle_strategy(),
            line_search in any::<bool>(),
        ) {
            let step = if line_search { StepVariant::LineSearch } else { StepVariant::Fixed };
            let cfg = SolverConfig::new(beta0, 60)
                .with_seed(seed)
                .with_oracle(oracle)
                .with_step(step);
            let problem = counterexample();
            let res = solve(&problem, &cfg).unwrap();
            prop_assert_eq!(res.trace.len(), 60);
            prop_assert_eq!(res.oracle_violations, 0);
            let mut prev_beta = f64::INFINITY;
            for r in &res.trace {
                // Line search may stay put; the fixed schedule always moves.
                prop_assert!(r.eta <= 1.0 && (r.eta > 0.0 || (line_search && r.eta == 0.0)));
                prop_assert!(r.beta > 0.0 && r.beta <= prev_beta);
                prop_assert!(r.feas_gaps.iter().all(|&g| g >= 0.0));
                prev_beta = r.beta;
            }
            prop_assert!(problem.domain.contains(&res.x, 1e-9));
        }
    }
}
