//! Right-hand sides of the convergence guarantees and trace checks against them.
//!
//! Three guarantees are covered, each under the exact oracle, the additive
//! oracle (factor `1 + δ`) and the multiplicative oracle (modified schedule):
//!
//! * smoothed gap `F_{β_k}(x_{k+1}) − F*`,
//! * objective residual `F(x_k) − F*` for Lipschitz penalties,
//! * objective residual and feasibility gap `dist(Ax_k, K)` for indicator penalties.

use thiserror::Error;

use crate::problem::CompositeProblem;
use crate::smoothing::{self, Objective};
use crate::solver::{IterationRecord, OracleMode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("bound needs {0}, which was not supplied")]
    Missing(&'static str),
    #[error("iteration index must be at least 1")]
    ZeroIndex,
    #[error("rate fit needs at least two positive points, got {0}")]
    TooFewPoints(usize),
}

/// Which oracle the guarantee is stated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    Exact,
    Additive { delta: f64 },
    Multiplicative { delta: f64 },
}

impl From<OracleMode> for BoundMode {
    fn from(mode: OracleMode) -> Self {
        match mode {
            OracleMode::Exact => BoundMode::Exact,
            OracleMode::Additive { delta, .. } => BoundMode::Additive { delta },
            OracleMode::Multiplicative { delta } => BoundMode::Multiplicative { delta },
        }
    }
}

/// How the penalty terms enter the guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermClass {
    /// Every term is Lipschitz (includes the no-term case).
    Lipschitz,
    /// Every term is an indicator.
    Indicator,
    Mixed,
}

/// Constants the guarantees are stated in.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub diameter: f64,
    pub smooth_lipschitz: f64,
    pub map_norm: f64,
    pub penalty_lipschitz: Option<f64>,
    pub beta0: f64,
    pub class: TermClass,
    /// `‖y*‖` of a dual solution.
    pub dual_norm: Option<f64>,
    /// `F*` (or `f*` for indicator penalties).
    pub optimum: Option<f64>,
    /// `E = F(x₁) − F*`.
    pub initial_excess: Option<f64>,
}

impl BoundInputs {
    pub fn from_problem(problem: &CompositeProblem, beta0: f64) -> Self {
        let class = if problem.all_lipschitz() {
            TermClass::Lipschitz
        } else if problem.all_indicators() {
            TermClass::Indicator
        } else {
            TermClass::Mixed
        };
        Self {
            diameter: problem.domain.diameter(),
            smooth_lipschitz: problem.smooth.lipschitz(),
            map_norm: problem.stacked_map_norm(),
            penalty_lipschitz: problem.penalty_lipschitz(),
            beta0,
            class,
            dual_norm: None,
            optimum: None,
            initial_excess: None,
        }
    }

    /// `C₀ = L_f + ‖A‖²/β₀`.
    pub fn c0(&self) -> f64 {
        self.smooth_lipschitz + self.map_norm.powi(2) / self.beta0
    }

    fn excess(&self) -> Result<f64, BoundError> {
        self.initial_excess
            .ok_or(BoundError::Missing("initial excess E"))
    }

    fn dual(&self) -> Result<f64, BoundError> {
        self.dual_norm.ok_or(BoundError::Missing("dual norm"))
    }

    fn lg(&self) -> Result<f64, BoundError> {
        self.penalty_lipschitz
            .ok_or(BoundError::Missing("penalty Lipschitz constant"))
    }
}

fn check_k(k: usize) -> Result<f64, BoundError> {
    if k == 0 {
        Err(BoundError::ZeroIndex)
    } else {
        Ok(k as f64)
    }
}

/// `2D²(L_f/k + ‖A‖²/(β₀√k))`, the common core of the exact-schedule bounds.
fn core(inp: &BoundInputs, t: f64) -> f64 {
    2.0 * inp.diameter.powi(2)
        * (inp.smooth_lipschitz / t + inp.map_norm.powi(2) / (inp.beta0 * t.sqrt()))
}

/// `(2/δ)((D²L_f + δE)/s + D²‖A‖²/(β₀√s))` for the multiplicative schedule.
fn core_mult(inp: &BoundInputs, delta: f64, s: f64) -> Result<f64, BoundError> {
    let d2 = inp.diameter.powi(2);
    let e = inp.excess()?;
    Ok(2.0 / delta
        * ((d2 * inp.smooth_lipschitz + delta * e) / s
            + d2 * inp.map_norm.powi(2) / (inp.beta0 * s.sqrt())))
}

/// Bound on `F_{β_k}(x_{k+1}) − F*`.
pub fn smoothed_gap_bound(k: usize, inp: &BoundInputs, mode: BoundMode) -> Result<f64, BoundError> {
    let k = check_k(k)?;
    match mode {
        BoundMode::Exact => Ok(core(inp, k + 1.0)),
        BoundMode::Additive { delta } => Ok(core(inp, k + 1.0) * (1.0 + delta)),
        BoundMode::Multiplicative { delta } => core_mult(inp, delta, delta * k + 2.0),
    }
}

/// Bound on `F(x_k) − F*` when every penalty is Lipschitz.
pub fn lipschitz_objective_bound(
    k: usize,
    inp: &BoundInputs,
    mode: BoundMode,
) -> Result<f64, BoundError> {
    let k = check_k(k)?;
    let lg = inp.lg()?;
    match mode {
        BoundMode::Exact => Ok(core(inp, k) + inp.beta0 * lg * lg / (2.0 * k.sqrt())),
        BoundMode::Additive { delta } => {
            Ok(core(inp, k) * (1.0 + delta) + inp.beta0 * lg * lg / (2.0 * k.sqrt()))
        }
        BoundMode::Multiplicative { delta } => {
            let s = delta * k + 1.0;
            Ok(core_mult(inp, delta, s)? + inp.beta0 * lg * lg / (2.0 * s.sqrt()))
        }
    }
}

/// `β₀ = 2D‖A‖/L_g`, minimizing the exact Lipschitz bound when `L_f = 0`.
pub fn optimal_beta0_lipschitz(diameter: f64, map_norm: f64, penalty_lipschitz: f64) -> f64 {
    2.0 * diameter * map_norm / penalty_lipschitz
}

/// Numerical minimizer of the Lipschitz objective bound at iteration `k` over
/// `β₀ ∈ [lo, hi]`, by golden-section search on `log β₀`.
pub fn optimal_beta0_numeric(
    k: usize,
    inp: &BoundInputs,
    mode: BoundMode,
    lo: f64,
    hi: f64,
) -> Result<f64, BoundError> {
    let eval = |log_b: f64| -> Result<f64, BoundError> {
        let trial = BoundInputs {
            beta0: log_b.exp(),
            ..inp.clone()
        };
        lipschitz_objective_bound(k, &trial, mode)
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..100 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = eval(d)?;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// The three indicator-penalty guarantees at iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorBounds {
    /// `−‖y*‖ dist(Ax_k, K)`, a lower bound on `f(x_k) − f*`.
    pub objective_lower: f64,
    /// Upper bound on `f(x_k) − f*`.
    pub objective_upper: f64,
    /// Upper bound on `dist(Ax_k, K)`.
    pub feasibility: f64,
}

/// Indicator guarantees at iteration `k`; `distance` is the observed
/// `dist(Ax_k, K)` entering the lower objective bound.
pub fn indicator_bounds(
    k: usize,
    inp: &BoundInputs,
    mode: BoundMode,
    distance: f64,
) -> Result<IndicatorBounds, BoundError> {
    let kf = check_k(k)?;
    let y = inp.dual()?;
    let b0 = inp.beta0;
    let d = inp.diameter;
    let c0 = inp.c0();
    let (objective_upper, feasibility) = match mode {
        BoundMode::Exact => (
            core(inp, kf),
            2.0 * b0 / kf.sqrt() * (y + d * (c0 / b0).sqrt()),
        ),
        BoundMode::Additive { delta } => (
            core(inp, kf) * (1.0 + delta),
            2.0 * b0 / kf.sqrt() * (y + d * (c0 * (1.0 + delta) / b0).sqrt()),
        ),
        BoundMode::Multiplicative { delta } => {
            let s = delta * kf + 1.0;
            let e = inp.excess()?;
            (
                core_mult(inp, delta, s)?,
                2.0 * b0 / s.sqrt() * (y + ((d * d * c0 + delta * e) / (b0 * delta)).sqrt()),
            )
        }
    };
    Ok(IndicatorBounds {
        objective_lower: -y * distance,
        objective_upper,
        feasibility,
    })
}

/// `E = F(x₁) − F*` at the problem's start point.
///
/// When the start violates an indicator term `F(x₁)` is infinite; the smoothed
/// value `F_{β₀}(x₁)` is used instead and the second field is `true`.
pub fn initial_excess(problem: &CompositeProblem, optimum: f64, beta0: f64) -> (f64, bool) {
    let x1 = problem.start_point();
    match smoothing::f_value(&x1, problem) {
        Objective::Value(v) => (v - optimum, false),
        Objective::Infeasible { .. } => {
            let fb = smoothing::f_beta_value(&x1, problem, beta0).unwrap_or(f64::INFINITY);
            (fb - optimum, true)
        }
    }
}

/// Least-squares slope of `log value` against `log k`. Non-positive values are skipped.
pub fn rate_slope(ks: &[f64], values: &[f64]) -> Result<f64, BoundError> {
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .zip(values)
        .filter(|(k, v)| **k > 0.0 && **v > 0.0 && v.is_finite())
        .map(|(k, v)| (k.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(BoundError::TooFewPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(BoundError::TooFewPoints(1));
    }
    Ok(sxy / sxx)
}

/// Slope of `quantity(record)` against the iterate index over records with
/// `k_min ≤ k ≤ k_max`.
pub fn trace_slope<F>(
    trace: &[IterationRecord],
    k_min: usize,
    k_max: usize,
    quantity: F,
) -> Result<f64, BoundError>
where
    F: Fn(&IterationRecord) -> f64,
{
    let (ks, vals): (Vec<f64>, Vec<f64>) = trace
        .iter()
        .filter(|r| r.k >= k_min && r.k <= k_max)
        .map(|r| ((r.k + 1) as f64, quantity(r)))
        .unzip();
    rate_slope(&ks, &vals)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    SmoothedGap,
    LipschitzObjective,
    IndicatorObjectiveUpper,
    IndicatorObjectiveLower,
    Feasibility,
}

impl BoundKind {
    pub fn label(&self) -> &'static str {
        match self {
            BoundKind::SmoothedGap => "smoothed-gap",
            BoundKind::LipschitzObjective => "lipschitz-objective",
            BoundKind::IndicatorObjectiveUpper => "indicator-objective-upper",
            BoundKind::IndicatorObjectiveLower => "indicator-objective-lower",
            BoundKind::Feasibility => "feasibility-gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: BoundKind,
    /// Trace row index `k` (the row describes `x_{k+1}`).
    pub k: usize,
    pub observed: f64,
    pub limit: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} bound violated at k={}: observed {:.6e} > limit {:.6e}",
            self.kind.label(),
            self.k,
            self.observed,
            self.limit
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundReport {
    pub checked: Vec<(BoundKind, usize)>,
    pub violations: Vec<Violation>,
    /// Checks skipped for lack of inputs.
    pub skipped: Vec<(BoundKind, &'static str)>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn total_checked(&self) -> usize {
        self.checked.iter().map(|c| c.1).sum()
    }

    fn bump(&mut self, kind: BoundKind) {
        match self.checked.iter_mut().find(|c| c.0 == kind) {
            Some(c) => c.1 += 1,
            None => self.checked.push((kind, 1)),
        }
    }

    fn skip(&mut self, kind: BoundKind, why: &'static str) {
        if !self.skipped.iter().any(|s| s.0 == kind) {
            self.skipped.push((kind, why));
        }
    }
}

/// Slack allowed for floating-point roundoff in trace comparisons.
fn exceeds(observed: f64, limit: f64) -> bool {
    observed > limit + 1e-12 * (1.0 + limit.abs())
}

/// Compares every trace row against the guarantees that apply to its inputs.
///
/// Row `k` holds `x_{k+1}`: the smoothed gap is compared at `k`, the other
/// bounds at iterate index `k + 1`.
pub fn check_trace(trace: &[IterationRecord], inp: &BoundInputs, mode: BoundMode) -> BoundReport {
    let mut report = BoundReport::default();
    let Some(opt) = inp.optimum else {
        report.skip(BoundKind::SmoothedGap, "optimum not supplied");
        if inp.class == TermClass::Indicator && inp.dual_norm.is_some() {
            for r in trace {
                check_feasibility(r, inp, mode, &mut report);
            }
        } else {
            report.skip(BoundKind::Feasibility, "dual norm not supplied");
        }
        return report;
    };
    for r in trace {
        match smoothed_gap_bound(r.k, inp, mode) {
            Ok(limit) => {
                report.bump(BoundKind::SmoothedGap);
                let observed = r.f_beta - opt;
                if exceeds(observed, limit) {
                    report.violations.push(Violation {
                        kind: BoundKind::SmoothedGap,
                        k: r.k,
                        observed,
                        limit,
                    });
                }
            }
            Err(BoundError::Missing(what)) => report.skip(BoundKind::SmoothedGap, what),
            Err(_) => {}
        }
        match inp.class {
            TermClass::Lipschitz => match lipschitz_objective_bound(r.k + 1, inp, mode) {
                Ok(limit) => {
                    report.bump(BoundKind::LipschitzObjective);
                    let observed = r.f_or_nan - opt;
                    if observed.is_nan() || exceeds(observed, limit) {
                        report.violations.push(Violation {
                            kind: BoundKind::LipschitzObjective,
                            k: r.k,
                            observed,
                            limit,
                        });
                    }
                }
                Err(BoundError::Missing(what)) => report.skip(BoundKind::LipschitzObjective, what),
                Err(_) => {}
            },
            TermClass::Indicator => {
                let dist = r.total_feas_gap();
                match indicator_bounds(r.k + 1, inp, mode, dist) {
                    Ok(b) => {
                        let observed = r.f_value - opt;
                        report.bump(BoundKind::IndicatorObjectiveUpper);
                        if exceeds(observed, b.objective_upper) {
                            report.violations.push(Violation {
                                kind: BoundKind::IndicatorObjectiveUpper,
                                k: r.k,
                                observed,
                                limit: b.objective_upper,
                            });
                        }
                        report.bump(BoundKind::IndicatorObjectiveLower);
                        if exceeds(b.objective_lower, observed) {
                            report.violations.push(Violation {
                                kind: BoundKind::IndicatorObjectiveLower,
                                k: r.k,
                                observed: -observed,
                                limit: -b.objective_lower,
                            });
                        }
                    }
                    Err(BoundError::Missing(what)) => {
                        report.skip(BoundKind::IndicatorObjectiveUpper, what)
                    }
                    Err(_) => {}
                }
                check_feasibility(r, inp, mode, &mut report);
            }
            TermClass::Mixed => {}
        }
    }
    report
}

fn check_feasibility(
    r: &IterationRecord,
    inp: &BoundInputs,
    mode: BoundMode,
    report: &mut BoundReport,
) {
    let dist = r.total_feas_gap();
    match indicator_bounds(r.k + 1, inp, mode, dist) {
        Ok(b) => {
            report.bump(BoundKind::Feasibility);
            if exceeds(dist, b.feasibility) {
                report.violations.push(Violation {
                    kind: BoundKind::Feasibility,
                    k: r.k,
                    observed: dist,
                    limit: b.feasibility,
                });
            }
        }
        Err(BoundError::Missing(what)) => report.skip(BoundKind::Feasibility, what),
        Err(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(lf: f64, a: f64, d: f64, b0: f64) -> BoundInputs {
        BoundInputs {
            diameter: d,
            smooth_lipschitz: lf,
            map_norm: a,
            penalty_lipschitz: Some(1.0),
            beta0: b0,
            class: TermClass::Lipschitz,
            dual_norm: Some(0.0),
            optimum: Some(0.0),
            initial_excess: Some(0.0),
        }
    }

    #[test]
    fn smoothed_gap_examples() {
        let inp = inputs(0.0, 1.0, 2.0, 1.0);
        assert!((smoothed_gap_bound(3, &inp, BoundMode::Exact).unwrap() - 4.0).abs() < 1e-15);
        assert_eq!(
            smoothed_gap_bound(3, &inp, BoundMode::Additive { delta: 0.0 }).unwrap(),
            smoothed_gap_bound(3, &inp, BoundMode::Exact).unwrap()
        );
        // k+1 quadrupled halves the ‖A‖ term
        let a = smoothed_gap_bound(3, &inp, BoundMode::Exact).unwrap();
        let b = smoothed_gap_bound(15, &inp, BoundMode::Exact).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        assert_eq!(
            smoothed_gap_bound(0, &inp, BoundMode::Exact),
            Err(BoundError::ZeroIndex)
        );
    }

    #[test]
    fn lipschitz_examples() {
        let mut inp = inputs(0.0, 1.0, 2.0, 0.0);
        inp.beta0 = optimal_beta0_lipschitz(2.0, 1.0, 1.0);
        assert_eq!(inp.beta0, 4.0);
        // 2D²‖A‖²/(β₀√k) + β₀L_g²/(2√k) = 2D‖A‖L_g/√k at the optimized β₀
        let v = lipschitz_objective_bound(4, &inp, BoundMode::Exact).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        let inp = inputs(0.7, 1.3, 1.5, 2.0);
        let at1 = lipschitz_objective_bound(1, &inp, BoundMode::Exact).unwrap();
        let expected = 2.0 * 1.5f64.powi(2) * (0.7 + 1.3f64.powi(2) / 2.0) + 2.0 / 2.0;
        assert!((at1 - expected).abs() < 1e-12);
    }

    #[test]
    fn multiplicative_unit_delta_differs_by_excess_term() {
        let mut inp = inputs(0.7, 1.3, 1.5, 2.0);
        inp.initial_excess = Some(0.9);
        for k in 1..50 {
            let exact = lipschitz_objective_bound(k, &inp, BoundMode::Exact).unwrap();
            // unit-δ schedule evaluates at k+1 with an extra 2E/(k+1)
            let shifted = lipschitz_objective_bound(k + 1, &inp, BoundMode::Exact).unwrap();
            let mult = lipschitz_objective_bound(k, &inp, BoundMode::Multiplicative { delta: 1.0 })
                .unwrap();
            assert!((mult - shifted - 2.0 * 0.9 / (k as f64 + 1.0)).abs() < 1e-12);
            assert!(exact >= shifted);
        }
    }

    #[test]
    fn indicator_examples() {
        let mut inp = inputs(0.5, 1.0, 2.0, 1.0);
        inp.class = TermClass::Indicator;
        let b = indicator_bounds(4, &inp, BoundMode::Exact, 0.3).unwrap();
        assert_eq!(b.objective_lower, 0.0);
        let c0: f64 = 0.5 + 1.0;
        assert!((b.feasibility - 2.0 * 2.0 * c0.sqrt() / 2.0).abs() < 1e-15);
        // unit δ with E = 0 reproduces the exact form at √(k+1)
        let m = indicator_bounds(4, &inp, BoundMode::Multiplicative { delta: 1.0 }, 0.3).unwrap();
        let e = indicator_bounds(5, &inp, BoundMode::Exact, 0.3).unwrap();
        assert!((m.feasibility - e.feasibility).abs() < 1e-14);
        assert!((m.objective_upper - e.objective_upper).abs() < 1e-14);
    }

    #[test]
    fn missing_inputs_are_reported() {
        let mut inp = inputs(0.5, 1.0, 2.0, 1.0);
        inp.dual_norm = None;
        assert!(matches!(
            indicator_bounds(1, &inp, BoundMode::Exact, 0.0),
            Err(BoundError::Missing(_))
        ));
        inp.initial_excess = None;
        assert!(matches!(
            smoothed_gap_bound(1, &inp, BoundMode::Multiplicative { delta: 0.5 }),
            Err(BoundError::Missing(_))
        ));
    }

    #[test]
    fn bounds_are_nonincreasing() {
        let mut inp = inputs(0.8, 1.7, 1.2, 0.6);
        inp.dual_norm = Some(2.0);
        inp.initial_excess = Some(3.0);
        let modes = [
            BoundMode::Exact,
            BoundMode::Additive { delta: 0.7 },
            BoundMode::Multiplicative { delta: 0.3 },
        ];
        for mode in modes {
            let mut prev = [f64::INFINITY; 4];
            for k in 1..5000 {
                let ib = indicator_bounds(k, &inp, mode, 0.0).unwrap();
                let cur = [
                    smoothed_gap_bound(k, &inp, mode).unwrap(),
                    lipschitz_objective_bound(k, &inp, mode).unwrap(),
                    ib.objective_upper,
                    ib.feasibility,
                ];
                for (c, p) in cur.iter().zip(&prev) {
                    assert!(c <= p);
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn numeric_beta0_matches_closed_form_without_smooth_part() {
        let inp = inputs(0.0, 1.5, 2.0, 1.0);
        let b = optimal_beta0_numeric(100, &inp, BoundMode::Exact, 1e-3, 1e3).unwrap();
        assert!((b - optimal_beta0_lipschitz(2.0, 1.5, 1.0)).abs() < 1e-6);
    }

    #[test]
    fn slope_of_power_laws() {
        let ks: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        let half: Vec<f64> = ks.iter().map(|k| 3.0 / k.sqrt()).collect();
        let one: Vec<f64> = ks.iter().map(|k| 0.2 / k).collect();
        assert!((rate_slope(&ks, &half).unwrap() + 0.5).abs() < 1e-6);
        assert!((rate_slope(&ks, &one).unwrap() + 1.0).abs() < 1e-6);
        assert!(rate_slope(&ks[..1], &one[..1]).is_err());
    }

    fn record(k: usize, f_beta: f64) -> IterationRecord {
        IterationRecord {
            k,
            eta: 2.0 / (k as f64 + 1.0),
            beta: 1.0,
            f_value: f_beta,
            g_smoothed_total: 0.0,
            f_beta,
            f_or_nan: f_beta,
            feas_gaps: vec![0.0],
            lmo_inner_iters: 0,
            elapsed_ms: f64::NAN,
        }
    }

    #[test]
    fn check_trace_flags_injected_fault() {
        let inp = inputs(0.0, 1.0, 2.0, 4.0);
        let mut trace: Vec<_> = (1..=20).map(|k| record(k, 0.1 / k as f64)).collect();
        let report = check_trace(&trace, &inp, BoundMode::Exact);
        assert!(report.holds());
        assert_eq!(report.total_checked(), 40);
        trace[6].f_beta = 100.0;
        let report = check_trace(&trace, &inp, BoundMode::Exact);
        assert_eq!(report.violations[0].k, 7);
        assert_eq!(report.violations[0].kind, BoundKind::SmoothedGap);
    }
}
