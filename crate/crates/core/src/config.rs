//! JSON run configurations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundMode;
use crate::linalg::DenseMatrix;
use crate::problems::{self, DistanceScaling, ProblemInstance, RpcaLoss};
use crate::solver::{self, SolverConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub problem: ProblemSpec,
    pub solver: SolverConfig,
    #[serde(default)]
    pub bounds: BoundOverrides,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_observe() -> f64 {
    0.8
}

/// Which builder to run and with what parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Counterexample {},
    QuadraticBox {},
    Clustering {
        n_points: usize,
        n_clusters: usize,
        separation: f64,
        seed: u64,
        #[serde(default)]
        scaling: DistanceScaling,
    },
    Rpca {
        rows: usize,
        cols: usize,
        rank: usize,
        density: f64,
        #[serde(default = "default_observe")]
        observe_probability: f64,
        seed: u64,
        loss: RpcaLoss,
    },
    /// Explicit payoff `matrix`, or a random `size × size` game without a pure solution.
    Game {
        #[serde(default)]
        matrix: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        size: Option<usize>,
        #[serde(default)]
        seed: u64,
    },
}

/// Values that replace or complete the measured bound constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundOverrides {
    pub diameter: Option<f64>,
    pub smooth_lipschitz: Option<f64>,
    pub map_norm: Option<f64>,
    pub penalty_lipschitz: Option<f64>,
    pub dual_norm: Option<f64>,
    pub optimum: Option<f64>,
    pub initial_excess: Option<f64>,
    /// Estimate `‖y*‖` from the smoothed dual point after this many iterations
    /// of a separate reference run.
    pub estimate_dual_norm_iters: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Default trace path when none is given on the command line.
    pub trace: Option<String>,
    /// Fill the `elapsed_ms` column (makes traces run-dependent).
    #[serde(default)]
    pub wall_clock: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Schema(self.schema_version));
        }
        self.solver
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        match &self.problem {
            ProblemSpec::Clustering {
                n_points,
                n_clusters,
                separation,
                ..
            } => {
                if *n_points == 0 || *n_clusters == 0 || *n_clusters > *n_points {
                    return Err(ConfigError::Invalid(
                        "clustering needs 1 <= n_clusters <= n_points".into(),
                    ));
                }
                if *n_points > 200 {
                    return Err(ConfigError::Invalid(
                        "clustering supports at most 200 points".into(),
                    ));
                }
                if separation.is_nan() || *separation < 0.0 {
                    return Err(ConfigError::Invalid("separation must be >= 0".into()));
                }
            }
            ProblemSpec::Rpca {
                rows,
                cols,
                rank,
                density,
                observe_probability,
                ..
            } => {
                if *rows == 0 || *cols == 0 || *rank == 0 || *rank > (*rows).min(*cols) {
                    return Err(ConfigError::Invalid(
                        "rpca needs 1 <= rank <= min(rows, cols)".into(),
                    ));
                }
                if (*rows).min(*cols) > 400 {
                    return Err(ConfigError::Invalid(
                        "rpca supports at most 400 columns".into(),
                    ));
                }
                for (name, p) in [
                    ("density", density),
                    ("observe_probability", observe_probability),
                ] {
                    if !(0.0..=1.0).contains(p) {
                        return Err(ConfigError::Invalid(format!("{name} must lie in [0, 1]")));
                    }
                }
            }
            ProblemSpec::Game { matrix, size, .. } => match (matrix, size) {
                (Some(m), None) => {
                    let cols = m.first().map_or(0, Vec::len);
                    if cols == 0 || m.iter().any(|r| r.len() != cols) {
                        return Err(ConfigError::Invalid(
                            "game matrix must be rectangular and non-empty".into(),
                        ));
                    }
                }
                (None, Some(n)) if (1..=10).contains(n) => {}
                _ => {
                    return Err(ConfigError::Invalid(
                        "game needs exactly one of matrix or size (1..=10)".into(),
                    ))
                }
            },
            ProblemSpec::Counterexample {} | ProblemSpec::QuadraticBox {} => {}
        }
        Ok(())
    }

    /// The solver settings actually used, with output switches applied.
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            wall_clock: self.output.wall_clock,
            ..self.solver.clone()
        }
    }

    pub fn bound_mode(&self) -> BoundMode {
        self.solver.oracle.into()
    }

    /// Builds the instance and applies numeric bound overrides.
    pub fn build(&self) -> Result<ProblemInstance, ConfigError> {
        let mut inst = match &self.problem {
            ProblemSpec::Counterexample {} => problems::build_counterexample(),
            ProblemSpec::QuadraticBox {} => problems::build_quadratic_box(),
            ProblemSpec::Clustering {
                n_points,
                n_clusters,
                separation,
                seed,
                scaling,
            } => {
                let mix = problems::gen_mixture(*n_points, *n_clusters, *separation, *seed);
                let mut inst =
                    problems::build_clustering_sdp_with(&mix.points, *n_clusters, *scaling);
                inst.labels = Some(mix.labels);
                inst
            }
            ProblemSpec::Rpca {
                rows,
                cols,
                rank,
                density,
                observe_probability,
                seed,
                loss,
            } => {
                let data =
                    problems::gen_rpca(*rows, *cols, *rank, *density, *observe_probability, *seed);
                problems::build_rpca_from(&data, *loss)
            }
            ProblemSpec::Game { matrix, size, seed } => {
                let m = match (matrix, size) {
                    (Some(rows), _) => DenseMatrix::from_rows(rows)
                        .map_err(|e| ConfigError::Invalid(e.to_string()))?,
                    (None, Some(n)) => problems::gen_mixed_game(*n, *n, *seed),
                    (None, None) => {
                        return Err(ConfigError::Invalid("game needs matrix or size".into()))
                    }
                };
                problems::build_matrix_game(m)
            }
        };
        inst.beta0 = self.solver.beta0;
        inst.inputs.beta0 = self.solver.beta0;
        let o = &self.bounds;
        let inp = &mut inst.inputs;
        if let Some(v) = o.diameter {
            inp.diameter = v;
        }
        if let Some(v) = o.smooth_lipschitz {
            inp.smooth_lipschitz = v;
        }
        if let Some(v) = o.map_norm {
            inp.map_norm = v;
        }
        if o.penalty_lipschitz.is_some() {
            inp.penalty_lipschitz = o.penalty_lipschitz;
        }
        if o.dual_norm.is_some() {
            inp.dual_norm = o.dual_norm;
        }
        if o.optimum.is_some() {
            inp.optimum = o.optimum;
        }
        if o.initial_excess.is_some() {
            inp.initial_excess = o.initial_excess;
        }
        if inp.initial_excess.is_none() {
            if let Some(opt) = inp.optimum {
                let (e, surrogate) =
                    crate::bounds::initial_excess(&inst.problem, opt, self.solver.beta0);
                if surrogate {
                    log::info!("start violates a constraint; E uses the smoothed value at beta0");
                }
                inp.initial_excess = Some(e);
            }
        }
        Ok(inst)
    }

    /// Fills `‖y*‖` from a reference run when requested and not given explicitly.
    pub fn resolve_dual_norm(&self, inst: &mut ProblemInstance) -> Result<(), ConfigError> {
        if inst.inputs.dual_norm.is_some() {
            return Ok(());
        }
        if let Some(iters) = self.bounds.estimate_dual_norm_iters {
            let cfg = SolverConfig {
                max_iter: iters,
                trace_every: iters.max(1),
                wall_clock: false,
                ..self.solver.clone()
            };
            let res = solver::solve(&inst.problem, &cfg)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            log::info!(
                "dual norm estimate after {iters} iterations: {}",
                res.final_dual_norm
            );
            inst.inputs.dual_norm = Some(res.final_dual_norm);
        }
        Ok(())
    }
}
