//! Demo and benchmark instances with their synthetic data generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::bounds::BoundInputs;
use crate::linalg::{self, DenseMatrix, EigConfig};
use crate::oracles::{
    adjoint_mismatch, probe_norm, BoxDomain, BoxIndicator, EuclideanBall, IdentityMap, L1Residual,
    MatrixMap, MaxTerm, NuclearBall, PointIndicator, RowSumMap, SampleMap, Simplex, Spectrahedron,
};
use crate::problem::{
    CompositeProblem, LeastSquares, LinearFunction, PenaltyTerm, QuadraticFunction, ZeroFunction,
};
use crate::smoothing;

/// A built problem with its measured constants and any known ground truth.
pub struct ProblemInstance {
    pub name: String,
    pub problem: CompositeProblem,
    pub inputs: BoundInputs,
    /// Recommended initial smoothing parameter.
    pub beta0: f64,
    pub labels: Option<Vec<usize>>,
    pub n_clusters: Option<usize>,
    pub low_rank: Option<DenseMatrix>,
    pub metadata: Vec<(String, String)>,
}

impl ProblemInstance {
    fn new(name: &str, problem: CompositeProblem, beta0: f64) -> Self {
        let inputs = BoundInputs::from_problem(&problem, beta0);
        Self {
            name: name.to_string(),
            problem,
            inputs,
            beta0,
            labels: None,
            n_clusters: None,
            low_rank: None,
            metadata: Vec::new(),
        }
    }

    fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    /// Dimension and adjoint consistency, norm estimates against probes,
    /// diameter against sampled pairs, and a feasible start.
    pub fn self_check(&self, seed: u64) -> Result<(), String> {
        let p = &self.problem;
        p.validate().map_err(|e| e.to_string())?;
        for t in &p.terms {
            let mismatch = adjoint_mismatch(t.map.as_ref(), 10, seed);
            if mismatch > 1e-10 {
                return Err(format!("term {}: adjoint mismatch {mismatch:e}", t.label));
            }
            let probed = probe_norm(t.map.as_ref(), 20, seed);
            let est = t.map.norm_estimate().value;
            if est < probed * (1.0 - 1e-12) {
                return Err(format!(
                    "term {}: norm estimate {est} below probed {probed}",
                    t.label
                ));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diam = p.domain.diameter();
        for _ in 0..20 {
            let a = p.domain.random_point(&mut rng);
            let b = p.domain.random_point(&mut rng);
            if linalg::distance(&a, &b) > diam * (1.0 + 1e-12) {
                return Err("sampled pair farther apart than the diameter".into());
            }
        }
        if (self.inputs.diameter - diam).abs() > 0.0 {
            return Err("recorded diameter disagrees with the domain".into());
        }
        Ok(())
    }
}

fn eig_config(seed: u64) -> EigConfig {
    EigConfig {
        max_iterations: 500,
        tolerance: 1e-9,
        seed,
    }
}

/// `min max{x₁, x₂}` over the unit disc, started from `[1, 0]`.
///
/// Minimizer `−[1/√2, 1/√2]`, optimal value `−1/√2`.
pub fn build_counterexample() -> ProblemInstance {
    let problem = CompositeProblem::new(
        Box::new(ZeroFunction::new(2)),
        Box::new(EuclideanBall::new(2, 1.0)),
    )
    .with_term(PenaltyTerm::new(
        "max",
        Box::new(IdentityMap::new(2)),
        Box::new(MaxTerm::new(2)),
    ))
    .with_start(vec![1.0, 0.0]);
    let beta0 = crate::bounds::optimal_beta0_lipschitz(2.0, 1.0, 1.0);
    let mut inst = ProblemInstance::new("counterexample", problem, beta0);
    let optimum = -std::f64::consts::FRAC_1_SQRT_2;
    inst.inputs.optimum = Some(optimum);
    inst.inputs.initial_excess = Some(1.0 - optimum);
    inst
}

/// Classical conditional gradient on the counterexample using the
/// subgradient `e_argmax` in place of a gradient. Returns `x₁, …, x_{iters+1}`.
pub fn classical_cgm_counterexample(iters: usize) -> Vec<[f64; 2]> {
    let mut x = [1.0, 0.0];
    let mut out = Vec::with_capacity(iters + 1);
    out.push(x);
    for k in 1..=iters {
        let i = if x[1] > x[0] { 1 } else { 0 };
        let mut s = [0.0, 0.0];
        s[i] = -1.0;
        let eta = 2.0 / (k as f64 + 1.0);
        x = [x[0] + eta * (s[0] - x[0]), x[1] + eta * (s[1] - x[1])];
        out.push(x);
    }
    out
}

/// Whether `x` lies in `conv{[1, 0], −e₁, −e₂}` up to `tol` in barycentric weights.
pub fn in_counterexample_hull(x: [f64; 2], tol: f64) -> bool {
    let c = -x[1];
    let a = 0.5 * (1.0 - c + x[0]);
    let b = 0.5 * (1.0 - c - x[0]);
    a >= -tol && b >= -tol && c >= -tol
}

/// 2-D quadratic over the unit box with an ℓ1 residual penalty:
/// `½xᵀHx + qᵀx + λ‖x − b‖₁` on `[0, 1]²`.
pub fn build_quadratic_box() -> ProblemInstance {
    let h = DenseMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).expect("rectangular rows");
    let f = QuadraticFunction::new(h, vec![-1.0, -1.2], 0.0);
    let problem = CompositeProblem::new(Box::new(f), Box::new(BoxDomain::unit(2)))
        .with_term(PenaltyTerm::new(
            "l1",
            Box::new(IdentityMap::new(2)),
            Box::new(L1Residual::new(vec![0.8, 0.1], 0.5)),
        ))
        .with_start(vec![0.0, 0.0]);
    let (x_ref, f_ref) = box_grid_minimum(&problem, [0.0, 1.0], [0.0, 1.0]);
    let mut inst = ProblemInstance::new("quadratic_box", problem, 1.0).note(
        "reference_minimizer",
        format!("{:.12}, {:.12}", x_ref[0], x_ref[1]),
    );
    // Grid minimum is an upper estimate; shift it below the true optimum.
    let optimum = f_ref - 1e-12;
    let (e, _) = crate::bounds::initial_excess(&inst.problem, optimum, inst.beta0);
    inst.inputs.optimum = Some(optimum);
    inst.inputs.initial_excess = Some(e);
    inst
}

/// Numerical minimum of a convex objective over a 2-D box by repeated grid
/// refinement around the best point.
pub fn box_grid_minimum(problem: &CompositeProblem, xr: [f64; 2], yr: [f64; 2]) -> ([f64; 2], f64) {
    const N: usize = 40;
    let (mut lo, mut hi) = ([xr[0], yr[0]], [xr[1], yr[1]]);
    let mut best = ([lo[0], lo[1]], f64::INFINITY);
    for _ in 0..40 {
        for i in 0..=N {
            for j in 0..=N {
                let p = [
                    lo[0] + (hi[0] - lo[0]) * i as f64 / N as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / N as f64,
                ];
                if let Some(v) = smoothing::f_value(&p, problem).value() {
                    if v < best.1 {
                        best = (p, v);
                    }
                }
            }
        }
        for d in 0..2 {
            let w = (hi[d] - lo[d]) / N as f64 * 2.0;
            let (a, b) = if d == 0 {
                (xr[0], xr[1])
            } else {
                (yr[0], yr[1])
            };
            lo[d] = (best.0[d] - w).max(a);
            hi[d] = (best.0[d] + w).min(b);
        }
    }
    best
}

/// Gaussian mixture sample with planted labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

/// `n` points in the plane from `k` unit-variance Gaussians whose centres sit on a
/// circle with neighbouring centres `separation` apart. Labels cycle `0, 1, …, k−1`.
pub fn gen_mixture(n: usize, k: usize, separation: f64, seed: u64) -> Mixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit variance");
    let radius = if k > 1 {
        separation / (2.0 * (std::f64::consts::PI / k as f64).sin())
    } else {
        0.0
    };
    let centres: Vec<[f64; 2]> = (0..k)
        .map(|j| {
            let a = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            [radius * a.cos(), radius * a.sin()]
        })
        .collect();
    let labels: Vec<usize> = (0..n).map(|i| i % k.max(1)).collect();
    let points = labels
        .iter()
        .map(|&l| {
            vec![
                centres[l][0] + normal.sample(&mut rng),
                centres[l][1] + normal.sample(&mut rng),
            ]
        })
        .collect();
    Mixture { points, labels }
}

/// `D_ij = ‖p_i − p_j‖²`.
pub fn squared_distance_matrix(points: &[Vec<f64>]) -> DenseMatrix {
    let n = points.len();
    DenseMatrix::from_fn(n, n, |i, j| {
        let d = linalg::distance(&points[i], &points[j]);
        d * d
    })
}

/// Scaling applied to the distance matrix in the clustering objective.
/// Positive scaling leaves the minimizers unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DistanceScaling {
    Raw,
    /// `D / ‖D‖_F`.
    #[default]
    Frobenius,
}

/// `min ⟨D, X⟩` s.t. `X1 = 1`, `X ≥ 0` over `{X ⪰ 0, tr X ≤ ρ}`, started at 0,
/// with `D` scaled to unit Frobenius norm.
pub fn build_clustering_sdp(points: &[Vec<f64>], n_clusters: usize) -> ProblemInstance {
    build_clustering_sdp_with(points, n_clusters, DistanceScaling::Frobenius)
}

pub fn build_clustering_sdp_with(
    points: &[Vec<f64>],
    n_clusters: usize,
    scaling: DistanceScaling,
) -> ProblemInstance {
    let n = points.len();
    let mut d = squared_distance_matrix(points);
    let fro = d.frobenius_norm();
    if scaling == DistanceScaling::Frobenius && fro > 0.0 {
        d = d.scaled(1.0 / fro);
    }
    let problem = CompositeProblem::new(
        Box::new(LinearFunction::new(d.into_vec())),
        Box::new(Spectrahedron::new(n, n_clusters as f64, eig_config(7))),
    )
    .with_term(PenaltyTerm::new(
        "row_sums",
        Box::new(RowSumMap::new(n)),
        Box::new(PointIndicator::new(vec![1.0; n])),
    ))
    .with_term(PenaltyTerm::new(
        "nonnegative",
        Box::new(IdentityMap::new(n * n)),
        Box::new(BoxIndicator::nonnegative(n * n)),
    ));
    let mut inst = ProblemInstance::new("clustering", problem, 1.0)
        .note("points", n)
        .note("clusters", n_clusters)
        .note("distance", "squared euclidean")
        .note("scaling", format!("{scaling:?}").to_lowercase());
    inst.n_clusters = Some(n_clusters);
    inst
}

/// Clustering instance on a fresh Gaussian mixture.
pub fn build_clustering_mixture(
    n: usize,
    n_clusters: usize,
    separation: f64,
    seed: u64,
) -> ProblemInstance {
    let mix = gen_mixture(n, n_clusters, separation, seed);
    let mut inst = build_clustering_sdp(&mix.points, n_clusters)
        .note("separation", separation)
        .note("seed", seed);
    inst.labels = Some(mix.labels);
    inst
}

/// Labels from a clustering matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rounding {
    pub labels: Vec<usize>,
    /// The spectral embedding was rank deficient and rows of `X` were clustered instead.
    pub coordinate_fallback: bool,
}

/// Spectral embedding by the top `k` eigenpairs of `sym(X)`, then Lloyd iterations
/// from a farthest-point initialization. `seed` breaks ties in the first centre.
pub fn round_clustering(x: &DenseMatrix, n_clusters: usize, seed: u64) -> Rounding {
    let n = x.rows();
    let k = n_clusters.clamp(1, n.max(1));
    let sym = x.symmetrized();
    let mut fallback = false;
    let embedding: Vec<Vec<f64>> = match linalg::jacobi_eig_full(&sym) {
        Ok((vals, vecs)) if n > 0 => {
            let top = vals[n - 1].abs().max(f64::MIN_POSITIVE);
            let kth = vals[n - k];
            if kth <= 1e-10 * top {
                fallback = true;
                (0..n).map(|i| sym.row(i).to_vec()).collect()
            } else {
                (0..n)
                    .map(|i| {
                        (n - k..n)
                            .map(|j| vals[j].sqrt() * vecs.get(i, j))
                            .collect()
                    })
                    .collect()
            }
        }
        _ => {
            fallback = true;
            (0..n).map(|i| sym.row(i).to_vec()).collect()
        }
    };
    let labels = lloyd(&embedding, k, seed);
    Rounding {
        labels,
        coordinate_fallback: fallback,
    }
}

fn lloyd(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let dim = points[0].len();
    let mut centroid = vec![0.0; dim];
    for p in points {
        linalg::axpy(1.0 / n as f64, p, &mut centroid);
    }
    let far: Vec<f64> = points
        .iter()
        .map(|p| linalg::distance(p, &centroid))
        .collect();
    let max_far = far.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..n).filter(|&i| far[i] >= max_far - 1e-12).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = ties[rng.random_range(0..ties.len())];
    let mut centres = vec![points[first].clone()];
    while centres.len() < k {
        let next = (0..n)
            .map(|i| {
                let d = centres
                    .iter()
                    .map(|c| linalg::distance(&points[i], c))
                    .fold(f64::INFINITY, f64::min);
                (i, d)
            })
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        centres.push(points[next.0].clone());
    }
    let mut labels = vec![usize::MAX; n];
    for _ in 0..300 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let best = (0..k)
                .map(|j| (j, linalg::distance(p, &centres[j])))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
                .0;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (j, c) in centres.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == j)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                continue;
            }
            c.fill(0.0);
            for m in &members {
                linalg::axpy(1.0 / members.len() as f64, m, c);
            }
        }
    }
    labels
}

/// Fraction of points labelled correctly under the best matching of cluster ids.
pub fn clustering_accuracy(predicted: &[usize], truth: &[usize], k: usize) -> f64 {
    let n = predicted.len();
    if n == 0 {
        return 1.0;
    }
    let mut counts = vec![vec![0usize; k]; k];
    for (&p, &t) in predicted.iter().zip(truth) {
        if p < k && t < k {
            counts[p][t] += 1;
        }
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let hits: usize = (0..k).map(|i| counts[i][p[i]]).sum();
        best = best.max(hits);
    });
    best as f64 / n as f64
}

fn permute(p: &mut Vec<usize>, start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, visit);
        p.swap(start, i);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RpcaLoss {
    LeastSquares,
    LeastAbsolute,
}

/// Matrix completion from the observed entries `b` (in mask order) over the
/// nuclear ball of radius `radius`, with the box `0 ≤ X ≤ 1` as a penalty.
pub fn build_rpca(
    rows: usize,
    cols: usize,
    mask: &[bool],
    observed: Vec<f64>,
    radius: f64,
    loss: RpcaLoss,
) -> ProblemInstance {
    let n = rows * cols;
    let sample = SampleMap::from_mask(mask);
    let domain = NuclearBall::new(rows, cols, radius, eig_config(11));
    let problem = match loss {
        RpcaLoss::LeastSquares => CompositeProblem::new(
            Box::new(LeastSquares::new(Box::new(sample), observed)),
            Box::new(domain),
        ),
        RpcaLoss::LeastAbsolute => {
            CompositeProblem::new(Box::new(ZeroFunction::new(n)), Box::new(domain)).with_term(
                PenaltyTerm::new(
                    "l1_residual",
                    Box::new(sample),
                    Box::new(L1Residual::new(observed, 1.0)),
                ),
            )
        }
    }
    .with_term(PenaltyTerm::new(
        "box",
        Box::new(IdentityMap::new(n)),
        Box::new(BoxIndicator::uniform(n, 0.0, 1.0)),
    ));
    let name = match loss {
        RpcaLoss::LeastSquares => "rpca_ls",
        RpcaLoss::LeastAbsolute => "rpca_lad",
    };
    ProblemInstance::new(name, problem, 1.0)
        .note("rows", rows)
        .note("cols", cols)
        .note("observed", mask.iter().filter(|&&m| m).count())
}

/// `U Vᵀ / r` with `U, V` uniform on `[0, 1]`, so entries lie in `[0, 1]`.
pub fn gen_low_rank(rows: usize, cols: usize, rank: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = DenseMatrix::from_fn(rows, rank, |_, _| rng.random::<f64>());
    let v = DenseMatrix::from_fn(rank, cols, |_, _| rng.random::<f64>());
    u.matmul(&v)
        .expect("inner dimensions agree")
        .scaled(1.0 / rank.max(1) as f64)
}

/// Replaces each entry with probability `density` by 0 or 1 with equal odds.
/// Returns the corrupted values and the corruption mask.
pub fn salt_and_pepper(values: &[f64], density: f64, seed: u64) -> (Vec<f64>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = values.to_vec();
    let mut hit = vec![false; values.len()];
    for (v, h) in out.iter_mut().zip(hit.iter_mut()) {
        if rng.random::<f64>() < density {
            *v = if rng.random::<bool>() { 1.0 } else { 0.0 };
            *h = true;
        }
    }
    (out, hit)
}

/// Bernoulli observation mask.
pub fn gen_mask(len: usize, observe_probability: f64, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| rng.random::<f64>() < observe_probability)
        .collect()
}

/// Planted robust-PCA data shared by the least-squares and least-absolute fits.
#[derive(Debug, Clone)]
pub struct RpcaData {
    pub rows: usize,
    pub cols: usize,
    pub truth: DenseMatrix,
    pub mask: Vec<bool>,
    pub observed: Vec<f64>,
    pub radius: f64,
}

pub fn gen_rpca(
    rows: usize,
    cols: usize,
    rank: usize,
    density: f64,
    observe_probability: f64,
    seed: u64,
) -> RpcaData {
    let truth = gen_low_rank(rows, cols, rank, seed);
    let (noisy, _) = salt_and_pepper(truth.as_slice(), density, seed.wrapping_add(1));
    let mask = gen_mask(rows * cols, observe_probability, seed.wrapping_add(2));
    let observed = noisy
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(v, _)| *v)
        .collect();
    let radius = linalg::nuclear_norm(&truth).expect("moderate size");
    RpcaData {
        rows,
        cols,
        truth,
        mask,
        observed,
        radius,
    }
}

pub fn build_rpca_from(data: &RpcaData, loss: RpcaLoss) -> ProblemInstance {
    let mut inst = build_rpca(
        data.rows,
        data.cols,
        &data.mask,
        data.observed.clone(),
        data.radius,
        loss,
    );
    inst.low_rank = Some(data.truth.clone());
    inst
}

/// `‖X − X₀‖_F / ‖X₀‖_F`.
pub fn relative_error(x: &[f64], truth: &DenseMatrix) -> f64 {
    linalg::distance(x, truth.as_slice()) / truth.frobenius_norm()
}

/// `min_{x ∈ Δ} max_i (Mx)_i`.
pub fn build_matrix_game(m: DenseMatrix) -> ProblemInstance {
    let (rows, cols) = (m.rows(), m.cols());
    let value = game_value(&m);
    let map = MatrixMap::new(m);
    let norm = crate::oracles::LinearMap::norm_estimate(&map).value;
    let problem = CompositeProblem::new(
        Box::new(ZeroFunction::new(cols)),
        Box::new(Simplex::new(cols)),
    )
    .with_term(PenaltyTerm::new(
        "max",
        Box::new(map),
        Box::new(MaxTerm::new(rows)),
    ));
    let beta0 = if norm > 0.0 {
        crate::bounds::optimal_beta0_lipschitz(std::f64::consts::SQRT_2, norm, 1.0)
    } else {
        1.0
    };
    let mut inst = ProblemInstance::new("game", problem, beta0);
    if let Some(v) = value {
        inst.inputs.optimum = Some(v);
        let x1 = inst.problem.start_point();
        let start = crate::smoothing::f_value(&x1, &inst.problem).value();
        inst.inputs.initial_excess = start.map(|s| s - v);
    }
    inst
}

/// Uniform `[−1, 1]` payoff matrix.
pub fn gen_game(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Optimal value and a minimizing strategy of `min_{x ∈ Δ} max_i (Mx)_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub value: f64,
    pub strategy: Vec<f64>,
}

/// Value of `min_{x ∈ Δ} max_i (Mx)_i`; see [`solve_game`].
pub fn game_value(m: &DenseMatrix) -> Option<f64> {
    solve_game(m).map(|g| g.value)
}

/// Solves the game LP `min t` s.t. `Mx ≤ t1`, `1ᵀx = 1`, `x ≥ 0` by enumerating
/// its vertices. `None` past 20 constraints.
pub fn solve_game(m: &DenseMatrix) -> Option<GameSolution> {
    let (rows, cols) = (m.rows(), m.cols());
    let total = rows + cols;
    if total > 20 || cols == 0 {
        return None;
    }
    // inequality i: a_i·(x, t) ≤ 0
    let ineq = |i: usize| -> Vec<f64> {
        let mut a = vec![0.0; cols + 1];
        if i < rows {
            a[..cols].copy_from_slice(m.row(i));
            a[cols] = -1.0;
        } else {
            a[i - rows] = -1.0;
        }
        a
    };
    let mut best: Option<GameSolution> = None;
    let mut chosen = Vec::with_capacity(cols);
    subsets(total, cols, 0, &mut chosen, &mut |set| {
        let mut a: Vec<Vec<f64>> = set.iter().map(|&i| ineq(i)).collect();
        let mut rhs = vec![0.0; cols];
        let mut eq = vec![1.0; cols + 1];
        eq[cols] = 0.0;
        a.push(eq);
        rhs.push(1.0);
        let Some(z) = solve_dense(a, rhs) else {
            return;
        };
        let feasible = (0..total).all(|i| linalg::dot(&ineq(i), &z) <= 1e-10);
        if feasible && best.as_ref().is_none_or(|b| z[cols] < b.value) {
            best = Some(GameSolution {
                value: z[cols],
                strategy: z[..cols].to_vec(),
            });
        }
    });
    best
}

/// Whether some pure strategy `e_j` attains the game value within `tol`.
pub fn has_pure_solution(m: &DenseMatrix, value: f64, tol: f64) -> bool {
    (0..m.cols()).any(|j| {
        let worst = (0..m.rows())
            .map(|i| m.get(i, j))
            .fold(f64::NEG_INFINITY, f64::max);
        worst <= value + tol
    })
}

/// Uniform `[−1, 1]` payoff matrix, redrawn until no pure strategy is optimal
/// for the minimizing player.
pub fn gen_mixed_game(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
        match solve_game(&m) {
            Some(g) if !has_pure_solution(&m, g.value, 1e-9) => return m,
            None => return m,
            _ => {}
        }
    }
}

fn subsets(
    n: usize,
    k: usize,
    start: usize,
    cur: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if cur.len() == k {
        visit(cur);
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        subsets(n, k, i + 1, cur, visit);
        cur.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
