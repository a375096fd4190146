//! Dense real linear algebra and the extreme eigen/singular solvers used by the
//! spectral oracles.
//!
//! Matrices are row-major `f64` buffers. The iterative solvers (Lanczos with full
//! reorthogonalization, shifted power iteration) never abort on slow convergence:
//! they hand back their best iterate together with the measured residual and a
//! `converged` flag, which the inexact-oracle accounting consumes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix of order {n} exceeds the dense solver limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("empty matrix")]
    Empty,
}

/// `Σᵢ f(aᵢ, bᵢ)` over the common length, with four independent accumulators.
pub fn zip_sum(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    let n = a.len().min(b.len());
    let (ca, cb) = (a[..n].chunks_exact(4), b[..n].chunks_exact(4));
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(&x, &y)| f(x, y))
        .sum();
    let mut acc = [0.0; 4];
    for (x, y) in ca.zip(cb) {
        for j in 0..4 {
            acc[j] += f(x[j], y[j]);
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `Σᵢ f(aᵢ)` with four independent accumulators.
pub fn map_sum(a: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let chunks = a.chunks_exact(4);
    let tail: f64 = chunks.remainder().iter().map(|&x| f(x)).sum();
    let mut acc = [0.0; 4];
    for x in chunks {
        for j in 0..4 {
            acc[j] += f(x[j]);
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    zip_sum(a, b, |x, y| x * y)
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    zip_sum(a, b, |x, y| (x - y) * (x - y)).sqrt()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &di) in d.iter().enumerate() {
            m.data[i * n + i] = di;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::Dimension {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Outer product `scale * a bᵀ`.
    pub fn outer(a: &[f64], b: &[f64], scale: f64) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| scale * a[i] * b[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `out = M x`
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec_into(x, &mut out);
        out
    }

    /// `out = Mᵀ y`
    pub fn matvec_t_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                axpy(yi, self.row(i), out);
            }
        }
    }

    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.matvec_t_into(y, &mut out);
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                axpy(a, orow, dst);
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius inner product.
    pub fn inner(&self, other: &DenseMatrix) -> f64 {
        dot(&self.data, &other.data)
    }

    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Symmetric up to `1e-12 * max|M|`.
    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.asymmetry() <= 1e-12 * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// `(M + Mᵀ) / 2`
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i))
        })
    }

    pub fn add_diagonal(&mut self, c: f64) {
        for i in 0..self.rows.min(self.cols) {
            self.data[i * self.cols + i] += c;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Largest absolute row sum; bounds every eigenvalue in magnitude.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn require_symmetric(&self) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows == 0 {
            return Err(LinalgError::Empty);
        }
        if !self.is_symmetric() {
            return Err(LinalgError::NotSymmetric {
                asymmetry: self.asymmetry(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigConfig {
    pub max_iterations: usize,
    /// Bound on `‖Mq − λq‖ / ‖M‖`.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for EigConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-10,
            seed: 0x5eed,
        }
    }
}

impl EigConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validated(&self) -> Self {
        Self {
            max_iterations: self.max_iterations.max(1),
            tolerance: if self.tolerance > 0.0 {
                self.tolerance
            } else {
                f64::EPSILON
            },
            seed: self.seed,
        }
    }
}

/// Eigenpair with its post-hoc residual `‖Mq − λq‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    /// Scale the residual contract is measured against (`‖M‖_F` for explicit matrices).
    pub scale: f64,
    pub converged: bool,
    /// Operator applications spent.
    pub iterations: usize,
}

impl EigPair {
    pub fn relative_residual(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriplet {
    pub value: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// `‖Mᵀu − σv‖`; `‖Mv − σu‖` vanishes by construction.
    pub residual: f64,
    pub scale: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNorm {
    /// `‖Av‖` at the final unit probe `v`; a lower bound on `‖A‖`.
    pub value: f64,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extreme {
    Smallest,
    Largest,
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let nv = norm(&v);
        if nv > 0.0 {
            scale(1.0 / nv, &mut v);
            return v;
        }
    }
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            axpy(-c, q, w);
        }
    }
}

/// Lanczos with full reorthogonalization and explicit restarts from the current
/// Ritz vector. `scale` fixes the residual contract; `None` measures it against
/// the largest Ritz value seen.
fn lanczos_extreme<F>(
    apply: F,
    n: usize,
    which: Extreme,
    cfg: &EigConfig,
    scale_hint: Option<f64>,
    start: Option<&[f64]>,
) -> EigPair
where
    F: Fn(&[f64], &mut [f64]),
{
    let cfg = cfg.validated();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut q0 = match start {
        Some(s) if norm(s) > 0.0 => {
            let mut v = s.to_vec();
            scale(1.0 / norm(s), &mut v);
            v
        }
        _ => random_unit(n, &mut rng),
    };

    if n == 1 {
        let mut w = vec![0.0];
        apply(&[1.0], &mut w);
        return EigPair {
            value: w[0],
            vector: vec![1.0],
            residual: 0.0,
            scale: scale_hint.unwrap_or(w[0].abs()),
            converged: true,
            iterations: 1,
        };
    }

    let max_krylov = n.min(96);
    let mut matvecs = 0usize;
    let mut best: Option<EigPair> = None;
    let mut w = vec![0.0; n];

    loop {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_krylov);
        let mut alpha: Vec<f64> = Vec::with_capacity(max_krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(max_krylov);
        basis.push(q0.clone());
        let mut ritz: Option<(Vec<f64>, f64)> = None;

        for j in 0..max_krylov {
            apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            orthogonalize(&mut w, &basis);
            let b = norm(&w);

            let (evals, evecs) = tridiagonal_eig(&alpha, &beta);
            let m = alpha.len();
            let idx = match which {
                Extreme::Smallest => 0,
                Extreme::Largest => m - 1,
            };
            let s: Vec<f64> = (0..m).map(|r| evecs[r * m + idx]).collect();
            let spread = evals[0].abs().max(evals[m - 1].abs());
            let scale_now = scale_hint.unwrap_or(spread);
            let estimate = b * s[m - 1].abs();
            ritz = Some((s, scale_now));

            let exhausted = j + 1 == max_krylov || j + 1 == n || matvecs >= cfg.max_iterations;
            let breakdown = b <= 1e-14 * scale_now.max(f64::MIN_POSITIVE);
            if estimate <= 0.1 * cfg.tolerance * scale_now || exhausted {
                break;
            }
            beta.push(b);
            if breakdown {
                // invariant subspace; continue in its orthogonal complement
                let mut fresh = random_unit(n, &mut rng);
                orthogonalize(&mut fresh, &basis);
                let nf = norm(&fresh);
                if nf <= 1e-12 {
                    break;
                }
                scale(1.0 / nf, &mut fresh);
                *beta.last_mut().unwrap() = 0.0;
                basis.push(fresh);
            } else {
                let mut next = w.clone();
                scale(1.0 / b, &mut next);
                basis.push(next);
            }
        }

        let (s, scale_now) = ritz.expect("at least one Lanczos step");
        let mut y = vec![0.0; n];
        for (coef, q) in s.iter().zip(&basis) {
            axpy(*coef, q, &mut y);
        }
        let ny = norm(&y);
        if ny > 0.0 {
            scale(1.0 / ny, &mut y);
        }
        apply(&y, &mut w);
        matvecs += 1;
        let value = dot(&y, &w);
        axpy(-value, &y, &mut w);
        let residual = norm(&w);
        let pair = EigPair {
            value,
            vector: y,
            residual,
            scale: scale_now,
            converged: residual <= cfg.tolerance * scale_now,
            iterations: matvecs,
        };
        let better = match &best {
            None => true,
            Some(b) => pair.residual < b.residual,
        };
        if better {
            best = Some(pair);
        }
        let current = best.as_ref().unwrap();
        if current.converged || matvecs >= cfg.max_iterations {
            let mut out = best.unwrap();
            out.iterations = matvecs;
            return out;
        }
        q0 = current.vector.clone();
    }
}

/// Minimum eigenpair of a symmetric matrix.
///
/// Lanczos first; if that misses the residual contract, shifted power iteration
/// continues from the Lanczos vector and the better of the two is returned.
pub fn min_eigpair(m: &DenseMatrix, cfg: &EigConfig) -> Result<EigPair, LinalgError> {
    min_eigpair_from(m, cfg, None)
}

/// As [`min_eigpair`], warm-started from `start`.
pub fn min_eigpair_from(
    m: &DenseMatrix,
    cfg: &EigConfig,
    start: Option<&[f64]>,
) -> Result<EigPair, LinalgError> {
    m.require_symmetric()?;
    let n = m.rows();
    let fro = m.frobenius_norm();
    if fro == 0.0 {
        let mut q = vec![0.0; n];
        q[0] = 1.0;
        return Ok(EigPair {
            value: 0.0,
            vector: q,
            residual: 0.0,
            scale: 0.0,
            converged: true,
            iterations: 0,
        });
    }
    let lanczos = lanczos_extreme(
        |x, out| m.matvec_into(x, out),
        n,
        Extreme::Smallest,
        cfg,
        Some(fro),
        start,
    );
    if lanczos.converged {
        return Ok(lanczos);
    }
    let power = power_min_eigpair(m, cfg, Some(&lanczos.vector))?;
    Ok(if power.residual < lanczos.residual {
        EigPair {
            iterations: power.iterations + lanczos.iterations,
            ..power
        }
    } else {
        lanczos
    })
}

/// Power iteration on `σI − M` with the Gershgorin shift `σ`.
pub fn power_min_eigpair(
    m: &DenseMatrix,
    cfg: &EigConfig,
    start: Option<&[f64]>,
) -> Result<EigPair, LinalgError> {
    m.require_symmetric()?;
    let cfg = cfg.validated();
    let n = m.rows();
    let fro = m.frobenius_norm();
    let shift = m.gershgorin_bound();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut q = match start {
        Some(s) if norm(s) > 0.0 => {
            let mut v = s.to_vec();
            scale(1.0 / norm(s), &mut v);
            v
        }
        _ => random_unit(n, &mut rng),
    };
    let mut w = vec![0.0; n];
    let mut value = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        m.matvec_into(&q, &mut w);
        iterations += 1;
        value = dot(&q, &w);
        let mut r = w.clone();
        axpy(-value, &q, &mut r);
        residual = norm(&r);
        if residual <= cfg.tolerance * fro {
            break;
        }
        // q <- (shift I - M) q
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi = shift * qi - *wi;
        }
        let nw = norm(&w);
        if nw == 0.0 {
            break;
        }
        for (qi, wi) in q.iter_mut().zip(&w) {
            *qi = wi / nw;
        }
    }
    Ok(EigPair {
        value,
        vector: q,
        residual,
        scale: fro,
        converged: residual <= cfg.tolerance * fro,
        iterations,
    })
}

/// Leading singular triplet via Lanczos on the smaller Gram matrix.
pub fn top_singular_pair(m: &DenseMatrix, cfg: &EigConfig) -> SingularTriplet {
    let (rows, cols) = (m.rows(), m.cols());
    let fro = m.frobenius_norm();
    if rows == 0 || cols == 0 || fro == 0.0 {
        let mut u = vec![0.0; rows];
        let mut v = vec![0.0; cols];
        if rows > 0 {
            u[0] = 1.0;
        }
        if cols > 0 {
            v[0] = 1.0;
        }
        return SingularTriplet {
            value: 0.0,
            left: u,
            right: v,
            residual: 0.0,
            scale: 0.0,
            converged: true,
            iterations: 0,
        };
    }
    // Gram-matrix residual tolerance: ‖Gq − θq‖ ≤ tol σ₁² maps to the
    // singular residual ‖Mᵀu − σv‖ ≤ tol σ₁ roughly; tighten once more for slack.
    let gram_cfg = EigConfig {
        tolerance: cfg.tolerance * 0.1,
        ..*cfg
    };
    let transpose_side = rows < cols;
    let (inner_dim, outer_dim) = if transpose_side {
        (rows, cols)
    } else {
        (cols, rows)
    };
    let mut tmp = vec![0.0; outer_dim];
    let tmp_cell = std::cell::RefCell::new(&mut tmp);
    let pair = lanczos_extreme(
        |x, out| {
            let mut t = tmp_cell.borrow_mut();
            if transpose_side {
                m.matvec_t_into(x, &mut t[..]);
                m.matvec_into(&t[..], out);
            } else {
                m.matvec_into(x, &mut t[..]);
                m.matvec_t_into(&t[..], out);
            }
        },
        inner_dim,
        Extreme::Largest,
        &gram_cfg,
        Some(fro * fro),
        None,
    );
    let (u, v, sigma) = if transpose_side {
        let u = pair.vector.clone();
        let mut v = m.matvec_t(&u);
        let s = norm(&v);
        if s > 0.0 {
            scale(1.0 / s, &mut v);
        }
        (u, v, s)
    } else {
        let v = pair.vector.clone();
        let mut u = m.matvec(&v);
        let s = norm(&u);
        if s > 0.0 {
            scale(1.0 / s, &mut u);
        }
        (u, v, s)
    };
    let residual = if transpose_side {
        let mut r = m.matvec(&v);
        axpy(-sigma, &u, &mut r);
        norm(&r)
    } else {
        let mut r = m.matvec_t(&u);
        axpy(-sigma, &v, &mut r);
        norm(&r)
    };
    SingularTriplet {
        value: sigma,
        left: u,
        right: v,
        residual,
        scale: fro,
        converged: residual <= cfg.tolerance * fro,
        iterations: pair.iterations,
    }
}

/// Operator norm of a linear map given only its action and adjoint.
pub fn spectral_norm<A, T>(
    apply: A,
    adjoint: T,
    dim_in: usize,
    dim_out: usize,
    cfg: &EigConfig,
) -> SpectralNorm
where
    A: Fn(&[f64], &mut [f64]),
    T: Fn(&[f64], &mut [f64]),
{
    if dim_in == 0 || dim_out == 0 {
        return SpectralNorm {
            value: 0.0,
            residual: 0.0,
            converged: true,
        };
    }
    let mut tmp = vec![0.0; dim_out];
    let cell = std::cell::RefCell::new(&mut tmp);
    let pair = lanczos_extreme(
        |x, out| {
            let mut t = cell.borrow_mut();
            apply(x, &mut t[..]);
            adjoint(&t[..], out);
        },
        dim_in,
        Extreme::Largest,
        cfg,
        None,
        None,
    );
    let mut image = vec![0.0; dim_out];
    apply(&pair.vector, &mut image);
    SpectralNorm {
        value: norm(&image),
        residual: pair.residual,
        converged: pair.converged,
    }
}

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second matrix. Limited to order 200.
pub fn jacobi_eig_full(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix), LinalgError> {
    const LIMIT: usize = 200;
    m.require_symmetric()?;
    let n = m.rows();
    if n > LIMIT {
        return Err(LinalgError::TooLarge { n, limit: LIMIT });
    }
    let mut a = m.symmetrized();
    let mut v = DenseMatrix::identity(n);
    let total = a.frobenius_norm();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= 1e-15 * total.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok((values, vectors))
}

/// Eigen-decomposition of a symmetric tridiagonal matrix (implicit QL).
///
/// `diag` has length m, `off` at least m − 1 entries (extra entries ignored).
/// Returns ascending eigenvalues and a row-major m×m matrix whose columns are
/// the eigenvectors.
pub fn tridiagonal_eig(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    let k = m.saturating_sub(1);
    e[..k].copy_from_slice(&off[..k]);
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < m {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = mm;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..m {
                    let zk1 = z[k * m + i + 1];
                    let zk = z[k * m + i];
                    z[k * m + i + 1] = s * zk + c * zk1;
                    z[k * m + i] = c * zk - s * zk1;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; m * m];
    for (c, &src) in order.iter().enumerate() {
        for r in 0..m {
            vectors[r * m + c] = z[r * m + src];
        }
    }
    (values, vectors)
}

/// Sum of singular values, through the eigenvalues of the smaller Gram matrix.
pub fn nuclear_norm(m: &DenseMatrix) -> Result<f64, LinalgError> {
    Ok(singular_values(m)?.iter().sum())
}

const SVD_LIMIT: usize = 400;

/// All singular values, descending, by one-sided Jacobi rotations.
///
/// Works on the columns of the wider-than-tall orientation so small singular
/// values keep full relative accuracy (no Gram matrix is formed).
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>, LinalgError> {
    let a = if m.rows() < m.cols() {
        m.transpose()
    } else {
        m.clone()
    };
    let (rows, cols) = (a.rows(), a.cols());
    if cols > SVD_LIMIT {
        return Err(LinalgError::TooLarge {
            n: cols,
            limit: SVD_LIMIT,
        });
    }
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    // column-major copy
    let mut c: Vec<Vec<f64>> = (0..cols).map(|j| a.column(j)).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&c[p], &c[p]);
                let beta = dot(&c[q], &c[q]);
                let gamma = dot(&c[p], &c[q]);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (left, right) = c.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = cs * xp - sn * yq;
                    *y = sn * xp + cs * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = c.iter().map(|col| norm(col)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}
