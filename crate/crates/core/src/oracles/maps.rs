use std::borrow::Cow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, DenseMatrix, EigConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// `true` when `value ≥ ‖A‖` is exact rather than numerical.
    pub certified: bool,
}

/// Operator-form linear map `A: ℝⁿ → ℝᵈ`.
///
/// Implementations must be reentrant: the solver may call `apply` and `adjoint`
/// from several threads when independent solves share a map.
pub trait LinearMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
    fn adjoint(&self, y: &[f64], out: &mut [f64]);
    fn norm_estimate(&self) -> NormEstimate;

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_out()];
        self.apply(x, &mut out);
        out
    }

    /// `Ax`, borrowing `x` when the map is the identity.
    fn apply_cow<'a>(&self, x: &'a [f64]) -> Cow<'a, [f64]> {
        Cow::Owned(self.apply_vec(x))
    }

    fn adjoint_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_in()];
        self.adjoint(y, &mut out);
        out
    }
}

#[derive(Debug, Clone)]
pub struct IdentityMap {
    dim: usize,
}

impl IdentityMap {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl LinearMap for IdentityMap {
    fn dim_in(&self) -> usize {
        self.dim
    }
    fn dim_out(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
    fn apply_cow<'a>(&self, x: &'a [f64]) -> Cow<'a, [f64]> {
        Cow::Borrowed(x)
    }
    fn norm_estimate(&self) -> NormEstimate {
        NormEstimate {
            value: if self.dim > 0 { 1.0 } else { 0.0 },
            certified: true,
        }
    }
}

/// Explicit dense matrix. The norm is computed once by Lanczos and inflated by
/// its residual so that it bounds `‖A‖` from above in practice.
#[derive(Debug, Clone)]
pub struct MatrixMap {
    matrix: DenseMatrix,
    norm: f64,
}

impl MatrixMap {
    pub fn new(matrix: DenseMatrix) -> Self {
        let cfg = EigConfig {
            max_iterations: 4000,
            tolerance: 1e-13,
            seed: 17,
        };
        let est = linalg::spectral_norm(
            |x, o| matrix.matvec_into(x, o),
            |y, o| matrix.matvec_t_into(y, o),
            matrix.cols(),
            matrix.rows(),
            &cfg,
        );
        // the Gram residual bounds the distance to the nearest eigenvalue of AᵀA
        let norm = (est.value * est.value + est.residual).sqrt() * (1.0 + 1e-12);
        Self { matrix, norm }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

impl LinearMap for MatrixMap {
    fn dim_in(&self) -> usize {
        self.matrix.cols()
    }
    fn dim_out(&self) -> usize {
        self.matrix.rows()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.matvec_into(x, out);
    }
    fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        self.matrix.matvec_t_into(y, out);
    }
    fn norm_estimate(&self) -> NormEstimate {
        NormEstimate {
            value: self.norm,
            certified: false,
        }
    }
}

/// `X ↦ X·1` on row-major n×n matrices; adjoint `y ↦ y·1ᵀ`. `‖A‖ = √n`.
#[derive(Debug, Clone)]
pub struct RowSumMap {
    n: usize,
}

impl RowSumMap {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl LinearMap for RowSumMap {
    fn dim_in(&self) -> usize {
        self.n * self.n
    }
    fn dim_out(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = x[i * self.n..(i + 1) * self.n].iter().sum();
        }
    }
    fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        for (i, &yi) in y.iter().enumerate() {
            out[i * self.n..(i + 1) * self.n].fill(yi);
        }
    }
    fn norm_estimate(&self) -> NormEstimate {
        NormEstimate {
            value: (self.n as f64).sqrt(),
            certified: true,
        }
    }
}

/// Entry sampling `X ↦ (X[i])_{i ∈ Ω}` for a fixed index set; never materialized.
#[derive(Debug, Clone)]
pub struct SampleMap {
    dim_in: usize,
    indices: Vec<usize>,
}

impl SampleMap {
    /// `indices` are flat positions into a buffer of length `dim_in`.
    pub fn new(dim_in: usize, indices: Vec<usize>) -> Self {
        debug_assert!(indices.iter().all(|&i| i < dim_in));
        Self { dim_in, indices }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        let indices = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Self::new(mask.len(), indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

impl LinearMap for SampleMap {
    fn dim_in(&self) -> usize {
        self.dim_in
    }
    fn dim_out(&self) -> usize {
        self.indices.len()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, &i) in out.iter_mut().zip(&self.indices) {
            *o = x[i];
        }
    }
    fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (&yi, &i) in y.iter().zip(&self.indices) {
            out[i] += yi;
        }
    }
    fn norm_estimate(&self) -> NormEstimate {
        NormEstimate {
            value: if self.indices.is_empty() { 0.0 } else { 1.0 },
            certified: true,
        }
    }
}

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Largest relative violation of `⟨Ax, y⟩ = ⟨x, Aᵀy⟩` over random probes.
pub fn adjoint_mismatch(map: &dyn LinearMap, probes: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..probes {
        let x = gaussian(map.dim_in(), &mut rng);
        let y = gaussian(map.dim_out(), &mut rng);
        let lhs = linalg::dot(&map.apply_vec(&x), &y);
        let rhs = linalg::dot(&x, &map.adjoint_vec(&y));
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    worst
}

/// Largest `‖Ax‖/‖x‖` over random probes.
pub fn probe_norm(map: &dyn LinearMap, probes: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    for _ in 0..probes {
        let x = gaussian(map.dim_in(), &mut rng);
        let nx = linalg::norm(&x);
        if nx > 0.0 {
            best = best.max(linalg::norm(&map.apply_vec(&x)) / nx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn maps() -> Vec<Box<dyn LinearMap>> {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = DenseMatrix::from_fn(5, 8, |_, _| rng.random_range(-1.0..1.0));
        vec![
            Box::new(IdentityMap::new(6)),
            Box::new(MatrixMap::new(m)),
            Box::new(RowSumMap::new(5)),
            Box::new(SampleMap::new(20, vec![0, 3, 7, 19])),
        ]
    }

    #[test]
    fn adjoint_consistency() {
        for map in maps() {
            assert!(adjoint_mismatch(map.as_ref(), 50, 1) < 1e-10);
        }
    }

    #[test]
    fn norm_estimate_dominates_probes() {
        for map in maps() {
            let probed = probe_norm(map.as_ref(), 200, 3);
            assert!(map.norm_estimate().value >= probed * (1.0 - 1e-12));
        }
    }

    #[test]
    fn row_sum_norm_is_exact() {
        let map = RowSumMap::new(4);
        let ones = vec![0.5; 16];
        let image = map.apply_vec(&ones);
        assert_eq!(image, vec![2.0; 4]);
        assert!((linalg::norm(&image) / linalg::norm(&ones) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sample_map_from_mask() {
        let map = SampleMap::from_mask(&[true, false, false, true]);
        assert_eq!(map.apply_vec(&[1.0, 2.0, 3.0, 4.0]), vec![1.0, 4.0]);
        assert_eq!(map.adjoint_vec(&[5.0, 6.0]), vec![5.0, 0.0, 0.0, 6.0]);
        assert_eq!(SampleMap::from_mask(&[false; 3]).norm_estimate().value, 0.0);
    }

    proptest! {
        #[test]
        fn adjoint_identity_and_norm_bound(
            x in prop::collection::vec(-2.0..2.0f64, 25),
            y in prop::collection::vec(-2.0..2.0f64, 6),
        ) {
            for map in maps() {
                let (x, y) = (&x[..map.dim_in()], &y[..map.dim_out()]);
                let ax = map.apply_vec(x);
                let lhs = linalg::dot(&ax, y);
                let rhs = linalg::dot(x, &map.adjoint_vec(y));
                prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
                let bound = map.norm_estimate().value * linalg::norm(x);
                prop_assert!(linalg::norm(&ax) <= bound * (1.0 + 1e-12) + 1e-15);
            }
        }
    }
}
