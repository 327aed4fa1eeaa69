//! Largest eigenpairs of a symmetric operator by Lanczos iteration with full
//! reorthogonalization.
//!
//! Only a handful of leading pairs are ever needed, so the operator is
//! applied as a matrix-vector product and never factored. When the Krylov
//! space becomes invariant before the wanted pairs are resolved (repeated
//! eigenvalues, low-rank operators) the iteration continues from a fresh
//! random direction orthogonal to the basis so far.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const START_SEED: u64 = 0x17_4d_a9;
const CHECK_EVERY: usize = 8;
const RESIDUAL_TOL: f64 = 1e-11;

pub(crate) struct Eigenpairs {
    /// Descending.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// The `k` algebraically largest eigenpairs of the `n x n` symmetric
/// operator `apply` (which writes `A x` into its second argument).
pub(crate) fn top_eigenpairs<F>(n: usize, k: usize, mut apply: F) -> Eigenpairs
where
    F: FnMut(&[f64], &mut [f64]),
{
    assert!(
        k >= 1 && k <= n,
        "requested {k} eigenpairs of a {n}x{n} operator"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let max_steps = n;

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut scale = 0.0_f64;
    let mut w = vec![0.0; n];

    let mut q = random_unit(&mut rng, n, &basis).expect("nonempty space");
    loop {
        apply(&q, &mut w);
        let a = dot(&q, &w);
        axpy(-a, &q, &mut w);
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            axpy(-b, prev, &mut w);
        }
        basis.push(q);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        let b = norm(&w);
        scale = scale.max(a.abs()).max(b);
        let steps = basis.len();

        if steps == max_steps {
            break;
        }
        if steps >= k && steps % CHECK_EVERY == 0 && converged(&alpha, &beta, b, k, scale) {
            break;
        }

        if b > scale * 1e-12 && b > f64::MIN_POSITIVE {
            q = w.iter().map(|x| x / b).collect();
            beta.push(b);
        } else {
            // Invariant subspace: restart in the orthogonal complement.
            match random_unit(&mut rng, n, &basis) {
                Some(fresh) => {
                    q = fresh;
                    beta.push(0.0);
                }
                None => break,
            }
        }
    }

    let (values, coeffs) = ritz(&alpha, &beta);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut out = Eigenpairs {
        values: Vec::with_capacity(k),
        vectors: Vec::with_capacity(k),
    };
    for &idx in order.iter().take(k) {
        let mut v = vec![0.0; n];
        for (j, basis_vec) in basis.iter().enumerate() {
            axpy(coeffs[(j, idx)], basis_vec, &mut v);
        }
        let len = norm(&v);
        if len > 0.0 {
            v.iter_mut().for_each(|x| *x /= len);
        }
        out.values.push(values[idx]);
        out.vectors.push(v);
    }
    out
}

fn converged(alpha: &[f64], beta: &[f64], last_beta: f64, k: usize, scale: f64) -> bool {
    let (values, coeffs) = ritz(alpha, beta);
    let m = values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
        .iter()
        .take(k)
        .all(|&idx| (last_beta * coeffs[(m - 1, idx)]).abs() <= RESIDUAL_TOL * scale)
}

/// Eigen-decomposition of the tridiagonal projection.
fn ritz(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for b in basis {
                let c = dot(b, &v);
                axpy(-c, b, &mut v);
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            v.iter_mut().for_each(|x| *x /= len);
            return Some(v);
        }
    }
    None
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(values: &[f64], n: usize) -> impl FnMut(&[f64], &mut [f64]) + '_ {
        move |x, y| {
            for i in 0..n {
                y[i] = dot(&values[i * n..(i + 1) * n], x);
            }
        }
    }

    #[test]
    fn diagonal_operator() {
        let n = 6;
        let mut a = vec![0.0; n * n];
        for (i, v) in [3.0, -7.0, 1.0, 5.0, 0.5, 2.0].into_iter().enumerate() {
            a[i * n + i] = v;
        }
        let pairs = top_eigenpairs(n, 3, dense(&a, n));
        for (got, want) in pairs.values.iter().zip([5.0, 3.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(pairs.vectors[0][3].abs() > 1.0 - 1e-12);
    }

    #[test]
    fn repeated_eigenvalue_yields_orthogonal_pair() {
        // 2 * I on the first two axes, 1 on the third.
        let a = [2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0];
        let pairs = top_eigenpairs(3, 2, dense(&a, 3));
        assert!((pairs.values[0] - 2.0).abs() < 1e-12);
        assert!((pairs.values[1] - 2.0).abs() < 1e-12);
        assert!(dot(&pairs.vectors[0], &pairs.vectors[1]).abs() < 1e-10);
        assert!(pairs.vectors.iter().all(|v| v[2].abs() < 1e-10));
    }

    #[test]
    fn residuals_are_small_on_a_random_matrix() {
        let n = 120;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let pairs = top_eigenpairs(n, 3, dense(&a, n));
        let frob = norm(&a);
        let mut apply = dense(&a, n);
        let mut av = vec![0.0; n];
        for (lambda, v) in pairs.values.iter().zip(&pairs.vectors) {
            apply(v, &mut av);
            let residual: f64 = av
                .iter()
                .zip(v)
                .map(|(x, y)| (x - lambda * y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(residual < 1e-6 * frob, "residual {residual}");
        }
        assert!(pairs.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
