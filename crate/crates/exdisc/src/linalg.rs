//! Symmetric eigenvalue helpers: implicit-shift QL for tridiagonal matrices
//! and a dense fallback (Householder reduction via nalgebra) for wider bands.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// All eigenvalues of a symmetric tridiagonal matrix, ascending.
/// `d` is the diagonal (length n), `e` the off-diagonal (length n-1).
pub fn tridiag_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    assert_eq!(e.len(), n - 1, "off-diagonal length");
    let mut d = d.to_vec();
    let mut ev = vec![0.0; n];
    ev[..n - 1].copy_from_slice(e);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if ev[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 80 {
                return Err(Error::SingularFactorization(
                    "QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * ev[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + ev[l] / (g + sign_r);
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflowed = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * ev[i];
                let b = c * ev[i];
                r = f.hypot(g);
                ev[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    ev[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            ev[l] = g;
            ev[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of a dense symmetric matrix, ascending.
pub fn dense_sym_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ql_matches_dense_on_random_tridiagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 5, 40, 150] {
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let e: Vec<f64> = (0..n.saturating_sub(1))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let got = tridiag_eigenvalues(&d, &e).unwrap();
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                a[(i, i)] = d[i];
                if i + 1 < n {
                    a[(i, i + 1)] = e[i];
                    a[(i + 1, i)] = e[i];
                }
            }
            let want = dense_sym_eigenvalues(&a);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10 * (1.0 + w.abs()), "{g} vs {w}");
            }
        }
    }

    #[test]
    fn ql_diag_identity() {
        let got = tridiag_eigenvalues(&[2.0, 1.0], &[0.0]).unwrap();
        assert_eq!(got, vec![1.0, 2.0]);
    }
}
