//! Banded matrix storage with the two factorizations the mode operators need:
//! partial-pivot LU for (possibly indefinite) tridiagonal matrices and
//! pivot-free LU with a positivity check for wider symmetric-definite bands.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Square banded matrix, row-window storage: row `i` holds columns
/// `i-kl ..= i+ku` (clamped), at `data[i*(kl+ku+1) + (j-i+kl)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Banded {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        let lo = i.saturating_sub(self.kl);
        if j < lo || j > i + self.ku || j >= self.n {
            return None;
        }
        Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.idx(i, j) {
            Some(k) => self.data[k],
            None => 0.0,
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("({i},{j}) outside band kl={} ku={}", self.kl, self.ku));
        self.data[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("({i},{j}) outside band kl={} ku={}", self.kl, self.ku));
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for j in lo..=hi {
                d[(i, j)] = self.get(i, j);
            }
        }
        d
    }

    /// Max |a_ij| over the band; scale reference for relative checks.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// LU of a tridiagonal matrix with partial pivoting (LAPACK `dgttrf` layout).
/// Handles indefinite matrices.
pub struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    pub fn new(a: &Banded) -> Result<Self> {
        assert!(a.kl <= 1 && a.ku <= 1, "TridiagLu requires a tridiagonal band");
        let n = a.n;
        let mut dl: Vec<f64> = (1..n).map(|i| a.get(i, i - 1)).collect();
        let mut d: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
        let mut du: Vec<f64> = (0..n - 1).map(|i| a.get(i, i + 1)).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if dl[i].abs() <= d[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::SingularFactorization(format!(
                        "zero pivot at row {i}"
                    )));
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            return Err(Error::SingularFactorization("zero final pivot".into()));
        }
        Ok(TridiagLu {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        assert_eq!(rhs.len(), n);
        let mut b = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            let t = self.dl[i] * b[i];
            b[i + 1] -= t;
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        b
    }
}

/// Pivot-free banded LU with positive-pivot check. Valid for matrices that
/// are symmetric positive definite up to a diagonal similarity, which covers
/// every wide-band operator assembled here; a nonpositive pivot therefore
/// signals a mis-specified realization.
pub struct SpdBandLu {
    n: usize,
    bw: usize,
    lu: Vec<f64>,
}

impl SpdBandLu {
    pub fn new(a: &Banded) -> Result<Self> {
        let n = a.n;
        let bw = a.kl.max(a.ku);
        let width = 2 * bw + 1;
        let mut lu = vec![0.0; n * width];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let hi = (i + bw).min(n - 1);
            for j in lo..=hi {
                lu[i * width + (j + bw - i)] = a.get(i, j);
            }
        }
        let at = |lu: &Vec<f64>, i: usize, j: usize| lu[i * width + (j + bw - i)];
        for k in 0..n {
            let pivot = at(&lu, k, k);
            if pivot <= 0.0 {
                return Err(Error::SingularFactorization(format!(
                    "nonpositive pivot {pivot:.3e} at row {k}"
                )));
            }
            let hi = (k + bw).min(n - 1);
            for i in k + 1..=hi {
                let l = at(&lu, i, k) / pivot;
                if l != 0.0 {
                    for j in k..=hi {
                        let v = l * at(&lu, k, j);
                        lu[i * width + (j + bw - i)] -= v;
                    }
                }
                lu[i * width + (k + bw - i)] = l;
            }
        }
        Ok(SpdBandLu { n, bw, lu })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let width = 2 * bw + 1;
        let at = |i: usize, j: usize| self.lu[i * width + (j + bw - i)];
        let mut b = rhs.to_vec();
        for k in 0..n {
            let hi = (k + bw).min(n - 1);
            for i in k + 1..=hi {
                let l = at(i, k);
                if l != 0.0 {
                    b[i] -= l * b[k];
                }
            }
        }
        for k in (0..n).rev() {
            let hi = (k + bw).min(n - 1);
            let mut acc = b[k];
            for j in k + 1..=hi {
                acc -= at(k, j) * b[j];
            }
            b[k] = acc / at(k, k);
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(n: usize, bw: usize, rng: &mut ChaCha8Rng, spd: bool) -> Banded {
        let mut a = Banded::zeros(n, bw, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=(i + bw).min(n - 1) {
                if j > i {
                    let v = rng.gen_range(-1.0..1.0);
                    a.set(i, j, v);
                    a.set(j, i, v);
                }
            }
            let diag = if spd {
                4.0 * bw as f64 + rng.gen_range(0.5..1.5)
            } else {
                rng.gen_range(-2.0..2.0)
            };
            a.set(i, i, diag);
        }
        a
    }

    #[test]
    fn tridiag_lu_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(3..40);
            let a = random_banded(n, 1, &mut rng, false);
            let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lu = match TridiagLu::new(&a) {
                Ok(lu) => lu,
                Err(_) => continue,
            };
            let x = lu.solve(&rhs);
            let r = a.matvec(&x);
            let err: f64 = r
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-9, "residual {err}");
        }
    }

    #[test]
    fn spd_band_lu_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for bw in [1usize, 2, 3] {
            let n = 30;
            let a = random_banded(n, bw, &mut rng, true);
            let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lu = SpdBandLu::new(&a).unwrap();
            let x = lu.solve(&rhs);
            let r = a.matvec(&x);
            let err: f64 = r
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "bw={bw} residual {err}");
        }
    }

    #[test]
    fn spd_band_lu_rejects_indefinite() {
        let mut a = Banded::zeros(4, 2, 2);
        for i in 0..4 {
            a.set(i, i, -1.0);
        }
        assert!(SpdBandLu::new(&a).is_err());
    }
}
