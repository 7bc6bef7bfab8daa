//! Small dense and banded complex linear solvers, both with partial pivoting.
//!
//! The dense path serves the 4-unknown boundary-matching system; the banded
//! path serves the lattice discretization, whose matrix is tridiagonal apart
//! from the emitter block (bandwidth 3 with the emitter amplitudes ordered
//! next to the coupled site).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivot magnitudes below this are reported as a singular system.
const PIVOT_FLOOR: f64 = 1e-300;

/// Solve `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is row-major, `n` rows of `n` entries.
pub fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for j in 0..n {
        let (p, mag) = (j..n)
            .map(|i| (i, a[i][j].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot column");
        if mag < PIVOT_FLOOR {
            return Err(Error::SingularSystem { pivot: mag });
        }
        if p != j {
            a.swap(j, p);
            b.swap(j, p);
        }
        let piv = a[j][j];
        for i in j + 1..n {
            let l = a[i][j] / piv;
            if l != Complex64::ZERO {
                for c in j + 1..n {
                    let ajc = a[j][c];
                    a[i][c] -= l * ajc;
                }
                let bj = b[j];
                b[i] -= l * bj;
            }
        }
    }
    let mut x = vec![Complex64::ZERO; n];
    for j in (0..n).rev() {
        let mut s = b[j];
        for c in j + 1..n {
            s -= a[j][c] * x[c];
        }
        x[j] = s / a[j][j];
    }
    Ok(x)
}

/// Banded complex matrix in LAPACK-style storage: entry (i, j) lives at
/// `ab[kl + ku + i − j][j]`, with `kl` extra rows on top absorbing the fill
/// produced by row interchanges.
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<Vec<Complex64>>,
}

impl Banded {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        Banded {
            n,
            kl,
            ku,
            ab: vec![vec![Complex64::ZERO; n]; 2 * kl + ku + 1],
        }
    }

    /// Set entry (i, j); must lie within the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(j <= i + self.ku && i <= j + self.kl, "({i},{j}) out of band");
        self.ab[self.kl + self.ku + i - j][j] = v;
    }

    /// Solve `self * x = b`, consuming the factorization workspace.
    pub fn solve(mut self, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        assert_eq!(b.len(), n);
        let d = kl + ku; // row offset of the diagonal in ab
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let (p, mag) = (j..=last)
                .map(|i| (i, self.ab[d + i - j][j].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty pivot column");
            if mag < PIVOT_FLOOR {
                return Err(Error::SingularSystem { pivot: mag });
            }
            if p != j {
                // Interchange rows j and p across the (filled) band.
                let cmax = (j + ku + kl).min(n - 1);
                for c in j..=cmax {
                    let rj = d + j - c;
                    let rp = d + p - c;
                    let t = self.ab[rj][c];
                    self.ab[rj][c] = self.ab[rp][c];
                    self.ab[rp][c] = t;
                }
                b.swap(j, p);
            }
            let piv = self.ab[d][j];
            for i in j + 1..=last {
                let l = self.ab[d + i - j][j] / piv;
                if l != Complex64::ZERO {
                    let cmax = (j + ku + kl).min(n - 1);
                    for c in j + 1..=cmax {
                        let ajc = self.ab[d + j - c][c];
                        self.ab[d + i - c][c] -= l * ajc;
                    }
                    let bj = b[j];
                    b[i] -= l * bj;
                }
                self.ab[d + i - j][j] = l;
            }
        }
        let mut x = vec![Complex64::ZERO; n];
        for j in (0..n).rev() {
            let mut s = b[j];
            let cmax = (j + ku + kl).min(n - 1);
            for c in j + 1..=cmax {
                s -= self.ab[d + j - c][c] * x[c];
            }
            x[j] = s / self.ab[d][j];
        }
        Ok(x)
    }
}
