//! Direct solver for tridiagonal matrices with a few long-range couplings.
//!
//! The long-range entries are moved into a small border by taking one end of
//! each out of the tridiagonal ordering. The remaining tridiagonal block is
//! factored once (no pivoting) and the border is handled through its Schur
//! complement. Intended for matrices with a positive definite Hermitian part,
//! such as the Crank–Nicolson operator `W + i dt/2 K`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

#[derive(Debug, Clone)]
pub struct BorderedSolver {
    n: usize,
    /// Original indices of the tridiagonal block, in order.
    interior: Vec<usize>,
    border: Vec<usize>,
    /// Multipliers and pivots of the tridiagonal LU, plus the super-diagonal.
    mult: Vec<C>,
    pivot: Vec<C>,
    sup: Vec<C>,
    /// `A11⁻¹ A12`, one column per border index, in interior numbering.
    coupling: Vec<Vec<C>>,
    /// Sparse rows of `A21`: (interior position, value).
    border_rows: Vec<Vec<(usize, C)>>,
    schur: nalgebra::LU<C, nalgebra::Dyn, nalgebra::Dyn>,
}

impl BorderedSolver {
    /// `lower[i] = A[i+1][i]`, `upper[i] = A[i][i+1]`; `extras` holds the
    /// entries with `|i - j| > 1`.
    pub fn new(diag: &[C], upper: &[C], lower: &[C], extras: &[(usize, usize, C)]) -> Result<Self> {
        let n = diag.len();
        let mut border: Vec<usize> = extras
            .iter()
            .filter(|(i, j, v)| i.abs_diff(*j) > 1 && *v != C::new(0.0, 0.0))
            .map(|(i, j, _)| *i.max(j))
            .collect();
        border.sort_unstable();
        border.dedup();
        let mut position = vec![None; n];
        let interior: Vec<usize> = (0..n).filter(|i| border.binary_search(i).is_err()).collect();
        for (r, &i) in interior.iter().enumerate() {
            position[i] = Some(r);
        }

        // entry lookup covering bands and extras
        let entry = |i: usize, j: usize| -> C {
            let mut v = C::new(0.0, 0.0);
            if i == j {
                v += diag[i];
            } else if j == i + 1 {
                v += upper[i];
            } else if i == j + 1 {
                v += lower[j];
            }
            for &(a, b, e) in extras {
                if a == i && b == j {
                    v += e;
                }
            }
            v
        };

        let m = interior.len();
        let mut sub = vec![C::new(0.0, 0.0); m.saturating_sub(1)];
        let mut sup = vec![C::new(0.0, 0.0); m.saturating_sub(1)];
        let mut d = vec![C::new(0.0, 0.0); m];
        for r in 0..m {
            let i = interior[r];
            d[r] = diag[i];
            if r + 1 < m && interior[r + 1] == i + 1 {
                sup[r] = upper[i];
                sub[r] = lower[i];
            }
        }
        for &(a, b, e) in extras {
            if let (Some(ra), Some(rb)) = (position[a], position[b]) {
                if ra == rb {
                    d[ra] += e;
                } else if ra.abs_diff(rb) == 1 {
                    if rb == ra + 1 {
                        sup[ra] += e;
                    } else {
                        sub[rb] += e;
                    }
                } else {
                    return Err(Error::SolverBreakdown {
                        step: 0,
                        reason: "long-range entry left in the tridiagonal block",
                    });
                }
            }
        }

        let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut mult = vec![C::new(0.0, 0.0); m];
        let mut pivot = vec![C::new(0.0, 0.0); m];
        for r in 0..m {
            pivot[r] = if r == 0 {
                d[0]
            } else {
                mult[r] = sub[r - 1] / pivot[r - 1];
                d[r] - mult[r] * sup[r - 1]
            };
            if !(pivot[r].norm() > 1e-14 * scale) || !pivot[r].re.is_finite() {
                return Err(Error::SolverBreakdown {
                    step: 0,
                    reason: "zero pivot in tridiagonal factorization",
                });
            }
        }

        let k = border.len();
        let mut solver = Self {
            n,
            interior,
            border,
            mult,
            pivot,
            sup,
            coupling: Vec::with_capacity(k),
            border_rows: Vec::with_capacity(k),
            schur: DMatrix::<C>::identity(0, 0).lu(),
        };

        let neighbours = |j: usize| -> Vec<usize> {
            let mut v: Vec<usize> = Vec::new();
            if j > 0 {
                v.push(j - 1);
            }
            if j + 1 < n {
                v.push(j + 1);
            }
            for &(a, b, _) in extras {
                if b == j {
                    v.push(a);
                }
                if a == j {
                    v.push(b);
                }
            }
            v.sort_unstable();
            v.dedup();
            v.retain(|&i| position[i].is_some());
            v
        };

        for &j in &solver.border.clone() {
            let mut col = vec![C::new(0.0, 0.0); m];
            let mut row = Vec::new();
            for i in neighbours(j) {
                let r = position[i].unwrap();
                col[r] = entry(i, j);
                let v = entry(j, i);
                if v != C::new(0.0, 0.0) {
                    row.push((r, v));
                }
            }
            solver.solve_interior(&mut col);
            solver.coupling.push(col);
            solver.border_rows.push(row);
        }

        let mut s = DMatrix::<C>::zeros(k, k);
        for (p, &bp) in solver.border.iter().enumerate() {
            for (q, &bq) in solver.border.iter().enumerate() {
                let correction: C = solver.border_rows[p]
                    .iter()
                    .map(|&(r, v)| v * solver.coupling[q][r])
                    .sum();
                s[(p, q)] = entry(bp, bq) - correction;
            }
        }
        let lu = s.lu();
        if k > 0 && !lu.is_invertible() {
            return Err(Error::SolverBreakdown {
                step: 0,
                reason: "singular border Schur complement",
            });
        }
        solver.schur = lu;
        Ok(solver)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn border(&self) -> &[usize] {
        &self.border
    }

    fn solve_interior(&self, b: &mut [C]) {
        let m = b.len();
        for r in 1..m {
            let prev = b[r - 1];
            b[r] -= self.mult[r] * prev;
        }
        if m == 0 {
            return;
        }
        b[m - 1] /= self.pivot[m - 1];
        for r in (0..m - 1).rev() {
            let next = b[r + 1];
            b[r] = (b[r] - self.sup[r] * next) / self.pivot[r];
        }
    }

    /// Solves `A x = rhs` in place.
    pub fn solve(&self, rhs: &mut [C]) -> Result<()> {
        let mut y: Vec<C> = self.interior.iter().map(|&i| rhs[i]).collect();
        self.solve_interior(&mut y);
        if !self.border.is_empty() {
            let mut r2 = DVector::<C>::from_iterator(
                self.border.len(),
                self.border.iter().enumerate().map(|(p, &j)| {
                    rhs[j]
                        - self.border_rows[p]
                            .iter()
                            .map(|&(r, v)| v * y[r])
                            .sum::<C>()
                }),
            );
            if !self.schur.solve_mut(&mut r2) {
                return Err(Error::SolverBreakdown {
                    step: 0,
                    reason: "border solve failed",
                });
            }
            for (q, &j) in self.border.iter().enumerate() {
                rhs[j] = r2[q];
                for (yr, cr) in y.iter_mut().zip(&self.coupling[q]) {
                    *yr -= cr * r2[q];
                }
            }
        }
        for (r, &i) in self.interior.iter().enumerate() {
            rhs[i] = y[r];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(diag: &[C], upper: &[C], lower: &[C], extras: &[(usize, usize, C)]) -> DMatrix<C> {
        let n = diag.len();
        let mut a = DMatrix::<C>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] += diag[i];
            if i + 1 < n {
                a[(i, i + 1)] += upper[i];
                a[(i + 1, i)] += lower[i];
            }
        }
        for &(i, j, v) in extras {
            a[(i, j)] += v;
        }
        a
    }

    #[test]
    fn matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        let mut c = || C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let diag: Vec<C> = (0..n).map(|_| c() + C::new(6.0, 0.0)).collect();
        let upper: Vec<C> = (0..n - 1).map(|_| c()).collect();
        let lower: Vec<C> = (0..n - 1).map(|_| c()).collect();
        let extras = vec![(3, 30, c()), (30, 3, c()), (4, 31, c()), (31, 4, c()), (3, 31, c()), (31, 3, c())];
        let rhs: Vec<C> = (0..n).map(|_| c()).collect();

        let solver = BorderedSolver::new(&diag, &upper, &lower, &extras).unwrap();
        assert_eq!(solver.border(), &[30, 31]);
        let mut x = rhs.clone();
        solver.solve(&mut x).unwrap();

        let a = dense(&diag, &upper, &lower, &extras);
        let r = &a * DVector::from_vec(x) - DVector::from_vec(rhs);
        assert!(r.norm() < 1e-12, "residual {}", r.norm());
    }

    #[test]
    fn plain_tridiagonal() {
        let n = 10;
        let diag = vec![C::new(2.0, 1.0); n];
        let off = vec![C::new(-1.0, 0.0); n - 1];
        let solver = BorderedSolver::new(&diag, &off, &off, &[]).unwrap();
        assert!(solver.border().is_empty());
        let rhs: Vec<C> = (0..n).map(|i| C::new(i as f64, 1.0)).collect();
        let mut x = rhs.clone();
        solver.solve(&mut x).unwrap();
        let a = dense(&diag, &off, &off, &[]);
        let r = &a * DVector::from_vec(x) - DVector::from_vec(rhs);
        assert!(r.norm() < 1e-13);
    }

    #[test]
    fn zero_pivot_is_reported() {
        let diag = vec![C::new(0.0, 0.0); 3];
        let off = vec![C::new(1.0, 0.0); 2];
        assert!(matches!(
            BorderedSolver::new(&diag, &off, &off, &[]),
            Err(Error::SolverBreakdown { .. })
        ));
    }
}
