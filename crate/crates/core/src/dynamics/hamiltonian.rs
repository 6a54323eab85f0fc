//! Finite-element discretization of `-d²/dx²` with a point interaction.
//!
//! The operator is assembled from its quadratic form
//! `Σ_regions ∫ |y'|² + Yᴴ Q Y`, where `Y` collects the interface unknowns.
//! Piecewise linear elements with a lumped (trapezoid) mass give
//! `K v = λ W v`; the interface conditions are the natural conditions of the
//! form, so no constraint rows appear. For the two-point family
//! `Q = Eᵀ B⁻¹ E` with `E` taking the value jumps at `±h`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::banded::BorderedSolver;
use super::grid::{GridSpec, GridState, Layout};
use crate::error::{Error, Result};
use crate::extensions::{OnePointExtension, PointInteraction};
use crate::piecewise::Side;

type C = Complex64;

/// Relative asymmetry accepted for the weighted stiffness matrix.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// `H = W⁻¹ K` with `K` real symmetric and `W` the diagonal trapezoid weights.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    layout: Arc<Layout>,
    weights: Vec<f64>,
    diag: Vec<f64>,
    /// `K[i][i+1]`
    upper: Vec<f64>,
    /// `K[i+1][i]`
    lower: Vec<f64>,
    /// Entries with `|i - j| > 1`.
    far: Vec<(usize, usize, f64)>,
}

/// Discretizes the interaction on `grid` with Dirichlet walls at `±L`.
pub fn discretize(ext: &PointInteraction, grid: &GridSpec) -> Result<DiscreteHamiltonian> {
    let duplicate = !matches!(ext, PointInteraction::OnePoint(OnePointExtension::Delta { .. }));
    let layout = Arc::new(Layout::new(grid, duplicate));
    let n = layout.len();
    let dx = layout.dx();
    let stiff = 1.0 / dx;

    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n.saturating_sub(1)];
    diag[0] += stiff;
    diag[n - 1] += stiff;
    for i in 0..n - 1 {
        if layout.regions()[i] == layout.regions()[i + 1] {
            diag[i] += stiff;
            diag[i + 1] += stiff;
            upper[i] -= stiff;
        }
    }
    let mut lower = upper.clone();

    let mut block: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut add_block = |slots: &[usize], q: &[Vec<f64>]| {
        for (a, &i) in slots.iter().enumerate() {
            for (b, &j) in slots.iter().enumerate() {
                if q[a][b] != 0.0 {
                    *block.entry((i, j)).or_insert(0.0) += q[a][b];
                }
            }
        }
    };
    let slot = |x: f64, side: Side| {
        layout
            .slot(x, side)
            .ok_or_else(|| Error::Grid(format!("no interface unknown at x = {x}")))
    };

    match ext {
        PointInteraction::TwoPoint(t) => {
            let h = t.h();
            let slots = [
                slot(-h, Side::Left)?,
                slot(-h, Side::Right)?,
                slot(h, Side::Left)?,
                slot(h, Side::Right)?,
            ];
            let inv = t.coupling().inverse()?;
            let e = [[-1.0, 1.0, 0.0, 0.0], [0.0, 0.0, -1.0, 1.0]];
            let q: Vec<Vec<f64>> = (0..4)
                .map(|a| {
                    (0..4)
                        .map(|b| {
                            let mut s = 0.0;
                            for r in 0..2 {
                                for c in 0..2 {
                                    s += e[r][a] * inv[r][c] * e[c][b];
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect();
            add_block(&slots, &q);
        }
        PointInteraction::OnePoint(OnePointExtension::DeltaPrime { alpha, beta }) => {
            let slots = [slot(0.0, Side::Left)?, slot(0.0, Side::Right)?];
            let d = -0.5 * (alpha + beta);
            let o = -0.5 * (alpha - beta);
            add_block(&slots, &[vec![d, o], vec![o, d]]);
        }
        PointInteraction::OnePoint(OnePointExtension::Delta { c }) => {
            let i = layout
                .node_index(0.0)
                .ok_or_else(|| Error::Grid("no node at the origin".into()))?;
            add_block(&[i], &[vec![*c]]);
        }
    }

    let mut far = Vec::new();
    for ((i, j), v) in block {
        if i == j {
            diag[i] += v;
        } else if j == i + 1 {
            upper[i] += v;
        } else if i == j + 1 {
            lower[j] += v;
        } else {
            far.push((i, j, v));
        }
    }

    let hamiltonian = DiscreteHamiltonian {
        weights: layout.weights(),
        layout,
        diag,
        upper,
        lower,
        far,
    };
    let defect = hamiltonian.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            asymmetry: defect,
            tolerance: HERMITICITY_TOL,
        });
    }
    Ok(hamiltonian)
}

impl DiscreteHamiltonian {
    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Stiffness entries farther than one step from the diagonal.
    pub fn far_couplings(&self) -> &[(usize, usize, f64)] {
        &self.far
    }

    /// Largest `|i - j|` over nonzero stiffness entries.
    pub fn bandwidth(&self) -> usize {
        let band = usize::from(self.upper.iter().chain(&self.lower).any(|&v| v != 0.0));
        self.far.iter().map(|(i, j, _)| i.abs_diff(*j)).fold(band, usize::max)
    }

    /// `K[i][j]`.
    pub fn stiffness(&self, i: usize, j: usize) -> f64 {
        let mut v = if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.upper[i]
        } else if i == j + 1 {
            self.lower[j]
        } else {
            0.0
        };
        for &(a, b, e) in &self.far {
            if a == i && b == j {
                v += e;
            }
        }
        v
    }

    /// `H[i][j] = K[i][j] / w_i`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.stiffness(i, j) / self.weights[i]
    }

    /// Row indices carrying an entry with `|i - j| > 1`.
    pub fn far_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.far.iter().map(|(i, _, _)| *i).collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// `max |S - Sᴴ| / max |S|` for `S = W^{-1/2} K W^{-1/2}`, the matrix of
    /// `H` in the discrete inner product.
    pub fn hermiticity_defect(&self) -> f64 {
        let s = |i: usize, j: usize, v: f64| v / (self.weights[i] * self.weights[j]).sqrt();
        let mut scale = 0.0f64;
        let mut defect = 0.0f64;
        for i in 0..self.dim() {
            scale = scale.max(s(i, i, self.diag[i]).abs());
        }
        for i in 0..self.upper.len() {
            let a = s(i, i + 1, self.upper[i]);
            let b = s(i + 1, i, self.lower[i]);
            scale = scale.max(a.abs()).max(b.abs());
            defect = defect.max((a - b).abs());
        }
        for &(i, j, v) in &self.far {
            let a = s(i, j, v);
            let b = s(j, i, self.stiffness(j, i));
            scale = scale.max(a.abs());
            defect = defect.max((a - b).abs());
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// `K ψ`.
    pub fn apply_stiffness(&self, psi: &[C]) -> Vec<C> {
        let n = self.dim();
        let mut out: Vec<C> = (0..n).map(|i| psi[i] * self.diag[i]).collect();
        for i in 0..n - 1 {
            out[i] += psi[i + 1] * self.upper[i];
            out[i + 1] += psi[i] * self.lower[i];
        }
        for &(i, j, v) in &self.far {
            out[i] += psi[j] * v;
        }
        out
    }

    /// `H ψ`.
    pub fn apply(&self, psi: &[C]) -> Vec<C> {
        let mut out = self.apply_stiffness(psi);
        for (o, w) in out.iter_mut().zip(&self.weights) {
            *o /= *w;
        }
        out
    }

    /// Factorization of `a W + b K`.
    pub(crate) fn solver_for(&self, a: C, b: C) -> Result<BorderedSolver> {
        let diag: Vec<C> = self
            .weights
            .iter()
            .zip(&self.diag)
            .map(|(&w, &k)| a * w + b * k)
            .collect();
        let upper: Vec<C> = self.upper.iter().map(|&k| b * k).collect();
        let lower: Vec<C> = self.lower.iter().map(|&k| b * k).collect();
        let far: Vec<(usize, usize, C)> = self.far.iter().map(|&(i, j, k)| (i, j, b * k)).collect();
        BorderedSolver::new(&diag, &upper, &lower, &far)
    }

    /// `‖Hψ - λψ‖ / ‖ψ‖` in the trapezoid norm.
    pub fn residual(&self, state: &GridState, lambda: f64) -> f64 {
        let psi = state.amplitudes();
        let hpsi = self.apply(psi);
        let r: Vec<C> = hpsi.iter().zip(psi).map(|(a, b)| a - b * lambda).collect();
        let r = GridState::new(Arc::clone(&self.layout), r).expect("finite residual");
        r.norm() / state.norm()
    }

    /// Rayleigh quotient `ψᴴKψ / ψᴴWψ`.
    pub fn rayleigh(&self, state: &GridState) -> f64 {
        let psi = state.amplitudes();
        let k: C = self
            .apply_stiffness(psi)
            .iter()
            .zip(psi)
            .map(|(kp, p)| p.conj() * kp)
            .sum();
        k.re / state.norm().powi(2)
    }

    /// Discrete eigenpair with eigenvalue closest to `shift`, by shifted
    /// inverse iteration until the relative residual drops below `tol` or
    /// stops improving. The returned state is normalized and its largest
    /// amplitude made real positive.
    pub fn eigenpair_near(&self, shift: f64, tol: f64) -> Result<(f64, GridState)> {
        const MAX_ITER: usize = 200;
        let solver = self.solver_for(C::new(-shift, 0.0), C::new(1.0, 0.0))?;
        let n = self.dim();
        let mut v: Vec<C> = (0..n).map(|i| C::new(1.0 + (i % 7) as f64 * 0.1, 0.0)).collect();
        let mut lambda = shift;
        let mut last = f64::INFINITY;
        for it in 0..MAX_ITER {
            let mut rhs: Vec<C> = v.iter().zip(&self.weights).map(|(a, w)| a * *w).collect();
            solver.solve(&mut rhs).map_err(|_| Error::SolverBreakdown {
                step: it,
                reason: "inverse iteration solve failed",
            })?;
            let state = GridState::new(Arc::clone(&self.layout), rhs)?.normalized()?;
            lambda = self.rayleigh(&state);
            let r = self.residual(&state, lambda);
            v = state.amplitudes().to_vec();
            if r <= tol * lambda.abs().max(1.0) || (it > 2 && r > 0.5 * last) {
                break;
            }
            last = r;
        }
        let big = v
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(C::new(1.0, 0.0));
        let phase = big.conj() / big.norm();
        let state = GridState::new(Arc::clone(&self.layout), v.iter().map(|a| a * phase).collect())?;
        Ok((lambda, state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::{build_two_point, local_beta_for};
    use crate::spectra::even_state;

    fn two_point(alpha: f64, beta: f64, h: f64, n: usize) -> DiscreteHamiltonian {
        let ext = build_two_point(alpha, beta, h).unwrap();
        let grid = GridSpec::two_point(8.0, n, h).unwrap();
        discretize(&ext.into(), &grid).unwrap()
    }

    #[test]
    fn local_extension_has_no_far_entries() {
        let beta = local_beta_for(2.0, 0.5).unwrap();
        let ham = two_point(2.0, beta, 0.5, 1024);
        assert!(ham.far_couplings().iter().all(|(_, _, v)| v.abs() < 1e-9 * ham.diag[0]));
    }

    #[test]
    fn entangled_extension_couples_interface_rows_only() {
        let ham = two_point(1.0, 1.0, 0.5, 1024);
        let layout = ham.layout().clone();
        let rows = ham.far_rows();
        assert_eq!(rows.len(), 4);
        for r in rows {
            assert!(layout.sides()[r].is_some());
        }
        assert!(ham.hermiticity_defect() <= HERMITICITY_TOL);
    }

    #[test]
    fn interior_rows_are_the_second_difference() {
        let ham = two_point(2.0, 1.0, 0.3, 1024);
        let dx = ham.layout().dx();
        let i = 10;
        assert!((ham.entry(i, i) - 2.0 / (dx * dx)).abs() < 1e-9 / (dx * dx));
        assert!((ham.entry(i, i + 1) + 1.0 / (dx * dx)).abs() < 1e-9 / (dx * dx));
    }

    #[test]
    fn inverse_iteration_finds_the_even_level() {
        let ham = two_point(2.0, 1.0, 0.3, 2048);
        let (lambda, state) = ham.eigenpair_near(-4.2, 1e-12).unwrap();
        assert!((lambda + 4.0).abs() < 1e-3, "lambda = {lambda}");
        assert!(ham.residual(&state, lambda) < 1e-8);
        let f = GridState::sample(ham.layout().clone(), &even_state(2.0, 0.3).unwrap().function).unwrap();
        assert!(ham.residual(&f, -4.0) < 1e-2);
    }
}
