//! Crank–Nicolson time stepping.

use std::sync::Arc;

use num_complex::Complex64;

use super::banded::BorderedSolver;
use super::grid::{GridState, SideProbabilities};
use super::hamiltonian::DiscreteHamiltonian;
use crate::error::{positive, Error, Result};

type C = Complex64;

/// One recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSample {
    pub t: f64,
    pub norm: f64,
    pub sides: SideProbabilities,
    /// `⟨reference, ψ(t)⟩` for each supplied reference.
    pub overlaps: Vec<C>,
}

#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub dt: f64,
    pub steps: usize,
    pub samples: Vec<EvolutionSample>,
    pub max_norm_drift: f64,
    pub final_state: GridState,
}

impl EvolutionReport {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn p_left(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sides.left).collect()
    }

    pub fn p_right(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sides.right).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct EvolveOptions {
    /// Record every `record_every` steps (`0` is treated as `1`).
    pub record_every: usize,
    pub references: Vec<GridState>,
}

/// Stepper for `(W + i dt/2 K) ψ' = (W - i dt/2 K) ψ`, which is
/// `(1 + i dt/2 H) ψ' = (1 - i dt/2 H) ψ` multiplied through by `W`.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    hamiltonian: &'a DiscreteHamiltonian,
    solver: BorderedSolver,
    dt: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(hamiltonian: &'a DiscreteHamiltonian, dt: f64) -> Result<Self> {
        positive("dt", dt)?;
        let solver = hamiltonian.solver_for(C::new(1.0, 0.0), C::new(0.0, 0.5 * dt))?;
        Ok(Self { hamiltonian, solver, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `psi` by one step in place.
    pub fn step(&self, psi: &mut [C]) -> Result<()> {
        let k = self.hamiltonian.apply_stiffness(psi);
        let half = C::new(0.0, 0.5 * self.dt);
        for ((p, kp), w) in psi.iter_mut().zip(&k).zip(self.hamiltonian.weights()) {
            *p = *p * *w - half * kp;
        }
        self.solver.solve(psi)
    }
}

/// Evolves `psi0` for `steps` steps of size `dt`.
pub fn evolve(
    hamiltonian: &DiscreteHamiltonian,
    psi0: &GridState,
    dt: f64,
    steps: usize,
    opts: &EvolveOptions,
) -> Result<EvolutionReport> {
    if !Arc::ptr_eq(psi0.layout(), hamiltonian.layout()) && **psi0.layout() != **hamiltonian.layout() {
        return Err(Error::Grid("initial state lives on a different grid".into()));
    }
    let propagator = Propagator::new(hamiltonian, dt)?;
    let every = opts.record_every.max(1);
    let norm0 = psi0.norm();
    let mut state = psi0.clone();
    let mut samples = Vec::with_capacity(steps / every + 2);
    let mut max_drift = 0.0f64;

    let record = |t: f64, s: &GridState| EvolutionSample {
        t,
        norm: s.norm(),
        sides: s.side_probabilities(),
        overlaps: opts.references.iter().map(|r| r.inner(s)).collect(),
    };
    samples.push(record(0.0, &state));

    for k in 1..=steps {
        propagator
            .step(state.amplitudes_mut())
            .map_err(|e| match e {
                Error::SolverBreakdown { reason, .. } => Error::SolverBreakdown { step: k, reason },
                other => other,
            })?;
        let norm = state.norm();
        if !norm.is_finite() {
            return Err(Error::SolverBreakdown {
                step: k,
                reason: "non-finite amplitudes",
            });
        }
        max_drift = max_drift.max((norm - norm0).abs());
        if k % every == 0 || k == steps {
            samples.push(record(k as f64 * dt, &state));
        }
    }

    Ok(EvolutionReport {
        dt,
        steps,
        samples,
        max_norm_drift: max_drift,
        final_state: state,
    })
}

/// Period of `series` sampled at `times`, from the mean spacing of upward
/// crossings of its midrange. `None` with fewer than two crossings.
pub fn crossing_period(times: &[f64], series: &[f64]) -> Option<f64> {
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let mid = 0.5 * (lo + hi);
    let mut crossings = Vec::new();
    for k in 1..series.len() {
        let (a, b) = (series[k - 1] - mid, series[k] - mid);
        if a < 0.0 && b >= 0.0 {
            let s = a / (a - b);
            crossings.push(times[k - 1] + s * (times[k] - times[k - 1]));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    Some((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::grid::GridSpec;
    use crate::dynamics::hamiltonian::discretize;
    use crate::extensions::build_two_point;

    #[test]
    fn crossing_period_of_a_cosine() {
        let t: Vec<f64> = (0..2000).map(|k| k as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|&t| (2.0 * std::f64::consts::PI * t / 3.0).cos()).collect();
        let p = crossing_period(&t, &y).unwrap();
        assert!((p - 3.0).abs() < 1e-4);
    }

    #[test]
    fn eigenstate_only_picks_up_a_phase() {
        let ext = build_two_point(2.0, 1.0, 0.3).unwrap();
        let grid = GridSpec::two_point(8.0, 1024, 0.3).unwrap();
        let ham = discretize(&ext.into(), &grid).unwrap();
        let (lambda, psi) = ham.eigenpair_near(-4.0, 1e-14).unwrap();
        let opts = EvolveOptions {
            record_every: 50,
            references: vec![psi.clone()],
        };
        let dt = 0.01;
        let report = evolve(&ham, &psi, dt, 200, &opts).unwrap();
        let last = report.samples.last().unwrap();
        assert!((last.overlaps[0].norm() - 1.0).abs() < 1e-10);
        let phase = -(2.0 * (0.5 * dt * lambda).atan()) * 200.0;
        assert!((last.overlaps[0].arg() - phase.sin().atan2(phase.cos())).abs() < 1e-8);
        assert!(report.max_norm_drift < 1e-12);
    }
}
