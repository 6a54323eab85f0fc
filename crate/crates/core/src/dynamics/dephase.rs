//! Random position-diagonal phase kicks.
//!
//! Member `j` of the ensemble multiplies every amplitude right of a threshold
//! by `e^{iθ_j}`. Because the kick is a pure phase, member densities are the
//! input density itself; overlaps are formed from the left and right parts of
//! each reference separately, so the ensemble never has to be materialized.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{side_probabilities_of, GridState, SideProbabilities};
use crate::error::{Error, Result};

type C = Complex64;

/// Where the kick angles come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSource {
    /// `θ_j` uniform on `[0, 2π)` from a generator seeded with `seed + j`.
    Uniform { seed: u64 },
    /// Explicit angles, one per member.
    Fixed(Vec<f64>),
}

impl PhaseSource {
    pub fn angles(&self, ensemble: usize) -> Result<Vec<f64>> {
        match self {
            Self::Uniform { seed } => Ok((0..ensemble)
                .map(|j| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(j as u64));
                    rng.random_range(0.0..std::f64::consts::TAU)
                })
                .collect()),
            Self::Fixed(theta) => {
                if theta.len() != ensemble {
                    return Err(Error::Grid(format!(
                        "expected {ensemble} fixed phases, got {}",
                        theta.len()
                    )));
                }
                Ok(theta.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephaseOptions {
    pub ensemble: usize,
    pub phases: PhaseSource,
    /// Kicked region is `x > threshold`.
    pub threshold: f64,
}

impl DephaseOptions {
    pub fn uniform(ensemble: usize, seed: u64) -> Self {
        Self {
            ensemble,
            phases: PhaseSource::Uniform { seed },
            threshold: 0.0,
        }
    }
}

/// Ensemble statistics for one reference state.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceStats {
    /// Mean of `|⟨ref, ψ_j⟩|²`.
    pub mean_overlap_sq: f64,
    /// `|a|² + |b|²`, the phase-averaged value, with `a`, `b` the overlaps
    /// restricted to the unkicked and kicked regions.
    pub incoherent: f64,
    /// `|mean_j 2 Re(conj(a) b e^{iθ_j})|`, the surviving interference term.
    pub cross_term: f64,
    /// Mean `|⟨ref, ψ_j⟩|`.
    pub mean_overlap_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephaseReport {
    pub ensemble: usize,
    pub sides_before: SideProbabilities,
    /// Ensemble-averaged side probabilities.
    pub sides_after: SideProbabilities,
    /// Ensemble-averaged density.
    pub mean_density: Vec<f64>,
    /// Whether every member's side probabilities equal the input's bit for bit.
    pub members_invariant: bool,
    /// Largest `| |ψ_j|² - |ψ|² |` over all members, with `ψ_j` formed explicitly.
    pub max_kick_deviation: f64,
    pub references: Vec<ReferenceStats>,
    /// `|mean_j ⟨ref₀, ψ_j⟩ conj⟨ref₁, ψ_j⟩|` when two references are given.
    pub coherence: Option<f64>,
}

/// `ψ` with amplitudes right of `threshold` multiplied by `e^{iθ}`.
pub fn kicked_member(psi: &GridState, theta: f64, threshold: f64) -> GridState {
    let layout = psi.layout();
    let kick = C::from_polar(1.0, theta);
    let amps = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| if layout.is_right_of(i, threshold) { a * kick } else { a })
        .collect();
    GridState::new(layout.clone(), amps).expect("kick keeps amplitudes finite")
}

/// Splits `⟨reference, ψ⟩` into its unkicked and kicked parts.
fn split_overlap(reference: &GridState, psi: &GridState, threshold: f64) -> (C, C) {
    let layout = psi.layout();
    let w = layout.weights();
    let (mut a, mut b) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for (i, (r, p)) in reference.amplitudes().iter().zip(psi.amplitudes()).enumerate() {
        let term = r.conj() * p * w[i];
        if layout.is_right_of(i, threshold) {
            b += term;
        } else {
            a += term;
        }
    }
    (a, b)
}

pub fn dephase(psi: &GridState, references: &[GridState], opts: &DephaseOptions) -> Result<DephaseReport> {
    if opts.ensemble == 0 {
        return Err(Error::Grid("ensemble size must be at least 1".into()));
    }
    if !opts.threshold.is_finite() {
        return Err(Error::Grid("threshold must be finite".into()));
    }
    let layout = psi.layout();
    for r in references {
        if r.layout().len() != layout.len() {
            return Err(Error::Grid("reference state lives on a different grid".into()));
        }
    }
    let theta = opts.phases.angles(opts.ensemble)?;
    let density = psi.density();
    let sides_before = side_probabilities_of(layout, &density);

    let mut members_invariant = true;
    let mut max_kick_deviation = 0.0f64;
    let mut after = [0.0f64; 3];
    for &t in &theta {
        // polar form: the kick leaves each modulus untouched
        let member_density: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let s = side_probabilities_of(layout, &member_density);
        members_invariant &= s == sides_before;
        after[0] += s.left;
        after[1] += s.gap;
        after[2] += s.right;

        let explicit = kicked_member(psi, t, opts.threshold).density();
        for (x, y) in explicit.iter().zip(&density) {
            max_kick_deviation = max_kick_deviation.max((x - y).abs());
        }
    }
    let n = opts.ensemble as f64;
    let sides_after = SideProbabilities {
        left: after[0] / n,
        gap: after[1] / n,
        right: after[2] / n,
    };

    let phases: Vec<C> = theta.iter().map(|&t| C::from_polar(1.0, t)).collect();
    let mean_phase = phases.iter().sum::<C>() / n;
    let splits: Vec<(C, C)> = references
        .iter()
        .map(|r| split_overlap(r, psi, opts.threshold))
        .collect();
    let stats = splits
        .iter()
        .map(|&(a, b)| {
            let (mut sq, mut abs) = (0.0, 0.0);
            for e in &phases {
                let ov = a + b * e;
                sq += ov.norm_sqr();
                abs += ov.norm();
            }
            ReferenceStats {
                mean_overlap_sq: sq / n,
                incoherent: a.norm_sqr() + b.norm_sqr(),
                cross_term: (2.0 * (a.conj() * b * mean_phase).re).abs(),
                mean_overlap_abs: abs / n,
            }
        })
        .collect();
    let coherence = (splits.len() >= 2).then(|| {
        let ((a0, b0), (a1, b1)) = (splits[0], splits[1]);
        let sum: C = phases.iter().map(|e| (a0 + b0 * e) * (a1 + b1 * e).conj()).sum();
        (sum / n).norm()
    });

    Ok(DephaseReport {
        ensemble: opts.ensemble,
        sides_before,
        sides_after,
        mean_density: density,
        members_invariant,
        max_kick_deviation,
        references: stats,
        coherence,
    })
}
