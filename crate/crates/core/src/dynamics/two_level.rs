//! Exact evolution inside the span of an even and an odd bound state.

use num_complex::Complex64;

use super::grid::SideProbabilities;
use crate::error::{Error, Result};
use crate::piecewise::PiecewiseExpFunction;

type C = Complex64;

/// Amplitudes `c_a e^{-i λ_a t}` of a two-level superposition.
pub fn two_level_evolution(c_even: C, c_odd: C, lambda_even: f64, lambda_odd: f64, t: f64) -> [C; 2] {
    [
        c_even * C::from_polar(1.0, -lambda_even * t),
        c_odd * C::from_polar(1.0, -lambda_odd * t),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    pub amplitudes: [C; 2],
    pub sides: SideProbabilities,
}

/// Side probabilities of superpositions of two normalized eigenfunctions,
/// from their exact overlap integrals over each zone.
#[derive(Debug, Clone)]
pub struct TwoLevelOracle {
    even: PiecewiseExpFunction,
    odd: PiecewiseExpFunction,
    /// L² norms of the functions as supplied.
    raw_norms: [f64; 2],
    lambda_even: f64,
    lambda_odd: f64,
    /// Gram matrices over the left, gap and right zones.
    gram: [[[C; 2]; 2]; 3],
}

impl TwoLevelOracle {
    /// `cuts` are the interaction points; the gap zone is empty for one cut.
    pub fn new(
        even: &PiecewiseExpFunction,
        odd: &PiecewiseExpFunction,
        lambda_even: f64,
        lambda_odd: f64,
        cuts: &[f64],
    ) -> Result<Self> {
        let (Some(&first), Some(&last)) = (cuts.first(), cuts.last()) else {
            return Err(Error::Incompatible("need at least one interaction point"));
        };
        let raw_norms = [even.l2_norm(), odd.l2_norm()];
        let even = even.normalized()?;
        let odd = odd.normalized()?;
        if even.overlap(&odd).norm() > 1e-10 {
            return Err(Error::Incompatible("reference states are not orthogonal"));
        }
        let zones = [
            (f64::NEG_INFINITY, first),
            (first, last),
            (last, f64::INFINITY),
        ];
        let fs = [&even, &odd];
        let mut gram = [[[C::new(0.0, 0.0); 2]; 2]; 3];
        for (z, &(lo, hi)) in zones.iter().enumerate() {
            if lo >= hi {
                continue;
            }
            for a in 0..2 {
                for b in 0..2 {
                    gram[z][a][b] = fs[a].overlap_on(fs[b], lo, hi);
                }
            }
        }
        Ok(Self {
            even,
            odd,
            raw_norms,
            lambda_even,
            lambda_odd,
            gram,
        })
    }

    pub fn even(&self) -> &PiecewiseExpFunction {
        &self.even
    }

    pub fn odd(&self) -> &PiecewiseExpFunction {
        &self.odd
    }

    /// Coefficients of `f` on the normalized even and odd states.
    pub fn project(&self, f: &PiecewiseExpFunction) -> [C; 2] {
        [self.even.overlap(f), self.odd.overlap(f)]
    }

    /// Normalized coefficients of `w_even f + w_odd g`, with `f`, `g` the
    /// functions as supplied to [`TwoLevelOracle::new`].
    pub fn coefficients(&self, w_even: C, w_odd: C) -> [C; 2] {
        let c = [w_even * self.raw_norms[0], w_odd * self.raw_norms[1]];
        let n = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
        [c[0] / n, c[1] / n]
    }

    /// `2π / |λ_even - λ_odd|`, infinite when degenerate.
    pub fn beat_period(&self) -> f64 {
        let gap = (self.lambda_even - self.lambda_odd).abs();
        if gap == 0.0 {
            f64::INFINITY
        } else {
            2.0 * std::f64::consts::PI / gap
        }
    }

    pub fn at(&self, c: [C; 2], t: f64) -> TwoLevelState {
        let amplitudes = two_level_evolution(c[0], c[1], self.lambda_even, self.lambda_odd, t);
        let zone = |z: usize| {
            let mut p = C::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    p += amplitudes[a].conj() * amplitudes[b] * self.gram[z][a][b];
                }
            }
            p.re
        };
        TwoLevelState {
            amplitudes,
            sides: SideProbabilities {
                left: zone(0),
                gap: zone(1),
                right: zone(2),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::local_beta_for;
    use crate::spectra::{even_state, odd_state};

    fn oracle(alpha: f64, beta: f64, h: f64) -> (TwoLevelOracle, [C; 2]) {
        let f = even_state(alpha, h).unwrap().function;
        let g = odd_state(beta, h).unwrap().function;
        let o = TwoLevelOracle::new(&f, &g, -alpha * alpha, -beta * beta, &[-h, h]).unwrap();
        let c = o.coefficients(C::new(1.0, 0.0), C::new(1.0, 0.0));
        (o, c)
    }

    #[test]
    fn degenerate_levels_do_not_beat() {
        let (o, c) = oracle(1.0, 1.0, 0.5);
        let p0 = o.at(c, 0.0).sides;
        let p1 = o.at(c, 7.3).sides;
        assert!((p0.left - p1.left).abs() < 1e-14);
        assert!(p0.right < 1e-14);
        assert!(o.beat_period().is_infinite());
    }

    #[test]
    fn single_level_is_constant() {
        let (o, _) = oracle(2.0, 1.0, 0.3);
        let c = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
        let p = o.at(c, 4.0).sides;
        assert!((p.left - p.right).abs() < 1e-14);
        assert!((p.total() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn local_revival_period() {
        let beta = local_beta_for(2.0, 0.5).unwrap();
        let (o, c) = oracle(2.0, beta, 0.5);
        let t = o.beat_period();
        assert!((t - 3.007_706_698_975_243_5).abs() < 1e-10);
        let p0 = o.at(c, 0.0).sides.left;
        let p1 = o.at(c, t).sides.left;
        let half = o.at(c, 0.5 * t).sides.left;
        assert!((p0 - p1).abs() < 1e-12);
        assert!(half < p0);
    }
}
