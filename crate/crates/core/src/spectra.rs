//! Closed-form bound states of the one- and two-point interactions.
//!
//! Eigenfunctions are kept unnormalized, with unit coefficient on the outer
//! exponentials; call [`PiecewiseExpFunction::normalized`] when needed.

use crate::error::{positive, Error, Result};
use crate::piecewise::{ExpPair, Parity, PiecewiseExpFunction};

/// A bound state `-f'' = λ f` with `λ = -κ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub kappa: f64,
    pub lambda: f64,
    pub function: PiecewiseExpFunction,
    pub parity: Parity,
}

impl SpectralPair {
    fn new(function: PiecewiseExpFunction, parity: Parity) -> Self {
        let kappa = function.kappa();
        Self {
            kappa,
            lambda: -kappa * kappa,
            function,
            parity,
        }
    }
}

/// Even bound state of decay `α` for the two-point interaction at `±h`:
/// `e^{αx}` left of `-h`, `e^{-αx}` right of `h`, and
/// `-e^{-αh} cosh(αx) / sinh(αh)` in between.
pub fn even_state(alpha: f64, h: f64) -> Result<SpectralPair> {
    positive("alpha", alpha)?;
    positive("h", h)?;
    let inner = -(-alpha * h).exp() / (2.0 * (alpha * h).sinh());
    let f = PiecewiseExpFunction::new(
        alpha,
        vec![-h, h],
        vec![
            ExpPair::real(1.0, 0.0),
            ExpPair::real(inner, inner),
            ExpPair::real(0.0, 1.0),
        ],
    )?;
    Ok(SpectralPair::new(f, Parity::Even))
}

/// Odd bound state of decay `β`: `e^{βx}` left of `-h`, `-e^{-βx}` right of
/// `h`, and `e^{-βh} sinh(βx) / cosh(βh)` in between.
pub fn odd_state(beta: f64, h: f64) -> Result<SpectralPair> {
    positive("beta", beta)?;
    positive("h", h)?;
    let inner = (-beta * h).exp() / (2.0 * (beta * h).cosh());
    let g = PiecewiseExpFunction::new(
        beta,
        vec![-h, h],
        vec![
            ExpPair::real(1.0, 0.0),
            ExpPair::real(inner, -inner),
            ExpPair::real(0.0, -1.0),
        ],
    )?;
    Ok(SpectralPair::new(g, Parity::Odd))
}

/// The sum and difference of the even and odd states at equal decay `α`.
/// The first vanishes identically on `x ≥ h`, the second on `x ≤ -h`.
pub fn handed_states(alpha: f64, h: f64) -> Result<(PiecewiseExpFunction, PiecewiseExpFunction)> {
    let f = even_state(alpha, h)?.function;
    let g = odd_state(alpha, h)?.function;
    Ok((f.add(&g)?, f.sub(&g)?))
}

/// Bound states of the one-point delta-prime interaction: `e^{-α|x|}` and
/// `sign(x) e^{-β|x|}`. For `α = β` the half-line functions supported on
/// `x < 0` and `x > 0` are appended.
pub fn one_point_eigenfunctions(alpha: f64, beta: f64) -> Result<Vec<SpectralPair>> {
    positive("alpha", alpha)?;
    positive("beta", beta)?;
    let two_sided = |k: f64, left: f64, right: f64| {
        PiecewiseExpFunction::new(k, vec![0.0], vec![ExpPair::real(left, 0.0), ExpPair::real(0.0, right)])
    };
    let mut out = vec![
        SpectralPair::new(two_sided(alpha, 1.0, 1.0)?, Parity::Even),
        SpectralPair::new(two_sided(beta, -1.0, 1.0)?, Parity::Odd),
    ];
    if alpha == beta {
        out.push(SpectralPair::new(two_sided(alpha, 1.0, 0.0)?, Parity::None));
        out.push(SpectralPair::new(two_sided(alpha, 0.0, 1.0)?, Parity::None));
    }
    Ok(out)
}

/// Bound state of the delta interaction `y'(+0) - y'(-0) = c y(0)`, if any.
///
/// Matching `e^{-κ|x|}` to the jump gives `-2κ = c`, so `κ = -c/2` and
/// `λ = -c²/4`; there is no bound state for `c ≥ 0`. The frequently quoted
/// pair `λ = -c²`, `e^{-c|x|}` does not satisfy this jump condition.
pub fn delta_bound_state(c: f64) -> Result<Option<SpectralPair>> {
    if !c.is_finite() {
        return Err(Error::Domain {
            name: "c",
            value: c,
            reason: "must be finite",
        });
    }
    if c >= 0.0 {
        return Ok(None);
    }
    let kappa = -0.5 * c;
    let f = PiecewiseExpFunction::new(kappa, vec![0.0], vec![ExpPair::real(1.0, 0.0), ExpPair::real(0.0, 1.0)])?;
    Ok(Some(SpectralPair::new(f, Parity::Even)))
}

/// `∫_{-h}^{h}` of the even state, which equals `-2 e^{-αh} / α`.
pub fn integral_over_gap(alpha: f64, h: f64) -> Result<f64> {
    let f = even_state(alpha, h)?.function;
    Ok(f.integral(-h, h).re)
}
