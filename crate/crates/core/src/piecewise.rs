//! Piecewise exponential functions `A e^{κx} + B e^{-κx}` with closed-form
//! evaluation, differentiation and integration.

use num_complex::Complex64;

use crate::error::{positive, Error, Result};
use crate::extensions::{BoundaryData, OnePointBoundaryData};

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// Coefficients of `grow · e^{κx} + decay · e^{-κx}` on one interval.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExpPair {
    pub grow: Complex64,
    pub decay: Complex64,
}

impl ExpPair {
    pub fn real(grow: f64, decay: f64) -> Self {
        Self {
            grow: grow.into(),
            decay: decay.into(),
        }
    }

    pub const ZERO: Self = Self {
        grow: Complex64::new(0.0, 0.0),
        decay: Complex64::new(0.0, 0.0),
    };
}

/// Square-integrable piecewise exponential with a common decay rate `κ`.
///
/// At a breakpoint the function takes the value of the piece farther from the
/// origin (a breakpoint at `0` belongs to the right piece); use
/// [`PiecewiseExpFunction::one_sided`] for explicit limits.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseExpFunction {
    kappa: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<ExpPair>,
}

impl PiecewiseExpFunction {
    pub fn new(kappa: f64, breakpoints: Vec<f64>, pieces: Vec<ExpPair>) -> Result<Self> {
        positive("kappa", kappa)?;
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Incompatible("need one more piece than breakpoints"));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Incompatible("breakpoints must be finite and increasing"));
        }
        let first = pieces[0];
        let last = pieces[pieces.len() - 1];
        if first.decay != Complex64::new(0.0, 0.0) || last.grow != Complex64::new(0.0, 0.0) {
            return Err(Error::Incompatible("outer pieces must decay at infinity"));
        }
        Ok(Self {
            kappa,
            breakpoints,
            pieces,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[ExpPair] {
        &self.pieces
    }

    fn piece_index(&self, x: f64) -> usize {
        let k = self.breakpoints.iter().take_while(|&&b| b < x).count();
        match self.breakpoints.get(k) {
            Some(&b) if b == x && b >= 0.0 => k + 1,
            _ => k,
        }
    }

    fn one_sided_index(&self, x: f64, side: Side) -> usize {
        match self.breakpoints.iter().position(|&b| b == x) {
            Some(k) => match side {
                Side::Left => k,
                Side::Right => k + 1,
            },
            None => self.piece_index(x),
        }
    }

    fn eval_piece(&self, k: usize, x: f64) -> Complex64 {
        let p = self.pieces[k];
        let mut v = Complex64::new(0.0, 0.0);
        if p.grow != Complex64::new(0.0, 0.0) {
            v += p.grow * (self.kappa * x).exp();
        }
        if p.decay != Complex64::new(0.0, 0.0) {
            v += p.decay * (-self.kappa * x).exp();
        }
        v
    }

    fn eval_piece_derivative(&self, k: usize, x: f64) -> Complex64 {
        let p = self.pieces[k];
        let mut v = Complex64::new(0.0, 0.0);
        if p.grow != Complex64::new(0.0, 0.0) {
            v += p.grow * self.kappa * (self.kappa * x).exp();
        }
        if p.decay != Complex64::new(0.0, 0.0) {
            v -= p.decay * self.kappa * (-self.kappa * x).exp();
        }
        v
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.eval_piece(self.piece_index(x), x)
    }

    pub fn derivative_at(&self, x: f64) -> Complex64 {
        self.eval_piece_derivative(self.piece_index(x), x)
    }

    /// One-sided limit of the value; away from breakpoints `side` is ignored.
    pub fn one_sided(&self, x: f64, side: Side) -> Complex64 {
        self.eval_piece(self.one_sided_index(x, side), x)
    }

    pub fn one_sided_derivative(&self, x: f64, side: Side) -> Complex64 {
        self.eval_piece_derivative(self.one_sided_index(x, side), x)
    }

    /// `f'` as a piecewise exponential of the same rate.
    pub fn derivative(&self) -> PiecewiseExpFunction {
        let k = self.kappa;
        Self {
            kappa: k,
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| ExpPair {
                    grow: p.grow * k,
                    decay: -p.decay * k,
                })
                .collect(),
        }
    }

    /// Same coefficients with decay rate `kappa`.
    pub(crate) fn with_kappa(&self, kappa: f64) -> PiecewiseExpFunction {
        Self {
            kappa,
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.clone(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> PiecewiseExpFunction {
        Self {
            kappa: self.kappa,
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| ExpPair {
                    grow: p.grow * c,
                    decay: p.decay * c,
                })
                .collect(),
        }
    }

    /// Coefficient-wise sum; both functions must share `κ` and breakpoints.
    pub fn add(&self, other: &PiecewiseExpFunction) -> Result<PiecewiseExpFunction> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &PiecewiseExpFunction) -> Result<PiecewiseExpFunction> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &PiecewiseExpFunction, sign: f64) -> Result<PiecewiseExpFunction> {
        if self.kappa != other.kappa || self.breakpoints != other.breakpoints {
            return Err(Error::Incompatible("different decay rate or breakpoints"));
        }
        Ok(Self {
            kappa: self.kappa,
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .zip(&other.pieces)
                .map(|(a, b)| ExpPair {
                    grow: a.grow + b.grow * sign,
                    decay: a.decay + b.decay * sign,
                })
                .collect(),
        })
    }

    /// Exact `∫_lo^hi f(x) dx`; `lo`, `hi` may be infinite.
    pub fn integral(&self, lo: f64, hi: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (k, (a, b)) in self.intervals().enumerate() {
            let (a, b) = (a.max(lo), b.min(hi));
            if a >= b {
                continue;
            }
            let p = self.pieces[k];
            total += exp_integral(p.grow, self.kappa, a, b);
            total += exp_integral(p.decay, -self.kappa, a, b);
        }
        total
    }

    /// Exact `∫ conj(f) g` over `[lo, hi]`.
    pub fn overlap_on(&self, other: &PiecewiseExpFunction, lo: f64, hi: f64) -> Complex64 {
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(lo);
        edges.extend(cuts);
        edges.push(hi);

        let (k1, k2) = (self.kappa, other.kappa);
        let mut total = Complex64::new(0.0, 0.0);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a >= b {
                continue;
            }
            let probe = if a.is_infinite() {
                b - 1.0
            } else if b.is_infinite() {
                a + 1.0
            } else {
                0.5 * (a + b)
            };
            let p = self.pieces[self.piece_index_open(probe)];
            let q = other.pieces[other.piece_index_open(probe)];
            total += exp_integral(p.grow.conj() * q.grow, k1 + k2, a, b);
            total += exp_integral(p.grow.conj() * q.decay, k1 - k2, a, b);
            total += exp_integral(p.decay.conj() * q.grow, k2 - k1, a, b);
            total += exp_integral(p.decay.conj() * q.decay, -(k1 + k2), a, b);
        }
        total
    }

    fn piece_index_open(&self, x: f64) -> usize {
        self.breakpoints.iter().take_while(|&&b| b < x).count()
    }

    /// `∫ conj(f) g` over the whole line.
    pub fn overlap(&self, other: &PiecewiseExpFunction) -> Complex64 {
        self.overlap_on(other, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn l2_norm(&self) -> f64 {
        self.overlap(self).re.max(0.0).sqrt()
    }

    pub fn normalized(&self) -> Result<PiecewiseExpFunction> {
        let n = self.l2_norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::DegenerateMatrix("function has zero or infinite norm"));
        }
        Ok(self.scaled((1.0 / n).into()))
    }

    fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.breakpoints.len();
        (0..=n).map(move |k| {
            let a = if k == 0 { f64::NEG_INFINITY } else { self.breakpoints[k - 1] };
            let b = if k == n { f64::INFINITY } else { self.breakpoints[k] };
            (a, b)
        })
    }

    /// Parity judged on 50 symmetric sample pairs, to `1e-12` relative.
    pub fn parity(&self) -> Parity {
        let reach = self.breakpoints.iter().fold(0.0f64, |m, b| m.max(b.abs())) + 10.0 / self.kappa;
        let xs: Vec<f64> = (1..=50).map(|i| reach * i as f64 / 50.0).collect();
        let scale = xs
            .iter()
            .map(|&x| self.value(x).norm().max(self.value(-x).norm()))
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return Parity::Even;
        }
        let tol = 1e-12 * scale;
        let even = xs.iter().all(|&x| (self.value(x) - self.value(-x)).norm() <= tol);
        let odd = xs.iter().all(|&x| (self.value(x) + self.value(-x)).norm() <= tol);
        match (even, odd) {
            (true, _) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::None,
        }
    }

    /// One-sided data at `±h`, as consumed by the two-point interface checks.
    pub fn two_point_boundary_data(&self, h: f64) -> BoundaryData {
        BoundaryData {
            y_left_minus: self.one_sided(-h, Side::Left),
            y_left_plus: self.one_sided(-h, Side::Right),
            y_right_minus: self.one_sided(h, Side::Left),
            y_right_plus: self.one_sided(h, Side::Right),
            dy_left_minus: self.one_sided_derivative(-h, Side::Left),
            dy_left_plus: self.one_sided_derivative(-h, Side::Right),
            dy_right_minus: self.one_sided_derivative(h, Side::Left),
            dy_right_plus: self.one_sided_derivative(h, Side::Right),
        }
    }

    pub fn one_point_boundary_data(&self) -> OnePointBoundaryData {
        OnePointBoundaryData {
            y_minus: self.one_sided(0.0, Side::Left),
            y_plus: self.one_sided(0.0, Side::Right),
            dy_minus: self.one_sided_derivative(0.0, Side::Left),
            dy_plus: self.one_sided_derivative(0.0, Side::Right),
        }
    }
}

/// `∫_a^b c e^{rx} dx`, cancellation-free for small `r (b - a)`.
fn exp_integral(c: Complex64, rate: f64, a: f64, b: f64) -> Complex64 {
    if c == Complex64::new(0.0, 0.0) {
        return c;
    }
    if rate == 0.0 {
        return c * (b - a);
    }
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => c * f64::INFINITY,
        (true, false) if rate > 0.0 => c * ((rate * b).exp() / rate),
        (false, true) if rate < 0.0 => c * (-(rate * a).exp() / rate),
        (true, false) | (false, true) => c * f64::INFINITY,
        (false, false) => c * ((rate * a).exp() * (rate * (b - a)).exp_m1() / rate),
    }
}
