//! Self-adjoint boundary-condition families for `-d²/dx²` with one- or
//! two-point singular interactions.
//!
//! Two-point interactions at `±h` keep the derivative continuous and let the
//! value jump: `[y](±h) = B · (y'(-h), y'(h))` with a real symmetric 2×2
//! coupling matrix `B`. One-point interactions at the origin are either the
//! delta type (continuous value, derivative jump `c · y(0)`) or the
//! delta-prime type parametrized by two decay rates `α, β > 0`.
//!
//! Distributions never appear as values here; every interaction is carried by
//! its jump conditions.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{positive, Error, Result};
use crate::roots;

/// Default tolerance for interface and boundary-form checks.
pub const INTERFACE_TOL: f64 = 1e-12;
/// Default tolerance for the locality test `b12 = 0`.
pub const LOCALITY_TOL: f64 = 1e-10;

const SYMMETRY_RTOL: f64 = 1e-14;

/// Real 2×2 matrix mapping `(y'(-h), y'(h))` to the value jumps at `-h`, `h`.
/// Entries carry units of length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    pub b11: f64,
    pub b12: f64,
    pub b21: f64,
    pub b22: f64,
}

impl CouplingMatrix {
    /// Rejects non-finite entries and `b12 ≠ b21` beyond `1e-14` relative;
    /// a non-symmetric coupling does not define a self-adjoint operator.
    pub fn new(b11: f64, b12: f64, b21: f64, b22: f64) -> Result<Self> {
        for (name, v) in [("b11", b11), ("b12", b12), ("b21", b21), ("b22", b22)] {
            if !v.is_finite() {
                return Err(Error::Domain {
                    name,
                    value: v,
                    reason: "must be finite",
                });
            }
        }
        if (b12 - b21).abs() > SYMMETRY_RTOL * b12.abs().max(b21.abs()) {
            return Err(Error::NotSymmetric { b12, b21 });
        }
        Ok(Self { b11, b12, b21, b22 })
    }

    pub fn symmetric(b11: f64, b12: f64, b22: f64) -> Result<Self> {
        Self::new(b11, b12, b12, b22)
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.b11, self.b12], [self.b21, self.b22]]
    }

    /// Invariance under `x → -x` requires `b11 = b22` (and `b12 = b21`, which
    /// the constructor already enforces).
    pub fn is_parity_symmetric(&self) -> bool {
        let scale = self.b11.abs().max(self.b22.abs());
        (self.b11 - self.b22).abs() <= SYMMETRY_RTOL * scale
            && (self.b12 - self.b21).abs() <= SYMMETRY_RTOL * self.b12.abs().max(self.b21.abs())
    }

    pub fn determinant(&self) -> f64 {
        self.b11 * self.b22 - self.b12 * self.b21
    }

    pub fn max_abs(&self) -> f64 {
        self.b11
            .abs()
            .max(self.b12.abs())
            .max(self.b21.abs())
            .max(self.b22.abs())
    }

    /// Symmetric inverse; fails when `B` is singular relative to its size.
    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        let det = self.determinant();
        let scale = self.max_abs();
        if scale == 0.0 || det.abs() <= 1e-14 * scale * scale {
            return Err(Error::DegenerateMatrix("coupling matrix is singular"));
        }
        let off = -0.5 * (self.b12 + self.b21) / det;
        Ok([[self.b22 / det, off], [off, self.b11 / det]])
    }

    pub fn apply(&self, d: [Complex64; 2]) -> [Complex64; 2] {
        [
            d[0] * self.b11 + d[1] * self.b12,
            d[0] * self.b21 + d[1] * self.b22,
        ]
    }
}

/// Decay rates `(α, β)` an extension was generated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub alpha: f64,
    pub beta: f64,
}

/// Two-point interaction at `±h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointExtension {
    h: f64,
    coupling: CouplingMatrix,
    generator: Option<GeneratorParams>,
}

/// `1 / (α (1 - e^{-2αh}))`, the coefficient tied to the even eigenfunction.
fn even_weight(alpha: f64, h: f64) -> f64 {
    1.0 / (alpha * -(-2.0 * alpha * h).exp_m1())
}

/// `1 / (β (1 + e^{-2βh}))`, the coefficient tied to the odd eigenfunction.
fn odd_weight(beta: f64, h: f64) -> f64 {
    1.0 / (beta * (1.0 + (-2.0 * beta * h).exp()))
}

impl TwoPointExtension {
    /// Builds the coupling for which the even function with decay `α` and
    /// the odd function with decay `β` are bound states.
    ///
    /// `b11 = b22 = -(p + q)`, `b12 = b21 = p - q` with
    /// `p = 1/(α(1 - e^{-2αh}))`, `q = 1/(β(1 + e^{-2βh}))`. For `α = β` the
    /// entries are evaluated in the cancellation-free form
    /// `b11 = -2/(α(1 - e^{-4αh}))`, `b12 = 2e^{-2αh}/(α(1 - e^{-4αh}))`.
    pub fn build(alpha: f64, beta: f64, h: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        positive("h", h)?;
        let (diag, off) = if alpha == beta {
            let denom = alpha * -(-4.0 * alpha * h).exp_m1();
            (-2.0 / denom, 2.0 * (-2.0 * alpha * h).exp() / denom)
        } else {
            let p = even_weight(alpha, h);
            let q = odd_weight(beta, h);
            (-(p + q), p - q)
        };
        Ok(Self {
            h,
            coupling: CouplingMatrix::symmetric(diag, off, diag)?,
            generator: Some(GeneratorParams { alpha, beta }),
        })
    }

    /// Arbitrary symmetric coupling; no generator parameters are recorded.
    pub fn with_coupling(h: f64, coupling: CouplingMatrix) -> Result<Self> {
        positive("h", h)?;
        Ok(Self {
            h,
            coupling,
            generator: None,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn generator(&self) -> Option<GeneratorParams> {
        self.generator
    }

    /// `true` iff `|b12| ≤ tol · max(|b11|, 1)`, i.e. the jump at each point
    /// only depends on the derivative at that same point.
    pub fn is_local(&self, tol: f64) -> bool {
        self.coupling.b12.abs() <= tol * self.coupling.b11.abs().max(1.0)
    }

    /// `b12 / b11`; equals `-e^{-2αh}` when generated with `α = β`.
    pub fn entanglement_ratio(&self) -> Result<f64> {
        if self.coupling.b11 == 0.0 {
            return Err(Error::DegenerateMatrix("b11 = 0"));
        }
        Ok(self.coupling.b12 / self.coupling.b11)
    }

    /// Checks derivative continuity at `±h` and the two jump relations.
    pub fn satisfies_interface(&self, y: &BoundaryData, tol: f64) -> bool {
        let d = y.derivatives();
        let jump = self.coupling.apply(d);
        let scale = 1f64
            .max(y.max_abs_values())
            .max(self.coupling.max_abs() * y.max_abs_derivatives());
        let ok = |z: Complex64| z.norm() <= tol * scale;
        ok(y.dy_left_plus - y.dy_left_minus)
            && ok(y.dy_right_plus - y.dy_right_minus)
            && ok(y.y_left_plus - y.y_left_minus - jump[0])
            && ok(y.y_right_plus - y.y_right_minus - jump[1])
    }

    /// Random boundary data satisfying the interface conditions: derivatives
    /// and outer-side values are drawn freely, inner-side values follow from
    /// the jump relation.
    pub fn sample_interface_data<R: Rng>(&self, rng: &mut R) -> BoundaryData {
        let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let d = [c(), c()];
        let outer = [c(), c()];
        let jump = self.coupling.apply(d);
        BoundaryData {
            y_left_minus: outer[0],
            y_left_plus: outer[0] + jump[0],
            y_right_minus: outer[1],
            y_right_plus: outer[1] + jump[1],
            dy_left_minus: d[0],
            dy_left_plus: d[0],
            dy_right_minus: d[1],
            dy_right_plus: d[1],
        }
    }
}

/// Shorthand for [`TwoPointExtension::build`].
pub fn build_two_point(alpha: f64, beta: f64, h: f64) -> Result<TwoPointExtension> {
    TwoPointExtension::build(alpha, beta, h)
}

/// The `β` that makes `build_two_point(α, β, h)` local.
///
/// Solves `β(1 + e^{-2βh}) = α(1 - e^{-2αh})`. The left side is strictly
/// increasing in `β` and the root lies in `(0, α)`.
pub fn local_beta_for(alpha: f64, h: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("h", h)?;
    let target = alpha * -(-2.0 * alpha * h).exp_m1();
    let residual = |beta: f64| beta * (1.0 + (-2.0 * beta * h).exp()) - target;
    roots::brent(residual, 0.0, alpha, 1e-15 * alpha)
}

/// One-point interaction at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OnePointExtension {
    /// `y(-0) = y(+0)`, `y'(+0) - y'(-0) = c · y(0)`.
    Delta { c: f64 },
    /// Values given by derivatives:
    /// `y(+0) = ½{-(1/α + 1/β) y'(+0) + (1/α - 1/β) y'(-0)}`,
    /// `y(-0) = ½{(-1/α + 1/β) y'(+0) + (1/α + 1/β) y'(-0)}`.
    DeltaPrime { alpha: f64, beta: f64 },
}

impl OnePointExtension {
    pub fn delta(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Domain {
                name: "c",
                value: c,
                reason: "must be finite",
            });
        }
        Ok(Self::Delta { c })
    }

    pub fn delta_prime(alpha: f64, beta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(Self::DeltaPrime { alpha, beta })
    }

    /// Delta-prime with `α = β` splits into the two half-line Robin conditions
    /// `α y(-0) = y'(-0)` and `α y(+0) = -y'(+0)`: nothing crosses the origin.
    pub fn is_decoupled(&self) -> Result<bool> {
        match *self {
            Self::Delta { .. } => Err(Error::UnsupportedKind("delta interaction")),
            Self::DeltaPrime { alpha, beta } => Ok((alpha - beta).abs() <= 1e-10 * alpha),
        }
    }

    /// Matrix `A` with `(y(-0), y(+0)) = A · (y'(-0), y'(+0))` for the
    /// delta-prime kind.
    pub fn value_from_derivative(&self) -> Result<[[f64; 2]; 2]> {
        match *self {
            Self::Delta { .. } => Err(Error::UnsupportedKind("delta interaction")),
            Self::DeltaPrime { alpha, beta } => {
                let s = 0.5 * (1.0 / alpha + 1.0 / beta);
                let d = 0.5 * (1.0 / alpha - 1.0 / beta);
                Ok([[s, -d], [d, -s]])
            }
        }
    }

    pub fn satisfies_conditions(&self, y: &OnePointBoundaryData, tol: f64) -> bool {
        let scale = 1f64
            .max(y.y_minus.norm())
            .max(y.y_plus.norm())
            .max(y.dy_minus.norm())
            .max(y.dy_plus.norm());
        let ok = |z: Complex64| z.norm() <= tol * scale;
        match *self {
            Self::Delta { c } => {
                ok(y.y_plus - y.y_minus) && ok(y.dy_plus - y.dy_minus - y.y_minus * c)
            }
            Self::DeltaPrime { alpha, beta } => {
                let a = self.value_from_derivative().expect("delta-prime");
                let s = (1.0 / alpha).max(1.0 / beta);
                let ok = |z: Complex64| z.norm() <= tol * scale * s.max(1.0);
                ok(y.y_minus - (y.dy_minus * a[0][0] + y.dy_plus * a[0][1]))
                    && ok(y.y_plus - (y.dy_minus * a[1][0] + y.dy_plus * a[1][1]))
            }
        }
    }
}

/// Either kind of interaction, for code that handles both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointInteraction {
    OnePoint(OnePointExtension),
    TwoPoint(TwoPointExtension),
}

impl PointInteraction {
    /// Points where the interaction sits, in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::OnePoint(_) => vec![0.0],
            Self::TwoPoint(ext) => vec![-ext.h(), ext.h()],
        }
    }
}

impl From<TwoPointExtension> for PointInteraction {
    fn from(ext: TwoPointExtension) -> Self {
        Self::TwoPoint(ext)
    }
}

impl From<OnePointExtension> for PointInteraction {
    fn from(ext: OnePointExtension) -> Self {
        Self::OnePoint(ext)
    }
}

/// One-sided values and derivatives at `-h` and `h`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryData {
    pub y_left_minus: Complex64,
    pub y_left_plus: Complex64,
    pub y_right_minus: Complex64,
    pub y_right_plus: Complex64,
    pub dy_left_minus: Complex64,
    pub dy_left_plus: Complex64,
    pub dy_right_minus: Complex64,
    pub dy_right_plus: Complex64,
}

impl BoundaryData {
    /// Mean one-sided derivatives at `-h` and `h`.
    pub fn derivatives(&self) -> [Complex64; 2] {
        [
            (self.dy_left_minus + self.dy_left_plus) * 0.5,
            (self.dy_right_minus + self.dy_right_plus) * 0.5,
        ]
    }

    fn max_abs_values(&self) -> f64 {
        [
            self.y_left_minus,
            self.y_left_plus,
            self.y_right_minus,
            self.y_right_plus,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }

    fn max_abs_derivatives(&self) -> f64 {
        [
            self.dy_left_minus,
            self.dy_left_plus,
            self.dy_right_minus,
            self.dy_right_plus,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_values().max(self.max_abs_derivatives())
    }
}

/// One-sided values and derivatives at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OnePointBoundaryData {
    pub y_minus: Complex64,
    pub y_plus: Complex64,
    pub dy_minus: Complex64,
    pub dy_plus: Complex64,
}

impl OnePointBoundaryData {
    pub fn max_abs(&self) -> f64 {
        [self.y_minus, self.y_plus, self.dy_minus, self.dy_plus]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Surface terms of `(D*y, z) - (y, D*z)` for the two-point problem. Vanishes
/// for every pair in the domain of a self-adjoint restriction.
pub fn boundary_form_two_point(y: &BoundaryData, z: &BoundaryData) -> Complex64 {
    -y.dy_left_minus * z.y_left_minus.conj() + y.dy_left_plus * z.y_left_plus.conj()
        - y.dy_right_minus * z.y_right_minus.conj()
        + y.dy_right_plus * z.y_right_plus.conj()
        + y.y_left_minus * z.dy_left_minus.conj()
        - y.y_left_plus * z.dy_left_plus.conj()
        + y.y_right_minus * z.dy_right_minus.conj()
        - y.y_right_plus * z.dy_right_plus.conj()
}

/// Surface terms for the one-point problem at the origin.
pub fn boundary_form_one_point(y: &OnePointBoundaryData, z: &OnePointBoundaryData) -> Complex64 {
    y.dy_minus * z.y_minus.conj() - y.dy_plus * z.y_plus.conj() - y.y_minus * z.dy_minus.conj()
        + y.y_plus * z.dy_plus.conj()
}
