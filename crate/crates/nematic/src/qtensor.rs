//! Algebra of traceless symmetric 3x3 matrices (the order parameter space)
//! and the pointwise nonlinearities and potentials of the model.
//!
//! A matrix `Q` is stored through the five independent components
//! `(q11, q22, q12, q13, q23)`; the remaining diagonal entry `q33` is
//! implied as `-q11 - q22`, so symmetry and trace-freeness hold by
//! construction.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point of Sym0(3): traceless symmetric 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TracelessSym3 {
    pub q11: f64,
    pub q22: f64,
    pub q12: f64,
    pub q13: f64,
    pub q23: f64,
}

impl TracelessSym3 {
    pub const ZERO: Self = Self { q11: 0.0, q22: 0.0, q12: 0.0, q13: 0.0, q23: 0.0 };

    pub fn new(q11: f64, q22: f64, q12: f64, q13: f64, q23: f64) -> Self {
        Self { q11, q22, q12, q13, q23 }
    }

    /// Implied (3,3) entry.
    #[inline]
    pub fn q33(&self) -> f64 {
        -self.q11 - self.q22
    }

    /// Reconstruct the full 3x3 matrix, row-major.
    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.q11, self.q12, self.q13],
            [self.q12, self.q22, self.q23],
            [self.q13, self.q23, self.q33()],
        ]
    }

    /// Project a full symmetric matrix onto the 5-component storage.
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        Self { q11: m[0][0], q22: m[1][1], q12: m[0][1], q13: m[0][2], q23: m[1][2] }
    }

    /// tr(Q^2) = |Q|^2 (squared Frobenius norm).
    #[inline]
    pub fn frob_sq(&self) -> f64 {
        2.0 * (self.q11 * self.q11 + self.q22 * self.q22 + self.q11 * self.q22)
            + 2.0 * (self.q12 * self.q12 + self.q13 * self.q13 + self.q23 * self.q23)
    }

    /// Frobenius norm |Q| = sqrt(Q:Q).
    #[inline]
    pub fn frob(&self) -> f64 {
        self.frob_sq().sqrt()
    }

    /// tr(Q^3); for traceless 3x3 matrices this equals 3 det(Q).
    pub fn tr_cubed(&self) -> f64 {
        let q33 = self.q33();
        let det = self.q11 * (self.q22 * q33 - self.q23 * self.q23)
            - self.q12 * (self.q12 * q33 - self.q23 * self.q13)
            + self.q13 * (self.q12 * self.q23 - self.q22 * self.q13);
        3.0 * det
    }

    /// The traceless part of Q^2, i.e. Q^2 - (1/3) tr(Q^2) I.
    pub fn square_traceless(&self) -> Self {
        let third = self.frob_sq() / 3.0;
        let sq11 = self.q11 * self.q11 + self.q12 * self.q12 + self.q13 * self.q13;
        let sq22 = self.q12 * self.q12 + self.q22 * self.q22 + self.q23 * self.q23;
        let q33 = self.q33();
        Self {
            q11: sq11 - third,
            q22: sq22 - third,
            q12: self.q11 * self.q12 + self.q12 * self.q22 + self.q13 * self.q23,
            q13: self.q11 * self.q13 + self.q12 * self.q23 + self.q13 * q33,
            q23: self.q12 * self.q13 + self.q22 * self.q23 + self.q23 * q33,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q11.is_finite()
            && self.q22.is_finite()
            && self.q12.is_finite()
            && self.q13.is_finite()
            && self.q23.is_finite()
    }

    pub fn components(&self) -> [f64; 5] {
        [self.q11, self.q22, self.q12, self.q13, self.q23]
    }

    pub fn from_components(c: [f64; 5]) -> Self {
        Self { q11: c[0], q22: c[1], q12: c[2], q13: c[3], q23: c[4] }
    }
}

impl Add for TracelessSym3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            q11: self.q11 + o.q11,
            q22: self.q22 + o.q22,
            q12: self.q12 + o.q12,
            q13: self.q13 + o.q13,
            q23: self.q23 + o.q23,
        }
    }
}

impl AddAssign for TracelessSym3 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for TracelessSym3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for TracelessSym3 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for TracelessSym3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            q11: self.q11 * s,
            q22: self.q22 * s,
            q12: self.q12 * s,
            q13: self.q13 * s,
            q23: self.q23 * s,
        }
    }
}

/// Uniaxial profile diag(lambda, lambda, -2 lambda).
pub fn make_uniaxial(lambda: f64) -> TracelessSym3 {
    TracelessSym3 { q11: lambda, q22: lambda, q12: 0.0, q13: 0.0, q23: 0.0 }
}

/// Frobenius inner product tr(PQ).
pub fn frobenius_inner(p: &TracelessSym3, q: &TracelessSym3) -> f64 {
    2.0 * p.q11 * q.q11 + 2.0 * p.q22 * q.q22 + p.q11 * q.q22 + p.q22 * q.q11
        + 2.0 * (p.q12 * q.q12 + p.q13 * q.q13 + p.q23 * q.q23)
}

/// Model parameters `(a, b, c, delta, eta)`, constrained to the region of
/// uniaxial bistability `b^2 > 27 a c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    a: f64,
    b: f64,
    c: f64,
    delta: f64,
    eta: f64,
}

impl ModelParams {
    pub fn new(a: f64, b: f64, c: f64, delta: f64, eta: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::Invalid(format!(
                "parameters must be positive, got a={a}, b={b}, c={c}"
            )));
        }
        if b * b <= 27.0 * a * c {
            return Err(Error::Invalid(format!(
                "(a, b, c) outside the bistable region: need b^2 > 27 a c, got b^2 = {} <= {}",
                b * b,
                27.0 * a * c
            )));
        }
        if !(delta > 0.0) {
            return Err(Error::Invalid(format!("delta must be positive, got {delta}")));
        }
        if !(eta > 0.0) {
            return Err(Error::Invalid(format!("eta must be positive, got {eta}")));
        }
        Ok(Self { a, b, c, delta, eta })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Right-hand side of the gradient flow without the Laplacian:
/// `-aQ + b(Q^2 - (1/3) tr(Q^2) I) - c tr(Q^2) Q`.
pub fn reaction_rhs(q: &TracelessSym3, p: &ModelParams) -> TracelessSym3 {
    let tr2 = q.frob_sq();
    *q * (-p.a - p.c * tr2) + q.square_traceless() * p.b
}

/// Nonlinearity of the transformed equation for `R = e^{at} Q`:
/// `b e^{-at}(R^2 - (1/3) tr(R^2) I) - c e^{-2at} tr(R^2) R`.
pub fn nonlinearity_h(r: &TracelessSym3, t: f64, p: &ModelParams) -> TracelessSym3 {
    debug_assert!(t >= 0.0);
    let ea = (-p.a * t).exp();
    r.square_traceless() * (p.b * ea) + *r * (-p.c * ea * ea * r.frob_sq())
}

/// Bulk energy density `f_B(Q) = (a/2) tr(Q^2) - (b/3) tr(Q^3) + (c/4) tr(Q^2)^2`.
pub fn bulk_energy_density(q: &TracelessSym3, p: &ModelParams) -> f64 {
    let tr2 = q.frob_sq();
    0.5 * p.a * tr2 - p.b / 3.0 * q.tr_cubed() + 0.25 * p.c * tr2 * tr2
}

/// Reduced bulk potential on uniaxial profiles:
/// `V(lambda) = (a/2) lambda^2 + (b/3) lambda^3 + (3c/2) lambda^4`
/// (so that `f_B(make_uniaxial(lambda)) = 6 V(lambda)`).
pub fn reduced_potential(lambda: f64, p: &ModelParams) -> f64 {
    0.5 * p.a * lambda * lambda + p.b / 3.0 * lambda.powi(3) + 1.5 * p.c * lambda.powi(4)
}

/// Global minimiser of the reduced bulk potential.
///
/// The nonzero critical points solve `a + b lambda + 6 c lambda^2 = 0`; of
/// the two real roots (both negative for b, c > 0) the minimiser is the one
/// with the lower potential value, and bistability requires `V(lambda*) < 0`.
pub fn lambda_star(p: &ModelParams) -> Result<f64> {
    let disc = p.b * p.b - 24.0 * p.a * p.c;
    if disc <= 0.0 {
        return Err(Error::Numeric(format!(
            "no real nonzero critical point of the reduced potential (discriminant {disc})"
        )));
    }
    let sq = disc.sqrt();
    let r1 = (-p.b + sq) / (12.0 * p.c);
    let r2 = (-p.b - sq) / (12.0 * p.c);
    let (v1, v2) = (reduced_potential(r1, p), reduced_potential(r2, p));
    let (root, val) = if v1 < v2 { (r1, v1) } else { (r2, v2) };
    if val >= 0.0 {
        return Err(Error::Numeric(format!(
            "reduced potential has no negative-energy critical point (V({root}) = {val}); \
             parameters are outside the bistable regime"
        )));
    }
    Ok(root)
}
