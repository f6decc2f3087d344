//! Linear algebra of Minkowski 4-space with signature (+,+,+,-).
//!
//! Vectors are stored in the orthonormal basis `{e1, e2, e3, e4}` with
//! `<e4, e4> = -1`. The pseudo-orthonormal (null) basis `{e1, e2, xi1, xi2}`
//! with `xi1 = (e3 + e4)/sqrt(2)` and `xi2 = (-e3 + e4)/sqrt(2)` is reachable
//! through [`to_null_frame`] / [`from_null_frame`].

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// A vector of R^4_1 in orthonormal coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec4M {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

pub const ZERO: Vec4M = Vec4M::new(0.0, 0.0, 0.0, 0.0);
pub const E1: Vec4M = Vec4M::new(1.0, 0.0, 0.0, 0.0);
pub const E2: Vec4M = Vec4M::new(0.0, 1.0, 0.0, 0.0);
pub const E3: Vec4M = Vec4M::new(0.0, 0.0, 1.0, 0.0);
pub const E4: Vec4M = Vec4M::new(0.0, 0.0, 0.0, 1.0);
/// Lightlike basis vector `(e3 + e4)/sqrt(2)`.
pub const XI1: Vec4M = Vec4M::new(0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
/// Lightlike basis vector `(-e3 + e4)/sqrt(2)`.
pub const XI2: Vec4M = Vec4M::new(0.0, 0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2);

impl Vec4M {
    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Self { x1, x2, x3, x4 }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    /// Minkowski inner product `x1 y1 + x2 y2 + x3 y3 - x4 y4`.
    #[inline]
    pub fn inner(self, other: Self) -> f64 {
        inner(self, other)
    }

    /// Inner square `<v, v>`.
    #[inline]
    pub fn norm_sq(self) -> f64 {
        inner(self, self)
    }

    /// Euclidean length of the coordinate tuple.
    pub fn euclidean_norm(self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3 + self.x4 * self.x4).sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs()).max(self.x4.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite() && self.x4.is_finite()
    }

    pub fn causal_character(self, tol: f64) -> CausalCharacter {
        causal_character(self, tol)
    }
}

/// Minkowski inner product, evaluated left to right.
#[inline]
pub fn inner(a: Vec4M, b: Vec4M) -> f64 {
    a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3 - a.x4 * b.x4
}

/// Determinant of the 4x4 matrix whose columns are the given vectors.
pub fn det4(c: [Vec4M; 4]) -> f64 {
    let m = nalgebra::Matrix4::from_columns(&[
        nalgebra::Vector4::from(c[0].to_array()),
        nalgebra::Vector4::from(c[1].to_array()),
        nalgebra::Vector4::from(c[2].to_array()),
        nalgebra::Vector4::from(c[3].to_array()),
    ]);
    m.determinant()
}

impl Add for Vec4M {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3, self.x4 + o.x4)
    }
}

impl AddAssign for Vec4M {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Vec4M {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3, self.x4 - o.x4)
    }
}

impl SubAssign for Vec4M {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Vec4M {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2, -self.x3, -self.x4)
    }
}

impl Mul<f64> for Vec4M {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x1 * s, self.x2 * s, self.x3 * s, self.x4 * s)
    }
}

impl Mul<Vec4M> for f64 {
    type Output = Vec4M;
    fn mul(self, v: Vec4M) -> Vec4M {
        v * self
    }
}

impl Div<f64> for Vec4M {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.x1 / s, self.x2 / s, self.x3 / s, self.x4 / s)
    }
}

/// Causal type of a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
    Zero,
}

/// Classifies `v`; the lightlike test is relative to the squared euclidean norm.
pub fn causal_character(v: Vec4M, tol: f64) -> CausalCharacter {
    let n = v.euclidean_norm();
    if n <= tol {
        return CausalCharacter::Zero;
    }
    let q = inner(v, v);
    if q.abs() <= tol * n * n {
        CausalCharacter::Lightlike
    } else if q > 0.0 {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Timelike
    }
}

/// Coordinates with respect to `{e1, e2, xi1, xi2}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NullFrameCoords {
    pub z1: f64,
    pub z2: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl NullFrameCoords {
    pub const fn new(z1: f64, z2: f64, eta1: f64, eta2: f64) -> Self {
        Self { z1, z2, eta1, eta2 }
    }
}

/// `z1 e1 + z2 e2 + eta1 xi1 + eta2 xi2`.
pub fn from_null_frame(c: NullFrameCoords) -> Vec4M {
    Vec4M::new(
        c.z1,
        c.z2,
        FRAC_1_SQRT_2 * (c.eta1 - c.eta2),
        FRAC_1_SQRT_2 * (c.eta1 + c.eta2),
    )
}

pub fn to_null_frame(v: Vec4M) -> NullFrameCoords {
    NullFrameCoords::new(
        v.x1,
        v.x2,
        FRAC_1_SQRT_2 * (v.x3 + v.x4),
        FRAC_1_SQRT_2 * (v.x4 - v.x3),
    )
}
