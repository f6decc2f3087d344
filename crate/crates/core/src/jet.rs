//! Second-order forward-mode differentiation in two variables.
//!
//! A [`Jet2`] carries a value together with its first and second partial
//! derivatives with respect to `(u, v)`. Arithmetic follows the truncated
//! Taylor rules, so evaluating an immersion on seeded jets yields `z`,
//! `z_u`, `z_v`, `z_uu`, `z_uv`, `z_vv` in one pass. The mixed partial lives
//! in a single slot and every rule is written so that exchanging the roles
//! of `u` and `v` reproduces it bit for bit.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::minkowski::{NullFrameCoords, Vec4M};

/// Value and partial derivatives up to order two in `(u, v)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2 {
    pub val: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

impl Jet2 {
    pub const fn new(val: f64, du: f64, dv: f64, duu: f64, duv: f64, dvv: f64) -> Self {
        Self { val, du, dv, duu, duv, dvv }
    }

    pub const fn constant(val: f64) -> Self {
        Self::new(val, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// The independent variable `u` evaluated at `t`.
    pub const fn seed_u(t: f64) -> Self {
        Self::new(t, 1.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// The independent variable `v` evaluated at `t`.
    pub const fn seed_v(t: f64) -> Self {
        Self::new(t, 0.0, 1.0, 0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite()
            && self.du.is_finite()
            && self.dv.is_finite()
            && self.duu.is_finite()
            && self.duv.is_finite()
            && self.dvv.is_finite()
    }

    /// Exchange the roles of `u` and `v`.
    pub fn swapped(self) -> Self {
        Self::new(self.val, self.dv, self.du, self.dvv, self.duv, self.duu)
    }

    /// Composition with a scalar function given its value and first two
    /// derivatives at `self.val`.
    #[inline]
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Self {
            val: f0,
            du: f1 * self.du,
            dv: f1 * self.dv,
            duu: f2 * (self.du * self.du) + f1 * self.duu,
            duv: f2 * (self.du * self.dv) + f1 * self.duv,
            dvv: f2 * (self.dv * self.dv) + f1 * self.dvv,
        }
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.val;
        self.chain(self.val.ln(), r, -r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.val.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (self.val * s))
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.val;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn powf(self, p: f64) -> Self {
        let x = self.val;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    pub fn powi(self, n: i32) -> Self {
        let x = self.val;
        let nf = f64::from(n);
        let f1 = if n == 0 { 0.0 } else { nf * x.powi(n - 1) };
        let f2 = if n == 0 || n == 1 { 0.0 } else { nf * (nf - 1.0) * x.powi(n - 2) };
        self.chain(x.powi(n), f1, f2)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(c, s, c)
    }

    /// Absolute value; derivatives are those of the smooth branch at `val`.
    pub fn abs(self) -> Self {
        if self.val < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn square(self) -> Self {
        self * self
    }
}

impl From<f64> for Jet2 {
    fn from(x: f64) -> Self {
        Jet2::constant(x)
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.val + o.val,
            self.du + o.du,
            self.dv + o.dv,
            self.duu + o.duu,
            self.duv + o.duv,
            self.dvv + o.dvv,
        )
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.val - o.val,
            self.du - o.du,
            self.dv - o.dv,
            self.duu - o.duu,
            self.duv - o.duv,
            self.dvv - o.dvv,
        )
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.val, -self.du, -self.dv, -self.duu, -self.duv, -self.dvv)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = self;
        Self {
            val: a.val * o.val,
            du: a.du * o.val + a.val * o.du,
            dv: a.dv * o.val + a.val * o.dv,
            // grouped so that both operand order and u <-> v swaps are bit-exact
            duu: (a.duu * o.val + a.val * o.duu) + 2.0 * (a.du * o.du),
            duv: (a.duv * o.val + a.val * o.duv) + (a.du * o.dv + a.dv * o.du),
            dvv: (a.dvv * o.val + a.val * o.dvv) + 2.0 * (a.dv * o.dv),
        }
    }
}

impl Div for Jet2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Self;
    fn add(mut self, s: f64) -> Self {
        self.val += s;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Self;
    fn sub(mut self, s: f64) -> Self {
        self.val -= s;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(
            self.val * s,
            self.du * s,
            self.dv * s,
            self.duu * s,
            self.duv * s,
            self.dvv * s,
        )
    }
}

impl Div<f64> for Jet2 {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(
            self.val / s,
            self.du / s,
            self.dv / s,
            self.duu / s,
            self.duv / s,
            self.dvv / s,
        )
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, j: Jet2) -> Jet2 {
        j + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, j: Jet2) -> Jet2 {
        -j + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        j * self
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, j: Jet2) -> Jet2 {
        j.recip() * self
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Elementary functions with a checked domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementaryFn {
    Sin,
    Cos,
    Sqrt,
    Ln,
    Exp,
    /// `x^p` for a real exponent `p`.
    Pow(f64),
    Reciprocal,
}

/// Applies `f` to `x`, rejecting arguments outside the function's domain.
pub fn jet_apply(f: ElementaryFn, x: Jet2) -> Result<Jet2> {
    let t = x.val;
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite jet argument {x:?}")));
    }
    let y = match f {
        ElementaryFn::Sin => x.sin(),
        ElementaryFn::Cos => x.cos(),
        ElementaryFn::Exp => x.exp(),
        ElementaryFn::Sqrt => {
            if t <= 0.0 {
                return Err(Error::Domain(format!("sqrt requires a positive argument, got {t}")));
            }
            x.sqrt()
        }
        ElementaryFn::Ln => {
            if t <= 0.0 {
                return Err(Error::Domain(format!("ln requires a positive argument, got {t}")));
            }
            x.ln()
        }
        ElementaryFn::Reciprocal => {
            if t == 0.0 {
                return Err(Error::Domain("reciprocal of zero".into()));
            }
            x.recip()
        }
        ElementaryFn::Pow(p) => {
            let integral = p.fract() == 0.0 && p.abs() < f64::from(i32::MAX);
            if integral {
                // x^n is smooth everywhere except at 0 for n < 2
                if t == 0.0 && p < 2.0 && p != 0.0 && p != 1.0 {
                    return Err(Error::Domain(format!("x^{p} is not twice differentiable at 0")));
                }
                x.powi(p as i32)
            } else {
                if t <= 0.0 {
                    return Err(Error::Domain(format!(
                        "x^{p} requires a positive argument, got {t}"
                    )));
                }
                x.powf(p)
            }
        }
    };
    if !y.is_finite() {
        return Err(Error::Domain(format!("{f:?} overflowed at {t}")));
    }
    Ok(y)
}

/// Four jets holding the orthonormal coordinates of a point of R^4_1.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2Vec4 {
    pub c: [Jet2; 4],
}

impl Jet2Vec4 {
    pub const fn new(x1: Jet2, x2: Jet2, x3: Jet2, x4: Jet2) -> Self {
        Self { c: [x1, x2, x3, x4] }
    }

    /// Builds from coordinates in the null frame `{e1, e2, xi1, xi2}`.
    pub fn from_null_frame(z1: Jet2, z2: Jet2, eta1: Jet2, eta2: Jet2) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(z1, z2, (eta1 - eta2) * s, (eta1 + eta2) * s)
    }

    fn slot(&self, f: impl Fn(&Jet2) -> f64) -> Vec4M {
        Vec4M::new(f(&self.c[0]), f(&self.c[1]), f(&self.c[2]), f(&self.c[3]))
    }

    pub fn value(&self) -> Vec4M {
        self.slot(|j| j.val)
    }
    pub fn du(&self) -> Vec4M {
        self.slot(|j| j.du)
    }
    pub fn dv(&self) -> Vec4M {
        self.slot(|j| j.dv)
    }
    pub fn duu(&self) -> Vec4M {
        self.slot(|j| j.duu)
    }
    pub fn duv(&self) -> Vec4M {
        self.slot(|j| j.duv)
    }
    pub fn dvv(&self) -> Vec4M {
        self.slot(|j| j.dvv)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(Jet2::is_finite)
    }

    /// Null-frame coordinates of the value slot.
    pub fn value_null(&self) -> NullFrameCoords {
        crate::minkowski::to_null_frame(self.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn sin_at_maximum() {
        let y = jet_apply(ElementaryFn::Sin, Jet2::seed_u(FRAC_PI_2)).unwrap();
        assert_eq!(y.val, 1.0);
        assert!(y.du.abs() < 1e-16);
        assert_eq!(y.duu, -1.0);
        assert_eq!((y.dv, y.duv, y.dvv), (0.0, 0.0, 0.0));
    }

    #[test]
    fn sqrt_of_constant() {
        let y = jet_apply(ElementaryFn::Sqrt, Jet2::constant(4.0)).unwrap();
        assert_eq!(y, Jet2::constant(2.0));
    }

    #[test]
    fn ln_matches_finite_differences() {
        let y = jet_apply(ElementaryFn::Ln, Jet2::seed_u(1.0)).unwrap();
        let h: f64 = 1e-5;
        let fd1 = ((1.0 + h).ln() - (1.0 - h).ln()) / (2.0 * h);
        let h2: f64 = 1e-4;
        let fd2 = ((1.0 + h2).ln() + (1.0 - h2).ln()) / (h2 * h2);
        assert_eq!(y.val, 0.0);
        assert!((y.du - fd1).abs() <= 1e-8, "{} vs {}", y.du, fd1);
        assert!((y.duu - fd2).abs() <= 1e-6, "{} vs {}", y.duu, fd2);
        assert_eq!(y.du, 1.0);
        assert_eq!(y.duu, -1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(jet_apply(ElementaryFn::Sqrt, Jet2::seed_u(-1.0)), Err(Error::Domain(_))));
        assert!(matches!(jet_apply(ElementaryFn::Ln, Jet2::seed_u(0.0)), Err(Error::Domain(_))));
        assert!(matches!(
            jet_apply(ElementaryFn::Reciprocal, Jet2::seed_u(0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(jet_apply(ElementaryFn::Pow(0.5), Jet2::seed_u(-2.0)), Err(Error::Domain(_))));
        assert!(jet_apply(ElementaryFn::Pow(3.0), Jet2::seed_u(-2.0)).is_ok());
    }

    #[test]
    fn product_mixed_partial() {
        let a = Jet2::new(1.5, 0.3, -0.7, 0.2, 0.9, -1.1);
        let b = Jet2::new(-0.4, 1.2, 0.5, -0.6, 0.1, 0.8);
        let p = a * b;
        let expect = a.duv * b.val + a.du * b.dv + a.dv * b.du + a.val * b.duv;
        assert!((p.duv - expect).abs() < 1e-15);
    }

    fn sample_fn(f: ElementaryFn, x: f64) -> f64 {
        jet_apply(f, Jet2::constant(x)).unwrap().val
    }

    /// Five-point central differences; the second derivative uses a wider
    /// step because its rounding error scales like eps / h^2.
    fn fd_derivs(f: ElementaryFn, x: f64) -> (f64, f64) {
        let g = |t: f64| sample_fn(f, t);
        let h = 1e-5;
        let d1 = (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h);
        let h = 1e-3;
        let d2 = (-g(x + 2.0 * h) + 16.0 * g(x + h) - 30.0 * g(x) + 16.0 * g(x - h)
            - g(x - 2.0 * h))
            / (12.0 * h * h);
        (d1, d2)
    }

    fn check_fd(f: ElementaryFn, x: f64) -> std::result::Result<(), TestCaseError> {
        let y = jet_apply(f, Jet2::seed_u(x)).unwrap();
        let (d1, d2) = fd_derivs(f, x);
        prop_assert!(close(y.du, d1, 1e-6), "{:?} d1 at {}: {} vs {}", f, x, y.du, d1);
        prop_assert!(close(y.duu, d2, 1e-6), "{:?} d2 at {}: {} vs {}", f, x, y.duu, d2);
        Ok(())
    }

    fn ulps_of(x: f64) -> f64 {
        let a = x.abs().max(f64::MIN_POSITIVE);
        f64::from_bits(a.to_bits() + 1) - a
    }

    fn arb_jet() -> impl Strategy<Value = Jet2> {
        (0.5..3.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(a, b, c, d, e, f)| Jet2::new(a, b, c, d, e, f))
    }

    fn jet_scale(j: &Jet2) -> f64 {
        [j.val, j.du, j.dv, j.duu, j.duv, j.dvv].iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    proptest! {
        #[test]
        fn elementary_functions_match_fd(x in 0.2..4.0f64, p in -2.5..2.5f64) {
            check_fd(ElementaryFn::Sin, x)?;
            check_fd(ElementaryFn::Cos, x)?;
            check_fd(ElementaryFn::Sqrt, x)?;
            check_fd(ElementaryFn::Ln, x)?;
            check_fd(ElementaryFn::Exp, x)?;
            check_fd(ElementaryFn::Reciprocal, x)?;
            check_fd(ElementaryFn::Pow(p), x)?;
        }

        #[test]
        fn algebraic_identities(a in arb_jet(), b in arb_jet()) {
            // (a b) / b == a
            let q = (a * b) / b;
            let scale = jet_scale(&a) * jet_scale(&b) * jet_scale(&b.recip()) * 8.0;
            for (x, y) in [(q.val, a.val), (q.du, a.du), (q.dv, a.dv), (q.duu, a.duu), (q.duv, a.duv), (q.dvv, a.dvv)] {
                prop_assert!((x - y).abs() <= 16.0 * ulps_of(scale), "{} vs {}", x, y);
            }
            // commutativity is exact
            prop_assert_eq!(a * b, b * a);
            // chain rule: sqrt(a)^2 == a, exp(ln a) == a
            let s = a.sqrt() * a.sqrt();
            let e = a.ln().exp();
            let scale = jet_scale(&a) * jet_scale(&a.sqrt().recip()).max(1.0) * 8.0;
            for (x, y) in [(s.du, a.du), (s.duu, a.duu), (s.duv, a.duv), (e.du, a.du), (e.duu, a.duu), (e.dvv, a.dvv)] {
                prop_assert!((x - y).abs() <= 16.0 * ulps_of(scale), "{} vs {}", x, y);
            }
        }

        #[test]
        fn swapping_seed_roles_is_exact(u in 0.3..2.0f64, v in -0.25..2.0f64) {
            let f = |u: Jet2, v: Jet2| (u * v.sin() + (u * v).exp()) / (1.0 + u.square() + v.cos().square()) + (u + v).sqrt().ln();
            let j = f(Jet2::seed_u(u), Jet2::seed_v(v));
            let s = f(Jet2::new(u, 0.0, 1.0, 0.0, 0.0, 0.0), Jet2::new(v, 1.0, 0.0, 0.0, 0.0, 0.0));
            prop_assert_eq!(j.duv, s.duv);
            prop_assert_eq!(j.swapped(), s);
        }
    }
}
