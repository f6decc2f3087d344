//! Meridian surfaces of elliptic, hyperbolic and parabolic type, their
//! profile curves, and the marginally trapped parabolic families.
//!
//! A parabolic meridian surface is
//!
//! ```text
//! z(u, v) = f phi cos v e1 + f phi sin v e2 + (f phi^2 / 2 + g) xi1 + f xi2
//!         = f(u) zbar(v) + g(u) xi1
//! ```
//!
//! where `zbar(v)` runs on the paraboloid `P^2` and `(f, g)` is the meridian.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet2, Jet2Vec4};
use crate::minkowski::{from_null_frame, inner, NullFrameCoords, Vec4M, XI1};
use crate::surface::{ParamInterval, PatchKind, SurfacePatch};

/// A function of one variable evaluable in jet arithmetic.
pub type Profile = Arc<dyn Fn(Jet2) -> Jet2 + Send + Sync>;

/// Number of probe points used for eager admissibility checks.
const PROBES: usize = 257;

pub fn profile<F>(f: F) -> Profile
where
    F: Fn(Jet2) -> Jet2 + Send + Sync + 'static,
{
    Arc::new(f)
}

/// `(value, first, second)` derivative of a profile at `t`.
pub fn derivs(p: &Profile, t: f64) -> (f64, f64, f64) {
    let j = p(Jet2::seed_u(t));
    (j.val, j.du, j.duu)
}

/// Meridian curve `u -> (f(u), g(u))` on an interval `I`.
#[derive(Clone)]
pub struct ProfilePair {
    pub f: Profile,
    pub g: Profile,
    pub domain: ParamInterval,
}

impl fmt::Debug for ProfilePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProfilePair {{ domain: {} }}", self.domain)
    }
}

impl ProfilePair {
    pub fn new(f: Profile, g: Profile, domain: ParamInterval) -> Self {
        Self { f, g, domain }
    }

    pub fn with_domain(mut self, domain: ParamInterval) -> Self {
        self.domain = domain;
        self
    }

    pub fn check_parabolic(&self, u: f64) -> Result<()> {
        let (f, f1, _) = derivs(&self.f, u);
        let (_, g1, _) = derivs(&self.g, u);
        if !(f > 0.0) {
            return Err(admissibility("f(u) > 0", format!("u = {u} (f = {f})")));
        }
        if !(-f1 * g1 > 0.0) {
            return Err(admissibility(
                "-f'(u) g'(u) > 0",
                format!("u = {u} (-f'g' = {})", -f1 * g1),
            ));
        }
        Ok(())
    }

    pub fn check_elliptic(&self, u: f64) -> Result<()> {
        let (f, f1, _) = derivs(&self.f, u);
        let (_, g1, _) = derivs(&self.g, u);
        if !(f > 0.0) {
            return Err(admissibility("f(u) > 0", format!("u = {u} (f = {f})")));
        }
        if !(f1 * f1 - g1 * g1 > 0.0) {
            return Err(admissibility(
                "f'(u)^2 - g'(u)^2 > 0",
                format!("u = {u} (f'^2 - g'^2 = {})", f1 * f1 - g1 * g1),
            ));
        }
        Ok(())
    }

    pub fn check_hyperbolic(&self, u: f64) -> Result<()> {
        let (f, f1, _) = derivs(&self.f, u);
        let (_, g1, _) = derivs(&self.g, u);
        if !(f > 0.0) {
            return Err(admissibility("f(u) > 0", format!("u = {u} (f = {f})")));
        }
        if !(f1 * f1 + g1 * g1 > 0.0) {
            return Err(admissibility("f'(u)^2 + g'(u)^2 > 0", format!("u = {u}")));
        }
        Ok(())
    }
}

/// Generating function `phi(v)` of the curve `zbar` on `P^2`.
#[derive(Clone)]
pub struct ProfileCurvePhi {
    pub phi: Profile,
    pub domain: ParamInterval,
}

impl fmt::Debug for ProfileCurvePhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProfileCurvePhi {{ domain: {} }}", self.domain)
    }
}

impl ProfileCurvePhi {
    pub fn new(phi: Profile, domain: ParamInterval) -> Self {
        Self { phi, domain }
    }

    pub fn with_domain(mut self, domain: ParamInterval) -> Self {
        self.domain = domain;
        self
    }

    pub fn derivs(&self, v: f64) -> (f64, f64, f64) {
        derivs(&self.phi, v)
    }

    pub fn check(&self, v: f64) -> Result<()> {
        let (p, p1, _) = self.derivs(v);
        let s = p1 * p1 + p * p;
        if !(s > 0.0) {
            return Err(admissibility(
                "phi'(v)^2 + phi(v)^2 > 0",
                format!("v = {v} (phi = {p}, phi' = {p1})"),
            ));
        }
        Ok(())
    }
}

fn admissibility(condition: &str, location: String) -> Error {
    Error::Admissibility { condition: condition.to_string(), location }
}

/// A `+` / `-` choice, used both for the sign in the meridian ODE and for
/// the root of the plane-section quadratic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn both() -> [Branch; 2] {
        [Branch::Plus, Branch::Minus]
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

impl FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" | "p" => Ok(Branch::Plus),
            "minus" | "-" | "m" => Ok(Branch::Minus),
            other => Err(Error::Param(format!("branch must be plus or minus, got '{other}'"))),
        }
    }
}

fn probe_both(fp: &ProfilePair, u_check: impl Fn(&ProfilePair, f64) -> Result<()>) -> Result<()> {
    for u in fp.domain.probe_points(PROBES) {
        u_check(fp, u)?;
    }
    Ok(())
}

fn probe_phi(phi: &ProfileCurvePhi) -> Result<()> {
    for v in phi.domain.probe_points(PROBES) {
        phi.check(v)?;
    }
    Ok(())
}

/// Normal frame `(n1, n2)` of a parabolic meridian surface given by the
/// profile data in closed form.
pub fn parabolic_normal_frame(fp: &ProfilePair, phi: &ProfileCurvePhi, u: f64, v: f64) -> (Vec4M, Vec4M) {
    let (_, f1, _) = derivs(&fp.f, u);
    let (_, g1, _) = derivs(&fp.g, u);
    let (p, p1, _) = phi.derivs(v);
    let (s, c) = v.sin_cos();
    let r = (p1 * p1 + p * p).sqrt();
    let n1 = from_null_frame(NullFrameCoords::new(
        (p1 * s + p * c) / r,
        (-p1 * c + p * s) / r,
        p * p / r,
        0.0,
    ));
    let k = (-f1 / (2.0 * g1)).sqrt();
    let n2 = from_null_frame(NullFrameCoords::new(
        k * p * c,
        k * p * s,
        k * (f1 * p * p - 2.0 * g1) / (2.0 * f1),
        k,
    ));
    (n1, n2)
}

/// Meridian surface of parabolic type over `I x J`.
pub fn build_parabolic(fp: &ProfilePair, phi: &ProfileCurvePhi) -> Result<SurfacePatch> {
    probe_both(fp, ProfilePair::check_parabolic)?;
    probe_phi(phi)?;
    let (f, g, ph) = (fp.f.clone(), fp.g.clone(), phi.phi.clone());
    let immersion = move |u: Jet2, v: Jet2| {
        let fu = f(u);
        let gu = g(u);
        let p = ph(v);
        let fp_ = fu * p;
        Jet2Vec4::from_null_frame(fp_ * v.cos(), fp_ * v.sin(), fu * p.square() * 0.5 + gu, fu)
    };
    let (fp_frame, phi_frame) = (fp.clone(), phi.clone());
    Ok(SurfacePatch::new("parabolic-meridian", fp.domain.clone(), phi.domain.clone(), immersion)
        .with_kind(PatchKind::Parabolic { profiles: fp.clone(), phi: phi.clone() })
        .with_frame(move |u, v| parabolic_normal_frame(&fp_frame, &phi_frame, u, v)))
}

fn check_spacelike_samples(patch: &SurfacePatch) -> Result<()> {
    let us = patch.u_domain.probe_points(17);
    let vs = patch.v_domain.probe_points(17);
    for &u in &us {
        for &v in &vs {
            let j = crate::surface::jet_eval_surface(patch, u, v)?;
            let (zu, zv) = (j.du(), j.dv());
            let e = inner(zu, zu);
            let det = e * inner(zv, zv) - inner(zu, zv).powi(2);
            if !(e > 0.0 && det > 0.0) {
                return Err(admissibility(
                    "EG - F^2 > 0 (spacelike)",
                    format!("(u, v) = ({u}, {v}) (E = {e}, EG - F^2 = {det})"),
                ));
            }
        }
    }
    Ok(())
}

fn check_w_curve(w1: &Profile, w2: &Profile, v_domain: &ParamInterval) -> Result<()> {
    for v in v_domain.probe_points(PROBES) {
        let (_, a, _) = derivs(w1, v);
        let (_, b, _) = derivs(w2, v);
        if !(a * a + b * b > 0.0) {
            return Err(admissibility("w1'(v)^2 + w2'(v)^2 != 0", format!("v = {v}")));
        }
    }
    Ok(())
}

/// Meridian surface on the rotational hypersurface with timelike axis:
/// `f cos w1 cos w2 e1 + f cos w1 sin w2 e2 + f sin w1 e3 + g e4`.
pub fn build_elliptic(fp: &ProfilePair, w1: Profile, w2: Profile, v_domain: ParamInterval) -> Result<SurfacePatch> {
    probe_both(fp, ProfilePair::check_elliptic)?;
    check_w_curve(&w1, &w2, &v_domain)?;
    let (f, g) = (fp.f.clone(), fp.g.clone());
    let patch = SurfacePatch::new("elliptic-meridian", fp.domain.clone(), v_domain, move |u, v| {
        let (fu, gu) = (f(u), g(u));
        let (a, b) = (w1(v), w2(v));
        let ca = a.cos();
        Jet2Vec4::new(fu * ca * b.cos(), fu * ca * b.sin(), fu * a.sin(), gu)
    })
    .with_kind(PatchKind::Elliptic);
    check_spacelike_samples(&patch)?;
    Ok(patch)
}

/// Meridian surface on the rotational hypersurface with spacelike axis:
/// `g e1 + f cosh w1 cos w2 e2 + f cosh w1 sin w2 e3 + f sinh w1 e4`.
pub fn build_hyperbolic(fp: &ProfilePair, w1: Profile, w2: Profile, v_domain: ParamInterval) -> Result<SurfacePatch> {
    probe_both(fp, ProfilePair::check_hyperbolic)?;
    check_w_curve(&w1, &w2, &v_domain)?;
    let (f, g) = (fp.f.clone(), fp.g.clone());
    let patch = SurfacePatch::new("hyperbolic-meridian", fp.domain.clone(), v_domain, move |u, v| {
        let (fu, gu) = (f(u), g(u));
        let (a, b) = (w1(v), w2(v));
        let ch = a.cosh();
        Jet2Vec4::new(gu, fu * ch * b.cos(), fu * ch * b.sin(), fu * a.sinh())
    })
    .with_kind(PatchKind::Hyperbolic);
    check_spacelike_samples(&patch)?;
    Ok(patch)
}

/// Curvature of the meridian `c_u`: `(f'g'' - g'f'') / (-2 f'g')^{3/2}`.
pub fn kappa_m(fp: &ProfilePair, u: f64) -> Result<f64> {
    fp.check_parabolic(u)?;
    let (_, f1, f2) = derivs(&fp.f, u);
    let (_, g1, g2) = derivs(&fp.g, u);
    Ok((f1 * g2 - g1 * f2) / (-2.0 * f1 * g1).powf(1.5))
}

/// Curvature of `zbar`: `(phi phi'' - 2 phi'^2 - phi^2) / (phi'^2 + phi^2)^{3/2}`.
pub fn kappa_bar(phi: &ProfileCurvePhi, v: f64) -> Result<f64> {
    phi.check(v)?;
    let (p, p1, p2) = phi.derivs(v);
    let s = p1 * p1 + p * p;
    Ok((p * p2 - 2.0 * p1 * p1 - p * p) / (s * s.sqrt()))
}

/// Closed-form invariants of a parabolic meridian surface at `(u, v)`,
/// with `H1`, `H2` taken in [`parabolic_normal_frame`].
#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParabolicClosedForms {
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub M: f64,
    pub k: f64,
    pub K: f64,
    pub H1: f64,
    pub H2: f64,
    pub kappa_m: f64,
    pub kappa_bar: f64,
}

#[allow(non_snake_case)]
pub fn parabolic_closed_forms(fp: &ProfilePair, phi: &ProfileCurvePhi, u: f64, v: f64) -> Result<ParabolicClosedForms> {
    let km = kappa_m(fp, u)?;
    let kb = kappa_bar(phi, v)?;
    let (f, f1, f2) = derivs(&fp.f, u);
    let (_, g1, g2) = derivs(&fp.g, u);
    let (p, p1, p2) = phi.derivs(v);
    let s = p1 * p1 + p * p;
    let root = (-2.0 * f1 * g1).sqrt();
    let E = -2.0 * f1 * g1;
    let G = f * f * s;
    // <z_uu, n2> = sgn(f') (f''g' - g''f') / sqrt(-2f'g'), so kappa_m enters the
    // frame-dependent quantities as sgn(f') kappa_m, which is invariant under u -> -u.
    let sf = f1.signum();
    let M = sf * (f2 * g1 - g2 * f1) / (2.0 * f1 * g1) * (p * p2 - p * p - 2.0 * p1 * p1) / s;
    let k = -km * km * kb * kb / (f * f);
    let K = -sf * km * f1.abs() / (f * root);
    let H1 = kb / (2.0 * f);
    let H2 = -0.5 * (sf * km + f1.abs() / (f * root));
    Ok(ParabolicClosedForms { E, F: 0.0, G, M, k, K, H1, H2, kappa_m: km, kappa_bar: kb })
}

/// Plane section of the paraboloid `P^2` in the hyperplane `eta2 = 1`:
/// `(w1)^2/2 + (A cos w2 + B sin w2) w1 + C = 0`, with `A^2 + B^2 - 2C > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneSection {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub root: Branch,
}

/// Which arc of a plane section to follow: where `A cos v + B sin v` is
/// negative or positive. Irrelevant when `C < 0` (the section is a closed curve).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionArc {
    ThetaNegative,
    ThetaPositive,
}

/// Margin kept from the branch points where the discriminant vanishes.
pub const SECTION_EPS: f64 = 1e-12;

impl PlaneSection {
    pub fn new(a: f64, b: f64, c: f64, root: Branch) -> Result<Self> {
        let s = Self { a, b, c, root };
        s.discriminant()?;
        Ok(s)
    }

    /// `A^2 + B^2 - 2C`, required positive.
    pub fn discriminant(&self) -> Result<f64> {
        let d = self.a * self.a + self.b * self.b - 2.0 * self.c;
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Param(format!(
                "plane section needs A^2 + B^2 - 2C > 0, got {d} for (A, B, C) = ({}, {}, {})",
                self.a, self.b, self.c
            )));
        }
        Ok(d)
    }

    /// Arc used when none is requested. Prefers `theta < 0`, except for
    /// `C = 0` with the minus root, where `phi` vanishes on that arc.
    pub fn default_arc(&self) -> SectionArc {
        if self.c == 0.0 && self.root == Branch::Minus {
            SectionArc::ThetaPositive
        } else {
            SectionArc::ThetaNegative
        }
    }

    /// Parameter interval on which `phi` is defined for the given arc.
    pub fn domain(&self, arc: SectionArc) -> Result<ParamInterval> {
        self.discriminant()?;
        if self.c < 0.0 {
            return Ok(ParamInterval::new(0.0, 2.0 * PI));
        }
        let rho = self.a.hypot(self.b);
        let psi0 = self.b.atan2(self.a);
        let need = (2.0 * self.c + SECTION_EPS).sqrt();
        if !(rho > need) {
            return Err(Error::Param(format!(
                "plane section (A, B, C) = ({}, {}, {}) has no arc with (A cos v + B sin v)^2 - 2C >= {SECTION_EPS}",
                self.a, self.b, self.c
            )));
        }
        let center = match arc {
            SectionArc::ThetaNegative => psi0 + PI,
            SectionArc::ThetaPositive => psi0,
        };
        let half = (need / rho).acos();
        if self.c == 0.0 {
            let sign_theta = match arc {
                SectionArc::ThetaNegative => -1.0,
                SectionArc::ThetaPositive => 1.0,
            };
            if self.root.sign() * sign_theta > 0.0 {
                return Err(Error::Param(format!(
                    "with C = 0 the {} root vanishes identically on this arc",
                    self.root
                )));
            }
        }
        Ok(ParamInterval::new(center - half, center + half))
    }

    /// Curvature of the section curve on the given arc:
    /// `-sign(R - s theta) / sqrt(A^2 + B^2 - 2C)` with `R = sqrt(theta^2 - 2C)`
    /// and `s` the sign of the root. Negative except when `C > 0` and
    /// `s theta > 0` on the arc.
    pub fn curvature_on(&self, arc: SectionArc) -> Result<f64> {
        let d = self.discriminant()?;
        let theta_sign = match arc {
            SectionArc::ThetaNegative => -1.0,
            SectionArc::ThetaPositive => 1.0,
        };
        let flipped = self.c > 0.0 && self.root.sign() * theta_sign > 0.0;
        let mag = 1.0 / d.sqrt();
        Ok(if flipped { mag } else { -mag })
    }
}

/// `phi(v) = -(A cos v + B sin v) +- sqrt((A cos v + B sin v)^2 - 2C)` on
/// the default arc.
pub fn plane_section_phi(a: f64, b: f64, c: f64, root: Branch) -> Result<ProfileCurvePhi> {
    let s = PlaneSection::new(a, b, c, root)?;
    plane_section_phi_on(&s, s.default_arc())
}

pub fn plane_section_phi_on(section: &PlaneSection, arc: SectionArc) -> Result<ProfileCurvePhi> {
    let domain = section.domain(arc)?;
    let PlaneSection { a, b, c, root } = *section;
    let s = root.sign();
    let phi = profile(move |v: Jet2| {
        let theta = v.cos() * a + v.sin() * b;
        let r = (theta.square() - 2.0 * c).sqrt();
        -theta + r * s
    });
    Ok(ProfileCurvePhi::new(phi, domain))
}

/// Constant curvature of the section curve produced by [`plane_section_phi`].
pub fn plane_section_curvature(a: f64, b: f64, c: f64, root: Branch) -> Result<f64> {
    let s = PlaneSection::new(a, b, c, root)?;
    s.curvature_on(s.default_arc())
}

/// Residual of the section equation `phi^2/2 + theta phi + C` at `v`.
pub fn section_equation_residual(section: &PlaneSection, phi: &ProfileCurvePhi, v: f64) -> f64 {
    let (p, _, _) = phi.derivs(v);
    let theta = section.a * v.cos() + section.b * v.sin();
    p * p / 2.0 + theta * p + section.c
}

/// Parameters of the general marginally trapped family: meridian
/// `f = u`, `g` from `(a, b, c, sign)`, generating curve from `section`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MTFamilyParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub sign: Branch,
    pub section: PlaneSection,
}

/// Tolerance for matching `a` against the section curvature.
pub const CURVATURE_MATCH_TOL: f64 = 1e-12;

impl MTFamilyParams {
    pub fn new(a: f64, b: f64, c: f64, sign: Branch, section: PlaneSection) -> Result<Self> {
        check_ac(a, c)?;
        let kb = section.curvature_on(section.default_arc())?;
        if (kb - a).abs() > CURVATURE_MATCH_TOL {
            return Err(Error::Param(format!(
                "the section curvature {kb} must equal a = {a} (section ({}, {}, {}, {}))",
                section.a, section.b, section.c, section.root
            )));
        }
        Ok(Self { a, b, c, sign, section })
    }

    /// Pole `u*` where `c -+ a u = 0`.
    pub fn pole(&self) -> f64 {
        mt_pole(self.a, self.c, self.sign)
    }

    /// `c -+ a u`.
    pub fn linear_factor(&self, u: f64) -> f64 {
        self.c - self.sign.sign() * self.a * u
    }
}

fn check_ac(a: f64, c: f64) -> Result<()> {
    if !(a != 0.0 && a.is_finite()) {
        return Err(Error::Param(format!("a != 0 is required, got a = {a}")));
    }
    if !(c != 0.0 && c.is_finite()) {
        return Err(Error::Param(format!("c \u{2260} 0 (c != 0) is required, got c = {c}")));
    }
    Ok(())
}

pub fn mt_pole(a: f64, c: f64, sign: Branch) -> f64 {
    c / (sign.sign() * a)
}

/// Radius of the excluded neighbourhood around a pole `u*`.
pub fn pole_radius(pole: f64) -> f64 {
    (1e-3 * pole.abs()).max(1e-6)
}

/// `g(u) = (+-1 / 2a^3) ((a^2 u^2 -+ 2auc) / (c -+ au) - 2c ln|c -+ au| + b)`
/// as a jet profile.
pub fn mt_g_profile(a: f64, b: f64, c: f64, sign: Branch) -> Profile {
    let s = sign.sign();
    profile(move |u: Jet2| {
        let w = c - u * (s * a);
        let num = u.square() * (a * a) - u * (s * 2.0 * a * c);
        (num / w - w.abs().ln() * (2.0 * c) + b) * (s / (2.0 * a * a * a))
    })
}

/// Meridian of the general marginally trapped family, `f(u) = u`, over
/// `u > 0` with a neighbourhood of the pole removed.
pub fn mt_general_profile(p: &MTFamilyParams) -> Result<ProfilePair> {
    check_ac(p.a, p.c)?;
    let mut domain = ParamInterval::new(f64::MIN_POSITIVE, f64::INFINITY);
    let pole = p.pole();
    if pole > 0.0 {
        let r = pole_radius(pole);
        domain = domain.with_hole(pole - r, pole + r);
    }
    Ok(ProfilePair::new(profile(|u| u), mt_g_profile(p.a, p.b, p.c, p.sign), domain))
}

/// Marginally trapped meridian surface of the general family.
pub fn mt_general_patch(p: &MTFamilyParams) -> Result<SurfacePatch> {
    let fp = mt_general_profile(p)?;
    let phi = plane_section_phi(p.section.a, p.section.b, p.section.c, p.section.root)?;
    let mut patch = build_parabolic(&fp, &phi)?;
    patch.label = format!(
        "parabolic-mt(a={}, b={}, c={}, sign={}, section=({}, {}, {}, {}))",
        p.a, p.b, p.c, p.sign, p.section.a, p.section.b, p.section.c, p.section.root
    );
    Ok(patch)
}

/// Developable (cone) meridian surface `f = u`, `g = a u + b`, which is
/// marginally trapped exactly when `kbar^2 = -1/(2a)`. Its apex is `b xi1`.
pub fn mt_cone_patch(a: f64, b: f64, phi: &ProfileCurvePhi) -> Result<SurfacePatch> {
    if !(a < 0.0) {
        return Err(Error::Param(format!("cone family needs a < 0, got a = {a}")));
    }
    let target = -1.0 / (2.0 * a);
    let mut max_dev = 0.0f64;
    for v in phi.domain.probe_points(PROBES) {
        let kb = kappa_bar(phi, v)?;
        max_dev = max_dev.max((kb * kb - target).abs());
    }
    if max_dev > 1e-9 {
        return Err(Error::CurvatureMismatch { max_deviation: max_dev });
    }
    let fp = cone_profile(a, b);
    let mut patch = build_parabolic(&fp, phi)?;
    patch.label = format!("cone(a={a}, b={b})");
    Ok(patch)
}

/// Straight meridian `f = u`, `g = a u + b` over `u > 0`.
pub fn cone_profile(a: f64, b: f64) -> ProfilePair {
    ProfilePair::new(
        profile(|u| u),
        profile(move |u| u * a + b),
        ParamInterval::new(f64::MIN_POSITIVE, f64::INFINITY),
    )
}

/// Point of the paraboloid `P^2`:
/// `w1 cos w2 e1 + w1 sin w2 e2 + (w1^2/2) xi1 + xi2`.
pub fn paraboloid_point(w1: f64, w2: f64) -> Vec4M {
    let (s, c) = w2.sin_cos();
    from_null_frame(NullFrameCoords::new(w1 * c, w1 * s, w1 * w1 / 2.0, 1.0))
}

pub fn paraboloid_jet(w1: Jet2, w2: Jet2) -> Jet2Vec4 {
    Jet2Vec4::from_null_frame(w1 * w2.cos(), w1 * w2.sin(), w1.square() * 0.5, Jet2::constant(1.0))
}

/// Frenet data of `zbar(v)` on `P^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CbarFrenet {
    pub z: Vec4M,
    /// Unit tangent.
    pub t: Vec4M,
    /// `d t / ds` divided by the curvature; `None` where the curvature vanishes.
    pub n: Option<Vec4M>,
    pub kappa: f64,
    /// `d t / ds` itself.
    pub dt_ds: Vec4M,
}

/// Curve `zbar(v) = paraboloid_point(phi(v), v)` together with its Frenet data.
#[derive(Clone, Debug)]
pub struct P2Curve {
    pub phi: ProfileCurvePhi,
}

impl P2Curve {
    pub fn new(phi: ProfileCurvePhi) -> Self {
        Self { phi }
    }

    pub fn jet(&self, v: f64) -> Jet2Vec4 {
        let t = Jet2::seed_u(v);
        paraboloid_jet((self.phi.phi)(t), t)
    }

    pub fn point(&self, v: f64) -> Vec4M {
        let (p, _, _) = self.phi.derivs(v);
        paraboloid_point(p, v)
    }

    pub fn frenet(&self, v: f64) -> Result<CbarFrenet> {
        let kappa = kappa_bar(&self.phi, v)?;
        let j = self.jet(v);
        let (z, d1, d2) = (j.value(), j.du(), j.duu());
        let speed_sq = inner(d1, d1);
        let speed = speed_sq.sqrt();
        let t = d1 / speed;
        let dt_dv = d2 / speed - d1 * (inner(d1, d2) / (speed_sq * speed));
        let dt_ds = dt_dv / speed;
        let n = if kappa.abs() > 1e-14 { Some(dt_ds / kappa) } else { None };
        Ok(CbarFrenet { z, t, n, kappa, dt_ds })
    }
}

pub fn cbar_frenet(phi: &ProfileCurvePhi, v: f64) -> Result<CbarFrenet> {
    P2Curve::new(phi.clone()).frenet(v)
}

/// Spanning pair `(xi1, zbar(v0))` of the lightlike plane containing the meridian at `v0`.
pub fn meridian_plane(phi: &ProfileCurvePhi, v0: f64) -> (Vec4M, Vec4M) {
    (XI1, P2Curve::new(phi.clone()).point(v0))
}

/// Unit tangent, principal normal and curvature of the meridian `c_u` at `v = v0`.
///
/// The normal is taken from its closed form
/// `(c a f' e1 + c b f' e2 + (c^2 f'/2 - g') xi1 + f' xi2) / sqrt(-2 f'g')`
/// with `c = phi(v0)`, `a = cos v0`, `b = sin v0`.
pub fn meridian_frenet(fp: &ProfilePair, phi: &ProfileCurvePhi, u: f64, v0: f64) -> Result<(Vec4M, Vec4M, f64)> {
    let km = kappa_m(fp, u)?;
    let (_, f1, _) = derivs(&fp.f, u);
    let (_, g1, _) = derivs(&fp.g, u);
    let (p, _, _) = phi.derivs(v0);
    let (s, c) = v0.sin_cos();
    let root = (-2.0 * f1 * g1).sqrt();
    let t = from_null_frame(NullFrameCoords::new(p * c * f1, p * s * f1, p * p / 2.0 * f1 + g1, f1)) / root;
    let n = from_null_frame(NullFrameCoords::new(p * c * f1, p * s * f1, p * p / 2.0 * f1 - g1, f1)) / root;
    Ok((t, n, km))
}
