//! Pointwise geometry of spacelike immersions `(u, v) -> R^4_1`.
//!
//! The normal space of a spacelike surface has signature (1,1). We pick a
//! frame `{n1, n2}` with `<n1,n1> = 1`, `<n2,n2> = -1` and decompose
//!
//! ```text
//! z_ij = (tangential) + c_ij^1 n1 - c_ij^2 n2,   c_ij^k = <z_ij, n_k>
//! ```
//!
//! From the six coefficients `c_ij^k` we get the second fundamental form
//! `L, M, N`, the invariants `k` and `kappa` (normal curvature), the Gauss
//! curvature `K` and the mean curvature vector `H`. The components `H1`,
//! `H2` follow the same convention as `c_ij^k`: `H1 = <H, n1>`,
//! `H2 = <H, n2>`, hence `H = H1 n1 - H2 n2`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet2, Jet2Vec4};
use crate::meridian::{ProfileCurvePhi, ProfilePair};
use crate::minkowski::{causal_character, det4, inner, CausalCharacter, Vec4M, E1, E2, E3, E4};

/// Immersion evaluated in jet arithmetic.
pub type Immersion = Arc<dyn Fn(Jet2, Jet2) -> Jet2Vec4 + Send + Sync>;

/// Explicit normal frame `(n1, n2)` at `(u, v)`.
pub type FrameFn = Arc<dyn Fn(f64, f64) -> (Vec4M, Vec4M) + Send + Sync>;

/// A closed parameter interval, possibly unbounded, with open holes removed.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamInterval {
    pub lo: f64,
    pub hi: f64,
    pub holes: Vec<(f64, f64)>,
}

impl ParamInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, holes: Vec::new() }
    }

    pub fn with_hole(mut self, lo: f64, hi: f64) -> Self {
        self.holes.push((lo, hi));
        self
    }

    pub fn contains(&self, t: f64) -> bool {
        t.is_finite()
            && t >= self.lo
            && t <= self.hi
            && !self.holes.iter().any(|&(a, b)| t > a && t < b)
    }

    /// True when the closed range `[a, b]` lies in the interval and avoids every hole.
    pub fn contains_range(&self, a: f64, b: f64) -> bool {
        self.contains(a)
            && self.contains(b)
            && !self.holes.iter().any(|&(ha, hb)| a < hb && b > ha)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Up to `n` probe points spread over the interval, skipping holes.
    /// Unbounded ends are probed on a geometric ladder away from the finite end.
    pub fn probe_points(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let pts: Vec<f64> = if self.is_bounded() {
            (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect()
        } else {
            let anchor = if self.lo.is_finite() {
                self.lo
            } else if self.hi.is_finite() {
                self.hi
            } else {
                0.0
            };
            // the finite end of a half-line is usually a degenerate limit (u -> 0), so it is not probed
            let mut v = Vec::with_capacity(2 * n);
            for i in 0..n {
                let step = 1e-3 * 10f64.powf(6.0 * i as f64 / (n - 1) as f64);
                if self.hi == f64::INFINITY {
                    v.push(anchor + step);
                }
                if self.lo == f64::NEG_INFINITY {
                    v.push(anchor - step);
                }
            }
            v
        };
        pts.into_iter().filter(|&t| self.contains(t)).collect()
    }
}

impl fmt::Display for ParamInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)?;
        for (a, b) in &self.holes {
            write!(f, " \\ ({a}, {b})")?;
        }
        Ok(())
    }
}

/// What family a patch was built from.
#[derive(Clone)]
pub enum PatchKind {
    Generic,
    Elliptic,
    Hyperbolic,
    /// Meridian surface of parabolic type with its profile data.
    Parabolic { profiles: ProfilePair, phi: ProfileCurvePhi },
}

impl PatchKind {
    pub fn is_parabolic(&self) -> bool {
        matches!(self, PatchKind::Parabolic { .. })
    }
}

/// An immersion over a rectangular parameter domain.
#[derive(Clone)]
pub struct SurfacePatch {
    pub label: String,
    pub u_domain: ParamInterval,
    pub v_domain: ParamInterval,
    pub immersion: Immersion,
    pub kind: PatchKind,
    /// Preferred normal frame; when absent [`normal_frame`] is used.
    pub frame: Option<FrameFn>,
}

impl fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("label", &self.label)
            .field("u_domain", &self.u_domain)
            .field("v_domain", &self.v_domain)
            .field("parabolic", &self.kind.is_parabolic())
            .field("explicit_frame", &self.frame.is_some())
            .finish()
    }
}

impl SurfacePatch {
    pub fn new<F>(label: impl Into<String>, u_domain: ParamInterval, v_domain: ParamInterval, f: F) -> Self
    where
        F: Fn(Jet2, Jet2) -> Jet2Vec4 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            u_domain,
            v_domain,
            immersion: Arc::new(f),
            kind: PatchKind::Generic,
            frame: None,
        }
    }

    pub fn with_kind(mut self, kind: PatchKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_frame<F>(mut self, f: F) -> Self
    where
        F: Fn(f64, f64) -> (Vec4M, Vec4M) + Send + Sync + 'static,
    {
        self.frame = Some(Arc::new(f));
        self
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u_domain.contains(u) && self.v_domain.contains(v)
    }

    /// Position only.
    pub fn position(&self, u: f64, v: f64) -> Result<Vec4M> {
        if !self.contains(u, v) {
            return Err(self.outside(u, v));
        }
        let z = (self.immersion)(Jet2::constant(u), Jet2::constant(v)).value();
        if !z.is_finite() {
            return Err(Error::Domain(format!("non-finite position at ({u}, {v})")));
        }
        Ok(z)
    }

    fn outside(&self, u: f64, v: f64) -> Error {
        Error::Domain(format!(
            "({u}, {v}) is outside the domain {} x {} of '{}'",
            self.u_domain, self.v_domain, self.label
        ))
    }
}

/// Evaluates the immersion on seeded jets, giving `z` and all partials up to order two.
pub fn jet_eval_surface(patch: &SurfacePatch, u: f64, v: f64) -> Result<Jet2Vec4> {
    if !patch.contains(u, v) {
        return Err(patch.outside(u, v));
    }
    let j = (patch.immersion)(Jet2::seed_u(u), Jet2::seed_v(v));
    if !j.is_finite() {
        return Err(Error::Domain(format!(
            "immersion '{}' is not finite at ({u}, {v})",
            patch.label
        )));
    }
    Ok(j)
}

/// Everything known about the surface at one parameter point.
#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointData {
    pub u: f64,
    pub v: f64,
    pub z: Vec4M,
    pub z_u: Vec4M,
    pub z_v: Vec4M,
    pub z_uu: Vec4M,
    pub z_uv: Vec4M,
    pub z_vv: Vec4M,
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub W: f64,
    /// Orthonormal tangent frame: `x = z_u/sqrt(E)` and `y` completing it.
    pub x: Vec4M,
    pub y: Vec4M,
    pub n1: Vec4M,
    pub n2: Vec4M,
    pub c11_1: f64,
    pub c12_1: f64,
    pub c22_1: f64,
    pub c11_2: f64,
    pub c12_2: f64,
    pub c22_2: f64,
    pub L: f64,
    pub M: f64,
    pub N: f64,
    pub k: f64,
    pub kappa_normal: f64,
    pub K: f64,
    pub H: Vec4M,
    pub H1: f64,
    pub H2: f64,
}

#[allow(non_snake_case)]
impl PointData {
    /// Builds all invariants from the jets and a given normal frame.
    /// No orientation or signature checks are made on the frame.
    pub fn from_jets(u: f64, v: f64, j: &Jet2Vec4, n1: Vec4M, n2: Vec4M) -> Self {
        let (z, z_u, z_v) = (j.value(), j.du(), j.dv());
        let (z_uu, z_uv, z_vv) = (j.duu(), j.duv(), j.dvv());
        let E = inner(z_u, z_u);
        let F = inner(z_u, z_v);
        let G = inner(z_v, z_v);
        let det = E * G - F * F;
        let W = det.sqrt();

        let c11_1 = inner(z_uu, n1);
        let c12_1 = inner(z_uv, n1);
        let c22_1 = inner(z_vv, n1);
        let c11_2 = inner(z_uu, n2);
        let c12_2 = inner(z_uv, n2);
        let c22_2 = inner(z_vv, n2);

        let L = 2.0 / W * (c11_1 * c12_2 - c12_1 * c11_2);
        let M = 1.0 / W * (c11_1 * c22_2 - c22_1 * c11_2);
        let N = 2.0 / W * (c12_1 * c22_2 - c22_1 * c12_2);
        let k = (L * N - M * M) / det;
        let kappa_normal = (E * N + G * L - 2.0 * F * M) / (2.0 * det);

        // Gauss equation in flat ambient space, normal components only.
        let K = ((c11_1 * c22_1 - c11_2 * c22_2) - (c12_1 * c12_1 - c12_2 * c12_2)) / det;

        let H1 = (G * c11_1 - 2.0 * F * c12_1 + E * c22_1) / (2.0 * det);
        let H2 = (G * c11_2 - 2.0 * F * c12_2 + E * c22_2) / (2.0 * det);
        let H = n1 * H1 - n2 * H2;

        let sqrt_e = E.sqrt();
        let x = z_u / sqrt_e;
        let y = (z_v * E - z_u * F) / (sqrt_e * W);

        Self {
            u,
            v,
            z,
            z_u,
            z_v,
            z_uu,
            z_uv,
            z_vv,
            E,
            F,
            G,
            W,
            x,
            y,
            n1,
            n2,
            c11_1,
            c12_1,
            c22_1,
            c11_2,
            c12_2,
            c22_2,
            L,
            M,
            N,
            k,
            kappa_normal,
            K,
            H,
            H1,
            H2,
        }
    }

    /// `sigma(z_u, z_u)`, `sigma(z_u, z_v)`, `sigma(z_v, z_v)` as vectors.
    pub fn sigma_coordinate(&self) -> (Vec4M, Vec4M, Vec4M) {
        let s = |a: f64, b: f64| self.n1 * a - self.n2 * b;
        (s(self.c11_1, self.c11_2), s(self.c12_1, self.c12_2), s(self.c22_1, self.c22_2))
    }

    /// `sigma(x, x)`, `sigma(x, y)`, `sigma(y, y)` in the orthonormal tangent frame.
    pub fn sigma_orthonormal(&self) -> (Vec4M, Vec4M, Vec4M) {
        let (suu, suv, svv) = self.sigma_coordinate();
        let (E, F, W) = (self.E, self.F, self.W);
        // x = z_u / sqrt(E),  y = (E z_v - F z_u) / (sqrt(E) W)
        let sxx = suu / E;
        let sxy = (suv * E - suu * F) / (E * W);
        let syy = (svv * (E * E) - suv * (2.0 * E * F) + suu * (F * F)) / (E * W * W);
        (sxx, sxy, syy)
    }

    /// `<H, H>`.
    pub fn h_norm_sq(&self) -> f64 {
        self.H1 * self.H1 - self.H2 * self.H2
    }

    /// `|<H,H>| / max(H1^2 + H2^2, floor)`.
    pub fn normalized_h_residual(&self, floor: f64) -> f64 {
        self.h_norm_sq().abs() / (self.H1 * self.H1 + self.H2 * self.H2).max(floor)
    }

    /// Components `(<H, m1>, <H, m2>)` with respect to another normal frame.
    pub fn h_components_in(&self, m1: Vec4M, m2: Vec4M) -> (f64, f64) {
        (inner(self.H, m1), inner(self.H, m2))
    }

    pub fn orientation(&self) -> f64 {
        det4([self.z_u, self.z_v, self.n1, self.n2])
    }
}

/// Normal frame of a spacelike tangent plane.
///
/// `n2` is the normalized projection of `e4` onto the normal plane, so
/// `<n2, e4> < 0`. `n1` is the projection of `e3` (or of `e1`/`e2` when
/// that is nearly degenerate) orthogonalized against `n2`, with sign
/// chosen so that `det[z_u | z_v | n1 | n2] > 0`.
pub fn normal_frame(z_u: Vec4M, z_v: Vec4M) -> Result<(Vec4M, Vec4M)> {
    let e = inner(z_u, z_u);
    let f = inner(z_u, z_v);
    let g = inner(z_v, z_v);
    let det = e * g - f * f;
    if !(e > 0.0 && det > 0.0) {
        return Err(Error::DegenerateFrame(format!(
            "tangent plane is not spacelike (E = {e}, EG - F^2 = {det})"
        )));
    }
    let project = |w: Vec4M| {
        let a = inner(w, z_u);
        let b = inner(w, z_v);
        let alpha = (g * a - f * b) / det;
        let beta = (e * b - f * a) / det;
        w - z_u * alpha - z_v * beta
    };

    let p4 = project(E4);
    let q4 = inner(p4, p4);
    if !(q4 < 0.0) {
        return Err(Error::DegenerateFrame(format!(
            "normal plane has no timelike direction (<p, p> = {q4})"
        )));
    }
    let n2 = p4 / (-q4).sqrt();

    let spacelike_part = |w: Vec4M| {
        let p = project(w);
        let p = p + n2 * inner(p, n2);
        (p, inner(p, p))
    };
    let mut best = spacelike_part(E3);
    if best.1 < 1e-4 {
        for cand in [E1, E2] {
            let c = spacelike_part(cand);
            if c.1 > best.1 {
                best = c;
            }
        }
    }
    let (p, q) = best;
    if !(q > 1e-14) {
        return Err(Error::DegenerateFrame(format!(
            "no spacelike normal direction found (<p, p> = {q})"
        )));
    }
    let mut n1 = p / q.sqrt();
    if det4([z_u, z_v, n1, n2]) < 0.0 {
        n1 = -n1;
    }
    Ok((n1, n2))
}

/// Full pointwise geometry of `patch` at `(u, v)`.
pub fn point_data(patch: &SurfacePatch, u: f64, v: f64) -> Result<PointData> {
    let j = jet_eval_surface(patch, u, v)?;
    let (z_u, z_v) = (j.du(), j.dv());
    let e = inner(z_u, z_u);
    let det = e * inner(z_v, z_v) - inner(z_u, z_v).powi(2);
    if !(e > 0.0 && det > 0.0) {
        return Err(Error::NotSpacelike { u, v, e, det });
    }
    let (n1, n2) = match &patch.frame {
        Some(frame) => {
            let (mut n1, mut n2) = frame(u, v);
            if !(n1.is_finite() && n2.is_finite()) {
                return Err(Error::DegenerateFrame(format!("explicit frame not finite at ({u}, {v})")));
            }
            if inner(n2, E4) > 0.0 {
                n2 = -n2;
            }
            if det4([z_u, z_v, n1, n2]) < 0.0 {
                n1 = -n1;
            }
            (n1, n2)
        }
        None => normal_frame(z_u, z_v)?,
    };
    Ok(PointData::from_jets(u, v, &j, n1, n2))
}

/// Pointwise geometry in a caller-supplied normal frame, without orientation fixes.
pub fn point_data_in_frame(patch: &SurfacePatch, u: f64, v: f64, n1: Vec4M, n2: Vec4M) -> Result<PointData> {
    let j = jet_eval_surface(patch, u, v)?;
    Ok(PointData::from_jets(u, v, &j, n1, n2))
}

/// Marginally trapped at a point: `H` is lightlike (and therefore nonzero).
pub fn is_marginally_trapped(p: &PointData, tol: f64) -> bool {
    causal_character(p.H, tol) == CausalCharacter::Lightlike
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    FlatPoint,
    Regular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointClass {
    pub kind: PointKind,
    /// Number of asymptotic tangents; `None` at flat points.
    pub asymptotic_tangents: Option<u8>,
}

pub fn classify_point(p: &PointData, tol: f64) -> PointClass {
    if p.L.abs().max(p.M.abs()).max(p.N.abs()) <= tol {
        return PointClass { kind: PointKind::FlatPoint, asymptotic_tangents: None };
    }
    let count = if p.k.abs() <= tol {
        1
    } else if p.k < 0.0 {
        2
    } else {
        0
    };
    PointClass { kind: PointKind::Regular, asymptotic_tangents: Some(count) }
}
