#![allow(dead_code)]

use std::f64::consts::PI;

use mtsurf::meridian::{profile, ProfileCurvePhi, ProfilePair};
use mtsurf::{inner, Jet2, Jet2Vec4, ParamInterval, SurfacePatch, Vec4M};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parabolic profile data on `u in [0.5, 2]`, `v in [0, 2 pi]`.
///
/// Both signs of `f'` occur, and `phi` may be negative. The families are
/// chosen so that `kappa_m`, `kbar` and `sgn(f') kappa_m + |f'|/(f sqrt(E))`
/// never vanish, which keeps every compared invariant away from zero so a
/// relative comparison is meaningful.
pub struct RandomParabolic {
    pub fp: ProfilePair,
    pub phi: ProfileCurvePhi,
    pub desc: String,
}

pub const U_RANGE: (f64, f64) = (0.5, 2.0);
pub const V_RANGE: (f64, f64) = (0.0, 2.0 * PI);

pub fn random_parabolic(rng: &mut ChaCha8Rng) -> RandomParabolic {
    let increasing = rng.gen_bool(0.5);
    let beta = rng.gen_range(0.8..1.0);
    let gamma = rng.gen_range(0.1..0.3);
    let delta = rng.gen_range(0.0..0.05);
    let mu = rng.gen_range(0.3..1.0);
    let nu = rng.gen_range(0.1..0.5);
    let lambda = rng.gen_range(0.2..1.0);
    // f'' > 0 always; for f' > 0 take g' < 0, g'' > 0, for f' < 0 take g' > 0, g'' > 0
    let s = if increasing { 1.0 } else { -1.0 };
    let f = profile(move |u| 5.0 + u * (s * beta) + u.square() * (0.5 * gamma) + u.sin() * delta);
    let g = if increasing {
        profile(move |u| u * (-mu) + (u * (-lambda)).exp() * nu)
    } else {
        profile(move |u| u * mu + (u * lambda).exp() * nu)
    };

    let alpha = rng.gen_range(2.5..4.0);
    let b1 = rng.gen_range(-0.5..0.5);
    let b2 = rng.gen_range(-0.2..0.2);
    let sigma = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let phi = profile(move |v| ((v.cos() * b1 + (v * 2.0).sin() * b2) + alpha) * sigma);

    RandomParabolic {
        fp: ProfilePair::new(f, g, ParamInterval::new(U_RANGE.0, U_RANGE.1)),
        phi: ProfileCurvePhi::new(phi, ParamInterval::new(V_RANGE.0, V_RANGE.1)),
        desc: format!(
            "f = 5 {} {beta:.3}u + {gamma:.3}u^2/2 + {delta:.3}sin u, phi = {sigma}({alpha:.3} + {b1:.3}cos v + {b2:.3}sin 2v)",
            if increasing { "+" } else { "-" }
        ),
    }
}

/// A generic spacelike graph-like patch on `[-0.8, 0.8]^2`.
pub fn random_smooth_patch(rng: &mut ChaCha8Rng) -> SurfacePatch {
    let a: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-0.6..0.6));
    let b: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.3..0.3));
    let dom = || ParamInterval::new(-0.8, 0.8);
    SurfacePatch::new("random-smooth", dom(), dom(), move |u: Jet2, v: Jet2| {
        let x3 = u.square() * a[0] + u * v * a[1] + (v + a[3]).sin() * a[2] + (u * 0.5).exp() * a[4];
        let x4 = u.sin() * b[0] + v.cos() * u * (0.5 * b[1]) + u * v * b[2];
        Jet2Vec4::new(u, v, x3, x4)
    })
}

/// Invariants computed from finite differences of the position alone, by a
/// route independent of the jet engine: tangential projection for the normal
/// parts of the second derivatives and an orthonormal tangent basis.
#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug)]
pub struct FdInvariants {
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub K: f64,
    pub k: f64,
    pub kappa_abs: f64,
    pub H: Vec4M,
    pub HdotH: f64,
}

#[allow(non_snake_case)]
pub fn fd_invariants(patch: &SurfacePatch, u: f64, v: f64) -> FdInvariants {
    let z = |a: f64, b: f64| patch.position(a, b).unwrap();
    let h1 = 1e-5;
    let d1 = |f: &dyn Fn(f64) -> Vec4M| (f(-2.0 * h1) - f(2.0 * h1) + (f(h1) - f(-h1)) * 8.0) / (12.0 * h1);
    let z_u = d1(&|t| z(u + t, v));
    let z_v = d1(&|t| z(u, v + t));
    let h2 = 1e-3;
    let d2 = |f: &dyn Fn(f64) -> Vec4M| {
        ((f(h2) + f(-h2)) * 16.0 - f(2.0 * h2) - f(-2.0 * h2) - f(0.0) * 30.0) / (12.0 * h2 * h2)
    };
    let z_uu = d2(&|t| z(u + t, v));
    let z_vv = d2(&|t| z(u, v + t));
    let mixed = |h: f64| (z(u + h, v + h) - z(u + h, v - h) - z(u - h, v + h) + z(u - h, v - h)) / (4.0 * h * h);
    let z_uv = (mixed(h2) * 4.0 - mixed(2.0 * h2)) / 3.0;

    let (E, F, G) = (inner(z_u, z_u), inner(z_u, z_v), inner(z_v, z_v));
    let det = E * G - F * F;
    let x = z_u / E.sqrt();
    let y0 = z_v - x * inner(z_v, x);
    let y = y0 / inner(y0, y0).sqrt();
    let perp = |w: Vec4M| w - x * inner(w, x) - y * inner(w, y);
    let (s11, s12, s22) = (perp(z_uu), perp(z_uv), perp(z_vv));
    let H = (s11 * G - s12 * (2.0 * F) + s22 * E) / (2.0 * det);
    let K = (inner(s11, s22) - inner(s12, s12)) / det;

    // sigma on the orthonormal basis x, y
    let ex = [E.sqrt().recip(), 0.0];
    let yu = -inner(z_v, x) / (E.sqrt() * inner(y0, y0).sqrt());
    let yv = 1.0 / inner(y0, y0).sqrt();
    let sig = |p: [f64; 2], q: [f64; 2]| {
        s11 * (p[0] * q[0]) + s12 * (p[0] * q[1] + p[1] * q[0]) + s22 * (p[1] * q[1])
    };
    let (sxx, sxy, syy) = (sig(ex, ex), sig(ex, [yu, yv]), sig([yu, yv], [yu, yv]));

    // oracle normal frame from e3, e4
    let m1 = perp(Vec4M::new(0.0, 0.0, 1.0, 0.0));
    let m1 = m1 / inner(m1, m1).sqrt();
    let m2 = perp(Vec4M::new(0.0, 0.0, 0.0, 1.0));
    let m2 = m2 - m1 * inner(m2, m1);
    let m2 = m2 / (-inner(m2, m2)).sqrt();
    let c = |s: Vec4M| (inner(s, m1), inner(s, m2));
    let ((a11, b11), (a12, b12), (a22, b22)) = (c(sxx), c(sxy), c(syy));
    let L = 2.0 * (a11 * b12 - a12 * b11);
    let M = a11 * b22 - a22 * b11;
    let N = 2.0 * (a12 * b22 - a22 * b12);

    FdInvariants { E, F, G, K, k: L * N - M * M, kappa_abs: (0.5 * (L + N)).abs(), H, HdotH: inner(H, H) }
}
