//! Framed long knots modeled by a core curve and frame field, the induced
//! tubular self-embedding, the interval action on knots, and the evaluation
//! maps into spatial and infinitesimal configurations.

use crate::configs::{
    gram_schmidt, lambda_cutoff, FramedConfig, SpatialFramedConfig, Vec3,
};
use crate::error::{Error, Result};
use crate::intervals::{Interval, OvElement};
use crate::perm::Perm;
use nalgebra::{DMatrix, DVector};

/// An orientation-preserving affine map of the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffMap {
    pub scale: f64,
    pub offset: f64,
}

impl AffMap {
    pub fn from_interval(iv: &Interval) -> AffMap {
        let lo = crate::rat::to_f64(&iv.lo);
        let hi = crate::rat::to_f64(&iv.hi);
        AffMap { scale: (hi - lo) / 2.0, offset: (hi + lo) / 2.0 }
    }

    pub fn apply(&self, t: f64) -> f64 {
        self.scale * t + self.offset
    }

    pub fn invert(&self, x: f64) -> f64 {
        (x - self.offset) / self.scale
    }
}

/// A framed long knot: a self-map of the tube built from a core curve and a
/// frame field, both standard outside the interval.
#[derive(Clone, Debug)]
pub enum KnotMap {
    Identity,
    /// A long knot whose core follows the cubic–quartic–quintic polynomial
    /// trefoil, blended into the axis near the ends (d = 3).
    Trefoil,
    /// The straight axis with the frame rotating by a full turn across the
    /// interval (d = 3).
    FrameTwist,
    /// The interval action `L · f` of a single little interval.
    Conjugated { l: AffMap, inner: Box<KnotMap> },
    /// Composition, applied right to left: `fs[0] ∘ fs[1] ∘ ..`.
    Composed(Vec<KnotMap>),
    /// Piecewise-linear interpolation of sampled (t, point, frame) data.
    Sampled { d: usize, samples: Vec<(f64, Vec<f64>, Vec<f64>)> },
}

// trefoil constants, chosen so the curve stays inside the unit tube, keeps a
// three-crossing projection, and self-distance at least 0.05
const TREFOIL_DOMAIN_SCALE: f64 = 2.4;
const TREFOIL_AMPLITUDE: [f64; 3] = [1.0 / 4.2, 1.0 / 8.0, 1.0 / 40.0];
const TREFOIL_PLATEAU: (f64, f64) = (0.82, 0.96);

/// Smooth plateau: 1 for `s <= lo`, 0 for `s >= hi`.
fn plateau(s: f64, lo: f64, hi: f64) -> f64 {
    let a = lambda_cutoff(hi - s);
    let b = lambda_cutoff(s - lo);
    if a + b == 0.0 {
        return if s <= lo { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

fn lambda_deriv(x: f64) -> f64 {
    if x > 0.0 {
        lambda_cutoff(x) * 2.0 / (x * x * x)
    } else {
        0.0
    }
}

fn plateau_deriv(s: f64, lo: f64, hi: f64) -> f64 {
    let a = lambda_cutoff(hi - s);
    let b = lambda_cutoff(s - lo);
    let da = -lambda_deriv(hi - s);
    let db = lambda_deriv(s - lo);
    let sum = a + b;
    if sum == 0.0 {
        return 0.0;
    }
    (da * b - a * db) / (sum * sum)
}

/// Rising smoothstep: 0 for `t <= -1`, 1 for `t >= 1`.
fn rise(t: f64) -> f64 {
    1.0 - plateau(t, -1.0, 1.0)
}

fn rise_deriv(t: f64) -> f64 {
    -plateau_deriv(t, -1.0, 1.0)
}

fn shastri(u: f64) -> Vec3 {
    DVector::from_vec(vec![
        TREFOIL_AMPLITUDE[0] * (u * u * u - 3.0 * u),
        TREFOIL_AMPLITUDE[1] * (u * u * u * u - 4.0 * u * u),
        TREFOIL_AMPLITUDE[2] * (u * u * u * u * u - 10.0 * u),
    ])
}

fn shastri_deriv(u: f64) -> Vec3 {
    DVector::from_vec(vec![
        TREFOIL_AMPLITUDE[0] * (3.0 * u * u - 3.0),
        TREFOIL_AMPLITUDE[1] * (4.0 * u * u * u - 8.0 * u),
        TREFOIL_AMPLITUDE[2] * (5.0 * u * u * u * u - 10.0),
    ])
}

fn trefoil_curve(t: f64) -> Vec3 {
    let (lo, hi) = TREFOIL_PLATEAU;
    let beta = plateau(t.abs(), lo, hi);
    let mut out = shastri(TREFOIL_DOMAIN_SCALE * t) * beta;
    out[0] += (1.0 - beta) * t;
    out
}

fn trefoil_tangent(t: f64) -> Vec3 {
    let (lo, hi) = TREFOIL_PLATEAU;
    let beta = plateau(t.abs(), lo, hi);
    let dbeta = plateau_deriv(t.abs(), lo, hi) * t.signum();
    let u = TREFOIL_DOMAIN_SCALE * t;
    let mut out = shastri_deriv(u) * (beta * TREFOIL_DOMAIN_SCALE) + shastri(u) * dbeta;
    out[0] += (1.0 - beta) - dbeta * t;
    out
}

/// Rotation of the plane spanned by `e_1` and the unit vector `b`, taking
/// `e_1` to `b`; requires `b != -e_1`.
fn rotation_to(b: &Vec3) -> DMatrix<f64> {
    let d = b.len();
    let mut a = DVector::zeros(d);
    a[0] = 1.0;
    let c = a.dot(b);
    // cross-product matrix only needed in d = 3
    debug_assert_eq!(d, 3);
    let v = DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]);
    let vx = DMatrix::from_row_slice(
        3,
        3,
        &[0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0],
    );
    DMatrix::identity(3, 3) + &vx + &vx * &vx / (1.0 + c)
}

fn trefoil_frame(t: f64) -> DMatrix<f64> {
    let tangent = trefoil_tangent(t);
    rotation_to(&(&tangent / tangent.norm()))
}

fn twist_angle(t: f64) -> f64 {
    2.0 * std::f64::consts::PI * rise(t)
}

fn twist_frame(t: f64) -> DMatrix<f64> {
    let th = twist_angle(t);
    let (s, c) = th.sin_cos();
    DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c])
}

impl KnotMap {
    /// `L · f` with the trivial case reduced away, so the identity knot is
    /// fixed exactly by any interval action.
    pub fn conjugate(l: AffMap, inner: KnotMap) -> KnotMap {
        match inner {
            KnotMap::Identity => KnotMap::Identity,
            other => KnotMap::Conjugated { l, inner: Box::new(other) },
        }
    }

    pub fn compose(fs: Vec<KnotMap>) -> KnotMap {
        let mut flat = Vec::new();
        for f in fs {
            match f {
                KnotMap::Identity => {}
                KnotMap::Composed(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => KnotMap::Identity,
            1 => flat.pop().unwrap(),
            _ => KnotMap::Composed(flat),
        }
    }

    pub fn by_name(name: &str) -> Result<KnotMap> {
        match name {
            "identity" => Ok(KnotMap::Identity),
            "trefoil" => Ok(KnotMap::Trefoil),
            "frame-twist" => Ok(KnotMap::FrameTwist),
            other => Err(Error::invalid(format!("unknown knot '{other}'"))),
        }
    }

    /// Evaluates the tubular self-embedding at `x = (x_1, y)`.
    pub fn eval(&self, x: &Vec3) -> Vec3 {
        match self {
            KnotMap::Identity => x.clone(),
            KnotMap::Trefoil => {
                let mut out = trefoil_curve(x[0]);
                let f = trefoil_frame(x[0]);
                let mut y = x.clone();
                y[0] = 0.0;
                out += f * y;
                out
            }
            KnotMap::FrameTwist => {
                let mut y = x.clone();
                y[0] = 0.0;
                let mut out = twist_frame(x[0]) * y;
                out[0] += x[0];
                out
            }
            KnotMap::Conjugated { l, inner } => {
                let s = l.invert(x[0]);
                if s.abs() >= 1.0 {
                    // knots are standard outside the interval, so the
                    // conjugation acts as the identity bit for bit
                    return x.clone();
                }
                let mut z = x.clone();
                z[0] = s;
                let mut w = inner.eval(&z);
                w[0] = l.apply(w[0]);
                w
            }
            KnotMap::Composed(fs) => {
                let mut z = x.clone();
                for f in fs.iter().rev() {
                    z = f.eval(&z);
                }
                z
            }
            KnotMap::Sampled { d, samples } => sampled_eval(*d, samples, x),
        }
    }

    /// Jacobian of the self-embedding.
    pub fn jacobian(&self, x: &Vec3) -> DMatrix<f64> {
        let d = x.len();
        match self {
            KnotMap::Identity => DMatrix::identity(d, d),
            KnotMap::Trefoil => {
                let mut jac = DMatrix::zeros(d, d);
                let f = trefoil_frame(x[0]);
                let mut y = x.clone();
                y[0] = 0.0;
                // first column: curve tangent plus the frame-field derivative
                // applied to the transverse offset (numerical, exact on core)
                let mut col0 = trefoil_tangent(x[0]);
                if y.norm() > 0.0 {
                    let h = 1e-6;
                    let df = (trefoil_frame(x[0] + h) - trefoil_frame(x[0] - h)) / (2.0 * h);
                    col0 += df * &y;
                }
                jac.set_column(0, &col0);
                for k in 1..d {
                    jac.set_column(k, &f.column(k));
                }
                jac
            }
            KnotMap::FrameTwist => {
                let mut jac = DMatrix::zeros(d, d);
                let th = twist_angle(x[0]);
                let dth = 2.0 * std::f64::consts::PI * rise_deriv(x[0]);
                let (s, c) = th.sin_cos();
                let dr = DMatrix::from_row_slice(
                    3,
                    3,
                    &[0.0, 0.0, 0.0, 0.0, -s, -c, 0.0, c, -s],
                ) * dth;
                let mut y = x.clone();
                y[0] = 0.0;
                let mut col0 = dr * y;
                col0[0] += 1.0;
                jac.set_column(0, &col0);
                let f = twist_frame(x[0]);
                for k in 1..d {
                    jac.set_column(k, &f.column(k));
                }
                jac
            }
            KnotMap::Conjugated { l, inner } => {
                let s = l.invert(x[0]);
                if s.abs() >= 1.0 {
                    return DMatrix::identity(d, d);
                }
                let mut z = x.clone();
                z[0] = s;
                let mut jac = inner.jacobian(&z);
                // conjugation by diag(scale, 1, .., 1)
                for k in 0..d {
                    jac[(0, k)] *= l.scale;
                    jac[(k, 0)] /= l.scale;
                }
                jac
            }
            KnotMap::Composed(fs) => {
                let mut z = x.clone();
                let mut jac = DMatrix::identity(d, d);
                for f in fs.iter().rev() {
                    jac = f.jacobian(&z) * jac;
                    z = f.eval(&z);
                }
                jac
            }
            KnotMap::Sampled { .. } => {
                // finite differences on the interpolant
                let h = 1e-6;
                let mut jac = DMatrix::zeros(d, d);
                for k in 0..d {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += h;
                    xm[k] -= h;
                    jac.set_column(k, &((self.eval(&xp) - self.eval(&xm)) / (2.0 * h)));
                }
                jac
            }
        }
    }

    pub fn curve(&self, t: f64, d: usize) -> Vec3 {
        let mut x = DVector::zeros(d);
        x[0] = t;
        self.eval(&x)
    }

    pub fn tangent(&self, t: f64, d: usize) -> Vec3 {
        let mut x = DVector::zeros(d);
        x[0] = t;
        self.jacobian(&x).column(0).clone_owned()
    }

    /// The Gram–Schmidt frame along the core.
    pub fn frame(&self, t: f64, d: usize) -> Result<DMatrix<f64>> {
        let mut x = DVector::zeros(d);
        x[0] = t;
        gram_schmidt(&self.jacobian(&x))
    }
}

fn sampled_eval(d: usize, samples: &[(f64, Vec<f64>, Vec<f64>)], x: &Vec3) -> Vec3 {
    let t = x[0];
    let mut y = x.clone();
    y[0] = 0.0;
    let at = |p: &Vec<f64>, f: &Vec<f64>| -> Vec3 {
        let point = DVector::from_vec(p.clone());
        let frame = DMatrix::from_row_slice(d, d, f);
        point + frame * &y
    };
    match samples.iter().position(|(s, _, _)| *s >= t) {
        None | Some(0) => {
            // outside the sampled window: standard tube
            let mut out = x.clone();
            out[0] = t;
            out
        }
        Some(k) => {
            let (t0, p0, f0) = &samples[k - 1];
            let (t1, p1, f1) = &samples[k];
            let w = (t - t0) / (t1 - t0);
            at(p0, f0) * (1.0 - w) + at(p1, f1) * w
        }
    }
}

/// The interval action on knots: conjugate each knot by its interval and
/// compose from the lowest height upwards, using the given height order.
pub fn budney_act_with(e: &OvElement, knots: &[KnotMap], sigma: &Perm) -> Result<KnotMap> {
    let m = e.arity();
    if knots.len() != m {
        return Err(Error::invalid("need one knot per interval"));
    }
    let mut factors = Vec::with_capacity(m);
    for slot in 1..=m {
        let i = sigma.apply(slot);
        let l = AffMap::from_interval(e.interval(i));
        factors.push(KnotMap::conjugate(l, knots[i - 1].clone()));
    }
    Ok(KnotMap::compose(factors))
}

/// The action with the canonical representative of the height order.
pub fn budney_act(e: &OvElement, knots: &[KnotMap]) -> Result<KnotMap> {
    if e.arity() == 0 {
        return Ok(KnotMap::Identity);
    }
    budney_act_with(e, knots, &e.canonical_sigma())
}

// ---------------------------------------------------------------------------
// evaluation maps
// ---------------------------------------------------------------------------

const MIN_SPEED: f64 = 1e-9;

/// Samples the knot at the given nondecreasing times, extending to collided
/// times by the limiting secant direction (the backwards tangent).
pub fn ev_spatial(f: &KnotMap, d: usize, t: &[f64]) -> Result<SpatialFramedConfig> {
    let mut points = Vec::with_capacity(t.len());
    let mut frames = Vec::with_capacity(t.len());
    let mut tangents = Vec::with_capacity(t.len());
    for &ti in t {
        let tangent = f.tangent(ti, d);
        if tangent.norm() < MIN_SPEED {
            return Err(Error::DegenerateDerivative(ti));
        }
        points.push(f.curve(ti, d));
        frames.push(f.frame(ti, d)?);
        tangents.push(tangent);
    }
    Ok(SpatialFramedConfig::from_points(d, points, frames, |i, _j| {
        let tg = &tangents[i - 1];
        -tg / tg.norm()
    }))
}

/// The composite of doubling the interval, extending along the axis, and the
/// shrinking limit: an infinitesimal configuration.
pub fn q_ev_config(f: &KnotMap, d: usize, t: &[f64]) -> Result<FramedConfig> {
    let n = t.len();
    let mut points = Vec::with_capacity(n);
    let mut frames = Vec::with_capacity(n);
    let mut collide_dir = Vec::with_capacity(n);
    for &ti in t {
        let u = 2.0 * ti;
        if u.abs() <= 1.0 {
            let tangent = f.tangent(u, d);
            if tangent.norm() < MIN_SPEED {
                return Err(Error::DegenerateDerivative(u));
            }
            points.push(f.curve(u, d));
            frames.push(f.frame(u, d)?);
            collide_dir.push(-(&tangent / tangent.norm()));
        } else {
            let mut p = DVector::zeros(d);
            p[0] = u;
            points.push(p);
            frames.push(DMatrix::identity(d, d));
            let mut v = DVector::zeros(d);
            v[0] = -1.0;
            collide_dir.push(v);
        }
    }
    let spatial = SpatialFramedConfig::from_points(d, points, frames, |i, _j| {
        collide_dir[i - 1].clone()
    });
    crate::configs::shrink_limit(&spatial)
}


#[cfg(test)]
mod arity_zero_tests {
    use super::*;
    use crate::perm::Perm;

    #[test]
    fn empty_action_is_the_identity_knot() {
        let empty = OvElement::from_heights(Vec::new(), &Perm::identity(0)).unwrap();
        let f = budney_act(&empty, &[]).unwrap();
        let x = nalgebra::DVector::from_vec(vec![0.3, -0.1, 0.2]);
        assert_eq!(f.eval(&x), x);
    }
}
