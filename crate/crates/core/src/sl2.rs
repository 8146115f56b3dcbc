//! 2×2 real matrices, the split form on them, and SL(2,R) element types.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Band around |tr| = 2 inside which an element counts as parabolic.
pub const PARABOLIC_BAND: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);
    pub const I: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    pub const E11: Mat2 = Mat2::new(1.0, 0.0, 0.0, 0.0);
    pub const E12: Mat2 = Mat2::new(0.0, 1.0, 0.0, 0.0);
    pub const E21: Mat2 = Mat2::new(0.0, 0.0, 1.0, 0.0);
    pub const E22: Mat2 = Mat2::new(0.0, 0.0, 0.0, 1.0);
    /// E12 − E21.
    pub const J: Mat2 = Mat2::new(0.0, 1.0, -1.0, 0.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Mat2::new(v[0], v[1], v[2], v[3])
    }

    /// Row-major entries (a11, a12, a21, a22).
    pub fn to_array(self) -> [f64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn det(self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(self) -> f64 {
        self.a11 + self.a22
    }

    pub fn adj(self) -> Mat2 {
        Mat2::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    /// Inverse of a unit-determinant matrix (the adjugate).
    pub fn inv_sl2(self) -> Mat2 {
        self.adj()
    }

    pub fn inverse(self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(self.adj().scale(1.0 / d))
    }

    pub fn scale(self, k: f64) -> Mat2 {
        Mat2::new(k * self.a11, k * self.a12, k * self.a21, k * self.a22)
    }

    pub fn transpose(self) -> Mat2 {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn norm(self) -> f64 {
        self.to_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Sum of squared entries.
    pub fn frob2(self) -> f64 {
        self.to_array().iter().map(|x| x * x).sum()
    }

    pub fn dot(self, o: Mat2) -> f64 {
        self.a11 * o.a11 + self.a12 * o.a12 + self.a21 * o.a21 + self.a22 * o.a22
    }

    pub fn commutator(self, o: Mat2) -> Mat2 {
        self * o - o * self
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    pub fn approx_eq(self, o: Mat2, tol: f64) -> bool {
        (self - o).max_abs() <= tol
    }

    pub fn row1(self) -> [f64; 2] {
        [self.a11, self.a12]
    }

    pub fn row2(self) -> [f64; 2] {
        [self.a21, self.a22]
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for PointAdS {
    type Output = PointAdS;
    fn neg(self) -> PointAdS {
        PointAdS(-self.0)
    }
}

impl Add for TracelessMat {
    type Output = TracelessMat;
    fn add(self, o: TracelessMat) -> TracelessMat {
        TracelessMat::new(self.h + o.h, self.e + o.e, self.f + o.f)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Mat2> for f64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m.scale(self)
    }
}

/// A point of adS₃: a unit-determinant matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointAdS(Mat2);

impl PointAdS {
    pub const IDENTITY: PointAdS = PointAdS(Mat2::I);

    pub fn new(m: Mat2, tol: f64) -> Result<Self, Error> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let d = m.det();
        if (d - 1.0).abs() > tol {
            return Err(Error::NotOnAdS { det: d });
        }
        Ok(PointAdS(m))
    }

    /// Wraps without checking; callers guarantee det = 1 up to roundoff.
    pub fn new_unchecked(m: Mat2) -> Self {
        PointAdS(m)
    }

    pub fn m(self) -> Mat2 {
        self.0
    }
}

impl From<PointAdS> for Mat2 {
    fn from(p: PointAdS) -> Mat2 {
        p.0
    }
}

impl fmt::Display for PointAdS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Element of sl(2,R), stored as the (1,1), (1,2), (2,1) entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracelessMat {
    pub h: f64,
    pub e: f64,
    pub f: f64,
}

impl TracelessMat {
    pub const ZERO: TracelessMat = TracelessMat::new(0.0, 0.0, 0.0);
    /// diag(1, −1)
    pub const X: TracelessMat = TracelessMat::new(1.0, 0.0, 0.0);
    /// E12
    pub const Y: TracelessMat = TracelessMat::new(0.0, 1.0, 0.0);
    /// E21 − E12
    pub const Z: TracelessMat = TracelessMat::new(0.0, -1.0, 1.0);

    pub const fn new(h: f64, e: f64, f: f64) -> Self {
        TracelessMat { h, e, f }
    }

    /// Projects onto the traceless part.
    pub fn from_mat(m: Mat2) -> Self {
        let h = 0.5 * (m.a11 - m.a22);
        TracelessMat::new(h, m.a12, m.a21)
    }

    pub fn m(self) -> Mat2 {
        Mat2::new(self.h, self.e, self.f, -self.h)
    }

    pub fn scale(self, k: f64) -> Self {
        TracelessMat::new(k * self.h, k * self.e, k * self.f)
    }

    pub fn is_zero(self) -> bool {
        self.h == 0.0 && self.e == 0.0 && self.f == 0.0
    }

    pub fn bracket(self, o: TracelessMat) -> TracelessMat {
        TracelessMat::from_mat(self.m().commutator(o.m()))
    }

    /// Coordinates in the basis {X, Y, Z}.
    pub fn xyz(self) -> [f64; 3] {
        [self.h, self.e + self.f, self.f]
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Self {
        TracelessMat::new(x, y - z, z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Central,
}

/// −det(v).
pub fn q_form(v: Mat2) -> f64 {
    -(v.a11 * v.a22 - v.a12 * v.a21)
}

/// Polarization of `q_form`.
pub fn b_form(u: Mat2, v: Mat2) -> f64 {
    -0.5 * (u.a11 * v.a22 + v.a11 * u.a22 - u.a12 * v.a21 - v.a12 * u.a21)
}

/// Gram matrix of `b_form` in the (11, 12, 21, 22) coordinates.
pub fn b_matrix() -> [[f64; 4]; 4] {
    [
        [0.0, 0.0, 0.0, -0.5],
        [0.0, 0.0, 0.5, 0.0],
        [0.0, 0.5, 0.0, 0.0],
        [-0.5, 0.0, 0.0, 0.0],
    ]
}

/// Closed-form exponential, using M² = −det(M)·I.
pub fn exp_traceless(m: TracelessMat) -> Mat2 {
    let mm = m.m();
    let delta = mm.det();
    if delta.abs() < 1e-12 {
        // I + M + M²/2 with M² = −δ I
        return Mat2::I.scale(1.0 - 0.5 * delta) + mm;
    }
    if delta < 0.0 {
        // spectral projectors, so e^{-r} is not formed by cancellation
        let r = (-delta).sqrt();
        let u = mm.scale(1.0 / r);
        ((Mat2::I + u).scale(r.exp()) + (Mat2::I - u).scale((-r).exp())).scale(0.5)
    } else {
        let r = delta.sqrt();
        Mat2::I.scale(r.cos()) + mm.scale(r.sin() / r)
    }
}

/// diag(e^t, e^−t)
pub fn a_t(t: f64) -> Mat2 {
    Mat2::new(t.exp(), 0.0, 0.0, (-t).exp())
}

/// I + t·E12
pub fn n_t(t: f64) -> Mat2 {
    Mat2::new(1.0, t, 0.0, 1.0)
}

/// cos t·I + sin t·(E21 − E12)
pub fn k_t(t: f64) -> Mat2 {
    let (s, c) = t.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// A_t + s·E12
pub fn f_ts(t: f64, s: f64) -> Mat2 {
    Mat2::new(t.exp(), s, 0.0, (-t).exp())
}

pub fn element_class(p: PointAdS, tol: f64) -> ElementClass {
    let m = p.m();
    if m.approx_eq(Mat2::I, tol) || m.approx_eq(-Mat2::I, tol) {
        return ElementClass::Central;
    }
    let g = m.trace().abs() - 2.0;
    if g.abs() <= PARABOLIC_BAND.max(tol) {
        ElementClass::Parabolic
    } else if g < 0.0 {
        ElementClass::Elliptic
    } else {
        ElementClass::Hyperbolic
    }
}

/// Rescales `m` onto det = 1. Points already within `tol` come back unchanged.
pub fn project_to_ads(m: Mat2, tol: f64) -> Result<PointAdS, Error> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let d = m.det();
    if d <= 0.0 {
        return Err(Error::NonPositiveDeterminant { det: d });
    }
    if (d - 1.0).abs() <= tol {
        return Ok(PointAdS(m));
    }
    Ok(PointAdS(m.scale(1.0 / d.sqrt())))
}

/// Half-widths of the Iwasawa sampling box; θ is always drawn from [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRanges {
    pub theta: f64,
    pub t: f64,
    pub s: f64,
}

impl Default for SampleRanges {
    fn default() -> Self {
        SampleRanges { theta: TAU, t: 2.0, s: 2.0 }
    }
}

/// K_θ·A_t·N_s
pub fn iwasawa(theta: f64, t: f64, s: f64) -> PointAdS {
    PointAdS(k_t(theta) * a_t(t) * n_t(s))
}

/// Generator for sample `index` of a run seeded with `seed`. Streams are
/// disjoint per index, so batches can be split across threads freely.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn sample_with<R: Rng + ?Sized>(rng: &mut R, ranges: SampleRanges) -> PointAdS {
    let theta = rng.random::<f64>() * ranges.theta;
    let t = symmetric(rng, ranges.t);
    let s = symmetric(rng, ranges.s);
    iwasawa(theta, t, s)
}

pub fn sample_point(rng_seed: u64, ranges: SampleRanges) -> PointAdS {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_with(&mut rng, ranges)
}

pub(crate) fn symmetric<R: Rng + ?Sized>(rng: &mut R, half: f64) -> f64 {
    if half == 0.0 {
        0.0
    } else {
        rng.random_range(-half..=half)
    }
}

/// Uniformly random SL(2,R) element in Iwasawa form with the given box.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R, half: f64) -> Mat2 {
    sample_with(rng, SampleRanges { theta: TAU, t: half, s: half }).m()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Mat2, b: Mat2, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn q_form_values() {
        assert_eq!(q_form(Mat2::I), -1.0);
        assert_eq!(q_form(Mat2::ZERO), 0.0);
        assert_eq!(q_form(TracelessMat::Z.m()), -1.0);
    }

    #[test]
    fn b_form_values() {
        assert_eq!(b_form(TracelessMat::X.m(), TracelessMat::Z.m()), 0.0);
        assert_eq!(b_form(TracelessMat::Y.m(), TracelessMat::Y.m()), 0.0);
        let v = Mat2::new(0.3, -1.2, 2.0, 0.7);
        assert_eq!(b_form(v, v), q_form(v));
    }

    #[test]
    fn named_exponentials() {
        for &t in &[-2.5, -0.3, 0.0, 0.9, 3.0] {
            assert!(close(exp_traceless(TracelessMat::X.scale(t)), a_t(t), 1e-12));
            assert!(close(exp_traceless(TracelessMat::Y.scale(t)), n_t(t), 1e-12));
            assert!(close(exp_traceless(TracelessMat::Z.scale(t)), k_t(t), 1e-12));
        }
        assert_eq!(exp_traceless(TracelessMat::ZERO), Mat2::I);
    }

    #[test]
    fn classes() {
        let p = PointAdS::new(k_t(std::f64::consts::FRAC_PI_3), 1e-12).unwrap();
        assert_eq!(element_class(p, DEFAULT_TOL), ElementClass::Elliptic);
        let p = PointAdS::new(n_t(1.0), 1e-12).unwrap();
        assert_eq!(element_class(p, DEFAULT_TOL), ElementClass::Parabolic);
        let p = PointAdS::new(a_t(1.0), 1e-12).unwrap();
        assert_eq!(element_class(p, DEFAULT_TOL), ElementClass::Hyperbolic);
        assert_eq!(element_class(-PointAdS::IDENTITY, DEFAULT_TOL), ElementClass::Central);
    }

    #[test]
    fn projection() {
        let p = project_to_ads(Mat2::I.scale(2.0), DEFAULT_TOL).unwrap();
        assert_eq!(p.m(), Mat2::I);
        let q = iwasawa(0.4, 0.3, -1.1);
        assert_eq!(project_to_ads(q.m(), DEFAULT_TOL).unwrap(), q);
        assert!(matches!(
            project_to_ads(Mat2::new(1.0, 0.0, 0.0, -1.0), DEFAULT_TOL),
            Err(Error::NonPositiveDeterminant { .. })
        ));
    }

    #[test]
    fn sampling() {
        let r = SampleRanges::default();
        assert_eq!(sample_point(7, r), sample_point(7, r));
        assert_eq!(iwasawa(0.0, 0.0, 0.0).m(), Mat2::I);
        for seed in 0..200 {
            assert!((sample_point(seed, r).m().det() - 1.0).abs() < 1e-12);
        }
        let mut a = sample_rng(3, 10);
        let mut b = sample_rng(3, 10);
        assert_eq!(sample_with(&mut a, r), sample_with(&mut b, r));
    }

    #[test]
    fn xyz_roundtrip() {
        let v = TracelessMat::from_xyz(0.5, -2.0, 1.5);
        let m = v.m();
        let w = TracelessMat::X.m().scale(0.5) + TracelessMat::Y.m().scale(-2.0) + TracelessMat::Z.m().scale(1.5);
        assert_eq!(m, w);
        assert_eq!(v.xyz(), [0.5, -2.0, 1.5]);
    }
}
