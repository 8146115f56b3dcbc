//! Group-agnostic orbit data: tangent spans, stabilizer algebras, the induced
//! form and causal character.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::catalog::{spec, GroupLabel, IsometryPair, LiePair};
use crate::error::Error;
use crate::linalg::{restricted_gram, span_svd, sym_eigenvalues};
use crate::sl2::{q_form, Mat2, PointAdS, TracelessMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CausalCharacter {
    Point0,
    SpacelikeCurve,
    LightlikeCurve,
    TimelikeCurve,
    SpacelikeSurface,
    LorentzianSurface,
    DegenerateSurface,
    Open3,
}

impl CausalCharacter {
    pub fn dim(self) -> usize {
        use CausalCharacter::*;
        match self {
            Point0 => 0,
            SpacelikeCurve | LightlikeCurve | TimelikeCurve => 1,
            SpacelikeSurface | LorentzianSurface | DegenerateSurface => 2,
            Open3 => 3,
        }
    }

    pub fn is_spacelike(self) -> bool {
        matches!(self, CausalCharacter::SpacelikeCurve | CausalCharacter::SpacelikeSurface)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramForm {
    pub entries: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// (n_plus, n_minus, n_zero)
    pub signature: (usize, usize, usize),
}

pub fn act(g: &IsometryPair, p: PointAdS) -> PointAdS {
    g.apply(p)
}

/// V·p − p·W for each basis pair.
pub fn tangent_basis(label: GroupLabel, p: PointAdS) -> Vec<Mat2> {
    let m = p.m();
    spec(label).lie_basis.iter().map(|(v, w)| v.m() * m - m * w.m()).collect()
}

pub fn orbit_dimension(label: GroupLabel, p: PointAdS, tol: f64) -> usize {
    span_svd(&tangent_basis(label, p), tol).rank
}

/// Kernel of (V,W) ↦ V·p − p·W on the Lie algebra.
pub fn stabilizer_algebra(label: GroupLabel, p: PointAdS, tol: f64) -> Vec<LiePair> {
    let basis = spec(label).lie_basis;
    let svd = span_svd(&tangent_basis(label, p), tol);
    svd.kernel
        .iter()
        .map(|c| {
            c.iter().zip(&basis).fold((TracelessMat::ZERO, TracelessMat::ZERO), |(a, b), (k, (v, w))| {
                (a + v.scale(*k), b + w.scale(*k))
            })
        })
        .collect()
}

fn signature_of(ev: &[f64]) -> (usize, usize, usize) {
    let radius = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let band = 1e-9 * radius.max(1.0);
    let plus = ev.iter().filter(|x| **x > band).count();
    let minus = ev.iter().filter(|x| **x < -band).count();
    (plus, minus, ev.len() - plus - minus)
}

pub fn gram_form(label: GroupLabel, p: PointAdS, tol: f64) -> Result<GramForm, Error> {
    let svd = span_svd(&tangent_basis(label, p), tol);
    if svd.rank == 0 || svd.rank == 3 {
        return Err(Error::DimensionOutOfRange(svd.rank));
    }
    let entries = restricted_gram(&svd.range);
    let eigenvalues = sym_eigenvalues(&entries);
    let signature = signature_of(&eigenvalues);
    Ok(GramForm { entries, eigenvalues, signature })
}

fn character_from_signature(sig: (usize, usize, usize), dim: usize) -> Result<CausalCharacter, Error> {
    use CausalCharacter::*;
    match (dim, sig) {
        (1, (1, 0, 0)) => Ok(SpacelikeCurve),
        (1, (0, 0, 1)) => Ok(LightlikeCurve),
        (1, (0, 1, 0)) => Ok(TimelikeCurve),
        (2, (2, 0, 0)) => Ok(SpacelikeSurface),
        (2, (1, 1, 0)) => Ok(LorentzianSurface),
        (2, (_, 0, z)) if z >= 1 => Ok(DegenerateSurface),
        _ => Err(Error::UnexpectedSignature(sig, dim)),
    }
}

pub fn causal_character(label: GroupLabel, p: PointAdS, tol: f64) -> Result<CausalCharacter, Error> {
    match orbit_dimension(label, p, tol) {
        0 => Ok(CausalCharacter::Point0),
        3 => Ok(CausalCharacter::Open3),
        d => {
            let g = gram_form(label, p, tol)?;
            character_from_signature(g.signature, d)
        }
    }
}

/// Resolution of the direction sweep per parameter dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    /// Directions on the circle for two-parameter groups.
    pub circle: usize,
    /// Points per angle for three-parameter groups.
    pub sphere: usize,
    /// Points on S³ for four-parameter groups.
    pub s3: usize,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid { circle: 720, sphere: 64, s3: 4096 }
    }
}

/// Deterministic unit directions in R^k.
pub fn direction_grid(k: usize, grid: SweepGrid) -> Vec<Vec<f64>> {
    match k {
        1 => vec![vec![1.0]],
        2 => (0..grid.circle)
            .map(|i| {
                let a = TAU * i as f64 / grid.circle as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let n = grid.sphere;
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                let phi = PI * i as f64 / n as f64;
                for j in 0..n {
                    let th = TAU * j as f64 / n as f64;
                    out.push(vec![phi.sin() * th.cos(), phi.sin() * th.sin(), phi.cos()]);
                }
            }
            out
        }
        4 => super_fibonacci(grid.s3),
        _ => vec![],
    }
}

/// Super-Fibonacci spiral on S³.
fn super_fibonacci(n: usize) -> Vec<Vec<f64>> {
    let phi = 2f64.sqrt();
    let psi = 1.533_751_168_755_204_3;
    (0..n)
        .map(|i| {
            let s = i as f64 + 0.5;
            let r = (s / n as f64).sqrt();
            let rr = (1.0 - s / n as f64).sqrt();
            let alpha = TAU * s / phi;
            let beta = TAU * s / psi;
            vec![r * alpha.sin(), r * alpha.cos(), rr * beta.sin(), rr * beta.cos()]
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Sgn {
    Neg,
    Zero,
    Pos,
}

fn combine(tangent: &[Mat2], c: &[f64]) -> Mat2 {
    tangent.iter().zip(c).fold(Mat2::ZERO, |acc, (v, k)| acc + v.scale(*k))
}

fn normalized_q(tangent: &[Mat2], c: &[f64], floor: f64) -> Option<f64> {
    let v = combine(tangent, c);
    let n2 = v.frob2();
    (n2.sqrt() >= floor).then(|| q_form(v) / n2)
}

/// The direction sweep: signs of Q over a grid of Lie algebra directions.
/// If only one strict sign shows up, the smallest |Q| on the grid is refined
/// by golden-section search along the grid's angular coordinates.
pub fn sweep_character(label: GroupLabel, p: PointAdS, grid: SweepGrid, tol: f64) -> Result<CausalCharacter, Error> {
    use CausalCharacter::*;
    let tangent = tangent_basis(label, p);
    let dim = span_svd(&tangent, tol).rank;
    match dim {
        0 => return Ok(Point0),
        3 => return Ok(Open3),
        _ => {}
    }
    let k = tangent.len();
    let band = 1e-9;
    let floor = tol.max(1e-300) * tangent.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut signs = BTreeSet::new();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for c in direction_grid(k, grid) {
        if let Some(q) = normalized_q(&tangent, &c, floor) {
            signs.insert(if q.abs() <= band {
                Sgn::Zero
            } else if q > 0.0 {
                Sgn::Pos
            } else {
                Sgn::Neg
            });
            if best.as_ref().is_none_or(|(b, _)| q.abs() < *b) {
                best = Some((q.abs(), c));
            }
        }
    }
    let strict: Vec<Sgn> = signs.iter().copied().filter(|s| *s != Sgn::Zero).collect();
    if dim == 2 && strict.len() == 1 && !signs.contains(&Sgn::Zero) {
        if let Some((_, c)) = best {
            if refine_min(&tangent, &c, floor) <= band {
                signs.insert(Sgn::Zero);
            }
        }
    }
    let has = |s| signs.contains(&s);
    if dim == 1 {
        let sig = if has(Sgn::Pos) {
            (1, 0, 0)
        } else if has(Sgn::Neg) {
            (0, 1, 0)
        } else {
            (0, 0, 1)
        };
        return character_from_signature(sig, 1);
    }
    match (has(Sgn::Pos), has(Sgn::Neg), has(Sgn::Zero)) {
        (true, true, _) => Ok(LorentzianSurface),
        (true, false, false) => Ok(SpacelikeSurface),
        (true, false, true) => Ok(DegenerateSurface),
        (false, true, z) => Err(Error::UnexpectedSignature((0, 1, z as usize), 2)),
        (false, false, _) => Err(Error::UnexpectedSignature((0, 0, 2), 2)),
    }
}

fn to_angles(c: &[f64]) -> Vec<f64> {
    // hyperspherical coordinates
    let k = c.len();
    let mut a = Vec::with_capacity(k - 1);
    for i in 0..k - 1 {
        let tail: f64 = c[i + 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        a.push(tail.atan2(c[i]));
    }
    if k >= 2 && c[k - 1] < 0.0 {
        let last = a.len() - 1;
        a[last] = TAU - a[last];
    }
    a
}

fn from_angles(a: &[f64]) -> Vec<f64> {
    let k = a.len() + 1;
    let mut c = vec![0.0; k];
    let mut prod = 1.0;
    for i in 0..k - 1 {
        c[i] = prod * a[i].cos();
        prod *= a[i].sin();
    }
    c[k - 1] = prod;
    c
}

fn refine_min(tangent: &[Mat2], start: &[f64], floor: f64) -> f64 {
    let f = |a: &[f64]| normalized_q(tangent, &from_angles(a), floor).map(f64::abs).unwrap_or(f64::INFINITY);
    let mut a = to_angles(start);
    let mut width = PI / 32.0;
    let mut best = f(&a);
    for _ in 0..6 {
        for i in 0..a.len() {
            let (lo, hi) = (a[i] - width, a[i] + width);
            let x = golden(|x| {
                let mut b = a.clone();
                b[i] = x;
                f(&b)
            }, lo, hi);
            let mut b = a.clone();
            b[i] = x;
            let v = f(&b);
            if v < best {
                best = v;
                a = b;
            }
        }
        width *= 0.25;
    }
    best
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// d/dt [exp(tV)·p·exp(−tW)] at 0 by central differences.
pub fn flow_derivative(v: TracelessMat, w: TracelessMat, p: PointAdS, h: f64) -> Mat2 {
    use crate::sl2::exp_traceless;
    let m = p.m();
    let plus = exp_traceless(v.scale(h)) * m * exp_traceless(w.scale(-h));
    let minus = exp_traceless(v.scale(-h)) * m * exp_traceless(w.scale(h));
    (plus - minus).scale(0.5 / h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::{a_t, k_t, n_t, DEFAULT_TOL};
    use CausalCharacter::*;
    use GroupLabel::*;

    fn pt(m: Mat2) -> PointAdS {
        PointAdS::new(m, 1e-12).unwrap()
    }

    const T: f64 = DEFAULT_TOL;

    #[test]
    fn tangent_at_identity() {
        let z = TracelessMat::Z.m();
        assert_eq!(tangent_basis(KxK, PointAdS::IDENTITY), vec![z, -z]);
        let x = TracelessMat::X.m();
        assert_eq!(tangent_basis(AxA, PointAdS::IDENTITY), vec![x, -x]);
    }

    #[test]
    fn dimensions() {
        assert_eq!(orbit_dimension(KxK, PointAdS::IDENTITY, T), 1);
        assert_eq!(orbit_dimension(DiagSL2, PointAdS::IDENTITY, T), 0);
        assert_eq!(orbit_dimension(AffxAff, pt(Mat2::J), T), 3);
    }

    #[test]
    fn stabilizers() {
        let s = stabilizer_algebra(NxN, PointAdS::IDENTITY, T);
        assert_eq!(s.len(), 1);
        let (v, w) = s[0];
        assert!((v.e - w.e).abs() < 1e-12 && v.e.abs() > 0.5);
        assert!(stabilizer_algebra(GFK, pt(k_t(0.3) * a_t(0.2)), T).is_empty());
        let s = stabilizer_algebra(DiagSL2, pt(a_t(1.0)), T);
        assert_eq!(s.len(), 1);
        let (v, w) = s[0];
        assert!(v.e.abs() < 1e-12 && v.f.abs() < 1e-12 && (v.h - w.h).abs() < 1e-12);
    }

    #[test]
    fn grams() {
        let g = gram_form(KxK, PointAdS::IDENTITY, T).unwrap();
        assert_eq!(g.signature, (0, 1, 0));
        assert!((g.entries[0][0] + 1.0).abs() < 1e-12);
        let g = gram_form(AxA, PointAdS::IDENTITY, T).unwrap();
        assert!((g.entries[0][0] - 1.0).abs() < 1e-12);
        let g = gram_form(AffxI, pt(k_t(1.0) * a_t(0.5)), T).unwrap();
        assert_eq!(g.signature, (1, 0, 1));
        assert!(matches!(gram_form(DiagSL2, PointAdS::IDENTITY, T), Err(Error::DimensionOutOfRange(0))));
    }

    #[test]
    fn characters() {
        assert_eq!(causal_character(AxK, PointAdS::IDENTITY, T).unwrap(), LorentzianSurface);
        assert_eq!(causal_character(NxN, pt(a_t(0.3) * n_t(2.0)), T).unwrap(), LightlikeCurve);
        let kp = pt(k_t(PI / 3.0));
        assert_eq!(causal_character(DiagSL2, kp, T).unwrap(), SpacelikeSurface);
        assert_eq!(causal_character(KxK, PointAdS::IDENTITY, T).unwrap(), TimelikeCurve);
    }

    #[test]
    fn sweeps() {
        let g = SweepGrid::default();
        // p11 p22 = 1/2
        let p = pt(Mat2::new(1.0, 0.5, -1.0, 0.5));
        assert_eq!(sweep_character(AxA, p, g, T).unwrap(), SpacelikeSurface);
        let p = pt(Mat2::I + Mat2::E21);
        assert_eq!(sweep_character(AxN, p, g, T).unwrap(), LorentzianSurface);
        assert_eq!(sweep_character(AffxI, pt(k_t(0.4)), g, T).unwrap(), DegenerateSurface);
        assert_eq!(sweep_character(KxK, PointAdS::IDENTITY, g, T).unwrap(), TimelikeCurve);
        // exceptional degenerate orbit of a three-parameter group
        assert_eq!(sweep_character(AffxA, PointAdS::IDENTITY, g, T).unwrap(), DegenerateSurface);
        // parabolic point: null direction off the grid, found by refinement
        assert_eq!(sweep_character(DiagSL2, pt(n_t(1.0)), g, T).unwrap(), DegenerateSurface);
    }

    #[test]
    fn tangency() {
        let p = pt(k_t(0.7) * a_t(-0.4) * n_t(1.3));
        for l in GroupLabel::ALL {
            for v in tangent_basis(l, p) {
                assert!((p.m().adj() * v).trace().abs() < 1e-12, "{l}");
            }
        }
    }

    #[test]
    fn grid_sizes() {
        let g = SweepGrid::default();
        assert_eq!(direction_grid(2, g).len(), 720);
        assert_eq!(direction_grid(3, g).len(), 4096);
        let s3 = direction_grid(4, g);
        assert_eq!(s3.len(), 4096);
        for c in s3 {
            assert!((c.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_roundtrip() {
        for c in [vec![0.3, -0.4, 0.2, -0.8], vec![-0.6, 0.0, -0.8], vec![0.0, -1.0]] {
            let n: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            let c: Vec<f64> = c.iter().map(|x| x / n).collect();
            let back = from_angles(&to_angles(&c));
            for (a, b) in c.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
