//! Closed-form orbit classification per group: orbit class, causal character,
//! orbit invariants and membership.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::catalog::GroupLabel;
use crate::engine::CausalCharacter;
use crate::sl2::{element_class, ElementClass, Mat2, PointAdS, PARABOLIC_BAND};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitClass {
    Principal,
    Singular,
    Exceptional,
    OpenOrbit,
    FixedPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Pos,
}

impl Sign {
    pub fn of(x: f64, tol: f64) -> Sign {
        if x.abs() <= tol {
            Sign::Zero
        } else if x > 0.0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn strict(x: f64) -> Sign {
        Sign::of(x, 0.0)
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitId {
    pub label: GroupLabel,
    pub class_tag: OrbitClass,
    /// Which case of the label's analysis produced the id.
    pub branch: &'static str,
    pub signs: Vec<Sign>,
    pub continuous: Vec<f64>,
    /// Circle-valued invariants, compared mod 2π.
    pub angles: Vec<f64>,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn angle_close(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) <= tol * 1f64.max(a.abs()).max(b.abs())
}

impl OrbitId {
    fn new(label: GroupLabel, class_tag: OrbitClass, branch: &'static str) -> Self {
        OrbitId { label, class_tag, branch, signs: vec![], continuous: vec![], angles: vec![] }
    }

    fn signs(mut self, s: &[Sign]) -> Self {
        self.signs = s.to_vec();
        self
    }

    fn cont(mut self, c: &[f64]) -> Self {
        self.continuous = c.to_vec();
        self
    }

    fn angle(mut self, a: f64) -> Self {
        self.angles = vec![a.rem_euclid(TAU)];
        self
    }

    /// Signs exact, reals within relative `tol`, angles mod 2π.
    pub fn matches(&self, o: &OrbitId, tol: f64) -> bool {
        self.label == o.label
            && self.class_tag == o.class_tag
            && self.branch == o.branch
            && self.signs == o.signs
            && self.continuous.len() == o.continuous.len()
            && self.angles.len() == o.angles.len()
            && self.continuous.iter().zip(&o.continuous).all(|(a, b)| close(*a, *b, tol))
            && self.angles.iter().zip(&o.angles).all(|(a, b)| angle_close(*a, *b, tol))
    }

    pub fn is_discrete(&self) -> bool {
        self.continuous.is_empty() && self.angles.is_empty()
    }

    /// Compact text form, e.g. `AxA/Principal/[+,0,-,+]/(0.5)`.
    pub fn key(&self) -> String {
        let signs: String = self.signs.iter().map(|s| s.symbol()).collect();
        let mut out = format!("{}/{:?}/{}/[{}]", self.label, self.class_tag, self.branch, signs);
        for c in &self.continuous {
            out.push_str(&format!("/{c:.6}"));
        }
        for a in &self.angles {
            out.push_str(&format!("/@{a:.6}"));
        }
        out
    }

    fn discrete_cmp(&self, o: &OrbitId) -> Ordering {
        (self.label, self.class_tag, self.branch, &self.signs, self.continuous.len(), self.angles.len()).cmp(&(
            o.label,
            o.class_tag,
            o.branch,
            &o.signs,
            o.continuous.len(),
            o.angles.len(),
        ))
    }
}

/// Groups ids into classes of matching ids. Continuous parts are chained
/// after sorting, so the result is deterministic for a fixed input order.
pub fn bucket_ids(ids: &[OrbitId], tol: f64) -> Vec<(OrbitId, usize)> {
    let mut sorted: Vec<&OrbitId> = ids.iter().collect();
    sorted.sort_by(|a, b| {
        a.discrete_cmp(b).then_with(|| {
            let ka: Vec<f64> = a.continuous.iter().chain(&a.angles).copied().collect();
            let kb: Vec<f64> = b.continuous.iter().chain(&b.angles).copied().collect();
            ka.partial_cmp(&kb).unwrap_or(Ordering::Equal)
        })
    });
    let mut out: Vec<(OrbitId, usize)> = Vec::new();
    for id in sorted {
        match out.last_mut() {
            Some((rep, n)) if rep.matches(id, tol) => *n += 1,
            _ => out.push((id.clone(), 1)),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerDesc {
    pub tag: String,
    pub params: Vec<f64>,
    pub dim: usize,
}

impl StabilizerDesc {
    fn trivial() -> Self {
        StabilizerDesc { tag: "trivial".into(), params: vec![], dim: 0 }
    }

    fn new(tag: &str, params: &[f64], dim: usize) -> Self {
        StabilizerDesc { tag: tag.into(), params: params.to_vec(), dim }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub label: GroupLabel,
    pub dimension: usize,
    pub character: CausalCharacter,
    pub orbit_class: OrbitClass,
    pub orbit_id: OrbitId,
    pub stabilizer: StabilizerDesc,
    /// Diffeomorphism type of the orbit as stated in the classification.
    pub shape: &'static str,
}

struct Entries {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

fn entries(p: PointAdS) -> Entries {
    let m = p.m();
    Entries { a: m.a11, b: m.a12, c: m.a21, d: m.a22 }
}

fn zero(x: f64, tol: f64) -> bool {
    x.abs() <= tol
}

fn record(
    label: GroupLabel,
    character: CausalCharacter,
    orbit_class: OrbitClass,
    orbit_id: OrbitId,
    stabilizer: StabilizerDesc,
    shape: &'static str,
) -> OrbitRecord {
    OrbitRecord { label, dimension: character.dim(), character, orbit_class, orbit_id, stabilizer, shape }
}

/// Angle of row 2 and its log-length, used by the Aff×{I} and G_FK invariants.
fn row2_polar(e: &Entries) -> (f64, f64) {
    (e.d.atan2(e.c), e.c.hypot(e.d).ln())
}

/// Branch of p under the DiagSL2 conjugation action.
fn conj_class(p: PointAdS, tol: f64) -> ElementClass {
    element_class(p, tol)
}

fn axa_singular(e: &Entries, tol: f64) -> bool {
    (zero(e.b, tol) && zero(e.c, tol)) || (zero(e.a, tol) && zero(e.d, tol))
}

pub fn classify(label: GroupLabel, p: PointAdS, tol: f64) -> OrbitRecord {
    use CausalCharacter::*;
    use GroupLabel::*;
    use OrbitClass::*;
    let e = entries(p);
    let id = orbit_id(label, p, tol);
    match label {
        AxK | NxK => record(label, LorentzianSurface, Principal, id, StabilizerDesc::trivial(), "R x S^1"),
        KxK => {
            if zero(p.m().frob2() - 2.0, tol) {
                record(label, TimelikeCurve, Singular, id, StabilizerDesc::new("(K_t, K_t)", &[], 1), "S^1")
            } else {
                record(label, LorentzianSurface, Principal, id, StabilizerDesc::trivial(), "T^2")
            }
        }
        AffxI => record(label, DegenerateSurface, Principal, id, StabilizerDesc::trivial(), "R^2"),
        GFK => record(label, LorentzianSurface, Principal, id, StabilizerDesc::trivial(), "R^2"),
        AxA => {
            if axa_singular(&e, tol) {
                let stab = if zero(e.b, tol) {
                    StabilizerDesc::new("(A_t, A_t)", &[], 1)
                } else {
                    StabilizerDesc::new("(A_t, A_-t)", &[], 1)
                };
                return record(label, SpacelikeCurve, Singular, id, stab, "R");
            }
            let ch = if [e.a, e.b, e.c, e.d].iter().any(|x| zero(*x, tol)) {
                DegenerateSurface
            } else if e.a * e.d > 0.0 && e.b * e.c < 0.0 {
                SpacelikeSurface
            } else {
                LorentzianSurface
            };
            record(label, ch, Principal, id, StabilizerDesc::trivial(), "R^2")
        }
        NxN => {
            if zero(e.c, tol) {
                let stab = StabilizerDesc::new("(N_t, N_kt), k = p22/p11", &[e.d / e.a], 1);
                record(label, LightlikeCurve, Singular, id, stab, "R")
            } else {
                record(label, LorentzianSurface, Principal, id, StabilizerDesc::trivial(), "R^2")
            }
        }
        AxN => {
            let ch = if zero(e.a, tol) || zero(e.c, tol) { DegenerateSurface } else { LorentzianSurface };
            record(label, ch, Principal, id, StabilizerDesc::trivial(), "R^2")
        }
        DiagAff => {
            if p.m().approx_eq(Mat2::I, tol) || p.m().approx_eq(-Mat2::I, tol) {
                return record(label, Point0, FixedPoint, id, StabilizerDesc::new("G", &[], 2), "point");
            }
            if zero(e.c, tol) {
                let stab = if zero(e.d - e.a, tol) {
                    StabilizerDesc::new("diag(N x N)", &[], 1)
                } else {
                    StabilizerDesc::new("(F_{t,s(t)}, F_{t,s(t)}), s = p12 (e^-t - e^t)/(p22 - p11)", &[e.b / (e.d - e.a)], 1)
                };
                return record(label, LightlikeCurve, Singular, id, stab, "R");
            }
            let g = e.a + e.d;
            let gap = g.abs() - 2.0;
            let ch = if gap.abs() <= PARABOLIC_BAND.max(tol) {
                DegenerateSurface
            } else if gap < 0.0 {
                SpacelikeSurface
            } else {
                LorentzianSurface
            };
            record(label, ch, Principal, id, StabilizerDesc::trivial(), "R^2")
        }
        DiagSL2 => match conj_class(p, tol) {
            ElementClass::Central => record(label, Point0, FixedPoint, id, StabilizerDesc::new("G", &[], 3), "point"),
            ElementClass::Elliptic => {
                record(label, SpacelikeSurface, Principal, id, StabilizerDesc::new("K", &[], 1), "R^2")
            }
            ElementClass::Parabolic => {
                record(label, DegenerateSurface, Principal, id, StabilizerDesc::new("N u -N", &[], 1), "R x S^1")
            }
            ElementClass::Hyperbolic => {
                record(label, LorentzianSurface, Principal, id, StabilizerDesc::new("A u -A", &[], 1), "R x S^1")
            }
        },
        GFN => {
            let ch = if zero(e.c, tol) { DegenerateSurface } else { LorentzianSurface };
            record(label, ch, Principal, id, StabilizerDesc::trivial(), "R^2")
        }
        GFA => {
            if zero(e.c, tol) {
                let stab = StabilizerDesc::new("(F_{t,s(t)}, A_t), s = p12 (e^-t - e^t)/p22", &[e.b / e.d], 1);
                return record(label, LightlikeCurve, Singular, id, stab, "R");
            }
            let ch = if zero(e.d, tol) { DegenerateSurface } else { LorentzianSurface };
            record(label, ch, Principal, id, StabilizerDesc::trivial(), "R^2")
        }
        AffxA => {
            if zero(e.c, tol) {
                let stab = StabilizerDesc::new("(F_{t,s(t)}, A_t), s = -(p12/p22)(e^t - e^-t)", &[e.b / e.d], 1);
                record(label, DegenerateSurface, Exceptional, id, stab, "R^2")
            } else if zero(e.d, tol) {
                let stab = StabilizerDesc::new("(F_{t,s(t)}, A_-t), s = -(p11/p21)(e^t - e^-t)", &[e.a / e.c], 1);
                record(label, DegenerateSurface, Exceptional, id, stab, "R^2")
            } else {
                record(label, Open3, OpenOrbit, id, StabilizerDesc::trivial(), "R^3")
            }
        }
        AffxN => {
            if zero(e.c, tol) {
                let stab = StabilizerDesc::new("(N_s, N_ks), k = p22/p11", &[e.d / e.a], 1);
                record(label, DegenerateSurface, Exceptional, id, stab, "R^2")
            } else {
                record(label, Open3, OpenOrbit, id, StabilizerDesc::trivial(), "R^3")
            }
        }
        AffxAff => {
            if zero(e.c, tol) {
                let stab = StabilizerDesc::new("(F_{t,s}, F_{t,s'}), s' = (p12 (e^t - e^-t) + p22 s)/p11", &[], 2);
                record(label, DegenerateSurface, Exceptional, id, stab, "R^2")
            } else {
                let stab = StabilizerDesc::new("(F_{t,s(t)}, F_{-t,s'(t)})", &[], 1);
                record(label, Open3, OpenOrbit, id, stab, "R^3")
            }
        }
        GFF => {
            if zero(e.c, tol) {
                let stab = StabilizerDesc::new("(F_{t,s}, F_{t,s'}), s' = (p12 (e^t - e^-t) + p22 s)/p11", &[], 2);
                record(label, LightlikeCurve, Singular, id, stab, "R")
            } else {
                record(label, Open3, OpenOrbit, id, StabilizerDesc::trivial(), "R^3")
            }
        }
    }
}

pub fn orbit_id(label: GroupLabel, p: PointAdS, tol: f64) -> OrbitId {
    use GroupLabel::*;
    use OrbitClass::*;
    let e = entries(p);
    let s = |x: f64| Sign::of(x, tol);
    let id = |c, b| OrbitId::new(label, c, b);
    match label {
        AxK => id(Principal, "principal").cont(&[e.a * e.c + e.b * e.d]),
        NxK => id(Principal, "principal").cont(&[(e.c * e.c + e.d * e.d).ln()]),
        KxK => {
            let f = p.m().frob2();
            if zero(f - 2.0, tol) {
                id(Singular, "compact")
            } else {
                id(Principal, "principal").cont(&[f])
            }
        }
        AffxI => id(Principal, "principal").angle(row2_polar(&e).0),
        GFK => {
            let (phi, lr) = row2_polar(&e);
            id(Principal, "principal").angle(phi + lr)
        }
        AxA => {
            if axa_singular(&e, tol) {
                if zero(e.b, tol) {
                    id(Singular, "diagonal").signs(&[s(e.a)])
                } else {
                    id(Singular, "antidiagonal").signs(&[s(e.b)])
                }
            } else {
                id(Principal, "principal").signs(&[s(e.a), s(e.b), s(e.c), s(e.d)]).cont(&[e.a * e.d])
            }
        }
        NxN => {
            if zero(e.c, tol) {
                id(Singular, "p21 = 0").cont(&[e.a])
            } else {
                id(Principal, "principal").cont(&[e.c])
            }
        }
        AxN => {
            if zero(e.a, tol) || zero(e.c, tol) {
                id(Principal, "degenerate").signs(&axn_degenerate_signs(&e, tol))
            } else {
                id(Principal, "generic").signs(&[s(e.a), s(e.c)]).cont(&[e.a * e.c])
            }
        }
        DiagAff => {
            if p.m().approx_eq(Mat2::I, tol) || p.m().approx_eq(-Mat2::I, tol) {
                id(FixedPoint, "central").signs(&[s(e.a)])
            } else if zero(e.c, tol) {
                if zero(e.d - e.a, tol) {
                    id(Singular, "parabolic").signs(&[s(e.a), s(e.b)])
                } else {
                    id(Singular, "affine").cont(&[e.a])
                }
            } else {
                id(Principal, "principal").signs(&[s(e.c)]).cont(&[e.a + e.d])
            }
        }
        DiagSL2 => {
            let m = p.m();
            let tr = m.trace();
            match conj_class(p, tol) {
                ElementClass::Central => id(FixedPoint, "central").signs(&[Sign::strict(tr)]),
                ElementClass::Hyperbolic => id(Principal, "hyperbolic").cont(&[tr]),
                ElementClass::Elliptic => id(Principal, "elliptic").signs(&[Sign::strict(e.b - e.c)]).cont(&[tr]),
                ElementClass::Parabolic => {
                    let n = m - Mat2::I.scale(0.5 * tr);
                    id(Principal, "parabolic").signs(&[Sign::strict(tr), Sign::strict(n.a12 - n.a21)])
                }
            }
        }
        GFN => {
            if zero(e.c, tol) {
                id(Principal, "degenerate").signs(&[Sign::Zero, s(e.a)])
            } else {
                id(Principal, "generic").signs(&[s(e.c)]).cont(&[e.c.abs().ln() - e.d / e.c])
            }
        }
        GFA => {
            if zero(e.c, tol) {
                id(Singular, "p21 = 0").cont(&[e.d])
            } else {
                id(Principal, "principal").signs(&[s(e.c)]).cont(&[e.d])
            }
        }
        AffxA => {
            if zero(e.c, tol) || zero(e.d, tol) {
                id(Exceptional, "exceptional").signs(&[s(e.c), s(e.d)])
            } else {
                id(OpenOrbit, "open").signs(&[s(e.c), s(e.d)])
            }
        }
        AffxN | AffxAff => {
            if zero(e.c, tol) {
                id(Exceptional, "exceptional").signs(&[Sign::Zero, s(e.a)])
            } else {
                id(OpenOrbit, "open").signs(&[s(e.c)])
            }
        }
        GFF => {
            if zero(e.c, tol) {
                id(Singular, "p21 = 0").cont(&[e.a])
            } else {
                id(OpenOrbit, "open").signs(&[s(e.c)])
            }
        }
    }
}

/// Degenerate A×N orbits: (0, sign p12) when p11 = 0, (sign p11, 0) when p21 = 0.
fn axn_degenerate_signs(e: &Entries, tol: f64) -> Vec<Sign> {
    if zero(e.a, tol) {
        vec![Sign::Zero, Sign::of(e.b, tol)]
    } else {
        vec![Sign::of(e.a, tol), Sign::Zero]
    }
}

/// Membership straight from the per-group conditions, without building ids.
pub fn same_orbit(label: GroupLabel, p: PointAdS, q: PointAdS, tol: f64) -> bool {
    use GroupLabel::*;
    let (x, y) = (entries(p), entries(q));
    let z = |v: f64| zero(v, tol);
    let same_sign = |u: f64, v: f64| !z(u) && !z(v) && u * v > 0.0;
    let eq = |u: f64, v: f64| close(u, v, tol);
    match label {
        AxK => eq(x.a * x.c + x.b * x.d, y.a * y.c + y.b * y.d),
        NxK => eq((x.c * x.c + x.d * x.d).ln(), (y.c * y.c + y.d * y.d).ln()),
        KxK => {
            let (f, g) = (p.m().frob2(), q.m().frob2());
            (z(f - 2.0) && z(g - 2.0)) || (!z(f - 2.0) && eq(f, g))
        }
        AffxI => angle_close(row2_polar(&x).0, row2_polar(&y).0, tol),
        GFK => {
            let (pa, pl) = row2_polar(&x);
            let (qa, ql) = row2_polar(&y);
            angle_close(pa + pl, qa + ql, tol)
        }
        AxA => {
            let sp = [x.a, x.b, x.c, x.d].map(|v| Sign::of(v, tol));
            let sq = [y.a, y.b, y.c, y.d].map(|v| Sign::of(v, tol));
            if axa_singular(&x, tol) || axa_singular(&y, tol) {
                axa_singular(&x, tol) && axa_singular(&y, tol) && sp == sq
            } else {
                sp == sq && eq(x.a * x.d, y.a * y.d)
            }
        }
        NxN => {
            if z(x.c) || z(y.c) {
                z(x.c) && z(y.c) && eq(x.a, y.a)
            } else {
                eq(x.c, y.c)
            }
        }
        AxN => {
            if z(x.a) || z(y.a) {
                z(x.a) && z(y.a) && same_sign(x.b, y.b)
            } else if z(x.c) || z(y.c) {
                z(x.c) && z(y.c) && same_sign(x.a, y.a)
            } else {
                same_sign(x.a, y.a) && same_sign(x.c, y.c) && eq(x.a * x.c, y.a * y.c)
            }
        }
        DiagAff => {
            let cp = p.m().approx_eq(Mat2::I, tol) || p.m().approx_eq(-Mat2::I, tol);
            let cq = q.m().approx_eq(Mat2::I, tol) || q.m().approx_eq(-Mat2::I, tol);
            if cp || cq {
                return cp && cq && same_sign(x.a, y.a);
            }
            if z(x.c) || z(y.c) {
                if !(z(x.c) && z(y.c)) {
                    return false;
                }
                let (np, nq) = (z(x.d - x.a), z(y.d - y.a));
                if np || nq {
                    np && nq && same_sign(x.a, y.a) && same_sign(x.b, y.b)
                } else {
                    eq(x.a, y.a)
                }
            } else {
                same_sign(x.c, y.c) && eq(x.a + x.d, y.a + y.d)
            }
        }
        DiagSL2 => {
            let (kp, kq) = (conj_class(p, tol), conj_class(q, tol));
            if kp != kq {
                return false;
            }
            let (tp, tq) = (p.m().trace(), q.m().trace());
            match kp {
                ElementClass::Central => tp * tq > 0.0,
                ElementClass::Hyperbolic => eq(tp, tq),
                ElementClass::Elliptic => eq(tp, tq) && (x.b - x.c) * (y.b - y.c) > 0.0,
                ElementClass::Parabolic => {
                    let np = p.m() - Mat2::I.scale(0.5 * tp);
                    let nq = q.m() - Mat2::I.scale(0.5 * tq);
                    tp * tq > 0.0 && (np.a12 - np.a21) * (nq.a12 - nq.a21) > 0.0
                }
            }
        }
        GFN => {
            if z(x.c) || z(y.c) {
                z(x.c) && z(y.c) && same_sign(x.a, y.a)
            } else {
                same_sign(x.c, y.c) && eq(x.c.abs().ln() - x.d / x.c, y.c.abs().ln() - y.d / y.c)
            }
        }
        GFA => {
            if z(x.c) || z(y.c) {
                z(x.c) && z(y.c) && eq(x.d, y.d)
            } else {
                same_sign(x.c, y.c) && eq(x.d, y.d)
            }
        }
        AffxA => {
            let sp = [Sign::of(x.c, tol), Sign::of(x.d, tol)];
            let sq = [Sign::of(y.c, tol), Sign::of(y.d, tol)];
            sp == sq
        }
        AffxN | AffxAff => {
            if z(x.c) || z(y.c) {
                z(x.c) && z(y.c) && same_sign(x.a, y.a)
            } else {
                same_sign(x.c, y.c)
            }
        }
        GFF => {
            if z(x.c) || z(y.c) {
                z(x.c) && z(y.c) && eq(x.a, y.a)
            } else {
                same_sign(x.c, y.c)
            }
        }
    }
}

/// Distance from p to the nearest branch boundary of the label's case
/// analysis, measured on the polynomial that switches the branch.
pub fn boundary_distance(label: GroupLabel, p: PointAdS) -> f64 {
    use GroupLabel::*;
    let e = entries(p);
    let m = p.m();
    let tr_gap = (m.trace().abs() - 2.0).abs();
    let central = (m - Mat2::I).max_abs().min((m + Mat2::I).max_abs());
    let mins = |v: &[f64]| v.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    match label {
        AxK | NxK | AffxI | GFK => f64::INFINITY,
        KxK => (m.frob2() - 2.0).abs(),
        AxA => mins(&[e.a, e.b, e.c, e.d]),
        NxN => e.c.abs(),
        AxN => mins(&[e.a, e.c]),
        DiagAff => mins(&[e.c, tr_gap, e.d - e.a, central]),
        DiagSL2 => mins(&[tr_gap, central]),
        // discriminant of the tangent form α²(2ac+1) + c²αβ
        GFN => e.c.powi(4),
        GFA => mins(&[e.c, e.d]),
        AffxA => mins(&[e.c, e.d]),
        AffxN | AffxAff | GFF => e.c.abs(),
    }
}

/// p21·e^{−p22/p21}, the G_FN invariant in its exponential form.
pub fn gfn_invariant(p: PointAdS) -> f64 {
    let m = p.m();
    m.a21 * (-m.a22 / m.a21).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::{a_t, k_t, n_t, DEFAULT_TOL};
    use CausalCharacter::*;
    use GroupLabel::*;
    use OrbitClass::*;

    const T: f64 = DEFAULT_TOL;

    fn pt(m: Mat2) -> PointAdS {
        PointAdS::new(m, 1e-12).unwrap()
    }

    #[test]
    fn spot_classifications() {
        let r = classify(KxK, PointAdS::IDENTITY, T);
        assert_eq!((r.orbit_class, r.character, r.dimension), (Singular, TimelikeCurve, 1));
        let r = classify(AffxA, PointAdS::IDENTITY, T);
        assert_eq!((r.orbit_class, r.character), (Exceptional, DegenerateSurface));
        let q = k_t(std::f64::consts::FRAC_PI_4) * a_t(1.0) * k_t(-std::f64::consts::FRAC_PI_4);
        let p = pt(q);
        assert!(p.m().a11 * p.m().a22 > 1.0 || p.m().a11 * p.m().a22 < 0.0);
        let r = classify(AxA, p, T);
        assert_eq!((r.orbit_class, r.character), (Principal, LorentzianSurface));
        let r = classify(AxA, pt(Mat2::J), T);
        assert_eq!((r.orbit_class, r.character), (Singular, SpacelikeCurve));
        let r = classify(AffxI, PointAdS::IDENTITY, T);
        assert_eq!((r.orbit_class, r.character), (Principal, DegenerateSurface));
    }

    #[test]
    fn ids() {
        assert_eq!(orbit_id(GFN, pt(Mat2::J), T).continuous, vec![0.0]);
        assert_eq!(gfn_invariant(pt(Mat2::J)), -1.0);
        assert!(orbit_id(AxA, PointAdS::IDENTITY, T).matches(&orbit_id(AxA, pt(a_t(5.0)), T), T));
        let p = pt(n_t(0.3) * a_t(0.8) * k_t(1.0));
        let g = k_t(0.4) * a_t(-0.6) * n_t(2.0);
        let q = pt(g * p.m() * g.inv_sl2());
        assert!(orbit_id(DiagSL2, p, T).matches(&orbit_id(DiagSL2, q, 1e-12), 1e-9));
    }

    #[test]
    fn membership_examples() {
        let p = pt(Mat2::I + Mat2::E21);
        let q = pt(Mat2::new(3.0, 0.0, 3.0, 1.0 / 3.0));
        assert!(same_orbit(AffxN, p, q, T));
        assert!(same_orbit(NxN, PointAdS::IDENTITY, pt(Mat2::I + Mat2::E12.scale(7.0)), T));
        assert!(!same_orbit(AxA, PointAdS::IDENTITY, pt(Mat2::J), T));
    }

    #[test]
    fn agrees_with_tangent_gram_and_is_invariant() {
        use crate::catalog::element;
        use crate::engine::{act, causal_character};
        use crate::sl2::{sample_rng, sample_with, SampleRanges};
        use rand::Rng;
        let strata = [
            Mat2::I, -Mat2::I, Mat2::J, -Mat2::J,
            Mat2::I + Mat2::E12, Mat2::I - Mat2::E21, -Mat2::I + Mat2::E21,
            a_t(0.7), Mat2::new(2.0, 1.0, 0.0, 0.5), Mat2::new(0.0, 1.0, -1.0, 3.0),
        ];
        for label in GroupLabel::ALL {
            let dim = crate::catalog::spec(label).param_count;
            for i in 0..200u64 {
                let mut rng = sample_rng(11, i);
                let p = if (i as usize) < strata.len() {
                    pt(strata[i as usize])
                } else {
                    sample_with(&mut rng, SampleRanges::default())
                };
                let r = classify(label, p, T);
                let want = causal_character(label, p, 1e-9).unwrap();
                if r.character != want {
                    assert!(boundary_distance(label, p) <= 1e-6, "{label} at {}", p.m());
                }
                let params: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect();
                let q = act(&element(label, &params).unwrap(), p);
                assert!(same_orbit(label, p, q, 1e-7), "{label} membership at {}", p.m());
                assert!(orbit_id(label, p, 1e-9).matches(&orbit_id(label, q, 1e-9), 1e-7), "{label} id at {}", p.m());
            }
        }
    }

    #[test]
    fn buckets_merge_within_tolerance() {
        let a = orbit_id(GFF, pt(a_t(0.5)), T);
        let b = orbit_id(GFF, pt(a_t(0.5) * n_t(3.0)), T);
        let c = orbit_id(GFF, pt(a_t(0.7)), T);
        let out = bucket_ids(&[a, c, b], T);
        assert_eq!(out.len(), 2);
        assert_eq!(out.iter().map(|x| x.1).sum::<usize>(), 3);
    }
}
