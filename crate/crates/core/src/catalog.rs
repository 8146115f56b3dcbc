//! The sixteen cohomogeneity-one subgroups of SL(2,R)×SL(2,R), as data.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg;
use crate::sl2::{a_t, exp_traceless, f_ts, k_t, n_t, Mat2, PointAdS, TracelessMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupLabel {
    AxK,
    NxK,
    KxK,
    AffxI,
    GFK,
    AxA,
    NxN,
    AxN,
    AffxA,
    AffxN,
    AffxAff,
    DiagAff,
    DiagSL2,
    GFN,
    GFF,
    GFA,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 16] = [
        GroupLabel::AxK,
        GroupLabel::NxK,
        GroupLabel::KxK,
        GroupLabel::AffxI,
        GroupLabel::GFK,
        GroupLabel::AxA,
        GroupLabel::NxN,
        GroupLabel::AxN,
        GroupLabel::AffxA,
        GroupLabel::AffxN,
        GroupLabel::AffxAff,
        GroupLabel::DiagAff,
        GroupLabel::DiagSL2,
        GroupLabel::GFN,
        GroupLabel::GFF,
        GroupLabel::GFA,
    ];

    pub fn as_str(self) -> &'static str {
        use GroupLabel::*;
        match self {
            AxK => "AxK",
            NxK => "NxK",
            KxK => "KxK",
            AffxI => "AffxI",
            GFK => "GFK",
            AxA => "AxA",
            NxN => "NxN",
            AxN => "AxN",
            AffxA => "AffxA",
            AffxN => "AffxN",
            AffxAff => "AffxAff",
            DiagAff => "DiagAff",
            DiagSL2 => "DiagSL2",
            GFN => "GFN",
            GFF => "GFF",
            GFA => "GFA",
        }
    }

    pub fn is_proper(self) -> bool {
        use GroupLabel::*;
        matches!(self, AxK | NxK | KxK | AffxI | GFK)
    }

    pub fn dim(self) -> usize {
        use GroupLabel::*;
        match self {
            AffxA | AffxN | DiagSL2 | GFF => 3,
            AffxAff => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        GroupLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsoType {
    Torus2,
    R2,
    Aff,
    AffTimesR,
    AffTimesAff,
    SL2R,
}

/// A pair acting by p ↦ g1·p·g2⁻¹. (g1, g2) and (−g1, −g2) act alike.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryPair {
    pub g1: Mat2,
    pub g2: Mat2,
}

impl IsometryPair {
    pub const IDENTITY: IsometryPair = IsometryPair { g1: Mat2::I, g2: Mat2::I };

    pub fn new(g1: Mat2, g2: Mat2) -> Self {
        IsometryPair { g1, g2 }
    }

    pub fn apply(&self, p: PointAdS) -> PointAdS {
        PointAdS::new_unchecked(self.g1 * p.m() * self.g2.inv_sl2())
    }

    pub fn compose(&self, o: &IsometryPair) -> IsometryPair {
        IsometryPair::new(self.g1 * o.g1, self.g2 * o.g2)
    }

    pub fn inverse(&self) -> IsometryPair {
        IsometryPair::new(self.g1.inv_sl2(), self.g2.inv_sl2())
    }

    pub fn max_abs(&self) -> f64 {
        self.g1.max_abs().max(self.g2.max_abs())
    }
}

pub type LiePair = (TracelessMat, TracelessMat);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub label: GroupLabel,
    pub dim: usize,
    pub lie_basis: Vec<LiePair>,
    pub proper: bool,
    pub iso_type: IsoType,
    pub param_count: usize,
    pub param_names: Vec<&'static str>,
    /// How the group is written in terms of A, N, K, F.
    pub elements: &'static str,
}

impl GroupSpec {
    /// Spanning set of the first projection.
    pub fn p1(&self) -> Vec<TracelessMat> {
        self.lie_basis.iter().map(|b| b.0).filter(|v| !v.is_zero()).collect()
    }

    pub fn p2(&self) -> Vec<TracelessMat> {
        self.lie_basis.iter().map(|b| b.1).filter(|v| !v.is_zero()).collect()
    }
}

const O: TracelessMat = TracelessMat::ZERO;
const X: TracelessMat = TracelessMat::X;
const Y: TracelessMat = TracelessMat::Y;
const Z: TracelessMat = TracelessMat::Z;

pub fn spec(label: GroupLabel) -> GroupSpec {
    use GroupLabel::*;
    use IsoType::*;
    let (basis, iso, names, elements): (Vec<LiePair>, IsoType, Vec<&'static str>, &'static str) = match label {
        AxK => (vec![(X, O), (O, Z)], R2, vec!["t", "u"], "(A_t, K_u)"),
        NxK => (vec![(Y, O), (O, Z)], R2, vec!["t", "u"], "(N_t, K_u)"),
        KxK => (vec![(Z, O), (O, Z)], Torus2, vec!["t", "u"], "(K_t, K_u)"),
        AffxI => (vec![(X, O), (Y, O)], Aff, vec!["t", "s"], "(F_{t,s}, I)"),
        GFK => (vec![(X, Z), (Y, O)], Aff, vec!["t", "s"], "(F_{t,s}, K_t)"),
        AxA => (vec![(X, O), (O, X)], R2, vec!["t", "u"], "(A_t, A_u)"),
        NxN => (vec![(Y, O), (O, Y)], R2, vec!["t", "u"], "(N_t, N_u)"),
        AxN => (vec![(X, O), (O, Y)], R2, vec!["t", "u"], "(A_t, N_u)"),
        AffxA => (vec![(X, O), (Y, O), (O, X)], AffTimesR, vec!["t", "s", "u"], "(F_{t,s}, A_u)"),
        AffxN => (vec![(X, O), (Y, O), (O, Y)], AffTimesR, vec!["t", "s", "u"], "(F_{t,s}, N_u)"),
        AffxAff => (
            vec![(X, O), (Y, O), (O, X), (O, Y)],
            AffTimesAff,
            vec!["t", "s", "t2", "s2"],
            "(F_{t,s}, F_{t2,s2})",
        ),
        DiagAff => (vec![(X, X), (Y, Y)], Aff, vec!["t", "s"], "(F_{t,s}, F_{t,s})"),
        DiagSL2 => (vec![(X, X), (Y, Y), (Z, Z)], SL2R, vec!["t", "s", "u"], "(g, g), g = A_t N_s K_u"),
        GFN => (vec![(X, Y), (Y, O)], Aff, vec!["t", "s"], "(F_{t,s}, N_t)"),
        GFF => (vec![(X, X), (Y, O), (O, Y)], AffTimesR, vec!["t", "s", "s2"], "(F_{t,s}, F_{t,s2})"),
        GFA => (vec![(X, X), (Y, O)], Aff, vec!["t", "s"], "(F_{t,s}, A_t)"),
    };
    GroupSpec {
        label,
        dim: basis.len(),
        param_count: names.len(),
        lie_basis: basis,
        proper: label.is_proper(),
        iso_type: iso,
        param_names: names,
        elements,
    }
}

pub fn catalog() -> Vec<GroupSpec> {
    GroupLabel::ALL.iter().map(|&l| spec(l)).collect()
}

/// Group element with the given parameters, in the order of `param_names`.
pub fn element(label: GroupLabel, params: &[f64]) -> Result<IsometryPair, Error> {
    use GroupLabel::*;
    let expected = label.dim();
    if params.len() != expected {
        return Err(Error::ParamArity { label, expected, got: params.len() });
    }
    let p = params;
    let i = Mat2::I;
    let pair = match label {
        AxK => (a_t(p[0]), k_t(p[1])),
        NxK => (n_t(p[0]), k_t(p[1])),
        KxK => (k_t(p[0]), k_t(p[1])),
        AffxI => (f_ts(p[0], p[1]), i),
        GFK => (f_ts(p[0], p[1]), k_t(p[0])),
        AxA => (a_t(p[0]), a_t(p[1])),
        NxN => (n_t(p[0]), n_t(p[1])),
        AxN => (a_t(p[0]), n_t(p[1])),
        AffxA => (f_ts(p[0], p[1]), a_t(p[2])),
        AffxN => (f_ts(p[0], p[1]), n_t(p[2])),
        AffxAff => (f_ts(p[0], p[1]), f_ts(p[2], p[3])),
        DiagAff => (f_ts(p[0], p[1]), f_ts(p[0], p[1])),
        DiagSL2 => {
            let g = exp_traceless(X.scale(p[0])) * exp_traceless(Y.scale(p[1])) * exp_traceless(Z.scale(p[2]));
            (g, g)
        }
        GFN => (f_ts(p[0], p[1]), n_t(p[0])),
        GFF => (f_ts(p[0], p[1]), f_ts(p[0], p[2])),
        GFA => (f_ts(p[0], p[1]), a_t(p[0])),
    };
    Ok(IsometryPair::new(pair.0, pair.1))
}

/// Iwasawa factors (t, s, u) with g = A_t·N_s·K_u, for det g = 1.
pub fn ank_params(g: Mat2) -> [f64; 3] {
    let rho = g.a21.hypot(g.a22);
    let u = g.a21.atan2(g.a22);
    let upper = g * k_t(-u);
    let t = -rho.ln();
    let s = upper.a12 * (-t).exp();
    [t, s, u]
}

fn ln_pos(x: f64) -> Option<f64> {
    (x > 0.0 && x.is_finite()).then(|| x.ln())
}

fn candidate_params(label: GroupLabel, g1: Mat2, g2: Mat2) -> Option<Vec<f64>> {
    use GroupLabel::*;
    let ang = |m: Mat2| m.a21.atan2(m.a11);
    let v = match label {
        AxK => vec![ln_pos(g1.a11)?, ang(g2)],
        NxK => vec![g1.a12, ang(g2)],
        KxK => vec![ang(g1), ang(g2)],
        AffxI | GFK | DiagAff | GFN | GFA => vec![ln_pos(g1.a11)?, g1.a12],
        AxA => vec![ln_pos(g1.a11)?, ln_pos(g2.a11)?],
        NxN => vec![g1.a12, g2.a12],
        AxN => vec![ln_pos(g1.a11)?, g2.a12],
        AffxA => vec![ln_pos(g1.a11)?, g1.a12, ln_pos(g2.a11)?],
        AffxN => vec![ln_pos(g1.a11)?, g1.a12, g2.a12],
        AffxAff => vec![ln_pos(g1.a11)?, g1.a12, ln_pos(g2.a11)?, g2.a12],
        DiagSL2 => ank_params(g1).to_vec(),
        GFF => vec![ln_pos(g1.a11)?, g1.a12, g2.a12],
    };
    Some(v)
}

/// Parameters of `pair` if it lies in the group (up to the common sign),
/// checked by re-evaluation with relative tolerance `tol`.
pub fn member_params(label: GroupLabel, pair: &IsometryPair, tol: f64) -> Option<Vec<f64>> {
    for sign in [1.0, -1.0] {
        let g1 = pair.g1.scale(sign);
        let g2 = pair.g2.scale(sign);
        if let Some(params) = candidate_params(label, g1, g2) {
            if params.iter().all(|x| x.is_finite()) {
                if let Ok(e) = element(label, &params) {
                    let scale = pair.max_abs().max(1.0);
                    let err = (e.g1 - g1).max_abs().max((e.g2 - g2).max_abs());
                    if err <= tol * scale {
                        return Some(params);
                    }
                }
            }
        }
    }
    None
}

fn flatten(b: &LiePair) -> Vec<f64> {
    let (v, w) = b;
    vec![v.h, v.e, v.f, w.h, w.e, w.f]
}

/// Every pairwise bracket of the basis lies in its span (residual < 1e−12).
pub fn bracket_closure_check(label: GroupLabel) -> bool {
    bracket_closure_residual(label) < 1e-12
}

pub fn bracket_closure_residual(label: GroupLabel) -> f64 {
    let basis = spec(label).lie_basis;
    let cols: Vec<Vec<f64>> = basis.iter().map(flatten).collect();
    let mut worst: f64 = 0.0;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let br = (basis[i].0.bracket(basis[j].0), basis[i].1.bracket(basis[j].1));
            worst = worst.max(linalg::lstsq_residual(&cols, &flatten(&br)));
        }
    }
    worst
}

/// Whether `d` lies in the span of `span` (residual ≤ 1e−10·|d|).
pub fn in_pair_span(span: &[LiePair], d: &LiePair) -> bool {
    let cols: Vec<Vec<f64>> = span.iter().map(flatten).collect();
    let v = flatten(d);
    let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    linalg::lstsq_residual(&cols, &v) <= 1e-10 * scale
}

/// Whether `d` lies in the Lie algebra of the group.
pub fn in_lie_span(label: GroupLabel, d: &LiePair) -> bool {
    in_pair_span(&spec(label).lie_basis, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_labels_split_five_eleven() {
        let c = catalog();
        assert_eq!(c.len(), 16);
        assert_eq!(c.iter().filter(|s| s.proper).count(), 5);
        let dims: Vec<usize> = c.iter().map(|s| s.dim).collect();
        assert_eq!(dims, vec![2, 2, 2, 2, 2, 2, 2, 2, 3, 3, 4, 2, 3, 2, 3, 2]);
        for s in &c {
            assert_eq!(s.dim, s.param_count);
            assert_eq!(s.label.as_str().parse::<GroupLabel>().unwrap(), s.label);
        }
    }

    #[test]
    fn selected_bases() {
        assert_eq!(spec(GroupLabel::GFK).lie_basis, vec![(X, Z), (Y, O)]);
        assert_eq!(spec(GroupLabel::DiagAff).lie_basis, vec![(X, X), (Y, Y)]);
        assert!(spec(GroupLabel::KxK).proper);
        assert!(!spec(GroupLabel::AxA).proper);
        assert_eq!(spec(GroupLabel::GFF).p1().len(), 2);
    }

    #[test]
    fn elements() {
        let e = element(GroupLabel::GFK, &[1.0, 2.0]).unwrap();
        let f = Mat2::new(1f64.exp(), 2.0, 0.0, (-1f64).exp());
        assert!(e.g1.approx_eq(f, 1e-15));
        assert!(e.g2.approx_eq(k_t(1.0), 1e-15));
        assert_eq!(element(GroupLabel::AxA, &[0.0, 0.0]).unwrap(), IsometryPair::IDENTITY);
        let a = element(GroupLabel::GFF, &[0.7, -1.0, 3.0]).unwrap();
        let b = element(GroupLabel::GFA, &[0.7, -1.0]).unwrap();
        assert_eq!(a.g1, b.g1);
        assert!(matches!(
            element(GroupLabel::AxK, &[1.0]),
            Err(Error::ParamArity { expected: 2, got: 1, .. })
        ));
    }

    #[test]
    fn closure_of_all_bases() {
        for l in GroupLabel::ALL {
            assert!(bracket_closure_check(l), "{l}");
        }
    }

    #[test]
    fn membership_roundtrip() {
        for l in GroupLabel::ALL {
            let params: Vec<f64> = (0..l.dim()).map(|i| 0.3 + 0.4 * i as f64).collect();
            let e = element(l, &params).unwrap();
            let back = member_params(l, &e, 1e-12).unwrap_or_else(|| panic!("{l}"));
            let again = element(l, &back).unwrap();
            assert!(again.g1.approx_eq(e.g1, 1e-12) && again.g2.approx_eq(e.g2, 1e-12), "{l}");
        }
        // A×N pair is not an element of the (F_{t,s}, N_t) family.
        let off = IsometryPair::new(a_t(2.0), n_t(2f64.exp()));
        assert!(member_params(GroupLabel::GFN, &off, 1e-9).is_none());
        assert!(member_params(GroupLabel::AxN, &off, 1e-9).is_some());
    }

    #[test]
    fn iwasawa_factors() {
        let g = a_t(0.4) * n_t(-1.3) * k_t(2.2);
        let [t, s, u] = ank_params(g);
        assert!((t - 0.4).abs() < 1e-12 && (s + 1.3).abs() < 1e-12 && (u - 2.2).abs() < 1e-12);
    }
}
