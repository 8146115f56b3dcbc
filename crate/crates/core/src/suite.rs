//! The verification suite: every invariant as a named check with a status
//! and a signed margin (positive means headroom).

use rand::Rng;
use serde::Serialize;

use crate::catalog::{bracket_closure_residual, element, spec, GroupLabel};
use crate::census::census;
use crate::classifier::{boundary_distance, classify, orbit_id, same_orbit, OrbitClass};
use crate::engine::{act, flow_derivative, stabilizer_algebra, CausalCharacter};
use crate::identities::{direction_polys, max_fixation_error, poly_discrepancy, stabilizer_formulas};
use crate::orbit_space::{
    closure_catalog, closures_match_specialization, finite_space, proper_model_check, quotient_verdict, topology_checks,
    verify_pair, ProperModel,
};
use crate::par::map_indices;
use crate::properness::{certificate, falsify_properness, verify_certificate};
use crate::reconcile::{boundary_allowance, iwasawa_sample, reconcile, seeded_points};
use crate::sl2::{a_t, exp_traceless, k_t, n_t, sample_rng, PointAdS, TracelessMat};
use crate::transporter::{printed_affxaff, printed_affxn, transport_residual, transporter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    /// A known, documented disagreement that the suite reports but accepts.
    #[serde(rename = "expected-flag")]
    ExpectedFlag,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub margin: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, margin: f64) -> Self {
        Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, margin }
    }

    /// Pass when `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, value <= bound, bound - value)
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub labels: Vec<GroupLabel>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { samples: 1000, seed: 0, tol: 1e-9, labels: GroupLabel::ALL.to_vec() }
    }
}

impl SuiteConfig {
    fn has(&self, l: GroupLabel) -> bool {
        self.labels.contains(&l)
    }
}

type Section = fn(&SuiteConfig) -> Vec<Check>;

/// Named sections in run order.
pub const SECTIONS: [(&str, Section); 13] = [
    ("exp", exp_section),
    ("poly", poly_section),
    ("reconcile", reconcile_section),
    ("proper", proper_section),
    ("census", census_section),
    ("properness", properness_section),
    ("stabilizer", stabilizer_section),
    ("transport", transport_section),
    ("topology", topology_section),
    ("verdict", verdict_section),
    ("lie", lie_section),
    ("invariance", invariance_section),
    ("equivalence", equivalence_section),
];

pub fn run_section(name: &str, cfg: &SuiteConfig) -> Vec<Check> {
    SECTIONS.iter().find(|(n, _)| *n == name).map(|(_, f)| f(cfg)).unwrap_or_default()
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<Check> {
    SECTIONS.iter().flat_map(|(_, f)| f(cfg)).collect()
}

// stream offsets keep the sections' random draws apart
const POLY_STREAM: u64 = 1 << 41;
const TRANSPORT_STREAM: u64 = 1 << 42;
const INVARIANCE_STREAM: u64 = 1 << 43;
const FLOW_STREAM: u64 = 1 << 44;

fn exp_section(_: &SuiteConfig) -> Vec<Check> {
    let err = (0..=100)
        .map(|i| {
            let t = -5.0 + 0.1 * i as f64;
            let ex = (exp_traceless(TracelessMat::X.scale(t)) - a_t(t)).max_abs();
            let ey = (exp_traceless(TracelessMat::Y.scale(t)) - n_t(t)).max_abs();
            let ez = (exp_traceless(TracelessMat::Z.scale(t)) - k_t(t)).max_abs();
            ex.max(ey).max(ez)
        })
        .fold(0.0, f64::max);
    vec![Check::new("exp/X,Y,Z", err < 1e-12, 1e-12 - err)]
}

fn poly_section(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for entry in direction_polys().into_iter().filter(|e| cfg.has(e.label)) {
        let k = entry.params.len();
        let errs = map_indices(1000, |i| {
            let p = iwasawa_sample(cfg.seed, i as u64);
            let mut rng = sample_rng(cfg.seed, POLY_STREAM + i as u64);
            let d: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
            let stated = poly_discrepancy(entry.label, p, &d, entry.stated);
            let fixed = entry.corrected.map(|(_, f)| poly_discrepancy(entry.label, p, &d, f));
            (stated, fixed)
        });
        let worst = errs.iter().map(|e| e.0).fold(0.0, f64::max);
        out.push(Check::at_most(format!("poly/{}", entry.label), worst, 1e-9));
        if entry.corrected.is_some() {
            let worst = errs.iter().filter_map(|e| e.1).fold(0.0, f64::max);
            out.push(Check::at_most(format!("poly/{}/rederived", entry.label), worst, 1e-9));
        }
    }
    out
}

fn reconcile_section(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &label in &cfg.labels {
        let r = reconcile(label, cfg.samples, cfg.seed, cfg.tol);
        let agreement = if r.agreement_rate >= 0.999 {
            Status::Pass
        } else if r.decisive_rate() >= 0.999 {
            // only the rank cutoff disagrees
            Status::ExpectedFlag
        } else {
            Status::Fail
        };
        out.push(Check { name: format!("reconcile/{label}/agreement"), status: agreement, margin: r.agreement_rate - 0.999 });
        let worst = r.mismatches.iter().filter(|m| !m.rank_limited).map(|m| m.boundary_distance).fold(0.0, f64::max);
        out.push(Check::at_most(format!("reconcile/{label}/near-boundary"), worst, boundary_allowance(cfg.tol)));
        let undocumented = r.undocumented_claims();
        let status = if undocumented > 0 {
            Status::Fail
        } else if r.documented_claims() > 0 {
            Status::ExpectedFlag
        } else {
            Status::Pass
        };
        out.push(Check { name: format!("reconcile/{label}/claims"), status, margin: 0.0 - undocumented as f64 });
    }
    out
}

fn proper_section(cfg: &SuiteConfig) -> Vec<Check> {
    use CausalCharacter::*;
    use GroupLabel::*;
    let mut out = Vec::new();
    let points: Vec<PointAdS> = (0..cfg.samples as u64).map(|i| iwasawa_sample(cfg.seed, i)).chain(seeded_points()).collect();
    for label in [AxK, NxK, GFK, AffxI, KxK].into_iter().filter(|l| cfg.has(*l)) {
        let recs = map_indices(points.len(), |i| {
            let p = points[i];
            (classify(label, p, cfg.tol), stabilizer_algebra(label, p, cfg.tol).len(), p.m().frob2())
        });
        let bad = match label {
            AxK | NxK | GFK => recs.iter().filter(|(r, s, _)| r.character != LorentzianSurface || *s != 0).count(),
            AffxI => recs.iter().filter(|(r, _, _)| r.character != DegenerateSurface).count(),
            _ => recs.iter().filter(|(r, _, f)| *f > 2.0 + cfg.tol && r.character != LorentzianSurface).count(),
        };
        out.push(Check::new(format!("proper/{label}/characters"), bad == 0, 0.0 - bad as f64));
        let spacelike = recs.iter().filter(|(r, _, _)| r.character.is_spacelike()).count();
        out.push(Check::new(format!("proper/{label}/no-spacelike"), spacelike == 0, 0.0 - spacelike as f64));
    }
    if cfg.has(KxK) {
        let c = classify(KxK, PointAdS::IDENTITY, cfg.tol).character;
        out.push(Check::new("proper/KxK/orbit-of-I", c == TimelikeCurve, 0.0));
    }
    out
}

fn census_section(cfg: &SuiteConfig) -> Vec<Check> {
    use GroupLabel::*;
    use OrbitClass::*;
    let n = cfg.samples * 10;
    let mut out = Vec::new();
    let exact = |name: String, got: usize, want: usize| Check::new(name, got == want, 0.0 - (got as f64 - want as f64).abs());
    let degenerate = CausalCharacter::DegenerateSurface;
    for &label in &cfg.labels {
        let r = census(label, n, cfg.seed, cfg.tol);
        match label {
            AxA => out.push(exact(format!("census/{label}/singular"), r.ids_of_class(Singular), 4)),
            AxN | GFN => {
                let want = if label == AxN { 4 } else { 2 };
                out.push(exact(format!("census/{label}/degenerate"), r.ids_of_character(degenerate), want))
            }
            AffxA | AffxN | AffxAff => {
                let want = if label == AffxA { 4 } else { 2 };
                out.push(exact(format!("census/{label}/exceptional"), r.ids_of_class(Exceptional), want));
                out.push(exact(format!("census/{label}/open"), r.ids_of_class(OpenOrbit), want));
            }
            GFF => {
                out.push(exact(format!("census/{label}/open"), r.ids_of_class(OpenOrbit), 2));
                let s = r.ids_of_class(Singular);
                out.push(Check::new(format!("census/{label}/singular-continuum"), s >= 50, s as f64 - 50.0));
            }
            DiagAff => {
                out.push(exact(format!("census/{label}/seeded-fixed"), r.seeded_of_class(FixedPoint), 2));
                let mut keys: Vec<&str> =
                    r.seeded.iter().filter(|s| s.class == Singular).map(|s| s.key.as_str()).collect();
                keys.sort();
                keys.dedup();
                out.push(exact(format!("census/{label}/seeded-parabolic"), keys.len(), 4));
            }
            AxK => {
                out.push(exact(format!("census/{label}/characters"), r.characters().len(), 1));
                out.push(exact(format!("census/{label}/singular"), r.ids_of_class(Singular), 0));
            }
            _ => {}
        }
    }
    out
}

fn properness_section(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &label in &cfg.labels {
        match certificate(label) {
            Some(cert) => {
                let c = verify_certificate(&cert, 25, 1e-6);
                out.push(Check::new(format!("properness/{label}/certificate"), c.valid, c.growth.log10() - 6.0));
            }
            None => {
                let f = falsify_properness(label, 500, cfg.seed);
                out.push(Check::new(format!("properness/{label}/no-escape"), f.events == 0, 0.0 - f.events as f64));
            }
        }
        if matches!(label, GroupLabel::AxN | GroupLabel::GFN) {
            let f = falsify_properness(label, 500, cfg.seed);
            out.push(Check::new(format!("properness/{label}/escape-found"), f.events >= 1, f.events as f64 - 1.0));
        }
    }
    out
}

fn stabilizer_section(cfg: &SuiteConfig) -> Vec<Check> {
    let bases = [(0.7, -1.2, false), (-1.3, 0.4, true), (0.3, 2.0, false), (1.8, -0.6, true)];
    stabilizer_formulas()
        .into_iter()
        .filter(|f| f.in_suite && cfg.has(f.label))
        .map(|f| {
            let worst = bases
                .iter()
                .map(|&(x, y, neg)| max_fixation_error(f.family, (f.base)(x, y, neg), f.two_parameter, 24))
                .fold(0.0, f64::max);
            Check::at_most(format!("stabilizer/{}", f.name), worst, 1e-12)
        })
        .collect()
}

type PrintedSolve = fn(PointAdS, PointAdS, f64) -> Vec<f64>;

/// 100 same-orbit pairs (p, g·p) for a label.
fn orbit_pairs(label: GroupLabel, seed: u64, count: usize, half: f64, stream: u64) -> Vec<(PointAdS, PointAdS)> {
    let k = spec(label).param_count;
    map_indices(count, |i| {
        let p = iwasawa_sample(seed, i as u64);
        let mut rng = sample_rng(seed, stream + i as u64);
        let g: Vec<f64> = (0..k).map(|_| rng.random_range(-half..half)).collect();
        (p, act(&element(label, &g).expect("arity matches"), p))
    })
}

fn transport_section(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &label in &cfg.labels {
        let pairs = orbit_pairs(label, cfg.seed, 100, 1.5, TRANSPORT_STREAM);
        let res = map_indices(pairs.len(), |i| {
            let (p, q) = pairs[i];
            transporter(label, p, q, cfg.tol).map(|h| transport_residual(label, &h, p, q)).unwrap_or(f64::INFINITY)
        });
        let worst = res.iter().copied().fold(0.0, f64::max);
        out.push(Check::at_most(format!("transport/{label}"), worst, 1e-8));
        let printed: Option<PrintedSolve> = match label {
            GroupLabel::AffxN => Some(|p, q, t| printed_affxn(p, q, t).to_vec()),
            GroupLabel::AffxAff => Some(|p, q, t| printed_affxaff(p, q, t).to_vec()),
            _ => None,
        };
        if let Some(solve) = printed {
            let worst = pairs
                .iter()
                .map(|&(p, q)| transport_residual(label, &solve(p, q, cfg.tol), p, q))
                .fold(0.0, f64::max);
            out.push(Check::at_most(format!("transport/{label}/printed-solve"), worst, 1e-8));
        }
    }
    out
}

fn topology_section(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &label in &cfg.labels {
        if let Some(t) = finite_space(label) {
            match topology_checks(&t) {
                Ok(r) => {
                    out.push(Check::new(format!("topology/{label}/T0"), r.t0, 0.0));
                    out.push(Check::new(format!("topology/{label}/non-hausdorff"), !r.hausdorff && r.witness.is_some(), 0.0));
                }
                Err(_) => out.push(Check::new(format!("topology/{label}/basis"), false, -1.0)),
            }
            let ok = closures_match_specialization(label) == Some(true);
            out.push(Check::new(format!("topology/{label}/specialization"), ok, 0.0));
        }
        let rel = closure_catalog(label);
        if !rel.pairs.is_empty() {
            let checks: Vec<_> = rel.pairs.iter().map(|p| verify_pair(label, p, 25, 1e-6)).collect();
            let worst = checks.iter().map(|c| c.limit_error).fold(0.0, f64::max);
            let ok = checks.iter().all(|c| c.ok);
            out.push(Check::new(format!("topology/{label}/closures"), ok, 1e-6 - worst));
        }
    }
    out
}

/// The orbit-space verdict each label must carry.
pub fn expected_verdict(label: GroupLabel) -> (bool, bool, bool, Option<ProperModel>) {
    use GroupLabel::*;
    use ProperModel::*;
    match label {
        AxK | NxK => (true, true, false, Some(RealLine)),
        GFK | AffxI => (true, true, false, Some(Circle)),
        KxK => (true, true, false, Some(HalfLine)),
        AxN | GFN => (false, true, false, None),
        AffxA | AffxN | AffxAff => (false, false, true, None),
        _ => (false, false, false, None),
    }
}

fn verdict_section(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &label in &cfg.labels {
        let v = quotient_verdict(label);
        let got = (v.hausdorff, v.locally_euclidean, v.finite, v.proper_model);
        out.push(Check::new(format!("verdict/{label}"), got == expected_verdict(label), 0.0));
        if let Some(m) = proper_model_check(label, cfg.samples * 10, cfg.seed) {
            let half_line = m.model != ProperModel::HalfLine || m.sample_min >= 2.0 - cfg.tol;
            out.push(Check::new(format!("verdict/{label}/model-map"), m.monotone && half_line, 0.0));
        }
    }
    out
}

fn lie_section(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &label in &cfg.labels {
        let r = bracket_closure_residual(label);
        out.push(Check::at_most(format!("lie/{label}/bracket-closure"), r, 1e-10));
        let basis = spec(label).lie_basis;
        let errs = map_indices(100, |i| {
            let p = crate::sl2::sample_with(&mut sample_rng(cfg.seed, FLOW_STREAM + i as u64), Default::default());
            basis
                .iter()
                .map(|(v, w)| {
                    let exact = v.m() * p.m() - p.m() * w.m();
                    (flow_derivative(*v, *w, p, 1e-5) - exact).max_abs()
                })
                .fold(0.0, f64::max)
        });
        let worst = errs.into_iter().fold(0.0, f64::max);
        out.push(Check::at_most(format!("lie/{label}/flow"), worst, 1e-7));
    }
    out
}

fn invariance_section(cfg: &SuiteConfig) -> Vec<Check> {
    let allow = boundary_allowance(cfg.tol);
    cfg.labels
        .iter()
        .map(|&label| {
            let pairs = orbit_pairs(label, cfg.seed, 500, 3.0, INVARIANCE_STREAM);
            let bad = pairs
                .iter()
                .filter(|(p, q)| boundary_distance(label, *p) > allow && boundary_distance(label, *q) > allow)
                .filter(|(p, q)| !orbit_id(label, *p, cfg.tol).matches(&orbit_id(label, *q, cfg.tol), 1e-6))
                .count();
            Check::new(format!("invariance/{label}/orbit-id"), bad == 0, 0.0 - bad as f64)
        })
        .collect()
}

fn equivalence_section(cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for &label in &cfg.labels {
        let pts: Vec<PointAdS> = (0..200u64).map(|i| iwasawa_sample(cfg.seed, i)).collect();
        let reflexive = pts.iter().all(|p| same_orbit(label, *p, *p, cfg.tol));
        let symmetric = pts.windows(2).all(|w| same_orbit(label, w[0], w[1], cfg.tol) == same_orbit(label, w[1], w[0], cfg.tol));
        let a = orbit_pairs(label, cfg.seed, 100, 1.5, TRANSPORT_STREAM);
        let b = orbit_pairs(label, cfg.seed, 100, 1.5, INVARIANCE_STREAM);
        // (p, g p) and (p, h p): g p ~ p ~ h p
        let transitive = a.iter().zip(&b).all(|((_, q1), (_, q2))| same_orbit(label, *q1, *q2, cfg.tol));
        out.push(Check::new(format!("equivalence/{label}"), reflexive && symmetric && transitive, 0.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_have_distinct_names() {
        let mut names: Vec<&str> = SECTIONS.iter().map(|s| s.0).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), SECTIONS.len());
        assert!(run_section("nope", &SuiteConfig::default()).is_empty());
    }

    #[test]
    fn small_suite_runs() {
        let cfg = SuiteConfig { samples: 50, labels: vec![GroupLabel::AxK, GroupLabel::AffxN], ..Default::default() };
        let checks = run_section("topology", &cfg);
        assert!(checks.iter().all(|c| c.passed()), "{checks:?}");
        assert!(run_section("exp", &cfg)[0].passed());
    }
}
