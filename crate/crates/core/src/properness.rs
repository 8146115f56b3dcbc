//! Non-properness certificates, structural properness reasons and a randomized
//! search for escaping sequences.

use rand::Rng;
use serde::Serialize;

use crate::catalog::{element, member_params, spec, GroupLabel, IsometryPair, LiePair};
use crate::engine::{act, stabilizer_algebra};
use crate::sl2::{a_t, exp_traceless, f_ts, n_t, sample_rng, sample_with, Mat2, PointAdS, SampleRanges, TracelessMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProperReason {
    CompactFactor,
    FreeSequenceArgument,
    LeftTranslation,
}

pub fn proper_reason(label: GroupLabel) -> Option<ProperReason> {
    use GroupLabel::*;
    match label {
        AxK | NxK | KxK => Some(ProperReason::CompactFactor),
        GFK => Some(ProperReason::FreeSequenceArgument),
        AffxI => Some(ProperReason::LeftTranslation),
        _ => None,
    }
}

/// n ↦ (g_n, p_n, g_n·p_n), the image given in closed form so that the
/// cancelling e^{±n} factors never meet in floating point.
pub type SequenceFn = fn(f64) -> (IsometryPair, PointAdS, PointAdS);

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum NonProperCertificate {
    EscapingSequence {
        label: GroupLabel,
        sequence: &'static str,
        #[serde(skip)]
        generator: SequenceFn,
        limit_p: PointAdS,
        limit_q: PointAdS,
    },
    NoncompactStabilizer {
        label: GroupLabel,
        base_point: PointAdS,
        stab_direction: LiePair,
    },
}

impl NonProperCertificate {
    pub fn label(&self) -> GroupLabel {
        match self {
            NonProperCertificate::EscapingSequence { label, .. } => *label,
            NonProperCertificate::NoncompactStabilizer { label, .. } => *label,
        }
    }
}

/// (A_n, N_{e^n}) on p_n = e^{-n}E11 + E12 − E21; image [[1, 0], [−e^{-n}, 1]].
fn a_n_sequence(n: f64) -> (IsometryPair, PointAdS, PointAdS) {
    let g = IsometryPair::new(a_t(n), n_t(n.exp()));
    let p = PointAdS::new_unchecked(Mat2::new((-n).exp(), 1.0, -1.0, 0.0));
    let q = PointAdS::new_unchecked(Mat2::new(1.0, 0.0, -(-n).exp(), 1.0));
    (g, p, q)
}

/// (F_{n,0}, N_{e^n}) on the same points; F_{n,0} = A_n.
fn f_n_sequence(n: f64) -> (IsometryPair, PointAdS, PointAdS) {
    let (_, p, q) = a_n_sequence(n);
    (IsometryPair::new(f_ts(n, 0.0), n_t(n.exp())), p, q)
}

pub fn certificate(label: GroupLabel) -> Option<NonProperCertificate> {
    use GroupLabel::*;
    let x = (TracelessMat::X, TracelessMat::X);
    let y = (TracelessMat::Y, TracelessMat::Y);
    let stab = |d: LiePair| NonProperCertificate::NoncompactStabilizer {
        label,
        base_point: PointAdS::IDENTITY,
        stab_direction: d,
    };
    let limit_p = PointAdS::new_unchecked(Mat2::J);
    match label {
        AxK | NxK | KxK | GFK | AffxI => None,
        AxN => Some(NonProperCertificate::EscapingSequence {
            label,
            sequence: "g_n = (A_n, N_{e^n}), p_n = e^-n E11 + E12 - E21",
            generator: a_n_sequence,
            limit_p,
            limit_q: PointAdS::IDENTITY,
        }),
        GFN => Some(NonProperCertificate::EscapingSequence {
            label,
            sequence: "g_n = (F_{n,0}, N_{e^n}), p_n = e^-n E11 + E12 - E21",
            generator: f_n_sequence,
            limit_p,
            limit_q: PointAdS::IDENTITY,
        }),
        NxN | AffxN => Some(stab(y)),
        AxA | GFA | DiagAff | DiagSL2 | AffxA | AffxAff | GFF => Some(stab(x)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub label: GroupLabel,
    pub valid: bool,
    /// Every g_n checked lies in the group.
    pub in_group: bool,
    pub limit_error: f64,
    pub fixation_error: f64,
    pub growth: f64,
    /// Largest gap between the closed-form image and direct evaluation, small n.
    pub image_consistency: f64,
}

fn dist(p: PointAdS, q: PointAdS) -> f64 {
    (p.m() - q.m()).max_abs()
}

pub fn verify_certificate(cert: &NonProperCertificate, n_max: u32, tol: f64) -> CertificateCheck {
    let label = cert.label();
    match cert {
        NonProperCertificate::EscapingSequence { generator, limit_p, limit_q, .. } => {
            let n_max = n_max.max(5);
            let mut in_group = true;
            let mut consistency = 0.0f64;
            for n in 1..=n_max {
                let (g, p, q) = generator(n as f64);
                in_group &= member_params(label, &g, 1e-9).is_some();
                if n <= 10 {
                    let direct = act(&g, p);
                    consistency = consistency.max(dist(direct, q) / q.m().max_abs().max(1.0));
                }
            }
            let (g, p, q) = generator(n_max as f64);
            let limit_error = dist(p, *limit_p).max(dist(q, *limit_q));
            let growth = g.max_abs();
            let valid = in_group && limit_error < tol && growth > 1.0 / tol && consistency < 1e-9;
            CertificateCheck {
                label,
                valid,
                in_group,
                limit_error,
                fixation_error: 0.0,
                growth,
                image_consistency: consistency,
            }
        }
        NonProperCertificate::NoncompactStabilizer { base_point, stab_direction, .. } => {
            let (v, w) = *stab_direction;
            let pair = |t: f64| IsometryPair::new(exp_traceless(v.scale(t)), exp_traceless(w.scale(t)));
            let in_group = crate::catalog::in_lie_span(label, stab_direction);
            let fixation = [-10.0, -5.0, -1.0, 1.0, 5.0, 10.0]
                .iter()
                .map(|&t| dist(pair(t).apply(*base_point), *base_point))
                .fold(0.0, f64::max);
            let growth = (0..=n_max.min(60))
                .map(|k| pair(2f64.powi(k as i32)).max_abs())
                .fold(0.0, f64::max);
            let valid = in_group && fixation <= 1e-10 && growth > 1.0 / tol;
            CertificateCheck {
                label,
                valid,
                in_group,
                limit_error: 0.0,
                fixation_error: fixation,
                growth,
                image_consistency: 0.0,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FalsifyEvent {
    pub trial: usize,
    pub catalog: bool,
    pub params: Vec<f64>,
    pub point: [f64; 4],
    pub image: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FalsifyReport {
    pub label: GroupLabel,
    pub trials: usize,
    pub seed: u64,
    pub window: f64,
    pub magnitude: (f64, f64),
    pub events: usize,
    pub catalog_trials: usize,
    /// Catalog sequence elements rejected because they are not in the group.
    pub catalog_rejected: usize,
    pub examples: Vec<FalsifyEvent>,
}

pub const WINDOW: f64 = 2.0;
pub const MAGNITUDE: (f64, f64) = (1e3, 1e6);

/// Scales the ray until the pair's largest entry reaches `target`; None if it
/// stays bounded.
fn scale_to(label: GroupLabel, dir: &[f64], target: f64) -> Option<Vec<f64>> {
    let at = |l: f64| -> f64 {
        let x: Vec<f64> = dir.iter().map(|d| d * l).collect();
        element(label, &x).map(|g| g.max_abs()).unwrap_or(f64::INFINITY)
    };
    let mut hi = 1.0;
    while at(hi) < target {
        hi *= 2.0;
        if hi > 1e8 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(dir.iter().map(|d| d * hi).collect())
}

fn window_point<R: Rng>(rng: &mut R) -> PointAdS {
    loop {
        let p = sample_with(rng, SampleRanges::default());
        if p.m().max_abs() <= WINDOW {
            return p;
        }
    }
}

/// Randomized escape search. Every tenth trial of a label with an escaping-
/// sequence certificate follows that sequence instead of a ray; elements that
/// fail the membership check are rejected rather than counted.
pub fn falsify_properness(label: GroupLabel, trials: usize, seed: u64) -> FalsifyReport {
    let k = spec(label).param_count;
    let cert = certificate(label);
    let catalog = match cert {
        Some(NonProperCertificate::EscapingSequence { generator, .. }) => Some(generator),
        _ => None,
    };
    struct Trial {
        catalog: bool,
        rejected: bool,
        event: Option<FalsifyEvent>,
    }
    let results = crate::par::map_indices(trials.max(1), |i| {
        let mut rng = sample_rng(seed ^ 0x5eed_f00d, i as u64);
        let target = (MAGNITUDE.0.ln() + rng.random::<f64>() * (MAGNITUDE.1.ln() - MAGNITUDE.0.ln())).exp();
        let windowed = |g: &IsometryPair, p: PointAdS| {
            let q = act(g, p);
            (p.m().max_abs() <= WINDOW && q.m().max_abs() <= WINDOW).then_some(q)
        };
        if let (Some(gen), true) = (catalog, i % 10 == 0) {
            let n = target.ln();
            let (g, p, _) = gen(n);
            return match member_params(label, &g, 1e-9) {
                None => Trial { catalog: true, rejected: true, event: None },
                Some(params) => Trial {
                    catalog: true,
                    rejected: false,
                    event: windowed(&g, p).map(|q| FalsifyEvent {
                        trial: i,
                        catalog: true,
                        params,
                        point: p.m().to_array(),
                        image: q.m().to_array(),
                    }),
                },
            };
        }
        let mut dir: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        dir.iter_mut().for_each(|x| *x /= norm);
        let p = window_point(&mut rng);
        let event = scale_to(label, &dir, target).and_then(|params| {
            let g = element(label, &params).ok()?;
            windowed(&g, p).map(|q| FalsifyEvent {
                trial: i,
                catalog: false,
                params,
                point: p.m().to_array(),
                image: q.m().to_array(),
            })
        });
        Trial { catalog: false, rejected: false, event }
    });
    let events: Vec<FalsifyEvent> = results.iter().filter_map(|t| t.event.clone()).collect();
    FalsifyReport {
        label,
        trials: trials.max(1),
        seed,
        window: WINDOW,
        magnitude: MAGNITUDE,
        events: events.len(),
        catalog_trials: results.iter().filter(|t| t.catalog).count(),
        catalog_rejected: results.iter().filter(|t| t.rejected).count(),
        examples: events.into_iter().take(5).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizerScan {
    pub label: GroupLabel,
    pub samples: usize,
    /// Sample points with a nonzero stabilizer algebra.
    pub nontrivial: usize,
    /// Of those, how many are off the orbit of I or have a non-(Z,Z) direction.
    pub unexpected: usize,
}

/// Infinitesimal compactness proxy for proper labels: stabilizer directions
/// appear only on the KxK orbit of I, and there they are multiples of (Z, Z).
pub fn stabilizer_scan(label: GroupLabel, samples: usize, seed: u64, tol: f64) -> StabilizerScan {
    let mut pts: Vec<PointAdS> = (0..samples as u64).map(|i| sample_with(&mut sample_rng(seed, i), SampleRanges::default())).collect();
    pts.push(PointAdS::IDENTITY);
    let mut nontrivial = 0;
    let mut unexpected = 0;
    for p in &pts {
        let st = stabilizer_algebra(label, *p, tol);
        if st.is_empty() {
            continue;
        }
        nontrivial += 1;
        let on_i_orbit = label == GroupLabel::KxK && (p.m().frob2() - 2.0).abs() <= 1e-9;
        let zz = st.iter().all(|(v, w)| {
            let (vh, ve, vf) = (v.h, v.e, v.f);
            vh.abs() <= 1e-9 && (ve + vf).abs() <= 1e-9 && (w.h.abs() <= 1e-9) && (w.e + w.f).abs() <= 1e-9 && (ve - w.e).abs() <= 1e-9
        });
        if !(on_i_orbit && zz) {
            unexpected += 1;
        }
    }
    StabilizerScan { label, samples: pts.len(), nontrivial, unexpected }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificates_exist_exactly_for_nonproper_labels() {
        for label in GroupLabel::ALL {
            assert_eq!(certificate(label).is_none(), label.is_proper(), "{label}");
            assert_eq!(proper_reason(label).is_some(), label.is_proper(), "{label}");
        }
    }

    #[test]
    fn axn_sequence_verifies_and_tampering_fails() {
        let c = certificate(GroupLabel::AxN).unwrap();
        assert!(verify_certificate(&c, 25, 1e-6).valid);
        if let NonProperCertificate::EscapingSequence { label, sequence, generator, limit_p, .. } = c {
            let bad = NonProperCertificate::EscapingSequence { label, sequence, generator, limit_p, limit_q: PointAdS::new_unchecked(-Mat2::I) };
            assert!(!verify_certificate(&bad, 25, 1e-6).valid);
        }
    }

    #[test]
    fn printed_gfn_witness_is_outside_the_group() {
        let c = certificate(GroupLabel::GFN).unwrap();
        let check = verify_certificate(&c, 25, 1e-6);
        assert!(!check.in_group);
        assert!(check.limit_error < 1e-6 && check.growth > 1e6);
        let (g, _, _) = f_n_sequence(2.0);
        assert!(member_params(GroupLabel::AxN, &g, 1e-9).is_some());
    }

    #[test]
    fn stabilizer_directions_are_in_the_stabilizer_algebra() {
        for label in GroupLabel::ALL {
            if let Some(NonProperCertificate::NoncompactStabilizer { base_point, stab_direction, .. }) = certificate(label) {
                let st = stabilizer_algebra(label, base_point, 1e-9);
                assert!(crate::catalog::in_pair_span(&st, &stab_direction), "{label}");
                assert!(verify_certificate(&certificate(label).unwrap(), 25, 1e-6).valid, "{label}");
            }
        }
    }

    #[test]
    fn proper_labels_have_compact_stabilizers() {
        for label in GroupLabel::ALL.into_iter().filter(|l| l.is_proper()) {
            let s = stabilizer_scan(label, 200, 0, 1e-9);
            assert_eq!(s.unexpected, 0, "{label}");
            assert_eq!(s.nontrivial > 0, label == GroupLabel::KxK, "{label}");
        }
    }
}
