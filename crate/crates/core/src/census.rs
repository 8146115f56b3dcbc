//! Orbit census: bucket orbit ids over Iwasawa samples, the seeded special
//! points and samples on the p21 = 0 stratum.

use rand::Rng;
use serde::Serialize;

use crate::catalog::GroupLabel;
use crate::classifier::{boundary_distance, bucket_ids, classify, OrbitClass, OrbitRecord};
use crate::engine::CausalCharacter;
use crate::par::map_indices;
use crate::reconcile::{iwasawa_sample, seeded_points};
use crate::sl2::{a_t, n_t, sample_rng, symmetric, PointAdS};

/// Stream offset separating stratum draws from the Iwasawa draws.
const STRATUM_STREAM: u64 = 1 << 40;

pub fn seeded_names() -> Vec<String> {
    let mut out = vec!["I".to_string(), "-I".into(), "J".into(), "-J".into()];
    for s in ["", "-"] {
        for e in ["E12", "E21"] {
            for t in ["+", "-"] {
                out.push(format!("{s}I{t}{e}"));
            }
        }
    }
    out
}

/// ±A_t N_s with t, s uniform in [−2, 2].
pub fn stratum_sample(seed: u64, index: u64) -> PointAdS {
    let mut rng = sample_rng(seed, STRATUM_STREAM + index);
    let t = symmetric(&mut rng, 2.0);
    let s = symmetric(&mut rng, 2.0);
    let m = a_t(t) * n_t(s);
    PointAdS::new_unchecked(if rng.random::<bool>() { m } else { -m })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bucket {
    pub class: OrbitClass,
    pub character: CausalCharacter,
    /// Distinct orbit ids.
    pub ids: usize,
    pub points: usize,
    /// The ids themselves when there are few of them.
    pub keys: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeededEntry {
    pub name: String,
    pub class: OrbitClass,
    pub character: CausalCharacter,
    pub key: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport {
    pub label: GroupLabel,
    pub samples: usize,
    pub stratum_samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Iwasawa samples dropped for lying within 10·tol of a branch boundary.
    pub excluded: usize,
    pub buckets: Vec<Bucket>,
    pub seeded: Vec<SeededEntry>,
}

impl CensusReport {
    pub fn ids_of_class(&self, class: OrbitClass) -> usize {
        self.buckets.iter().filter(|b| b.class == class).map(|b| b.ids).sum()
    }

    pub fn ids_of_character(&self, ch: CausalCharacter) -> usize {
        self.buckets.iter().filter(|b| b.character == ch).map(|b| b.ids).sum()
    }

    pub fn seeded_of_class(&self, class: OrbitClass) -> usize {
        self.seeded.iter().filter(|s| s.class == class).count()
    }

    pub fn characters(&self) -> Vec<CausalCharacter> {
        let mut out: Vec<CausalCharacter> = self.buckets.iter().map(|b| b.character).collect();
        out.dedup();
        out
    }
}

const KEYS_SHOWN: usize = 16;

pub fn census(label: GroupLabel, samples: usize, seed: u64, tol: f64) -> CensusReport {
    let n = samples.max(1);
    let strata = n / 4;
    let seeded = seeded_points();
    let excl = 10.0 * tol;
    let sampled: Vec<Option<OrbitRecord>> = map_indices(n, |i| {
        let p = iwasawa_sample(seed, i as u64);
        (boundary_distance(label, p) > excl).then(|| classify(label, p, tol))
    });
    let excluded = sampled.iter().filter(|r| r.is_none()).count();
    let stratum: Vec<OrbitRecord> = map_indices(strata, |i| classify(label, stratum_sample(seed, i as u64), tol));
    let seeded_recs: Vec<OrbitRecord> = seeded.iter().map(|p| classify(label, *p, tol)).collect();

    let mut groups: Vec<((OrbitClass, CausalCharacter), Vec<crate::classifier::OrbitId>)> = Vec::new();
    for r in sampled.iter().flatten().chain(&stratum).chain(&seeded_recs) {
        let k = (r.orbit_class, r.character);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, v)) => v.push(r.orbit_id.clone()),
            None => groups.push((k, vec![r.orbit_id.clone()])),
        }
    }
    groups.sort_by_key(|g| g.0);
    let buckets = groups
        .into_iter()
        .map(|((class, character), ids)| {
            let b = bucket_ids(&ids, tol);
            let keys = if b.len() <= KEYS_SHOWN { b.iter().map(|(id, _)| id.key()).collect() } else { vec![] };
            Bucket { class, character, ids: b.len(), points: ids.len(), keys }
        })
        .collect();
    let seeded = seeded_names()
        .into_iter()
        .zip(&seeded_recs)
        .map(|(name, r)| SeededEntry { name, class: r.orbit_class, character: r.character, key: r.orbit_id.key() })
        .collect();
    CensusReport { label, samples: n, stratum_samples: strata, seed, tol, excluded, buckets, seeded }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_line_up_with_points() {
        let names = seeded_names();
        let pts = seeded_points();
        assert_eq!(names.len(), pts.len());
        assert_eq!(names[5], "I-E12");
        assert_eq!(pts[5].m(), crate::sl2::Mat2::I - crate::sl2::Mat2::E12);
        assert_eq!(names[11], "-I-E21");
        assert_eq!(pts[11].m(), -crate::sl2::Mat2::I - crate::sl2::Mat2::E21);
    }

    #[test]
    fn small_census_counts() {
        let r = census(GroupLabel::AxN, 2000, 0, 1e-9);
        assert_eq!(r.ids_of_character(CausalCharacter::DegenerateSurface), 4);
        let r = census(GroupLabel::AxK, 2000, 0, 1e-9);
        assert_eq!(r.characters(), vec![CausalCharacter::LorentzianSurface]);
        assert_eq!(r.ids_of_class(OrbitClass::Singular), 0);
    }

    #[test]
    fn deterministic_across_runs() {
        let a = census(GroupLabel::GFF, 500, 3, 1e-9);
        let b = census(GroupLabel::GFF, 500, 3, 1e-9);
        assert_eq!(a, b);
    }
}
