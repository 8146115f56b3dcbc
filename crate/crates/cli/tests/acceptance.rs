//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N  PASS|FAIL  ...` line straight to stdout so the summary shows
//! up without `--nocapture`.

use std::io::Write;
use std::process::Command;

use ads3::catalog::GroupLabel;
use ads3::orbit_space::{closure_catalog, verify_pair, ClosurePair, Source};
use ads3::reconcile::reconcile;
use ads3::sl2::{a_t, exp_traceless, k_t, n_t, Mat2, TracelessMat};
use ads3::suite::{run_section, Check, SuiteConfig};

fn report(n: u32, title: &str, failures: &[String]) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!("criterion {n:>2}  {verdict}  {title}");
    if !failures.is_empty() {
        line.push_str(&format!("  [{}]", failures.join("; ")));
    }
    line.push('\n');
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(failures.is_empty(), "{line}");
}

fn failing(checks: &[Check]) -> Vec<String> {
    checks.iter().filter(|c| !c.passed()).map(|c| format!("{} ({:.3e})", c.name, c.margin)).collect()
}

fn section(name: &str) -> Vec<Check> {
    run_section(name, &SuiteConfig::default())
}

#[test]
fn c01_exponential_identities() {
    let mut worst = 0.0f64;
    for i in 0..=100 {
        let t = -5.0 + 0.1 * i as f64;
        worst = worst
            .max((exp_traceless(TracelessMat::X.scale(t)) - a_t(t)).max_abs())
            .max((exp_traceless(TracelessMat::Y.scale(t)) - n_t(t)).max_abs())
            .max((exp_traceless(TracelessMat::Z.scale(t)) - k_t(t)).max_abs());
    }
    let fails = if worst < 1e-12 { vec![] } else { vec![format!("max error {worst:e}")] };
    report(1, "exp(tX) = A_t, exp(tY) = N_t, exp(tZ) = K_t on |t| <= 5", &fails);
}

#[test]
fn c02_direction_polynomials() {
    let checks: Vec<Check> = section("poly").into_iter().filter(|c| !c.name.ends_with("/rederived")).collect();
    assert_eq!(checks.len(), 16);
    report(2, "stated direction polynomials match the tangent form, 16 labels", &failing(&checks));
}

#[test]
fn c03_classifier_oracle_agreement() {
    let mut fails = Vec::new();
    let mut flagged = Vec::new();
    for label in GroupLabel::ALL {
        let r = reconcile(label, 1000, 0, 1e-9);
        if r.agreement_rate < 0.999 {
            fails.push(format!("{label} agreement {:.3}", r.agreement_rate));
        }
        if !r.mismatches_near_boundary() {
            fails.push(format!("{label} mismatch away from a boundary"));
        }
        if r.undocumented_claims() > 0 {
            fails.push(format!("{label} undocumented claim discrepancies {}", r.undocumented_claims()));
        }
        if r.documented_claims() > 0 {
            flagged.push(label);
        }
    }
    if flagged != [GroupLabel::AxA, GroupLabel::DiagSL2] {
        fails.push(format!("flagged sets {flagged:?}"));
    }
    report(3, "closed-form classifier agrees with the Gram engine on 1000 samples per label", &fails);
}

#[test]
fn c04_proper_groups() {
    report(4, "proper groups: Lorentzian/degenerate characters, KxK orbit of I, no space-like orbit", &failing(&section("proper")));
}

#[test]
fn c05_orbit_census() {
    let cfg = SuiteConfig { samples: 1000, ..Default::default() };
    let checks = run_section("census", &cfg);
    assert!(checks.len() >= 12);
    report(5, "orbit census over 10^4 samples plus special points", &failing(&checks));
}

#[test]
fn c06_properness_certificates() {
    report(6, "non-properness certificates verify; proper groups show no escape", &failing(&section("properness")));
}

#[test]
fn c07_stabilizer_identities() {
    let checks = section("stabilizer");
    assert_eq!(checks.len(), 7);
    report(7, "stated stabilizer families fix their base points on t in [-3, 3]", &failing(&checks));
}

#[test]
fn c08_transporter_round_trips() {
    let checks = section("transport");
    assert_eq!(checks.len(), 18);
    report(8, "transporter residual <= 1e-8 on 100 pairs per label and the explicit solves", &failing(&checks));
}

#[test]
fn c09_finite_topologies() {
    let mut fails = failing(&section("topology"));
    // swapped pair: I+E21 is not in the closure of the orbit of I
    let rel = closure_catalog(GroupLabel::AffxA);
    let p = &rel.pairs[0];
    let Source::Orbit(src) = p.source else { unreachable!() };
    let swapped = ClosurePair {
        source_name: p.limit_name,
        limit_name: p.source_name,
        limit: src,
        source: Source::Orbit(p.limit),
        sequence: p.sequence,
        pair: p.pair,
        image: |_| Mat2::I,
    };
    if verify_pair(GroupLabel::AffxA, &swapped, 25, 1e-6).ok {
        fails.push("swapped closure pair verified".into());
    }
    report(9, "finite quotients: intersection-closed, T0, non-Hausdorff; closures verify", &fails);
}

#[test]
fn c10_quotient_verdicts() {
    report(10, "orbit-space verdicts and proper model spaces", &failing(&section("verdict")));
}

#[test]
fn c11_lie_algebras_and_flows() {
    let checks = section("lie");
    assert_eq!(checks.len(), 32);
    report(11, "bracket closure and finite-difference flow consistency", &failing(&checks));
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_ads3")).args(args).output().expect("binary runs");
    assert!(matches!(out.status.code(), Some(0 | 2)), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn c12_determinism() {
    let mut fails = Vec::new();
    for cmd in ["survey", "verify"] {
        let base = ["--samples", "1000", "--seed", "0"];
        let runs: Vec<Vec<u8>> = ["1", "4", "4", "0"]
            .iter()
            .map(|w| {
                let mut args = vec![cmd];
                args.extend(base);
                args.extend(["--workers", w]);
                run_cli(&args)
            })
            .collect();
        if runs.iter().any(|r| r != &runs[0]) {
            fails.push(format!("{cmd} output differs"));
        }
        let v: serde_json::Value = serde_json::from_slice(&runs[0]).expect("json output");
        for key in ["tool_version", "config", "group", "results", "checks"] {
            if v.get(key).is_none() {
                fails.push(format!("{cmd} lacks {key}"));
            }
        }
    }
    report(12, "survey and verify JSON byte-identical across runs and worker counts", &fails);
}
