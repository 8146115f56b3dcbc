use ads3::catalog::spec;
use ads3::census::census;
use ads3::classifier::{classify, gfn_invariant, orbit_id, same_orbit, OrbitClass};
use ads3::engine::{causal_character, orbit_dimension, stabilizer_algebra};
use ads3::orbit_space::{closure_catalog, finite_space, proper_model_check, quotient_verdict, topology_checks, verify_pair};
use ads3::properness::{certificate, falsify_properness, proper_reason, verify_certificate};
use ads3::reconcile::{documented_discrepancy, stated_claim};
use ads3::suite::{expected_verdict, run_suite, Check, Status, SuiteConfig};
use ads3::transporter::{transport_residual, transporter};
use ads3::{GroupLabel, Mat2, PointAdS};
use serde_json::{json, Value};

use crate::report::{md_table, ConfigEcho, Report};
use crate::{Command, Format, RunConfig};

const FALSIFY_TRIALS: usize = 500;

pub fn run(cfg: &RunConfig) -> Result<Report, String> {
    let mut report = Report::new(echo(cfg));
    match cfg.command {
        Command::Classify => classify_cmd(cfg, &mut report)?,
        Command::OrbitId => orbit_id_cmd(cfg, &mut report)?,
        Command::SameOrbit => same_orbit_cmd(cfg, &mut report)?,
        Command::Survey => survey_cmd(cfg, &mut report),
        Command::Properness => properness_cmd(cfg, &mut report),
        Command::Topology => topology_cmd(cfg, &mut report),
        Command::Tables => tables_cmd(cfg, &mut report),
        Command::Verify => verify_cmd(cfg, &mut report),
    }
    Ok(report)
}

fn echo(cfg: &RunConfig) -> ConfigEcho {
    ConfigEcho {
        command: cfg.command.name(),
        group: cfg.group.map(|g| g.to_string()),
        point: cfg.point.map(|p| p.m().to_array()),
        other: cfg.other.map(|p| p.m().to_array()),
        samples: cfg.samples,
        seed: cfg.seed,
        tol: cfg.tol,
        format: match cfg.format {
            Format::Json => "json",
            Format::Md => "md",
        },
    }
}

fn labels(cfg: &RunConfig) -> Vec<GroupLabel> {
    cfg.group.map(|g| vec![g]).unwrap_or_else(|| GroupLabel::ALL.to_vec())
}

fn classify_cmd(cfg: &RunConfig, report: &mut Report) -> Result<(), String> {
    let (label, p) = (cfg.group()?, cfg.point()?);
    let rec = classify(label, p, cfg.tol);
    let engine = causal_character(label, p, cfg.tol);
    let dimension = orbit_dimension(label, p, cfg.tol);
    let stab = stabilizer_algebra(label, p, cfg.tol).len();
    let agree = engine.as_ref().ok() == Some(&rec.character) && dimension == rec.dimension && stab == rec.stabilizer.dim;
    let stated = stated_claim(label, p, cfg.tol);
    report.push(&json!({
        "record": rec,
        "engine": {
            "character": engine.as_ref().ok(),
            "anomaly": engine.as_ref().err().map(|e| e.to_string()),
            "dimension": dimension,
            "stabilizer_dim": stab,
        },
        "agree": agree,
        "stated": stated,
        "documented_discrepancy": stated.character != rec.character && documented_discrepancy(label, p, cfg.tol),
    }));
    Ok(())
}

fn orbit_id_cmd(cfg: &RunConfig, report: &mut Report) -> Result<(), String> {
    let (label, p) = (cfg.group()?, cfg.point()?);
    let id = orbit_id(label, p, cfg.tol);
    let key = id.key();
    let invariant = (label == GroupLabel::GFN && p.m().a21 != 0.0).then(|| gfn_invariant(p));
    report.push(&json!({ "orbit_id": id, "key": key, "invariant": invariant }));
    Ok(())
}

fn same_orbit_cmd(cfg: &RunConfig, report: &mut Report) -> Result<(), String> {
    let (label, p) = (cfg.group()?, cfg.point()?);
    let q = cfg.other.ok_or("same-orbit needs --other")?;
    let same = same_orbit(label, p, q, cfg.tol);
    let solved = same.then(|| transporter(label, p, q, cfg.tol));
    let (params, residual, error) = match &solved {
        Some(Ok(h)) => (Some(h.clone()), Some(transport_residual(label, h, p, q)), None),
        Some(Err(e)) => (None, None, Some(e.to_string())),
        None => (None, None, None),
    };
    report.push(&json!({
        "same_orbit": same,
        "transporter": params,
        "param_names": spec(label).param_names,
        "residual": residual,
        "error": error,
    }));
    if same {
        let r = residual.unwrap_or(f64::INFINITY);
        report.checks.push(Check::at_most("same-orbit/transporter-residual", r, 1e-8));
    }
    Ok(())
}

fn survey_cmd(cfg: &RunConfig, report: &mut Report) {
    for label in labels(cfg) {
        report.push(&census(label, cfg.samples, cfg.seed, cfg.tol));
    }
}

fn properness_cmd(cfg: &RunConfig, report: &mut Report) {
    for label in labels(cfg) {
        let reason = proper_reason(label);
        let cert = certificate(label);
        let check = cert.as_ref().map(|c| verify_certificate(c, 25, 1e-6));
        let falsify = (reason.is_some() || matches!(label, GroupLabel::AxN | GroupLabel::GFN))
            .then(|| falsify_properness(label, FALSIFY_TRIALS, cfg.seed));
        if let Some(c) = &check {
            report.checks.push(Check::new(format!("properness/{label}/certificate"), c.valid, c.growth.log10() - 6.0));
        }
        if let (Some(_), Some(f)) = (reason, &falsify) {
            report.checks.push(Check::new(format!("properness/{label}/no-escape"), f.events == 0, 0.0 - f.events as f64));
        }
        report.push(&json!({
            "label": label,
            "proper": reason.is_some(),
            "reason": reason,
            "certificate": cert,
            "verification": check,
            "falsify": falsify,
        }));
    }
}

fn invariant_formula(label: GroupLabel) -> Option<&'static str> {
    use GroupLabel::*;
    Some(match label {
        AxK => "p11 p21 + p12 p22",
        NxK => "ln(p21^2 + p22^2)",
        KxK => "p11^2 + p12^2 + p21^2 + p22^2",
        AffxI => "atan2(p22, p21)",
        GFK => "atan2(p22, p21) + ln|(p21, p22)|",
        AxN => "p11 p21",
        GFN => "p21 exp(-p22/p21)",
        _ => return None,
    })
}

fn topology_cmd(cfg: &RunConfig, report: &mut Report) {
    for label in labels(cfg) {
        let verdict = quotient_verdict(label);
        let got = (verdict.hausdorff, verdict.locally_euclidean, verdict.finite, verdict.proper_model);
        report.checks.push(Check::new(format!("topology/{label}/verdict"), got == expected_verdict(label), 0.0));
        let finite = finite_space(label).map(|t| {
            let basis: Vec<Vec<&str>> =
                t.basis.iter().map(|b| b.iter().map(|&i| t.names[i].as_str()).collect()).collect();
            let checks = topology_checks(&t);
            match &checks {
                Ok(r) => {
                    report.checks.push(Check::new(format!("topology/{label}/T0"), r.t0, 0.0));
                    report.checks.push(Check::new(format!("topology/{label}/non-hausdorff"), !r.hausdorff, 0.0));
                }
                Err(_) => report.checks.push(Check::new(format!("topology/{label}/basis"), false, -1.0)),
            }
            json!({
                "points": t.names,
                "ids": t.ids.iter().map(|i| i.key()).collect::<Vec<_>>(),
                "basis": basis,
                "report": checks.as_ref().ok(),
                "error": checks.as_ref().err().map(|e| e.to_string()),
            })
        });
        let closures: Vec<Value> = closure_catalog(label)
            .pairs
            .iter()
            .map(|p| {
                let c = verify_pair(label, p, 25, 1e-6);
                report.checks.push(Check::new(
                    format!("topology/{label}/closure/{}->{}", p.source_name, p.limit_name),
                    c.ok,
                    1e-6 - c.limit_error,
                ));
                json!({ "limit": p.limit_name, "in_closure_of": p.source_name, "sequence": p.sequence, "check": c })
            })
            .collect();
        let model = proper_model_check(label, cfg.samples, cfg.seed);
        if let Some(m) = &model {
            report.checks.push(Check::new(format!("topology/{label}/model-map"), m.monotone, 0.0));
        }
        let invariant = invariant_formula(label).map(|f| {
            let at_j = (label == GroupLabel::GFN).then(|| gfn_invariant(PointAdS::new_unchecked(Mat2::J)));
            json!({ "formula": f, "value_at_J": at_j })
        });
        report.push(&json!({
            "label": label,
            "verdict": verdict,
            "invariant": invariant,
            "finite_space": finite,
            "closures": closures,
            "model": model,
        }));
    }
}

fn tables_cmd(cfg: &RunConfig, report: &mut Report) {
    let mut rows = Vec::new();
    for label in labels(cfg) {
        let s = spec(label);
        let c = census(label, cfg.samples, cfg.seed, cfg.tol);
        let v = quotient_verdict(label);
        let orbits: Vec<String> = c
            .buckets
            .iter()
            .map(|b| {
                let n = if b.class == OrbitClass::Principal || b.ids > 16 { "family".to_string() } else { b.ids.to_string() };
                format!("{:?} {:?} ({n})", b.class, b.character)
            })
            .collect();
        let model = v.proper_model.map(|m| format!("{m:?}")).unwrap_or_else(|| "-".into());
        let properness = match proper_reason(label) {
            Some(r) => format!("proper ({r:?})"),
            None => "not proper".into(),
        };
        rows.push(json!({
            "group": label,
            "elements": s.elements,
            "dim": s.dim,
            "properness": properness,
            "orbits": orbits.join("; "),
            "hausdorff": v.hausdorff,
            "locally_euclidean": v.locally_euclidean,
            "finite": v.finite,
            "model": model,
        }));
    }
    report.md_results = Some(md_table(&rows));
    report.results = rows;
}

fn verify_cmd(cfg: &RunConfig, report: &mut Report) {
    let suite = SuiteConfig { samples: cfg.samples, seed: cfg.seed, tol: cfg.tol, labels: labels(cfg) };
    let checks = run_suite(&suite);
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    report.push(&json!({
        "total": checks.len(),
        "pass": count(Status::Pass),
        "fail": count(Status::Fail),
        "expected_flag": count(Status::ExpectedFlag),
    }));
    report.checks = checks;
}
