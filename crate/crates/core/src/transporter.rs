//! Explicit group elements carrying one point of an orbit to another.

use crate::catalog::{ank_params, element, GroupLabel};
use crate::classifier::same_orbit;
use crate::error::Error;
use crate::linalg::{lstsq, null_space};
use crate::sl2::{Mat2, PointAdS};

const MAX_ITER: usize = 200;
const TARGET: f64 = 1e-8;

/// max-entry distance between g·p and q.
pub fn transport_residual(label: GroupLabel, params: &[f64], p: PointAdS, q: PointAdS) -> f64 {
    match element(label, params) {
        Ok(g) => {
            let r = (g.apply(p).m() - q.m()).max_abs();
            if r.is_finite() {
                r
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Parameters g with g·p = q. Fails with `NotSameOrbit` unless `same_orbit` holds.
pub fn transporter(label: GroupLabel, p: PointAdS, q: PointAdS, tol: f64) -> Result<Vec<f64>, Error> {
    if !same_orbit(label, p, q, tol) {
        return Err(Error::NotSameOrbit);
    }
    let seed = seed(label, p, q, tol);
    let r = transport_residual(label, &seed, p, q);
    if r <= 1e-12 {
        return Ok(seed);
    }
    polish(label, p, q, seed)
}

fn ln_ratio(x: f64, y: f64) -> f64 {
    (x / y).ln()
}

fn angle(x: f64, y: f64) -> f64 {
    y.atan2(x)
}

/// Least-squares fill of the parameters in `free`, which must enter g·p affinely
/// once the others are fixed.
fn fill_affine(label: GroupLabel, p: PointAdS, q: PointAdS, mut params: Vec<f64>, free: &[usize]) -> Vec<f64> {
    for &i in free {
        params[i] = 0.0;
    }
    let eval = |x: &[f64]| -> [f64; 4] {
        match element(label, x) {
            Ok(g) => (g.apply(p).m() - q.m()).to_array(),
            Err(_) => [f64::NAN; 4],
        }
    };
    let f0 = eval(&params);
    let cols: Vec<[f64; 4]> = free
        .iter()
        .map(|&i| {
            let mut x = params.clone();
            x[i] = 1.0;
            let f1 = eval(&x);
            [f1[0] - f0[0], f1[1] - f0[1], f1[2] - f0[2], f1[3] - f0[3]]
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..4).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let rhs: Vec<f64> = f0.iter().map(|x| -x).collect();
    let sol = lstsq(&rows, &rhs);
    for (k, &i) in free.iter().enumerate() {
        params[i] = sol[k];
    }
    params
}

/// Closed-form starting point; exact on every branch up to roundoff.
fn seed(label: GroupLabel, p: PointAdS, q: PointAdS, tol: f64) -> Vec<f64> {
    use GroupLabel::*;
    let (m, n) = (p.m(), q.m());
    let (a, b, c, d) = (m.a11, m.a12, m.a21, m.a22);
    let (a2, b2, c2, d2) = (n.a11, n.a12, n.a21, n.a22);
    let z = |x: f64| x.abs() <= tol;
    match label {
        AxK => {
            // rows rotate by K_{-u} and scale by e^{±t}
            let (pr, qr, sign) = if m.row1()[0].hypot(m.row1()[1]) >= m.row2()[0].hypot(m.row2()[1]) {
                (m.row1(), n.row1(), 1.0)
            } else {
                (m.row2(), n.row2(), -1.0)
            };
            let t = sign * ln_ratio(qr[0].hypot(qr[1]), pr[0].hypot(pr[1]));
            let u = angle(qr[0], qr[1]) - angle(pr[0], pr[1]);
            vec![t, u]
        }
        NxK => {
            let u = angle(c2, d2) - angle(c, d);
            let pk = m * crate::sl2::k_t(-u);
            let r2 = pk.row2();
            let dr = [n.a11 - pk.a11, n.a12 - pk.a12];
            let t = (dr[0] * r2[0] + dr[1] * r2[1]) / (r2[0] * r2[0] + r2[1] * r2[1]);
            vec![t, u]
        }
        KxK => {
            // rotation part turns by t − u, reflection part by t + u
            let rot = |x: Mat2| (0.5 * (x.a11 + x.a22), 0.5 * (x.a21 - x.a12));
            let refl = |x: Mat2| (0.5 * (x.a11 - x.a22), 0.5 * (x.a21 + x.a12));
            let (rp, rq) = (rot(m), rot(n));
            let (fp, fq) = (refl(m), refl(n));
            let diff = angle(rq.0, rq.1) - angle(rp.0, rp.1);
            let sum = if fp.0.hypot(fp.1) <= tol { diff } else { angle(fq.0, fq.1) - angle(fp.0, fp.1) };
            vec![0.5 * (sum + diff), 0.5 * (sum - diff)]
        }
        AffxI | GFK => {
            let t = ln_ratio(c.hypot(d), c2.hypot(d2));
            fill_affine(label, p, q, vec![t, 0.0], &[1])
        }
        AxA => {
            let x = if a.abs() >= d.abs() {
                if z(a) { 0.0 } else { ln_ratio(a2, a) }
            } else {
                -ln_ratio(d2, d)
            };
            let y = if b.abs() >= c.abs() {
                if z(b) { 0.0 } else { ln_ratio(b2, b) }
            } else {
                -ln_ratio(c2, c)
            };
            vec![0.5 * (x + y), 0.5 * (y - x)]
        }
        NxN => {
            if z(c) {
                vec![a * (b2 - b), 0.0]
            } else {
                vec![(a2 - a) / c, (d - d2) / c]
            }
        }
        AxN => {
            if a.abs() >= c.abs() {
                let t = ln_ratio(a2, a);
                vec![t, (b - (-t).exp() * b2) / a]
            } else {
                let t = -ln_ratio(c2, c);
                vec![t, (d - t.exp() * d2) / c]
            }
        }
        AffxA => {
            let (l1, l2) = (if z(c) { None } else { Some(ln_ratio(c2, c)) }, if z(d) { None } else { Some(ln_ratio(d2, d)) });
            let (t, u) = match (l1, l2) {
                (Some(l1), Some(l2)) => (-0.5 * (l1 + l2), 0.5 * (l2 - l1)),
                (None, Some(l2)) => (-l2, 0.0),
                (Some(l1), None) => (-l1, 0.0),
                (None, None) => (0.0, 0.0),
            };
            fill_affine(label, p, q, vec![t, 0.0, u], &[1])
        }
        AffxN => printed_affxn(p, q, tol).to_vec(),
        AffxAff => printed_affxaff(p, q, tol).to_vec(),
        DiagAff => {
            if z(c) {
                if z(d - a) {
                    let t = if z(b) { 0.0 } else { 0.5 * ln_ratio(b2, b) };
                    vec![t, 0.0]
                } else {
                    vec![0.0, (b2 - b) / (d - a)]
                }
            } else {
                // F_{t,s} = A_t N_σ with σ = s e^{-t}
                let t = 0.5 * ln_ratio(c, c2);
                let sigma = (a2 - a) / c;
                vec![t, sigma * t.exp()]
            }
        }
        DiagSL2 => diag_sl2_seed(m, n, tol),
        GFN => {
            let t = if z(c) { ln_ratio(d, d2) } else { ln_ratio(c, c2) };
            fill_affine(label, p, q, vec![t, 0.0], &[1])
        }
        GFA => {
            let t = if z(c) { 0.0 } else { 0.5 * ln_ratio(c, c2) };
            fill_affine(label, p, q, vec![t, 0.0], &[1])
        }
        GFF => {
            if z(c) {
                vec![0.0, (b2 - b) / d, 0.0]
            } else {
                let t = 0.5 * ln_ratio(c, c2);
                let (sigma, tau) = ((a2 - a) / c, (d - d2) / c);
                vec![t, sigma * t.exp(), tau * t.exp()]
            }
        }
    }
}

/// The explicit Aff×N solve: (t, s, u).
pub fn printed_affxn(p: PointAdS, q: PointAdS, tol: f64) -> [f64; 3] {
    let (m, n) = (p.m(), q.m());
    if m.a21.abs() <= tol {
        let t = (n.a11 / m.a11).ln();
        return [t, m.a11 * n.a12 - n.a11 * m.a12, 0.0];
    }
    let (p11, p21, p22) = (m.a11, m.a21, m.a22);
    let (q11, q21, q22) = (n.a11, n.a21, n.a22);
    let t = (p21 / q21).ln();
    let s = (q11 * q21 - p11 * p21) / (p21 * q21);
    let u = (p22 * q21 - q22 * p21) / (p21 * q21);
    [t, s, u]
}

/// The explicit Aff×Aff solve with t′ = 0: (t, s, t′, s′).
pub fn printed_affxaff(p: PointAdS, q: PointAdS, tol: f64) -> [f64; 4] {
    let (m, n) = (p.m(), q.m());
    if m.a21.abs() <= tol {
        let t = (n.a11 / m.a11).ln();
        return [t, m.a11 * n.a12 - n.a11 * m.a12, 0.0, 0.0];
    }
    let (x, z, w) = (m.a11, m.a21, m.a22);
    let (x2, z2, w2) = (n.a11, n.a21, n.a22);
    let t = (z / z2).ln();
    let s = (x2 * z2 - x * z) / (z * z2);
    let s2 = (w * z2 - w2 * z) / (z * z2);
    [t, s, 0.0, s2]
}

/// Conjugator g with g p g⁻¹ = q from the linear system g p = q g.
fn diag_sl2_seed(p: Mat2, q: Mat2, tol: f64) -> Vec<f64> {
    if (p - q).max_abs() <= tol {
        return vec![0.0; 3];
    }
    // unknown g = (g11, g12, g21, g22)
    let rows = vec![
        vec![p.a11 - q.a11, p.a21, -q.a12, 0.0],
        vec![p.a12, p.a22 - q.a11, 0.0, -q.a12],
        vec![-q.a21, 0.0, p.a11 - q.a22, p.a21],
        vec![0.0, -q.a21, p.a12, p.a22 - q.a22],
    ];
    let ns = null_space(&rows, 1e-10);
    let basis: Vec<Mat2> = ns.iter().map(|v| Mat2::new(v[0], v[1], v[2], v[3])).collect();
    let g = match basis.len() {
        0 => return vec![0.0; 3],
        1 => basis[0],
        _ => {
            // maximize det over the unit circle of the first two kernel vectors
            let (u, v) = (basis[0], basis[1]);
            let h = |x: Mat2, y: Mat2| 0.5 * ((x + y).det() - x.det() - y.det());
            let (fa, fb, fc) = (u.det(), h(u, v), v.det());
            let th = 0.5 * (2.0 * fb).atan2(fa - fc);
            let cand = [th, th + std::f64::consts::FRAC_PI_2];
            let best = cand
                .iter()
                .map(|&t| u.scale(t.cos()) + v.scale(t.sin()))
                .max_by(|x, y| x.det().total_cmp(&y.det()))
                .unwrap();
            best
        }
    };
    let det = g.det();
    if det <= 0.0 {
        return vec![0.0; 3];
    }
    ank_params(g.scale(1.0 / det.sqrt())).to_vec()
}

/// Damped Gauss–Newton on the full parameter vector with a finite-difference Jacobian.
fn polish(label: GroupLabel, p: PointAdS, q: PointAdS, start: Vec<f64>) -> Result<Vec<f64>, Error> {
    let resid = |x: &[f64]| -> Option<[f64; 4]> {
        let g = element(label, x).ok()?;
        let r = (g.apply(p).m() - q.m()).to_array();
        r.iter().all(|v| v.is_finite()).then_some(r)
    };
    let norm = |r: &[f64; 4]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut x: Vec<f64> = start.iter().map(|v| if v.is_finite() { *v } else { 0.0 }).collect();
    let mut r = match resid(&x) {
        Some(r) => r,
        None => {
            x.iter_mut().for_each(|v| *v = 0.0);
            resid(&x).ok_or(Error::SolveFailed { residual: f64::INFINITY, iterations: 0 })?
        }
    };
    let n = x.len();
    for it in 0..MAX_ITER {
        if norm(&r) <= 1e-13 {
            return Ok(x);
        }
        let mut jac = vec![vec![0.0; n]; 4];
        for j in 0..n {
            let h = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += h;
            let mut xm = x.clone();
            xm[j] -= h;
            let (Some(rp), Some(rm)) = (resid(&xp), resid(&xm)) else {
                return Err(Error::SolveFailed { residual: norm(&r), iterations: it });
            };
            for i in 0..4 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let step = lstsq(&jac, &r.map(|v| -v));
        let mut lam = 1.0;
        let mut improved = false;
        while lam > 1e-6 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + lam * b).collect();
            if let Some(rt) = resid(&trial) {
                if norm(&rt) < norm(&r) {
                    x = trial;
                    r = rt;
                    improved = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let res = norm(&r);
    if res <= TARGET {
        Ok(x)
    } else {
        Err(Error::SolveFailed { residual: res, iterations: MAX_ITER })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::spec;
    use crate::engine::act;
    use crate::sl2::{sample_rng, sample_with, SampleRanges};
    use rand::Rng;

    #[test]
    fn round_trips_on_random_pairs() {
        for label in GroupLabel::ALL {
            let k = spec(label).param_count;
            for i in 0..100u64 {
                let mut rng = sample_rng(5, i);
                let p = sample_with(&mut rng, SampleRanges::default());
                let g: Vec<f64> = (0..k).map(|_| rng.random_range(-1.5..1.5)).collect();
                let q = act(&element(label, &g).unwrap(), p);
                let h = transporter(label, p, q, 1e-7).unwrap_or_else(|e| panic!("{label} {e} at {}", p.m()));
                assert!(transport_residual(label, &h, p, q) <= 1e-8, "{label}");
            }
        }
    }

    #[test]
    fn round_trips_on_branch_strata() {
        let strata = [
            Mat2::I, -Mat2::I, Mat2::J, -Mat2::J,
            Mat2::I + Mat2::E12, -Mat2::I + Mat2::E12, Mat2::I - Mat2::E21, -Mat2::I + Mat2::E21,
            Mat2::new(2.0, 1.0, 0.0, 0.5), Mat2::new(0.0, 1.0, -1.0, 3.0), Mat2::new(3.0, 0.0, 1.0, 1.0 / 3.0),
            Mat2::new(-0.5, 2.0, 0.0, -2.0),
        ];
        for label in GroupLabel::ALL {
            let k = spec(label).param_count;
            for (i, m) in strata.iter().enumerate() {
                let p = PointAdS::new_unchecked(*m);
                let mut rng = sample_rng(21, i as u64);
                let g: Vec<f64> = (0..k).map(|_| rng.random_range(-1.5..1.5)).collect();
                let q = act(&element(label, &g).unwrap(), p);
                let h = transporter(label, p, q, 1e-7).unwrap_or_else(|e| panic!("{label} {e} at {m}"));
                assert!(transport_residual(label, &h, p, q) <= 1e-8, "{label} at {m}");
            }
        }
    }

    #[test]
    fn closed_form_seeds_are_exact() {
        for label in GroupLabel::ALL {
            let k = spec(label).param_count;
            let mut worst = 0.0f64;
            for i in 0..200u64 {
                let mut rng = sample_rng(9, i);
                let p = sample_with(&mut rng, SampleRanges::default());
                let g: Vec<f64> = (0..k).map(|_| rng.random_range(-1.5..1.5)).collect();
                let q = act(&element(label, &g).unwrap(), p);
                worst = worst.max(transport_residual(label, &seed(label, p, q, 1e-9), p, q));
            }
            assert!(worst < 1e-9, "{label}: {worst:e}");
        }
    }

    #[test]
    fn identity_and_rejection() {
        for label in GroupLabel::ALL {
            let p = PointAdS::new_unchecked(Mat2::new(2.0, 1.0, 3.0, 2.0));
            let h = transporter(label, p, p, 1e-9).unwrap();
            assert!(h.iter().all(|x| x.abs() < 1e-9) || transport_residual(label, &h, p, p) < 1e-12);
        }
        let j = PointAdS::new_unchecked(Mat2::J);
        assert!(matches!(transporter(GroupLabel::AxA, PointAdS::IDENTITY, j, 1e-9), Err(Error::NotSameOrbit)));
    }

    #[test]
    fn printed_affxn_matches_the_solve() {
        let p = PointAdS::new_unchecked(Mat2::new(2.0, 1.0, 3.0, 2.0));
        let g = [0.4, -1.2, 0.9];
        let q = act(&element(GroupLabel::AffxN, &g).unwrap(), p);
        let h = printed_affxn(p, q, 1e-9);
        for (x, y) in h.iter().zip(g) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
