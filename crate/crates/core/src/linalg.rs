//! Thin wrappers over nalgebra for the small dense problems used here.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::sl2::{b_matrix, Mat2};

/// Singular data of a 4×k matrix whose columns are the given matrices.
pub struct SpanSvd {
    pub singular: Vec<f64>,
    pub rank: usize,
    /// Orthonormal basis (in R⁴) of the column span, `rank` vectors.
    pub range: Vec<[f64; 4]>,
    /// Orthonormal basis (in Rᵏ) of the kernel.
    pub kernel: Vec<Vec<f64>>,
}

pub fn columns(vs: &[Mat2]) -> DMatrix<f64> {
    DMatrix::from_fn(4, vs.len(), |i, j| vs[j].to_array()[i])
}

/// Rank threshold is `tol·max(σ_max, 1)`.
pub fn span_svd(vs: &[Mat2], tol: f64) -> SpanSvd {
    let k = vs.len();
    if k == 0 {
        return SpanSvd { singular: vec![], rank: 0, range: vec![], kernel: vec![] };
    }
    // Pad to a square-or-tall system so V is always k×k.
    let rows = 4.max(k);
    let mut a = DMatrix::<f64>::zeros(rows, k);
    for (j, v) in vs.iter().enumerate() {
        for (i, x) in v.to_array().iter().enumerate() {
            a[(i, j)] = *x;
        }
    }
    let svd = a.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let thr = tol * smax.max(1.0);
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let mut range = Vec::new();
    let mut kernel = Vec::new();
    for &i in &order {
        if sv[i] > thr {
            let mut col = [0.0; 4];
            for (r, c) in col.iter_mut().enumerate() {
                *c = u[(r, i)];
            }
            range.push(col);
        } else {
            kernel.push((0..k).map(|c| vt[(i, c)]).collect());
        }
    }
    let mut singular: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    singular.truncate(k);
    SpanSvd { rank: range.len(), singular, range, kernel }
}

/// Restriction of the split form to a basis of a subspace that is orthonormal
/// for ½·tr(uᵀv), the inner product in which X and Z have unit length.
/// `basis` is Frobenius-orthonormal, hence the factor 2.
pub fn restricted_gram(basis: &[[f64; 4]]) -> Vec<Vec<f64>> {
    let b = b_matrix();
    let k = basis.len();
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut s = 0.0;
            for r in 0..4 {
                for c in 0..4 {
                    s += basis[i][r] * b[r][c] * basis[j][c];
                }
            }
            g[i][j] = 2.0 * s;
        }
    }
    g
}

pub fn sym_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let k = m.len();
    if k == 0 {
        return vec![];
    }
    let a = DMatrix::from_fn(k, k, |i, j| 0.5 * (m[i][j] + m[j][i]));
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Euclidean residual of projecting `b` onto the span of `cols`.
pub fn lstsq_residual(cols: &[Vec<f64>], b: &[f64]) -> f64 {
    let n = b.len();
    if cols.is_empty() {
        return b.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let a = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let rhs = DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&rhs, 1e-14).expect("svd solve");
    (a * x - rhs).norm()
}

/// Minimum-norm least-squares solution of `a x = b` (row-major `a`).
pub fn lstsq(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let m = DMatrix::from_fn(rows, cols, |i, j| a[i][j]);
    let rhs = DVector::from_column_slice(b);
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd.solve(&rhs, 1e-13 * smax.max(1e-300)).expect("svd solve");
    x.iter().copied().collect()
}

/// Null space of a row-major matrix, threshold `tol·max(σ_max, 1)`.
pub fn null_space(a: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let rows = a.len();
    let cols = a[0].len();
    let padded = rows.max(cols);
    let m = DMatrix::from_fn(padded, cols, |i, j| if i < rows { a[i][j] } else { 0.0 });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    let thr = tol * smax.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= thr)
        .map(|(i, _)| (0..cols).map(|c| vt[(i, c)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ambient_signature_is_split() {
        let b = b_matrix();
        let rows: Vec<Vec<f64>> = b.iter().map(|r| r.to_vec()).collect();
        let ev = sym_eigenvalues(&rows);
        assert_eq!(ev.iter().filter(|x| **x > 0.0).count(), 2);
        assert_eq!(ev.iter().filter(|x| **x < 0.0).count(), 2);
    }

    #[test]
    fn rank_of_dependent_columns() {
        let z = Mat2::new(0.0, -1.0, 1.0, 0.0);
        let s = span_svd(&[z, -z], 1e-9);
        assert_eq!(s.rank, 1);
        assert_eq!(s.kernel.len(), 1);
        let k = &s.kernel[0];
        assert!((k[0] - k[1]).abs() < 1e-12);
    }

    #[test]
    fn residuals() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        assert!(lstsq_residual(&cols, &[2.0, -3.0, 0.0]) < 1e-14);
        assert!((lstsq_residual(&cols, &[0.0, 0.0, 2.0]) - 2.0).abs() < 1e-14);
        let x = lstsq(&[vec![2.0, 0.0], vec![0.0, 4.0]], &[2.0, 2.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 0.5).abs() < 1e-14);
        let ns = null_space(&[vec![1.0, 1.0]], 1e-12);
        assert_eq!(ns.len(), 1);
    }
}
