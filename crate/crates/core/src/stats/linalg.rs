//! Householder QR least squares on a column-major design.

use alloc::vec::Vec;

/// Least-squares solution together with the rotated response `Q^T y`.
///
/// `effects[k]^2` is the reduction in residual sum of squares from adding
/// column `k` after columns `0..k`, which gives sequential sums of squares
/// directly.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub effects: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
}

/// Relative column norm below which a column counts as linearly dependent
/// on the preceding ones.
const RANK_TOL: f64 = 1e-10;

/// Solves `min |X b - y|` for `X` given as columns. On rank deficiency
/// returns the index of the first dependent column.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares, usize> {
    let p = columns.len();
    let n = y.len();
    assert!(columns.iter().all(|c| c.len() == n), "column length mismatch");
    if n < p {
        return Err(n);
    }

    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut qty = y.to_vec();
    let orig_norms: Vec<f64> = columns.iter().map(|c| norm(c)).collect();
    let mut v = Vec::with_capacity(n);

    for k in 0..p {
        let col_norm = norm(&a[k][k..]);
        if orig_norms[k] == 0.0 || col_norm <= RANK_TOL * orig_norms[k] {
            return Err(k);
        }
        let alpha = if a[k][k] > 0.0 { -col_norm } else { col_norm };
        v.clear();
        v.extend_from_slice(&a[k][k..]);
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        for col in a.iter_mut().skip(k + 1) {
            reflect(&v, vnorm2, &mut col[k..]);
        }
        reflect(&v, vnorm2, &mut qty[k..]);
        a[k][k] = alpha;
        a[k][k + 1..].iter_mut().for_each(|x| *x = 0.0);
    }

    // back substitution on R (R[i][j] = a[j][i])
    let mut coef = alloc::vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for j in (i + 1)..p {
            s -= a[j][i] * coef[j];
        }
        coef[i] = s / a[i][i];
    }

    let residuals: Vec<f64> = (0..n)
        .map(|r| y[r] - columns.iter().zip(&coef).map(|(c, b)| c[r] * b).sum::<f64>())
        .collect();
    let rss = residuals.iter().map(|e| e * e).sum();
    Ok(LeastSquares {
        coefficients: coef,
        effects: qty[..p].to_vec(),
        residuals,
        rss,
    })
}

fn norm(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * libm::sqrt(s)
}

fn reflect(v: &[f64], vnorm2: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= f * vi;
    }
}

/// Least-squares polynomial of the given degree; coefficients in ascending
/// powers. Fails with `Err(k)` when fewer than `degree + 1` distinct `x`
/// values make the power column `k` dependent.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>, usize> {
    let columns: Vec<Vec<f64>> = (0..=degree)
        .map(|k| xs.iter().map(|&x| libm::pow(x, k as f64)).collect())
        .collect();
    least_squares(&columns, ys).map(|ls| ls.coefficients)
}

pub fn polyval(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}
