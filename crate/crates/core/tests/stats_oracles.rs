#![allow(clippy::needless_range_loop)]

//! Regression and ANOVA checked against independent routes: normal
//! equations solved by Gaussian elimination, nested-model RSS differences
//! and closed-form 2^3 factorial contrasts.

use fragnet_core::stats::regression::design_columns;
use fragnet_core::stats::{anova, fit_ols, Response};
use fragnet_core::RunResult;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn row(d: f64, s: f64, w: f64, y: f64) -> RunResult {
    RunResult {
        sigma_d: d,
        sigma_rs: s,
        sigma_rw: w,
        run_index: 0,
        seed: 0,
        cd: y,
        spl: Some(y),
        edge_count: 0,
        component_count: 1,
        wall_ms: 0,
        failed: false,
    }
}

/// Solves `(X^T X) b = X^T y` by Gaussian elimination with partial pivoting.
fn normal_equations(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = cols.len();
    let mut m = vec![vec![0.0; p + 1]; p];
    for i in 0..p {
        for j in 0..p {
            m[i][j] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
        }
        m[i][p] = cols[i].iter().zip(y).map(|(a, b)| a * b).sum();
    }
    for k in 0..p {
        let piv = (k..p).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
        m.swap(k, piv);
        for i in (k + 1)..p {
            let f = m[i][k] / m[k][k];
            for j in k..=p {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut b = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = ((i + 1)..p).map(|j| m[i][j] * b[j]).sum();
        b[i] = (m[i][p] - s) / m[i][i];
    }
    b
}

fn rss(cols: &[Vec<f64>], y: &[f64]) -> f64 {
    let b = normal_equations(cols, y);
    (0..y.len())
        .map(|r| {
            let fit: f64 = cols.iter().zip(&b).map(|(c, bi)| c[r] * bi).sum();
            (y[r] - fit) * (y[r] - fit)
        })
        .sum()
}

fn noisy_table(n: usize, seed: u64) -> Vec<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let pick = |rng: &mut ChaCha8Rng| rng.random_range(0..6) as f64 * 0.1;
            let (d, s, w) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let e: f64 = StandardNormal.sample(&mut rng);
            row(d, s, w, 1.8 + 3.0 * d + 2.9 * s - 2.7 * w - 9.0 * d * s + 3.6 * d * w + 3.9 * s * w + 0.4 * e)
        })
        .collect()
}

#[test]
fn noise_free_coefficients_recovered() {
    let vals = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let mut rows = Vec::new();
    for d in vals {
        for s in vals {
            for w in vals {
                rows.push(row(d, s, w, 2.0 + 3.0 * d - w));
            }
        }
    }
    let fit = fit_ols(&rows, Response::Cd).unwrap();
    for (got, want) in fit.coefficients.iter().zip([2.0, 3.0, 0.0, -1.0, 0.0, 0.0, 0.0]) {
        assert!((got - want).abs() < 1e-9, "{:?}", fit.coefficients);
    }
}

#[test]
fn twenty_row_table_matches_normal_equations() {
    let rows = noisy_table(20, 1);
    let fit = fit_ols(&rows, Response::Cd).unwrap();
    let refs: Vec<&RunResult> = rows.iter().collect();
    let y: Vec<f64> = rows.iter().map(|r| r.cd).collect();
    let oracle = normal_equations(&design_columns(&refs), &y);
    for (got, want) in fit.coefficients.iter().zip(&oracle) {
        assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "{got} vs {want}");
    }
}

#[test]
fn sequential_ss_equal_nested_rss_drops() {
    let rows = noisy_table(300, 2);
    let table = anova(&rows, Response::Cd).unwrap();
    let refs: Vec<&RunResult> = rows.iter().collect();
    let y: Vec<f64> = rows.iter().map(|r| r.cd).collect();
    let cols = design_columns(&refs);
    for k in 1..7 {
        let drop = rss(&cols[..k], &y) - rss(&cols[..=k], &y);
        let got = table.terms[k - 1].ss;
        assert!((got - drop).abs() < 1e-8 * drop.abs().max(1.0), "term {k}: {got} vs {drop}");
    }
    let term_ss: f64 = table.terms.iter().map(|t| t.ss).sum();
    assert!(((term_ss + table.error.ss) - table.total.ss).abs() < 1e-8 * table.total.ss);
    assert_eq!(table.terms.iter().map(|t| t.df).sum::<usize>() + table.error.df, table.total.df);
    assert_eq!(table.total.df, 299);
    assert!(table.terms.iter().all(|t| t.ss >= 0.0));
}

#[test]
fn residuals_orthogonal_to_design() {
    let rows = noisy_table(500, 3);
    let fit = fit_ols(&rows, Response::Cd).unwrap();
    let refs: Vec<&RunResult> = rows.iter().collect();
    let cols = design_columns(&refs);
    let res: Vec<f64> = rows
        .iter()
        .enumerate()
        .map(|(r, row)| row.cd - cols.iter().zip(&fit.coefficients).map(|(c, b)| c[r] * b).sum::<f64>())
        .collect();
    let res_norm = res.iter().map(|e| e * e).sum::<f64>().sqrt();
    for c in &cols {
        let dot: f64 = c.iter().zip(&res).map(|(a, b)| a * b).sum();
        let c_norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(dot.abs() <= 1e-8 * c_norm * res_norm, "{dot}");
    }
    assert!(fit.rss <= fit.tss + 1e-9);
}

/// Balanced 2^3 design with two replicates: each sequential SS equals the
/// classic contrast formula `N * effect^2 / 4`, with the three-way effect
/// and within-cell scatter landing in the error term.
#[test]
fn hand_worked_factorial_anova() {
    // cell means indexed by (d, s, w) bits, two replicates at mean +- delta
    let means = [1.0, 2.5, 1.5, 4.0, 3.0, 2.0, 6.0, 3.5];
    let delta = [0.2, 0.1, 0.3, 0.25, 0.05, 0.15, 0.4, 0.1];
    let mut rows = Vec::new();
    for cell in 0..8 {
        let (d, s, w) = ((cell >> 2) & 1, (cell >> 1) & 1, cell & 1);
        for sign in [-1.0, 1.0] {
            rows.push(row(d as f64, s as f64, w as f64, means[cell] + sign * delta[cell]));
        }
    }
    let n = rows.len() as f64;
    let sign = |cell: usize, bits: &[usize]| -> f64 {
        bits.iter().map(|&b| if (cell >> b) & 1 == 1 { 1.0 } else { -1.0 }).product()
    };
    let effect = |bits: &[usize]| (0..8).map(|c| sign(c, bits) * means[c]).sum::<f64>() / 4.0;
    let ss = |bits: &[usize]| n * effect(bits).powi(2) / 4.0;
    // bit 2 = d, bit 1 = s, bit 0 = w; order d, s, w, ds, dw, sw
    let expected = [ss(&[2]), ss(&[1]), ss(&[0]), ss(&[2, 1]), ss(&[2, 0]), ss(&[1, 0])];
    let within: f64 = delta.iter().map(|d| 2.0 * d * d).sum();
    let expected_error = within + ss(&[2, 1, 0]);

    let table = anova(&rows, Response::Cd).unwrap();
    for (t, want) in table.terms.iter().zip(expected) {
        assert!((t.ss - want).abs() < 1e-9, "{}: {} vs {}", t.term, t.ss, want);
    }
    assert!((table.error.ss - expected_error).abs() < 1e-9);
    assert_eq!(table.error.df, 9);
    assert_eq!(table.total.df, 15);
}

#[test]
fn row_order_does_not_matter() {
    let rows = noisy_table(200, 4);
    let mut shuffled = rows.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for i in (1..shuffled.len()).rev() {
        let j = rng.random_range(0..=i);
        shuffled.swap(i, j);
    }
    let (a, b) = (anova(&rows, Response::Cd).unwrap(), anova(&shuffled, Response::Cd).unwrap());
    for (x, y) in a.terms.iter().zip(&b.terms) {
        assert!((x.ss - y.ss).abs() < 1e-9 * x.ss.max(1.0));
    }
    let (fa, fb) = (fit_ols(&rows, Response::Cd).unwrap(), fit_ols(&shuffled, Response::Cd).unwrap());
    for (x, y) in fa.coefficients.iter().zip(&fb.coefficients) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn spl_exclusions_do_not_touch_cd_fit() {
    let rows = noisy_table(100, 5);
    let mut holes = rows.clone();
    for r in holes.iter_mut().step_by(7) {
        r.spl = None;
    }
    assert_eq!(fit_ols(&rows, Response::Cd).unwrap(), fit_ols(&holes, Response::Cd).unwrap());
    let spl = fit_ols(&holes, Response::Spl).unwrap();
    assert_eq!(spl.n_excluded, 15);
    assert_eq!(spl.n_used + spl.n_excluded, 100);
}

#[test]
fn null_p_values_are_calibrated() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let trials = 200;
    let mut below = [0usize; 6];
    for _ in 0..trials {
        let rows: Vec<RunResult> = (0..1000)
            .map(|_| {
                let pick = |rng: &mut ChaCha8Rng| rng.random_range(0..6) as f64 * 0.1;
                let (d, s, w) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
                row(d, s, w, StandardNormal.sample(&mut rng))
            })
            .collect();
        let t = anova(&rows, Response::Cd).unwrap();
        for (k, term) in t.terms.iter().enumerate() {
            assert!((0.0..=1.0).contains(&term.p));
            below[k] += (term.p < 0.05) as usize;
        }
    }
    for (k, count) in below.iter().enumerate() {
        let frac = *count as f64 / trials as f64;
        assert!((0.01..=0.12).contains(&frac), "term {k}: {frac}");
    }
}
