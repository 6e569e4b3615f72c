//! Log-gamma, regularized incomplete beta and the F survival function.

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for `z > 0` (Lanczos, g = 7).
pub fn ln_gamma(z: f64) -> f64 {
    if z < 0.5 {
        // reflection
        let pi = core::f64::consts::PI;
        return libm::log(pi / libm::sin(pi * z)) - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (z + 0.5) * libm::log(t) - t + libm::log(x)
}

/// Regularized incomplete beta `I_x(a, b)`. NaN outside the domain.
pub fn inc_beta(x: f64, a: f64, b: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) || a.is_nan() || a <= 0.0 || b.is_nan() || b <= 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - inc_beta(1.0 - x, b, a);
    }
    let ln_front = a * libm::log(x) + b * libm::log1p(-x) - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
    libm::exp(ln_front) * beta_cf(x, a, b) / a
}

// Modified Lentz evaluation of the continued fraction.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    const MAX_ITER: usize = 100_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Upper tail `P(F > f)` of the F distribution with `(d1, d2)` degrees of
/// freedom.
pub fn f_survival(f: f64, d1: f64, d2: f64) -> f64 {
    if f.is_nan() || d1.is_nan() || d1 <= 0.0 || d2.is_nan() || d2 <= 0.0 {
        return f64::NAN;
    }
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    inc_beta(d2 / (d2 + d1 * f), d2 / 2.0, d1 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    // Reference values from scipy.special / scipy.stats.
    #[test]
    fn ln_gamma_reference() {
        for (z, want) in [
            (0.5, 0.572_364_942_924_700_4),
            (1.0, 0.0),
            (5.0, 3.178_053_830_347_945),
            (10.5, 13.940_625_219_403_763),
            (1000.25, 5_906.947_268_271_117),
        ] {
            assert!((ln_gamma(z) - want).abs() < 1e-12 * want.abs().max(1.0), "z={z}");
        }
    }

    #[test]
    fn inc_beta_reference() {
        assert!(close(inc_beta(0.5, 2.0, 3.0), 0.6875, 1e-12));
        assert!(close(inc_beta(0.3, 0.5, 0.5), 0.369_010_119_565_545_36, 1e-12));
        assert!(close(inc_beta(0.9, 10.0, 2.0), 0.697_356_880_200_000_2, 1e-12));
        assert!(close(inc_beta(0.1, 1.0, 1.0), 0.1, 1e-12));
        assert!(inc_beta(0.688, 10796.5, 0.5) < 1e-300);
        assert!(inc_beta(1.5, 1.0, 1.0).is_nan());
    }

    #[test]
    fn f_survival_reference() {
        for (f, d1, d2, want) in [
            (1.0, 1.0, 10.0, 0.340_893_132_302_059_75),
            (3.5, 2.0, 30.0, 0.043_032_141_544_536_655),
            (4.0, 1.0, 1000.0, 0.045_770_346_493_233_79),
            (0.2, 6.0, 50.0, 0.975_246_081_090_723_9),
            (2.0, 3.0, 7.0, 0.202_693_642_486_650_9),
            (30.0, 1.0, 21593.0, 4.368_667_569_180_565e-8),
            (10.0, 6.0, 2000.0, 6.614_818_882_815_896e-11),
            (63.83, 1.0, 21571.0, 1.423_859_318_211_96e-15),
            (0.5, 1.0, 21593.0, 0.479_507_752_922_470_94),
        ] {
            let got = f_survival(f, d1, d2);
            assert!(close(got, want, 1e-9), "F({f}; {d1}, {d2}) = {got}, want {want}");
        }
        assert!(f_survival(9797.94, 1.0, 21593.0) < 1e-300);
        assert_eq!(f_survival(0.0, 1.0, 5.0), 1.0);
        assert_eq!(f_survival(f64::INFINITY, 1.0, 5.0), 0.0);
    }
}
