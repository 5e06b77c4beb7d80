//! Statistical helpers for the Monte Carlo harness: chi-square tail
//! probabilities, exact-binomial confidence bounds, and sample summaries.

/// Lanczos approximation, g = 7, accurate to ~15 digits for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
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
    if x < 0.5 {
        // Reflection formula.
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(a, x) by series expansion.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut n = a;
    for _ in 0..500 {
        n += 1.0;
        term *= x / n;
        sum += term;
        if term.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x) by continued fraction.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
pub fn chi2_sf(stat: f64, dof: f64) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    let a = dof / 2.0;
    let x = stat / 2.0;
    if x < a + 1.0 {
        (1.0 - gamma_p_series(a, x)).clamp(0.0, 1.0)
    } else {
        gamma_q_cf(a, x).clamp(0.0, 1.0)
    }
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// P(X <= x) for X ~ Binomial(n, p).
pub fn binom_cdf(x: u64, n: u64, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if x >= n { 1.0 } else { 0.0 };
    }
    let mut sum = 0.0;
    for i in 0..=x.min(n) {
        let ln_pmf = ln_choose(n as f64, i as f64)
            + i as f64 * p.ln()
            + (n - i) as f64 * (1.0 - p).ln();
        sum += ln_pmf.exp();
    }
    sum.min(1.0)
}

/// One-sided Clopper-Pearson upper confidence bound for a binomial
/// proportion: the largest p with P(X <= x; n, p) >= alpha.
pub fn clopper_pearson_upper(x: u64, n: u64, alpha: f64) -> f64 {
    assert!(n > 0 && alpha > 0.0 && alpha < 1.0);
    if x >= n {
        return 1.0;
    }
    let (mut lo, mut hi) = (x as f64 / n as f64, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binom_cdf(x, n, mid) >= alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sample chi-square homogeneity test over aligned category counts.
/// Cells whose pooled expectation falls below 5 are merged into one bucket.
/// Returns (statistic, degrees of freedom, p-value); dof 0 means the data
/// was too sparse to test and the p-value is reported as 1.
pub fn chi_square_two_sample(obs1: &[u64], obs2: &[u64]) -> (f64, u64, f64) {
    assert_eq!(obs1.len(), obs2.len());
    let r1: u64 = obs1.iter().sum();
    let r2: u64 = obs2.iter().sum();
    let grand = (r1 + r2) as f64;
    if grand == 0.0 {
        return (0.0, 0, 1.0);
    }
    // Split cells into big ones and a merged remainder bucket.
    let mut kept: Vec<(f64, f64)> = Vec::new();
    let (mut rest1, mut rest2) = (0u64, 0u64);
    for (&a, &b) in obs1.iter().zip(obs2) {
        let col = (a + b) as f64;
        let e1 = r1 as f64 * col / grand;
        let e2 = r2 as f64 * col / grand;
        if e1 >= 5.0 && e2 >= 5.0 {
            kept.push((a as f64, b as f64));
        } else {
            rest1 += a;
            rest2 += b;
        }
    }
    if rest1 + rest2 > 0 {
        kept.push((rest1 as f64, rest2 as f64));
    }
    if kept.len() < 2 {
        return (0.0, 0, 1.0);
    }
    let mut stat = 0.0;
    for &(a, b) in &kept {
        let col = a + b;
        let e1 = r1 as f64 * col / grand;
        let e2 = r2 as f64 * col / grand;
        if e1 > 0.0 {
            stat += (a - e1).powi(2) / e1;
        }
        if e2 > 0.0 {
            stat += (b - e2).powi(2) / e2;
        }
    }
    let dof = (kept.len() - 1) as u64;
    (stat, dof, chi2_sf(stat, dof as f64))
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
