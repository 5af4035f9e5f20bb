//! Small numeric helpers shared across modules.

/// `ln(e^a + e^b)`, exact for `-inf` arguments.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + pairwise_sum(&xs.iter().map(|x| (x - max).exp()).collect::<Vec<_>>()).ln()
}

/// Sum with a fixed binary tree, so the result depends only on the order of
/// `xs` and never on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `ln k!`.
pub fn log_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

pub fn factorial(k: usize) -> f64 {
    (2..=k).map(|j| j as f64).product()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Formats `e^log_value` in scientific notation even past `f64::MAX`.
pub fn format_log_value(log_value: f64) -> String {
    if log_value == f64::NEG_INFINITY {
        return "0".to_string();
    }
    if !log_value.is_finite() {
        return format!("{log_value}");
    }
    let log10 = log_value / std::f64::consts::LN_10;
    if log10 < 300.0 {
        return format!("{:.6e}", log_value.exp());
    }
    let exponent = log10.floor();
    let mantissa = 10f64.powf(log10 - exponent);
    format!("{mantissa:.6}e{exponent:.0}")
}
