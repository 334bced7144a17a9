//! Exponential integral Ei on the real line.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

/// Ei(x) = −PV∫_{−x}^∞ e^{−t}/t dt for real x ≠ 0. Returns −∞ at 0.
pub fn ei(x: f64) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x < -1.0 {
        -e1_continued_fraction(-x)
    } else if x <= 40.0 {
        ei_series(x)
    } else {
        ei_asymptotic(x)
    }
}

/// γ + ln|x| + Σ x^k/(k·k!); used for −1 ≤ x ≤ 40.
fn ei_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..500 {
        term *= x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    EULER_GAMMA + x.abs().ln() + sum
}

/// E1(x) for x > 1 by the modified Lentz continued fraction.
fn e1_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

/// e^x/x · Σ k!/x^k truncated at the smallest term.
fn ei_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..100 {
        let next = term * k as f64 / x;
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < f64::EPSILON * sum {
            break;
        }
    }
    x.exp() / x * sum
}
