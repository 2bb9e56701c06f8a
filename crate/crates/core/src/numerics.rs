//! Small numerical kernels shared across the lab: Gauss-Legendre nodes,
//! the odd-integer zeta series, compensated summation and log-log fits.

use std::f64::consts::PI;

use crate::error::{invalid_input, Result};

/// Gauss-Legendre nodes and weights on [-1, 1] (weights sum to 2).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `sum_{k >= 0} (2k+1)^{-m}` for integer `m >= 2`, to machine precision.
///
/// Direct summation of the first terms plus an Euler-Maclaurin tail.
pub fn odd_zeta(m: u32) -> f64 {
    assert!(m >= 2, "series diverges for m < 2");
    let m_f = m as f64;
    let cut = 64usize;
    let mut head = KahanSum::default();
    for k in (0..cut).rev() {
        head.add((2.0 * k as f64 + 1.0).powf(-m_f));
    }
    // tail of f(x) = (2x+1)^{-m} over x >= cut
    let y = 2.0 * cut as f64 + 1.0;
    let integral = y.powf(1.0 - m_f) / (2.0 * (m_f - 1.0));
    let mut tail = integral + 0.5 * y.powf(-m_f);
    // Bernoulli numbers B_2, B_4, ..., B_12
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let mut fact = 1.0;
    for (j, b) in B.iter().enumerate() {
        let order = 2 * j + 1; // derivative order 2j-1 for the 2j-th Bernoulli number
        fact *= if j == 0 { 2.0 } else { ((2 * j + 1) * (2 * j + 2)) as f64 };
        // f^{(r)}(x) = (-2)^r m (m+1) ... (m+r-1) (2x+1)^{-m-r}
        let mut rising = 1.0;
        for i in 0..order {
            rising *= m_f + i as f64;
        }
        let deriv = -(2f64.powi(order as i32)) * rising * y.powf(-m_f - order as f64);
        tail -= b / fact * deriv;
    }
    head.sum() + tail
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn ksum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().sum()
}

/// Least-squares line through `(ln t, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Fits `ln value = slope * ln t + intercept`. Needs at least three points,
/// all coordinates strictly positive.
pub fn fit_decay_slope(series: &[(f64, f64)]) -> Result<LogLogFit> {
    if series.len() < 3 {
        return Err(invalid_input(format!(
            "slope fit needs at least 3 points, got {}",
            series.len()
        )));
    }
    if let Some(&(t, v)) = series
        .iter()
        .find(|(t, v)| !(*t > 0.0 && *v > 0.0) || !t.is_finite() || !v.is_finite())
    {
        return Err(invalid_input(format!(
            "slope fit needs positive finite points, got ({t}, {v})"
        )));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = ksum(pts.iter().map(|p| p.0)) / n;
    let my = ksum(pts.iter().map(|p| p.1)) / n;
    let sxx = ksum(pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)));
    let sxy = ksum(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)));
    if sxx == 0.0 {
        return Err(invalid_input("slope fit needs at least two distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = pts
        .iter()
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    Ok(LogLogFit {
        slope,
        intercept,
        max_residual,
    })
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Hölder conjugate exponent; `p = 1` maps to infinity and vice versa.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `1/p - 1/q` with `1/inf = 0`.
pub fn index_gap(p: f64, q: f64) -> f64 {
    recip(p) - recip(q)
}

pub(crate) fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// `x^e` with the convention `0^0 = 1` used by the weak-type suprema.
pub(crate) fn pow0(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}
