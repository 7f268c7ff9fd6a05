//! Quadrature helpers: global adaptive Gauss–Kronrod and composite
//! Newton–Cotes weights on uniform grids.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub segments: usize,
}

/// Integrates `f` over `[a, b]` by repeatedly bisecting the segment with
/// the largest error estimate until the summed estimate drops below
/// `max(abs_tol, rel_tol·|I|)` or `max_segments` is reached.
pub fn adaptive_gk(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Integral {
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > abs_tol.max(rel_tol * value.abs()) && heap.len() < max_segments {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Integral {
        value,
        error,
        segments: heap.len(),
    }
}

fn wynn_epsilon(sums: &[f64]) -> f64 {
    let mut prev = vec![0.0; sums.len() + 1];
    let mut cur = sums.to_vec();
    let mut best = *sums.last().unwrap_or(&0.0);
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                return cur[i + 1];
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        col += 1;
        if col % 2 == 0 {
            best = *next.last().unwrap();
        }
        prev = cur;
        cur = next;
    }
    best
}

/// `∫_0^∞ f(ω) cos(ωt) dω` for `f` decaying at large `ω`; `scale` is a
/// typical frequency of `f`.
///
/// At `t = 0` the half-line is mapped to `(0, π/2)` by `ω = scale·tan θ`.
/// Otherwise the integral is split at the zeros of `sin(ωt)` and the
/// alternating partial sums are extrapolated with Wynn's epsilon algorithm.
pub fn cosine_transform(
    f: impl Fn(f64) -> f64,
    t: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Integral {
    if t == 0.0 {
        let g = |theta: f64| {
            let (sin, cos) = theta.sin_cos();
            f(scale * sin / cos) * scale / (cos * cos)
        };
        return adaptive_gk(g, 0.0, std::f64::consts::FRAC_PI_2, abs_tol, rel_tol, 4000);
    }
    let t = t.abs();
    let g = |w: f64| f(w) * (w * t).cos();
    let half = std::f64::consts::PI / t;
    let mut sums = Vec::new();
    let mut total = 0.0;
    let mut segments = 0;
    let mut last = f64::NAN;
    let mut settled = 0;
    for k in 0..400 {
        let piece = adaptive_gk(g, k as f64 * half, (k + 1) as f64 * half, 0.1 * abs_tol, 0.1 * rel_tol, 400);
        segments += piece.segments;
        total += piece.value;
        sums.push(total);
        if sums.len() < 6 {
            continue;
        }
        let tail = &sums[sums.len().saturating_sub(40)..];
        let est = wynn_epsilon(tail);
        let err = (est - last).abs();
        last = est;
        if err <= abs_tol.max(rel_tol * est.abs()) {
            settled += 1;
            if settled == 2 {
                return Integral {
                    value: est,
                    error: err,
                    segments,
                };
            }
        } else {
            settled = 0;
        }
    }
    Integral {
        value: last,
        error: f64::NAN,
        segments,
    }
}

/// Weights of a composite rule over `n` uniform intervals of width `h`.
///
/// Even `n` uses Simpson's rule; odd `n ≥ 3` closes with a 3/8 panel on
/// the last three intervals. For `n = 1` the rule uses the node beyond
/// the interval, `(5, 8, -1)·h/12`, so the returned vector has three
/// entries. For `n = 0` the integral is empty.
pub fn uniform_weights(n: usize, h: f64) -> Vec<f64> {
    match n {
        0 => vec![0.0],
        1 => vec![5.0 * h / 12.0, 8.0 * h / 12.0, -h / 12.0],
        _ => {
            let mut w = vec![0.0; n + 1];
            let simpson_end = if n.is_multiple_of(2) { n } else { n - 3 };
            for k in (0..simpson_end).step_by(2) {
                w[k] += h / 3.0;
                w[k + 1] += 4.0 * h / 3.0;
                w[k + 2] += h / 3.0;
            }
            if n % 2 == 1 {
                let e = n - 3;
                for (j, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                    w[e + j] += 3.0 * h * c / 8.0;
                }
            }
            w
        }
    }
}

/// `∫_0^{n h} f` from samples `f(k h)`; `values` must hold at least
/// `uniform_weights(n, h).len()` entries.
pub fn integrate_uniform(values: &[f64], n: usize, h: f64) -> f64 {
    uniform_weights(n, h)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}

/// Running integrals `∫_0^{k h} f` for `k = 0..values.len()`, each equal to
/// `integrate_uniform(values, k, h)`.
pub fn cumulative_uniform(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            out[1] = 0.5 * h * (values[0] + values[1]);
        }
        return out;
    }
    let f = values;
    out[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
    for k in (2..n).step_by(2) {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    for k in (3..n).step_by(2) {
        out[k] = out[k - 3] + 3.0 * h / 8.0 * (f[k - 3] + 3.0 * f[k - 2] + 3.0 * f[k - 1] + f[k]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk_polynomial_and_smooth() {
        let r = adaptive_gk(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, 1e-14, 1e-14, 100);
        assert_relative_eq!(r.value, 64.0 / 6.0 - 6.0, max_relative = 1e-13);
        let r = adaptive_gk(|x| (-x * x).exp(), -10.0, 10.0, 1e-13, 1e-13, 200);
        assert_relative_eq!(r.value, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn cosine_transform_of_lorentzian() {
        // ∫_0^∞ cos(ωt)/(1 + ω²) dω = (π/2) e^{-t}
        for &t in &[0.0, 0.01, 0.1, 1.0, 5.0, 20.0] {
            let r = cosine_transform(|w| 1.0 / (1.0 + w * w), t, 1.0, 1e-14, 1e-13);
            let exact = std::f64::consts::FRAC_PI_2 * (-t).exp();
            assert!((r.value - exact).abs() < 1e-11, "t={t}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn gk_endpoint_singularity() {
        let r = adaptive_gk(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10, 500);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn uniform_rules_exact_for_cubics() {
        let h = 0.1;
        let f = |x: f64| 2.0 * x.powi(3) - x * x + 0.5;
        let exact = |b: f64| 0.5 * b.powi(4) - b.powi(3) / 3.0 + 0.5 * b;
        let samples: Vec<f64> = (0..12).map(|k| f(k as f64 * h)).collect();
        for n in 2..10 {
            assert_relative_eq!(
                integrate_uniform(&samples, n, h),
                exact(n as f64 * h),
                max_relative = 1e-12
            );
        }
        // the one-interval rule is exact for quadratics
        let q = |x: f64| 3.0 * x * x - x + 1.0;
        let s: Vec<f64> = (0..3).map(|k| q(k as f64 * h)).collect();
        assert_relative_eq!(
            integrate_uniform(&s, 1, h),
            h.powi(3) - h * h / 2.0 + h,
            max_relative = 1e-12
        );
    }

    #[test]
    fn cumulative_matches_direct() {
        let h = 0.01;
        let v: Vec<f64> = (0..101).map(|k| (k as f64 * h).cos()).collect();
        let c = cumulative_uniform(&v, h);
        for (k, ck) in c.iter().enumerate() {
            assert!((ck - (k as f64 * h).sin()).abs() < 1e-9);
        }
    }
}
