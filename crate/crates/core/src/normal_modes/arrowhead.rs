//! Eigen-decomposition of real symmetric arrowhead matrices
//!
//! ```text
//!     [ a   zᵀ ]
//!     [ z   D  ]      D = diag(d_1 … d_n)
//! ```
//!
//! Eigenvalues are the roots of the secular function
//! `f(λ) = a − λ − Σ z_j² / (d_j − λ)`, one in each gap between consecutive
//! poles and one beyond either end. Each root is stored as an offset `τ`
//! from its nearest pole so that the differences `d_j − λ` entering the
//! eigenvectors keep full relative accuracy. The coupling vector is then
//! recomputed from the roots (Löwner's formula), which makes the computed
//! eigenvectors numerically orthogonal.

use ndarray::Array2;

/// Eigenpairs sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct ArrowheadEigen {
    pub values: Vec<f64>,
    /// Squared first component of each normalised eigenvector.
    pub head_sq: Vec<f64>,
    /// Eigenvectors as columns, when requested.
    pub vectors: Option<Array2<f64>>,
}

struct Group {
    pole: f64,
    members: Vec<usize>,
    norm: f64,
}

struct Root {
    origin: usize,
    tau: f64,
}

impl Root {
    /// `p_g − λ` with full relative accuracy.
    fn pole_gap(&self, poles: &[f64], g: usize) -> f64 {
        (poles[g] - poles[self.origin]) - self.tau
    }
}

struct Eigvec {
    value: f64,
    head_sq: f64,
    column: Option<Vec<f64>>,
}

pub fn arrowhead_eigen(a: f64, d: &[f64], z: &[f64], want_vectors: bool) -> ArrowheadEigen {
    assert_eq!(d.len(), z.len());
    let n = d.len();
    let dim = n + 1;
    let scale = d
        .iter()
        .chain(z)
        .fold(a.abs(), |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let z_tol = 4.0 * eps * scale;
    let d_tol = 8.0 * eps * scale;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));

    let unit = |i: usize| -> Option<Vec<f64>> {
        want_vectors.then(|| {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            v
        })
    };

    let mut pairs: Vec<Eigvec> = Vec::with_capacity(dim);
    let mut groups: Vec<Group> = Vec::new();
    for &j in &order {
        if z[j].abs() <= z_tol {
            pairs.push(Eigvec {
                value: d[j],
                head_sq: 0.0,
                column: unit(j + 1),
            });
            continue;
        }
        match groups.last_mut() {
            Some(g) if d[j] - g.pole <= d_tol => {
                g.members.push(j);
                g.norm = g.norm.hypot(z[j]);
            }
            _ => groups.push(Group {
                pole: d[j],
                members: vec![j],
                norm: z[j].abs(),
            }),
        }
    }

    // directions within a coincident-pole group that do not touch the system
    for g in &groups {
        if g.members.len() < 2 {
            continue;
        }
        let mut basis: Vec<Vec<f64>> = vec![g.members.iter().map(|&m| z[m] / g.norm).collect()];
        for (k, &m) in g.members.iter().enumerate().skip(1) {
            let mut u = vec![0.0; g.members.len()];
            u[k] = 1.0;
            for b in &basis {
                let proj: f64 = b.iter().zip(&u).map(|(x, y)| x * y).sum();
                u.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            u.iter_mut().for_each(|x| *x /= norm);
            let column = want_vectors.then(|| {
                let mut v = vec![0.0; dim];
                for (c, &mm) in u.iter().zip(&g.members) {
                    v[mm + 1] = *c;
                }
                v
            });
            basis.push(u);
            pairs.push(Eigvec {
                value: d[m],
                head_sq: 0.0,
                column,
            });
        }
    }

    if groups.is_empty() {
        pairs.push(Eigvec {
            value: a,
            head_sq: 1.0,
            column: unit(0),
        });
    } else {
        pairs.extend(solve_reduced(a, &groups, z, dim, want_vectors));
    }

    pairs.sort_by(|x, y| x.value.total_cmp(&y.value));
    let values = pairs.iter().map(|p| p.value).collect();
    let head_sq = pairs.iter().map(|p| p.head_sq).collect();
    let vectors = want_vectors.then(|| {
        let mut m = Array2::zeros((dim, dim));
        for (k, p) in pairs.iter().enumerate() {
            let col = p.column.as_ref().expect("vectors requested");
            for (i, &x) in col.iter().enumerate() {
                m[[i, k]] = x;
            }
        }
        m
    });
    ArrowheadEigen {
        values,
        head_sq,
        vectors,
    }
}

fn solve_reduced(a: f64, groups: &[Group], z: &[f64], dim: usize, want_vectors: bool) -> Vec<Eigvec> {
    let r = groups.len();
    let poles: Vec<f64> = groups.iter().map(|g| g.pole).collect();
    let zeta: Vec<f64> = groups.iter().map(|g| g.norm * g.norm).collect();
    let z_l1: f64 = groups.iter().map(|g| g.norm).sum();
    let z_max = groups.iter().fold(0.0f64, |m, g| m.max(g.norm));

    let mut delta = vec![0.0; r];
    let mut roots = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let (origin, lo, hi) = if i == 0 {
            let lower = (a - z_l1).min(poles[0] - z_max);
            (0, lower - poles[0], 0.0)
        } else if i == r {
            let upper = (a + z_l1).max(poles[r - 1] + z_max);
            (r - 1, 0.0, upper - poles[r - 1])
        } else {
            let gap = poles[i] - poles[i - 1];
            fill_delta(&mut delta, &poles, i - 1);
            let (f_mid, _, _) = secular(a - poles[i - 1], 0.5 * gap, &delta, &zeta);
            if f_mid > 0.0 {
                (i, -0.5 * gap, 0.0)
            } else {
                (i - 1, 0.0, 0.5 * gap)
            }
        };
        fill_delta(&mut delta, &poles, origin);
        let tau = find_root(a - poles[origin], lo, hi, &delta, &zeta);
        roots.push(Root { origin, tau });
    }

    // Löwner: the couplings for which the computed roots are exact
    let mut z_hat = vec![0.0; r];
    for g in 0..r {
        let mut prod = roots[0].pole_gap(&poles, g) * roots[g + 1].pole_gap(&poles, g);
        for h in 0..r {
            if h != g {
                prod *= roots[h + 1].pole_gap(&poles, g) / (poles[g] - poles[h]);
            }
        }
        let zz = -prod;
        z_hat[g] = if zz > 0.0 && zz.is_finite() {
            zz.sqrt()
        } else {
            groups[g].norm
        };
    }

    roots
        .iter()
        .map(|root| {
            let value = poles[root.origin] + root.tau;
            // component on group g is ẑ_g / (λ − p_g)
            let comps: Vec<f64> = (0..r).map(|g| -z_hat[g] / root.pole_gap(&poles, g)).collect();
            let norm_sq = 1.0 + comps.iter().map(|c| c * c).sum::<f64>();
            let column = want_vectors.then(|| {
                let inv = norm_sq.sqrt().recip();
                let mut v = vec![0.0; dim];
                v[0] = inv;
                for (g, grp) in groups.iter().enumerate() {
                    for &m in &grp.members {
                        v[m + 1] = comps[g] * z[m] / grp.norm * inv;
                    }
                }
                v
            });
            Eigvec {
                value,
                head_sq: norm_sq.recip(),
                column,
            }
        })
        .collect()
}

fn fill_delta(delta: &mut [f64], poles: &[f64], origin: usize) {
    let o = poles[origin];
    for (d, p) in delta.iter_mut().zip(poles) {
        *d = p - o;
    }
}

/// `f(o + τ)`, `f'(o + τ)` and the magnitude of the summed terms.
fn secular(a_shift: f64, tau: f64, delta: &[f64], zeta: &[f64]) -> (f64, f64, f64) {
    let mut sum = 0.0;
    let mut dsum = 0.0;
    let mut mag = 0.0;
    for (&dl, &zt) in delta.iter().zip(zeta) {
        let inv = 1.0 / (dl - tau);
        let term = zt * inv;
        sum += term;
        dsum += term * inv;
        mag += term.abs();
    }
    (a_shift - tau - sum, -1.0 - dsum, a_shift.abs() + tau.abs() + mag)
}

/// Root of the decreasing secular function on `(lo, hi)` where
/// `f(lo) > 0 > f(hi)` (endpoints may be poles). Newton steps are used
/// while they stay inside the bracket and reduce |f|; otherwise bisection.
fn find_root(a_shift: f64, mut lo: f64, mut hi: f64, delta: &[f64], zeta: &[f64]) -> f64 {
    let n = delta.len() as f64;
    // outer brackets might start on the wrong side after rounding
    if lo < 0.0 && hi == 0.0 {
        let mut width = -lo;
        while secular(a_shift, lo, delta, zeta).0 <= 0.0 && width < f64::MAX / 4.0 {
            width *= 2.0;
            lo = -width;
        }
    } else if lo == 0.0 && hi > 0.0 {
        let mut width = hi;
        while secular(a_shift, hi, delta, zeta).0 >= 0.0 && width < f64::MAX / 4.0 {
            width *= 2.0;
            hi = width;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    let mut last_f = f64::INFINITY;
    for _ in 0..400 {
        let (f, fp, mag) = secular(a_shift, tau, delta, zeta);
        if f == 0.0 || f.abs() <= 4.0 * n.max(1.0) * f64::EPSILON * mag {
            return tau;
        }
        if f > 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return 0.5 * (lo + hi);
        }
        let newton = tau - f / fp;
        let next = if newton > lo && newton < hi && f.abs() < 0.5 * last_f {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_f = f.abs();
        if next == tau {
            return tau;
        }
        tau = next;
    }
    tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dense(a: f64, d: &[f64], z: &[f64]) -> Array2<f64> {
        let n = d.len() + 1;
        Array2::from_shape_fn((n, n), |(i, j)| match (i, j) {
            (0, 0) => a,
            (0, k) | (k, 0) => z[k - 1],
            (p, q) if p == q => d[p - 1],
            _ => 0.0,
        })
    }

    fn check(a: f64, d: &[f64], z: &[f64]) {
        let e = arrowhead_eigen(a, d, z, true);
        let v = e.vectors.as_ref().unwrap();
        let m = dense(a, d, z);
        let n = m.nrows();
        let gram = v.t().dot(v);
        let scale = m.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((gram[[i, j]] - target).abs() < 1e-12, "gram {i},{j}");
            }
            let col = v.column(i);
            let res = m.dot(&col) - &col * e.values[i];
            assert!(res.iter().all(|x| x.abs() < 1e-11 * scale), "residual col {i}");
            assert_relative_eq!(e.head_sq[i], col[0] * col[0], max_relative = 1e-12, epsilon = 1e-300);
        }
        let total: f64 = e.head_sq.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn two_by_two() {
        let e = arrowhead_eigen(2.0, &[1.0], &[-1.0], false);
        let s5 = 5f64.sqrt();
        assert_relative_eq!(e.values[0], (3.0 - s5) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(e.values[1], (3.0 + s5) / 2.0, max_relative = 1e-14);
        check(2.0, &[1.0], &[-1.0]);
    }

    #[test]
    fn decoupled_and_partially_decoupled() {
        let e = arrowhead_eigen(1.0, &[4.0, 0.25], &[0.0, 0.0], true);
        assert_eq!(e.values, vec![0.25, 1.0, 4.0]);
        assert_eq!(e.head_sq, vec![0.0, 1.0, 0.0]);
        check(1.0, &[4.0, 0.25, 9.0], &[0.0, 0.3, 0.0]);
    }

    #[test]
    fn coincident_poles() {
        check(3.0, &[1.0, 2.0, 2.0, 2.0, 5.0], &[0.5, 0.3, -0.7, 0.2, 1.1]);
    }

    #[test]
    fn singular_counter_term() {
        // a = Σ z²/d makes the matrix singular (free particle)
        let d: Vec<f64> = (1..=60).map(|k| ((k as f64 - 0.5) * 0.1).powi(2)).collect();
        let z: Vec<f64> = d.iter().map(|x| -x.sqrt() * 0.05).collect();
        let a: f64 = z.iter().zip(&d).map(|(z, d)| z * z / d).sum();
        let e = arrowhead_eigen(a, &d, &z, false);
        assert!(e.values[0].abs() < 1e-12 * 36.0);
        check(a, &d, &z);
    }

    #[test]
    fn weak_couplings_near_poles() {
        let d: Vec<f64> = (1..=300).map(|k| (k as f64).powi(2)).collect();
        let z: Vec<f64> = (1..=300).map(|k| 1e-5 * (k as f64).sin()).collect();
        check(150.5, &d, &z);
    }
}
