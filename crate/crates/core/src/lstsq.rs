//! Dense linear least squares by column-pivoted Householder QR.
//!
//! Columns are scaled to unit norm before factorization, so the rank test
//! `|R_kk| <= RANK_TOL · |R_00|` compares directions rather than magnitudes
//! (a `t²` column and an intercept column differ by ~10⁶ in raw norm).

/// Relative pivot threshold below which remaining columns count as dependent.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Solution {
    pub coefficients: Vec<f64>,
    /// `y − Xβ`, recomputed against the unscaled design.
    pub residuals: Vec<f64>,
    pub sse: f64,
}

/// Columns that could not be given an independent pivot, in pivot order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDeficient {
    pub columns: Vec<usize>,
}

/// Minimizes `‖y − Xβ‖²` where `columns[j]` is column `j` of `X`.
pub fn solve(columns: &[Vec<f64>], y: &[f64]) -> Result<Solution, RankDeficient> {
    let p = columns.len();
    let n = y.len();
    debug_assert!(columns.iter().all(|c| c.len() == n));

    let scale: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let zero: Vec<usize> = (0..p).filter(|&j| !(scale[j] > 0.0 && scale[j].is_finite())).collect();
    if !zero.is_empty() {
        return Err(RankDeficient { columns: zero });
    }
    let mut a: Vec<Vec<f64>> = columns
        .iter()
        .zip(&scale)
        .map(|(c, s)| c.iter().map(|v| v / s).collect())
        .collect();
    let mut b = y.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut r00 = 0.0;

    for k in 0..p {
        let (best, best_norm) = (k..p)
            .map(|j| (j, tail_norm(&a[j], k)))
            // near-ties go to the earlier column, so intercepts pivot before
            // the attribute columns they may duplicate
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 * (1.0 + 1e-12) { x } else { acc });
        if k == 0 {
            r00 = best_norm;
        }
        if best_norm <= RANK_TOL * r00 {
            return Err(RankDeficient {
                columns: perm[k..].to_vec(),
            });
        }
        a.swap(k, best);
        perm.swap(k, best);

        // Householder vector v with v[k] = x[k] + sign(x[k])·‖x‖
        let alpha = if a[k][k] >= 0.0 { -best_norm } else { best_norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(k + 1) {
                reflect(&v, vnorm2, &mut col[k..]);
            }
            reflect(&v, vnorm2, &mut b[k..]);
        }
        a[k][k] = alpha;
        for x in a[k][k + 1..].iter_mut() {
            *x = 0.0;
        }
    }

    // back substitution on R (upper triangle stored column-wise in a)
    let mut z = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for j in i + 1..p {
            s -= a[j][i] * z[j];
        }
        z[i] = s / a[i][i];
    }
    let mut coefficients = vec![0.0; p];
    for (k, &j) in perm.iter().enumerate() {
        coefficients[j] = z[k] / scale[j];
    }

    let residuals: Vec<f64> = (0..n)
        .map(|i| {
            y[i] - columns
                .iter()
                .zip(&coefficients)
                .map(|(c, beta)| c[i] * beta)
                .sum::<f64>()
        })
        .collect();
    let sse = residuals.iter().map(|r| r * r).sum();
    Ok(Solution {
        coefficients,
        residuals,
        sse,
    })
}

fn tail_norm(col: &[f64], from: usize) -> f64 {
    col[from..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn reflect(v: &[f64], vnorm2: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= f * vi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let t: Vec<f64> = (0..6).map(|i| 1200.0 + 100.0 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 - 0.002 * t).collect();
        let sol = solve(&[vec![1.0; 6], t], &y).unwrap();
        assert_relative_eq!(sol.coefficients[0], 3.0, max_relative = 1e-12);
        assert_relative_eq!(sol.coefficients[1], -0.002, max_relative = 1e-12);
        assert!(sol.sse < 1e-24);
    }

    #[test]
    fn least_squares_residual_is_orthogonal() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y = vec![0.0, 1.0, 3.0, 2.0];
        let sol = solve(&[vec![1.0; 4], x.clone()], &y).unwrap();
        // normal equations by hand: slope 0.8, intercept 0.3
        assert_relative_eq!(sol.coefficients[1], 0.8, max_relative = 1e-12);
        assert_relative_eq!(sol.coefficients[0], 0.3, max_relative = 1e-12);
        let dot: f64 = sol.residuals.iter().zip(&x).map(|(r, x)| r * x).sum();
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn constant_column_collinear_with_intercept() {
        let err = solve(&[vec![1.0; 5], vec![0.3; 5], vec![1.0, 2.0, 3.0, 4.0, 6.0]], &[1.0; 5]).unwrap_err();
        assert_eq!(err.columns, vec![1]);
    }

    #[test]
    fn zero_column() {
        let err = solve(&[vec![1.0; 3], vec![0.0; 3]], &[1.0; 3]).unwrap_err();
        assert_eq!(err.columns, vec![1]);
    }

    #[test]
    fn too_few_rows() {
        assert!(solve(&[vec![1.0; 2], vec![1.0, 2.0], vec![1.0, 4.0]], &[1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_planted_coefficients(
            beta in proptest::collection::vec(-5.0..5.0f64, 3),
            xs in proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 8..30),
        ) {
            let c0 = vec![1.0; xs.len()];
            let c1: Vec<f64> = xs.iter().map(|x| x.0).collect();
            let c2: Vec<f64> = xs.iter().map(|x| x.1).collect();
            let y: Vec<f64> = (0..xs.len()).map(|i| beta[0] + beta[1] * c1[i] + beta[2] * c2[i]).collect();
            if let Ok(sol) = solve(&[c0, c1, c2], &y) {
                for (got, want) in sol.coefficients.iter().zip(&beta) {
                    prop_assert!((got - want).abs() < 1e-6);
                }
            }
        }
    }
}
