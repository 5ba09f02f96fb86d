//! Small statistics helpers shared by the pipeline and its tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::matrix::Matrix;

/// Pearson correlation of the row and column coordinates under weights `w`.
/// Returns 0 when either coordinate has no variance.
pub fn pearson_weighted(row_axis: &[f64], col_axis: &[f64], w: &Matrix) -> f64 {
    let total = w.sum();
    if !(total > 0.0) {
        return 0.0;
    }
    let rs = w.row_sums();
    let cs = w.col_sums();
    let mr = row_axis.iter().zip(&rs).map(|(x, p)| x * p).sum::<f64>() / total;
    let mc = col_axis.iter().zip(&cs).map(|(x, p)| x * p).sum::<f64>() / total;
    let vr = row_axis.iter().zip(&rs).map(|(x, p)| (x - mr).powi(2) * p).sum::<f64>() / total;
    let vc = col_axis.iter().zip(&cs).map(|(x, p)| (x - mc).powi(2) * p).sum::<f64>() / total;
    if vr <= 0.0 || vc <= 0.0 {
        return 0.0;
    }
    let mut cov = 0.0;
    for (i, x) in row_axis.iter().enumerate() {
        let dx = x - mr;
        for (j, y) in col_axis.iter().enumerate() {
            cov += dx * (y - mc) * w.get(i, j);
        }
    }
    cov / total / (vr * vc).sqrt()
}

/// Sample Pearson correlation of paired values.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Full width at half maximum of a sampled profile, interpolating linearly
/// at the outermost half-maximum crossings. Returns 0 for an empty or flat-zero
/// profile.
pub fn fwhm(axis: &[f64], values: &[f64]) -> f64 {
    let peak = values.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return 0.0;
    }
    let half = peak / 2.0;
    let first = values.iter().position(|&v| v >= half).unwrap_or(0);
    let last = values.iter().rposition(|&v| v >= half).unwrap_or(0);
    let cross = |a: usize, b: usize| {
        let t = (half - values[a]) / (values[b] - values[a]);
        axis[a] + t * (axis[b] - axis[a])
    };
    let left = if first == 0 { axis[0] } else { cross(first - 1, first) };
    let right = if last + 1 == values.len() {
        axis[last]
    } else {
        cross(last, last + 1)
    };
    (right - left).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson chi-square goodness of fit of `observed` counts against category
/// probabilities. Categories with expected count below `min_expected` are
/// pooled into one bin; observations in zero-probability categories give p = 0.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64], min_expected: f64) -> ChiSquareTest {
    assert_eq!(observed.len(), probabilities.len());
    let n: u64 = observed.iter().sum();
    let total_p: f64 = probabilities.iter().sum();
    let nf = n as f64;
    if observed
        .iter()
        .zip(probabilities)
        .any(|(&o, &p)| o > 0 && p <= 0.0)
    {
        return ChiSquareTest {
            statistic: f64::INFINITY,
            degrees_of_freedom: 0,
            p_value: 0.0,
        };
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probabilities) {
        let e = nf * p / total_p;
        if e <= 0.0 {
            continue;
        }
        if e < min_expected {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 {
        bins.push(pooled);
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map(|d| d.sf(statistic))
            .unwrap_or(0.0)
    };
    ChiSquareTest {
        statistic,
        degrees_of_freedom: dof,
        p_value,
    }
}

/// Fraction of the squared Frobenius norm carried by the leading singular
/// value, σ₁²/Σσ². Equals 1 for a rank-one matrix.
pub fn top_singular_fraction(m: &Matrix) -> f64 {
    let frob2: f64 = m.as_slice().iter().map(|v| v * v).sum();
    if frob2 == 0.0 {
        return 0.0;
    }
    let (rows, cols) = m.shape();
    // Power iteration on MᵀM.
    let mut v: Vec<f64> = (0..cols).map(|j| 1.0 + 0.01 * j as f64).collect();
    let mut u = vec![0.0; rows];
    let mut sigma2 = 0.0;
    for _ in 0..1000 {
        for (i, ui) in u.iter_mut().enumerate() {
            *ui = m.row(i).iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let mut w = vec![0.0; cols];
        for (i, &ui) in u.iter().enumerate() {
            for (wj, a) in w.iter_mut().zip(m.row(i)) {
                *wj += a * ui;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let vnorm2 = v.iter().map(|x| x * x).sum::<f64>();
        let next = norm / vnorm2.sqrt();
        for (vj, wj) in v.iter_mut().zip(&w) {
            *vj = wj / norm;
        }
        let converged = (next - sigma2).abs() <= 1e-15 * next;
        sigma2 = next;
        if converged {
            break;
        }
    }
    // Rayleigh quotient of MᵀM at the converged unit vector.
    let mut mv2 = 0.0;
    for i in 0..rows {
        let s: f64 = m.row(i).iter().zip(&v).map(|(a, b)| a * b).sum();
        mv2 += s * s;
    }
    (mv2 / frob2).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_of_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [2.0, 4.0, 6.0, 8.0];
        assert!((pearson(&xs, &ys) - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        assert!((pearson(&xs, &neg) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_pearson_diagonal() {
        let m = Matrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 });
        let r = pearson_weighted(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &m);
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chi_square_accepts_exact_expectation() {
        let t = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4], 5.0);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.degrees_of_freedom, 3);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_rejects_impossible() {
        let t = chi_square_gof(&[10, 1], &[1.0, 0.0], 5.0);
        assert_eq!(t.p_value, 0.0);
        let delta = chi_square_gof(&[10, 0], &[1.0, 0.0], 5.0);
        assert_eq!(delta.p_value, 1.0);
    }

    #[test]
    fn chi_square_known_value() {
        // χ² = 4 with 1 dof: p = 0.0455.
        let t = chi_square_gof(&[60, 40], &[0.5, 0.5], 5.0);
        assert!((t.statistic - 4.0).abs() < 1e-12);
        assert!((t.p_value - 0.045_500_263_9).abs() < 1e-8);
    }

    #[test]
    fn rank_one_fraction() {
        let m = Matrix::from_fn(4, 5, |i, j| (i + 1) as f64 * (j as f64 + 0.5));
        assert!((top_singular_fraction(&m) - 1.0).abs() < 1e-12);
        let id = Matrix::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.0 });
        assert!((top_singular_fraction(&id) - 0.25).abs() < 1e-9);
    }

    #[test]
    fn fwhm_edges() {
        assert_eq!(fwhm(&[0.0, 1.0], &[0.0, 0.0]), 0.0);
        assert_eq!(fwhm(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]), 1.0);
    }
}
