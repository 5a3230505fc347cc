//! Small statistical helpers shared by experiments and checks.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of `y` on `x`. Needs two distinct abscissae.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept, r2 })
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean, with the unbiased variance.
pub fn std_err(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `counts` against `probs`. Cells with small
/// expected counts are pooled into one so every cell expects at least
/// `min_expected`.
pub fn chi_square(counts: &[u64], probs: &[f64], min_expected: f64) -> ChiSquare {
    assert_eq!(counts.len(), probs.len());
    let total: u64 = counts.iter().sum();
    let total = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * total;
        if e >= min_expected {
            cells.push((c as f64, e));
        } else {
            pool_obs += c as f64;
            pool_exp += e;
        }
    }
    if pool_exp > 0.0 || pool_obs > 0.0 {
        cells.push((pool_obs, pool_exp));
    }
    let statistic: f64 = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else if statistic.is_infinite() {
        0.0
    } else {
        1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(statistic)
    };
    ChiSquare { statistic, dof, p_value }
}

/// Total variation distance between the empirical laws of two samples.
pub fn empirical_tv<T: Ord + Clone>(a: &[T], b: &[T]) -> f64 {
    use std::collections::BTreeMap;
    let mut h: BTreeMap<T, (f64, f64)> = BTreeMap::new();
    for x in a {
        h.entry(x.clone()).or_default().0 += 1.0 / a.len() as f64;
    }
    for x in b {
        h.entry(x.clone()).or_default().1 += 1.0 / b.len() as f64;
    }
    0.5 * h.values().map(|(p, q)| (p - q).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let f = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn chi_square_reference() {
        // 2 degrees of freedom: survival is exp(-x/2).
        let c = chi_square(&[30, 30, 40], &[0.3, 0.4, 0.3], 5.0);
        let x = 0.0 + 100.0 / 40.0 + 100.0 / 30.0;
        assert!((c.statistic - x).abs() < 1e-12);
        assert_eq!(c.dof, 2);
        assert!((c.p_value - (-x / 2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn tv_of_samples() {
        assert_eq!(empirical_tv(&[1, 1, 2, 2], &[1, 1, 2, 2]), 0.0);
        assert_eq!(empirical_tv(&[1, 1], &[2, 2]), 1.0);
        assert!((empirical_tv(&[1, 2], &[1, 1]) - 0.5).abs() < 1e-12);
    }
}
