//! Statistical primitives: entropy, correlation, multiple-comparison
//! correction, inter-annotator agreement, t-tests, simple regression,
//! LOWESS smoothing and the exact McNemar test.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-9;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard deviation with denominator n.
pub fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Unbiased variance (denominator n − 1).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// A probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::input("empty distribution"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::input("distribution has negative or non-finite mass"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::input(format!("distribution sums to {total}, not 1")));
        }
        Ok(Distribution(probs))
    }

    /// Normalizes non-negative counts.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        let total: f64 = counts.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::input("counts must have positive finite total"));
        }
        Distribution::new(counts.iter().map(|c| c / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }
}

/// Entropy in bits, with 0·log 0 = 0.
pub fn shannon_entropy(d: &Distribution) -> f64 {
    let h: f64 = d
        .probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    // -0.0 for a point mass
    h.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

impl Correlation {
    pub fn r_squared(&self) -> f64 {
        self.r * self.r
    }
}

fn students_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.cdf(-t.abs())).clamp(0.0, 1.0)
}

/// Pearson product-moment correlation with a two-sided p-value from the
/// t distribution with n − 2 degrees of freedom.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::input(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::input("correlation needs at least 3 pairs"));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::undefined("correlation with a zero-variance series"));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if r.abs() == 1.0 {
        0.0
    } else {
        students_t_two_sided(r * (df / (1.0 - r * r)).sqrt(), df)
    };
    Ok(Correlation { r, p, n })
}

/// Holm step-down adjustment, returned in input order.
pub fn holm_bonferroni(p_values: &[f64]) -> Result<Vec<f64>> {
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::input(format!("p-value {p} outside [0, 1]")));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        let scaled = (p_values[i] * (m - rank) as f64).min(1.0);
        running = running.max(scaled);
        adjusted[i] = running;
    }
    Ok(adjusted)
}

/// Items × categories counts of annotator choices, with the same number of
/// annotators on every item.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    rows: Vec<Vec<u32>>,
    raters: u32,
    categories: usize,
}

impl RatingMatrix {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::input("rating matrix has no items"))?;
        let categories = first.len();
        if categories < 2 {
            return Err(Error::input("rating matrix needs at least two categories"));
        }
        let raters: u32 = first.iter().sum();
        if raters < 2 {
            return Err(Error::input("agreement needs at least two raters per item"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != categories {
                return Err(Error::input(format!("item {i} has {} categories, expected {categories}", row.len())));
            }
            let sum: u32 = row.iter().sum();
            if sum != raters {
                return Err(Error::input(format!("item {i} has {sum} ratings, expected {raters}")));
            }
        }
        Ok(RatingMatrix { rows, raters, categories })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn raters(&self) -> u32 {
        self.raters
    }

    /// Mean observed pairwise agreement P̄.
    fn observed_agreement(&self) -> f64 {
        let n = self.raters as f64;
        let per_item = self.rows.iter().map(|row| {
            let same: f64 = row.iter().map(|&c| c as f64 * (c as f64 - 1.0)).sum();
            same / (n * (n - 1.0))
        });
        per_item.sum::<f64>() / self.rows.len() as f64
    }

    /// Overall share of each category.
    fn category_shares(&self) -> Vec<f64> {
        let total = self.rows.len() as f64 * self.raters as f64;
        (0..self.categories)
            .map(|j| self.rows.iter().map(|r| r[j] as f64).sum::<f64>() / total)
            .collect()
    }
}

pub fn fleiss_kappa(m: &RatingMatrix) -> Result<f64> {
    let p_bar = m.observed_agreement();
    let p_e: f64 = m.category_shares().iter().map(|p| p * p).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::undefined("Fleiss' kappa with all ratings in one category"));
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

pub fn gwet_ac1(m: &RatingMatrix) -> Result<f64> {
    let p_bar = m.observed_agreement();
    let q = m.categories as f64;
    let p_e: f64 = m.category_shares().iter().map(|p| p * (1.0 - p)).sum::<f64>() / (q - 1.0);
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(Error::undefined("Gwet's AC1 with chance agreement 1"));
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Welch's unequal-variance t-test of mean(a) − mean(b).
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::input("Welch's t-test needs at least two observations per group"));
    }
    let (va, vb) = (sample_variance(a) / a.len() as f64, sample_variance(b) / b.len() as f64);
    let diff = mean(a) - mean(b);
    let se2 = va + vb;
    if se2 == 0.0 {
        if diff == 0.0 {
            return Ok(TTest { t: 0.0, df: (a.len() + b.len() - 2) as f64, p: 1.0 });
        }
        return Err(Error::undefined("Welch's t-test with zero variance in both groups"));
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2
        / (va * va / (a.len() as f64 - 1.0) + vb * vb / (b.len() as f64 - 1.0));
    Ok(TTest { t, df, p: students_t_two_sided(t, df) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// F statistic of the slope on (1, n − 2) degrees of freedom.
    pub f: f64,
    pub p: f64,
    pub n: usize,
}

/// Simple least squares `y = intercept + slope·x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    if x.len() != y.len() {
        return Err(Error::input(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::input("regression needs at least 3 points"));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 {
        return Err(Error::undefined("regression on a constant predictor"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_reg = slope * sxy;
    let ss_res = (syy - ss_reg).max(0.0);
    let df = (n - 2) as f64;
    let (r_squared, f, p) = if syy == 0.0 {
        (0.0, 0.0, 1.0)
    } else if ss_res == 0.0 {
        (1.0, f64::INFINITY, 0.0)
    } else {
        let f = ss_reg / (ss_res / df);
        let dist = FisherSnedecor::new(1.0, df).expect("positive degrees of freedom");
        (ss_reg / syy, f, dist.sf(f).clamp(0.0, 1.0))
    };
    Ok(OlsFit { slope, intercept, r_squared, f, p, n })
}

pub const LOWESS_DEFAULT_FRAC: f64 = 0.6;
const LOWESS_ROBUST_ITERS: usize = 1;

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

fn bisquare(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u;
        t * t
    }
}

/// Local linear fit at `xs[i]` over the window `[lo, hi)` of sorted data.
fn lowess_point(xs: &[f64], ys: &[f64], robust: &[f64], i: usize, lo: usize, hi: usize) -> f64 {
    let x0 = xs[i];
    let radius = (x0 - xs[lo]).max(xs[hi - 1] - x0);
    let mut w = Vec::with_capacity(hi - lo);
    for j in lo..hi {
        let u = if radius > 0.0 { (xs[j] - x0).abs() / radius } else { 0.0 };
        w.push(tricube(u) * robust[j]);
    }
    let sw: f64 = w.iter().sum();
    if sw <= 0.0 {
        return ys[i];
    }
    let mut xbar = 0.0;
    let mut ybar = 0.0;
    for (k, j) in (lo..hi).enumerate() {
        xbar += w[k] * xs[j];
        ybar += w[k] * ys[j];
    }
    xbar /= sw;
    ybar /= sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (k, j) in (lo..hi).enumerate() {
        sxx += w[k] * (xs[j] - xbar).powi(2);
        sxy += w[k] * (xs[j] - xbar) * (ys[j] - ybar);
    }
    if sxx.sqrt() > 1e-12 * (xs[hi - 1] - xs[lo]).abs().max(1.0) {
        ybar + sxy / sxx * (x0 - xbar)
    } else {
        ybar
    }
}

/// Locally weighted linear regression with tricube weights over the
/// `⌊frac·n⌋` nearest neighbours and one bisquare robustness pass. Returns fitted values in input order.
pub fn lowess(x: &[f64], y: &[f64], frac: f64) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::input(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 5 {
        return Err(Error::input("LOWESS needs at least 5 points"));
    }
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::input(format!("LOWESS fraction {frac} outside (0, 1]")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::input("LOWESS input has non-finite values"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let k = ((frac * n as f64 + 1e-10) as usize).clamp(2, n);

    // nearest-neighbour windows, slid left to right
    let mut windows = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, k);
    for i in 0..n {
        while hi < n && xs[hi] - xs[i] < xs[i] - xs[lo] {
            lo += 1;
            hi += 1;
        }
        windows.push((lo, hi));
    }

    let mut robust = vec![1.0; n];
    let mut fitted = vec![0.0; n];
    for iteration in 0..=LOWESS_ROBUST_ITERS {
        for i in 0..n {
            let (lo, hi) = windows[i];
            fitted[i] = lowess_point(&xs, &ys, &robust, i, lo, hi);
        }
        if iteration == LOWESS_ROBUST_ITERS {
            break;
        }
        let mut abs_resid: Vec<f64> = ys.iter().zip(&fitted).map(|(a, b)| (a - b).abs()).collect();
        let mut sorted = abs_resid.clone();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        if median <= 0.0 {
            break;
        }
        for (w, r) in robust.iter_mut().zip(abs_resid.iter_mut()) {
            *w = bisquare(*r / (6.0 * median));
        }
    }

    let mut out = vec![0.0; n];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = fitted[pos];
    }
    Ok(out)
}

/// Two-sided exact McNemar test on paired binary outcomes.
pub fn mcnemar_exact(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::input(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    let only_a = a.iter().zip(b).filter(|(x, y)| **x && !**y).count() as u64;
    let only_b = a.iter().zip(b).filter(|(x, y)| !**x && **y).count() as u64;
    Ok(binomial_two_sided(only_a.min(only_b), only_a + only_b))
}

/// `min(1, 2·P(X ≤ k))` for X ~ Binomial(n, 1/2).
fn binomial_two_sided(k: u64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ln_half_n = n as f64 * 0.5f64.ln();
    let tail: f64 = (0..=k).map(|i| (ln_binomial(n, i) + ln_half_n).exp()).sum();
    (2.0 * tail).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&Distribution::new(vec![0.5, 0.5]).unwrap()), 1.0);
        assert_eq!(shannon_entropy(&Distribution::new(vec![1.0, 0.0]).unwrap()), 0.0);
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(pearson_r(&x, &x).unwrap().r, 1.0);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(pearson_r(&x, &neg).unwrap().r, -1.0);
        assert!(matches!(pearson_r(&x, &[2.0; 4]), Err(Error::Undefined(_))));
        assert!(pearson_r(&x[..2], &x[..2]).is_err());
        // scipy.stats.pearsonr
        let c = pearson_r(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(c.r, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(c.p, 0.10408803866182799, epsilon = 1e-9);
    }

    #[test]
    fn holm_examples() {
        assert_eq!(holm_bonferroni(&[0.2]).unwrap(), vec![0.2]);
        let adj = holm_bonferroni(&[0.01, 0.04, 0.03]).unwrap();
        for (a, e) in adj.iter().zip([0.03, 0.06, 0.06]) {
            assert_abs_diff_eq!(*a, e, epsilon = 1e-15);
        }
        assert_eq!(holm_bonferroni(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        assert!(holm_bonferroni(&[1.2]).is_err());
    }

    #[test]
    fn kappa_examples() {
        let perfect = RatingMatrix::new(vec![vec![3, 0], vec![0, 3], vec![3, 0]]).unwrap();
        assert_eq!(fleiss_kappa(&perfect).unwrap(), 1.0);
        assert_eq!(gwet_ac1(&perfect).unwrap(), 1.0);
        // statsmodels.stats.inter_rater.fleiss_kappa
        let m = RatingMatrix::new(vec![
            vec![5, 0], vec![4, 1], vec![1, 4], vec![2, 3], vec![0, 5], vec![3, 2],
        ])
        .unwrap();
        assert_abs_diff_eq!(fleiss_kappa(&m).unwrap(), 0.33333333333333326, epsilon = 1e-12);
        let m = RatingMatrix::new(vec![
            vec![0, 0, 0, 0, 14], vec![0, 2, 6, 4, 2], vec![0, 0, 3, 5, 6], vec![0, 3, 9, 2, 0],
            vec![2, 2, 8, 1, 1], vec![7, 7, 0, 0, 0], vec![3, 2, 6, 3, 0], vec![2, 5, 3, 2, 2],
            vec![6, 5, 2, 1, 0], vec![0, 2, 2, 3, 7],
        ])
        .unwrap();
        assert_abs_diff_eq!(fleiss_kappa(&m).unwrap(), 0.20993070442195522, epsilon = 1e-12);
        let one = RatingMatrix::new(vec![vec![4, 0], vec![4, 0]]).unwrap();
        assert!(matches!(fleiss_kappa(&one), Err(Error::Undefined(_))));
        assert!(RatingMatrix::new(vec![vec![2, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn kappa_zero_at_chance() {
        // search small 2-category matrices for P̄ == P̄e exactly
        let mut found = false;
        'outer: for a in 0..=4u32 {
            for b in 0..=4u32 {
                for c in 0..=4u32 {
                    let m = RatingMatrix::new(vec![vec![a, 4 - a], vec![b, 4 - b], vec![c, 4 - c]]).unwrap();
                    let shares = m.category_shares();
                    let pe: f64 = shares.iter().map(|p| p * p).sum();
                    if pe < 1.0 && (m.observed_agreement() - pe).abs() < 1e-15 {
                        assert_abs_diff_eq!(fleiss_kappa(&m).unwrap(), 0.0, epsilon = 1e-12);
                        found = true;
                        break 'outer;
                    }
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn welch_reference() {
        // scipy.stats.ttest_ind(equal_var=False)
        let t = welch_t(&[3.1, 4.2, 5.9, 2.2, 4.8, 5.5], &[1.0, 2.5, 1.7, 3.3]).unwrap();
        assert_abs_diff_eq!(t.t, 2.82373748834177, epsilon = 1e-10);
        assert_abs_diff_eq!(t.df, 7.921241104287656, epsilon = 1e-9);
        assert_abs_diff_eq!(t.p, 0.02258770149389646, epsilon = 1e-9);
        let same = welch_t(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(same.t, 0.0);
        let far = welch_t(&[1e6, 1e6 + 1.0, 1e6 + 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(far.p < 1e-10);
    }

    #[test]
    fn ols_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let fit = ols(&x, &y).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 1.0, epsilon = 1e-12);
        assert_eq!(fit.r_squared, 1.0);
        assert!(matches!(ols(&[1.0; 4], &y), Err(Error::Undefined(_))));
        let flat = ols(&x, &[3.0; 4]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.r_squared, 0.0);
        // scipy.stats.linregress
        let fit = ols(&[1., 2., 3., 4., 5., 6., 7.], &[2.1, 3.9, 6.2, 7.8, 10.1, 12.2, 13.8]).unwrap();
        assert_abs_diff_eq!(fit.slope, 1.9857142857142858, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 0.07142857142857117, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 0.9983465095850772, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.p, 3.7769365748825075e-08, epsilon = 1e-12);
    }

    fn sine_fixture() -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..25).map(|i| i as f64 * 0.5).collect();
        let y = x
            .iter()
            .enumerate()
            .map(|(i, v)| v.sin() + 0.3 * (((i * 7919) % 13) as f64 / 13.0 - 0.5))
            .collect();
        (x, y)
    }

    #[test]
    fn lowess_matches_statsmodels() {
        // statsmodels lowess(frac=0.6, it=1, delta=0)
        let expected = [
            0.7920967640208836, 0.6782315474842855, 0.5542020497517688, 0.4242167822317467,
            0.2931474078701928, 0.1649089434990426, 0.03893179908749225, -0.11752431124510035,
            -0.25609372688430726, -0.3405426741629712, -0.3476882851613632, -0.2713212637395771,
            -0.12417729395319481, 0.057560768602626586, 0.21899925159617514, 0.3151198104564365,
            0.3265727936781431, 0.2570132094844797, 0.06839766273200848, -0.09763457810639033,
            -0.2676112259007762, -0.44760834418637196, -0.6366275072910371, -0.8311651999466024,
            -1.0270424909323097,
        ];
        let (x, y) = sine_fixture();
        let got = lowess(&x, &y, 0.6).unwrap();
        for (g, e) in got.iter().zip(expected) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-9);
        }
        let mut y2 = y.clone();
        y2[7] += 5.0;
        let expected_outlier = [
            0.7339790794857849, 0.6597112891702458, 0.5714735314353915, 0.4726977793882002,
            0.367343095489138, 0.25830374877146073, 0.14460057866250525, 0.001701720342751534,
            -0.10739830530629364, -0.19677083075907761, -0.26423265510036203, -0.2715245185330814,
            -0.14949580078664723, 0.05981146167684708, 0.23405330450023296, 0.32870698985019003,
            0.3333655747070741, 0.25859831963592994, 0.06949813936558653, -0.09707211870054785,
            -0.2675075509351269, -0.44787723003413504, -0.6371977693863621, -0.8319797847333046,
            -1.0280560145216833,
        ];
        let got = lowess(&x, &y2, 0.6).unwrap();
        for (g, e) in got.iter().zip(expected_outlier) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-9);
        }
    }

    #[test]
    fn lowess_smooths_noise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..200).map(|i| i as f64 * std::f64::consts::TAU / 200.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin() + rng.random_range(-0.5..0.5)).collect();
        let fit = lowess(&x, &y, 0.2).unwrap();
        let rms = |v: Vec<f64>| (v.iter().map(|e| e * e).sum::<f64>() / v.len() as f64).sqrt();
        let raw = rms(x.iter().zip(&y).map(|(a, b)| b - a.sin()).collect());
        let smooth = rms(x.iter().zip(&fit).map(|(a, b)| b - a.sin()).collect());
        assert!(smooth < raw, "{smooth} >= {raw}");
    }

    #[test]
    fn lowess_linear_is_exact() {
        let x: Vec<f64> = (0..30).map(|i| (i * 37 % 30) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 3.0).collect();
        for frac in [0.3, 0.6, 1.0] {
            for (g, e) in lowess(&x, &y, frac).unwrap().iter().zip(&y) {
                assert_abs_diff_eq!(*g, *e, epsilon = 1e-6);
            }
        }
        assert!(lowess(&x[..4], &y[..4], 0.5).is_err());
        assert!(lowess(&x, &y, 0.0).is_err());
    }

    #[test]
    fn mcnemar_examples() {
        let a = [true, false, true];
        assert_eq!(mcnemar_exact(&a, &a).unwrap(), 1.0);
        let a = vec![true; 10];
        let b = vec![false; 10];
        assert_abs_diff_eq!(mcnemar_exact(&a, &b).unwrap(), 0.001953125, epsilon = 1e-15);
        let a: Vec<bool> = (0..10).map(|i| i < 5).collect();
        let b: Vec<bool> = (0..10).map(|i| i >= 5).collect();
        assert_eq!(mcnemar_exact(&a, &b).unwrap(), 1.0);
        // scipy.stats.binomtest(3, 12)
        assert_abs_diff_eq!(binomial_two_sided(3, 12), 0.14599609375, epsilon = 1e-12);
    }

    fn naive_binomial_two_sided(k: u64, n: u64) -> f64 {
        let mut tail = 0.0;
        for i in 0..=k {
            let mut c = 1.0f64;
            for j in 0..i {
                c = c * (n - j) as f64 / (j + 1) as f64;
            }
            tail += c / 2f64.powi(n as i32);
        }
        (2.0 * tail).min(1.0)
    }

    fn naive_pairwise_agreement(m: &RatingMatrix) -> f64 {
        // agreement over all ordered rater pairs, rebuilt from expanded ratings
        let mut total = 0.0;
        for row in m.rows() {
            let ratings: Vec<usize> = row
                .iter()
                .enumerate()
                .flat_map(|(j, &c)| std::iter::repeat_n(j, c as usize))
                .collect();
            let (mut agree, mut pairs) = (0.0, 0.0);
            for i in 0..ratings.len() {
                for k in 0..ratings.len() {
                    if i != k {
                        pairs += 1.0;
                        if ratings[i] == ratings[k] {
                            agree += 1.0;
                        }
                    }
                }
            }
            total += agree / pairs;
        }
        total / m.rows().len() as f64
    }

    proptest! {
        #[test]
        fn holm_is_monotone_and_bounded(ps in proptest::collection::vec(0.0f64..=1.0, 1..20)) {
            let adj = holm_bonferroni(&ps).unwrap();
            for (a, p) in adj.iter().zip(&ps) {
                prop_assert!(*a >= *p && *a <= 1.0);
            }
            let mut idx: Vec<usize> = (0..ps.len()).collect();
            idx.sort_by(|&a, &b| ps[a].total_cmp(&ps[b]).then(a.cmp(&b)));
            for w in idx.windows(2) {
                prop_assert!(adj[w[0]] <= adj[w[1]]);
            }
        }

        #[test]
        fn pearson_affine_invariant(
            xy in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..30),
            a in 0.1f64..10.0, b in -50.0f64..50.0,
        ) {
            let x: Vec<f64> = xy.iter().map(|p| p.0).collect();
            let y: Vec<f64> = xy.iter().map(|p| p.1).collect();
            if let Ok(c) = pearson_r(&x, &y) {
                let x2: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                let c2 = pearson_r(&x2, &y).unwrap();
                prop_assert!((c.r - c2.r).abs() < 1e-9);
                prop_assert!((0.0..=1.0).contains(&c.p));
            }
        }

        #[test]
        fn entropy_bounds(p in 0.0f64..=1.0) {
            let h = shannon_entropy(&Distribution::new(vec![p, 1.0 - p]).unwrap());
            prop_assert!((0.0..=1.0 + 1e-12).contains(&h));
        }

        #[test]
        fn agreement_matches_pairwise_oracle(
            rows in proptest::collection::vec(0u32..=6, 1..15),
        ) {
            let m = RatingMatrix::new(rows.iter().map(|&a| vec![a, 6 - a]).collect()).unwrap();
            let p_bar = naive_pairwise_agreement(&m);
            prop_assert!((m.observed_agreement() - p_bar).abs() < 1e-12);
            let ones = rows.iter().map(|&a| a as f64).sum::<f64>() / (6.0 * rows.len() as f64);
            let pe_k = ones * ones + (1.0 - ones) * (1.0 - ones);
            if pe_k < 1.0 {
                prop_assert!((fleiss_kappa(&m).unwrap() - (p_bar - pe_k) / (1.0 - pe_k)).abs() < 1e-9);
            }
            let pe_g = 2.0 * ones * (1.0 - ones);
            prop_assert!((gwet_ac1(&m).unwrap() - (p_bar - pe_g) / (1.0 - pe_g)).abs() < 1e-9);
        }

        #[test]
        fn binomial_matches_naive(n in 0u64..60, k_frac in 0.0f64..=0.5) {
            let k = (n as f64 * k_frac) as u64;
            prop_assert!((binomial_two_sided(k, n) - naive_binomial_two_sided(k, n)).abs() < 1e-9);
        }

        #[test]
        fn p_values_in_range(
            a in proptest::collection::vec(-10.0f64..10.0, 2..20),
            b in proptest::collection::vec(-10.0f64..10.0, 2..20),
        ) {
            if let Ok(t) = welch_t(&a, &b) {
                prop_assert!((0.0..=1.0).contains(&t.p));
            }
        }
    }
}
