//! Regression of ΔP on log frequencies and the R²/accuracy correlation.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::benchgen::{MinimalPair, Paradigm};
use crate::corpus::FreqTable;
use crate::error::{Error, Result};
use crate::scoring::{PairResult, Region};

/// Predictor names in column order.
pub const PREDICTORS: [&str; 3] = ["verb", "subj_gram", "subj_ungram"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRow {
    pub pair_id: String,
    pub delta_p: f64,
    pub logf_verb: f64,
    pub logf_subj_gram: f64,
    pub logf_subj_ungram: f64,
}

impl RegressionRow {
    fn predictors(&self) -> [f64; 3] {
        [self.logf_verb, self.logf_subj_gram, self.logf_subj_ungram]
    }
}

fn log_freq(freqs: &FreqTable, form: &str) -> Result<f64> {
    match freqs.get(form) {
        0 => Err(Error::MissingFrequency(form.to_string())),
        f => Ok((f as f64).ln()),
    }
}

/// Joins simple-agreement results with their pairs and the training-corpus
/// frequencies of the verb and both subject forms. `source` restricts the rows
/// to one lexicon source; `None` pools all of them.
pub fn build_rows(
    results: &[PairResult],
    pairs: &[MinimalPair],
    freqs: &FreqTable,
    source: Option<&str>,
) -> Result<Vec<RegressionRow>> {
    let by_id: HashMap<&str, &MinimalPair> = pairs.iter().map(|p| (p.pair_id.as_str(), p)).collect();
    let mut rows = Vec::new();
    for r in results {
        if r.paradigm != Paradigm::SimpleAgreement || source.is_some_and(|s| s != r.lexicon_source) {
            continue;
        }
        if r.region != Region::Critical {
            return Err(Error::InvalidParameter(format!(
                "result {} was scored on the full sequence; regression needs critical-region ΔP",
                r.pair_id
            )));
        }
        let pair = by_id
            .get(r.pair_id.as_str())
            .ok_or_else(|| Error::InvalidParameter(format!("result {} has no benchmark pair", r.pair_id)))?;
        let m = &pair.metadata;
        rows.push(RegressionRow {
            pair_id: r.pair_id.clone(),
            delta_p: r.delta_p,
            logf_verb: log_freq(freqs, &m.verb_form)?,
            logf_subj_gram: log_freq(freqs, &m.subject_gram)?,
            logf_subj_ungram: log_freq(freqs, &m.subject_ungram)?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: f64,
    pub std: f64,
}

/// Centers and scales a column to mean 0 and population standard deviation 1.
pub fn zscore(column: &[f64], name: &'static str) -> Result<(Vec<f64>, Standardization)> {
    if column.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: column.len(),
        });
    }
    let n = column.len() as f64;
    let mean = column.iter().sum::<f64>() / n;
    let centered: Vec<f64> = column.iter().map(|x| x - mean).collect();
    // second centering pass removes the rounding left in the first mean
    let shift = centered.iter().sum::<f64>() / n;
    let centered: Vec<f64> = centered.iter().map(|x| x - shift).collect();
    let var = centered.iter().map(|x| x * x).sum::<f64>() / n;
    let scale = mean.abs().max(1.0);
    if var.sqrt() <= scale * 1e-12 {
        return Err(Error::ZeroVariance(name));
    }
    let std = var.sqrt();
    Ok((centered.iter().map(|x| x / std).collect(), Standardization { mean: mean + shift, std }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsSolution {
    /// Intercept first, then one slope per column.
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
}

/// Least squares with an intercept via Householder QR.
pub fn ols(columns: &[Vec<f64>], y: &[f64]) -> Result<OlsSolution> {
    let (n, p) = (y.len(), columns.len() + 1);
    if n <= p {
        return Err(Error::TooFewObservations { needed: p + 1, got: n });
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidParameter("predictor columns differ in length".into()));
    }
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    if ss_tot <= f64::EPSILON * mean_y.abs().max(1.0) * n as f64 {
        return Err(Error::ZeroVariance("dependent variable"));
    }
    let x = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { columns[j - 1][i] });
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..p).map(|i| r[(i, i)].abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    if diag.iter().any(|d| *d <= max * 1e-10) {
        return Err(Error::RankDeficient);
    }
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;
    let resid = &yv - &x * &beta;
    let ss_res = resid.norm_squared();
    Ok(OlsSolution {
        coefficients: beta.iter().copied().collect(),
        residuals: resid.iter().copied().collect(),
        r_squared: (1.0 - ss_res / ss_tot).clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub intercept: f64,
    pub verb: f64,
    pub subj_gram: f64,
    pub subj_ungram: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    #[serde(rename = "coef")]
    pub coefficients: Coefficients,
    #[serde(rename = "r2")]
    pub r_squared: f64,
    pub n: usize,
    /// Keyed by predictor name.
    pub standardization: BTreeMap<String, Standardization>,
    /// Lexicon source the rows came from, or `pooled`.
    pub scope: String,
}

/// OLS of ΔP on the z-scored log frequencies.
pub fn fit_ols(rows: &[RegressionRow], scope: &str) -> Result<RegressionFit> {
    const NAMES: [&str; 3] = PREDICTORS;
    let mut columns = Vec::new();
    let mut standardization = BTreeMap::new();
    for (k, name) in NAMES.iter().enumerate() {
        let raw: Vec<f64> = rows.iter().map(|r| r.predictors()[k]).collect();
        let (z, s) = zscore(&raw, name)?;
        columns.push(z);
        standardization.insert(name.to_string(), s);
    }
    let y: Vec<f64> = rows.iter().map(|r| r.delta_p).collect();
    let sol = ols(&columns, &y)?;
    let c = &sol.coefficients;
    Ok(RegressionFit {
        coefficients: Coefficients {
            intercept: c[0],
            verb: c[1],
            subj_gram: c[2],
            subj_ungram: c[3],
        },
        r_squared: sol.r_squared,
        n: rows.len(),
        standardization,
        scope: scope.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    /// `(r_squared, accuracy)` per model configuration.
    pub points: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

/// Pearson correlation with a two-sided p-value from Student's t on n−2 degrees of freedom.
pub fn correlate_r2_accuracy(points: &[(f64, f64)]) -> Result<CorrelationResult> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewObservations { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let negligible = |ss: f64, m: f64| ss <= nf * (1e-12 * m.abs().max(1.0)).powi(2);
    if negligible(sxx, mx) {
        return Err(Error::ZeroVariance("r_squared"));
    }
    if negligible(syy, my) {
        return Err(Error::ZeroVariance("accuracy"));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = nf - 2.0;
    let p_value = if r.abs() == 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        (2.0 * dist.sf(t.abs())).min(1.0)
    };
    Ok(CorrelationResult {
        r,
        p_value,
        points: points.to_vec(),
        labels: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn mean_sd(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt())
    }

    #[test]
    fn zscore_examples() {
        assert_eq!(zscore(&[1.0, 3.0], "x").unwrap().0, [-1.0, 1.0]);
        let (z, s) = zscore(&[2.0, 4.0, 6.0, 8.0], "x").unwrap();
        let (m, sd) = mean_sd(&z);
        assert!(m.abs() < 1e-12 && (sd - 1.0).abs() < 1e-12);
        assert_eq!(s.mean, 5.0);
        assert!((s.std - 5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(zscore(&[3.0, 3.0, 3.0], "x"), Err(Error::ZeroVariance("x"))));
        assert!(matches!(zscore(&[3.0], "x"), Err(Error::TooFewObservations { .. })));
    }

    fn rows_from(xs: &[[f64; 3]], mut y: impl FnMut(&[f64; 3]) -> f64) -> Vec<RegressionRow> {
        xs.iter()
            .enumerate()
            .map(|(i, x)| RegressionRow {
                pair_id: i.to_string(),
                delta_p: y(x),
                logf_verb: x[0],
                logf_subj_gram: x[1],
                logf_subj_ungram: x[2],
            })
            .collect()
    }

    fn random_x(n: usize, seed: u64) -> Vec<[f64; 3]> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..n).map(|_| [rng.random_range(0.0..9.0), rng.random_range(0.0..9.0), rng.random_range(0.0..9.0)]).collect()
    }

    #[test]
    fn planted_coefficients_recovered() {
        let x = random_x(50, 1);
        // plant on the standardized scale
        let cols: Vec<Vec<f64>> = (0..3).map(|k| zscore(&x.iter().map(|r| r[k]).collect::<Vec<_>>(), "x").unwrap().0).collect();
        let rows: Vec<RegressionRow> = rows_from(&x, |_| 0.0)
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.delta_p = 2.0 + 0.5 * cols[0][i] - 1.0 * cols[1][i];
                r
            })
            .collect();
        let fit = fit_ols(&rows, "pooled").unwrap();
        let c = fit.coefficients;
        assert!((c.intercept - 2.0).abs() < 1e-6);
        assert!((c.verb - 0.5).abs() < 1e-6);
        assert!((c.subj_gram + 1.0).abs() < 1e-6);
        assert!(c.subj_ungram.abs() < 1e-6);
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
        assert_eq!(fit.n, 50);
    }

    #[test]
    fn degenerate_inputs() {
        let x = random_x(20, 2);
        assert!(matches!(fit_ols(&rows_from(&x, |_| 1.5), "p"), Err(Error::ZeroVariance(_))));
        let mut x2 = x.clone();
        for r in &mut x2 {
            r[2] = 2.0 * r[0] + 1.0;
        }
        assert!(matches!(fit_ols(&rows_from(&x2, |r| r[0]), "p"), Err(Error::RankDeficient)));
        assert!(matches!(fit_ols(&rows_from(&x[..4], |r| r[0]), "p"), Err(Error::TooFewObservations { .. })));
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        let x = random_x(40, 3);
        let mut rng = StdRng::seed_from_u64(4);
        let y: Vec<f64> = x.iter().map(|r| r[0] - 0.3 * r[2] + rng.random_range(-1.0..1.0)).collect();
        let cols: Vec<Vec<f64>> = (0..3).map(|k| x.iter().map(|r| r[k]).collect()).collect();
        let sol = ols(&cols, &y).unwrap();
        let norm = sol.residuals.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dot = |c: &[f64]| c.iter().zip(&sol.residuals).map(|(a, b)| a * b).sum::<f64>();
        assert!(dot(&vec![1.0; 40]).abs() <= 1e-8 * norm * 40f64.sqrt());
        for c in &cols {
            let cn = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(dot(c).abs() <= 1e-8 * norm * cn);
        }
    }

    #[test]
    fn permutation_null_has_small_r2() {
        let x = random_x(200, 5);
        let mut rng = StdRng::seed_from_u64(6);
        let rows = rows_from(&x, |_| rng.random_range(-1.0..1.0));
        assert!(fit_ols(&rows, "p").unwrap().r_squared < 0.1);
    }

    #[test]
    fn noise_predictors_never_lower_r2() {
        let x = random_x(30, 7);
        let mut rng = StdRng::seed_from_u64(8);
        let y: Vec<f64> = x.iter().map(|r| r[1] + rng.random_range(-2.0..2.0)).collect();
        let mut cols: Vec<Vec<f64>> = (0..3).map(|k| x.iter().map(|r| r[k]).collect()).collect();
        let base = ols(&cols, &y).unwrap().r_squared;
        cols.push((0..30).map(|_| rng.random_range(0.0..1.0)).collect());
        assert!(ols(&cols, &y).unwrap().r_squared >= base - 1e-12);
    }

    #[test]
    fn r2_invariant_under_affine_rescaling() {
        let x = random_x(25, 9);
        let rows = rows_from(&x, |r| r[0] * 0.7 - r[1] + (r[2] * 3.0).sin());
        let fit = fit_ols(&rows, "p").unwrap();
        let scaled: Vec<RegressionRow> = rows
            .iter()
            .map(|r| RegressionRow {
                logf_verb: 4.0 * r.logf_verb - 3.0,
                ..r.clone()
            })
            .collect();
        let fit2 = fit_ols(&scaled, "p").unwrap();
        assert!((fit.r_squared - fit2.r_squared).abs() < 1e-12);
        assert_eq!(fit.coefficients.verb.signum(), fit2.coefficients.verb.signum());
    }

    #[test]
    fn pearson_examples() {
        let c = correlate_r2_accuracy(&[(0.1, 0.9), (0.2, 0.8), (0.3, 0.7)]).unwrap();
        assert!((c.r + 1.0).abs() < 1e-12);
        assert!(c.p_value < 1e-6);
        let pts = [(0.12, 0.81), (0.30, 0.77), (0.05, 0.70), (0.22, 0.66), (0.41, 0.74)];
        // direct evaluation of the textbook formula with raw sums
        let n = 5.0;
        let (sx, sy): (f64, f64) = (pts.iter().map(|p| p.0).sum(), pts.iter().map(|p| p.1).sum());
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let syy: f64 = pts.iter().map(|p| p.1 * p.1).sum();
        let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        let c = correlate_r2_accuracy(&pts).unwrap();
        assert!((c.r - r).abs() < 1e-12);
        assert!(c.p_value > 0.0 && c.p_value <= 1.0);
        assert!(matches!(correlate_r2_accuracy(&pts[..2]), Err(Error::TooFewObservations { .. })));
        assert!(matches!(correlate_r2_accuracy(&[(0.1, 0.5), (0.1, 0.6), (0.1, 0.7)]), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn p_value_matches_known_quantile() {
        // t = 2.306 is the two-sided 5% critical value at 8 degrees of freedom
        let df = 8.0;
        let t: f64 = 2.306004135;
        let r = t / (t * t + df).sqrt();
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        // build y with the exact target correlation: y = r*zx + sqrt(1-r^2)*e, e ⟂ x
        let zx = zscore(&xs, "x").unwrap().0;
        let e0: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let proj = e0.iter().zip(&zx).map(|(a, b)| a * b).sum::<f64>() / 10.0;
        let e = zscore(&e0.iter().zip(&zx).map(|(a, b)| a - proj * b).collect::<Vec<_>>(), "e").unwrap().0;
        let pts: Vec<(f64, f64)> = zx.iter().zip(&e).map(|(x, e)| (*x, r * x + (1.0 - r * r).sqrt() * e)).collect();
        let c = correlate_r2_accuracy(&pts).unwrap();
        assert!((c.r - r).abs() < 1e-12);
        assert!((c.p_value - 0.05).abs() < 1e-6, "{}", c.p_value);
    }

    proptest! {
        #[test]
        fn zscore_moments(v in prop::collection::vec(-1e3f64..1e3, 2..60)) {
            prop_assume!(mean_sd(&v).1 > 1e-6);
            let (z, _) = zscore(&v, "x").unwrap();
            let (m, sd) = mean_sd(&z);
            prop_assert!(m.abs() < 1e-12);
            prop_assert!((sd - 1.0).abs() < 1e-12);
        }

        #[test]
        fn pearson_bounded(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..30)) {
            if let Ok(c) = correlate_r2_accuracy(&pts) {
                prop_assert!(c.r.abs() <= 1.0);
                prop_assert!((0.0..=1.0).contains(&c.p_value));
            }
        }
    }
}
