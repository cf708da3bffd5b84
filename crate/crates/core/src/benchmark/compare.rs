use serde::Serialize;

use crate::{Error, Result};

/// Values of one metric configuration over a dataset, in dataset order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries {
    pub name: String,
    pub values: Vec<f64>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }
}

/// Pairwise Pearson correlations and mean absolute differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonMatrix {
    pub labels: Vec<String>,
    /// `None` where either series has zero variance.
    #[serde(serialize_with = "ser_opt_matrix")]
    pub correlations: Vec<Vec<Option<f64>>>,
    #[serde(serialize_with = "ser_matrix")]
    pub mean_abs_diff: Vec<Vec<f64>>,
}

impl ComparisonMatrix {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn correlation(&self, a: &str, b: &str) -> Option<f64> {
        self.correlations[self.index_of(a)?][self.index_of(b)?]
    }

    pub fn mean_abs_diff(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.mean_abs_diff[self.index_of(a)?][self.index_of(b)?])
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("matrix serializes");
        s.push('\n');
        s
    }
}

fn ser_matrix<S: serde::Serializer>(m: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let row: Vec<f64> = row.iter().map(|&v| crate::fmt::round_sig(v)).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

fn ser_opt_matrix<S: serde::Serializer>(
    m: &[Vec<Option<f64>>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let row: Vec<Option<f64>> = row.iter().map(|v| v.map(crate::fmt::round_sig)).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// Population Pearson correlation from single-pass co-moments. `None` when
/// either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "series length mismatch");
    let (mut mx, mut my) = (0.0, 0.0);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (k, (&a, &b)) in x.iter().zip(y).enumerate() {
        let n = (k + 1) as f64;
        let dx = a - mx;
        let dy = b - my;
        mx += dx / n;
        my += dy / n;
        sxx += dx * (a - mx);
        syy += dy * (b - my);
        sxy += dx * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mean of `|x_i - y_i|`.
pub fn mean_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "series length mismatch");
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum::<f64>() / x.len() as f64
}

pub fn compare_metrics(series: &[MetricSeries]) -> Result<ComparisonMatrix> {
    if series.len() < 2 {
        return Err(Error::InvalidSeries("at least two series are required".into()));
    }
    let len = series[0].values.len();
    if len < 3 {
        return Err(Error::InvalidSeries("series need at least three values".into()));
    }
    for s in series {
        if s.values.len() != len {
            return Err(Error::InvalidSeries(format!(
                "series '{}' has {} values, expected {len}",
                s.name,
                s.values.len()
            )));
        }
        if s.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!("series '{}' has non-finite values", s.name)));
        }
    }
    let n = series.len();
    let mut corr = vec![vec![None; n]; n];
    let mut diff = vec![vec![0.0; n]; n];
    for i in 0..n {
        let constant = pearson(&series[i].values, &series[i].values).is_none();
        corr[i][i] = (!constant).then_some(1.0);
        for j in i + 1..n {
            let r = pearson(&series[i].values, &series[j].values);
            let d = mean_abs_diff(&series[i].values, &series[j].values);
            corr[i][j] = r;
            corr[j][i] = r;
            diff[i][j] = d;
            diff[j][i] = d;
        }
    }
    Ok(ComparisonMatrix {
        labels: series.iter().map(|s| s.name.clone()).collect(),
        correlations: corr,
        mean_abs_diff: diff,
    })
}
