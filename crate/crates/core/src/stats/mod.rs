//! Pearson correlation with significance, per-field correlation matrices, and
//! cell-wise averaging across fields.
//!
//! Zero-variance dimensions yield *undefined* correlations, which are flagged
//! and skipped during averaging rather than treated as zero; forcing them to
//! zero would bias the averaged matrices toward no correlation.

mod tdist;
mod vectors;

pub use tdist::{ln_gamma, regularized_incomplete_beta, student_t_cdf, two_tailed_p};
pub use vectors::{build_vectors, build_vectors_in, IndicatorVectorSet, LabelSpace, Tier, SCOPUS_LABEL};

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{AcademicLevel, CandidateProfile};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("correlation coefficient {0} is outside [-1, 1]")]
    InvalidCoefficient(f64),
    #[error("no matrices to average")]
    EmptyInput,
    #[error("matrices do not share tier, level, and dimension labels")]
    LabelMismatch,
    #[error("tier {0} is not built from publication vectors")]
    UnsupportedTier(Tier),
}

/// Sample Pearson correlation coefficient.
///
/// Returns `None` when either vector has zero variance, where the coefficient
/// is undefined. The result is clamped to [-1, 1] against float drift.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(StatsError::InsufficientSamples { needed: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

/// Significance of a sample correlation coefficient under Student's t with
/// n − 2 degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    /// t-statistic; infinite when |r| = 1.
    pub t: f64,
    /// Two-tailed p-value.
    pub p: f64,
    /// Standard error of r.
    pub se: f64,
    /// Set when |r| = 1, where t diverges and p and se collapse to zero.
    pub degenerate: bool,
}

/// Computes t = r·sqrt((n−2)/(1−r²)), the two-tailed p-value, and
/// se = sqrt((1−r²)/(n−2)).
pub fn r_significance(r: f64, n: usize) -> Result<Significance, StatsError> {
    if n < 3 {
        return Err(StatsError::InsufficientSamples { needed: 3, got: n });
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(StatsError::InvalidCoefficient(r));
    }
    let df = (n - 2) as f64;
    if r.abs() == 1.0 {
        return Ok(Significance { t: r.signum() * f64::INFINITY, p: 0.0, se: 0.0, degenerate: true });
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    let p = two_tailed_p(t, df);
    let se = ((1.0 - r * r) / df).sqrt();
    Ok(Significance { t, p, se, degenerate: false })
}

/// Deterministic float formatting for delimiter-separated files: plain
/// decimal, switching to exponent form below 1e-4 where the decimal expansion
/// gets unreadable.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// One correlation cell: coefficient, t-statistic, two-tailed p, standard
/// error, and sample size.
///
/// `r = None` marks an undefined (zero-variance) correlation. For a
/// degenerate |r| = 1 cell, `t` is `None` (it diverges) while p and se are 0.
/// `n_fields` is set only in averaged matrices and counts the fields whose
/// defined coefficient entered the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub se: Option<f64>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_fields: Option<usize>,
}

impl CorrelationCell {
    fn undefined(n: usize) -> CorrelationCell {
        CorrelationCell { r: None, t: None, p: None, se: None, n, n_fields: None }
    }

    fn from_r(r: f64, n: usize) -> Result<CorrelationCell, StatsError> {
        let sig = r_significance(r, n)?;
        Ok(CorrelationCell {
            r: Some(r),
            t: sig.t.is_finite().then_some(sig.t),
            p: Some(sig.p),
            se: Some(sig.se),
            n,
            n_fields: None,
        })
    }

    pub fn is_defined(&self) -> bool {
        self.r.is_some()
    }

    /// `r|t|p|se|n` cell form used in the delimiter-separated matrix files.
    pub fn to_delimited(&self) -> String {
        let fmt = |v: Option<f64>| match v {
            Some(v) => format_float(v),
            None => "NA".to_string(),
        };
        format!("{}|{}|{}|{}|{}", fmt(self.r), fmt(self.t), fmt(self.p), fmt(self.se), self.n)
    }
}

/// Whether a matrix describes a single recruitment field or the average over
/// the per-field matrices of one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixScope {
    Averaged,
    #[serde(untagged)]
    Field(String),
}

impl MatrixScope {
    pub fn token(&self) -> &str {
        match self {
            MatrixScope::Averaged => "averaged",
            MatrixScope::Field(code) => code,
        }
    }
}

/// A symmetric grid of correlation cells over indicator dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub tier: Tier,
    pub scope: MatrixScope,
    pub level: AcademicLevel,
    pub labels: Vec<String>,
    pub cells: Vec<Vec<CorrelationCell>>,
}

impl CorrelationMatrix {
    /// Delimiter-separated grid with a header row of labels; cells are
    /// `r|t|p|se|n`, undefined components `NA`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("label");
        for label in &self.labels {
            let _ = write!(out, ",{label}");
        }
        out.push('\n');
        for (i, row) in self.cells.iter().enumerate() {
            out.push_str(&self.labels[i]);
            for cell in row {
                let _ = write!(out, ",{}", cell.to_delimited());
            }
            out.push('\n');
        }
        out
    }
}

/// Pairwise Pearson over the columns of a vector set, with significance at
/// n = row count. Requires at least 3 rows.
pub fn correlation_matrix(
    vectors: &IndicatorVectorSet,
    scope: MatrixScope,
    level: AcademicLevel,
) -> Result<CorrelationMatrix, StatsError> {
    let n = vectors.rows.len();
    if n < 3 {
        return Err(StatsError::InsufficientSamples { needed: 3, got: n });
    }
    let dims = vectors.labels.len();
    let columns: Vec<Vec<f64>> = (0..dims).map(|i| vectors.column(i)).collect();
    let mut cells = vec![vec![CorrelationCell::undefined(n); dims]; dims];
    for i in 0..dims {
        for j in i..dims {
            let cell = match pearson(&columns[i], &columns[j])? {
                Some(r) => CorrelationCell::from_r(r, n)?,
                None => CorrelationCell::undefined(n),
            };
            cells[i][j] = cell;
            cells[j][i] = cell;
        }
    }
    Ok(CorrelationMatrix { tier: vectors.tier, scope, level, labels: vectors.labels.clone(), cells })
}

/// Cell-wise unweighted mean of the defined coefficients across per-field
/// matrices of one level.
///
/// A cell undefined in some fields is averaged over the fields where it is
/// defined, with that count recorded in `n_fields`. The reported `se` is the
/// standard error of the mean of the field-level coefficients (zero for a
/// single contributing field); `n` pools the row counts of the contributing
/// fields, and t/p are recomputed from the mean coefficient at the pooled n.
pub fn average_matrices(matrices: &[CorrelationMatrix]) -> Result<CorrelationMatrix, StatsError> {
    let first = matrices.first().ok_or(StatsError::EmptyInput)?;
    for m in matrices {
        if m.tier != first.tier || m.labels != first.labels || m.level != first.level {
            return Err(StatsError::LabelMismatch);
        }
    }
    let dims = first.labels.len();
    let mut cells = vec![vec![CorrelationCell::undefined(0); dims]; dims];
    for i in 0..dims {
        for j in 0..dims {
            let defined: Vec<(f64, usize)> = matrices
                .iter()
                .filter_map(|m| m.cells[i][j].r.map(|r| (r, m.cells[i][j].n)))
                .collect();
            if defined.is_empty() {
                let n_total = matrices.iter().map(|m| m.cells[i][j].n).sum();
                cells[i][j] = CorrelationCell::undefined(n_total);
                continue;
            }
            let k = defined.len();
            let mean_r = defined.iter().map(|(r, _)| r).sum::<f64>() / k as f64;
            let mean_r = mean_r.clamp(-1.0, 1.0);
            let n_pooled: usize = defined.iter().map(|(_, n)| n).sum();
            let se_mean = if k >= 2 {
                let var =
                    defined.iter().map(|(r, _)| (r - mean_r).powi(2)).sum::<f64>() / (k - 1) as f64;
                (var / k as f64).sqrt()
            } else {
                0.0
            };
            let (t, p) = if n_pooled >= 3 {
                let sig = r_significance(mean_r, n_pooled)?;
                ((!sig.degenerate).then_some(sig.t), Some(sig.p))
            } else {
                (None, None)
            };
            cells[i][j] = CorrelationCell {
                r: Some(mean_r),
                t,
                p,
                se: Some(se_mean),
                n: n_pooled,
                n_fields: Some(k),
            };
        }
    }
    Ok(CorrelationMatrix {
        tier: first.tier,
        scope: MatrixScope::Averaged,
        level: first.level,
        labels: first.labels.clone(),
        cells,
    })
}

/// Per-field matrices plus their average for one (tier, level).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelCorrelations {
    pub per_field: Vec<CorrelationMatrix>,
    pub averaged: CorrelationMatrix,
    /// Field codes skipped for having fewer than 3 rows at this level.
    pub skipped_fields: Vec<String>,
}

/// Builds per-field correlation matrices for one academic level and averages
/// them, sharing one label space across fields so the grids align.
///
/// For the author tier, rows are candidates and dimensions are h-index scores;
/// for the other tiers, rows are publications.
pub fn level_matrices(
    profiles: &[CandidateProfile],
    tier: Tier,
    level: AcademicLevel,
) -> Result<LevelCorrelations, StatsError> {
    let at_level: Vec<&CandidateProfile> = profiles.iter().filter(|p| p.level == level).collect();
    let fields: BTreeSet<String> = at_level.iter().map(|p| p.field.code().to_string()).collect();
    let space = LabelSpace::from_publications(at_level.iter().flat_map(|p| p.publications.iter()));

    let mut per_field = Vec::new();
    let mut skipped_fields = Vec::new();
    for field in fields {
        let field_profiles: Vec<&CandidateProfile> =
            at_level.iter().copied().filter(|p| p.field.code() == field).collect();
        let vectors = match tier {
            Tier::Author => crate::scholar::author_vectors(&field_profiles),
            _ => {
                let publications: Vec<&crate::model::PublicationRecord> =
                    field_profiles.iter().flat_map(|p| p.publications.iter()).collect();
                build_vectors_in(&publications, tier, &space)?
            }
        };
        if vectors.rows.len() < 3 {
            skipped_fields.push(field);
            continue;
        }
        per_field.push(correlation_matrix(&vectors, MatrixScope::Field(field), level)?);
    }
    let averaged = average_matrices(&per_field)?;
    Ok(LevelCorrelations { per_field, averaged, skipped_fields })
}
