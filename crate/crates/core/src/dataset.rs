//! Labelled feature table shared by the statistics, classifiers and explainer.

use thiserror::Error;

use crate::features::{FeatureVector, FEATURE_NAMES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("{labels} labels for {rows} rows")]
    LabelCountMismatch { labels: usize, rows: usize },
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("feature index {0} out of range")]
    UnknownFeature(usize),
    #[error("feature {0:?} not present in the dataset")]
    MissingFeature(String),
    #[error("a dataset needs at least one feature column")]
    NoFeatures,
}

/// Rows of `(device label, feature values)` with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatureSet {
    names: Vec<String>,
    values: Vec<f64>,
    labels: Vec<u32>,
}

impl LabeledFeatureSet {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<u32>) -> Result<Self, DatasetError> {
        if names.is_empty() {
            return Err(DatasetError::NoFeatures);
        }
        if rows.len() != labels.len() {
            return Err(DatasetError::LabelCountMismatch {
                labels: labels.len(),
                rows: rows.len(),
            });
        }
        let width = names.len();
        let mut values = Vec::with_capacity(rows.len() * width);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(DatasetError::RaggedRow {
                    row: r,
                    found: row.len(),
                    expected: width,
                });
            }
            if let Some(column) = row.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite { row: r, column });
            }
            values.extend_from_slice(row);
        }
        Ok(Self { names, values, labels })
    }

    /// Ten-column set named `P1..P10`.
    pub fn from_features(labels: Vec<u32>, features: &[FeatureVector]) -> Result<Self, DatasetError> {
        let rows = features.iter().map(|f| f.as_array().to_vec()).collect();
        Self::new(FEATURE_NAMES.iter().map(|s| s.to_string()).collect(), rows, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.names.len();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.names.len())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Vec<u32> {
        let mut c = self.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let w = self.names.len();
        let mut values = Vec::with_capacity(indices.len() * w);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self {
            names: self.names.clone(),
            values,
            labels,
        }
    }

    /// Keeps only the columns at `columns` (0-based), in that order.
    pub fn select_features(&self, columns: &[usize]) -> Result<Self, DatasetError> {
        if columns.is_empty() {
            return Err(DatasetError::NoFeatures);
        }
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.names.len()) {
            return Err(DatasetError::UnknownFeature(bad));
        }
        let names = columns.iter().map(|&c| self.names[c].clone()).collect();
        let values = self
            .rows()
            .flat_map(|r| columns.iter().map(move |&c| r[c]))
            .collect();
        Ok(Self {
            names,
            values,
            labels: self.labels.clone(),
        })
    }

    /// Keeps the named columns, in the given order.
    pub fn select_by_name(&self, names: &[String]) -> Result<Self, DatasetError> {
        let columns = names
            .iter()
            .map(|n| {
                self.names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| DatasetError::MissingFeature(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.select_features(&columns)
    }

    /// Same rows with labels replaced.
    pub fn with_labels(&self, labels: Vec<u32>) -> Result<Self, DatasetError> {
        if labels.len() != self.len() {
            return Err(DatasetError::LabelCountMismatch {
                labels: labels.len(),
                rows: self.len(),
            });
        }
        Ok(Self {
            names: self.names.clone(),
            values: self.values.clone(),
            labels,
        })
    }
}
