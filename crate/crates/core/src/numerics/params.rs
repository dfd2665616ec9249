use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

/// A named parameter tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub value: Matrix,
}

/// Ordered collection of named tensors.
///
/// The order is part of a model's contract: models address their tensors by
/// position, and checkpoints store them in this order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamStore {
    tensors: Vec<Tensor>,
}

/// Gradients share the layout of the parameters they belong to.
pub type GradStore = ParamStore;

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: Matrix) {
        self.tensors.push(Tensor {
            name: name.into(),
            value,
        });
    }

    /// Same names and shapes, all zeros.
    pub fn zeros_like(&self) -> Self {
        Self {
            tensors: self
                .tensors
                .iter()
                .map(|t| Tensor {
                    name: t.name.clone(),
                    value: Matrix::zeros(t.value.rows(), t.value.cols()),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    /// Total number of scalar entries across all tensors.
    pub fn num_scalars(&self) -> usize {
        self.tensors.iter().map(|t| t.value.len()).sum()
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    #[inline]
    pub fn value(&self, i: usize) -> &Matrix {
        &self.tensors[i].value
    }

    #[inline]
    pub fn value_mut(&mut self, i: usize) -> &mut Matrix {
        &mut self.tensors[i].value
    }

    pub fn name(&self, i: usize) -> &str {
        &self.tensors[i].name
    }

    pub fn get(&self, name: &str) -> Option<&Matrix> {
        self.tensors.iter().find(|t| t.name == name).map(|t| &t.value)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Matrix> {
        self.tensors
            .iter_mut()
            .find(|t| t.name == name)
            .map(|t| &mut t.value)
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(|t| t.value.is_finite())
    }

    /// Checks that `other` has identical names and shapes.
    pub fn check_layout(&self, other: &ParamStore) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::dim(
                "ParamStore layout",
                format!("{} tensors", self.len()),
                format!("{} tensors", other.len()),
            ));
        }
        for (a, b) in self.tensors.iter().zip(&other.tensors) {
            if a.name != b.name || a.value.shape() != b.value.shape() {
                return Err(Error::dim(
                    "ParamStore layout",
                    format!("{} {}", a.name, a.value.shape_str()),
                    format!("{} {}", b.name, b.value.shape_str()),
                ));
            }
        }
        Ok(())
    }

    /// Largest absolute entry, or 0 for an empty store.
    pub fn max_abs(&self) -> f64 {
        self.tensors
            .iter()
            .flat_map(|t| t.value.as_slice())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }
}
