use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric `k × k` matrix of edge probabilities with a block size per row.
///
/// Used both as a generator (expanded into a random graph) and, with uniform
/// block measure, as the target of exact homomorphism densities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedTemplate<T> {
    weights: Vec<Vec<T>>,
    block_sizes: Vec<usize>,
}

impl<T: Scalar> WeightedTemplate<T> {
    pub fn new(weights: Vec<Vec<T>>, block_sizes: Vec<usize>) -> Result<Self> {
        let k = weights.len();
        if k == 0 {
            return Err(Error::invalid("template needs at least one block"));
        }
        if block_sizes.len() != k {
            return Err(Error::invalid(format!(
                "{} block sizes for {k} blocks",
                block_sizes.len()
            )));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid(format!(
                    "weight row {i} has length {}, expected {k}",
                    row.len()
                )));
            }
            for (j, w) in row.iter().enumerate() {
                if *w < T::zero() || *w > T::one() {
                    return Err(Error::invalid(format!(
                        "weight [{i}][{j}] = {w} outside [0,1]"
                    )));
                }
                if weights[j][i] != *w {
                    return Err(Error::invalid(format!(
                        "weights not symmetric at [{i}][{j}]"
                    )));
                }
            }
        }
        Ok(WeightedTemplate {
            weights,
            block_sizes,
        })
    }

    /// Template with every block of size 1, for density computations where only
    /// the uniform block measure matters.
    pub fn uniform(weights: Vec<Vec<T>>) -> Result<Self> {
        let k = weights.len();
        Self::new(weights, vec![1; k])
    }

    /// Row-major `k*k` weights; convenient for CLI parsing.
    pub fn from_flat(k: usize, flat: Vec<T>, block_sizes: Vec<usize>) -> Result<Self> {
        if flat.len() != k * k {
            return Err(Error::invalid(format!(
                "expected {} weights, got {}",
                k * k,
                flat.len()
            )));
        }
        let weights = flat.chunks(k).map(|c| c.to_vec()).collect();
        Self::new(weights, block_sizes)
    }

    /// The two-block template with `p - eps` on the diagonal and `p + eps` across.
    pub fn two_block(p: T, eps: T, half: usize) -> Result<Self> {
        let inside = p.clone() - eps.clone();
        let across = p + eps;
        Self::new(
            vec![vec![inside.clone(), across.clone()], vec![across, inside]],
            vec![half, half],
        )
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> &T {
        &self.weights[i][j]
    }

    pub fn weights(&self) -> &[Vec<T>] {
        &self.weights
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn total_vertices(&self) -> usize {
        self.block_sizes.iter().sum()
    }
}
