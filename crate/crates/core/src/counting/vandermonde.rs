//! Recovery of class counts from mixed counts through the Vandermonde system
//! `z_j = Σ_i q_j^i x_i` with nodes `q_j = j/(r+1)`, `j = 1..=r+1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative residual above which a solve is flagged as ill-conditioned.
pub const RESIDUAL_WARNING: f64 = 1e-6;

pub fn nodes<T: Scalar>(r: usize) -> Vec<T> {
    (1..=r + 1)
        .map(|j| T::of_usize(j) / T::of_usize(r + 1))
        .collect()
}

/// Row `j`, column `i` holds `q_j^i`.
pub fn matrix<T: Scalar>(r: usize) -> Vec<Vec<T>> {
    nodes::<T>(r)
        .into_iter()
        .map(|q| (0..=r).map(|i| q.powu(i as u32)).collect())
        .collect()
}

pub fn forward_mixed_counts<T: Scalar>(x: &[T]) -> Vec<T> {
    mat_vec(&matrix::<T>(x.len() - 1), x)
}

fn mat_vec<T: Scalar>(a: &[Vec<T>], x: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
}

/// Gaussian elimination with partial pivoting on a copy of `a`.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Result<Vec<T>> {
    let n = b.len();
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[i][col]
                    .abs()
                    .partial_cmp(&m[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty column");
        if m[pivot][col].is_zero() {
            return Err(Error::Invariant("singular Vandermonde system".into()));
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col].clone() / m[col][col].clone();
            if f.is_zero() {
                continue;
            }
            for k in col..=n {
                let delta = f.clone() * m[col][k].clone();
                m[row][k] = m[row][k].clone() - delta;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = m[row][n].clone();
        for k in row + 1..n {
            acc = acc - m[row][k].clone() * x[k].clone();
        }
        x[row] = acc / m[row][row].clone();
    }
    Ok(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct Recovery<T> {
    pub x: Vec<T>,
    /// `max_j |(Ax - z)_j| / max_j |z_j|`.
    pub relative_residual: f64,
    pub ill_conditioned: bool,
}

/// Solves `A x = z` for the class counts; floats get one refinement step.
pub fn vandermonde_recover<T: Scalar>(observed: &[T]) -> Result<Recovery<T>> {
    if observed.is_empty() {
        return Err(Error::invalid("need r+1 >= 1 mixed counts"));
    }
    let r = observed.len() - 1;
    let a = matrix::<T>(r);
    let mut x = solve(&a, observed)?;
    if !T::EXACT {
        let resid: Vec<T> = observed
            .iter()
            .zip(mat_vec(&a, &x))
            .map(|(z, ax)| z.clone() - ax)
            .collect();
        let corr = solve(&a, &resid)?;
        for (xi, c) in x.iter_mut().zip(corr) {
            *xi = xi.clone() + c;
        }
    }
    let ax = mat_vec(&a, &x);
    let num = observed
        .iter()
        .zip(&ax)
        .map(|(z, v)| (z.clone() - v.clone()).abs().as_f64())
        .fold(0.0, f64::max);
    let den = observed
        .iter()
        .map(|z| z.abs().as_f64())
        .fold(0.0, f64::max);
    let relative_residual = if den == 0.0 { num } else { num / den };
    Ok(Recovery {
        x,
        relative_residual,
        ill_conditioned: relative_residual > RESIDUAL_WARNING,
    })
}

/// `A^{-1}` by solving against unit vectors.
pub fn inverse<T: Scalar>(r: usize) -> Result<Vec<Vec<T>>> {
    let a = matrix::<T>(r);
    let mut cols = Vec::with_capacity(r + 1);
    for j in 0..=r {
        let e: Vec<T> = (0..=r)
            .map(|i| if i == j { T::one() } else { T::zero() })
            .collect();
        cols.push(solve(&a, &e)?);
    }
    Ok((0..=r)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect())
}

/// `|a|`: largest absolute entry of `A^{-1}`.
pub fn inverse_max_abs<T: Scalar>(r: usize) -> Result<T> {
    Ok(inverse::<T>(r)?
        .into_iter()
        .flatten()
        .map(|v| v.abs())
        .fold(T::zero(), T::max_of))
}

/// Worst-case coordinate error of the recovered vector when every mixed count
/// is off by at most `delta`: `(r+1)·|a|·δ`.
pub fn perturbation_bound<T: Scalar>(r: usize, delta: &T) -> Result<T> {
    Ok(T::of_usize(r + 1) * inverse_max_abs::<T>(r)? * delta.clone())
}
