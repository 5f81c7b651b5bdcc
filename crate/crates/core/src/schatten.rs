//! Schatten norms of discretized operators and the mixed norms `‖·‖_{p,μ}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::pairwise_sum;
use crate::grid::Grid;
use crate::kernel::{duflo_moore_powers, KernelMatrix, OperatorField};
use crate::repr::RepLabel;

/// Singular values in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn of(m: &DMatrix<Complex64>) -> Self {
        if m.is_empty() {
            return SingularSpectrum { values: Vec::new() };
        }
        let mut values: Vec<f64> = m.singular_values().iter().copied().collect();
        values.sort_by(|a, b| b.total_cmp(a));
        SingularSpectrum { values }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `(Σ σ_i^r)^{1/r}`; values below `1e-14·σ_max` are dropped.
    pub fn norm(&self, r: f64) -> Result<f64> {
        check_order(r)?;
        if r.is_infinite() {
            return Ok(self.max());
        }
        Ok(self.power_sum(r).powf(1.0 / r))
    }

    /// `Σ σ_i^r` with the small-value cutoff.
    pub fn power_sum(&self, r: f64) -> f64 {
        let cut = 1e-14 * self.max();
        let terms: Vec<f64> = self
            .values
            .iter()
            .filter(|&&s| s > cut)
            .map(|s| s.powf(r))
            .collect();
        pairwise_sum(&terms)
    }
}

fn check_order(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidExponent(r));
    }
    Ok(())
}

/// `D_row^{1/2}·K·D_col^{1/2}`: the matrix whose singular values approximate
/// those of the integral operator.
pub fn weighted_matrix(k: &KernelMatrix) -> DMatrix<Complex64> {
    let mut m = k.entries.clone();
    weight_in_place(&mut m, k.row_grid.weights(), k.col_grid.weights());
    m
}

pub(crate) fn weight_in_place(m: &mut DMatrix<Complex64>, rows: &[f64], cols: &[f64]) {
    let rs: Vec<f64> = rows.iter().map(|w| w.sqrt()).collect();
    for (j, mut col) in m.column_iter_mut().enumerate() {
        let cj = cols[j].sqrt();
        for (i, v) in col.iter_mut().enumerate() {
            *v *= rs[i] * cj;
        }
    }
}

pub fn frobenius_norm(m: &DMatrix<Complex64>) -> f64 {
    let terms: Vec<f64> = m.iter().map(|v| v.norm_sqr()).collect();
    pairwise_sum(&terms).sqrt()
}

/// Schatten `r`-norm, `1 ≤ r ≤ ∞` (`f64::INFINITY` for the operator norm).
/// `r = 2` is evaluated as the Frobenius norm and `r = 4` as `‖M*M‖_F^{1/2}`.
pub fn schatten_norm(m: &DMatrix<Complex64>, r: f64) -> Result<f64> {
    check_order(r)?;
    if r == 2.0 {
        return Ok(frobenius_norm(m));
    }
    if r == 4.0 {
        return Ok(gram_frobenius_sq(m).sqrt().sqrt());
    }
    SingularSpectrum::of(m).norm(r)
}

/// `‖M*M‖_F² = Σσ⁴`. With `M = A + iB`, `M*M = (AᵀA + BᵀB) + i(X − Xᵀ)`
/// for `X = AᵀB`; real products are several times faster than a complex SVD.
fn gram_frobenius_sq(m: &DMatrix<Complex64>) -> f64 {
    let a = m.map(|v| v.re);
    let b = m.map(|v| v.im);
    let re = a.tr_mul(&a) + b.tr_mul(&b);
    let x = a.tr_mul(&b);
    let im = &x - x.transpose();
    re.norm_squared() + im.norm_squared()
}

/// `‖A·K_ρ^{1/p}‖_{S_p}` for one kernel on a representation grid
/// (`K_ρ^0` at `p = ∞`).
pub fn entry_norm(label: RepLabel, grid: &Grid, a: &DMatrix<Complex64>, p: f64) -> Result<f64> {
    check_order(p)?;
    schatten_norm(&entry_matrix(label, grid, a, p), p)
}

fn entry_matrix(label: RepLabel, grid: &Grid, a: &DMatrix<Complex64>, p: f64) -> DMatrix<Complex64> {
    let e = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let dm = duflo_moore_powers(label, grid, e);
    let cols: Vec<f64> = grid.weights().iter().zip(&dm).map(|(w, k)| w * k * k).collect();
    let mut m = a.clone();
    weight_in_place(&mut m, grid.weights(), &cols);
    m
}

/// Streaming accumulator for `‖·‖_{p,μ}`.
#[derive(Debug, Clone)]
pub struct MixedNormAccumulator {
    p: f64,
    terms: Vec<f64>,
    max: f64,
}

impl MixedNormAccumulator {
    pub fn new(p: f64) -> Result<Self> {
        check_order(p)?;
        Ok(MixedNormAccumulator {
            p,
            terms: Vec::new(),
            max: 0.0,
        })
    }

    /// Add the entry at a group node of Haar weight `w`.
    /// At `p = ∞` the spectrum is skipped whenever the Frobenius norm, an
    /// upper bound, cannot raise the running maximum.
    pub fn add(&mut self, label: RepLabel, grid: &Grid, entry: &DMatrix<Complex64>, w: f64) -> Result<()> {
        if entry.iter().all(|v| *v == Complex64::default()) {
            return Ok(());
        }
        let m = entry_matrix(label, grid, entry, self.p);
        if self.p.is_infinite() {
            if frobenius_norm(&m) > self.max {
                self.max = self.max.max(SingularSpectrum::of(&m).max());
            }
        } else {
            self.terms.push(w * schatten_norm(&m, self.p)?.powf(self.p));
        }
        Ok(())
    }

    pub fn value(&self) -> f64 {
        if self.p.is_infinite() {
            self.max
        } else {
            pairwise_sum(&self.terms).powf(1.0 / self.p)
        }
    }
}

/// `‖F‖_{p,μ}`: counting measure on the labels, the group grid's Haar
/// weights, and `K_ρ^{1/p}` on the right of every entry.
pub fn mixed_norm(field: &OperatorField, p: f64) -> Result<f64> {
    let mut acc = MixedNormAccumulator::new(p)?;
    for (l, label) in field.labels.iter().enumerate() {
        let grid = &field.rep_grids[l];
        for (x, entry) in field.entries[l].iter().enumerate() {
            acc.add(*label, grid, entry, field.group.weight(x))?;
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag34() -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 4.0),
        ]))
    }

    #[test]
    fn diagonal_examples() {
        let m = diag34();
        assert!((schatten_norm(&m, 2.0).unwrap() - 5.0).abs() < 1e-12);
        assert!((schatten_norm(&m, 1.0).unwrap() - 7.0).abs() < 1e-12);
        assert!((schatten_norm(&m, f64::INFINITY).unwrap() - 4.0).abs() < 1e-12);
        assert!(schatten_norm(&m, 0.5).is_err());
    }

    #[test]
    fn spectrum_sorted() {
        let s = SingularSpectrum::of(&diag34());
        assert_eq!(s.values.len(), 2);
        assert!(s.values[0] >= s.values[1]);
    }

    #[test]
    fn four_norm_matches_the_spectrum() {
        let m = DMatrix::from_fn(7, 5, |i, j| Complex64::new((i as f64 - j as f64).sin(), 0.2 * (i * j) as f64 - 1.0));
        let via_svd = SingularSpectrum::of(&m).norm(4.0).unwrap();
        let got = schatten_norm(&m, 4.0).unwrap();
        assert!((got / via_svd - 1.0).abs() < 1e-12, "{got} vs {via_svd}");
        assert!((schatten_norm(&diag34(), 4.0).unwrap() - 337f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn svd_two_norm_matches_frobenius() {
        let m = DMatrix::from_fn(6, 5, |i, j| Complex64::new((i * j) as f64 - 2.0, i as f64 * 0.3));
        let via_svd = SingularSpectrum::of(&m).norm(2.0).unwrap();
        assert!((via_svd / frobenius_norm(&m) - 1.0).abs() < 1e-12);
    }
}
