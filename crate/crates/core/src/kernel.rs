//! Discretized integral operators and operator-valued fields on a group grid.

use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::repr::{duflo_moore_weights, RepLabel};

/// Kernel `K(x,y)` of the operator `(Aφ)(x_i) = Σ_j K(x_i,y_j)·w_j·φ(y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub row_grid: Arc<Grid>,
    pub col_grid: Arc<Grid>,
    pub entries: DMatrix<Complex64>,
}

impl KernelMatrix {
    pub fn new(row_grid: Arc<Grid>, col_grid: Arc<Grid>, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != row_grid.len() || entries.ncols() != col_grid.len() {
            return Err(Error::IncompatibleGrid(format!(
                "{}×{} kernel on {}×{} grids",
                entries.nrows(),
                entries.ncols(),
                row_grid.len(),
                col_grid.len()
            )));
        }
        Ok(KernelMatrix {
            row_grid,
            col_grid,
            entries,
        })
    }

    pub fn zeros(row_grid: Arc<Grid>, col_grid: Arc<Grid>) -> Self {
        let entries = DMatrix::zeros(row_grid.len(), col_grid.len());
        KernelMatrix {
            row_grid,
            col_grid,
            entries,
        }
    }

    /// Kernel of a node operator `O` (with `(Oφ)_i = Σ_j O_ij φ_j`): `O·D⁻¹`.
    pub fn from_node_operator(grid: Arc<Grid>, mut op: DMatrix<Complex64>) -> Result<Self> {
        for (j, mut col) in op.column_iter_mut().enumerate() {
            col /= Complex64::from(grid.weight(j));
        }
        KernelMatrix::new(grid.clone(), grid, op)
    }

    /// Apply the operator to node values.
    pub fn apply(&self, phi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.col_grid.check_len(phi.len())?;
        let v = nalgebra::DVector::from_iterator(
            phi.len(),
            phi.iter().enumerate().map(|(j, p)| p * self.col_grid.weight(j)),
        );
        Ok((&self.entries * v).iter().copied().collect())
    }

    /// Right-multiply by `K_ρ^e`: `K(x,y) ↦ K(x,y)·k(y)^e`.
    pub fn with_duflo_moore(&self, label: RepLabel, exponent: f64) -> Result<Self> {
        label.check_grid(&self.col_grid)?;
        let mut out = self.clone();
        scale_columns(&mut out.entries, &duflo_moore_powers(label, &self.col_grid, exponent));
        Ok(out)
    }

    /// Operator adjoint in `L²` of the grids.
    pub fn adjoint(&self) -> Self {
        KernelMatrix {
            row_grid: self.col_grid.clone(),
            col_grid: self.row_grid.clone(),
            entries: self.entries.adjoint(),
        }
    }

    /// CSV `row_index,col_index,re,im` of the nonzero entries.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "row_index,col_index,re,im")?;
        for i in 0..self.entries.nrows() {
            for j in 0..self.entries.ncols() {
                let v = self.entries[(i, j)];
                if v != Complex64::default() {
                    writeln!(out, "{i},{j},{:e},{:e}", v.re, v.im)?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn duflo_moore_powers(label: RepLabel, grid: &Grid, exponent: f64) -> Vec<f64> {
    duflo_moore_weights(label, grid)
        .into_iter()
        .map(|k| if exponent == 0.0 { 1.0 } else { k.powf(exponent) })
        .collect()
}

pub(crate) fn scale_columns(m: &mut DMatrix<Complex64>, s: &[f64]) {
    for (j, mut col) in m.column_iter_mut().enumerate() {
        col *= Complex64::from(s[j]);
    }
}

/// `Tr(A*·B·K_ρ)` for kernels on the same representation grid.
///
/// With `M = D^{1/2} K D^{1/2}` this is `Σ_ij conj(M_A)_ij (M_B)_ij k_j`.
pub fn trace_pairing(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, weights: &[f64], dm: &[f64]) -> Complex64 {
    let n = weights.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut terms = Vec::with_capacity(n);
        for i in 0..n {
            terms.push(a[(i, j)].conj() * b[(i, j)] * weights[i]);
        }
        cols.push(crate::grid::pairwise_sum_complex(&terms) * (weights[j] * dm[j]));
    }
    crate::grid::pairwise_sum_complex(&cols)
}

/// An operator-valued function on `(group grid) × (dual labels)`.
///
/// Entries are kernels on the label's representation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorField {
    pub group: Arc<Grid>,
    pub labels: Vec<RepLabel>,
    pub rep_grids: Vec<Arc<Grid>>,
    /// `entries[label][node]`.
    pub entries: Vec<Vec<DMatrix<Complex64>>>,
}

/// The symbol `σ` of a Weyl transform.
pub type SymbolField = OperatorField;
/// `W(f,g)(x,ρ)`.
pub type WignerField = OperatorField;

impl OperatorField {
    pub fn zeros(group: Arc<Grid>, labels: Vec<RepLabel>, rep_grids: Vec<Arc<Grid>>) -> Result<Self> {
        check_labels(&group, &labels, &rep_grids)?;
        let entries = rep_grids
            .iter()
            .map(|g| vec![DMatrix::zeros(g.len(), g.len()); group.len()])
            .collect();
        Ok(OperatorField {
            group,
            labels,
            rep_grids,
            entries,
        })
    }

    /// Build a field entry by entry.
    pub fn from_fn(
        group: Arc<Grid>,
        labels: Vec<RepLabel>,
        rep_grids: Vec<Arc<Grid>>,
        mut f: impl FnMut(usize, usize) -> DMatrix<Complex64>,
    ) -> Result<Self> {
        check_labels(&group, &labels, &rep_grids)?;
        let mut entries = Vec::with_capacity(labels.len());
        for (l, g) in rep_grids.iter().enumerate() {
            let mut per_node = Vec::with_capacity(group.len());
            for x in 0..group.len() {
                let m = f(l, x);
                if m.nrows() != g.len() || m.ncols() != g.len() {
                    return Err(Error::IncompatibleGrid(format!(
                        "entry ({l},{x}) is {}×{}, grid has {} nodes",
                        m.nrows(),
                        m.ncols(),
                        g.len()
                    )));
                }
                per_node.push(m);
            }
            entries.push(per_node);
        }
        Ok(OperatorField {
            group,
            labels,
            rep_grids,
            entries,
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for per in &mut out.entries {
            for m in per {
                *m *= c;
            }
        }
        out
    }

    /// Pointwise operator adjoint `σ*(x,ρ) = σ(x,ρ)*`.
    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for per in &mut out.entries {
            for m in per {
                *m = m.adjoint();
            }
        }
        out
    }

    pub fn same_shape(&self, other: &OperatorField) -> Result<()> {
        if self.labels != other.labels
            || self.group.len() != other.group.len()
            || self
                .rep_grids
                .iter()
                .zip(&other.rep_grids)
                .any(|(a, b)| a.len() != b.len())
        {
            return Err(Error::IncompatibleGrid("operator fields differ in shape".into()));
        }
        Ok(())
    }
}

fn check_labels(group: &Grid, labels: &[RepLabel], rep_grids: &[Arc<Grid>]) -> Result<()> {
    let tag = group
        .group_tag()
        .ok_or_else(|| Error::IncompatibleGrid("field needs a group grid".into()))?;
    if labels.len() != rep_grids.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            got: rep_grids.len(),
        });
    }
    for (l, g) in labels.iter().zip(rep_grids) {
        if l.group() != tag {
            return Err(Error::GroupMismatch(l.group(), tag));
        }
        l.check_grid(g)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_halfline_grid_with, Rule, Sign};

    #[test]
    fn node_operator_round_trip() {
        let g = Arc::new(build_halfline_grid_with(Sign::Plus, 5, 1.0, 3.0, Rule::Lattice).unwrap());
        let op = DMatrix::from_fn(5, 5, |i, j| Complex64::new(i as f64, j as f64));
        let k = KernelMatrix::from_node_operator(g.clone(), op.clone()).unwrap();
        let phi: Vec<Complex64> = (0..5).map(|j| Complex64::new(1.0, j as f64)).collect();
        let direct = &op * nalgebra::DVector::from_vec(phi.clone());
        let via = k.apply(&phi).unwrap();
        for (a, b) in direct.iter().zip(&via) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn csv_lists_nonzeros() {
        let g = Arc::new(build_halfline_grid_with(Sign::Plus, 3, 1.0, 3.0, Rule::Lattice).unwrap());
        let mut k = KernelMatrix::zeros(g.clone(), g);
        k.entries[(1, 2)] = Complex64::new(0.5, -1.0);
        let mut buf = Vec::new();
        k.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 2);
        assert!(s.lines().nth(1).unwrap().starts_with("1,2,"));
    }

    #[test]
    fn dimension_checks() {
        let g = Arc::new(build_halfline_grid_with(Sign::Plus, 3, 1.0, 3.0, Rule::Lattice).unwrap());
        assert!(KernelMatrix::new(g.clone(), g, DMatrix::zeros(2, 3)).is_err());
    }
}
