//! Irreducible representations acting on sampled functions, and the
//! Duflo–Moore operators.
//!
//! In the log/hyperbolic coordinates used by the grids every representation
//! is a translation of the argument times a phase:
//!
//! * `ρ±(b,a)u(s) = a^{1/2} e^{−ibs} u(as)` moves `ln|s|` by `ln a`;
//! * `π(b,a,θ)φ(x) = a e^{−ib·x} φ(aR_{−θ}x)` moves `(ln r, φ)` by `(ln a, −θ)`;
//! * `π_i^j(b,a,ϑ)φ(x) = a e^{i⟨x;b⟩} φ(aΛ_{−ϑ}x)` moves `(ln r, u)` by
//!   `(ln a, −εϑ)` with `ε` the cone's boost sign.
//!
//! Off-node arguments are handled by linear interpolation in those
//! coordinates; arguments outside the truncated domain give zero.

use std::f64::consts::TAU;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{minkowski, Cone, DomainTag, Grid};
use crate::group::{GroupElement, GroupTag};

/// A point of the dual of one of the groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepLabel {
    RhoPlus,
    RhoMinus,
    Pi,
    PiCone(Cone),
}

impl RepLabel {
    pub fn group(self) -> GroupTag {
        match self {
            RepLabel::RhoPlus | RepLabel::RhoMinus => GroupTag::Affine,
            RepLabel::Pi => GroupTag::Sim2,
            RepLabel::PiCone(_) => GroupTag::PoincareAff,
        }
    }

    /// The representation space of the label.
    pub fn domain(self) -> DomainTag {
        match self {
            RepLabel::RhoPlus => DomainTag::HalfLinePlus,
            RepLabel::RhoMinus => DomainTag::HalfLineMinus,
            RepLabel::Pi => DomainTag::Plane,
            RepLabel::PiCone(c) => DomainTag::Cone(c),
        }
    }

    /// The full dual of a group, in a fixed order.
    pub fn all(tag: GroupTag) -> Vec<RepLabel> {
        match tag {
            GroupTag::Affine => vec![RepLabel::RhoPlus, RepLabel::RhoMinus],
            GroupTag::Sim2 => vec![RepLabel::Pi],
            GroupTag::PoincareAff => Cone::ALL.iter().map(|&c| RepLabel::PiCone(c)).collect(),
        }
    }

    pub fn name(self) -> String {
        match self {
            RepLabel::RhoPlus => "rho+".into(),
            RepLabel::RhoMinus => "rho-".into(),
            RepLabel::Pi => "pi".into(),
            RepLabel::PiCone(c) => {
                let (i, j) = c.indices();
                format!("pi{i}{j}")
            }
        }
    }

    pub(crate) fn check_grid(self, grid: &Grid) -> Result<()> {
        if grid.domain() != self.domain() {
            return Err(Error::IncompatibleGrid(format!(
                "{} acts on {:?}, grid is {:?}",
                self.name(),
                self.domain(),
                grid.domain()
            )));
        }
        Ok(())
    }
}

/// Samples of a function on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        grid.check_len(values.len())?;
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        GridFunction {
            grid,
            values: vec![Complex64::default(); n],
        }
    }

    /// Sample `f` at the node coordinates.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.coords(k))).collect();
        GridFunction { grid, values }
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid.l2_norm(&self.values)
    }

    /// `⟨self, other⟩ = Σ w·self·conj(other)`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.grid.check_len(other.values.len())?;
        let p: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u * v.conj())
            .collect();
        self.grid.integrate_complex(&p)
    }

    /// CSV with columns `x1[,x2,…],re,im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (1..=self.grid.dim()).map(|d| format!("x{d}")).collect();
        writeln!(out, "{},re,im", header.join(","))?;
        for (k, v) in self.values.iter().enumerate() {
            let row: Vec<String> = self.grid.coords(k).iter().map(|c| format!("{c:e}")).collect();
            writeln!(out, "{},{:e},{:e}", row.join(","), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Duflo–Moore weight of a label at a point of its representation space.
///
/// `K± = |s|/2π`, `K_π = ‖x‖²/(2π)²`, `K_{i,j} = |⟨x;x⟩|/(2π)²`. The
/// constants make the Plancherel and inversion formulas exact for the
/// unnormalized group Fourier transform `f̂(ρ) = ∫ f(g)ρ(g) dμ_L(g)`.
pub fn duflo_moore_weight(label: RepLabel, x: [f64; 2]) -> f64 {
    match label {
        RepLabel::RhoPlus | RepLabel::RhoMinus => x[0].abs() / TAU,
        RepLabel::Pi => (x[0] * x[0] + x[1] * x[1]) / (TAU * TAU),
        RepLabel::PiCone(_) => minkowski(x, x).abs() / (TAU * TAU),
    }
}

/// Duflo–Moore weights at every node of a representation grid.
pub fn duflo_moore_weights(label: RepLabel, grid: &Grid) -> Vec<f64> {
    (0..grid.len())
        .map(|k| duflo_moore_weight(label, grid.point(k)))
        .collect()
}

/// A fractional power `K_ρ^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DufloMooreSpec {
    rep: RepLabel,
    exponent: f64,
}

impl DufloMooreSpec {
    pub fn new(rep: RepLabel, exponent: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&exponent) {
            return Err(Error::InvalidExponent(exponent));
        }
        Ok(DufloMooreSpec { rep, exponent })
    }

    pub fn rep(&self) -> RepLabel {
        self.rep
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// Multiply `φ` pointwise by `K_ρ^e`.
pub fn apply_duflo_moore(spec: DufloMooreSpec, phi: &GridFunction) -> Result<GridFunction> {
    spec.rep.check_grid(&phi.grid)?;
    let values = phi
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * duflo_moore_weight(spec.rep, phi.grid.point(k)).powf(spec.exponent))
        .collect();
    Ok(GridFunction {
        grid: phi.grid.clone(),
        values,
    })
}

/// A sparse operator on node values, stored row by row.
///
/// `(Oφ)_i = Σ_j O_ij φ_j`. For a representation each row has at most four
/// entries (one per interpolation corner).
#[derive(Debug, Clone, PartialEq)]
pub struct RepOperator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl RepOperator {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, o)| o * v[j]).sum())
            .collect()
    }

    /// The dense node operator, row-major `n×n`.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.n * self.n];
        for i in 0..self.n {
            for (j, o) in self.row(i) {
                out[i * self.n + j] += o;
            }
        }
        out
    }
}

/// Per-node transformed coordinates of a representation grid.
pub(crate) fn node_axis_coords(grid: &Grid) -> Vec<Vec<f64>> {
    (0..grid.len())
        .map(|k| {
            grid.multi_index(k)
                .iter()
                .zip(grid.axes())
                .map(|(&i, ax)| ax.coord(i))
                .collect()
        })
        .collect()
}

/// Shift of the grid coordinates produced by the dilation/rotation part of `g`.
pub(crate) fn coordinate_shift(label: RepLabel, a: f64, angle: f64) -> Vec<f64> {
    match label {
        RepLabel::RhoPlus | RepLabel::RhoMinus => vec![a.ln()],
        RepLabel::Pi => vec![a.ln(), -angle],
        RepLabel::PiCone(c) => vec![a.ln(), -c.boost_sign() * angle],
    }
}

/// Amplitude and phase factor of `ρ(g)` at the point `x`.
#[inline]
pub(crate) fn rep_factor(label: RepLabel, b: [f64; 2], a: f64, x: [f64; 2]) -> Complex64 {
    match label {
        RepLabel::RhoPlus | RepLabel::RhoMinus => Complex64::from_polar(a.sqrt(), -b[0] * x[0]),
        RepLabel::Pi => Complex64::from_polar(a, -(b[0] * x[0] + b[1] * x[1])),
        RepLabel::PiCone(_) => Complex64::from_polar(a, minkowski(x, b)),
    }
}

/// Amplitude of `ρ(b,a,·)`: `a^{1/2}` on the half-lines, `a` otherwise.
#[inline]
pub(crate) fn rep_amplitude(label: RepLabel, a: f64) -> f64 {
    match label {
        RepLabel::RhoPlus | RepLabel::RhoMinus => a.sqrt(),
        _ => a,
    }
}

/// Coefficients `c(x)` with phase of `ρ(b,·,·)` at `x` equal to `e^{i b·c(x)}`.
#[inline]
pub(crate) fn phase_coefficients(label: RepLabel, x: [f64; 2]) -> [f64; 2] {
    match label {
        RepLabel::RhoPlus | RepLabel::RhoMinus => [-x[0], 0.0],
        RepLabel::Pi => [-x[0], -x[1]],
        RepLabel::PiCone(_) => [x[0], -x[1]],
    }
}

fn check_element(label: RepLabel, g: &GroupElement) -> Result<()> {
    if g.tag() != label.group() {
        return Err(Error::GroupMismatch(g.tag(), label.group()));
    }
    Ok(())
}

/// The sampled operator `ρ(g)` on the nodes of `grid`.
pub fn representation_operator(label: RepLabel, g: &GroupElement, grid: &Grid) -> Result<RepOperator> {
    check_element(label, g)?;
    label.check_grid(grid)?;
    let coords = node_axis_coords(grid);
    Ok(operator_from_coords(label, g, grid, &coords))
}

pub(crate) fn operator_from_coords(
    label: RepLabel,
    g: &GroupElement,
    grid: &Grid,
    coords: &[Vec<f64>],
) -> RepOperator {
    let shift = coordinate_shift(label, g.a(), g.angle());
    let n = grid.len();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(4 * n);
    let mut vals = Vec::with_capacity(4 * n);
    row_ptr.push(0);
    let mut target = vec![0.0; shift.len()];
    for (i, t) in coords.iter().enumerate() {
        for d in 0..shift.len() {
            target[d] = t[d] + shift[d];
        }
        if let Some(st) = grid.stencil(&target) {
            let c = rep_factor(label, g.b(), g.a(), grid.point(i));
            for (j, w) in st.entries {
                if w != 0.0 {
                    cols.push(j);
                    vals.push(c * w);
                }
            }
        }
        row_ptr.push(cols.len());
    }
    RepOperator {
        n,
        row_ptr,
        cols,
        vals,
    }
}

/// `ρ(g)φ` sampled on the grid of `φ`.
pub fn apply_representation(label: RepLabel, g: &GroupElement, phi: &GridFunction) -> Result<GridFunction> {
    let op = representation_operator(label, g, &phi.grid)?;
    Ok(GridFunction {
        grid: phi.grid.clone(),
        values: op.apply(&phi.values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_cone_grid_with, build_halfline_grid_with, build_plane_grid_with, Rule, Sign};
    use crate::group::{identity, multiply};

    fn gauss_halfline() -> GridFunction {
        let g = Arc::new(build_halfline_grid_with(Sign::Plus, 128, 1e-3, 50.0, Rule::Lattice).unwrap());
        GridFunction::from_fn(g, |x| {
            let l = x[0].ln();
            Complex64::new((-(l * l) / 2.0).exp(), 0.0)
        })
    }

    #[test]
    fn identity_is_exact() {
        let phi = gauss_halfline();
        let out = apply_representation(RepLabel::RhoPlus, &identity(GroupTag::Affine), &phi).unwrap();
        assert_eq!(out.values, phi.values);
    }

    #[test]
    fn lattice_dilation_reindexes() {
        let phi = gauss_halfline();
        let ax = phi.grid.axes()[0];
        let a = (3.0 * ax.step).exp();
        let g = GroupElement::affine(0.0, a).unwrap();
        let out = apply_representation(RepLabel::RhoPlus, &g, &phi).unwrap();
        for k in 0..phi.values.len() - 3 {
            let want = a.sqrt() * phi.values[k + 3].norm();
            assert!((out.values[k].norm() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_grid_or_group_rejected() {
        let phi = gauss_halfline();
        assert!(apply_representation(RepLabel::RhoMinus, &identity(GroupTag::Affine), &phi).is_err());
        assert!(apply_representation(RepLabel::RhoPlus, &identity(GroupTag::Sim2), &phi).is_err());
    }

    #[test]
    fn duflo_moore_examples() {
        let g = Arc::new(build_halfline_grid_with(Sign::Plus, 2, 1.0, 2.0, Rule::Lattice).unwrap());
        let phi = GridFunction::new(g, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let spec = DufloMooreSpec::new(RepLabel::RhoPlus, 1.0).unwrap();
        let out = apply_duflo_moore(spec, &phi).unwrap();
        assert!((out.values[1].re - 2.0 / TAU).abs() < 1e-15);
        let id = apply_duflo_moore(DufloMooreSpec::new(RepLabel::RhoPlus, 0.0).unwrap(), &phi).unwrap();
        assert_eq!(id.values, phi.values);
        assert!(DufloMooreSpec::new(RepLabel::Pi, 1.5).is_err());

        let cone = build_cone_grid_with(1, 1, 4, 3, 0.5, 2.0, 1.0, Rule::Lattice).unwrap();
        for k in 0..cone.len() {
            let r = cone.axes()[0].value(cone.multi_index(k)[0]);
            let w = duflo_moore_weight(RepLabel::PiCone(Cone::C11), cone.point(k));
            assert!((w.sqrt() - r / TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_rotation_by_grid_angle_is_exact() {
        let grid = Arc::new(build_plane_grid_with(16, 8, 0.1, 4.0, Rule::Lattice).unwrap());
        let phi = GridFunction::from_fn(grid.clone(), |x| Complex64::new(x[0] + 2.0 * x[1], x[1]));
        let g = GroupElement::sim2([0.0, 0.0], 1.0, TAU / 8.0).unwrap();
        let out = apply_representation(RepLabel::Pi, &g, &phi).unwrap();
        // (πφ)(x) = φ(R_{−θ}x): node (r, φ_k) reads node (r, φ_{k−1}).
        for k in 0..grid.len() {
            let idx = grid.multi_index(k);
            let src = grid.flat_index(&[idx[0], (idx[1] + 7) % 8]);
            assert!((out.values[k] - phi.values[src]).norm() < 1e-12);
        }
    }

    #[test]
    fn homomorphism_on_lattice() {
        let grid = Arc::new(build_cone_grid_with(1, 2, 24, 17, 0.05, 5.0, 2.0, Rule::Lattice).unwrap());
        let du = grid.axes()[1].step;
        let h = grid.axes()[0].step;
        let phi = GridFunction::from_fn(grid.clone(), |x| {
            let q = x[0] * x[0] + x[1] * x[1];
            Complex64::new((-q).exp(), 0.3 * x[0])
        });
        let g = GroupElement::poincare([0.3, -0.2], (2.0 * h).exp(), du).unwrap();
        let k = GroupElement::poincare([-0.1, 0.4], (-h).exp(), -2.0 * du).unwrap();
        let gk = multiply(&g, &k).unwrap();
        let lab = RepLabel::PiCone(Cone::C12);
        let lhs = apply_representation(lab, &gk, &phi).unwrap();
        let rhs = apply_representation(lab, &g, &apply_representation(lab, &k, &phi).unwrap()).unwrap();
        for (l, r) in lhs.values.iter().zip(&rhs.values) {
            // the two sides differ only where the intermediate step left the window
            if r.norm() > 0.0 {
                assert!((l - r).norm() < 1e-12 * (1.0 + l.norm()));
            }
        }
    }
}
