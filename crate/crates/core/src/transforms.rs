//! Group Fourier transforms as discretized kernels, the partial Fourier
//! transform in the translation variable, and Fourier inversion.
//!
//! The group Fourier transform is `f̂(ρ) = ∫ f(g)ρ(g) dμ_L(g)`. Writing
//! `F′(x, rest) = ∫ f(b, rest) e^{−ib·x} db` (or `e^{i⟨x;b⟩}` for the
//! Poincaré group) and changing variables `y = aR_{−θ}x` etc., its kernel is
//!
//! * affine: `k(s,t) = F′(s, t/s)·a^{−3/2}/|s|`,
//! * SIM(2): `k(x,y) = F′(x, a, θ)·a^{−3}/‖x‖²` with `a = ‖y‖/‖x‖`, `θ = arg x − arg y`,
//! * P_aff: `k(x,y) = F′(x, a, ϑ)·a^{−3}/|⟨x;x⟩|` with `a = (⟨y;y⟩/⟨x;x⟩)^{1/2}`,
//!   `ϑ = ε(u_x − u_y)`.
//!
//! `F′` is interpolated in `(ln a, angle)` from the group grid and is zero
//! outside the sampled window. Rows whose frequency `x` falls outside the
//! Nyquist box `|x_k| < π/Δb_k` of the translation grid are zero too: the
//! sampled transform there is only a periodic alias.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{axes_stencil, minkowski, pairwise_sum_complex, Axis, AxisKind, Grid};
use crate::group::GroupTag;
use crate::kernel::{duflo_moore_powers, scale_columns, KernelMatrix};
use crate::repr::{
    coordinate_shift, node_axis_coords, operator_from_coords, phase_coefficients, rep_amplitude, RepLabel,
};

/// Sign convention of a Fourier kernel in the translation variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierKernel {
    /// `e^{−ib·ξ}`.
    Euclidean,
    /// `e^{i⟨ξ;b⟩}`, `⟨ξ;b⟩ = ξ₁b₁ − ξ₂b₂`.
    Minkowski,
}

impl FourierKernel {
    pub fn for_group(tag: GroupTag) -> Self {
        match tag {
            GroupTag::PoincareAff => FourierKernel::Minkowski,
            _ => FourierKernel::Euclidean,
        }
    }

    #[inline]
    fn phase(self, b: [f64; 2], xi: [f64; 2]) -> f64 {
        match self {
            FourierKernel::Euclidean => -(b[0] * xi[0] + b[1] * xi[1]),
            FourierKernel::Minkowski => minkowski(xi, b),
        }
    }
}

/// Normalization of the partial Fourier transform: `(2π)^{−1/2}` on the
/// line, `(2π)^{−1}` on the plane (both Euclidean and Minkowski).
pub fn fourier_normalization(tag: GroupTag) -> f64 {
    TAU.powf(-(tag.translation_dim() as f64) / 2.0)
}

/// `F₁f` sampled at a list of frequencies, for every node of the
/// remaining (dilation and angle) axes of the group grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFourier {
    pub tag: GroupTag,
    pub n_freq: usize,
    pub n_rest: usize,
    /// `values[freq * n_rest + rest]`, normalized.
    pub values: Vec<Complex64>,
    /// Nyquist half-widths `π/Δb` of the translation grid.
    pub band: [f64; 2],
}

impl PartialFourier {
    pub fn at(&self, freq: usize, rest: usize) -> Complex64 {
        self.values[freq * self.n_rest + rest]
    }

    /// Whether `ξ` lies in the band where the sampled transform is not aliased.
    pub fn in_band(&self, xi: [f64; 2]) -> bool {
        xi[0].abs() < self.band[0] && xi[1].abs() < self.band[1]
    }
}

/// Split a group grid into translation axes and the remaining axes.
fn split_axes(group: &Grid) -> Result<(GroupTag, &[Axis], &[Axis])> {
    let tag = group
        .group_tag()
        .ok_or_else(|| Error::IncompatibleGrid("expected a group grid".into()))?;
    let nb = tag.translation_dim();
    let (b, rest) = group.axes().split_at(nb);
    if b.iter().any(|ax| ax.kind != AxisKind::Linear) {
        return Err(Error::IncompatibleGrid("translation axes must be regular".into()));
    }
    Ok((tag, b, rest))
}

/// Direct-quadrature Fourier transform in `b` of samples on a group grid,
/// evaluated at arbitrary frequencies (`ξ₂` ignored for the affine group).
pub fn partial_fourier_translation(group: &Grid, f: &[Complex64], freqs: &[[f64; 2]]) -> Result<PartialFourier> {
    group.check_len(f.len())?;
    let (tag, b_axes, rest_axes) = split_axes(group)?;
    let n_rest: usize = rest_axes.iter().map(|a| a.count).product();
    let kernel = FourierKernel::for_group(tag);
    let norm = fourier_normalization(tag);
    let nb1 = b_axes[0].count;
    let nb2 = b_axes.get(1).map_or(1, |a| a.count);
    let b1: Vec<f64> = (0..nb1).map(|k| b_axes[0].value(k)).collect();
    let b2: Vec<f64> = (0..nb2).map(|k| b_axes.get(1).map_or(0.0, |a| a.value(k))).collect();
    let w1: Vec<f64> = (0..nb1).map(|k| b_axes[0].weight(k)).collect();
    let w2: Vec<f64> = (0..nb2).map(|k| b_axes.get(1).map_or(1.0, |a| a.weight(k))).collect();

    let mut values = vec![Complex64::default(); freqs.len() * n_rest];
    let mut inner = vec![Complex64::default(); n_rest];
    let mut acc = vec![Complex64::default(); n_rest];
    for (q, xi) in freqs.iter().enumerate() {
        let xi = if tag == GroupTag::Affine { [xi[0], 0.0] } else { *xi };
        // phases factor as e(b₁)·e(b₂)
        let p1: Vec<Complex64> = b1
            .iter()
            .zip(&w1)
            .map(|(&b, &w)| Complex64::from_polar(w, kernel.phase([b, 0.0], xi)))
            .collect();
        let p2: Vec<Complex64> = b2
            .iter()
            .zip(&w2)
            .map(|(&b, &w)| Complex64::from_polar(w, kernel.phase([0.0, b], xi)))
            .collect();
        acc.iter_mut().for_each(|v| *v = Complex64::default());
        for k1 in 0..nb1 {
            inner.iter_mut().for_each(|v| *v = Complex64::default());
            for k2 in 0..nb2 {
                let base = (k1 * nb2 + k2) * n_rest;
                let c = p2[k2];
                for (r, v) in inner.iter_mut().enumerate() {
                    *v += c * f[base + r];
                }
            }
            let c = p1[k1];
            for (a, v) in acc.iter_mut().zip(&inner) {
                *a += c * v;
            }
        }
        for (r, v) in acc.iter().enumerate() {
            values[q * n_rest + r] = v * norm;
        }
    }
    Ok(PartialFourier {
        tag,
        n_freq: freqs.len(),
        n_rest,
        values,
        band: [
            std::f64::consts::PI / b_axes[0].step,
            b_axes.get(1).map_or(f64::INFINITY, |a| std::f64::consts::PI / a.step),
        ],
    })
}

/// Fourier transform of samples on a regular 2-D translation grid at one
/// frequency, with normalization `(2π)^{−1}`.
pub fn fourier_plane(axes: [&Axis; 2], values: &[Complex64], xi: [f64; 2], kernel: FourierKernel) -> Result<Complex64> {
    let (n1, n2) = (axes[0].count, axes[1].count);
    if values.len() != n1 * n2 {
        return Err(Error::LengthMismatch {
            expected: n1 * n2,
            got: values.len(),
        });
    }
    let mut terms = Vec::with_capacity(values.len());
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let b = [axes[0].value(k1), axes[1].value(k2)];
            let w = axes[0].weight(k1) * axes[1].weight(k2);
            terms.push(values[k1 * n2 + k2] * Complex64::from_polar(w, kernel.phase(b, xi)));
        }
    }
    Ok(pairwise_sum_complex(&terms) / TAU)
}

/// Transformed coordinate differences `(ln a, angle)` that carry node `x` to
/// node `y`, and the Jacobian factor of the kernel formula.
#[inline]
fn kernel_geometry(label: RepLabel, tx: &[f64], ty: &[f64], rest: &mut [f64]) -> f64 {
    let ln_a = ty[0] - tx[0];
    rest[0] = ln_a;
    let rx = tx[0].exp();
    match label {
        RepLabel::RhoPlus | RepLabel::RhoMinus => (-1.5 * ln_a).exp() / rx,
        RepLabel::Pi => {
            rest[1] = tx[1] - ty[1];
            (-3.0 * ln_a).exp() / (rx * rx)
        }
        RepLabel::PiCone(c) => {
            rest[1] = c.boost_sign() * (tx[1] - ty[1]);
            (-3.0 * ln_a).exp() / (rx * rx)
        }
    }
}

fn check_label(label: RepLabel, group: &Grid, rep: &Grid) -> Result<()> {
    let tag = group
        .group_tag()
        .ok_or_else(|| Error::IncompatibleGrid("expected a group grid".into()))?;
    if tag != label.group() {
        return Err(Error::GroupMismatch(label.group(), tag));
    }
    label.check_grid(rep)
}

/// Kernel of `f̂(ρ)·K_ρ^{e}` from the closed-form change of variables.
pub fn group_fourier(
    label: RepLabel,
    group: &Grid,
    f: &[Complex64],
    rep: &Arc<Grid>,
    dm_exponent: f64,
) -> Result<KernelMatrix> {
    check_label(label, group, rep)?;
    let points: Vec<[f64; 2]> = (0..rep.len()).map(|k| rep.point(k)).collect();
    let pf = partial_fourier_translation(group, f, &points)?;
    group_fourier_from_partial(label, group, &pf, rep, dm_exponent)
}

/// As [`group_fourier`], reusing a partial transform evaluated at the nodes
/// of `rep`.
pub fn group_fourier_from_partial(
    label: RepLabel,
    group: &Grid,
    pf: &PartialFourier,
    rep: &Arc<Grid>,
    dm_exponent: f64,
) -> Result<KernelMatrix> {
    check_label(label, group, rep)?;
    if pf.n_freq != rep.len() {
        return Err(Error::LengthMismatch {
            expected: rep.len(),
            got: pf.n_freq,
        });
    }
    let (tag, _, rest_axes) = split_axes(group)?;
    let unnorm = 1.0 / fourier_normalization(tag);
    let coords = node_axis_coords(rep);
    let n = rep.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut rest = vec![0.0; rest_axes.len()];
    let live: Vec<bool> = (0..n).map(|i| pf.in_band(rep.point(i))).collect();
    for j in 0..n {
        for i in (0..n).filter(|&i| live[i]) {
            let jac = kernel_geometry(label, &coords[i], &coords[j], &mut rest);
            if let Some(st) = axes_stencil(rest_axes, &rest) {
                let v: Complex64 = st.entries.iter().map(|&(r, w)| pf.at(i, r) * w).sum();
                m[(i, j)] = v * (unnorm * jac);
            }
        }
    }
    if dm_exponent != 0.0 {
        scale_columns(&mut m, &duflo_moore_powers(label, rep, dm_exponent));
    }
    KernelMatrix::new(rep.clone(), rep.clone(), m)
}

/// Kernel of `∫ f(g)ρ(g)K_ρ^e dμ_L(g)` by summing the sampled
/// representation operators over the group grid. Independent of the
/// change-of-variables formula; used as an oracle.
pub fn group_fourier_direct(
    label: RepLabel,
    group: &Grid,
    f: &[Complex64],
    rep: &Arc<Grid>,
    dm_exponent: f64,
) -> Result<KernelMatrix> {
    check_label(label, group, rep)?;
    group.check_len(f.len())?;
    let coords = node_axis_coords(rep);
    let n = rep.len();
    let mut op = DMatrix::<Complex64>::zeros(n, n);
    for (k, fk) in f.iter().enumerate() {
        if *fk == Complex64::default() {
            continue;
        }
        let g = group.group_element(k)?;
        let rho = operator_from_coords(label, &g, rep, &coords);
        let c = fk * group.weight(k);
        for i in 0..n {
            for (j, o) in rho.row(i) {
                op[(i, j)] += c * o;
            }
        }
    }
    let mut kernel = KernelMatrix::from_node_operator(rep.clone(), op)?;
    if dm_exponent != 0.0 {
        scale_columns(&mut kernel.entries, &duflo_moore_powers(label, rep, dm_exponent));
    }
    Ok(kernel)
}

/// `f(x) = Σ_ρ Tr(ρ(x)*·D_ρ)` on every node of the group grid, where `D_ρ`
/// is the kernel of `f̂(ρ)K_ρ`.
///
/// With `ρ(b,a,·)_ij = A(a)·e^{ib·c(x_i)}·S_ij` the trace is
/// `Σ_i e^{−ib·c(x_i)}·v_i` with `v_i = A(a)·w_i·Σ_j S_ij D_ij`, so the
/// translation nodes are handled as one factorized plane-wave sum per
/// dilation/angle node.
pub fn inversion_reconstruct(
    tag: GroupTag,
    group: &Grid,
    fourier_data: &[(RepLabel, KernelMatrix)],
) -> Result<Vec<Complex64>> {
    if group.group_tag() != Some(tag) {
        return Err(Error::IncompatibleGrid("inversion needs a grid of the same group".into()));
    }
    for label in RepLabel::all(tag) {
        if !fourier_data.iter().any(|(l, _)| *l == label) {
            return Err(Error::MissingLabels(tag));
        }
    }
    let (_, b_axes, rest_axes) = split_axes(group)?;
    let nb1 = b_axes[0].count;
    let nb2 = b_axes.get(1).map_or(1, |a| a.count);
    let n_rest: usize = rest_axes.iter().map(|a| a.count).product();
    let mut out = vec![Complex64::default(); group.len()];
    for (label, data) in fourier_data {
        label.check_grid(&data.row_grid)?;
        let rep = &data.row_grid;
        let n = rep.len();
        let coords = node_axis_coords(rep);
        let c: Vec<[f64; 2]> = (0..n).map(|i| phase_coefficients(*label, rep.point(i))).collect();
        // e^{−i b_k c_k(x_i)} per translation axis
        let e1: Vec<Vec<Complex64>> = (0..nb1)
            .map(|k| {
                let b = b_axes[0].value(k);
                c.iter().map(|ci| Complex64::from_polar(1.0, -b * ci[0])).collect()
            })
            .collect();
        let e2: Vec<Vec<Complex64>> = (0..nb2)
            .map(|k| {
                let b = b_axes.get(1).map_or(0.0, |a| a.value(k));
                c.iter().map(|ci| Complex64::from_polar(1.0, -b * ci[1])).collect()
            })
            .collect();
        let mut v = vec![Complex64::default(); n];
        let mut t = vec![Complex64::default(); n];
        let mut target = vec![0.0; coords.first().map_or(0, |x| x.len())];
        for r in 0..n_rest {
            let (a, angle) = rest_values(rest_axes, r);
            let shift = coordinate_shift(*label, a, angle);
            let amp = rep_amplitude(*label, a);
            for (i, vi) in v.iter_mut().enumerate() {
                for d in 0..shift.len() {
                    target[d] = coords[i][d] + shift[d];
                }
                *vi = match rep.stencil(&target) {
                    Some(st) => {
                        let s: Complex64 = st.entries.iter().map(|&(j, w)| data.entries[(i, j)] * w).sum();
                        s * (amp * rep.weight(i))
                    }
                    None => Complex64::default(),
                };
            }
            for k1 in 0..nb1 {
                for i in 0..n {
                    t[i] = v[i] * e1[k1][i];
                }
                for k2 in 0..nb2 {
                    let s: Complex64 = t.iter().zip(&e2[k2]).map(|(x, y)| x * y).sum();
                    out[(k1 * nb2 + k2) * n_rest + r] += s;
                }
            }
        }
    }
    Ok(out)
}

/// Dilation and angle of the `r`-th node of the non-translation axes.
pub(crate) fn rest_values(rest_axes: &[Axis], r: usize) -> (f64, f64) {
    match rest_axes {
        [a] => (a.value(r), 0.0),
        [a, angle] => (a.value(r / angle.count), angle.value(r % angle.count)),
        _ => unreachable!("group grids have one or two non-translation axes"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_halfline_grid_with, Rule, Sign};

    #[test]
    fn indicator_transform_is_sinc() {
        // f ≡ 1 on |b| ≤ L: F₁f(s) = (2π)^{−1/2}·2 sin(Ls)/s
        let l = 2.0;
        let b = Axis::linear(-l, l, 801, Rule::Trapezoid).unwrap();
        let a = Axis::log_lattice(0.1, 0, 1).unwrap();
        let g = Grid::from_axes(crate::grid::DomainTag::GroupDomain(GroupTag::Affine), vec![b, a]).unwrap();
        let f = vec![Complex64::new(1.0, 0.0); g.len()];
        let freqs: Vec<[f64; 2]> = [0.3, 1.0, 2.5].iter().map(|&s| [s, 0.0]).collect();
        let pf = partial_fourier_translation(&g, &f, &freqs).unwrap();
        for (q, xi) in freqs.iter().enumerate() {
            let s = xi[0];
            let want = TAU.powf(-0.5) * 2.0 * (l * s).sin() / s;
            assert!((pf.at(q, 0).re - want).abs() < 1e-4, "{s}");
            assert!(pf.at(q, 0).im.abs() < 1e-10);
        }
    }

    #[test]
    fn minkowski_vs_euclidean() {
        let ax = Axis::linear(-6.0, 6.0, 121, Rule::Trapezoid).unwrap();
        let mut v = Vec::new();
        for k1 in 0..ax.count {
            for k2 in 0..ax.count {
                let (x, y) = (ax.value(k1), ax.value(k2));
                v.push(Complex64::new((-(x - 0.5).powi(2) - 2.0 * (y + 0.2).powi(2)).exp(), 0.0));
            }
        }
        for xi in [[0.7, -0.4], [1.5, 0.9]] {
            let m = fourier_plane([&ax, &ax], &v, xi, FourierKernel::Minkowski).unwrap();
            let e = fourier_plane([&ax, &ax], &v, [-xi[0], xi[1]], FourierKernel::Euclidean).unwrap();
            assert!((m - e).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_function_gives_zero_kernel() {
        let b = Axis::linear(-1.0, 1.0, 8, Rule::Lattice).unwrap();
        let rep = Arc::new(build_halfline_grid_with(Sign::Plus, 8, 0.5, 4.0, Rule::Lattice).unwrap());
        let a = Axis::log_lattice(rep.axes()[0].step, -2, 5).unwrap();
        let g = Grid::from_axes(crate::grid::DomainTag::GroupDomain(GroupTag::Affine), vec![b, a]).unwrap();
        let f = vec![Complex64::default(); g.len()];
        let k = group_fourier(RepLabel::RhoPlus, &g, &f, &rep, 0.5).unwrap();
        assert!(k.entries.iter().all(|v| *v == Complex64::default()));
        assert!(group_fourier(RepLabel::Pi, &g, &f, &rep, 0.5).is_err());
    }
}
