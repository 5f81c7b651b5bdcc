//! The Wigner transform `W(f,g)(x,ρ) = ∫ f(x′) g(x′⁻¹x) ρ(x′) dμ_L(x′)` and
//! the quadratic form of the Weyl transform.
//!
//! `ρ(b,a,·)` factors as amplitude × diagonal phase `e^{ib·c(y)}` × a fixed
//! re-indexing that depends only on the dilation/angle node, so each entry
//! is assembled as one plane-wave sum per dilation/angle node followed by a
//! sparse scatter.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid};
use crate::group::{inverse, multiply, GroupTag};
use crate::kernel::{duflo_moore_powers, trace_pairing, OperatorField, SymbolField, WignerField};
use crate::schatten::MixedNormAccumulator;
use crate::repr::{coordinate_shift, node_axis_coords, phase_coefficients, rep_amplitude, RepLabel};
use crate::transforms::rest_values;

/// `(row, column, interpolation weight)` of one moved node.
type Scatter = (usize, usize, f64);

struct LabelTables {
    /// `e^{i b₁ c₁(y_i)}`, indexed `[k1][i]`.
    e1: Vec<Vec<Complex64>>,
    e2: Vec<Vec<Complex64>>,
    /// Per dilation/angle node: amplitude and `(i, j, weight)` scatter list.
    moves: Vec<(f64, Vec<Scatter>)>,
    inv_weights: Vec<f64>,
}

/// Lazy evaluator of `W(f,g)` one group node at a time.
pub struct WignerEngine {
    group: Arc<Grid>,
    tag: GroupTag,
    labels: Vec<RepLabel>,
    reps: Vec<Arc<Grid>>,
    f: Vec<Complex64>,
    g: Vec<Complex64>,
    nb: [usize; 2],
    n_rest: usize,
    tables: Vec<LabelTables>,
}

impl WignerEngine {
    pub fn new(
        group: Arc<Grid>,
        labels: Vec<RepLabel>,
        reps: Vec<Arc<Grid>>,
        f: Vec<Complex64>,
        g: Vec<Complex64>,
    ) -> Result<Self> {
        group.check_len(f.len())?;
        group.check_len(g.len())?;
        let tag = group
            .group_tag()
            .ok_or_else(|| Error::IncompatibleGrid("expected a group grid".into()))?;
        if labels.len() != reps.len() {
            return Err(Error::LengthMismatch {
                expected: labels.len(),
                got: reps.len(),
            });
        }
        let nbd = tag.translation_dim();
        let (b_axes, rest_axes) = group.axes().split_at(nbd);
        let nb = [b_axes[0].count, b_axes.get(1).map_or(1, |a| a.count)];
        let n_rest: usize = rest_axes.iter().map(|a| a.count).product();
        let mut tables = Vec::with_capacity(labels.len());
        for (label, rep) in labels.iter().zip(&reps) {
            if label.group() != tag {
                return Err(Error::GroupMismatch(label.group(), tag));
            }
            label.check_grid(rep)?;
            tables.push(label_tables(*label, rep, b_axes, rest_axes));
        }
        Ok(WignerEngine {
            group,
            tag,
            labels,
            reps,
            f,
            g,
            nb,
            n_rest,
            tables,
        })
    }

    pub fn group(&self) -> &Arc<Grid> {
        &self.group
    }

    pub fn labels(&self) -> &[RepLabel] {
        &self.labels
    }

    pub fn reps(&self) -> &[Arc<Grid>] {
        &self.reps
    }

    /// `w_{x′}·f(x′)·g(x′⁻¹x)` for every node `x′`, with `g` interpolated
    /// by the cubic stencil.
    fn coefficients(&self, x: usize) -> Result<Vec<Complex64>> {
        let gx = self.group.group_element(x)?;
        let mut out = vec![Complex64::default(); self.group.len()];
        for (k, slot) in out.iter_mut().enumerate() {
            let fk = self.f[k];
            if fk == Complex64::default() {
                continue;
            }
            let xp = self.group.group_element(k)?;
            let z = multiply(&inverse(&xp), &gx)?;
            let c = match self.tag {
                GroupTag::Affine => [z.b()[0], z.a(), 0.0, 0.0],
                _ => [z.b()[0], z.b()[1], z.a(), z.angle()],
            };
            let Some(t) = self.group.axis_coords(&c[..self.group.dim()]) else {
                continue;
            };
            let Some(st) = self.group.cubic_stencil(&t) else {
                continue;
            };
            let gz: Complex64 = st.entries.iter().map(|&(j, w)| self.g[j] * w).sum();
            *slot = fk * gz * self.group.weight(k);
        }
        Ok(out)
    }

    /// Kernels of `W(f,g)(x, ρ)` for every label at group node `x`.
    pub fn entry(&self, x: usize) -> Result<Vec<DMatrix<Complex64>>> {
        let coef = self.coefficients(x)?;
        let [nb1, nb2] = self.nb;
        let mut out = Vec::with_capacity(self.labels.len());
        for (l, rep) in self.reps.iter().enumerate() {
            let tab = &self.tables[l];
            let n = rep.len();
            let mut op = DMatrix::<Complex64>::zeros(n, n);
            let mut d = vec![Complex64::default(); n];
            let mut t = vec![Complex64::default(); n];
            for (r, (amp, moves)) in tab.moves.iter().enumerate() {
                d.iter_mut().for_each(|v| *v = Complex64::default());
                let mut any = false;
                for k1 in 0..nb1 {
                    t.iter_mut().for_each(|v| *v = Complex64::default());
                    let mut row_any = false;
                    for k2 in 0..nb2 {
                        let c = coef[(k1 * nb2 + k2) * self.n_rest + r];
                        if c == Complex64::default() {
                            continue;
                        }
                        row_any = true;
                        for (ti, e) in t.iter_mut().zip(&tab.e2[k2]) {
                            *ti += c * e;
                        }
                    }
                    if row_any {
                        any = true;
                        for ((di, ti), e) in d.iter_mut().zip(&t).zip(&tab.e1[k1]) {
                            *di += ti * e;
                        }
                    }
                }
                if !any {
                    continue;
                }
                for &(i, j, w) in moves {
                    op[(i, j)] += d[i] * (amp * w);
                }
            }
            for (j, mut col) in op.column_iter_mut().enumerate() {
                col *= Complex64::from(tab.inv_weights[j]);
            }
            out.push(op);
        }
        Ok(out)
    }
}

fn label_tables(label: RepLabel, rep: &Grid, b_axes: &[Axis], rest_axes: &[Axis]) -> LabelTables {
    let n = rep.len();
    let c: Vec<[f64; 2]> = (0..n).map(|i| phase_coefficients(label, rep.point(i))).collect();
    let e1 = (0..b_axes[0].count)
        .map(|k| {
            let b = b_axes[0].value(k);
            c.iter().map(|ci| Complex64::from_polar(1.0, b * ci[0])).collect()
        })
        .collect();
    let nb2 = b_axes.get(1).map_or(1, |a| a.count);
    let e2 = (0..nb2)
        .map(|k| {
            let b = b_axes.get(1).map_or(0.0, |a| a.value(k));
            c.iter().map(|ci| Complex64::from_polar(1.0, b * ci[1])).collect()
        })
        .collect();
    let coords = node_axis_coords(rep);
    let n_rest: usize = rest_axes.iter().map(|a| a.count).product();
    let mut moves = Vec::with_capacity(n_rest);
    let mut target = vec![0.0; coords.first().map_or(0, |v| v.len())];
    for r in 0..n_rest {
        let (a, angle) = rest_values(rest_axes, r);
        let shift = coordinate_shift(label, a, angle);
        let mut list = Vec::with_capacity(n);
        for (i, ci) in coords.iter().enumerate() {
            for d in 0..shift.len() {
                target[d] = ci[d] + shift[d];
            }
            if let Some(st) = rep.stencil(&target) {
                list.extend(st.entries.iter().filter(|e| e.1 != 0.0).map(|&(j, w)| (i, j, w)));
            }
        }
        moves.push((rep_amplitude(label, a), list));
    }
    LabelTables {
        e1,
        e2,
        moves,
        inv_weights: rep.weights().iter().map(|w| 1.0 / w).collect(),
    }
}

/// The full field `W(f,g)` on a group grid. Memory is
/// `N_G·Σ_ρ N_ρ²` complex numbers; prefer [`WignerEngine`] for large grids.
pub fn wigner_transform(
    f: &[Complex64],
    g: &[Complex64],
    group: &Arc<Grid>,
    labels: &[RepLabel],
    reps: &[Arc<Grid>],
) -> Result<WignerField> {
    let engine = WignerEngine::new(group.clone(), labels.to_vec(), reps.to_vec(), f.to_vec(), g.to_vec())?;
    let mut per_label: Vec<Vec<DMatrix<Complex64>>> = vec![Vec::with_capacity(group.len()); labels.len()];
    for x in 0..group.len() {
        for (l, m) in engine.entry(x)?.into_iter().enumerate() {
            per_label[l].push(m);
        }
    }
    Ok(OperatorField {
        group: group.clone(),
        labels: labels.to_vec(),
        rep_grids: reps.to_vec(),
        entries: per_label,
    })
}

/// `∫ W(f,g)(y,ρ) dμ_L(y)` for every label, accumulated node by node.
pub fn integrated_wigner(engine: &WignerEngine) -> Result<Vec<DMatrix<Complex64>>> {
    let mut acc: Vec<DMatrix<Complex64>> = engine
        .reps()
        .iter()
        .map(|r| DMatrix::zeros(r.len(), r.len()))
        .collect();
    let group = engine.group().clone();
    for y in 0..group.len() {
        let w = Complex64::from(group.weight(y));
        for (a, m) in acc.iter_mut().zip(engine.entry(y)?) {
            *a += m * w;
        }
    }
    Ok(acc)
}

/// `⟨W_σ f, ḡ⟩ = Σ_ρ ∫ Tr(σ(x,ρ)*·W(f,g)(x,ρ)·K_ρ) dμ_L(x)`.
pub fn weyl_quadratic_form(sigma: &SymbolField, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
    let engine = WignerEngine::new(
        sigma.group.clone(),
        sigma.labels.clone(),
        sigma.rep_grids.clone(),
        f.to_vec(),
        g.to_vec(),
    )?;
    weyl_quadratic_form_with(sigma, &engine)
}

/// As [`weyl_quadratic_form`] with a prepared engine for `W(f,g)`.
pub fn weyl_quadratic_form_with(sigma: &SymbolField, engine: &WignerEngine) -> Result<Complex64> {
    if sigma.labels != engine.labels() || sigma.group.len() != engine.group().len() {
        return Err(Error::IncompatibleGrid("symbol and Wigner field differ in shape".into()));
    }
    let dm: Vec<Vec<f64>> = sigma
        .labels
        .iter()
        .zip(&sigma.rep_grids)
        .map(|(l, g)| duflo_moore_powers(*l, g, 1.0))
        .collect();
    let mut terms = Vec::with_capacity(sigma.group.len());
    for x in 0..sigma.group.len() {
        let w = engine.entry(x)?;
        let mut s = Complex64::default();
        for (l, wl) in w.iter().enumerate() {
            s += trace_pairing(&sigma.entries[l][x], wl, sigma.rep_grids[l].weights(), &dm[l]);
        }
        terms.push(s * sigma.group.weight(x));
    }
    Ok(crate::grid::pairwise_sum_complex(&terms))
}

/// `⟨W_σ f, ḡ⟩` against a materialized Wigner field.
pub fn weyl_pairing(sigma: &SymbolField, w: &WignerField) -> Result<Complex64> {
    sigma.same_shape(w)?;
    let mut terms = Vec::with_capacity(sigma.group.len());
    for (l, label) in sigma.labels.iter().enumerate() {
        let grid = &sigma.rep_grids[l];
        let dm = duflo_moore_powers(*label, grid, 1.0);
        for x in 0..sigma.group.len() {
            terms.push(trace_pairing(&sigma.entries[l][x], &w.entries[l][x], grid.weights(), &dm) * sigma.group.weight(x));
        }
    }
    Ok(crate::grid::pairwise_sum_complex(&terms))
}

/// Everything a single sweep over the group grid yields for `W(f,g)`.
#[derive(Debug, Clone)]
pub struct WignerSummary {
    /// `∫ W(f,g)(y,ρ) dμ_L(y)` per label.
    pub integrated: Vec<DMatrix<Complex64>>,
    /// `(p, ‖W(f,g)‖_{p,μ})` for every requested `p`.
    pub mixed_norms: Vec<(f64, f64)>,
    /// `⟨W_σ f, ḡ⟩` when a symbol was supplied.
    pub weyl: Option<Complex64>,
}

/// Integrated field, mixed norms and optionally the Weyl pairing of
/// `W(f,g)`, with every entry computed once.
pub fn wigner_summary(engine: &WignerEngine, ps: &[f64], sigma: Option<&SymbolField>) -> Result<WignerSummary> {
    let group = engine.group().clone();
    let labels = engine.labels().to_vec();
    let reps = engine.reps().to_vec();
    if let Some(s) = sigma {
        if s.labels != labels || s.group.len() != group.len() {
            return Err(Error::IncompatibleGrid("symbol and Wigner field differ in shape".into()));
        }
    }
    let mut integrated: Vec<DMatrix<Complex64>> = reps.iter().map(|r| DMatrix::zeros(r.len(), r.len())).collect();
    let mut accs = ps
        .iter()
        .map(|&p| MixedNormAccumulator::new(p))
        .collect::<Result<Vec<_>>>()?;
    let dm: Vec<Vec<f64>> = labels.iter().zip(&reps).map(|(l, g)| duflo_moore_powers(*l, g, 1.0)).collect();
    let mut terms = Vec::new();
    for x in 0..group.len() {
        let w = group.weight(x);
        let entries = engine.entry(x)?;
        for (l, m) in entries.iter().enumerate() {
            integrated[l] += m * Complex64::from(w);
            for acc in accs.iter_mut() {
                acc.add(labels[l], &reps[l], m, w)?;
            }
            if let Some(s) = sigma {
                terms.push(trace_pairing(&s.entries[l][x], m, reps[l].weights(), &dm[l]) * w);
            }
        }
    }
    Ok(WignerSummary {
        integrated,
        mixed_norms: ps.iter().zip(&accs).map(|(&p, a)| (p, a.value())).collect(),
        weyl: sigma.map(|_| crate::grid::pairwise_sum_complex(&terms)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelMatrix;
    use crate::repr::representation_operator;
    use crate::setup::{HarmonicResolution, HarmonicSetup};

    fn small_affine() -> HarmonicSetup {
        let res = HarmonicResolution {
            rep_radial: 24,
            b_count: 24,
            ..HarmonicResolution::reduced(GroupTag::Affine)
        };
        HarmonicSetup::new(GroupTag::Affine, res).unwrap()
    }

    fn pair(setup: &HarmonicSetup) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut bf = setup.compact_bump();
        bf.wave = [0.4, 0.0];
        let mut bg = setup.compact_bump();
        bg.wave = [-0.3, 0.0];
        (bf.sample(&setup.group).unwrap(), bg.sample(&setup.group).unwrap())
    }

    fn engine(setup: &HarmonicSetup, f: &[Complex64], g: &[Complex64]) -> WignerEngine {
        WignerEngine::new(setup.group.clone(), setup.labels.clone(), setup.reps.clone(), f.to_vec(), g.to_vec()).unwrap()
    }

    #[test]
    fn entry_matches_direct_sum_of_representation_operators() {
        let setup = small_affine();
        let (f, _) = pair(&setup);
        let mut bg = setup.compact_bump();
        bg.wave = [-0.3, 0.0];
        let g = bg.sample(&setup.group).unwrap();
        let e = engine(&setup, &f, &g);
        let group = &setup.group;
        // a node near the middle of the grid
        let x = group.len() / 2 + group.axes()[1].count / 2;
        let gx = group.group_element(x).unwrap();
        let got = e.entry(x).unwrap();
        for (l, (label, rep)) in setup.labels.iter().zip(&setup.reps).enumerate() {
            let n = rep.len();
            let mut op = DMatrix::<Complex64>::zeros(n, n);
            for k in 0..group.len() {
                let xp = group.group_element(k).unwrap();
                let z = multiply(&inverse(&xp), &gx).unwrap();
                // the oracle evaluates g in closed form instead of interpolating
                let gz = bg.eval(GroupTag::Affine, &[z.b()[0], z.a()]);
                let c = f[k] * gz * group.weight(k);
                if c == Complex64::default() {
                    continue;
                }
                let rho = representation_operator(*label, &xp, rep).unwrap();
                for i in 0..n {
                    for (j, o) in rho.row(i) {
                        op[(i, j)] += c * o;
                    }
                }
            }
            let want = KernelMatrix::from_node_operator(rep.clone(), op).unwrap().entries;
            let err = (&got[l] - &want).norm() / want.norm();
            assert!(want.norm() > 0.0 && err < 0.02, "{label:?}: {err}");
        }
    }

    #[test]
    fn linear_in_f_and_zero_for_zero_g() {
        let setup = small_affine();
        let (f, g) = pair(&setup);
        let two_f: Vec<Complex64> = f.iter().map(|v| v * 2.0).collect();
        let x = setup.group.len() / 2;
        let a = engine(&setup, &f, &g).entry(x).unwrap();
        let b = engine(&setup, &two_f, &g).entry(x).unwrap();
        for (m1, m2) in a.iter().zip(&b) {
            assert!((m1 * Complex64::from(2.0) - m2).norm() <= 1e-12 * m2.norm().max(1.0));
        }
        let zero = vec![Complex64::default(); g.len()];
        let z = engine(&setup, &f, &zero).entry(x).unwrap();
        assert!(z.iter().all(|m| m.iter().all(|v| *v == Complex64::default())));
    }

    #[test]
    fn summary_agrees_with_separate_passes() {
        let setup = small_affine();
        let (f, g) = pair(&setup);
        let e = engine(&setup, &f, &g);
        let field = wigner_transform(&f, &g, &setup.group, &setup.labels, &setup.reps).unwrap();
        // a symbol equal to the field itself makes the pairing ‖W‖² weighted
        let sigma = field.clone();
        let s = wigner_summary(&e, &[2.0], Some(&sigma)).unwrap();
        let integrated = integrated_wigner(&e).unwrap();
        for (a, b) in s.integrated.iter().zip(&integrated) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
        let q1 = s.weyl.unwrap();
        let q2 = weyl_quadratic_form_with(&sigma, &e).unwrap();
        let q3 = weyl_pairing(&sigma, &field).unwrap();
        let q4 = weyl_quadratic_form(&sigma, &f, &g).unwrap();
        for q in [q2, q3, q4] {
            assert!((q - q1).norm() <= 1e-10 * q1.norm());
        }
        assert!(q1.re > 0.0 && q1.im.abs() <= 1e-10 * q1.re);
        // ‖W‖²_{2,μ} is the same weighted sum of squared HS norms
        let (_, n2) = s.mixed_norms[0];
        assert!((n2 * n2 - q1.re).abs() <= 1e-8 * q1.re, "{} vs {}", n2 * n2, q1.re);
    }

    #[test]
    fn swapping_f_and_g_does_not_conjugate_the_weyl_pairing() {
        // W(g,f) is not the pointwise adjoint of W(f,g), so
        // ⟨W_σ f, ḡ⟩ and conj⟨W_{σ*} g, f̄⟩ differ at order one
        let setup = small_affine();
        let (f, g) = pair(&setup);
        let mut bh = setup.compact_bump();
        bh.wave = [0.9, 0.0];
        let h = bh.sample(&setup.group).unwrap();
        let sigma = wigner_transform(&h, &f, &setup.group, &setup.labels, &setup.reps).unwrap();
        let lhs = weyl_quadratic_form(&sigma, &f, &g).unwrap();
        let rhs = weyl_quadratic_form(&sigma.adjoint(), &g, &f).unwrap().conj();
        let gap = (lhs - rhs).norm() / lhs.norm().max(rhs.norm());
        assert!(lhs.norm() > 0.0 && gap > 0.1, "{lhs} vs {rhs}: {gap}");
    }

    #[test]
    fn shape_mismatches_are_errors() {
        let setup = small_affine();
        let (f, g) = pair(&setup);
        let short = &f[..f.len() - 1];
        assert!(WignerEngine::new(setup.group.clone(), setup.labels.clone(), setup.reps.clone(), short.to_vec(), g.clone()).is_err());
        assert!(WignerEngine::new(setup.group.clone(), setup.labels.clone(), setup.reps[..1].to_vec(), f.clone(), g.clone()).is_err());
        let other = HarmonicSetup::reduced(GroupTag::PoincareAff).unwrap();
        assert!(WignerEngine::new(setup.group.clone(), other.labels.clone(), other.reps.clone(), f, g).is_err());
    }
}
