//! Verification suites over the group laws, Haar measures, representations
//! and harmonic identities. Every check yields one [`CheckRow`] whose
//! `value` passes when it does not exceed `tolerance`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{build_cone_grid, build_halfline_grid, build_plane_grid, Cone, DomainTag, Grid, Sign};
use crate::group::{identity, inverse, modular_function, multiply, plane_action, GroupElement, GroupTag};
use crate::kernel::{OperatorField, SymbolField};
use crate::repr::{representation_operator, GridFunction, RepLabel};
use crate::schatten::{frobenius_norm, mixed_norm, weighted_matrix};
use crate::setup::{Bump, HarmonicResolution, HarmonicSetup};
use crate::wigner::{wigner_summary, WignerEngine};

pub const CHECK_HEADER: &str = "check,group,metric,value,tolerance,pass";

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub group: GroupTag,
    pub metric: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(check: &str, group: GroupTag, metric: &str, value: f64, tolerance: f64) -> Self {
        CheckRow {
            check: check.into(),
            group,
            metric: metric.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Replace the tolerance and recompute the verdict.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.value <= tolerance;
        self
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{}",
            self.check, self.group, self.metric, self.value, self.tolerance, self.pass
        )
    }
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.csv_row())
    }
}

/// The test function used by the harmonic suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TestFunction {
    #[default]
    Bump,
    /// `f = g = 0`: every identity degenerates to `0 = 0`.
    Zero,
}

/// Knobs shared by the suites.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Replaces every tolerance when set.
    pub tolerance: Option<f64>,
    /// Random elements or triples drawn per randomized check.
    pub trials: usize,
    pub function: TestFunction,
    /// Plancherel and inversion grids; the desk resolution when unset.
    pub resolution: Option<HarmonicResolution>,
    /// Representation grids for the unitarity and homomorphism checks:
    /// nodes per radial axis and per angular or `u` axis.
    pub rep_counts: (usize, usize),
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            seed: 0,
            tolerance: None,
            trials: 1000,
            function: TestFunction::Bump,
            resolution: None,
            rep_counts: (128, 64),
        }
    }
}

fn finish(rows: Vec<CheckRow>, opts: &CheckOptions) -> Vec<CheckRow> {
    match opts.tolerance {
        Some(t) => rows.into_iter().map(|r| r.with_tolerance(t)).collect(),
        None => rows,
    }
}

/// `|x − y| / max(|x|, |y|)`, zero when both vanish.
pub fn relative_gap(x: f64, y: f64) -> f64 {
    let d = x.abs().max(y.abs());
    if d == 0.0 {
        0.0
    } else {
        (x - y).abs() / d
    }
}

/// `x / y`, zero when both vanish.
fn ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 && y == 0.0 {
        0.0
    } else {
        x / y
    }
}

// ---------------------------------------------------------------------------
// Group laws and Haar measures

/// A random element with `a ∈ [0.1, 10]` (log-uniform) and `b`, angle in `[−10, 10]`.
pub fn random_element(tag: GroupTag, rng: &mut impl Rng) -> GroupElement {
    let b = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
    let a = rng.gen_range(-(10f64.ln())..10f64.ln()).exp();
    let angle = rng.gen_range(-10.0..10.0);
    GroupElement::new(tag, b, a, angle).expect("positive dilation")
}

/// Largest componentwise relative difference; SIM(2) angles compared on the circle.
pub fn element_gap(g: &GroupElement, h: &GroupElement) -> f64 {
    let comp = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
    let mut d = comp(g.b()[0], h.b()[0]).max(comp(g.b()[1], h.b()[1])).max(comp(g.a(), h.a()));
    let da = (g.angle() - h.angle()).abs();
    d = d.max(match g.tag() {
        GroupTag::Sim2 => da.min(TAU - da) / TAU,
        _ => comp(g.angle(), h.angle()),
    });
    d
}

/// Rounding scale of the translation part of `g·h`: `|b_g| + a_g‖L_g‖|b_h|`
/// with `‖L_g‖ = e^{|ϑ|}` for a hyperbolic rotation.
fn product_scale(g: &GroupElement, h: &GroupElement) -> f64 {
    chain_scale(g, h.b()[0].hypot(h.b()[1]))
}

/// `|b_g| + a_g‖L_g‖·t`, at least 1.
fn chain_scale(g: &GroupElement, t: f64) -> f64 {
    let lin = match g.tag() {
        GroupTag::PoincareAff => g.angle().abs().exp(),
        _ => 1.0,
    };
    (g.b()[0].hypot(g.b()[1]) + g.a() * lin * t).max(1.0)
}

/// Gap between `(g·h)·k` and `g·(h·k)`, the translation part measured
/// against the rounding scale `|b_g| + a_g‖L_g‖(|b_h| + a_h‖L_h‖|b_k|)`.
fn associativity_gap(g: &GroupElement, h: &GroupElement, k: &GroupElement) -> Result<f64> {
    let left = multiply(&multiply(g, h)?, k)?;
    let right = multiply(g, &multiply(h, k)?)?;
    let scale = chain_scale(g, product_scale(h, k));
    let b = (left.b()[0] - right.b()[0]).abs().max((left.b()[1] - right.b()[1]).abs()) / scale;
    let strip = |e: &GroupElement| GroupElement::new(e.tag(), [0.0, 0.0], e.a(), e.angle());
    Ok(b.max(element_gap(&strip(&left)?, &strip(&right)?)))
}

/// Distance of `g·h` from the identity, the translation part measured
/// against [`product_scale`].
fn identity_gap(g: &GroupElement, h: &GroupElement) -> Result<f64> {
    let p = multiply(g, h)?;
    let e = identity(g.tag());
    let scale = product_scale(g, h);
    let b = p.b()[0].abs().max(p.b()[1].abs()) / scale;
    let mut q = p;
    q = GroupElement::new(q.tag(), [0.0, 0.0], q.a(), q.angle())?;
    Ok(b.max(element_gap(&q, &e)))
}

/// Associativity, inverse laws and (for the plane groups) compatibility of
/// the plane action with the product, over `trials` random triples.
pub fn algebra_rows(tag: GroupTag, trials: usize, rng: &mut impl Rng) -> Result<Vec<CheckRow>> {
    let (mut assoc, mut inv, mut action) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let (g, h, k) = (random_element(tag, rng), random_element(tag, rng), random_element(tag, rng));
        assoc = assoc.max(associativity_gap(&g, &h, &k)?);
        let gi = inverse(&g);
        inv = inv.max(identity_gap(&g, &gi)?).max(identity_gap(&gi, &g)?);
        if tag != GroupTag::Affine {
            let y = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
            let l = plane_action(&multiply(&g, &h)?, y)?;
            let r = plane_action(&g, plane_action(&h, y)?)?;
            let scale = chain_scale(&g, chain_scale(&h, y[0].hypot(y[1])));
            action = action.max((l[0] - r[0]).abs().max((l[1] - r[1]).abs()) / scale);
        }
    }
    let mut rows = vec![
        CheckRow::new("associativity", tag, "max_rel_err", assoc, 1e-9),
        CheckRow::new("inverse", tag, "max_rel_err", inv, 1e-9),
    ];
    if tag != GroupTag::Affine {
        rows.push(CheckRow::new("plane_action", tag, "max_rel_err", action, 1e-9));
    }
    Ok(rows)
}

/// A moderate element for the translation checks: the translated desk bump
/// stays inside the desk group grid.
fn moderate_element(tag: GroupTag, rng: &mut impl Rng) -> GroupElement {
    let b = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let a = rng.gen_range(-0.2f64..0.2).exp();
    let angle = match tag {
        GroupTag::Sim2 => rng.gen_range(0.0..TAU),
        _ => rng.gen_range(-0.3..0.3),
    };
    GroupElement::new(tag, b, a, angle).expect("positive dilation")
}

fn element_coords(g: &GroupElement) -> Vec<f64> {
    match g.tag() {
        GroupTag::Affine => vec![g.b()[0], g.a()],
        _ => vec![g.b()[0], g.b()[1], g.a(), g.angle()],
    }
}

/// `Σ_k w_k f(map(x_k))` for the bump `f` evaluated in closed form.
fn translated_integral(
    group: &Grid,
    bump: &Bump,
    map: impl Fn(&GroupElement) -> Result<GroupElement>,
) -> Result<f64> {
    let tag = group.group_tag().ok_or_else(|| Error::IncompatibleGrid("expected a group grid".into()))?;
    let mut terms = Vec::with_capacity(group.len());
    for k in 0..group.len() {
        let y = map(&group.group_element(k)?)?;
        terms.push(bump.eval(tag, &element_coords(&y)).re * group.weight(k));
    }
    Ok(crate::grid::pairwise_sum(&terms))
}

/// Left invariance of the quadrature and the measured modular function,
/// each over `count` random elements.
pub fn haar_rows(tag: GroupTag, group: &Grid, count: usize, rng: &mut impl Rng) -> Result<Vec<CheckRow>> {
    let bump = Bump::standard(tag);
    let base = translated_integral(group, &bump, |x| Ok(*x))?;
    let (mut left, mut modular) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let g = moderate_element(tag, rng);
        let gi = inverse(&g);
        let l = translated_integral(group, &bump, |x| multiply(&gi, x))?;
        left = left.max(relative_gap(l, base));
        let r = translated_integral(group, &bump, |x| multiply(x, &g))?;
        modular = modular.max(relative_gap(r / base, 1.0 / modular_function(tag, &g)));
    }
    Ok(vec![
        CheckRow::new("left_invariance", tag, "max_rel_err", left, 0.01),
        CheckRow::new("modular_function", tag, "max_rel_err", modular, 0.01),
    ])
}

/// Group laws plus Haar checks on the desk group grid.
pub fn group_suite(tag: GroupTag, opts: &CheckOptions) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rows = algebra_rows(tag, opts.trials, &mut rng)?;
    let res = opts.resolution.unwrap_or_else(|| HarmonicResolution::desk(tag));
    let setup = HarmonicSetup::new(tag, res)?;
    rows.extend(haar_rows(tag, &setup.group, 10, &mut rng)?);
    Ok(finish(rows, opts))
}

// ---------------------------------------------------------------------------
// Representations

/// Representation grids at `(n_radial, n_angular)` nodes, one per label.
pub fn rep_grids(tag: GroupTag, n_radial: usize, n_angular: usize) -> Result<Vec<(RepLabel, Arc<Grid>)>> {
    let out = match tag {
        GroupTag::Affine => vec![
            (RepLabel::RhoPlus, build_halfline_grid(Sign::Plus, n_radial, 1e-3, 50.0)?),
            (RepLabel::RhoMinus, build_halfline_grid(Sign::Minus, n_radial, 1e-3, 50.0)?),
        ],
        GroupTag::Sim2 => vec![(RepLabel::Pi, build_plane_grid(n_radial, n_angular, 1e-2, 20.0)?)],
        GroupTag::PoincareAff => Cone::ALL
            .iter()
            .map(|&c| {
                let (i, j) = c.indices();
                Ok((RepLabel::PiCone(c), build_cone_grid(i, j, n_radial, n_angular, 1e-2, 20.0, 3.5)?))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(out.into_iter().map(|(l, g)| (l, Arc::new(g))).collect())
}

/// A smooth function on a representation grid, Gaussian in `ln r` and in the
/// hyperbolic coordinate, with a first angular harmonic on the plane.
pub fn smooth_rep_function(grid: Arc<Grid>) -> GridFunction {
    let values = (0..grid.len())
        .map(|k| {
            let x = grid.point(k);
            let (r, extra) = match grid.domain() {
                DomainTag::Plane => (x[0].hypot(x[1]), 1.0 + 0.5 * x[1].atan2(x[0]).cos()),
                DomainTag::Cone(c) => {
                    let (r, u) = c.coordinates(x).unwrap_or((1.0, 0.0));
                    (r, (-0.5 * u * u / 0.49).exp())
                }
                _ => (x[0].abs(), 1.0),
            };
            let lr = r.ln();
            Complex64::new((-0.5 * lr * lr / 0.36).exp() * extra, 0.0)
        })
        .collect();
    GridFunction { grid, values }
}

/// Elements whose dilation is an integer power of the radial ratio and
/// whose angle is a multiple of the angular step: `ρ(g)` re-indexes nodes.
fn lattice_element(tag: GroupTag, grid: &Grid, rng: &mut impl Rng) -> GroupElement {
    let h = grid.axes()[0].step;
    let a = (rng.gen_range(-4i32..=4) as f64 * h).exp();
    let b = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    let angle = match tag {
        GroupTag::Affine => 0.0,
        _ => rng.gen_range(-3i32..=3) as f64 * grid.axes()[1].step,
    };
    GroupElement::new(tag, b, a, angle).expect("positive dilation")
}

/// Off-lattice dilation and angle; `|b_i| ≤ 1/4` keeps the plane-wave phase
/// of `ρ(g)φ` resolved by the grids.
fn generic_element(tag: GroupTag, rng: &mut impl Rng) -> GroupElement {
    let b = [rng.gen_range(-0.25..0.25), rng.gen_range(-0.25..0.25)];
    let a = rng.gen_range(-0.5f64..0.5).exp();
    let angle = match tag {
        GroupTag::Sim2 => rng.gen_range(0.0..TAU),
        _ => rng.gen_range(-0.5..0.5),
    };
    GroupElement::new(tag, b, a, angle).expect("positive dilation")
}

/// `max |‖ρ(g)φ‖/‖φ‖ − 1|` over the labels and `elements`.
fn unitarity_defect(grids: &[(RepLabel, Arc<Grid>)], elements: &[GroupElement]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (label, grid) in grids {
        let phi = smooth_rep_function(grid.clone());
        let n0 = phi.l2_norm();
        for g in elements {
            let out = representation_operator(*label, g, grid)?.apply(&phi.values);
            worst = worst.max((grid.l2_norm(&out) / n0 - 1.0).abs());
        }
    }
    Ok(worst)
}

/// `max ‖ρ(gh)φ − ρ(g)ρ(h)φ‖/‖φ‖` over the labels and `pairs`.
fn homomorphism_defect(grids: &[(RepLabel, Arc<Grid>)], pairs: &[(GroupElement, GroupElement)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (label, grid) in grids {
        let phi = smooth_rep_function(grid.clone());
        let n0 = phi.l2_norm();
        for (g, h) in pairs {
            let lhs = representation_operator(*label, &multiply(g, h)?, grid)?.apply(&phi.values);
            let mid = representation_operator(*label, h, grid)?.apply(&phi.values);
            let rhs = representation_operator(*label, g, grid)?.apply(&mid);
            let d: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            worst = worst.max(grid.l2_norm(&d) / n0);
        }
    }
    Ok(worst)
}

/// Unitarity on the exact-ratio set and for generic elements, the
/// homomorphism defect, and its decay when every rep axis is doubled.
pub fn representation_rows(tag: GroupTag, counts: (usize, usize), rng: &mut impl Rng) -> Result<Vec<CheckRow>> {
    let grids = rep_grids(tag, counts.0, counts.1)?;
    let fine = rep_grids(tag, 2 * counts.0, 2 * counts.1)?;
    let lattice: Vec<GroupElement> = (0..8).map(|_| lattice_element(tag, &grids[0].1, rng)).collect();
    let generic: Vec<GroupElement> = (0..8).map(|_| generic_element(tag, rng)).collect();
    let pairs: Vec<(GroupElement, GroupElement)> =
        (0..4).map(|_| (generic_element(tag, rng), generic_element(tag, rng))).collect();
    let coarse = homomorphism_defect(&grids, &pairs)?;
    let refined = homomorphism_defect(&fine, &pairs)?;
    Ok(vec![
        CheckRow::new("unitarity_lattice", tag, "max_abs_dev", unitarity_defect(&grids, &lattice)?, 1e-3),
        CheckRow::new("unitarity_generic", tag, "max_abs_dev", unitarity_defect(&grids, &generic)?, 1e-2),
        CheckRow::new("homomorphism", tag, "max_rel_err", coarse, 1e-2),
        CheckRow::new("homomorphism_refinement", tag, "fine_over_coarse", ratio(refined, coarse), 0.5),
    ])
}

// ---------------------------------------------------------------------------
// Harmonic identities

/// Plancherel and inversion of the desk bump.
pub fn plancherel_rows(setup: &HarmonicSetup, f: &[Complex64]) -> Result<Vec<CheckRow>> {
    let tag = setup.tag;
    let (lhs, rhs) = setup.plancherel(f)?;
    let g = setup.reconstruct(f)?;
    let d: Vec<Complex64> = g.iter().zip(f).map(|(a, b)| a - b).collect();
    let inv = ratio(setup.group.l2_norm(&d), setup.group.l2_norm(f));
    Ok(vec![
        CheckRow::new("plancherel", tag, "rel_err", relative_gap(lhs, rhs), 0.02),
        CheckRow::new("inversion", tag, "rel_l2_err", inv, 0.05),
    ])
}

/// Two compact bumps on the reduced grids with distinct modulations.
pub fn wigner_pair(setup: &HarmonicSetup, rng: &mut impl Rng) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut bf = setup.compact_bump();
    let mut bg = setup.compact_bump();
    bf.wave = [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
    bg.wave = [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
    if setup.tag == GroupTag::Sim2 {
        bg.angle0 = rng.gen_range(0.0..TAU);
    }
    Ok((bf.sample(&setup.group)?, bg.sample(&setup.group)?))
}

/// `f̂(ρ)` recovered from `∫W(f,g)dμ_L / ∫g dμ_L` (HS-relative error) and
/// the ratios `‖W(f,g)‖_{p,μ}/(‖f‖₂‖g‖₂)` for `p ∈ {2, 4, ∞}`.
pub fn wigner_rows(setup: &HarmonicSetup, f: &[Complex64], g: &[Complex64]) -> Result<Vec<CheckRow>> {
    let tag = setup.tag;
    let engine = WignerEngine::new(setup.group.clone(), setup.labels.clone(), setup.reps.clone(), f.to_vec(), g.to_vec())?;
    let ps = [2.0, 4.0, f64::INFINITY];
    let summary = wigner_summary(&engine, &ps, None)?;
    let c = setup.group.integrate_complex(g)?;
    let fh = setup.fourier(f, 0.0)?;
    let (mut num, mut den) = (0.0, 0.0);
    for ((_, k), m) in fh.iter().zip(&summary.integrated) {
        let mut d = k.clone();
        d.entries = if c == Complex64::default() { m.clone() } else { m / c } - &k.entries;
        num += frobenius_norm(&weighted_matrix(&d)).powi(2);
        den += frobenius_norm(&weighted_matrix(k)).powi(2);
    }
    let mut rows = vec![CheckRow::new("wigner_fourier", tag, "rel_hs_err", ratio(num.sqrt(), den.sqrt()), 0.02)];
    let nfg = setup.group.l2_norm(f) * setup.group.l2_norm(g);
    for (p, v) in summary.mixed_norms {
        let name = if p.is_infinite() { "wigner_bound_pinf".to_string() } else { format!("wigner_bound_p{p}") };
        rows.push(CheckRow::new(&name, tag, "norm_ratio", ratio(v, nfg), 1.01));
    }
    Ok(rows)
}

/// A symbol aligned with `W(f,g)`: the Wigner entries times one random
/// phase on a random half of the group nodes, plus complex noise of random
/// relative size drawn in the weighted space `D^{1/2}KD^{1/2}`.
pub fn aligned_symbol(engine: &WignerEngine, rng: &mut impl Rng) -> Result<SymbolField> {
    let group = engine.group().clone();
    let labels = engine.labels().to_vec();
    let reps = engine.reps().to_vec();
    let noise = rng.gen_range(0.0..1.0);
    let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
    let sqrt_w: Vec<Vec<f64>> = reps.iter().map(|r| r.weights().iter().map(|w| w.sqrt()).collect()).collect();
    let mut entries: Vec<Vec<DMatrix<Complex64>>> = vec![Vec::with_capacity(group.len()); labels.len()];
    for x in 0..group.len() {
        let keep = rng.gen_bool(0.5);
        let w = engine.entry(x)?;
        for (l, m) in w.into_iter().enumerate() {
            let n = m.nrows();
            let out = if keep {
                let mut weighted = m.clone();
                crate::schatten::weight_in_place(&mut weighted, reps[l].weights(), reps[l].weights());
                let scale = noise * frobenius_norm(&weighted) / n as f64;
                let sw = &sqrt_w[l];
                m * phase
                    + DMatrix::from_fn(n, n, |i, j| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (scale / (sw[i] * sw[j]))
                    })
            } else {
                DMatrix::zeros(n, n)
            };
            entries[l].push(out);
        }
    }
    Ok(OperatorField {
        group,
        labels,
        rep_grids: reps,
        entries,
    })
}

/// `|⟨W_σ f, ḡ⟩| / (‖σ‖_{p,μ}‖f‖₂‖g‖₂)` for each `p`.
pub fn weyl_ratios(
    setup: &HarmonicSetup,
    sigma: &SymbolField,
    f: &[Complex64],
    g: &[Complex64],
    ps: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let engine = WignerEngine::new(setup.group.clone(), setup.labels.clone(), setup.reps.clone(), f.to_vec(), g.to_vec())?;
    let q = wigner_summary(&engine, &[], Some(sigma))?.weyl.unwrap_or_default();
    let nfg = setup.group.l2_norm(f) * setup.group.l2_norm(g);
    ps.iter()
        .map(|&p| Ok((p, ratio(q.norm(), mixed_norm(sigma, p)? * nfg))))
        .collect()
}

/// The Weyl bound `|⟨W_σ f, ḡ⟩| ≤ ‖σ‖_{p,μ}‖f‖₂‖g‖₂` for `p ∈ {1, 1.5, 2}`.
pub fn weyl_rows(setup: &HarmonicSetup, f: &[Complex64], g: &[Complex64], rng: &mut impl Rng) -> Result<Vec<CheckRow>> {
    let engine = WignerEngine::new(setup.group.clone(), setup.labels.clone(), setup.reps.clone(), f.to_vec(), g.to_vec())?;
    let sigma = aligned_symbol(&engine, rng)?;
    Ok(weyl_ratios(setup, &sigma, f, g, &[1.0, 1.5, 2.0])?
        .into_iter()
        .map(|(p, r)| CheckRow::new(&format!("weyl_bound_p{p}"), setup.tag, "norm_ratio", r, 1.02))
        .collect())
}

/// Representations, Plancherel, inversion, the Wigner identities and, on
/// the affine group, the Weyl bound.
pub fn harmonic_suite(tag: GroupTag, opts: &CheckOptions) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rows = representation_rows(tag, opts.rep_counts, &mut rng)?;
    let zero = opts.function == TestFunction::Zero;
    let desk = HarmonicSetup::new(tag, opts.resolution.unwrap_or_else(|| HarmonicResolution::desk(tag)))?;
    let f = if zero { vec![Complex64::default(); desk.group.len()] } else { Bump::standard(tag).sample(&desk.group)? };
    rows.extend(plancherel_rows(&desk, &f)?);
    let reduced = HarmonicSetup::reduced(tag)?;
    let (f, g) = if zero {
        let n = reduced.group.len();
        (vec![Complex64::default(); n], vec![Complex64::default(); n])
    } else {
        wigner_pair(&reduced, &mut rng)?
    };
    rows.extend(wigner_rows(&reduced, &f, &g)?);
    if tag == GroupTag::Affine {
        rows.extend(weyl_rows(&reduced, &f, &g, &mut rng)?);
    }
    Ok(finish(rows, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn row_verdict_and_csv() {
        let r = CheckRow::new("inverse", GroupTag::Sim2, "max_rel_err", 2.5e-12, 1e-9);
        assert!(r.pass);
        assert_eq!(r.csv_row(), "inverse,sim2,max_rel_err,2.5e-12,1e-9,true");
        let r = r.with_tolerance(1e-13);
        assert!(!r.pass);
        assert!(r.to_string().ends_with(",false"));
        assert!(CheckRow::new("x", GroupTag::Affine, "m", 0.01, 0.01).pass);
    }

    #[test]
    fn relative_gap_conventions() {
        assert_eq!(relative_gap(0.0, 0.0), 0.0);
        assert_eq!(relative_gap(1.0, 0.0), 1.0);
        assert!((relative_gap(2.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(relative_gap(-3.0, -3.0), 0.0);
    }

    #[test]
    fn sim2_angles_compare_on_the_circle() {
        let g = GroupElement::sim2([1.0, 2.0], 1.5, 1e-12).unwrap();
        let h = GroupElement::sim2([1.0, 2.0], 1.5, TAU - 1e-12).unwrap();
        assert!(element_gap(&g, &h) < 1e-12);
        let k = GroupElement::sim2([1.0, 2.0], 1.5, 0.5 * TAU).unwrap();
        assert!((element_gap(&g, &k) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn group_suite_is_deterministic_and_passes() {
        for tag in GroupTag::ALL {
            let opts = CheckOptions { trials: 200, seed: 11, ..CheckOptions::default() };
            let a = group_suite(tag, &opts).unwrap();
            let b = group_suite(tag, &opts).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|r| r.pass), "{a:?}");
            let strict = CheckOptions { tolerance: Some(1e-30), ..opts };
            assert!(group_suite(tag, &strict).unwrap().iter().any(|r| !r.pass));
        }
    }

    #[test]
    fn modular_rows_recover_the_modular_function() {
        let setup = HarmonicSetup::desk(GroupTag::Affine).unwrap();
        let rows = haar_rows(GroupTag::Affine, &setup.group, 5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.pass && r.tolerance == 0.01));
    }

    #[test]
    fn rep_test_functions_use_polar_and_hyperbolic_coordinates() {
        let grids = rep_grids(GroupTag::Sim2, 16, 16).unwrap();
        let f = smooth_rep_function(grids[0].1.clone());
        let g = &grids[0].1;
        for k in 0..g.len() {
            let x = g.point(k);
            let (r, phi) = (x[0].hypot(x[1]), x[1].atan2(x[0]));
            let want = (-(r.ln()).powi(2) / (2.0 * 0.36)).exp() * (1.0 + 0.5 * phi.cos());
            assert!((f.values[k].re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_representation_rows_pass_at_default_resolution() {
        let rows = representation_rows(GroupTag::Affine, (128, 64), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
    }

    #[test]
    fn zero_function_gives_vanishing_identities() {
        let setup = HarmonicSetup::reduced(GroupTag::Affine).unwrap();
        let zero = vec![Complex64::default(); setup.group.len()];
        for r in plancherel_rows(&setup, &zero).unwrap() {
            assert_eq!(r.value, 0.0);
        }
        for r in wigner_rows(&setup, &zero, &zero).unwrap() {
            assert_eq!(r.value, 0.0);
        }
    }

    proptest! {
        #[test]
        fn random_elements_obey_the_group_laws(seed in 0u64..1000, tag_ix in 0usize..3) {
            let tag = GroupTag::ALL[tag_ix];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = algebra_rows(tag, 20, &mut rng).unwrap();
            prop_assert!(rows.iter().all(|r| r.pass), "{:?}", rows);
        }

        #[test]
        fn identity_gap_vanishes_for_inverse_pairs(seed in 0u64..1000, tag_ix in 0usize..3) {
            let tag = GroupTag::ALL[tag_ix];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_element(tag, &mut rng);
            let gi = inverse(&g);
            prop_assert!(identity_gap(&g, &gi).unwrap() < 1e-9);
            prop_assert!(identity_gap(&gi, &g).unwrap() < 1e-9);
        }
    }
}
