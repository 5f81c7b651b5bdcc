//! The singular symbols `f_α`, the oscillatory integrals `C_α` that control
//! their partial Fourier transforms, and truncated-norm divergence sweeps.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};
use std::fmt;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, Grid};
use crate::group::GroupTag;
use crate::quad::GaussLegendre;
use crate::schatten::{frobenius_norm, weighted_matrix};
use crate::setup::{Bump, HarmonicResolution, HarmonicSetup};
use crate::transforms::group_fourier;

/// Parameters of one counterexample symbol `f_α` and its truncated
/// lower-bound integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleSpec {
    pub tag: GroupTag,
    pub alpha: f64,
    /// Lebesgue exponent of the symbol space, `p > 2`.
    pub p: f64,
    /// Half-width `L` of the support box.
    pub l: f64,
    /// Inner cutoff `R` of the divergent integral.
    pub r: f64,
}

impl CounterexampleSpec {
    pub fn new(tag: GroupTag, alpha: f64, p: f64, l: f64, r: f64) -> Result<Self> {
        let spec = CounterexampleSpec { tag, alpha, p, l, r };
        spec.validate()?;
        Ok(spec)
    }

    /// Build from the conjugate exponent `p′ ∈ (1, 2)`.
    pub fn with_p_prime(tag: GroupTag, alpha: f64, p_prime: f64, l: f64, r: f64) -> Result<Self> {
        if !(p_prime > 1.0 && p_prime < 2.0) {
            return Err(Error::OutOfRange(format!(
                "p′ = {p_prime} violates 1 < p′ < 2 (equivalently p > 2)"
            )));
        }
        Self::new(tag, alpha, p_prime / (p_prime - 1.0), l, r)
    }

    /// Checks `0 < α < 1/2` (square integrability of `f_α`), `p > 2`,
    /// `L > 0` and `R > 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::OutOfRange(format!(
                "α = {} violates 1/2 > α > 0 (f_α must be square integrable)",
                self.alpha
            )));
        }
        if !(self.p > 2.0) || self.p.is_nan() {
            return Err(Error::OutOfRange(format!("p = {} violates 2 < p < ∞", self.p)));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::OutOfRange(format!("L = {} must be positive", self.l)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::OutOfRange(format!("R = {} must be positive", self.r)));
        }
        Ok(())
    }

    pub fn p_prime(&self) -> f64 {
        if self.p.is_infinite() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        }
    }

    /// The value of `α` at which the tail exponent equals `−1`.
    pub fn threshold(&self) -> f64 {
        let q = self.p_prime();
        match self.tag {
            GroupTag::Affine => 1.0 - 1.0 / q,
            GroupTag::Sim2 => 1.5 - 2.0 / q,
            GroupTag::PoincareAff => 0.75 - 0.5 / q,
        }
    }

    /// Human-readable divergence window for this group.
    pub fn divergence_window(&self) -> &'static str {
        match self.tag {
            GroupTag::Affine => "1/2 > α > 1 − 1/p′",
            GroupTag::Sim2 => "1/2 > α > 3/2 − 2/p′ with 2 > p′ > 4/3, or 1/2 > α > 0 with 1 < p′ ≤ 4/3",
            GroupTag::PoincareAff => "1/2 > α ≥ 3/4 − 1/(2p′) > 0",
        }
    }

    pub fn with_r(self, r: f64) -> Self {
        CounterexampleSpec { r, ..self }
    }
}

/// Tail power `e` of the dominant one-dimensional integral: the truncated
/// integral grows like `T^{e+1}` for `e > −1`, like `log T` at `e = −1`, and
/// converges for `e < −1`.
pub fn predicted_exponent(spec: &CounterexampleSpec) -> f64 {
    let (a, q) = (spec.alpha, spec.p_prime());
    match spec.tag {
        GroupTag::Affine => 2.0 * (a - 1.0) + 2.0 / q - 1.0,
        GroupTag::Sim2 => 2.0 * (a - 1.0) + 4.0 / q - 2.0,
        GroupTag::PoincareAff => 4.0 * (a - 1.0) + 2.0 / q,
    }
}

// ---------------------------------------------------------------------------
// The oscillatory integral C_α

const PANEL: f64 = FRAC_PI_2;
/// Above this point `∫ t^{−α} cos t dt` comes from the asymptotic series of
/// the tail instead of panel quadrature, whose cost grows linearly in `x`.
const ASYMPTOTIC_FROM: f64 = 2e4;

/// Evaluator of `∫ t^{−α} cos t dt` with a shared Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct OscillatoryIntegral {
    alpha: f64,
    rule: GaussLegendre,
}

impl OscillatoryIntegral {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::OutOfRange(format!(
                "C_α needs 0 ≤ α < 1 (the integrand is not integrable at 0), got α = {alpha}"
            )));
        }
        Ok(OscillatoryIntegral {
            alpha,
            rule: GaussLegendre::new(20),
        })
    }

    /// `∫_0^y t^{−α} cos t dt` for `0 ≤ y ≤ 1` by termwise integration of the
    /// cosine series.
    fn series(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let mut sum = 0.0;
        let mut fact = 1.0;
        let y2 = y * y;
        let mut pow = y.powf(1.0 - self.alpha);
        for k in 0..40 {
            let kk = 2.0 * k as f64;
            if k > 0 {
                fact *= (kk - 1.0) * kk;
                pow *= y2;
            }
            let term = pow / (fact * (kk + 1.0 - self.alpha));
            sum += if k % 2 == 0 { term } else { -term };
            if term < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    /// `∫_lo^hi t^{−α} cos t dt` for `1 ≤ lo ≤ hi`, on panels cut at the
    /// multiples of `π/2`.
    fn panels(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let f = |t: f64| t.powf(-self.alpha) * t.cos();
        let k0 = (lo / PANEL).floor() as u64 + 1;
        let k1 = ((hi / PANEL).ceil() as u64).max(k0);
        let mut parts = Vec::with_capacity((k1 + 1 - k0) as usize);
        let mut a = lo;
        for k in k0..=k1 {
            let b = (k as f64 * PANEL).min(hi);
            if b > a {
                parts.push(self.rule.integrate(a, b, f));
                a = b;
            }
        }
        pairwise_sum(&parts)
    }

    /// `∫_x^∞ t^{−α} cos t dt` for `x ≥ ASYMPTOTIC_FROM`, from repeated
    /// integration by parts: `∫_x^∞ t^{−α}e^{it} dt = i x^{−α}e^{ix} Σ_k (α)_k (−i/x)^k`.
    fn tail(&self, x: f64) -> f64 {
        let step = Complex64::new(0.0, -1.0 / x);
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 0..40 {
            term *= step * (self.alpha + k as f64);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        (Complex64::i() * Complex64::from_polar(x.powf(-self.alpha), x) * sum).re
    }

    /// `∫_x^y t^{−α} cos t dt` for `0 ≤ x ≤ y`.
    pub fn between(&self, x: f64, y: f64) -> f64 {
        if y < x {
            return -self.between(y, x);
        }
        if x >= ASYMPTOTIC_FROM {
            return self.tail(x) - self.tail(y);
        }
        if y > ASYMPTOTIC_FROM {
            return self.between(x, ASYMPTOTIC_FROM) + self.tail(ASYMPTOTIC_FROM) - self.tail(y);
        }
        let head = if x < 1.0 { self.series(y.min(1.0)) - self.series(x) } else { 0.0 };
        head + self.panels(x.max(1.0), y.max(1.0))
    }

    /// `C_α(x) = ∫_0^x t^{−α} cos t dt`.
    pub fn value(&self, x: f64) -> f64 {
        self.between(0.0, x)
    }

    /// Values at an increasing list of points, integrating each gap once.
    pub fn values_sorted(&self, xs: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(xs.len());
        let mut prev = 0.0;
        let mut acc = 0.0;
        for &x in xs {
            acc += self.between(prev, x);
            prev = x;
            out.push(acc);
        }
        out
    }
}

/// `C_α(x) = ∫_0^x t^{−α} cos t dt`.
pub fn oscillatory_c(alpha: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::OutOfRange(format!("C_α needs a finite x ≥ 0, got {x}")));
    }
    Ok(OscillatoryIntegral::new(alpha)?.value(x))
}

/// Relative quadrature error allowed when comparing half-period increments.
const ENVELOPE_RTOL: f64 = 1e-6;

/// `min C_α` over an `n`-point logarithmic grid on `[x_min, x_max]` and over
/// the tail `x > x_max`. Past `x_max` the local minima of `C_α` sit at
/// `t = (2k + 3/2)π` and increase, because successive half-period
/// contributions alternate in sign and shrink; the first such minimum bounds
/// the tail. The shrinkage is verified on the last two half periods.
pub fn lower_bound_b(alpha: f64, x_min: f64, x_max: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::OutOfRange(format!("lower bound needs 0 < α < 1/2, got {alpha}")));
    }
    if !(x_min > 0.0 && x_min < x_max && x_max.is_finite()) || n < 2 {
        return Err(Error::InvalidBounds(format!(
            "lower bound window [{x_min}, {x_max}] with {n} points"
        )));
    }
    let c = OscillatoryIntegral::new(alpha)?;
    let ratio = (x_max / x_min).ln() / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|k| x_min * (ratio * k as f64).exp()).collect();
    let k0 = ((x_max / PI - 1.5) / 2.0).ceil().max(0.0);
    let tail_min = (2.0 * k0 + 1.5) * PI;
    xs.push(tail_min);
    let vals = c.values_sorted(&xs);
    let (mut min, mut at) = (f64::INFINITY, 0.0);
    for (&x, &v) in xs.iter().zip(&vals) {
        if v < min {
            min = v;
            at = x;
        }
    }
    let m = (tail_min / PI - 0.5).round();
    let h1 = c.between((m - 1.0) * PI - FRAC_PI_2, (m - 1.0) * PI + FRAC_PI_2);
    let h2 = c.between(m * PI - FRAC_PI_2, m * PI + FRAC_PI_2);
    // far out the two increments agree to ~απ/x, below the quadrature
    // error, so equality within that error counts as decay
    if !(h1 * h2 < 0.0 && h2.abs() < h1.abs() * (1.0 + ENVELOPE_RTOL)) {
        return Err(Error::OutOfRange(format!(
            "tail of C_α is not enveloped past x = {x_max}: half-period increments {h1}, {h2}"
        )));
    }
    if min <= 0.0 {
        return Err(Error::NonPositiveLowerBound { min, at });
    }
    Ok(min)
}

/// Smallest `R = R₀·2^k` for which the bound `C_α(x) ≥ B > 0` holds on
/// `x ≥ R·L`, together with `B`.
pub fn admissible_cutoff(alpha: f64, l: f64, r0: f64) -> Result<(f64, f64)> {
    let mut r = r0;
    for _ in 0..40 {
        let x_min = r * l;
        match lower_bound_b(alpha, x_min, (x_min * 1e3).max(1e4), 4096) {
            Ok(b) => return Ok((r, b)),
            Err(Error::NonPositiveLowerBound { .. }) => r *= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::OutOfRange(format!("no admissible cutoff R found for α = {alpha}")))
}

// ---------------------------------------------------------------------------
// The symbols f_α

/// Samples of `f_α` on a group grid: `|b|^{−α}a²` (U), `|b₁b₂|^{−α}a³θ`
/// (SIM(2)), `|b₁b₂|^{−α}a⁵ϑ` (P_aff), inside the support box and zero
/// outside.
pub fn build_f_alpha(spec: &CounterexampleSpec, grid: &Grid) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let tag = grid
        .group_tag()
        .ok_or_else(|| Error::IncompatibleGrid("f_α needs a group grid".into()))?;
    if tag != spec.tag {
        return Err(Error::GroupMismatch(spec.tag, tag));
    }
    let mut out = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let c = grid.coords(k);
        out.push(Complex64::from(f_alpha_value(spec, c)?));
    }
    Ok(out)
}

/// As [`build_f_alpha`] with every `|b_i|^{−α}` factor replaced by its mean
/// over the node's translation cell clipped to `[−L, L]`. Point samples of the
/// singular factor converge only like `Δb^{1−α}`; cell means integrate it
/// exactly.
pub fn build_f_alpha_cell_mean(spec: &CounterexampleSpec, grid: &Grid) -> Result<Vec<Complex64>> {
    let point = build_f_alpha(spec, grid)?;
    let nb = spec.tag.translation_dim();
    let steps: Vec<f64> = grid.axes()[..nb].iter().map(|a| a.step).collect();
    let (l, al) = (spec.l, spec.alpha);
    let anti = |x: f64| x.signum() * x.abs().powf(1.0 - al) / (1.0 - al);
    Ok(point
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            if v == Complex64::default() {
                return v;
            }
            let b = &grid.coords(k)[..nb];
            let ratio: f64 = b
                .iter()
                .zip(&steps)
                .map(|(&x, &h)| {
                    let (lo, hi) = ((x - 0.5 * h).max(-l), (x + 0.5 * h).min(l));
                    (anti(hi) - anti(lo)) / (hi - lo) * x.abs().powf(al)
                })
                .product();
            v * ratio
        })
        .collect())
}

/// `f_α` at group coordinates `(b…, a[, angle])`.
pub fn f_alpha_value(spec: &CounterexampleSpec, c: &[f64]) -> Result<f64> {
    let (l, al) = (spec.l, spec.alpha);
    let nb = spec.tag.translation_dim();
    let b = &c[..nb];
    let a = c[nb];
    if b.iter().any(|v| v.abs() > l) || a > l || a <= 0.0 {
        return Ok(0.0);
    }
    if b.contains(&0.0) {
        return Err(Error::SingularNode(format!("f_α is singular at b = {b:?}")));
    }
    let sing: f64 = b.iter().map(|v| v.abs().powf(-al)).product();
    Ok(match spec.tag {
        GroupTag::Affine => sing * a * a,
        GroupTag::Sim2 => sing * a.powi(3) * c[3],
        GroupTag::PoincareAff => {
            if c[3].abs() > l {
                0.0
            } else {
                sing * a.powi(5) * c[3]
            }
        }
    })
}

/// `(F₁f_α)(s, a) = (2π)^{−1/2}·2C_α(|s|L)|s|^{α−1}·a²` for `0 < a ≤ L`.
pub fn closed_form_f1_affine(spec: &CounterexampleSpec, s: f64, a: f64) -> Result<Complex64> {
    if spec.tag != GroupTag::Affine {
        return Err(Error::GroupMismatch(GroupTag::Affine, spec.tag));
    }
    let c = OscillatoryIntegral::new(spec.alpha)?;
    f1_affine_with(&c, spec, s, a)
}

fn f1_affine_with(c: &OscillatoryIntegral, spec: &CounterexampleSpec, s: f64, a: f64) -> Result<Complex64> {
    let profile = f1_profile(c, spec, s)?;
    if !(a > 0.0 && a <= spec.l) {
        return Ok(Complex64::default());
    }
    Ok(Complex64::from(profile * a * a))
}

/// `(2π)^{−1/2}∫_{−L}^{L} e^{−ibs}|b|^{−α} db = (2π)^{−1/2}·2C_α(|s|L)|s|^{α−1}`.
fn f1_profile(c: &OscillatoryIntegral, spec: &CounterexampleSpec, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Err(Error::SingularNode("F₁f_α is singular at s = 0".into()));
    }
    let s = s.abs();
    Ok(TAU.sqrt().recip() * 2.0 * c.value(s * spec.l) * s.powf(spec.alpha - 1.0))
}

// ---------------------------------------------------------------------------
// Truncated lower-bound integrals

/// Lower-bound integral of the S₂ norm of `f̂_α(ρ)K_ρ^{1/p′}` with its outer
/// limit at `T`: a constant (bounded factors and `B⁴`/`B²`) times the
/// divergent one- or two-dimensional integral.
#[derive(Debug, Clone)]
pub struct LowerBoundIntegral {
    pub spec: CounterexampleSpec,
    /// Lower bound of `C_α` on `[R·L, ∞)`.
    pub b: f64,
    /// Product of every factor except the divergent integral.
    pub constant: f64,
    rule: GaussLegendre,
}

/// Log-panels per decade for the power integrals.
const PANELS_PER_DECADE: f64 = 8.0;

impl LowerBoundIntegral {
    /// Uses `spec.r` as given; fails if `C_α` is not bounded below by a
    /// positive constant on `[R·L, ∞)`.
    pub fn new(spec: CounterexampleSpec) -> Result<Self> {
        spec.validate()?;
        let x_min = spec.r * spec.l;
        let b = lower_bound_b(spec.alpha, x_min, (x_min * 1e3).max(1e4), 4096)?;
        Ok(Self::with_bound(spec, b))
    }

    /// As [`LowerBoundIntegral::new`] after raising `R` to the first
    /// admissible cutoff.
    pub fn admissible(spec: CounterexampleSpec) -> Result<Self> {
        spec.validate()?;
        let (r, b) = admissible_cutoff(spec.alpha, spec.l, spec.r)?;
        Ok(Self::with_bound(spec.with_r(r), b))
    }

    /// With an explicit lower bound `B ≥ 0` for `C_α`.
    pub fn with_bound(spec: CounterexampleSpec, b: f64) -> Self {
        let rule = GaussLegendre::new(16);
        let q = spec.p_prime();
        let (al, l, r) = (spec.alpha, spec.l, spec.r);
        let pow_int = |e: f64, lo: f64, hi: f64| {
            rule.integrate_panels(lo, hi, 64, |x| if x > 0.0 { x.powf(e) } else { 0.0 })
        };
        let constant = match spec.tag {
            GroupTag::Affine => {
                // |F₁f|² ≥ (2/π)B²s^{2(α−1)}a⁴, weight a^{1+2/p′−4}
                let a_int = pow_int(1.0 + 2.0 / q, 0.0, l);
                2.0 * b * b / PI * a_int
            }
            GroupTag::Sim2 => {
                // |F₁f|² ≥ (2π)^{−2}(2B)⁴ξ₁^{2(α−1)}ξ₂^{2(α−1)}a⁶θ², weight
                // (a‖ξ‖)^{4/p′−2}a^{−3} with ‖ξ‖ ≥ ξ₁/√2
                let theta_int = pow_int(2.0, 0.0, TAU);
                let a_int = pow_int(1.0 + 4.0 / q, 0.0, l);
                let xi2 = decaying_tail(&rule, 2.0 * (al - 1.0), r);
                (TAU).powi(-2) * (2.0 * b).powi(4) * SQRT_2.recip().powf(4.0 / q - 2.0) * theta_int * a_int * xi2
            }
            GroupTag::PoincareAff => {
                // |Fφ|² ≥ (2π)^{−2}(2B)⁴x₁^{2(α−1)}x₂^{2(α−1)}, |f|² carries
                // a¹⁰ϑ², weight a^{2/p′−6}|⟨x;x⟩|^{2/p′−1} with |⟨x;x⟩| ≥ 2x₂ on
                // the region x₂ < x₁ − 1
                let a_int = pow_int(4.0 + 2.0 / q, 0.0, l);
                let th_int = pow_int(2.0, -l, l);
                (TAU).powi(-2) * (2.0 * b).powi(4) * a_int * th_int * 2f64.powf(2.0 / q - 1.0)
            }
        };
        LowerBoundIntegral {
            spec,
            b,
            constant,
            rule,
        }
    }

    /// Integrand of the divergent outer integral at `x`.
    fn outer(&self, x: f64) -> f64 {
        let s = &self.spec;
        match s.tag {
            GroupTag::PoincareAff => {
                let hi = x - 1.0;
                if hi <= s.r {
                    return 0.0;
                }
                let e2 = 2.0 * (s.alpha - 1.0) + 2.0 / s.p_prime() - 1.0;
                x.powf(2.0 * (s.alpha - 1.0)) * self.log_power_integral(e2, s.r, hi)
            }
            _ => x.powf(predicted_exponent(s)),
        }
    }

    /// `∫_lo^hi x^e dx` on logarithmic panels.
    fn log_power_integral(&self, e: f64, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let (u0, u1) = (lo.ln(), hi.ln());
        let panels = ((u1 - u0) / std::f64::consts::LN_10 * PANELS_PER_DECADE).ceil().max(1.0) as usize;
        self.rule
            .integrate_panels(u0, u1, panels, |u| ((e + 1.0) * u).exp())
    }

    /// `∫_lo^hi outer(x) dx` on logarithmic panels.
    fn outer_integral(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let lo = if self.spec.tag == GroupTag::PoincareAff { lo.max(self.spec.r + 1.0) } else { lo };
        if hi <= lo {
            return 0.0;
        }
        let (u0, u1) = (lo.ln(), hi.ln());
        let panels = ((u1 - u0) / std::f64::consts::LN_10 * PANELS_PER_DECADE).ceil().max(1.0) as usize;
        self.rule.integrate_panels(u0, u1, panels, |u| {
            let x = u.exp();
            self.outer(x) * x
        })
    }

    /// The truncated integral with outer limit `T`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !(t > self.spec.r) {
            return Err(Error::InvalidBounds(format!(
                "outer cutoff T = {t} must exceed R = {}",
                self.spec.r
            )));
        }
        Ok(self.constant * self.outer_integral(self.spec.r, t))
    }

    /// Values at increasing cutoffs, integrating each gap once.
    pub fn values(&self, cutoffs: &[f64]) -> Result<Vec<f64>> {
        let mut prev = self.spec.r;
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(cutoffs.len());
        for &t in cutoffs {
            if !(t > prev) {
                return Err(Error::InvalidBounds(format!("cutoffs must increase past R, got {t} after {prev}")));
            }
            acc += self.outer_integral(prev, t);
            prev = t;
            out.push(self.constant * acc);
        }
        Ok(out)
    }
}

/// `∫_R^∞ x^e dx` for `e < −1`, numerically after `x = R·e^v`.
fn decaying_tail(rule: &GaussLegendre, e: f64, r: f64) -> f64 {
    let rate = e + 1.0;
    if rate >= 0.0 {
        return f64::INFINITY;
    }
    let v_max = 60.0 / -rate;
    r.powf(rate) * rule.integrate_panels(0.0, v_max, 120, |v| (rate * v).exp())
}

/// The truncated lower-bound integral of `spec` with outer cutoff `T`.
pub fn truncated_divergence_integral(spec: &CounterexampleSpec, t: f64) -> Result<f64> {
    LowerBoundIntegral::new(*spec)?.value(t)
}

// ---------------------------------------------------------------------------
// Sweeps

/// One point of a divergence sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub spec: CounterexampleSpec,
    pub t: f64,
    pub value: f64,
    pub predicted_exponent: f64,
    pub fitted_slope: Option<f64>,
}

pub const SWEEP_HEADER: &str = "group,alpha,p_prime,L,R,T,value,predicted_exponent";

impl SweepRecord {
    pub fn csv_row(&self) -> String {
        let s = &self.spec;
        format!(
            "{},{},{},{},{},{:e},{:e},{}",
            s.tag.name(),
            s.alpha,
            s.p_prime(),
            s.l,
            s.r,
            self.t,
            self.value,
            self.predicted_exponent
        )
    }
}

/// Geometric cutoffs `R·10^{k/per_decade}` from `R·10` to `R·10^decades`.
pub fn sweep_cutoffs(r: f64, decades: u32, per_decade: u32) -> Vec<f64> {
    let per = per_decade.max(1);
    (per..=decades * per)
        .map(|k| r * 10f64.powf(k as f64 / per as f64))
        .collect()
}

/// Sweep records ordered by `T`, with `R` raised to the first admissible
/// cutoff if needed.
pub fn divergence_sweep(spec: &CounterexampleSpec, decades: u32, per_decade: u32) -> Result<Vec<SweepRecord>> {
    let lb = LowerBoundIntegral::admissible(*spec)?;
    let cutoffs = sweep_cutoffs(lb.spec.r, decades, per_decade);
    let values = lb.values(&cutoffs)?;
    let e = predicted_exponent(&lb.spec);
    Ok(cutoffs
        .into_iter()
        .zip(values)
        .map(|(t, value)| SweepRecord {
            spec: lb.spec,
            t,
            value,
            predicted_exponent: e,
            fitted_slope: None,
        })
        .collect())
}

/// Records whose cutoff lies in the last decade `[T_max/10, T_max]`.
fn last_decade(records: &[SweepRecord]) -> Result<Vec<&SweepRecord>> {
    if records.len() < 4 {
        return Err(Error::TooFewRecords {
            need: 4,
            got: records.len(),
        });
    }
    let t_max = records.iter().map(|r| r.t).fold(f64::NEG_INFINITY, f64::max);
    let tail: Vec<&SweepRecord> = records.iter().filter(|r| r.t >= t_max / 10.0 * (1.0 - 1e-12)).collect();
    if tail.len() < 2 {
        return Err(Error::TooFewRecords {
            need: 2,
            got: tail.len(),
        });
    }
    Ok(tail)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Least-squares slope of `log(value)` against `log(T)` over the last decade.
pub fn fit_loglog_slope(records: &[SweepRecord]) -> Result<f64> {
    let tail = last_decade(records)?;
    if tail.iter().any(|r| !(r.value > 0.0)) {
        return Err(Error::OutOfRange("log-log fit needs positive values".into()));
    }
    let xs: Vec<f64> = tail.iter().map(|r| r.t.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.value.ln()).collect();
    Ok(least_squares_slope(&xs, &ys))
}

/// Growth rate of the increments `value(T_k) − value(T_{k−1})` over the last
/// decade. For `value ~ c·T^γ + const` the increments scale like `T^γ`
/// whatever the sign of `γ`, and like `T⁰` for logarithmic growth.
pub fn increment_slope(records: &[SweepRecord]) -> Result<f64> {
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    let tail = last_decade(&sorted)?;
    let first = sorted.len() - tail.len();
    let start = first.max(1);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in start..sorted.len() {
        let d = sorted[k].value - sorted[k - 1].value;
        if !(d > 0.0) {
            return Err(Error::OutOfRange(format!("non-increasing sweep at T = {}", sorted[k].t)));
        }
        // normalize by the log-spacing so unequal ratios still compare
        let dl = (sorted[k].t / sorted[k - 1].t).ln();
        xs.push(sorted[k].t.ln());
        ys.push((d / dl).ln());
    }
    if xs.len() < 2 {
        return Err(Error::TooFewRecords {
            need: 2,
            got: xs.len(),
        });
    }
    Ok(least_squares_slope(&xs, &ys))
}

/// Behavior of a truncated integral as `T → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Divergent,
    Logarithmic,
    Convergent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Divergent => "divergent",
            Verdict::Logarithmic => "logarithmic",
            Verdict::Convergent => "convergent",
        })
    }
}

/// Increment slopes within this band around zero are read as logarithmic.
pub const LOG_BAND: f64 = 0.02;
/// Relative tolerance of the fitted slope against `e + 1`.
pub const SLOPE_TOLERANCE: f64 = 0.05;

/// Outcome of a sweep against its prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub predicted_slope: f64,
    pub fitted_slope: f64,
    pub increment_slope: f64,
    pub verdict: Verdict,
    pub pass: bool,
}

/// Fit, classify and compare a sweep with `e + 1`: divergent sweeps must
/// match the predicted slope within 5%, convergent ones must show shrinking
/// increments (Cauchy), and `e = −1` must read as logarithmic.
pub fn summarize_sweep(records: &[SweepRecord]) -> Result<SweepSummary> {
    let first = records.first().ok_or(Error::TooFewRecords { need: 4, got: 0 })?;
    let predicted = first.predicted_exponent + 1.0;
    let fitted = fit_loglog_slope(records)?;
    let inc = increment_slope(records)?;
    let verdict = if inc > LOG_BAND {
        Verdict::Divergent
    } else if inc < -LOG_BAND {
        Verdict::Convergent
    } else {
        Verdict::Logarithmic
    };
    let pass = if predicted > LOG_BAND {
        verdict == Verdict::Divergent && (fitted - predicted).abs() <= SLOPE_TOLERANCE * predicted
    } else if predicted < -LOG_BAND {
        verdict == Verdict::Convergent
    } else {
        verdict == Verdict::Logarithmic
    };
    Ok(SweepSummary {
        predicted_slope: predicted,
        fitted_slope: fitted,
        increment_slope: inc,
        verdict,
        pass,
    })
}

/// Write sweep records as CSV with [`SWEEP_HEADER`] and a trailing
/// `# summary` comment line.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], summary: Option<&SweepSummary>, mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    if let Some(s) = summary {
        writeln!(
            out,
            "# summary fitted_slope={:.6} predicted_slope={:.6} increment_slope={:.6} verdict={} pass={}",
            s.fitted_slope, s.predicted_slope, s.increment_slope, s.verdict, s.pass
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The S₂ identity on the affine group

/// Both sides of the S₂ identity and their relative discrepancy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S2Report {
    /// `Σ_± ‖f̂(ρ±)K±^{1/p′}‖²_{S₂}` from the discretized kernels.
    pub lhs: f64,
    /// `(2π)^{1−2/p′}∫∫|F₁f(s,a)|²a^{2/p′−3}|s|^{2/p′−1} ds da` by direct
    /// quadrature over the windows the kernels resolve.
    pub rhs: f64,
    pub relative_error: f64,
}

/// Two-pipeline check of the S₂ identity on the affine group. `f1` is the
/// closed-form partial Fourier transform of the sampled `f` and `a_max`
/// caps the dilation window of the right side (the support edge of `f`).
pub fn s2_two_pipeline(
    setup: &HarmonicSetup,
    f: &[Complex64],
    mut f1: impl FnMut(f64, f64) -> Result<Complex64>,
    p_prime: f64,
    a_max: f64,
) -> Result<S2Report> {
    if setup.tag != GroupTag::Affine {
        return Err(Error::GroupMismatch(GroupTag::Affine, setup.tag));
    }
    let e = 1.0 / p_prime;
    let mut lhs = 0.0;
    for (label, rep) in setup.labels.iter().zip(&setup.reps) {
        let k = group_fourier(*label, &setup.group, f, rep, e)?;
        lhs += frobenius_norm(&weighted_matrix(&k)).powi(2);
    }
    // windows: rep cells in |s| capped at the Nyquist band, group cells in a
    let rep_axis = setup.reps[0].axes()[0];
    let h = rep_axis.step;
    let b_axis = setup.group.axes()[0];
    let band = PI / b_axis.step;
    let u_lo = rep_axis.coord(0) - 0.5 * h;
    let u_hi = (rep_axis.coord(rep_axis.count - 1) + 0.5 * h).min(band.ln());
    let a_axis = setup.group.axes()[1];
    let v_lo = a_axis.coord(0) - 0.5 * a_axis.step;
    let v_hi = (a_axis.coord(a_axis.count - 1) + 0.5 * a_axis.step).min(a_max.ln());
    let rule = GaussLegendre::new(12);
    let panels = |lo: f64, hi: f64| (((hi - lo) / 0.05).ceil() as usize).max(1);
    let us = rule.composite(u_lo, u_hi, panels(u_lo, u_hi));
    let vs = rule.composite(v_lo, v_hi, panels(v_lo, v_hi));
    let mut terms = Vec::with_capacity(us.len() * vs.len() * 2);
    for sign in [1.0, -1.0] {
        for &(u, wu) in &us {
            let s = sign * u.exp();
            // ds = |s| du, da = a dv
            let ws = wu * s.abs().powf(2.0 / p_prime);
            for &(v, wv) in &vs {
                let a = v.exp();
                let val = f1(s, a)?.norm_sqr();
                terms.push(ws * wv * val * a.powf(2.0 / p_prime - 2.0));
            }
        }
    }
    let rhs = TAU.powf(1.0 - 2.0 / p_prime) * pairwise_sum(&terms);
    let relative_error = if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
    };
    Ok(S2Report {
        lhs,
        rhs,
        relative_error,
    })
}

/// The S₂ identity for a Gaussian bump on the affine group, whose partial
/// Fourier transform `σ_b e^{−σ_b²(s−k)²/2}·profile(ln a)` is closed form.
pub fn smooth_s2_check(res: HarmonicResolution, p_prime: f64) -> Result<S2Report> {
    if !(p_prime > 1.0 && p_prime <= 2.0) {
        return Err(Error::InvalidExponent(p_prime));
    }
    let setup = HarmonicSetup::new(GroupTag::Affine, res)?;
    let bump = Bump::standard(GroupTag::Affine);
    let f = bump.sample(&setup.group)?;
    let sb = bump.sigma_b;
    s2_two_pipeline(
        &setup,
        &f,
        |s, a| {
            let t = (a.ln() - bump.ln_a0) / bump.sigma_ln_a;
            let ds = s - bump.wave[0];
            Ok(Complex64::from(sb * (-0.5 * sb * sb * ds * ds).exp() * (-0.5 * t * t).exp()))
        },
        p_prime,
        f64::INFINITY,
    )
}

/// Affine grids for the S₂ check of `f_α`: the translation axis covers the
/// support `[−L, L]` with `b_count` cells (even, so no node sits at `b = 0`).
pub fn s2_resolution(l: f64, b_count: usize) -> HarmonicResolution {
    HarmonicResolution {
        rep_radial: 64,
        r_min: 1e-3,
        r_max: 12.0,
        b_count,
        b_half_width: l,
        a_first: -40,
        a_count: 48,
        ..HarmonicResolution::desk(GroupTag::Affine)
    }
}

/// The S₂ identity for `f_α` on the affine group at resolution `res`.
pub fn small_grid_s2_check(spec: &CounterexampleSpec, res: HarmonicResolution) -> Result<S2Report> {
    if spec.tag != GroupTag::Affine {
        return Err(Error::GroupMismatch(GroupTag::Affine, spec.tag));
    }
    let setup = HarmonicSetup::new(GroupTag::Affine, res)?;
    let f = build_f_alpha_cell_mean(spec, &setup.group)?;
    // the sampled support ends at the cell edge above the last node a ≤ L
    let a_axis = setup.group.axes()[1];
    let last = (0..a_axis.count).rev().find(|&k| a_axis.value(k) <= spec.l);
    let a_max = match last {
        Some(k) => (a_axis.coord(k) + 0.5 * a_axis.step).exp(),
        None => return Ok(S2Report { lhs: 0.0, rhs: 0.0, relative_error: 0.0 }),
    };
    let c = OscillatoryIntegral::new(spec.alpha)?;
    s2_two_pipeline(
        &setup,
        &f,
        |s, a| {
            if a > a_max {
                return Ok(Complex64::default());
            }
            Ok(Complex64::from(f1_profile(&c, spec, s)? * a * a))
        },
        spec.p_prime(),
        a_max,
    )
}
