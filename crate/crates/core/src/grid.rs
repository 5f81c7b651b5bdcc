//! Quadrature grids for the representation spaces (half-lines, the plane,
//! the four light cones) and for the groups themselves.
//!
//! A grid is a tensor product of 1-D [`Axis`] objects. Dilation-type axes are
//! uniform in `ln(·)`, so the group dilations act by shifting indices. Each
//! node carries a positive weight such that `Σ w_k φ(x_k) ≈ ∫ φ`.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{haar_density, GroupElement, GroupTag, HaarSide};

/// Sign of a half-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The four light-cone sectors `C_i^j` of the plane.
///
/// `C11 = {x₁ > |x₂|}`, `C21 = {−x₁ > |x₂|}`, `C12 = {x₂ > |x₁|}`,
/// `C22 = {−x₂ > |x₁|}`. The last two are the sectors where `x₂` dominates, so
/// that every cone is invariant under the hyperbolic rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cone {
    C11,
    C21,
    C12,
    C22,
}

impl Cone {
    pub const ALL: [Cone; 4] = [Cone::C11, Cone::C21, Cone::C12, Cone::C22];

    pub fn from_indices(i: u8, j: u8) -> Result<Cone> {
        match (i, j) {
            (1, 1) => Ok(Cone::C11),
            (2, 1) => Ok(Cone::C21),
            (1, 2) => Ok(Cone::C12),
            (2, 2) => Ok(Cone::C22),
            _ => Err(Error::InvalidCone(i, j)),
        }
    }

    pub fn indices(self) -> (u8, u8) {
        match self {
            Cone::C11 => (1, 1),
            Cone::C21 => (2, 1),
            Cone::C12 => (1, 2),
            Cone::C22 => (2, 2),
        }
    }

    /// Point with hyperbolic polar coordinates `(r, u)`; `|⟨x;x⟩| = r²`.
    pub fn point(self, r: f64, u: f64) -> [f64; 2] {
        let (c, s) = (u.cosh(), u.sinh());
        match self {
            Cone::C11 => [r * c, r * s],
            Cone::C21 => [-r * c, r * s],
            Cone::C12 => [r * s, r * c],
            Cone::C22 => [r * s, -r * c],
        }
    }

    pub fn contains(self, x: [f64; 2]) -> bool {
        match self {
            Cone::C11 => x[0] > x[1].abs(),
            Cone::C21 => -x[0] > x[1].abs(),
            Cone::C12 => x[1] > x[0].abs(),
            Cone::C22 => -x[1] > x[0].abs(),
        }
    }

    /// Inverse of [`Cone::point`], or `None` outside the cone.
    pub fn coordinates(self, x: [f64; 2]) -> Option<(f64, f64)> {
        if !self.contains(x) {
            return None;
        }
        let r = minkowski(x, x).abs().sqrt();
        let t = match self {
            Cone::C11 => x[1] / x[0],
            Cone::C21 => -x[1] / x[0],
            Cone::C12 => x[0] / x[1],
            Cone::C22 => -x[0] / x[1],
        };
        Some((r, t.atanh()))
    }

    /// `Λ_ϑ` maps the cone coordinate `u` to `u + boost_sign()·ϑ`.
    pub fn boost_sign(self) -> f64 {
        match self {
            Cone::C11 | Cone::C12 => 1.0,
            Cone::C21 | Cone::C22 => -1.0,
        }
    }
}

/// Minkowski bilinear form `⟨x;y⟩ = x₁y₁ − x₂y₂`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinkowskiForm;

impl MinkowskiForm {
    pub fn eval(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        minkowski(x, y)
    }
}

#[inline]
pub fn minkowski(x: [f64; 2], y: [f64; 2]) -> f64 {
    x[0] * y[0] - x[1] * y[1]
}

/// Which set a grid discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainTag {
    HalfLinePlus,
    HalfLineMinus,
    Plane,
    Cone(Cone),
    GroupDomain(GroupTag),
}

impl DomainTag {
    fn encode(self) -> String {
        match self {
            DomainTag::HalfLinePlus => "halfline+".into(),
            DomainTag::HalfLineMinus => "halfline-".into(),
            DomainTag::Plane => "plane".into(),
            DomainTag::Cone(c) => {
                let (i, j) = c.indices();
                format!("cone{i}{j}")
            }
            DomainTag::GroupDomain(t) => format!("group-{}", t.name()),
        }
    }

    fn decode(s: &str) -> Option<DomainTag> {
        Some(match s {
            "halfline+" => DomainTag::HalfLinePlus,
            "halfline-" => DomainTag::HalfLineMinus,
            "plane" => DomainTag::Plane,
            _ if s.starts_with("cone") && s.len() == 6 => {
                let b = s.as_bytes();
                Cone::from_indices(b[4] - b'0', b[5] - b'0').ok().map(DomainTag::Cone)?
            }
            _ => DomainTag::GroupDomain(GroupTag::parse(s.strip_prefix("group-")?)?),
        })
    }
}

/// Quadrature rule along an axis.
///
/// `Trapezoid` halves the two end weights. `Lattice` gives every node a full
/// cell; in log coordinates this makes a dilation by an integer power of the
/// grid ratio an exact, weight-preserving re-indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Trapezoid,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisKind {
    /// Uniform in the coordinate itself.
    Linear,
    /// Uniform in the logarithm of a positive coordinate.
    Log,
    /// Uniform on a circle of circumference `count·step`.
    Periodic,
}

/// A uniform 1-D axis in a (possibly transformed) coordinate `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub rule: Rule,
    /// First node in the transformed coordinate (`ln` value for log axes).
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

/// Interpolation stencil: at most four nodes for a 2-D grid.
#[derive(Debug, Clone, Default)]
pub struct Stencil {
    pub entries: Vec<(usize, f64)>,
}

impl Axis {
    pub fn linear(min: f64, max: f64, count: usize, rule: Rule) -> Result<Axis> {
        if !(min.is_finite() && max.is_finite() && min < max) || count < 2 {
            return Err(Error::InvalidBounds(format!(
                "linear axis [{min}, {max}] with {count} nodes"
            )));
        }
        Ok(Axis {
            kind: AxisKind::Linear,
            rule,
            start: min,
            step: (max - min) / (count - 1) as f64,
            count,
        })
    }

    pub fn log(min: f64, max: f64, count: usize, rule: Rule) -> Result<Axis> {
        if !(min.is_finite() && max.is_finite() && min > 0.0 && min < max) || count < 2 {
            return Err(Error::InvalidBounds(format!(
                "log axis [{min}, {max}] with {count} nodes"
            )));
        }
        let (l0, l1) = (min.ln(), max.ln());
        Ok(Axis {
            kind: AxisKind::Log,
            rule,
            start: l0,
            step: (l1 - l0) / (count - 1) as f64,
            count,
        })
    }

    /// Midpoint rule on `[min, max]`: `count` full cells, nodes at cell centres.
    pub fn midpoint(min: f64, max: f64, count: usize) -> Result<Axis> {
        if !(min.is_finite() && max.is_finite() && min < max) || count < 1 {
            return Err(Error::InvalidBounds(format!(
                "midpoint axis [{min}, {max}] with {count} cells"
            )));
        }
        let step = (max - min) / count as f64;
        Ok(Axis {
            kind: AxisKind::Linear,
            rule: Rule::Lattice,
            start: min + 0.5 * step,
            step,
            count,
        })
    }

    /// Log axis whose nodes are `exp(step·k)` for `k = first..first+count`.
    pub fn log_lattice(step: f64, first: i64, count: usize) -> Result<Axis> {
        if !(step.is_finite() && step > 0.0) || count < 1 {
            return Err(Error::InvalidBounds(format!("log lattice step {step}")));
        }
        Ok(Axis {
            kind: AxisKind::Log,
            rule: Rule::Lattice,
            start: step * first as f64,
            step,
            count,
        })
    }

    /// Linear axis with nodes `step·k` for `k = first..first+count`.
    pub fn linear_lattice(step: f64, first: i64, count: usize) -> Result<Axis> {
        if !(step.is_finite() && step > 0.0) || count < 1 {
            return Err(Error::InvalidBounds(format!("lattice step {step}")));
        }
        Ok(Axis {
            kind: AxisKind::Linear,
            rule: Rule::Lattice,
            start: step * first as f64,
            step,
            count,
        })
    }

    /// Full circle `[0, 2π)` with `count` equispaced nodes.
    pub fn circle(count: usize) -> Result<Axis> {
        if count < 2 {
            return Err(Error::InvalidBounds(format!("circle with {count} nodes")));
        }
        Ok(Axis {
            kind: AxisKind::Periodic,
            rule: Rule::Lattice,
            start: 0.0,
            step: TAU / count as f64,
            count,
        })
    }

    /// Transformed coordinate of node `k`.
    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    /// Physical coordinate of node `k`.
    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        match self.kind {
            AxisKind::Log => self.coord(k).exp(),
            _ => self.coord(k),
        }
    }

    /// Weight of node `k` for integration in the physical coordinate.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        let end = self.kind != AxisKind::Periodic
            && self.rule == Rule::Trapezoid
            && (k == 0 || k + 1 == self.count);
        let w = if end { 0.5 * self.step } else { self.step };
        match self.kind {
            AxisKind::Log => w * self.value(k),
            _ => w,
        }
    }

    /// Transformed coordinate of a physical value, if it has one.
    pub fn to_coord(&self, v: f64) -> Option<f64> {
        match self.kind {
            AxisKind::Log => (v > 0.0).then(|| v.ln()),
            _ => Some(v),
        }
    }

    /// Fractional position of transformed coordinate `t`: `(k, λ)` with
    /// interpolation between nodes `k` and `k+1` (wrapped on a circle).
    /// Positions within `1e-9` of a node snap to it (`λ = 0`).
    pub fn locate(&self, t: f64) -> Option<(usize, f64)> {
        let mut x = (t - self.start) / self.step;
        if self.kind == AxisKind::Periodic {
            x = x.rem_euclid(self.count as f64);
        }
        let nearest = x.round();
        if (x - nearest).abs() < 1e-9 {
            let k = if self.kind == AxisKind::Periodic {
                (nearest as i64).rem_euclid(self.count as i64)
            } else {
                nearest as i64
            };
            return (k >= 0 && (k as usize) < self.count).then_some((k as usize, 0.0));
        }
        let k = x.floor();
        let lam = x - k;
        let k = k as i64;
        match self.kind {
            AxisKind::Periodic => Some(((k as usize) % self.count, lam)),
            _ => (k >= 0 && (k as usize) + 1 < self.count).then_some((k as usize, lam)),
        }
    }

    /// Index of the node at integer offset `k` in the lattice, if present.
    pub fn lattice_index(&self, t: f64) -> Option<usize> {
        match self.locate(t) {
            Some((k, lam)) if lam == 0.0 => Some(k),
            _ => None,
        }
    }

    fn next(&self, k: usize) -> usize {
        if self.kind == AxisKind::Periodic {
            (k + 1) % self.count
        } else {
            k + 1
        }
    }

    fn encode(&self) -> String {
        let kind = match self.kind {
            AxisKind::Linear => "linear",
            AxisKind::Log => "log",
            AxisKind::Periodic => "periodic",
        };
        let rule = match self.rule {
            Rule::Trapezoid => "trapezoid",
            Rule::Lattice => "lattice",
        };
        format!("{kind}:{rule}:{:e}:{:e}:{}", self.start, self.step, self.count)
    }

    fn decode(s: &str) -> Option<Axis> {
        let mut it = s.split(':');
        let kind = match it.next()? {
            "linear" => AxisKind::Linear,
            "log" => AxisKind::Log,
            "periodic" => AxisKind::Periodic,
            _ => return None,
        };
        let rule = match it.next()? {
            "trapezoid" => Rule::Trapezoid,
            "lattice" => Rule::Lattice,
            _ => return None,
        };
        Some(Axis {
            kind,
            rule,
            start: it.next()?.parse().ok()?,
            step: it.next()?.parse().ok()?,
            count: it.next()?.parse().ok()?,
        })
    }
}

/// A tensor-product quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: DomainTag,
    axes: Vec<Axis>,
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Assemble a grid from axes. Node `k` enumerates axes in row-major
    /// order (the last axis varies fastest).
    pub fn from_axes(domain: DomainTag, axes: Vec<Axis>) -> Result<Grid> {
        let expected = match domain {
            DomainTag::HalfLinePlus | DomainTag::HalfLineMinus => 1,
            DomainTag::Plane | DomainTag::Cone(_) => 2,
            DomainTag::GroupDomain(t) => t.dim(),
        };
        if axes.len() != expected {
            return Err(Error::IncompatibleGrid(format!(
                "{domain:?} needs {expected} axes, got {}",
                axes.len()
            )));
        }
        let n: usize = axes.iter().map(|a| a.count).product();
        let dim = expected;
        let mut coords = Vec::with_capacity(n * dim);
        let mut weights = Vec::with_capacity(n);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..n {
            let (point, w) = Self::node(domain, &axes, &idx);
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidBounds(format!(
                    "non-positive weight {w} at node {idx:?}"
                )));
            }
            coords.extend_from_slice(&point[..dim]);
            weights.push(w);
            for d in (0..axes.len()).rev() {
                idx[d] += 1;
                if idx[d] < axes[d].count {
                    break;
                }
                idx[d] = 0;
            }
        }
        Ok(Grid {
            domain,
            axes,
            dim,
            coords,
            weights,
        })
    }

    fn node(domain: DomainTag, axes: &[Axis], idx: &[usize]) -> ([f64; 4], f64) {
        let v = |d: usize| axes[d].value(idx[d]);
        let w = |d: usize| axes[d].weight(idx[d]);
        match domain {
            DomainTag::HalfLinePlus => ([v(0), 0.0, 0.0, 0.0], w(0)),
            DomainTag::HalfLineMinus => ([-v(0), 0.0, 0.0, 0.0], w(0)),
            DomainTag::Plane => {
                let (r, phi) = (v(0), v(1));
                ([r * phi.cos(), r * phi.sin(), 0.0, 0.0], w(0) * r * w(1))
            }
            DomainTag::Cone(c) => {
                let (r, u) = (v(0), v(1));
                let p = c.point(r, u);
                ([p[0], p[1], 0.0, 0.0], w(0) * r * w(1))
            }
            DomainTag::GroupDomain(tag) => {
                let (b, a, angle) = match tag {
                    GroupTag::Affine => ([v(0), 0.0], v(1), 0.0),
                    _ => ([v(0), v(1)], v(2), v(3)),
                };
                let lebesgue: f64 = (0..axes.len()).map(w).product();
                let g = GroupElement::new(tag, b, a, angle).expect("log axes are positive");
                let h = haar_density(tag, HaarSide::Left, &g);
                let c = match tag {
                    GroupTag::Affine => [b[0], a, 0.0, 0.0],
                    _ => [b[0], b[1], a, angle],
                };
                (c, lebesgue * h)
            }
        }
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Number of coordinates per node.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn coords(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    /// Node as a plane point (`x₂ = 0` on half-lines).
    pub fn point(&self, k: usize) -> [f64; 2] {
        let c = self.coords(k);
        [c[0], if self.dim > 1 { c[1] } else { 0.0 }]
    }

    /// Node of a group grid as a group element.
    pub fn group_element(&self, k: usize) -> Result<GroupElement> {
        let DomainTag::GroupDomain(tag) = self.domain else {
            return Err(Error::IncompatibleGrid("not a group grid".into()));
        };
        let c = self.coords(k);
        match tag {
            GroupTag::Affine => GroupElement::affine(c[0], c[1]),
            _ => GroupElement::new(tag, [c[0], c[1]], c[2], c[3]),
        }
    }

    pub fn group_tag(&self) -> Option<GroupTag> {
        match self.domain {
            DomainTag::GroupDomain(t) => Some(t),
            _ => None,
        }
    }

    /// Split a flat node index into per-axis indices.
    pub fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for d in (0..self.axes.len()).rev() {
            out[d] = k % self.axes[d].count;
            k /= self.axes[d].count;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, ax)| acc * ax.count + i)
    }

    /// Transformed axis coordinates of a physical point, or `None` if the
    /// point lies outside the domain (wrong half-line, outside the cone, …).
    pub fn axis_coords(&self, p: &[f64]) -> Option<Vec<f64>> {
        match self.domain {
            DomainTag::HalfLinePlus => (p[0] > 0.0).then(|| vec![p[0].ln()]),
            DomainTag::HalfLineMinus => (p[0] < 0.0).then(|| vec![(-p[0]).ln()]),
            DomainTag::Plane => {
                let r = p[0].hypot(p[1]);
                (r > 0.0).then(|| vec![r.ln(), p[1].atan2(p[0]).rem_euclid(TAU)])
            }
            DomainTag::Cone(c) => c.coordinates([p[0], p[1]]).map(|(r, u)| vec![r.ln(), u]),
            DomainTag::GroupDomain(_) => {
                let out: Option<Vec<f64>> = self
                    .axes
                    .iter()
                    .zip(p)
                    .map(|(ax, &v)| ax.to_coord(v))
                    .collect();
                out
            }
        }
    }

    /// Multilinear interpolation stencil at transformed coordinates `t`.
    /// `None` if the position is outside the truncated domain.
    pub fn stencil(&self, t: &[f64]) -> Option<Stencil> {
        axes_stencil(&self.axes, t)
    }

    /// Tensor-product cubic (Keys, `a = −1/2`) stencil at transformed
    /// coordinates `t`. Nodes beyond a non-periodic axis end are dropped,
    /// which treats the data as zero there.
    pub fn cubic_stencil(&self, t: &[f64]) -> Option<Stencil> {
        axes_cubic_stencil(&self.axes, t)
    }

    /// Interpolate node values at a physical point; zero outside the domain.
    pub fn interpolate(&self, values: &[Complex64], p: &[f64]) -> Complex64 {
        self.axis_coords(p)
            .and_then(|t| self.stencil(&t))
            .map(|s| s.entries.iter().map(|&(k, w)| values[k] * w).sum())
            .unwrap_or_default()
    }

    /// `Σ w_k·f_k` with a fixed pairwise reduction order.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples.len())?;
        let terms: Vec<f64> = self.weights.iter().zip(samples).map(|(w, f)| w * f).collect();
        Ok(pairwise_sum(&terms))
    }

    pub fn integrate_complex(&self, samples: &[Complex64]) -> Result<Complex64> {
        self.check_len(samples.len())?;
        let re: Vec<f64> = self.weights.iter().zip(samples).map(|(w, f)| w * f.re).collect();
        let im: Vec<f64> = self.weights.iter().zip(samples).map(|(w, f)| w * f.im).collect();
        Ok(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)))
    }

    /// Total measure of the grid.
    pub fn measure(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Weighted L² norm `sqrt(Σ w|v|²)`.
    pub fn l2_norm(&self, values: &[Complex64]) -> f64 {
        let t: Vec<f64> = self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v.norm_sqr())
            .collect();
        pairwise_sum(&t).sqrt()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: n,
            });
        }
        Ok(())
    }

    /// Write the node table as CSV (`x1[,x2,…],weight`), preceded by one
    /// `#` line describing the axes so the grid can be rebuilt exactly.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let axes: Vec<String> = self.axes.iter().map(Axis::encode).collect();
        writeln!(out, "# domain={} axes={}", self.domain.encode(), axes.join(";"))?;
        let header: Vec<String> = (1..=self.dim).map(|d| format!("x{d}")).collect();
        writeln!(out, "{},weight", header.join(","))?;
        for k in 0..self.len() {
            let row: Vec<String> = self.coords(k).iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{},{:e}", row.join(","), self.weights[k])?;
        }
        Ok(())
    }

    /// Rebuild a grid written by [`Grid::write_csv`] and check that the
    /// node table matches.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Grid> {
        let mut lines = input.lines();
        let meta = lines
            .next()
            .ok_or_else(|| Error::Io("empty grid file".into()))??;
        let bad = || Error::Io("malformed grid header".into());
        let meta = meta.strip_prefix("# ").ok_or_else(bad)?;
        let mut domain = None;
        let mut axes = None;
        for field in meta.split_whitespace() {
            if let Some(d) = field.strip_prefix("domain=") {
                domain = DomainTag::decode(d);
            } else if let Some(a) = field.strip_prefix("axes=") {
                axes = a.split(';').map(Axis::decode).collect::<Option<Vec<_>>>();
            }
        }
        let grid = Grid::from_axes(domain.ok_or_else(bad)?, axes.ok_or_else(bad)?)?;
        lines.next().ok_or_else(bad)??;
        let mut k = 0;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if k >= grid.len() || vals.len() != grid.dim + 1 {
                return Err(bad());
            }
            let same = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs());
            let ok = grid.coords(k).iter().zip(&vals).all(|(&x, &y)| same(x, y))
                && same(grid.weights[k], vals[grid.dim]);
            if !ok {
                return Err(Error::Io(format!("grid row {k} does not match its header")));
            }
            k += 1;
        }
        if k != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: k,
            });
        }
        Ok(grid)
    }
}

/// Multilinear stencil over a list of axes, with row-major flat indices
/// (last axis fastest). `None` outside the axes' range.
pub fn axes_stencil(axes: &[Axis], t: &[f64]) -> Option<Stencil> {
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(1 << axes.len());
    entries.push((0, 1.0));
    for (ax, &tc) in axes.iter().zip(t) {
        let (k, lam) = ax.locate(tc)?;
        let n = entries.len();
        for e in 0..n {
            let (idx, w) = entries[e];
            entries[e] = (idx * ax.count + k, w * (1.0 - lam));
            if lam > 0.0 {
                entries.push((idx * ax.count + ax.next(k), w * lam));
            }
        }
    }
    Some(Stencil { entries })
}

fn keys_weights(s: f64) -> [f64; 4] {
    let (s2, s3) = (s * s, s * s * s);
    [
        -0.5 * s3 + s2 - 0.5 * s,
        1.5 * s3 - 2.5 * s2 + 1.0,
        -1.5 * s3 + 2.0 * s2 + 0.5 * s,
        0.5 * s3 - 0.5 * s2,
    ]
}

/// Cubic counterpart of [`axes_stencil`]; see [`Grid::cubic_stencil`].
pub fn axes_cubic_stencil(axes: &[Axis], t: &[f64]) -> Option<Stencil> {
    let mut entries: Vec<(usize, f64)> = vec![(0, 1.0)];
    for (ax, &tc) in axes.iter().zip(t) {
        let (k, lam) = ax.locate(tc)?;
        let mut taps: Vec<(usize, f64)> = Vec::with_capacity(4);
        if lam == 0.0 {
            taps.push((k, 1.0));
        } else {
            for (o, w) in keys_weights(lam).into_iter().enumerate() {
                let j = k as i64 + o as i64 - 1;
                let j = if ax.kind == AxisKind::Periodic {
                    j.rem_euclid(ax.count as i64)
                } else if j < 0 || j >= ax.count as i64 {
                    continue;
                } else {
                    j
                };
                taps.push((j as usize, w));
            }
        }
        entries = entries
            .iter()
            .flat_map(|&(idx, w)| taps.iter().map(move |&(j, tw)| (idx * ax.count + j, w * tw)))
            .collect();
    }
    Some(Stencil { entries })
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
}

/// Log-spaced grid on `ℝ₊` or `ℝ₋` with the trapezoid rule in `ln|s|`.
pub fn build_halfline_grid(sign: Sign, n: usize, s_min: f64, s_max: f64) -> Result<Grid> {
    build_halfline_grid_with(sign, n, s_min, s_max, Rule::Trapezoid)
}

pub fn build_halfline_grid_with(
    sign: Sign,
    n: usize,
    s_min: f64,
    s_max: f64,
    rule: Rule,
) -> Result<Grid> {
    let domain = match sign {
        Sign::Plus => DomainTag::HalfLinePlus,
        Sign::Minus => DomainTag::HalfLineMinus,
    };
    Grid::from_axes(domain, vec![Axis::log(s_min, s_max, n, rule)?])
}

/// Polar grid on the plane: log-spaced radius times a uniform angle.
pub fn build_plane_grid(n_r: usize, n_phi: usize, r_min: f64, r_max: f64) -> Result<Grid> {
    build_plane_grid_with(n_r, n_phi, r_min, r_max, Rule::Trapezoid)
}

pub fn build_plane_grid_with(
    n_r: usize,
    n_phi: usize,
    r_min: f64,
    r_max: f64,
    rule: Rule,
) -> Result<Grid> {
    Grid::from_axes(
        DomainTag::Plane,
        vec![Axis::log(r_min, r_max, n_r, rule)?, Axis::circle(n_phi)?],
    )
}

/// Grid on the cone `C_i^j` in hyperbolic polar coordinates `(r, u)`.
#[allow(clippy::too_many_arguments)]
pub fn build_cone_grid(
    i: u8,
    j: u8,
    n_r: usize,
    n_u: usize,
    r_min: f64,
    r_max: f64,
    u_max: f64,
) -> Result<Grid> {
    build_cone_grid_with(i, j, n_r, n_u, r_min, r_max, u_max, Rule::Trapezoid)
}

#[allow(clippy::too_many_arguments)]
pub fn build_cone_grid_with(
    i: u8,
    j: u8,
    n_r: usize,
    n_u: usize,
    r_min: f64,
    r_max: f64,
    u_max: f64,
    rule: Rule,
) -> Result<Grid> {
    let cone = Cone::from_indices(i, j)?;
    if !(u_max > 0.0) {
        return Err(Error::InvalidBounds(format!("u_max = {u_max}")));
    }
    Grid::from_axes(
        DomainTag::Cone(cone),
        vec![
            Axis::log(r_min, r_max, n_r, rule)?,
            Axis::linear(-u_max, u_max, n_u, rule)?,
        ],
    )
}

/// Per-axis node counts for a group grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupCounts {
    pub b: usize,
    pub a: usize,
    /// Ignored for the affine group.
    pub angle: usize,
}

/// Tensor grid over `(b, a[, angle])` with trapezoid weights times the left
/// Haar density. `b_box = (−B, B)` is applied to every translation
/// coordinate. A SIM(2) angle range of length `2π` becomes a periodic axis.
pub fn build_group_grid(
    tag: GroupTag,
    counts: GroupCounts,
    b_box: (f64, f64),
    a_range: (f64, f64),
    angle_range: (f64, f64),
) -> Result<Grid> {
    let b_axis = Axis::linear(b_box.0, b_box.1, counts.b, Rule::Trapezoid)?;
    let a_axis = Axis::log(a_range.0, a_range.1, counts.a, Rule::Trapezoid)?;
    let axes = match tag {
        GroupTag::Affine => vec![b_axis, a_axis],
        GroupTag::Sim2 | GroupTag::PoincareAff => {
            let full = tag == GroupTag::Sim2
                && ((angle_range.1 - angle_range.0) - TAU).abs() < 1e-12;
            let angle = if full {
                let mut c = Axis::circle(counts.angle)?;
                c.start = angle_range.0;
                c
            } else {
                Axis::linear(angle_range.0, angle_range.1, counts.angle, Rule::Trapezoid)?
            };
            vec![b_axis, b_axis, a_axis, angle]
        }
    };
    Grid::from_axes(DomainTag::GroupDomain(tag), axes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn halfline_two_nodes() {
        let g = build_halfline_grid(Sign::Plus, 2, 1.0, 2.0).unwrap();
        let est = g.integrate(&[1.0, 1.0]).unwrap();
        assert!((est - 0.5 * 3.0 * 2f64.ln()).abs() < 1e-14);
        assert!((est - 1.0397).abs() < 1e-4);
    }

    #[test]
    fn halfline_minus_nodes_negative() {
        let g = build_halfline_grid(Sign::Minus, 16, 0.1, 10.0).unwrap();
        assert!((0..g.len()).all(|k| g.point(k)[0] < 0.0));
    }

    #[test]
    fn halfline_inverse_integral() {
        let g = build_halfline_grid(Sign::Plus, 64, 1.0, std::f64::consts::E).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|k| 1.0 / g.point(k)[0]).collect();
        assert!((g.integrate(&f).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn halfline_refines() {
        let exact = 1.0;
        let err = |n| {
            let g = build_halfline_grid(Sign::Plus, n, 1.0, 2.0).unwrap();
            (g.measure() - exact).abs()
        };
        assert!(err(2) > err(4) && err(4) > err(8) && err(8) > err(64));
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(build_halfline_grid(Sign::Plus, 8, 0.0, 1.0).is_err());
        assert!(build_halfline_grid(Sign::Plus, 8, 2.0, 1.0).is_err());
        assert!(build_halfline_grid(Sign::Plus, 1, 1.0, 2.0).is_err());
        assert!(build_plane_grid(8, 8, 1.0, 1.0).is_err());
        assert!(matches!(
            build_cone_grid(3, 1, 8, 8, 0.1, 1.0, 1.0),
            Err(Error::InvalidCone(3, 1))
        ));
    }

    #[test]
    fn annulus_area() {
        let g = build_plane_grid(64, 64, 1.0, 2.0).unwrap();
        assert!((g.measure() / (3.0 * PI) - 1.0).abs() < 5e-3);
        assert!(g.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn radial_gaussian() {
        let (r0, r1) = (0.05, 4.0);
        let g = build_plane_grid(64, 64, r0, r1).unwrap();
        let f: Vec<f64> = (0..g.len())
            .map(|k| {
                let p = g.point(k);
                (-(p[0] * p[0] + p[1] * p[1])).exp()
            })
            .collect();
        let exact = PI * ((-r0 * r0).exp() - (-r1 * r1).exp());
        assert!((g.integrate(&f).unwrap() / exact - 1.0).abs() < 5e-3);
    }

    #[test]
    fn cone_geometry() {
        for cone in Cone::ALL {
            let (i, j) = cone.indices();
            let g = build_cone_grid(i, j, 12, 9, 0.5, 3.0, 1.5).unwrap();
            for k in 0..g.len() {
                let p = g.point(k);
                assert!(cone.contains(p), "{cone:?} {p:?}");
                let t = g.axis_coords(g.coords(k)).unwrap();
                let r = t[0].exp();
                assert!((minkowski(p, p).abs() - r * r).abs() < 1e-10 * r * r);
            }
        }
        let g = build_cone_grid(1, 1, 8, 8, 0.5, 3.0, 1.0).unwrap();
        assert!((0..g.len()).all(|k| {
            let p = g.point(k);
            p[0] > p[1].abs()
        }));
    }

    #[test]
    fn cone_area() {
        let g = build_cone_grid(1, 1, 64, 64, 1.0, 2.0, 1.0).unwrap();
        assert!((g.measure() / 3.0 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn group_grid_measures() {
        let g = build_group_grid(
            GroupTag::Affine,
            GroupCounts { b: 32, a: 64, angle: 0 },
            (-1.0, 1.0),
            (1.0, 2.0),
            (0.0, 0.0),
        )
        .unwrap();
        assert!((g.measure() - 1.0).abs() < 5e-3);
        assert!(g.weights().iter().all(|&w| w > 0.0));

        let g = build_group_grid(
            GroupTag::Sim2,
            GroupCounts { b: 8, a: 64, angle: 16 },
            (-1.0, 1.0),
            (1.0, 2.0),
            (0.0, TAU),
        )
        .unwrap();
        let exact = 4.0 * 0.375 * TAU;
        assert!((g.measure() / exact - 1.0).abs() < 5e-3);
    }

    #[test]
    fn integrate_basics() {
        let g = build_plane_grid(8, 8, 0.5, 2.0).unwrap();
        assert_eq!(g.integrate(&vec![0.0; g.len()]).unwrap(), 0.0);
        assert!((g.integrate(&vec![1.0; g.len()]).unwrap() - g.measure()).abs() < 1e-14);
        assert!(matches!(g.integrate(&[1.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn lattice_rule_has_full_end_cells() {
        let g = build_halfline_grid_with(Sign::Plus, 4, 1.0, 8.0, Rule::Lattice).unwrap();
        let h = 8f64.ln() / 3.0;
        for k in 0..4 {
            assert!((g.weight(k) - h * g.point(k)[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn locate_snaps_and_wraps() {
        let ax = Axis::circle(8).unwrap();
        assert_eq!(ax.locate(-PI / 4.0), Some((7, 0.0)));
        let (k, lam) = ax.locate(TAU - 0.1).unwrap();
        assert_eq!(k, 7);
        assert!(lam > 0.0 && lam < 1.0);
        let ax = Axis::log(1.0, 8.0, 4, Rule::Lattice).unwrap();
        assert_eq!(ax.lattice_index(4f64.ln()), Some(2));
        assert_eq!(ax.locate(9f64.ln()), None);
    }

    #[test]
    fn csv_round_trip() {
        let g = build_cone_grid(2, 2, 5, 4, 0.3, 2.0, 1.0).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(1).unwrap() == "x1,x2,weight");
        let back = Grid::read_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.domain(), g.domain());
        assert_eq!(back.len(), g.len());
    }

    #[test]
    fn pairwise_is_order_fixed() {
        let xs: Vec<f64> = (0..1000).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        assert_eq!(pairwise_sum(&xs), pairwise_sum(&xs));
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }
}
