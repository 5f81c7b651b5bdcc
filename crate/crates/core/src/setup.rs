//! Matched group and representation grids for Plancherel, inversion and
//! Wigner computations.
//!
//! All dilation axes share one log step `h`: the representation grids are
//! uniform in `ln r` with step `h` and the group's dilation nodes are
//! `a = e^{kh}`. SIM(2) angles are multiples of the plane grid's angular step
//! and Poincaré rapidities multiples of the cone grid's `u` step. Every
//! sampled group element therefore acts on the representation grids by an
//! exact re-indexing, and both grids use full-cell (`Lattice`) weights.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Axis, AxisKind, Cone, DomainTag, Grid, Rule};
use crate::group::GroupTag;
use crate::kernel::KernelMatrix;
use crate::repr::RepLabel;
use crate::schatten::{frobenius_norm, weighted_matrix};
use crate::transforms::{group_fourier, inversion_reconstruct};

/// Resolution and truncation of a [`HarmonicSetup`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicResolution {
    /// Nodes along `ln|s|` or `ln r` on the representation spaces.
    pub rep_radial: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Angular nodes of the plane (SIM(2)) or `u` nodes of a cone (P_aff).
    pub rep_angular: usize,
    /// Cone half-width in `u`.
    pub u_max: f64,
    /// Midpoint cells per translation axis on `[−B, B]`.
    pub b_count: usize,
    pub b_half_width: f64,
    /// Dilation nodes `a = e^{kh}`, `k = a_first..a_first + a_count`.
    pub a_first: i64,
    pub a_count: usize,
    /// P_aff rapidity nodes `ϑ = k·stride·Δu`, `k = angle_first..`.
    pub angle_first: i64,
    pub angle_count: usize,
    /// Group angle step in units of the representation grid's angular step.
    pub angle_stride: usize,
}

impl HarmonicResolution {
    /// Resolution used by the Plancherel and inversion checks.
    pub fn desk(tag: GroupTag) -> Self {
        match tag {
            GroupTag::Affine => HarmonicResolution {
                rep_radial: 128,
                r_min: 1e-4,
                r_max: 16.0,
                rep_angular: 0,
                u_max: 0.0,
                b_count: 64,
                b_half_width: 6.0,
                a_first: -16,
                a_count: 32,
                angle_first: 0,
                angle_count: 0,
                angle_stride: 1,
            },
            GroupTag::Sim2 => HarmonicResolution {
                rep_radial: 64,
                r_min: 1e-3,
                r_max: 7.0,
                rep_angular: 32,
                u_max: 0.0,
                b_count: 24,
                b_half_width: 5.0,
                a_first: -8,
                a_count: 16,
                angle_first: 0,
                angle_count: 32,
                angle_stride: 1,
            },
            GroupTag::PoincareAff => HarmonicResolution {
                rep_radial: 48,
                r_min: 1e-3,
                r_max: 7.0,
                rep_angular: 51,
                u_max: 5.0,
                b_count: 24,
                b_half_width: 5.0,
                a_first: -5,
                a_count: 11,
                angle_first: -6,
                angle_count: 13,
                angle_stride: 1,
            },
        }
    }

    /// Smaller grids for the Wigner and Weyl computations, which cost
    /// `O(N_G²)` in the number of group nodes. The group grids contain
    /// `supp f · supp g` for two [`HarmonicSetup::compact_bump`] bumps.
    pub fn reduced(tag: GroupTag) -> Self {
        match tag {
            GroupTag::Affine => HarmonicResolution {
                rep_radial: 64,
                r_min: 1e-3,
                r_max: 12.0,
                b_count: 32,
                a_first: -8,
                a_count: 16,
                ..Self::desk(tag)
            },
            GroupTag::Sim2 => HarmonicResolution {
                rep_radial: 15,
                r_min: 0.05,
                r_max: 0.05 * (14.0_f64 * 0.3).exp(),
                rep_angular: 8,
                b_count: 20,
                b_half_width: 3.0,
                a_first: -2,
                a_count: 5,
                angle_count: 8,
                angle_stride: 1,
                ..Self::desk(tag)
            },
            GroupTag::PoincareAff => HarmonicResolution {
                rep_radial: 10,
                r_min: 0.1,
                r_max: 0.1 * (9.0_f64 * 0.35).exp(),
                rep_angular: 9,
                u_max: 1.4,
                b_count: 22,
                b_half_width: 3.3,
                a_first: -2,
                a_count: 5,
                angle_first: -2,
                angle_count: 5,
                angle_stride: 1,
            },
        }
    }
}

/// A group grid together with grids for every representation in the dual.
#[derive(Debug, Clone)]
pub struct HarmonicSetup {
    pub tag: GroupTag,
    pub resolution: HarmonicResolution,
    pub group: Arc<Grid>,
    pub labels: Vec<RepLabel>,
    pub reps: Vec<Arc<Grid>>,
}

impl HarmonicSetup {
    pub fn new(tag: GroupTag, res: HarmonicResolution) -> Result<Self> {
        let radial = Axis::log(res.r_min, res.r_max, res.rep_radial, Rule::Lattice)?;
        let h = radial.step;
        let b = Axis::midpoint(-res.b_half_width, res.b_half_width, res.b_count)?;
        let a = Axis::log_lattice(h, res.a_first, res.a_count)?;
        let labels = RepLabel::all(tag);
        let (group_axes, reps) = match tag {
            GroupTag::Affine => {
                let plus = Grid::from_axes(DomainTag::HalfLinePlus, vec![radial])?;
                let minus = Grid::from_axes(DomainTag::HalfLineMinus, vec![radial])?;
                (vec![b, a], vec![plus, minus])
            }
            GroupTag::Sim2 => {
                let circle = Axis::circle(res.rep_angular)?;
                if res.angle_stride == 0 || !res.rep_angular.is_multiple_of(res.angle_stride) {
                    return Err(Error::InvalidBounds(format!(
                        "angle stride {} does not divide {}",
                        res.angle_stride, res.rep_angular
                    )));
                }
                let theta = Axis {
                    kind: AxisKind::Periodic,
                    rule: Rule::Lattice,
                    start: 0.0,
                    step: TAU * res.angle_stride as f64 / res.rep_angular as f64,
                    count: res.rep_angular / res.angle_stride,
                };
                let plane = Grid::from_axes(DomainTag::Plane, vec![radial, circle])?;
                (vec![b, b, a, theta], vec![plane])
            }
            GroupTag::PoincareAff => {
                let u = Axis::linear(-res.u_max, res.u_max, res.rep_angular, Rule::Lattice)?;
                let rapidity =
                    Axis::linear_lattice(u.step * res.angle_stride as f64, res.angle_first, res.angle_count)?;
                let cones = Cone::ALL
                    .iter()
                    .map(|&c| Grid::from_axes(DomainTag::Cone(c), vec![radial, u]))
                    .collect::<Result<Vec<_>>>()?;
                (vec![b, b, a, rapidity], cones)
            }
        };
        Ok(HarmonicSetup {
            tag,
            resolution: res,
            group: Arc::new(Grid::from_axes(DomainTag::GroupDomain(tag), group_axes)?),
            labels,
            reps: reps.into_iter().map(Arc::new).collect(),
        })
    }

    pub fn desk(tag: GroupTag) -> Result<Self> {
        Self::new(tag, HarmonicResolution::desk(tag))
    }

    pub fn reduced(tag: GroupTag) -> Result<Self> {
        Self::new(tag, HarmonicResolution::reduced(tag))
    }

    /// Kernels of `f̂(ρ)K_ρ^e` for every label.
    pub fn fourier(&self, f: &[Complex64], exponent: f64) -> Result<Vec<(RepLabel, KernelMatrix)>> {
        self.labels
            .iter()
            .zip(&self.reps)
            .map(|(&l, rep)| Ok((l, group_fourier(l, &self.group, f, rep, exponent)?)))
            .collect()
    }

    /// `(‖f‖²_{L²(G)}, Σ_ρ ‖f̂(ρ)K_ρ^{1/2}‖²_{S₂})`.
    pub fn plancherel(&self, f: &[Complex64]) -> Result<(f64, f64)> {
        let lhs = self.group.l2_norm(f).powi(2);
        let rhs = self
            .fourier(f, 0.5)?
            .iter()
            .map(|(_, k)| frobenius_norm(&weighted_matrix(k)).powi(2))
            .sum();
        Ok((lhs, rhs))
    }

    /// Fourier inversion of `f` through its transform with full Duflo–Moore weight.
    pub fn reconstruct(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        let data = self.fourier(f, 1.0)?;
        inversion_reconstruct(self.tag, &self.group, &data)
    }

    /// Compactly supported bump centred at the identity such that the group
    /// grid contains `supp f · supp g` for any two of them: nonzero on the
    /// dilation (and rapidity) nodes `k ∈ {−1, 0, 1}`, with the largest `b`
    /// radius that keeps every product inside the translation box.
    pub fn compact_bump(&self) -> Bump {
        let axes = self.group.axes();
        let nbd = self.tag.translation_dim();
        let h = axes[nbd].step;
        let b_step = axes[0].step;
        let b_max = self.resolution.b_half_width - b_step;
        let (stretch, sigma_angle) = match self.tag {
            GroupTag::PoincareAff => {
                let s = axes[nbd + 1].step;
                ((h + s).exp(), 2.0 * s)
            }
            _ => (h.exp(), 0.0),
        };
        Bump {
            sigma_b: b_max / (1.0 + stretch),
            sigma_ln_a: 2.0 * h,
            sigma_angle,
            compact: true,
            ..Bump::standard(self.tag)
        }
    }

    /// `‖u − v‖/‖v‖` in `L²(G)`.
    pub fn relative_error(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        let d: Vec<Complex64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
        self.group.l2_norm(&d) / self.group.l2_norm(v)
    }
}

/// A smooth, well-localized test function on a group: Gaussian in `b` and
/// `ln a`, times an angle profile and a plane-wave modulation in `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub b0: [f64; 2],
    pub sigma_b: f64,
    pub ln_a0: f64,
    pub sigma_ln_a: f64,
    /// SIM(2): profile `1 + 0.5 cos(θ − angle0)`; P_aff: Gaussian of width `sigma_angle`.
    pub angle0: f64,
    pub sigma_angle: f64,
    /// Modulation `e^{i k·b}`.
    pub wave: [f64; 2],
    /// Replace the Gaussians by compactly supported profiles, with the widths
    /// read as support radii: `exp(1 − 1/(1 − t²))` in `b` and `cos²(πt/2)`
    /// along the dilation and rapidity lattices.
    pub compact: bool,
}

fn smooth_profile(t: f64, compact: bool) -> f64 {
    if !compact {
        (-0.5 * t * t).exp()
    } else if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

fn lattice_profile(t: f64, compact: bool) -> f64 {
    if !compact {
        (-0.5 * t * t).exp()
    } else if t.abs() >= 1.0 {
        0.0
    } else {
        (0.5 * PI * t).cos().powi(2)
    }
}

impl Bump {
    /// The default bump used by the Plancherel and inversion checks.
    pub fn standard(tag: GroupTag) -> Self {
        let (sigma_b, sigma_ln_a) = match tag {
            GroupTag::Affine => (1.0, 0.35),
            GroupTag::Sim2 => (1.25, 0.22),
            GroupTag::PoincareAff => (1.25, 0.22),
        };
        Bump {
            b0: [0.0, 0.0],
            sigma_b,
            ln_a0: 0.0,
            sigma_ln_a,
            angle0: 0.0,
            sigma_angle: 0.3,
            wave: [0.0, 0.0],
            compact: false,
        }
    }

    pub fn eval(&self, tag: GroupTag, c: &[f64]) -> Complex64 {
        let (b, a, angle) = match tag {
            GroupTag::Affine => ([c[0], 0.0], c[1], 0.0),
            _ => ([c[0], c[1]], c[2], c[3]),
        };
        let db = [b[0] - self.b0[0], b[1] - self.b0[1]];
        let rb = (db[0] * db[0] + db[1] * db[1]).sqrt();
        let la = a.ln() - self.ln_a0;
        let mut amp =
            smooth_profile(rb / self.sigma_b, self.compact) * lattice_profile(la / self.sigma_ln_a, self.compact);
        amp *= match tag {
            GroupTag::Affine => 1.0,
            GroupTag::Sim2 => 1.0 + 0.5 * (angle - self.angle0).cos(),
            GroupTag::PoincareAff => lattice_profile((angle - self.angle0) / self.sigma_angle, self.compact),
        };
        Complex64::from_polar(amp, self.wave[0] * b[0] + self.wave[1] * b[1])
    }

    pub fn sample(&self, group: &Grid) -> Result<Vec<Complex64>> {
        let tag = group
            .group_tag()
            .ok_or_else(|| Error::IncompatibleGrid("bump needs a group grid".into()))?;
        Ok((0..group.len()).map(|k| self.eval(tag, group.coords(k))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{inverse, multiply, GroupElement};

    #[test]
    fn setups_carry_every_label() {
        for tag in GroupTag::ALL {
            let s = HarmonicSetup::reduced(tag).unwrap();
            assert_eq!(s.labels, RepLabel::all(tag));
            assert_eq!(s.labels.len(), s.reps.len());
            for (l, r) in s.labels.iter().zip(&s.reps) {
                l.check_grid(r).unwrap();
            }
            assert_eq!(s.group.group_tag(), Some(tag));
        }
    }

    #[test]
    fn dilation_lattice_matches_the_radial_ratio() {
        let s = HarmonicSetup::desk(GroupTag::Affine).unwrap();
        let radial = s.reps[0].axes()[0].step;
        let dil = s.group.axes()[1].step;
        assert!((radial - dil).abs() < 1e-15);
    }

    #[test]
    fn stride_must_divide_the_angular_count() {
        let res = HarmonicResolution {
            angle_stride: 3,
            ..HarmonicResolution::reduced(GroupTag::Sim2)
        };
        assert!(HarmonicSetup::new(GroupTag::Sim2, res).is_err());
    }

    #[test]
    fn bump_peaks_at_the_identity() {
        for tag in GroupTag::ALL {
            let b = Bump::standard(tag);
            let c: Vec<f64> = match tag {
                GroupTag::Affine => vec![0.0, 1.0],
                _ => vec![0.0, 0.0, 1.0, 0.0],
            };
            let peak = match tag {
                GroupTag::Sim2 => 1.5,
                _ => 1.0,
            };
            assert!((b.eval(tag, &c).re - peak).abs() < 1e-15);
            let mut off = c.clone();
            off[0] = b.sigma_b;
            assert!((b.eval(tag, &off).norm() - peak * (-0.5f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn compact_bump_products_stay_on_the_grid() {
        for tag in GroupTag::ALL {
            let s = HarmonicSetup::reduced(tag).unwrap();
            let bump = s.compact_bump();
            let f = bump.sample(&s.group).unwrap();
            let supp: Vec<GroupElement> = (0..s.group.len())
                .filter(|&k| f[k] != Complex64::default())
                .map(|k| s.group.group_element(k).unwrap())
                .collect();
            assert!(!supp.is_empty());
            let half = s.resolution.b_half_width;
            for x in supp.iter().step_by(7) {
                for y in supp.iter().step_by(5) {
                    // x′⁻¹x for x′, x in the support lies in the translation box
                    let z = multiply(&inverse(y), x).unwrap();
                    assert!(z.b()[0].abs() <= half && z.b()[1].abs() <= half, "{tag}: {z}");
                }
            }
        }
    }

    #[test]
    fn compact_bump_vanishes_outside_its_radius() {
        let s = HarmonicSetup::reduced(GroupTag::Affine).unwrap();
        let b = s.compact_bump();
        assert_eq!(b.eval(GroupTag::Affine, &[b.sigma_b * 1.001, 1.0]), Complex64::default());
        assert_eq!(b.eval(GroupTag::Affine, &[0.0, (2.01 * b.sigma_ln_a).exp()]), Complex64::default());
    }

    #[test]
    fn reduced_plancherel_is_close() {
        let s = HarmonicSetup::reduced(GroupTag::Affine).unwrap();
        let f = s.compact_bump().sample(&s.group).unwrap();
        let (lhs, rhs) = s.plancherel(&f).unwrap();
        assert!((lhs - rhs).abs() < 0.05 * lhs, "{lhs} vs {rhs}");
        let g = s.reconstruct(&f).unwrap();
        assert!(s.relative_error(&g, &f) < 0.1);
    }
}
