//! Group arithmetic, Haar densities and modular functions for the affine
//! group, the similitude group SIM(2) and the affine Poincaré group.
//!
//! Elements are stored in their natural coordinates `(b, a[, angle])`:
//! translation `b` (a scalar for the affine group, a plane vector otherwise),
//! dilation `a > 0`, and a rotation angle (SIM(2)) or rapidity (Poincaré).

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};

/// The three groups handled by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupTag {
    /// The affine group of the line, `(b, a)` with `b ∈ ℝ`, `a > 0`.
    Affine,
    /// The similitude group SIM(2) = ℝ² ⋊ (ℝ⁺ × SO(2)).
    Sim2,
    /// The affine Poincaré group ℝ² ⋊ (ℝ⁺ × SO(1,1)).
    PoincareAff,
}

impl GroupTag {
    pub const ALL: [GroupTag; 3] = [GroupTag::Affine, GroupTag::Sim2, GroupTag::PoincareAff];

    /// Dimension of the translation part.
    pub fn translation_dim(self) -> usize {
        match self {
            GroupTag::Affine => 1,
            GroupTag::Sim2 | GroupTag::PoincareAff => 2,
        }
    }

    /// Number of real coordinates of an element.
    pub fn dim(self) -> usize {
        match self {
            GroupTag::Affine => 2,
            GroupTag::Sim2 | GroupTag::PoincareAff => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupTag::Affine => "affine",
            GroupTag::Sim2 => "sim2",
            GroupTag::PoincareAff => "paff",
        }
    }

    pub fn parse(s: &str) -> Option<GroupTag> {
        match s.to_ascii_lowercase().as_str() {
            "affine" | "u" => Some(GroupTag::Affine),
            "sim2" | "sim(2)" => Some(GroupTag::Sim2),
            "paff" | "poincare" | "poincareaff" => Some(GroupTag::PoincareAff),
            _ => None,
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which Haar measure to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaarSide {
    Left,
    Right,
}

/// A point of one of the three groups.
///
/// For the affine group `b[1]` and `angle` are always zero. SIM(2) angles are
/// kept in `[0, 2π)`; Poincaré rapidities are stored as given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    tag: GroupTag,
    b: [f64; 2],
    a: f64,
    angle: f64,
}

fn check_dilation(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDilation(a))
    }
}

/// Reduce an angle into `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Rotation `R_θ v`.
#[inline]
pub fn rotate(theta: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Hyperbolic rotation `Λ_ϑ v`.
#[inline]
pub fn boost(rapidity: f64, v: [f64; 2]) -> [f64; 2] {
    let (c, s) = (rapidity.cosh(), rapidity.sinh());
    [c * v[0] + s * v[1], s * v[0] + c * v[1]]
}

impl GroupElement {
    pub fn affine(b: f64, a: f64) -> Result<Self> {
        check_dilation(a)?;
        Ok(GroupElement {
            tag: GroupTag::Affine,
            b: [b, 0.0],
            a,
            angle: 0.0,
        })
    }

    pub fn sim2(b: [f64; 2], a: f64, theta: f64) -> Result<Self> {
        check_dilation(a)?;
        Ok(GroupElement {
            tag: GroupTag::Sim2,
            b,
            a,
            angle: reduce_angle(theta),
        })
    }

    pub fn poincare(b: [f64; 2], a: f64, rapidity: f64) -> Result<Self> {
        check_dilation(a)?;
        Ok(GroupElement {
            tag: GroupTag::PoincareAff,
            b,
            a,
            angle: rapidity,
        })
    }

    /// Build an element of `tag` from `(b, a, angle)`; extra components are
    /// ignored for the affine group.
    pub fn new(tag: GroupTag, b: [f64; 2], a: f64, angle: f64) -> Result<Self> {
        match tag {
            GroupTag::Affine => Self::affine(b[0], a),
            GroupTag::Sim2 => Self::sim2(b, a, angle),
            GroupTag::PoincareAff => Self::poincare(b, a, angle),
        }
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    /// Translation part; `b()[1] == 0` for the affine group.
    pub fn b(&self) -> [f64; 2] {
        self.b
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Rotation angle (SIM(2)), rapidity (Poincaré) or zero (affine).
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Componentwise comparison; SIM(2) angles compare on the circle.
    pub fn approx_eq(&self, other: &GroupElement, tol: f64) -> bool {
        if self.tag != other.tag {
            return false;
        }
        let close = |x: f64, y: f64| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()));
        let angle_ok = match self.tag {
            GroupTag::Sim2 => {
                let d = reduce_angle(self.angle - other.angle);
                d.min(TAU - d) <= tol * (1.0 + self.angle.abs())
            }
            _ => close(self.angle, other.angle),
        };
        close(self.b[0], other.b[0]) && close(self.b[1], other.b[1]) && close(self.a, other.a) && angle_ok
    }

    /// Linear part applied to a translation vector: `a·R_θ v` or `a·Λ_ϑ v`.
    fn linear(&self, v: [f64; 2]) -> [f64; 2] {
        let w = match self.tag {
            GroupTag::Affine => [v[0], 0.0],
            GroupTag::Sim2 => rotate(self.angle, v),
            GroupTag::PoincareAff => boost(self.angle, v),
        };
        [self.a * w[0], self.a * w[1]]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            GroupTag::Affine => write!(f, "({}, {})", self.b[0], self.a),
            _ => write!(
                f,
                "(({}, {}), {}, {})",
                self.b[0], self.b[1], self.a, self.angle
            ),
        }
    }
}

/// Group product `g·h`.
pub fn multiply(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    if g.tag != h.tag {
        return Err(Error::GroupMismatch(g.tag, h.tag));
    }
    let lb = g.linear(h.b);
    GroupElement::new(
        g.tag,
        [g.b[0] + lb[0], g.b[1] + lb[1]],
        g.a * h.a,
        g.angle + h.angle,
    )
}

/// Group inverse.
pub fn inverse(g: &GroupElement) -> GroupElement {
    let inv_a = 1.0 / g.a;
    let w = match g.tag {
        GroupTag::Affine => [g.b[0], 0.0],
        GroupTag::Sim2 => rotate(-g.angle, g.b),
        GroupTag::PoincareAff => boost(-g.angle, g.b),
    };
    GroupElement {
        tag: g.tag,
        b: [-inv_a * w[0], -inv_a * w[1]],
        a: inv_a,
        angle: match g.tag {
            GroupTag::Affine => 0.0,
            GroupTag::Sim2 => reduce_angle(-g.angle),
            GroupTag::PoincareAff => -g.angle,
        },
    }
}

pub fn identity(tag: GroupTag) -> GroupElement {
    GroupElement {
        tag,
        b: [0.0, 0.0],
        a: 1.0,
        angle: 0.0,
    }
}

/// Density of the chosen Haar measure with respect to `db da [dangle]`.
pub fn haar_density(tag: GroupTag, side: HaarSide, g: &GroupElement) -> f64 {
    debug_assert_eq!(tag, g.tag);
    let a = g.a;
    match (tag, side) {
        (GroupTag::Affine, HaarSide::Left) => 1.0 / (a * a),
        (_, HaarSide::Left) => 1.0 / (a * a * a),
        (_, HaarSide::Right) => 1.0 / a,
    }
}

/// Modular function, normalized so that
/// `∫ f(x·g) dμ_L(x) = Δ(g)⁻¹ ∫ f dμ_L`.
pub fn modular_function(tag: GroupTag, g: &GroupElement) -> f64 {
    debug_assert_eq!(tag, g.tag);
    match tag {
        GroupTag::Affine => 1.0 / g.a,
        GroupTag::Sim2 | GroupTag::PoincareAff => 1.0 / (g.a * g.a),
    }
}

/// Action on the plane, `y ↦ a·R_θ y + b` or `y ↦ a·Λ_ϑ y + b`.
pub fn plane_action(g: &GroupElement, y: [f64; 2]) -> Result<[f64; 2]> {
    if g.tag == GroupTag::Affine {
        return Err(Error::NoPlaneAction(g.tag));
    }
    let l = g.linear(y);
    Ok([l[0] + g.b[0], l[1] + g.b[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() < 1e-12
    }

    #[test]
    fn multiply_examples() {
        let g = GroupElement::affine(1.0, 2.0).unwrap();
        let h = GroupElement::affine(3.0, 4.0).unwrap();
        let gh = multiply(&g, &h).unwrap();
        assert!(close(gh.b()[0], 7.0) && close(gh.a(), 8.0));

        let g = GroupElement::sim2([0.0, 0.0], 1.0, FRAC_PI_2).unwrap();
        let h = GroupElement::sim2([1.0, 0.0], 1.0, 0.0).unwrap();
        let gh = multiply(&g, &h).unwrap();
        assert!(gh.approx_eq(&GroupElement::sim2([0.0, 1.0], 1.0, FRAC_PI_2).unwrap(), 1e-12));

        let g = GroupElement::poincare([0.0, 0.0], 2.0, 0.0).unwrap();
        let h = GroupElement::poincare([1.0, 1.0], 1.0, 0.0).unwrap();
        let gh = multiply(&g, &h).unwrap();
        assert!(gh.approx_eq(&GroupElement::poincare([2.0, 2.0], 2.0, 0.0).unwrap(), 1e-12));
    }

    #[test]
    fn tag_mismatch_is_an_error() {
        let g = GroupElement::affine(1.0, 2.0).unwrap();
        let h = GroupElement::sim2([1.0, 0.0], 1.0, 0.0).unwrap();
        assert_eq!(
            multiply(&g, &h),
            Err(Error::GroupMismatch(GroupTag::Affine, GroupTag::Sim2))
        );
    }

    #[test]
    fn inverse_examples() {
        let g = inverse(&GroupElement::affine(3.0, 2.0).unwrap());
        assert!(close(g.b()[0], -1.5) && close(g.a(), 0.5));

        let g = inverse(&GroupElement::sim2([1.0, 0.0], 1.0, FRAC_PI_2).unwrap());
        assert!(close(g.b()[0], 0.0) && close(g.b()[1], 1.0));
        assert!(close(g.angle(), 3.0 * FRAC_PI_2));
    }

    #[test]
    fn identities() {
        let e = identity(GroupTag::Affine);
        assert_eq!((e.b()[0], e.a()), (0.0, 1.0));
        for tag in GroupTag::ALL {
            let e = identity(tag);
            let g = GroupElement::new(tag, [0.3, -1.2], 2.5, 0.7).unwrap();
            assert!(multiply(&e, &g).unwrap().approx_eq(&g, 1e-14));
            assert!(multiply(&g, &e).unwrap().approx_eq(&g, 1e-14));
            assert!(multiply(&g, &inverse(&g)).unwrap().approx_eq(&e, 1e-14));
        }
    }

    #[test]
    fn haar_and_modular_values() {
        let g = GroupElement::affine(5.0, 2.0).unwrap();
        assert!(close(haar_density(GroupTag::Affine, HaarSide::Left, &g), 0.25));
        assert!(close(haar_density(GroupTag::Affine, HaarSide::Right, &g), 0.5));
        let g = GroupElement::sim2([0.0, 0.0], 2.0, 0.0).unwrap();
        assert!(close(haar_density(GroupTag::Sim2, HaarSide::Left, &g), 0.125));
        let g = GroupElement::poincare([0.0, 0.0], 4.0, 1.0).unwrap();
        assert!(close(haar_density(GroupTag::PoincareAff, HaarSide::Right, &g), 0.25));

        let g = GroupElement::poincare([0.0, 0.0], 2.0, 0.0).unwrap();
        assert!(close(modular_function(GroupTag::PoincareAff, &g), 0.25));
        let g = GroupElement::affine(0.0, 2.0).unwrap();
        assert!(close(modular_function(GroupTag::Affine, &g), 0.5));
        let g = GroupElement::sim2([0.0, 0.0], 2.0, 0.0).unwrap();
        assert!(close(modular_function(GroupTag::Sim2, &g), 0.25));
    }

    #[test]
    fn plane_action_examples() {
        let g = GroupElement::sim2([1.0, 0.0], 2.0, 0.0).unwrap();
        assert_eq!(plane_action(&g, [1.0, 1.0]).unwrap(), [3.0, 2.0]);
        let t: f64 = 0.8;
        let g = GroupElement::poincare([0.0, 0.0], 1.0, t).unwrap();
        let y = plane_action(&g, [1.0, 0.0]).unwrap();
        assert!(close(y[0], t.cosh()) && close(y[1], t.sinh()));
        let g = GroupElement::affine(0.0, 1.0).unwrap();
        assert!(matches!(plane_action(&g, [0.0, 0.0]), Err(Error::NoPlaneAction(_))));
    }

    #[test]
    fn rotation_periodicity() {
        let h = GroupElement::sim2([0.4, 0.1], 1.3, 0.2).unwrap();
        let g1 = GroupElement::sim2([1.0, 2.0], 0.5, 1.0).unwrap();
        let g2 = GroupElement::sim2([1.0, 2.0], 0.5, 1.0 + 2.0 * PI).unwrap();
        let p1 = multiply(&g1, &h).unwrap();
        let p2 = multiply(&g2, &h).unwrap();
        assert!(p1.approx_eq(&p2, 1e-12));
        assert!((0.0..TAU).contains(&p2.angle()));
    }

    #[test]
    fn rejects_bad_dilation() {
        assert!(GroupElement::affine(0.0, 0.0).is_err());
        assert!(GroupElement::sim2([0.0, 0.0], -1.0, 0.0).is_err());
        assert!(GroupElement::poincare([0.0, 0.0], f64::NAN, 0.0).is_err());
    }
}
