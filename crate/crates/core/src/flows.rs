//! The Hamiltonian torus action on the interior of the moment image.
//!
//! Circles 1 and 2 twist `g₁`, `g₂` on the right by the one-parameter subgroups
//! through `h₁`, `h₂`. Circle 3 is Goldman's flow, acting on the left by
//! `e^{tX}` on `g₁` and `e^{tY}` on `g₂` with `X = h₂h₁ − (h₂h₁)⁻¹` and
//! `Y = h₁h₂ − (h₁h₂)⁻¹`. Every generator is normalized to unit length, so each
//! circle has period 2π and angle π multiplies the acted element by `−I`.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::repvar::{class_equal_with, Representation};
use crate::su2::{exp_alg, AlgebraElement, GroupElement};
use crate::tol::{Tolerances, DEFAULT_TOLERANCES};
use crate::{Error, Result};

/// Angles `(φ₁, φ₂, φ₃)` reduced to `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusElement {
    pub angles: [f64; 3],
}

fn reduce(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Circular distance between two angles.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = reduce(a - b);
    d.min(TAU - d)
}

impl TorusElement {
    pub const IDENTITY: TorusElement = TorusElement { angles: [0.0; 3] };
    /// The nontrivial kernel element `(π, π, π)`.
    pub const KERNEL: TorusElement = TorusElement { angles: [PI; 3] };

    pub fn new(phi1: f64, phi2: f64, phi3: f64) -> Self {
        TorusElement {
            angles: [reduce(phi1), reduce(phi2), reduce(phi3)],
        }
    }

    pub fn compose(&self, other: &TorusElement) -> Self {
        let [a, b, c] = self.angles;
        let [x, y, z] = other.angles;
        TorusElement::new(a + x, b + y, c + z)
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c] = self.angles;
        TorusElement::new(-a, -b, -c)
    }

    /// Representative of the class modulo `{0, (π,π,π)}` with `φ₃ ∈ [0, π)`.
    pub fn canonical(&self) -> Self {
        if self.angles[2] >= PI {
            self.compose(&TorusElement::KERNEL)
        } else {
            *self
        }
    }

    /// Max-coordinate circular distance.
    pub fn distance(&self, other: &TorusElement) -> f64 {
        (0..3)
            .map(|i| angle_distance(self.angles[i], other.angles[i]))
            .fold(0.0, f64::max)
    }

    /// Distance in the quotient by `{0, (π,π,π)}`.
    pub fn distance_mod_kernel(&self, other: &TorusElement) -> f64 {
        self.distance(other)
            .min(self.compose(&TorusElement::KERNEL).distance(other))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        TorusElement::new(
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        )
    }
}

/// Unit-norm generators of the three circles at a given `(h₁, h₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowGenerators {
    pub xi1_hat: AlgebraElement,
    pub xi2_hat: AlgebraElement,
    pub x_hat: AlgebraElement,
    pub y_hat: AlgebraElement,
}

/// `X = h₂h₁ − (h₂h₁)⁻¹`; as a pure quaternion this is twice the vector part of `h₂h₁`.
pub fn raw_x(rho: &Representation) -> AlgebraElement {
    let v = (rho.h2 * rho.h1).vector();
    AlgebraElement::new(2.0 * v[0], 2.0 * v[1], 2.0 * v[2])
}

/// `Y = h₁h₂ − (h₁h₂)⁻¹`.
pub fn raw_y(rho: &Representation) -> AlgebraElement {
    let v = (rho.h1 * rho.h2).vector();
    AlgebraElement::new(2.0 * v[0], 2.0 * v[1], 2.0 * v[2])
}

fn unit_axis(g: &GroupElement, which: &'static str, tol: &Tolerances) -> Result<AlgebraElement> {
    if g.is_central(tol) {
        return Err(Error::DegenerateGenerator { which });
    }
    let v = g.vector();
    AlgebraElement::new(v[0], v[1], v[2])
        .normalized()
        .ok_or(Error::DegenerateGenerator { which })
}

pub fn generators(rho: &Representation) -> Result<FlowGenerators> {
    generators_with(rho, &DEFAULT_TOLERANCES)
}

/// Refuses points where any of `h₁, h₂, h₁h₂` is within `tol.center` of `±I`.
pub fn generators_with(rho: &Representation, tol: &Tolerances) -> Result<FlowGenerators> {
    Ok(FlowGenerators {
        xi1_hat: unit_axis(&rho.h1, "h1", tol)?,
        xi2_hat: unit_axis(&rho.h2, "h2", tol)?,
        x_hat: unit_axis(&(rho.h2 * rho.h1), "h2h1", tol)?,
        y_hat: unit_axis(&(rho.h1 * rho.h2), "h1h2", tol)?,
    })
}

impl FlowGenerators {
    /// `Ad_k` applied to every generator.
    pub fn adjoint(&self, k: &GroupElement) -> Self {
        FlowGenerators {
            xi1_hat: self.xi1_hat.adjoint(k),
            xi2_hat: self.xi2_hat.adjoint(k),
            x_hat: self.x_hat.adjoint(k),
            y_hat: self.y_hat.adjoint(k),
        }
    }

    /// Applies `t` using these generators; `h₁`, `h₂` pass through untouched.
    pub fn act(&self, t: &TorusElement, rho: &Representation) -> Representation {
        let [p1, p2, p3] = t.angles;
        let twist = |a: &AlgebraElement, phi: f64| {
            if phi == 0.0 {
                None
            } else {
                Some(exp_alg(&a.scale(phi)))
            }
        };
        let apply = |g: GroupElement, left: Option<GroupElement>, right: Option<GroupElement>| {
            let g = match left {
                Some(l) => l * g,
                None => g,
            };
            match right {
                Some(r) => g * r,
                None => g,
            }
        };
        Representation {
            g1: apply(rho.g1, twist(&self.x_hat, p3), twist(&self.xi1_hat, p1)),
            h1: rho.h1,
            g2: apply(rho.g2, twist(&self.y_hat, p3), twist(&self.xi2_hat, p2)),
            h2: rho.h2,
        }
    }
}

/// `(e^{φ₃X̂} g₁ e^{φ₁ξ̂₁}, h₁, e^{φ₃Ŷ} g₂ e^{φ₂ξ̂₂}, h₂)`.
pub fn act(t: &TorusElement, rho: &Representation) -> Result<Representation> {
    Ok(generators(rho)?.act(t, rho))
}

pub fn act_with(t: &TorusElement, rho: &Representation, tol: &Tolerances) -> Result<Representation> {
    Ok(generators_with(rho, tol)?.act(t, rho))
}

/// Residuals of `e^{tX} h₂ = h₂ e^{tY}` and `h₁ e^{tX} = e^{tY} h₁` for the raw `X, Y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowIdentityReport {
    pub t: f64,
    pub h2_residual: f64,
    pub h1_residual: f64,
}

impl FlowIdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.h2_residual.max(self.h1_residual)
    }
}

pub fn verify_flow_identities(rho: &Representation, t: f64) -> FlowIdentityReport {
    let etx = exp_alg(&raw_x(rho).scale(t));
    let ety = exp_alg(&raw_y(rho).scale(t));
    FlowIdentityReport {
        t,
        h2_residual: (etx * rho.h2).distance(&(rho.h2 * ety)),
        h1_residual: (rho.h1 * etx).distance(&(ety * rho.h1)),
    }
}

/// Outcome of the kernel and freeness check at one representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    /// tuple distance between `act((π,π,π), ρ)` and `ρ`
    pub kernel_residual: f64,
    pub trials: usize,
    /// non-kernel torus elements whose action fixed the class
    pub violations: Vec<TorusElement>,
    /// smallest conjugator residual seen among the non-kernel trials
    pub min_class_residual: f64,
}

/// Minimum circular distance from the kernel `{0, (π,π,π)}` below which a random
/// torus element is resampled in the freeness check.
pub const KERNEL_EXCLUSION: f64 = 1e-3;

pub fn kernel_and_freeness_check<R: Rng + ?Sized>(
    rho: &Representation,
    trials: usize,
    rng: &mut R,
) -> Result<KernelReport> {
    kernel_and_freeness_check_with(rho, trials, rng, &DEFAULT_TOLERANCES)
}

pub fn kernel_and_freeness_check_with<R: Rng + ?Sized>(
    rho: &Representation,
    trials: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<KernelReport> {
    let gens = generators_with(rho, tol)?;
    let kernel_residual = gens.act(&TorusElement::KERNEL, rho).tuple_distance(rho);
    let mut violations = Vec::new();
    let mut min_class_residual = f64::INFINITY;
    for _ in 0..trials {
        let t = loop {
            let t = TorusElement::random(rng);
            if t.distance_mod_kernel(&TorusElement::IDENTITY) > KERNEL_EXCLUSION {
                break t;
            }
        };
        let moved = gens.act(&t, rho);
        if let Some((_, r)) = crate::su2::best_conjugator(&moved.elements(), &rho.elements()) {
            min_class_residual = min_class_residual.min(r);
        }
        if class_equal_with(&moved, rho, tol) {
            violations.push(t);
        }
    }
    Ok(KernelReport {
        kernel_residual,
        trials,
        violations,
        min_class_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{haar_sample, seeded_rng};

    fn interior_rep() -> Representation {
        crate::tau::section(&[0.2, 0.3, 0.25]).unwrap()
    }

    #[test]
    fn torus_arithmetic() {
        let t = TorusElement::new(-0.5, 7.0, PI);
        assert!((t.angles[0] - (TAU - 0.5)).abs() < 1e-15);
        assert!((t.angles[1] - (7.0 - TAU)).abs() < 1e-15);
        let c = t.canonical();
        assert!(c.angles[2] < PI);
        assert!(c.distance_mod_kernel(&t) < 1e-15);
        assert!(t.compose(&t.inverse()).distance(&TorusElement::IDENTITY) < 1e-15);
    }

    #[test]
    fn diagonal_h1_gives_z_axis() {
        let mut rng = seeded_rng(1);
        let g = haar_sample(&mut rng);
        let h1 = GroupElement::diagonal(PI / 2.0);
        let h2 = GroupElement::diagonal(0.7).conjugated_by(&GroupElement::new(1.0, 0.4, 0.0, 0.0).unwrap());
        let rho = Representation::new(g, h1, g, h2);
        let gens = generators(&rho).unwrap();
        assert_eq!(gens.xi1_hat.v, [0.0, 0.0, 1.0]);
        assert!((raw_x(&rho).norm() - raw_y(&rho).norm()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_generators_are_refused() {
        let id = GroupElement::IDENTITY;
        let rho = Representation::new(id, id, id, GroupElement::diagonal(0.3));
        assert_eq!(
            generators(&rho).unwrap_err(),
            Error::DegenerateGenerator { which: "h1" }
        );
    }

    #[test]
    fn zero_angles_leave_tuple_untouched() {
        let rho = interior_rep();
        assert_eq!(act(&TorusElement::IDENTITY, &rho).unwrap(), rho);
    }

    #[test]
    fn kernel_element_fixes_tuple() {
        let rho = interior_rep();
        let moved = act(&TorusElement::KERNEL, &rho).unwrap();
        assert!(moved.tuple_distance(&rho) < 1e-12);
        assert_eq!(moved.h1, rho.h1);
        assert_eq!(moved.h2, rho.h2);
    }

    #[test]
    fn half_kernel_flips_signs() {
        let rho = interior_rep();
        let moved = act(&TorusElement::new(PI, PI, 0.0), &rho).unwrap();
        assert!(moved.g1.distance(&-rho.g1) < 1e-12);
        assert!(moved.g2.distance(&-rho.g2) < 1e-12);
        assert!(!class_equal_with(&moved, &rho, &DEFAULT_TOLERANCES));
    }

    #[test]
    fn identities_at_zero_and_boundary() {
        let rho = interior_rep();
        let r = verify_flow_identities(&rho, 0.0);
        assert_eq!(r.max_residual(), 0.0);
        let commuting = Representation::new(
            GroupElement::IDENTITY,
            GroupElement::diagonal(0.4),
            GroupElement::IDENTITY,
            GroupElement::diagonal(1.2),
        );
        assert!(verify_flow_identities(&commuting, 0.37).max_residual() < 1e-12);
    }

    #[test]
    fn freeness_on_a_section_point() {
        let rho = interior_rep();
        let report = kernel_and_freeness_check(&rho, 50, &mut seeded_rng(4)).unwrap();
        assert!(report.kernel_residual < 1e-12);
        assert!(report.violations.is_empty());
        assert!(report.min_class_residual > 1e-6);
    }
}
