//! Global section over the open simplex, fiber coordinates, and the involution τ.
//!
//! The section is built in closed form. For `x ∈ Δ°` put `a = M_P x` and
//! `θᵢ = π aᵢ`, then
//!
//! 1. `h₁ = exp(θ₁ ẑ)`;
//! 2. `h₂ = exp(θ₂ m̂)` with `m̂ = (sin φ, 0, cos φ)` and
//!    `cos φ = (cos θ₁ cos θ₂ − cos θ₃) / (sin θ₁ sin θ₂)`, so `tr(h₁h₂) = 2 cos θ₃`;
//! 3. a common commutator `C = (1 − s, v)`: `C h₁` must be conjugate to `h₁` and
//!    `C⁻¹ h₂` to `h₂`, which fixes `v·ẑ = −s cot θ₁` and `v·m̂ = s cot θ₂`; the
//!    remaining component of `v` lies along `+ŷ`;
//! 4. `g₁` is the shortest rotation carrying the axis of `h₁` to the axis of `C h₁`,
//!    and `g₂` the one carrying the axis of `h₂` to the axis of `C⁻¹ h₂`, giving
//!    `[g₁,h₁] = C` and `[g₂,h₂] = C⁻¹`.
//!
//! With `m = max(cos 2θ₁, cos 2θ₂)` and `Q` the squared norm of the in-plane part
//! of `v/s`, the step size is `s = min((1 − m)/2, 1/(Q + 1))`; the second bound keeps
//! `|v|² = 1 − (1 − s)²` attainable next to the faces.

use nalgebra::Matrix4x2;
use serde::{Deserialize, Serialize};

use crate::flows::{generators_with, FlowGenerators, TorusElement};
use crate::polytope::{self, PolytopeKind, Region, SimplexPoint, P_LAMBDA};
use crate::repvar::{class_equal_with, Representation};
use crate::su2::{best_conjugator, dot3, orthonormal_complement, GroupElement};
use crate::tol::{Tolerances, DEFAULT_TOLERANCES};
use crate::{Error, Result};

/// `(base, angles)` with `act(angles, section(base))` in the class of the input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberCoordinates {
    pub base: SimplexPoint,
    /// canonical modulo the kernel: `φ₃ ∈ [0, π)`
    pub angles: TorusElement,
}

pub fn section(x: &[f64; 3]) -> Result<Representation> {
    section_with(x, &DEFAULT_TOLERANCES)
}

pub fn section_with(x: &[f64; 3], tol: &Tolerances) -> Result<Representation> {
    let fail = |reason: String| Error::SectionSolveFailure { base: *x, reason };
    match polytope::classify(PolytopeKind::StdDelta, *x, tol) {
        Some(p) if p.region == Region::Interior => {}
        _ => {
            return Err(Error::PreconditionViolated(format!(
                "section base {x:?} is not interior to the simplex"
            )))
        }
    }
    let a = P_LAMBDA.apply(x);
    let [t1, t2, t3] = a.map(|ai| std::f64::consts::PI * ai);
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();

    let cos_phi = ((c1 * c2 - t3.cos()) / (s1 * s2)).clamp(-1.0, 1.0);
    let sin_phi = (1.0 - cos_phi * cos_phi).sqrt();
    if !(sin_phi > 0.0) {
        return Err(fail("h1 and h2 share an axis".into()));
    }
    let m_hat = [sin_phi, 0.0, cos_phi];
    let h1 = GroupElement::from_unit_quaternion([c1, 0.0, 0.0, s1]);
    let h2 = GroupElement::new(c2, s2 * m_hat[0], 0.0, s2 * m_hat[2])
        .ok_or_else(|| fail("degenerate h2".into()))?;

    // in-plane part p of v/s: p·ẑ = alpha, p·m̂ = beta
    let alpha = -c1 / s1;
    let beta = c2 / s2;
    let sin2 = sin_phi * sin_phi;
    let pb = (beta - alpha * cos_phi) / sin2;
    let pa = alpha - pb * cos_phi;
    let p = [pb * m_hat[0], 0.0, pa + pb * m_hat[2]];
    let q = dot3(&p, &p);

    let m = (2.0 * t1).cos().max((2.0 * t2).cos());
    let s = ((1.0 - m) / 2.0).min(1.0 / (q + 1.0));
    let perp2 = s * (2.0 - s - s * q);
    if !(s > 0.0) || !(perp2 > 0.0) {
        return Err(fail(format!("no commutator of trace 2(1-{s:e})")));
    }
    let perp = perp2.sqrt();
    let c = GroupElement::new(1.0 - s, s * p[0], perp, s * p[2])
        .ok_or_else(|| fail("degenerate commutator".into()))?;

    let c_h1 = c * h1;
    let c_h2 = c.inverse() * h2;
    let axis = |g: &GroupElement| {
        let u = g.vector();
        let n = crate::su2::norm3(&u);
        [u[0] / n, u[1] / n, u[2] / n]
    };
    let g1 = GroupElement::rotation_between(&[0.0, 0.0, 1.0], &axis(&c_h1));
    let g2 = GroupElement::rotation_between(&m_hat, &axis(&c_h2));

    let rho = Representation::new(g1, h1, g2, h2);
    let residual = rho.relation_residual();
    if !(residual < tol.rel) {
        return Err(fail(format!("relation residual {residual:e}")));
    }
    Ok(rho)
}

/// Intermediate data of a fiber solve, kept for callers that need the frame.
#[derive(Clone, Copy, Debug)]
pub struct FiberSolution {
    pub coordinates: FiberCoordinates,
    pub section: Representation,
    pub generators: FlowGenerators,
    /// `k` with `k·ρ·k⁻¹ = act(angles, section)`
    pub frame: GroupElement,
    pub residual: f64,
}

pub fn fiber_coordinates(rho: &Representation) -> Result<FiberCoordinates> {
    Ok(solve_fiber(rho, &DEFAULT_TOLERANCES)?.coordinates)
}

pub fn fiber_coordinates_with(rho: &Representation, tol: &Tolerances) -> Result<FiberCoordinates> {
    Ok(solve_fiber(rho, tol)?.coordinates)
}

/// Rows expressing that `(g_s)⁻¹ (cos t − sin t·L) g` lies in the circle through `axis`.
fn alignment_rows(
    gs: &GroupElement,
    left: &[f64; 3],
    g: &GroupElement,
    axis: &[f64; 3],
) -> ([f64; 4], [f64; 4], [[f64; 2]; 2]) {
    let gs_inv = gs.inverse();
    let l = GroupElement::from_unit_quaternion([0.0, left[0], left[1], left[2]]);
    let u = (gs_inv * *g).quaternion();
    let v = (-(gs_inv * l * *g)).quaternion();
    let (e1, e2) = orthonormal_complement(axis);
    let vec = |q: &[f64; 4]| [q[1], q[2], q[3]];
    let rows = [
        [dot3(&vec(&u), &e1), dot3(&vec(&v), &e1)],
        [dot3(&vec(&u), &e2), dot3(&vec(&v), &e2)],
    ];
    (u, v, rows)
}

fn circle_angle(u: &[f64; 4], v: &[f64; 4], c: f64, s: f64, axis: &[f64; 3]) -> f64 {
    let p = [0, 1, 2, 3].map(|i| c * u[i] + s * v[i]);
    dot3(&[p[1], p[2], p[3]], axis).atan2(p[0])
}

/// Solves for the torus angles relating `ρ` to the section over `μ_Λ(ρ)`.
///
/// The frame is aligned by the conjugator taking `(h₁, h₂)` to the section's pair.
/// The third angle comes from a one-dimensional alignment: `t` must make both
/// `(g₁ˢ)⁻¹ e^{−tX̂} g₁` and `(g₂ˢ)⁻¹ e^{−tŶ} g₂` rotations about `ξ̂₁` and `ξ̂₂`,
/// four linear conditions on `(cos t, sin t)` whose null direction fixes `t` mod π.
/// The first two angles are then read off those rotations.
pub fn solve_fiber(rho: &Representation, tol: &Tolerances) -> Result<FiberSolution> {
    let base = polytope::mu_lambda_with(rho, tol)?;
    if base.region != Region::Interior {
        return Err(Error::PreconditionViolated(
            "fiber coordinates need an interior moment image".into(),
        ));
    }
    let sec = section_with(&base.x, tol)?;
    let gens = generators_with(&sec, tol)?;
    let (k, frame_residual) = best_conjugator(&[rho.h1, rho.h2], &[sec.h1, sec.h2])
        .ok_or(Error::FiberSolveFailure { residual: f64::INFINITY })?;
    if !(frame_residual < tol.rel) {
        return Err(Error::FiberSolveFailure { residual: frame_residual });
    }
    let aligned = rho.conjugated_by(&k);

    let (u1, v1, r1) = alignment_rows(&sec.g1, &gens.x_hat.v, &aligned.g1, &gens.xi1_hat.v);
    let (u2, v2, r2) = alignment_rows(&sec.g2, &gens.y_hat.v, &aligned.g2, &gens.xi2_hat.v);
    let m = Matrix4x2::new(
        r1[0][0], r1[0][1], //
        r1[1][0], r1[1][1], //
        r2[0][0], r2[0][1], //
        r2[1][0], r2[1][1],
    );
    let svd = m.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::FiberSolveFailure { residual: f64::NAN })?;
    let imin = if svd.singular_values[0] <= svd.singular_values[1] { 0 } else { 1 };
    let (mut c, mut s) = (v_t[(imin, 0)], v_t[(imin, 1)]);
    let mut t3 = s.atan2(c);
    if t3 < 0.0 {
        t3 += std::f64::consts::PI;
        c = -c;
        s = -s;
    }
    if t3 >= std::f64::consts::PI {
        t3 -= std::f64::consts::PI;
        c = -c;
        s = -s;
    }
    let l1 = circle_angle(&u1, &v1, c, s, &gens.xi1_hat.v);
    let l2 = circle_angle(&u2, &v2, c, s, &gens.xi2_hat.v);
    let angles = TorusElement::new(l1, l2, t3);

    let residual = gens.act(&angles, &sec).tuple_distance(&aligned);
    if !(residual < tol.rel) {
        return Err(Error::FiberSolveFailure { residual });
    }
    Ok(FiberSolution {
        coordinates: FiberCoordinates { base, angles },
        section: sec,
        generators: gens,
        frame: k,
        residual,
    })
}

/// `τ(ρ) = act(−λ, 𝔰(x))` where `(x, λ)` are the fiber coordinates of `ρ`.
pub fn tau(rho: &Representation) -> Result<Representation> {
    tau_with(rho, &DEFAULT_TOLERANCES)
}

pub fn tau_with(rho: &Representation, tol: &Tolerances) -> Result<Representation> {
    let sol = solve_fiber(rho, tol)?;
    Ok(sol
        .generators
        .act(&sol.coordinates.angles.inverse(), &sol.section))
}

pub fn is_tau_fixed(rho: &Representation, tol: &Tolerances) -> Result<bool> {
    Ok(class_equal_with(&tau_with(rho, tol)?, rho, tol))
}

/// Torus elements `t` with `2t ∈ {0, (π,π,π)}`: the sixteen angle triples over
/// each base point whose orbit points are fixed by τ (eight classes mod the kernel).
pub fn tau_fixed_angles() -> Vec<TorusElement> {
    use std::f64::consts::PI;
    let mut out = Vec::with_capacity(16);
    for offset in [0.0, PI / 2.0] {
        for bits in 0..8u8 {
            let pick = |b: u8| offset + if bits & (1 << b) != 0 { PI } else { 0.0 };
            out.push(TorusElement::new(pick(0), pick(1), pick(2)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::act;
    use crate::polytope::mu_lambda;
    use crate::su2::{haar_sample, seeded_rng};

    fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn section_at_barycenter() {
        let x = [0.25, 0.25, 0.25];
        let rho = section(&x).unwrap();
        assert!(rho.relation_residual() < 1e-8);
        assert!(dist3(&mu_lambda(&rho).unwrap().x, &x) < 1e-8);
        assert!(!rho.is_abelian());
    }

    #[test]
    fn symmetric_base_gives_equal_traces() {
        // a₁ = a₂ iff x₁ = x₃
        let rho = section(&[0.2, 0.35, 0.2]).unwrap();
        assert_eq!(rho.h1.trace(), rho.h2.trace());
    }

    #[test]
    fn cos_phi_reproduces_third_trace() {
        let x = [0.1, 0.6, 0.2];
        let a = P_LAMBDA.apply(&x);
        let rho = section(&x).unwrap();
        let expected = 2.0 * (std::f64::consts::PI * a[2]).cos();
        assert!(((rho.h1 * rho.h2).trace() - expected).abs() < 1e-14);
    }

    #[test]
    fn boundary_base_is_refused() {
        assert!(matches!(
            section(&[0.0, 0.3, 0.3]),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn section_near_faces() {
        for x in [
            [1e-5, 0.3, 0.3],
            [0.3, 1e-5, 0.3],
            [0.3, 0.3, 1e-5],
            [0.5, 0.25, 0.25 - 1e-5],
            [0.98, 0.01, 0.005],
        ] {
            let rho = section(&x).unwrap();
            assert!(rho.relation_residual() < 1e-10, "{x:?}");
            assert!(dist3(&mu_lambda(&rho).unwrap().x, &x) < 1e-9, "{x:?}");
        }
    }

    #[test]
    fn coordinates_of_section_vanish() {
        let rho = section(&[0.3, 0.2, 0.1]).unwrap();
        let fc = fiber_coordinates(&rho).unwrap();
        assert!(fc.angles.distance_mod_kernel(&TorusElement::IDENTITY) < 1e-9);
    }

    #[test]
    fn coordinates_round_trip_with_conjugation() {
        let mut rng = seeded_rng(17);
        let s = section(&[0.15, 0.4, 0.3]).unwrap();
        for _ in 0..50 {
            let t = TorusElement::random(&mut rng);
            let k = haar_sample(&mut rng);
            let rho = act(&t, &s).unwrap().conjugated_by(&k);
            let fc = fiber_coordinates(&rho).unwrap();
            assert!(fc.angles.distance_mod_kernel(&t) < 1e-8, "{t:?} vs {:?}", fc.angles);
            assert!(fc.angles.angles[2] < std::f64::consts::PI);
        }
    }

    #[test]
    fn tau_fixes_section_and_squares_to_identity() {
        let tol = DEFAULT_TOLERANCES;
        let s = section(&[0.2, 0.2, 0.2]).unwrap();
        assert!(class_equal_with(&tau(&s).unwrap(), &s, &tol));
        let mut rng = seeded_rng(5);
        for _ in 0..20 {
            let t = TorusElement::random(&mut rng);
            let rho = act(&t, &s).unwrap().conjugated_by(&haar_sample(&mut rng));
            let back = tau(&tau(&rho).unwrap()).unwrap();
            assert!(class_equal_with(&back, &rho, &tol));
        }
    }

    #[test]
    fn tau_fixed_set_is_two_torsion() {
        let tol = DEFAULT_TOLERANCES;
        let s = section(&[0.3, 0.1, 0.35]).unwrap();
        let fixed = tau_fixed_angles();
        assert_eq!(fixed.len(), 16);
        for t in &fixed {
            assert!(is_tau_fixed(&act(t, &s).unwrap(), &tol).unwrap(), "{t:?}");
        }
        let mut rng = seeded_rng(6);
        for _ in 0..100 {
            let t = TorusElement::random(&mut rng);
            let near = fixed.iter().map(|f| f.distance(&t)).fold(f64::INFINITY, f64::min);
            if near > 1e-3 {
                assert!(!is_tau_fixed(&act(&t, &s).unwrap(), &tol).unwrap());
            }
        }
    }
}
