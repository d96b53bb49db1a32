//! Representations of the genus-2 surface group and their conjugacy classes.

use nalgebra::{Matrix3x6, Vector3};
use serde::{Deserialize, Serialize};

use crate::polytope::{self, SimplexPoint};
use crate::su2::{
    commutator, exp_alg, find_conjugator_with, trace_angle, AlgebraElement, GroupElement,
};
use crate::tol::{Tolerances, DEFAULT_TOLERANCES};
use crate::{Error, Result};

/// An ordered quadruple `(g₁, h₁, g₂, h₂)`, images of `A₁, B₁, A₂, B₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub g1: GroupElement,
    pub h1: GroupElement,
    pub g2: GroupElement,
    pub h2: GroupElement,
}

/// A pair `(ρ(A), ρ(B))` for the free group on two generators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct F2Pair {
    pub a: GroupElement,
    pub b: GroupElement,
}

impl Representation {
    /// Unchecked quadruple.
    pub fn new(g1: GroupElement, h1: GroupElement, g2: GroupElement, h2: GroupElement) -> Self {
        Representation { g1, h1, g2, h2 }
    }

    pub fn from_array(xs: [GroupElement; 4]) -> Self {
        Representation::new(xs[0], xs[1], xs[2], xs[3])
    }

    /// Rejects quadruples whose relation residual is at least `tol.rel`.
    pub fn new_checked(
        g1: GroupElement,
        h1: GroupElement,
        g2: GroupElement,
        h2: GroupElement,
        tol: &Tolerances,
    ) -> Result<Self> {
        let rho = Representation::new(g1, h1, g2, h2);
        rho.check(tol)?;
        Ok(rho)
    }

    /// One Gauss-Newton correction of `(g₂, h₂)` toward `[g₂,h₂] = [g₁,h₁]⁻¹`, then a check.
    ///
    /// The update is `g₂ ← g₂ e^{δ_g}`, `h₂ ← h₂ e^{δ_h}` with the minimum-norm step
    /// solving the linearized relation. Moving `h₂` alone reaches only a 2-dimensional
    /// set of commutators, so both slots of the second handle are corrected.
    pub fn new_projected(
        g1: GroupElement,
        h1: GroupElement,
        g2: GroupElement,
        h2: GroupElement,
        tol: &Tolerances,
    ) -> Result<Self> {
        let rho = Representation::new(g1, h1, g2, h2);
        if rho.relation_residual() < tol.rel {
            return Ok(rho);
        }
        let c1 = commutator(&g1, &h1);
        let eval = |d: &[f64; 6]| -> Vector3<f64> {
            let g = g2 * exp_alg(&AlgebraElement::new(d[0], d[1], d[2]));
            let h = h2 * exp_alg(&AlgebraElement::new(d[3], d[4], d[5]));
            let r = c1 * commutator(&g, &h);
            // vector part of r, sign-fixed so that r ≈ +I
            let s = if r.w() < 0.0 { -1.0 } else { 1.0 };
            let v = r.vector();
            Vector3::new(s * v[0], s * v[1], s * v[2])
        };
        let step = 1e-6;
        let mut jac = Matrix3x6::<f64>::zeros();
        for j in 0..6 {
            let mut plus = [0.0; 6];
            let mut minus = [0.0; 6];
            plus[j] = step;
            minus[j] = -step;
            let col = (eval(&plus) - eval(&minus)) / (2.0 * step);
            jac.set_column(j, &col);
        }
        let f0 = eval(&[0.0; 6]);
        let pinv = jac
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::PreconditionViolated(format!("projection failed: {e}")))?;
        let delta = -(pinv * f0);
        let g2n = g2 * exp_alg(&AlgebraElement::new(delta[0], delta[1], delta[2]));
        let h2n = h2 * exp_alg(&AlgebraElement::new(delta[3], delta[4], delta[5]));
        Representation::new_checked(g1, h1, g2n, h2n, tol)
    }

    pub fn check(&self, tol: &Tolerances) -> Result<()> {
        let residual = self.relation_residual();
        if residual < tol.rel {
            Ok(())
        } else {
            Err(Error::RelationViolated {
                residual,
                tolerance: tol.rel,
            })
        }
    }

    pub fn elements(&self) -> [GroupElement; 4] {
        [self.g1, self.h1, self.g2, self.h2]
    }

    /// `k·ρ·k⁻¹`.
    pub fn conjugated_by(&self, k: &GroupElement) -> Self {
        Representation::from_array(self.elements().map(|x| x.conjugated_by(k)))
    }

    /// Largest slotwise Frobenius distance; zero iff equal as tuples.
    pub fn tuple_distance(&self, other: &Representation) -> f64 {
        self.elements()
            .iter()
            .zip(other.elements().iter())
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    /// `‖[g₁,h₁][g₂,h₂] − I‖_F`.
    pub fn relation_residual(&self) -> f64 {
        relation_residual(self)
    }

    pub fn is_abelian(&self) -> bool {
        is_abelian(self)
    }
}

pub fn relation_residual(rho: &Representation) -> f64 {
    (commutator(&rho.g1, &rho.h1) * commutator(&rho.g2, &rho.h2)).distance(&GroupElement::IDENTITY)
}

pub fn is_abelian(rho: &Representation) -> bool {
    is_abelian_with(rho, &DEFAULT_TOLERANCES)
}

/// All six pairwise commutators within `tol.mat` of `I`.
pub fn is_abelian_with(rho: &Representation, tol: &Tolerances) -> bool {
    let xs = rho.elements();
    (0..4).all(|i| (i + 1..4).all(|j| xs[i].commutes_with(&xs[j], tol)))
}

pub fn class_equal(a: &Representation, b: &Representation) -> bool {
    class_equal_with(a, b, &DEFAULT_TOLERANCES)
}

/// Equality in `Hom(π₁Σ, K)/K`.
///
/// Abelian pairs are compared through their diagonal angle tuples modulo the Weyl
/// flip; all other pairs go through the conjugator nullspace.
pub fn class_equal_with(a: &Representation, b: &Representation, tol: &Tolerances) -> bool {
    match (is_abelian_with(a, tol), is_abelian_with(b, tol)) {
        (true, true) => abelian_class_equal(a, b, tol),
        (false, false) => find_conjugator_with(&a.elements(), &b.elements(), tol).is_some(),
        _ => false,
    }
}

/// Conjugator-based comparison without the abelian shortcut.
pub fn class_equal_by_conjugator(a: &Representation, b: &Representation, tol: &Tolerances) -> bool {
    find_conjugator_with(&a.elements(), &b.elements(), tol).is_some()
}

/// `(cos θᵢ, sin θᵢ)` of each slot of an abelian quadruple along its common axis.
pub fn abelian_angles(rho: &Representation) -> [(f64, f64); 4] {
    let xs = rho.elements();
    let lead = xs
        .iter()
        .max_by(|x, y| {
            crate::su2::norm3(&x.vector()).total_cmp(&crate::su2::norm3(&y.vector()))
        })
        .copied()
        .unwrap_or(GroupElement::IDENTITY);
    let u = lead.vector();
    let n = crate::su2::norm3(&u);
    let axis = if n > 0.0 {
        [u[0] / n, u[1] / n, u[2] / n]
    } else {
        [0.0, 0.0, 1.0]
    };
    xs.map(|x| (x.w(), crate::su2::dot3(&x.vector(), &axis)))
}

fn abelian_class_equal(a: &Representation, b: &Representation, tol: &Tolerances) -> bool {
    let aa = abelian_angles(a);
    let bb = abelian_angles(b);
    [1.0, -1.0].iter().any(|sign| {
        aa.iter().zip(bb.iter()).all(|((wa, sa), (wb, sb))| {
            let d = ((wa - wb).powi(2) + (sa - sign * sb).powi(2)).sqrt();
            std::f64::consts::SQRT_2 * d < tol.mat
        })
    })
}

/// Goldman's trace map `(tr h₁, tr h₂, tr h₁h₂)`.
pub fn goldman_phi(rho: &Representation) -> [f64; 3] {
    [rho.h1.trace(), rho.h2.trace(), (rho.h1 * rho.h2).trace()]
}

/// `(f_A, f_B, f_AB)` tagged by its region in the tetrahedron with vertices
/// `(0,0,0), (0,1,1), (1,0,1), (1,1,0)`.
pub fn psi_f2(p: &F2Pair) -> Result<SimplexPoint> {
    let x = [trace_angle(&p.a), trace_angle(&p.b), trace_angle(&(p.a * p.b))];
    polytope::classify_tilde(x, &DEFAULT_TOLERANCES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Region;
    use crate::su2::{haar_sample, seeded_rng};

    fn pillow_rep() -> Representation {
        let a = GroupElement::diag_i();
        let j = GroupElement::weyl_j();
        Representation::new(a, j, j, a)
    }

    #[test]
    fn residual_examples() {
        let id = GroupElement::IDENTITY;
        assert_eq!(Representation::new(id, id, id, id).relation_residual(), 0.0);
        let mut rng = seeded_rng(1);
        for _ in 0..100 {
            let g = haar_sample(&mut rng);
            let h = haar_sample(&mut rng);
            assert!(Representation::new(g, h, h, g).relation_residual() < 1e-8);
        }
        let mut big = 0;
        for _ in 0..100 {
            let xs = [0; 4].map(|_| haar_sample(&mut rng));
            if Representation::from_array(xs).relation_residual() > 0.1 {
                big += 1;
            }
        }
        assert!(big > 90);
    }

    #[test]
    fn abelian_examples() {
        let id = GroupElement::IDENTITY;
        assert!(Representation::new(id, id, id, id).is_abelian());
        let d = |t| GroupElement::diagonal(t);
        assert!(Representation::new(d(0.1), d(0.7), d(2.0), d(-1.3)).is_abelian());
        assert!(!pillow_rep().is_abelian());
    }

    #[test]
    fn phi_examples() {
        let mut rng = seeded_rng(2);
        let g = haar_sample(&mut rng);
        let id = GroupElement::IDENTITY;
        assert_eq!(goldman_phi(&Representation::new(g, id, g, id)), [2.0, 2.0, 2.0]);
        assert_eq!(goldman_phi(&pillow_rep()), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn class_equality_examples() {
        let mut rng = seeded_rng(3);
        for _ in 0..50 {
            let g = haar_sample(&mut rng);
            let h = haar_sample(&mut rng);
            let rho = Representation::new(g, h, h, g);
            let k = haar_sample(&mut rng);
            assert!(class_equal(&rho, &rho.conjugated_by(&k)));
            let mut flipped = rho;
            flipped.g1 = -flipped.g1;
            assert!(!class_equal(&rho, &flipped));
        }
        let d = |t| GroupElement::diagonal(t);
        let a = Representation::new(d(0.1), d(0.7), d(2.0), d(-1.3));
        let flip = Representation::new(d(-0.1), d(-0.7), d(-2.0), d(1.3));
        let other = Representation::new(d(0.1), d(0.7), d(2.0), d(1.3));
        assert!(class_equal(&a, &flip));
        assert!(!class_equal(&a, &other));
        let k = haar_sample(&mut rng);
        assert!(class_equal(&a.conjugated_by(&k), &flip));
    }

    #[test]
    fn psi_vertices_and_boundary() {
        let id = GroupElement::IDENTITY;
        let p = psi_f2(&F2Pair { a: id, b: id }).unwrap();
        assert_eq!(p.x, [0.0, 0.0, 0.0]);
        assert!(matches!(p.region, Region::Vertex(_)));
        let m = GroupElement::MINUS_IDENTITY;
        let p = psi_f2(&F2Pair { a: m, b: m }).unwrap();
        assert_eq!(p.x, [1.0, 1.0, 0.0]);
        assert!(matches!(p.region, Region::Vertex(_)));
        let p = psi_f2(&F2Pair {
            a: GroupElement::diagonal(0.4),
            b: GroupElement::diagonal(1.9),
        })
        .unwrap();
        assert!(p.region.is_boundary());
    }

    #[test]
    fn projection_repairs_small_drift() {
        let mut rng = seeded_rng(4);
        let tol = DEFAULT_TOLERANCES;
        for _ in 0..50 {
            let g = haar_sample(&mut rng);
            let h = haar_sample(&mut rng);
            let kick = exp_alg(&AlgebraElement::new(3e-7, -2e-7, 1e-7));
            let drifted = Representation::new(g, h, h * kick, g);
            assert!(drifted.relation_residual() > tol.rel);
            assert!(Representation::new_checked(g, h, h * kick, g, &tol).is_err());
            let fixed = Representation::new_projected(g, h, h * kick, g, &tol).unwrap();
            assert!(fixed.relation_residual() < tol.rel);
            assert_eq!(fixed.g1, g);
            assert_eq!(fixed.h1, h);
        }
    }
}
