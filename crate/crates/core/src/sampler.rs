//! Seeded sampling of representation classes.
//!
//! Trial `i` of a run with seed `s` draws from its own ChaCha stream `(s, i)`, so a
//! run splits across threads without changing a single output bit.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flows::{act_with, TorusElement};
use crate::polytope::{self, PolytopeKind, Region};
use crate::repvar::{is_abelian_with, Representation};
use crate::su2::{
    exp_alg, haar_sample, orthonormal_complement, random_unit_vector, trial_rng, AlgebraElement,
    GroupElement,
};
use crate::tau::section_with;
use crate::tol::{Tolerances, DEFAULT_TOLERANCES};
use crate::{Error, Result};

/// Smallest barycentric coordinate accepted for uniform interior base points.
pub const BASE_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SampleTarget {
    /// base point uniform in the open simplex, torus angles uniform
    InteriorUniformBase,
    /// torus angles uniform over a fixed interior base point
    FixedBase([f64; 3]),
    /// abelian quadruples on a random common axis; the moment image lies on a face
    BoundaryFace,
    /// `(g₁, I, g₂, h₂)` with `[g₂,h₂] = I`
    BoundaryEdge,
    /// `(g₁, ±I, g₂, ±I)`, covering all four vertices
    Vertex,
    /// diagonal quadruples
    AbelianTorus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub target: SampleTarget,
    /// apply a Haar-random global conjugation to each sample
    pub conjugate: bool,
}

impl SampleSpec {
    pub fn new(count: usize, seed: u64, target: SampleTarget) -> Self {
        SampleSpec { count, seed, target, conjugate: false }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.count == 0 {
            return Err(Error::PreconditionViolated("count must be at least 1".into()));
        }
        if let SampleTarget::FixedBase(x) = self.target {
            match polytope::classify(PolytopeKind::StdDelta, x, tol) {
                Some(p) if p.region == Region::Interior => {}
                _ => {
                    return Err(Error::PreconditionViolated(format!(
                        "fixed base {x:?} is not interior"
                    )))
                }
            }
        }
        Ok(())
    }
}

pub fn sample(spec: &SampleSpec) -> Result<Vec<Representation>> {
    sample_with(spec, &DEFAULT_TOLERANCES)
}

pub fn sample_with(spec: &SampleSpec, tol: &Tolerances) -> Result<Vec<Representation>> {
    spec.validate(tol)?;
    (0..spec.count as u64)
        .into_par_iter()
        .map(|i| sample_one(spec, i, tol))
        .collect()
}

/// Trial `index` of `spec`, independent of every other trial.
pub fn sample_one(spec: &SampleSpec, index: u64, tol: &Tolerances) -> Result<Representation> {
    let mut rng = trial_rng(spec.seed, index);
    let rho = draw(&spec.target, &mut rng, tol)?;
    Ok(if spec.conjugate {
        rho.conjugated_by(&haar_sample(&mut rng))
    } else {
        rho
    })
}

fn draw<R: Rng + ?Sized>(target: &SampleTarget, rng: &mut R, tol: &Tolerances) -> Result<Representation> {
    match *target {
        SampleTarget::InteriorUniformBase => {
            let x = uniform_interior_base(rng);
            let t = TorusElement::random(rng);
            act_with(&t, &section_with(&x, tol)?, tol)
        }
        SampleTarget::FixedBase(x) => {
            let t = TorusElement::random(rng);
            act_with(&t, &section_with(&x, tol)?, tol)
        }
        SampleTarget::BoundaryFace => {
            let n = random_unit_vector(rng);
            let xs = [0; 4].map(|_| along_axis(&n, rng.random_range(0.0..TAU)));
            Ok(Representation::from_array(xs))
        }
        SampleTarget::BoundaryEdge => {
            let g1 = haar_sample(rng);
            let h2 = haar_sample(rng);
            let u = h2.vector();
            let n = crate::su2::norm3(&u);
            let axis = if n > 0.0 { [u[0] / n, u[1] / n, u[2] / n] } else { [0.0, 0.0, 1.0] };
            let g2 = along_axis(&axis, rng.random_range(0.0..TAU));
            Ok(Representation::new(g1, GroupElement::IDENTITY, g2, h2))
        }
        SampleTarget::Vertex => {
            let mut sign = || {
                if rng.random::<bool>() {
                    GroupElement::IDENTITY
                } else {
                    GroupElement::MINUS_IDENTITY
                }
            };
            let (h1, h2) = (sign(), sign());
            Ok(Representation::new(haar_sample(rng), h1, haar_sample(rng), h2))
        }
        SampleTarget::AbelianTorus => Ok(Representation::from_array(
            [0; 4].map(|_| GroupElement::diagonal(rng.random_range(0.0..TAU))),
        )),
    }
}

/// `exp(θ n)` for a unit axis `n`.
pub fn along_axis(n: &[f64; 3], theta: f64) -> GroupElement {
    let (s, c) = theta.sin_cos();
    GroupElement::new(c, s * n[0], s * n[1], s * n[2]).unwrap_or(GroupElement::IDENTITY)
}

/// Uniform point of the open simplex with every barycentric coordinate at least
/// [`BASE_MARGIN`], by rejection from the unit cube.
pub fn uniform_interior_base<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let x: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let b = PolytopeKind::StdDelta.barycentric(&x);
        if b.iter().all(|&c| c >= BASE_MARGIN) {
            return x;
        }
    }
}

/// Abelian quadruple on a random axis whose four angles stay at least `margin`
/// away from `0` and `π`, so that no element is `±I`.
pub fn random_q_point<R: Rng + ?Sized>(rng: &mut R, margin: f64) -> Representation {
    let n = random_unit_vector(rng);
    Representation::from_array([0; 4].map(|_| {
        let a = rng.random_range(margin..PI - margin);
        let a = if rng.random::<bool>() { a } else { -a };
        along_axis(&n, a)
    }))
}

/// Path `ρ_t = (k(t)g₁k(t)⁻¹, k(t)h₁k(t)⁻¹, g₂, h₂)` leaving an abelian `ρ` into the
/// non-abelian locus, with `k(t) = exp(t·π/4·d)` for a fixed `d ⟂` the common axis.
///
/// For `t ∈ (0, 1]` the first pair is rotated off the axis by `t·π/2`, so it no
/// longer commutes with the second pair, while `[g₁,h₁] = I` keeps the relation.
pub fn density_witness(rho: &Representation, t: f64) -> Result<Representation> {
    density_witness_with(rho, t, &DEFAULT_TOLERANCES)
}

pub fn density_witness_with(rho: &Representation, t: f64, tol: &Tolerances) -> Result<Representation> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::PreconditionViolated(format!("path parameter {t} outside [0, 1]")));
    }
    if !is_abelian_with(rho, tol) {
        return Err(Error::PreconditionViolated("density witness needs an abelian ρ".into()));
    }
    if rho.elements().iter().any(|x| x.is_central(tol)) {
        return Err(Error::PreconditionViolated("density witness needs no element in ±I".into()));
    }
    if t == 0.0 {
        return Ok(*rho);
    }
    let u = rho.g1.vector();
    let n = crate::su2::norm3(&u);
    let axis = [u[0] / n, u[1] / n, u[2] / n];
    let (d, _) = orthonormal_complement(&axis);
    let k = exp_alg(&AlgebraElement::new(d[0], d[1], d[2]).scale(t * FRAC_PI_4));
    Ok(Representation::new(
        rho.g1.conjugated_by(&k),
        rho.h1.conjugated_by(&k),
        rho.g2,
        rho.h2,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{boundary_commutation_check, moment_mu, mu_lambda};

    #[test]
    fn same_seed_same_stream() {
        let spec = SampleSpec { count: 20, seed: 9, target: SampleTarget::InteriorUniformBase, conjugate: true };
        assert_eq!(sample(&spec).unwrap(), sample(&spec).unwrap());
        let other = SampleSpec { seed: 10, ..spec };
        assert_ne!(sample(&spec).unwrap(), sample(&other).unwrap());
    }

    #[test]
    fn interior_samples_are_interior_and_irreducible() {
        let spec = SampleSpec::new(200, 1, SampleTarget::InteriorUniformBase);
        for rho in sample(&spec).unwrap() {
            assert!(rho.relation_residual() < 1e-9);
            assert_eq!(moment_mu(&rho).unwrap().region, Region::Interior);
            assert_eq!(mu_lambda(&rho).unwrap().region, Region::Interior);
            assert!(!rho.is_abelian());
        }
    }

    #[test]
    fn fixed_base_keeps_base() {
        let x = [0.1, 0.2, 0.3];
        let spec = SampleSpec::new(30, 2, SampleTarget::FixedBase(x));
        for rho in sample(&spec).unwrap() {
            let y = mu_lambda(&rho).unwrap().x;
            assert!((0..3).all(|i| (y[i] - x[i]).abs() < 1e-9));
        }
        assert!(sample(&SampleSpec::new(3, 2, SampleTarget::FixedBase([0.5, 0.5, 0.0]))).is_err());
        assert!(sample(&SampleSpec::new(0, 2, SampleTarget::Vertex)).is_err());
    }

    #[test]
    fn boundary_targets_land_on_the_boundary() {
        for target in [SampleTarget::BoundaryFace, SampleTarget::BoundaryEdge, SampleTarget::AbelianTorus] {
            for rho in sample(&SampleSpec::new(100, 3, target)).unwrap() {
                assert!(rho.relation_residual() < 1e-9);
                assert!(moment_mu(&rho).unwrap().region.is_boundary(), "{target:?}");
                assert!(boundary_commutation_check(&rho));
            }
        }
    }

    #[test]
    fn vertex_target_hits_all_vertices() {
        let mut seen = [false; 4];
        for rho in sample(&SampleSpec::new(64, 4, SampleTarget::Vertex)).unwrap() {
            match moment_mu(&rho).unwrap().region {
                Region::Vertex(v) => seen[v as usize] = true,
                r => panic!("{r:?}"),
            }
        }
        assert_eq!(seen, [true; 4]);
    }

    #[test]
    fn irreducible_points_reach_the_boundary() {
        let g1 = GroupElement::diagonal(0.4);
        let g2 = GroupElement::weyl_j();
        let rho = Representation::new(g1, GroupElement::IDENTITY, g2, GroupElement::IDENTITY);
        assert!(rho.relation_residual() == 0.0);
        assert!(!rho.is_abelian());
        assert!(moment_mu(&rho).unwrap().region.is_boundary());
    }

    #[test]
    fn density_path() {
        let mut rng = crate::su2::seeded_rng(5);
        for _ in 0..50 {
            let q = random_q_point(&mut rng, 1e-2);
            assert_eq!(density_witness(&q, 0.0).unwrap(), q);
            let half = density_witness(&q, 0.5).unwrap();
            assert!(!half.is_abelian());
            assert!(half.relation_residual() < 1e-9);
            assert!(density_witness(&q, 0.01).unwrap().tuple_distance(&q) < 0.1);
        }
        let central = Representation::from_array([GroupElement::IDENTITY; 4]);
        assert!(density_witness(&central, 0.5).is_err());
        let q = random_q_point(&mut rng, 1e-2);
        assert!(density_witness(&q, 1.5).is_err());
    }
}
