//! Monte Carlo verification suites.
//!
//! Every check draws trial `i` from the stream `(seed + salt, i)` and aggregates by
//! sums and maxima, so results do not depend on thread scheduling.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flows::{act_with, generators_with, verify_flow_identities, TorusElement, KERNEL_EXCLUSION};
use crate::polytope::{
    self, moment_mu_with, mu_lambda_with, nu_p3, PolytopeKind, Region, P_LAMBDA,
};
use crate::repvar::{class_equal_with, is_abelian_with, psi_f2, F2Pair, Representation};
use crate::sampler::{
    along_axis, density_witness_with, random_q_point, sample_one, uniform_interior_base,
    SampleSpec, SampleTarget,
};
use crate::sigma::{
    blowup_conjugator, blowup_point_with, canonical_pillow_point, certify_interval_injectivity_with,
    classify_fixed_point_with, fixedness, n2_interval, pillow_point, random_fixed_point,
    random_square_root_of_minus_identity, rp2_fiber_point, sigma, trace_zero_stabilizer_is_pm,
    Fixedness, Piece, Stratum,
};
use crate::su2::{commutator, haar_sample, random_unit_vector, trial_rng, GroupElement, SeededRng};
use crate::tau::{is_tau_fixed, section_with, tau_fixed_angles, tau_with};
use crate::tol::Tolerances;
use crate::Result;

/// Number of failing trial indices kept per check.
const KEPT_VIOLATIONS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Flows,
    Polytope,
    Tau,
    Sigma,
    Density,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Flows => "flows",
            Suite::Polytope => "polytope",
            Suite::Tau => "tau",
            Suite::Sigma => "sigma",
            Suite::Density => "density",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "flows" => Ok(Suite::Flows),
            "polytope" => Ok(Suite::Polytope),
            "tau" => Ok(Suite::Tau),
            "sigma" => Ok(Suite::Sigma),
            "density" => Ok(Suite::Density),
            other => Err(format!("unknown suite '{other}'")),
        }
    }
}

/// Result of one trial: a residual, whether it passed, or an undecided outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub residual: f64,
    pub passed: bool,
    pub indeterminate: bool,
}

impl Trial {
    pub fn residual(residual: f64, threshold: f64) -> Self {
        Trial { residual, passed: residual < threshold, indeterminate: false }
    }

    pub fn flag(passed: bool) -> Self {
        Trial { residual: 0.0, passed, indeterminate: false }
    }

    pub fn with_residual(passed: bool, residual: f64) -> Self {
        Trial { residual, passed, indeterminate: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub indeterminate: usize,
    pub max_residual: f64,
    pub threshold: f64,
    /// up to ten failing trial indices with reasons
    pub violations: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub trials: usize,
    pub failures: usize,
    pub indeterminate: usize,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
    pub tolerances: Tolerances,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Runs `trials` independent trials of `f` in parallel.
pub fn run_check<F>(name: &str, threshold: f64, trials: usize, seed: u64, salt: u64, f: F) -> CheckResult
where
    F: Fn(&mut SeededRng, u64) -> Result<Trial> + Sync,
{
    let stream = seed.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let outcomes: Vec<(u64, std::result::Result<Trial, String>)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(stream, i);
            (i, f(&mut rng, i).map_err(|e| e.to_string()))
        })
        .collect();
    let mut result = CheckResult {
        name: name.to_string(),
        trials,
        failures: 0,
        indeterminate: 0,
        max_residual: 0.0,
        threshold,
        violations: Vec::new(),
    };
    for (i, outcome) in outcomes {
        let reason = match outcome {
            Ok(t) => {
                if t.residual.is_nan() {
                    result.max_residual = f64::NAN;
                } else {
                    result.max_residual = result.max_residual.max(t.residual);
                }
                if t.indeterminate {
                    result.indeterminate += 1;
                }
                if t.passed {
                    continue;
                }
                format!("trial {i}: residual {:e}", t.residual)
            }
            Err(e) => format!("trial {i}: {e}"),
        };
        result.failures += 1;
        if result.violations.len() < KEPT_VIOLATIONS {
            result.violations.push(reason);
        }
    }
    result
}

/// Conjugated interior sample for trial `i` of a check.
fn interior_sample(seed: u64, i: u64, tol: &Tolerances) -> Result<Representation> {
    let spec = SampleSpec {
        count: 1,
        seed,
        target: SampleTarget::InteriorUniformBase,
        conjugate: true,
    };
    sample_one(&spec, i, tol)
}

fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-PI..PI)
}

// ---------------------------------------------------------------- flows

/// `act(t, ρ)` satisfies the relation within `tol.mat`.
pub fn check_relation_preservation(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("relation_preservation", tol.mat, n, seed, 1, move |rng, i| {
        let rho = interior_sample(seed ^ 0xA5A5, i, &tol)?;
        let t = TorusElement::random(rng);
        Ok(Trial::residual(act_with(&t, &rho, &tol)?.relation_residual(), tol.mat))
    })
}

/// `e^{tX}h₂ = h₂e^{tY}` and `h₁e^{tX} = e^{tY}h₁` for the raw generators.
pub fn check_intertwining(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    let threshold = tol.mat / 10.0;
    run_check("intertwining_identities", threshold, n, seed, 2, move |rng, i| {
        let rho = interior_sample(seed ^ 0x5A5A, i, &tol)?;
        let r = verify_flow_identities(&rho, random_angle(rng)).max_residual();
        Ok(Trial::residual(r, threshold))
    })
}

/// `(π,π,π)` fixes the tuple up to rounding (`tol.norm`).
pub fn check_kernel_fixes(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("kernel_fixes_tuple", tol.norm, n, seed, 3, move |_, i| {
        let rho = interior_sample(seed ^ 0x3C3C, i, &tol)?;
        let moved = act_with(&TorusElement::KERNEL, &rho, &tol)?;
        Ok(Trial::residual(moved.tuple_distance(&rho), tol.norm))
    })
}

/// A random torus element outside the kernel moves the class.
pub fn check_freeness(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("action_is_free", tol.mat, n, seed, 4, move |rng, i| {
        let rho = interior_sample(seed ^ 0xC3C3, i, &tol)?;
        let t = loop {
            let t = TorusElement::random(rng);
            if t.distance_mod_kernel(&TorusElement::IDENTITY) > KERNEL_EXCLUSION {
                break t;
            }
        };
        let moved = act_with(&t, &rho, &tol)?;
        Ok(Trial::flag(!class_equal_with(&moved, &rho, &tol)))
    })
}

/// `act(t, act(t', ρ))` equals `act(t + t', ρ)` as tuples.
pub fn check_action_law(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("action_law", tol.mat, n, seed, 5, move |rng, i| {
        let rho = interior_sample(seed ^ 0x0F0F, i, &tol)?;
        let gens = generators_with(&rho, &tol)?;
        let t = TorusElement::random(rng);
        let u = TorusElement::random(rng);
        let two = gens.act(&t, &gens.act(&u, &rho));
        let one = gens.act(&t.compose(&u), &rho);
        let d = two.tuple_distance(&one);
        Ok(Trial::with_residual(d < tol.mat || class_equal_with(&two, &one, &tol), d))
    })
}

/// `h₁`, `h₂` are untouched by the action, so μ is preserved bit for bit.
pub fn check_moment_invariance(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("moment_invariance", 0.0, n, seed, 6, move |rng, i| {
        let rho = interior_sample(seed ^ 0xF0F0, i, &tol)?;
        let moved = act_with(&TorusElement::random(rng), &rho, &tol)?;
        Ok(Trial::flag(moved.h1 == rho.h1 && moved.h2 == rho.h2))
    })
}

/// `generators(kρk⁻¹) = Ad_k generators(ρ)` within `tol.alg`.
pub fn check_generator_equivariance(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("generator_equivariance", tol.alg, n, seed, 7, move |rng, i| {
        let rho = interior_sample(seed ^ 0x1111, i, &tol)?;
        let k = haar_sample(rng);
        let a = generators_with(&rho.conjugated_by(&k), &tol)?;
        let b = generators_with(&rho, &tol)?.adjoint(&k);
        let d = [
            (a.xi1_hat, b.xi1_hat),
            (a.xi2_hat, b.xi2_hat),
            (a.x_hat, b.x_hat),
            (a.y_hat, b.y_hat),
        ]
        .iter()
        .map(|(p, q)| (0..3).map(|j| (p.v[j] - q.v[j]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
        Ok(Trial::residual(d, tol.alg))
    })
}

pub fn flows_suite(n: usize, seed: u64, tol: &Tolerances) -> Vec<CheckResult> {
    vec![
        check_relation_preservation(n, seed, tol),
        check_intertwining(n, seed, tol),
        check_kernel_fixes(n, seed, tol),
        check_freeness(n, seed, tol),
        check_action_law(n, seed, tol),
        check_moment_invariance(n, seed, tol),
        check_generator_equivariance(n, seed, tol),
    ]
}

// ---------------------------------------------------------------- polytope

/// Haar pairs land in the closed tetrahedron.
pub fn check_tilde_membership(n: usize, seed: u64, _tol: &Tolerances) -> CheckResult {
    run_check("haar_pairs_in_tilde_delta", 0.0, n, seed, 10, |rng, _| {
        let p = F2Pair { a: haar_sample(rng), b: haar_sample(rng) };
        Ok(Trial::flag(psi_f2(&p).is_ok()))
    })
}

/// Near-boundary pairs: even trials have commuting `h₁, h₂` and must sit on the
/// boundary, odd trials tilt `h₂` off the common axis by `δ ∈ [1e-3, 1e-1]` and
/// must be interior. The boundary distance of a tilted pair is of order `δ²`.
pub fn check_boundary_commutation(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("boundary_iff_commuting", 0.0, n, seed, 11, move |rng, i| {
        let axis = random_unit_vector(rng);
        let a1 = rng.random_range(0.1..PI - 0.1);
        let a2 = rng.random_range(0.1..PI - 0.1);
        let h1 = along_axis(&axis, a1);
        let axis2 = if i % 2 == 0 {
            axis
        } else {
            let delta = 10f64.powf(rng.random_range(-3.0..-1.0));
            let (e, _) = crate::su2::orthonormal_complement(&axis);
            let (s, c) = delta.sin_cos();
            [0, 1, 2].map(|j| c * axis[j] + s * e[j])
        };
        let h2 = along_axis(&axis2, a2);
        let id = GroupElement::IDENTITY;
        let rho = Representation::new(id, h1, id, h2);
        let boundary = moment_mu_with(&rho, &tol)?.region.is_boundary();
        let expected_boundary = i % 2 == 0;
        Ok(Trial::flag(
            polytope::boundary_commutation_check_with(&rho, &tol) && boundary == expected_boundary,
        ))
    })
}

/// `μ(kρk⁻¹) = μ(ρ)` within `tol.f`.
pub fn check_moment_equivariance(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("moment_equivariance", tol.f, n, seed, 12, move |rng, i| {
        let rho = interior_sample(seed ^ 0x2222, i, &tol)?;
        let a = polytope::moment_coordinates(&rho);
        let b = polytope::moment_coordinates(&rho.conjugated_by(&haar_sample(rng)));
        let d = (0..3).map(|j| (a[j] - b[j]).abs()).fold(0.0, f64::max);
        Ok(Trial::residual(d, tol.f))
    })
}

/// `M_P` maps the vertices of Δ onto those of Δ̃ and has an exact half-integer inverse.
pub fn check_vertex_bijection() -> CheckResult {
    run_check("vertex_bijection_exact", 0.0, 1, 0, 13, |_, _| {
        Ok(Trial::flag(P_LAMBDA.vertex_bijection() && P_LAMBDA.inverse_is_exact()))
    })
}

/// Interior samples have `μ_Λ` strictly inside Δ.
pub fn check_mu_lambda_interior(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("mu_lambda_strictly_interior", 0.0, n, seed, 14, move |_, i| {
        let rho = interior_sample(seed ^ 0x3333, i, &tol)?;
        let p = mu_lambda_with(&rho, &tol)?;
        let b = PolytopeKind::StdDelta.barycentric(&p.x);
        let slack = b.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Trial::with_residual(p.region == Region::Interior && slack > 0.0, -slack))
    })
}

/// `‖μ_Λ(𝔰(x)) − x‖_∞` below `10·tol.rel`.
pub fn check_section_round_trip(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    let threshold = 10.0 * tol.rel;
    run_check("section_round_trip", threshold, n, seed, 15, move |rng, _| {
        let x = uniform_interior_base(rng);
        let y = mu_lambda_with(&section_with(&x, &tol)?, &tol)?.x;
        let d = (0..3).map(|j| (x[j] - y[j]).abs()).fold(0.0, f64::max);
        Ok(Trial::residual(d, threshold))
    })
}

/// `2ν(z)` lies in Δ for Gaussian `z ∈ ℂ⁴`.
pub fn check_nu_image(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("nu_image_rescaled", 0.0, n, seed, 16, move |rng, _| {
        let z = [0; 4].map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let p = nu_p3(&z)?;
        let doubled = p.x.map(|v| 2.0 * v);
        Ok(Trial::flag(
            polytope::classify(PolytopeKind::StdDelta, doubled, &tol).is_some(),
        ))
    })
}

pub fn polytope_suite(n: usize, seed: u64, tol: &Tolerances) -> Vec<CheckResult> {
    vec![
        check_tilde_membership(n, seed, tol),
        check_boundary_commutation((n / 10).max(2), seed, tol),
        check_moment_equivariance(n, seed, tol),
        check_vertex_bijection(),
        check_mu_lambda_interior(n, seed, tol),
        check_section_round_trip((n / 100).max(1), seed, tol),
        check_nu_image(n, seed, tol),
    ]
}

// ---------------------------------------------------------------- tau

pub fn check_tau_involution(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("tau_squared_is_identity", 0.0, n, seed, 20, move |_, i| {
        let rho = interior_sample(seed ^ 0x4444, i, &tol)?;
        let back = tau_with(&tau_with(&rho, &tol)?, &tol)?;
        Ok(Trial::flag(class_equal_with(&back, &rho, &tol)))
    })
}

pub fn check_tau_moment(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    let threshold = 10.0 * tol.rel;
    run_check("tau_preserves_mu_lambda", threshold, n, seed, 21, move |_, i| {
        let rho = interior_sample(seed ^ 0x5555, i, &tol)?;
        let a = mu_lambda_with(&rho, &tol)?.x;
        let b = mu_lambda_with(&tau_with(&rho, &tol)?, &tol)?.x;
        let d = (0..3).map(|j| (a[j] - b[j]).abs()).fold(0.0, f64::max);
        Ok(Trial::residual(d, threshold))
    })
}

/// `τ(t·ρ)` is class-equal to `t⁻¹·τ(ρ)`.
pub fn check_tau_compatibility(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("tau_reverses_action", 0.0, n, seed, 22, move |rng, i| {
        let rho = interior_sample(seed ^ 0x6666, i, &tol)?;
        let t = TorusElement::random(rng);
        let lhs = tau_with(&act_with(&t, &rho, &tol)?, &tol)?;
        let rhs = act_with(&t.inverse(), &tau_with(&rho, &tol)?, &tol)?;
        Ok(Trial::flag(class_equal_with(&lhs, &rhs, &tol)))
    })
}

/// Over a random base point, the sixteen 2-torsion angle triples give τ-fixed
/// points and a random triple farther than `1e-3` from all of them does not.
pub fn check_tau_fixed_set(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    let fixed = tau_fixed_angles();
    run_check("tau_fixed_set_is_two_torsion", 0.0, n, seed, 23, move |rng, _| {
        let s = section_with(&uniform_interior_base(rng), &tol)?;
        for t in &fixed {
            if !is_tau_fixed(&act_with(t, &s, &tol)?, &tol)? {
                return Ok(Trial::flag(false));
            }
        }
        let t = loop {
            let t = TorusElement::random(rng);
            if fixed.iter().all(|f| f.distance(&t) > 1e-3) {
                break t;
            }
        };
        Ok(Trial::flag(!is_tau_fixed(&act_with(&t, &s, &tol)?, &tol)?))
    })
}

pub fn tau_suite(n: usize, seed: u64, tol: &Tolerances) -> Vec<CheckResult> {
    vec![
        check_tau_involution(n, seed, tol),
        check_tau_moment(n, seed, tol),
        check_tau_compatibility(n, seed, tol),
        check_tau_fixed_set((n / 10).max(1), seed, tol),
    ]
}

// ---------------------------------------------------------------- sigma

/// Pillow points are swapped onto themselves, found with a central conjugator.
pub fn check_pillow_fixed(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("pillow_fixed_by_center", tol.mat, n, seed, 30, move |rng, _| {
        let rho = pillow_point(haar_sample(rng), haar_sample(rng));
        if sigma(&rho) != rho {
            return Ok(Trial::flag(false));
        }
        Ok(match fixedness(&rho, &tol) {
            Fixedness::Fixed { conjugator, residual } => {
                Trial::with_residual(conjugator.is_central(&tol.scaled(10.0)), residual)
            }
            Fixedness::Indeterminate { residual } => Trial {
                residual,
                passed: false,
                indeterminate: true,
            },
            Fixedness::NotFixed { residual } => Trial::with_residual(false, residual),
        })
    })
}

/// `Φ = (0,0,0)` and `[g,h] = −I` hold exactly at the canonical pillow point.
pub fn check_canonical_point() -> CheckResult {
    run_check("canonical_point_exact", 0.0, 1, 0, 31, |_, _| {
        let rho = canonical_pillow_point();
        let phi = crate::repvar::goldman_phi(&rho);
        Ok(Trial::flag(
            phi == [0.0, 0.0, 0.0] && commutator(&rho.g1, &rho.h1) == GroupElement::MINUS_IDENTITY,
        ))
    })
}

/// `k` and `−k` give the same ℝP² fiber class.
pub fn check_rp2_antipodes(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("rp2_antipodes_identified", 0.0, n, seed, 32, move |rng, _| {
        let k = random_square_root_of_minus_identity(rng);
        let a = rp2_fiber_point(k)?;
        let b = rp2_fiber_point(-k)?;
        Ok(Trial::flag(class_equal_with(&a, &b, &tol)))
    })
}

/// `k` and `k'` with `k' ≠ ±k` give different classes.
pub fn check_rp2_distinct(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("rp2_distinct_points_separated", 0.0, n, seed, 33, move |rng, _| {
        let k = random_square_root_of_minus_identity(rng);
        let other = loop {
            let o = random_square_root_of_minus_identity(rng);
            if o.distance(&k).min(o.distance(&-k)) > 1e-3 {
                break o;
            }
        };
        let a = rp2_fiber_point(k)?;
        let b = rp2_fiber_point(other)?;
        Ok(Trial::flag(!class_equal_with(&a, &b, &tol)))
    })
}

/// Interval certificate on a 10-point grid for generic `(θ, s)`.
pub fn check_intervals(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("interval_certificates", tol.mat, n, seed, 34, move |rng, _| {
        let theta = rng.random_range(0.05..PI - 0.05);
        let s = rng.random_range(0.05..PI - 0.05);
        let r = certify_interval_injectivity_with(theta, s, 10, &tol)?;
        Ok(Trial::with_residual(r.passed(), r.max_fixed_residual))
    })
}

/// The four pillow vertices `(±I, ±I, ±I, ±I)` classify to stratum III.
pub fn check_central_vertices(tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("central_points_stratum_three", 0.0, 4, 0, 35, move |_, i| {
        let sign = |b: bool| if b { GroupElement::MINUS_IDENTITY } else { GroupElement::IDENTITY };
        let rho = pillow_point(sign(i & 1 == 1), sign(i & 2 == 2));
        let p = classify_fixed_point_with(&rho, &tol)?;
        Ok(Trial::flag(p.stratum == Stratum::III && p.piece == Piece::CentralVertex))
    })
}

pub fn check_sigma_relation(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("sigma_preserves_relation", tol.rel, n, seed, 36, move |_, i| {
        let rho = interior_sample(seed ^ 0x7777, i, &tol)?;
        let s = sigma(&rho);
        Ok(Trial::with_residual(
            s.relation_residual() < tol.rel && sigma(&s) == rho,
            s.relation_residual(),
        ))
    })
}

/// Class-equal inputs have class-equal images.
pub fn check_sigma_descends(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("sigma_descends_to_classes", 0.0, n, seed, 37, move |rng, i| {
        let rho = interior_sample(seed ^ 0x8888, i, &tol)?;
        let other = rho.conjugated_by(&haar_sample(rng));
        Ok(Trial::flag(class_equal_with(&sigma(&rho), &sigma(&other), &tol)))
    })
}

/// Every constructed fixed point is detected and classified consistently.
pub fn check_constructors_fixed(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("constructors_are_fixed", tol.mat, n, seed, 38, move |rng, i| {
        let rho = random_fixed_point(rng, i)?;
        match classify_fixed_point_with(&rho, &tol) {
            Ok(p) => {
                let expected = match i % 4 {
                    0 => Piece::PillowInterior,
                    1 => Piece::BlowupInterior,
                    2 => Piece::RP2Fiber,
                    _ => Piece::IntervalInterior,
                };
                let brute = brute_force_stratum(&rho, &tol);
                Ok(Trial::with_residual(
                    p.piece == expected && p.stratum == Stratum::I && brute == p.stratum,
                    p.residual,
                ))
            }
            Err(crate::Error::ClassificationAmbiguity(_)) => Ok(Trial {
                residual: f64::NAN,
                passed: false,
                indeterminate: true,
            }),
            Err(e) => Err(e),
        }
    })
}

/// Stratum from explicit axis geometry: count central elements and compare the
/// axes of the rest.
fn brute_force_stratum(rho: &Representation, tol: &Tolerances) -> Stratum {
    let axes: Vec<[f64; 3]> = rho
        .elements()
        .iter()
        .filter(|x| !x.is_central(tol))
        .map(|x| {
            let u = x.vector();
            let n = crate::su2::norm3(&u);
            [u[0] / n, u[1] / n, u[2] / n]
        })
        .collect();
    if axes.is_empty() {
        return Stratum::III;
    }
    let shared = axes.iter().all(|a| {
        let c = crate::su2::cross3(a, &axes[0]);
        crate::su2::norm3(&c) < tol.mat
    });
    if shared {
        Stratum::II
    } else {
        Stratum::I
    }
}

/// The trace-zero stabilizer of a nontrivial `[g,h]` is exactly `±k`.
pub fn check_blowup_uniqueness(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("blowup_conjugator_unique_up_to_sign", 0.0, n, seed, 39, move |rng, _| {
        let g = haar_sample(rng);
        let h = haar_sample(rng);
        let k = blowup_conjugator(&g, &h)?;
        let ok_point = blowup_point_with(g, h, k, &tol).is_ok() && blowup_point_with(g, h, -k, &tol).is_ok();
        let unique = trace_zero_stabilizer_is_pm(&commutator(&g, &h), &k, 64, 1e-6, rng);
        Ok(Trial::flag(ok_point && unique))
    })
}

/// Interior samples are not σ-fixed.
pub fn check_interior_not_fixed(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("interior_samples_not_fixed", 0.0, n, seed, 40, move |_, i| {
        let rho = interior_sample(seed ^ 0x9999, i, &tol)?;
        Ok(match fixedness(&rho, &tol) {
            Fixedness::NotFixed { .. } => Trial::flag(true),
            Fixedness::Indeterminate { residual } => Trial { residual, passed: false, indeterminate: true },
            Fixedness::Fixed { residual, .. } => {
                // re-examined at a hundredfold tighter tolerance
                let tight = tol.scaled(1e-2);
                Trial::with_residual(!matches!(fixedness(&rho, &tight), Fixedness::Fixed { .. }), residual)
            }
        })
    })
}

/// Interval endpoints and an interior grid point for `(θ, s) = (π/2, π/3)`.
pub fn check_interval_example(tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("interval_example", tol.mat, 1, 0, 41, move |_, _| {
        let r = certify_interval_injectivity_with(FRAC_PI_2, PI / 3.0, 10, &tol)?;
        let mid = n2_interval(FRAC_PI_2, PI / 3.0, 0.3)?;
        let p = classify_fixed_point_with(&mid, &tol)?;
        Ok(Trial::with_residual(
            r.passed() && p.piece == Piece::IntervalInterior,
            r.max_fixed_residual,
        ))
    })
}

pub fn sigma_suite(n: usize, seed: u64, tol: &Tolerances) -> Vec<CheckResult> {
    let m = (n / 10).max(1);
    vec![
        check_pillow_fixed(n, seed, tol),
        check_canonical_point(),
        check_rp2_antipodes(m, seed, tol),
        check_rp2_distinct(m, seed, tol),
        check_intervals(m, seed, tol),
        check_central_vertices(tol),
        check_interval_example(tol),
        check_sigma_relation(n, seed, tol),
        check_sigma_descends(n, seed, tol),
        check_constructors_fixed(n, seed, tol),
        check_blowup_uniqueness(n, seed, tol),
        check_interior_not_fixed(n, seed, tol),
    ]
}

// ---------------------------------------------------------------- density

/// Along the deformation path from an abelian point with no central element,
/// `t ∈ {1e-4, 0.5, 1}` is non-abelian with the relation intact, and the
/// distance to the start at `t = 1e-4` is below `1e-3`.
pub fn check_density(n: usize, seed: u64, tol: &Tolerances) -> CheckResult {
    let tol = *tol;
    run_check("density_witness", 1e-3, n, seed, 50, move |rng, _| {
        let q = random_q_point(rng, 1e-2);
        let mut ok = density_witness_with(&q, 0.0, &tol)? == q;
        for t in [1e-4, 0.5, 1.0] {
            let p = density_witness_with(&q, t, &tol)?;
            ok &= !is_abelian_with(&p, &tol) && p.relation_residual() < tol.rel;
        }
        let d = density_witness_with(&q, 1e-4, &tol)?.tuple_distance(&q);
        Ok(Trial::with_residual(ok && d < 1e-3, d))
    })
}

pub fn density_suite(n: usize, seed: u64, tol: &Tolerances) -> Vec<CheckResult> {
    vec![check_density(n, seed, tol)]
}

// ---------------------------------------------------------------- reports

/// Runs a suite with `samples` trials per main check.
pub fn run_suite(suite: Suite, samples: usize, seed: u64, tol: &Tolerances) -> VerifyReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let wants = |s: Suite| suite == Suite::All || suite == s;
    if wants(Suite::Flows) {
        checks.extend(flows_suite(samples, seed, tol));
    }
    if wants(Suite::Polytope) {
        checks.extend(polytope_suite(samples, seed, tol));
        notes.push(polytope::NU_NORMALIZATION_NOTE.to_string());
    }
    if wants(Suite::Tau) {
        checks.extend(tau_suite(samples, seed, tol));
    }
    if wants(Suite::Sigma) {
        checks.extend(sigma_suite(samples, seed, tol));
    }
    if wants(Suite::Density) {
        checks.extend(density_suite(samples, seed, tol));
    }
    build_report(suite.name(), seed, samples, checks, notes, start, tol)
}

pub fn build_report(
    suite: &str,
    seed: u64,
    samples: usize,
    checks: Vec<CheckResult>,
    notes: Vec<String>,
    start: Instant,
    tol: &Tolerances,
) -> VerifyReport {
    VerifyReport {
        suite: suite.to_string(),
        seed,
        samples,
        trials: checks.iter().map(|c| c.trials).sum(),
        failures: checks.iter().map(|c| c.failures).sum(),
        indeterminate: checks.iter().map(|c| c.indeterminate).sum(),
        checks,
        notes,
        wall_time_s: start.elapsed().as_secs_f64(),
        tolerances: *tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOLERANCES;

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Flows, Suite::Polytope, Suite::Tau, Suite::Sigma, Suite::Density] {
            let r = run_suite(suite, 200, 1, &DEFAULT_TOLERANCES);
            for c in &r.checks {
                assert!(c.passed(), "{}: {:?}", c.name, c);
            }
        }
    }

    #[test]
    fn polytope_report_carries_the_nu_note() {
        let r = run_suite(Suite::Polytope, 10, 3, &DEFAULT_TOLERANCES);
        assert!(r.notes.iter().any(|n| n.contains("factor of 2")));
        assert_eq!("sigma".parse::<Suite>().unwrap(), Suite::Sigma);
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let a = run_suite(Suite::Flows, 50, 4, &DEFAULT_TOLERANCES);
        let b = run_suite(Suite::Flows, 50, 4, &DEFAULT_TOLERANCES);
        assert_eq!(a.checks, b.checks);
    }
}
