//! The handle swap σ and its fixed points.
//!
//! `σ(g₁,h₁,g₂,h₂) = (h₂,g₂,h₁,g₁)`. A class is fixed when some `k` conjugates
//! `ρ` onto `σ(ρ)`; the fixed set splits into the Goldman pillow `{(g,h,h,g)}`, the
//! blow-up copy `{(g,h,khk⁻¹,kgk⁻¹) : k² = −I}` with its ℝP² fiber over
//! `[g,h] = −I`, and intervals joining the two surfaces.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::repvar::{class_equal_with, Representation};
use crate::su2::{
    best_conjugator, commutator, haar_sample, norm3, random_unit_vector, stabilizer_type_with,
    GroupElement, StabilizerType,
};
use crate::tol::{Tolerances, DEFAULT_TOLERANCES};
use crate::{Error, Result};

/// Common stabilizer stratum of a fixed point: center, maximal torus, or all of K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stratum {
    I,
    II,
    III,
}

impl From<StabilizerType> for Stratum {
    fn from(s: StabilizerType) -> Self {
        match s {
            StabilizerType::Center => Stratum::I,
            StabilizerType::Torus => Stratum::II,
            StabilizerType::Full => Stratum::III,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Piece {
    PillowInterior,
    BlowupInterior,
    RP2Fiber,
    IntervalInterior,
    PillowSurface,
    IntervalEndpoint,
    CentralVertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaFixedPoint {
    pub rep: Representation,
    /// `k` with `k·ρ·k⁻¹ = σ(ρ)`
    pub conjugator: GroupElement,
    pub stratum: Stratum,
    pub piece: Piece,
    pub residual: f64,
}

/// Outcome of the fixedness test. Residuals in `[ε_mat, 10 ε_mat)` are not decided.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Fixedness {
    Fixed { conjugator: GroupElement, residual: f64 },
    NotFixed { residual: f64 },
    Indeterminate { residual: f64 },
}

pub fn sigma(rho: &Representation) -> Representation {
    Representation::new(rho.h2, rho.g2, rho.h1, rho.g1)
}

/// Least-squares conjugator onto `σ(ρ)` and its residual.
pub fn sigma_conjugator_residual(rho: &Representation) -> (GroupElement, f64) {
    best_conjugator(&rho.elements(), &sigma(rho).elements())
        .unwrap_or((GroupElement::IDENTITY, f64::INFINITY))
}

pub fn sigma_fixed_conjugator(rho: &Representation) -> Option<GroupElement> {
    sigma_fixed_conjugator_with(rho, &DEFAULT_TOLERANCES)
}

pub fn sigma_fixed_conjugator_with(rho: &Representation, tol: &Tolerances) -> Option<GroupElement> {
    match fixedness(rho, tol) {
        Fixedness::Fixed { conjugator, .. } => Some(conjugator),
        _ => None,
    }
}

pub fn fixedness(rho: &Representation, tol: &Tolerances) -> Fixedness {
    let (k, residual) = sigma_conjugator_residual(rho);
    if residual < tol.mat {
        Fixedness::Fixed { conjugator: k, residual }
    } else if residual < 10.0 * tol.mat {
        Fixedness::Indeterminate { residual }
    } else {
        Fixedness::NotFixed { residual }
    }
}

fn band(value: f64, eps: f64, what: &str) -> Result<bool> {
    if value < eps {
        Ok(true)
    } else if value < 10.0 * eps {
        Err(Error::ClassificationAmbiguity(format!(
            "{what}: {value:e} lies within a decade of {eps:e}"
        )))
    } else {
        Ok(false)
    }
}

pub fn classify_fixed_point(rho: &Representation) -> Result<SigmaFixedPoint> {
    classify_fixed_point_with(rho, &DEFAULT_TOLERANCES)
}

/// Locates a fixed point in the decomposition of the fixed set.
///
/// The stratum is the common stabilizer type. In stratum I the piece is read off
/// `[g₁,h₁]` and `k²`: a trivial commutator means the interior of an interval, `k = ±I`
/// the pillow, and `k² = −I` the blow-up copy, whose part over `[g₁,h₁] = −I` is the
/// ℝP² fiber. In stratum II the pillow surface is told apart from the far interval
/// endpoints by comparing with `(g₁,h₁,h₁,g₁)`.
pub fn classify_fixed_point_with(rho: &Representation, tol: &Tolerances) -> Result<SigmaFixedPoint> {
    let (k, residual) = match fixedness(rho, tol) {
        Fixedness::Fixed { conjugator, residual } => (conjugator, residual),
        Fixedness::Indeterminate { residual } => {
            return Err(Error::ClassificationAmbiguity(format!(
                "fixedness residual {residual:e} is indeterminate"
            )))
        }
        Fixedness::NotFixed { residual } => {
            return Err(Error::PreconditionViolated(format!(
                "not a fixed point of sigma (residual {residual:e})"
            )))
        }
    };
    let xs = rho.elements();
    let strict = stabilizer_type_with(&xs, tol);
    let loose = stabilizer_type_with(&xs, &tol.scaled(10.0));
    if strict != loose {
        return Err(Error::ClassificationAmbiguity(format!(
            "stabilizer type {strict:?} at tolerance, {loose:?} at ten times tolerance"
        )));
    }
    let stratum = Stratum::from(strict);
    let c = commutator(&rho.g1, &rho.h1);
    let piece = match stratum {
        Stratum::III => Piece::CentralVertex,
        Stratum::I => {
            let k2 = k * k;
            if band(c.distance(&GroupElement::IDENTITY), tol.mat, "[g1,h1] - I")? {
                Piece::IntervalInterior
            } else if band(k2.distance(&GroupElement::IDENTITY), tol.center, "k^2 - I")? {
                Piece::PillowInterior
            } else if band(k2.distance(&GroupElement::MINUS_IDENTITY), tol.center, "k^2 + I")? {
                if band(c.distance(&GroupElement::MINUS_IDENTITY), tol.mat, "[g1,h1] + I")? {
                    Piece::RP2Fiber
                } else {
                    Piece::BlowupInterior
                }
            } else {
                return Err(Error::ClassificationAmbiguity(format!(
                    "k^2 = {k2:?} is not central"
                )));
            }
        }
        Stratum::II => {
            let pillow = pillow_point(rho.g1, rho.h1);
            if class_equal_with(rho, &pillow, tol) {
                Piece::PillowSurface
            } else {
                Piece::IntervalEndpoint
            }
        }
    };
    Ok(SigmaFixedPoint {
        rep: *rho,
        conjugator: k,
        stratum,
        piece,
        residual,
    })
}

/// `(g, h, h, g)`.
pub fn pillow_point(g: GroupElement, h: GroupElement) -> Representation {
    Representation::new(g, h, h, g)
}

/// The pillow point with `Φ = (0,0,0)`: `(diag(i,−i), J, J, diag(i,−i))`.
pub fn canonical_pillow_point() -> Representation {
    pillow_point(GroupElement::diag_i(), GroupElement::weyl_j())
}

fn squares_to_minus_identity(k: &GroupElement, tol: &Tolerances) -> bool {
    (*k * *k).distance(&GroupElement::MINUS_IDENTITY) < tol.center
}

/// `(g, h, khk⁻¹, kgk⁻¹)` for `k² = −I` commuting with a nontrivial `[g,h]`.
pub fn blowup_point(g: GroupElement, h: GroupElement, k: GroupElement) -> Result<Representation> {
    blowup_point_with(g, h, k, &DEFAULT_TOLERANCES)
}

pub fn blowup_point_with(
    g: GroupElement,
    h: GroupElement,
    k: GroupElement,
    tol: &Tolerances,
) -> Result<Representation> {
    if !squares_to_minus_identity(&k, tol) {
        return Err(Error::PreconditionViolated("k^2 must equal -I".into()));
    }
    let c = commutator(&g, &h);
    if c.distance(&GroupElement::IDENTITY) < tol.mat {
        return Err(Error::PreconditionViolated("[g,h] must differ from I".into()));
    }
    if !c.commutes_with(&k, tol) {
        return Err(Error::PreconditionViolated("k must commute with [g,h]".into()));
    }
    let rho = Representation::new(g, h, h.conjugated_by(&k), g.conjugated_by(&k));
    rho.check(tol)?;
    Ok(rho)
}

/// The trace-zero element along the axis of `[g,h]`; together with its negative,
/// the only `k` with `k² = −I` commuting with `[g,h]` when `[g,h] ∉ {±I}`.
pub fn blowup_conjugator(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    let c = commutator(g, h);
    if c.is_central(&DEFAULT_TOLERANCES) {
        return Err(Error::PreconditionViolated(
            "[g,h] is central, so every trace-zero k qualifies".into(),
        ));
    }
    let u = c.vector();
    GroupElement::new(0.0, u[0], u[1], u[2]).ok_or(Error::ZeroVector)
}

/// `(diag(i,−i), J, kJk⁻¹, k·diag(i,−i)·k⁻¹)` for `k² = −I`.
pub fn rp2_fiber_point(k: GroupElement) -> Result<Representation> {
    if !squares_to_minus_identity(&k, &DEFAULT_TOLERANCES) {
        return Err(Error::PreconditionViolated("k^2 must equal -I".into()));
    }
    let a = GroupElement::diag_i();
    let j = GroupElement::weyl_j();
    Ok(Representation::new(a, j, j.conjugated_by(&k), a.conjugated_by(&k)))
}

/// `k(α) = [[i cos α, sin α], [−sin α, −i cos α]]`, exact at `α = 0` and `α = π/2`.
pub fn interval_conjugator(alpha: f64) -> GroupElement {
    if alpha == 0.0 {
        GroupElement::diag_i()
    } else if alpha == FRAC_PI_2 {
        GroupElement::from_unit_quaternion([0.0, 1.0, 0.0, 0.0])
    } else {
        let (s, c) = alpha.sin_cos();
        GroupElement::from_unit_quaternion([0.0, s, 0.0, c])
    }
}

/// The arc `α ↦ (g, h, k(α)hk(α)⁻¹, k(α)gk(α)⁻¹)` with `g = diag(e^{iθ})`,
/// `h = diag(e^{is})`, running from the pillow surface (`α = 0`) to
/// `(g, h, h⁻¹, g⁻¹)` (`α = π/2`).
pub fn n2_interval(theta: f64, s: f64, alpha: f64) -> Result<Representation> {
    let g = GroupElement::diagonal(theta);
    let h = GroupElement::diagonal(s);
    let tol = DEFAULT_TOLERANCES;
    if g.is_central(&tol) && h.is_central(&tol) {
        return Err(Error::PreconditionViolated(
            "the interval collapses to a point when g and h are central".into(),
        ));
    }
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::PreconditionViolated(format!(
            "interval parameter {alpha} outside [0, pi/2]"
        )));
    }
    // at the endpoints k(α) commutes with, resp. inverts, every diagonal element
    if alpha == 0.0 {
        return Ok(pillow_point(g, h));
    }
    if alpha == FRAC_PI_2 {
        return Ok(Representation::new(g, h, h.inverse(), g.inverse()));
    }
    let k = interval_conjugator(alpha);
    Ok(Representation::new(g, h, h.conjugated_by(&k), g.conjugated_by(&k)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub theta: f64,
    pub s: f64,
    pub grid: usize,
    pub max_fixed_residual: f64,
    /// `α = 0` is class-equal to the pillow point and classifies as pillow surface
    pub start_on_pillow: bool,
    /// `α = π/2` equals `(g,h,h⁻¹,g⁻¹)` and classifies as an interval endpoint
    pub end_on_blowup_surface: bool,
    pub violations: Vec<String>,
}

impl IntervalReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.start_on_pillow && self.end_on_blowup_surface
    }
}

/// Checks that an evenly spaced grid on `[0, π/2]` consists of σ-fixed points whose
/// conjugator squares to `−I`, that distinct grid points are distinct classes, and
/// that the endpoints sit on the two surfaces.
pub fn certify_interval_injectivity(theta: f64, s: f64, grid: usize) -> Result<IntervalReport> {
    certify_interval_injectivity_with(theta, s, grid, &DEFAULT_TOLERANCES)
}

pub fn certify_interval_injectivity_with(
    theta: f64,
    s: f64,
    grid: usize,
    tol: &Tolerances,
) -> Result<IntervalReport> {
    if grid < 2 {
        return Err(Error::PreconditionViolated("grid needs at least two points".into()));
    }
    let alphas: Vec<f64> = (0..grid)
        .map(|j| {
            if j + 1 == grid {
                FRAC_PI_2
            } else {
                FRAC_PI_2 * j as f64 / (grid - 1) as f64
            }
        })
        .collect();
    let points = alphas
        .iter()
        .map(|&a| n2_interval(theta, s, a))
        .collect::<Result<Vec<_>>>()?;

    let mut violations = Vec::new();
    let mut max_fixed_residual: f64 = 0.0;
    for (a, rho) in alphas.iter().zip(&points) {
        let k = interval_conjugator(*a);
        let r = rho
            .elements()
            .iter()
            .zip(sigma(rho).elements().iter())
            .map(|(x, y)| x.conjugated_by(&k).distance(y))
            .fold(0.0, f64::max);
        max_fixed_residual = max_fixed_residual.max(r);
        if !(r < tol.mat) {
            violations.push(format!("alpha={a}: k(alpha) residual {r:e}"));
        }
        if !squares_to_minus_identity(&k, tol) {
            violations.push(format!("alpha={a}: k(alpha)^2 != -I"));
        }
        if let Fixedness::NotFixed { residual } | Fixedness::Indeterminate { residual } =
            fixedness(rho, tol)
        {
            violations.push(format!("alpha={a}: conjugator search residual {residual:e}"));
        }
    }
    for i in 0..grid {
        for j in i + 1..grid {
            if class_equal_with(&points[i], &points[j], tol) {
                violations.push(format!(
                    "alpha={} and alpha={} are the same class",
                    alphas[i], alphas[j]
                ));
            }
        }
    }
    let (g, h) = (GroupElement::diagonal(theta), GroupElement::diagonal(s));
    let first = &points[0];
    let last = &points[grid - 1];
    let start_on_pillow = class_equal_with(first, &pillow_point(g, h), tol)
        && matches!(
            classify_fixed_point_with(first, tol).map(|p| p.piece),
            Ok(Piece::PillowSurface) | Ok(Piece::CentralVertex)
        );
    let far = Representation::new(g, h, h.inverse(), g.inverse());
    let end_on_blowup_surface = *last == far
        && matches!(
            classify_fixed_point_with(last, tol).map(|p| p.piece),
            Ok(Piece::IntervalEndpoint) | Ok(Piece::PillowSurface) | Ok(Piece::CentralVertex)
        );
    Ok(IntervalReport {
        theta,
        s,
        grid,
        max_fixed_residual,
        start_on_pillow,
        end_on_blowup_surface,
        violations,
    })
}

/// Random trace-zero element, i.e. a uniformly distributed `k` with `k² = −I`.
pub fn random_square_root_of_minus_identity<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    let u = random_unit_vector(rng);
    GroupElement::from_unit_quaternion([0.0, u[0], u[1], u[2]])
}

/// One random fixed point, cycling through pillow, blow-up, ℝP² fiber and interval
/// constructions by `index mod 4`, followed by a random global conjugation.
pub fn random_fixed_point<R: Rng + ?Sized>(rng: &mut R, index: u64) -> Result<Representation> {
    let rho = match index % 4 {
        0 => pillow_point(haar_sample(rng), haar_sample(rng)),
        1 => {
            let g = haar_sample(rng);
            let h = haar_sample(rng);
            let k = blowup_conjugator(&g, &h)?;
            blowup_point(g, h, k)?
        }
        2 => rp2_fiber_point(random_square_root_of_minus_identity(rng))?,
        _ => {
            let theta = rng.random_range(0.1..std::f64::consts::PI - 0.1);
            let s = rng.random_range(0.1..std::f64::consts::PI - 0.1);
            let alpha = rng.random_range(0.05..FRAC_PI_2 - 0.05);
            n2_interval(theta, s, alpha)?
        }
    };
    Ok(rho.conjugated_by(&haar_sample(rng)))
}

/// Checks that `k` is, up to sign, the only trace-zero element commuting with `c`
/// among `trials` random trace-zero elements farther than `gap` from `±k`.
pub fn trace_zero_stabilizer_is_pm<R: Rng + ?Sized>(
    c: &GroupElement,
    k: &GroupElement,
    trials: usize,
    gap: f64,
    rng: &mut R,
) -> bool {
    let tol = DEFAULT_TOLERANCES;
    (0..trials).all(|_| {
        let other = random_square_root_of_minus_identity(rng);
        let away = other.distance(k).min(other.distance(&-*k)) > gap;
        !away || !other.commutes_with(c, &tol)
    }) && norm3(&k.vector()) > 0.0
}
