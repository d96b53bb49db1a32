//! The tetrahedra Δ̃ and Δ, region classification, and the moment maps.
//!
//! Δ̃ has vertices `(0,0,0), (0,1,1), (1,0,1), (1,1,0)` and half-space form
//!
//! ```text
//!     |x₁ − x₂| ≤ x₃ ≤ min(x₁ + x₂, 2 − x₁ − x₂)
//! ```
//!
//! Δ is the standard simplex with vertices `(0,0,0), (0,0,1), (0,1,0), (1,0,0)`.
//! Both are handled through barycentric coordinates: coordinate `i` is the affine
//! function equal to 1 at vertex `i` and 0 on the opposite face, so a point lies in
//! the closed polytope iff all four are non-negative.

use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::repvar::Representation;
use crate::su2::trace_angle;
use crate::tol::{Tolerances, DEFAULT_TOLERANCES};
use crate::{Error, Result};

pub const TILDE_VERTICES: [[f64; 3]; 4] = [
    [0.0, 0.0, 0.0],
    [0.0, 1.0, 1.0],
    [1.0, 0.0, 1.0],
    [1.0, 1.0, 0.0],
];

pub const STD_VERTICES: [[f64; 3]; 4] = [
    [0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 1.0, 0.0],
    [1.0, 0.0, 0.0],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolytopeKind {
    /// image of the trace-angle moment map μ
    TildeDelta,
    /// the standard 3-simplex, image of μ_Λ
    StdDelta,
    /// the standard simplex scaled by 1/2, image of ν as printed
    HalfStdDelta,
}

impl PolytopeKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolytopeKind::TildeDelta => "tilde_delta",
            PolytopeKind::StdDelta => "delta",
            PolytopeKind::HalfStdDelta => "half_delta",
        }
    }

    pub fn vertices(&self) -> [[f64; 3]; 4] {
        match self {
            PolytopeKind::TildeDelta => TILDE_VERTICES,
            PolytopeKind::StdDelta => STD_VERTICES,
            PolytopeKind::HalfStdDelta => STD_VERTICES.map(|v| v.map(|c| 0.5 * c)),
        }
    }

    /// Barycentric coordinates with respect to [`PolytopeKind::vertices`].
    pub fn barycentric(&self, x: &[f64; 3]) -> [f64; 4] {
        let [a, b, c] = *x;
        match self {
            PolytopeKind::TildeDelta => [
                (2.0 - a - b - c) / 2.0,
                (-a + b + c) / 2.0,
                (a - b + c) / 2.0,
                (a + b - c) / 2.0,
            ],
            PolytopeKind::StdDelta => [1.0 - a - b - c, c, b, a],
            PolytopeKind::HalfStdDelta => {
                PolytopeKind::StdDelta.barycentric(&[2.0 * a, 2.0 * b, 2.0 * c])
            }
        }
    }
}

/// Position of a point relative to the faces of a tetrahedron.
///
/// `Face(i)` is the face opposite vertex `i`, `Vertex(i)` is vertex `i`, and
/// `Edge(e)` indexes the vertex pairs `01, 02, 03, 12, 13, 23` in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Interior,
    Face(u8),
    Edge(u8),
    Vertex(u8),
}

const EDGES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Region {
    pub fn is_boundary(&self) -> bool {
        !matches!(self, Region::Interior)
    }

    /// Vertex indices of an edge id.
    pub fn edge_vertices(id: u8) -> (u8, u8) {
        EDGES[id as usize]
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Interior => write!(f, "interior"),
            Region::Face(i) => write!(f, "face{i}"),
            Region::Edge(i) => write!(f, "edge{i}"),
            Region::Vertex(i) => write!(f, "vertex{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    pub x: [f64; 3],
    pub region: Region,
    pub polytope: PolytopeKind,
}

/// Region of `x` in the closed polytope, or `None` if some barycentric
/// coordinate is below `-tol.poly`.
pub fn classify(kind: PolytopeKind, x: [f64; 3], tol: &Tolerances) -> Option<SimplexPoint> {
    let bary = kind.barycentric(&x);
    if bary.iter().any(|&b| b < -tol.poly) {
        return None;
    }
    let active: Vec<u8> = (0..4u8).filter(|&i| bary[i as usize] <= tol.poly).collect();
    let inactive: Vec<u8> = (0..4u8).filter(|i| !active.contains(i)).collect();
    let region = match active.len() {
        0 => Region::Interior,
        1 => Region::Face(active[0]),
        2 => {
            let pair = (inactive[0], inactive[1]);
            Region::Edge(EDGES.iter().position(|e| *e == pair).unwrap() as u8)
        }
        // four active constraints cannot happen since the coordinates sum to 1
        _ => Region::Vertex(inactive.first().copied().unwrap_or(0)),
    };
    Some(SimplexPoint { x, region, polytope: kind })
}

fn classify_or_err(kind: PolytopeKind, x: [f64; 3], tol: &Tolerances) -> Result<SimplexPoint> {
    classify(kind, x, tol).ok_or_else(|| Error::OutsidePolytope {
        point: x,
        polytope: kind.name(),
        slack: kind.barycentric(&x).iter().copied().fold(f64::INFINITY, f64::min),
    })
}

pub(crate) fn classify_tilde(x: [f64; 3], tol: &Tolerances) -> Result<SimplexPoint> {
    classify_or_err(PolytopeKind::TildeDelta, x, tol)
}

pub fn tilde_delta_contains(x: [f64; 3]) -> Option<SimplexPoint> {
    classify(PolytopeKind::TildeDelta, x, &DEFAULT_TOLERANCES)
}

pub fn std_delta_contains(x: [f64; 3]) -> Option<SimplexPoint> {
    classify(PolytopeKind::StdDelta, x, &DEFAULT_TOLERANCES)
}

/// The integer matrix relating the two moment maps, `μ = M_P · μ_Λ`, with its
/// inverse stored as an integer numerator over the denominator 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientMatrix {
    pub forward: [[i64; 3]; 3],
    pub inverse_numerator: [[i64; 3]; 3],
    pub inverse_denominator: i64,
}

pub const P_LAMBDA: QuotientMatrix = QuotientMatrix {
    forward: [[1, 1, 0], [0, 1, 1], [1, 0, 1]],
    inverse_numerator: [[1, -1, 1], [1, 1, -1], [-1, 1, 1]],
    inverse_denominator: 2,
};

impl QuotientMatrix {
    pub fn apply(&self, x: &[f64; 3]) -> [f64; 3] {
        let m = &self.forward;
        [0, 1, 2].map(|i| (0..3).map(|j| m[i][j] as f64 * x[j]).sum())
    }

    pub fn apply_inverse(&self, x: &[f64; 3]) -> [f64; 3] {
        let m = &self.inverse_numerator;
        let d = self.inverse_denominator as f64;
        [0, 1, 2].map(|i| (0..3).map(|j| m[i][j] as f64 * x[j]).sum::<f64>() / d)
    }

    pub fn apply_int(&self, x: &[i64; 3]) -> [i64; 3] {
        let m = &self.forward;
        [0, 1, 2].map(|i| (0..3).map(|j| m[i][j] * x[j]).sum())
    }

    /// `M_P · numerator == denominator · I` in integer arithmetic.
    pub fn inverse_is_exact(&self) -> bool {
        (0..3).all(|i| {
            (0..3).all(|j| {
                let s: i64 = (0..3)
                    .map(|k| self.forward[i][k] * self.inverse_numerator[k][j])
                    .sum();
                s == if i == j { self.inverse_denominator } else { 0 }
            })
        })
    }

    /// `M_P` carries the vertex set of Δ onto the vertex set of Δ̃, exactly.
    pub fn vertex_bijection(&self) -> bool {
        let to_int = |v: &[f64; 3]| v.map(|c| c as i64);
        let mut image: Vec<[i64; 3]> = STD_VERTICES.iter().map(|v| self.apply_int(&to_int(v))).collect();
        let mut target: Vec<[i64; 3]> = TILDE_VERTICES.iter().map(to_int).collect();
        image.sort();
        target.sort();
        image == target
    }
}

/// `μ(ρ) = (f(h₁), f(h₂), f(h₁h₂))` in Δ̃.
pub fn moment_mu(rho: &Representation) -> Result<SimplexPoint> {
    moment_mu_with(rho, &DEFAULT_TOLERANCES)
}

pub fn moment_mu_with(rho: &Representation, tol: &Tolerances) -> Result<SimplexPoint> {
    classify_tilde(moment_coordinates(rho), tol)
}

/// Raw trace-angle triple of `h₁, h₂, h₁h₂`.
pub fn moment_coordinates(rho: &Representation) -> [f64; 3] {
    [
        trace_angle(&rho.h1),
        trace_angle(&rho.h2),
        trace_angle(&(rho.h1 * rho.h2)),
    ]
}

/// `μ_Λ = M_P⁻¹ · μ` in Δ.
pub fn mu_lambda(rho: &Representation) -> Result<SimplexPoint> {
    mu_lambda_with(rho, &DEFAULT_TOLERANCES)
}

pub fn mu_lambda_with(rho: &Representation, tol: &Tolerances) -> Result<SimplexPoint> {
    let mu = moment_mu_with(rho, tol)?;
    classify_or_err(PolytopeKind::StdDelta, P_LAMBDA.apply_inverse(&mu.x), tol)
}

/// Report note on the normalization of [`nu_p3`].
pub const NU_NORMALIZATION_NOTE: &str = "nu normalization: the formula (|z1|^2,|z2|^2,|z3|^2)/(2|z|^2) has image (1/2)*Delta, \
while the moment image is stated to be the standard simplex Delta; the two differ by a factor of 2. \
nu_p3 implements the formula as written and the image check rescales by 2.";

/// Moment map of the standard torus action on ℂP³, as printed:
/// `(|z₁|², |z₂|², |z₃|²) / (2‖z‖²)`. Its image is Δ scaled by 1/2.
pub fn nu_p3(z: &[Complex64; 4]) -> Result<SimplexPoint> {
    let n2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    if !(n2 > 0.0) {
        return Err(Error::ZeroVector);
    }
    let x = [1, 2, 3].map(|i| z[i].norm_sqr() / (2.0 * n2));
    classify_or_err(PolytopeKind::HalfStdDelta, x, &DEFAULT_TOLERANCES)
}

/// `μ(ρ) ∈ ∂Δ̃` agrees with `[h₁, h₂] = I`.
pub fn boundary_commutation_check(rho: &Representation) -> bool {
    boundary_commutation_check_with(rho, &DEFAULT_TOLERANCES)
}

pub fn boundary_commutation_check_with(rho: &Representation, tol: &Tolerances) -> bool {
    let on_boundary = match moment_mu_with(rho, tol) {
        Ok(p) => p.region.is_boundary(),
        Err(_) => return false,
    };
    on_boundary == rho.h1.commutes_with(&rho.h2, tol)
}

#[derive(Serialize)]
struct PointRow<'a> {
    x1: f64,
    x2: f64,
    x3: f64,
    region: String,
    polytope: &'a str,
}

/// Writes `x1,x2,x3,region,polytope` rows with a header.
pub fn write_points_csv<W: Write>(out: W, points: &[SimplexPoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(PointRow {
            x1: p.x[0],
            x2: p.x[1],
            x3: p.x[2],
            region: p.region.to_string(),
            polytope: p.polytope.name(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_have_unit_barycentric() {
        for kind in [PolytopeKind::TildeDelta, PolytopeKind::StdDelta, PolytopeKind::HalfStdDelta] {
            for (i, v) in kind.vertices().iter().enumerate() {
                let b = kind.barycentric(v);
                for (j, bj) in b.iter().enumerate() {
                    assert_eq!(*bj, if i == j { 1.0 } else { 0.0 }, "{kind:?} {i} {j}");
                }
                let p = classify(kind, *v, &DEFAULT_TOLERANCES).unwrap();
                assert_eq!(p.region, Region::Vertex(i as u8));
            }
        }
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(tilde_delta_contains([0.0, 0.0, 0.0]).unwrap().region, Region::Vertex(0));
        assert_eq!(tilde_delta_contains([0.5, 0.5, 0.5]).unwrap().region, Region::Interior);
        assert!(tilde_delta_contains([1.0, 1.0, 1.0]).is_none());
        assert_eq!(tilde_delta_contains([0.5, 0.5, 0.0]).unwrap().region, Region::Edge(2));
        assert_eq!(tilde_delta_contains([0.3, 0.5, 0.8]).unwrap().region, Region::Face(3));
    }

    #[test]
    fn interior_is_stable_under_tiny_perturbation() {
        // barycentric distance 3e-9 to face 3
        let p = [0.5, 0.5, 1.0 - 6e-9];
        assert_eq!(tilde_delta_contains(p).unwrap().region, Region::Interior);
        for d in [1e-10, -1e-10] {
            let q = [0.5 + d, 0.5 - d, 1.0 - 6e-9 + d];
            assert_eq!(tilde_delta_contains(q).unwrap().region, Region::Interior);
        }
    }

    #[test]
    fn quotient_matrix_is_exact() {
        assert!(P_LAMBDA.inverse_is_exact());
        assert!(P_LAMBDA.vertex_bijection());
        assert_eq!(P_LAMBDA.apply_inverse(&[1.0, 0.0, 1.0]), [1.0, 0.0, 0.0]);
        assert_eq!(P_LAMBDA.apply_inverse(&[0.0, 0.0, 0.0]), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn nu_examples() {
        let c = |r: f64| Complex64::new(r, 0.0);
        let p = nu_p3(&[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(p.x, [0.0, 0.0, 0.0]);
        let p = nu_p3(&[c(0.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(p.x, [0.5, 0.0, 0.0]);
        assert_eq!(p.region, Region::Vertex(3));
        assert_eq!(nu_p3(&[c(0.0); 4]).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn csv_rows() {
        let p = tilde_delta_contains([0.5, 0.5, 0.5]).unwrap();
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &[p]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "x1,x2,x3,region,polytope\n0.5,0.5,0.5,interior,tilde_delta\n");
    }
}
