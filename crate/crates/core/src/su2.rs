//! SU(2) as unit quaternions.
//!
//! A quaternion `(w, x, y, z)` is identified with the matrix
//!
//! ```text
//!     [[ w + iz,  x + iy ],
//!      [ -x + iy, w - iz ]]
//! ```
//!
//! so `tr = 2w`, the basis units are `e_x = [[0,1],[-1,0]]`, `e_y = [[0,i],[i,0]]`,
//! `e_z = [[i,0],[0,-i]]`, and the Hamilton product is matrix multiplication.
//! In this convention `diag(i,-i) = (0,0,0,1)` and `J = [[0,-1],[1,0]] = (0,-1,0,0)`.
//!
//! The Lie algebra su(2) is stored as a real 3-vector `v`, the pure quaternion
//! `v_x e_x + v_y e_y + v_z e_z`, whose matrix has eigenvalues `±i|v|`. The invariant
//! inner product is the plain dot product (the Killing form up to a positive scale).

use std::fmt;
use std::ops::{Mul, Neg};

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::tol::{Tolerances, DEFAULT_TOLERANCES};

/// Deterministic generator used by every sampler in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`; used to shard trials.
pub fn trial_rng(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A point of SU(2), stored as a unit quaternion `[w, x, y, z]`.
#[derive(Clone, Copy, PartialEq)]
pub struct GroupElement {
    q: [f64; 4],
}

/// A point of su(2) as a real 3-vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    pub v: [f64; 3],
}

pub type Matrix2c = [[Complex64; 2]; 2];

fn qmul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn norm4(q: &[f64; 4]) -> f64 {
    (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt()
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { q: [1.0, 0.0, 0.0, 0.0] };
    pub const MINUS_IDENTITY: GroupElement = GroupElement { q: [-1.0, 0.0, 0.0, 0.0] };

    /// Normalizes `(w, x, y, z)` onto the unit sphere. Returns `None` for the zero vector.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Option<Self> {
        let q = [w, x, y, z];
        let n = norm4(&q);
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        Some(GroupElement { q }.renormalized_from(n))
    }

    /// Wraps a quaternion that is already unit length, without touching its bits.
    pub fn from_unit_quaternion(q: [f64; 4]) -> Self {
        debug_assert!((norm4(&q) - 1.0).abs() < 1e-9);
        GroupElement { q }
    }

    fn renormalized_from(self, n: f64) -> Self {
        if n == 1.0 {
            return self;
        }
        GroupElement {
            q: [self.q[0] / n, self.q[1] / n, self.q[2] / n, self.q[3] / n],
        }
    }

    fn renormalized(self) -> Self {
        let n = norm4(&self.q);
        self.renormalized_from(n)
    }

    /// `diag(e^{iθ}, e^{-iθ})`.
    pub fn diagonal(theta: f64) -> Self {
        GroupElement {
            q: [theta.cos(), 0.0, 0.0, theta.sin()],
        }
    }

    /// `diag(i, -i)`.
    pub fn diag_i() -> Self {
        GroupElement { q: [0.0, 0.0, 0.0, 1.0] }
    }

    /// `J = [[0, -1], [1, 0]]`.
    pub fn weyl_j() -> Self {
        GroupElement { q: [0.0, -1.0, 0.0, 0.0] }
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn w(&self) -> f64 {
        self.q[0]
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.q[1], self.q[2], self.q[3]]
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.q[0]
    }

    pub fn inverse(&self) -> Self {
        GroupElement {
            q: [self.q[0], -self.q[1], -self.q[2], -self.q[3]],
        }
    }

    /// `k · self · k⁻¹`.
    pub fn conjugated_by(&self, k: &GroupElement) -> Self {
        mul(&mul(k, self), &k.inverse())
    }

    /// Frobenius distance between the matrix views; equals `√2 · |q - q'|`.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        let d = [
            self.q[0] - other.q[0],
            self.q[1] - other.q[1],
            self.q[2] - other.q[2],
            self.q[3] - other.q[3],
        ];
        std::f64::consts::SQRT_2 * norm4(&d)
    }

    /// Frobenius distance to the nearer of `±I`.
    pub fn distance_to_center(&self) -> f64 {
        self.distance(&Self::IDENTITY)
            .min(self.distance(&Self::MINUS_IDENTITY))
    }

    pub fn is_central(&self, tol: &Tolerances) -> bool {
        self.distance_to_center() < tol.center
    }

    /// `‖[self, other] - I‖`, which equals `2√2 |u × u'|` for vector parts `u, u'`.
    pub fn commutator_distance(&self, other: &GroupElement) -> f64 {
        commutator(self, other).distance(&Self::IDENTITY)
    }

    pub fn commutes_with(&self, other: &GroupElement, tol: &Tolerances) -> bool {
        self.commutator_distance(other) < tol.mat
    }

    /// The 2x2 complex matrix view.
    pub fn matrix(&self) -> Matrix2c {
        let [w, x, y, z] = self.q;
        [
            [Complex64::new(w, z), Complex64::new(x, y)],
            [Complex64::new(-x, y), Complex64::new(w, -z)],
        ]
    }

    /// Reads back a special unitary matrix in the convention above.
    pub fn from_matrix(m: &Matrix2c) -> Option<Self> {
        Self::new(m[0][0].re, m[0][1].re, m[0][1].im, m[0][0].im)
    }

    /// Rotation of `v` under conjugation, i.e. `Ad_self(v)`.
    pub fn rotate(&self, v: &[f64; 3]) -> [f64; 3] {
        let p = [0.0, v[0], v[1], v[2]];
        let r = qmul(&qmul(&self.q, &p), &self.inverse().q);
        [r[1], r[2], r[3]]
    }

    /// Unit quaternion rotating unit vector `from` onto unit vector `to` along the
    /// shortest arc. Antipodal inputs rotate by π about an axis orthogonal to `from`.
    pub fn rotation_between(from: &[f64; 3], to: &[f64; 3]) -> Self {
        let c = dot3(from, to);
        let ax = cross3(from, to);
        if 1.0 + c > 1e-12 {
            return GroupElement::new(1.0 + c, ax[0], ax[1], ax[2]).unwrap_or(Self::IDENTITY);
        }
        let perp = orthonormal_complement(from).0;
        GroupElement { q: [0.0, perp[0], perp[1], perp[2]] }
    }
}

/// Two unit vectors completing `n` (assumed unit) to a right-handed orthonormal frame.
pub(crate) fn orthonormal_complement(n: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let seed = if n[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let a = cross3(n, &seed);
    let na = norm3(&a);
    let a = [a[0] / na, a[1] / na, a[2] / na];
    let b = cross3(n, &a);
    (a, b)
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupElement[{:.6}, {:.6}, {:.6}, {:.6}]",
            self.q[0], self.q[1], self.q[2], self.q[3]
        )
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        mul(&self, &rhs)
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement {
            q: [-self.q[0], -self.q[1], -self.q[2], -self.q[3]],
        }
    }
}

/// Formats a float with 17 significant digits, as a JSON number.
pub(crate) fn fmt17(v: f64) -> String {
    format!("{:.16e}", v)
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = format!(
            "[{},{},{},{}]",
            fmt17(self.q[0]),
            fmt17(self.q[1]),
            fmt17(self.q[2]),
            fmt17(self.q[3])
        );
        let raw = serde_json::value::RawValue::from_string(raw).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let q = <[f64; 4]>::deserialize(deserializer)?;
        let n = norm4(&q);
        if !n.is_finite() || (n - 1.0).abs() > 1e-6 {
            return Err(D::Error::custom(format!(
                "quaternion {q:?} is not unit length (norm {n})"
            )));
        }
        let g = GroupElement { q };
        if (n - 1.0).abs() <= DEFAULT_TOLERANCES.norm {
            Ok(g)
        } else {
            Ok(g.renormalized_from(n))
        }
    }
}

impl AlgebraElement {
    pub const ZERO: AlgebraElement = AlgebraElement { v: [0.0; 3] };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        AlgebraElement { v: [x, y, z] }
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.v)
    }

    pub fn scale(&self, s: f64) -> Self {
        AlgebraElement {
            v: [self.v[0] * s, self.v[1] * s, self.v[2] * s],
        }
    }

    /// Invariant inner product (Euclidean dot product).
    pub fn dot(&self, other: &AlgebraElement) -> f64 {
        dot3(&self.v, &other.v)
    }

    /// Unit vector in the same direction, or `None` for (numerically) zero input.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self.scale(1.0 / n))
        } else {
            None
        }
    }

    /// `Ad_k(self) = k · self · k⁻¹`.
    pub fn adjoint(&self, k: &GroupElement) -> Self {
        AlgebraElement { v: k.rotate(&self.v) }
    }

    /// The traceless anti-Hermitian matrix view.
    pub fn matrix(&self) -> Matrix2c {
        let [x, y, z] = self.v;
        [
            [Complex64::new(0.0, z), Complex64::new(x, y)],
            [Complex64::new(-x, y), Complex64::new(0.0, -z)],
        ]
    }

    pub fn as_quaternion(&self) -> [f64; 4] {
        [0.0, self.v[0], self.v[1], self.v[2]]
    }
}

/// Quaternion product, renormalized.
pub fn mul(a: &GroupElement, b: &GroupElement) -> GroupElement {
    GroupElement { q: qmul(&a.q, &b.q) }.renormalized()
}

/// `g h g⁻¹ h⁻¹`.
pub fn commutator(g: &GroupElement, h: &GroupElement) -> GroupElement {
    mul(&mul(g, h), &mul(&g.inverse(), &h.inverse()))
}

/// Closed-form exponential: `cos|v| + sin|v| · v/|v|`.
pub fn exp_alg(v: &AlgebraElement) -> GroupElement {
    let theta = v.norm();
    if theta == 0.0 {
        return GroupElement::IDENTITY;
    }
    // sin(θ)/θ via a series below 1e-4 keeps full precision
    let sinc = if theta < 1e-4 {
        1.0 - theta * theta / 6.0
    } else {
        theta.sin() / theta
    };
    GroupElement {
        q: [theta.cos(), sinc * v.v[0], sinc * v.v[1], sinc * v.v[2]],
    }
    .renormalized()
}

/// Principal logarithm with `|v| ∈ [0, π)`.
pub fn log_grp(g: &GroupElement) -> crate::Result<AlgebraElement> {
    log_grp_with(g, &DEFAULT_TOLERANCES)
}

pub fn log_grp_with(g: &GroupElement, tol: &Tolerances) -> crate::Result<AlgebraElement> {
    let distance = g.distance(&GroupElement::MINUS_IDENTITY);
    if distance < tol.center {
        return Err(crate::Error::CenterAmbiguity { distance });
    }
    let u = g.vector();
    let s = norm3(&u);
    if s == 0.0 {
        return Ok(AlgebraElement::ZERO);
    }
    let theta = s.atan2(g.w());
    let f = theta / s;
    Ok(AlgebraElement::new(f * u[0], f * u[1], f * u[2]))
}

/// Modified trace coordinate `arccos(tr(g)/2)/π ∈ [0, 1]`.
///
/// Evaluated as `atan2(|u|, w)/π`, which agrees with the arccos form on unit
/// quaternions and keeps full precision near `±I`.
pub fn trace_angle(g: &GroupElement) -> f64 {
    let s = norm3(&g.vector());
    (s.atan2(g.w()) / std::f64::consts::PI).clamp(0.0, 1.0)
}

/// Haar-uniform element: a normalized standard Gaussian in ℝ⁴.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    loop {
        let w: f64 = rng.sample(StandardNormal);
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if let Some(g) = GroupElement::new(w, x, y, z) {
            return g;
        }
    }
}

/// Uniform unit vector on S².
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = norm3(&v);
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Matrix of `k ↦ k·a` (right multiplication) on quaternion coordinates.
fn right_mul_matrix(a: &[f64; 4]) -> Matrix4<f64> {
    let [w, x, y, z] = *a;
    Matrix4::new(
        w, -x, -y, -z, //
        x, w, z, -y, //
        y, -z, w, x, //
        z, y, -x, w,
    )
}

/// Matrix of `k ↦ b·k` (left multiplication) on quaternion coordinates.
fn left_mul_matrix(b: &[f64; 4]) -> Matrix4<f64> {
    let [w, x, y, z] = *b;
    Matrix4::new(
        w, -x, -y, -z, //
        x, w, -z, y, //
        y, z, w, -x, //
        z, -y, x, w,
    )
}

/// Least-squares conjugator for `k·aᵢ·k⁻¹ = bᵢ` together with its worst residual.
///
/// Stacks the linear constraints `k aᵢ - bᵢ k = 0` on the quaternion coordinates of
/// `k` and takes the right singular vector of the smallest singular value. Every
/// nonzero quaternion is invertible, so any null vector normalizes to a solution.
pub fn best_conjugator(
    as_: &[GroupElement],
    bs: &[GroupElement],
) -> Option<(GroupElement, f64)> {
    if as_.is_empty() || as_.len() != bs.len() {
        return None;
    }
    let n = as_.len();
    let mut m = DMatrix::<f64>::zeros(4 * n, 4);
    for (i, (a, b)) in as_.iter().zip(bs).enumerate() {
        let block = right_mul_matrix(&a.q) - left_mul_matrix(&b.q);
        m.view_mut((4 * i, 0), (4, 4)).copy_from(&block);
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))?;
    let row = v_t.row(imin);
    let k = GroupElement::new(row[0], row[1], row[2], row[3])?;
    let residual = as_
        .iter()
        .zip(bs)
        .map(|(a, b)| a.conjugated_by(&k).distance(b))
        .fold(0.0, f64::max);
    Some((k, residual))
}

/// Some `k` with `k·aᵢ·k⁻¹ = bᵢ` for all `i`, if one exists.
pub fn find_conjugator(as_: &[GroupElement], bs: &[GroupElement]) -> Option<GroupElement> {
    find_conjugator_with(as_, bs, &DEFAULT_TOLERANCES)
}

pub fn find_conjugator_with(
    as_: &[GroupElement],
    bs: &[GroupElement],
    tol: &Tolerances,
) -> Option<GroupElement> {
    match best_conjugator(as_, bs) {
        Some((k, r)) if r < tol.mat => Some(k),
        _ => None,
    }
}

/// Common stabilizer of a list under conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilizerType {
    /// all of K: every element is `±I`
    Full,
    /// a maximal torus: all elements share one axis
    Torus,
    /// the center `{±I}`
    Center,
}

pub fn stabilizer_type(xs: &[GroupElement]) -> StabilizerType {
    stabilizer_type_with(xs, &DEFAULT_TOLERANCES)
}

pub fn stabilizer_type_with(xs: &[GroupElement], tol: &Tolerances) -> StabilizerType {
    let noncentral: Vec<&GroupElement> = xs.iter().filter(|x| !x.is_central(tol)).collect();
    if noncentral.is_empty() {
        return StabilizerType::Full;
    }
    for (i, a) in noncentral.iter().enumerate() {
        for b in &noncentral[i + 1..] {
            if !a.commutes_with(b, tol) {
                return StabilizerType::Center;
            }
        }
    }
    StabilizerType::Torus
}
