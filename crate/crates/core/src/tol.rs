use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// `mat` is measured as a Frobenius distance between 2x2 matrix views, `norm` on the
/// quaternion norm, `alg` on algebra 3-vectors, `f` on trace angles, `poly` on
/// barycentric coordinates, `rel` on the surface-group relation residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub norm: f64,
    pub mat: f64,
    pub alg: f64,
    pub f: f64,
    pub center: f64,
    pub rel: f64,
    pub poly: f64,
}

pub const DEFAULT_TOLERANCES: Tolerances = Tolerances {
    norm: 1e-12,
    mat: 1e-9,
    alg: 1e-8,
    f: 1e-9,
    center: 1e-9,
    rel: 1e-8,
    poly: 1e-9,
};

impl Default for Tolerances {
    fn default() -> Self {
        DEFAULT_TOLERANCES
    }
}

impl Tolerances {
    /// Every threshold multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Tolerances {
            norm: self.norm * factor,
            mat: self.mat * factor,
            alg: self.alg * factor,
            f: self.f * factor,
            center: self.center * factor,
            rel: self.rel * factor,
            poly: self.poly * factor,
        }
    }
}
