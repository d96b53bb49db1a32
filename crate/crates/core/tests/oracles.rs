//! Comparisons against independent reference computations on 2x2 complex matrices,
//! linear solves, and closed-form values.

use charvar::flows::{act, raw_x, raw_y, verify_flow_identities, TorusElement};
use charvar::polytope::{
    self, moment_coordinates, mu_lambda, nu_p3, tilde_delta_contains, PolytopeKind, Region,
    P_LAMBDA, STD_VERTICES, TILDE_VERTICES,
};
use charvar::repvar::{goldman_phi, Representation};
use charvar::sigma::{canonical_pillow_point, pillow_point};
use charvar::su2::{
    commutator, exp_alg, haar_sample, seeded_rng, trace_angle, AlgebraElement, GroupElement,
    Matrix2c,
};
use charvar::tau::section;
use num_complex::Complex64;
use rand::Rng;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn mat_mul(a: &Matrix2c, b: &Matrix2c) -> Matrix2c {
    let mut r = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                r[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    r
}

fn mat_add(a: &Matrix2c, b: &Matrix2c, s: f64) -> Matrix2c {
    let mut r = *a;
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] += b[i][j] * s;
        }
    }
    r
}

fn mat_dist(a: &Matrix2c, b: &Matrix2c) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += (a[i][j] - b[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}

fn identity() -> Matrix2c {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

fn scale(a: &Matrix2c, s: f64) -> Matrix2c {
    mat_add(&[[c(0.0, 0.0); 2]; 2], a, s)
}

/// Matrix exponential by scaling and squaring of a 30-term Taylor series.
fn mat_exp(a: &Matrix2c) -> Matrix2c {
    let squarings = 8;
    let small = scale(a, 1.0 / f64::powi(2.0, squarings));
    let mut term = identity();
    let mut sum = identity();
    for n in 1..30 {
        term = scale(&mat_mul(&term, &small), 1.0 / n as f64);
        sum = mat_add(&sum, &term, 1.0);
    }
    for _ in 0..squarings {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

fn mat_inverse_unitary(a: &Matrix2c) -> Matrix2c {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn mat_trace(a: &Matrix2c) -> C {
    a[0][0] + a[1][1]
}

#[test]
fn exponential_matches_taylor_series() {
    let mut rng = seeded_rng(100);
    for _ in 0..200 {
        let s: f64 = rng.random_range(0.0..6.0);
        let v = AlgebraElement::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)).scale(s);
        let reference = mat_exp(&v.matrix());
        assert!(mat_dist(&exp_alg(&v).matrix(), &reference) < 1e-11);
    }
}

#[test]
fn commutator_matches_matrix_products() {
    let mut rng = seeded_rng(101);
    for _ in 0..200 {
        let g = haar_sample(&mut rng);
        let h = haar_sample(&mut rng);
        let (gm, hm) = (g.matrix(), h.matrix());
        let reference = mat_mul(
            &mat_mul(&gm, &hm),
            &mat_mul(&mat_inverse_unitary(&gm), &mat_inverse_unitary(&hm)),
        );
        assert!(mat_dist(&commutator(&g, &h).matrix(), &reference) < 1e-13);
    }
}

#[test]
fn trace_angle_matches_arccos() {
    let mut rng = seeded_rng(102);
    for _ in 0..500 {
        let g = haar_sample(&mut rng);
        let tr = mat_trace(&g.matrix());
        assert!(tr.im.abs() < 1e-15);
        let reference = (tr.re / 2.0).clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
        assert!((trace_angle(&g) - reference).abs() < 1e-7);
    }
}

#[test]
fn intertwining_with_matrix_exponentials() {
    let mut rng = seeded_rng(103);
    let s = section(&[0.15, 0.35, 0.2]).unwrap();
    for _ in 0..50 {
        let rho = act(&TorusElement::random(&mut rng), &s).unwrap();
        let (h1, h2) = (rho.h1.matrix(), rho.h2.matrix());
        let p = mat_mul(&h2, &h1);
        let q = mat_mul(&h1, &h2);
        let x = mat_add(&p, &mat_inverse_unitary(&p), -1.0);
        let y = mat_add(&q, &mat_inverse_unitary(&q), -1.0);
        // the raw generators match X = h₂h₁ − (h₂h₁)⁻¹ and Y = h₁h₂ − (h₁h₂)⁻¹
        assert!(mat_dist(&raw_x(&rho).matrix(), &x) < 1e-13);
        assert!(mat_dist(&raw_y(&rho).matrix(), &y) < 1e-13);
        let t = 0.37;
        let etx = mat_exp(&scale(&x, t));
        let ety = mat_exp(&scale(&y, t));
        assert!(mat_dist(&mat_mul(&etx, &h2), &mat_mul(&h2, &ety)) < 1e-10);
        assert!(mat_dist(&mat_mul(&h1, &etx), &mat_mul(&ety, &h1)) < 1e-10);
        assert!(verify_flow_identities(&rho, t).max_residual() < 1e-10);
    }
}

#[test]
fn intertwining_on_commuting_pairs() {
    let h1 = GroupElement::diagonal(0.4);
    let h2 = GroupElement::diagonal(1.1);
    let rho = Representation::new(GroupElement::IDENTITY, h1, GroupElement::IDENTITY, h2);
    assert_eq!(raw_x(&rho), raw_y(&rho));
    assert!(verify_flow_identities(&rho, 0.8).max_residual() < 1e-14);
    assert_eq!(verify_flow_identities(&rho, 0.0).max_residual(), 0.0);
}

/// Barycentric coordinates by Cramer's rule on the 4x4 affine system.
fn cramer_barycentric(vs: &[[f64; 3]; 4], x: &[f64; 3]) -> [f64; 4] {
    fn det3(m: [[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
    let edge = |p: &[f64; 3]| [p[0] - vs[0][0], p[1] - vs[0][1], p[2] - vs[0][2]];
    let cols = [edge(&vs[1]), edge(&vs[2]), edge(&vs[3])];
    let rhs = edge(x);
    let build = |replace: Option<usize>| {
        let mut m = [[0.0; 3]; 3];
        for (j, col) in cols.iter().enumerate() {
            let col = if replace == Some(j) { rhs } else { *col };
            for i in 0..3 {
                m[i][j] = col[i];
            }
        }
        m
    };
    let d = det3(build(None));
    let l1 = det3(build(Some(0))) / d;
    let l2 = det3(build(Some(1))) / d;
    let l3 = det3(build(Some(2))) / d;
    [1.0 - l1 - l2 - l3, l1, l2, l3]
}

#[test]
fn tilde_membership_agrees_with_hull_oracle() {
    let mut rng = seeded_rng(104);
    let mut inside = 0;
    for _ in 0..20_000 {
        let x = [rng.random(), rng.random(), rng.random()];
        let bary = cramer_barycentric(&TILDE_VERTICES, &x);
        let margin = bary.iter().copied().fold(f64::INFINITY, f64::min);
        if margin.abs() < 1e-6 {
            continue;
        }
        assert_eq!(tilde_delta_contains(x).is_some(), margin > 0.0, "{x:?}");
        let ours = PolytopeKind::TildeDelta.barycentric(&x);
        for i in 0..4 {
            assert!((ours[i] - bary[i]).abs() < 1e-12);
        }
        inside += (margin > 0.0) as usize;
    }
    // Δ̃ has volume 1/3 of the unit cube
    let frac = inside as f64 / 20_000.0;
    assert!((frac - 1.0 / 3.0).abs() < 0.02, "{frac}");
}

#[test]
fn std_barycentrics_agree_with_hull_oracle() {
    let mut rng = seeded_rng(105);
    for _ in 0..1000 {
        let x = [rng.random(), rng.random(), rng.random()];
        let bary = cramer_barycentric(&STD_VERTICES, &x);
        let ours = PolytopeKind::StdDelta.barycentric(&x);
        for i in 0..4 {
            assert!((ours[i] - bary[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn mu_lambda_matches_linear_solve() {
    let mut rng = seeded_rng(106);
    let s = section(&[0.3, 0.3, 0.1]).unwrap();
    for _ in 0..100 {
        let rho = act(&TorusElement::random(&mut rng), &s).unwrap();
        let mu = moment_coordinates(&rho);
        // Gaussian elimination on [[1,1,0],[0,1,1],[1,0,1]] y = mu
        let mut m = [[1.0, 1.0, 0.0, mu[0]], [0.0, 1.0, 1.0, mu[1]], [1.0, 0.0, 1.0, mu[2]]];
        for col in 0..3 {
            let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
            m.swap(col, piv);
            for r in 0..3 {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for k in 0..4 {
                        m[r][k] -= f * m[col][k];
                    }
                }
            }
        }
        let y = [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]];
        let ours = mu_lambda(&rho).unwrap().x;
        for i in 0..3 {
            assert!((ours[i] - y[i]).abs() < 1e-14);
        }
        assert_eq!(P_LAMBDA.apply(&ours).map(|v| (v * 1e12).round()), mu.map(|v| (v * 1e12).round()));
    }
}

#[test]
fn section_reproduces_trace_of_product() {
    let mut rng = seeded_rng(107);
    for _ in 0..200 {
        let x = charvar::sampler::uniform_interior_base(&mut rng);
        let a = P_LAMBDA.apply(&x);
        let rho = section(&x).unwrap();
        let prod = mat_mul(&rho.h1.matrix(), &rho.h2.matrix());
        let expected = 2.0 * (std::f64::consts::PI * a[2]).cos();
        assert!((mat_trace(&prod).re - expected).abs() < 1e-12);
    }
}

#[test]
fn kernel_signs_cancel() {
    // angle π on each circle multiplies the acted slots by −I; the left and right
    // factors on g₁ and g₂ cancel
    let s = section(&[0.25, 0.25, 0.25]).unwrap();
    let moved = act(&TorusElement::KERNEL, &s).unwrap();
    assert!(moved.tuple_distance(&s) < 1e-15);
    let half = act(&TorusElement::new(std::f64::consts::PI, std::f64::consts::PI, 0.0), &s).unwrap();
    assert!(half.g1.distance(&-s.g1) < 1e-15);
    assert!(half.g2.distance(&-s.g2) < 1e-15);
    assert_eq!((half.h1, half.h2), (s.h1, s.h2));
}

#[test]
fn reference_values() {
    // vertices of Δ̃ and their images
    let vertex_images = [[0.0, 0.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
    assert_eq!(TILDE_VERTICES, vertex_images);
    assert!(P_LAMBDA.vertex_bijection());
    // the canonical pillow point maps to the origin of the trace cube
    assert_eq!(goldman_phi(&canonical_pillow_point()), [0.0, 0.0, 0.0]);
    // ν of the coordinate lines
    let e = |i: usize| {
        let mut z = [c(0.0, 0.0); 4];
        z[i] = c(1.0, 0.0);
        z
    };
    assert_eq!(nu_p3(&e(0)).unwrap().x, [0.0, 0.0, 0.0]);
    assert_eq!(nu_p3(&e(1)).unwrap().x, [0.5, 0.0, 0.0]);
    // (J, J, J, J): tr J = 0 twice and tr J² = −2
    let j = GroupElement::weyl_j();
    let p = polytope::moment_mu(&pillow_point(j, j)).unwrap();
    assert_eq!(p.x, [0.5, 0.5, 1.0]);
    assert!(matches!(p.region, Region::Edge(_)));
    // the canonical pillow point sits at the barycenter of Δ̃
    let p = polytope::moment_mu(&canonical_pillow_point()).unwrap();
    assert_eq!(p.x, [0.5, 0.5, 0.5]);
    assert_eq!(p.region, Region::Interior);
}
