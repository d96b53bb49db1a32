//! Acceptance criteria 1-9 at full sample counts.
//!
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use charvar::verify::{self, CheckResult, Suite};
use charvar::DEFAULT_TOLERANCES;

const SEED: u64 = 20240601;

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<CheckResult>,
    /// `(label, value, bound)` with the requirement `value < bound`
    bounds: Vec<(&'static str, f64, f64)>,
    extra: Vec<(&'static str, bool)>,
}

impl Criterion {
    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed() && c.indeterminate == 0)
            && self.bounds.iter().all(|(_, v, b)| v < b)
            && self.extra.iter().all(|(_, ok)| *ok)
    }

    fn print(&self, elapsed: f64) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut parts: Vec<String> = self
            .checks
            .iter()
            .map(|c| format!("{} {}/{} failures", c.name, c.failures, c.trials))
            .collect();
        parts.extend(self.bounds.iter().map(|(l, v, b)| format!("{l} {v:.3e} < {b:.0e}")));
        parts.extend(self.extra.iter().map(|(l, ok)| format!("{l} {ok}")));
        println!(
            "criterion {} [{}]: {status} ({}; {elapsed:.1}s)",
            self.id,
            self.title,
            parts.join(", ")
        );
        if !self.passed() {
            for c in &self.checks {
                for v in &c.violations {
                    println!("    {}: {v}", c.name);
                }
            }
        }
    }
}

fn max_of(c: &CheckResult) -> f64 {
    c.max_residual
}

fn main() -> ExitCode {
    let tol = DEFAULT_TOLERANCES;
    let mut all_passed = true;
    let mut run = |f: &dyn Fn() -> Criterion| {
        let start = Instant::now();
        let c = f();
        c.print(start.elapsed().as_secs_f64());
        all_passed &= c.passed();
    };

    run(&|| {
        let c = verify::check_relation_preservation(100_000, SEED, &tol);
        Criterion {
            id: 1,
            title: "relation preserved by the torus action",
            bounds: vec![("max residual", max_of(&c), 1e-9)],
            checks: vec![c],
            extra: vec![],
        }
    });

    run(&|| {
        let c = verify::check_intertwining(10_000, SEED, &tol);
        Criterion {
            id: 2,
            title: "intertwining identities",
            bounds: vec![("max residual", max_of(&c), 1e-10)],
            checks: vec![c],
            extra: vec![],
        }
    });

    run(&|| {
        let inside = verify::check_tilde_membership(100_000, SEED, &tol);
        let boundary = verify::check_boundary_commutation(10_000, SEED, &tol);
        Criterion {
            id: 3,
            title: "trace image is the tetrahedron",
            bounds: vec![],
            extra: vec![("membership tolerance 1e-9", tol.poly <= 1e-9)],
            checks: vec![inside, boundary],
        }
    });

    run(&|| {
        let vertices = verify::check_vertex_bijection();
        let interior = verify::check_mu_lambda_interior(10_000, SEED, &tol);
        let round = verify::check_section_round_trip(1_000, SEED, &tol);
        Criterion {
            id: 4,
            title: "moment image and quotient",
            bounds: vec![("section round trip", max_of(&round), 1e-7)],
            checks: vec![vertices, interior, round],
            extra: vec![],
        }
    });

    run(&|| {
        let kernel = verify::check_kernel_fixes(1_000, SEED, &tol);
        let free = verify::check_freeness(1_000, SEED, &tol);
        Criterion {
            id: 5,
            title: "kernel and freeness",
            bounds: vec![("kernel tuple distance", max_of(&kernel), 1e-12)],
            checks: vec![kernel, free],
            extra: vec![],
        }
    });

    run(&|| {
        let inv = verify::check_tau_involution(1_000, SEED, &tol);
        let mu = verify::check_tau_moment(1_000, SEED, &tol);
        let compat = verify::check_tau_compatibility(1_000, SEED, &tol);
        Criterion {
            id: 6,
            title: "tau suite",
            bounds: vec![("mu_lambda drift", max_of(&mu), 1e-7)],
            checks: vec![inv, mu, compat],
            extra: vec![],
        }
    });

    run(&|| {
        Criterion {
            id: 7,
            title: "sigma suite",
            checks: vec![
                verify::check_pillow_fixed(1_000, SEED, &tol),
                verify::check_canonical_point(),
                verify::check_rp2_antipodes(100, SEED, &tol),
                verify::check_rp2_distinct(100, SEED, &tol),
                verify::check_intervals(100, SEED, &tol),
                verify::check_central_vertices(&tol),
            ],
            bounds: vec![],
            extra: vec![],
        }
    });

    run(&|| {
        let c = verify::check_density(1_000, SEED, &tol);
        Criterion {
            id: 8,
            title: "density witnesses",
            bounds: vec![("distance at t=1e-4", max_of(&c), 1e-3)],
            checks: vec![c],
            extra: vec![],
        }
    });

    run(&|| {
        let report = verify::run_suite(Suite::Polytope, 100, SEED, &tol);
        let noted = report.notes.iter().any(|n| n.contains("factor of 2"));
        Criterion {
            id: 9,
            title: "nu normalization note in the verify report",
            checks: vec![],
            bounds: vec![],
            extra: vec![("note present", noted), ("polytope suite clean", report.passed())],
        }
    });

    if all_passed {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
