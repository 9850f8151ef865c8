//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use reeb_core::functionals::{functional_report, second_variation_entry, QuadratureGrid};
use reeb_core::sasaki_geometry::identities::{run_identity_suite, Tolerances};
use reeb_core::sasaki_geometry::{WeightedSphere, Weights};
use reeb_core::seifert_rr::{
    chern_number, dim_h1, verdict, weighted_seifert, Rational, SeifertData, Status,
};
use reeb_core::spectrum::{aggregate, solve_modes, SpectrumConfig};

const WEIGHTED: [(i64, i64); 4] = [(2, 1), (3, 2), (5, 3), (7, 4)];

/// Collects failure messages for one criterion.
#[derive(Default)]
struct Findings(Vec<String>);

impl Findings {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }
}

fn report(id: u32, title: &str, budget: Duration, run: impl FnOnce(&mut Findings)) -> bool {
    let start = Instant::now();
    let mut findings = Findings::default();
    run(&mut findings);
    let elapsed = start.elapsed();
    findings.check(elapsed < budget, || {
        format!("took {elapsed:.2?}, budget {budget:?}")
    });
    let passed = findings.0.is_empty();
    println!(
        "{} criterion {id}: {title} ({elapsed:.2?})",
        if passed { "PASS" } else { "FAIL" }
    );
    for f in &findings.0 {
        println!("    {f}");
    }
    passed
}

fn expect_dim(f: &mut Findings, name: &str, data: &SeifertData, mu: i64, want: i64) {
    match dim_h1(data, mu) {
        Ok(got) => f.check(got == want, || {
            format!("{name} mu={mu}: dim {got}, expected {want}")
        }),
        Err(e) => f.check(false, || format!("{name} mu={mu}: {e}")),
    }
}

fn riemann_roch(f: &mut Findings) {
    let sphere = SeifertData::new(-1, 0, &[]);
    let nil = SeifertData::new(-1, 1, &[]);
    for mu in 1..=10 {
        expect_dim(f, "sphere", &sphere, mu, mu - 1);
        expect_dim(f, "nil", &nil, mu, mu);
    }
    for g in [2, 3] {
        let bundle = SeifertData::new(2 * (1 - g), g, &[]);
        for mu in 1..=10 {
            expect_dim(
                f,
                "unit tangent bundle",
                &bundle,
                mu,
                (g - 1) * (2 * mu + 1),
            );
        }
    }
    let poincare = SeifertData::new(-2, 0, &[(2, 1), (3, 2), (5, 4)]);
    expect_dim(f, "poincare", &poincare, 1, 1);
    for (k, l) in WEIGHTED {
        let data = weighted_seifert(k, l).expect("valid weights");
        for mu in 1..k + l {
            expect_dim(f, "weighted", &data, mu, 0);
        }
        expect_dim(f, "weighted", &data, k + l, 1);
        let c1 = chern_number(&data);
        f.check(c1 == Rational::new(-1, k * l), || {
            format!("weighted ({k},{l}) c1 = {c1}")
        });
    }
    let chern = [
        (&sphere, Rational::from_integer(-1)),
        (&nil, Rational::from_integer(-1)),
        (&poincare, Rational::new(-1, 30)),
    ];
    for (data, want) in chern {
        let got = chern_number(data);
        f.check(got == want, || format!("c1 {got}, expected {want}"));
    }
    for g in [2, 3] {
        let got = chern_number(&SeifertData::new(2 * (1 - g), g, &[]));
        f.check(got == Rational::from_integer(2 * (1 - g)), || {
            format!("genus {g}: c1 {got}")
        });
    }
}

fn verdict_thresholds(f: &mut Findings) {
    for (k, l) in WEIGHTED.iter().copied().chain([(1, 1), (11, 6)]) {
        let data = weighted_seifert(k, l).expect("valid weights");
        let a0 = Rational::new(k + l, 2);
        let tiny = Rational::new(1, 1_000_000_007);
        let cases = [
            (a0, Status::Minimizer),
            (a0 - tiny, Status::Minimizer),
            (a0 + tiny, Status::Unstable),
        ];
        for (a, want) in cases {
            match verdict(&data, a) {
                Ok(v) => {
                    f.check(v.a0 == a0, || {
                        format!("({k},{l}): a0 {} expected {a0}", v.a0)
                    });
                    f.check(v.status == want, || {
                        format!("({k},{l}) a={a}: {:?}", v.status)
                    });
                }
                Err(e) => f.check(false, || format!("({k},{l}): {e}")),
            }
        }
    }
}

fn identity_suite(f: &mut Findings) {
    for (k, l) in [(1, 1), (2, 1), (3, 2), (5, 3)] {
        let sphere = WeightedSphere::new(Weights::new(k, l).unwrap(), 1.0).unwrap();
        let rep = run_identity_suite(&sphere, 1000, 2024, &Tolerances::default());
        for c in rep.failures() {
            f.check(false, || {
                format!(
                    "({k},{l}) {}: {:e} > {:e}",
                    c.name, c.max_deviation, c.tolerance
                )
            });
        }
        if (k, l) == (1, 1) {
            let has = |n: &str| rep.checks.iter().any(|c| c.name == n);
            f.check(has("round_eigenfunction_laplacian"), || {
                "round checks missing".into()
            });
        }
    }
}

fn functionals(f: &mut Findings) {
    let grid = QuadratureGrid::default();
    for (k, l) in [(1, 1), (2, 1), (3, 2), (5, 3)] {
        let w = Weights::new(k, l).unwrap();
        let kl = (k * l) as f64;
        let rep = match functional_report(w, 1.0, &grid) {
            Ok(r) => r,
            Err(e) => {
                f.check(false, || format!("({k},{l}): {e}"));
                continue;
            }
        };
        let vol = 2.0 * PI * PI / kl;
        f.check((rep.volume - vol).abs() / vol <= 1e-6, || {
            format!("({k},{l}) volume {}", rep.volume)
        });
        f.check((rep.hopf_q - kl).abs() <= 1e-6, || {
            format!("({k},{l}) Q {}", rep.hopf_q)
        });
        let skyrme = PI * PI / kl;
        f.check((rep.skyrme_f - skyrme).abs() <= 1e-6, || {
            format!("({k},{l}) F {}", rep.skyrme_f)
        });
        f.check((rep.skyrme_f - rep.bound_rhs).abs() <= 1e-6, || {
            format!("({k},{l}) bound {}", rep.bound_rhs)
        });
        for e in &rep.second_variation {
            f.check(e.relative_error <= 1e-4, || {
                format!("({k},{l}) second variation rel err {:e}", e.relative_error)
            });
        }
    }
    let w = Weights::new(2, 1).unwrap();
    let mut signs = Vec::new();
    for a in [21.0 / 16.0, 27.0 / 16.0] {
        match second_variation_entry(w, a, &grid) {
            Ok(e) => {
                f.check(e.relative_error <= 1e-4, || {
                    format!("a={a}: rel err {:e}", e.relative_error)
                });
                signs.push(e.value.signum());
            }
            Err(e) => f.check(false, || format!("a={a}: {e}")),
        }
    }
    f.check(signs == [1.0, -1.0], || {
        format!("second variation signs {signs:?} across a0 = 3/2")
    });
}

fn spectrum(f: &mut Findings) {
    let cfg = SpectrumConfig::default();
    let runs = [
        (1, 1, 1.0),
        (2, 1, 1.0),
        (3, 2, 1.0),
        (2, 1, 2.0),
        (3, 2, 2.0),
    ];
    for (k, l, a) in runs {
        let w = Weights::new(k, l).unwrap();
        let tag = format!("({k},{l}) a={a}");
        let solutions = match solve_modes(w, a, &cfg) {
            Ok(s) => s,
            Err(e) => {
                f.check(false, || format!("{tag}: {e}"));
                continue;
            }
        };
        for r in solutions.iter().flat_map(|s| s.results.iter()) {
            f.check(r.residual <= 1e-6, || {
                format!("{tag} mu {} residual {:e}", r.value, r.residual)
            });
            if r.value > 0.0 && !r.d_tangent {
                f.check(r.value >= 2.0 - 1e-4, || {
                    format!("{tag}: eta-carrying value {}", r.value)
                });
            }
        }
        let rep = aggregate(w, a, &cfg, &solutions);
        let near = |mu: f64| rep.cluster_near(mu, 1e-4);
        let first = rep.positive().next();
        if (k, l) == (1, 1) {
            for (mu, mult) in [(2.0, 3), (3.0, 8), (4.0, 15)] {
                let got = near(mu).map(|c| c.multiplicity);
                f.check(got == Some(mult), || {
                    format!("{tag}: cluster {mu} multiplicity {got:?}, expected {mult}")
                });
            }
            continue;
        }
        let target = (k + l) as f64 / a;
        if a == 1.0 {
            f.check(
                first.is_some_and(|c| (c.mu - 2.0).abs() <= 1e-4 && c.multiplicity == 1),
                || format!("{tag}: first positive cluster {first:?}"),
            );
        } else {
            let mu1 = rep.mu1.unwrap_or(f64::NAN);
            f.check((mu1 - target.min(2.0)).abs() <= 1e-4, || {
                format!("{tag}: mu1 {mu1}")
            });
        }
        let contact = near(target).map(|c| c.d_tangent);
        f.check(contact == Some(2), || {
            format!("{tag}: d_tangent at {target} is {contact:?}")
        });
        let mu1_d = rep.mu1_d.unwrap_or(f64::NAN);
        f.check((mu1_d - target).abs() <= 1e-4, || {
            format!("{tag}: mu1_D {mu1_d}")
        });
    }
}

fn main() -> ExitCode {
    let results = [
        report(
            1,
            "exact Riemann-Roch table",
            Duration::from_secs(1),
            riemann_roch,
        ),
        report(
            2,
            "verdict thresholds",
            Duration::from_secs(1),
            verdict_thresholds,
        ),
        report(
            3,
            "geometry identity suite",
            Duration::from_secs(30),
            identity_suite,
        ),
        report(4, "functionals", Duration::from_secs(60), functionals),
        report(5, "curl spectrum", Duration::from_secs(600), spectrum),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
