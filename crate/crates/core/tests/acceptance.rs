//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use rrw::coupling::{violation_sweep, CouplingSpec};
use rrw::criteria::{classify, solomon_check, Rule, Verdict};
use rrw::drift::{clt_check, drift_parts_profile, estimate_delta_inf, DriftConfig, Regime};
use rrw::rng;
use rrw::stats::MeanSe;
use rrw::transition::{find_threshold, sweep, Axis, SearchBudget, Side, ThresholdStatus};
use rrw::urn::{exact_drift, exact_urn_dp, UrnProcess, UrnState};
use rrw::walk::{drift_equation, exact_walk_oracle, simulate_walk, EnvironmentSpec, WalkOptions};
use rrw::ReinforcementFunction;

type Outcome = (bool, String);
type Criterion = Box<dyn Fn() -> Outcome>;

fn init() -> UrnState {
    UrnState::new(0.5, 2.0).unwrap()
}

fn env() -> EnvironmentSpec {
    EnvironmentSpec::homogeneous(init())
}

fn f(src: &str) -> ReinforcementFunction {
    ReinforcementFunction::parse(src).unwrap()
}

const BUILTINS: [&str; 7] =
    ["const(0.5)", "const(0.7)", "linear(0.4)", "polya", "quartic(2)", "mix", "family(quartic(2), 3.5)"];
const TEST_FUNCTIONS: [&str; 5] = ["const(0.5)", "linear(0.4)", "polya", "quartic(2)", "mix"];

fn urn_oracle() -> Outcome {
    let n = 200;
    let reps = 100_000;
    let mut worst: f64 = 0.0;
    for (i, src) in BUILTINS.iter().enumerate() {
        let g = f(src);
        let law = exact_urn_dp(&g, init(), n).unwrap();
        let exact_alpha = law.expect(n, |a| a);
        let exact_delta = exact_drift(&g, init(), n).unwrap().mean[n];
        let runs: Vec<(f64, f64)> = rng::replicate(1000 + i as u64, reps, |_, r| {
            let mut urn = UrnProcess::new(init());
            let mut delta = 0.0;
            for _ in 0..n {
                let p = g.eval(urn.alpha());
                delta += 2.0 * p - 1.0;
                urn.record(rng::uniform(r) < p);
            }
            delta += 2.0 * g.eval(urn.alpha()) - 1.0;
            (urn.alpha(), delta)
        });
        let a = MeanSe::of(&runs.iter().map(|r| r.0).collect::<Vec<_>>());
        let d = MeanSe::of(&runs.iter().map(|r| r.1).collect::<Vec<_>>());
        for (m, exact) in [(a, exact_alpha), (d, exact_delta)] {
            let scale = m.stderr.max(1e-9 * exact.abs().max(1.0));
            let z = (m.mean - exact).abs() / scale;
            worst = worst.max(z);
        }
    }
    (worst <= 4.0, format!("max deviation {worst:.2} stderr over {} functions", BUILTINS.len()))
}

fn polya_uniform() -> Outcome {
    let law = exact_urn_dp(&ReinforcementFunction::polya(), init(), 50).unwrap();
    let err = law.row(50).iter().map(|p| (p - 1.0 / 51.0).abs()).fold(0.0, f64::max);
    (err < 1e-10, format!("max |P(50,k) - 1/51| = {err:.2e}"))
}

fn drift_equation_check() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for (i, src) in ["const(0.5)", "const(0.75)", "quartic(2)"].iter().enumerate() {
        for a in 1..=3 {
            let r = drift_equation(&f(src), env(), a, 100_000, 30 + 10 * i as u64 + a as u64, None, None).unwrap();
            worst = worst.max(r.z_score());
            if r.capped > 0 {
                details.push(format!("{src} a={a} capped {}", r.capped));
            }
        }
    }
    (worst <= 3.0 && details.is_empty(), format!("max |residual| = {worst:.2} combined stderr {}", details.join(", ")))
}

fn martingale() -> Outcome {
    let mut worst: f64 = 0.0;
    for src in TEST_FUNCTIONS {
        let r = exact_walk_oracle(&f(src), env(), 12).unwrap();
        worst = r.mplus_mean.iter().fold(worst, |w, m| w.max(m.abs()));
    }
    (worst <= 1e-10, format!("max |E[M+_m]| = {worst:.2e}, m <= 12"))
}

fn pathwise_identity() -> Outcome {
    let paths = 1000;
    let bad: Vec<usize> = rng::replicate(5, paths, |i, _| {
        let g = f(TEST_FUNCTIONS[i % TEST_FUNCTIONS.len()]);
        let rec = simulate_walk(&g, env(), WalkOptions::horizon(10_000), 5, i as u64).unwrap();
        let s = rec.series.unwrap();
        (0..s.x.len()).filter(|&k| s.xplus[k] != s.x[k].max(0) - s.u[k] as i64).count()
    });
    let total: usize = bad.iter().sum();
    (total == 0, format!("{total} violations over {paths} paths x 10^4 steps"))
}

fn clt(src: &str, target: f64, tol: f64, seed: u64) -> Outcome {
    let r = clt_check(&f(src), 0.5, init(), 10_000, 10_000, seed).unwrap();
    let rel = (r.empirical_variance / target - 1.0).abs();
    (
        rel <= tol,
        format!(
            "{src}: variance {:.4} vs {target} ({:.1}% off, limit {:.0}%; exact finite-n {:.4})",
            r.empirical_variance,
            100.0 * rel,
            100.0 * tol,
            r.exact_variance.unwrap_or(f64::NAN)
        ),
    )
}

fn coupling(spec: CouplingSpec, seed: u64) -> Outcome {
    let s = violation_sweep(&spec, 10_000, 1000, seed).unwrap();
    (
        s.total_violations == 0,
        format!(
            "{:?}: {} violations in {} of {} streams x 10^4 steps",
            s.kind, s.total_violations, s.violating_streams, s.streams
        ),
    )
}

fn parts_linear() -> Outcome {
    let p = drift_parts_profile(&f("linear(0.4)"), init(), 10_000, 1000, 81).unwrap();
    let ok = |e: Option<f64>| e.is_some_and(|e| (0.4..=0.6).contains(&e));
    (
        ok(p.pos_growth_exponent) && ok(p.neg_growth_exponent),
        format!("linear(0.4) growth exponents {:?} / {:?}", p.pos_growth_exponent, p.neg_growth_exponent),
    )
}

fn parts_mix() -> Outcome {
    let p = drift_parts_profile(&f("mix"), init(), 10_000, 1000, 82).unwrap();
    (p.neg_cauchy && p.pos_growing, format!("mix: negative part Cauchy {}, positive part growing {}", p.neg_cauchy, p.pos_growing))
}

fn parts_quartic() -> Outcome {
    let g = f("quartic(2)");
    let p = drift_parts_profile(&g, init(), 10_000, 1000, 83).unwrap();
    let est = estimate_delta_inf(&g, init(), &DriftConfig { seed: 84, ..Default::default() }).unwrap();
    let exp = est.tail.as_ref().map_or(f64::NAN, |t| t.fitted_exponent);
    let converge = p.pos_cauchy && p.neg_cauchy;
    (
        converge && (0.3..=0.7).contains(&exp),
        format!("quartic(2): checkpoints Cauchy {converge}, tail-fit exponent {exp:.3} (needs [0.3, 0.7])"),
    )
}

fn verdicts() -> Outcome {
    let budget = DriftConfig { seed: 91, ..Default::default() };
    let run = || -> Vec<(Verdict, Rule)> {
        ["const(0.5)", "const(0.7)", "mix", "linear(0.4)"]
            .iter()
            .map(|s| {
                let v = classify(&f(s), env(), &budget).unwrap();
                (v.verdict, v.rule)
            })
            .collect()
    };
    let first = run();
    let expected = [
        (Verdict::Recurrent, Rule::Theorem1),
        (Verdict::Transient, Rule::Theorem2),
        (Verdict::Transient, Rule::Theorem2Corollary),
        (Verdict::Inconclusive, Rule::None),
    ];
    let lin = classify(&f("linear(0.4)"), env(), &budget).unwrap();
    let audited = lin.audit.iter().any(|a| !a.ok);
    let repeat = run();
    (
        first == expected && audited && repeat == first,
        format!("{first:?}; linear(0.4) audit lists {} failed hypotheses", lin.audit.iter().filter(|a| !a.ok).count()),
    )
}

fn solomon() -> Outcome {
    let id = ReinforcementFunction::polya();
    let b = solomon_check(&id, UrnState::new(0.6, 5.0).unwrap(), 100_000, 400, 101).unwrap();
    let s = solomon_check(&id, UrnState::new(0.5, 4.0).unwrap(), 100_000, 400, 102).unwrap();
    let zb = (b.mc_mean.unwrap() - 0.5).abs() / b.mc_stderr.unwrap();
    let zs = s.mc_mean.unwrap().abs() / s.mc_stderr.unwrap();
    (
        (b.criterion - 0.5).abs() < 1e-12 && zb <= 3.0 && s.criterion.abs() < 1e-12 && zs <= 3.0,
        format!("Beta(3,2): {:.15} (MC {zb:.2} se); symmetric: {:.1e} (MC {zs:.2} se)", b.criterion, s.criterion),
    )
}

fn phase_transitions() -> Outcome {
    let base = f("quartic(2)");
    let budget = SearchBudget::default();
    let mut ok = true;
    let mut msg = Vec::new();
    for (axis, range) in [(Axis::U { l: 1.0 }, (0.1, 64.0)), (Axis::L { u: 3.5 }, (0.25, 8.0))] {
        let r = find_threshold(axis, &base, range, 1.0, &budget).unwrap();
        let cleared = r.est_lo.side != Side::Unresolved && r.est_hi.side != Side::Unresolved;
        let narrow = r.width() <= 0.1 * r.midpoint();
        ok &= r.status == ThresholdStatus::Bracketed && cleared && narrow;
        msg.push(format!("{}: {:?} [{:.4}, {:.4}]", axis.name(), r.status, r.lo, r.hi));
    }
    let grid = [0.5, 1.0, 2.0, 4.0, 8.0];
    for axis in [Axis::U { l: 1.0 }, Axis::L { u: 3.5 }] {
        let c = sweep(axis, &base, &grid, &budget.drift).unwrap();
        ok &= c.flags.is_empty();
        msg.push(format!("{}-sweep flags {}", axis.name(), c.flags.len()));
    }
    // The l-sweep must span both sides of 1.
    let c = sweep(Axis::L { u: 3.5 }, &base, &[0.25, 8.0], &budget.drift).unwrap();
    let v: Vec<f64> = c.rows.iter().map(|r| r.mean.finite().unwrap_or(f64::NAN)).collect();
    ok &= v[0] > 1.0 && v[1] < 1.0 && c.rows.iter().all(|r| r.regime == Regime::ConvergentFinite);
    msg.push(format!("l-sweep ends {:.3} / {:.3}", v[0], v[1]));
    (ok, msg.join("; "))
}

fn cli_commands() -> Vec<Vec<&'static str>> {
    let v = |s: &'static str| s.split(' ').collect::<Vec<_>>();
    vec![
        v("analyze --f mix"),
        v("urn --f quartic(2) --N 200"),
        v("urn --f quartic(2) --N 100 --exact"),
        v("drift estimate --f quartic(2) --N-dp 1000 --N 5000 --replicas 64"),
        v("drift profile --f mix --N 1000 --replicas 64"),
        v("drift clt --f linear(0.2) --N 1000 --replicas 256"),
        v("walk simulate --f mix --N 2000"),
        v("walk functionals --f quartic(2) --a 2 --replicas 256"),
        v("walk oracle --f mix --h 8"),
        v("walk regime --f const(0.5) --N 2000 --replicas 64 --burn-in 100"),
        v("couple --kind offcenter --f quartic(2) --alpha 0.75 --l 2 --N 500"),
        v("couple --kind function-order --f const(0.5) --g quartic(2) --N 500 --streams 16"),
        v("couple --kind mass-order --f quartic(2) --l0 1 --l1 2 --N 500"),
        v("classify --f const(0.5) --env w:0.5,2 --N-dp 1000 --N 4000 --replicas 64"),
        v("classify --f quartic(2) --env w:0.5,2 --N-dp 1000 --N 4000 --replicas 64"),
        v("solomon --alpha0 0.6 --l0 5 --N 2000 --replicas 128"),
        v("threshold --axis u --f quartic(2) --lo 0.5 --hi 16 --N-dp 1000 --N 2000 --replicas 32 --rel-tol 0.2"),
        v("sweep --axis l --u 3.5 --f quartic(2) --N-dp 1000 --N 2000 --replicas 32"),
    ]
}

fn byte_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_rrw");
    let mut mismatches = Vec::new();
    for args in cli_commands() {
        let run = |threads: &str| {
            let out = Command::new(exe).args(&args).args(["--seed", "17"]).env("RRW_THREADS", threads).output().unwrap();
            (out.status.code(), out.stdout)
        };
        let (a, b, c) = (run("1"), run("4"), run("4"));
        if a.0 != Some(0) || a != b || b != c {
            mismatches.push(args.join(" "));
        }
    }
    let n = cli_commands().len();
    (mismatches.is_empty(), format!("{} of {n} commands identical under RRW_THREADS 1/4 {mismatches:?}", n - mismatches.len()))
}

fn main() {
    let q = || f("quartic(2)");
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 urn oracle equivalence", Box::new(urn_oracle)),
        ("2 polya uniformity", Box::new(polya_uniform)),
        ("3 drift equation", Box::new(drift_equation_check)),
        ("4 martingale exactness", Box::new(martingale)),
        ("5 pathwise identity", Box::new(pathwise_identity)),
        ("6a CLT const(0.5)", Box::new(|| clt("const(0.5)", 0.25, 0.05, 61))),
        ("6b CLT linear(0.4)", Box::new(|| clt("linear(0.4)", 1.25, 0.10, 62))),
        (
            "7a coupling function order",
            Box::new(move || coupling(CouplingSpec::FunctionOrder { f: f("const(0.5)"), g: q(), init: init() }, 71)),
        ),
        ("7b coupling off-center", Box::new(move || coupling(CouplingSpec::OffCenter { f: q(), alpha: 0.75, l: 2.0 }, 72))),
        ("7c coupling mass order", Box::new(move || coupling(CouplingSpec::MassOrder { f: q(), l0: 1.0, l1: 2.0 }, 73))),
        ("8a drift parts linear(0.4)", Box::new(parts_linear)),
        ("8b drift parts mix", Box::new(parts_mix)),
        ("8c drift parts quartic(2)", Box::new(parts_quartic)),
        ("9 classifier verdicts", Box::new(verdicts)),
        ("10 solomon closed form", Box::new(solomon)),
        ("11 phase transitions", Box::new(phase_transitions)),
        ("12 byte determinism", Box::new(byte_determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let t = Instant::now();
        let (ok, detail) = check();
        let secs = t.elapsed().as_secs_f64();
        println!("{} {name}: {detail} [{secs:.1}s]", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
