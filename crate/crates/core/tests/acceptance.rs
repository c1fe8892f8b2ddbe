//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p k3bn --test acceptance -- --nocapture` to see the table.

mod common;

use std::time::{Duration, Instant};

use k3bn::bn::DecompositionProfile;
use k3bn::cases::{am_gm, am_gm_nonnegative_sum, exhaustive_case_check, BoxReport, CaseBox};
use k3bn::cli::{self, BoxOverrides, Command, Status, SurfaceSpec, DEFAULT_DEGREE_BOUND};
use k3bn::divisor::reduce_fixed_components;
use k3bn::{DivClass, GramLattice, MukaiVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ONE_SECOND: Duration = Duration::from_secs(1);
const TEN_SECONDS: Duration = Duration::from_secs(10);
const TEN_MINUTES: Duration = Duration::from_secs(600);

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(id: u8, title: &'static str, limit: Duration, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, mut detail) = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < limit;
    if !in_time {
        detail += &format!("; over the {limit:?} limit");
    }
    Outcome { id, title, pass: ok && in_time, detail, elapsed }
}

fn spec(gram: Vec<Vec<i64>>, h: Vec<i64>) -> SurfaceSpec {
    SurfaceSpec { name: String::new(), gram, basis_names: Vec::new(), h, roots: None, asserts_nef: true }
}

fn exceptional_triples() -> (bool, String) {
    let r = cli::run(&Command::Triples { a_max: 100 });
    let got: Vec<(i64, i64, i64)> = r
        .certificates
        .iter()
        .map(|c| {
            let a = c["a"].as_array().unwrap();
            (a[0].as_i64().unwrap(), a[1].as_i64().unwrap(), a[2].as_i64().unwrap())
        })
        .collect();
    let mut want: Vec<(i64, i64, i64)> = (1..=100).map(|a| (a, 1, 1)).collect();
    want.extend([(2, 2, 1), (3, 2, 1), (4, 2, 1)]);
    let (mut g, mut w) = (got.clone(), want);
    g.sort_unstable();
    w.sort_unstable();
    (r.status == Status::Completed && g == w, format!("{} triples", got.len()))
}

fn expansion_identity() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let trials = 10_000;
    let mut failures = 0;
    for _ in 0..trials {
        let sq: Vec<i64> = (0..3).map(|_| common::random_even(&mut rng, 1000)).collect();
        let upper: Vec<i64> = (0..3).map(|_| rng.gen_range(-1000..=1000)).collect();
        let p = DecompositionProfile::from_upper(sq.clone(), &upper).unwrap();
        let (x12, x13, x23) = (upper[0], upper[1], upper[2]);
        // Four times the expansion, so every term is an integer.
        let rhs = (sq[0] + sq[1]) * sq[2] + 2 * (sq[0] + sq[1] + sq[2]) + x12 * (2 * sq[2] + 4) + 12 - 4 * x13 - 4 * x23;
        if 4 * (p.chi(&[0, 1]) * p.chi(&[2]) - p.genus()) != rhs {
            failures += 1;
        }
    }
    (failures == 0, format!("{trials} profiles, {failures} failures"))
}

fn box_summary(r: &BoxReport) -> String {
    format!(
        "box {:?}: {} instances, {} counterexamples, {} cross-checks",
        r.bounds,
        r.instances_checked,
        r.counterexample_count,
        r.cross_checks.len()
    )
}

fn box_ok(r: &BoxReport) -> bool {
    r.counterexample_count == 0 && r.passed() && r.reverify_counterexamples().is_ok()
}

fn two_part_box() -> (bool, String) {
    let b = CaseBox::default_for(2).unwrap();
    let r = exhaustive_case_check(2, &b).unwrap();
    let on_box = b == CaseBox { r_max: 12, s_min: -12, s_max: 12, eps_max: 12, x_min: -12, x_max: 40 };
    let expansion = r.cross_checks.iter().any(|c| c.name.starts_with("(r1+r2)(s1+s2)") && c.instances > 0 && c.passed());
    (on_box && expansion && box_ok(&r), box_summary(&r))
}

fn three_and_four_part_boxes() -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [3, 4] {
        let b = CaseBox::default_for(n).unwrap();
        ok &= b == CaseBox { r_max: 8, s_min: -8, s_max: 8, eps_max: 8, x_min: -8, x_max: 24 };
        let r = exhaustive_case_check(n, &b).unwrap();
        ok &= r.two_connected_enforced && box_ok(&r);
        if n == 4 {
            for key in ["4*4 = 16", "8*3 = 24"] {
                ok &= r.cross_checks.iter().any(|c| c.name.contains(key) && c.instances > 0 && c.passed());
            }
        }
        detail.push(format!("n={n} {}", box_summary(&r)));
    }
    (ok, detail.join("; "))
}

fn hyperbolic_violations() -> (bool, String) {
    let mut ok = true;
    for k in 1..=10i64 {
        let r = cli::run(&Command::BnCheck { spec: spec(vec![vec![0, 1], vec![1, 0]], vec![1, k]), degree_bound: DEFAULT_DEGREE_BOUND });
        let Some(c) = r.certificates.first() else {
            ok = false;
            continue;
        };
        let mut lb = [c["lb1"].as_i64().unwrap(), c["lb2"].as_i64().unwrap()];
        lb.sort_unstable();
        let g = c["g"].as_i64().unwrap();
        ok &= r.exit_code == 10 && lb == [2.min(k + 1), 2.max(k + 1)] && g == k + 1 && lb[0] * lb[1] > g;
    }
    (ok, "k = 1..10".into())
}

fn rank_one() -> (bool, String) {
    let ok = (2..=11i64).all(|g| {
        let r = cli::run(&Command::BnCheck { spec: spec(vec![vec![2 * g - 2]], vec![1]), degree_bound: DEFAULT_DEGREE_BOUND });
        r.exit_code == 0 && r.certificates.is_empty()
    });
    (ok, "g = 2..11".into())
}

fn reductions() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut valid, mut failures, mut draws) = (0, 0, 0);
    while valid < 1000 && draws < 100_000 {
        draws += 1;
        let Some(input) = common::reduction_input(&mut rng) else { continue };
        let Ok(out) = reduce_fixed_components(&input.lattice, &input.h, &input.parts, &input.delta) else { continue };
        valid += 1;
        let rank = input.lattice.rank();
        let sum_ok = &DivClass::sum(rank, &out.parts) == input.h.class();
        let squares_ok = input
            .parts
            .iter()
            .zip(&out.parts)
            .all(|(a, b)| input.lattice.square(b).unwrap() >= input.lattice.square(a).unwrap());
        if !(sum_ok && squares_ok) {
            failures += 1;
        }
    }
    (valid >= 1000 && failures == 0, format!("{valid} valid inputs, {failures} failures"))
}

struct AmGmScan {
    basic_failures: u64,
    strict_failures: u64,
    first_basic: Option<(i64, i64, i64)>,
    basic_failures_with_nonnegative_sum: u64,
    repaired_failures: u64,
}

fn scan_am_gm() -> AmGmScan {
    let mut s = AmGmScan { basic_failures: 0, strict_failures: 0, first_basic: None, basic_failures_with_nonnegative_sum: 0, repaired_failures: 0 };
    for u in -50..=50 {
        for v in -50..=50 {
            for c in -50..=50 {
                let r = am_gm(u, v, c);
                if !r.basic {
                    s.basic_failures += 1;
                    s.first_basic.get_or_insert((u, v, c));
                    if u + v >= 0 {
                        s.basic_failures_with_nonnegative_sum += 1;
                    }
                }
                if !r.strict {
                    s.strict_failures += 1;
                }
                if !am_gm_nonnegative_sum(u, v, c) {
                    s.repaired_failures += 1;
                }
            }
        }
    }
    s
}

fn mukai() -> (bool, String) {
    let u = GramLattice::hyperbolic_plane();
    let mut ok = {
        let v = MukaiVector::new(1, DivClass::zero(2), 1);
        v.pairing(&u, &v).unwrap() == -2
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0;
    for _ in 0..10_000 {
        let (a, b) = (rng.gen_range(-30..=30), rng.gen_range(-30..=30));
        let (r, s) = (rng.gen_range(-30..=30), rng.gen_range(-30..=30));
        let v = MukaiVector::new(r, DivClass::new(vec![a, b]), s);
        // Independent: c1² = 2ab in U, so (v, v) = 2ab - 2rs.
        let vv = 2 * a * b - 2 * r * s;
        if v.pairing(&u, &v).unwrap() != vv || v.simple_bound_holds(&u).unwrap() != (vv >= -2) {
            failures += 1;
        }
    }
    ok &= failures == 0;
    (ok, format!("10000 vectors, {failures} failures"))
}

#[test]
fn acceptance() {
    let mut outcomes = vec![
        timed(1, "exceptional triples for a_max = 100", ONE_SECOND, exceptional_triples),
        timed(2, "three-part expansion identity", ONE_SECOND, expansion_identity),
        timed(3, "n = 2 default box", TEN_SECONDS, two_part_box),
    ];
    outcomes.push(timed(4, "n = 3 and n = 4 default boxes", TEN_MINUTES, three_and_four_part_boxes));
    outcomes.push(timed(5, "hyperbolic plane violations", ONE_SECOND, hyperbolic_violations));
    outcomes.push(timed(6, "rank one has no decomposition", ONE_SECOND, rank_one));
    outcomes.push(timed(7, "fixed-component reduction", TEN_SECONDS, reductions));
    let mut scan = None;
    outcomes.push(timed(8, "AM-GM brute force", ONE_SECOND, || {
        let s = scan_am_gm();
        let detail = format!(
            "basic failures {} (first {:?}), strict failures {}, nonnegative-sum form failures {}",
            s.basic_failures, s.first_basic, s.strict_failures, s.repaired_failures
        );
        let ok = s.basic_failures == 0 && s.strict_failures == 0;
        scan = Some(s);
        (ok, detail)
    }));
    outcomes.push(timed(9, "Mukai arithmetic", ONE_SECOND, mukai));

    for o in &outcomes {
        println!(
            "criterion {}: {} {} ({}; {:.3}s)",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.title,
            o.detail,
            o.elapsed.as_secs_f64()
        );
    }

    let unexpected: Vec<u8> = outcomes.iter().filter(|o| !o.pass && o.id != 8).map(|o| o.id).collect();
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");

    // The first implication is false over the integers once u + v < 0
    // (u = v = -20, c = -5 gives 400 > 25). The expected state is:
    // strict branch clean, every basic failure has u + v < 0, and the
    // nonnegative-sum form clean.
    let s = scan.unwrap();
    assert!(!outcomes[7].pass);
    assert!(s.basic_failures > 0);
    assert_eq!(s.strict_failures, 0);
    assert_eq!(s.basic_failures_with_nonnegative_sum, 0);
    assert_eq!(s.repaired_failures, 0);
    let r = am_gm(-20, -20, -5);
    assert!(!r.basic);
}

#[test]
fn verify_cases_echoes_the_box() {
    let r = cli::run(&Command::VerifyCases { n: 2, overrides: BoxOverrides { r_max: Some(3), ..BoxOverrides::default() } });
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.bounds["r_max"], 3);
    assert_eq!(r.bounds["x_max"], 40);
}
