//! The ten acceptance criteria, each printed as one PASS/FAIL line.
//! Runs without the libtest harness so the lines always reach stdout.

use std::process::Command;
use std::time::{Duration, Instant};

use renorm_core::cantorspace::{
    odometer_act, odometer_fixture, odometer_sc_parts, subshift_certificate, verify_cover_identities,
    verify_cover_identities_with, Method, Partition,
};
use renorm_core::l1space::{
    apply_iso, apply_word, f2_certificate, f2_counterexample, find_np, fundamental_domain_action, l1_norm, pn_defects,
    GroupSpec, StepFn,
};
use renorm_core::linear::Vector;
use renorm_core::numerics::{int, parse_rational, pow2, rat, Precision, Rational};
use renorm_core::renormkit::{check_obstruction, ObstructionVerdict, Sampler, Verdict};
use renorm_core::seqspace::{act_c, sorted_sc_parts, sorting_element, weighted_parts, CSeq, IsoCElem, Sign};
use renormlab::{run_scenario, ScenarioConfig, ScenarioReport};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn scenario(name: &str) -> ScenarioReport {
    run_scenario(name, &ScenarioConfig::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn abs_integral(f: &StepFn) -> Rational {
    // independent of l1_norm: sum |v|·(b − a) over the raw pieces
    f.pieces().map(|(a, b, v)| (b - a) * if *v < int(0) { -v } else { v.clone() }).sum()
}

fn radius_at_most(s: &str, bound: &Rational) -> bool {
    parse_rational(s).map(|r| &r <= bound).unwrap_or(false)
}

fn c1_f2_obstruction() -> Outcome {
    let t = Instant::now();
    let cert = f2_certificate();
    let (t1, t2) = f2_counterexample();
    let x = StepFn::indicator(&int(0), &rat(1, 3));
    let y = StepFn::indicator(&rat(1, 3), &rat(2, 3));
    let half = StepFn::indicator_scaled(&int(0), &rat(2, 3), rat(1, 2));
    let valid = check_obstruction(&cert) == ObstructionVerdict::Valid;
    let eqs = cert.x == x
        && cert.y == y
        && apply_iso(&t2, &x) == y
        && apply_iso(&t1, &x) == half
        && x.midpoint(&y) == half
        && half.eval(&rat(1, 2)) == rat(1, 2)
        && half.eval(&rat(2, 3)) == int(0);
    let dt = t.elapsed();
    (valid && eqs && dt < Duration::from_secs(1), format!("valid={valid} equalities={eqs} time={dt:?}"))
}

fn c2_l1_words() -> Outcome {
    let mut s = Sampler::new(42);
    let (t1, t2) = f2_counterexample();
    let words: Vec<_> = (0..200).map(|_| s.free_word(2, 8)).collect();
    let fs: Vec<_> = (0..20).map(|_| s.step_fn(6)).collect();
    let mut bad = 0;
    for w in &words {
        for f in &fs {
            let g = apply_word(w, &t1, &t2, f);
            if abs_integral(&g) != abs_integral(f) || l1_norm(&g) != l1_norm(f) {
                bad += 1;
            }
        }
    }
    let reduced = words.iter().all(|w| w.len() <= 8 && w.letters().windows(2).all(|p| p[0] != p[1].inv()));
    (bad == 0 && reduced, format!("{} pairs, {bad} mismatches, reduced={reduced}", words.len() * fs.len()))
}

fn c3_subshift() -> Outcome {
    let t = Instant::now();
    let good = verify_cover_identities(32);
    let methods = good.checks.iter().any(|c| c.method == Method::Exhaustive) && good.checks.iter().any(|c| c.method == Method::Symbolic);
    let bad = verify_cover_identities_with(&Partition::swapped_de(), 32);
    let bad_witnessed = !bad.all_pass() && bad.failures().all(|c| c.witness.is_some());
    let valid = check_obstruction(&subshift_certificate()) == ObstructionVerdict::Valid;
    let mut c = subshift_certificate();
    c.h_word = "aa".parse().unwrap();
    let power2 = matches!(check_obstruction(&c), ObstructionVerdict::Invalid { ref reason } if !reason.is_empty());
    let dt = t.elapsed();
    let ok = good.all_pass() && methods && bad_witnessed && valid && power2 && dt < Duration::from_secs(1);
    (ok, format!("cover={} both_methods={methods} mutated_fails={bad_witnessed} cert={valid} σ²_rejected={power2} time={dt:?}", good.all_pass()))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n);
            out.push(q);
        }
    }
    out
}

fn c4_sorted_invariance() -> Outcome {
    let mut s = Sampler::new(42);
    let (mut bad_inv, mut bad_sup) = (0, 0);
    for _ in 0..1000 {
        let x = s.c0_seq(16);
        let g = s.iso_c_elem(16, true);
        let gx = act_c(&g, &x);
        let (a, b) = (sorted_sc_parts(&x).unwrap(), sorted_sc_parts(&gx).unwrap());
        if a != b {
            bad_inv += 1;
        }
        let best = weighted_parts(&act_c(&sorting_element(&x), &x)).unwrap().1;
        if weighted_parts(&gx).unwrap().1 > best || best != a.1 {
            bad_sup += 1;
        }
    }
    // brute force over all permutations for short prefixes
    let mut bad_brute = 0;
    for _ in 0..40 {
        let x = s.c0_seq(5);
        let n = x.prefix().len();
        let best = permutations(n)
            .into_iter()
            .map(|p| weighted_parts(&act_c(&IsoCElem::from_images(&p, [], Sign::Plus).unwrap(), &x)).unwrap().1)
            .max()
            .unwrap();
        if best != sorted_sc_parts(&x).unwrap().1 {
            bad_brute += 1;
        }
    }
    (bad_inv + bad_sup + bad_brute == 0, format!("1000 trials: {bad_inv} radicand mismatches, {bad_sup} sup violations, {bad_brute} brute-force mismatches"))
}

fn c5_strict_convexity() -> Outcome {
    let r = scenario("c0-strict-convexity");
    let v: Vec<_> = r.reports.iter().map(|x| (x.verdict, x.trials)).collect();
    let ok = v.len() == 5
        && v[..4].iter().all(|&(d, t)| d == Verdict::Pass && t == 500)
        && v[4].0 == Verdict::Fail
        && r.expectations_met;
    let x = StepFn::indicator(&int(0), &rat(1, 2));
    let y = StepFn::indicator(&rat(1, 2), &int(1));
    let exact = abs_integral(&x.add(&y)) == abs_integral(&x) + abs_integral(&y);
    (ok && exact, format!("{v:?}, ℓ₁ 2 = 1 + 1: {exact}"))
}

fn c6_pn() -> Outcome {
    let r = scenario("pn-convergence");
    let act = fundamental_domain_action(GroupSpec::Int).unwrap();
    let f = StepFn::from_pieces(vec![(int(0), rat(1, 4), int(1)), (rat(1, 4), rat(1, 2), int(-1))]);
    let c = find_np(&act, &f, &rat(1, 2), Precision::bits(64)).unwrap();
    let certified = c.n == 2 && c.p > int(1) && c.value.lo() >= abs_integral(&f) / int(2);
    let sched: Vec<(u32, u64)> = [1, 2, 4, 8, 16].iter().map(|&k| (k, k as u64)).collect();
    let d = pn_defects(&act, &f, &sched).unwrap();
    let monotone = d.len() == 5 && d.windows(2).all(|w| w[1].defect <= w[0].defect) && d.iter().all(|x| x.tail_bound <= x.defect);
    let ok = r.expectations_met && r.reports.iter().all(|x| x.verdict == Verdict::Pass) && certified && monotone;
    (ok, format!("equivariance={} (n,p)=({}, {}) certified={certified} defects_nonincreasing={monotone}", r.expectations_met, c.n, c.p))
}

fn c7_odometer() -> Outcome {
    let fixture = odometer_fixture();
    let exhaustive = fixture.len() == 64 && fixture.iter().all(|f| odometer_sc_parts(&odometer_act(f)) == odometer_sc_parts(f));
    let r = scenario("odometer-invariance");
    let inv = &r.reports[0];
    let ok = exhaustive && inv.verdict == Verdict::Pass && inv.max_radius == "0" && inv.trials >= 2 * 264 && r.expectations_met;
    (ok, format!("fixture={} exhaustive={exhaustive} scenario trials={} radius={}", fixture.len(), inv.trials, inv.max_radius))
}

fn c8_epsilon_close() -> Outcome {
    let r = scenario("epsilon-close-bounds");
    let eq: Vec<_> = r.reports.iter().filter(|x| x.check == "equivalence").collect();
    let ok = eq.len() == 9 && eq.iter().all(|x| x.verdict == Verdict::Pass && x.trials == 200) && r.expectations_met;
    (ok, format!("{} equivalence reports over ε ∈ {{1/2, 1/4, 1/10}} × {{ℝ², c₀, L₁}}", eq.len()))
}

fn c9_audit() -> Outcome {
    let r = scenario("c-renorm-audit");
    let (eqv, inv) = (&r.reports[0], &r.reports[1]);
    let apart = radius_at_most(&inv.max_radius, &pow2(-64));
    let g = IsoCElem::from_images(&[1], [1], Sign::Plus).unwrap();
    let gx = act_c(&g, &CSeq::constant(int(1)));
    let witness = gx.prefix() == [int(-1)];
    let ok = eqv.verdict == Verdict::Fail && inv.verdict == Verdict::Fail && apart && witness && r.exit_code() == 0;
    (ok, format!("equivariance={:?} invariance={:?} radius={} exit={}", eqv.verdict, inv.verdict, inv.max_radius, r.exit_code()))
}

fn c10_determinism() -> Outcome {
    let run = || {
        let t = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_renormlab")).args(["verify-all", "--seed", "42"]).output().unwrap();
        (out, t.elapsed())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let ok = same && a.status.success() && b.status.success() && ta.max(tb) < Duration::from_secs(60);
    (ok, format!("identical={same} bytes={} exit={:?} times={ta:?}, {tb:?}", a.stdout.len(), a.status.code()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("F₂ obstruction on L₁", c1_f2_obstruction),
        ("L₁ word isometries", c2_l1_words),
        ("subshift certificate", c3_subshift),
        ("sorted-norm invariance", c4_sorted_invariance),
        ("strict convexity sampling", c5_strict_convexity),
        ("Pₙ construction", c6_pn),
        ("odometer invariance", c7_odometer),
        ("ε-close renormings", c8_epsilon_close),
        ("c renorming audit", c9_audit),
        ("determinism", c10_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", criteria.len());
}
