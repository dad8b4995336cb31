use serde_json::json;

use renorm_core::cantorspace::{
    odometer_act, odometer_act_power, odometer_action, odometer_fixture, odometer_sc_norm, odometer_sc_parts,
    subshift_action, subshift_certificate, verify_cover_identities, verify_cover_identities_with, CoverReport,
    CylFn, Partition, XFn,
};
use renorm_core::l1space::{
    apply_iso, apply_word, eval_word, f2_action, f2_certificate, f2_counterexample, find_np as search_np,
    fundamental_domain_action, l1_norm, np_exponents, pn_apply, pn_defects, FDAction, GroupElem, GroupSpec,
    StepFn, TruncVec,
};
use renorm_core::linear::{RVec, Vector};
use renorm_core::numerics::{approx_f64, cert_sqrt, fmt_rational, int, pow2, rat, CertReal, Precision, Rational};
use renorm_core::renormkit::{
    abs_norm, check_assembly_injectivity, check_equivalence, check_equivariance, check_equivariance_by,
    check_invariance, check_invariance_on, check_obstruction, check_operator_bound, check_strict_convexity,
    epsilon_close_norm, l2_assembly, linf_to_l2_identity, obstruction_witness, pushforward_norm, real_identity,
    sup_norm_rvec, Action, EquivariantMapDescriptor, NormOracle, ObstructionVerdict, Report, Sampler, Transform,
    Verdict,
};
use renorm_core::seqspace::{
    act_blocks, act_c, act_csplit, c0sum_base_norm, c0sum_parts, c0sum_sorted_norm, c_renorm, c_split,
    l1sum_base_norm, l1sum_sc_norm, sorted_sc_norm, sorted_sc_parts, sorting_element, sup_norm, weighted_parts,
    Ambient, BlockVec, CSeq, CSplit, IsoCElem, Sign,
};
use renorm_core::words::FreeWord;

use crate::{rational_json, Result, Run, ScenarioConfig};

fn word(s: &str) -> FreeWord {
    s.parse().unwrap_or_else(|e| unreachable!("fixed word: {e}"))
}

fn overlaps(a: &CertReal, b: &CertReal) -> bool {
    a.lo() <= b.hi() && b.lo() <= a.hi()
}

fn l1_oracle() -> NormOracle<StepFn> {
    NormOracle::rational("‖·‖₁ on L₁[0,1]", l1_norm)
}

fn sorted_oracle() -> NormOracle<CSeq> {
    NormOracle::new("sorted weighted norm on c₀", sorted_sc_norm).with_key(|x: &CSeq| sorted_sc_parts(x).map(|(a, b)| vec![a, b]))
}

fn c_renorm_oracle() -> NormOracle<CSeq> {
    NormOracle::new("split renorming of c", c_renorm)
}

fn c0sum_oracle() -> NormOracle<BlockVec> {
    NormOracle::new("sorted norm on the c₀-sum", c0sum_sorted_norm).with_key(|v: &BlockVec| c0sum_parts(v).map(|(a, b)| vec![a, b]))
}

fn sorted_block_sq(v: &BlockVec) -> Vec<Rational> {
    let mut sq = v.block_sq_norms();
    sq.sort();
    sq
}

fn l1sum_oracle() -> NormOracle<BlockVec> {
    NormOracle::new("ℓ₁ + ℓ₂ norm on the ℓ₁-sum", l1sum_sc_norm).with_key(|v: &BlockVec| Ok::<_, renorm_core::renormkit::RenormError>(sorted_block_sq(v)))
}

fn xfn_sup_oracle() -> NormOracle<XFn> {
    NormOracle::rational("‖·‖_∞ on C(X)", XFn::sup_norm)
}

fn obstruction_str(v: &ObstructionVerdict) -> String {
    match v {
        ObstructionVerdict::Valid => "VALID".into(),
        ObstructionVerdict::Invalid { reason } => format!("INVALID({reason})"),
    }
}

fn is_invalid(v: &ObstructionVerdict) -> &'static str {
    match v {
        ObstructionVerdict::Valid => "VALID",
        ObstructionVerdict::Invalid { .. } => "INVALID",
    }
}

pub(crate) fn f2_l1_obstruction(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let cert = f2_certificate();
    let (t1, t2) = f2_counterexample();
    let x = cert.x.clone();
    let verdict = check_obstruction(&cert);
    run.expect("certificate (x = χ[0,1/3), y = χ[1/3,2/3), g = T₂, h = T₁)", "VALID", obstruction_str(&verdict));
    run.detail("certificate", obstruction_witness(&cert));
    run.expect_true("T₂·χ[0,1/3) = χ[1/3,2/3)", apply_iso(&t2, &x) == StepFn::indicator(&rat(1, 3), &rat(2, 3)));
    let half = StepFn::indicator_scaled(&int(0), &rat(2, 3), rat(1, 2));
    run.expect_true("T₁·χ[0,1/3) = ½χ[0,2/3)", apply_iso(&t1, &x) == half);
    run.expect_true("½χ[0,2/3) is the midpoint of x and y", cert.x.midpoint(&cert.y) == half);

    let mut control = f2_certificate();
    control.y = control.x.clone();
    run.expect("negative control y = x", "INVALID", is_invalid(&check_obstruction(&control)));
    let mut control = f2_certificate();
    control.h_word = word("aa");
    run.expect("negative control h = T₁²", "INVALID", is_invalid(&check_obstruction(&control)));

    // An invariant norm cannot be strictly convex on (x, y).
    let l1 = l1_oracle();
    let words: Vec<FreeWord> = ["a", "A", "b", "B"].map(word).to_vec();
    let inv = check_invariance(&l1, &cert.action, &[cert.x.clone(), cert.y.clone()], &words, prec)?;
    run.report_exact("‖·‖₁ invariant under T₁, T₂", inv);
    let sc = check_strict_convexity(&l1, &[(cert.x.clone(), cert.y.clone())], prec)?;
    run.report("invariant norm fails strict convexity on (x, y)", sc, Verdict::Fail);
    Ok(())
}

pub(crate) fn l1_word_isometry(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let mut s = Sampler::new(cfg.seed);
    let n_words = cfg.trials_or(200);
    let max_len = cfg.depth_or(8) as usize;
    let words: Vec<FreeWord> = (0..n_words).map(|_| s.free_word(2, max_len)).collect();
    let fs: Vec<StepFn> = (0..20).map(|_| s.step_fn(6)).collect();
    let action = f2_action();
    let report = check_invariance(&l1_oracle(), &action, &fs, &words, prec)?;
    run.report_exact("‖w·f‖₁ = ‖f‖₁ for random reduced words", report);

    let (t1, t2) = f2_counterexample();
    let checks = words
        .iter()
        .take(20)
        .flat_map(|w| fs.iter().take(5).map(move |f| (w, f)))
        .map(|(w, f)| {
            let composed = apply_iso(&eval_word(w, &t1, &t2), f);
            let stepwise = apply_word(w, &t1, &t2, f);
            (composed == stepwise, json!({"word": w.to_string(), "f": f.to_json()}))
        })
        .collect();
    run.report(
        "composed word isometry equals letter-by-letter application",
        Report::from_checks("composition", "eval_word vs apply_word", checks),
        Verdict::Pass,
    );
    run.detail("words", json!(n_words));
    run.detail("functions", json!(fs.len()));
    run.detail("max_word_length", json!(max_len));
    Ok(())
}

fn group_label(g: GroupSpec) -> String {
    g.to_string()
}

pub(crate) fn fd_action_build(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let depth = cfg.depth_or(8) as u64;
    let trials = cfg.trials_or(30);
    let mut s = Sampler::new(cfg.seed);
    for spec in [GroupSpec::Int, GroupSpec::Cyclic(3), GroupSpec::Free(2)] {
        let act = fundamental_domain_action(spec)?;
        let elems = act.first_elements(depth);
        let mut checks = Vec::new();
        // disjoint intervals whose lengths add up to the covered mass
        let ivs: Vec<(Rational, Rational)> = elems.iter().map(|g| act.interval_of(g)).collect::<std::result::Result<_, _>>()?;
        let mut sorted = ivs.clone();
        sorted.sort();
        let disjoint = sorted.windows(2).all(|w| w[0].1 <= w[1].0);
        checks.push((disjoint, json!({"property": "translates of the domain are disjoint", "count": ivs.len()})));
        let total: Rational = ivs.iter().map(|(a, b)| b - a).sum();
        let expected = if act.order().is_some_and(|n| depth >= n) { int(1) } else { int(1) - pow2(-(elems.len() as i64)) };
        checks.push((total == expected, json!({"property": "total length", "value": rational_json(&total)})));
        // generator maps agree with the action on the listed translates
        for g in act.generators() {
            let m = act.generator_map(&g, depth)?;
            for h in &elems {
                let (a, b) = act.interval_of(h)?;
                let (u, w) = act.interval_of(&act.mul(&g, h)?)?;
                let mid = (&a + &b) / int(2);
                let ok = m.apply(&a) == Some(u.clone()) && m.apply(&mid) == Some((&u + &w) / int(2));
                checks.push((ok, json!({"property": "generator map on translate", "g": g.to_string(), "h": h.to_string()})));
            }
        }
        // homomorphism and isometry on random functions supported on the first translates
        let support = act.interval(2.min(depth.saturating_sub(1))).1;
        let pool = act.first_elements(8);
        for _ in 0..trials {
            let f = s.step_fn_supported(5, &support);
            let g = pool[s.below(pool.len())].clone();
            let h = pool[s.below(pool.len())].clone();
            let gh = act.mul(&g, &h)?;
            let lhs = act.act(&gh, &f)?;
            let rhs = act.act(&g, &act.act(&h, &f)?)?;
            let wit = json!({"property": "α(gh)f = α(g)α(h)f and isometry", "g": g.to_string(), "h": h.to_string(), "f": f.to_json()});
            checks.push((lhs == rhs && l1_norm(&lhs) == l1_norm(&f), wit));
        }
        let r = Report::from_checks("fundamental_domain_action", &format!("dyadic translates for {}", group_label(spec)), checks);
        run.report(&format!("fundamental-domain action of {}", group_label(spec)), r, Verdict::Pass);
    }
    let cyc = fundamental_domain_action(GroupSpec::Cyclic(3))?;
    let g = cyc.generators()[0].clone();
    let m = renorm_core::l1space::L1Iso::lattice(cyc.generator_map(&g, 3)?);
    let cube = renorm_core::l1space::compose_iso(&m, &renorm_core::l1space::compose_iso(&m, &m));
    run.expect_true("Z/3: the generator map cubes to the identity", cube == renorm_core::l1space::L1Iso::identity());
    run.note("For Z/n the last translate is extended to reach 1 so that the n translates tile [0,1).");
    Ok(())
}

fn int_translation(act: &FDAction, by: i64) -> impl Fn(&StepFn) -> StepFn + Send + Sync + 'static {
    let act = act.clone();
    move |f: &StepFn| act.act(&GroupElem::Int(by), f).unwrap_or_else(|e| unreachable!("finite support: {e}"))
}

fn truncvec_translation(act: &FDAction, by: i64) -> impl Fn(&TruncVec) -> TruncVec + Send + Sync + 'static {
    let act = act.clone();
    move |v: &TruncVec| v.translate(&act, &GroupElem::Int(by)).unwrap_or_else(|e| unreachable!("{e}"))
}

fn spec_f() -> StepFn {
    StepFn::from_pieces(vec![(int(0), rat(1, 4), int(1)), (rat(1, 4), rat(1, 2), int(-1))])
}

pub(crate) fn pn_convergence(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let act = fundamental_domain_action(GroupSpec::Int)?;
    let depth = cfg.depth_or(16) as u64;
    let trunc = act.first_elements(depth);
    let mut s = Sampler::new(cfg.seed);
    let support = act.interval(3).0;
    let fs: Vec<StepFn> = (0..cfg.trials_or(20)).map(|_| s.step_fn_supported(6, &support)).collect();
    let dom = Action::new(
        "ℤ on L₁[0,1] by dyadic translates",
        vec![(Transform::new("+1", int_translation(&act, 1)), Transform::new("−1", int_translation(&act, -1)))],
    );
    let cod = Action::new(
        "ℤ on ℓ₁(ℤ × n) by left translation",
        vec![(Transform::new("+1", truncvec_translation(&act, 1)), Transform::new("−1", truncvec_translation(&act, -1)))],
    );
    let words: Vec<FreeWord> = ["a", "A", "aa", "AA", "aaa"].map(word).to_vec();
    for n in [1u32, 2, 4] {
        let (a1, t1) = (act.clone(), trunc.clone());
        let d = EquivariantMapDescriptor::new(
            &format!("P_{n}"),
            move |f: &StepFn| pn_apply(&a1, n, f, &t1).unwrap_or_else(|e| unreachable!("{e}")),
            NormOracle::rational("ℓ₁", TruncVec::l1_mass),
            int(1),
        );
        let r = check_equivariance_by(&d, &dom, &cod, &fs, &words, |x, y| {
            x.agrees_on_common(y) && x.entries.keys().any(|k| y.entries.contains_key(k))
        })?;
        run.report(&format!("P_{n}(h·f) = h·P_{n}(f) on the truncation"), r, Verdict::Pass);
    }

    let schedule: Vec<(u32, u64)> = [1u32, 2, 4, 8, 16].iter().map(|&k| (k, k as u64)).collect();
    let mut all_fs = vec![spec_f()];
    all_fs.extend(fs.iter().take(5).cloned());
    let mut table = Vec::new();
    for (i, f) in all_fs.iter().enumerate() {
        let defects = pn_defects(&act, f, &schedule)?;
        let monotone = defects.windows(2).all(|w| w[1].defect <= w[0].defect);
        let nonneg = defects.iter().all(|d| d.defect >= int(0) && d.tail_bound >= int(0) && d.tail_bound <= d.defect);
        let label = if i == 0 { "χ[0,1/4) − χ[1/4,1/2)".to_string() } else { format!("random f #{i}") };
        run.expect_true(&format!("defect nonincreasing under refinement: {label}"), monotone);
        run.expect_true(&format!("0 ≤ tail bound ≤ defect: {label}"), nonneg);
        table.push(json!({"f": f.to_json(), "label": label, "schedule": defects}));
    }
    run.detail("defects", json!(table));
    run.detail("truncation", json!(trunc.len()));
    Ok(())
}

pub(crate) fn find_np(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let act = fundamental_domain_action(GroupSpec::Int)?;
    let half = rat(1, 2);
    let f = spec_f();
    let c = search_np(&act, &f, &half, prec)?;
    run.expect("n for χ[0,1/4) − χ[1/4,1/2)", 2, c.n);
    run.expect_true("p > 1", c.p > int(1));
    run.expect_true("‖ι_p P_n f‖_p ≥ ‖f‖₁/2 certified", c.value.lo() >= c.target);
    run.detail("certificate", serde_json::to_value(&c).unwrap_or_default());
    run.detail("tested_exponents", json!(np_exponents().iter().map(fmt_rational).collect::<Vec<_>>()));

    let mut s = Sampler::new(cfg.seed);
    let support = act.interval(3).0;
    let mut checks = Vec::new();
    for _ in 0..cfg.trials_or(10) {
        let g = s.step_fn_supported(5, &support);
        if l1_norm(&g) == int(0) {
            continue;
        }
        let c = search_np(&act, &g, &half, prec)?;
        checks.push((c.value.lo() >= c.target && c.p > int(1), json!({"f": g.to_json(), "certificate": c})));
    }
    run.report(
        "random f: some (n, p) keeps half of the L₁ norm",
        Report::from_checks("find_np", "ℤ dyadic action, ratio 1/2", checks),
        Verdict::Pass,
    );
    run.note(
        "The target is ‖f‖₁/2; a bound of 2‖f‖ is unattainable since ι_p∘Pₙ has norm at most 1.",
    );
    Ok(())
}

pub(crate) fn c0_sorted_invariance(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let mut s = Sampler::new(cfg.seed);
    let dim = cfg.dim_or(16);
    let trials = cfg.trials_or(1000);
    let mut items = Vec::with_capacity(trials);
    let mut attain = Vec::with_capacity(trials);
    for _ in 0..trials {
        let x = s.c0_seq(dim);
        let g = s.iso_c_elem(dim, true);
        let gx = act_c(&g, &x);
        let sorted = act_c(&sorting_element(&x), &x);
        let (_, best) = weighted_parts(&sorted).map_err(renorm_core::renormkit::RenormError::from)?;
        let (_, sampled) = weighted_parts(&gx).map_err(renorm_core::renormkit::RenormError::from)?;
        let (_, claimed) = sorted_sc_parts(&x).map_err(renorm_core::renormkit::RenormError::from)?;
        attain.push((
            sampled <= best && best == claimed,
            json!({"x": x.to_json(), "g_radicand": rational_json(&sampled), "sorting_radicand": rational_json(&best)}),
        ));
        items.push((format!("{g:?}"), x, gx));
    }
    let r = check_invariance_on(&sorted_oracle(), "sorted weighted norm under random signed permutations", &items, prec)?;
    run.report_exact("invariance with identical radicands", r);
    run.report(
        "sorting permutation attains the supremum of the weighted norm",
        Report::from_checks("sup_attainment", "weighted radicand of g·x vs sorted x", attain),
        Verdict::Pass,
    );
    Ok(())
}

fn block_pairs(s: &mut Sampler, n: usize, ambient: Ambient, max_blocks: usize, scalars: bool) -> Vec<(BlockVec, BlockVec)> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let blocks = s.range(1, max_blocks);
        let layout = if scalars { vec![(0, 1); blocks] } else { s.block_layout(blocks, 3, 3) };
        let x = s.block_vec(&layout, ambient);
        let y = s.block_vec(&layout, ambient);
        if !x.is_parallel(&y) {
            out.push((x, y));
        }
    }
    out
}

pub(crate) fn c0_strict_convexity(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let mut s = Sampler::new(cfg.seed);
    let trials = cfg.trials_or(500);
    let dim = cfg.dim_or(12);
    let pairs: Vec<(CSeq, CSeq)> = (0..trials).map(|_| s.non_parallel_pair(|s| s.c0_seq(dim))).collect();
    run.report("sorted weighted norm on c₀", check_strict_convexity(&sorted_oracle(), &pairs, prec)?, Verdict::Pass);
    let bp = block_pairs(&mut s, trials, Ambient::C0Sum, dim.min(8), false);
    run.report("sorted norm on the c₀-sum of Euclidean blocks", check_strict_convexity(&c0sum_oracle(), &bp, prec)?, Verdict::Pass);
    let lp = block_pairs(&mut s, trials, Ambient::L1Sum, dim, true);
    run.report("‖·‖₁ + ‖·‖₂ on ℓ₁ = ⊕_{ℓ₁} ℝ", check_strict_convexity(&l1sum_oracle(), &lp, prec)?, Verdict::Pass);
    let cp: Vec<(CSeq, CSeq)> = (0..trials).map(|_| s.non_parallel_pair(|s| s.c_seq(dim))).collect();
    run.report("split renorming of c", check_strict_convexity(&c_renorm_oracle(), &cp, prec)?, Verdict::Pass);
    let x = StepFn::indicator(&int(0), &rat(1, 2));
    let y = StepFn::indicator(&rat(1, 2), &int(1));
    let r = check_strict_convexity(&l1_oracle(), &[(x, y)], prec)?;
    run.report("ℓ₁ on disjoint supports: 2 = 1 + 1", r, Verdict::Fail);
    Ok(())
}

fn block_invariance_items(s: &mut Sampler, n: usize, ambient: Ambient, max_blocks: usize) -> Result<Vec<(String, BlockVec, BlockVec)>> {
    let mut items = Vec::with_capacity(n);
    for _ in 0..n {
        let blocks = s.range(1, max_blocks);
        let layout = s.block_layout(blocks, 3, 3);
        let v = s.block_vec(&layout, ambient);
        let g = s.block_iso(&layout);
        let gv = act_blocks(&g, &v).map_err(renorm_core::renormkit::RenormError::from)?;
        items.push(("block isometry".to_string(), v, gv));
    }
    Ok(items)
}

pub(crate) fn c0sum_norm(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let mut s = Sampler::new(cfg.seed);
    let trials = cfg.trials_or(300);
    let max_blocks = cfg.dim_or(8);
    let items = block_invariance_items(&mut s, trials, Ambient::C0Sum, max_blocks)?;
    let r = check_invariance_on(&c0sum_oracle(), "sorted c₀-sum norm under block isometries", &items, prec)?;
    run.report_exact("invariance under class-preserving block permutations with orthogonal blocks", r);
    let base = NormOracle::new("c₀-sum norm", c0sum_base_norm);
    let samples: Vec<BlockVec> = items.iter().map(|(_, v, _)| v.clone()).collect();
    let r = check_equivalence(&c0sum_oracle(), &base, (&int(1), &int(2)), &samples, prec)?;
    run.report("‖v‖ ≤ N(v) ≤ 2‖v‖", r, Verdict::Pass);
    let pairs = block_pairs(&mut s, trials.min(200), Ambient::C0Sum, max_blocks, false);
    run.report("strict convexity", check_strict_convexity(&c0sum_oracle(), &pairs, prec)?, Verdict::Pass);
    Ok(())
}

fn l2_of_blocks(v: &BlockVec) -> Rational {
    v.block_sq_norms().into_iter().sum()
}

pub(crate) fn l1sum_norm(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let mut s = Sampler::new(cfg.seed);
    let trials = cfg.trials_or(300);
    let max_blocks = cfg.dim_or(8);
    let items = block_invariance_items(&mut s, trials, Ambient::L1Sum, max_blocks)?;
    let r = check_invariance_on(&l1sum_oracle(), "ℓ₁ + ℓ₂ norm under block isometries", &items, prec)?;
    run.report_exact("invariance under class-preserving block permutations with orthogonal blocks", r);

    // the same norm as a pushforward along the identity into the ℓ₂-sum
    let l2 = NormOracle::new("ℓ₂-sum of blocks", |v: &BlockVec, p| renorm_core::numerics::sqrt_at(&l2_of_blocks(v), p))
        .with_key(|v: &BlockVec| Ok::<_, renorm_core::renormkit::RenormError>(vec![l2_of_blocks(v)]));
    let base = NormOracle::new("ℓ₁-sum norm", l1sum_base_norm).with_key(|v: &BlockVec| Ok::<_, renorm_core::renormkit::RenormError>(sorted_block_sq(v)));
    let id = EquivariantMapDescriptor::new("id", |v: &BlockVec| v.clone(), l2.clone(), int(1)).with_norm_sq(l2_of_blocks);
    let pushed = pushforward_norm(&id, &base);
    let checks = items
        .iter()
        .take(50)
        .map(|(_, v, _)| -> Result<(bool, serde_json::Value)> {
            let a = pushed.eval(v, prec)?;
            let b = l1sum_sc_norm(v, prec).map_err(renorm_core::renormkit::RenormError::from)?;
            Ok((overlaps(&a, &b), json!({"v": v.to_json(), "pushforward": a, "direct": b})))
        })
        .collect::<Result<Vec<_>>>()?;
    run.report(
        "pushforward along ℓ₁-sum → ℓ₂-sum equals the direct formula",
        Report::from_checks("pushforward", "id: ⊕_{ℓ₁} → ⊕_{ℓ₂}", checks),
        Verdict::Pass,
    );
    // meta-property: equivariant map + invariant codomain norm ⇒ invariant pushforward
    let gen_items: Vec<(BlockVec, renorm_core::seqspace::BlockIso)> = (0..20)
        .map(|_| {
            let blocks = s.range(1, max_blocks);
            let layout = s.block_layout(blocks, 3, 3);
            (s.block_vec(&layout, Ambient::L1Sum), s.block_iso(&layout))
        })
        .collect();
    let mut eq_checks = Vec::new();
    let mut cod_items = Vec::new();
    let mut push_items = Vec::new();
    for (v, g) in &gen_items {
        let gv = act_blocks(g, v).map_err(renorm_core::renormkit::RenormError::from)?;
        eq_checks.push((id.apply(&gv) == act_blocks(g, &id.apply(v)).map_err(renorm_core::renormkit::RenormError::from)?, json!({"v": v.to_json()})));
        cod_items.push(("g".to_string(), id.apply(v), id.apply(&gv)));
        push_items.push(("g".to_string(), v.clone(), gv));
    }
    run.report("identity is equivariant", Report::from_checks("equivariance", "id on block sums", eq_checks), Verdict::Pass);
    run.report_exact("codomain ℓ₂-sum norm invariant", check_invariance_on(&l2, "ℓ₂-sum of blocks", &cod_items, prec)?);
    run.report_exact("pushforward norm invariant", check_invariance_on(&pushed, &pushed.tag, &push_items, prec)?);
    let pairs = block_pairs(&mut s, trials.min(200), Ambient::L1Sum, max_blocks, false);
    run.report("strict convexity on Euclidean blocks", check_strict_convexity(&l1sum_oracle(), &pairs, prec)?, Verdict::Pass);
    Ok(())
}

pub(crate) fn c_renorm_audit(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let g = IsoCElem::from_images(&[1], [1], Sign::Plus).map_err(renorm_core::renormkit::RenormError::from)?;
    let one = CSeq::constant(int(1));
    let gx = act_c(&g, &one);
    run.detail("g", json!({"permutation": "identity", "sign_flips": [1], "tail_sign": "+"}));
    run.detail("g_one", gx.to_json());

    let (g1, g2) = (g.clone(), g.clone());
    let dom = Action::new("g on c", vec![(Transform::new("g", move |x: &CSeq| act_c(&g1, x)), Transform::new("g", move |x: &CSeq| act_c(&g2, x)))]);
    let (g3, g4) = (g.clone(), g.clone());
    let cod = Action::new(
        "g on c₀ ⊕ ℝ",
        vec![(Transform::new("g", move |s: &CSplit| act_csplit(&g3, s)), Transform::new("g", move |s: &CSplit| act_csplit(&g4, s)))],
    );
    let split_norm = NormOracle::new("‖·‖ on c₀ ⊕_{ℓ₂} ℝ", renorm_core::seqspace::csplit_norm);
    let d = EquivariantMapDescriptor::new("x ↦ (x − lim x) ⊕ lim x", c_split, split_norm, int(3));
    let r = check_equivariance(&d, &dom, &cod, std::slice::from_ref(&one), &[word("a")])?;
    run.report("split map equivariance at x = 𝟙", r, Verdict::Fail);
    let expected_lhs = CSplit { c0: CSeq::c0(vec![int(-2)]), limit: int(1) };
    let expected_rhs = CSplit { c0: CSeq::zero(), limit: int(1) };
    run.expect_true("split(g𝟙) = ((−2,0,…), 1)", c_split(&gx) == expected_lhs);
    run.expect_true("g·split(𝟙) = (0, 1)", act_csplit(&g, &c_split(&one)) == expected_rhs);

    let r = check_invariance(&c_renorm_oracle(), &dom, std::slice::from_ref(&one), &[word("a")], prec)?;
    let radius_ok = r.max_radius.parse::<String>().ok().and_then(|m| renorm_core::numerics::parse_rational(&m).ok()).is_some_and(|m| m <= pow2(-64));
    run.report("renorming invariance at x = 𝟙", r, Verdict::Fail);
    run.expect_true("enclosures certified apart at radius ≤ 2⁻⁶⁴", radius_ok);
    let v1 = c_renorm(&one, Precision::bits(64)).map_err(renorm_core::renormkit::RenormError::from)?;
    let v2 = c_renorm(&gx, Precision::bits(64)).map_err(renorm_core::renormkit::RenormError::from)?;
    let oracle = cert_sqrt(&int(10), &pow2(-100))? + CertReal::exact(int(1));
    run.expect_true("N(𝟙) = 2 exactly", v1 == CertReal::exact(int(2)));
    run.expect_true("N(g𝟙) encloses 1 + √10", overlaps(&v2, &oracle));
    run.detail("values", json!({"N(1)": v1, "N(g1)": v2, "approx": [approx_f64(v1.midpoint()), approx_f64(v2.midpoint())]}));

    // on c₀ the limit vanishes and the map is equivariant
    let mut s = Sampler::new(cfg.seed);
    let xs: Vec<CSeq> = (0..cfg.trials_or(100)).map(|_| s.c0_seq(cfg.dim_or(12))).collect();
    let mut items = Vec::new();
    for x in &xs {
        let h = s.iso_c_elem(12, true);
        let ok = c_split(&act_c(&h, x)) == act_csplit(&h, &c_split(x));
        items.push((ok, json!({"x": x.to_json()})));
    }
    run.report(
        "split map equivariant on c₀",
        Report::from_checks("equivariance", "x ↦ (x − lim x) ⊕ lim x on c₀", items),
        Verdict::Pass,
    );
    run.note("Audit finding: a sign flip with positive tail sign moves mass between the summands, so the split map is not equivariant and the assembled norm is not invariant on c.");
    Ok(())
}

fn cover_report(name: &str, c: &CoverReport) -> Report {
    let checks = c
        .checks
        .iter()
        .map(|k| (k.pass, serde_json::to_value(k).unwrap_or_default()))
        .collect();
    Report::from_checks("cover_identities", name, checks)
}

pub(crate) fn subshift_identities(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let window = cfg.window_or(32);
    let good = verify_cover_identities(window);
    run.report(&format!("standard partition, window {window} and symbolic cells"), cover_report("standard partition", &good), Verdict::Pass);
    let bad = verify_cover_identities_with(&Partition::swapped_de(), window);
    let witnessed = bad.failures().all(|c| c.witness.is_some());
    run.report("mutated partition (D and E swapped)", cover_report("D/E swapped", &bad), Verdict::Fail);
    run.expect_true("every failure of the mutated partition has a witness point", witnessed);
    run.note("Y = X × 2^ℕ: the Cantor factor is carried symbolically; all maps act trivially on it.");
    Ok(())
}

pub(crate) fn subshift_obstruction(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let cert = subshift_certificate();
    run.expect("certificate (x = f, y = f′, g = swap, h = shift)", "VALID", obstruction_str(&check_obstruction(&cert)));
    run.detail("certificate", obstruction_witness(&cert));
    let mut c = subshift_certificate();
    c.y = c.x.clone();
    run.expect("negative control y = x", "INVALID", is_invalid(&check_obstruction(&c)));
    let mut c = subshift_certificate();
    c.h_word = word("aa");
    run.expect("negative control h = σ²", "INVALID", is_invalid(&check_obstruction(&c)));
    let action = subshift_action();
    let words: Vec<FreeWord> = ["a", "A", "b"].map(word).to_vec();
    let r = check_invariance(&xfn_sup_oracle(), &action, &[cert.x.clone(), cert.y.clone()], &words, prec)?;
    run.report_exact("‖·‖_∞ invariant under shift and swap", r);
    let r = check_strict_convexity(&xfn_sup_oracle(), &[(cert.x.clone(), cert.y.clone())], prec)?;
    run.report("invariant norm fails strict convexity on (f, f′)", r, Verdict::Fail);
    run.expect_true("f and f′ are continuous on X", cert.x.is_continuous() && cert.y.is_continuous());
    Ok(())
}

fn l2_mu_oracle() -> NormOracle<CylFn> {
    NormOracle::new("‖·‖_{L₂(μ)}", |f: &CylFn, p| renorm_core::numerics::sqrt_at(&f.l2_sq_norm(), p))
        .with_key(|f: &CylFn| Ok::<_, renorm_core::renormkit::RenormError>(vec![f.l2_sq_norm()]))
}

pub(crate) fn odometer_invariance(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let mut s = Sampler::new(cfg.seed);
    let depth = cfg.depth_or(10);
    let mut fs = odometer_fixture();
    fs.extend((0..cfg.trials_or(200)).map(|_| s.cyl_fn(depth)));
    let norm = NormOracle::new("‖·‖_∞ + ‖·‖_{L₂(μ)}", |f: &CylFn, p| odometer_sc_norm(f, p))
        .with_key(|f: &CylFn| {
            let (a, b) = odometer_sc_parts(f);
            Ok::<_, renorm_core::renormkit::RenormError>(vec![a, b])
        })
        ;
    let action = odometer_action();
    let r = check_invariance(&norm, &action, &fs, &[word("a"), word("A")], prec)?;
    run.report_exact("invariance under the odometer with identical radicands", r);
    let perm = fs
        .iter()
        .map(|f| {
            let g = odometer_act(f);
            let (mut a, mut b) = (f.table().to_vec(), g.table().to_vec());
            a.sort();
            b.sort();
            (a == b && g.depth() == f.depth() && odometer_act_power(&g, -1) == *f, json!({"f": f.to_json()}))
        })
        .collect();
    run.report("odometer permutes the table", Report::from_checks("permutation", "odometer on depth-m tables", perm), Verdict::Pass);

    let sup = NormOracle::rational("‖·‖_∞", CylFn::sup_norm);
    let inclusion = EquivariantMapDescriptor::new("C(2^ℕ) ⊆ L₂(μ)", |f: &CylFn| f.clone(), l2_mu_oracle(), int(1)).with_norm_sq(CylFn::l2_sq_norm);
    let pushed = pushforward_norm(&inclusion, &sup);
    let same = fs
        .iter()
        .take(100)
        .map(|f| -> Result<(bool, serde_json::Value)> {
            let key_equal = pushed.key(f).transpose()?.map(|k| {
                let (a, b) = odometer_sc_parts(f);
                k == vec![a, b]
            });
            Ok((key_equal == Some(true), json!({"f": f.to_json()})))
        })
        .collect::<Result<Vec<_>>>()?;
    run.report(
        "pushforward along C(2^ℕ) ⊆ L₂(μ) equals ‖·‖_∞ + ‖·‖_{L₂(μ)}",
        Report::from_checks("pushforward", "inclusion into L₂(μ)", same),
        Verdict::Pass,
    );
    let r = check_equivariance(&inclusion, &action, &action, &fs[..64], &[word("a"), word("A")])?;
    run.report("inclusion is equivariant", r, Verdict::Pass);
    run.report_exact("L₂(μ) norm invariant", check_invariance(&l2_mu_oracle(), &action, &fs, &[word("a")], prec)?);
    run.report_exact("pushforward norm invariant", check_invariance(&pushed, &action, &fs, &[word("a")], prec)?);
    run.detail("functions", json!({"fixture": 64, "random": fs.len() - 64, "max_depth": depth}));
    Ok(())
}

fn weighted_l2_map() -> EquivariantMapDescriptor<CSeq, RVec> {
    EquivariantMapDescriptor::new(
        "x ↦ (x_i/2^i)",
        |x: &CSeq| RVec::new(x.prefix().iter().enumerate().map(|(i, v)| v * pow2(-(i as i64) - 1)).collect()),
        renorm_core::renormkit::l2_norm_rvec(),
        int(1),
    )
    .with_norm_sq(RVec::sq_norm)
    .with_operator_norm_sq(rat(1, 3))
}

fn pn_l2_map(n: u32, depth: u64) -> Result<EquivariantMapDescriptor<StepFn, TruncVec>> {
    let act = fundamental_domain_action(GroupSpec::Int)?;
    let trunc = act.first_elements(depth);
    let sq = |v: &TruncVec| -> Rational { v.entries.values().map(|x| x * x).sum() };
    let norm = NormOracle::new("ℓ₂", move |v: &TruncVec, p| renorm_core::numerics::sqrt_at(&sq(v), p));
    Ok(EquivariantMapDescriptor::new(
        &format!("P_{n} into ℓ₂(ℤ × {n})"),
        move |f: &StepFn| pn_apply(&act, n, f, &trunc).unwrap_or_else(|e| unreachable!("{e}")),
        norm,
        int(1),
    )
    .with_norm_sq(sq))
}

pub(crate) fn epsilon_close_bounds(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let mut s = Sampler::new(cfg.seed);
    let trials = cfg.trials_or(200);
    let dim = cfg.dim_or(12);
    let r2: Vec<RVec> = (0..trials).map(|_| s.rvec(2)).collect();
    let c0: Vec<CSeq> = (0..trials).map(|_| s.c0_seq(dim)).collect();
    let steps: Vec<StepFn> = (0..trials).map(|_| s.step_fn(6)).collect();
    let sup_c0 = NormOracle::rational("‖·‖_∞ on c₀", sup_norm);
    let id2 = linf_to_l2_identity(2);
    let wmap = weighted_l2_map();
    let pmap = pn_l2_map(4, 4)?;
    for eps in [rat(1, 2), rat(1, 4), rat(1, 10)] {
        let (lo, hi) = (int(1) - &eps, int(1) + &eps);
        let e = fmt_rational(&eps);
        let n = epsilon_close_norm(&id2, &sup_norm_rvec(), &eps)?;
        run.report(&format!("ℝ² (ℓ∞ → ℓ₂), ε = {e}"), check_equivalence(&n, &sup_norm_rvec(), (&lo, &hi), &r2, prec)?, Verdict::Pass);
        let n = epsilon_close_norm(&wmap, &sup_c0, &eps)?;
        run.report(&format!("c₀ (weighted ℓ₂), ε = {e}"), check_equivalence(&n, &sup_c0, (&lo, &hi), &c0, prec)?, Verdict::Pass);
        let n = epsilon_close_norm(&pmap, &l1_oracle(), &eps)?;
        run.report(&format!("L₁[0,1] (P₄ into ℓ₂), ε = {e}"), check_equivalence(&n, &l1_oracle(), (&lo, &hi), &steps, prec)?, Verdict::Pass);
    }
    let n = epsilon_close_norm(&id2, &sup_norm_rvec(), &rat(1, 2))?;
    let v = n.eval(&RVec::new(vec![int(1), int(1)]), prec)?;
    run.expect("N(1,1) for ε = 1/2 on ℝ²", "3/2", if v.is_exact() { fmt_rational(v.midpoint()) } else { v.to_string() });
    run.report("‖x_i/2^i‖₂ ≤ ‖x‖_∞", check_operator_bound(&wmap, &sup_c0, &c0, prec)?, Verdict::Pass);
    run.report("‖P₄ f‖₂ ≤ ‖f‖₁", check_operator_bound(&pmap, &l1_oracle(), &steps, prec)?, Verdict::Pass);
    run.note("The renorming is ‖x‖ + ε‖φ(x)‖/‖φ‖ with the codomain norm applied to φ(x); when ‖φ‖ is not known exactly a rational upper bound replaces it, which keeps both bounds.");
    Ok(())
}

fn projection(i: usize, witnesses: Vec<RVec>) -> EquivariantMapDescriptor<RVec, RVec> {
    EquivariantMapDescriptor::new(&format!("x ↦ x_{}", i + 1), move |x: &RVec| RVec::new(vec![x.0[i].clone()]), abs_norm(), int(1))
        .with_norm_sq(RVec::sq_norm)
        .with_injectivity(int(1), witnesses)
}

pub(crate) fn assembly_injectivity(cfg: &ScenarioConfig, run: &mut Run) -> Result<()> {
    let prec = cfg.start_precision()?;
    let one = l2_assembly(&[real_identity()])?;
    run.expect_true("single map: weight 1/2", one.apply(&RVec::new(vec![int(3)])) == vec![RVec::new(vec![rat(3, 2)])]);
    let two = l2_assembly(&[real_identity(), real_identity()])?;
    let x = RVec::new(vec![int(4)]);
    let y = two.apply(&x);
    run.expect_true("two identities: x ↦ (x/2, x/4)", y == vec![RVec::new(vec![int(2)]), RVec::new(vec![int(1)])]);
    let v = two.codomain_norm.eval(&y, prec)?;
    run.expect_true("combined norm √5/4·|x| at x = 4", overlaps(&v, &cert_sqrt(&int(5), &pow2(-100))?));
    run.expect("empty list rejected", "error", if l2_assembly::<RVec, RVec>(&[]).is_err() { "error" } else { "accepted" });
    let big = EquivariantMapDescriptor::new("2·id", |v: &RVec| v.scale(&int(2)), abs_norm(), int(2));
    run.expect("summand with ‖T‖ > 1 rejected", "error", if l2_assembly(&[big]).is_err() { "error" } else { "accepted" });

    let mut s = Sampler::new(cfg.seed);
    let trials = cfg.trials_or(200);
    let mut samples = Vec::with_capacity(trials);
    while samples.len() < trials {
        let v = s.rvec(2);
        if v.0[0].clone() * &v.0[0] != v.0[1].clone() * &v.0[1] {
            samples.push(v);
        }
    }
    let fam = |i: usize| -> Vec<RVec> {
        samples
            .iter()
            .map(|v| {
                let mut w = vec![int(0), int(0)];
                w[i] = v.0[i].clone();
                RVec::new(w)
            })
            .collect()
    };
    let parts = vec![projection(0, fam(0)), projection(1, fam(1))];
    let assembled = l2_assembly(&parts)?;
    run.report("‖Tx‖ ≤ ‖T‖·‖x‖_∞", check_operator_bound(&assembled, &sup_norm_rvec(), &samples, prec)?, Verdict::Pass);
    run.report("injectivity via ‖x − xₙ‖ < C‖xₙ‖", check_assembly_injectivity(&parts, &sup_norm_rvec(), &samples, prec)?, Verdict::Pass);
    let pushed = pushforward_norm(&assembled, &sup_norm_rvec());
    let pairs: Vec<(RVec, RVec)> = (0..trials).map(|_| s.non_parallel_pair(|s| s.rvec(2))).collect();
    run.report("‖x‖_∞ + ‖Tx‖ is strictly convex", check_strict_convexity(&pushed, &pairs, prec)?, Verdict::Pass);
    run.detail("operator_bound", rational_json(&assembled.operator_bound));
    run.note("Witness families are finite; density of the families is not verified.");
    Ok(())
}
