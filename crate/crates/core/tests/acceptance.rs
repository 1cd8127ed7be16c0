mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use sic_core::acyclic::{mais_bound_with, Analyzer};
use sic_core::bound::{ratio, BoundValue};
use sic_core::chain::{sbac_with, sbac_with_rule, ChainGraph, Height, TerminalRule};
use sic_core::lower::{theorem2_lower, LowerValue};
use sic_core::oracle::{
    check_code, entropic_violations, find_all_codes, oracle_best_rate, security_by_information, Rate,
};
use sic_core::smais::smais_with;
use sic_core::spm::{spm_symmetric_with, SpmResult};
use sic_core::{fixtures, GPartition, ProblemInstance, SubsetMask};

fn set(ms: &[usize]) -> SubsetMask {
    SubsetMask::from_messages(ms.iter().copied())
}

struct Outcome {
    failures: Vec<String>,
    /// Violations matching a documented deviation; reported but not fatal.
    known: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), known: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

struct Bounds {
    mais: BoundValue,
    smais: BoundValue,
    sbac: BoundValue,
    has_chain: bool,
    spm: SpmResult,
}

fn all_bounds(inst: &ProblemInstance) -> Bounds {
    let analyzer = Analyzer::new(inst);
    let gp = GPartition::build(inst);
    let graph = ChainGraph::build(&analyzer, &gp);
    let sb = sbac_with(&analyzer, &gp, &graph);
    Bounds {
        mais: mais_bound_with(&analyzer),
        smais: smais_with(&analyzer, &gp, false).bound,
        has_chain: sb.chain.is_some(),
        sbac: sb.bound,
        spm: spm_symmetric_with(inst, &gp).expect("spm solves"),
    }
}

fn example_one_regression() -> Outcome {
    let mut out = Outcome::new();
    let inst = fixtures::example_one();
    let analyzer = Analyzer::new(&inst);
    let gp = GPartition::build(&inst);
    let graph = ChainGraph::build(&analyzer, &gp);
    let sm = smais_with(&analyzer, &gp, false);
    out.check(sm.bound == BoundValue::Finite(ratio(1, 3)), || format!("smais = {}", sm.bound));
    let sb = sbac_with(&analyzer, &gp, &graph);
    out.check(sb.bound == BoundValue::Finite(ratio(2, 7)), || format!("sbac = {}", sb.bound));
    match &sb.chain {
        Some(c) => {
            out.check(c.messages == vec![1, 2, 3], || format!("winning chain {c}"));
            out.check(c.edge_heights == vec![Height::Finite(2), Height::Finite(2)], || {
                format!("edge heights {:?}", c.edge_heights)
            });
            out.check(c.verify(&analyzer, &gp, &graph), || "chain does not re-verify".into());
        }
        None => out.failures.push("no chain".into()),
    }
    out.check(graph.height(set(&[1, 2])) == Height::Finite(2), || "h({1,2}) ≠ 2".into());
    out.check(graph.height(set(&[2, 3])) == Height::Finite(2), || "h({2,3}) ≠ 2".into());
    let h = analyzer.h_mais(SubsetMask::EMPTY, set(&[3, 6])).unwrap();
    out.check(h == 2, || format!("h_mais(∅,{{3,6}}) = {h}"));
    out.check(gp.same_cell(set(&[1, 3]), set(&[3, 6])), || "{1,3} and {3,6} not in one cell".into());
    out.check(gp.same_cell(set(&[1, 2]), set(&[1, 6])), || "{1,2} and {1,6} not in one cell".into());
    out.detail = format!("smais = {}, sbac = {}", sm.bound, sb.bound);
    out
}

fn spm_example_one() -> Outcome {
    let mut out = Outcome::new();
    let inst = fixtures::example_one();
    let gp = GPartition::build(&inst);
    match spm_symmetric_with(&inst, &gp) {
        Ok(res) => {
            out.check(res.bound == BoundValue::Finite(ratio(2, 7)), || format!("spm = {}", res.bound));
            let sol = res.solution.as_ref();
            out.check(sol.is_some_and(|s| s.violations(&inst).is_empty()), || "set function infeasible".into());
            out.detail = format!("spm = {}", res.bound);
        }
        Err(e) => out.failures.push(e.to_string()),
    }
    out
}

fn ordering_and_cells(instances: &[ProblemInstance]) -> (Outcome, Outcome) {
    let mut order = Outcome::new();
    let mut cells = Outcome::new();
    let mut rng = common::rng(77);
    let mut chains = 0;
    let mut pairs = 0;
    let mut above_smais = [0usize; 2];
    let mut reflexive = [0usize; 2];
    for (idx, inst) in instances.iter().enumerate() {
        let b = all_bounds(inst);
        let zero = b.spm.bound.as_rational().is_some_and(|r| r == sic_core::bound::int(0));
        if b.has_chain {
            chains += 1;
            order.check(b.spm.bound.at_most(&b.sbac), || format!("#{idx}: spm {} > sbac {}", b.spm.bound, b.sbac));
            if !b.sbac.at_most(&b.smais) {
                above_smais[zero as usize] += 1;
                order.known.push(format!("#{idx}: sbac {} > smais {} (spm = {})", b.sbac, b.smais, b.spm.bound));
            }
        }
        order.check(b.spm.bound.at_most(&b.smais), || format!("#{idx}: spm {} > smais {}", b.spm.bound, b.smais));
        order.check(b.smais.at_most(&b.mais), || format!("#{idx}: smais {} > mais {}", b.smais, b.mais));

        let analyzer = Analyzer::new(inst);
        let gp = GPartition::build(inst);
        let graph = ChainGraph::build(&analyzer, &gp);
        let alt = sbac_with_rule(&analyzer, &gp, &graph, TerminalRule::Reflexive).bound;
        if !alt.at_most(&b.smais) {
            reflexive[zero as usize] += 1;
        }

        let Some(sol) = &b.spm.solution else { continue };
        for cell in &gp.cells()[..gp.g_subset_count()] {
            for s in &cell[1..] {
                cells.check(sol.value(*s) == sol.value(cell[0]), || {
                    format!("#{idx}: g({s}) ≠ g({}) in one cell", cell[0])
                });
            }
        }
        for _ in 0..100 {
            let (lower, upper) = common::random_pair(&mut rng, inst.n());
            let h = analyzer.h_mais(lower, upper).unwrap();
            let rhs = sol.value(lower) + &sol.rate * sic_core::bound::int(h as i64);
            cells.check(*sol.value(upper) >= rhs, || format!("#{idx}: g({upper}) < g({lower}) + h·R"));
            pairs += 1;
        }
    }
    order.detail = format!(
        "{} instances, {chains} with a chain; sbac > smais on {} with spm > 0 and {} with spm = 0 \
         (reflexive terminal rule: {} and {})",
        instances.len(),
        above_smais[0],
        above_smais[1],
        reflexive[0],
        reflexive[1]
    );
    cells.detail = format!("{} instances, {pairs} nested pairs", instances.len());
    (order, cells)
}

fn oracle_sandwich() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = common::rng(2024);
    let mut with_code = 0;
    let total = 120;
    for idx in 0..total {
        let inst = common::random_instance(&mut rng, 3, 4, true);
        let max_t = (4 / inst.n()) as u32;
        let res = oracle_best_rate(&inst, max_t, 8).expect("within guard");
        let b = all_bounds(&inst);
        let mut uppers = vec![&b.mais, &b.smais, &b.spm.bound];
        if b.has_chain {
            uppers.push(&b.sbac);
        }
        for (t, m) in res.smallest_m.iter().enumerate() {
            // the smallest M has the best rate at this t
            let Some(m) = m else { continue };
            let rate = Rate::new(t as u32 + 1, *m as u64);
            for u in &uppers {
                out.check(rate.within(u), || format!("#{idx}: rate {rate} exceeds upper bound {u}"));
            }
        }
        if res.best.is_some() {
            with_code += 1;
            let lower = theorem2_lower(&inst);
            match &lower.value {
                LowerValue::Finite(r) => {
                    let lb = BoundValue::Finite(r.clone());
                    for u in &uppers {
                        out.check(lb.at_most(u), || format!("#{idx}: lower {r} exceeds upper {u}"));
                    }
                }
                LowerValue::Infeasible => out.failures.push(format!("#{idx}: code found but lower says infeasible")),
            }
        }
    }
    // receiver of x1 holding x2, and an eavesdropper barred from x2
    let parity = ProblemInstance::from_triples(2, &[(&[1], &[2], &[]), (&[], &[], &[2])]).unwrap();
    let res = oracle_best_rate(&parity, 1, 2).unwrap();
    let best = res.best.map(|(r, _)| r);
    out.check(best == Some(Rate::new(1, 2)), || format!("parity best rate {best:?}"));
    let lower = theorem2_lower(&parity).value;
    out.check(lower == LowerValue::Finite(ratio(1, 1)), || format!("parity lower {lower}"));
    out.detail = format!("{total} instances, {with_code} with a valid code; parity rate 1 = lower 1");
    out
}

fn entropic_check() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = common::rng(99);
    let mut codes = 0;
    let mut tries = 0;
    while codes < 50 && tries < 2000 {
        tries += 1;
        let inst = common::random_instance(&mut rng, 3, 4, true);
        let t = rng.gen_range(1..=(4 / inst.n()).clamp(1, 2)) as u32;
        let m = rng.gen_range(2..=4usize);
        let (found, _) = find_all_codes(&inst, t, m, 2).expect("within guard");
        for code in found {
            if codes == 50 {
                break;
            }
            codes += 1;
            let verdict = check_code(&inst, &code).unwrap();
            out.check(verdict.is_valid(), || format!("enumerated code is not valid:\n{}", code.to_text()));
            let by_info = security_by_information(&inst, &code).unwrap();
            out.check(by_info == verdict.security_ok, || "counting and information criteria disagree".into());
            for v in entropic_violations(&inst, &code).unwrap() {
                out.failures.push(format!("{v} for code\n{}", code.to_text()));
            }
        }
    }
    out.check(codes == 50, || format!("only {codes} valid codes found"));
    out.detail = format!("{codes} codes");
    out
}

fn reduction_check() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = common::rng(5);
    for idx in 0..100 {
        let inst = common::random_instance(&mut rng, 6, 8, false);
        let analyzer = Analyzer::new(&inst);
        let gp = GPartition::build(&inst);
        let mais = mais_bound_with(&analyzer);
        let smais = smais_with(&analyzer, &gp, false).bound;
        out.check(smais == mais, || format!("#{idx}: smais {smais} ≠ mais {mais}"));
        let graph = ChainGraph::build(&analyzer, &gp);
        let sb = sbac_with(&analyzer, &gp, &graph);
        out.check(sb.chain.is_none() && sb.bound == BoundValue::NotApplicable, || {
            format!("#{idx}: sbac reports {}", sb.bound)
        });
    }
    out.detail = "100 instances".into();
    out
}

fn report(name: &str, started: Instant, outcome: Outcome) -> bool {
    let secs = started.elapsed().as_secs_f64();
    let ok = outcome.failures.is_empty();
    let tag = if ok && outcome.known.is_empty() { "PASS" } else { "FAIL" };
    println!("{tag} {name}: {} ({secs:.1} s)", outcome.detail);
    for f in outcome.failures.iter().take(10) {
        println!("    {f}");
    }
    if !outcome.known.is_empty() {
        println!("    {} violations of a documented deviation, first ones:", outcome.known.len());
        for f in outcome.known.iter().take(5) {
            println!("    {f}");
        }
    }
    ok
}

fn main() -> ExitCode {
    let mut ok = true;

    let t = Instant::now();
    ok &= report("ten-message reference instance", t, example_one_regression());

    let t = Instant::now();
    ok &= report("spm on the reference instance equals 2/7", t, spm_example_one());

    let t = Instant::now();
    let mut rng = common::rng(1);
    let instances: Vec<ProblemInstance> = (0..500).map(|_| common::random_instance(&mut rng, 6, 8, true)).collect();
    let (order, cells) = ordering_and_cells(&instances);
    let mid = Instant::now();
    ok &= report("bound ordering suite", t, order);
    ok &= report("cell equalities and height inequalities at the optimum", mid, cells);

    let t = Instant::now();
    ok &= report("oracle sandwich", t, oracle_sandwich());

    let t = Instant::now();
    ok &= report("entropic set function check", t, entropic_check());

    let t = Instant::now();
    ok &= report("reduction to the non-secure case", t, reduction_check());

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
