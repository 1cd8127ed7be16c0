mod common;

use proptest::prelude::*;
use rand::Rng;
use sic_core::acyclic::Analyzer;
use sic_core::bound::BoundValue;
use sic_core::chain::{chain_value, sbac_with_rule, ChainGraph, TerminalRule};
use sic_core::lower::{best_security_chain, decoding_closure, decoding_closures};
use sic_core::oracle::{check_code, find_all_codes, security_by_information, CodeTable};
use sic_core::{GPartition, ProblemInstance, SubsetMask};

fn instance(seed: u64, max_n: usize) -> ProblemInstance {
    common::random_instance(&mut common::rng(seed), max_n, 6, true)
}

/// Largest acyclic subset of `upper \ base`, straight from the definition.
fn brute_h_mais(inst: &ProblemInstance, base: SubsetMask, upper: SubsetMask) -> usize {
    fn extend(inst: &ProblemInstance, prefix: SubsetMask, left: SubsetMask) -> usize {
        let mut best = 0;
        for i in left.messages() {
            let grown = prefix.with(i);
            let attested =
                inst.parties().iter().any(|p| p.wants.contains(i) && grown.is_subset_of(p.interfering | p.wants));
            if attested {
                best = best.max(1 + extend(inst, grown, left.without(i)));
            }
        }
        best
    }
    extend(inst, base, upper - base)
}

/// Every chain of distinct messages, scored directly.
fn brute_sbac(inst: &ProblemInstance, rule: TerminalRule) -> BoundValue {
    let analyzer = Analyzer::new(inst);
    let gp = GPartition::build(inst);
    let graph = ChainGraph::build(&analyzer, &gp);
    let n = inst.n();
    let closes = |a: usize, b: usize| {
        let pair = SubsetMask::from_messages([a, b]);
        let in_cell = gp.in_g_subset(pair)
            && gp.cells()[..gp.g_subset_count()]
                .iter()
                .find(|c| c.contains(&pair))
                .is_some_and(|c| c.iter().any(|s| brute_h_mais(inst, SubsetMask::EMPTY, *s) >= 2));
        in_cell || (rule == TerminalRule::Reflexive && brute_h_mais(inst, SubsetMask::EMPTY, pair) >= 2)
    };
    let requested = inst.requested();
    let mut best = BoundValue::NotApplicable;
    let mut stack: Vec<Vec<usize>> = (1..=n).map(|i| vec![i]).collect();
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if path.len() >= 2 && closes(path[0], last) {
            let heights: Vec<_> =
                path.windows(2).map(|w| graph.height(SubsetMask::from_messages([w[0], w[1]]))).collect();
            let v = chain_value((path.len() - 1) as u64, &heights);
            if !best.is_applicable() || !best.at_most(&v) {
                best = v;
            }
        }
        if path.len() >= 2 && !requested.contains(last) {
            continue;
        }
        for next in 1..=n {
            if !path.contains(&next) {
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
    }
    best
}

fn random_code(seed: u64) -> (ProblemInstance, CodeTable) {
    let mut rng = common::rng(seed);
    let inst = common::random_instance(&mut rng, 3, 4, true);
    let t = rng.gen_range(1..=(4 / inst.n()).min(2)) as u32;
    let tuples = 1usize << (inst.n() * t as usize);
    let m = rng.gen_range(2..=tuples.min(6));
    let mut table: Vec<u16> = (0..tuples).map(|_| rng.gen_range(0..m) as u16).collect();
    for (y, slot) in table.iter_mut().take(m).enumerate() {
        *slot = y as u16;
    }
    let code = CodeTable::new(inst.n(), t, m as u32, table).unwrap();
    (inst, code)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn h_mais_matches_definition(seed in any::<u64>()) {
        let inst = instance(seed, 5);
        let a = Analyzer::new(&inst);
        let mut rng = common::rng(seed ^ 1);
        for _ in 0..20 {
            let (lower, upper) = common::random_pair(&mut rng, inst.n());
            prop_assert_eq!(a.h_mais(lower, upper).unwrap() as usize, brute_h_mais(&inst, lower, upper));
        }
    }

    #[test]
    fn h_mais_is_superadditive_and_monotone(seed in any::<u64>()) {
        let inst = instance(seed, 6);
        let a = Analyzer::new(&inst);
        let mut rng = common::rng(seed ^ 2);
        for _ in 0..20 {
            let (mid, top) = common::random_pair(&mut rng, inst.n());
            let low = SubsetMask(rng.gen_range(0..1u32 << inst.n()) & mid.bits());
            let h = |x, y| a.h_mais(x, y).unwrap();
            prop_assert!(h(low, top) >= h(low, mid) + h(mid, top));
            prop_assert!(h(low, mid) <= h(low, top));
            prop_assert!(h(low, top) as usize <= (top - low).len());
        }
    }

    #[test]
    fn chain_search_matches_enumeration(seed in any::<u64>()) {
        let inst = instance(seed, 5);
        let a = Analyzer::new(&inst);
        let gp = GPartition::build(&inst);
        let graph = ChainGraph::build(&a, &gp);
        for rule in [TerminalRule::Strict, TerminalRule::Reflexive] {
            let found = sbac_with_rule(&a, &gp, &graph, rule);
            prop_assert_eq!(&found.bound, &brute_sbac(&inst, rule));
            if let Some(c) = &found.chain {
                prop_assert!(c.verify(&a, &gp, &graph));
            }
        }
    }

    #[test]
    fn strict_chains_need_a_secure_instance(seed in any::<u64>()) {
        let inst = common::random_instance(&mut common::rng(seed), 5, 6, false);
        prop_assert_eq!(brute_sbac(&inst, TerminalRule::Strict), BoundValue::NotApplicable);
    }

    #[test]
    fn closures_grow_and_settle(seed in any::<u64>()) {
        let inst = instance(seed, 6);
        for (j, c) in decoding_closures(&inst).into_iter().enumerate() {
            let p = inst.party(j + 1);
            prop_assert!((p.side_info | p.wants).is_subset_of(c));
            prop_assert_eq!(c, decoding_closure(&inst, j + 1));
            let again = inst.parties().iter().filter(|r| r.side_info.is_subset_of(c)).fold(c, |acc, r| acc | r.wants);
            prop_assert_eq!(again, c);
        }
        if let (Some(w), k) = best_security_chain(&inst) {
            prop_assert_eq!(w.order.len(), k);
            prop_assert!(w.verify(&inst));
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let inst = instance(seed, 6);
        prop_assert_eq!(ProblemInstance::from_json(&inst.to_json()).unwrap(), inst);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn counting_security_matches_information(seed in any::<u64>()) {
        let (inst, code) = random_code(seed);
        let verdict = check_code(&inst, &code).unwrap();
        prop_assert_eq!(security_by_information(&inst, &code).unwrap(), verdict.security_ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Every codeword of a valid code has at least `2^{|S| t}` preimages for the chained set `S`.
    #[test]
    fn chained_sets_force_large_preimages(seed in any::<u64>()) {
        let inst = common::random_instance(&mut common::rng(seed), 3, 4, true);
        let (_, k) = best_security_chain(&inst);
        for m in 2..=4 {
            let (codes, _) = find_all_codes(&inst, 1, m, 5).unwrap();
            for code in codes {
                let mut counts = vec![0usize; m];
                for &y in code.table() {
                    counts[y as usize] += 1;
                }
                prop_assert!(counts.iter().all(|&c| c >= 1 << k));
            }
        }
    }
}
