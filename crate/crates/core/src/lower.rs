//! The lower bound `C ≥ 1/(n - |S|)` from prohibition-chained message sets.
//!
//! Party `i` can run the decoder of party `r` once it knows `A_r`, so its
//! knowledge grows to the least fixed point `Ā_i` of `Ā ← Ā ∪ W_r` over
//! parties with `A_r ⊆ Ā`. A set `S = {i_1, …, i_k}` is chained when every
//! `i_ℓ` is prohibited at some party `j_ℓ` whose `Ā_{j_ℓ}` holds the earlier
//! elements.

use std::fmt;

use rayon::prelude::*;

use crate::bound::{format_rational, Rational};
use crate::mask::SubsetMask;
use crate::model::ProblemInstance;

/// `Ā_i` for the 1-based party `i`.
pub fn decoding_closure(instance: &ProblemInstance, party: usize) -> SubsetMask {
    closure_from(instance, instance.party(party).side_info)
}

fn closure_from(instance: &ProblemInstance, start: SubsetMask) -> SubsetMask {
    let mut known = start;
    loop {
        let grown =
            instance.parties().iter().filter(|p| p.side_info.is_subset_of(known)).fold(known, |acc, p| acc | p.wants);
        if grown == known {
            return known;
        }
        known = grown;
    }
}

/// Closures of every party, in party order.
pub fn decoding_closures(instance: &ProblemInstance) -> Vec<SubsetMask> {
    instance.parties().par_iter().map(|p| closure_from(instance, p.side_info)).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SecurityChainWitness {
    pub order: Vec<usize>,
    /// 1-based parties, one per position.
    pub attesting_parties: Vec<usize>,
}

impl SecurityChainWitness {
    pub fn messages(&self) -> SubsetMask {
        SubsetMask::from_messages(self.order.iter().copied())
    }

    /// Checks each position against the hypothesis directly.
    pub fn verify(&self, instance: &ProblemInstance) -> bool {
        if self.order.len() != self.attesting_parties.len() {
            return false;
        }
        let mut earlier = SubsetMask::EMPTY;
        for (&i, &j) in self.order.iter().zip(&self.attesting_parties) {
            if i == 0 || i > instance.n() || j == 0 || j > instance.m() || earlier.contains(i) {
                return false;
            }
            if !instance.party(j).prohibited.contains(i) || !earlier.is_subset_of(decoding_closure(instance, j)) {
                return false;
            }
            earlier = earlier.with(i);
        }
        true
    }
}

impl fmt::Display for SecurityChainWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.order.iter().zip(&self.attesting_parties).map(|(i, j)| format!("{i}@{j}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Largest chained set with a witness ordering; `None` when only `∅` is chained.
/// Among witnesses of maximum size the lexicographically smallest order is kept.
pub fn best_security_chain(instance: &ProblemInstance) -> (Option<SecurityChainWitness>, usize) {
    let n = instance.n();
    let closures = decoding_closures(instance);
    // parties able to attest message i after the set T, indexed by i
    let prohibiting: Vec<Vec<usize>> = (1..=n)
        .map(|i| {
            instance.parties().iter().enumerate().filter(|(_, p)| p.prohibited.contains(i)).map(|(j, _)| j).collect()
        })
        .collect();

    let size = 1usize << n;
    // best[T]: lexicographically smallest chained order of T, if any
    let mut best: Vec<Option<Vec<usize>>> = vec![None; size];
    best[0] = Some(Vec::new());
    let mut top = 0usize;
    for t in 1..size {
        let set = SubsetMask(t as u32);
        let mut choice: Option<Vec<usize>> = None;
        for i in set.messages() {
            let rest = set.without(i);
            let Some(prefix) = &best[rest.index()] else { continue };
            if !prohibiting[i - 1].iter().any(|&j| rest.is_subset_of(closures[j])) {
                continue;
            }
            let mut cand = prefix.clone();
            cand.push(i);
            if choice.as_ref().is_none_or(|c| cand < *c) {
                choice = Some(cand);
            }
        }
        if choice.is_some() {
            top = top.max(set.len());
        }
        best[t] = choice;
    }
    if top == 0 {
        return (None, 0);
    }
    let order =
        best.iter().filter_map(|o| o.as_ref()).filter(|o| o.len() == top).min().expect("a set of maximum size").clone();
    let mut earlier = SubsetMask::EMPTY;
    let mut parties = Vec::with_capacity(top);
    for &i in &order {
        let j = prohibiting[i - 1]
            .iter()
            .copied()
            .find(|&j| earlier.is_subset_of(closures[j]))
            .expect("attesting party exists");
        parties.push(j + 1);
        earlier = earlier.with(i);
    }
    (Some(SecurityChainWitness { order, attesting_parties: parties }), top)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LowerValue {
    Finite(Rational),
    /// Every message is chained: no valid code with `M ≥ 2` exists.
    Infeasible,
}

impl fmt::Display for LowerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerValue::Finite(r) => f.write_str(&format_rational(r)),
            LowerValue::Infeasible => f.write_str("infeasible"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBound {
    pub value: LowerValue,
    pub k: usize,
    pub witness: Option<SecurityChainWitness>,
    /// Parties whose closure meets their own prohibited set.
    pub self_leaking: Vec<usize>,
}

pub fn theorem2_lower(instance: &ProblemInstance) -> LowerBound {
    let n = instance.n();
    let (witness, k) = best_security_chain(instance);
    let value = if k == n {
        LowerValue::Infeasible
    } else {
        LowerValue::Finite(Rational::new(1.into(), ((n - k) as i64).into()))
    };
    let self_leaking = decoding_closures(instance)
        .iter()
        .zip(instance.parties())
        .enumerate()
        .filter(|(_, (c, p))| !c.is_disjoint(p.prohibited))
        .map(|(j, _)| j + 1)
        .collect();
    LowerBound { value, k, witness, self_leaking }
}
