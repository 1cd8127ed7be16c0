//! Secure MAIS bound.
//!
//! Every cell starts at `ρ_k = max_{S ∈ N_k} h_MAIS(∅, S)`. Between distinct
//! g-subsets, `ρ_k ← h_MAIS(S, S') + ρ_ℓ` whenever `S ∈ N_ℓ`, `S' ∈ N_k`,
//! `S ⊆ S'` and the update increases `ρ_k`. The fixpoint is a longest-path
//! relaxation over the cell graph with edge weight
//! `w(ℓ→k) = max h_MAIS(S, S')`; a positive cycle makes `ρ` diverge and the
//! bound degenerates to zero.

use std::collections::BTreeMap;

use crate::acyclic::Analyzer;
use crate::bound::BoundValue;
use crate::mask::SubsetMask;
use crate::model::ProblemInstance;
use crate::partition::GPartition;

/// The heaviest member pair behind one cell-graph edge. Cell ids are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellEdge {
    pub from_cell: usize,
    pub to_cell: usize,
    pub lower: SubsetMask,
    pub upper: SubsetMask,
    pub weight: u32,
}

/// One step of an update chain: `ρ_{edge.to_cell} = ρ_{edge.from_cell} + weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateChain {
    /// Cell where the chain starts, with its initial `ρ` and the set realizing it.
    pub start_cell: usize,
    pub start_set: SubsetMask,
    pub start_rho: u32,
    pub steps: Vec<CellEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SMaisResult {
    pub bound: BoundValue,
    /// Final `ρ` per cell (index `k - 1`); `None` marks divergence.
    pub rho: Vec<Option<u64>>,
    /// Initial `ρ` per cell.
    pub initial_rho: Vec<u32>,
    /// Set realizing the initial `ρ` of each cell.
    pub initial_set: Vec<SubsetMask>,
    /// Last improving update per cell.
    pub witness: Vec<Option<CellEdge>>,
    pub positive_cycle: bool,
    /// Cell attaining the maximum `ρ` (finite case).
    pub best_cell: Option<usize>,
}

impl SMaisResult {
    /// Walks the update edges back from `cell` to its initialization.
    pub fn update_chain(&self, cell: usize) -> Option<UpdateChain> {
        if self.positive_cycle {
            return None;
        }
        let mut steps = Vec::new();
        let mut cur = cell;
        while let Some(edge) = self.witness[cur - 1] {
            steps.push(edge);
            cur = edge.from_cell;
            if steps.len() > self.rho.len() {
                return None;
            }
        }
        steps.reverse();
        Some(UpdateChain {
            start_cell: cur,
            start_set: self.initial_set[cur - 1],
            start_rho: self.initial_rho[cur - 1],
            steps,
        })
    }
}

/// `h_MAIS(∅, T)` for every `T ⊆ [n]`, indexed by mask.
pub(crate) fn heights_from_empty(analyzer: &Analyzer<'_>) -> Vec<u8> {
    let n = analyzer.n();
    let mut h = vec![0u8; 1 << n];
    for t in 1..h.len() {
        let set = SubsetMask(t as u32);
        let mut best = 0;
        for m in set.messages() {
            let rest = set.without(m);
            best = best.max(h[rest.index()] + analyzer.step_weight(rest, m) as u8);
        }
        h[t] = best;
    }
    h
}

/// `h_MAIS(base, base ∪ D)` for every `D ⊆ [n] \ base`, in increasing order of `D`.
pub(crate) fn heights_above(analyzer: &Analyzer<'_>, base: SubsetMask) -> Vec<u8> {
    let free = base.complement(analyzer.n());
    let bits: Vec<usize> = free.messages().collect();
    let mut h = vec![0u8; 1 << bits.len()];
    for (idx, d) in free.subsets().enumerate().skip(1) {
        let set = base | d;
        let mut best = 0;
        for (pos, &m) in bits.iter().enumerate() {
            let b = 1usize << pos;
            if idx & b != 0 {
                best = best.max(h[idx ^ b] + analyzer.step_weight(set.without(m), m) as u8);
            }
        }
        h[idx] = best;
    }
    h
}

/// Heaviest member pair for every ordered pair of distinct, comparable g-subsets.
pub(crate) fn cell_edges(analyzer: &Analyzer<'_>, gp: &GPartition) -> Vec<CellEdge> {
    let n = analyzer.n();
    let mut best: BTreeMap<(usize, usize), CellEdge> = BTreeMap::new();
    for s in SubsetMask::all(n) {
        if !gp.in_g_subset(s) {
            continue;
        }
        let from = gp.cell_id(s);
        let heights = heights_above(analyzer, s);
        let free = s.complement(n);
        for (d, &h) in free.subsets().zip(&heights) {
            let t = s | d;
            if !gp.in_g_subset(t) {
                continue;
            }
            let to = gp.cell_id(t);
            if to == from {
                continue;
            }
            let h = h as u32;
            best.entry((from, to))
                .and_modify(|e| {
                    if h > e.weight {
                        *e = CellEdge { from_cell: from, to_cell: to, lower: s, upper: t, weight: h };
                    }
                })
                .or_insert(CellEdge { from_cell: from, to_cell: to, lower: s, upper: t, weight: h });
        }
    }
    best.into_values().collect()
}

pub fn smais(instance: &ProblemInstance, gp: &GPartition) -> SMaisResult {
    smais_with(&Analyzer::new(instance), gp, false)
}

/// Runs the relaxation; `reverse_edges` flips the edge scan order, which
/// must not change the fixpoint.
pub fn smais_with(analyzer: &Analyzer<'_>, gp: &GPartition, reverse_edges: bool) -> SMaisResult {
    let gamma = gp.gamma();
    let base = heights_from_empty(analyzer);
    let mut initial_rho = vec![0u32; gamma];
    let mut initial_set = vec![SubsetMask::EMPTY; gamma];
    for (k, cell) in gp.cells().iter().enumerate() {
        let mut best: Option<(u32, SubsetMask)> = None;
        for &s in cell {
            let h = base[s.index()] as u32;
            if best.is_none_or(|(b, _)| h > b) {
                best = Some((h, s));
            }
        }
        if let Some((h, s)) = best {
            initial_rho[k] = h;
            initial_set[k] = s;
        }
    }

    let mut edges = cell_edges(analyzer, gp);
    if reverse_edges {
        edges.reverse();
    }

    let nodes = gp.g_subset_count();
    let mut rho: Vec<u64> = initial_rho.iter().map(|&r| r as u64).collect();
    let mut witness: Vec<Option<CellEdge>> = vec![None; gamma];
    let mut positive_cycle = false;
    let mut improved_last = Vec::new();
    for round in 0..=nodes {
        improved_last.clear();
        for e in &edges {
            let cand = rho[e.from_cell - 1] + e.weight as u64;
            if cand > rho[e.to_cell - 1] {
                rho[e.to_cell - 1] = cand;
                witness[e.to_cell - 1] = Some(*e);
                improved_last.push(e.to_cell);
            }
        }
        if improved_last.is_empty() {
            break;
        }
        if round == nodes {
            positive_cycle = true;
        }
    }

    let mut final_rho: Vec<Option<u64>> = rho.iter().map(|&r| Some(r)).collect();
    if positive_cycle {
        // everything reachable from a still-improving cell diverges
        let mut stack = improved_last.clone();
        while let Some(c) = stack.pop() {
            if final_rho[c - 1].is_none() {
                continue;
            }
            final_rho[c - 1] = None;
            stack.extend(edges.iter().filter(|e| e.from_cell == c).map(|e| e.to_cell));
        }
    }

    let (bound, best_cell) = if positive_cycle {
        (BoundValue::DegenerateZero, None)
    } else {
        let (k, &max) =
            rho.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).expect("at least the residual cell");
        (BoundValue::reciprocal(max), Some(k + 1))
    };
    SMaisResult { bound, rho: final_rho, initial_rho, initial_set, witness, positive_cycle, best_cell }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acyclic::mais_bound;
    use crate::bound::ratio;
    use crate::fixtures;

    #[test]
    fn example_one_is_one_third() {
        let inst = fixtures::example_one();
        let gp = GPartition::build(&inst);
        let r = smais(&inst, &gp);
        assert_eq!(r.bound, BoundValue::Finite(ratio(1, 3)));
        let chain = r.update_chain(r.best_cell.unwrap()).unwrap();
        let total: u32 = chain.start_rho + chain.steps.iter().map(|s| s.weight).sum::<u32>();
        assert_eq!(total, 3);
    }

    #[test]
    fn non_secure_matches_mais() {
        let inst = fixtures::parity();
        let gp = GPartition::build(&inst);
        assert_eq!(smais(&inst, &gp).bound, mais_bound(&inst));
    }

    #[test]
    fn lattice_heights_agree_with_subset_dp() {
        let inst = fixtures::example_one();
        let a = Analyzer::new(&inst);
        let base = heights_from_empty(&a);
        for t in [0b1111111111u32, 0b100100, 0b1011, 0b110100001] {
            let s = SubsetMask(t);
            assert_eq!(base[s.index()] as u32, a.h_mais(SubsetMask::EMPTY, s).unwrap());
        }
        let lower = SubsetMask::from_messages([1, 6]);
        let above = heights_above(&a, lower);
        for (d, &h) in lower.complement(10).subsets().zip(&above).step_by(7) {
            assert_eq!(h as u32, a.h_mais(lower, lower | d).unwrap());
        }
    }
}
