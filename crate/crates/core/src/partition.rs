//! The g-partition of `2^[n]`.
//!
//! For every party `i` with `P_i ≠ ∅` and every `T ⊆ B_i^c`, the family
//! `N(i,T) = {T ∪ B_i \ {j} : j ∈ P_i} ∪ {T ∪ B_i}` is merged into one cell;
//! overlapping families are merged transitively. Sets in no family form the
//! residual cell `N_0`, which always takes the last id `γ`.

use serde_json::json;

use crate::mask::SubsetMask;
use crate::model::ProblemInstance;

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind { parent: (0..len as u32).collect(), size: vec![1; len] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Returns true when two different classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GPartition {
    n: usize,
    /// 0-based cell index per subset mask.
    cell_of: Vec<u32>,
    /// Members of each cell in ascending mask order; the last one is `N_0`.
    cells: Vec<Vec<SubsetMask>>,
}

/// Every family `N(i,T)` of one instance, generated on the fly.
pub fn families(instance: &ProblemInstance) -> impl Iterator<Item = Vec<SubsetMask>> + '_ {
    let n = instance.n();
    instance.parties().iter().filter(|p| !p.prohibited.is_empty()).flat_map(move |p| {
        p.interfering.complement(n).subsets().map(move |t| {
            let top = t | p.interfering;
            let mut fam: Vec<SubsetMask> = p.prohibited.messages().map(|j| top.without(j)).collect();
            fam.push(top);
            fam
        })
    })
}

impl GPartition {
    pub fn build(instance: &ProblemInstance) -> Self {
        Self::build_with_order(instance, false)
    }

    /// Builds with the family stream optionally reversed; the result must not
    /// depend on merge order.
    pub fn build_with_order(instance: &ProblemInstance, reversed: bool) -> Self {
        let n = instance.n();
        let total = 1usize << n;
        let mut uf = UnionFind::new(total);
        let mut covered = vec![false; total];
        let mut merge = |fam: Vec<SubsetMask>| {
            let head = fam[fam.len() - 1].index();
            for s in fam {
                covered[s.index()] = true;
                uf.union(head, s.index());
            }
        };
        if reversed {
            let all: Vec<_> = families(instance).collect();
            all.into_iter().rev().for_each(&mut merge);
        } else {
            families(instance).for_each(&mut merge);
        }

        const UNSET: u32 = u32::MAX;
        let mut id_of_root = vec![UNSET; total];
        let mut cell_of = vec![UNSET; total];
        let mut cells: Vec<Vec<SubsetMask>> = Vec::new();
        for s in 0..total {
            if !covered[s] {
                continue;
            }
            let root = uf.find(s);
            if id_of_root[root] == UNSET {
                id_of_root[root] = cells.len() as u32;
                cells.push(Vec::new());
            }
            let id = id_of_root[root];
            cell_of[s] = id;
            cells[id as usize].push(SubsetMask(s as u32));
        }
        let residual_id = cells.len() as u32;
        let mut residual = Vec::new();
        for (s, c) in cell_of.iter_mut().enumerate() {
            if *c == UNSET {
                *c = residual_id;
                residual.push(SubsetMask(s as u32));
            }
        }
        cells.push(residual);
        GPartition { n, cell_of, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `γ`, the number of cells including `N_0`.
    pub fn gamma(&self) -> usize {
        self.cells.len()
    }

    /// Number of g-subsets, `γ - 1`.
    pub fn g_subset_count(&self) -> usize {
        self.cells.len() - 1
    }

    /// 1-based cell id of a subset; `γ` means `N_0`.
    pub fn cell_id(&self, s: SubsetMask) -> usize {
        self.cell_of[s.index()] as usize + 1
    }

    /// 0-based cell index, used internally as a node id.
    pub(crate) fn cell_index(&self, s: SubsetMask) -> usize {
        self.cell_of[s.index()] as usize
    }

    /// Members of a cell by 1-based id.
    pub fn cell(&self, id: usize) -> &[SubsetMask] {
        &self.cells[id - 1]
    }

    pub fn cells(&self) -> &[Vec<SubsetMask>] {
        &self.cells
    }

    pub fn residual(&self) -> &[SubsetMask] {
        &self.cells[self.cells.len() - 1]
    }

    pub fn in_g_subset(&self, s: SubsetMask) -> bool {
        self.cell_index(s) + 1 < self.cells.len()
    }

    /// The "−" relation: equal sets, or distinct sets in a common g-subset.
    /// Two distinct members of `N_0` are never related.
    pub fn same_cell(&self, s: SubsetMask, s_prime: SubsetMask) -> bool {
        s == s_prime || (self.cell_of[s.index()] == self.cell_of[s_prime.index()] && self.in_g_subset(s))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let cells: Vec<Vec<Vec<usize>>> =
            self.cells.iter().map(|c| c.iter().map(|s| s.messages().collect()).collect()).collect();
        json!({ "gamma": self.gamma(), "cells": cells })
    }

    /// One line per cell: `N_k: {..} {..}`, with `N_0` last.
    pub fn to_text(&self) -> String {
        let mut out = format!("gamma={}\n", self.gamma());
        for (k, c) in self.cells.iter().enumerate() {
            let label = if k + 1 == self.cells.len() { "N_0".to_string() } else { format!("N_{}", k + 1) };
            let members: Vec<String> = c.iter().map(|s| s.to_string()).collect();
            out.push_str(&format!("{label}: {}\n", members.join(" ")));
        }
        out
    }
}

pub fn build_gpartition(instance: &ProblemInstance) -> GPartition {
    GPartition::build(instance)
}

pub fn same_cell(gp: &GPartition, s: SubsetMask, s_prime: SubsetMask) -> bool {
    gp.same_cell(s, s_prime)
}
