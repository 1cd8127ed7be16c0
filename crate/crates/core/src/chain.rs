//! Chain heights over the subset lattice and the secure basic acyclic chain
//! bound.
//!
//! `h(S, S')` is `h_MAIS(S, S')` when `S ⊆ S'` and 0 otherwise. The height
//! `h(L)` is the supremum of `Σ h(L_j, L_{j+1})` over sequences starting at
//! `L` in which consecutive sets are either in one g-subset or nested.
//!
//! Every `⊆` step can be refined into single-element steps without changing
//! the supremum (a maximum acyclic set added first, the rest at weight 0), so
//! the search graph has one node per subset, single-element edges of weight
//! 0 or 1, and a zero-weight hub per g-subset joining its members. Heights
//! for all nodes come from one pass over the strongly connected components:
//! a component with a positive internal edge carries a positive cycle and
//! every node reaching it has infinite height.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;

use crate::acyclic::Analyzer;
use crate::bound::{BoundValue, Rational};
use crate::mask::SubsetMask;
use crate::model::ProblemInstance;
use crate::partition::GPartition;
use crate::smais::heights_from_empty;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(u64),
    Infinite,
}

impl Height {
    pub fn finite(self) -> Option<u64> {
        match self {
            Height::Finite(v) => Some(v),
            Height::Infinite => None,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(v) => write!(f, "{v}"),
            Height::Infinite => f.write_str("+inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// Same g-subset.
    SameCell,
    /// Nested, `L_j ⊆ L_{j+1}`.
    Subset,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::SameCell => "−",
            Relation::Subset => "⊆",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub relation: Relation,
    pub to: SubsetMask,
    pub contribution: u32,
}

/// `h(L)` and, when finite, a sequence realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainHeight {
    pub start: SubsetMask,
    pub value: Height,
    pub steps: Vec<ChainStep>,
}

impl ChainHeight {
    /// Checks every tagged relation and that contributions sum to the value.
    pub fn verify(&self, analyzer: &Analyzer<'_>, gp: &GPartition) -> bool {
        let Height::Finite(v) = self.value else {
            return self.steps.is_empty();
        };
        let mut cur = self.start;
        let mut total = 0u64;
        for s in &self.steps {
            let ok = match s.relation {
                Relation::SameCell => gp.same_cell(cur, s.to) && s.contribution == h_pair(analyzer, cur, s.to),
                Relation::Subset => cur.is_subset_of(s.to) && s.contribution == h_pair(analyzer, cur, s.to),
            };
            if !ok {
                return false;
            }
            total += s.contribution as u64;
            cur = s.to;
        }
        total == v
    }
}

impl fmt::Display for ChainHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for s in &self.steps {
            write!(f, " {} {} [+{}]", s.relation, s.to, s.contribution)?;
        }
        write!(f, "  (h = {})", self.value)
    }
}

/// `h_MAIS(S, S')` when `S ⊆ S'`, else 0.
pub fn h_pair(analyzer: &Analyzer<'_>, s: SubsetMask, s_prime: SubsetMask) -> u32 {
    if s.is_subset_of(s_prime) {
        analyzer.h_mais_unchecked(s, s_prime)
    } else {
        0
    }
}

/// Height of every subset under the `−`/`⊆` sequence relation, with the data
/// needed to rebuild a realizing sequence.
pub struct ChainGraph {
    n: usize,
    graph: DiGraph<(), u32>,
    comp_of: Vec<usize>,
    /// Height per node (sets first, then hubs).
    value: Vec<Height>,
    /// Best exit edge `(from, to, weight)` per finite component with positive value.
    exit: Vec<Option<(NodeIndex, NodeIndex, u32)>>,
}

impl ChainGraph {
    pub fn build(analyzer: &Analyzer<'_>, gp: &GPartition) -> Self {
        let n = analyzer.n();
        let sets = 1usize << n;
        let hubs = gp.g_subset_count();
        let mut graph: DiGraph<(), u32> = DiGraph::with_capacity(sets + hubs, n * sets / 2 + 2 * sets);
        for _ in 0..sets + hubs {
            graph.add_node(());
        }
        for s in SubsetMask::all(n) {
            for m in s.complement(n).messages() {
                graph.add_edge(
                    NodeIndex::new(s.index()),
                    NodeIndex::new(s.with(m).index()),
                    analyzer.step_weight(s, m),
                );
            }
            if gp.in_g_subset(s) {
                let hub = NodeIndex::new(sets + gp.cell_index(s));
                graph.add_edge(NodeIndex::new(s.index()), hub, 0);
                graph.add_edge(hub, NodeIndex::new(s.index()), 0);
            }
        }

        // tarjan_scc lists components sinks first
        let comps = tarjan_scc(&graph);
        let total = graph.node_count();
        let mut comp_of = vec![0usize; total];
        for (c, nodes) in comps.iter().enumerate() {
            for v in nodes {
                comp_of[v.index()] = c;
            }
        }
        let mut value = vec![Height::Finite(0); total];
        let mut exit = vec![None; comps.len()];
        for (c, nodes) in comps.iter().enumerate() {
            let mut best = Height::Finite(0);
            let mut best_exit = None;
            let mut cyclic = false;
            for &v in nodes {
                for e in graph.edges(v) {
                    let t = e.target();
                    let w = *e.weight();
                    if comp_of[t.index()] == c {
                        cyclic |= w > 0;
                        continue;
                    }
                    let cand = match value[t.index()] {
                        Height::Infinite => Height::Infinite,
                        Height::Finite(x) => Height::Finite(x + w as u64),
                    };
                    if cand > best {
                        best = cand;
                        best_exit = Some((v, t, w));
                    }
                }
            }
            if cyclic {
                best = Height::Infinite;
                best_exit = None;
            }
            for &v in nodes {
                value[v.index()] = best;
            }
            exit[c] = best_exit;
        }
        ChainGraph { n, graph, comp_of, value, exit }
    }

    pub fn height(&self, l: SubsetMask) -> Height {
        self.value[l.index()]
    }

    /// Zero-weight path inside one component.
    fn inner_path(&self, from: NodeIndex, to: NodeIndex) -> Vec<NodeIndex> {
        if from == to {
            return vec![from];
        }
        let comp = self.comp_of[from.index()];
        let mut prev = vec![usize::MAX; self.graph.node_count()];
        let mut queue = VecDeque::from([from]);
        prev[from.index()] = from.index();
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for e in self.graph.edges(v) {
                let t = e.target();
                if self.comp_of[t.index()] == comp && prev[t.index()] == usize::MAX {
                    prev[t.index()] = v.index();
                    queue.push_back(t);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to.index();
        while cur != from.index() {
            cur = prev[cur];
            path.push(NodeIndex::new(cur));
        }
        path.reverse();
        path
    }

    /// Rebuilds a sequence realizing `h(L)`.
    pub fn chain_height(&self, analyzer: &Analyzer<'_>, l: SubsetMask) -> ChainHeight {
        let value = self.height(l);
        let Height::Finite(mut remaining) = value else {
            return ChainHeight { start: l, value, steps: Vec::new() };
        };
        let sets = 1usize << self.n;
        let mut nodes = vec![NodeIndex::new(l.index())];
        let mut cur = NodeIndex::new(l.index());
        while remaining > 0 {
            let (x, y, w) = self.exit[self.comp_of[cur.index()]].expect("positive height has an exit");
            let inner = self.inner_path(cur, x);
            nodes.extend(inner.into_iter().skip(1));
            nodes.push(y);
            remaining -= w as u64;
            cur = y;
            debug_assert_eq!(self.value[cur.index()], Height::Finite(remaining));
        }

        // hubs become "−" steps; zero-weight single-element steps fold into the next "⊆" step
        let mut steps: Vec<ChainStep> = Vec::new();
        let mut from = l;
        let mut via_hub = false;
        for v in nodes.into_iter().skip(1) {
            if v.index() >= sets {
                via_hub = true;
                continue;
            }
            let to = SubsetMask(v.index() as u32);
            if via_hub {
                if to != from {
                    steps.push(ChainStep { relation: Relation::SameCell, to, contribution: 0 });
                }
                via_hub = false;
            } else {
                let w = analyzer.step_weight(from, (to - from).first().expect("single-element step"));
                match steps.last_mut() {
                    Some(last) if last.relation == Relation::Subset && last.contribution == 0 => {
                        last.to = to;
                        last.contribution = w;
                    }
                    _ => steps.push(ChainStep { relation: Relation::Subset, to, contribution: w }),
                }
            }
            from = to;
        }
        let mut prev = l;
        for s in &mut steps {
            s.contribution = h_pair(analyzer, prev, s.to);
            prev = s.to;
        }
        while steps.last().is_some_and(|s| s.contribution == 0) {
            steps.pop();
        }
        ChainHeight { start: l, value, steps }
    }
}

/// `h(L)` with a realizing sequence.
pub fn chain_height(instance: &ProblemInstance, gp: &GPartition, l: SubsetMask) -> ChainHeight {
    let analyzer = Analyzer::new(instance);
    ChainGraph::build(&analyzer, gp).chain_height(&analyzer, l)
}

/// A secure basic acyclic chain `i_1 ↔ i_2 ↔ … ↔ i_{m+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecureChain {
    pub messages: Vec<usize>,
    /// `h({i_j, i_{j+1}})` per edge.
    pub edge_heights: Vec<Height>,
    /// A set in the g-subset of `{i_1, i_{m+1}}` with `h_MAIS(∅, S) ≥ 2`.
    pub terminal_witness: SubsetMask,
    pub bound: BoundValue,
}

impl SecureChain {
    pub fn edge_count(&self) -> usize {
        self.messages.len() - 1
    }

    /// Re-checks the chain conditions: distinct messages, requested interior
    /// messages, the terminal witness, and the bound formula.
    pub fn verify(&self, analyzer: &Analyzer<'_>, gp: &GPartition, heights: &ChainGraph) -> bool {
        let inst = analyzer.instance();
        let m = self.edge_count();
        if m < 1 || self.edge_heights.len() != m {
            return false;
        }
        let all = SubsetMask::from_messages(self.messages.iter().copied());
        if all.len() != self.messages.len() {
            return false;
        }
        let requested = inst.requested();
        if !self.messages[1..m].iter().all(|&i| requested.contains(i)) {
            return false;
        }
        let ends = SubsetMask::from_messages([self.messages[0], self.messages[m]]);
        let w = self.terminal_witness;
        // the witness is the pair itself only under the reflexive rule
        let related = w == ends || (gp.in_g_subset(ends) && gp.same_cell(w, ends));
        if !related || analyzer.h_mais_unchecked(SubsetMask::EMPTY, w) < 2 {
            return false;
        }
        for (j, h) in self.edge_heights.iter().enumerate() {
            let pair = SubsetMask::from_messages([self.messages[j], self.messages[j + 1]]);
            if heights.height(pair) != *h {
                return false;
            }
        }
        self.bound == chain_value(m as u64, &self.edge_heights)
    }
}

impl fmt::Display for SecureChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.messages[0])?;
        for (j, h) in self.edge_heights.iter().enumerate() {
            write!(f, " <-[{h}]-> {}", self.messages[j + 1])?;
        }
        Ok(())
    }
}

/// `m / (1 + m + Σ h)`, or degenerate zero when some height is infinite.
pub fn chain_value(m: u64, heights: &[Height]) -> BoundValue {
    let mut sum = 0u64;
    for h in heights {
        match h {
            Height::Finite(v) => sum += v,
            Height::Infinite => return BoundValue::DegenerateZero,
        }
    }
    BoundValue::Finite(Rational::new(BigInt::from(m), BigInt::from(1 + m + sum)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SbacResult {
    /// Smallest chain bound; `n/a` when no chain exists.
    pub bound: BoundValue,
    pub chain: Option<SecureChain>,
    pub chains_examined: u64,
}

/// How the closing pair `{i_1, i_{m+1}}` must be related to its witness `S`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TerminalRule {
    /// The pair and `S` share a g-subset.
    #[default]
    Strict,
    /// As `Strict`, or `S` is the pair itself.
    Reflexive,
}

/// Which messages can close a chain with which, and the witness to use.
fn terminal_pairs(analyzer: &Analyzer<'_>, gp: &GPartition, rule: TerminalRule) -> Vec<Vec<Option<SubsetMask>>> {
    let n = analyzer.n();
    let base = heights_from_empty(analyzer);
    // first member with h_MAIS(∅, S) ≥ 2 in each g-subset
    let witness: Vec<Option<SubsetMask>> = gp.cells()[..gp.g_subset_count()]
        .iter()
        .map(|cell| cell.iter().copied().find(|s| base[s.index()] >= 2))
        .collect();
    let mut out = vec![vec![None; n + 1]; n + 1];
    for a in 1..=n {
        for b in a + 1..=n {
            let pair = SubsetMask::from_messages([a, b]);
            let mut w = if gp.in_g_subset(pair) { witness[gp.cell_index(pair)] } else { None };
            if w.is_none() && rule == TerminalRule::Reflexive && base[pair.index()] >= 2 {
                w = Some(pair);
            }
            out[a][b] = w;
            out[b][a] = w;
        }
    }
    out
}

struct Search<'s> {
    n: usize,
    height: &'s [Vec<Height>],
    terminal: &'s [Vec<Option<SubsetMask>>],
    requested: SubsetMask,
    max_height: u64,
    /// Some pair has an infinite height, so a chain may still reach 0.
    any_infinite: bool,
    /// Best (numerator, denominator) so far, compared exactly.
    best: Option<(u64, u64)>,
    best_chain: Vec<usize>,
    path: Vec<usize>,
    examined: u64,
    degenerate: Option<Vec<usize>>,
}

impl Search<'_> {
    fn better(&self, num: u64, den: u64) -> bool {
        self.best.is_none_or(|(bn, bd)| (num as u128) * (bd as u128) < (bn as u128) * (den as u128))
    }

    /// Smallest value any extension of the current path could reach.
    fn prospect(&self, m: u64, sum: u64, extra: u64) -> (u64, u64) {
        let k = m.max(1);
        let stop = (k, 1 + k + sum + (k - m) * self.max_height);
        let longest = (m + extra, 1 + m + extra + sum + extra * self.max_height);
        if (stop.0 as u128) * (longest.1 as u128) <= (longest.0 as u128) * (stop.1 as u128) {
            stop
        } else {
            longest
        }
    }

    fn dfs(&mut self, used: SubsetMask, sum: u64) {
        if self.degenerate.is_some() {
            return;
        }
        let first = self.path[0];
        let last = *self.path.last().expect("non-empty path");
        let m = (self.path.len() - 1) as u64;
        if m >= 1 && self.terminal[first][last].is_some() {
            self.examined += 1;
            if self.better(m, 1 + m + sum) {
                self.best = Some((m, 1 + m + sum));
                self.best_chain = self.path.clone();
            }
        }
        if m >= 1 && !self.requested.contains(last) {
            return;
        }
        let extra = (self.n - self.path.len()) as u64;
        if extra == 0 {
            return;
        }
        let (pn, pd) = self.prospect(m, sum, extra);
        if !self.any_infinite && !self.better(pn, pd) && self.best.is_some() {
            return;
        }
        for next in 1..=self.n {
            if used.contains(next) {
                continue;
            }
            match self.height[last][next] {
                Height::Infinite => {
                    // an infinite edge forces the chain bound to zero if the chain can close
                    self.path.push(next);
                    if let Some(p) = self.closable(used.with(next)) {
                        self.degenerate = Some(p);
                        self.path.pop();
                        return;
                    }
                    self.path.pop();
                }
                Height::Finite(h) => {
                    self.path.push(next);
                    self.dfs(used.with(next), sum + h);
                    self.path.pop();
                }
            }
        }
    }

    /// Extends the current path (ignoring heights) until it can close, if possible.
    fn closable(&mut self, used: SubsetMask) -> Option<Vec<usize>> {
        let first = self.path[0];
        let last = *self.path.last().expect("non-empty path");
        if self.path.len() >= 2 && self.terminal[first][last].is_some() {
            return Some(self.path.clone());
        }
        if !self.requested.contains(last) {
            return None;
        }
        for next in 1..=self.n {
            if used.contains(next) {
                continue;
            }
            self.path.push(next);
            let found = self.closable(used.with(next));
            self.path.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Smallest secure basic acyclic chain bound over all chains.
pub fn sbac(instance: &ProblemInstance, gp: &GPartition) -> SbacResult {
    let analyzer = Analyzer::new(instance);
    let graph = ChainGraph::build(&analyzer, gp);
    sbac_with(&analyzer, gp, &graph)
}

pub fn sbac_with(analyzer: &Analyzer<'_>, gp: &GPartition, graph: &ChainGraph) -> SbacResult {
    sbac_with_rule(analyzer, gp, graph, TerminalRule::Strict)
}

pub fn sbac_with_rule(analyzer: &Analyzer<'_>, gp: &GPartition, graph: &ChainGraph, rule: TerminalRule) -> SbacResult {
    let n = analyzer.n();
    let terminal = terminal_pairs(analyzer, gp, rule);
    if terminal.iter().all(|row| row.iter().all(Option::is_none)) {
        return SbacResult { bound: BoundValue::NotApplicable, chain: None, chains_examined: 0 };
    }
    let mut height = vec![vec![Height::Finite(0); n + 1]; n + 1];
    let mut max_height = 0;
    let mut any_infinite = false;
    for a in 1..=n {
        for b in a + 1..=n {
            let h = graph.height(SubsetMask::from_messages([a, b]));
            height[a][b] = h;
            height[b][a] = h;
            match h {
                Height::Finite(v) => max_height = max_height.max(v),
                Height::Infinite => any_infinite = true,
            }
        }
    }
    let mut search = Search {
        n,
        height: &height,
        terminal: &terminal,
        requested: analyzer.instance().requested(),
        max_height,
        any_infinite,
        best: None,
        best_chain: Vec::new(),
        path: Vec::with_capacity(n),
        examined: 0,
        degenerate: None,
    };
    for start in 1..=n {
        search.path.clear();
        search.path.push(start);
        search.dfs(SubsetMask::singleton(start), 0);
        if search.degenerate.is_some() {
            break;
        }
    }
    let examined = search.examined;
    let messages = match (search.degenerate.take(), search.best) {
        (Some(p), _) => p,
        (None, Some(_)) => search.best_chain.clone(),
        (None, None) => {
            return SbacResult { bound: BoundValue::NotApplicable, chain: None, chains_examined: examined };
        }
    };
    let edge_heights: Vec<Height> = messages.windows(2).map(|w| height[w[0]][w[1]]).collect();
    let m = messages.len() - 1;
    let bound = chain_value(m as u64, &edge_heights);
    let terminal_witness = terminal[messages[0]][messages[m]].expect("closing pair has a witness");
    let chain = SecureChain { messages, edge_heights, terminal_witness, bound: bound.clone() };
    SbacResult { bound, chain: Some(chain), chains_examined: examined }
}
