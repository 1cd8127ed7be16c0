//! Acyclic sets relative to a base set, `h_MAIS(S, S')`, and the MAIS bound.
//!
//! `K = {i_1, ..., i_k}` is acyclic with respect to `S` when every `i_l` is
//! requested by some party `j_l` with `S ∪ {i_1..i_l} ⊆ B_{j_l} ∪ W_{j_l}`.
//! The condition on the last element depends only on the prefix *set*, so
//! acyclicity is decided by a DP over subsets instead of over orderings.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::bound::BoundValue;
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::model::ProblemInstance;

/// An ordering of an acyclic set together with the parties attesting each
/// position. Both sequences are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AcyclicWitness {
    pub order: Vec<usize>,
    pub attesting_parties: Vec<usize>,
}

impl AcyclicWitness {
    pub fn messages(&self) -> SubsetMask {
        SubsetMask::from_messages(self.order.iter().copied())
    }

    /// Re-checks the definition position by position.
    pub fn verify(&self, instance: &ProblemInstance, base: SubsetMask) -> bool {
        if self.order.len() != self.attesting_parties.len() {
            return false;
        }
        let mut prefix = base;
        for (&i, &j) in self.order.iter().zip(&self.attesting_parties) {
            if i == 0 || i > instance.n() || j == 0 || j > instance.m() || base.contains(i) || prefix.contains(i) {
                return false;
            }
            prefix = prefix.with(i);
            let party = instance.party(j);
            if !party.wants.contains(i) || !prefix.is_subset_of(party.unknown()) {
                return false;
            }
        }
        true
    }
}

/// Per-instance tables shared by every bound computation.
///
/// `cover[U]` is the union of `W_j` over parties with `U ⊆ B_j ∪ W_j`, so
/// message `i ∈ U` can sit last in an acyclic prefix whose full set is `U`
/// exactly when `i ∈ cover[U]`.
pub struct Analyzer<'a> {
    instance: &'a ProblemInstance,
    cover: Vec<u32>,
    cache: Mutex<HashMap<(u32, u32), u32>>,
}

impl<'a> Analyzer<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Self {
        let n = instance.n();
        let mut cover = vec![0u32; 1 << n];
        for p in instance.parties() {
            cover[p.unknown().index()] |= p.wants.bits();
        }
        // superset OR-transform: cover[U] = OR of base[V] over V ⊇ U
        for bit in 0..n {
            let b = 1usize << bit;
            for u in 0..cover.len() {
                if u & b == 0 {
                    cover[u] |= cover[u | b];
                }
            }
        }
        Analyzer { instance, cover, cache: Mutex::new(HashMap::new()) }
    }

    pub fn instance(&self) -> &'a ProblemInstance {
        self.instance
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    /// Messages that some party can attest as the last element of a prefix
    /// whose full set (base included) is `set`.
    #[inline]
    pub fn attestable(&self, set: SubsetMask) -> SubsetMask {
        SubsetMask(self.cover[set.index()] & set.bits())
    }

    /// Weight of the lattice step `set → set ∪ {message}`: 1 when the added
    /// message is attested at the enlarged set, else 0.
    #[inline]
    pub fn step_weight(&self, set: SubsetMask, message: usize) -> u32 {
        let grown = set.with(message);
        u32::from(self.attestable(grown).contains(message))
    }

    /// Smallest party index (1-based) attesting `message` at `set`.
    pub fn attesting_party(&self, set: SubsetMask, message: usize) -> Option<usize> {
        self.instance
            .parties()
            .iter()
            .position(|p| p.wants.contains(message) && set.is_subset_of(p.unknown()))
            .map(|k| k + 1)
    }

    /// Runs the subset DP over `free` relative to `base`: entry `idx` (in the
    /// compressed index space of `free`) holds the last element of a witness
    /// ordering plus one, or 0 when that subset is not acyclic.
    fn acyclic_table(&self, base: SubsetMask, free: SubsetMask) -> Vec<u8> {
        let bits: Vec<usize> = free.messages().collect();
        let mut table = vec![0u8; 1 << bits.len()];
        for (idx, t) in free.subsets().enumerate().skip(1) {
            let ok = self.attestable(base | t);
            for (pos, &msg) in bits.iter().enumerate() {
                let b = 1usize << pos;
                if idx & b == 0 || !ok.contains(msg) {
                    continue;
                }
                let rest = idx ^ b;
                if rest == 0 || table[rest] != 0 {
                    table[idx] = msg as u8;
                    break;
                }
            }
        }
        table
    }

    fn reconstruct(&self, base: SubsetMask, set: SubsetMask, table: &[u8], free: SubsetMask) -> AcyclicWitness {
        let bits: Vec<usize> = free.messages().collect();
        let mut idx: usize = bits.iter().enumerate().filter(|(_, &m)| set.contains(m)).map(|(pos, _)| 1 << pos).sum();
        let mut rest = set;
        let mut order = Vec::with_capacity(set.len());
        let mut parties = Vec::with_capacity(set.len());
        while idx != 0 {
            let last = table[idx] as usize;
            let pos = bits.iter().position(|&m| m == last).expect("witness element in free set");
            parties.push(self.attesting_party(base | rest, last).expect("DP entry is attested"));
            order.push(last);
            rest = rest.without(last);
            idx ^= 1 << pos;
        }
        order.reverse();
        parties.reverse();
        AcyclicWitness { order, attesting_parties: parties }
    }

    /// Witness ordering for `set` acyclic with respect to `base`, if one exists.
    pub fn is_acyclic_wrt(&self, set: SubsetMask, base: SubsetMask) -> Result<Option<AcyclicWitness>> {
        if !set.is_disjoint(base) {
            return Err(Error::Precondition(format!("K = {set} overlaps S = {base}")));
        }
        if set.is_empty() {
            return Ok(Some(AcyclicWitness::default()));
        }
        let table = self.acyclic_table(base, set);
        if table[table.len() - 1] == 0 {
            return Ok(None);
        }
        Ok(Some(self.reconstruct(base, set, &table, set)))
    }

    /// Largest `|K|` over `K ⊆ S' \ S` acyclic with respect to `S`.
    pub fn h_mais(&self, base: SubsetMask, upper: SubsetMask) -> Result<u32> {
        if !base.is_subset_of(upper) {
            return Err(Error::Precondition(format!("S = {base} is not a subset of S' = {upper}")));
        }
        Ok(self.h_mais_unchecked(base, upper))
    }

    pub(crate) fn h_mais_unchecked(&self, base: SubsetMask, upper: SubsetMask) -> u32 {
        let key = (base.bits(), upper.bits());
        if let Some(&v) = self.cache.lock().expect("cache lock").get(&key) {
            return v;
        }
        let free = upper - base;
        let value = if free.is_empty() {
            0
        } else {
            let table = self.acyclic_table(base, free);
            free.subsets()
                .zip(&table)
                .filter(|(t, &last)| t.is_empty() || last != 0)
                .map(|(t, _)| t.len() as u32)
                .max()
                .unwrap_or(0)
        };
        self.cache.lock().expect("cache lock").insert(key, value);
        value
    }

    /// `h_MAIS(S, S')` together with a maximum acyclic set and its ordering.
    /// Among maximum sets the numerically smallest mask is returned.
    pub fn h_mais_witness(&self, base: SubsetMask, upper: SubsetMask) -> Result<(u32, AcyclicWitness)> {
        let value = self.h_mais(base, upper)?;
        let free = upper - base;
        if value == 0 {
            return Ok((0, AcyclicWitness::default()));
        }
        let table = self.acyclic_table(base, free);
        let best = free
            .subsets()
            .zip(&table)
            .find(|(t, &last)| last != 0 && t.len() as u32 == value)
            .map(|(t, _)| t)
            .expect("maximum acyclic set present in table");
        Ok((value, self.reconstruct(base, best, &table, free)))
    }
}

/// Free-function form of [`Analyzer::is_acyclic_wrt`].
pub fn is_acyclic_wrt(instance: &ProblemInstance, set: SubsetMask, base: SubsetMask) -> Result<Option<AcyclicWitness>> {
    Analyzer::new(instance).is_acyclic_wrt(set, base)
}

/// Free-function form of [`Analyzer::h_mais`].
pub fn h_mais(instance: &ProblemInstance, base: SubsetMask, upper: SubsetMask) -> Result<u32> {
    Analyzer::new(instance).h_mais(base, upper)
}

/// `1 / h_MAIS(∅, [n])`, or `+inf` when no receiver constrains the rate.
pub fn mais_bound(instance: &ProblemInstance) -> BoundValue {
    mais_bound_with(&Analyzer::new(instance))
}

pub fn mais_bound_with(analyzer: &Analyzer<'_>) -> BoundValue {
    let full = analyzer.instance().full();
    BoundValue::reciprocal(analyzer.h_mais_unchecked(SubsetMask::EMPTY, full) as u64)
}
