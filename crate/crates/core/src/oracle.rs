//! Exhaustive search over small deterministic codes.
//!
//! Messages are uniform binary strings of a common length `t`; a code maps
//! each of the `2^{nt}` message tuples onto one of `M` codewords. Message
//! `k` occupies bits `(k-1)t .. kt` of the tuple index. Codewords are
//! 0-based.
//!
//! Encoders are enumerated up to relabeling of codewords: the first
//! occurrences of codeword values appear in increasing order. Partial tables
//! are pruned by decoding conflicts and by a counting argument on the
//! security constraints.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::bound::{BoundValue, Rational};
use crate::error::{Error, Result};
use crate::loglin::LogLinear;
use crate::mask::SubsetMask;
use crate::model::ProblemInstance;

pub const MAX_TUPLE_BITS: usize = 12;
pub const MAX_CODEWORDS: usize = 16;

/// The rate `t / log₂ M`, compared exactly through integer powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rate {
    pub t: u32,
    pub m: u64,
}

impl Rate {
    pub fn new(t: u32, m: u64) -> Self {
        assert!(m >= 2, "rate needs at least two codewords");
        Rate { t, m }
    }

    /// `2^{qt}` against `M^p` for `r = p/q > 0`.
    fn cmp_rational(&self, r: &Rational) -> Ordering {
        if !r.is_positive() {
            return Ordering::Greater;
        }
        let p = r.numer().to_u32().expect("small numerator");
        let q = r.denom().to_u32().expect("small denominator");
        let lhs = BigUint::from(2u32).pow(q * self.t);
        let rhs = BigUint::from(self.m).pow(p);
        lhs.cmp(&rhs)
    }

    pub fn at_most(&self, r: &Rational) -> bool {
        self.cmp_rational(r) != Ordering::Greater
    }

    pub fn at_least(&self, r: &Rational) -> bool {
        self.cmp_rational(r) != Ordering::Less
    }

    /// True when the rate does not exceed an upper bound.
    pub fn within(&self, bound: &BoundValue) -> bool {
        match bound {
            BoundValue::Finite(r) => self.at_most(r),
            BoundValue::Infinite | BoundValue::NotApplicable => true,
            BoundValue::DegenerateZero => false,
        }
    }

    /// Exact value when `M` is a power of two.
    pub fn as_rational(&self) -> Option<Rational> {
        self.m.is_power_of_two().then(|| Rational::new(self.t.into(), self.m.trailing_zeros().into()))
    }

    pub fn to_f64(&self) -> f64 {
        self.t as f64 / (self.m as f64).log2()
    }
}

impl Ord for Rate {
    fn cmp(&self, other: &Self) -> Ordering {
        // t1 / log m1 against t2 / log m2, i.e. m2^t1 against m1^t2
        let a = BigUint::from(other.m).pow(self.t);
        let b = BigUint::from(self.m).pow(other.t);
        a.cmp(&b)
    }
}

impl PartialOrd for Rate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => f.write_str(&crate::bound::format_rational(&r)),
            None => write!(f, "{}/log2({})", self.t, self.m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeTable {
    n: usize,
    t: u32,
    m: u32,
    encode: Vec<u16>,
}

impl CodeTable {
    pub fn new(n: usize, t: u32, m: u32, encode: Vec<u16>) -> Result<Self> {
        let bits = n * t as usize;
        if bits > 24 {
            return Err(Error::DimensionMismatch(format!("n·t = {bits} is too large")));
        }
        if encode.len() != 1 << bits {
            return Err(Error::DimensionMismatch(format!(
                "expected {} table entries, got {}",
                1usize << bits,
                encode.len()
            )));
        }
        if let Some(&y) = encode.iter().find(|&&y| y as u32 >= m) {
            return Err(Error::DimensionMismatch(format!("codeword {y} outside [0, {m})")));
        }
        if t >= 1 && m < 2 {
            return Err(Error::Precondition("a code with t ≥ 1 needs M ≥ 2".into()));
        }
        let mut seen = vec![false; m as usize];
        for &y in &encode {
            seen[y as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Precondition("encoder is not surjective".into()));
        }
        Ok(CodeTable { n, t, m, encode })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn table(&self) -> &[u16] {
        &self.encode
    }

    pub fn rate(&self) -> Rate {
        Rate::new(self.t, self.m as u64)
    }

    pub fn tuples(&self) -> usize {
        self.encode.len()
    }

    /// Bits of the tuple index holding the messages of `set`.
    pub fn block(&self, set: SubsetMask) -> u32 {
        block_mask(set, self.t)
    }

    /// Value of message `k` (1-based) in tuple `x`.
    pub fn message_value(&self, x: usize, k: usize) -> u32 {
        ((x >> ((k - 1) * self.t as usize)) as u32) & ((1u32 << self.t) - 1)
    }

    /// One line per tuple: message bit strings, then the codeword.
    pub fn to_text(&self) -> String {
        let mut out = format!("t={} M={}\n", self.t, self.m);
        for (x, y) in self.encode.iter().enumerate() {
            let words: Vec<String> = (1..=self.n)
                .map(|k| format!("{:0width$b}", self.message_value(x, k), width = self.t as usize))
                .collect();
            out.push_str(&format!("{} -> {y}\n", words.join(" ")));
        }
        out
    }
}

fn block_mask(set: SubsetMask, t: u32) -> u32 {
    let word = (1u32 << t) - 1;
    set.messages().fold(0, |acc, k| acc | (word << ((k - 1) * t as usize)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecurityCheck {
    /// 1-based party.
    pub party: usize,
    pub message: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeVerdict {
    /// Per party; eavesdroppers pass vacuously.
    pub decoding_ok: Vec<bool>,
    pub security_ok: Vec<SecurityCheck>,
    pub rate: Rate,
}

impl CodeVerdict {
    pub fn is_valid(&self) -> bool {
        self.decoding_ok.iter().all(|&b| b) && self.security_ok.iter().all(|s| s.ok)
    }
}

fn check_dims(instance: &ProblemInstance, code: &CodeTable) -> Result<()> {
    if code.n != instance.n() {
        return Err(Error::DimensionMismatch(format!("code has n = {}, instance has n = {}", code.n, instance.n())));
    }
    Ok(())
}

/// Checks decodability and the counting form of zero leakage for every party.
pub fn check_code(instance: &ProblemInstance, code: &CodeTable) -> Result<CodeVerdict> {
    check_dims(instance, code)?;
    let mut decoding_ok = Vec::with_capacity(instance.m());
    let mut security_ok = Vec::new();
    for (idx, p) in instance.parties().iter().enumerate() {
        let a = code.block(p.side_info);
        let w = code.block(p.wants);
        let mut seen: HashMap<(u16, u32), u32> = HashMap::new();
        let mut ok = true;
        for (x, &y) in code.encode.iter().enumerate() {
            let x = x as u32;
            let v = *seen.entry((y, x & a)).or_insert(x & w);
            ok &= v == x & w;
        }
        decoding_ok.push(ok);
        for j in p.prohibited.messages() {
            security_ok.push(SecurityCheck { party: idx + 1, message: j, ok: counts_balanced(code, a, j) });
        }
    }
    Ok(CodeVerdict { decoding_ok, security_ok, rate: code.rate() })
}

/// For every `(y, x_A)`, the number of preimages is the same for each value of `x_j`.
fn counts_balanced(code: &CodeTable, a: u32, j: usize) -> bool {
    let values = 1usize << code.t;
    let mut counts: HashMap<(u16, u32), Vec<u32>> = HashMap::new();
    for (x, &y) in code.encode.iter().enumerate() {
        let v = code.message_value(x, j) as usize;
        counts.entry((y, x as u32 & a)).or_insert_with(|| vec![0; values])[v] += 1;
    }
    counts.values().all(|c| c.iter().all(|&k| k == c[0]))
}

/// `H(Y | X_given)` in bits.
pub fn conditional_entropy(code: &CodeTable, given: SubsetMask) -> LogLinear {
    let g = code.block(given);
    let mut counts: HashMap<(u32, u16), u64> = HashMap::new();
    for (x, &y) in code.encode.iter().enumerate() {
        *counts.entry((x as u32 & g, y)).or_default() += 1;
    }
    // each conditioning value carries 2^{free bits} tuples; H = free bits - avg Σ c log c / 2^{free}
    let total = code.tuples() as u64;
    let mut acc =
        LogLinear::rational(Rational::from_integer(((code.n * code.t as usize) - (g.count_ones() as usize)).into()));
    for &c in counts.values() {
        if c > 1 {
            let weight = Rational::new((c as i64).into(), (total as i64).into());
            acc = &acc - &(&LogLinear::log2(c) * &weight);
        }
    }
    acc
}

/// `g(S)·log₂ M = H(Y | X_{S^c})` for every `S`, indexed by mask.
pub fn entropic_g(code: &CodeTable) -> Vec<LogLinear> {
    SubsetMask::all(code.n).map(|s| conditional_entropy(code, s.complement(code.n))).collect()
}

/// `I(X_j; Y | X_given)` exactly.
pub fn conditional_mutual_information(code: &CodeTable, j: usize, given: SubsetMask) -> LogLinear {
    &conditional_entropy(code, given) - &conditional_entropy(code, given.with(j))
}

/// Security checks recomputed from the mutual information itself.
pub fn security_by_information(instance: &ProblemInstance, code: &CodeTable) -> Result<Vec<SecurityCheck>> {
    check_dims(instance, code)?;
    let mut out = Vec::new();
    for (idx, p) in instance.parties().iter().enumerate() {
        for j in p.prohibited.messages() {
            let i = conditional_mutual_information(code, j, p.side_info);
            out.push(SecurityCheck { party: idx + 1, message: j, ok: i.is_zero() });
        }
    }
    Ok(out)
}

/// Checks the polymatroid, security and rate properties of the entropic
/// set function of a valid code, all scaled by `log₂ M`. Returns the failed
/// properties.
pub fn entropic_violations(instance: &ProblemInstance, code: &CodeTable) -> Result<Vec<String>> {
    check_dims(instance, code)?;
    let n = code.n;
    let h = entropic_g(code);
    let at = |s: SubsetMask| &h[s.index()];
    let mut out = Vec::new();
    if !at(SubsetMask::EMPTY).is_zero() {
        out.push("g(∅) ≠ 0".into());
    }
    if (&LogLinear::log2(code.m as u64) - at(instance.full())).signum() < 0 {
        out.push("g([n]) > 1".into());
    }
    for s in SubsetMask::all(n) {
        for s2 in SubsetMask::all(n) {
            if s.is_subset_of(s2) && (at(s2) - at(s)).signum() < 0 {
                out.push(format!("monotonicity fails at {s} ⊆ {s2}"));
            }
            let lhs = at(s & s2) + at(s | s2);
            if (&(at(s) + at(s2)) - &lhs).signum() < 0 {
                out.push(format!("submodularity fails at {s}, {s2}"));
            }
        }
    }
    let t = Rational::from_integer(code.t.into());
    for (idx, p) in instance.parties().iter().enumerate() {
        for j in p.prohibited.messages() {
            if at(p.interfering) != at(p.interfering.without(j)) {
                out.push(format!("security fails at party {} for {j}", idx + 1));
            }
        }
        if !p.wants.is_empty() {
            let target = LogLinear::rational(&t * Rational::from_integer((p.wants.len() as i64).into()));
            if at(p.unknown()) - at(p.interfering) != target {
                out.push(format!("rate equality fails at party {}", idx + 1));
            }
        }
    }
    Ok(out)
}

fn guard(instance: &ProblemInstance, t: u32, m: usize) -> Result<()> {
    let nt = instance.n() * t as usize;
    if nt > MAX_TUPLE_BITS || m > MAX_CODEWORDS {
        return Err(Error::GuardExceeded { nt, m });
    }
    Ok(())
}

struct Receiver {
    slice: Vec<u16>,
    want: Vec<u16>,
    slices: usize,
}

struct Secrecy {
    slice: Vec<u16>,
    group: Vec<u8>,
    slices: usize,
}

/// Incremental state of the pruned enumeration at one `(t, M)`.
struct Search {
    tuples: usize,
    values: usize,
    m: usize,
    receivers: Vec<Receiver>,
    /// Per receiver: `(stored x_W, refcount)` per `(y, slice)`.
    decoded: Vec<Vec<(u16, u32)>>,
    secrecy: Vec<Secrecy>,
    /// Per constraint: counts per `(slice, group, y)` and unassigned per `(slice, group)`.
    counts: Vec<Vec<u32>>,
    remaining: Vec<Vec<u32>>,
    table: Vec<u16>,
}

fn compress(x: u32, mask: u32) -> u16 {
    let mut out = 0u32;
    let mut bit = 0;
    let mut m = mask;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if x & low != 0 {
            out |= 1 << bit;
        }
        bit += 1;
        m &= m - 1;
    }
    out as u16
}

impl Search {
    fn new(instance: &ProblemInstance, t: u32, m: usize) -> Self {
        let n = instance.n();
        let tuples = 1usize << (n * t as usize);
        let values = 1usize << t;
        let mut receivers = Vec::new();
        let mut secrecy = Vec::new();
        for p in instance.parties() {
            let a = block_mask(p.side_info, t);
            let slices = 1usize << a.count_ones();
            let slice: Vec<u16> = (0..tuples as u32).map(|x| compress(x, a)).collect();
            if !p.wants.is_empty() {
                let w = block_mask(p.wants, t);
                let want = (0..tuples as u32).map(|x| compress(x, w)).collect();
                receivers.push(Receiver { slice: slice.clone(), want, slices });
            }
            for j in p.prohibited.messages() {
                let shift = (j - 1) * t as usize;
                let group = (0..tuples).map(|x| ((x >> shift) & (values - 1)) as u8).collect();
                secrecy.push(Secrecy { slice: slice.clone(), group, slices });
            }
        }
        let decoded = receivers.iter().map(|r| vec![(0, 0); r.slices * m]).collect();
        let counts = secrecy.iter().map(|s| vec![0; s.slices * values * m]).collect();
        let remaining =
            secrecy.iter().map(|s| vec![(tuples / (s.slices * values)) as u32; s.slices * values]).collect();
        Search { tuples, values, m, receivers, decoded, secrecy, counts, remaining, table: vec![0; tuples] }
    }

    /// Assigns `x ↦ y`; returns false (after undoing) when a constraint breaks.
    fn assign(&mut self, x: usize, y: usize) -> bool {
        let mut r_done = 0;
        let mut ok = true;
        for (r, rec) in self.receivers.iter().enumerate() {
            let cell = &mut self.decoded[r][y * rec.slices + rec.slice[x] as usize];
            if cell.1 > 0 && cell.0 != rec.want[x] {
                ok = false;
                break;
            }
            cell.0 = rec.want[x];
            cell.1 += 1;
            r_done += 1;
        }
        let mut s_done = 0;
        if ok {
            for c in 0..self.secrecy.len() {
                self.bump(c, x, y, true);
                s_done += 1;
                if !self.balanced_possible(c, x, y) {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            self.table[x] = y as u16;
            return true;
        }
        for c in 0..s_done {
            self.bump(c, x, y, false);
        }
        for r in 0..r_done {
            let rec = &self.receivers[r];
            self.decoded[r][y * rec.slices + rec.slice[x] as usize].1 -= 1;
        }
        false
    }

    fn unassign(&mut self, x: usize, y: usize) {
        for c in 0..self.secrecy.len() {
            self.bump(c, x, y, false);
        }
        for (r, rec) in self.receivers.iter().enumerate() {
            self.decoded[r][y * rec.slices + rec.slice[x] as usize].1 -= 1;
        }
    }

    fn bump(&mut self, c: usize, x: usize, y: usize, up: bool) {
        let s = &self.secrecy[c];
        let sg = s.slice[x] as usize * self.values + s.group[x] as usize;
        if up {
            self.counts[c][sg * self.m + y] += 1;
            self.remaining[c][sg] -= 1;
        } else {
            self.counts[c][sg * self.m + y] -= 1;
            self.remaining[c][sg] += 1;
        }
    }

    /// Whether the groups of the touched slice can still end with equal histograms.
    fn balanced_possible(&self, c: usize, x: usize, y: usize) -> bool {
        let s = &self.secrecy[c];
        let base = s.slice[x] as usize * self.values;
        let g = base + s.group[x] as usize;
        let counts = &self.counts[c];
        let remaining = &self.remaining[c];
        for h in base..base + self.values {
            if h == g {
                continue;
            }
            if counts[g * self.m + y] > counts[h * self.m + y] + remaining[h] {
                return false;
            }
            for yy in 0..self.m {
                if counts[h * self.m + yy] > counts[g * self.m + yy] + remaining[g] {
                    return false;
                }
            }
        }
        true
    }

    /// Depth-first over canonical colorings; `visit` returns false to stop.
    fn run(&mut self, x: usize, used: usize, visit: &mut dyn FnMut(&[u16]) -> bool) -> bool {
        if x == self.tuples {
            return if used == self.m { visit(&self.table) } else { true };
        }
        if self.tuples - x < self.m - used {
            return true;
        }
        let top = (used + 1).min(self.m);
        for y in 0..top {
            if !self.assign(x, y) {
                continue;
            }
            let go_on = self.run(x + 1, used.max(y + 1), visit);
            self.unassign(x, y);
            if !go_on {
                return false;
            }
        }
        true
    }
}

fn search(instance: &ProblemInstance, t: u32, m: usize, visit: &mut dyn FnMut(&[u16]) -> bool) -> Result<()> {
    guard(instance, t, m)?;
    let tuples = 1usize << (instance.n() * t as usize);
    // a receiver separates all values of x_W under a fixed x_A
    let floor = instance.parties().iter().map(|p| 1usize << (p.wants.len() * t as usize)).max().unwrap_or(1);
    if m < 2.max(floor) || m > tuples {
        return Ok(());
    }
    Search::new(instance, t, m).run(0, 0, visit);
    Ok(())
}

/// A valid code at exactly `(t, M)`, if one exists.
pub fn find_code(instance: &ProblemInstance, t: u32, m: usize) -> Result<Option<CodeTable>> {
    let mut found = None;
    search(instance, t, m, &mut |table| {
        found = Some(table.to_vec());
        false
    })?;
    let Some(table) = found else { return Ok(None) };
    let code = CodeTable::new(instance.n(), t, m as u32, table)?;
    debug_assert!(check_code(instance, &code)?.is_valid());
    Ok(Some(code))
}

pub fn is_feasible_at(instance: &ProblemInstance, t: u32, m: usize) -> Result<bool> {
    Ok(find_code(instance, t, m)?.is_some())
}

/// Every valid code at `(t, M)` up to codeword relabeling, at most `limit`.
/// The flag reports truncation.
pub fn find_all_codes(instance: &ProblemInstance, t: u32, m: usize, limit: usize) -> Result<(Vec<CodeTable>, bool)> {
    let mut tables = Vec::new();
    let mut truncated = false;
    search(instance, t, m, &mut |table| {
        if tables.len() == limit {
            truncated = true;
            return false;
        }
        tables.push(table.to_vec());
        true
    })?;
    let codes =
        tables.into_iter().map(|tb| CodeTable::new(instance.n(), t, m as u32, tb)).collect::<Result<Vec<_>>>()?;
    Ok((codes, truncated))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub best: Option<(Rate, CodeTable)>,
    /// Smallest feasible `M` per `t` (index `t - 1`), if any.
    pub smallest_m: Vec<Option<usize>>,
}

/// Best rate over valid codes with `t ≤ max_t`, `M ≤ max_m`. For each `t`
/// the smallest feasible `M` gives the best rate, so `M` is scanned upward.
pub fn oracle_best_rate(instance: &ProblemInstance, max_t: u32, max_m: usize) -> Result<OracleResult> {
    guard(instance, max_t, max_m)?;
    let per_t: Vec<Option<CodeTable>> = (1..=max_t)
        .into_par_iter()
        .map(|t| -> Result<Option<CodeTable>> {
            for m in 2..=max_m {
                if let Some(code) = find_code(instance, t, m)? {
                    return Ok(Some(code));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let smallest_m = per_t.iter().map(|c| c.as_ref().map(|c| c.m() as usize)).collect();
    // ties keep the smallest t
    let best = per_t.into_iter().flatten().fold(None::<(Rate, CodeTable)>, |acc, code| {
        let r = code.rate();
        match acc {
            Some((br, bc)) if br >= r => Some((br, bc)),
            _ => Some((r, code)),
        }
    });
    Ok(OracleResult { best, smallest_m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{int, ratio};
    use crate::fixtures;

    fn parity_code() -> CodeTable {
        CodeTable::new(2, 1, 2, vec![0, 1, 1, 0]).unwrap()
    }

    #[test]
    fn parity_is_valid() {
        let inst = fixtures::parity();
        let v = check_code(&inst, &parity_code()).unwrap();
        assert!(v.is_valid());
        assert_eq!(v.rate.as_rational(), Some(int(1)));
    }

    #[test]
    fn parity_hides_from_eavesdropper() {
        let inst = ProblemInstance::from_triples(2, &[(&[1], &[2], &[]), (&[2], &[1], &[]), (&[], &[], &[1])]).unwrap();
        let v = check_code(&inst, &parity_code()).unwrap();
        assert!(v.is_valid());
        assert_eq!(security_by_information(&inst, &parity_code()).unwrap(), v.security_ok);
    }

    #[test]
    fn identity_leaks() {
        let inst = ProblemInstance::from_triples(2, &[(&[1], &[], &[2])]).unwrap();
        let code = CodeTable::new(2, 1, 4, vec![0, 1, 2, 3]).unwrap();
        let v = check_code(&inst, &code).unwrap();
        assert!(v.decoding_ok[0]);
        assert!(!v.security_ok[0].ok);
        assert!(!security_by_information(&inst, &code).unwrap()[0].ok);
    }

    #[test]
    fn table_validation() {
        assert!(CodeTable::new(2, 1, 2, vec![0, 1, 1]).is_err());
        assert!(CodeTable::new(2, 1, 3, vec![0, 1, 1, 0]).is_err());
        assert!(CodeTable::new(1, 1, 1, vec![0, 0]).is_err());
        assert!(check_code(&fixtures::toy(), &parity_code()).is_err());
    }

    #[test]
    fn rate_comparisons() {
        let a = Rate::new(1, 3); // 1/log2 3 ≈ 0.63
        assert!(a.at_most(&ratio(2, 3)));
        assert!(!a.at_most(&ratio(5, 8)));
        assert!(a > Rate::new(1, 4));
        assert!(Rate::new(2, 4) == Rate::new(2, 4) && Rate::new(2, 4).cmp(&Rate::new(1, 2)) == Ordering::Equal);
        assert_eq!(a.to_string(), "1/log2(3)");
        assert!(!a.within(&BoundValue::DegenerateZero));
    }

    #[test]
    fn best_rates() {
        let r = oracle_best_rate(&fixtures::parity(), 1, 4).unwrap();
        assert_eq!(r.best.unwrap().0, Rate::new(1, 2));
        let single = ProblemInstance::from_triples(1, &[(&[1], &[], &[])]).unwrap();
        let r = oracle_best_rate(&single, 2, 4).unwrap();
        let (rate, _) = r.best.unwrap();
        assert_eq!(rate.as_rational(), Some(int(1)));
    }

    #[test]
    fn feasibility_points() {
        let inst = fixtures::parity();
        assert!(is_feasible_at(&inst, 1, 2).unwrap());
        assert!(!is_feasible_at(&inst, 1, 1).unwrap());
        assert!(matches!(is_feasible_at(&inst, 7, 2), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn conflict_is_infeasible_at_one_bit() {
        let inst = fixtures::conflict();
        for m in 1..=16 {
            assert!(!is_feasible_at(&inst, 1, m).unwrap(), "M = {m}");
        }
    }

    #[test]
    fn entropic_g_of_parity() {
        let inst = fixtures::parity();
        let code = parity_code();
        assert!(entropic_violations(&inst, &code).unwrap().is_empty());
        let g = entropic_g(&code);
        assert_eq!(g[3], LogLinear::rational(int(1)));
        assert!(g[0].is_zero());
    }

    #[test]
    fn entropy_with_odd_counts() {
        // M = 3 over 4 tuples: counts 2,1,1 give H(Y) = 3/2
        let code = CodeTable::new(2, 1, 3, vec![0, 0, 1, 2]).unwrap();
        assert_eq!(conditional_entropy(&code, SubsetMask::EMPTY), LogLinear::rational(ratio(3, 2)));
        // counts 3,1 over 4 tuples: H = 2 - (3/4) log2 3
        let code = CodeTable::new(2, 1, 2, vec![0, 0, 0, 1]).unwrap();
        let h = conditional_entropy(&code, SubsetMask::EMPTY);
        assert_eq!(h.constant, int(2));
        assert_eq!(h.logs.get(&3), Some(&ratio(-3, 4)));
    }
}
