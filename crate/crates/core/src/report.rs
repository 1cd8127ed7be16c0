//! All bounds for one instance, with witnesses and a consistency check.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde_json::{json, Value};

use crate::acyclic::{mais_bound_with, Analyzer};
use crate::bound::BoundValue;
use crate::chain::{sbac_with, ChainGraph};
use crate::error::{Error, Result};
use crate::lower::{theorem2_lower, LowerValue};
use crate::mask::SubsetMask;
use crate::model::ProblemInstance;
use crate::partition::GPartition;
use crate::smais::smais_with;
use crate::spm::spm_symmetric_with;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundKind {
    Mais,
    Smais,
    Sbac,
    Spm,
    Lower,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] =
        [BoundKind::Mais, BoundKind::Smais, BoundKind::Sbac, BoundKind::Spm, BoundKind::Lower];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Mais => "mais",
            BoundKind::Smais => "smais",
            BoundKind::Sbac => "sbac",
            BoundKind::Spm => "spm",
            BoundKind::Lower => "lower",
        }
    }

    /// Parses a comma-separated list, keeping the canonical order.
    pub fn parse_list(text: &str) -> Result<Vec<BoundKind>> {
        let mut out: Vec<BoundKind> =
            text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect::<Result<_>>()?;
        if out.is_empty() {
            return Err(Error::Usage("empty bound list".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown bound `{s}` (expected mais, smais, sbac, spm, lower)")))
    }
}

/// Value of a report entry: an upper bound or the lower bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryValue {
    Upper(BoundValue),
    Lower(LowerValue),
}

impl EntryValue {
    fn upper(&self) -> Option<&BoundValue> {
        match self {
            EntryValue::Upper(v) => Some(v),
            EntryValue::Lower(_) => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            EntryValue::Upper(v) => v.to_f64(),
            EntryValue::Lower(LowerValue::Finite(r)) => Some(crate::bound::to_f64(r)),
            EntryValue::Lower(LowerValue::Infeasible) => None,
        }
    }
}

impl fmt::Display for EntryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryValue::Upper(v) => v.fmt(f),
            EntryValue::Lower(v) => v.fmt(f),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundEntry {
    pub kind: BoundKind,
    pub value: EntryValue,
    pub witness: String,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub instance: ProblemInstance,
    pub entries: Vec<BoundEntry>,
    pub notes: Vec<String>,
}

pub const INTERPRETATION: [&str; 3] = [
    "sbac: interior chain messages must be requested by some receiver; the reported value is the smallest chain bound",
    "sbac: the terminal pair must share a g-subset with some S having h_mais(∅, S) ≥ 2",
    "lower: party r's decoder is emulated once A_r lies in the closure",
];

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn mais_entry(analyzer: &Analyzer<'_>) -> Result<BoundEntry> {
    let (res, seconds) = timed(|| -> Result<_> {
        let value = mais_bound_with(analyzer);
        let (h, w) = analyzer.h_mais_witness(SubsetMask::EMPTY, analyzer.instance().full())?;
        let steps: Vec<String> = w.order.iter().zip(&w.attesting_parties).map(|(i, j)| format!("{i}@{j}")).collect();
        Ok((value, format!("h_mais(∅,[n]) = {h}, order ({})", steps.join(", "))))
    });
    let (value, witness) = res?;
    Ok(BoundEntry { kind: BoundKind::Mais, value: EntryValue::Upper(value), witness, seconds })
}

fn smais_entry(analyzer: &Analyzer<'_>, gp: &GPartition) -> BoundEntry {
    let (res, seconds) = timed(|| smais_with(analyzer, gp, false));
    let witness = if res.positive_cycle {
        "positive cycle in the cell graph".to_string()
    } else {
        match res.best_cell.and_then(|c| res.update_chain(c)) {
            Some(chain) => {
                let mut s = format!(
                    "rho = {} at N_{}: start {} (h = {})",
                    res.rho[res.best_cell.unwrap() - 1].unwrap_or(0),
                    res.best_cell.unwrap(),
                    chain.start_set,
                    chain.start_rho
                );
                for e in &chain.steps {
                    s.push_str(&format!(
                        ", N_{} {} ⊆ {} N_{} (+{})",
                        e.from_cell, e.lower, e.upper, e.to_cell, e.weight
                    ));
                }
                s
            }
            None => "no g-subset".to_string(),
        }
    };
    BoundEntry { kind: BoundKind::Smais, value: EntryValue::Upper(res.bound), witness, seconds }
}

fn sbac_entry(analyzer: &Analyzer<'_>, gp: &GPartition) -> BoundEntry {
    let (res, seconds) = timed(|| {
        let graph = ChainGraph::build(analyzer, gp);
        sbac_with(analyzer, gp, &graph)
    });
    let witness = match &res.chain {
        Some(c) => format!("chain {c}, terminal {}, {} chains examined", c.terminal_witness, res.chains_examined),
        None => "no chain".to_string(),
    };
    BoundEntry { kind: BoundKind::Sbac, value: EntryValue::Upper(res.bound), witness, seconds }
}

fn spm_entry(instance: &ProblemInstance, gp: &GPartition) -> Result<BoundEntry> {
    let (res, seconds) = timed(|| spm_symmetric_with(instance, gp));
    let res = res?;
    let mut witness = match &res.certificate {
        Some(_) => "optimum certified by an exact dual".to_string(),
        None => "unbounded: no receiver constrains the rate".to_string(),
    };
    if let Some(a) = &res.advisory {
        witness.push_str(&format!("; {a}"));
    }
    Ok(BoundEntry { kind: BoundKind::Spm, value: EntryValue::Upper(res.bound), witness, seconds })
}

fn lower_entry(instance: &ProblemInstance) -> (BoundEntry, Vec<usize>) {
    let (lb, seconds) = timed(|| theorem2_lower(instance));
    let witness = match &lb.witness {
        Some(w) => format!("k = {}, order {w}", lb.k),
        None => "k = 0".to_string(),
    };
    (BoundEntry { kind: BoundKind::Lower, value: EntryValue::Lower(lb.value), witness, seconds }, lb.self_leaking)
}

/// Computes the requested bounds concurrently and checks their order.
pub fn build_report(instance: &ProblemInstance, kinds: &[BoundKind]) -> Result<BoundReport> {
    let analyzer = Analyzer::new(instance);
    let gp = GPartition::build(instance);
    let wants = |k| kinds.contains(&k);
    let mut slots: Vec<Option<Result<BoundEntry>>> = (0..4).map(|_| None).collect();
    let mut lower = None;
    rayon::scope(|s| {
        let (a, rest) = slots.split_at_mut(1);
        let (b, rest) = rest.split_at_mut(1);
        let (c, d) = rest.split_at_mut(1);
        let (analyzer, gp) = (&analyzer, &gp);
        if wants(BoundKind::Mais) {
            s.spawn(|_| a[0] = Some(mais_entry(analyzer)));
        }
        if wants(BoundKind::Smais) {
            s.spawn(|_| b[0] = Some(Ok(smais_entry(analyzer, gp))));
        }
        if wants(BoundKind::Sbac) {
            s.spawn(|_| c[0] = Some(Ok(sbac_entry(analyzer, gp))));
        }
        if wants(BoundKind::Spm) {
            s.spawn(|_| d[0] = Some(spm_entry(instance, gp)));
        }
        if wants(BoundKind::Lower) {
            s.spawn(|_| lower = Some(lower_entry(instance)));
        }
    });
    let mut entries = slots.into_iter().flatten().collect::<Result<Vec<_>>>()?;
    let mut notes: Vec<String> = INTERPRETATION.iter().map(|s| s.to_string()).collect();
    if let Some((entry, leaking)) = lower {
        if !leaking.is_empty() {
            let list: Vec<String> = leaking.iter().map(|j| j.to_string()).collect();
            notes.push(format!(
                "infeasibility evidence: the decoding closure of parties {} meets their prohibited set",
                list.join(",")
            ));
        }
        entries.push(entry);
    }
    let report = BoundReport { instance: instance.clone(), entries, notes };
    let (soft, hard): (Vec<_>, Vec<_>) =
        report.ordering_violations().into_iter().partition(|(a, b, _)| (*a, *b) == (BoundKind::Sbac, BoundKind::Smais));
    if !hard.is_empty() {
        let list: Vec<String> = hard.into_iter().map(|v| v.2).collect();
        return Err(Error::Consistency(list.join("; ")));
    }
    let mut report = report;
    for (_, _, text) in soft {
        report.notes.push(format!("{text}; the strict chain rule does not cover every smais witness"));
    }
    report.notes.extend(report.lower_evidence());
    Ok(report)
}

impl BoundReport {
    pub fn get(&self, kind: BoundKind) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.kind == kind)
    }

    /// Breaks of `spm ≤ sbac ≤ smais ≤ mais` among the computed upper bounds.
    pub fn ordering_violations(&self) -> Vec<(BoundKind, BoundKind, String)> {
        let uppers: Vec<(BoundKind, &BoundValue)> =
            [BoundKind::Spm, BoundKind::Sbac, BoundKind::Smais, BoundKind::Mais]
                .into_iter()
                .filter_map(|k| Some((k, self.get(k)?.value.upper()?)))
                .filter(|(_, v)| v.is_applicable())
                .collect();
        let mut out = Vec::new();
        for (i, (ka, a)) in uppers.iter().enumerate() {
            for (kb, b) in &uppers[i + 1..] {
                if !a.at_most(b) {
                    out.push((*ka, *kb, format!("{} = {a} exceeds {} = {b}", ka.name(), kb.name())));
                }
            }
        }
        out
    }

    /// A lower bound above an upper bound means no valid code exists.
    fn lower_evidence(&self) -> Vec<String> {
        let Some(lower) = self.get(BoundKind::Lower) else { return Vec::new() };
        let lb = match &lower.value {
            EntryValue::Lower(LowerValue::Finite(r)) => BoundValue::Finite(r.clone()),
            EntryValue::Lower(LowerValue::Infeasible) => {
                return vec!["infeasibility evidence: every message is prohibition-chained".into()];
            }
            EntryValue::Upper(_) => return Vec::new(),
        };
        self.entries
            .iter()
            .filter_map(|e| Some((e.kind, e.value.upper()?)))
            .filter(|(_, v)| !lb.at_most(v))
            .map(|(k, v)| format!("infeasibility evidence: lower = {lb} exceeds {} = {v}", k.name()))
            .collect()
    }

    /// Deterministic JSON; wall times only when asked for.
    pub fn to_json_value(&self, timings: bool) -> Value {
        let bounds: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut v = json!({ "name": e.kind.name(), "value": e.value.to_string(), "witness": e.witness });
                if timings {
                    v["seconds"] = json!(e.seconds);
                }
                v
            })
            .collect();
        json!({
            "instance": self.instance.to_json_value(),
            "bounds": bounds,
            "notes": self.notes,
        })
    }

    pub fn to_json(&self, timings: bool) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value(timings)).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned table for terminals.
    pub fn to_table(&self, decimal: bool) -> String {
        let rows: Vec<[String; 4]> = self
            .entries
            .iter()
            .map(|e| {
                let approx = match (decimal, e.value.to_f64()) {
                    (true, Some(x)) => format!("{x:.6}"),
                    _ => String::new(),
                };
                [e.kind.name().to_string(), e.value.to_string(), approx, format!("{:.3}s", e.seconds)]
            })
            .collect();
        let w0 = rows.iter().map(|r| r[0].len()).max().unwrap_or(0).max(5);
        let w1 = rows.iter().map(|r| r[1].chars().count()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        for (r, e) in rows.iter().zip(&self.entries) {
            let mut line = format!("{:<w0$}  {:<w1$}", r[0], r[1]);
            if decimal {
                line.push_str(&format!("  {:<9}", r[2]));
            }
            line.push_str(&format!("  {:>8}  {}", r[3], e.witness));
            out.push_str(line.trim_end());
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}
