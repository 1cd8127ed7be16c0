//! Secure index coding instances: parties, parsing, validation and the
//! canonical text and JSON forms.
//!
//! An instance has `n` messages and `m` parties. Party `i` knows `A_i`,
//! wants `W_i` (empty for an eavesdropper) and must learn nothing about each
//! message of `P_i`. The interfering set is `B_i = [n] \ (A_i ∪ W_i)`.
//!
//! Text grammar, one record per line (`;` also separates records):
//!
//! ```text
//! # comment
//! n=4
//! 1|4|2,3        # W | A (or B) | P, "." for the empty set
//! 3,4|1,2|.
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{SubsetMask, MAX_MESSAGES};

/// Which set the middle field of a party record holds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Notation {
    /// `W|A|P`: side information.
    #[default]
    #[serde(rename = "A")]
    SideInfo,
    /// `W|B|P`: interfering messages.
    #[serde(rename = "B")]
    Interfering,
}

impl FromStr for Notation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Notation::SideInfo),
            "B" | "b" => Ok(Notation::Interfering),
            other => Err(Error::Usage(format!("unknown notation `{other}` (expected A or B)"))),
        }
    }
}

/// A legitimate receiver or an eavesdropper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Party {
    pub wants: SubsetMask,
    pub side_info: SubsetMask,
    pub prohibited: SubsetMask,
    pub interfering: SubsetMask,
}

impl Party {
    /// Builds a party, deriving the interfering set from `wants` and `side_info`.
    pub fn new(n: usize, wants: SubsetMask, side_info: SubsetMask, prohibited: SubsetMask) -> Self {
        Party { wants, side_info, prohibited, interfering: derive_interfering(wants, side_info, n) }
    }

    pub fn is_eavesdropper(&self) -> bool {
        self.wants.is_empty()
    }

    /// `B_i ∪ W_i`, the messages a party does not hold as side information.
    pub fn unknown(&self) -> SubsetMask {
        self.interfering | self.wants
    }
}

/// `[n] \ (wants ∪ side_info)`.
pub fn derive_interfering(wants: SubsetMask, side_info: SubsetMask, n: usize) -> SubsetMask {
    (wants | side_info).complement(n)
}

/// A rule broken by an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `W_i ∩ A_i ≠ ∅`.
    WantsOverlapSideInfo,
    /// `P_i ⊄ B_i`.
    ProhibitedOutsideInterfering,
    /// `B_i ≠ [n] \ (A_i ∪ W_i)`.
    InterferingMismatch,
    /// A set mentions a message outside `[1..n]`.
    OutOfRange,
    /// `W_i ∩ B_i ≠ ∅` in a B-form record.
    WantsOverlapInterfering,
    NoMessages,
    NoParties,
    TooManyMessages,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    /// 1-based party index, `None` for instance-level rules.
    pub party: Option<usize>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self.rule {
            Rule::WantsOverlapSideInfo => "W∩A≠∅",
            Rule::ProhibitedOutsideInterfering => "P⊄B",
            Rule::InterferingMismatch => "B≠(A∪W)^c",
            Rule::OutOfRange => "index outside [1..n]",
            Rule::WantsOverlapInterfering => "W∩B≠∅",
            Rule::NoMessages => "n must be at least 1",
            Rule::NoParties => "at least one party is required",
            Rule::TooManyMessages => "n exceeds the supported maximum of 24",
        };
        match self.party {
            Some(k) => write!(f, "{text} at party {k}"),
            None => f.write_str(text),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProblemInstance {
    n: usize,
    parties: Vec<Party>,
}

impl ProblemInstance {
    /// Builds and validates an instance.
    pub fn new(n: usize, parties: Vec<Party>) -> Result<Self> {
        let inst = ProblemInstance { n, parties };
        let report = validate(&inst);
        if report.is_empty() {
            Ok(inst)
        } else {
            Err(Error::Invalid(report))
        }
    }

    /// Skips validation. Every bound computation assumes a valid instance;
    /// this exists so that [`validate`] can be exercised on broken input.
    pub fn new_unchecked(n: usize, parties: Vec<Party>) -> Self {
        ProblemInstance { n, parties }
    }

    /// Builds from `(W, A, P)` triples of 1-based message lists.
    pub fn from_triples(n: usize, triples: &[(&[usize], &[usize], &[usize])]) -> Result<Self> {
        Self::from_lists(n, Notation::SideInfo, triples)
    }

    /// Builds from `(W, B, P)` triples of 1-based message lists.
    pub fn from_b_triples(n: usize, triples: &[(&[usize], &[usize], &[usize])]) -> Result<Self> {
        Self::from_lists(n, Notation::Interfering, triples)
    }

    fn from_lists(n: usize, notation: Notation, triples: &[(&[usize], &[usize], &[usize])]) -> Result<Self> {
        check_size(n)?;
        let mut parties = Vec::with_capacity(triples.len());
        for (k, (w, x, p)) in triples.iter().enumerate() {
            let mut sets = [SubsetMask::EMPTY; 3];
            for (slot, list) in sets.iter_mut().zip([*w, *x, *p]) {
                for &m in list {
                    if m == 0 || m > n {
                        return Err(Error::Invalid(vec![Violation { party: Some(k + 1), rule: Rule::OutOfRange }]));
                    }
                    *slot = slot.with(m);
                }
            }
            parties.push(make_party(n, notation, sets, k + 1)?);
        }
        Self::new(n, parties)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.parties.len()
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    /// Party by 1-based index.
    pub fn party(&self, index: usize) -> &Party {
        &self.parties[index - 1]
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.n)
    }

    pub fn has_receiver(&self) -> bool {
        self.parties.iter().any(|p| !p.is_eavesdropper())
    }

    /// True when no party carries a security constraint.
    pub fn is_non_secure(&self) -> bool {
        self.parties.iter().all(|p| p.prohibited.is_empty())
    }

    /// Union of all requested messages.
    pub fn requested(&self) -> SubsetMask {
        self.parties.iter().fold(SubsetMask::EMPTY, |acc, p| acc | p.wants)
    }

    /// Canonical text: A-form, parties in order, fields ascending.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for p in &self.parties {
            out.push_str(&format!("{}|{}|{}\n", field(p.wants), field(p.side_info), field(p.prohibited)));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(InstanceDoc::from(self)).expect("instance document serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceDoc::from(self)).expect("instance document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        doc.into_instance()
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_value(value).map_err(|e| Error::Json(e.to_string()))?;
        doc.into_instance()
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn field(s: SubsetMask) -> String {
    if s.is_empty() {
        ".".to_string()
    } else {
        s.messages().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn check_size(n: usize) -> Result<()> {
    let rule = if n == 0 {
        Rule::NoMessages
    } else if n > MAX_MESSAGES {
        Rule::TooManyMessages
    } else {
        return Ok(());
    };
    Err(Error::Invalid(vec![Violation { party: None, rule }]))
}

fn make_party(n: usize, notation: Notation, [w, x, p]: [SubsetMask; 3], index: usize) -> Result<Party> {
    match notation {
        Notation::SideInfo => Ok(Party::new(n, w, x, p)),
        Notation::Interfering => {
            if !w.is_disjoint(x) {
                return Err(Error::Invalid(vec![Violation {
                    party: Some(index),
                    rule: Rule::WantsOverlapInterfering,
                }]));
            }
            Ok(Party::new(n, w, (w | x).complement(n), p))
        }
    }
}

/// Lists every violated party or instance rule. Empty iff the instance is valid.
pub fn validate(instance: &ProblemInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = instance.n;
    if n == 0 {
        out.push(Violation { party: None, rule: Rule::NoMessages });
    }
    if n > MAX_MESSAGES {
        out.push(Violation { party: None, rule: Rule::TooManyMessages });
    }
    if instance.parties.is_empty() {
        out.push(Violation { party: None, rule: Rule::NoParties });
    }
    if n == 0 || n > MAX_MESSAGES {
        return out;
    }
    for (k, p) in instance.parties.iter().enumerate() {
        let party = Some(k + 1);
        let sets = [p.wants, p.side_info, p.prohibited, p.interfering];
        if sets.iter().any(|s| !s.fits(n)) {
            out.push(Violation { party, rule: Rule::OutOfRange });
            continue;
        }
        if !p.wants.is_disjoint(p.side_info) {
            out.push(Violation { party, rule: Rule::WantsOverlapSideInfo });
        }
        if p.interfering != derive_interfering(p.wants, p.side_info, n) {
            out.push(Violation { party, rule: Rule::InterferingMismatch });
        }
        if !p.prohibited.is_subset_of(p.interfering) {
            out.push(Violation { party, rule: Rule::ProhibitedOutsideInterfering });
        }
    }
    out
}

/// Parses the line-oriented text form.
pub fn parse_problem(text: &str, notation: Notation) -> Result<ProblemInstance> {
    let mut n: Option<usize> = None;
    let mut parties = Vec::new();
    for (line_no, raw_line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw_line.split('#').next().unwrap_or("");
        let mut offset = 0;
        for record in line.split(';') {
            let start = offset;
            offset += record.len() + 1;
            let trimmed = record.trim();
            if trimmed.is_empty() {
                continue;
            }
            let column = start + (record.len() - record.trim_start().len()) + 1;
            match n {
                None => n = Some(parse_header(trimmed, line_no, column)?),
                Some(n) => {
                    let sets = parse_record(trimmed, n, line_no, column)?;
                    parties.push(make_party(n, notation, sets, parties.len() + 1)?);
                }
            }
        }
    }
    let n = n.ok_or_else(|| Error::Syntax { line: 1, column: 1, message: "missing `n=<count>` header".into() })?;
    ProblemInstance::new(n, parties)
}

fn parse_header(record: &str, line: usize, column: usize) -> Result<usize> {
    let syntax = |message: String| Error::Syntax { line, column, message };
    let (key, value) =
        record.split_once('=').ok_or_else(|| syntax(format!("expected `n=<count>`, found `{record}`")))?;
    if key.trim() != "n" {
        return Err(syntax(format!("expected `n=<count>`, found `{record}`")));
    }
    let n: usize = value.trim().parse().map_err(|_| syntax(format!("`{}` is not a message count", value.trim())))?;
    check_size(n)?;
    Ok(n)
}

fn parse_record(record: &str, n: usize, line: usize, column: usize) -> Result<[SubsetMask; 3]> {
    let fields: Vec<&str> = record.split('|').collect();
    if fields.len() != 3 {
        return Err(Error::Syntax {
            line,
            column,
            message: format!("expected three `|`-separated fields, found {}", fields.len()),
        });
    }
    let mut sets = [SubsetMask::EMPTY; 3];
    let mut col = column;
    for (slot, f) in sets.iter_mut().zip(&fields) {
        *slot = parse_field(f, n, line, col)?;
        col += f.len() + 1;
    }
    Ok(sets)
}

fn parse_field(field: &str, n: usize, line: usize, column: usize) -> Result<SubsetMask> {
    let token = field.trim();
    let column = column + (field.len() - field.trim_start().len());
    if token == "." {
        return Ok(SubsetMask::EMPTY);
    }
    if token.is_empty() {
        return Err(Error::Syntax { line, column, message: "empty field (write `.` for the empty set)".into() });
    }
    let mut set = SubsetMask::EMPTY;
    for item in token.split(',') {
        let item = item.trim();
        let m: usize = item.parse().map_err(|_| Error::Syntax {
            line,
            column,
            message: format!("`{item}` is not a message index"),
        })?;
        if m == 0 || m > n {
            return Err(Error::IndexOutOfRange { line, index: m, n });
        }
        if set.contains(m) {
            return Err(Error::DuplicateIndex { line, index: m });
        }
        set = set.with(m);
    }
    Ok(set)
}

#[derive(Debug, Serialize, Deserialize)]
struct PartyDoc {
    #[serde(rename = "W")]
    wants: Vec<usize>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    side_info: Option<Vec<usize>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    interfering: Option<Vec<usize>>,
    #[serde(rename = "P")]
    prohibited: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    n: usize,
    #[serde(default)]
    notation: Notation,
    parties: Vec<PartyDoc>,
}

impl From<&ProblemInstance> for InstanceDoc {
    fn from(inst: &ProblemInstance) -> Self {
        let list = |s: SubsetMask| s.messages().collect::<Vec<_>>();
        InstanceDoc {
            n: inst.n,
            notation: Notation::SideInfo,
            parties: inst
                .parties
                .iter()
                .map(|p| PartyDoc {
                    wants: list(p.wants),
                    side_info: Some(list(p.side_info)),
                    interfering: None,
                    prohibited: list(p.prohibited),
                })
                .collect(),
        }
    }
}

impl InstanceDoc {
    fn into_instance(self) -> Result<ProblemInstance> {
        check_size(self.n)?;
        let n = self.n;
        let mut parties = Vec::with_capacity(self.parties.len());
        for (k, p) in self.parties.into_iter().enumerate() {
            let middle = match self.notation {
                Notation::SideInfo => p.side_info,
                Notation::Interfering => p.interfering,
            }
            .ok_or_else(|| {
                Error::Json(format!(
                    "party {} lacks the `{}` field",
                    k + 1,
                    if self.notation == Notation::SideInfo { "A" } else { "B" }
                ))
            })?;
            let mut sets = [SubsetMask::EMPTY; 3];
            for (slot, list) in sets.iter_mut().zip([&p.wants, &middle, &p.prohibited]) {
                for &m in list {
                    if m == 0 || m > n {
                        return Err(Error::Invalid(vec![Violation { party: Some(k + 1), rule: Rule::OutOfRange }]));
                    }
                    if slot.contains(m) {
                        return Err(Error::Json(format!("party {}: message {m} listed twice", k + 1)));
                    }
                    *slot = slot.with(m);
                }
            }
            parties.push(make_party(n, self.notation, sets, k + 1)?);
        }
        ProblemInstance::new(n, parties)
    }
}
