//! Linear programs with exact rational data.
//!
//! The production path solves in floating point, rationalizes the primal and
//! dual solutions, and certifies both exactly: every row holds, the dual
//! combination of tight rows reproduces the objective, inequality multipliers
//! are nonnegative, and the objectives agree. When rationalization fails the
//! tight system is solved by exact elimination. A dense exact simplex is kept
//! as an independent route for small programs.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bound::{format_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowKind {
    Le,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    /// Sorted by variable, no zero coefficients.
    pub terms: Vec<(usize, Rational)>,
    pub kind: RowKind,
    pub rhs: Rational,
    pub label: &'static str,
}

impl Row {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms.iter().map(|(v, a)| a * &x[*v]).sum()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs = self.eval(x);
        match self.kind {
            RowKind::Le => lhs <= self.rhs,
            RowKind::Eq => lhs == self.rhs,
        }
    }

    fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(v, a)| a.to_f64().unwrap_or(0.0) * x[*v]).sum()
    }
}

/// `max x[objective]` subject to the rows; all variables are free.
type RowKey = (Vec<(usize, Rational)>, RowKind, Rational);

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub rows: Vec<Row>,
    pub objective: usize,
    /// Bounds implied by the rows, passed to the float solver only.
    pub implied_bounds: Vec<(f64, f64)>,
    seen: HashSet<RowKey>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.implied_bounds.push((f64::NEG_INFINITY, f64::INFINITY));
        self.names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    /// Adds a row after merging duplicate terms; identical rows are kept once.
    /// Returns false when the row was dropped as a duplicate or as `0 ≤ 0`.
    pub fn add_row(&mut self, terms: &[(usize, Rational)], kind: RowKind, rhs: Rational, label: &'static str) -> bool {
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, a) in terms {
            *merged.entry(*v).or_insert_with(Rational::zero) += a;
        }
        let terms: Vec<(usize, Rational)> = merged.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        if terms.is_empty() && rhs.is_zero() {
            return false;
        }
        if !self.seen.insert((terms.clone(), kind, rhs.clone())) {
            return false;
        }
        self.rows.push(Row { terms, kind, rhs, label });
        true
    }

    /// True when no row involves the objective variable.
    pub fn objective_is_free(&self) -> bool {
        !self.rows.iter().any(|r| r.terms.iter().any(|(v, _)| *v == self.objective))
    }

    /// Line-based export: `max <objective>`, one constraint per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("max {}\nsubject to\n", self.names[self.objective]);
        for (k, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "c{}: ", k + 1);
            for (j, (v, a)) in row.terms.iter().enumerate() {
                let (sign, mag) = if a.is_negative() { ("-", -a.clone()) } else { ("+", a.clone()) };
                if j == 0 {
                    if sign == "-" {
                        out.push_str("- ");
                    }
                } else {
                    let _ = write!(out, " {sign} ");
                }
                if !mag.is_one() {
                    let _ = write!(out, "{} ", coefficient(&mag));
                }
                out.push_str(&self.names[*v]);
            }
            if row.terms.is_empty() {
                out.push('0');
            }
            let op = match row.kind {
                RowKind::Le => "<=",
                RowKind::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", coefficient(&row.rhs));
        }
        out.push_str("free all\nend\n");
        out
    }
}

fn coefficient(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rational(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(Certificate),
    Unbounded,
    Infeasible,
}

/// An exact optimum with its dual multipliers (one per row).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub value: Rational,
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
}

impl Certificate {
    /// Weak duality check: primal feasible, dual feasible, equal objectives.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if self.primal.len() != lp.num_vars() || self.dual.len() != lp.rows.len() {
            return false;
        }
        if self.primal[lp.objective] != self.value || !lp.rows.iter().all(|r| r.holds(&self.primal)) {
            return false;
        }
        let mut combo = vec![Rational::zero(); lp.num_vars()];
        let mut dual_obj = Rational::zero();
        for (row, y) in lp.rows.iter().zip(&self.dual) {
            if y.is_zero() {
                continue;
            }
            if row.kind == RowKind::Le && y.is_negative() {
                return false;
            }
            for (v, a) in &row.terms {
                combo[*v] += a * y;
            }
            dual_obj += &row.rhs * y;
        }
        combo.iter().enumerate().all(|(v, c)| if v == lp.objective { c.is_one() } else { c.is_zero() })
            && dual_obj == self.value
    }
}

/// Continued-fraction convergents of `x`, up to denominator `max_den`.
fn convergents(x: f64, max_den: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        if !r.is_finite() || r.abs() > 1e15 {
            break;
        }
        let a = r.floor();
        let ai = a as i64;
        let (Some(h2), Some(k2)) =
            (ai.checked_mul(h1).and_then(|v| v.checked_add(h0)), ai.checked_mul(k1).and_then(|v| v.checked_add(k0)))
        else {
            break;
        };
        if k2 > max_den {
            break;
        }
        out.push((h2, k2));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// Simplest rational within `tol` of `x`.
pub fn rationalize(x: f64, tol: f64) -> Rational {
    for (p, q) in convergents(x, 1 << 40) {
        if (x - p as f64 / q as f64).abs() <= tol {
            return Rational::new(BigInt::from(p), BigInt::from(q));
        }
    }
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Solves `rows · x = rhs` exactly. Columns left free by the system take
/// the value from `hint`. Returns `None` when the system is inconsistent.
pub fn solve_exact_system(
    rows: &[Vec<(usize, Rational)>],
    rhs: &[Rational],
    ncols: usize,
    hint: impl Fn(usize) -> Rational,
) -> Option<Vec<Rational>> {
    // pivot rows in insertion order; each is reduced against earlier pivots
    let mut pivots: Vec<(usize, BTreeMap<usize, Rational>, Rational)> = Vec::new();
    let mut pivot_of: Vec<Option<usize>> = vec![None; ncols];
    for (terms, b) in rows.iter().zip(rhs) {
        let mut row: BTreeMap<usize, Rational> = terms.iter().cloned().collect();
        let mut b = b.clone();
        for (col, prow, pb) in &pivots {
            let Some(f) = row.get(col).cloned() else { continue };
            for (c, a) in prow {
                let e = row.entry(*c).or_insert_with(Rational::zero);
                *e -= &f * a;
                if e.is_zero() {
                    row.remove(c);
                }
            }
            b -= &f * pb;
        }
        if row.is_empty() {
            if !b.is_zero() {
                return None;
            }
            continue;
        }
        // pivot on the sparsest-looking column: the last one keeps fill low for lattice rows
        let (&col, lead) = row.iter().next_back().expect("non-empty row");
        let lead = lead.clone();
        for a in row.values_mut() {
            *a /= &lead;
        }
        b /= &lead;
        pivot_of[col] = Some(pivots.len());
        pivots.push((col, row, b));
    }
    let mut x: Vec<Option<Rational>> =
        (0..ncols).map(|c| if pivot_of[c].is_none() { Some(hint(c)) } else { None }).collect();
    for (col, row, b) in pivots.iter().rev() {
        let mut v = b.clone();
        for (c, a) in row {
            if c != col {
                v -= a * x[*c].as_ref().expect("later pivots solved first");
            }
        }
        x[*col] = Some(v);
    }
    Some(x.into_iter().map(|v| v.expect("all columns assigned")).collect())
}

const TIGHT: f64 = 1e-7;

fn float_primal(lp: &LinearProgram) -> std::result::Result<Vec<f64>, microlp::Error> {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..lp.num_vars())
        .map(|v| p.add_var(if v == lp.objective { 1.0 } else { 0.0 }, lp.implied_bounds[v]))
        .collect();
    for row in &lp.rows {
        let expr: Vec<_> = row.terms.iter().map(|(v, a)| (vars[*v], a.to_f64().unwrap_or(0.0))).collect();
        let op = match row.kind {
            RowKind::Le => ComparisonOp::Le,
            RowKind::Eq => ComparisonOp::Eq,
        };
        p.add_constraint(expr, op, row.rhs.to_f64().unwrap_or(0.0));
    }
    let sol = p.solve()?.into_solution().map_err(|_| microlp::Error::InternalError("interrupted".into()))?;
    Ok(vars.iter().map(|v| sol.var_value_raw(*v)).collect())
}

/// Float dual over the given rows: `min b·y`, `Σ y_r a_r = e_objective`.
fn float_dual(lp: &LinearProgram, rows: &[usize]) -> Option<Vec<f64>> {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let ys: Vec<_> = rows
        .iter()
        .map(|&r| {
            let row = &lp.rows[r];
            let lo = if row.kind == RowKind::Le { 0.0 } else { f64::NEG_INFINITY };
            p.add_var(row.rhs.to_f64().unwrap_or(0.0), (lo, f64::INFINITY))
        })
        .collect();
    let mut cols: Vec<Vec<(microlp::Variable, f64)>> = vec![Vec::new(); lp.num_vars()];
    for (k, &r) in rows.iter().enumerate() {
        for (v, a) in &lp.rows[r].terms {
            cols[*v].push((ys[k], a.to_f64().unwrap_or(0.0)));
        }
    }
    for (v, col) in cols.into_iter().enumerate() {
        let rhs = if v == lp.objective { 1.0 } else { 0.0 };
        if col.is_empty() {
            if rhs != 0.0 {
                return None;
            }
            continue;
        }
        p.add_constraint(col, ComparisonOp::Eq, rhs);
    }
    let sol = p.solve().ok()?.into_solution().ok()?;
    Some(ys.iter().map(|y| sol.var_value_raw(*y)).collect())
}

fn exact_primal(lp: &LinearProgram, xf: &[f64]) -> Option<Vec<Rational>> {
    for tol in [1e-9, 1e-7, 1e-11] {
        let x: Vec<Rational> = xf.iter().map(|&v| rationalize(v, tol)).collect();
        if lp.rows.iter().all(|r| r.holds(&x)) {
            return Some(x);
        }
    }
    let tight: Vec<&Row> = lp
        .rows
        .iter()
        .filter(|r| r.kind == RowKind::Eq || (r.eval_f64(xf) - r.rhs.to_f64().unwrap_or(0.0)).abs() < TIGHT)
        .collect();
    let terms: Vec<_> = tight.iter().map(|r| r.terms.clone()).collect();
    let rhs: Vec<_> = tight.iter().map(|r| r.rhs.clone()).collect();
    let x = solve_exact_system(&terms, &rhs, lp.num_vars(), |c| rationalize(xf[c], 1e-9))?;
    lp.rows.iter().all(|r| r.holds(&x)).then_some(x)
}

fn exact_dual(lp: &LinearProgram, x: &[Rational], value: &Rational) -> Option<Vec<Rational>> {
    let tight: Vec<usize> = (0..lp.rows.len()).filter(|&r| lp.rows[r].eval(x) == lp.rows[r].rhs).collect();
    let yf = float_dual(lp, &tight)?;
    let build = |vals: &dyn Fn(usize) -> Rational| {
        let mut y = vec![Rational::zero(); lp.rows.len()];
        for (k, &r) in tight.iter().enumerate() {
            y[r] = vals(k);
        }
        y
    };
    let check =
        |y: &Vec<Rational>| Certificate { value: value.clone(), primal: x.to_vec(), dual: y.clone() }.verify(lp);
    for tol in [1e-9, 1e-7, 1e-11] {
        let y = build(&|k| rationalize(yf[k], tol));
        if check(&y) {
            return Some(y);
        }
    }
    // exact solve of the transposed system on the float support
    let support: Vec<usize> = (0..tight.len()).filter(|&k| yf[k].abs() > 1e-10).collect();
    let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); lp.num_vars()];
    for (j, &k) in support.iter().enumerate() {
        for (v, a) in &lp.rows[tight[k]].terms {
            cols[*v].push((j, a.clone()));
        }
    }
    let rhs: Vec<Rational> =
        (0..lp.num_vars()).map(|v| if v == lp.objective { Rational::one() } else { Rational::zero() }).collect();
    let ys = solve_exact_system(&cols, &rhs, support.len(), |_| Rational::zero())?;
    let mut y = vec![Rational::zero(); lp.rows.len()];
    for (j, &k) in support.iter().enumerate() {
        y[tight[k]] = ys[j].clone();
    }
    check(&y).then_some(y)
}

/// Float solve followed by exact certification.
pub fn solve_certified(lp: &LinearProgram) -> Result<LpOutcome> {
    if lp.objective_is_free() {
        return Ok(LpOutcome::Unbounded);
    }
    let xf = match float_primal(lp) {
        Ok(x) => x,
        Err(microlp::Error::Unbounded) => return Ok(LpOutcome::Unbounded),
        Err(microlp::Error::Infeasible) => return Ok(LpOutcome::Infeasible),
        Err(e) => return Err(Error::Solver(e.to_string())),
    };
    let x = exact_primal(lp, &xf).ok_or_else(|| Error::Solver("could not recover an exact primal vertex".into()))?;
    let value = x[lp.objective].clone();
    let dual = exact_dual(lp, &x, &value).ok_or_else(|| Error::Solver("could not certify optimality".into()))?;
    Ok(LpOutcome::Optimal(Certificate { value, primal: x, dual }))
}

/// Dense exact simplex for programs whose optimum is attained at `x ≥ 0` and
/// whose right-hand sides are nonnegative, so the slack basis is feasible.
/// Equalities are split into two inequalities. Bland's rule; at most `cap`
/// pivots. The dual returned is that of the `x ≥ 0` program, so it only
/// certifies the free-variable program when no structural reduced cost is
/// positive.
pub fn solve_dense_exact(lp: &LinearProgram, cap: usize) -> Result<LpOutcome> {
    let nv = lp.num_vars();
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for row in &lp.rows {
        if row.rhs.is_negative() {
            return Err(Error::Precondition("dense simplex needs nonnegative right-hand sides".into()));
        }
        let mut dense = vec![Rational::zero(); nv];
        for (v, a) in &row.terms {
            dense[*v] = a.clone();
        }
        if row.kind == RowKind::Eq {
            if !row.rhs.is_zero() {
                return Err(Error::Precondition("dense simplex needs homogeneous equalities".into()));
            }
            rows.push((dense.iter().map(|a| -a).collect(), Rational::zero()));
        }
        rows.push((dense, row.rhs.clone()));
    }
    let m = rows.len();
    let width = nv + m;
    // tableau rows: [A | I | b]
    let mut t: Vec<Vec<Rational>> = rows
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let mut r = a;
            r.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r.push(b);
            r
        })
        .collect();
    let mut basis: Vec<usize> = (nv..width).collect();
    // reduced costs for max: z_j - c_j
    let mut z = vec![Rational::zero(); width + 1];
    z[lp.objective] = -Rational::one();
    for _ in 0..cap {
        let Some(enter) = (0..width).find(|&j| z[j].is_negative()) else {
            let mut x = vec![Rational::zero(); width];
            for (i, &b) in basis.iter().enumerate() {
                x[b] = t[i][width].clone();
            }
            let primal: Vec<Rational> = x[..nv].to_vec();
            // dual of row i is the reduced cost of its slack
            let mut dual = Vec::with_capacity(lp.rows.len());
            let mut k = nv;
            for row in &lp.rows {
                if row.kind == RowKind::Eq {
                    dual.push(&z[k + 1] - &z[k]);
                    k += 2;
                } else {
                    dual.push(z[k].clone());
                    k += 1;
                }
            }
            return Ok(LpOutcome::Optimal(Certificate { value: z[width].clone(), primal, dual }));
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Ok(LpOutcome::Unbounded);
        };
        let piv = t[r][enter].clone();
        for a in t[r].iter_mut() {
            *a /= &piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (a, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a -= &f * p;
                }
            }
        }
        if !z[enter].is_zero() {
            let f = z[enter].clone();
            for (a, p) in z.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a -= &f * p;
                }
            }
        }
        basis[r] = enter;
    }
    Err(Error::IterationCap(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{int, ratio};

    fn small() -> LinearProgram {
        // max y  s.t.  x + 2y <= 4,  3y - x <= 0... with x, y implicitly >= 0
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x");
        let y = lp.add_var("y");
        lp.objective = y;
        lp.add_row(&[(x, int(1)), (y, int(2))], RowKind::Le, int(4), "a");
        lp.add_row(&[(x, int(-1)), (y, int(3))], RowKind::Le, int(0), "b");
        lp.add_row(&[(x, int(-1))], RowKind::Le, int(0), "c");
        lp
    }

    #[test]
    fn certified_small() {
        let lp = small();
        let LpOutcome::Optimal(c) = solve_certified(&lp).unwrap() else { panic!() };
        assert_eq!(c.value, ratio(4, 5));
        assert!(c.verify(&lp));
    }

    #[test]
    fn dense_agrees() {
        let lp = small();
        let LpOutcome::Optimal(c) = solve_dense_exact(&lp, 100).unwrap() else { panic!() };
        assert_eq!(c.value, ratio(4, 5));
        assert!(c.verify(&lp));
    }

    #[test]
    fn duplicate_rows_dropped() {
        let mut lp = small();
        assert!(!lp.add_row(&[(1, int(2)), (0, int(1))], RowKind::Le, int(4), "dup"));
        assert_eq!(lp.rows.len(), 3);
    }

    #[test]
    fn rationalize_sevenths() {
        assert_eq!(rationalize(2.0 / 7.0 + 1e-12, 1e-9), ratio(2, 7));
        assert_eq!(rationalize(-0.5, 1e-9), ratio(-1, 2));
        assert_eq!(rationalize(3.0, 1e-9), int(3));
    }

    #[test]
    fn exact_system_with_free_column() {
        let rows = vec![vec![(0, int(1)), (1, int(1))], vec![(1, int(2)), (2, int(1))]];
        let rhs = vec![int(3), int(5)];
        let x = solve_exact_system(&rows, &rhs, 3, |_| int(1)).unwrap();
        assert_eq!(&x[0] + &x[1], int(3));
        assert_eq!(&x[1] * int(2) + &x[2], int(5));
        let bad = vec![vec![(0, int(1))], vec![(0, int(2))]];
        assert!(solve_exact_system(&bad, &[int(1), int(3)], 1, |_| int(0)).is_none());
    }

    #[test]
    fn export_lists_rows() {
        let text = small().to_text();
        assert!(text.starts_with("max y\n"));
        assert!(text.contains("c1: x + 2 y <= 4"));
        assert!(text.contains("c2: - x + 3 y <= 0"));
    }
}
