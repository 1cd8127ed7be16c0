//! The secure polymatroidal linear program.
//!
//! Variables are `g(S)` for nonempty `S` (with `g(∅) = 0` substituted) and a
//! scale `λ`. Rate equalities read `g(B ∪ W) - g(B) = λ Σ_{i∈W} r_i`; the
//! symmetric program uses `r = 1`, so `λ` is the symmetric rate, and a tuple
//! `r` is feasible exactly when the optimum `λ*` reaches 1.

use num_traits::{One, Signed, Zero};

use crate::bound::{int, BoundValue, Rational};
use crate::error::{Error, Result};
use crate::lp::{self, Certificate, LinearProgram, LpOutcome, RowKind};
use crate::mask::SubsetMask;
use crate::model::ProblemInstance;
use crate::partition::GPartition;

/// The program together with its variable layout.
#[derive(Clone, Debug)]
pub struct SpmProgram {
    pub n: usize,
    pub lp: LinearProgram,
    /// Variable holding `g(S)`, indexed by mask; `None` when `g(S)` is fixed to 0.
    var_of: Vec<Option<usize>>,
}

impl SpmProgram {
    pub fn g_var(&self, s: SubsetMask) -> Option<usize> {
        self.var_of[s.index()]
    }

    pub fn rate_var(&self) -> usize {
        self.lp.objective
    }

    pub fn to_text(&self) -> String {
        self.lp.to_text()
    }

    /// Reads `g` out of a primal vector, `g(∅) = 0` included.
    pub fn set_function(&self, x: &[Rational]) -> Vec<Rational> {
        self.var_of.iter().map(|v| v.map_or_else(Rational::zero, |v| x[v].clone())).collect()
    }

    fn push_g(&self, terms: &mut Vec<(usize, Rational)>, s: SubsetMask, coeff: i64) {
        if let Some(v) = self.var_of[s.index()] {
            terms.push((v, int(coeff)));
        }
    }
}

/// Symmetric program over all `g(S)`: maximize `R`.
pub fn build_spm_lp(instance: &ProblemInstance) -> SpmProgram {
    let ones = vec![Rational::one(); instance.n()];
    build(instance, &ones, "R", None)
}

/// Symmetric program with one variable per g-subset and monotonicity only at
/// the top. Sets in one g-subset take equal values in every feasible `g`,
/// and the dropped monotonicity rows follow from the top ones and
/// submodularity, so the feasible set is unchanged.
pub fn build_spm_lp_merged(instance: &ProblemInstance, gp: &GPartition) -> SpmProgram {
    let ones = vec![Rational::one(); instance.n()];
    build(instance, &ones, "R", Some(gp))
}

/// Program for the tuple `rates`: maximize the scale `λ`.
pub fn build_spm_lp_with_rates(instance: &ProblemInstance, rates: &[Rational]) -> Result<SpmProgram> {
    if rates.len() != instance.n() {
        return Err(Error::DimensionMismatch(format!("expected {} rates, got {}", instance.n(), rates.len())));
    }
    if rates.iter().any(|r| r.is_negative()) {
        return Err(Error::Precondition("rates must be nonnegative".into()));
    }
    Ok(build(instance, rates, "lambda", Some(&GPartition::build(instance))))
}

fn build(instance: &ProblemInstance, rates: &[Rational], scale_name: &str, merge: Option<&GPartition>) -> SpmProgram {
    let n = instance.n();
    let full = instance.full();
    let mut lp = LinearProgram::new();
    let mut var_of: Vec<Option<usize>> = vec![None; 1 << n];
    let mut cell_var: Vec<Option<usize>> = vec![None; merge.map_or(0, |gp| gp.gamma())];
    // the g-subset holding ∅ is pinned to 0
    let zero_cell = merge.filter(|gp| gp.in_g_subset(SubsetMask::EMPTY)).map(|gp| gp.cell_index(SubsetMask::EMPTY));
    for s in SubsetMask::all(n).skip(1) {
        let shared = merge.filter(|gp| gp.in_g_subset(s)).map(|gp| gp.cell_index(s));
        var_of[s.index()] = match shared {
            Some(c) if Some(c) == zero_cell => None,
            Some(c) => Some(*cell_var[c].get_or_insert_with(|| lp.add_var(format!("g{s}")))),
            None => Some(lp.add_var(format!("g{s}"))),
        };
    }
    let lambda = lp.add_var(scale_name);
    lp.objective = lambda;
    // 0 ≤ g ≤ g([n]) ≤ 1 and λ ≥ 0 at some optimum
    for b in lp.implied_bounds.iter_mut() {
        *b = (0.0, 1.0);
    }
    lp.implied_bounds[lambda] = (0.0, f64::INFINITY);
    let prog = SpmProgram { n, lp: LinearProgram::new(), var_of };

    let mut t = Vec::new();
    prog.push_g(&mut t, full, 1);
    lp.add_row(&t, RowKind::Le, int(1), "top");

    for s in SubsetMask::all(n) {
        let free: Vec<usize> = s.complement(n).messages().collect();
        for &i in &free {
            // below the top these follow from submodularity
            if merge.is_some() && s.with(i) != full {
                continue;
            }
            // g(S) - g(S ∪ {i}) ≤ 0
            let mut t = Vec::new();
            prog.push_g(&mut t, s, 1);
            prog.push_g(&mut t, s.with(i), -1);
            lp.add_row(&t, RowKind::Le, int(0), "monotone");
        }
        for (a, &i) in free.iter().enumerate() {
            for &j in &free[a + 1..] {
                // g(S ∪ {i,j}) + g(S) - g(S ∪ {i}) - g(S ∪ {j}) ≤ 0
                let mut t = Vec::new();
                prog.push_g(&mut t, s.with(i).with(j), 1);
                prog.push_g(&mut t, s, 1);
                prog.push_g(&mut t, s.with(i), -1);
                prog.push_g(&mut t, s.with(j), -1);
                lp.add_row(&t, RowKind::Le, int(0), "submodular");
            }
        }
    }

    for p in instance.parties() {
        for j in p.prohibited.messages() {
            let mut t = Vec::new();
            prog.push_g(&mut t, p.interfering, 1);
            prog.push_g(&mut t, p.interfering.without(j), -1);
            lp.add_row(&t, RowKind::Eq, int(0), "security");
        }
    }

    for p in instance.parties() {
        let unknown = p.unknown();
        for w in p.wants.subsets().skip(1) {
            let weight: Rational = w.messages().map(|i| rates[i - 1].clone()).sum();
            for b in (unknown - w).subsets() {
                let mut t = Vec::new();
                prog.push_g(&mut t, b | w, 1);
                prog.push_g(&mut t, b, -1);
                t.push((lambda, -weight.clone()));
                lp.add_row(&t, RowKind::Eq, int(0), "rate");
            }
        }
    }
    SpmProgram { lp, ..prog }
}

/// An exact optimal set function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunctionSolution {
    pub rate: Rational,
    /// `g(S)` indexed by mask, `g(∅) = 0`.
    pub g: Vec<Rational>,
}

impl SetFunctionSolution {
    pub fn value(&self, s: SubsetMask) -> &Rational {
        &self.g[s.index()]
    }

    /// Every constraint of the symmetric program checked directly on `g`;
    /// returns descriptions of the violated ones.
    pub fn violations(&self, instance: &ProblemInstance) -> Vec<String> {
        let n = instance.n();
        let g = |s: SubsetMask| &self.g[s.index()];
        let mut out = Vec::new();
        if !g(SubsetMask::EMPTY).is_zero() {
            out.push("g(∅) ≠ 0".to_string());
        }
        if *g(instance.full()) > Rational::one() {
            out.push("g([n]) > 1".to_string());
        }
        for s in SubsetMask::all(n) {
            let free: Vec<usize> = s.complement(n).messages().collect();
            for &i in &free {
                if g(s) > g(s.with(i)) {
                    out.push(format!("monotonicity fails at {s} + {i}"));
                }
            }
            for (a, &i) in free.iter().enumerate() {
                for &j in &free[a + 1..] {
                    if g(s.with(i).with(j)) + g(s) > g(s.with(i)) + g(s.with(j)) {
                        out.push(format!("submodularity fails at {s} + {i},{j}"));
                    }
                }
            }
        }
        for (k, p) in instance.parties().iter().enumerate() {
            for j in p.prohibited.messages() {
                if g(p.interfering) != g(p.interfering.without(j)) {
                    out.push(format!("security fails at party {} for {j}", k + 1));
                }
            }
            for w in p.wants.subsets().skip(1) {
                let target = &self.rate * int(w.len() as i64);
                for b in (p.unknown() - w).subsets() {
                    if g(b | w) - g(b) != target {
                        out.push(format!("rate equality fails at party {} for W={w}, B={b}", k + 1));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpmResult {
    pub bound: BoundValue,
    pub solution: Option<SetFunctionSolution>,
    pub certificate: Option<Certificate>,
    /// Set when the optimum is zero.
    pub advisory: Option<String>,
}

fn finish(instance: &ProblemInstance, prog: &SpmProgram, outcome: LpOutcome) -> Result<SpmResult> {
    match outcome {
        LpOutcome::Unbounded => {
            Ok(SpmResult { bound: BoundValue::Infinite, solution: None, certificate: None, advisory: None })
        }
        LpOutcome::Infeasible => Err(Error::Solver("the program reported infeasible, but g ≡ 0 is feasible".into())),
        LpOutcome::Optimal(cert) => {
            let g = prog.set_function(&cert.primal);
            let solution = SetFunctionSolution { rate: cert.value.clone(), g };
            if let Some(v) = solution.violations(instance).first() {
                return Err(Error::Solver(format!("recovered set function is infeasible: {v}")));
            }
            let advisory =
                cert.value.is_zero().then(|| "optimum is 0: the instance is possibly infeasible".to_string());
            Ok(SpmResult {
                bound: BoundValue::Finite(cert.value.clone()),
                solution: Some(solution),
                certificate: Some(cert),
                advisory,
            })
        }
    }
}

/// Exact symmetric optimum `R*` with an optimal set function.
/// The certificate refers to the merged program.
pub fn spm_symmetric(instance: &ProblemInstance) -> Result<SpmResult> {
    spm_symmetric_with(instance, &GPartition::build(instance))
}

pub fn spm_symmetric_with(instance: &ProblemInstance, gp: &GPartition) -> Result<SpmResult> {
    let prog = build_spm_lp_merged(instance, gp);
    let outcome = lp::solve_certified(&prog.lp)?;
    finish(instance, &prog, outcome)
}

/// Same optimum through the dense exact simplex; meant for small `n`.
pub fn spm_symmetric_dense(instance: &ProblemInstance, cap: usize) -> Result<SpmResult> {
    let prog = build_spm_lp(instance);
    let outcome = lp::solve_dense_exact(&prog.lp, cap)?;
    let mut res = finish(instance, &prog, outcome)?;
    res.certificate = None;
    Ok(res)
}

/// True iff some `g` satisfies every constraint with the given rates.
pub fn spm_check_tuple(instance: &ProblemInstance, rates: &[Rational]) -> Result<bool> {
    let prog = build_spm_lp_with_rates(instance, rates)?;
    if rates.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    match lp::solve_certified(&prog.lp)? {
        LpOutcome::Unbounded => Ok(true),
        LpOutcome::Infeasible => Ok(false),
        LpOutcome::Optimal(cert) => Ok(cert.value >= Rational::one()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::ratio;
    use crate::fixtures;

    fn broadcast() -> ProblemInstance {
        ProblemInstance::from_triples(2, &[(&[1], &[], &[]), (&[2], &[], &[])]).unwrap()
    }

    #[test]
    fn single_message() {
        let inst = ProblemInstance::from_triples(1, &[(&[1], &[], &[])]).unwrap();
        let prog = build_spm_lp(&inst);
        assert_eq!(prog.lp.num_vars(), 2);
        let r = spm_symmetric(&inst).unwrap();
        assert_eq!(r.bound, BoundValue::Finite(int(1)));
    }

    #[test]
    fn broadcast_is_half() {
        let inst = broadcast();
        let text = build_spm_lp(&inst).to_text();
        assert!(text.contains("- g{2} + g{1,2} - R = 0"), "{text}");
        let r = spm_symmetric(&inst).unwrap();
        assert_eq!(r.bound, BoundValue::Finite(ratio(1, 2)));
        assert!(r.solution.unwrap().violations(&inst).is_empty());
    }

    #[test]
    fn toy_has_security_rows() {
        let text = build_spm_lp(&fixtures::toy()).to_text();
        assert!(text.contains("g{2,3} - g{3} = 0") || text.contains("- g{3} + g{2,3} = 0"), "{text}");
        assert!(text.contains("- g{2} + g{2,3} = 0") || text.contains("g{2,3} - g{2} = 0"), "{text}");
    }

    #[test]
    fn tuples() {
        let inst = broadcast();
        assert!(spm_check_tuple(&inst, &[int(0), int(0)]).unwrap());
        assert!(!spm_check_tuple(&inst, &[ratio(3, 4), ratio(3, 4)]).unwrap());
        assert!(spm_check_tuple(&inst, &[ratio(1, 2), ratio(1, 2)]).unwrap());
        assert!(spm_check_tuple(&inst, &[ratio(1, 4), ratio(3, 4)]).unwrap());
        assert!(spm_check_tuple(&inst, &[int(1)]).is_err());
    }

    #[test]
    fn example_one_is_two_sevenths() {
        let inst = fixtures::example_one();
        let r = spm_symmetric(&inst).unwrap();
        assert_eq!(r.bound, BoundValue::Finite(ratio(2, 7)));
        let gp = GPartition::build(&inst);
        assert!(r.certificate.unwrap().verify(&build_spm_lp_merged(&inst, &gp).lp));
        assert!(r.solution.unwrap().violations(&inst).is_empty());
    }

    #[test]
    fn no_receiver_is_unbounded() {
        let inst = ProblemInstance::from_triples(2, &[(&[], &[1], &[2])]).unwrap();
        assert_eq!(spm_symmetric(&inst).unwrap().bound, BoundValue::Infinite);
    }

    #[test]
    fn dense_route_agrees_on_toy() {
        let inst = fixtures::toy();
        let a = spm_symmetric(&inst).unwrap();
        let b = spm_symmetric_dense(&inst, 100_000).unwrap();
        assert_eq!(a.bound, b.bound);
        assert!(b.solution.unwrap().violations(&inst).is_empty());
    }
}
