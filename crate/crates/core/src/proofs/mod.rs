//! Resolution and extended-resolution proofs.
//!
//! A proof is a list of steps; clauses are always recomputed from the rules
//! and never read from the input.

mod builder;
mod rewrite;
mod rup;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuits::{validate_circuit, Circuit, CircuitViolation};
use crate::error::{Error, Result};
use crate::formulas::{Clause, ClauseSet, Lit, Var};

pub use builder::{PremiseIndex, ProofBuilder};
pub use rewrite::{lift_unit_axiom, rename_proof, strip_weakening};
pub use rup::{rup_derive, Propagator};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    /// Premise by position.
    Axiom(usize),
    /// `left` holds `+pivot`, `right` holds `-pivot`.
    Resolve { left: usize, right: usize, pivot: Var },
    Weaken { source: usize, added: Vec<Lit> },
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ResolutionProof {
    pub steps: Vec<Step>,
}

impl ResolutionProof {
    pub fn new(steps: Vec<Step>) -> ResolutionProof {
        ResolutionProof { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn count_weakenings(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Weaken { .. })).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub tree_like: bool,
    pub regular: bool,
    pub forbid_weakening: bool,
    pub weakening_leaves_only: bool,
}

impl CheckOptions {
    pub fn strict_tree() -> CheckOptions {
        CheckOptions { tree_like: true, regular: true, forbid_weakening: false, weakening_leaves_only: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofFault {
    #[error("proof has no steps")]
    Empty,
    #[error("premise index {0} out of range")]
    BadPremise(usize),
    #[error("step refers to {0}, which does not precede it")]
    ForwardReference(usize),
    #[error("pivot {pivot} does not occur positively in the left clause")]
    PivotMissingLeft { pivot: Var },
    #[error("pivot {pivot} does not occur negatively in the right clause")]
    PivotMissingRight { pivot: Var },
    #[error("weakening literal {0} lies outside the premise variables")]
    ForeignLiteral(Lit),
    #[error("weakening is forbidden")]
    WeakeningForbidden,
    #[error("weakening applied to a non-axiom step")]
    WeakeningNotAtLeaf,
    #[error("step is referenced {0} times (tree-like proofs need exactly one)")]
    NotTreeLike(usize),
    #[error("variable {0} is resolved twice on one path")]
    Irregular(Var),
    #[error("final clause {found:?} differs from target {target:?}")]
    WrongTarget { found: Clause, target: Clause },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("step {step}: {fault}")]
pub struct ProofError {
    pub step: usize,
    pub fault: ProofFault,
}

fn fail<T>(step: usize, fault: ProofFault) -> Result<T, ProofError> {
    Err(ProofError { step, fault })
}

/// Recomputes the clause of every step.
pub fn derive_clauses(premises: &[Clause], proof: &ResolutionProof) -> Result<Vec<Clause>, ProofError> {
    let mut out: Vec<Clause> = Vec::with_capacity(proof.len());
    for (i, step) in proof.steps.iter().enumerate() {
        let prior = |j: usize| if j < i { Ok(&out[j]) } else { fail(i, ProofFault::ForwardReference(j)) };
        let c = match step {
            Step::Axiom(k) => match premises.get(*k) {
                Some(c) => c.clone(),
                None => return fail(i, ProofFault::BadPremise(*k)),
            },
            Step::Resolve { left, right, pivot } => {
                let (l, r) = (prior(*left)?, prior(*right)?);
                if *pivot == 0 || !l.contains(Lit::pos(*pivot)) {
                    return fail(i, ProofFault::PivotMissingLeft { pivot: *pivot });
                }
                if !r.contains(Lit::neg(*pivot)) {
                    return fail(i, ProofFault::PivotMissingRight { pivot: *pivot });
                }
                l.resolve(r, *pivot)
            }
            Step::Weaken { source, added } => prior(*source)?.with(added.iter().copied()),
        };
        out.push(c);
    }
    Ok(out)
}

/// Checks `proof` as a derivation of `target` from `premises`.
pub fn check_proof(premises: &ClauseSet, proof: &ResolutionProof, target: &Clause, opts: CheckOptions) -> Result<(), ProofError> {
    if proof.is_empty() {
        return fail(0, ProofFault::Empty);
    }
    let n = premises.num_vars();
    for (i, step) in proof.steps.iter().enumerate() {
        if let Step::Weaken { source, added } = step {
            if opts.forbid_weakening {
                return fail(i, ProofFault::WeakeningForbidden);
            }
            if let Some(&l) = added.iter().find(|l| l.var() > n) {
                return fail(i, ProofFault::ForeignLiteral(l));
            }
            if opts.weakening_leaves_only && !matches!(proof.steps.get(*source), Some(Step::Axiom(_))) {
                return fail(i, ProofFault::WeakeningNotAtLeaf);
            }
        }
    }
    let clauses = derive_clauses(premises.clauses(), proof)?;
    let last = proof.len() - 1;
    if &clauses[last] != target {
        return fail(last, ProofFault::WrongTarget { found: clauses[last].clone(), target: target.clone() });
    }
    if opts.tree_like {
        let mut refs = vec![0usize; proof.len()];
        for step in &proof.steps {
            match step {
                Step::Axiom(_) => {}
                Step::Resolve { left, right, .. } => {
                    refs[*left] += 1;
                    refs[*right] += 1;
                }
                Step::Weaken { source, .. } => refs[*source] += 1,
            }
        }
        if let Some(i) = (0..last).find(|&i| refs[i] != 1) {
            return fail(i, ProofFault::NotTreeLike(refs[i]));
        }
    }
    if opts.regular {
        let mut below: Vec<BTreeSet<Var>> = Vec::with_capacity(proof.len());
        for (i, step) in proof.steps.iter().enumerate() {
            let set = match step {
                Step::Axiom(_) => BTreeSet::new(),
                Step::Weaken { source, .. } => below[*source].clone(),
                Step::Resolve { left, right, pivot } => {
                    if below[*left].contains(pivot) || below[*right].contains(pivot) {
                        return fail(i, ProofFault::Irregular(*pivot));
                    }
                    let mut s = below[*left].clone();
                    s.extend(below[*right].iter().copied());
                    s.insert(*pivot);
                    s
                }
            };
            below.push(set);
        }
    }
    Ok(())
}

/// An R-refutation of `premises ∪ clauses(aux)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ErProof {
    pub aux: Circuit,
    pub proof: ResolutionProof,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ErError {
    #[error("auxiliary circuit: {0}")]
    Aux(CircuitViolation),
    #[error("auxiliary free variable {0} does not occur in the premises")]
    ForeignFree(Var),
    #[error("auxiliary extension variable {0} already occurs in the premises")]
    ExtensionClash(Var),
    #[error("{0}")]
    Proof(ProofError),
}

/// Premise list an ER proof is checked against: `premises` then the aux clauses.
pub fn er_premises(premises: &ClauseSet, aux: &Circuit) -> ClauseSet {
    let mut all = premises.clone();
    for c in aux.clauses() {
        all.push(c);
    }
    all
}

pub fn check_er(premises: &ClauseSet, ep: &ErProof) -> Result<(), ErError> {
    validate_circuit(&ep.aux, None).map_err(ErError::Aux)?;
    let gamma = premises.vars();
    if let Some(&v) = ep.aux.free.iter().find(|v| !gamma.contains(v)) {
        return Err(ErError::ForeignFree(v));
    }
    if let Some(g) = ep.aux.gates.iter().find(|g| gamma.contains(&g.defined)) {
        return Err(ErError::ExtensionClash(g.defined));
    }
    let all = er_premises(premises, &ep.aux);
    check_proof(&all, &ep.proof, &Clause::empty(), CheckOptions::default()).map_err(ErError::Proof)
}

pub fn serialize_proof(p: &ResolutionProof, n_premises: usize) -> String {
    let mut s = format!("res-proof {n_premises}\n");
    for step in &p.steps {
        match step {
            Step::Axiom(k) => writeln!(s, "a {k}").unwrap(),
            Step::Resolve { left, right, pivot } => writeln!(s, "r {left} {right} {pivot}").unwrap(),
            Step::Weaken { source, added } => {
                write!(s, "w {source}").unwrap();
                for l in added {
                    write!(s, " {l}").unwrap();
                }
                s.push_str(" 0\n");
            }
        }
    }
    s
}

/// Parses the proof format; returns the proof and the declared premise count.
pub fn parse_proof(text: &str) -> Result<(ResolutionProof, usize)> {
    let mut header = None;
    let mut steps = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad index `{t}`")));
        match (toks[0], header) {
            ("res-proof", None) if toks.len() == 2 => header = Some(num(toks[1])?),
            (_, None) => return Err(Error::parse(lineno, "missing `res-proof <n_premises>` header")),
            ("a", Some(_)) if toks.len() == 2 => steps.push(Step::Axiom(num(toks[1])?)),
            ("r", Some(_)) if toks.len() == 4 => {
                let pivot = num(toks[3])?;
                if pivot == 0 || pivot > Var::MAX as usize {
                    return Err(Error::parse(lineno, "bad pivot"));
                }
                steps.push(Step::Resolve { left: num(toks[1])?, right: num(toks[2])?, pivot: pivot as Var });
            }
            ("w", Some(_)) if toks.len() >= 3 && *toks.last().unwrap() == "0" => {
                let added = toks[2..toks.len() - 1]
                    .iter()
                    .map(|t| {
                        t.parse::<i64>().ok().and_then(Lit::from_dimacs).ok_or_else(|| Error::parse(lineno, format!("bad literal `{t}`")))
                    })
                    .collect::<Result<_>>()?;
                steps.push(Step::Weaken { source: num(toks[1])?, added });
            }
            _ => return Err(Error::parse(lineno, format!("malformed step `{line}`"))),
        }
    }
    let n = header.ok_or_else(|| Error::parse(0, "missing `res-proof` header"))?;
    Ok((ResolutionProof::new(steps), n))
}

/// Writes an ER proof: an `er-proof` line, the auxiliary circuit, then the
/// resolution proof over `premises ∪ clauses(aux)`.
pub fn serialize_er_proof(ep: &ErProof, n_premises: usize) -> String {
    let n_all = n_premises + ep.aux.clauses().len();
    format!("er-proof\n{}{}", crate::circuits::serialize_circuit(&ep.aux), serialize_proof(&ep.proof, n_all))
}

/// Parses [`serialize_er_proof`] output; returns the proof and the declared
/// premise count of the resolution part.
pub fn parse_er_proof(text: &str) -> Result<(ErProof, usize)> {
    let lines: Vec<&str> = text.lines().collect();
    let content = |l: &str| l.split('#').next().unwrap().trim().to_string();
    let head = lines.iter().position(|l| !content(l).is_empty()).ok_or_else(|| Error::parse(0, "empty ER proof"))?;
    if content(lines[head]) != "er-proof" {
        return Err(Error::parse(head, "missing `er-proof` header"));
    }
    let split = lines
        .iter()
        .position(|l| content(l).starts_with("res-proof"))
        .ok_or_else(|| Error::parse(lines.len(), "missing `res-proof` block"))?;
    let shift = |e: Error, by: usize| match e {
        Error::Parse { line, msg } => Error::Parse { line: line + by, msg },
        e => e,
    };
    let aux = crate::circuits::parse_circuit(&lines[head + 1..split].join("\n")).map_err(|e| shift(e, head + 1))?;
    let (proof, n) = parse_proof(&lines[split..].join("\n")).map_err(|e| shift(e, split))?;
    Ok((ErProof { aux, proof }, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::Gate;
    use crate::formulas::clause;

    fn omega1() -> ClauseSet {
        ClauseSet::from_dimacs_lits(1, &[&[1], &[-1]]).unwrap()
    }

    fn omega1_refutation() -> ResolutionProof {
        ResolutionProof::new(vec![Step::Axiom(0), Step::Axiom(1), Step::Resolve { left: 0, right: 1, pivot: 1 }])
    }

    #[test]
    fn check_examples() {
        let ok = check_proof(&omega1(), &omega1_refutation(), &Clause::empty(), CheckOptions::strict_tree());
        assert_eq!(ok, Ok(()));
        let mut bad = omega1_refutation();
        bad.steps[2] = Step::Resolve { left: 0, right: 1, pivot: 2 };
        let err = check_proof(&omega1(), &bad, &Clause::empty(), CheckOptions::default()).unwrap_err();
        assert_eq!(err.step, 2);
    }

    #[test]
    fn irregular_proof_rejected() {
        // premises: 1 ∨ 2, ¬1, ¬2 ∨ 1, ¬1 (again)
        let cs = ClauseSet::from_dimacs_lits(2, &[&[1, 2], &[-1], &[-2, 1]]).unwrap();
        let steps = vec![
            Step::Axiom(0),                                   // 0: 1 2
            Step::Axiom(1),                                   // 1: -1
            Step::Resolve { left: 0, right: 1, pivot: 1 },    // 2: 2
            Step::Axiom(2),                                   // 3: -2 1
            Step::Resolve { left: 2, right: 3, pivot: 2 },    // 4: 1
            Step::Axiom(1),                                   // 5: -1
            Step::Resolve { left: 4, right: 5, pivot: 1 },    // 6: empty, resolves 1 again below
        ];
        let p = ResolutionProof::new(steps);
        let plain = CheckOptions { tree_like: true, ..Default::default() };
        assert_eq!(check_proof(&cs, &p, &Clause::empty(), plain), Ok(()));
        let regular = CheckOptions { regular: true, ..Default::default() };
        let err = check_proof(&cs, &p, &Clause::empty(), regular).unwrap_err();
        assert_eq!(err, ProofError { step: 6, fault: ProofFault::Irregular(1) });
    }

    #[test]
    fn tree_like_and_weakening_options() {
        let cs = omega1();
        let shared = ResolutionProof::new(vec![
            Step::Axiom(0),
            Step::Axiom(1),
            Step::Weaken { source: 0, added: vec![Lit::neg(1)] },
            Step::Resolve { left: 0, right: 1, pivot: 1 },
        ]);
        assert!(matches!(
            check_proof(&cs, &shared, &Clause::empty(), CheckOptions { tree_like: true, ..Default::default() }),
            Err(ProofError { fault: ProofFault::NotTreeLike(2), .. })
        ));
        assert!(matches!(
            check_proof(&cs, &shared, &Clause::empty(), CheckOptions { forbid_weakening: true, ..Default::default() }),
            Err(ProofError { fault: ProofFault::WeakeningForbidden, .. })
        ));
        let foreign = ResolutionProof::new(vec![Step::Axiom(0), Step::Weaken { source: 0, added: vec![Lit::pos(9)] }]);
        assert!(matches!(
            check_proof(&cs, &foreign, &clause(&[1, 9]), CheckOptions::default()),
            Err(ProofError { fault: ProofFault::ForeignLiteral(_), .. })
        ));
        let forward = ResolutionProof::new(vec![Step::Resolve { left: 1, right: 2, pivot: 1 }]);
        assert!(check_proof(&cs, &forward, &Clause::empty(), CheckOptions::default()).is_err());
    }

    #[test]
    fn liberal_resolution_rule() {
        // 1 ∨ ¬1 resolved with ¬1 on 1 keeps ¬1
        let cs = ClauseSet::from_dimacs_lits(1, &[&[1, -1], &[-1]]).unwrap();
        let p = ResolutionProof::new(vec![Step::Axiom(0), Step::Axiom(1), Step::Resolve { left: 0, right: 1, pivot: 1 }]);
        assert_eq!(check_proof(&cs, &p, &clause(&[-1]), CheckOptions::default()), Ok(()));
    }

    #[test]
    fn er_examples() {
        let plain = ErProof { aux: Circuit::default(), proof: omega1_refutation() };
        assert_eq!(check_er(&omega1(), &plain), Ok(()));
        let foreign = ErProof { aux: Circuit::new(vec![99], vec![Gate::new(100, [Lit::pos(99)])], vec![]), proof: omega1_refutation() };
        assert_eq!(check_er(&omega1(), &foreign), Err(ErError::ForeignFree(99)));
        let clash = ErProof { aux: Circuit::new(vec![], vec![Gate::new(1, [Lit::pos(1)])], vec![]), proof: omega1_refutation() };
        assert!(matches!(check_er(&omega1(), &clash), Err(ErError::Aux(_))));
        // e(=2) ≡ p1 ∨ ¬p1; axiom e ∨ ¬p1 is premise index 3 (after ¬e∨p1∨¬p1, e∨¬p1, ...)
        let aux = Circuit::new(vec![1], vec![Gate::new(2, [Lit::pos(1), Lit::neg(1)])], vec![]);
        let all = er_premises(&omega1(), &aux);
        assert_eq!(all.clauses()[3], clause(&[2, -1]));
        let proof = ResolutionProof::new(vec![
            Step::Axiom(3),                                // e ∨ ¬p1
            Step::Axiom(0),                                // p1
            Step::Resolve { left: 1, right: 0, pivot: 1 }, // e
            Step::Axiom(0),
            Step::Axiom(1),
            Step::Resolve { left: 3, right: 4, pivot: 1 },
        ]);
        assert_eq!(check_er(&omega1(), &ErProof { aux, proof }), Ok(()));
    }

    #[test]
    fn text_format() {
        let mut p = omega1_refutation();
        p.steps.push(Step::Weaken { source: 2, added: vec![Lit::neg(1)] });
        let text = serialize_proof(&p, 2);
        assert_eq!(text, "res-proof 2\na 0\na 1\nr 0 1 1\nw 2 -1 0\n");
        assert_eq!(parse_proof(&text).unwrap(), (p, 2));
        assert!(parse_proof("a 0\n").is_err());
        assert!(parse_proof("res-proof 1\nr 0 1\n").is_err());
        assert!(parse_proof("res-proof 1\nw 0 1\n").is_err());
    }

    #[test]
    fn er_text_format() {
        let aux = Circuit::new(vec![1], vec![Gate::new(2, [Lit::pos(1), Lit::neg(1)])], vec![]);
        let ep = ErProof { aux, proof: omega1_refutation() };
        let text = serialize_er_proof(&ep, 2);
        assert_eq!(parse_er_proof(&text).unwrap(), (ep, 5));
        let plain = ErProof { aux: Circuit::default(), proof: omega1_refutation() };
        assert_eq!(parse_er_proof(&serialize_er_proof(&plain, 2)).unwrap().0, plain);
        assert!(parse_er_proof("res-proof 2
a 0
").is_err());
        let err = parse_er_proof("er-proof\ncirc 1\nfree 1\nres-proof 2\nq\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 5, msg: "malformed step `q`".into() });
    }
}
