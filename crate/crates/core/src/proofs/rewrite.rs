use super::{derive_clauses, ProofBuilder, ResolutionProof, Step};
use crate::circuits::VarMap;
use crate::error::{Error, Result};
use crate::formulas::{Clause, ClauseSet, Lit};

/// Renames variables by `f` and premise indices by `premise`.
pub fn rename_proof(p: &ResolutionProof, f: &VarMap, premise: impl Fn(usize) -> Option<usize>) -> Result<ResolutionProof> {
    let var = |v| f.get(v).ok_or_else(|| Error::pre(format!("variable {v} is not mapped")));
    let steps = p
        .steps
        .iter()
        .map(|s| {
            Ok(match s {
                Step::Axiom(k) => Step::Axiom(premise(*k).ok_or_else(|| Error::pre(format!("premise {k} is not mapped")))?),
                Step::Resolve { left, right, pivot } => Step::Resolve { left: *left, right: *right, pivot: var(*pivot)? },
                Step::Weaken { source, added } => Step::Weaken {
                    source: *source,
                    added: added.iter().map(|l| Ok(Lit::new(var(l.var())?, l.is_pos()))).collect::<Result<_>>()?,
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(ResolutionProof::new(steps))
}

fn require_refutation(premises: &[Clause], p: &ResolutionProof) -> Result<Vec<Clause>> {
    let clauses = derive_clauses(premises, p)?;
    match clauses.last() {
        Some(c) if c.is_empty() => Ok(clauses),
        Some(c) => Err(Error::pre(format!("proof ends in {c:?}, not the empty clause"))),
        None => Err(Error::pre("empty proof")),
    }
}

/// Turns a refutation of `premises ∪ {{u}}` (the unit is axiom index
/// `premises.len()`) into a derivation of `{¬u}` or of `∅` from `premises`
/// alone, with no more steps than `p`.
pub fn lift_unit_axiom(premises: &ClauseSet, p: &ResolutionProof, u: Lit) -> Result<ResolutionProof> {
    let base = premises.clauses();
    let mut ext = base.to_vec();
    ext.push(Clause::unit(u));
    let orig = require_refutation(&ext, p)?;
    let unit = base.len();
    let mut b = ProofBuilder::new();
    // None marks a step whose lifted clause is a tautology containing u and ¬u;
    // it is never materialized.
    let mut st: Vec<Option<usize>> = Vec::with_capacity(p.len());
    for (i, step) in p.steps.iter().enumerate() {
        let s = match step {
            Step::Axiom(k) if *k == unit => None,
            Step::Axiom(k) => Some(b.axiom(*k, &base[*k])),
            Step::Resolve { left, right, pivot } => match (st[*left], st[*right]) {
                (Some(l), Some(r)) => Some(b.resolve(l, r, *pivot)),
                _ if orig[i].contains(u) => None,
                (l, r) => l.or(r),
            },
            Step::Weaken { source, .. } => st[*source],
        };
        st.push(s);
    }
    let root = st.last().copied().flatten().ok_or_else(|| Error::pre("lifted proof has no root"))?;
    Ok(b.finish(root))
}

/// Removes weakening steps from a refutation; the result is no larger.
pub fn strip_weakening(premises: &ClauseSet, p: &ResolutionProof) -> Result<ResolutionProof> {
    require_refutation(premises.clauses(), p)?;
    let base = premises.clauses();
    let mut b = ProofBuilder::new();
    let mut ids: Vec<usize> = Vec::with_capacity(p.len());
    for step in &p.steps {
        let id = match step {
            Step::Axiom(k) => b.axiom(*k, &base[*k]),
            Step::Resolve { left, right, pivot } => b.resolve(ids[*left], ids[*right], *pivot),
            Step::Weaken { source, .. } => ids[*source],
        };
        ids.push(id);
    }
    Ok(b.finish(*ids.last().unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::clause;
    use crate::proofs::{check_proof, CheckOptions};

    #[test]
    fn lift_examples() {
        // premises {1 ∨ 2}, {¬2}; unit {¬1}
        let cs = ClauseSet::from_dimacs_lits(2, &[&[1, 2], &[-2]]).unwrap();
        let p = ResolutionProof::new(vec![
            Step::Axiom(0),
            Step::Axiom(1),
            Step::Resolve { left: 0, right: 1, pivot: 2 },
            Step::Axiom(2),
            Step::Resolve { left: 2, right: 3, pivot: 1 },
        ]);
        let q = lift_unit_axiom(&cs, &p, Lit::neg(1)).unwrap();
        assert!(q.len() <= p.len());
        assert_eq!(check_proof(&cs, &q, &clause(&[1]), CheckOptions::default()), Ok(()));
        // unused unit
        let cs = ClauseSet::from_dimacs_lits(1, &[&[1], &[-1]]).unwrap();
        let p = ResolutionProof::new(vec![Step::Axiom(0), Step::Axiom(1), Step::Resolve { left: 0, right: 1, pivot: 1 }]);
        let q = lift_unit_axiom(&cs, &p, Lit::pos(5)).unwrap();
        assert_eq!(check_proof(&cs, &q, &Clause::empty(), CheckOptions::default()), Ok(()));
    }

    #[test]
    fn strip_examples() {
        let cs = ClauseSet::from_dimacs_lits(2, &[&[1], &[-1]]).unwrap();
        let p = ResolutionProof::new(vec![
            Step::Axiom(0),
            Step::Weaken { source: 0, added: vec![Lit::pos(2)] },
            Step::Axiom(1),
            Step::Resolve { left: 1, right: 2, pivot: 1 },
            Step::Axiom(0),
            Step::Axiom(1),
            Step::Resolve { left: 4, right: 5, pivot: 1 },
        ]);
        let q = strip_weakening(&cs, &p).unwrap();
        assert_eq!(q.count_weakenings(), 0);
        assert!(q.len() <= p.len());
        assert!(check_proof(&cs, &q, &Clause::empty(), CheckOptions::default()).is_ok());
    }

    #[test]
    fn rename_examples() {
        let p = ResolutionProof::new(vec![Step::Axiom(0), Step::Axiom(1), Step::Resolve { left: 0, right: 1, pivot: 1 }]);
        let f: VarMap = [(1, 7)].into_iter().collect();
        let q = rename_proof(&p, &f, |k| Some(k + 10)).unwrap();
        assert_eq!(q.steps[2], Step::Resolve { left: 0, right: 1, pivot: 7 });
        assert_eq!(q.steps[0], Step::Axiom(10));
        assert!(rename_proof(&p, &VarMap::new(), Some).is_err());
    }
}
