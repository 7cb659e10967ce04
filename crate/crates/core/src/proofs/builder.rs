use std::collections::HashMap;

use super::{ResolutionProof, Step};
use crate::circuits::VarMap;
use crate::error::{Error, Result};
use crate::formulas::{Clause, Lit, Var};

/// Emits proof steps while tracking each step's clause.
///
/// `resolve` has subset semantics: when a side already lacks the pivot
/// literal, that side is returned unchanged instead of emitting a step.
/// Every clause produced is therefore a subset of what the corresponding
/// textbook step would give, which is what all the rewriting code relies on.
#[derive(Clone, Debug, Default)]
pub struct ProofBuilder {
    steps: Vec<Step>,
    clauses: Vec<Clause>,
    axiom_cache: Option<HashMap<usize, usize>>,
}

impl ProofBuilder {
    /// Each axiom request emits a fresh step (keeps tree shape).
    pub fn new() -> ProofBuilder {
        ProofBuilder::default()
    }

    /// Repeated axiom requests reuse one step.
    pub fn sharing() -> ProofBuilder {
        ProofBuilder { axiom_cache: Some(HashMap::new()), ..Default::default() }
    }

    pub fn clause(&self, id: usize) -> &Clause {
        &self.clauses[id]
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn push(&mut self, step: Step, clause: Clause) -> usize {
        self.steps.push(step);
        self.clauses.push(clause);
        self.steps.len() - 1
    }

    pub fn axiom(&mut self, index: usize, clause: &Clause) -> usize {
        if let Some(&id) = self.axiom_cache.as_ref().and_then(|c| c.get(&index)) {
            return id;
        }
        let id = self.push(Step::Axiom(index), clause.clone());
        if let Some(cache) = self.axiom_cache.as_mut() {
            cache.insert(index, id);
        }
        id
    }

    /// Resolves `pos` (holding `+pivot`) with `neg` (holding `-pivot`).
    pub fn resolve(&mut self, pos: usize, neg: usize, pivot: Var) -> usize {
        if !self.clauses[pos].contains(Lit::pos(pivot)) {
            return pos;
        }
        if !self.clauses[neg].contains(Lit::neg(pivot)) {
            return neg;
        }
        let c = self.clauses[pos].resolve(&self.clauses[neg], pivot);
        self.push(Step::Resolve { left: pos, right: neg, pivot }, c)
    }

    /// Resolves `a` (holding `lit`) with `b` (holding `¬lit`).
    pub fn resolve_lit(&mut self, a: usize, b: usize, lit: Lit) -> usize {
        if lit.is_pos() {
            self.resolve(a, b, lit.var())
        } else {
            self.resolve(b, a, lit.var())
        }
    }

    pub fn weaken(&mut self, source: usize, added: &[Lit]) -> usize {
        let c = &self.clauses[source];
        let missing: Vec<Lit> = added.iter().copied().filter(|&l| !c.contains(l)).collect();
        if missing.is_empty() {
            return source;
        }
        let c = c.with(missing.iter().copied());
        self.push(Step::Weaken { source, added: missing }, c)
    }

    /// Replays `proof` with subset semantics. Axioms go through `axiom`,
    /// variables through `vars` when given. Returns the id of the last step.
    pub fn replay(
        &mut self,
        proof: &ResolutionProof,
        mut axiom: impl FnMut(&mut ProofBuilder, usize) -> Result<usize>,
        vars: Option<&VarMap>,
    ) -> Result<usize> {
        let map_var = |v: Var| -> Result<Var> {
            match vars {
                None => Ok(v),
                Some(f) => f.get(v).ok_or_else(|| Error::pre(format!("variable {v} is not mapped"))),
            }
        };
        let mut ids: Vec<usize> = Vec::with_capacity(proof.len());
        for step in &proof.steps {
            let id = match step {
                Step::Axiom(k) => axiom(self, *k)?,
                Step::Resolve { left, right, pivot } => self.resolve(ids[*left], ids[*right], map_var(*pivot)?),
                Step::Weaken { source, added } => {
                    let added = added.iter().map(|l| Ok(Lit::new(map_var(l.var())?, l.is_pos()))).collect::<Result<Vec<_>>>()?;
                    self.weaken(ids[*source], &added)
                }
            };
            ids.push(id);
        }
        ids.last().copied().ok_or_else(|| Error::pre("cannot replay an empty proof"))
    }

    /// Keeps only the steps `root` depends on, renumbered in order.
    pub fn finish(self, root: usize) -> ResolutionProof {
        let mut keep = vec![false; root + 1];
        keep[root] = true;
        for i in (0..=root).rev() {
            if !keep[i] {
                continue;
            }
            match &self.steps[i] {
                Step::Axiom(_) => {}
                Step::Resolve { left, right, .. } => {
                    keep[*left] = true;
                    keep[*right] = true;
                }
                Step::Weaken { source, .. } => keep[*source] = true,
            }
        }
        let mut new_id = vec![usize::MAX; root + 1];
        let mut steps = Vec::new();
        for (i, step) in self.steps.into_iter().take(root + 1).enumerate() {
            if !keep[i] {
                continue;
            }
            new_id[i] = steps.len();
            steps.push(match step {
                Step::Axiom(k) => Step::Axiom(k),
                Step::Resolve { left, right, pivot } => Step::Resolve { left: new_id[left], right: new_id[right], pivot },
                Step::Weaken { source, added } => Step::Weaken { source: new_id[source], added },
            });
        }
        ResolutionProof::new(steps)
    }
}

/// Finds premises by clause content (first occurrence wins).
#[derive(Clone, Debug, Default)]
pub struct PremiseIndex {
    clauses: Vec<Clause>,
    by_clause: HashMap<Clause, usize>,
}

impl PremiseIndex {
    pub fn new(clauses: &[Clause]) -> PremiseIndex {
        let mut by_clause = HashMap::with_capacity(clauses.len());
        for (i, c) in clauses.iter().enumerate() {
            by_clause.entry(c.clone()).or_insert(i);
        }
        PremiseIndex { clauses: clauses.to_vec(), by_clause }
    }

    pub fn position(&self, c: &Clause) -> Option<usize> {
        self.by_clause.get(c).copied()
    }

    pub fn clause(&self, i: usize) -> &Clause {
        &self.clauses[i]
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Axiom step for premise `c`; fails if `c` is not a premise.
    pub fn axiom(&self, b: &mut ProofBuilder, c: &Clause) -> Result<usize> {
        let i = self.position(c).ok_or_else(|| Error::pre(format!("clause {c:?} is not among the premises")))?;
        Ok(b.axiom(i, &self.clauses[i]))
    }

    pub fn axiom_at(&self, b: &mut ProofBuilder, i: usize) -> Result<usize> {
        let c = self.clauses.get(i).ok_or_else(|| Error::pre(format!("premise index {i} out of range")))?;
        Ok(b.axiom(i, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::clause;

    #[test]
    fn smart_resolve_skips_missing_pivot() {
        let mut b = ProofBuilder::new();
        let a = b.axiom(0, &clause(&[1, 2]));
        let c = b.axiom(1, &clause(&[-1]));
        let d = b.axiom(2, &clause(&[3]));
        assert_eq!(b.resolve(d, c, 1), d);
        let r = b.resolve(a, c, 1);
        assert_eq!(b.clause(r), &clause(&[2]));
        let proof = b.finish(r);
        assert_eq!(proof.len(), 3);
    }

    #[test]
    fn sharing_reuses_axioms() {
        let mut b = ProofBuilder::sharing();
        let x = b.axiom(4, &clause(&[1]));
        assert_eq!(b.axiom(4, &clause(&[1])), x);
        let mut b = ProofBuilder::new();
        let x = b.axiom(4, &clause(&[1]));
        assert_ne!(b.axiom(4, &clause(&[1])), x);
    }
}
