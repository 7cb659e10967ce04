//! Small unsatisfiable clause sets used by tests, the CLI and benchmarks.

use crate::circuits::Circuit;
use crate::formulas::{Clause, ClauseSet, Lit, Var};
use crate::proofs::ErProof;
use crate::prover::{dpll_refute, identity_order, proof_from_tree};
use crate::error::{Error, Result};
use crate::tableau::{Move, TmSpec};

/// `{p}, {¬p}`
pub fn omega1() -> ClauseSet {
    ClauseSet::from_dimacs_lits(1, &[&[1], &[-1]]).expect("static fixture")
}

/// `{p,q}, {¬p,q}, {¬q}`
pub fn omega2() -> ClauseSet {
    ClauseSet::from_dimacs_lits(2, &[&[1, 2], &[-1, 2], &[-2]]).expect("static fixture")
}

/// Pigeonhole principle: `pigeons` pigeons into `holes` holes, variable
/// `p_{i,j}` numbered `(i-1)·holes + j`.
pub fn php(pigeons: usize, holes: usize) -> ClauseSet {
    let var = |i: usize, j: usize| ((i - 1) * holes + j) as Var;
    let mut clauses: Vec<Clause> = (1..=pigeons).map(|i| (1..=holes).map(|j| Lit::pos(var(i, j))).collect()).collect();
    for j in 1..=holes {
        for i in 1..=pigeons {
            for k in i + 1..=pigeons {
                clauses.push(Clause::new([Lit::neg(var(i, j)), Lit::neg(var(k, j))]));
            }
        }
    }
    ClauseSet::new((pigeons * holes) as Var, clauses).expect("variables within range")
}

/// Tseitin parity contradiction on the cycle of length `k` with a single
/// odd vertex. Edge `e_i` joins vertex `i` and `i+1`; vertex 1 is odd.
pub fn tseitin_cycle(k: usize) -> ClauseSet {
    let mut clauses = Vec::with_capacity(2 * k);
    for v in 1..=k {
        let a = if v == 1 { k } else { v - 1 } as Var;
        let b = v as Var;
        let odd = v == 1;
        // a ⊕ b = odd
        if odd {
            clauses.push(Clause::new([Lit::pos(a), Lit::pos(b)]));
            clauses.push(Clause::new([Lit::neg(a), Lit::neg(b)]));
        } else {
            clauses.push(Clause::new([Lit::pos(a), Lit::neg(b)]));
            clauses.push(Clause::new([Lit::neg(a), Lit::pos(b)]));
        }
    }
    ClauseSet::new(k as Var, clauses).expect("variables within range")
}

/// The acceptance fixture family with display names.
pub fn family() -> Vec<(&'static str, ClauseSet)> {
    vec![("omega1", omega1()), ("omega2", omega2()), ("php3-2", php(3, 2)), ("tseitin4", tseitin_cycle(4))]
}

/// An ER refutation without extension gates, read off the DPLL tree.
pub fn dpll_er_proof(cs: &ClauseSet) -> Result<ErProof> {
    let t = dpll_refute(cs, &identity_order(cs.num_vars()))?.map_err(|a| Error::pre(format!("satisfiable: {a:?}")))?;
    Ok(ErProof { aux: Circuit::new(Vec::new(), Vec::new(), Vec::new()), proof: proof_from_tree(cs, &t)? })
}

/// One accepting state, no transitions: halts at once.
pub fn halt_machine() -> TmSpec {
    TmSpec { states: 1, alphabet: 2, transitions: Default::default(), accept: [0].into_iter().collect() }
}

/// Flips the first symbol, steps right and accepts.
pub fn flip_machine() -> TmSpec {
    TmSpec {
        states: 2,
        alphabet: 2,
        transitions: [((0, 0), (1, 1, Move::Right)), ((0, 1), (1, 0, Move::Right))].into_iter().collect(),
        accept: [1].into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::brute_force_sat;

    #[test]
    fn fixtures_are_unsat() {
        for (name, cs) in family() {
            assert_eq!(brute_force_sat(&cs).unwrap(), None, "{name}");
        }
        assert_eq!(php(3, 2).len(), 9);
        assert_eq!(tseitin_cycle(4).len(), 8);
        assert!(brute_force_sat(&php(2, 2)).unwrap().is_some());
    }
}
