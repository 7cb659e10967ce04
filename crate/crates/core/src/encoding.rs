//! Circuits β describing balanced decision-tree refutations.
//!
//! β reads a window `x_0..x_n` and names the variable queried at a node.
//! The node at depth `i` reached by path bits `z_1..z_{i-1}` has the window
//! `0^{n-i+1} 1 z_1..z_{i-1}`. Path bit 0 is the left child. Outputs
//! `y_1..y_|n|` are LSB first.

use std::collections::BTreeSet;

use crate::circuits::{validate_circuit, Circuit, CircuitBuilder, VarAlloc};
use crate::error::{Error, Result};
use crate::formulas::{is_weakening, Assignment, Clause, ClauseSet, Lit, Var};
use crate::prover::DecisionTree;

pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaInterface {
    pub n: usize,
    pub inputs: Vec<Var>,
    pub outputs: Vec<Var>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Beta {
    pub circuit: Circuit,
    pub iface: BetaInterface,
}

/// `|n|`, the number of bits needed to write `n`.
pub fn bit_length(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

/// `bit(m, j)`: the m-th least significant bit of `j`, counting from 1.
pub fn bit(m: usize, j: usize) -> bool {
    m >= 1 && (j >> (m - 1)) & 1 == 1
}

/// Window of the node at depth `path.len() + 1`.
pub fn window(n: usize, path: &[bool]) -> Vec<bool> {
    assert!(path.len() < n, "path longer than the tree depth");
    let mut w = vec![false; n - path.len()];
    w.push(true);
    w.extend_from_slice(path);
    w
}

impl Beta {
    /// Reads the interface off a circuit: inputs are the free variables in
    /// order, outputs the labelled outputs in order.
    pub fn from_circuit(circuit: Circuit) -> Result<Beta> {
        let n = circuit.free.len().checked_sub(1).ok_or_else(|| Error::pre("β needs at least one input"))?;
        let iface = BetaInterface { n, inputs: circuit.free.clone(), outputs: circuit.outputs.clone() };
        let beta = Beta { circuit, iface };
        beta.validate()?;
        Ok(beta)
    }

    pub fn validate(&self) -> Result<()> {
        validate_circuit(&self.circuit, None)?;
        let n = self.iface.n;
        if n == 0 {
            return Err(Error::pre("β must describe at least one variable"));
        }
        if self.iface.inputs.len() != n + 1 || self.iface.inputs != self.circuit.free {
            return Err(Error::pre(format!("β must have exactly the {} inputs x_0..x_n as its free variables", n + 1)));
        }
        if self.iface.outputs.len() != bit_length(n) {
            return Err(Error::pre(format!("β must have {} outputs", bit_length(n))));
        }
        let vars = self.circuit.vars();
        if let Some(v) = self.iface.outputs.iter().find(|v| !vars.contains(v)) {
            return Err(Error::pre(format!("output {v} is not a variable of β")));
        }
        Ok(())
    }

    /// The variable index β names on `window`.
    pub fn eval(&self, window: &[bool]) -> Result<usize> {
        if window.len() != self.iface.inputs.len() {
            return Err(Error::pre("window length differs from the input count"));
        }
        let mut a = Assignment::with_capacity(self.circuit.max_var());
        for (&v, &b) in self.iface.inputs.iter().zip(window) {
            a.set(v, b);
        }
        let vals = self.circuit.evaluate(&a)?;
        Ok(self.iface.outputs.iter().enumerate().map(|(m, &y)| (vals.get(y).unwrap_or(false) as usize) << m).sum())
    }
}

fn output_gate(b: &mut CircuitBuilder, body: Vec<Lit>) -> Var {
    if body.is_empty() {
        let f = b.constant(false);
        b.gate([f])
    } else {
        b.gate(body)
    }
}

/// Compiles a balanced tree into window comparators, one per internal node.
pub fn tree_to_circuit(t: &DecisionTree, n: usize, alloc: &mut VarAlloc) -> Result<Beta> {
    if n == 0 || !t.is_balanced(n) {
        return Err(Error::pre(format!("decision tree is not balanced of depth {n}")));
    }
    let inputs = alloc.fresh_n(n + 1);
    let mut b = CircuitBuilder::new(inputs.clone(), *alloc);
    let mut nodes: Vec<(Vec<bool>, Var)> = Vec::new();
    fn collect(t: &DecisionTree, path: &mut Vec<bool>, out: &mut Vec<(Vec<bool>, Var)>) {
        if let DecisionTree::Node { var, left, right } = t {
            out.push((path.clone(), *var));
            path.push(false);
            collect(left, path, out);
            path.pop();
            path.push(true);
            collect(right, path, out);
            path.pop();
        }
    }
    collect(t, &mut Vec::new(), &mut nodes);
    let hits: Vec<(Lit, Var)> = nodes
        .iter()
        .map(|(path, var)| {
            let w = window(n, path);
            let ne = b.gate(inputs.iter().zip(&w).map(|(&x, &bit)| Lit::new(x, !bit)));
            (Lit::neg(ne), *var)
        })
        .collect();
    let outputs: Vec<Var> = (1..=bit_length(n))
        .map(|m| {
            let body: Vec<Lit> = hits.iter().filter(|(_, v)| bit(m, *v as usize)).map(|(l, _)| *l).collect();
            output_gate(&mut b, body)
        })
        .collect();
    *alloc = b.alloc;
    let mut circuit = b.finish();
    circuit.outputs = outputs.clone();
    Ok(Beta { circuit, iface: BetaInterface { n, inputs, outputs } })
}

/// β for the tree that queries `p_i` at depth `i` on every path.
pub fn canonical_beta(n: usize, alloc: &mut VarAlloc) -> Result<Beta> {
    if n == 0 {
        return Err(Error::pre("canonical β needs n ≥ 1"));
    }
    let x = alloc.fresh_n(n + 1);
    let mut b = CircuitBuilder::new(x.clone(), *alloc);
    // pre_k: some input before position k is set; the leading 1 sits at k iff ¬g_k
    let mut pre = Lit::pos(x[0]);
    let mut lead = Vec::with_capacity(n);
    for k in 1..=n {
        lead.push(Lit::neg(b.gate([Lit::neg(x[k]), pre])));
        if k < n {
            pre = Lit::pos(b.gate([pre, Lit::pos(x[k])]));
        }
    }
    let outputs: Vec<Var> = (1..=bit_length(n))
        .map(|m| {
            let body: Vec<Lit> = (1..=n).filter(|&k| bit(m, n + 1 - k)).map(|k| lead[k - 1]).collect();
            output_gate(&mut b, body)
        })
        .collect();
    *alloc = b.alloc;
    let mut circuit = b.finish();
    circuit.outputs = outputs.clone();
    Ok(Beta { circuit, iface: BetaInterface { n, inputs: x, outputs } })
}

/// A depth at which β named no variable in `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangeAnomaly {
    pub depth: usize,
    pub value: usize,
}

/// The initial clause of path `x`, and the depths where β was out of range.
pub fn compute_initial_clause(beta: &Beta, x: &[bool]) -> Result<(Clause, Vec<RangeAnomaly>)> {
    let n = beta.iface.n;
    if x.len() != n {
        return Err(Error::pre(format!("path must have {n} bits")));
    }
    let mut lits = Vec::with_capacity(n);
    let mut anomalies = Vec::new();
    for i in 1..=n {
        let j = beta.eval(&window(n, &x[..i - 1]))?;
        if (1..=n).contains(&j) {
            lits.push(Lit::new(j as Var, x[i - 1]));
        } else {
            anomalies.push(RangeAnomaly { depth: i, value: j });
        }
    }
    Ok((Clause::new(lits), anomalies))
}

fn bits_of(n: usize, code: u64) -> Vec<bool> {
    (0..n).map(|i| (code >> (n - 1 - i)) & 1 == 1).collect()
}

/// All initial clauses of β.
pub fn enumerate_initial_clauses(beta: &Beta) -> Result<BTreeSet<Clause>> {
    let n = beta.iface.n;
    if n > ENUMERATION_LIMIT {
        return Err(Error::GuardExceeded { what: "n", value: n, limit: ENUMERATION_LIMIT });
    }
    (0..1u64 << n).map(|code| Ok(compute_initial_clause(beta, &bits_of(n, code))?.0)).collect()
}

/// Path-enumeration oracle: a path whose initial clause weakens no clause of
/// `omega`, if any.
pub fn escaping_path(omega: &ClauseSet, beta: &Beta) -> Result<Option<Vec<bool>>> {
    let n = beta.iface.n;
    if n > ENUMERATION_LIMIT {
        return Err(Error::GuardExceeded { what: "n", value: n, limit: ENUMERATION_LIMIT });
    }
    for code in 0..1u64 << n {
        let x = bits_of(n, code);
        let (c, _) = compute_initial_clause(beta, &x)?;
        if !omega.clauses().iter().any(|l| is_weakening(l, &c)) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// The decision tree β describes, with its initial clauses as leaves. A
/// node whose variable is out of range is replaced by its left subtree.
pub fn induced_tree(beta: &Beta) -> Result<DecisionTree> {
    let n = beta.iface.n;
    if n > ENUMERATION_LIMIT {
        return Err(Error::GuardExceeded { what: "n", value: n, limit: ENUMERATION_LIMIT });
    }
    fn go(beta: &Beta, path: &mut Vec<bool>) -> Result<DecisionTree> {
        let n = beta.iface.n;
        if path.len() == n {
            return Ok(DecisionTree::Leaf(compute_initial_clause(beta, path)?.0));
        }
        let j = beta.eval(&window(n, path))?;
        path.push(false);
        let left = go(beta, path);
        path.pop();
        let left = left?;
        if !(1..=n).contains(&j) {
            return Ok(left);
        }
        path.push(true);
        let right = go(beta, path);
        path.pop();
        Ok(DecisionTree::node(j as Var, left, right?))
    }
    go(beta, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{clause, is_weakening, ClauseSet};
    use crate::proofs::{check_proof, CheckOptions};
    use crate::prover::{balance_tree, dpll_refute, proof_from_tree};

    fn omega2_beta() -> (DecisionTree, Beta) {
        let cs = ClauseSet::from_dimacs_lits(2, &[&[1, 2], &[-1, 2], &[-2]]).unwrap();
        let t = balance_tree(&dpll_refute(&cs, &[1, 2]).unwrap().unwrap(), 2, &[1, 2]).unwrap();
        let beta = tree_to_circuit(&t, 2, &mut VarAlloc::new(1)).unwrap();
        (t, beta)
    }

    #[test]
    fn windows_and_bits() {
        assert_eq!(window(2, &[]), vec![false, false, true]);
        assert_eq!(window(2, &[true]), vec![false, true, true]);
        assert_eq!(bit_length(1), 1);
        assert_eq!(bit_length(4), 3);
        assert!(bit(1, 3) && bit(2, 3) && !bit(3, 3));
    }

    #[test]
    fn canonical_examples() {
        let b1 = canonical_beta(1, &mut VarAlloc::new(1)).unwrap();
        assert_eq!(b1.eval(&[false, true]).unwrap(), 1);
        let b2 = canonical_beta(2, &mut VarAlloc::new(1)).unwrap();
        assert_eq!(b2.eval(&[false, false, true]).unwrap(), 1);
        assert_eq!(b2.eval(&[false, true, false]).unwrap(), 2);
        assert_eq!(b2.eval(&[false, true, true]).unwrap(), 2);
        let b5 = canonical_beta(5, &mut VarAlloc::new(1)).unwrap();
        assert_eq!(b5.eval(&window(5, &[true, false])).unwrap(), 3);
        assert!(canonical_beta(0, &mut VarAlloc::new(1)).is_err());
        for n in 1..=9 {
            let b = canonical_beta(n, &mut VarAlloc::new(1)).unwrap();
            b.validate().unwrap();
            for i in 1..=n {
                for code in 0..1u64 << (i - 1) {
                    assert_eq!(b.eval(&window(n, &bits_of(i - 1, code))).unwrap(), i);
                }
            }
        }
    }

    #[test]
    fn initial_clause_examples() {
        let b2 = canonical_beta(2, &mut VarAlloc::new(1)).unwrap();
        assert_eq!(compute_initial_clause(&b2, &[true, false]).unwrap(), (clause(&[1, -2]), vec![]));
        let b1 = canonical_beta(1, &mut VarAlloc::new(1)).unwrap();
        assert_eq!(compute_initial_clause(&b1, &[false]).unwrap().0, clause(&[-1]));
        assert_eq!(enumerate_initial_clauses(&b1).unwrap(), [clause(&[1]), clause(&[-1])].into_iter().collect());
        let all = enumerate_initial_clauses(&b2).unwrap();
        let expect: BTreeSet<Clause> =
            [[1, 2], [1, -2], [-1, 2], [-1, -2]].iter().map(|c| clause(c)).collect();
        assert_eq!(all, expect);
    }

    #[test]
    fn tree_compilation_matches_tree() {
        let (t, beta) = omega2_beta();
        beta.validate().unwrap();
        let DecisionTree::Node { var, left, right } = &t else { panic!() };
        assert_eq!(beta.eval(&[false, false, true]).unwrap(), *var as usize);
        for (b, sub) in [(false, left), (true, right)] {
            if let DecisionTree::Node { var, .. } = sub.as_ref() {
                assert_eq!(beta.eval(&[false, true, b]).unwrap(), *var as usize);
            }
        }
        let cs = ClauseSet::from_dimacs_lits(2, &[&[1, 2], &[-1, 2], &[-2]]).unwrap();
        for c in enumerate_initial_clauses(&beta).unwrap() {
            assert!(cs.clauses().iter().any(|p| is_weakening(p, &c)));
        }
        // leaf of path x is falsified by p_j := 1 - bit
        for (path, leaf) in t.leaves() {
            let x: Vec<bool> = path.iter().map(|l| !l.is_pos()).collect();
            let (c, _) = compute_initial_clause(&beta, &x).unwrap();
            assert!(is_weakening(leaf, &c));
        }
    }

    #[test]
    fn induced_tree_refutes_initial_clauses() {
        let (_, beta) = omega2_beta();
        let cs = ClauseSet::from_clauses(enumerate_initial_clauses(&beta).unwrap().into_iter().collect());
        let p = proof_from_tree(&cs, &induced_tree(&beta).unwrap()).unwrap();
        assert!(check_proof(&cs, &p, &Clause::empty(), CheckOptions::default()).is_ok());
    }

    #[test]
    fn out_of_range_reported() {
        let mut b = canonical_beta(2, &mut VarAlloc::new(1)).unwrap();
        let mut c = CircuitBuilder::new(b.circuit.free.clone(), VarAlloc::new(100));
        let f = c.constant(false);
        let y1 = c.gate([f]);
        let y2 = c.gate([f]);
        b.circuit = c.finish();
        b.circuit.outputs = vec![y1, y2];
        b.iface.outputs = vec![y1, y2];
        let (cl, anomalies) = compute_initial_clause(&b, &[true, true]).unwrap();
        assert!(cl.is_empty());
        assert_eq!(anomalies, vec![RangeAnomaly { depth: 1, value: 0 }, RangeAnomaly { depth: 2, value: 0 }]);
    }
}
