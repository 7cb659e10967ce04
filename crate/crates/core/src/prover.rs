//! Decision trees, a small DPLL refuter, and tree-to-proof conversion.
//!
//! The left child of `Node(v, ..)` is the branch where `v` is true, so its
//! leaf clauses contain `¬v`; the right child sets `v` false.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formulas::{Assignment, Clause, ClauseSet, Lit, Var};
use crate::proofs::{Propagator, ProofBuilder, ResolutionProof};

pub const DPLL_LIMIT: Var = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionTree {
    Leaf(Clause),
    Node { var: Var, left: Box<DecisionTree>, right: Box<DecisionTree> },
}

impl DecisionTree {
    pub fn leaf(c: Clause) -> DecisionTree {
        DecisionTree::Leaf(c)
    }

    pub fn node(var: Var, left: DecisionTree, right: DecisionTree) -> DecisionTree {
        DecisionTree::Node { var, left: Box::new(left), right: Box::new(right) }
    }

    pub fn node_count(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Node { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Leaves with their paths; a path literal is true on that path.
    pub fn leaves(&self) -> Vec<(Vec<Lit>, &Clause)> {
        fn go<'a>(t: &'a DecisionTree, path: &mut Vec<Lit>, out: &mut Vec<(Vec<Lit>, &'a Clause)>) {
            match t {
                DecisionTree::Leaf(c) => out.push((path.clone(), c)),
                DecisionTree::Node { var, left, right } => {
                    path.push(Lit::pos(*var));
                    go(left, path, out);
                    path.pop();
                    path.push(Lit::neg(*var));
                    go(right, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// No variable repeats on a root-leaf path.
    pub fn is_regular(&self) -> bool {
        self.leaves().iter().all(|(path, _)| path.iter().map(|l| l.var()).collect::<BTreeSet<_>>().len() == path.len())
    }

    /// Every leaf clause is falsified by its path.
    pub fn leaves_falsified(&self) -> bool {
        self.leaves().iter().all(|(path, c)| c.lits().iter().all(|l| path.contains(&!*l)))
    }

    pub fn is_balanced(&self, n: usize) -> bool {
        self.is_regular() && self.leaves().iter().all(|(p, _)| p.len() == n)
    }
}

fn falsified(c: &Clause, a: &Assignment) -> bool {
    c.lits().iter().all(|&l| a.lit_value(l) == Some(false))
}

/// Refutes `cs` by plain branching in `order`, or returns a model.
pub fn dpll_refute(cs: &ClauseSet, order: &[Var]) -> Result<std::result::Result<DecisionTree, Assignment>> {
    if cs.num_vars() > DPLL_LIMIT {
        return Err(Error::GuardExceeded { what: "variable count", value: cs.num_vars() as usize, limit: DPLL_LIMIT as usize });
    }
    fn go(cs: &ClauseSet, order: &[Var], a: &mut Assignment) -> std::result::Result<DecisionTree, Assignment> {
        if let Some(c) = cs.clauses().iter().find(|c| falsified(c, a)) {
            return Ok(DecisionTree::Leaf(c.clone()));
        }
        let open: Vec<&Clause> = cs.clauses().iter().filter(|c| c.eval(a) != Some(true)).collect();
        let next = order.iter().copied().find(|&v| a.get(v).is_none() && open.iter().any(|c| c.contains_var(v)));
        let Some(v) = next else {
            let mut model = a.clone();
            for v in 1..=cs.num_vars() {
                if model.get(v).is_none() {
                    model.set(v, false);
                }
            }
            return Err(model);
        };
        a.set(v, true);
        let left = go(cs, order, a);
        a.unset(v);
        let left = left?;
        a.set(v, false);
        let right = go(cs, order, a);
        a.unset(v);
        Ok(DecisionTree::node(v, left, right?))
    }
    Ok(go(cs, order, &mut Assignment::with_capacity(cs.num_vars())))
}

pub fn identity_order(n: Var) -> Vec<Var> {
    (1..=n).collect()
}

/// Pads every path to query exactly the `n` variables of `order`.
pub fn balance_tree(t: &DecisionTree, n: usize, order: &[Var]) -> Result<DecisionTree> {
    if !t.is_regular() {
        return Err(Error::pre("decision tree is not regular"));
    }
    if order.len() != n || order.iter().collect::<BTreeSet<_>>().len() != n {
        return Err(Error::pre(format!("order must list {n} distinct variables")));
    }
    fn pad(t: &DecisionTree, used: &mut Vec<Var>, n: usize, order: &[Var]) -> Result<DecisionTree> {
        match t {
            DecisionTree::Node { var, left, right } => {
                if !order.contains(var) {
                    return Err(Error::VarOutOfRange { var: *var, bound: n as Var, context: "decision tree node".into() });
                }
                used.push(*var);
                let l = pad(left, used, n, order);
                let r = pad(right, used, n, order);
                used.pop();
                Ok(DecisionTree::node(*var, l?, r?))
            }
            DecisionTree::Leaf(_) => match order.iter().copied().find(|v| !used.contains(v)) {
                None => Ok(t.clone()),
                Some(v) => {
                    used.push(v);
                    let sub = pad(t, used, n, order);
                    used.pop();
                    let sub = sub?;
                    Ok(DecisionTree::node(v, sub.clone(), sub))
                }
            },
        }
    }
    pad(t, &mut Vec::new(), n, order)
}

/// Tree-like regular refutation read off a decision tree.
pub fn proof_from_tree(cs: &ClauseSet, t: &DecisionTree) -> Result<ResolutionProof> {
    fn go(cs: &ClauseSet, t: &DecisionTree, b: &mut ProofBuilder) -> Result<usize> {
        match t {
            DecisionTree::Leaf(c) => {
                let i = cs
                    .clauses()
                    .iter()
                    .position(|p| p.is_subset_of(c))
                    .ok_or_else(|| Error::pre(format!("leaf {c:?} is not a weakening of any premise")))?;
                let a = b.axiom(i, &cs.clauses()[i]);
                Ok(b.weaken(a, c.lits()))
            }
            DecisionTree::Node { var, left, right } => {
                let l = go(cs, left, b)?;
                let r = go(cs, right, b)?;
                Ok(b.resolve(r, l, *var))
            }
        }
    }
    let mut b = ProofBuilder::new();
    let root = go(cs, t, &mut b)?;
    if !b.clause(root).is_empty() {
        return Err(Error::pre(format!("tree derives {:?}, not the empty clause", b.clause(root))));
    }
    Ok(b.finish(root))
}

/// Refutes `cs` by a balanced split over `split`, closing each branch by
/// unit propagation. On failure returns the split assignment of the first
/// branch propagation could not close.
pub fn split_refute(cs: &ClauseSet, split: &[Var]) -> std::result::Result<ResolutionProof, Assignment> {
    fn go(prop: &Propagator, split: &[Var], path: &mut Vec<Lit>, b: &mut ProofBuilder) -> std::result::Result<usize, Vec<Lit>> {
        let target: Clause = path.iter().map(|&l| !l).collect();
        if let Some(id) = prop.derive(b, &[], &target) {
            return Ok(id);
        }
        let Some((&v, rest)) = split.split_first() else { return Err(path.clone()) };
        path.push(Lit::pos(v));
        let l = go(prop, rest, path, b);
        path.pop();
        let l = l?;
        path.push(Lit::neg(v));
        let r = go(prop, rest, path, b);
        path.pop();
        Ok(b.resolve(r?, l, v))
    }
    let prop = Propagator::new(cs.clauses());
    let mut b = ProofBuilder::sharing();
    match go(&prop, split, &mut Vec::new(), &mut b) {
        Ok(root) => Ok(b.finish(root)),
        Err(path) => {
            let mut a = Assignment::new();
            for l in path {
                a.set(l.var(), l.is_pos());
            }
            Err(a)
        }
    }
}

pub fn serialize_tree(t: &DecisionTree, n: usize) -> String {
    fn go(t: &DecisionTree, s: &mut String) {
        match t {
            DecisionTree::Leaf(c) => {
                s.push_str("leaf");
                for l in c.lits() {
                    write!(s, " {l}").unwrap();
                }
                s.push_str(" 0\n");
            }
            DecisionTree::Node { var, left, right } => {
                writeln!(s, "node {var}").unwrap();
                go(left, s);
                go(right, s);
            }
        }
    }
    let mut s = format!("dtree {n}\n");
    go(t, &mut s);
    s
}

pub fn parse_tree(text: &str) -> Result<(DecisionTree, usize)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let (i, head) = lines.next().ok_or_else(|| Error::parse(0, "empty tree file"))?;
    let n = match head.split_whitespace().collect::<Vec<_>>()[..] {
        ["dtree", n] => n.parse::<usize>().map_err(|_| Error::parse(i, "bad variable count"))?,
        _ => return Err(Error::parse(i, "missing `dtree <n>` header")),
    };
    fn go<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, n: usize) -> Result<DecisionTree> {
        let (i, line) = lines.next().ok_or_else(|| Error::parse(0, "truncated tree"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "node" if toks.len() == 2 => {
                let v: Var = toks[1].parse().map_err(|_| Error::parse(i, "bad node variable"))?;
                if v == 0 || v as usize > n {
                    return Err(Error::parse(i, format!("node variable {v} out of range")));
                }
                let l = go(lines, n)?;
                let r = go(lines, n)?;
                Ok(DecisionTree::node(v, l, r))
            }
            "leaf" if toks.last() == Some(&"0") => {
                let lits = toks[1..toks.len() - 1]
                    .iter()
                    .map(|t| {
                        t.parse::<i64>()
                            .ok()
                            .and_then(Lit::from_dimacs)
                            .filter(|l| l.var() as usize <= n)
                            .ok_or_else(|| Error::parse(i, format!("bad literal `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DecisionTree::Leaf(Clause::new(lits)))
            }
            _ => Err(Error::parse(i, format!("malformed tree line `{line}`"))),
        }
    }
    let t = go(&mut lines, n)?;
    if let Some((i, _)) = lines.next() {
        return Err(Error::parse(i, "trailing lines after tree"));
    }
    Ok((t, n))
}
