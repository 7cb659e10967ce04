//! Circuits built from extension gates `e ≡ l_1 ∨ … ∨ l_k`.
//!
//! A circuit declares its free variables, lists its gates in topological
//! order and labels an ordered list of outputs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::formulas::{Assignment, Clause, ClauseSet, Lit, Var};

/// `defined ≡ body[0] ∨ … ∨ body[k-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub defined: Var,
    body: Vec<Lit>,
}

impl Gate {
    /// Repeated body literals collapse (first occurrence kept).
    pub fn new(defined: Var, body: impl IntoIterator<Item = Lit>) -> Gate {
        let mut seen = HashSet::new();
        let body = body.into_iter().filter(|l| seen.insert(*l)).collect();
        Gate { defined, body }
    }

    pub fn body(&self) -> &[Lit] {
        &self.body
    }

    /// `{¬e ∨ l_1 ∨ … ∨ l_k} ∪ {e ∨ ¬l_i}` in that order.
    pub fn clauses(&self) -> Vec<Clause> {
        let e = self.defined;
        let mut out = Vec::with_capacity(self.body.len() + 1);
        out.push(Clause::new(std::iter::once(Lit::neg(e)).chain(self.body.iter().copied())));
        out.extend(self.body.iter().map(|&l| Clause::new([Lit::pos(e), !l])));
        out
    }

    pub fn body_clause(&self) -> Clause {
        Clause::new(self.body.iter().copied())
    }
}

pub fn gate_clauses(g: &Gate) -> Vec<Clause> {
    g.clauses()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CircuitViolation {
    #[error("gate {gate} has an empty body")]
    EmptyBody { gate: usize },
    #[error("gate {gate} has fan-in {len}, bound is {bound}")]
    FanIn { gate: usize, len: usize, bound: usize },
    #[error("variable {var} is defined twice")]
    DoubleDefinition { var: Var },
    #[error("free variable {var} is also defined by a gate")]
    DefinedFree { var: Var },
    #[error("free variable {var} is listed twice")]
    DuplicateFree { var: Var },
    #[error("cycle through {witness:?}")]
    Cycle { witness: Vec<Var> },
    #[error("gate {gate} reads {var}, which is defined by a later gate")]
    OutOfOrder { gate: usize, var: Var },
    #[error("gate {gate} reads {var}, which is neither free nor defined")]
    UndefinedInput { gate: usize, var: Var },
    #[error("output {var} is not a variable of the circuit")]
    UnknownOutput { var: Var },
    #[error("variable index 0 used")]
    ZeroVar,
}

/// Acyclic set of extension gates with explicit free variables and outputs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Circuit {
    pub free: Vec<Var>,
    pub gates: Vec<Gate>,
    pub outputs: Vec<Var>,
}

impl Circuit {
    pub fn new(free: Vec<Var>, gates: Vec<Gate>, outputs: Vec<Var>) -> Circuit {
        Circuit { free, gates, outputs }
    }

    /// F(C).
    pub fn free_set(&self) -> BTreeSet<Var> {
        self.free.iter().copied().collect()
    }

    /// E(C).
    pub fn extension_set(&self) -> BTreeSet<Var> {
        self.gates.iter().map(|g| g.defined).collect()
    }

    /// Γ(C) = F(C) ∪ E(C).
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.free_set();
        v.extend(self.gates.iter().map(|g| g.defined));
        v
    }

    pub fn max_var(&self) -> Var {
        let g = self.gates.iter().flat_map(|g| std::iter::once(g.defined).chain(g.body.iter().map(|l| l.var())));
        self.free.iter().copied().chain(g).chain(self.outputs.iter().copied()).max().unwrap_or(0)
    }

    /// |C|: total literal occurrences over gate bodies.
    pub fn size(&self) -> usize {
        self.gates.iter().map(|g| g.body.len()).sum()
    }

    pub fn gate_index(&self) -> HashMap<Var, usize> {
        self.gates.iter().enumerate().map(|(i, g)| (g.defined, i)).collect()
    }

    pub fn clauses(&self) -> Vec<Clause> {
        self.gates.iter().flat_map(Gate::clauses).collect()
    }

    /// Variables with no outgoing edge.
    pub fn sinks(&self) -> BTreeSet<Var> {
        let read: HashSet<Var> = self.gates.iter().flat_map(|g| g.body.iter().map(|l| l.var())).collect();
        self.vars().into_iter().filter(|v| !read.contains(v)).collect()
    }

    /// Gate indices in the transitive fan-in of `var` (including its own gate), in gate order.
    pub fn cone(&self, var: Var) -> Vec<usize> {
        let index = self.gate_index();
        let mut marked = vec![false; self.gates.len()];
        let mut stack = vec![var];
        while let Some(v) = stack.pop() {
            if let Some(&gi) = index.get(&v) {
                if !marked[gi] {
                    marked[gi] = true;
                    stack.extend(self.gates[gi].body.iter().map(|l| l.var()));
                }
            }
        }
        (0..self.gates.len()).filter(|&i| marked[i]).collect()
    }

    /// Renames every variable through `f`; fails on unmapped variables.
    pub fn rename(&self, f: &VarMap) -> Result<Circuit> {
        let map = |v: Var| f.get(v).ok_or_else(|| Error::pre(format!("variable {v} is not mapped")));
        let free = self.free.iter().map(|&v| map(v)).collect::<Result<_>>()?;
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let body = g.body.iter().map(|l| Ok(Lit::new(map(l.var())?, l.is_pos()))).collect::<Result<Vec<_>>>()?;
                Ok(Gate::new(map(g.defined)?, body))
            })
            .collect::<Result<_>>()?;
        let outputs = self.outputs.iter().map(|&v| map(v)).collect::<Result<_>>()?;
        Ok(Circuit { free, gates, outputs })
    }

    /// Union as gate lists: `self`'s gates then `other`'s. Free variables of
    /// the result are the declared frees of both minus anything defined.
    /// Outputs are `self`'s.
    pub fn union(&self, other: &Circuit) -> Circuit {
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        let defined: HashSet<Var> = gates.iter().map(|g| g.defined).collect();
        let mut seen = HashSet::new();
        let free = self
            .free
            .iter()
            .chain(other.free.iter())
            .copied()
            .filter(|v| !defined.contains(v) && seen.insert(*v))
            .collect();
        Circuit { free, gates, outputs: self.outputs.clone() }
    }

    /// Unique extension of a total assignment of F(C).
    pub fn evaluate(&self, free_vals: &Assignment) -> Result<Assignment> {
        let mut out = Assignment::with_capacity(self.max_var());
        for &v in &self.free {
            let b = free_vals.get(v).ok_or_else(|| Error::pre(format!("free variable {v} has no value")))?;
            out.set(v, b);
        }
        for g in &self.gates {
            let mut val = false;
            for &l in &g.body {
                let b = out.lit_value(l).ok_or_else(|| Error::pre(format!("gate {} reads unassigned {}", g.defined, l.var())))?;
                if b {
                    val = true;
                    break;
                }
            }
            out.set(g.defined, val);
        }
        Ok(out)
    }

    /// Checks every circuit invariant; `fan_in = None` means unbounded.
    pub fn validate(&self, fan_in: Option<usize>) -> Result<(), CircuitViolation> {
        validate_circuit(self, fan_in)
    }
}

pub fn circuit_clauses(c: &Circuit) -> ClauseSet {
    ClauseSet::new(c.max_var(), c.clauses()).expect("max_var bounds every literal")
}

pub fn validate_circuit(c: &Circuit, fan_in: Option<usize>) -> Result<(), CircuitViolation> {
    let mut free = HashSet::new();
    for &v in &c.free {
        if v == 0 {
            return Err(CircuitViolation::ZeroVar);
        }
        if !free.insert(v) {
            return Err(CircuitViolation::DuplicateFree { var: v });
        }
    }
    let mut defined_at: HashMap<Var, usize> = HashMap::new();
    for (i, g) in c.gates.iter().enumerate() {
        if g.defined == 0 {
            return Err(CircuitViolation::ZeroVar);
        }
        if g.body.is_empty() {
            return Err(CircuitViolation::EmptyBody { gate: i });
        }
        if let Some(k) = fan_in {
            if g.body.len() > k {
                return Err(CircuitViolation::FanIn { gate: i, len: g.body.len(), bound: k });
            }
        }
        if free.contains(&g.defined) {
            return Err(CircuitViolation::DefinedFree { var: g.defined });
        }
        if defined_at.insert(g.defined, i).is_some() {
            return Err(CircuitViolation::DoubleDefinition { var: g.defined });
        }
    }
    if let Some(witness) = find_cycle(c, &defined_at) {
        return Err(CircuitViolation::Cycle { witness });
    }
    for (i, g) in c.gates.iter().enumerate() {
        for l in &g.body {
            let v = l.var();
            if free.contains(&v) {
                continue;
            }
            match defined_at.get(&v) {
                Some(&j) if j < i => {}
                Some(_) => return Err(CircuitViolation::OutOfOrder { gate: i, var: v }),
                None => return Err(CircuitViolation::UndefinedInput { gate: i, var: v }),
            }
        }
    }
    if let Some(&v) = c.outputs.iter().find(|v| !free.contains(v) && !defined_at.contains_key(v)) {
        return Err(CircuitViolation::UnknownOutput { var: v });
    }
    Ok(())
}

fn find_cycle(c: &Circuit, defined_at: &HashMap<Var, usize>) -> Option<Vec<Var>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; c.gates.len()];
    for root in 0..c.gates.len() {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (gi, ref mut next)) = stack.last_mut() {
            let body = &c.gates[gi].body;
            if *next == body.len() {
                state[gi] = 2;
                stack.pop();
                continue;
            }
            let v = body[*next].var();
            *next += 1;
            if let Some(&child) = defined_at.get(&v) {
                match state[child] {
                    0 => {
                        state[child] = 1;
                        stack.push((child, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(g, _)| g == child).unwrap();
                        let mut witness: Vec<Var> = stack[start..].iter().map(|&(g, _)| c.gates[g].defined).collect();
                        witness.push(c.gates[child].defined);
                        return Some(witness);
                    }
                    _ => {}
                }
            }
        }
    }
    None
}

/// An injective variable map.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VarMap(BTreeMap<Var, Var>);

impl VarMap {
    pub fn new() -> VarMap {
        VarMap::default()
    }

    pub fn identity(vars: impl IntoIterator<Item = Var>) -> VarMap {
        VarMap(vars.into_iter().map(|v| (v, v)).collect())
    }

    pub fn insert(&mut self, from: Var, to: Var) {
        self.0.insert(from, to);
    }

    pub fn get(&self, v: Var) -> Option<Var> {
        self.0.get(&v).copied()
    }

    pub fn lit(&self, l: Lit) -> Option<Lit> {
        self.get(l.var()).map(|v| Lit::new(v, l.is_pos()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, Var)> + '_ {
        self.0.iter().map(|(&a, &b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::new();
        self.0.values().all(|v| seen.insert(*v))
    }

    pub fn inverse(&self) -> VarMap {
        VarMap(self.0.iter().map(|(&a, &b)| (b, a)).collect())
    }

    /// `other ∘ self`, defined where both are.
    pub fn then(&self, other: &VarMap) -> VarMap {
        VarMap(self.0.iter().filter_map(|(&a, &b)| other.get(b).map(|c| (a, c))).collect())
    }

    pub fn restrict(&self, vars: &BTreeSet<Var>) -> VarMap {
        VarMap(self.0.iter().filter(|(a, _)| vars.contains(a)).map(|(&a, &b)| (a, b)).collect())
    }
}

impl FromIterator<(Var, Var)> for VarMap {
    fn from_iter<I: IntoIterator<Item = (Var, Var)>>(iter: I) -> VarMap {
        VarMap(iter.into_iter().collect())
    }
}

/// Monotone fresh-variable counter. Values `>= start` are reserved for it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarAlloc {
    start: Var,
    next: Var,
}

impl VarAlloc {
    pub fn new(start: Var) -> VarAlloc {
        assert!(start >= 1);
        VarAlloc { start, next: start }
    }

    /// Allocator issuing variables above everything in `c`.
    pub fn above(max_var: Var) -> VarAlloc {
        VarAlloc::new(max_var + 1)
    }

    pub fn fresh(&mut self) -> Var {
        let v = self.next;
        self.next += 1;
        v
    }

    pub fn fresh_n(&mut self, k: usize) -> Vec<Var> {
        (0..k).map(|_| self.fresh()).collect()
    }

    pub fn next(&self) -> Var {
        self.next
    }

    pub fn start(&self) -> Var {
        self.start
    }

    pub fn issued(&self) -> usize {
        (self.next - self.start) as usize
    }
}

/// An isomorphic copy of `c` with chosen substitutions and fresh extension variables.
///
/// Returns the copy and the witness map `f: Γ(c) → Γ(copy)`.
pub fn duplicate(c: &Circuit, subs: &[(Var, Var)], fresh: &mut VarAlloc) -> Result<(Circuit, VarMap)> {
    let vars = c.vars();
    let mut f = VarMap::new();
    for &(from, to) in subs {
        if !vars.contains(&from) {
            return Err(Error::pre(format!("substitution source {from} is not a variable of the circuit")));
        }
        if to >= fresh.start() {
            return Err(Error::pre(format!("substitution target {to} collides with the fresh-variable range")));
        }
        f.insert(from, to);
    }
    for &v in &c.free {
        if f.get(v).is_none() {
            f.insert(v, v);
        }
    }
    for g in &c.gates {
        if f.get(g.defined).is_none() {
            f.insert(g.defined, fresh.fresh());
        }
    }
    let copy = c.rename(&f)?;
    Ok((copy, f))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmbeddingViolation {
    #[error("variable {0} is not mapped")]
    Unmapped(Var),
    #[error("map is not injective on the source circuit")]
    NotInjective,
    #[error("free variable {from} maps to {to}, which is not free in the target")]
    FreeNotFree { from: Var, to: Var },
    #[error("gate for {from} has no matching gate for {to} in the target")]
    GateMismatch { from: Var, to: Var },
}

/// Checks that `f` embeds `c` into `d`.
pub fn check_embedding(c: &Circuit, d: &Circuit, f: &VarMap) -> Result<(), EmbeddingViolation> {
    let mut image = HashSet::new();
    for v in c.vars() {
        let w = f.get(v).ok_or(EmbeddingViolation::Unmapped(v))?;
        if !image.insert(w) {
            return Err(EmbeddingViolation::NotInjective);
        }
    }
    let d_free = d.free_set();
    for &v in &c.free {
        let w = f.get(v).unwrap();
        if !d_free.contains(&w) {
            return Err(EmbeddingViolation::FreeNotFree { from: v, to: w });
        }
    }
    let d_gates: HashMap<Var, Clause> = d.gates.iter().map(|g| (g.defined, g.body_clause())).collect();
    for g in &c.gates {
        let to = f.get(g.defined).unwrap();
        let mapped = Clause::new(g.body.iter().map(|&l| f.lit(l).unwrap()));
        if d_gates.get(&to) != Some(&mapped) {
            return Err(EmbeddingViolation::GateMismatch { from: g.defined, to });
        }
    }
    Ok(())
}

/// Makes the sink set of `c` match `desired`, relabelling outputs.
///
/// A desired output that is not a sink gets a copy `v' ≡ v ∨ v`. An
/// unlabelled sink `v` is absorbed into the first output `u` through
/// `v' ≡ v ∨ ¬v` and `u' ≡ u ∨ ¬v'`. Values of existing variables are unchanged.
pub fn normalize_outputs(c: &Circuit, desired: &[Var], fresh: &mut VarAlloc) -> Result<Circuit> {
    let vars = c.vars();
    if let Some(v) = desired.iter().find(|v| !vars.contains(v)) {
        return Err(Error::pre(format!("desired output {v} is not a variable of the circuit")));
    }
    let mut out = c.clone();
    let sinks = c.sinks();
    let mut labels: Vec<Var> = desired.to_vec();
    for label in labels.iter_mut() {
        if !sinks.contains(label) {
            let v2 = fresh.fresh();
            out.gates.push(Gate::new(v2, [Lit::pos(*label), Lit::pos(*label)]));
            *label = v2;
        }
    }
    let wanted: HashSet<Var> = desired.iter().copied().collect();
    if !labels.is_empty() {
        for v in sinks.into_iter().filter(|v| !wanted.contains(v)) {
            let v2 = fresh.fresh();
            out.gates.push(Gate::new(v2, [Lit::pos(v), Lit::neg(v)]));
            let u2 = fresh.fresh();
            out.gates.push(Gate::new(u2, [Lit::pos(labels[0]), Lit::neg(v2)]));
            labels[0] = u2;
        }
    }
    out.outputs = labels;
    Ok(out)
}

/// Incremental gadget construction over disjunctive gates.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    pub circuit: Circuit,
    pub alloc: VarAlloc,
    anchor: Option<Var>,
    one: Option<Var>,
}

impl CircuitBuilder {
    /// `anchor` is any variable available for the constant gadget `t ≡ a ∨ ¬a`.
    pub fn new(free: Vec<Var>, alloc: VarAlloc) -> CircuitBuilder {
        let anchor = free.first().copied();
        CircuitBuilder { circuit: Circuit::new(free, vec![], vec![]), alloc, anchor, one: None }
    }

    pub fn set_anchor(&mut self, v: Var) {
        self.anchor = Some(v);
    }

    pub fn gate(&mut self, body: impl IntoIterator<Item = Lit>) -> Var {
        let v = self.alloc.fresh();
        self.circuit.gates.push(Gate::new(v, body));
        v
    }

    /// Fresh variable equal to `l`.
    pub fn define(&mut self, l: Lit) -> Var {
        self.gate([l])
    }

    pub fn truth(&mut self) -> Lit {
        if let Some(t) = self.one {
            return Lit::pos(t);
        }
        let a = self.anchor.expect("constant gadget needs an anchor variable");
        let t = self.gate([Lit::pos(a), Lit::neg(a)]);
        self.one = Some(t);
        Lit::pos(t)
    }

    pub fn constant(&mut self, value: bool) -> Lit {
        let t = self.truth();
        if value {
            t
        } else {
            !t
        }
    }

    pub fn or(&mut self, lits: &[Lit]) -> Lit {
        match lits {
            [] => self.constant(false),
            [l] => *l,
            _ => Lit::pos(self.gate(lits.iter().copied())),
        }
    }

    pub fn and(&mut self, lits: &[Lit]) -> Lit {
        match lits {
            [] => self.constant(true),
            [l] => *l,
            _ => {
                let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
                Lit::neg(self.gate(neg))
            }
        }
    }

    pub fn eq(&mut self, a: Lit, b: Lit) -> Lit {
        let x = self.or(&[!a, b]);
        let y = self.or(&[a, !b]);
        self.and(&[x, y])
    }

    pub fn implies(&mut self, a: Lit, b: Lit) -> Lit {
        self.or(&[!a, b])
    }

    /// Literal true iff the bit vector `bits` equals `value` (LSB first).
    pub fn equals_const(&mut self, bits: &[Lit], value: u64) -> Lit {
        let lits: Vec<Lit> = bits.iter().enumerate().map(|(m, &b)| if value >> m & 1 == 1 { b } else { !b }).collect();
        self.and(&lits)
    }

    pub fn finish(self) -> Circuit {
        self.circuit
    }
}

/// Writes the line-oriented circuit format.
pub fn serialize_circuit(c: &Circuit) -> String {
    let mut s = format!("circ {}\nfree", c.max_var());
    for v in &c.free {
        write!(s, " {v}").unwrap();
    }
    s.push('\n');
    for g in &c.gates {
        write!(s, "gate {}", g.defined).unwrap();
        for l in &g.body {
            write!(s, " {l}").unwrap();
        }
        s.push_str(" 0\n");
    }
    s.push_str("out");
    for v in &c.outputs {
        write!(s, " {v}").unwrap();
    }
    s.push('\n');
    s
}

/// Parses the circuit format and validates the result (unbounded fan-in).
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut max_var: Option<Var> = None;
    let mut free: Option<Vec<Var>> = None;
    let mut outputs: Option<Vec<Var>> = None;
    let mut gates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let kw = toks.next().unwrap();
        let nums: Vec<i64> = toks
            .map(|t| t.parse::<i64>().map_err(|_| Error::parse(lineno, format!("bad number `{t}`"))))
            .collect::<Result<_>>()?;
        let var = |x: i64| -> Result<Var> {
            if x <= 0 || x > i64::from(Var::MAX) {
                Err(Error::parse(lineno, format!("bad variable {x}")))
            } else {
                Ok(x as Var)
            }
        };
        match kw {
            "circ" => {
                if max_var.is_some() || nums.len() != 1 || nums[0] < 0 {
                    return Err(Error::parse(lineno, "expected a single `circ <max_var>` header"));
                }
                max_var = Some(nums[0] as Var);
            }
            _ if max_var.is_none() => return Err(Error::parse(lineno, "missing `circ` header")),
            "free" => {
                if free.is_some() {
                    return Err(Error::parse(lineno, "duplicate `free` line"));
                }
                free = Some(nums.iter().map(|&x| var(x)).collect::<Result<_>>()?);
            }
            "gate" => {
                if outputs.is_some() {
                    return Err(Error::parse(lineno, "gate after `out` line"));
                }
                if nums.len() < 2 || *nums.last().unwrap() != 0 {
                    return Err(Error::parse(lineno, "gate must be `gate <e> <lit>... 0`"));
                }
                let e = var(nums[0])?;
                let body = nums[1..nums.len() - 1]
                    .iter()
                    .map(|&x| Lit::from_dimacs(x).ok_or_else(|| Error::parse(lineno, "literal 0 inside gate body")))
                    .collect::<Result<Vec<_>>>()?;
                gates.push(Gate::new(e, body));
            }
            "out" => {
                if outputs.is_some() {
                    return Err(Error::parse(lineno, "duplicate `out` line"));
                }
                outputs = Some(nums.iter().map(|&x| var(x)).collect::<Result<_>>()?);
            }
            other => return Err(Error::parse(lineno, format!("unknown keyword `{other}`"))),
        }
    }
    let max_var = max_var.ok_or_else(|| Error::parse(0, "missing `circ` header"))?;
    let c = Circuit::new(free.unwrap_or_default(), gates, outputs.unwrap_or_default());
    if c.max_var() > max_var {
        return Err(Error::VarOutOfRange { var: c.max_var(), bound: max_var, context: "circuit header".into() });
    }
    validate_circuit(&c, None)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{brute_force_sat, clause};
    use proptest::prelude::*;

    fn or_gate() -> Circuit {
        Circuit::new(vec![1, 2], vec![Gate::new(3, [Lit::pos(1), Lit::pos(2)])], vec![3])
    }

    #[test]
    fn validate_examples() {
        let cyc = Circuit::new(
            vec![],
            vec![Gate::new(1, [Lit::pos(2), Lit::pos(2)]), Gate::new(2, [Lit::pos(1), Lit::pos(1)])],
            vec![],
        );
        match validate_circuit(&cyc, Some(2)) {
            Err(CircuitViolation::Cycle { witness }) => assert_eq!(witness, vec![1, 2, 1]),
            other => panic!("expected cycle, got {other:?}"),
        }
        assert_eq!(validate_circuit(&or_gate(), Some(2)), Ok(()));
        let wide = Circuit::new(vec![1, 2, 3], vec![Gate::new(4, [Lit::pos(1), Lit::pos(2), Lit::pos(3)])], vec![4]);
        assert!(matches!(validate_circuit(&wide, Some(2)), Err(CircuitViolation::FanIn { .. })));
        assert_eq!(validate_circuit(&wide, Some(3)), Ok(()));
    }

    #[test]
    fn validate_other_violations() {
        let double = Circuit::new(vec![1], vec![Gate::new(2, [Lit::pos(1)]), Gate::new(2, [Lit::neg(1)])], vec![]);
        assert_eq!(validate_circuit(&double, None), Err(CircuitViolation::DoubleDefinition { var: 2 }));
        let undef = Circuit::new(vec![1], vec![Gate::new(2, [Lit::pos(5)])], vec![]);
        assert!(matches!(validate_circuit(&undef, None), Err(CircuitViolation::UndefinedInput { var: 5, .. })));
        let order = Circuit::new(vec![1], vec![Gate::new(2, [Lit::pos(3)]), Gate::new(3, [Lit::pos(1)])], vec![]);
        assert!(matches!(validate_circuit(&order, None), Err(CircuitViolation::OutOfOrder { .. })));
        let out = Circuit::new(vec![1], vec![], vec![9]);
        assert_eq!(validate_circuit(&out, None), Err(CircuitViolation::UnknownOutput { var: 9 }));
        let empty = Circuit::new(vec![1], vec![Gate::new(2, [])], vec![]);
        assert_eq!(validate_circuit(&empty, None), Err(CircuitViolation::EmptyBody { gate: 0 }));
    }

    #[test]
    fn gate_clause_examples() {
        let g = Gate::new(3, [Lit::pos(1), Lit::neg(2)]);
        assert_eq!(g.clauses(), vec![clause(&[-3, 1, -2]), clause(&[3, -1]), clause(&[3, 2])]);
        let unary = Gate::new(3, [Lit::pos(1), Lit::pos(1)]);
        assert_eq!(unary.clauses(), vec![clause(&[-3, 1]), clause(&[3, -1])]);
        let wide = Gate::new(4, [Lit::pos(1), Lit::pos(2), Lit::pos(3)]);
        assert_eq!(wide.clauses().len(), 4);
    }

    #[test]
    fn circuit_clause_examples() {
        let empty = Circuit::new(vec![1], vec![], vec![]);
        let cs = circuit_clauses(&empty);
        assert_eq!((cs.num_vars(), cs.len()), (1, 0));
        let cs = circuit_clauses(&or_gate());
        assert_eq!((cs.num_vars(), cs.len()), (3, 3));
    }

    #[test]
    fn evaluate_examples() {
        let a = evaluate_bits(&or_gate(), &[true, false]);
        assert_eq!(a.get(3), Some(true));
        let not = Circuit::new(vec![1], vec![Gate::new(2, [Lit::neg(1), Lit::neg(1)])], vec![2]);
        assert_eq!(evaluate_bits(&not, &[true]).get(2), Some(false));
        assert!(or_gate().evaluate(&Assignment::from_bools(&[true])).is_err());
    }

    fn evaluate_bits(c: &Circuit, bits: &[bool]) -> Assignment {
        let mut a = Assignment::new();
        for (&v, &b) in c.free.iter().zip(bits) {
            a.set(v, b);
        }
        c.evaluate(&a).unwrap()
    }

    #[test]
    fn duplicate_examples() {
        let c = or_gate();
        let (d, f) = duplicate(&c, &[], &mut VarAlloc::new(100)).unwrap();
        assert_eq!(d.gates, vec![Gate::new(100, [Lit::pos(1), Lit::pos(2)])]);
        assert_eq!((f.get(1), f.get(2), f.get(3)), (Some(1), Some(2), Some(100)));
        let (d, _) = duplicate(&c, &[(1, 7)], &mut VarAlloc::new(100)).unwrap();
        assert_eq!(d.gates[0].body(), &[Lit::pos(7), Lit::pos(2)]);
        assert_eq!(d.free, vec![7, 2]);
        assert!(duplicate(&c, &[(9, 7)], &mut VarAlloc::new(100)).is_err());
        assert!(duplicate(&c, &[(1, 150)], &mut VarAlloc::new(100)).is_err());
    }

    #[test]
    fn embedding_examples() {
        let c = or_gate();
        assert_eq!(check_embedding(&c, &c, &VarMap::identity(c.vars())), Ok(()));
        let (d, f) = duplicate(&c, &[], &mut VarAlloc::new(10)).unwrap();
        assert_eq!(check_embedding(&c, &c.union(&d), &f), Ok(()));
        let other = Circuit::new(vec![1, 2], vec![Gate::new(3, [Lit::pos(1), Lit::neg(2)])], vec![3]);
        assert!(matches!(check_embedding(&c, &other, &VarMap::identity(c.vars())), Err(EmbeddingViolation::GateMismatch { .. })));
    }

    #[test]
    fn normalize_examples() {
        // non-sink output
        let c = Circuit::new(vec![1, 2], vec![Gate::new(3, [Lit::pos(1), Lit::pos(2)]), Gate::new(4, [Lit::neg(3)])], vec![]);
        let n = normalize_outputs(&c, &[3, 4], &mut VarAlloc::new(10)).unwrap();
        assert_eq!(n.gates[2], Gate::new(10, [Lit::pos(3)]));
        assert_eq!(n.outputs, vec![10, 4]);
        assert_eq!(n.sinks().into_iter().collect::<Vec<_>>(), vec![4, 10]);
        // unlabelled sink
        let c = Circuit::new(
            vec![1],
            vec![Gate::new(2, [Lit::pos(1)]), Gate::new(3, [Lit::neg(1)])],
            vec![],
        );
        let n = normalize_outputs(&c, &[2], &mut VarAlloc::new(10)).unwrap();
        assert_eq!(n.gates[2], Gate::new(10, [Lit::pos(3), Lit::neg(3)]));
        assert_eq!(n.gates[3], Gate::new(11, [Lit::pos(2), Lit::neg(10)]));
        assert_eq!(n.outputs, vec![11]);
        for b in [false, true] {
            let a = evaluate_bits(&n, &[b]);
            assert_eq!(a.get(11), a.get(2));
        }
        // already normal
        let c = or_gate();
        assert_eq!(normalize_outputs(&c, &[3], &mut VarAlloc::new(10)).unwrap(), c);
    }

    #[test]
    fn text_round_trip_and_rejects() {
        let c = or_gate();
        let text = serialize_circuit(&c);
        assert_eq!(text, "circ 3\nfree 1 2\ngate 3 1 2 0\nout 3\n");
        assert_eq!(parse_circuit(&text).unwrap(), c);
        assert!(parse_circuit("circ 3\nfree 1\ngate 2 3 0\ngate 3 2 0\nout 2\n").is_err());
        assert!(parse_circuit("circ 2\nfree 1 2\ngate 3 1 0\nout 3\n").is_err());
        assert!(parse_circuit("free 1\n").is_err());
    }

    #[test]
    fn builder_gadgets() {
        let mut b = CircuitBuilder::new(vec![1, 2], VarAlloc::new(3));
        let x = Lit::pos(1);
        let y = Lit::pos(2);
        let and = b.and(&[x, y]);
        let eq = b.eq(x, y);
        let t = b.constant(true);
        let f = b.constant(false);
        let c = b.finish();
        c.validate(None).unwrap();
        for bits in [[false, false], [false, true], [true, false], [true, true]] {
            let a = evaluate_bits(&c, &bits);
            assert_eq!(a.lit_value(and), Some(bits[0] && bits[1]));
            assert_eq!(a.lit_value(eq), Some(bits[0] == bits[1]));
            assert_eq!(a.lit_value(t), Some(true));
            assert_eq!(a.lit_value(f), Some(false));
        }
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        // 3 free vars, up to 6 gates reading earlier vars.
        prop::collection::vec(prop::collection::vec((0usize..100, any::<bool>()), 1..4), 0..6).prop_map(|gates| {
            let mut c = Circuit::new(vec![1, 2, 3], vec![], vec![]);
            for (gi, body) in gates.into_iter().enumerate() {
                let avail = 3 + gi as u32;
                let body: Vec<Lit> = body.into_iter().map(|(k, p)| Lit::new(1 + (k as u32 % avail), p)).collect();
                c.gates.push(Gate::new(4 + gi as u32, body));
            }
            c
        })
    }

    proptest! {
        #[test]
        fn evaluation_is_the_unique_model(c in arb_circuit(), bits in prop::collection::vec(any::<bool>(), 3)) {
            prop_assert!(c.validate(None).is_ok());
            let a = evaluate_bits(&c, &bits);
            let mut cs = circuit_clauses(&c).into_clauses();
            for (i, &b) in bits.iter().enumerate() {
                cs.push(Clause::unit(Lit::new(i as u32 + 1, b)));
            }
            let cs = ClauseSet::new(c.max_var().max(3), cs).unwrap();
            prop_assert!(cs.is_satisfied_by(&a));
            let model = brute_force_sat(&cs).unwrap().unwrap();
            prop_assert_eq!(model, a.clone());
            // uniqueness: blocking this model leaves nothing
            let block = Clause::new((1..=cs.num_vars()).map(|v| Lit::new(v, !a.get(v).unwrap())));
            let mut blocked = cs.clone();
            blocked.push(block);
            prop_assert_eq!(brute_force_sat(&blocked).unwrap(), None);
        }

        #[test]
        fn duplicate_preserves_evaluation(c in arb_circuit(), bits in prop::collection::vec(any::<bool>(), 3)) {
            let (d, f) = duplicate(&c, &[(1, 20)], &mut VarAlloc::new(30)).unwrap();
            prop_assert!(d.validate(None).is_ok());
            let a = evaluate_bits(&c, &bits);
            let mut frees = Assignment::new();
            for &v in &c.free {
                frees.set(f.get(v).unwrap(), a.get(v).unwrap());
            }
            let b = d.evaluate(&frees).unwrap();
            for v in c.vars() {
                prop_assert_eq!(a.get(v), b.get(f.get(v).unwrap()));
            }
            // embedding into the union when free vars are fixed
            let (d2, f2) = duplicate(&c, &[], &mut VarAlloc::new(30)).unwrap();
            prop_assert_eq!(check_embedding(&c, &c.union(&d2), &f2), Ok(()));
        }
    }
}
