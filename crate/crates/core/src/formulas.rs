//! Literals, clauses and clause sets over 1-based variables, with a DIMACS
//! codec and a brute-force satisfiability oracle.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Not;

use crate::error::{Error, Result};

/// Variable index, always `>= 1`.
pub type Var = u32;

/// A propositional literal `p` or `¬p`.
///
/// Ordered by `(var, polarity)` with the negative occurrence first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    var: Var,
    pos: bool,
}

impl Lit {
    pub fn new(var: Var, pos: bool) -> Lit {
        assert!(var >= 1, "variable indices are 1-based");
        Lit { var, pos }
    }

    pub fn pos(var: Var) -> Lit {
        Lit::new(var, true)
    }

    pub fn neg(var: Var) -> Lit {
        Lit::new(var, false)
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_pos(self) -> bool {
        self.pos
    }

    /// DIMACS encoding; `0` is rejected.
    pub fn from_dimacs(x: i64) -> Option<Lit> {
        if x == 0 || x.unsigned_abs() > u64::from(Var::MAX) {
            return None;
        }
        Some(Lit::new(x.unsigned_abs() as Var, x > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.pos {
            i64::from(self.var)
        } else {
            -i64::from(self.var)
        }
    }

    /// Value of the literal under a value for its variable.
    pub fn eval(self, value: bool) -> bool {
        value == self.pos
    }

    /// Applies a variable renaming, keeping the polarity.
    pub fn map_var(self, f: impl FnOnce(Var) -> Var) -> Lit {
        Lit::new(f(self.var), self.pos)
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit { var: self.var, pos: !self.pos }
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A clause stored as a sorted, duplicate-free literal set.
///
/// Multiset clauses collapse here; tautologies are kept as ordinary clauses.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Clause {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    pub fn empty() -> Clause {
        Clause::default()
    }

    pub fn unit(lit: Lit) -> Clause {
        Clause { lits: vec![lit] }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn contains_var(&self, var: Var) -> bool {
        self.contains(Lit::neg(var)) || self.contains(Lit::pos(var))
    }

    pub fn is_subset_of(&self, other: &Clause) -> bool {
        self.lits.iter().all(|&l| other.contains(l))
    }

    pub fn is_tautology(&self) -> bool {
        self.lits.windows(2).any(|w| w[0].var == w[1].var)
    }

    pub fn max_var(&self) -> Var {
        self.lits.last().map_or(0, |l| l.var)
    }

    /// `self \ {lit}`.
    pub fn without(&self, lit: Lit) -> Clause {
        Clause { lits: self.lits.iter().copied().filter(|&l| l != lit).collect() }
    }

    pub fn union(&self, other: &Clause) -> Clause {
        Clause::new(self.lits.iter().chain(other.lits.iter()).copied())
    }

    pub fn with(&self, extra: impl IntoIterator<Item = Lit>) -> Clause {
        Clause::new(self.lits.iter().copied().chain(extra))
    }

    /// Resolvent on `pivot`, assuming `self` holds `+pivot` and `other` holds `-pivot`.
    pub fn resolve(&self, other: &Clause, pivot: Var) -> Clause {
        Clause::new(
            self.lits
                .iter()
                .copied()
                .filter(|&l| l != Lit::pos(pivot))
                .chain(other.lits.iter().copied().filter(|&l| l != Lit::neg(pivot))),
        )
    }

    pub fn map_vars(&self, mut f: impl FnMut(Var) -> Var) -> Clause {
        Clause::new(self.lits.iter().map(|l| l.map_var(&mut f)))
    }

    /// `Some(true)` if satisfied, `Some(false)` if falsified, `None` if undetermined.
    pub fn eval(&self, assignment: &Assignment) -> Option<bool> {
        let mut open = false;
        for &l in &self.lits {
            match assignment.get(l.var) {
                Some(v) if l.eval(v) => return Some(true),
                Some(_) => {}
                None => open = true,
            }
        }
        if open {
            None
        } else {
            Some(false)
        }
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.lits).finish()
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<I: IntoIterator<Item = Lit>>(iter: I) -> Clause {
        Clause::new(iter)
    }
}

/// Shorthand for tests and fixtures: `clause(&[1, -2])`.
pub fn clause(dimacs: &[i64]) -> Clause {
    Clause::new(dimacs.iter().map(|&x| Lit::from_dimacs(x).expect("nonzero literal")))
}

/// An ordered list of clauses over variables `1..=n`.
///
/// Positions matter: proof axioms refer to clauses by index.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ClauseSet {
    n: Var,
    clauses: Vec<Clause>,
}

impl ClauseSet {
    pub fn new(n: Var, clauses: Vec<Clause>) -> Result<ClauseSet> {
        if let Some((i, c)) = clauses.iter().enumerate().find(|(_, c)| c.max_var() > n) {
            return Err(Error::VarOutOfRange { var: c.max_var(), bound: n, context: format!("clause {i}") });
        }
        Ok(ClauseSet { n, clauses })
    }

    /// Builds a clause set whose declared count is the largest variable used.
    pub fn from_clauses(clauses: Vec<Clause>) -> ClauseSet {
        let n = clauses.iter().map(Clause::max_var).max().unwrap_or(0);
        ClauseSet { n, clauses }
    }

    pub fn from_dimacs_lits(n: Var, clauses: &[&[i64]]) -> Result<ClauseSet> {
        ClauseSet::new(n, clauses.iter().map(|c| clause(c)).collect())
    }

    pub fn num_vars(&self) -> Var {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Γ: the set of variables that actually occur.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.clauses.iter().flat_map(|c| c.lits().iter().map(|l| l.var())).collect()
    }

    /// Total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn push(&mut self, c: Clause) {
        self.n = self.n.max(c.max_var());
        self.clauses.push(c);
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment) == Some(true))
    }
}

/// A partial or total truth assignment, indexed by variable.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn with_capacity(max_var: Var) -> Assignment {
        Assignment { values: vec![None; max_var as usize + 1] }
    }

    /// Total assignment on `1..=values.len()`.
    pub fn from_bools(values: &[bool]) -> Assignment {
        let mut a = Assignment::with_capacity(values.len() as Var);
        for (i, &v) in values.iter().enumerate() {
            a.set(i as Var + 1, v);
        }
        a
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values.get(var as usize).copied().flatten()
    }

    pub fn set(&mut self, var: Var, value: bool) {
        assert!(var >= 1);
        let i = var as usize;
        if i >= self.values.len() {
            self.values.resize(i + 1, None);
        }
        self.values[i] = Some(value);
    }

    pub fn unset(&mut self, var: Var) {
        if let Some(slot) = self.values.get_mut(var as usize) {
            *slot = None;
        }
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.get(lit.var()).map(|v| lit.eval(v))
    }

    /// Assigned variables in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values.iter().enumerate().filter_map(|(i, v)| v.map(|b| (i as Var, b)))
    }

    pub fn is_total_on(&self, vars: impl IntoIterator<Item = Var>) -> bool {
        vars.into_iter().all(|v| self.get(v).is_some())
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

/// Every literal of `base` occurs in `candidate`.
pub fn is_weakening(base: &Clause, candidate: &Clause) -> bool {
    base.is_subset_of(candidate)
}

/// Largest clause set size `brute_force_sat` will enumerate.
pub const BRUTE_FORCE_LIMIT: Var = 25;

/// Lexicographically first model (p1 most significant, 0 before 1), or `None` if unsatisfiable.
pub fn brute_force_sat(cs: &ClauseSet) -> Result<Option<Assignment>> {
    let n = cs.num_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded { what: "brute_force_sat variables", value: n as usize, limit: BRUTE_FORCE_LIMIT as usize });
    }
    // Clauses as (positive mask, negative mask) with p1 at the highest bit.
    let bit = |v: Var| 1u32 << (n - v);
    let masks: Vec<(u32, u32)> = cs
        .clauses()
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(p, q), l| if l.is_pos() { (p | bit(l.var()), q) } else { (p, q | bit(l.var())) })
        })
        .collect();
    let total: u64 = 1u64 << n;
    for code in 0..total {
        let code = code as u32;
        if masks.iter().all(|&(p, q)| code & p != 0 || !code & q != 0) {
            let values: Vec<bool> = (1..=n).map(|v| code & bit(v) != 0).collect();
            return Ok(Some(Assignment::from_bools(&values)));
        }
    }
    Ok(None)
}

/// Parses DIMACS CNF; clause order is preserved.
pub fn parse_dimacs(text: &str) -> Result<ClauseSet> {
    let mut header: Option<(Var, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut open = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(lineno, "duplicate header"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(Error::parse(lineno, "malformed header, expected `p cnf <vars> <clauses>`"));
            }
            let n: Var = parts[2].parse().map_err(|_| Error::parse(lineno, "bad variable count"))?;
            let m: usize = parts[3].parse().map_err(|_| Error::parse(lineno, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| Error::parse(lineno, "clause before header"))?;
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| Error::parse(lineno, format!("bad literal `{tok}`")))?;
            if x == 0 {
                clauses.push(Clause::new(current.drain(..)));
                open = false;
                continue;
            }
            let lit = Lit::from_dimacs(x).ok_or_else(|| Error::parse(lineno, "literal out of range"))?;
            if lit.var() > n {
                return Err(Error::VarOutOfRange { var: lit.var(), bound: n, context: format!("line {}", lineno + 1) });
            }
            current.push(lit);
            open = true;
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(0, "missing `p cnf` header"))?;
    if open {
        return Err(Error::parse(text.lines().count(), "truncated final clause (missing terminating 0)"));
    }
    if clauses.len() != m {
        return Err(Error::parse(0, format!("header declares {m} clauses, found {}", clauses.len())));
    }
    ClauseSet::new(n, clauses)
}

/// Deterministic DIMACS output, one clause per line.
pub fn serialize_dimacs(cs: &ClauseSet) -> String {
    let mut out = format!("p cnf {} {}\n", cs.num_vars(), cs.len());
    for c in cs.clauses() {
        for l in c.lits() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let cs = parse_dimacs("p cnf 2 1\n1 -2 0").unwrap();
        assert_eq!(cs.num_vars(), 2);
        assert_eq!(cs.clauses(), &[clause(&[1, -2])]);

        let omega1 = parse_dimacs("p cnf 1 2\n1 0\n-1 0").unwrap();
        assert_eq!(omega1.clauses(), &[clause(&[1]), clause(&[-1])]);

        assert!(matches!(parse_dimacs("p cnf 2 1\n3 0"), Err(Error::VarOutOfRange { var: 3, .. })));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_dimacs("p cnf x 1\n1 0").is_err());
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 2 0").is_err());
        assert!(parse_dimacs("p cnf 2 1\nc comment\n1 2 0\n").is_ok());
    }

    #[test]
    fn serialize_examples() {
        let omega1 = ClauseSet::from_dimacs_lits(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(serialize_dimacs(&omega1), "p cnf 1 2\n1 0\n-1 0\n");
        assert_eq!(serialize_dimacs(&ClauseSet::new(0, vec![]).unwrap()), "p cnf 0 0\n");
        let with_empty = ClauseSet::new(1, vec![Clause::empty()]).unwrap();
        assert_eq!(serialize_dimacs(&with_empty), "p cnf 1 1\n0\n");
        assert_eq!(parse_dimacs(&serialize_dimacs(&with_empty)).unwrap(), with_empty);
    }

    #[test]
    fn weakening_examples() {
        assert!(is_weakening(&clause(&[1]), &clause(&[1, 2])));
        assert!(!is_weakening(&clause(&[1, 2]), &clause(&[1])));
        assert!(is_weakening(&clause(&[-2]), &clause(&[-2, -2])));
    }

    #[test]
    fn brute_force_examples() {
        let omega1 = ClauseSet::from_dimacs_lits(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(brute_force_sat(&omega1).unwrap(), None);
        let m = brute_force_sat(&ClauseSet::from_dimacs_lits(2, &[&[1, 2]]).unwrap()).unwrap().unwrap();
        assert_eq!((m.get(1), m.get(2)), (Some(false), Some(true)));
        let m = brute_force_sat(&ClauseSet::new(1, vec![]).unwrap()).unwrap().unwrap();
        assert_eq!(m.get(1), Some(false));
        assert!(brute_force_sat(&ClauseSet::new(26, vec![]).unwrap()).is_err());
    }

    #[test]
    fn tautologies_are_kept() {
        let c = clause(&[1, -1, 2]);
        assert!(c.is_tautology());
        assert_eq!(c.len(), 3);
    }

    fn arb_lits(max_var: u32) -> impl Strategy<Value = Vec<Lit>> {
        prop::collection::vec((1..=max_var, any::<bool>()).prop_map(|(v, p)| Lit::new(v, p)), 0..8)
    }

    // Naive multiset containment: every literal of base, counted once, occurs in candidate.
    fn multiset_weakening(base: &[Lit], candidate: &[Lit]) -> bool {
        base.iter().all(|l| candidate.contains(l))
    }

    proptest! {
        #[test]
        fn canonical_form_ignores_order_and_duplicates(lits in arb_lits(6), seed in any::<u64>()) {
            let mut shuffled = lits.clone();
            shuffled.extend(lits.iter().take(3));
            let k = (seed as usize) % (shuffled.len().max(1));
            shuffled.rotate_left(k);
            shuffled.reverse();
            prop_assert_eq!(Clause::new(lits), Clause::new(shuffled));
        }

        #[test]
        fn weakening_matches_multiset_definition(a in arb_lits(4), b in arb_lits(4)) {
            prop_assert_eq!(is_weakening(&Clause::new(a.clone()), &Clause::new(b.clone())), multiset_weakening(&a, &b));
        }

        #[test]
        fn weakening_preserves_truth(a in arb_lits(5), extra in arb_lits(5), vals in prop::collection::vec(any::<bool>(), 5)) {
            let base = Clause::new(a);
            let cand = base.with(extra);
            prop_assert!(is_weakening(&base, &cand));
            prop_assert!(is_weakening(&base, &base));
            let asg = Assignment::from_bools(&vals);
            if base.eval(&asg) == Some(true) {
                prop_assert_eq!(cand.eval(&asg), Some(true));
            }
        }

        #[test]
        fn dimacs_round_trip(clauses in prop::collection::vec(arb_lits(7), 0..10)) {
            let cs = ClauseSet::new(7, clauses.into_iter().map(Clause::new).collect()).unwrap();
            let text = serialize_dimacs(&cs);
            let back = parse_dimacs(&text).unwrap();
            prop_assert_eq!(&back, &cs);
            prop_assert_eq!(serialize_dimacs(&back), text);
        }
    }
}
