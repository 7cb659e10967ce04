use std::collections::HashMap;

use super::{ProofBuilder, ResolutionProof};
use crate::formulas::{Clause, ClauseSet, Lit, Var};

const NO_REASON: u32 = u32::MAX;

fn code(l: Lit) -> usize {
    2 * l.var() as usize + l.is_pos() as usize
}

/// Unit propagation over a fixed clause list, emitting a linear regular
/// resolution chain for each conflict it finds.
#[derive(Clone, Debug)]
pub struct Propagator {
    clauses: Vec<Clause>,
    occ: Vec<Vec<u32>>,
    units: Vec<u32>,
    empty: Option<u32>,
    max_var: Var,
}

enum Status {
    Satisfied,
    Conflict,
    Unit(Lit),
    Open,
}

struct State {
    val: Vec<i8>,
    reason: Vec<u32>,
    pos: Vec<u32>,
    trail: Vec<Lit>,
}

impl State {
    fn value(&self, l: Lit) -> i8 {
        let v = self.val[l.var() as usize];
        if l.is_pos() {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        self.val[v] = if l.is_pos() { 1 } else { -1 };
        self.reason[v] = reason;
        self.pos[v] = self.trail.len() as u32;
        self.trail.push(l);
    }

    fn status(&self, c: &Clause) -> Status {
        let mut open = None;
        let mut count = 0;
        for &l in c.lits() {
            match self.value(l) {
                1 => return Status::Satisfied,
                0 => {
                    count += 1;
                    open = Some(l);
                }
                _ => {}
            }
        }
        match (count, open) {
            (0, _) => Status::Conflict,
            (1, Some(l)) => Status::Unit(l),
            _ => Status::Open,
        }
    }
}

impl Propagator {
    pub fn new(clauses: &[Clause]) -> Propagator {
        let max_var = clauses.iter().map(Clause::max_var).max().unwrap_or(0);
        let mut occ = vec![Vec::new(); 2 * max_var as usize + 2];
        let mut units = Vec::new();
        let mut empty = None;
        for (i, c) in clauses.iter().enumerate() {
            for &l in c.lits() {
                occ[code(l)].push(i as u32);
            }
            match c.len() {
                0 if empty.is_none() => empty = Some(i as u32),
                1 => units.push(i as u32),
                _ => {}
            }
        }
        Propagator { clauses: clauses.to_vec(), occ, units, empty, max_var }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Derives a subset of `target` into `b`, assuming the negation of
    /// `target` and propagating. `lemmas` are extra clauses already present
    /// in `b` as the given step ids. Returns `None` if propagation ends
    /// without a conflict.
    pub fn derive(&self, b: &mut ProofBuilder, lemmas: &[(Clause, usize)], target: &Clause) -> Option<usize> {
        let np = self.clauses.len();
        let nv = lemmas
            .iter()
            .map(|(c, _)| c.max_var())
            .chain([self.max_var, target.max_var()])
            .max()
            .unwrap() as usize
            + 1;
        let mut st = State { val: vec![0; nv], reason: vec![NO_REASON; nv], pos: vec![0; nv], trail: Vec::new() };
        let source = |s: u32| -> &Clause {
            let s = s as usize;
            if s < np {
                &self.clauses[s]
            } else {
                &lemmas[s - np].0
            }
        };
        let mut lemma_occ: HashMap<usize, Vec<u32>> = HashMap::new();
        for (j, (c, _)) in lemmas.iter().enumerate() {
            for &l in c.lits() {
                lemma_occ.entry(code(l)).or_default().push((np + j) as u32);
            }
        }
        for &l in target.lits() {
            if st.value(!l) == 0 {
                st.assign(!l, NO_REASON);
            }
        }
        let mut conflict = self.empty;
        if conflict.is_none() {
            let initial = self.units.iter().copied().chain((0..lemmas.len()).map(|j| (np + j) as u32));
            for s in initial {
                match st.status(source(s)) {
                    Status::Conflict => {
                        conflict = Some(s);
                        break;
                    }
                    Status::Unit(l) => st.assign(l, s),
                    _ => {}
                }
            }
        }
        let mut head = 0;
        while conflict.is_none() && head < st.trail.len() {
            let falsified = !st.trail[head];
            head += 1;
            let premise_occ = self.occ.get(code(falsified)).map(Vec::as_slice).unwrap_or(&[]);
            let extra = lemma_occ.get(&code(falsified)).map(Vec::as_slice).unwrap_or(&[]);
            for &s in premise_occ.iter().chain(extra) {
                match st.status(source(s)) {
                    Status::Conflict => {
                        conflict = Some(s);
                        break;
                    }
                    Status::Unit(l) => st.assign(l, s),
                    _ => {}
                }
            }
        }
        let conflict = conflict?;
        let step_of = |b: &mut ProofBuilder, s: u32| -> usize {
            let s = s as usize;
            if s < np {
                b.axiom(s, &self.clauses[s])
            } else {
                lemmas[s - np].1
            }
        };
        let mut cur = step_of(b, conflict);
        loop {
            let latest = b
                .clause(cur)
                .lits()
                .iter()
                .filter(|l| st.reason[l.var() as usize] != NO_REASON)
                .max_by_key(|l| st.pos[l.var() as usize])
                .copied();
            let Some(l) = latest else { break };
            let r = step_of(b, st.reason[l.var() as usize]);
            cur = b.resolve_lit(r, cur, !l);
        }
        Some(cur)
    }
}

/// Derives exactly `target` by unit propagation, if that yields a conflict.
pub fn rup_derive(premises: &ClauseSet, target: &Clause) -> Option<ResolutionProof> {
    let prop = Propagator::new(premises.clauses());
    let mut b = ProofBuilder::new();
    let root = prop.derive(&mut b, &[], target)?;
    let root = b.weaken(root, target.lits());
    Some(b.finish(root))
}
