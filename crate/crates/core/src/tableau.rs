//! Generic implicit proofs: a circuit β describing the `n × n` computation
//! tableau of a Turing machine, the clauses `C_P(τ,β)` stating that β is
//! wrong somewhere, and grafting of ER refutations into β.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::circuits::{duplicate, validate_circuit, Circuit, CircuitBuilder, VarAlloc, VarMap};
use crate::error::{Error, Result};
use crate::formulas::{Assignment, Clause, ClauseSet, Lit, Var};
use crate::implicit::{Rejection, Stage};
use crate::proofs::{check_er, check_proof, er_premises, CheckOptions, ErProof, PremiseIndex, ProofBuilder, ResolutionProof};
use crate::prover::split_refute;
use crate::translate::{embed_back, transplant};

pub const ADDRESS_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    Left,
    Right,
    Stay,
}

/// A deterministic machine. State 0 is initial and symbol 0 is blank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmSpec {
    pub states: usize,
    pub alphabet: usize,
    pub transitions: BTreeMap<(usize, usize), (usize, usize, Move)>,
    pub accept: BTreeSet<usize>,
}

impl TmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.states == 0 || self.alphabet < 2 {
            return Err(Error::pre("a machine needs a state and at least two symbols"));
        }
        for (&(q, a), &(r, b, _)) in &self.transitions {
            if q >= self.states || r >= self.states || a >= self.alphabet || b >= self.alphabet {
                return Err(Error::pre(format!("transition ({q}, {a}) leaves the state or symbol range")));
            }
        }
        if let Some(q) = self.accept.iter().find(|&&q| q >= self.states) {
            return Err(Error::pre(format!("accepting state {q} out of range")));
        }
        Ok(())
    }

    /// The move taken in `(q, a)`; an accepting state halts in place.
    pub fn action(&self, q: usize, a: usize) -> Option<(usize, usize, Move)> {
        if self.accept.contains(&q) {
            Some((q, a, Move::Stay))
        } else {
            self.transitions.get(&(q, a)).copied()
        }
    }

    pub fn symbol_bits(&self) -> usize {
        ((usize::BITS - (self.alphabet - 1).leading_zeros()) as usize).max(1)
    }

    /// Bits per cell: one-hot state, binary symbol, head.
    pub fn width(&self) -> usize {
        self.states + self.symbol_bits() + 1
    }

    pub fn encode_cell(&self, cell: Cell) -> Vec<bool> {
        let mut bits = vec![false; self.width()];
        if let Some(q) = cell.state {
            bits[q] = true;
            bits[self.width() - 1] = true;
        }
        for t in 0..self.symbol_bits() {
            bits[self.states + t] = cell.symbol >> t & 1 == 1;
        }
        bits
    }

    /// `None` for a malformed cell.
    pub fn decode_cell(&self, bits: &[bool]) -> Option<Cell> {
        if bits.len() != self.width() {
            return None;
        }
        let on: Vec<usize> = (0..self.states).filter(|&q| bits[q]).collect();
        let head = bits[self.width() - 1];
        let state = match (head, on.as_slice()) {
            (true, &[q]) => Some(q),
            (false, []) => None,
            _ => return None,
        };
        let symbol = (0..self.symbol_bits()).filter(|&t| bits[self.states + t]).map(|t| 1 << t).sum();
        (symbol < self.alphabet).then_some(Cell { state, symbol })
    }
}

/// One tableau cell: the state if the head is here, and the symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub state: Option<usize>,
    pub symbol: usize,
}

pub fn parse_tm(text: &str) -> Result<TmSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "tm")) => {}
        Some((i, _)) => return Err(Error::parse(i, "expected `tm`")),
        None => return Err(Error::parse(0, "empty machine description")),
    }
    let (mut states, mut alphabet) = (None, None);
    let mut tm = TmSpec { states: 0, alphabet: 0, transitions: BTreeMap::new(), accept: BTreeSet::new() };
    for (i, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| Error::parse(i, format!("bad number `{t}`")));
        match toks.as_slice() {
            ["states", k] => states = Some(num(k)?),
            ["alpha", k] => alphabet = Some(num(k)?),
            ["accept", q] => {
                tm.accept.insert(num(q)?);
            }
            ["trans", q, a, r, b, mv] => {
                let mv = match *mv {
                    "L" => Move::Left,
                    "R" => Move::Right,
                    "S" => Move::Stay,
                    _ => return Err(Error::parse(i, "move must be L, R or S")),
                };
                if tm.transitions.insert((num(q)?, num(a)?), (num(r)?, num(b)?, mv)).is_some() {
                    return Err(Error::parse(i, "duplicate transition"));
                }
            }
            _ => return Err(Error::parse(i, format!("unrecognised line `{line}`"))),
        }
    }
    tm.states = states.ok_or_else(|| Error::parse(0, "missing `states`"))?;
    tm.alphabet = alphabet.ok_or_else(|| Error::parse(0, "missing `alpha`"))?;
    tm.validate()?;
    Ok(tm)
}

pub fn serialize_tm(tm: &TmSpec) -> String {
    let mut s = format!("tm\nstates {}\nalpha {}\n", tm.states, tm.alphabet);
    for (&(q, a), &(r, b, mv)) in &tm.transitions {
        let mv = match mv {
            Move::Left => "L",
            Move::Right => "R",
            Move::Stay => "S",
        };
        writeln!(s, "trans {q} {a} {r} {b} {mv}").unwrap();
    }
    for q in &tm.accept {
        writeln!(s, "accept {q}").unwrap();
    }
    s
}

/// The target output: bit `t` is the symbol in cell `t` of the last row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tau(pub Vec<bool>);

/// `<nbits> <hex>`; bit `t` is bit `t` of the hex number.
pub fn parse_tau(text: &str) -> Result<Tau> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let [nbits, hex] = toks.as_slice() else { return Err(Error::parse(0, "expected `<nbits> <hex>`")) };
    let nbits: usize = nbits.parse().map_err(|_| Error::parse(0, "bad bit count"))?;
    let mut bits = Vec::new();
    for ch in hex.chars().rev() {
        let d = ch.to_digit(16).ok_or_else(|| Error::parse(0, format!("bad hex digit `{ch}`")))?;
        bits.extend((0..4).map(|t| d >> t & 1 == 1));
    }
    if bits.iter().skip(nbits).any(|&b| b) {
        return Err(Error::parse(0, "hex value exceeds the bit count"));
    }
    bits.resize(nbits, false);
    Ok(Tau(bits))
}

pub fn serialize_tau(tau: &Tau) -> String {
    let mut digits: Vec<char> = tau
        .0
        .chunks(4)
        .map(|c| std::char::from_digit(c.iter().enumerate().map(|(t, &b)| (b as u32) << t).sum(), 16).unwrap())
        .collect();
    if digits.is_empty() {
        digits.push('0');
    }
    digits.reverse();
    format!("{} {}\n", tau.0.len(), digits.into_iter().collect::<String>())
}

/// β over `2m` address inputs (row bits, then column bits, LSB first)
/// whose outputs are the cell encoding at that address.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauBeta {
    pub m: usize,
    pub circuit: Circuit,
}

impl TableauBeta {
    pub fn n(&self) -> usize {
        1 << self.m
    }

    pub fn validate(&self, tm: &TmSpec) -> Result<()> {
        validate_circuit(&self.circuit, None)?;
        if self.m == 0 || 2 * self.m > ADDRESS_LIMIT {
            return Err(Error::GuardExceeded { what: "address bits", value: 2 * self.m, limit: ADDRESS_LIMIT });
        }
        if self.circuit.free.len() != 2 * self.m {
            return Err(Error::pre(format!("β must have {} address inputs", 2 * self.m)));
        }
        if self.circuit.outputs.len() != tm.width() {
            return Err(Error::pre(format!("β must have {} outputs, one per cell bit", tm.width())));
        }
        Ok(())
    }

    pub fn eval(&self, row: usize, col: usize) -> Result<Vec<bool>> {
        let m = self.m;
        let mut a = Assignment::new();
        for (t, &v) in self.circuit.free.iter().enumerate() {
            let bit = if t < m { row >> t & 1 } else { col >> (t - m) & 1 };
            a.set(v, bit == 1);
        }
        let vals = self.circuit.evaluate(&a)?;
        Ok(self.circuit.outputs.iter().map(|&y| vals.get(y).unwrap_or(false)).collect())
    }

    pub fn grid(&self) -> Result<Vec<Vec<Vec<bool>>>> {
        (0..self.n()).map(|r| (0..self.n()).map(|c| self.eval(r, c)).collect()).collect()
    }
}

/// A β that looks the cell up in a hardwired table.
pub fn grid_beta(m: usize, grid: &[Vec<Vec<bool>>]) -> Result<TableauBeta> {
    let n = 1usize << m;
    if grid.len() != n || grid.iter().any(|r| r.len() != n) {
        return Err(Error::pre(format!("grid must be {n} × {n}")));
    }
    let width = grid[0][0].len();
    let inputs: Vec<Var> = (1..=2 * m as Var).collect();
    let lits: Vec<Lit> = inputs.iter().map(|&v| Lit::pos(v)).collect();
    let mut b = CircuitBuilder::new(inputs.clone(), VarAlloc::above(2 * m as Var));
    let mut at: HashMap<usize, Lit> = HashMap::new();
    let mut outputs = Vec::with_capacity(width);
    for o in 0..width {
        let mut hits = Vec::new();
        for (r, row) in grid.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if cell.get(o).copied().unwrap_or(false) {
                    let code = r | c << m;
                    let l = *at.entry(code).or_insert_with(|| b.equals_const(&lits, code as u64));
                    hits.push(l);
                }
            }
        }
        let l = b.or(&hits);
        outputs.push(if l.is_pos() && l.var() > 2 * m as Var { l.var() } else { b.define(l) });
    }
    let mut circuit = b.finish();
    circuit.outputs = outputs;
    Ok(TableauBeta { m, circuit })
}

/// Runs the machine for `2^m - 1` steps on `input`, one row per step.
pub fn simulate(tm: &TmSpec, input: &[usize], m: usize) -> Result<Vec<Vec<Vec<bool>>>> {
    let n = 1usize << m;
    if input.len() > n || input.iter().any(|&a| a >= tm.alphabet) {
        return Err(Error::pre("input does not fit the tape"));
    }
    let mut tape = input.to_vec();
    tape.resize(n, 0);
    let (mut q, mut h) = (0, 0);
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        rows.push((0..n).map(|c| tm.encode_cell(Cell { state: (c == h).then_some(q), symbol: tape[c] })).collect());
        if r + 1 < n {
            let (q2, a2, mv) = tm.action(q, tape[h]).ok_or_else(|| Error::pre(format!("no transition for ({q}, {})", tape[h])))?;
            tape[h] = a2;
            q = q2;
            h = shift(h, mv, n);
        }
    }
    Ok(rows)
}

fn shift(h: usize, mv: Move, n: usize) -> usize {
    match mv {
        Move::Left => h.saturating_sub(1),
        Move::Right => (h + 1).min(n - 1),
        Move::Stay => h,
    }
}

/// Direct check that `grid` is an accepting run from the start
/// configuration whose final tape begins with τ.
pub fn check_grid(tm: &TmSpec, tau: &Tau, grid: &[Vec<Vec<bool>>]) -> bool {
    let n = grid.len();
    if n == 0 || tau.0.len() > n {
        return false;
    }
    let mut configs = Vec::with_capacity(n);
    for row in grid {
        let Some(cells) = row.iter().map(|c| tm.decode_cell(c)).collect::<Option<Vec<_>>>() else { return false };
        let heads: Vec<(usize, usize)> = cells.iter().enumerate().filter_map(|(c, x)| x.state.map(|q| (c, q))).collect();
        let [(h, q)] = heads.as_slice() else { return false };
        configs.push((*q, *h, cells.iter().map(|x| x.symbol).collect::<Vec<_>>()));
    }
    if configs[0].0 != 0 || configs[0].1 != 0 {
        return false;
    }
    for w in configs.windows(2) {
        let (q, h, tape) = &w[0];
        let Some((q2, a2, mv)) = tm.action(*q, tape[*h]) else { return false };
        let mut next = tape.clone();
        next[*h] = a2;
        if w[1] != (q2, shift(*h, mv, n), next) {
            return false;
        }
    }
    let (q, _, tape) = &configs[n - 1];
    tm.accept.contains(q) && tau.0.iter().enumerate().all(|(t, &b)| tape[t] == b as usize)
}

/// `C_P(τ,β)` with its layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauBundle {
    pub clauses: ClauseSet,
    /// Address gadgets, the four β copies and the checker; free = address, output δ.
    pub circuit: Circuit,
    pub addr: Vec<Var>,
    pub delta: Var,
    pub neg_delta_index: usize,
    /// Maps β onto its copy read at address `(j,k)`.
    pub center: VarMap,
}

impl TableauBundle {
    /// An address at which δ fails, i.e. a model of the clauses.
    pub fn find_model(&self) -> Result<Option<Vec<bool>>> {
        let k = self.addr.len();
        if k > ADDRESS_LIMIT {
            return Err(Error::GuardExceeded { what: "address bits", value: k, limit: ADDRESS_LIMIT });
        }
        for code in 0..1u64 << k {
            let mut a = Assignment::new();
            let bits: Vec<bool> = (0..k).map(|t| code >> t & 1 == 1).collect();
            for (&v, &b) in self.addr.iter().zip(&bits) {
                a.set(v, b);
            }
            if !self.circuit.evaluate(&a)?.get(self.delta).unwrap_or(false) {
                return Ok(Some(bits));
            }
        }
        Ok(None)
    }
}

fn xor(b: &mut CircuitBuilder, x: Lit, y: Lit) -> Lit {
    let p = b.and(&[x, !y]);
    let q = b.and(&[!x, y]);
    b.or(&[p, q])
}

/// `bits ± 1 mod 2^m` as gate variables.
fn step_counter(b: &mut CircuitBuilder, bits: &[Var], up: bool) -> Vec<Var> {
    let mut out = vec![b.define(Lit::neg(bits[0]))];
    let mut carry = Lit::new(bits[0], up);
    for &v in &bits[1..] {
        let x = xor(b, Lit::pos(v), carry);
        out.push(b.define(x));
        carry = b.and(&[Lit::new(v, up), carry]);
    }
    out
}

struct CellLits {
    st: Vec<Lit>,
    sym_is: Vec<Lit>,
    head: Lit,
}

impl CellLits {
    fn new(b: &mut CircuitBuilder, tm: &TmSpec, out: &[Lit]) -> CellLits {
        let sb = tm.symbol_bits();
        let sym = &out[tm.states..tm.states + sb];
        let sym_is = (0..1usize << sb).map(|a| b.equals_const(sym, a as u64)).collect();
        CellLits { st: out[..tm.states].to_vec(), sym_is, head: out[tm.states + sb] }
    }

    fn has(&self, b: &mut CircuitBuilder, q: usize, a: usize) -> Lit {
        b.and(&[self.head, self.st[q], self.sym_is[a]])
    }
}

fn differs(b: &mut CircuitBuilder, x: Lit, y: Lit) -> Lit {
    let e = b.eq(x, y);
    !e
}

/// Builds δ: the cell at `(j,k)` is well formed and consistent with its
/// neighbours, the start row and the final row.
fn checker(b: &mut CircuitBuilder, tm: &TmSpec, tau: &Tau, j: &[Lit], k: &[Lit], cells: [&[Lit]; 4]) -> Var {
    let n = 1u64 << j.len();
    let [l, mid, r, below] = cells.map(|c| CellLits::new(b, tm, c));
    let jfirst = b.equals_const(j, 0);
    let jlast = b.equals_const(j, n - 1);
    let kfirst = b.equals_const(k, 0);
    let klast = b.equals_const(k, n - 1);

    let any = b.or(&mid.st);
    let mut pairs = Vec::new();
    for q in 0..tm.states {
        for s in q + 1..tm.states {
            pairs.push(b.and(&[mid.st[q], mid.st[s]]));
        }
    }
    let lonely = b.and(&[mid.head, !any]);
    let stray = b.and(&[!mid.head, any]);
    let mut bad = vec![lonely, stray];
    bad.extend(pairs);
    bad.extend(mid.sym_is[tm.alphabet..].iter().copied());
    let malformed = b.or(&bad);

    let misplaced = differs(b, mid.head, kfirst);
    let wrong_start = b.and(&[mid.head, !mid.st[0]]);
    let frame_bad = b.or(&[misplaced, wrong_start]);

    let mut arrivals: Vec<(Lit, usize)> = Vec::new();
    let mut undefined = Vec::new();
    let mut writes: Vec<Vec<Lit>> = vec![Vec::new(); tm.alphabet];
    for q in 0..tm.states {
        for a in 0..tm.alphabet {
            let Some((q2, a2, mv)) = tm.action(q, a) else {
                undefined.push(mid.has(b, q, a));
                continue;
            };
            let here = mid.has(b, q, a);
            writes[a2].push(here);
            let stays = match mv {
                Move::Stay => here,
                Move::Left => b.and(&[here, kfirst]),
                Move::Right => b.and(&[here, klast]),
            };
            arrivals.push((stays, q2));
            match mv {
                Move::Right => {
                    let h = l.has(b, q, a);
                    arrivals.push((b.and(&[h, !kfirst]), q2));
                }
                Move::Left => {
                    let h = r.has(b, q, a);
                    arrivals.push((b.and(&[h, !klast]), q2));
                }
                Move::Stay => {}
            }
        }
    }
    let all: Vec<Lit> = arrivals.iter().map(|&(t, _)| t).collect();
    let exp_head = b.or(&all);
    let mut mismatch = vec![differs(b, below.head, exp_head)];
    for s in 0..tm.states {
        let terms: Vec<Lit> = arrivals.iter().filter(|&&(_, q)| q == s).map(|&(t, _)| t).collect();
        let exp = b.or(&terms);
        mismatch.push(differs(b, below.st[s], exp));
    }
    let mut sym_ok = Vec::with_capacity(tm.alphabet);
    for (c, w) in writes.iter_mut().enumerate() {
        let kept = b.and(&[!mid.head, mid.sym_is[c]]);
        w.push(kept);
        let exp = b.or(w);
        sym_ok.push(b.and(&[exp, below.sym_is[c]]));
    }
    let sym_ok = b.or(&sym_ok);
    mismatch.push(!sym_ok);
    mismatch.extend(undefined);
    let next_bad = b.or(&mismatch);

    let accepting: Vec<Lit> = tm.accept.iter().map(|&q| mid.st[q]).collect();
    let accepting = b.or(&accepting);
    let mut final_bad = vec![b.and(&[mid.head, !accepting])];
    for (t, &bit) in tau.0.iter().enumerate() {
        let here = b.equals_const(k, t as u64);
        final_bad.push(b.and(&[here, !mid.sym_is[bit as usize]]));
    }
    let final_bad = b.or(&final_bad);

    let start = b.and(&[jfirst, frame_bad]);
    let step = b.and(&[!jlast, next_bad]);
    let end = b.and(&[jlast, final_bad]);
    let violation = b.or(&[malformed, start, step, end]);
    b.define(!violation)
}

/// `C_P(τ,β)`: unsatisfiable iff β describes an accepting run of `tm`
/// whose final tape starts with τ.
///
/// Layout: address `1..2m`, neighbour address gadgets, checker, then the
/// four β copies with gate `g` of copy `s` at `base + 4g + s`. Everything
/// before `base` depends only on `(tm, τ, m)`.
pub fn gen_tableau_constraints(tm: &TmSpec, tau: &Tau, beta: &TableauBeta) -> Result<TableauBundle> {
    tm.validate()?;
    beta.validate(tm)?;
    let m = beta.m;
    if tau.0.len() > beta.n() {
        return Err(Error::pre(format!("τ has {} bits but the tape has {} cells", tau.0.len(), beta.n())));
    }
    let mut alloc = VarAlloc::new(1);
    let addr = alloc.fresh_n(2 * m);
    let (j, k) = addr.split_at(m);
    let mut gb = CircuitBuilder::new(addr.clone(), alloc);
    let left = step_counter(&mut gb, k, false);
    let right = step_counter(&mut gb, k, true);
    let down = step_counter(&mut gb, j, true);
    let gadgets = gb.circuit.gates.clone();
    let checker_start = gb.alloc.next();

    let inputs: [Vec<Var>; 4] =
        [[j, &left].concat(), addr.clone(), [j, &right].concat(), [&down[..], k].concat()];
    let copy_maps = |base: Var| -> [VarMap; 4] {
        std::array::from_fn(|s| {
            let mut f: VarMap = beta.circuit.free.iter().copied().zip(inputs[s].iter().copied()).collect();
            for (g, gate) in beta.circuit.gates.iter().enumerate() {
                f.insert(gate.defined, base + 4 * g as Var + s as Var);
            }
            f
        })
    };
    let jl: Vec<Lit> = j.iter().map(|&v| Lit::pos(v)).collect();
    let kl: Vec<Lit> = k.iter().map(|&v| Lit::pos(v)).collect();
    let build = |base: Var| -> Result<(Circuit, Var, [VarMap; 4])> {
        let maps = copy_maps(base);
        let outs: Vec<Vec<Lit>> = maps
            .iter()
            .map(|f| beta.circuit.outputs.iter().map(|&y| f.lit(Lit::pos(y)).ok_or_else(|| Error::pre("β output is not a β variable"))).collect())
            .collect::<Result<_>>()?;
        let mut b = CircuitBuilder::new(addr.clone(), VarAlloc::new(checker_start));
        let delta = checker(&mut b, tm, tau, &jl, &kl, [&outs[0], &outs[1], &outs[2], &outs[3]]);
        Ok((b.finish(), delta, maps))
    };
    let (dry, _, _) = build(checker_start)?;
    let base = checker_start + dry.gates.len() as Var;
    let (check, delta, maps) = build(base)?;
    if check.gates.len() != dry.gates.len() {
        return Err(Error::pre("internal layout error: checker size changed between runs"));
    }
    let copies = maps.iter().map(|f| beta.circuit.rename(f)).collect::<Result<Vec<_>>>()?;

    let mut gates = gadgets.clone();
    for c in &copies {
        gates.extend(c.gates.iter().cloned());
    }
    gates.extend(check.gates.iter().cloned());
    let circuit = Circuit::new(addr.clone(), gates, vec![delta]);

    let mut clauses = check.clauses();
    let neg_delta_index = clauses.len();
    clauses.push(Clause::unit(Lit::neg(delta)));
    clauses.extend(Circuit::new(addr.clone(), gadgets, vec![]).clauses());
    for c in &copies {
        clauses.extend(c.clauses());
    }
    let [_, center, _, _] = maps;
    Ok(TableauBundle { clauses: ClauseSet::from_clauses(clauses), circuit, addr, delta, neg_delta_index, center })
}

/// Checks an `[R,P]`-proof: α must refute `C_P(τ,β)`.
pub fn verify_pq(tm: &TmSpec, tau: &Tau, beta: &TableauBeta, alpha: &ResolutionProof) -> std::result::Result<TableauBundle, Rejection> {
    let structure = |e: Error| Rejection { stage: Stage::Structure, reason: e.to_string() };
    tm.validate().map_err(structure)?;
    beta.validate(tm).map_err(structure)?;
    let bundle = gen_tableau_constraints(tm, tau, beta).map_err(|e| Rejection { stage: Stage::Generate, reason: e.to_string() })?;
    check_proof(&bundle.clauses, alpha, &Clause::empty(), CheckOptions::default())
        .map_err(|e| Rejection { stage: Stage::Proof, reason: e.to_string() })?;
    Ok(bundle)
}

/// Refutes `C_P(τ,β)` by splitting on the address; on failure returns the
/// address bits of a bad cell.
pub fn synthesize_pq(tm: &TmSpec, tau: &Tau, beta: &TableauBeta) -> Result<std::result::Result<ResolutionProof, Vec<bool>>> {
    let bundle = gen_tableau_constraints(tm, tau, beta)?;
    Ok(split_refute(&bundle.clauses, &bundle.addr)
        .map_err(|a| bundle.addr.iter().map(|&v| a.get(v).unwrap_or(false)).collect()))
}

/// Absorbs the extension circuit of an ER refutation of `C_P(τ,β)` into
/// β' and returns a plain refutation of `C_P(τ,β')`.
pub fn graft_pq(tm: &TmSpec, tau: &Tau, beta: &TableauBeta, alpha_er: &ErProof) -> Result<(TableauBeta, ResolutionProof)> {
    let cp = gen_tableau_constraints(tm, tau, beta)?;
    check_er(&cp.clauses, alpha_er).map_err(|e| Error::pre(format!("not an ER refutation of C_P(τ,β): {e}")))?;
    let g = Circuit::new(cp.addr.clone(), [&cp.circuit.gates[..], &alpha_er.aux.gates].concat(), vec![cp.delta]);
    let subs: Vec<(Var, Var)> = cp.addr.iter().copied().zip(beta.circuit.free.iter().copied()).collect();
    let (copy, dup_map) = duplicate(&g, &subs, &mut VarAlloc::above(beta.circuit.max_var()))?;
    let mut draft = beta.clone();
    draft.circuit.gates.extend(copy.gates);
    let center = gen_tableau_constraints(tm, tau, &draft)?.center;
    let beta2 = TableauBeta { m: beta.m, circuit: draft.circuit.rename(&center)? };
    let q = gen_tableau_constraints(tm, tau, &beta2)?.clauses;
    let idx = PremiseIndex::new(q.clauses());

    let phi = dup_map.then(&center);
    let ext = er_premises(&cp.clauses, &alpha_er.aux);
    let (lifted, neg_copy) = transplant(&ext, cp.neg_delta_index, &alpha_er.proof, &phi, &q, &idx)?;
    let mut b = ProofBuilder::sharing();
    let top = b.replay(&lifted, |b, k| idx.axiom_at(b, k), None)?;
    let root = if b.clause(top).is_empty() {
        top
    } else {
        let f = phi.restrict(&cp.circuit.vars());
        embed_back(&mut b, &cp.circuit, &f, &idx, &HashMap::new(), top, !neg_copy, cp.delta)?
    };
    if !b.clause(root).is_empty() {
        return Err(Error::pre("grafted refutation did not reach the empty clause"));
    }
    Ok((beta2, b.finish(root)))
}
