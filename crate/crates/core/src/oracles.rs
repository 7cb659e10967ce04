//! Brute-force cross-checks and size measurements shared by the `oracle`
//! and `bench` commands and the acceptance tests.

use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;

use crate::circuits::{Circuit, Gate, VarAlloc, VarMap};
use crate::correctness::{gen_c, gen_correct, gen_delta, not_search, DeltaBundle};
use crate::encoding::{bit_length, escaping_path, Beta};
use crate::error::{Error, Result};
use crate::fixtures::{dpll_er_proof, family};
use crate::formulas::{brute_force_sat, is_weakening, Assignment, Clause, ClauseSet, Lit, Var};
use crate::implicit::{implicit_from_cnf, verify_implicit};
use crate::proofs::{check_proof, CheckOptions};
use crate::translate::{emb_premises, emb_refute, er_to_implicit, search_translate};

/// Largest `|Γ(C(Ω,β))|` the semantic check brute-forces.
pub const SEMANTIC_LIMIT: Var = 22;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Agreement {
    pub checked: usize,
    pub disagreements: usize,
}

impl Agreement {
    fn record(&mut self, same: bool) {
        self.checked += 1;
        self.disagreements += usize::from(!same);
    }

    pub fn merge(&mut self, other: Agreement) {
        self.checked += other.checked;
        self.disagreements += other.disagreements;
    }
}

/// Bits per literal encoding: the sign, then `|n|` index bits.
pub fn delta_pattern_bits(n: usize) -> usize {
    n * (1 + bit_length(n))
}

/// Evaluates Δ(Ω) on one input pattern and compares it with the weakening
/// oracle. Index values outside `1..=n` contribute no literal.
pub fn delta_pattern_agrees(omega: &ClauseSet, d: &DeltaBundle, code: u64) -> Result<bool> {
    let n = d.x.len();
    let width = 1 + bit_length(n);
    let mut a = Assignment::new();
    let mut lits = Vec::with_capacity(n);
    for i in 0..n {
        let chunk = code >> (i * width);
        let sign = chunk & 1 == 1;
        a.set(d.x[i], sign);
        let mut j = 0;
        for m in 1..=bit_length(n) {
            let b = chunk >> m & 1 == 1;
            a.set(d.y[i][m - 1], b);
            j |= usize::from(b) << (m - 1);
        }
        if (1..=n).contains(&j) {
            lits.push(Lit::new(j as Var, sign));
        }
    }
    let got = d.circuit.evaluate(&a)?.get(d.delta).unwrap_or(false);
    let c = Clause::new(lits);
    Ok(got == omega.clauses().iter().any(|l| is_weakening(l, &c)))
}

/// Every input pattern of Δ(Ω).
pub fn delta_exhaustive(omega: &ClauseSet, n: usize) -> Result<Agreement> {
    let bits = delta_pattern_bits(n);
    if bits > 24 {
        return Err(Error::GuardExceeded { what: "Δ pattern bits", value: bits, limit: 24 });
    }
    let d = gen_delta(omega, n, &mut VarAlloc::new(1))?;
    let mut out = Agreement::default();
    for code in 0..1u64 << bits {
        out.record(delta_pattern_agrees(omega, &d, code)?);
    }
    Ok(out)
}

/// Random input patterns of Δ(Ω). Half of them are drawn as literals of
/// `1..=n` so that matches are exercised, not just out-of-range indices.
pub fn delta_sampled(omega: &ClauseSet, n: usize, samples: usize, rng: &mut impl Rng) -> Result<Agreement> {
    let bits = delta_pattern_bits(n);
    if bits > 63 {
        return Err(Error::GuardExceeded { what: "Δ pattern bits", value: bits, limit: 63 });
    }
    let width = 1 + bit_length(n);
    let d = gen_delta(omega, n, &mut VarAlloc::new(1))?;
    let mut out = Agreement::default();
    for s in 0..samples {
        let code = if s % 2 == 0 {
            rng.gen_range(0..1u64 << bits)
        } else {
            (0..n).map(|i| ((rng.gen_range(1..=n as u64) << 1) | u64::from(rng.gen_bool(0.5))) << (i * width)).sum()
        };
        out.record(delta_pattern_agrees(omega, &d, code)?);
    }
    Ok(out)
}

/// A random clause set over `1..=n` with clauses of width 0 to 3.
pub fn random_omega(n: usize, rng: &mut impl Rng) -> ClauseSet {
    let clauses = (0..rng.gen_range(1..=2 * n + 1))
        .map(|_| Clause::new((0..rng.gen_range(0..=3.min(n))).map(|_| Lit::new(rng.gen_range(1..=n as Var), rng.gen_bool(0.5)))))
        .collect();
    ClauseSet::new(n as Var, clauses).expect("variables are in range")
}

/// Compares `brute_force_sat(C(Ω,β))` with path enumeration. `None` when
/// C(Ω,β) has more than [`SEMANTIC_LIMIT`] variables.
pub fn semantic_agrees(omega: &ClauseSet, beta: &Beta) -> Result<Option<bool>> {
    let cb = gen_c(omega, beta)?;
    if cb.clauses.num_vars() > SEMANTIC_LIMIT {
        return Ok(None);
    }
    let unsat = brute_force_sat(&cb.clauses)?.is_none();
    let refutes = escaping_path(omega, beta)?.is_none();
    Ok(Some(unsat == refutes))
}

/// `k` gates `v_{i+1} ≡ v_i ∨ ¬x` over free `x, v_0`, and a copy shifted
/// upward; returns `(C, D, f, y)` for an `Emb` instance.
pub fn gate_chain(k: usize) -> (Circuit, Circuit, VarMap, Var) {
    let c = Circuit::new(vec![1, 2], (0..k).map(|i| Gate::new(3 + i as Var, [Lit::pos(2 + i as Var), Lit::neg(1)])).collect(), vec![]);
    let shift = 2 * k as Var + 8;
    let f: VarMap = c.vars().into_iter().map(|v| (v, if v <= 2 { v } else { v + shift })).collect();
    let d = c.rename(&f).expect("f covers C");
    (c, d, f, 2 + k as Var)
}

/// One `Emb` measurement: the refutation re-checks and its length over |C|.
pub fn emb_ratio(k: usize) -> Result<(bool, usize, f64)> {
    let (c, d, f, y) = gate_chain(k);
    let pol = k.is_multiple_of(2);
    let p = emb_refute(&c, &d, &f, y, pol)?;
    let ok = check_proof(&emb_premises(&c, &d, &f, y, pol)?, &p, &Clause::empty(), CheckOptions::default()).is_ok();
    Ok((ok, p.len(), p.len() as f64 / c.size() as f64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeRow {
    pub table: &'static str,
    pub name: String,
    pub input: usize,
    pub output: usize,
    pub accepted: bool,
    pub millis: u128,
}

impl SizeRow {
    pub fn ratio(&self) -> f64 {
        self.output as f64 / self.input.max(1) as f64
    }
}

/// Size ratios of the translators over the fixture family, the NOT
/// search family and gate chains.
pub fn size_table() -> Result<Vec<SizeRow>> {
    let mut rows = Vec::new();
    for (name, omega) in family() {
        let t0 = Instant::now();
        let pi = dpll_er_proof(&omega)?;
        let ir = er_to_implicit(&omega, &pi)?;
        let accepted = verify_implicit(&ir).is_ok();
        rows.push(SizeRow { table: "er", name: name.into(), input: pi.proof.len(), output: ir.alpha.len(), accepted, millis: t0.elapsed().as_millis() });
    }
    for (name, omega) in family() {
        let t0 = Instant::now();
        let ir = implicit_from_cnf(&omega)?.map_err(|_| Error::pre(format!("{name} is satisfiable")))?;
        let accepted = verify_implicit(&ir).is_ok();
        rows.push(SizeRow { table: "tree", name: name.into(), input: ir.beta.circuit.size(), output: ir.alpha.len(), accepted, millis: t0.elapsed().as_millis() });
    }
    for n in 1..=4 {
        let t0 = Instant::now();
        let sp = not_search(n, true);
        let pi = dpll_er_proof(&gen_correct(&sp)?)?;
        let out = search_translate(&sp, &pi)?;
        let accepted = check_proof(&gen_correct(&out.problem)?, &out.proof, &Clause::empty(), CheckOptions::default()).is_ok();
        rows.push(SizeRow { table: "search", name: format!("not{n}"), input: pi.proof.len(), output: out.proof.len(), accepted, millis: t0.elapsed().as_millis() });
    }
    for k in [10, 100, 1000] {
        let t0 = Instant::now();
        let (accepted, len, _) = emb_ratio(k)?;
        rows.push(SizeRow { table: "emb", name: format!("chain{k}"), input: gate_chain(k).0.size(), output: len, accepted, millis: t0.elapsed().as_millis() });
    }
    Ok(rows)
}

pub fn render_text(rows: &[SizeRow]) -> String {
    let mut s = format!("{:<7} {:<10} {:>8} {:>8} {:>8} {:>8} {:>6}\n", "table", "name", "input", "output", "ratio", "accepted", "ms");
    for r in rows {
        writeln!(s, "{:<7} {:<10} {:>8} {:>8} {:>8.2} {:>8} {:>6}", r.table, r.name, r.input, r.output, r.ratio(), r.accepted, r.millis).unwrap();
    }
    s
}

/// CSV without the timing column, so output is reproducible.
pub fn render_csv(rows: &[SizeRow]) -> String {
    let mut s = String::from("table,name,input,output,ratio,accepted\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{:.4},{}", r.table, r.name, r.input, r.output, r.ratio(), r.accepted).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{omega1, omega2};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn delta_exhaustive_small() {
        let a = delta_exhaustive(&omega2(), 2).unwrap();
        assert_eq!(a, Agreement { checked: 64, disagreements: 0 });
        assert_eq!(delta_exhaustive(&omega1(), 1).unwrap().checked, 4);
    }

    #[test]
    fn delta_sampled_small() {
        let mut rng = StdRng::seed_from_u64(5);
        let om = random_omega(3, &mut rng);
        let a = delta_sampled(&om, 3, 500, &mut rng).unwrap();
        assert_eq!(a.disagreements, 0);
    }

    #[test]
    fn semantic_small() {
        let ir = implicit_from_cnf(&omega1()).unwrap().unwrap();
        assert_eq!(semantic_agrees(&ir.omega, &ir.beta).unwrap(), Some(true));
        let weaker = ClauseSet::from_dimacs_lits(1, &[&[1]]).unwrap();
        assert_eq!(semantic_agrees(&weaker, &ir.beta).unwrap(), Some(true));
        let big = implicit_from_cnf(&omega2()).unwrap().unwrap();
        assert_eq!(semantic_agrees(&big.omega, &big.beta).unwrap(), None);
    }

    #[test]
    fn chain_ratio_bounded() {
        let (ok, _, r) = emb_ratio(30).unwrap();
        assert!(ok && r <= 16.0);
    }

    #[test]
    fn csv_is_stable() {
        let row = SizeRow { table: "er", name: "x".into(), input: 2, output: 5, accepted: true, millis: 9 };
        assert_eq!(render_csv(&[row]), "table,name,input,output,ratio,accepted\ner,x,2,5,2.5000,true\n");
    }
}
