//! Proof translations: embedded circuit copies, search problems, and
//! extended resolution into implicit resolution.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::circuits::{check_embedding, duplicate, Circuit, Gate, VarAlloc, VarMap};
use crate::correctness::{gen_c, gen_correct, CorrectnessBundle, SearchProblem};
use crate::encoding::{canonical_beta, Beta, BetaInterface};
use crate::error::{Error, Result};
use crate::formulas::{Clause, ClauseSet, Lit, Var};
use crate::implicit::ImplicitRefutation;
use crate::proofs::{
    check_er, er_premises, lift_unit_axiom, rename_proof, ErProof, PremiseIndex, ProofBuilder, Propagator, ResolutionProof,
};

/// Derives, gate by gate, the equivalences `v ↔ f(v)` between a circuit
/// and its image. `fwd(v) = {¬v, f(v)}`, `bwd(v) = {v, ¬f(v)}`; each
/// derived clause is a subset of these.
struct Emb<'a> {
    h: &'a Circuit,
    f: &'a VarMap,
    idx: &'a PremiseIndex,
    /// Equivalences for free variables not fixed by `f`.
    free: &'a HashMap<(Var, bool), usize>,
    gates: HashMap<Var, usize>,
    memo: HashMap<(Var, bool), usize>,
}

impl<'a> Emb<'a> {
    fn new(h: &'a Circuit, f: &'a VarMap, idx: &'a PremiseIndex, free: &'a HashMap<(Var, bool), usize>) -> Emb<'a> {
        Emb { h, f, idx, free, gates: h.gate_index(), memo: HashMap::new() }
    }

    fn image(&self, l: Lit) -> Result<Lit> {
        self.f.lit(l).ok_or_else(|| Error::pre(format!("variable {} is not mapped", l.var())))
    }

    /// `None` means `v` is free and fixed, so the equivalence is trivial.
    fn lookup(&self, v: Var, fwd: bool) -> Result<Option<usize>> {
        if let Some(&s) = self.memo.get(&(v, fwd)) {
            return Ok(Some(s));
        }
        if let Some(&s) = self.free.get(&(v, fwd)) {
            return Ok(Some(s));
        }
        match self.f.get(v) {
            Some(w) if w == v => Ok(None),
            Some(w) => Err(Error::pre(format!("free variable {v} maps to {w} without a supplied equivalence"))),
            None => Err(Error::pre(format!("variable {v} is not mapped"))),
        }
    }

    fn equiv(&mut self, b: &mut ProofBuilder, v: Var, fwd: bool) -> Result<Option<usize>> {
        let mut need = BTreeSet::new();
        let mut seen = HashSet::new();
        let mut stack = vec![(v, fwd)];
        while let Some((u, d)) = stack.pop() {
            if self.memo.contains_key(&(u, d)) || !seen.insert((u, d)) {
                continue;
            }
            if let Some(&gi) = self.gates.get(&u) {
                need.insert((gi, d));
                stack.extend(self.h.gates[gi].body().iter().map(|l| (l.var(), d == l.is_pos())));
            }
        }
        for (gi, d) in need {
            let s = self.gate_equiv(b, &self.h.gates[gi], d)?;
            self.memo.insert((self.h.gates[gi].defined, d), s);
        }
        self.lookup(v, fwd)
    }

    fn gate_equiv(&self, b: &mut ProofBuilder, g: &Gate, fwd: bool) -> Result<usize> {
        let v = Lit::pos(g.defined);
        let fv = self.image(v)?;
        let body = g.body();
        let fbody = body.iter().map(|&l| self.image(l)).collect::<Result<Vec<_>>>()?;
        if fwd {
            let mut acc = self.idx.axiom(b, &Clause::new(std::iter::once(!v).chain(body.iter().copied())))?;
            for (&l, &fl) in body.iter().zip(&fbody) {
                let dc = self.idx.axiom(b, &Clause::new([fv, !fl]))?;
                let x = match self.lookup(l.var(), l.is_pos())? {
                    Some(e) => b.resolve_lit(e, dc, fl),
                    None => dc,
                };
                acc = b.resolve_lit(acc, x, l);
            }
            Ok(acc)
        } else {
            let mut acc = self.idx.axiom(b, &Clause::new(std::iter::once(!fv).chain(fbody.iter().copied())))?;
            for (&l, &fl) in body.iter().zip(&fbody) {
                let cc = self.idx.axiom(b, &Clause::new([v, !l]))?;
                let x = match self.lookup(l.var(), !l.is_pos())? {
                    Some(e) => b.resolve_lit(e, cc, l),
                    None => cc,
                };
                acc = b.resolve_lit(acc, x, fl);
            }
            Ok(acc)
        }
    }
}

/// Premises of [`emb_refute`]: `C ∪ D ∪ {y^pol} ∪ {f(y)^¬pol}`.
pub fn emb_premises(c: &Circuit, d: &Circuit, f: &VarMap, y: Var, polarity: bool) -> Result<ClauseSet> {
    let fy = f.get(y).ok_or_else(|| Error::pre(format!("variable {y} is not mapped")))?;
    let mut clauses = c.clauses();
    clauses.extend(d.clauses());
    clauses.push(Clause::unit(Lit::new(y, polarity)));
    clauses.push(Clause::unit(Lit::new(fy, !polarity)));
    Ok(ClauseSet::from_clauses(clauses))
}

/// Refutes `C ∪ D ∪ {y^pol, f(y)^¬pol}` for an embedding `f` of `C` into `D`
/// that fixes the free variables of `C`.
pub fn emb_refute(c: &Circuit, d: &Circuit, f: &VarMap, y: Var, polarity: bool) -> Result<ResolutionProof> {
    check_embedding(c, d, f).map_err(|e| Error::pre(format!("not an embedding: {e}")))?;
    if let Some(v) = c.free.iter().find(|&&v| f.get(v) != Some(v)) {
        return Err(Error::pre(format!("embedding moves free variable {v}")));
    }
    if !c.vars().contains(&y) {
        return Err(Error::pre(format!("{y} is not a variable of C")));
    }
    let premises = emb_premises(c, d, f, y, polarity)?;
    let idx = PremiseIndex::new(premises.clauses());
    let mut b = ProofBuilder::sharing();
    let free = HashMap::new();
    let eq = Emb::new(c, f, &idx, &free).equiv(&mut b, y, polarity)?;
    let ly = Lit::new(y, polarity);
    let lf = f.lit(ly).expect("checked above");
    let uy = idx.axiom(&mut b, &Clause::unit(ly))?;
    let uf = idx.axiom(&mut b, &Clause::unit(!lf))?;
    let r = match eq {
        Some(e) => b.resolve_lit(uy, e, ly),
        None => uy,
    };
    let root = b.resolve_lit(r, uf, lf);
    Ok(b.finish(root))
}

fn rename_clause(c: &Clause, f: &VarMap) -> Result<Clause> {
    c.lits().iter().map(|&l| f.lit(l).ok_or_else(|| Error::pre(format!("variable {} is not mapped", l.var())))).collect()
}

/// Renames an ER refutation of `source` into `target` premises by `f`.
/// The unit at `unit_index` of `source` becomes the extra unit axiom
/// `target.len()`; the result is then lifted to a derivation of its
/// negation from `target` alone.
pub(crate) fn transplant(
    source: &ClauseSet,
    unit_index: usize,
    proof: &ResolutionProof,
    f: &VarMap,
    target: &ClauseSet,
    idx: &PremiseIndex,
) -> Result<(ResolutionProof, Lit)> {
    let unit = source.clauses()[unit_index].lits()[0];
    let moved = f.lit(unit).ok_or_else(|| Error::pre("unit variable is not mapped"))?;
    let map = source
        .clauses()
        .iter()
        .enumerate()
        .map(|(k, c)| if k == unit_index { Ok(Some(target.len())) } else { Ok(idx.position(&rename_clause(c, f)?)) })
        .collect::<Result<Vec<_>>>()?;
    let renamed = rename_proof(proof, f, |k| map.get(k).copied().flatten())?;
    Ok((lift_unit_axiom(target, &renamed, moved)?, moved))
}

/// Closes a derivation `top ⊆ {δ'}` of the copied output: derives
/// `{δ, ¬δ'}` through the embedding `f` of `h`, then resolves with `{¬δ}`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn embed_back(
    b: &mut ProofBuilder,
    h: &Circuit,
    f: &VarMap,
    idx: &PremiseIndex,
    free: &HashMap<(Var, bool), usize>,
    top: usize,
    copy: Lit,
    delta: Var,
) -> Result<usize> {
    let bwd = Emb::new(h, f, idx, free).equiv(b, delta, false)?.ok_or_else(|| Error::pre("δ must be a gate"))?;
    let r = b.resolve_lit(top, bwd, copy);
    let nd = idx.axiom(b, &Clause::unit(Lit::neg(delta)))?;
    Ok(b.resolve(r, nd, delta))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTranslation {
    /// The search problem with the enlarged algorithm `C'_n`.
    pub problem: SearchProblem,
    pub proof: ResolutionProof,
}

/// Turns an ER refutation of `Correct(C_n, δ)` into a plain resolution
/// refutation of `Correct(C'_n, δ)`, where `C'_n` carries a copy of
/// `C_n ∪ S_n ∪ aux`.
pub fn search_translate(sp: &SearchProblem, pi: &ErProof) -> Result<SearchTranslation> {
    let premises = gen_correct(sp)?;
    check_er(&premises, pi).map_err(|e| Error::pre(format!("π is not an ER refutation of Correct(C_n, δ): {e}")))?;
    let gates = [&sp.c.gates[..], &sp.s.gates, &pi.aux.gates].concat();
    let g = Circuit::new(sp.x.clone(), gates, vec![sp.delta]);
    let top = g.max_var().max(sp.s.max_var()).max(sp.c.max_var());
    let (copy, phi) = duplicate(&g, &[], &mut VarAlloc::above(top))?;
    let delta2 = phi.get(sp.delta).expect("δ is a gate of G");

    let mut c2 = sp.c.clone();
    c2.gates.extend(copy.gates);
    let sp2 = SearchProblem { c: c2, ..sp.clone() };
    let q = gen_correct(&sp2)?;
    let idx = PremiseIndex::new(q.clauses());

    let ext = er_premises(&premises, &pi.aux);
    let (lifted, _) = transplant(&ext, premises.len() - 1, &pi.proof, &phi, &q, &idx)?;
    let mut b = ProofBuilder::sharing();
    let top = b.replay(&lifted, |b, k| idx.axiom_at(b, k), None)?;
    let root = if b.clause(top).is_empty() {
        top
    } else {
        let h = Circuit::new(sp.x.clone(), [&sp.c.gates[..], &sp.s.gates].concat(), vec![sp.delta]);
        let f = phi.restrict(&h.vars());
        embed_back(&mut b, &h, &f, &idx, &HashMap::new(), top, Lit::pos(delta2), sp.delta)?
    };
    if !b.clause(root).is_empty() {
        return Err(Error::pre("search translation did not reach the empty clause"));
    }
    Ok(SearchTranslation { problem: sp2, proof: b.finish(root) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthDefinition {
    pub beta: Beta,
    pub bundle: CorrectnessBundle,
    /// ER refutation of C(Ω,β).
    pub eta: ErProof,
}

/// Derives the unit `{e}` for every gate whose body holds a literal and its
/// negation.
fn truth_units(gates: &[Gate], idx: &PremiseIndex, b: &mut ProofBuilder) -> Result<Vec<(Clause, usize)>> {
    let mut out = Vec::new();
    for g in gates {
        let Some(&a) = g.body().iter().find(|&&l| l.is_pos() && g.body().contains(&!l)) else { continue };
        let e = Lit::pos(g.defined);
        let pos = idx.axiom(b, &Clause::new([e, a]))?;
        let neg = idx.axiom(b, &Clause::new([e, !a]))?;
        out.push((Clause::unit(e), b.resolve(pos, neg, a.var())));
    }
    Ok(out)
}

/// Turns an ER refutation of Ω into an ER refutation of C(Ω, canonical β)
/// by defining `p_i` as the negated path literal `¬z_i`.
pub fn truthdef_translate(omega: &ClauseSet, pi: &ErProof) -> Result<TruthDefinition> {
    check_er(omega, pi).map_err(|e| Error::pre(format!("π is not an ER refutation of Ω: {e}")))?;
    let n = omega.num_vars() as usize;
    let beta = canonical_beta(n, &mut VarAlloc::new(1))?;
    let cb = gen_c(omega, &beta)?;
    let z = cb.z().to_vec();
    let mut alloc = VarAlloc::above(cb.clauses.num_vars().max(cb.circuit.max_var()));
    let p: Vec<Var> = alloc.fresh_n(n);
    let mut gates: Vec<Gate> = z.iter().zip(&p).map(|(&zi, &pi)| Gate::new(pi, [Lit::neg(zi)])).collect();

    let aux_vars = pi.aux.vars();
    let subs: Vec<(Var, Var)> = (1..=n as Var).filter(|v| aux_vars.contains(v)).map(|v| (v, p[v as usize - 1])).collect();
    let (dup, dmap) = duplicate(&pi.aux, &subs, &mut VarAlloc::new(alloc.next()))?;
    gates.extend(dup.gates);
    let aux = Circuit::new(z.clone(), gates, Vec::new());
    let mut psi: VarMap = (1..=n as Var).map(|v| (v, p[v as usize - 1])).collect();
    for (a, c) in dmap.iter() {
        psi.insert(a, c);
    }

    let all = er_premises(&cb.clauses, &aux);
    let idx = PremiseIndex::new(all.clauses());
    let prop = Propagator::new(all.clauses());
    let mut b = ProofBuilder::sharing();
    let lemmas = truth_units(&[&cb.circuit.gates[..], &aux.gates].concat(), &idx, &mut b)?;
    let mut derived = Vec::with_capacity(omega.len());
    for l in omega.clauses() {
        let target = rename_clause(l, &psi)?;
        let step = match l.lits().iter().find(|&&x| x.is_pos() && l.contains(!x)) {
            Some(&x) => {
                let (pv, zv) = (p[x.var() as usize - 1], z[x.var() as usize - 1]);
                let pos = idx.axiom(&mut b, &Clause::new([Lit::pos(pv), Lit::pos(zv)]))?;
                let neg = idx.axiom(&mut b, &Clause::new([Lit::neg(pv), Lit::neg(zv)]))?;
                b.resolve(pos, neg, zv)
            }
            None => prop
                .derive(&mut b, &lemmas, &target)
                .ok_or_else(|| Error::pre(format!("no propagation derivation of {target:?}")))?,
        };
        derived.push(step);
    }

    let ext = er_premises(omega, &pi.aux);
    let root = b.replay(
        &pi.proof,
        |b, k| match derived.get(k) {
            Some(&s) => Ok(s),
            None => idx.axiom(b, &rename_clause(&ext.clauses()[k], &psi)?),
        },
        Some(&psi),
    )?;
    if !b.clause(root).is_empty() {
        return Err(Error::pre("replayed refutation did not reach the empty clause"));
    }
    Ok(TruthDefinition { beta, bundle: cb, eta: ErProof { aux, proof: b.finish(root) } })
}

/// Absorbs the extension circuit of an ER refutation of C(Ω,β) into a new
/// β' and returns a plain resolution refutation of C(Ω,β').
///
/// Row `n` of β' sees `z_1..z_{n-1}` but not `z_n`, so β' holds two copies
/// of `C(Ω,β) ∪ aux`, one per value of `z_n`, and the two halves are
/// joined by resolving on `z_n`. β' is named after its own row-`n` copy,
/// so its clauses occur literally in C(Ω,β').
pub fn graft(omega: &ClauseSet, beta: &Beta, alpha_er: &ErProof) -> Result<ImplicitRefutation> {
    let cb = gen_c(omega, beta)?;
    check_er(&cb.clauses, alpha_er).map_err(|e| Error::pre(format!("not an ER refutation of C(Ω,β): {e}")))?;
    let n = cb.n;
    let z = cb.z().to_vec();
    let inputs = &beta.iface.inputs;
    let g = Circuit::new(z.clone(), [&cb.circuit.gates[..], &alpha_er.aux.gates].concat(), vec![cb.delta_var()]);

    let mut alloc = VarAlloc::above(beta.circuit.max_var());
    let (c1, c0) = (alloc.fresh(), alloc.fresh());
    let mut gates = beta.circuit.gates.clone();
    gates.push(Gate::new(c1, [Lit::pos(inputs[0]), Lit::neg(inputs[0])]));
    gates.push(Gate::new(c0, [Lit::neg(c1)]));
    let mut dup_alloc = VarAlloc::new(alloc.next());
    let mut copies = Vec::with_capacity(2);
    for c in [c0, c1] {
        let mut subs: Vec<(Var, Var)> = (1..n).map(|t| (z[t - 1], inputs[1 + t])).collect();
        subs.push((z[n - 1], c));
        let (copy, map) = duplicate(&g, &subs, &mut dup_alloc)?;
        gates.extend(copy.gates);
        copies.push(map);
    }
    let draft = Beta { circuit: Circuit::new(inputs.clone(), gates, beta.iface.outputs.clone()), iface: beta.iface.clone() };
    let row = gen_c(omega, &draft)?.rows[n - 1].clone();
    let rename = |v: &Var| row.get(*v).expect("row map covers β'");
    let circuit = draft.circuit.rename(&row)?;
    let iface =
        BetaInterface { n, inputs: inputs.iter().map(rename).collect(), outputs: beta.iface.outputs.iter().map(rename).collect() };
    let beta2 = Beta { circuit, iface };
    let q = gen_c(omega, &beta2)?.clauses;
    let q_idx = PremiseIndex::new(q.clauses());

    let ext = er_premises(&cb.clauses, &alpha_er.aux);
    let (c1r, c0r, x0r) = (row.get(c1).unwrap(), row.get(c0).unwrap(), row.get(inputs[0]).unwrap());
    let zn = z[n - 1];
    let mut halves = Vec::with_capacity(2);
    for (value, copy) in [false, true].into_iter().zip(&copies) {
        let phi = copy.then(&row);
        let zb = Lit::new(zn, value);
        let mut pc = q.clauses().to_vec();
        pc.push(Clause::unit(zb));
        let pb = ClauseSet::from_clauses(pc);
        let idx = PremiseIndex::new(pb.clauses());
        let (lifted, neg_copy) = transplant(&ext, cb.neg_delta_index, &alpha_er.proof, &phi, &pb, &idx)?;
        let mut b = ProofBuilder::sharing();
        let top = b.replay(&lifted, |b, k| idx.axiom_at(b, k), None)?;
        let root = if b.clause(top).is_empty() {
            top
        } else {
            let mut free = HashMap::new();
            for t in 1..n {
                let u = Lit::pos(phi.get(z[t - 1]).unwrap());
                let zt = Lit::pos(z[t - 1]);
                free.insert((zt.var(), true), idx.axiom(&mut b, &Clause::new([!zt, u]))?);
                free.insert((zt.var(), false), idx.axiom(&mut b, &Clause::new([zt, !u]))?);
            }
            let pos = idx.axiom(&mut b, &Clause::new([Lit::pos(c1r), Lit::pos(x0r)]))?;
            let neg = idx.axiom(&mut b, &Clause::new([Lit::pos(c1r), Lit::neg(x0r)]))?;
            let one = b.resolve(pos, neg, x0r);
            let unit = idx.axiom(&mut b, &Clause::unit(zb))?;
            if value {
                free.insert((zn, true), one);
                free.insert((zn, false), unit);
            } else {
                let link = idx.axiom(&mut b, &Clause::new([Lit::neg(c0r), Lit::neg(c1r)]))?;
                free.insert((zn, true), unit);
                free.insert((zn, false), b.resolve(one, link, c1r));
            }
            let f = phi.restrict(&cb.circuit.vars());
            embed_back(&mut b, &cb.circuit, &f, &idx, &free, top, !neg_copy, cb.delta_var())?
        };
        if !b.clause(root).is_empty() {
            return Err(Error::pre("graft half did not reach the empty clause"));
        }
        halves.push(lift_unit_axiom(&q, &b.finish(root), zb)?);
    }

    let mut b = ProofBuilder::sharing();
    let low = b.replay(&halves[0], |b, k| q_idx.axiom_at(b, k), None)?;
    let high = b.replay(&halves[1], |b, k| q_idx.axiom_at(b, k), None)?;
    let root = b.resolve(low, high, zn);
    if !b.clause(root).is_empty() {
        return Err(Error::pre("graft did not reach the empty clause"));
    }
    Ok(ImplicitRefutation { n, omega: omega.clone(), alpha: b.finish(root), beta: beta2 })
}

/// ER refutation of Ω to implicit refutation: [`truthdef_translate`], then [`graft`].
pub fn er_to_implicit(omega: &ClauseSet, pi: &ErProof) -> Result<ImplicitRefutation> {
    let td = truthdef_translate(omega, pi)?;
    graft(omega, &td.beta, &td.eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correctness::not_search;
    use crate::implicit::{synthesize_alpha, verify_implicit};
    use crate::proofs::{check_proof, CheckOptions};
    use crate::prover::{dpll_refute, identity_order, proof_from_tree};

    fn plain(p: ResolutionProof) -> ErProof {
        ErProof { aux: Circuit::new(Vec::new(), Vec::new(), Vec::new()), proof: p }
    }

    fn dpll_er(cs: &ClauseSet) -> ErProof {
        let t = dpll_refute(cs, &identity_order(cs.num_vars())).unwrap().unwrap();
        plain(proof_from_tree(cs, &t).unwrap())
    }

    fn omega1() -> ClauseSet {
        ClauseSet::from_dimacs_lits(1, &[&[1], &[-1]]).unwrap()
    }

    fn omega2() -> ClauseSet {
        ClauseSet::from_dimacs_lits(2, &[&[1, 2], &[-1, 2], &[-2]]).unwrap()
    }

    fn chain(k: usize) -> (Circuit, Circuit, VarMap) {
        let c = Circuit::new(vec![1, 2], (0..k).map(|i| Gate::new(3 + i as Var, [Lit::pos(2 + i as Var), Lit::neg(1)])).collect(), vec![]);
        let shift = 1000;
        let f: VarMap = c.vars().into_iter().map(|v| (v, if v <= 2 { v } else { v + shift })).collect();
        let d = c.rename(&f).unwrap();
        (c, d, f)
    }

    #[test]
    fn emb_single_gate() {
        let c = Circuit::new(vec![1, 2], vec![Gate::new(3, [Lit::pos(1), Lit::pos(2)])], vec![3]);
        let d = Circuit::new(vec![1, 2], vec![Gate::new(4, [Lit::pos(1), Lit::pos(2)])], vec![4]);
        let f: VarMap = [(1, 1), (2, 2), (3, 4)].into_iter().collect();
        for pol in [true, false] {
            let p = emb_refute(&c, &d, &f, 3, pol).unwrap();
            let prem = emb_premises(&c, &d, &f, 3, pol).unwrap();
            assert_eq!(check_proof(&prem, &p, &Clause::empty(), CheckOptions::default()), Ok(()));
            assert!(p.len() <= 12, "{}", p.len());
        }
    }

    #[test]
    fn emb_free_output_is_one_step() {
        let c = Circuit::new(vec![1], vec![], vec![1]);
        let f: VarMap = [(1, 1)].into_iter().collect();
        let p = emb_refute(&c, &c, &f, 1, true).unwrap();
        assert_eq!(p.len() - 2, 1);
    }

    #[test]
    fn emb_chain_linear() {
        let mut worst: f64 = 0.0;
        for k in [1, 10, 30, 100] {
            let (c, d, f) = chain(k);
            let y = 2 + k as Var;
            let p = emb_refute(&c, &d, &f, y, k % 2 == 0).unwrap();
            let prem = emb_premises(&c, &d, &f, y, k % 2 == 0).unwrap();
            assert_eq!(check_proof(&prem, &p, &Clause::empty(), CheckOptions::default()), Ok(()));
            worst = worst.max(p.len() as f64 / c.size() as f64);
        }
        assert!(worst <= 16.0, "{worst}");
    }

    #[test]
    fn emb_rejects_non_embedding() {
        let (c, d, mut f) = chain(2);
        f.insert(1, 2);
        assert!(emb_refute(&c, &d, &f, 4, true).is_err());
    }

    #[test]
    fn search_not_family() {
        for n in 1..=3 {
            let sp = not_search(n, true);
            let q = gen_correct(&sp).unwrap();
            let pi = dpll_er(&q);
            let out = search_translate(&sp, &pi).unwrap();
            let q2 = gen_correct(&out.problem).unwrap();
            assert_eq!(check_proof(&q2, &out.proof, &Clause::empty(), CheckOptions::default()), Ok(()));
            assert!(out.proof.len() <= 16 * pi.proof.len());
            assert!(out.problem.c.gates.len() > sp.c.gates.len());
        }
    }

    #[test]
    fn search_rejects_invalid_pi() {
        let sp = not_search(1, true);
        let q = gen_correct(&sp).unwrap();
        let mut pi = dpll_er(&q);
        pi.proof.steps.truncate(1);
        assert!(search_translate(&sp, &pi).is_err());
    }

    #[test]
    fn search_with_spurious_aux() {
        let sp = not_search(1, true);
        let q = gen_correct(&sp).unwrap();
        let mut pi = dpll_er(&q);
        let top = q.num_vars() + 1;
        pi.aux = Circuit::new(vec![1], vec![Gate::new(top, [Lit::pos(1)])], vec![]);
        let plain_out = search_translate(&sp, &dpll_er(&q)).unwrap();
        let out = search_translate(&sp, &pi).unwrap();
        let q2 = gen_correct(&out.problem).unwrap();
        assert_eq!(check_proof(&q2, &out.proof, &Clause::empty(), CheckOptions::default()), Ok(()));
        assert!(out.problem.c.gates.len() > plain_out.problem.c.gates.len());
    }

    #[test]
    fn truthdef_checks() {
        for omega in [omega1(), omega2()] {
            let td = truthdef_translate(&omega, &dpll_er(&omega)).unwrap();
            assert_eq!(check_er(&td.bundle.clauses, &td.eta), Ok(()));
        }
    }

    #[test]
    fn graft_variants() {
        let omega = omega1();
        let td = truthdef_translate(&omega, &dpll_er(&omega)).unwrap();
        let ir = graft(&omega, &td.beta, &td.eta).unwrap();
        assert!(verify_implicit(&ir).is_ok());

        let alpha = synthesize_alpha(&omega, &td.beta).unwrap().unwrap();
        let ir = graft(&omega, &td.beta, &plain(alpha)).unwrap();
        assert!(verify_implicit(&ir).is_ok());
    }

    #[test]
    fn graft_layout_contains_both() {
        let omega = omega2();
        let td = truthdef_translate(&omega, &dpll_er(&omega)).unwrap();
        let ir = graft(&omega, &td.beta, &td.eta).unwrap();
        let q: HashSet<Clause> = gen_c(&omega, &ir.beta).unwrap().clauses.into_clauses().into_iter().collect();
        assert!(td.bundle.clauses.clauses().iter().all(|c| q.contains(c)));
        assert!(ir.beta.circuit.clauses().iter().all(|c| q.contains(c)));
    }

    #[test]
    fn er_to_implicit_fixtures() {
        for omega in [omega1(), omega2()] {
            let ir = er_to_implicit(&omega, &dpll_er(&omega)).unwrap();
            assert!(verify_implicit(&ir).is_ok());
        }
    }

    #[test]
    fn graft_is_linear_in_the_er_proof() {
        for (name, omega) in crate::fixtures::family() {
            let td = truthdef_translate(&omega, &dpll_er(&omega)).unwrap();
            let ir = graft(&omega, &td.beta, &td.eta).unwrap();
            assert!(verify_implicit(&ir).is_ok(), "{name}");
            let ratio = ir.alpha.len() as f64 / td.eta.proof.len() as f64;
            assert!(ratio <= 16.0, "{name}: {ratio}");
        }
    }
}
