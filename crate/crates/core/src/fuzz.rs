//! Soundness fuzzing of `verify_implicit` with seeded mutations.
//!
//! Every mutant counted here is invalid by an independent argument: either
//! its Ω is satisfiable, its β lets some path escape Ω (so C(Ω,β) has a
//! model), or its α breaks a resolution step outright.

use std::collections::BTreeMap;
use std::fmt;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::circuits::Gate;
use crate::correctness::gen_c;
use crate::encoding::escaping_path;
use crate::error::Result;
use crate::formulas::{brute_force_sat, Clause, ClauseSet, Lit, Var};
use crate::implicit::{verify_implicit, ImplicitRefutation};
use crate::proofs::{derive_clauses, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MutationKind {
    /// Sign flips in β gate bodies that let a path escape Ω.
    BetaFlip,
    /// A resolution pivot replaced by a variable absent from the left parent.
    AlphaPivot,
    /// An axiom index redirected to a premise lacking the literal its
    /// consumer resolves on, or out of range.
    AlphaIndex,
    /// Clauses dropped from Ω until it is satisfiable.
    OmegaDrop,
    /// A random satisfiable Ω paired with another tuple's (α, β).
    ForeignOmega,
}

impl MutationKind {
    pub const ALL: [MutationKind; 5] =
        [MutationKind::BetaFlip, MutationKind::AlphaPivot, MutationKind::AlphaIndex, MutationKind::OmegaDrop, MutationKind::ForeignOmega];
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutationKind::BetaFlip => "beta-flip",
            MutationKind::AlphaPivot => "alpha-pivot",
            MutationKind::AlphaIndex => "alpha-index",
            MutationKind::OmegaDrop => "omega-drop",
            MutationKind::ForeignOmega => "foreign-omega",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub mutants: usize,
    pub by_kind: BTreeMap<MutationKind, usize>,
    /// Mutants `verify_implicit` accepted, by kind and base index.
    pub false_accepts: Vec<(MutationKind, usize)>,
    /// β flips discarded because the flipped β still refutes Ω.
    pub neutral_flips: usize,
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mutants {}", self.mutants)?;
        for (k, c) in &self.by_kind {
            writeln!(f, "  {k} {c}")?;
        }
        writeln!(f, "neutral-beta-flips {}", self.neutral_flips)?;
        write!(f, "false-accepts {}", self.false_accepts.len())
    }
}

/// Flips 1 to 3 literal signs in β; `None` if the result still refutes Ω.
pub fn flip_beta(ir: &ImplicitRefutation, rng: &mut StdRng) -> Result<Option<ImplicitRefutation>> {
    let mut out = ir.clone();
    let gates = &mut out.beta.circuit.gates;
    if gates.iter().all(|g| g.body().is_empty()) {
        return Ok(None);
    }
    for _ in 0..rng.gen_range(1..=3) {
        let g = loop {
            let g = rng.gen_range(0..gates.len());
            if !gates[g].body().is_empty() {
                break g;
            }
        };
        let mut body = gates[g].body().to_vec();
        let k = rng.gen_range(0..body.len());
        body[k] = !body[k];
        gates[g] = Gate::new(gates[g].defined, body);
    }
    Ok(escaping_path(&out.omega, &out.beta)?.map(|_| out))
}

/// Replaces one pivot by a variable the left parent does not contain positively.
pub fn corrupt_pivot(ir: &ImplicitRefutation, rng: &mut StdRng) -> Result<Option<ImplicitRefutation>> {
    let cb = gen_c(&ir.omega, &ir.beta)?;
    let clauses = derive_clauses(cb.clauses.clauses(), &ir.alpha)?;
    let resolves: Vec<usize> = (0..ir.alpha.len()).filter(|&i| matches!(ir.alpha.steps[i], Step::Resolve { .. })).collect();
    let Some(&i) = resolves.choose(rng) else { return Ok(None) };
    let Step::Resolve { left, right, pivot } = ir.alpha.steps[i] else { unreachable!() };
    let max = cb.clauses.num_vars().max(1);
    let new_pivot = loop {
        let v: Var = rng.gen_range(1..=max + 1);
        if v != pivot && !clauses[left].contains(Lit::pos(v)) {
            break v;
        }
    };
    let mut out = ir.clone();
    out.alpha.steps[i] = Step::Resolve { left, right, pivot: new_pivot };
    Ok(Some(out))
}

/// Redirects an axiom step consumed by a resolution to a premise lacking
/// the literal that resolution needs, or past the last premise.
pub fn corrupt_index(ir: &ImplicitRefutation, rng: &mut StdRng) -> Result<Option<ImplicitRefutation>> {
    let cb = gen_c(&ir.omega, &ir.beta)?;
    let premises = cb.clauses.clauses();
    let mut needs: Vec<(usize, Lit)> = Vec::new();
    for step in &ir.alpha.steps {
        if let Step::Resolve { left, right, pivot } = *step {
            for (src, lit) in [(left, Lit::pos(pivot)), (right, Lit::neg(pivot))] {
                if matches!(ir.alpha.steps[src], Step::Axiom(_)) {
                    needs.push((src, lit));
                }
            }
        }
    }
    let Some(&(i, lit)) = needs.choose(rng) else { return Ok(None) };
    let lacking: Vec<usize> = (0..premises.len()).filter(|&k| !premises[k].contains(lit)).collect();
    let k = match lacking.choose(rng) {
        Some(&k) if rng.gen_bool(0.9) => k,
        _ => premises.len() + rng.gen_range(0..4),
    };
    let mut out = ir.clone();
    out.alpha.steps[i] = Step::Axiom(k);
    Ok(Some(out))
}

/// Drops a random nonempty set of clauses; `None` if Ω stays unsatisfiable.
pub fn drop_clauses(ir: &ImplicitRefutation, rng: &mut StdRng) -> Result<Option<ImplicitRefutation>> {
    let all = ir.omega.clauses();
    if all.is_empty() {
        return Ok(None);
    }
    let forced = rng.gen_range(0..all.len());
    let kept: Vec<Clause> = all.iter().enumerate().filter(|&(k, _)| k != forced && rng.gen_bool(0.7)).map(|(_, c)| c.clone()).collect();
    let omega = ClauseSet::new(ir.omega.num_vars(), kept)?;
    if brute_force_sat(&omega)?.is_none() {
        return Ok(None);
    }
    Ok(Some(ImplicitRefutation { omega, ..ir.clone() }))
}

/// A random satisfiable Ω over the same `n`, keeping α and β.
pub fn foreign_omega(ir: &ImplicitRefutation, rng: &mut StdRng) -> Result<Option<ImplicitRefutation>> {
    let n = ir.n as Var;
    let clauses: Vec<Clause> = (0..rng.gen_range(1..=2 * ir.n + 2))
        .map(|_| Clause::new((0..rng.gen_range(1..=3)).map(|_| Lit::new(rng.gen_range(1..=n), rng.gen_bool(0.5)))))
        .collect();
    let omega = ClauseSet::new(n, clauses)?;
    if brute_force_sat(&omega)?.is_none() {
        return Ok(None);
    }
    Ok(Some(ImplicitRefutation { omega, ..ir.clone() }))
}

fn mutate(kind: MutationKind, ir: &ImplicitRefutation, rng: &mut StdRng) -> Result<Option<ImplicitRefutation>> {
    match kind {
        MutationKind::BetaFlip => flip_beta(ir, rng),
        MutationKind::AlphaPivot => corrupt_pivot(ir, rng),
        MutationKind::AlphaIndex => corrupt_index(ir, rng),
        MutationKind::OmegaDrop => drop_clauses(ir, rng),
        MutationKind::ForeignOmega => foreign_omega(ir, rng),
    }
}

/// Generates `count` invalid mutants of `bases`, cycling through the kinds,
/// and runs each through `verify_implicit`.
pub fn soundness_fuzz(bases: &[ImplicitRefutation], count: usize, seed: u64) -> Result<FuzzReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = FuzzReport::default();
    if bases.is_empty() {
        return Ok(report);
    }
    let mut misses = 0usize;
    while report.mutants < count {
        let kind = MutationKind::ALL[report.mutants % MutationKind::ALL.len()];
        let b = rng.gen_range(0..bases.len());
        let Some(m) = mutate(kind, &bases[b], &mut rng)? else {
            if kind == MutationKind::BetaFlip {
                report.neutral_flips += 1;
            }
            misses += 1;
            if misses > 100 * count.max(1) {
                return Err(crate::Error::pre("mutation attempts exhausted"));
            }
            continue;
        };
        report.mutants += 1;
        *report.by_kind.entry(kind).or_default() += 1;
        if verify_implicit(&m).is_ok() {
            report.false_accepts.push((kind, b));
        }
    }
    Ok(report)
}
