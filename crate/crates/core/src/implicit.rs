//! Implicit refutations `(n, Ω, α, β)`: verification, synthesis, files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::circuits::{parse_circuit, serialize_circuit, Circuit, VarAlloc};
use crate::correctness::{gen_c, CorrectnessBundle};
use crate::encoding::{bit_length, tree_to_circuit, Beta, BetaInterface};
use crate::error::{Error, Result};
use crate::formulas::{parse_dimacs, serialize_dimacs, Assignment, Clause, ClauseSet};
use crate::proofs::{check_proof, parse_proof, serialize_proof, CheckOptions, ResolutionProof};
use crate::prover::{balance_tree, dpll_refute, identity_order, split_refute, DecisionTree};

pub const SYNTH_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicitRefutation {
    pub n: usize,
    pub omega: ClauseSet,
    pub alpha: ResolutionProof,
    pub beta: Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Decode,
    Structure,
    Generate,
    Proof,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Decode => "(i) decode",
            Stage::Structure => "(ii) structure",
            Stage::Generate => "(iii) correctness clauses",
            Stage::Proof => "(iv) refutation check",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub stage: Stage,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rejected at stage {}: {}", self.stage, self.reason)
    }
}

impl std::error::Error for Rejection {}

fn reject<T>(stage: Stage, reason: impl ToString) -> std::result::Result<T, Rejection> {
    Err(Rejection { stage, reason: reason.to_string() })
}

/// Checks the structural conditions on `(n, Ω, β)`.
pub fn check_structure(n: usize, omega: &ClauseSet, beta: &Beta) -> std::result::Result<(), Rejection> {
    if n == 0 {
        return reject(Stage::Structure, "n must be at least 1");
    }
    if let Some(v) = omega.vars().into_iter().find(|&v| v as usize > n) {
        return reject(Stage::Structure, format!("Ω mentions variable {v} beyond n = {n}"));
    }
    if beta.iface.n != n {
        return reject(Stage::Structure, format!("β describes {} variables, expected {n}", beta.iface.n));
    }
    if beta.iface.outputs.len() != bit_length(n) {
        return reject(Stage::Structure, format!("β has {} outputs, expected {}", beta.iface.outputs.len(), bit_length(n)));
    }
    beta.validate().or_else(|e| reject(Stage::Structure, e))
}

/// Runs the four verifier stages; returns C(Ω,β) on acceptance.
pub fn verify_implicit(ir: &ImplicitRefutation) -> std::result::Result<CorrectnessBundle, Rejection> {
    check_structure(ir.n, &ir.omega, &ir.beta)?;
    let cb = gen_c(&ir.omega, &ir.beta).or_else(|e| reject(Stage::Generate, e))?;
    check_proof(&cb.clauses, &ir.alpha, &Clause::empty(), CheckOptions::default()).or_else(|e| reject(Stage::Proof, e))?;
    Ok(cb)
}

/// Refutes C(Ω,β) by splitting on `z_1..z_n`. On failure returns the path
/// `x` whose initial clause weakens no clause of Ω.
pub fn synthesize_alpha(omega: &ClauseSet, beta: &Beta) -> Result<std::result::Result<ResolutionProof, Vec<bool>>> {
    let n = beta.iface.n;
    if n > SYNTH_LIMIT {
        return Err(Error::GuardExceeded { what: "n", value: n, limit: SYNTH_LIMIT });
    }
    let cb = gen_c(omega, beta)?;
    Ok(split_refute(&cb.clauses, cb.z()).map_err(|a: Assignment| cb.z().iter().map(|&z| a.get(z).unwrap_or(false)).collect()))
}

/// Balances `t`, compiles it, and synthesizes α.
pub fn implicit_from_tree(omega: &ClauseSet, t: &DecisionTree) -> Result<ImplicitRefutation> {
    let n = omega.num_vars() as usize;
    let balanced = balance_tree(t, n, &identity_order(n as u32))?;
    let beta = tree_to_circuit(&balanced, n, &mut VarAlloc::new(1))?;
    match synthesize_alpha(omega, &beta)? {
        Ok(alpha) => Ok(ImplicitRefutation { n, omega: omega.clone(), alpha, beta }),
        Err(x) => Err(Error::pre(format!("tree does not refute Ω: path {x:?} escapes")))
    }
}

/// Full pipeline from a clause set: DPLL, then [`implicit_from_tree`].
/// A satisfiable input yields its model.
pub fn implicit_from_cnf(omega: &ClauseSet) -> Result<std::result::Result<ImplicitRefutation, Assignment>> {
    match dpll_refute(omega, &identity_order(omega.num_vars()))? {
        Ok(t) => implicit_from_tree(omega, &t).map(Ok),
        Err(model) => Ok(Err(model)),
    }
}

/// File names used by [`write_manifest`].
pub const MANIFEST_FILES: [&str; 3] = ["omega.cnf", "beta.circ", "alpha.rproof"];

/// Writes the manifest and its three artifacts into `dir`.
pub fn write_manifest(dir: &Path, ir: &ImplicitRefutation) -> Result<PathBuf> {
    let io = |e: std::io::Error| Error::pre(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let [omega, beta, alpha] = MANIFEST_FILES;
    let premises = gen_c(&ir.omega, &ir.beta).map(|cb| cb.clauses.len()).unwrap_or(0);
    fs::write(dir.join(omega), serialize_dimacs(&ir.omega)).map_err(io)?;
    fs::write(dir.join(beta), serialize_circuit(&ir.beta.circuit)).map_err(io)?;
    fs::write(dir.join(alpha), serialize_proof(&ir.alpha, premises)).map_err(io)?;
    let path = dir.join("manifest.txt");
    fs::write(&path, format!("implicit-refutation\nn {}\nomega {omega}\nbeta {beta}\nalpha {alpha}\n", ir.n)).map_err(io)?;
    Ok(path)
}

pub fn parse_manifest_text(text: &str) -> Result<(usize, PathBuf, PathBuf, PathBuf)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, "implicit-refutation")) => {}
        Some((i, _)) => return Err(Error::parse(i, "expected `implicit-refutation`")),
        None => return Err(Error::parse(0, "empty manifest")),
    }
    let (mut n, mut omega, mut beta, mut alpha) = (None, None, None, None);
    for (i, line) in lines {
        let (key, value) = line.split_once(char::is_whitespace).ok_or_else(|| Error::parse(i, "expected `<key> <value>`"))?;
        let value = value.trim();
        let slot = match key {
            "n" => {
                n = Some(value.parse::<usize>().map_err(|_| Error::parse(i, "bad n"))?);
                continue;
            }
            "omega" => &mut omega,
            "beta" => &mut beta,
            "alpha" => &mut alpha,
            _ => return Err(Error::parse(i, format!("unknown key `{key}`"))),
        };
        if slot.replace(PathBuf::from(value)).is_some() {
            return Err(Error::parse(i, format!("duplicate key `{key}`")));
        }
    }
    match (n, omega, beta, alpha) {
        (Some(n), Some(o), Some(b), Some(a)) => Ok((n, o, b, a)),
        _ => Err(Error::parse(0, "manifest needs n, omega, beta and alpha")),
    }
}

/// Decodes a manifest; paths inside are relative to the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<ImplicitRefutation> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::pre(format!("{}: {e}", p.display())));
    let base = path.parent().unwrap_or(Path::new("."));
    let (n, o, b, a) = parse_manifest_text(&read(path)?)?;
    let omega = parse_dimacs(&read(&base.join(o))?)?;
    let circuit = parse_circuit(&read(&base.join(b))?)?;
    let (alpha, _) = parse_proof(&read(&base.join(a))?)?;
    Ok(ImplicitRefutation { n, omega, alpha, beta: beta_unchecked(circuit, n) })
}

/// Attaches the interface implied by the circuit's free and output lists.
pub fn beta_unchecked(circuit: Circuit, n: usize) -> Beta {
    let iface = BetaInterface { n, inputs: circuit.free.clone(), outputs: circuit.outputs.clone() };
    Beta { circuit, iface }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::canonical_beta;
    use crate::formulas::Lit;

    fn omega1() -> ClauseSet {
        ClauseSet::from_dimacs_lits(1, &[&[1], &[-1]]).unwrap()
    }

    fn omega2() -> ClauseSet {
        ClauseSet::from_dimacs_lits(2, &[&[1, 2], &[-1, 2], &[-2]]).unwrap()
    }

    #[test]
    fn canonical_omega1() {
        let beta = canonical_beta(1, &mut VarAlloc::new(1)).unwrap();
        let alpha = synthesize_alpha(&omega1(), &beta).unwrap().unwrap();
        assert!(alpha.len() <= 40, "{}", alpha.len());
        let ir = ImplicitRefutation { n: 1, omega: omega1(), alpha, beta };
        assert!(verify_implicit(&ir).is_ok());

        let mut flipped = ir.clone();
        let out = flipped.beta.iface.outputs[0];
        let g = flipped.beta.circuit.gates.iter_mut().find(|g| g.defined == out).unwrap();
        let anchor = flipped.beta.iface.inputs[0];
        *g = crate::circuits::Gate::new(out, [Lit::pos(anchor), Lit::neg(anchor)]);
        let err = verify_implicit(&flipped).unwrap_err();
        assert_eq!(err.stage, Stage::Proof);
    }

    #[test]
    fn omega2_pipeline_and_missing_clause() {
        let ir = implicit_from_cnf(&omega2()).unwrap().unwrap();
        assert!(verify_implicit(&ir).is_ok());
        let weaker = ClauseSet::from_dimacs_lits(2, &[&[1, 2], &[-1, 2]]).unwrap();
        let x = synthesize_alpha(&weaker, &ir.beta).unwrap().unwrap_err();
        let (c, _) = crate::encoding::compute_initial_clause(&ir.beta, &x).unwrap();
        assert!(c.contains(Lit::neg(2)));
        assert!(!weaker.clauses().iter().any(|l| l.is_subset_of(&c)));
    }

    #[test]
    fn satisfiable_rejected() {
        let sat = ClauseSet::from_dimacs_lits(1, &[&[1]]).unwrap();
        assert!(implicit_from_cnf(&sat).unwrap().is_err());
        let ir = implicit_from_cnf(&omega1()).unwrap().unwrap();
        let bad = ImplicitRefutation { omega: sat, ..ir };
        assert_eq!(verify_implicit(&bad).unwrap_err().stage, Stage::Proof);
    }

    #[test]
    fn structure_checks() {
        let ir = implicit_from_cnf(&omega1()).unwrap().unwrap();
        let wide = ImplicitRefutation { omega: omega2(), ..ir.clone() };
        assert_eq!(verify_implicit(&wide).unwrap_err().stage, Stage::Structure);
        let mut b = ir.clone();
        b.beta.iface.outputs.push(b.beta.iface.inputs[0]);
        assert_eq!(verify_implicit(&b).unwrap_err().stage, Stage::Structure);
    }

    #[test]
    fn manifest_round_trip() {
        let ir = implicit_from_cnf(&omega2()).unwrap().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = write_manifest(dir.path(), &ir).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(back, ir);
        assert!(parse_manifest_text("implicit-refutation\nn 1\n").is_err());
        assert!(parse_manifest_text("nope\n").is_err());
    }
}
