//! Correctness clause sets: Δ(Ω), Λ, C(Ω,β) and Correct(C_n, δ).
//!
//! Layout of C(Ω,β) for `n` variables and β with `G` gates:
//! `z_1..z_n` are `1..n`; Λ follows (its constant, then the rows of
//! `u_{i,j}`); Δ's gates follow; the β copies come last, interleaved so that
//! gate `g` of row `i` gets `B + g·n + (i-1)`. Extending β by appending gates
//! therefore only adds clauses to C(Ω,β). Clauses are listed as Δ, `{¬δ}`,
//! Λ, then rows `1..n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::circuits::{Circuit, CircuitBuilder, VarAlloc, VarMap};
use crate::encoding::{bit, bit_length, Beta};
use crate::error::{Error, Result};
use crate::formulas::{Clause, ClauseSet, Lit, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaBundle {
    pub circuit: Circuit,
    pub x: Vec<Var>,
    /// `y[i-1][m-1]`
    pub y: Vec<Vec<Var>>,
    /// keyed by `(i, literal)`
    pub s: BTreeMap<(usize, Lit), Var>,
    pub l: BTreeMap<Lit, Var>,
    /// one per clause of Ω, in order
    pub w: Vec<Var>,
    pub delta: Var,
}

/// Δ(Ω) with fresh inputs.
pub fn gen_delta(omega: &ClauseSet, n: usize, alloc: &mut VarAlloc) -> Result<DeltaBundle> {
    let x = alloc.fresh_n(n);
    let y = (0..n).map(|_| alloc.fresh_n(bit_length(n))).collect::<Vec<_>>();
    gen_delta_over(omega, n, &x, &y, alloc)
}

/// Δ(Ω) over given inputs. Only literals occurring in Ω get `s` and `l` gates.
pub fn gen_delta_over(omega: &ClauseSet, n: usize, x: &[Var], y: &[Vec<Var>], alloc: &mut VarAlloc) -> Result<DeltaBundle> {
    if n == 0 || x.len() != n || y.len() != n || y.iter().any(|r| r.len() != bit_length(n)) {
        return Err(Error::pre(format!("Δ needs {n} literal encodings of width 1+{}", bit_length(n))));
    }
    if let Some(v) = omega.vars().into_iter().find(|&v| v as usize > n) {
        return Err(Error::VarOutOfRange { var: v, bound: n as Var, context: "clause set for Δ".into() });
    }
    let free: Vec<Var> = x.iter().chain(y.iter().flatten()).copied().collect();
    let mut b = CircuitBuilder::new(free, *alloc);
    let lits: BTreeSet<Lit> = omega.clauses().iter().flat_map(|c| c.lits().iter().copied()).collect();
    let mut s = BTreeMap::new();
    for &lit in &lits {
        let j = lit.var() as usize;
        for i in 1..=n {
            let mut body = vec![Lit::new(x[i - 1], !lit.is_pos())];
            body.extend((1..=bit_length(n)).map(|m| Lit::new(y[i - 1][m - 1], !bit(m, j))));
            s.insert((i, lit), b.gate(body));
        }
    }
    let l: BTreeMap<Lit, Var> = lits.iter().map(|&lit| (lit, b.gate((1..=n).map(|i| Lit::neg(s[&(i, lit)]))))).collect();
    let w: Vec<Var> = omega
        .clauses()
        .iter()
        .map(|c| {
            if c.is_empty() {
                let f = b.constant(false);
                b.gate([f])
            } else {
                b.gate(c.lits().iter().map(|lit| Lit::neg(l[lit])))
            }
        })
        .collect();
    let delta = if w.is_empty() {
        let f = b.constant(false);
        b.gate([f])
    } else {
        b.gate(w.iter().map(|&v| Lit::neg(v)))
    };
    *alloc = b.alloc;
    let mut circuit = b.finish();
    circuit.outputs = vec![delta];
    Ok(DeltaBundle { circuit, x: x.to_vec(), y: y.to_vec(), s, l, w, delta })
}

/// Number of gates Δ(Ω) has for `n` variables.
pub fn delta_gate_count(omega: &ClauseSet, n: usize) -> Result<usize> {
    Ok(gen_delta(omega, n, &mut VarAlloc::new(1))?.circuit.gates.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaBundle {
    pub circuit: Circuit,
    pub z: Vec<Var>,
    /// the constant-true gadget `t ≡ z_1 ∨ ¬z_1`
    pub truth: Var,
    /// `u[i-1][j]` for `j = 0..=n`
    pub u: Vec<Vec<Var>>,
}

/// Entry `u_{i,j}` of Λ: a constant, or `Err(t)` for `z_t`.
fn lambda_entry(n: usize, i: usize, j: usize) -> std::result::Result<bool, usize> {
    if j + i <= n {
        Ok(false)
    } else if j == n - i + 1 {
        Ok(true)
    } else {
        Err(j - (n - i + 1))
    }
}

pub fn gen_lambda(n: usize, alloc: &mut VarAlloc) -> Result<LambdaBundle> {
    if n == 0 {
        return Err(Error::pre("Λ needs n ≥ 1"));
    }
    let z = alloc.fresh_n(n);
    let mut b = CircuitBuilder::new(z.clone(), *alloc);
    let truth = b.truth();
    let u = (1..=n)
        .map(|i| {
            (0..=n)
                .map(|j| match lambda_entry(n, i, j) {
                    Ok(v) => b.gate([if v { truth } else { !truth }]),
                    Err(t) => b.gate([Lit::pos(z[t - 1])]),
                })
                .collect()
        })
        .collect();
    *alloc = b.alloc;
    Ok(LambdaBundle { circuit: b.finish(), z, truth: truth.var(), u })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectnessBundle {
    pub n: usize,
    pub clauses: ClauseSet,
    /// Λ, the β rows and Δ as one circuit over `z`, output δ.
    pub circuit: Circuit,
    pub lambda: LambdaBundle,
    pub delta: DeltaBundle,
    /// `w[i-1][m-1]`
    pub w: Vec<Vec<Var>>,
    /// `rows[i-1]` maps Γ(β) onto row `i`.
    pub rows: Vec<VarMap>,
    pub neg_delta_index: usize,
}

impl CorrectnessBundle {
    pub fn z(&self) -> &[Var] {
        &self.lambda.z
    }

    pub fn delta_var(&self) -> Var {
        self.delta.delta
    }

    /// Value of δ once `z` is fixed; every other variable is determined.
    pub fn eval_delta(&self, z: &[bool]) -> Result<bool> {
        let mut a = crate::formulas::Assignment::new();
        for (&v, &b) in self.lambda.z.iter().zip(z) {
            a.set(v, b);
        }
        Ok(self.circuit.evaluate(&a)?.get(self.delta.delta).unwrap_or(false))
    }

    /// A `z` under which δ is false, i.e. a model of C(Ω,β) exists.
    pub fn find_model_z(&self) -> Result<Option<Vec<bool>>> {
        let n = self.n;
        if n > crate::encoding::ENUMERATION_LIMIT {
            return Err(Error::GuardExceeded { what: "n", value: n, limit: crate::encoding::ENUMERATION_LIMIT });
        }
        for code in 0..1u64 << n {
            let z: Vec<bool> = (0..n).map(|t| code >> t & 1 == 1).collect();
            if !self.eval_delta(&z)? {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    pub fn sidecar(&self) -> String {
        let mut s = String::new();
        for (i, z) in self.lambda.z.iter().enumerate() {
            writeln!(s, "zvar {} {z}", i + 1).unwrap();
        }
        for (i, row) in self.w.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                writeln!(s, "wvar {} {} {v}", i + 1, m + 1).unwrap();
            }
        }
        writeln!(s, "delta {}", self.delta.delta).unwrap();
        writeln!(s, "neg-delta-clause {}", self.neg_delta_index).unwrap();
        s
    }
}

/// C(Ω,β).
pub fn gen_c(omega: &ClauseSet, beta: &Beta) -> Result<CorrectnessBundle> {
    beta.validate()?;
    let n = beta.iface.n;
    let mut alloc = VarAlloc::new(1);
    let lambda = gen_lambda(n, &mut alloc)?;
    let delta_start = alloc.next();
    let base = delta_start + delta_gate_count(omega, n)? as Var;
    let rows: Vec<VarMap> = (1..=n)
        .map(|i| {
            let mut f = VarMap::new();
            for (j, &x) in beta.iface.inputs.iter().enumerate() {
                f.insert(x, lambda.u[i - 1][j]);
            }
            for (g, gate) in beta.circuit.gates.iter().enumerate() {
                f.insert(gate.defined, base + (g * n + i - 1) as Var);
            }
            f
        })
        .collect();
    let w: Vec<Vec<Var>> =
        rows.iter().map(|f| beta.iface.outputs.iter().map(|&y| f.get(y).expect("outputs are variables of β")).collect()).collect();
    let delta = gen_delta_over(omega, n, &lambda.z, &w, &mut alloc)?;
    debug_assert_eq!(alloc.next(), base);
    let copies = rows.iter().map(|f| beta.circuit.rename(f)).collect::<Result<Vec<_>>>()?;

    let mut gates = lambda.circuit.gates.clone();
    for c in &copies {
        gates.extend(c.gates.iter().cloned());
    }
    gates.extend(delta.circuit.gates.iter().cloned());
    let circuit = Circuit::new(lambda.z.clone(), gates, vec![delta.delta]);

    let mut clauses = delta.circuit.clauses();
    let neg_delta_index = clauses.len();
    clauses.push(Clause::unit(Lit::neg(delta.delta)));
    clauses.extend(lambda.circuit.clauses());
    for c in &copies {
        clauses.extend(c.clauses());
    }
    let clauses = ClauseSet::from_clauses(clauses);
    Ok(CorrectnessBundle { n, clauses, circuit, lambda, delta, w, rows, neg_delta_index })
}

/// A search problem `S_n` with a candidate algorithm circuit `C_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchProblem {
    pub x: Vec<Var>,
    pub y: Vec<Var>,
    /// free `x ∪ y`, output δ
    pub s: Circuit,
    /// free `x`, outputs `y`
    pub c: Circuit,
    pub delta: Var,
}

impl SearchProblem {
    pub fn validate(&self) -> Result<()> {
        self.s.validate(None)?;
        self.c.validate(None)?;
        let xs: BTreeSet<Var> = self.x.iter().copied().collect();
        let xy: BTreeSet<Var> = self.x.iter().chain(&self.y).copied().collect();
        if self.s.free_set() != xy {
            return Err(Error::pre("S_n must have exactly the x and y variables free"));
        }
        if self.c.free_set() != xs || self.c.outputs != self.y {
            return Err(Error::pre("C_n must read the x variables and output the y variables"));
        }
        if !self.s.extension_set().contains(&self.delta) {
            return Err(Error::pre("δ must be an extension variable of S_n"));
        }
        let shared: BTreeSet<Var> = self.s.vars().intersection(&self.c.vars()).copied().collect();
        if shared != xy {
            return Err(Error::pre("C_n and S_n may only share the x and y variables"));
        }
        Ok(())
    }
}

/// `C_n ∪ S_n ∪ {¬δ}`.
pub fn gen_correct(sp: &SearchProblem) -> Result<ClauseSet> {
    sp.validate()?;
    let mut clauses = sp.c.clauses();
    clauses.extend(sp.s.clauses());
    clauses.push(Clause::unit(Lit::neg(sp.delta)));
    Ok(ClauseSet::from_clauses(clauses))
}

/// The NOT search problem: find `y` with `y_i = ¬x_i`. `correct = false`
/// gives the algorithm `y_i ≡ x_i`.
pub fn not_search(n: usize, correct: bool) -> SearchProblem {
    let n32 = n as Var;
    let x: Vec<Var> = (1..=n32).collect();
    let y: Vec<Var> = (n32 + 1..=2 * n32).collect();
    let c = Circuit::new(
        x.clone(),
        (0..n).map(|i| crate::circuits::Gate::new(y[i], [Lit::new(x[i], !correct)])).collect(),
        y.clone(),
    );
    let mut b = CircuitBuilder::new(x.iter().chain(&y).copied().collect(), VarAlloc::new(2 * n32 + 1));
    let mut bad = Vec::with_capacity(n);
    for i in 0..n {
        let ci = b.gate([Lit::neg(x[i]), Lit::neg(y[i])]);
        let bi = b.gate([Lit::pos(x[i]), Lit::pos(y[i])]);
        bad.push((ci, bi));
    }
    let g = b.gate(bad.iter().flat_map(|&(ci, bi)| [Lit::neg(ci), Lit::neg(bi)]));
    let delta = b.gate([Lit::neg(g)]);
    let mut s = b.finish();
    s.outputs = vec![delta];
    SearchProblem { x, y, s, c, delta }
}
