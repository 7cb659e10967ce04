//! The `implres` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::circuits::{parse_circuit, serialize_circuit, VarAlloc};
use crate::correctness::{gen_c, gen_correct, not_search, SearchProblem};
use crate::encoding::{tree_to_circuit, Beta};
use crate::error::Error;
use crate::fixtures::{dpll_er_proof, family};
use crate::formulas::{parse_dimacs, serialize_dimacs, ClauseSet, Var};
use crate::fuzz::soundness_fuzz;
use crate::implicit::{implicit_from_cnf, read_manifest, synthesize_alpha, verify_implicit, write_manifest, ImplicitRefutation};
use crate::oracles::{delta_exhaustive, delta_sampled, random_omega, render_csv, render_text, semantic_agrees, size_table, Agreement};
use crate::proofs::{parse_er_proof, parse_proof, serialize_er_proof, serialize_proof, ErProof};
use crate::prover::{balance_tree, dpll_refute, identity_order, parse_tree, proof_from_tree, serialize_tree};
use crate::tableau::{gen_tableau_constraints, parse_tau, parse_tm, serialize_tau, simulate, synthesize_pq, verify_pq, grid_beta, TableauBeta, Tau};
use crate::translate::{er_to_implicit, search_translate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "implres", version, about = "Implicit resolution refutations: build, verify, translate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutDir {
    /// Directory receiving the artifacts.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// DPLL refutation of a CNF: tree.dt, balanced.dt, proof.rproof and
    /// the same proof as an ER proof, proof.erproof.
    Prove {
        cnf: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// Compiles a decision tree into a circuit β (balancing it first).
    Encode {
        tree: PathBuf,
        /// Output file; standard output if absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Writes C(Ω,β) as c.cnf and its layout as c.layout.
    GenC {
        cnf: PathBuf,
        circ: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// Checks an implicit refutation manifest.
    Verify { manifest: PathBuf },
    /// Synthesizes α for (Ω, β) and writes a manifest.
    Synth {
        cnf: PathBuf,
        circ: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// Turns an ER refutation of Ω into an implicit refutation manifest.
    TranslateEr {
        cnf: PathBuf,
        erproof: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// Turns an ER refutation of Correct(C_n, δ) into a resolution refutation
    /// of Correct(C'_n, δ).
    TranslateSearch {
        /// Use the NOT search problem on this many bits.
        #[arg(long, conflicts_with_all = ["s", "c", "delta"])]
        not: Option<usize>,
        /// Circuit S_n (free x and y, output δ).
        #[arg(long, requires_all = ["c", "delta"])]
        s: Option<PathBuf>,
        /// Circuit C_n (free x, outputs y).
        #[arg(long)]
        c: Option<PathBuf>,
        #[arg(long)]
        delta: Option<Var>,
        /// ER refutation; one is read off a DPLL tree if absent.
        #[arg(long)]
        er_proof: Option<PathBuf>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Simulates a machine, hardwires its tableau into β and writes
    /// beta.circ, tau.txt, cp.cnf and alpha.rproof.
    TableauGen {
        tm: PathBuf,
        /// Address bits per coordinate; the tableau is 2^m × 2^m.
        #[arg(long)]
        m: usize,
        /// Comma-separated input symbols.
        #[arg(long, default_value = "")]
        input: String,
        /// Number of final-tape cells τ fixes; all of them if absent.
        #[arg(long)]
        tau_bits: Option<usize>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Checks that α refutes C_P(τ,β).
    TableauVerify { tm: PathBuf, tau: PathBuf, beta: PathBuf, alpha: PathBuf },
    /// Brute-force cross-checks and soundness fuzzing.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random Δ patterns per clause set for n = 3, 4.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        mutants: usize,
    },
    /// Size-ratio tables of the translators.
    Bench {
        #[arg(long)]
        csv: bool,
        /// Output file; standard output if absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Malformed(String),
    Rejected(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Malformed(_) => EXIT_MALFORMED,
            Failure::Rejected(_) => EXIT_REJECT,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Malformed(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

/// Writes via a temporary file and a rename.
fn write_file(path: &Path, contents: &str) -> Outcome {
    let io = |e: std::io::Error| Failure::Malformed(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn emit(out: Option<&Path>, contents: &str) -> Outcome {
    match out {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn read_cnf(path: &Path) -> std::result::Result<ClauseSet, Failure> {
    Ok(parse_dimacs(&read(path)?)?)
}

fn read_beta(path: &Path) -> std::result::Result<Beta, Failure> {
    Ok(Beta::from_circuit(parse_circuit(&read(path)?)?)?)
}

fn write_ir(dir: &Path, ir: &ImplicitRefutation) -> Outcome {
    let manifest = write_manifest(dir, ir)?;
    println!("{}", manifest.display());
    Ok(())
}

fn prove(cnf: &Path, out: &Path) -> Outcome {
    let cs = read_cnf(cnf)?;
    let n = cs.num_vars() as usize;
    let t = dpll_refute(&cs, &identity_order(cs.num_vars()))?.map_err(|a| {
        let model: Vec<String> = a.iter().map(|(v, b)| if b { v.to_string() } else { format!("-{v}") }).collect();
        Failure::Rejected(format!("satisfiable: {}", model.join(" ")))
    })?;
    let balanced = balance_tree(&t, n, &identity_order(n as Var))?;
    write_file(&out.join("tree.dt"), &serialize_tree(&t, n))?;
    write_file(&out.join("balanced.dt"), &serialize_tree(&balanced, n))?;
    let proof = proof_from_tree(&cs, &t)?;
    write_file(&out.join("proof.rproof"), &serialize_proof(&proof, cs.len()))?;
    let er = ErProof { aux: Default::default(), proof };
    write_file(&out.join("proof.erproof"), &serialize_er_proof(&er, cs.len()))
}

fn encode(tree: &Path, out: Option<&Path>) -> Outcome {
    let (t, n) = parse_tree(&read(tree)?)?;
    let balanced = balance_tree(&t, n, &identity_order(n as Var))?;
    let beta = tree_to_circuit(&balanced, n, &mut VarAlloc::new(1))?;
    emit(out, &serialize_circuit(&beta.circuit))
}

fn gen_c_cmd(cnf: &Path, circ: &Path, out: &Path) -> Outcome {
    let cb = gen_c(&read_cnf(cnf)?, &read_beta(circ)?)?;
    write_file(&out.join("c.cnf"), &serialize_dimacs(&cb.clauses))?;
    write_file(&out.join("c.layout"), &cb.sidecar())
}

fn verify(manifest: &Path) -> Outcome {
    let ir = read_manifest(manifest)?;
    let cb = verify_implicit(&ir).map_err(|r| Failure::Rejected(r.to_string()))?;
    println!("accept n={} |α|={} |C(Ω,β)|={}", ir.n, ir.alpha.len(), cb.clauses.len());
    Ok(())
}

fn synth(cnf: &Path, circ: &Path, out: &Path) -> Outcome {
    let omega = read_cnf(cnf)?;
    let beta = read_beta(circ)?;
    let n = beta.iface.n;
    let alpha = synthesize_alpha(&omega, &beta)?.map_err(|x| {
        let bits: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
        Failure::Rejected(format!("β does not refute Ω: path {bits} escapes"))
    })?;
    write_ir(out, &ImplicitRefutation { n, omega, alpha, beta })
}

fn translate_er(cnf: &Path, erproof: &Path, out: &Path) -> Outcome {
    let omega = read_cnf(cnf)?;
    let (pi, _) = parse_er_proof(&read(erproof)?)?;
    write_ir(out, &er_to_implicit(&omega, &pi)?)
}

fn search_problem(not: Option<usize>, s: Option<&Path>, c: Option<&Path>, delta: Option<Var>) -> std::result::Result<SearchProblem, Failure> {
    if let Some(n) = not {
        return Ok(not_search(n, true));
    }
    let (Some(s), Some(c), Some(delta)) = (s, c, delta) else {
        return Err(Failure::Malformed("give either --not or all of --s, --c, --delta".into()));
    };
    let s = parse_circuit(&read(s)?)?;
    let c = parse_circuit(&read(c)?)?;
    let sp = SearchProblem { x: c.free.clone(), y: c.outputs.clone(), s, c, delta };
    sp.validate()?;
    Ok(sp)
}

fn translate_search(sp: SearchProblem, er_proof: Option<&Path>, out: &Path) -> Outcome {
    let premises = gen_correct(&sp)?;
    let pi: ErProof = match er_proof {
        Some(p) => parse_er_proof(&read(p)?)?.0,
        None => dpll_er_proof(&premises)?,
    };
    let st = search_translate(&sp, &pi)?;
    let q = gen_correct(&st.problem)?;
    write_file(&out.join("s.circ"), &serialize_circuit(&st.problem.s))?;
    write_file(&out.join("c.circ"), &serialize_circuit(&st.problem.c))?;
    write_file(&out.join("correct.cnf"), &serialize_dimacs(&q))?;
    write_file(&out.join("rho.rproof"), &serialize_proof(&st.proof, q.len()))?;
    println!("|π|={} |ρ|={} δ={}", pi.proof.len(), st.proof.len(), st.problem.delta);
    Ok(())
}

fn tableau_gen(tm: &Path, m: usize, input: &str, tau_bits: Option<usize>, out: &Path) -> Outcome {
    let tm = parse_tm(&read(tm)?)?;
    tm.validate()?;
    let input: Vec<usize> = input
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Malformed(format!("bad input symbol `{t}`"))))
        .collect::<std::result::Result<_, _>>()?;
    let grid = simulate(&tm, &input, m)?;
    let last = grid.last().expect("the tableau has rows");
    let k = tau_bits.unwrap_or(last.len());
    if k > last.len() {
        return Err(Failure::Malformed(format!("τ cannot cover {k} cells of a {}-cell tape", last.len())));
    }
    let mut bits = Vec::with_capacity(k);
    for cell in &last[..k] {
        let symbol = tm.decode_cell(cell).expect("simulated cells decode").symbol;
        if symbol > 1 {
            return Err(Failure::Malformed("τ fixes binary symbols only; lower --tau-bits".into()));
        }
        bits.push(symbol == 1);
    }
    let tau = Tau(bits);
    let beta = grid_beta(m, &grid)?;
    let bundle = gen_tableau_constraints(&tm, &tau, &beta)?;
    let alpha = synthesize_pq(&tm, &tau, &beta)?.map_err(|a| Failure::Rejected(format!("run rejected at address {a:?}")))?;
    write_file(&out.join("beta.circ"), &serialize_circuit(&beta.circuit))?;
    write_file(&out.join("tau.txt"), &serialize_tau(&tau))?;
    write_file(&out.join("cp.cnf"), &serialize_dimacs(&bundle.clauses))?;
    write_file(&out.join("alpha.rproof"), &serialize_proof(&alpha, bundle.clauses.len()))
}

fn tableau_verify(tm: &Path, tau: &Path, beta: &Path, alpha: &Path) -> Outcome {
    let tm = parse_tm(&read(tm)?)?;
    let tau = parse_tau(&read(tau)?)?;
    let circuit = parse_circuit(&read(beta)?)?;
    let (alpha, _) = parse_proof(&read(alpha)?)?;
    let beta = TableauBeta { m: circuit.free.len() / 2, circuit };
    verify_pq(&tm, &tau, &beta, &alpha).map_err(|r| Failure::Rejected(r.to_string()))?;
    println!("accept m={} |α|={}", beta.m, alpha.len());
    Ok(())
}

fn oracle(seed: u64, samples: usize, mutants: usize) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut bad = 0usize;
    let mut report = |what: &str, a: Agreement| {
        println!("{what}: {} checked, {} disagreements", a.checked, a.disagreements);
        bad += a.disagreements;
    };
    let fixtures: Vec<ClauseSet> = family().into_iter().map(|(_, o)| o).collect();
    for n in 1..=2 {
        let mut a = Agreement::default();
        for omega in fixtures.iter().filter(|o| o.num_vars() as usize == n).cloned().chain((0..8).map(|_| random_omega(n, &mut rng))) {
            a.merge(delta_exhaustive(&omega, n)?);
        }
        report(&format!("delta n={n} exhaustive"), a);
    }
    for n in 3..=4 {
        let mut a = Agreement::default();
        for _ in 0..4 {
            let omega = random_omega(n, &mut rng);
            a.merge(delta_sampled(&omega, n, samples.div_ceil(4), &mut rng)?);
        }
        report(&format!("delta n={n} sampled"), a);
    }
    let mut sem = Agreement::default();
    for omega in fixtures.iter().filter(|o| o.num_vars() == 1) {
        if let Ok(ir) = implicit_from_cnf(omega)? {
            for other in (0..16).map(|_| random_omega(1, &mut rng)).chain([omega.clone()]) {
                if let Some(same) = semantic_agrees(&other, &ir.beta)? {
                    sem.checked += 1;
                    sem.disagreements += usize::from(!same);
                }
            }
        }
    }
    report("gen-c semantic", sem);
    let bases = fixtures.iter().map(implicit_from_cnf).collect::<crate::Result<Vec<_>>>()?;
    let bases: Vec<ImplicitRefutation> = bases.into_iter().flatten().collect();
    let fz = soundness_fuzz(&bases, mutants, seed)?;
    println!("{fz}");
    bad += fz.false_accepts.len();
    if bad == 0 {
        Ok(())
    } else {
        Err(Failure::Rejected(format!("{bad} oracle disagreements or false accepts")))
    }
}

fn bench(csv: bool, out: Option<&Path>) -> Outcome {
    let rows = size_table()?;
    emit(out, &if csv { render_csv(&rows) } else { render_text(&rows) })
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Prove { cnf, out } => prove(&cnf, &out.out),
        Command::Encode { tree, out } => encode(&tree, out.as_deref()),
        Command::GenC { cnf, circ, out } => gen_c_cmd(&cnf, &circ, &out.out),
        Command::Verify { manifest } => verify(&manifest),
        Command::Synth { cnf, circ, out } => synth(&cnf, &circ, &out.out),
        Command::TranslateEr { cnf, erproof, out } => translate_er(&cnf, &erproof, &out.out),
        Command::TranslateSearch { not, s, c, delta, er_proof, out } => {
            translate_search(search_problem(not, s.as_deref(), c.as_deref(), delta)?, er_proof.as_deref(), &out.out)
        }
        Command::TableauGen { tm, m, input, tau_bits, out } => tableau_gen(&tm, m, &input, tau_bits, &out.out),
        Command::TableauVerify { tm, tau, beta, alpha } => tableau_verify(&tm, &tau, &beta, &alpha),
        Command::Oracle { seed, samples, mutants } => oracle(seed, samples, mutants),
        Command::Bench { csv, out } => bench(csv, out.as_deref()),
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Malformed(m) => eprintln!("error: {m}"),
                Failure::Rejected(m) => eprintln!("{m}"),
            }
            f.code()
        }
    }
}
