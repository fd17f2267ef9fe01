//! Command-line front end. [`run`] never touches the process: it returns the
//! exit code and both output streams, and `main` prints them.
//!
//! Exit codes: 0 yes or success, 1 no, 2 usage or input error, 3 budget
//! exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ci::{
    ci_to_cnf, extract_assignment, gci_to_ci, parse_problem, sat3_to_gci, solve_ci, solve_gci, verify_ci, verify_gci,
    CiSolution, Problem, ProblemFile, SolveOutcome, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};
use crate::interleaving::{
    ci_to_modules, decide_interleaving_presented, decide_interleaving_staircase, staircase_distance_certified,
    wrap_pair, Decision, InterleavingCertificate, MorphismMatrix, Witness,
};
use crate::onesided::{
    exists_injection, exists_st_trivial_morphism, exists_surjection, sat3_to_surjection, Bound, TrivialityParams,
};
use crate::presentation::{eval_dim, hom_space, GradedPresentation, Morphism, PresentationFile};
use crate::rational::{Point2, Rational};
use crate::sat::{parse_dimacs, Cnf};
use crate::staircase::{StaircaseSum, StaircaseSumFile};

/// Environment variable capping worker threads.
pub const THREADS_VAR: &str = "INTERLEAVE_FORGE_THREADS";

/// Default node budget of the module searches.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn new(code: i32, stdout: String) -> Self {
        CommandOutcome { code, stdout, stderr: String::new() }
    }

    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        CommandOutcome { code: 2, stdout: String::new(), stderr }
    }
}

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "interleave-forge",
    version,
    about = "Constrained invertibility and interleaving gadgets over prime fields"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Constrained invertibility instances.
    #[command(subcommand)]
    Ci(CiCmd),
    /// 3CNF formulas.
    #[command(subcommand)]
    Sat(SatCmd),
    /// Reductions between problems.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Module constructions.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Interleavings between two modules.
    #[command(subcommand)]
    Interleave(InterleaveCmd),
    /// Injections, surjections and trivial kernels or cokernels.
    #[command(subcommand)]
    Onesided(OnesidedCmd),
    /// Pointwise queries on modules.
    #[command(subcommand)]
    Module(ModuleCmd),
}

#[derive(Args, Debug)]
struct Budget {
    /// Search node cap.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum CiCmd {
    /// Fills the starred entries so that AB = I (or agrees with I on R).
    Solve {
        file: PathBuf,
        /// Overrides the modulus in the file.
        #[arg(long)]
        p: Option<u32>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Checks a solution as printed by `ci solve`.
    Verify {
        file: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        p: Option<u32>,
    },
    /// DIMACS encoding (GF(2) only).
    ToCnf {
        file: PathBuf,
        #[arg(long)]
        p: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum SatCmd {
    Solve {
        #[arg(long)]
        dimacs: PathBuf,
        /// Decide through the CI reduction over GF(p) instead of DPLL.
        #[arg(long)]
        via_ci: Option<u32>,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Subcommand, Debug)]
enum ReduceCmd {
    /// 3CNF to a CI instance, as instance JSON.
    SatToCi {
        #[arg(long)]
        dimacs: PathBuf,
        #[arg(long)]
        p: u32,
    },
}

#[derive(Subcommand, Debug)]
enum GadgetCmd {
    /// Staircase sums whose interleaving distance is 1 or 3.
    Modules {
        file: PathBuf,
        #[arg(long)]
        p: Option<u32>,
    },
    /// Staircase sums with a surjection iff the formula is satisfiable.
    Surjection {
        #[arg(long)]
        dimacs: PathBuf,
        #[arg(long)]
        p: u32,
    },
    /// Indecomposable presentations built from a staircase pair.
    Wrap { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum InterleaveCmd {
    Decide {
        file: PathBuf,
        #[arg(long)]
        eps: Rational,
        #[command(flatten)]
        budget: Budget,
    },
    /// Interleaving distance of two staircase sums.
    Distance {
        file: PathBuf,
        /// Also print the shift distances between summands.
        #[arg(long)]
        emit_distance_matrix: bool,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Subcommand, Debug)]
enum OnesidedCmd {
    /// A morphism with s-trivial kernel and t-trivial cokernel.
    Decide {
        file: PathBuf,
        #[arg(long)]
        s: Bound,
        #[arg(long)]
        t: Bound,
        #[command(flatten)]
        budget: Budget,
    },
    Surjection {
        file: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    Injection {
        file: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Subcommand, Debug)]
enum ModuleCmd {
    /// Dimension at a point.
    Eval {
        file: PathBuf,
        /// `x,y` with rational coordinates.
        #[arg(long)]
        point: String,
        /// Which module of a pair file.
        #[arg(long, default_value = "m", value_parser = ["m", "n"])]
        side: String,
    },
    /// Dimension of the space of morphisms `m -> n` of a pair file.
    Hom { file: PathBuf },
}

/// A module on disk: a staircase sum or a general presentation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleFile {
    Staircase(StaircaseSumFile),
    Presented(PresentationFile),
}

#[derive(Clone, Debug)]
pub enum Module {
    Staircase(StaircaseSum),
    Presented(GradedPresentation),
}

impl Module {
    pub fn presentation(&self) -> GradedPresentation {
        match self {
            Module::Staircase(s) => s.presentation(),
            Module::Presented(p) => p.clone(),
        }
    }

    fn staircase(&self) -> Option<&StaircaseSum> {
        match self {
            Module::Staircase(s) => Some(s),
            Module::Presented(_) => None,
        }
    }
}

impl ModuleFile {
    pub fn into_module(self) -> Result<Module> {
        Ok(match self {
            ModuleFile::Staircase(s) => Module::Staircase(s.into_sum()?),
            ModuleFile::Presented(p) => Module::Presented(p.into_presentation()?),
        })
    }

    pub fn from_sum(s: &StaircaseSum) -> Self {
        ModuleFile::Staircase(StaircaseSumFile::from_sum(s))
    }

    pub fn from_presentation(m: &GradedPresentation) -> Self {
        ModuleFile::Presented(PresentationFile::from_presentation(m))
    }
}

/// Two modules `m` and `n`, the input of every pair verb.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairFile {
    pub m: ModuleFile,
    pub n: ModuleFile,
}

impl PairFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_pair(path: &Path) -> Result<(Module, Module)> {
    let file: PairFile = serde_json::from_str(&read(path)?)?;
    Ok((file.m.into_module()?, file.n.into_module()?))
}

fn read_staircase_pair(path: &Path) -> Result<(StaircaseSum, StaircaseSum)> {
    match read_pair(path)? {
        (Module::Staircase(m), Module::Staircase(n)) => Ok((m, n)),
        _ => Err(Error::Precondition("this verb needs two staircase sums".into())),
    }
}

/// A single module file, or one side of a pair file.
fn read_module(path: &Path, side: &str) -> Result<Module> {
    let text = read(path)?;
    if let Ok(pair) = serde_json::from_str::<PairFile>(&text) {
        return if side == "n" { pair.n.into_module() } else { pair.m.into_module() };
    }
    serde_json::from_str::<ModuleFile>(&text)?.into_module()
}

/// Worker count from the environment, else the machine's parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Reads a solution: two matrix literals, one per line, each optionally
/// prefixed by `A:` or `B:`. The JSON form of `ci solve --json` also works.
pub fn parse_solution(text: &str) -> Result<CiSolution> {
    let text = text.trim();
    if text.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let get = |k: &str| -> Result<FieldMatrix> {
            v.get(k).and_then(|x| x.as_str()).ok_or_else(|| Error::Parse(format!("missing \"{k}\"")))?.parse()
        };
        return Ok(CiSolution { a: get("a")?, b: get("b")? });
    }
    let lits: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.strip_prefix("A:").or_else(|| l.strip_prefix("B:")).unwrap_or(l).trim())
        .collect();
    match lits.as_slice() {
        [a, b] => Ok(CiSolution { a: a.parse()?, b: b.parse()? }),
        _ => Err(Error::Parse(format!("expected two matrix literals, found {}", lits.len()))),
    }
}

pub fn format_solution(sol: &CiSolution) -> String {
    format!("A: {}\nB: {}\n", sol.a, sol.b)
}

struct Ctx {
    json: bool,
}

impl Ctx {
    fn emit(&self, code: i32, text: String, value: serde_json::Value) -> CommandOutcome {
        if self.json {
            CommandOutcome::new(code, serde_json::to_string(&value).expect("json") + "\n")
        } else {
            CommandOutcome::new(code, text)
        }
    }

    fn budget_exceeded(&self, nodes: u64) -> CommandOutcome {
        let mut out =
            self.emit(EXIT_BUDGET, "budget exceeded\n".into(), json!({"status": "budget_exceeded", "nodes": nodes}));
        out.stderr = format!("search stopped after {nodes} nodes\n");
        out
    }

    fn no(&self) -> CommandOutcome {
        self.emit(EXIT_NO, "no\n".into(), json!({"status": "no"}))
    }

    fn decision(&self, d: Decision<MorphismMatrix>) -> CommandOutcome {
        match d {
            Decision::Yes(f) => self.emit(
                EXIT_YES,
                format!("yes\nF: {}\n", f.matrix),
                json!({"status": "yes", "f": f.matrix.to_literal()}),
            ),
            Decision::No => self.no(),
            Decision::BudgetExceeded { nodes } => self.budget_exceeded(nodes),
        }
    }
}

fn morphism_text(f: &Morphism) -> String {
    f.images.iter().map(|v| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(";")
}

fn certificate(ctx: &Ctx, cert: &InterleavingCertificate) -> CommandOutcome {
    let (f, g) = match &cert.witness {
        Witness::Matrices { f, g } => (f.matrix.to_literal(), g.matrix.to_literal()),
        Witness::Presented { f, g } => (morphism_text(f), morphism_text(g)),
    };
    ctx.emit(
        EXIT_YES,
        format!("yes\neps: {}\nF: {f}\nG: {g}\n", cert.eps),
        json!({"status": "yes", "eps": cert.eps.to_string(), "f": f, "g": g}),
    )
}

fn format_distance_matrix(d: &[Vec<Rational>]) -> String {
    d.iter().map(|row| row.iter().map(Rational::to_string).collect::<Vec<_>>().join(" ") + "\n").collect()
}

fn parse_point(s: &str) -> Result<Point2> {
    let (x, y) = s.split_once(',').ok_or_else(|| Error::Parse(format!("point {s:?} is not x,y")))?;
    Ok(Point2::new(x.trim().parse()?, y.trim().parse()?))
}

fn dispatch(cli: Cli) -> Result<CommandOutcome> {
    let ctx = Ctx { json: cli.json };
    let b = |x: Budget, dflt: u64| x.budget.unwrap_or(dflt);
    match cli.cmd {
        Cmd::Ci(CiCmd::Solve { file, p, budget }) => {
            let outcome = match parse_problem(&read(&file)?, p)? {
                Problem::Ci(inst) => solve_ci(&inst, b(budget, DEFAULT_BUDGET))?,
                Problem::Gci(inst) => solve_gci(&inst, b(budget, DEFAULT_BUDGET))?,
            };
            Ok(match outcome {
                SolveOutcome::Solved(sol) => ctx.emit(
                    EXIT_YES,
                    format_solution(&sol),
                    json!({"status": "solved", "a": sol.a.to_literal(), "b": sol.b.to_literal()}),
                ),
                SolveOutcome::NoSolution => ctx.emit(EXIT_NO, "no solution\n".into(), json!({"status": "no_solution"})),
                SolveOutcome::BudgetExceeded { nodes } => ctx.budget_exceeded(nodes),
            })
        }
        Cmd::Ci(CiCmd::Verify { file, solution, p }) => {
            let sol = parse_solution(&read(&solution)?)?;
            let ok = match parse_problem(&read(&file)?, p)? {
                Problem::Ci(inst) => verify_ci(&inst, &sol)?,
                Problem::Gci(inst) => verify_gci(&inst, &sol)?,
            };
            let word = if ok { "valid" } else { "invalid" };
            Ok(ctx.emit(if ok { EXIT_YES } else { EXIT_NO }, format!("{word}\n"), json!({"valid": ok})))
        }
        Cmd::Ci(CiCmd::ToCnf { file, p }) => match parse_problem(&read(&file)?, p)? {
            Problem::Ci(inst) => {
                let enc = ci_to_cnf(&inst)?;
                let mut out = String::new();
                let _ = writeln!(out, "c A entries: {}", join_vars(&enc.a_vars));
                let _ = writeln!(out, "c B entries: {}", join_vars(&enc.b_vars));
                out.push_str(&enc.cnf.to_dimacs());
                Ok(CommandOutcome::new(EXIT_YES, out))
            }
            Problem::Gci(_) => Err(Error::Precondition("CNF export takes a CI instance".into())),
        },
        Cmd::Sat(SatCmd::Solve { dimacs, via_ci, budget }) => {
            let text = read(&dimacs)?;
            let model = match via_ci {
                None => Cnf::from_dimacs(&text)?.solve(),
                Some(p) => {
                    let formula = parse_dimacs(&text)?;
                    let (gci, decoder) = sat3_to_gci(&formula, PrimeField::new(p)?)?;
                    let (ci, emb) = gci_to_ci(&gci);
                    match solve_ci(&ci, b(budget, DEFAULT_BUDGET))? {
                        SolveOutcome::Solved(sol) => {
                            Some(extract_assignment(&formula, &gci, &decoder, &emb.restrict(&sol))?.values)
                        }
                        SolveOutcome::NoSolution => None,
                        SolveOutcome::BudgetExceeded { nodes } => return Ok(ctx.budget_exceeded(nodes)),
                    }
                }
            };
            Ok(match model {
                Some(v) => {
                    let lits: Vec<String> = v
                        .iter()
                        .enumerate()
                        .map(|(i, &t)| if t { (i + 1).to_string() } else { format!("-{}", i + 1) })
                        .collect();
                    ctx.emit(
                        EXIT_YES,
                        format!("SAT\nv {} 0\n", lits.join(" ")),
                        json!({"status": "sat", "assignment": v}),
                    )
                }
                None => ctx.emit(EXIT_NO, "UNSAT\n".into(), json!({"status": "unsat"})),
            })
        }
        Cmd::Reduce(ReduceCmd::SatToCi { dimacs, p }) => {
            let formula = parse_dimacs(&read(&dimacs)?)?;
            let (gci, _) = sat3_to_gci(&formula, PrimeField::new(p)?)?;
            let (ci, _) = gci_to_ci(&gci);
            Ok(CommandOutcome::new(EXIT_YES, serde_json::to_string(&ProblemFile::from_ci(&ci))? + "\n"))
        }
        Cmd::Gadget(GadgetCmd::Modules { file, p }) => match parse_problem(&read(&file)?, p)? {
            Problem::Ci(inst) => {
                let (m, n) = ci_to_modules(&inst)?;
                let pair = PairFile { m: ModuleFile::from_sum(&m), n: ModuleFile::from_sum(&n) };
                Ok(CommandOutcome::new(EXIT_YES, pair.to_json()))
            }
            Problem::Gci(_) => Err(Error::Precondition("the module gadget takes a CI instance".into())),
        },
        Cmd::Gadget(GadgetCmd::Surjection { dimacs, p }) => {
            let formula = parse_dimacs(&read(&dimacs)?)?;
            let g = sat3_to_surjection(&formula, PrimeField::new(p)?)?;
            let pair = PairFile { m: ModuleFile::from_sum(&g.m), n: ModuleFile::from_sum(&g.n) };
            Ok(CommandOutcome::new(EXIT_YES, pair.to_json()))
        }
        Cmd::Gadget(GadgetCmd::Wrap { file }) => {
            let (m, n) = read_staircase_pair(&file)?;
            let (wm, wn) = wrap_pair(&m, &n)?;
            let pair = PairFile { m: ModuleFile::from_presentation(&wm), n: ModuleFile::from_presentation(&wn) };
            Ok(CommandOutcome::new(EXIT_YES, pair.to_json()))
        }
        Cmd::Interleave(InterleaveCmd::Decide { file, eps, budget }) => {
            if eps < Rational::ZERO {
                return Err(Error::Precondition("eps must be nonnegative".into()));
            }
            let (m, n) = read_pair(&file)?;
            let d = match (m.staircase(), n.staircase()) {
                (Some(sm), Some(sn)) if sm.len() == sn.len() => {
                    decide_interleaving_staircase(sm, sn, eps, b(budget, DEFAULT_SEARCH_BUDGET))?
                }
                _ => decide_interleaving_presented(
                    &m.presentation(),
                    &n.presentation(),
                    eps,
                    b(budget, DEFAULT_SEARCH_BUDGET),
                )?,
            };
            Ok(match d {
                Decision::Yes(cert) => certificate(&ctx, &cert),
                Decision::No => ctx.no(),
                Decision::BudgetExceeded { nodes } => ctx.budget_exceeded(nodes),
            })
        }
        Cmd::Interleave(InterleaveCmd::Distance { file, emit_distance_matrix, budget }) => {
            let (m, n) = read_staircase_pair(&file)?;
            let (d, cert) = match staircase_distance_certified(&m, &n, b(budget, DEFAULT_SEARCH_BUDGET), thread_count())
            {
                Err(Error::BudgetExceeded(nodes)) => return Ok(ctx.budget_exceeded(nodes)),
                r => r?,
            };
            let (dmn, dnm) = (m.distance_matrix(&n), n.distance_matrix(&m));
            let mut text = format!("{d}\n");
            if emit_distance_matrix {
                text.push_str("d_s(M_i, N_j):\n");
                text.push_str(&format_distance_matrix(&dmn));
                text.push_str("d_s(N_j, M_i):\n");
                text.push_str(&format_distance_matrix(&dnm));
            }
            let (f, g) = match &cert.witness {
                Witness::Matrices { f, g } => (f.matrix.to_literal(), g.matrix.to_literal()),
                Witness::Presented { f, g } => (morphism_text(f), morphism_text(g)),
            };
            let strs = |d: &[Vec<Rational>]| -> Vec<Vec<String>> {
                d.iter().map(|r| r.iter().map(Rational::to_string).collect()).collect()
            };
            let mut value = json!({"distance": d.to_string(), "f": f, "g": g});
            if emit_distance_matrix {
                value["ds_mn"] = json!(strs(&dmn));
                value["ds_nm"] = json!(strs(&dnm));
            }
            Ok(ctx.emit(EXIT_YES, text, value))
        }
        Cmd::Onesided(cmd) => {
            let (file, budget) = match &cmd {
                OnesidedCmd::Decide { file, budget, .. }
                | OnesidedCmd::Surjection { file, budget }
                | OnesidedCmd::Injection { file, budget } => {
                    (file.clone(), budget.budget.unwrap_or(DEFAULT_SEARCH_BUDGET))
                }
            };
            let (m, n) = read_staircase_pair(&file)?;
            let d = match cmd {
                OnesidedCmd::Decide { s, t, .. } => {
                    exists_st_trivial_morphism(&m, &n, TrivialityParams::new(s, t)?, budget)?
                }
                OnesidedCmd::Surjection { .. } => exists_surjection(&m, &n, budget)?,
                OnesidedCmd::Injection { .. } => exists_injection(&m, &n, budget)?,
            };
            Ok(ctx.decision(d))
        }
        Cmd::Module(ModuleCmd::Eval { file, point, side }) => {
            let p = parse_point(&point)?;
            let dim = eval_dim(&read_module(&file, &side)?.presentation(), &p);
            Ok(ctx.emit(EXIT_YES, format!("{dim}\n"), json!({"point": [p.x.to_string(), p.y.to_string()], "dim": dim})))
        }
        Cmd::Module(ModuleCmd::Hom { file }) => {
            let (m, n) = read_pair(&file)?;
            let dim = hom_space(&m.presentation(), &n.presentation())?.len();
            Ok(ctx.emit(EXIT_YES, format!("{dim}\n"), json!({"dim": dim})))
        }
    }
}

fn join_vars(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutcome::new(EXIT_YES, text),
                _ => CommandOutcome::usage(text),
            };
        }
    };
    match dispatch(cli) {
        Ok(out) => out,
        Err(Error::BudgetExceeded(nodes)) => Ctx { json: false }.budget_exceeded(nodes),
        Err(e) => CommandOutcome::usage(format!("error: {e}")),
    }
}
