//! `mdlconf`: interface configuration for composed services.
//!
//! Exit codes: 0 success, 1 unsatisfiable or failed check, 2 bad input.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mdlconf_core::constraints::{generate, load_topology, parse_bundle, parse_constraints, render_bundle, render_constraints};
use mdlconf_core::derivation::{apply_shell, derive_interfaces, parse_shell, parse_stub};
use mdlconf_core::emit::{emit_config, render_cfg, render_cpp_header};
use mdlconf_core::mdl::{parse_term, Label};
use mdlconf_core::seniority::leq;
use mdlconf_core::solver::{parse_solution, render_solution, solve, verify};
use mdlconf_core::{ConstraintSet, DerivedService, Solution, SolverConfig, Verdict};

#[derive(Parser)]
#[command(name = "mdlconf", version, about = "Configure service interfaces from MDL terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an MDL term file and print it in canonical form.
    Parse { file: PathBuf },
    /// Check `a ⊑ b` for two ground terms.
    Check { a: PathBuf, b: PathBuf },
    /// Derive an interface bundle from a stub (or an existing bundle) and an optional shell.
    Derive {
        input: PathBuf,
        #[arg(long)]
        shell: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the constraints generated by a topology.
    Constraints {
        #[command(flatten)]
        services: Services,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve the constraints and print a solution.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a solution against the constraints.
    Verify {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        sol: PathBuf,
    },
    /// Write per-service configuration for a solution.
    Emit {
        #[arg(long)]
        sol: PathBuf,
        #[arg(long = "ifc", required = true, num_args = 1..)]
        ifcs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cpp_header: bool,
    },
    /// Derive, generate, solve and emit in one go.
    Configure {
        #[arg(long)]
        topo: PathBuf,
        #[arg(long)]
        ifc_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cpp_header: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct Services {
    #[arg(long)]
    topo: PathBuf,
    /// Interface bundles or stubs; a `.shell` next to a file is applied to it.
    #[arg(long = "ifc", num_args = 1..)]
    ifcs: Vec<PathBuf>,
    #[arg(long)]
    ifc_dir: Option<PathBuf>,
}

#[derive(Args)]
struct Problem {
    #[arg(long)]
    topo: Option<PathBuf>,
    #[arg(long = "ifc", num_args = 1..)]
    ifcs: Vec<PathBuf>,
    #[arg(long)]
    ifc_dir: Option<PathBuf>,
    /// A constraint file as printed by `constraints`.
    #[arg(long, conflicts_with_all = ["topo", "ifcs", "ifc_dir"])]
    constraints: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 64)]
    max_rounds: usize,
    /// Take the first solution found instead of maximizing enabled functions.
    #[arg(long)]
    no_prefer_true: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        if self.max_rounds == 0 {
            bail!("--max-rounds must be at least 1");
        }
        Ok(SolverConfig {
            max_rounds: self.max_rounds,
            prefer_true: !self.no_prefer_true,
            ..SolverConfig::default()
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stem(path: &Path) -> Option<&str> {
    path.file_stem().and_then(|s| s.to_str())
}

/// Loads a bundle or stub, applying a sibling `.shell` if there is one.
fn load_service(path: &Path, shell: Option<&Path>) -> Result<DerivedService> {
    let text = read(path)?;
    let ctx = || format!("in {}", path.display());
    let d = match path.extension().and_then(|e| e.to_str()) {
        Some("stub") => derive_interfaces(&parse_stub(&text).with_context(ctx)?),
        _ => parse_bundle(&text, stem(path)).with_context(ctx)?,
    };
    let sibling = path.with_extension("shell");
    let shell = shell.map(Path::to_path_buf).or_else(|| sibling.is_file().then_some(sibling));
    match shell {
        Some(sp) => {
            let spec = parse_shell(&read(&sp)?).with_context(|| format!("in {}", sp.display()))?;
            apply_shell(&d, &spec).with_context(|| format!("applying {}", sp.display()))
        }
        None => Ok(d),
    }
}

fn service_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let p = entry?.path();
        if matches!(p.extension().and_then(|e| e.to_str()), Some("ifc" | "stub")) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn load_services(files: &[PathBuf], dir: Option<&Path>) -> Result<BTreeMap<Label, DerivedService>> {
    let mut all = files.to_vec();
    if let Some(d) = dir {
        all.extend(service_files(d)?);
    }
    if all.is_empty() {
        bail!("no service interfaces given (use --ifc or --ifc-dir)");
    }
    let mut out = BTreeMap::new();
    for f in &all {
        let d = load_service(f, None)?;
        if out.contains_key(&d.name) {
            bail!("service {} is defined twice ({})", d.name, f.display());
        }
        out.insert(d.name.clone(), d);
    }
    Ok(out)
}

fn generated(topo: &Path, services: &BTreeMap<Label, DerivedService>) -> Result<ConstraintSet> {
    let top = load_topology(&read(topo)?).with_context(|| format!("in {}", topo.display()))?;
    Ok(generate(&top, services)?)
}

impl Problem {
    fn load(&self) -> Result<ConstraintSet> {
        match (&self.constraints, &self.topo) {
            (Some(c), _) => Ok(parse_constraints(&read(c)?).with_context(|| format!("in {}", c.display()))?),
            (None, Some(t)) => generated(t, &load_services(&self.ifcs, self.ifc_dir.as_deref())?),
            (None, None) => bail!("give either --constraints or --topo with --ifc/--ifc-dir"),
        }
    }
}

/// Prints the verdict's diagnostics; returns the solution when there is one.
fn report(verdict: Verdict) -> Option<Solution> {
    match verdict {
        Verdict::Sat(s) => Some(s),
        Verdict::Unsat(origins) => {
            eprintln!("unsatisfiable; conflicting constraints:");
            for o in origins {
                eprintln!("  {o}");
            }
            None
        }
        Verdict::Diverged(rounds) => {
            eprintln!("no fixed point after {rounds} rounds; try a larger --max-rounds");
            None
        }
    }
}

fn emit_all(
    services: &BTreeMap<Label, DerivedService>,
    sol: &Solution,
    out: &Path,
    cpp_header: bool,
) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for (name, d) in services {
        let cfg = emit_config(d, sol)?;
        write(&out.join(format!("{name}.cfg")), &render_cfg(&cfg))?;
        if cpp_header {
            write(&out.join(format!("{name}.h")), &render_cpp_header(&cfg))?;
        }
    }
    Ok(())
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Parse { file } => {
            let t = parse_term(&read(&file)?).with_context(|| format!("in {}", file.display()))?;
            println!("{t}");
        }
        Command::Check { a, b } => {
            let ta = parse_term(&read(&a)?).with_context(|| format!("in {}", a.display()))?;
            let tb = parse_term(&read(&b)?).with_context(|| format!("in {}", b.display()))?;
            for (t, p) in [(&ta, &a), (&tb, &b)] {
                if !t.is_ground() {
                    bail!("{} is not a ground term", p.display());
                }
            }
            let holds = leq(&ta, &tb);
            println!("{}", if holds { "junior" } else { "not junior" });
            if !holds {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Derive { input, shell, output: out } => {
            let d = load_service(&input, shell.as_deref())?;
            output(out.as_deref(), &render_bundle(&d))?;
        }
        Command::Constraints { services, output: out } => {
            let svcs = load_services(&services.ifcs, services.ifc_dir.as_deref())?;
            let cs = generated(&services.topo, &svcs)?;
            output(out.as_deref(), &render_constraints(&cs))?;
        }
        Command::Solve { problem, solver, output: out } => {
            let cs = problem.load()?;
            let Some(sol) = report(solve(&cs, &solver.config()?)) else {
                return Ok(ExitCode::from(1));
            };
            output(out.as_deref(), &render_solution(&sol))?;
        }
        Command::Verify { problem, sol } => {
            let cs = problem.load()?;
            let s = parse_solution(&read(&sol)?).with_context(|| format!("in {}", sol.display()))?;
            let rep = verify(&cs, &s)?;
            if !rep.is_ok() {
                eprintln!("violated constraints:");
                for o in &rep.failures {
                    eprintln!("  {o}");
                }
                return Ok(ExitCode::from(1));
            }
            println!("ok: {} constraints hold", cs.len());
        }
        Command::Emit { sol, ifcs, out, cpp_header } => {
            let s = parse_solution(&read(&sol)?).with_context(|| format!("in {}", sol.display()))?;
            let services = load_services(&ifcs, None)?;
            emit_all(&services, &s, &out, cpp_header)?;
        }
        Command::Configure { topo, ifc_dir, out, cpp_header, solver } => {
            let started = Instant::now();
            let services = load_services(&[], Some(&ifc_dir))?;
            let cs = generated(&topo, &services)?;
            let Some(sol) = report(solve(&cs, &solver.config()?)) else {
                return Ok(ExitCode::from(1));
            };
            emit_all(&services, &sol, &out, cpp_header)?;
            write(&out.join("solution.sol"), &render_solution(&sol))?;
            eprintln!(
                "configured {} services from {} constraints in {:.1?}",
                services.len(),
                cs.len(),
                started.elapsed()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
