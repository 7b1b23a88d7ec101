use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mcdsqs::algebra::{build_field, Field};
use mcdsqs::codes::{anticode_bound_check, emit_code_with, to_dense, to_text, verify_code_with};
use mcdsqs::constructions::ConstructOptions;
use mcdsqs::data::{dataset_ids, list_datasets, load_dataset};
use mcdsqs::exec::{self, Exec};
use mcdsqs::model::{derive_at, ClaimedKind, Mode, Point};
use mcdsqs::recipes::{builtin_names, load_recipe, run_recipe};
use mcdsqs::resolver::{chromatic_index, min_coloring, ColoringOutcome, ResolverOptions};
use mcdsqs::serial::{read_certificate, to_json, write_certificate};
use mcdsqs::verify::{complete_colorings, verify_certificate_with};

const THREADS_VAR: &str = "MCDSQS_THREADS";
const TIMEOUT_VAR: &str = "MCDSQS_RESOLVER_TIMEOUT";

#[derive(Parser)]
#[command(
    name = "mcdsqs",
    version,
    about = "Build and certify Steiner quadruple systems with minimum colourable derived designs"
)]
struct Cli {
    /// Run every loop sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a construction recipe and write the certified design.
    Build {
        /// Built-in recipe name or path to a recipe file.
        #[arg(long)]
        recipe: String,
        #[arg(short, long)]
        out: PathBuf,
        /// Skip verification of ingredients (the output is always verified).
        #[arg(long)]
        no_check_ingredients: bool,
    },
    /// Verify a certificate file.
    Verify {
        file: PathBuf,
        /// Verify against this kind instead of the declared one.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Print the derived design at a point with its colouring.
    Derive {
        file: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Compute a minimum block colouring of a triple system.
    Chroma {
        file: PathBuf,
        /// Decide colourability with at most this many classes.
        #[arg(long)]
        max: Option<u32>,
        /// Colour the derived design at this point of a 3-design.
        #[arg(long)]
        point: Option<String>,
    },
    /// Emit the constant-weight code of an mcDSQS or RDSQS and verify it.
    Code {
        file: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CodeFormat::Text)]
        format: CodeFormat,
    },
    /// Embedded datasets.
    Data {
        #[command(subcommand)]
        cmd: DataCmd,
    },
    /// Print addition and multiplication tables of GF(p^n).
    Field { p: u32, n: u32 },
}

#[derive(Subcommand)]
enum DataCmd {
    List,
    Export {
        id: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CodeFormat {
    Text,
    Dense,
    Json,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var(THREADS_VAR) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = exec::set_worker_threads(n) {
                    eprintln!("error: {THREADS_VAR}: {e}");
                    return ExitCode::from(2);
                }
            }
            _ => {
                eprintln!("error: {THREADS_VAR} must be a positive integer, got `{n}`");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let cert = matches!(e.downcast_ref::<mcdsqs::Error>(), Some(mcdsqs::Error::Certification(_)));
            ExitCode::from(if cert { 1 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    let mode = if cli.sequential { Exec::Sequential } else { Exec::Auto };
    match cli.cmd {
        Cmd::Build { recipe, out, no_check_ingredients } => {
            let (r, base) = load_recipe(&recipe).map_err(|e| {
                anyhow::Error::new(e).context(format!("built-in recipes: {}", builtin_names().join(", ")))
            })?;
            let opts = ConstructOptions { check_ingredients: !no_check_ingredients, exec: mode, ..Default::default() };
            let cert = run_recipe(&r, &base, &opts)?;
            write_certificate(&out, &cert).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "{}: {}({}) with {} blocks -> {}",
                r.name,
                cert.claimed_kind,
                cert.design.v,
                cert.design.blocks.len(),
                out.display()
            );
            Ok(Status::Ok)
        }
        Cmd::Verify { file, kind } => {
            let mut cert = read(&file)?;
            if let Some(k) = kind {
                cert.claimed_kind = ClaimedKind::parse(&k)?;
            }
            let report = verify_certificate_with(&cert, mode);
            println!("{}({}): {}", cert.claimed_kind, cert.design.v, report.render());
            Ok(if report.pass { Status::Ok } else { Status::Failed })
        }
        Cmd::Derive { file, point } => {
            let cert = read(&file)?;
            let d = &cert.design;
            let x = parse_point(&point, d.v, &d.labels)?;
            let through = d.blocks_through(x);
            println!("derived design at {} ({} blocks)", d.point_name(x), through.len());
            let residue = |b: u32| {
                let r: Vec<Point> = d.blocks[b as usize].iter().copied().filter(|&p| p != x).collect();
                d.show_block(&r)
            };
            for &b in &through {
                println!("  {}", residue(b));
            }
            if cert.claimed_kind.has_point_colorings() {
                let all = complete_colorings(&cert)?;
                if let Some(c) = all.get(&x) {
                    println!("colouring: {} classes", c.classes.len());
                    for (j, cl) in c.classes.iter().enumerate() {
                        let bs: Vec<String> = cl.blocks.iter().map(|&b| residue(b)).collect();
                        let mode = if cl.scope.mode == Mode::Pc { "PC" } else { "PPC" };
                        println!("  {:>3} {mode} {}: {}", j + 1, cl.scope.ground, bs.join(" "));
                    }
                }
            }
            Ok(Status::Ok)
        }
        Cmd::Chroma { file, max, point } => {
            let cert = read(&file)?;
            let mut design = cert.design.clone();
            if let Some(p) = point {
                let x = parse_point(&p, design.v, &design.labels)?;
                design = derive_at(&design, x)?;
            } else if design.t != 2 {
                bail!("`chroma` colours triple systems; pass --point to use a derived design");
            }
            let opts = ResolverOptions { timeout: resolver_timeout()?, exec: mode, ..Default::default() };
            match max {
                Some(r) => match min_coloring(&design, r, &opts)? {
                    ColoringOutcome::Colored(c) => {
                        println!("SAT: coloured with {} classes (≤ {r})", c.classes.len());
                        Ok(Status::Ok)
                    }
                    ColoringOutcome::Unsat { nodes } => {
                        println!("UNSAT: no colouring with at most {r} classes ({nodes} search nodes)");
                        Ok(Status::Failed)
                    }
                },
                None => {
                    let (r, _) = chromatic_index(&design, &opts)?;
                    println!("chromatic index: {r}");
                    Ok(Status::Ok)
                }
            }
        }
        Cmd::Code { file, out, format } => {
            let cert = read(&file)?;
            let report = verify_certificate_with(&cert, mode);
            if !report.pass {
                println!("source design: {}", report.render());
                return Ok(Status::Failed);
            }
            let code = emit_code_with(&cert, mode)?;
            let check = verify_code_with(&code, mode);
            let bound = anticode_bound_check(code.n, code.w, 3, code.q, code.codewords.len() as u64)?;
            let text = match format {
                CodeFormat::Text => to_text(&code),
                CodeFormat::Dense => to_dense(&code),
                CodeFormat::Json => serde_json::to_string(&code)? + "\n",
            };
            std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
            println!("({}, {}, {}; {})_{}", code.n, code.codewords.len(), code.d, code.w, code.q);
            println!("distance check: {}", check.render());
            println!(
                "code-anticode: |C|·|A| = {} {} |J| = {}",
                bound.product,
                if bound.perfect() {
                    "="
                } else if bound.within() {
                    "<"
                } else {
                    ">"
                },
                bound.space
            );
            Ok(if check.pass && bound.perfect() { Status::Ok } else { Status::Failed })
        }
        Cmd::Data { cmd: DataCmd::List } => {
            for info in list_datasets() {
                println!("{:<16} {:<8} v={:<4} {}", info.id, info.claim, info.v, info.description);
            }
            Ok(Status::Ok)
        }
        Cmd::Data { cmd: DataCmd::Export { id, out } } => {
            let cert = load_dataset(&id)
                .map_err(|e| anyhow::Error::new(e).context(format!("available: {}", dataset_ids().join(", "))))?;
            match out {
                Some(p) => write_certificate(&p, &cert).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{}", to_json(&cert)?),
            }
            Ok(Status::Ok)
        }
        Cmd::Field { p, n } => {
            let f = build_field(p, n)?;
            println!("GF({}) = GF({p})[x]/({})", f.q, f.modulus_string());
            print_table("+", f.q, |a, b| f.add(a, b));
            print_table("*", f.q, |a, b| f.mul(a, b));
            Ok(Status::Ok)
        }
    }
}

fn read(path: &Path) -> Result<mcdsqs::model::CertifiedDesign> {
    read_certificate(path).map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display())))
}

fn parse_point(s: &str, v: u32, labels: &std::collections::BTreeMap<String, Point>) -> Result<Point> {
    let p = match labels.get(s) {
        Some(&p) => p,
        None => s.parse().with_context(|| format!("`{s}` is neither a point number nor a label"))?,
    };
    if p >= v {
        bail!("point {p} is outside 0..{v}");
    }
    Ok(p)
}

fn resolver_timeout() -> Result<Duration> {
    match std::env::var(TIMEOUT_VAR) {
        Ok(s) => {
            let secs: f64 = s.parse().with_context(|| format!("{TIMEOUT_VAR} must be a number of seconds"))?;
            Duration::try_from_secs_f64(secs).with_context(|| format!("{TIMEOUT_VAR} out of range"))
        }
        Err(_) => Ok(ResolverOptions::default().timeout),
    }
}

fn print_table(op: &str, q: u32, f: impl Fn(u32, u32) -> u32) {
    let w = (q.max(2) - 1).to_string().len();
    let head: Vec<String> = (0..q).map(|b| format!("{b:>w$}")).collect();
    println!("{op:>w$} | {}", head.join(" "));
    println!("{}", "-".repeat(w + 3 + head.join(" ").len()));
    for a in 0..q {
        let row: Vec<String> = (0..q).map(|b| format!("{:>w$}", f(a, b))).collect();
        println!("{a:>w$} | {}", row.join(" "));
    }
}
