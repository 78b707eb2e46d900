use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use bsfh::arc_diagram::canonical;
use bsfh::checks::{self, Outcome, Settings, SUITES};
use bsfh::join::Joiner;
use bsfh::models::{Descriptor, Hand};
use bsfh::nice::{build_cap_diagram, build_twisting_slice_diagram, compare_with_algebra, count_domains};
use bsfh::{report, sfh, AlgebraModel, ArcDiagram, PairSet};

#[derive(Parser, Debug)]
#[command(name = "bsfh", version, about = "Strands algebras, modules, joins and their checks over GF(2)")]
struct Cli {
    /// Longest input sequence the homotopy search may use.
    #[arg(long, global = true, default_value_t = 4)]
    max_homotopy_len: usize,
    /// Run independent suites on several threads. Output is unchanged.
    #[arg(long, global = true, value_enum, default_value_t = Toggle::Off)]
    parallel: Toggle,
    /// Seed for randomized checks, echoed in output headers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a diagram file is well formed and valid.
    Validate { diagram: String },
    /// Dump the basis, products and differential of the algebra.
    Algebra { diagram: String },
    /// Homology dimensions of the idempotent blocks.
    Blocks {
        diagram: String,
        /// Also print the products between blocks as triplets.
        #[arg(long)]
        products: bool,
    },
    /// The gluing map for a right type-D U, left type-A M and left type-D V.
    Join { diagram: String, u: String, m: String, v: String },
    /// The double of a left type-A module and its diagonal element.
    Double { diagram: String, m: String },
    /// Run invariant suites; exit code 2 if any fails.
    Check {
        diagram: String,
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Build a nice diagram (`slice` or `cap:{..}`) and compare it with the algebra.
    Nice { diagram: String, which: String },
}

/// A mathematical check failed; exit code 2.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

/// A file path, or one of the built-in names `Z0`, `Z1`, `Z2` (any case,
/// optionally with an `.arcd` suffix).
fn load(arg: &str) -> anyhow::Result<ArcDiagram> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return ArcDiagram::parse(&text).with_context(|| format!("parsing {arg}"));
    }
    let name = arg.strip_suffix(".arcd").unwrap_or(arg).to_uppercase();
    canonical::by_name(&name).with_context(|| format!("{arg}: no such file or built-in diagram"))
}

fn algebra(z: &ArcDiagram) -> anyhow::Result<Arc<AlgebraModel>> {
    Ok(Arc::new(AlgebraModel::new(z)?))
}

fn descriptor(s: &str, am: &Arc<AlgebraModel>, hand: Hand) -> anyhow::Result<bsfh::ainf::Module> {
    let d = Descriptor::parse(s, am.rank())?;
    Ok(d.build(am, hand)?)
}

fn run(cli: &Cli) -> anyhow::Result<String> {
    let settings = Settings { seed: cli.seed, max_homotopy_len: cli.max_homotopy_len };
    let mut out = String::new();
    match &cli.command {
        Command::Validate { diagram } => {
            let z = load(diagram)?;
            let violations = z.validate();
            if !violations.is_empty() {
                let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                bail!("{diagram} is not valid: {}", msgs.join("; "));
            }
            let st = z.surface_stats();
            writeln!(out, "valid\trank {}\teuler {}\tsutures {}", z.rank(), st.euler_characteristic, st.num_sutures)?;
        }
        Command::Algebra { diagram } => {
            let am = algebra(&load(diagram)?)?;
            out.push_str(&report::header(&format!("algebra {diagram}"), cli.seed));
            writeln!(out, "# basis\t{}", am.dim())?;
            out.push_str(&am.basis_tsv());
            out.push_str("# products\n");
            out.push_str(&am.mult_tsv());
            out.push_str("# differential\n");
            out.push_str(&am.diff_tsv());
        }
        Command::Blocks { diagram, products } => {
            let am = algebra(&load(diagram)?)?;
            out.push_str(&report::header(&format!("blocks {diagram}"), cli.seed));
            out.push_str(&report::blocks_tsv(&sfh::homology_blocks(&am)?));
            if *products {
                let sets: Vec<PairSet> = PairSet::all(am.rank()).collect();
                for &i in &sets {
                    for &j in &sets {
                        for &k in &sets {
                            let m = sfh::mu_h(&am, i, j, k)?;
                            if !m.is_zero() {
                                out.push_str(&report::matrix_triplets(&format!("mu {i} {j} {k}"), &m));
                            }
                        }
                    }
                }
            }
        }
        Command::Join { diagram, u, m, v } => {
            let am = algebra(&load(diagram)?)?;
            let j = Joiner::new(am.clone())?;
            let (u, m, v) = (descriptor(u, &am, Hand::Right)?, descriptor(m, &am, Hand::Left)?, descriptor(v, &am, Hand::Left)?);
            let inst = j.join_general(&u, &m, &v)?;
            out.push_str(&report::header(&format!("join {diagram}"), cli.seed));
            out.push_str(&report::join_tsv(&inst));
        }
        Command::Double { diagram, m } => {
            let am = algebra(&load(diagram)?)?;
            let j = Joiner::new(am.clone())?;
            let m = descriptor(m, &am, Hand::Left)?;
            let dbl = j.double_module(&m)?;
            let delta = j.diagonal(&m, &dbl);
            let cycle = dbl.complex()?.differential().apply(&delta).is_empty();
            out.push_str(&report::header(&format!("double {}", m.name), cli.seed));
            writeln!(out, "# generators\t{}", dbl.dim())?;
            for (i, g) in dbl.gens.iter().enumerate() {
                writeln!(out, "{i}\t{}", g.label)?;
            }
            let idx: Vec<String> = delta.iter().map(|i| i.to_string()).collect();
            writeln!(out, "# diagonal\t{}", idx.join(","))?;
            writeln!(out, "# diagonal is a cycle\t{cycle}")?;
            if !cycle {
                print!("{out}");
                return Err(CheckFailed("the diagonal element is not a cycle".into()).into());
            }
        }
        Command::Check { diagram, suite } => {
            let z = load(diagram)?;
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let results: Vec<bsfh::Result<Vec<Outcome>>> = if cli.parallel == Toggle::On {
                names.par_iter().map(|s| checks::run_suite(s, &z, &settings)).collect()
            } else {
                names.iter().map(|s| checks::run_suite(s, &z, &settings)).collect()
            };
            out.push_str(&report::header(&format!("check {diagram} {suite}"), cli.seed));
            let mut failed = 0;
            for r in results {
                for o in r? {
                    failed += usize::from(!o.passed);
                    let verdict = if o.passed { "PASS" } else { "FAIL" };
                    writeln!(out, "{verdict}\t{}\t{}\t{}", o.suite, o.name, o.detail)?;
                }
            }
            if failed > 0 {
                print!("{out}");
                return Err(CheckFailed(format!("{failed} checks failed")).into());
            }
        }
        Command::Nice { diagram, which } => {
            let z = load(diagram)?;
            let am = algebra(&z)?;
            let (d, expected) = if which == "slice" {
                (build_twisting_slice_diagram(&z)?, bsfh::models::alg_as_aa(&am))
            } else if let Some(s) = which.strip_prefix("cap:") {
                let set = PairSet::parse(s, z.rank())?;
                (build_cap_diagram(&z, set)?, bsfh::models::elementary_a(&am, set, Hand::Left))
            } else {
                bail!("expected `slice` or `cap:{{..}}`, got `{which}`");
            };
            let counted = count_domains(&d, &am)?;
            let verdict = compare_with_algebra(&d, &counted, &expected);
            out.push_str(&report::header(&format!("nice {diagram} {which}"), cli.seed));
            out.push_str(&d.to_text());
            writeln!(out, "# generators\t{}", counted.dim())?;
            if !verdict.is_isomorphic() {
                print!("{out}");
                return Err(CheckFailed(format!("not isomorphic to {}: {verdict:?}", expected.name)).into());
            }
            writeln!(out, "# isomorphic to\t{}", expected.name)?;
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) if e.is::<CheckFailed>() => {
            eprintln!("check failed: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
