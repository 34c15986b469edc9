//! `dicebin`: loaded-die streams, extraction pipelines, exhaustive
//! verification, rate tables and tree inspection.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage or input error,
//! 3 enumeration budget exceeded.

mod symbols;

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use dicebin::binarize::compose_nodes;
use dicebin::layout::{columns, tree_report, ComponentOrder, TreeSource};
use dicebin::oracle::{is_extracting_function, naive_binarization_check, OracleError, DEFAULT_BUDGET};
use dicebin::stats::{self, empirical_rate, entropy, exact_rate, Distribution, RateError};
use dicebin::{BinarizationTree, ExtractorSpec};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "dicebin", version, about = "Unbiased random bits from a loaded die")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit i.i.d. die rolls.
    Gen(GenArgs),
    /// Turn a symbol stream into unbiased bits. The whole input is one block.
    Extract(ExtractArgs),
    /// Exhaustively check that the composed extractor is extracting.
    Verify(VerifyArgs),
    /// Exact or Monte Carlo output rates as CSV.
    Rate(RateArgs),
    /// Print a tree's component table, child maps and codewords.
    Tree(TreeArgs),
    /// Shannon entropy of a distribution, in bits per symbol.
    Entropy(EntropyArgs),
}

#[derive(Args)]
struct TreeArgs {
    /// Alphabet size; inferred from a literal tree when omitted.
    #[arg(long)]
    m: Option<usize>,
    /// `comb`, `zb`, or an S-expression such as "((2 5) ((1 (4 0)) 3))".
    #[arg(long, default_value = "comb")]
    tree: String,
    /// Component order: bfs (node index) or paper (construction's own order).
    #[arg(long, default_value = "bfs")]
    component_order: ComponentOrder,
}

impl TreeArgs {
    fn resolve(&self) -> anyhow::Result<(TreeSource, BinarizationTree)> {
        let source: TreeSource = self.tree.parse().context("malformed tree")?;
        let tree = source.build(self.m)?;
        Ok((source, tree))
    }

    fn nodes(&self, source: &TreeSource, tree: &BinarizationTree) -> Vec<usize> {
        columns(source, tree, self.component_order)
            .into_iter()
            .map(|c| c.node)
            .collect()
    }
}

#[derive(Args)]
struct GenArgs {
    /// Comma-separated face probabilities.
    #[arg(long)]
    dist: Distribution,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write symbols as contiguous digits (m <= 10).
    #[arg(long)]
    digits: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    tree: TreeArgs,
    /// vn, peres or elias[:block].
    #[arg(long, default_value = "peres")]
    extractor: ExtractorSpec,
    /// Read contiguous digits instead of whitespace-separated tokens (m <= 10).
    #[arg(long)]
    digits: bool,
    /// Write packed bytes, most significant bit first, zero-padded.
    #[arg(long)]
    packed: bool,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    tree: TreeArgs,
    #[arg(long, default_value = "peres")]
    extractor: ExtractorSpec,
    /// Input length to check.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Check the first-bit/second-bit split of a 4-faced die instead.
    #[arg(long)]
    naive: bool,
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    tree: TreeArgs,
    #[arg(long, default_value = "peres")]
    extractor: ExtractorSpec,
    #[arg(long)]
    dist: Distribution,
    /// Input lengths, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Monte Carlo trials per row; exact enumeration when omitted.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long)]
    dist: Distribution,
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        let budget = matches!(error.downcast_ref::<OracleError>(), Some(OracleError::BudgetExceeded { .. }))
            || matches!(
                error.downcast_ref::<RateError>(),
                Some(RateError::Oracle(OracleError::BudgetExceeded { .. }))
            );
        Failure {
            code: if budget { EXIT_BUDGET } else { EXIT_USAGE },
            error,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Rate(args) => cmd_rate(args),
        Command::Tree(args) => cmd_tree(args),
        Command::Entropy(args) => cmd_entropy(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_gen(args: GenArgs) -> Result<u8, Failure> {
    if args.digits && args.dist.m() > 10 {
        return Err(anyhow!("--digits needs at most 10 faces, got {}", args.dist.m()).into());
    }
    let mut rng = stats::seeded_rng(args.seed);
    let rolls = stats::sample_symbols(&args.dist, args.count, &mut rng);
    let mut out = open_output(&args.output)?;
    symbols::write_symbols(&mut out, &rolls, args.digits)?;
    out.flush()?;
    Ok(0)
}

fn cmd_extract(args: ExtractArgs) -> Result<u8, Failure> {
    let (source, tree) = args.tree.resolve()?;
    let mut text = String::new();
    match &args.input {
        Some(p) => {
            text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?
        }
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    let x = symbols::parse_symbols(&text, tree.m(), args.digits)?;
    let nodes = args.tree.nodes(&source, &tree);
    let bits = compose_nodes(&tree, args.extractor, &x, &nodes);

    let mut out = open_output(&args.output)?;
    if args.packed {
        out.write_all(&bits.to_packed())?;
    } else if !bits.is_empty() {
        writeln!(out, "{bits}")?;
    }
    out.flush()?;
    eprintln!("bits: {}", bits.len());
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let verdict = if args.naive {
        if args.tree.m.is_some_and(|m| m != 4) {
            return Err(anyhow!("--naive applies to a 4-faced die").into());
        }
        naive_binarization_check(args.n, args.budget)?
    } else {
        let (source, tree) = args.tree.resolve()?;
        let nodes = args.tree.nodes(&source, &tree);
        let spec = args.extractor;
        is_extracting_function(|x| compose_nodes(&tree, spec, x, &nodes), tree.m(), args.n, args.budget)?
    };
    println!("{verdict}");
    Ok(if verdict.is_pass() { 0 } else { EXIT_FAIL })
}

fn cmd_rate(args: RateArgs) -> Result<u8, Failure> {
    let (_, tree) = args.tree.resolve()?;
    args.dist.require_len(tree.m())?;
    let h = entropy(&args.dist);
    let mut out = open_output(&None)?;
    writeln!(out, "n,mode,rate,stderr,entropy")?;
    for &n in &args.n {
        let (mode, rate, stderr) = match args.trials {
            None => ("exact", exact_rate(&tree, args.extractor, &args.dist, n, args.budget)?, 0.0),
            Some(trials) => {
                let est = empirical_rate(&tree, args.extractor, &args.dist, n, trials, args.seed)?;
                ("mc", est.mean, est.std_error)
            }
        };
        writeln!(out, "{n},{mode},{rate},{stderr},{h}")?;
    }
    out.flush()?;
    Ok(0)
}

fn cmd_tree(args: TreeArgs) -> Result<u8, Failure> {
    let (source, tree) = args.resolve()?;
    let cols = columns(&source, &tree, args.component_order);
    print!("{}", tree_report(&tree, &cols));
    Ok(0)
}

fn cmd_entropy(args: EntropyArgs) -> Result<u8, Failure> {
    println!("{}", entropy(&args.dist));
    Ok(0)
}
