use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qsym::cayley::{fourier_diagonal, CayleyGraph, GeneratingSet};
use qsym::families::Family;
use qsym::fixture::{self, Fixture};
use qsym::functor::{eval_partlin, functor_t};
use qsym::group::{AbelianGroup, GroupElement};
use qsym::intertwiner::{hat_block_intertwiner, parse_selection, project, EigenprojectionBasis};
use qsym::partition::Partition;
use qsym::verify::{self, CheckEntry, Suite, VerificationReport, Verdict};
use qsym::{dsl, Error, QTensor, Rational, Result, Tensor};

#[derive(Parser)]
#[command(name = "qsym", version, about = "Exact spectra, intertwiners and partition calculus for Cayley graphs of finite abelian groups")]
struct Cli {
    /// Largest admissible group order.
    #[arg(long, global = true, env = "QSYM_MAX_N", default_value_t = qsym::guard::DEFAULT_MAX_N)]
    max_n: u64,
    /// Largest admissible number of dense tensor entries.
    #[arg(long, global = true, env = "QSYM_MAX_DENSE", default_value_t = qsym::guard::DEFAULT_MAX_DENSE)]
    max_dense: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the Cayley graph, grouped by value, with their character labels.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        /// Emit the full JSON decomposition.
        #[arg(long)]
        json: bool,
    },
    /// Checks that the Fourier matrix diagonalizes the adjacency matrix.
    FourierCheck {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        json: bool,
    },
    /// The Fourier-transformed block intertwiner, optionally projected onto eigenspaces.
    Intertwiner {
        #[command(flatten)]
        graph: GraphArgs,
        /// Block partition b_{k,l} as "k,l".
        #[arg(long)]
        block: String,
        /// Eigenspace selection such as "V1" or "V1+Vn" (index of the distinct eigenvalue).
        #[arg(long)]
        project: Option<String>,
    },
    /// Partition-calculus expressions and fixture files.
    #[command(subcommand)]
    Partition(PartitionCommand),
    /// Runs a verification suite: all, lemmas, hypercube:n, halved:n, folded:n, hamming:n,m or wreath:n,m.
    Verify {
        suite: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum PartitionCommand {
    /// Evaluates an expression to its canonical linear combination of partitions.
    Eval {
        expr: String,
        /// Also evaluates the tensor functor at this dimension and prints tensor statistics.
        #[arg(long)]
        at: Option<usize>,
    },
    /// Runs the checks of a fixture file (".fix" is appended when missing).
    Check {
        file: PathBuf,
        /// Dimensions for the tensor-functor oracle, comma separated.
        #[arg(long, value_delimiter = ',')]
        oracle: Vec<usize>,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Named family: hypercube:n, halved:n, folded:n, hamming:n,m, complete:m or circulant:m,(s1;s2).
    #[arg(long, conflicts_with_all = ["orders", "gens"])]
    family: Option<String>,
    /// Cyclic orders of the group, comma separated.
    #[arg(long, requires = "gens")]
    orders: Option<String>,
    /// Generating set as coordinate tuples, e.g. "1,0;0,1".
    #[arg(long, requires = "orders")]
    gens: Option<String>,
}

fn integers(text: &str, what: &str) -> Result<Vec<i64>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| Error::InvalidInput(format!("{what}: {t:?} is not an integer"))))
        .collect()
}

impl GraphArgs {
    fn build(&self) -> Result<(CayleyGraph, Option<Family>)> {
        if let Some(f) = &self.family {
            let family = Family::parse(f)?;
            return Ok((family.build()?, Some(family)));
        }
        let (Some(orders), Some(gens)) = (&self.orders, &self.gens) else {
            return Err(Error::InvalidInput("give --family or both --orders and --gens".into()));
        };
        let orders = integers(orders, "--orders")?;
        if orders.iter().any(|&o| o <= 0) {
            return Err(Error::InvalidInput("--orders must be positive".into()));
        }
        let orders: Vec<u64> = orders.into_iter().map(|o| o as u64).collect();
        let group = AbelianGroup::new(&orders)?;
        let elems = gens
            .split(';')
            .filter(|t| !t.trim().is_empty())
            .map(|t| group.element(&integers(t, "--gens")?))
            .collect::<Result<Vec<_>>>()?;
        let set = GeneratingSet::new(&group, elems)?;
        Ok((CayleyGraph::new(group, set)?, None))
    }
}

fn parse_block(text: &str) -> Result<(usize, usize)> {
    let v = integers(text, "--block")?;
    match v[..] {
        [k, l] if k >= 0 && l >= 0 && k + l > 0 => Ok((k as usize, l as usize)),
        _ => Err(Error::InvalidInput(format!("--block expects k,l with k + l > 0, got {text:?}"))),
    }
}

fn print_json(v: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("serializable");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn tensor_json(t: &Tensor) -> Value {
    t.to_json_with(|v| v.to_json())
}

fn cmd_spectrum(graph: &GraphArgs, as_json: bool) -> Result<i32> {
    let (g, _) = graph.build()?;
    for w in g.warnings() {
        eprintln!("warning: {w}");
    }
    let spec = g.spectrum::<Rational>()?;
    if as_json {
        print_json(&g.spectrum_json(&spec));
    } else {
        for e in &spec.items {
            let labels: Vec<String> = e.labels.iter().map(|l| format!("{:?}", l.coords())).collect();
            println!("{}\tmultiplicity {}\t{}", e.value, e.labels.len(), labels.join(" "));
        }
    }
    Ok(0)
}

fn report_out(report: &VerificationReport, as_json: bool) -> i32 {
    if as_json {
        print_json(&report.to_json());
    } else {
        for c in &report.checks {
            println!("{:<8} {:<44} {}", c.verdict.name(), c.id, c.location);
            if c.verdict != Verdict::Pass {
                println!("         {}", c.detail);
            }
        }
        println!("{}: {}", report.suite, if report.passed() { "pass" } else { "FAIL" });
    }
    report.exit_code()
}

fn cmd_fourier_check(graph: &GraphArgs, as_json: bool) -> Result<i32> {
    let (g, family) = graph.build()?;
    let group = g.group();
    let mut checks = Vec::new();
    let diag = fourier_diagonal::<Rational>(&g)?;
    let (ok, detail) = match diag {
        None => (false, json!("F^-1 A F is not diagonal")),
        Some(d) => {
            let mut mismatches = Vec::new();
            for mu in group.elements() {
                if d[group.index_of(&mu)] != g.eigenvalue::<Rational>(&mu)? {
                    mismatches.push(mu.to_json());
                }
            }
            (mismatches.is_empty(), json!({"size": d.len(), "mismatches": mismatches}))
        }
    };
    checks.push(CheckEntry {
        id: "diagonal-matches-spectrum".into(),
        location: "Fourier diagonalization".into(),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    });
    match family {
        Some(Family::Hypercube(n)) => checks.push(verify::hypercube_diagonal(n)?),
        Some(Family::Folded(n)) => checks.extend(verify::folded_spectrum(n)?),
        Some(Family::Halved(n)) => checks.extend(verify::halved_spectrum(n)?),
        Some(Family::Hamming { n, m }) => checks.push(verify::hamming_spectrum(n, m as usize)?),
        Some(Family::Complete(m)) => checks.push(verify::complete_spectrum(m as usize)?),
        _ => {}
    }
    let name = family.map(|f| f.name()).unwrap_or_else(|| "graph".into());
    Ok(report_out(&VerificationReport { suite: name, checks }, as_json))
}

fn cmd_intertwiner(graph: &GraphArgs, block: &str, selection: Option<&str>) -> Result<i32> {
    let (g, _) = graph.build()?;
    let (k, l) = parse_block(block)?;
    let group = g.group();
    let out = match selection {
        None => {
            let t = hat_block_intertwiner(group, k, l)?;
            json!({"block": [k, l], "labels": group.elements().map(|e| e.to_json()).collect::<Vec<_>>(), "tensor": tensor_json(&t)})
        }
        Some(sel) => {
            let spec = g.spectrum::<Rational>()?;
            let which = parse_selection(sel, group.rank())?;
            let basis = EigenprojectionBasis::from_spectrum(group, &spec, &which)?;
            let t: Tensor = functor_t(&Partition::block(k, l), g.size())?;
            let p = project(&t, &basis, &basis)?;
            json!({
                "block": [k, l],
                "selection": sel,
                "labels": basis.labels().iter().map(GroupElement::to_json).collect::<Vec<_>>(),
                "tensor": tensor_json(&p),
            })
        }
    };
    print_json(&out);
    Ok(0)
}

fn tensor_stats(t: &QTensor) -> Result<Value> {
    let square = t.rows() == t.cols();
    let projection = square && t.compose(t)? == *t;
    Ok(json!({
        "shape": t.shape(),
        "out_axes": t.out_axes(),
        "nnz": t.nnz(),
        "rank": t.rank()?,
        "trace": if square { Value::String(t.trace().to_string()) } else { Value::Null },
        "projection": projection,
    }))
}

fn cmd_partition(cmd: &PartitionCommand) -> Result<i32> {
    match cmd {
        PartitionCommand::Eval { expr, at } => {
            let lin = dsl::eval_str(expr, &dsl::Env::new())?;
            let mut out = json!({"expr": expr, "result": lin.to_string(), "terms": lin.to_json()});
            if let Some(n) = at {
                if *n == 0 {
                    return Err(Error::InvalidInput("--at needs N ≥ 1".into()));
                }
                let t: QTensor = eval_partlin(&lin, *n, false)?;
                out["at"] = json!({"n": n, "tensor": tensor_stats(&t)?});
            }
            print_json(&out);
            Ok(0)
        }
        PartitionCommand::Check { file, oracle } => {
            let f = Fixture::load(file)?;
            let report = fixture::run(&f, oracle)?;
            print_json(&report.to_json());
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Spectrum { graph, json } => cmd_spectrum(graph, *json),
        Command::FourierCheck { graph, json } => cmd_fourier_check(graph, *json),
        Command::Intertwiner { graph, block, project } => cmd_intertwiner(graph, block, project.as_deref()),
        Command::Partition(cmd) => cmd_partition(cmd),
        Command::Verify { suite, json } => {
            let report = Suite::parse(suite)?.run()?;
            Ok(report_out(&report, *json))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // The library reads its guards from the environment.
    std::env::set_var("QSYM_MAX_N", cli.max_n.to_string());
    std::env::set_var("QSYM_MAX_DENSE", cli.max_dense.to_string());
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
