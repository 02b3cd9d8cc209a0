use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dualgraph::json::{self, FamilyVerdictDoc, GraphDoc, LabelDoc, ReportDoc, SpecDoc};
use dualgraph::{
    basic_refinement, compose_witnesses, family_verdict, gen_random, is_aligned,
    neron_separated_verdict, resolve, specialize, to_dot, validate_family, verify_refinement,
    BasicRefinementSpec, CycleBudgetExceeded, LabelledGraph, MonoidElement, PrimeAlphabet,
    RandomSpec, RefinementWitness, DEFAULT_CYCLE_CAP,
};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dualgraph",
    version,
    about = "Alignment and refinement of labelled dual graphs"
)]
struct Cli {
    /// Maximum number of cycles to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CYCLE_CAP)]
    cap: usize,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Process every input file independently; the worst exit code wins.
    #[arg(long, global = true)]
    each: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph against the structural invariants.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Total arithmetic complexity of a graph.
    Complexity {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Refine until every label is prime.
    Resolve {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Apply basic refinements, from a spec list or given inline.
    Refine {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, conflicts_with_all = ["edge", "from", "section_type"])]
        spec: Option<PathBuf>,
        #[arg(long, requires_all = ["from", "section_type"])]
        edge: Option<String>,
        #[arg(long, requires = "edge")]
        from: Option<String>,
        /// Type as text (`u*v^2`) or as a JSON label.
        #[arg(long = "type", requires = "edge")]
        section_type: Option<String>,
    },
    /// Alignment report.
    CheckAlign {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Separatedness of the Néron model at the point with this dual graph.
    Verdict {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Push labels through a hom and contract the unit edges.
    Specialize {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        hom: PathBuf,
    },
    /// Check a family of graphs, covers and correspondences
    FamilyValidate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Separatedness across every point of a family
    FamilyVerdict {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Check that a witness exhibits one graph as a refinement of another
    VerifyRefinement {
        coarse: PathBuf,
        fine: PathBuf,
        witness: PathBuf,
    },
    /// Seeded random connected labelled graph
    GenRandom {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long, default_value_t = 3)]
        max_exponent: u64,
        /// Defaults to the alphabet size.
        #[arg(long)]
        max_support: Option<usize>,
    },
    /// Graphviz rendering of a graph
    ExportDot {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

enum Body {
    Json(Value),
    Text(String),
}

struct Outcome {
    body: Body,
    code: u8,
}

impl Outcome {
    fn json(value: Value, positive: bool) -> Self {
        Outcome {
            body: Body::Json(value),
            code: if positive { OK } else { NEGATIVE },
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(CycleBudgetExceeded),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => INPUT_ERROR,
            Failure::Budget(_) => BUDGET,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => m.clone(),
            Failure::Budget(b) => b.to_string(),
        }
    }
}

impl From<CycleBudgetExceeded> for Failure {
    fn from(b: CycleBudgetExceeded) -> Self {
        Failure::Budget(b)
    }
}

type Outcomes = Result<Outcome, Failure>;

fn input<E: std::fmt::Display>(context: impl std::fmt::Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(input(path.display()))
}

fn load_graph(path: &Path) -> Result<LabelledGraph, Failure> {
    json::parse_graph(&read(path)?).map_err(input(path.display()))
}

fn graph_value(g: &LabelledGraph) -> Value {
    serde_json::to_value(GraphDoc::from_graph(g)).expect("documents serialize")
}

fn to_value<T: serde::Serialize>(doc: &T) -> Value {
    serde_json::to_value(doc).expect("documents serialize")
}

/// `Err` carries the outcome for an invalid graph.
fn valid_graph(path: &Path) -> Result<Result<LabelledGraph, Outcome>, Failure> {
    let g = load_graph(path)?;
    let report = g.validate();
    if report.is_valid() {
        Ok(Ok(g))
    } else {
        Ok(Err(Outcome::json(
            json!({"valid": false, "issues": report.messages()}),
            false,
        )))
    }
}

macro_rules! valid_graph {
    ($path:expr) => {
        match valid_graph($path)? {
            Ok(g) => g,
            Err(outcome) => return Ok(outcome),
        }
    };
}

fn graph_outcome(g: &LabelledGraph, format: Format, value: Value) -> Outcome {
    match format {
        Format::Dot => Outcome {
            body: Body::Text(to_dot(g)),
            code: OK,
        },
        Format::Json => Outcome::json(value, true),
    }
}

fn parse_type(alphabet: &Arc<PrimeAlphabet>, text: &str) -> Result<MonoidElement, Failure> {
    if text.trim_start().starts_with('{') {
        let doc: LabelDoc = serde_json::from_str(text).map_err(input("--type"))?;
        doc.to_element(alphabet).map_err(input("--type"))
    } else {
        MonoidElement::parse_text(alphabet, text).map_err(input("--type"))
    }
}

struct RefineArgs<'a> {
    spec: Option<&'a PathBuf>,
    edge: Option<&'a String>,
    from: Option<&'a String>,
    section_type: Option<&'a String>,
}

fn run_refine(path: &Path, args: &RefineArgs, format: Format) -> Outcomes {
    let g = valid_graph!(path);
    let specs = match (args.spec, args.edge, args.from, args.section_type) {
        (Some(spec), ..) => {
            json::parse_specs(&read(spec)?, g.alphabet()).map_err(input(spec.display()))?
        }
        (None, Some(edge), Some(from), Some(t)) => vec![BasicRefinementSpec {
            edge: edge.clone(),
            oriented_from: from.clone(),
            section_type: parse_type(g.alphabet(), t)?,
        }],
        _ => {
            return Err(Failure::Input(
                "refine needs --spec FILE or --edge, --from and --type".into(),
            ))
        }
    };
    let mut graph = g.clone();
    let mut witness = RefinementWitness::identity(&g);
    for (i, spec) in specs.iter().enumerate() {
        let step = basic_refinement(&graph, spec).map_err(input(format!("refinement {i}")))?;
        witness = compose_witnesses(&witness, &step.witness).expect("witnesses chain");
        graph = step.graph;
    }
    let value = json!({"graph": graph_value(&graph), "witness": to_value(&witness)});
    Ok(graph_outcome(&graph, format, value))
}

fn run_file(cli: &Cli, path: &Path) -> Outcomes {
    let cap = cli.cap;
    match &cli.command {
        Command::Validate { .. } => {
            let report = load_graph(path)?.validate();
            Ok(Outcome::json(
                json!({"valid": report.is_valid(), "issues": report.messages()}),
                report.is_valid(),
            ))
        }
        Command::Complexity { .. } => {
            let g = valid_graph!(path);
            let total = g.total_complexity().map_err(input(path.display()))?;
            Ok(Outcome::json(json!({"total_complexity": total}), true))
        }
        Command::Resolve { .. } => {
            let g = valid_graph!(path);
            let r = resolve(&g).map_err(input(path.display()))?;
            let steps: Vec<SpecDoc> = r.steps.iter().map(SpecDoc::from_spec).collect();
            let value = json!({
                "graph": graph_value(&r.graph),
                "witness": to_value(&r.witness),
                "steps": to_value(&steps),
            });
            Ok(graph_outcome(&r.graph, cli.format, value))
        }
        Command::Refine {
            spec,
            edge,
            from,
            section_type,
            ..
        } => {
            let args = RefineArgs {
                spec: spec.as_ref(),
                edge: edge.as_ref(),
                from: from.as_ref(),
                section_type: section_type.as_ref(),
            };
            run_refine(path, &args, cli.format)
        }
        Command::CheckAlign { .. } => {
            let g = valid_graph!(path);
            let report = is_aligned(&g, cap)?;
            Ok(Outcome::json(
                to_value(&ReportDoc::from_report(&report, &g)),
                report.aligned,
            ))
        }
        Command::Verdict { .. } => {
            let g = valid_graph!(path);
            let (separated, report) = neron_separated_verdict(&g, cap)?;
            Ok(Outcome::json(
                to_value(&ReportDoc::from_report(&report, &g)),
                separated,
            ))
        }
        Command::Specialize { hom, .. } => {
            let g = valid_graph!(path);
            let h = json::parse_hom(&read(hom)?).map_err(input(hom.display()))?;
            let s = specialize(&g, &h).map_err(input(hom.display()))?;
            let value = json!({
                "graph": graph_value(&s.graph),
                "contracted": s.contracted,
                "merge": s.merge,
            });
            Ok(graph_outcome(&s.graph, cli.format, value))
        }
        Command::FamilyValidate { .. } => {
            let f = json::parse_family(&read(path)?).map_err(input(path.display()))?;
            let report = validate_family(&f);
            Ok(Outcome::json(
                json!({"valid": report.is_valid(), "issues": report.messages()}),
                report.is_valid(),
            ))
        }
        Command::FamilyVerdict { .. } => {
            let f = json::parse_family(&read(path)?).map_err(input(path.display()))?;
            let report = validate_family(&f);
            if !report.is_valid() {
                return Ok(Outcome::json(
                    json!({"valid": false, "issues": report.messages()}),
                    false,
                ));
            }
            let verdict = family_verdict(&f, cap)?;
            Ok(Outcome::json(
                to_value(&FamilyVerdictDoc::from_verdict(&verdict, &f)),
                verdict.separated,
            ))
        }
        Command::ExportDot { .. } => {
            let g = load_graph(path)?;
            Ok(Outcome {
                body: Body::Text(to_dot(&g)),
                code: OK,
            })
        }
        Command::VerifyRefinement { .. } | Command::GenRandom { .. } => {
            unreachable!("not a per-file command")
        }
    }
}

fn run_single(cli: &Cli) -> Outcomes {
    match &cli.command {
        Command::VerifyRefinement {
            coarse,
            fine,
            witness,
        } => {
            let c = load_graph(coarse)?;
            let f = load_graph(fine)?;
            let w = json::parse_witness(&read(witness)?).map_err(input(witness.display()))?;
            let report = verify_refinement(&c, &f, &w);
            Ok(Outcome::json(
                json!({
                    "valid": report.is_valid(),
                    "strict": report.strict,
                    "issues": report.messages(),
                }),
                report.is_valid(),
            ))
        }
        Command::GenRandom {
            seed,
            vertices,
            edges,
            alphabet,
            max_exponent,
            max_support,
        } => {
            let spec = RandomSpec {
                seed: *seed,
                vertex_count: *vertices,
                edge_count: *edges,
                alphabet_size: *alphabet,
                max_exponent: *max_exponent,
                max_support: max_support.unwrap_or(*alphabet),
            };
            let g = gen_random(&spec).map_err(input("gen-random"))?;
            let value = graph_value(&g);
            Ok(graph_outcome(&g, cli.format, value))
        }
        _ => unreachable!("per-file command"),
    }
}

fn inputs(command: &Command) -> Option<&[PathBuf]> {
    match command {
        Command::Validate { files }
        | Command::Complexity { files }
        | Command::Resolve { files }
        | Command::Refine { files, .. }
        | Command::CheckAlign { files }
        | Command::Verdict { files }
        | Command::Specialize { files, .. }
        | Command::FamilyValidate { files }
        | Command::FamilyVerdict { files }
        | Command::ExportDot { files } => Some(files),
        Command::VerifyRefinement { .. } | Command::GenRandom { .. } => None,
    }
}

fn produces_graph(command: &Command) -> bool {
    matches!(
        command,
        Command::Resolve { .. }
            | Command::Refine { .. }
            | Command::Specialize { .. }
            | Command::GenRandom { .. }
            | Command::ExportDot { .. }
    )
}

fn run_batch(cli: &Cli, files: &[PathBuf]) -> Vec<Outcomes> {
    let next = AtomicUsize::new(0);
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(files.len());
    let mut results: Vec<(usize, Outcomes)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(path) = files.get(i) else { break };
                        done.push((i, run_file(cli, path)));
                    }
                    done
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    results.sort_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, r)| r).collect()
}

fn render(body: Body) -> String {
    match body {
        Body::Json(v) => json::to_pretty(&v) + "\n",
        Body::Text(t) => t,
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(input(path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> u8 {
    if cli.format == Format::Dot && !produces_graph(&cli.command) {
        eprintln!("error: --format dot is only available for commands producing a graph");
        return INPUT_ERROR;
    }
    let (text, code) = match inputs(&cli.command) {
        Some(files) if cli.each => {
            let mut worst = OK;
            let mut entries = Vec::new();
            let mut dot = String::new();
            for (path, result) in files.iter().zip(run_batch(cli, files)) {
                let file = path.display().to_string();
                let code = result.as_ref().map_or_else(Failure::code, |o| o.code);
                worst = worst.max(code);
                match result {
                    Ok(Outcome {
                        body: Body::Json(v),
                        ..
                    }) => entries.push(json!({"file": file, "exit_code": code, "result": v})),
                    Ok(Outcome {
                        body: Body::Text(t),
                        ..
                    }) => dot.push_str(&format!("// {file}\n{t}")),
                    Err(e) => {
                        eprintln!("error: {}", e.message());
                        if cli.format == Format::Dot {
                            dot.push_str(&format!("// {file}: error\n"));
                        } else {
                            entries.push(
                                json!({"file": file, "exit_code": code, "error": e.message()}),
                            );
                        }
                    }
                }
            }
            let text =
                if cli.format == Format::Dot || matches!(cli.command, Command::ExportDot { .. }) {
                    dot
                } else {
                    json::to_pretty(&entries) + "\n"
                };
            (text, worst)
        }
        Some([path]) => match run_file(cli, path) {
            Ok(o) => (render(o.body), o.code),
            Err(e) => {
                eprintln!("error: {}", e.message());
                return e.code();
            }
        },
        Some(_) => {
            eprintln!("error: several input files need --each");
            return INPUT_ERROR;
        }
        None => match run_single(cli) {
            Ok(o) => (render(o.body), o.code),
            Err(e) => {
                eprintln!("error: {}", e.message());
                return e.code();
            }
        },
    };
    match emit(cli, &text) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(execute(&cli))
}
