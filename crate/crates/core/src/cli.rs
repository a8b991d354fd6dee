//! Command-line front end. `run` parses arguments, dispatches and renders;
//! the binary only forwards process arguments and the exit code.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::admissibility::{check_pattern, ForbiddenSet, GlobalVerdict};
use crate::correspond::{a_l_window, square_window, CoverWindow};
use crate::entropy::{self, LaurentPolynomial2};
use crate::error::{Error, Result};
use crate::graphkit::{honeycomb_torus, io_double_cover, parse_graph, square_grid, square_torus, torus_quotient, GraphFile, UndirectedGraph};
use crate::lattice::text::{format_pattern, parse_pattern, parse_set};
use crate::lattice::{fmt_point, BoxShape, FieldSearch, RestrictingSet, SearchMode};
use crate::oracle::{self, Budget};
use crate::planarcount::{count_matchings_planar, count_perfect_covers, count_toral_matchings, to_integer_count, EdgeWeights, PlanarEmbedding, DEFAULT_WIDTH_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "permlattice", version, about = "Exact counts for restricted-movement permutations of Z^2")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// write the result here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// worker threads (default: available cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// oracle node budget (overrides PERMLATTICE_BUDGET)
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact counts
    #[command(subcommand)]
    Count(CountCmd),
    /// Entropy integrals and finite-size tables
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Admissibility verdict for a pattern file
    Check(CheckArgs),
    /// Like `count`, optionally dumping every witness
    Enumerate(EnumerateArgs),
    /// Fast counters against brute force on the built-in corpus
    OracleDiff(OracleDiffArgs),
}

#[derive(Subcommand, Debug)]
pub enum CountCmd {
    /// Periodic points: toral permutations of a shape
    Toral(SetShape),
    /// Permutations of a box that keep every cell inside it
    Box(SetShape),
    /// Globally admissible patterns on a rectangle
    Patterns(PatternArgs),
    /// Perfect matchings of a graph
    Matchings(GraphArgs),
    /// Perfect covers of a target set
    Covers(CoverArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PatternArgs {
    #[command(flatten)]
    pub base: SetShape,
    /// which shift space the patterns must extend in
    #[arg(long, value_enum, default_value = "permutation")]
    pub model: Model,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// bijections of the plane
    Permutation,
    /// injective maps of the plane
    Injective,
    /// surjective maps of the plane
    Surjective,
}

#[derive(Args, Debug, Clone)]
pub struct SetShape {
    /// preset (AL, A+, Aoplus) or explicit list like [(0,0),(1,0)]
    #[arg(long)]
    pub set: String,
    /// comma-separated side lengths, e.g. 3,3
    #[arg(long)]
    pub shape: String,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// graph file (`v`, `e` and optional `t` lines)
    #[arg(long, conflicts_with_all = ["grid", "square_torus", "honeycomb_torus"])]
    pub graph: Option<PathBuf>,
    /// square grid graph with the given sides
    #[arg(long)]
    pub grid: Option<String>,
    /// square lattice on the n x n torus
    #[arg(long)]
    pub square_torus: Option<usize>,
    /// honeycomb lattice on the n x n torus
    #[arg(long)]
    pub honeycomb_torus: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct CoverArgs {
    /// built-in window: `al` (A_L I/O window) or `z2` (square lattice)
    #[arg(long, value_enum, conflicts_with = "graph")]
    pub window: Option<WindowKind>,
    /// box sides for the window
    #[arg(long, requires = "window")]
    pub shape: Option<String>,
    /// graph file with positions and `t` target lines
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WindowKind {
    Al,
    Z2,
}

#[derive(Subcommand, Debug)]
pub enum EntropyCmd {
    /// Mahler-measure quadrature
    Integral(IntegralArgs),
    /// per-site logs of exact counts for n = 1..n_max
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct IntegralArgs {
    /// AL or A+ (the two closed-form integrands)
    #[arg(long, conflicts_with = "poly")]
    pub set: Option<String>,
    /// Laurent polynomial in z, w, e.g. "1+z+w"
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, default_value_t = entropy::DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// sup-norm radius of the obstruction window
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    /// forbidden set for the local check
    #[arg(long, value_enum)]
    pub forbidden: Option<ForbiddenKind>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ForbiddenKind {
    /// surjectivity patterns of the pattern's own set
    Surjective,
    /// surjectivity plus collision pairs
    Collisions,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    /// print every witness in its text format
    #[arg(long)]
    pub witnesses: bool,
    #[command(subcommand)]
    pub what: EnumerateCmd,
}

#[derive(Subcommand, Debug)]
pub enum EnumerateCmd {
    Toral(SetShape),
    Patterns(SetShape),
    Matchings(GraphArgs),
    Covers(CoverArgs),
}

#[derive(Args, Debug)]
pub struct OracleDiffArgs {
    /// smaller corpus
    #[arg(long)]
    pub quick: bool,
}

/// A rendered command result.
struct Output {
    command: String,
    result: Map<String, Value>,
    text: String,
    csv: Option<String>,
    exit: i32,
}

impl Output {
    fn new(command: &str) -> Self {
        Self { command: command.into(), result: Map::new(), text: String::new(), csv: None, exit: EXIT_OK }
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.result.insert(key.into(), v.into());
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity(_) => EXIT_CAPACITY,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_VALIDATION,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Compatibility(_) => "compatibility",
        Error::Singular(_) => "singular",
        Error::Structure(_) => "structure",
        Error::NotAdmissible(_) => "not-admissible",
        Error::Embedding(_) => "embedding",
        Error::Geometry(_) => "geometry",
        Error::Capacity(_) => "capacity",
        Error::Parse(_) => "parse",
        Error::Internal(_) => "internal",
    }
}

/// Parses `args` (program name first), runs the command and writes to the
/// given streams. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let name = command_name(&cli.command);
    let result = Budget::from_env().and_then(|mut budget| {
        if let Some(b) = cli.budget {
            budget.nodes = b;
        }
        dispatch(&cli.command, &budget)
    });
    let (rendered, code) = match result {
        Ok(o) => {
            let code = o.exit;
            (render(&o, cli.format), code)
        }
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(err, "error[{}]: {}", error_kind(&e), one_line(&e.to_string()));
            if cli.format == Format::Json {
                let v = json!({
                    "command": name,
                    "status": "error",
                    "exit_code": code,
                    "error": {"kind": error_kind(&e), "message": e.to_string()},
                });
                (format!("{}\n", serde_json::to_string_pretty(&v).unwrap()), code)
            } else {
                (String::new(), code)
            }
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                let _ = writeln!(err, "error[io]: cannot write {}: {e}", path.display());
                return EXIT_VALIDATION;
            }
        }
        None => {
            let _ = out.write_all(rendered.as_bytes());
        }
    }
    code
}

fn one_line(s: &str) -> String {
    s.replace('\n', " ")
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Count(k) => format!(
            "count {}",
            match k {
                CountCmd::Toral(_) => "toral",
                CountCmd::Box(_) => "box",
                CountCmd::Patterns(_) => "patterns",
                CountCmd::Matchings(_) => "matchings",
                CountCmd::Covers(_) => "covers",
            }
        ),
        Command::Entropy(EntropyCmd::Integral(_)) => "entropy integral".into(),
        Command::Entropy(EntropyCmd::Report(_)) => "entropy report".into(),
        Command::Check(_) => "check".into(),
        Command::Enumerate(a) => format!(
            "enumerate {}",
            match a.what {
                EnumerateCmd::Toral(_) => "toral",
                EnumerateCmd::Patterns(_) => "patterns",
                EnumerateCmd::Matchings(_) => "matchings",
                EnumerateCmd::Covers(_) => "covers",
            }
        ),
        Command::OracleDiff(_) => "oracle-diff".into(),
    }
}

fn render(o: &Output, format: Format) -> String {
    match format {
        Format::Text => o.text.clone(),
        Format::Json => {
            let status = if o.exit == EXIT_DISAGREEMENT { "disagreement" } else { "ok" };
            let v = json!({
                "command": o.command,
                "status": status,
                "exit_code": o.exit,
                "result": Value::Object(o.result.clone()),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
        Format::Csv => match &o.csv {
            Some(c) => c.clone(),
            None => {
                let mut s = String::from("key,value\n");
                for (k, v) in &o.result {
                    let cell = match v {
                        Value::String(x) => x.clone(),
                        Value::Object(_) | Value::Array(_) => continue,
                        other => other.to_string(),
                    };
                    let _ = writeln!(s, "{k},{cell}");
                }
                s
            }
        },
    }
}

fn parse_shape(s: &str) -> Result<BoxShape> {
    let dims: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad shape {s:?}"))))
        .collect::<Result<_>>()?;
    BoxShape::new(dims)
}

fn set_shape(a: &SetShape) -> Result<(RestrictingSet, BoxShape)> {
    let set = parse_set(&a.set)?;
    let shape = parse_shape(&a.shape)?;
    if set.dim() != shape.dim() {
        return Err(Error::Domain(format!("set has dimension {} but shape has {}", set.dim(), shape.dim())));
    }
    Ok((set, shape))
}

fn dispatch(cmd: &Command, budget: &Budget) -> Result<Output> {
    match cmd {
        Command::Count(CountCmd::Toral(a)) => count_toral(a, budget, false),
        Command::Count(CountCmd::Box(a)) => count_box(a, budget),
        Command::Count(CountCmd::Patterns(a)) => match a.model {
            Model::Permutation => count_patterns(&a.base, budget, false),
            m => count_model_patterns(&a.base, m, budget),
        },
        Command::Count(CountCmd::Matchings(a)) => count_matchings(a, budget, false),
        Command::Count(CountCmd::Covers(a)) => count_covers(a, budget, false),
        Command::Entropy(EntropyCmd::Integral(a)) => integral(a),
        Command::Entropy(EntropyCmd::Report(a)) => report(a, budget),
        Command::Check(a) => check(a),
        Command::Enumerate(a) => match &a.what {
            EnumerateCmd::Toral(s) => count_toral(s, budget, a.witnesses),
            EnumerateCmd::Patterns(s) => count_patterns(s, budget, a.witnesses),
            EnumerateCmd::Matchings(g) => count_matchings(g, budget, a.witnesses),
            EnumerateCmd::Covers(c) => count_covers(c, budget, a.witnesses),
        },
        Command::OracleDiff(a) => oracle_diff(a, budget),
    }
}

/// Fast and brute-force values side by side. Either may be unavailable
/// (capacity); both missing is a capacity error, a mismatch exits with 4.
fn agree(o: &mut Output, what: &str, fast: Option<(BigUint, &str)>, brute: Option<(BigUint, &str)>) -> Result<BigUint> {
    let value = match (&fast, &brute) {
        (None, None) => return Err(Error::Capacity(format!("no counter for {what} fits the limits"))),
        (Some((f, _)), Some((b, _))) if f != b => {
            o.exit = EXIT_DISAGREEMENT;
            f.clone()
        }
        (Some((f, _)), _) => f.clone(),
        (None, Some((b, _))) => b.clone(),
    };
    o.put("count", value.to_string());
    let mut methods = Vec::new();
    for (tag, v) in [("fast", &fast), ("oracle", &brute)] {
        if let Some((c, m)) = v {
            o.put(tag, json!({"count": c.to_string(), "method": m}));
            methods.push(format!("{tag} {m} = {c}"));
        }
    }
    o.line(format!("{what}: {value}"));
    o.line(format!("  {}", methods.join("; ")));
    if o.exit == EXIT_DISAGREEMENT {
        o.line("  DISAGREEMENT between fast path and oracle");
    }
    Ok(value)
}

/// Turns capacity errors into "not available"; other errors propagate.
fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Capacity(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn count_toral(a: &SetShape, budget: &Budget, witnesses: bool) -> Result<Output> {
    let (set, shape) = set_shape(a)?;
    let mut o = Output::new(if witnesses { "enumerate toral" } else { "count toral" });
    o.put("set", set.to_string());
    o.put("shape", shape_string(&shape));
    let fast = if shape.dim() == 2 && set.vectors().iter().all(|v| v[0].abs() <= 1) {
        match count_toral_matchings(&io_double_cover(&torus_quotient(&set, &shape)), DEFAULT_WIDTH_CAP) {
            Ok(c) => Some((c, "transfer-matrix")),
            Err(Error::Capacity(_)) | Err(Error::Structure(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let brute = optional(oracle::brute_toral_permutations(&set, &shape, budget, witnesses))?;
    let what = format!("toral permutations A={set} shape={}", shape_string(&shape));
    let brute_pair = brute.as_ref().map(|r| (r.count.clone(), r.method.tag()));
    agree(&mut o, &what, fast, brute_pair)?;
    if witnesses {
        let list = brute
            .and_then(|r| r.witnesses)
            .ok_or_else(|| Error::Capacity("witnesses need the oracle within budget".into()))?;
        let mut dumps = Vec::new();
        for p in &list {
            dumps.push(format_pattern(&p.to_pattern())?);
        }
        emit_witnesses(&mut o, dumps);
    }
    Ok(o)
}

fn emit_witnesses(o: &mut Output, dumps: Vec<String>) {
    for d in &dumps {
        o.line("");
        o.text.push_str(d);
        if !d.ends_with('\n') {
            o.text.push('\n');
        }
    }
    o.put("witnesses", dumps);
}

fn shape_string(s: &BoxShape) -> String {
    s.dims().iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn count_box(a: &SetShape, budget: &Budget) -> Result<Output> {
    let (set, shape) = set_shape(a)?;
    let mut o = Output::new("count box");
    o.put("set", set.to_string());
    o.put("shape", shape_string(&shape));
    let fast = if set == RestrictingSet::a_plus() && shape.dim() == 2 {
        let g = square_grid(&shape);
        let pos: Vec<(i64, i64)> = shape.cells().map(|c| (c[0], c[1])).collect();
        let pm = to_integer_count(&count_matchings_planar(&PlanarEmbedding::from_positions(&g, &pos)?, &EdgeWeights::unit())?)?;
        Some((&pm * &pm, "kasteleyn-squared"))
    } else {
        None
    };
    let brute = optional(FieldSearch::new(&set, &shape, SearchMode::Box).count(budget.nodes))?.map(|c| (c, "backtracking"));
    let what = format!("box permutations A={set} shape={}", shape_string(&shape));
    agree(&mut o, &what, fast, brute)?;
    Ok(o)
}

fn count_patterns(a: &SetShape, budget: &Budget, witnesses: bool) -> Result<Output> {
    let (set, shape) = set_shape(a)?;
    if shape.dim() != 2 {
        return Err(Error::Domain("patterns are counted on planar rectangles".into()));
    }
    let mut o = Output::new(if witnesses { "enumerate patterns" } else { "count patterns" });
    o.put("set", set.to_string());
    o.put("shape", shape_string(&shape));
    let what = format!("patterns A={set} shape={}", shape_string(&shape));
    let brute = optional(oracle::brute_patterns(&set, &shape, budget, witnesses))?;
    if set == RestrictingSet::a_l() || set == RestrictingSet::a_oplus() {
        let fast = if set == RestrictingSet::a_l() {
            let w = a_l_window(shape.dims()[0], shape.dims()[1])?;
            let emb = PlanarEmbedding::from_positions(&w.graph, &w.positions)?;
            Some((count_perfect_covers(&emb, &w.target)?, "cover-gadget"))
        } else {
            None
        };
        let pair = brute.as_ref().map(|p| (p.lower.clone(), p.method.tag()));
        agree(&mut o, &what, fast, pair)?;
    } else {
        let p = brute.as_ref().ok_or_else(|| Error::Capacity(format!("pattern bounds for {what} exceed the budget")))?;
        o.put("lower", p.lower.to_string());
        o.put("upper", p.upper.to_string());
        o.put("exact", p.exact().is_some());
        o.put("method", p.method.tag());
        match p.exact() {
            Some(c) => {
                o.put("count", c.to_string());
                o.line(format!("{what}: {c}"));
                o.line("  bounds meet (periodic restrictions below, local conditions above)");
            }
            None => {
                o.line(format!("{what}: between {} and {}", p.lower, p.upper));
            }
        }
    }
    if witnesses {
        let list = brute
            .and_then(|p| p.witnesses)
            .ok_or_else(|| Error::Capacity("witnesses need an exact oracle count within budget".into()))?;
        let dumps = list.iter().map(format_pattern).collect::<Result<Vec<_>>>()?;
        emit_witnesses(&mut o, dumps);
    }
    Ok(o)
}

fn count_model_patterns(a: &SetShape, model: Model, budget: &Budget) -> Result<Output> {
    let (set, shape) = set_shape(a)?;
    if shape.dim() != 2 || set.dim() != 2 {
        return Err(Error::Domain("patterns are counted on planar rectangles".into()));
    }
    let (name, p) = match model {
        Model::Injective => ("injective", oracle::brute_injective_patterns(&set, &shape, budget)?),
        _ => ("surjective", oracle::brute_surjective_patterns(&set, &shape, budget)?),
    };
    let mut o = Output::new("count patterns");
    o.put("set", set.to_string());
    o.put("shape", shape_string(&shape));
    o.put("model", name);
    o.put("lower", p.lower.to_string());
    o.put("upper", p.upper.to_string());
    o.put("exact", p.exact().is_some());
    o.put("method", p.method.tag());
    let what = format!("{name} patterns A={set} shape={}", shape_string(&shape));
    match p.exact() {
        Some(c) => {
            o.put("count", c.to_string());
            o.line(format!("{what}: {c}"));
            o.line("  every locally valid field has a region-layout extension");
        }
        None => o.line(format!("{what}: between {} and {}", p.lower, p.upper)),
    }
    Ok(o)
}

fn read_graph(path: &PathBuf) -> Result<GraphFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text)
}

fn graph_source(a: &GraphArgs) -> Result<(String, UndirectedGraph, Option<Vec<(i64, i64)>>, bool)> {
    if let Some(p) = &a.graph {
        let f = read_graph(p)?;
        return Ok((p.display().to_string(), f.graph, f.positions, false));
    }
    if let Some(s) = &a.grid {
        let shape = parse_shape(s)?;
        if shape.dim() != 2 {
            return Err(Error::Domain("grids are planar".into()));
        }
        let pos = shape.cells().map(|c| (c[0], c[1])).collect();
        return Ok((format!("grid {}", shape_string(&shape)), square_grid(&shape), Some(pos), false));
    }
    if let Some(n) = a.square_torus {
        check_side(n)?;
        return Ok((format!("square torus {n}"), square_torus(n), None, true));
    }
    if let Some(n) = a.honeycomb_torus {
        check_side(n)?;
        return Ok((format!("honeycomb torus {n}"), honeycomb_torus(n), None, true));
    }
    Err(Error::Domain("give --graph, --grid, --square-torus or --honeycomb-torus".into()))
}

fn check_side(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("torus side must be positive".into()));
    }
    Ok(())
}

fn count_matchings(a: &GraphArgs, budget: &Budget, witnesses: bool) -> Result<Output> {
    let (name, g, pos, toral) = graph_source(a)?;
    let mut o = Output::new(if witnesses { "enumerate matchings" } else { "count matchings" });
    o.put("graph", name.clone());
    let fast = if let Some(pos) = &pos {
        let emb = PlanarEmbedding::from_positions(&g, pos)?;
        Some((to_integer_count(&count_matchings_planar(&emb, &EdgeWeights::unit())?)?, "kasteleyn"))
    } else if toral {
        optional(count_toral_matchings(&g, DEFAULT_WIDTH_CAP))?.map(|c| (c, "transfer-matrix"))
    } else {
        None
    };
    let brute = optional(oracle::brute_matchings(&g, budget, witnesses))?;
    let pair = brute.as_ref().map(|r| (r.count.clone(), r.method.tag()));
    agree(&mut o, &format!("perfect matchings of {name}"), fast, pair)?;
    if witnesses {
        let list = brute
            .and_then(|r| r.witnesses)
            .ok_or_else(|| Error::Capacity("witnesses need the oracle within budget".into()))?;
        emit_witnesses(&mut o, list.iter().map(|m| m.export(&g)).collect());
    }
    Ok(o)
}

fn cover_source(a: &CoverArgs) -> Result<(String, CoverWindow)> {
    if let Some(kind) = a.window {
        let shape = parse_shape(a.shape.as_deref().ok_or_else(|| Error::Domain("--window needs --shape".into()))?)?;
        if shape.dim() != 2 {
            return Err(Error::Domain("windows are planar".into()));
        }
        let (n, m) = (shape.dims()[0], shape.dims()[1]);
        let w = match kind {
            WindowKind::Al => a_l_window(n, m)?,
            WindowKind::Z2 => square_window(n, m)?,
        };
        let tag = if kind == WindowKind::Al { "A_L" } else { "Z^2" };
        return Ok((format!("{tag} window {n},{m}"), w));
    }
    if let Some(p) = &a.graph {
        let f = read_graph(p)?;
        let positions = f
            .positions
            .ok_or_else(|| Error::Parse("cover graphs need a position on every vertex line".into()))?;
        return Ok((p.display().to_string(), CoverWindow { graph: f.graph, positions, target: f.target }));
    }
    Err(Error::Domain("give --window with --shape, or --graph".into()))
}

fn count_covers(a: &CoverArgs, budget: &Budget, witnesses: bool) -> Result<Output> {
    let (name, w) = cover_source(a)?;
    let mut o = Output::new(if witnesses { "enumerate covers" } else { "count covers" });
    o.put("graph", name.clone());
    o.put("target_size", w.target.len());
    let emb = PlanarEmbedding::from_positions(&w.graph, &w.positions)?;
    let fast = match count_perfect_covers(&emb, &w.target) {
        Ok(c) => Some((c, "cover-gadget")),
        Err(Error::Geometry(_)) => None,
        Err(e) => return Err(e),
    };
    let brute = optional(oracle::brute_covers(&w.graph, &w.target, budget, witnesses))?;
    let pair = brute.as_ref().map(|r| (r.count.clone(), r.method.tag()));
    agree(&mut o, &format!("perfect covers of {name} (|target| = {})", w.target.len()), fast, pair)?;
    if witnesses {
        let list = brute
            .and_then(|r| r.witnesses)
            .ok_or_else(|| Error::Capacity("witnesses need the oracle within budget".into()))?;
        emit_witnesses(&mut o, list.iter().map(|c| c.export(&w.graph)).collect());
    }
    Ok(o)
}

fn integral(a: &IntegralArgs) -> Result<Output> {
    let mut o = Output::new("entropy integral");
    let (label, est, set) = match (&a.set, &a.poly) {
        (Some(s), None) => {
            let set = parse_set(s)?;
            if set == RestrictingSet::a_l() {
                ("M(1 + z + w)".to_string(), entropy::a_l_integral(a.grid)?, Some(set))
            } else if set == RestrictingSet::a_plus() {
                ("M(4 - z - 1/z - w - 1/w) / 2".to_string(), entropy::a_plus_integral(a.grid)?, Some(set))
            } else {
                return Err(Error::Domain("closed-form integrands exist for AL and A+ only; use --poly".into()));
            }
        }
        (None, Some(p)) => {
            let poly = LaurentPolynomial2::parse(p)?;
            (format!("M({poly})"), entropy::mahler_measure(&poly, a.grid)?, None)
        }
        _ => return Err(Error::Domain("give exactly one of --set and --poly".into())),
    };
    o.put("integrand", label.clone());
    o.put("value", est.value);
    o.put("error", est.error);
    o.put("grid", est.grid);
    o.put("zeros", est.zeros);
    o.line(format!("{label} = {:.6} +- {:.1e}", est.value, est.error));
    o.line(format!("  grid {}, {} zero(s) excluded", est.grid, est.zeros));
    if let Some(set) = set {
        let lb = entropy::universal_lower_bound(Some(&set), a.grid)?;
        if lb.applies == Some(true) {
            o.put("lower_bound", lb.estimate.value);
            o.line(format!("  lower bound for any non-collinear A: {:.6}", lb.estimate.value));
        }
    }
    o.csv = Some(format!(
        "integrand,value,error,grid,zeros\n\"{label}\",{:.9},{:.3e},{},{}\n",
        est.value, est.error, est.grid, est.zeros
    ));
    Ok(o)
}

fn report(a: &ReportArgs, budget: &Budget) -> Result<Output> {
    let set = parse_set(&a.set)?;
    let r = entropy::entropy_report(&set, a.n_max, a.grid, budget)?;
    let mut o = Output::new("entropy report");
    if let Value::Object(m) = serde_json::to_value(&r).map_err(|e| Error::Internal(e.to_string()))? {
        o.result = m;
    }
    o.text = r.to_text();
    o.csv = Some(r.to_csv());
    Ok(o)
}

fn check(a: &CheckArgs) -> Result<Output> {
    let text = std::fs::read_to_string(&a.file).map_err(|e| Error::Parse(format!("cannot read {}: {e}", a.file.display())))?;
    let pat = parse_pattern(&text)?;
    let forbidden = a.forbidden.map(|k| match k {
        ForbiddenKind::Surjective => ForbiddenSet::surjectivity(pat.set()),
        ForbiddenKind::Collisions => ForbiddenSet::with_collisions(pat.set()),
    });
    let v = check_pattern(&pat, a.radius, forbidden.as_ref());
    let mut o = Output::new("check");
    o.put("set", pat.set().to_string());
    o.put("cells", pat.len());
    o.put("necessary", v.necessary.ok);
    o.line(format!("pattern on {} cells, A={}", pat.len(), pat.set()));
    o.line(format!(
        "necessary condition: {}",
        if v.necessary.ok { "holds".to_string() } else { v.necessary.describe() }
    ));
    if let Some((name, ok)) = &v.local {
        o.put("locally_admissible", *ok);
        o.put("forbidden_set", name.clone());
        o.line(format!("locally admissible w.r.t. {name}: {}", if *ok { "yes" } else { "no" }));
    }
    match &v.global {
        GlobalVerdict::Yes(cert) => {
            o.put("verdict", "globally admissible");
            let shape = cert.torus.shape();
            o.put("certificate", json!({"torus": shape_string(shape), "offset": fmt_point(&cert.offset)}));
            o.line("verdict: globally admissible");
            o.line(format!(
                "certificate: toral permutation on the {} torus, pattern placed at {}",
                shape_string(shape).replace(',', "x"),
                fmt_point(&cert.offset)
            ));
            o.text.push_str(&format_pattern(&cert.torus.to_pattern())?);
        }
        GlobalVerdict::Violates(_) => {
            o.put("verdict", "not globally admissible");
            o.line("verdict: not globally admissible (necessary condition fails)");
        }
        GlobalVerdict::No(ob) => {
            o.put("verdict", "not globally admissible");
            let cells: Vec<String> = ob.cells.iter().map(|c| fmt_point(c)).collect();
            let cands: Vec<String> = ob.candidates.iter().map(|c| fmt_point(c)).collect();
            o.put("obstruction", json!({"cells": cells, "candidates": cands}));
            o.line("verdict: not globally admissible");
            o.line(format!(
                "obstruction: cells {} need distinct preimages but the only candidates are {}",
                cells.join(" "),
                cands.join(" ")
            ));
        }
        GlobalVerdict::Unknown => {
            o.put("verdict", "unknown");
            o.line("verdict: unknown (no certificate and no obstruction within the radius)");
        }
    }
    Ok(o)
}

struct DiffCase {
    name: String,
    fast: Result<BigUint>,
    brute: Result<BigUint>,
}

fn oracle_corpus(quick: bool, budget: &Budget) -> Vec<DiffCase> {
    let mut cases = Vec::new();
    let max = if quick { 3 } else { 4 };
    for a in 1..=max {
        for b in a..=max {
            let shape = BoxShape::planar(a, b).unwrap();
            let g = square_grid(&shape);
            let pos: Vec<(i64, i64)> = shape.cells().map(|c| (c[0], c[1])).collect();
            cases.push(DiffCase {
                name: format!("kasteleyn grid {a}x{b}"),
                fast: PlanarEmbedding::from_positions(&g, &pos)
                    .and_then(|e| count_matchings_planar(&e, &EdgeWeights::unit()))
                    .and_then(|c| to_integer_count(&c)),
                brute: oracle::brute_matchings(&g, budget, false).map(|r| r.count),
            });
        }
    }
    for n in 1..=max {
        for (name, g) in [("square torus", square_torus(n)), ("honeycomb torus", honeycomb_torus(n))] {
            cases.push(DiffCase {
                name: format!("transfer {name} {n}"),
                fast: count_toral_matchings(&g, DEFAULT_WIDTH_CAP),
                brute: oracle::brute_matchings(&g, budget, false).map(|r| r.count),
            });
        }
    }
    let wmax = if quick { 2 } else { 3 };
    for n in 1..=wmax {
        for m in 1..=wmax {
            for (tag, w) in [("A_L", a_l_window(n, m)), ("Z^2", square_window(n, m))] {
                let w = w.unwrap();
                let fast = PlanarEmbedding::from_positions(&w.graph, &w.positions).and_then(|e| count_perfect_covers(&e, &w.target));
                cases.push(DiffCase {
                    name: format!("gadget {tag} window {n}x{m}"),
                    fast,
                    brute: oracle::brute_covers(&w.graph, &w.target, budget, false).map(|r| r.count),
                });
            }
            let shape = BoxShape::planar(n, m).unwrap();
            let w = a_l_window(n, m).unwrap();
            cases.push(DiffCase {
                name: format!("A_L patterns {n}x{m}"),
                fast: PlanarEmbedding::from_positions(&w.graph, &w.positions).and_then(|e| count_perfect_covers(&e, &w.target)),
                brute: oracle::brute_patterns(&RestrictingSet::a_l(), &shape, budget, false).map(|p| p.lower),
            });
        }
    }
    for n in 1..=wmax {
        for set in [RestrictingSet::a_l(), RestrictingSet::a_plus()] {
            let shape = BoxShape::square(n).unwrap();
            cases.push(DiffCase {
                name: format!("toral {} {n}x{n}", set.preset_name().unwrap_or("A")),
                fast: count_toral_matchings(&io_double_cover(&torus_quotient(&set, &shape)), DEFAULT_WIDTH_CAP),
                brute: oracle::brute_toral_permutations(&set, &shape, budget, false).map(|r| r.count),
            });
        }
    }
    cases
}

fn oracle_diff(a: &OracleDiffArgs, budget: &Budget) -> Result<Output> {
    let mut o = Output::new("oracle-diff");
    let mut rows = Vec::new();
    let mut csv = String::from("case,fast,oracle,status\n");
    let (mut pass, mut fail, mut skipped) = (0, 0, 0);
    for c in oracle_corpus(a.quick, budget) {
        let status = match (&c.fast, &c.brute) {
            (Ok(f), Ok(b)) if f == b => {
                pass += 1;
                "agree"
            }
            (Ok(_), Ok(_)) => {
                fail += 1;
                "DISAGREE"
            }
            (Err(Error::Capacity(_)), _) | (_, Err(Error::Capacity(_))) => {
                skipped += 1;
                "skipped"
            }
            _ => {
                fail += 1;
                "ERROR"
            }
        };
        let show = |r: &Result<BigUint>| match r {
            Ok(v) => v.to_string(),
            Err(e) => format!("error[{}]", error_kind(e)),
        };
        let (f, b) = (show(&c.fast), show(&c.brute));
        o.line(format!("{status:<8} {:<32} fast={f} oracle={b}", c.name));
        let _ = writeln!(csv, "{},{f},{b},{status}", c.name);
        rows.push(json!({"case": c.name, "fast": f, "oracle": b, "status": status}));
    }
    o.line(format!("{pass} agree, {fail} disagree, {skipped} skipped"));
    o.put("cases", rows);
    o.put("agree", pass);
    o.put("disagree", fail);
    o.put("skipped", skipped);
    o.csv = Some(csv);
    if fail > 0 {
        o.exit = EXIT_DISAGREEMENT;
    }
    Ok(o)
}
