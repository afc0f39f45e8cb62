use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use semirec::catalogue::{build_example, manifest, run_manifest, ExampleParams, Grid, DEFAULT_DEPTH, NAMES};
use semirec::classify::{
    chain_ball, classify_chain_point, classify_map_point, classify_semigroup_point, r_function, ClassifyConfig, Mode,
    RecurrenceVerdict,
};
use semirec::combinatorics::{cover_multimap, l1_exhaustive, l1_search, verify_witness, MultivaluedMap};
use semirec::geometry::{Interval, IntervalSet, Rational};
use semirec::maps::{GeneratorSet, PiecewiseMap, Word};
use semirec::markov::{MarkovChain, McConfig};
use semirec::measures::{
    bin, chain_return_sums, naive_generator_sums, naive_sequence_sums, poincare_partial_sums, stationary_components,
    ulam_matrix, Measure, SeriesReport,
};
use semirec::semigroup::{kappa_csv, kappa_mc, kappa_sequence, rebase_generators};
use semirec::Limits;

use crate::acceptance;
use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "semirec", version, about = "Exact finite-horizon recurrence analysis for semigroups of interval maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Serialize, Debug, Clone)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Catalogue entries with their generator counts and manifest sizes.
    ListExamples(ListArgs),
    /// Expected-property manifest of one catalogue entry, optionally executed.
    Manifest(ManifestArgs),
    /// Recurrence verdicts for a map, a chain or a semigroup at one or more points.
    Classify(ClassifyArgs),
    /// Partial sums of return series.
    Series(SeriesArgs),
    /// Ulam matrix on equal cells and its stationary components.
    Ulam(UlamArgs),
    /// Trajectory proportions of words landing in a set.
    Kappa(KappaArgs),
    /// Bracket for the largest radius whose ball misses its forward images.
    RFunction(RFunctionArgs),
    /// Generators replaced by compositions along given words.
    Rebase(RebaseArgs),
    /// Return witnesses for finite multivalued maps.
    LemmaL1(LemmaArgs),
    /// Runs the acceptance criteria and prints one PASS/FAIL line each.
    Acceptance(AcceptanceArgs),
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SubjectArg {
    Map,
    Chain,
    Semigroup,
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Poincare,
    ChainReturn,
    Naive,
}

fn rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: semirec::Error| e.to_string())
}

fn measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: semirec::Error| e.to_string())
}

fn word(s: &str) -> Result<Word, String> {
    Word::parse(s).map_err(|e| e.to_string())
}

fn grid(s: &str) -> Result<Grid, String> {
    let (kind, n) = s.split_once(':').ok_or_else(|| format!("grid `{s}` is not nodes:N or midpoints:N"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad grid size in `{s}`"))?;
    if n == 0 {
        return Err("grid size must be positive".into());
    }
    match kind.trim() {
        "nodes" => Ok(Grid::Nodes(n)),
        "midpoints" => Ok(Grid::Midpoints(n)),
        other => Err(format!("unknown grid kind `{other}`")),
    }
}

fn interval(s: &str) -> Result<Interval, String> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        return Ok(Interval::point(rational(inner)?));
    }
    let (lo_closed, rest) = match s.chars().next() {
        Some('[') => (true, &s[1..]),
        Some('(') => (false, &s[1..]),
        _ => {
            let (a, b) = s.split_once(',').ok_or_else(|| format!("`{s}` is not an interval"))?;
            return Interval::checked(rational(a)?, rational(b)?, true, true).map_err(|e| e.to_string());
        }
    };
    let (hi_closed, body) = if let Some(b) = rest.strip_suffix(']') {
        (true, b)
    } else if let Some(b) = rest.strip_suffix(')') {
        (false, b)
    } else {
        return Err(format!("`{s}` lacks a closing bracket"));
    };
    let (a, b) = body.split_once(',').ok_or_else(|| format!("`{s}` is not an interval"))?;
    Interval::checked(rational(a)?, rational(b)?, lo_closed, hi_closed).map_err(|e| e.to_string())
}

/// `lo,hi` (closed), bracket notation such as `[0,1/2)`, `{p}`, or a union
/// of those joined by `;` or `∪`; `empty` for the empty set.
pub fn interval_set(s: &str) -> Result<IntervalSet, String> {
    let s = s.trim();
    if s == "empty" || s == "∅" {
        return Ok(IntervalSet::empty());
    }
    let parts = s.split([';', '∪']).map(interval).collect::<Result<Vec<_>, _>>()?;
    Ok(IntervalSet::from_intervals(parts))
}

/// Where the generators come from.
#[derive(Args, Serialize, Debug, Clone)]
pub struct Source {
    /// Catalogue entry, see `list-examples`.
    #[arg(long, conflicts_with = "map_file")]
    pub example: Option<String>,
    /// JSON file holding one map, a list of maps or `{"generators": [...]}`.
    #[arg(long)]
    pub map_file: Option<PathBuf>,
    /// Truncation depth for the infinite partitions.
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: u32,
    /// Slope parameter of the circle family.
    #[arg(long, default_value = "1", value_parser = rational)]
    pub slope: Rational,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapFile {
    Set { generators: Vec<PiecewiseMap> },
    Many(Vec<PiecewiseMap>),
    One(PiecewiseMap),
}

impl Source {
    pub fn generators(&self) -> CliResult<GeneratorSet> {
        match (&self.example, &self.map_file) {
            (Some(name), None) => {
                let params = ExampleParams { depth: self.depth, slope: self.slope.clone() };
                Ok(build_example(name, &params)?)
            }
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                let parsed: MapFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("bad map file {}: {e}", path.display())))?;
                let maps = match parsed {
                    MapFile::Set { generators } | MapFile::Many(generators) => generators,
                    MapFile::One(m) => vec![m],
                };
                Ok(GeneratorSet::new(maps)?)
            }
            _ => Err(CliError::Config("give exactly one of --example and --map-file".into())),
        }
    }
}

/// Overrides of the default resource limits.
#[derive(Args, Serialize, Debug, Clone, Default)]
pub struct LimitArgs {
    #[arg(long)]
    pub bit_cap: Option<u64>,
    #[arg(long)]
    pub atom_budget: Option<usize>,
    #[arg(long)]
    pub piece_budget: Option<usize>,
    #[arg(long)]
    pub set_budget: Option<usize>,
    #[arg(long)]
    pub work_budget: Option<u64>,
}

impl LimitArgs {
    pub fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            bit_cap: self.bit_cap.unwrap_or(d.bit_cap),
            atom_budget: self.atom_budget.unwrap_or(d.atom_budget),
            piece_budget: self.piece_budget.unwrap_or(d.piece_budget),
            set_budget: self.set_budget.unwrap_or(d.set_budget),
            work_budget: self.work_budget.unwrap_or(d.work_budget),
        }
    }
}

/// Monte Carlo settings; both are required in mc mode.
#[derive(Args, Serialize, Debug, Clone)]
pub struct McArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

impl McArgs {
    fn config(&self) -> CliResult<Option<McConfig>> {
        match self.mode {
            ModeArg::Exact => Ok(None),
            ModeArg::Mc => match (self.seed, self.samples) {
                (Some(seed), Some(samples)) if samples > 0 => Ok(Some(McConfig { seed, samples })),
                _ => Err(CliError::Config("mc mode needs --seed and a positive --samples".into())),
            },
        }
    }
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct ListArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct ManifestArgs {
    pub name: String,
    /// Execute every claim and report the observed values.
    #[arg(long)]
    pub run: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub limits: LimitArgs,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value = "map")]
    pub subject: SubjectArg,
    /// 1-based generator for map subjects.
    #[arg(long, default_value_t = 1)]
    pub generator: usize,
    /// Comma-separated points.
    #[arg(long, value_delimiter = ',', value_parser = rational, required_unless_present = "grid")]
    pub x: Vec<Rational>,
    /// `nodes:N` for j/N, j = 0..=N, or `midpoints:N` for (2j+1)/2N.
    #[arg(long, value_parser = grid, conflicts_with = "x")]
    pub grid: Option<Grid>,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    #[arg(long)]
    pub horizon: usize,
    /// Generator weights; uniform when omitted.
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    pub p: Vec<Rational>,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    /// Ball points for the weak-uniform estimate; 0 skips it.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Returns needed in the window for a uniform map certificate.
    #[arg(long)]
    pub r_min: Option<usize>,
    /// Window-minimum threshold for chains and semigroups.
    #[arg(long, value_parser = rational)]
    pub threshold: Option<Rational>,
    #[command(flatten)]
    #[serde(flatten)]
    pub limits: LimitArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct SeriesArgs {
    #[arg(value_enum)]
    pub kind: SeriesKind,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// 1-based generator for `poincare`.
    #[arg(long, default_value_t = 1)]
    pub generator: usize,
    /// `lebesgue`, `dirac:p/q` or `density:w1,w2,...`.
    #[arg(long, default_value = "lebesgue", value_parser = measure)]
    pub measure: Measure,
    #[arg(long, value_parser = interval_set)]
    pub set: IntervalSet,
    /// Number of terms; `naive` with `--sequence` uses the sequence length.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    pub p: Vec<Rational>,
    /// 1-based index sequence for `naive`, e.g. `1,2,2,1`.
    #[arg(long, value_parser = word)]
    pub sequence: Option<Word>,
    /// Also write `n partial_sum` rows to this file.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub limits: LimitArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct UlamArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    /// Number of equal cells, of the form 2^a 3^b.
    #[arg(long)]
    pub bins: usize,
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    pub p: Vec<Rational>,
    /// Power-iteration residual tolerance.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Include the nonzero entries in the report.
    #[arg(long)]
    pub matrix: bool,
    /// Write the matrix in Matrix Market format to this file.
    #[arg(long)]
    pub matrix_market: Option<PathBuf>,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct KappaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, value_parser = rational)]
    pub x: Rational,
    /// Target set; defaults to the open ball of radius `--eps` around x.
    #[arg(long, value_parser = interval_set, required_unless_present = "eps", conflicts_with = "eps")]
    pub set: Option<IntervalSet>,
    #[arg(long, value_parser = rational)]
    pub eps: Option<Rational>,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub limits: LimitArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct RFunctionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 1)]
    pub generator: usize,
    #[arg(long, value_parser = rational)]
    pub x: Rational,
    #[arg(long, default_value_t = 50)]
    pub horizon: usize,
    #[arg(long, default_value = "1/65536", value_parser = rational)]
    pub tol: Rational,
    #[command(flatten)]
    #[serde(flatten)]
    pub limits: LimitArgs,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct RebaseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    pub p: Vec<Rational>,
    /// 1-based words separated by `;`, e.g. `1,1;1,2;2,1;2,2`.
    #[arg(long, value_delimiter = ';', value_parser = word, required = true)]
    pub words: Vec<Word>,
    #[command(flatten)]
    #[serde(flatten)]
    pub limits: LimitArgs,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct LemmaArgs {
    /// Check every multivalued map on M elements.
    #[arg(long, conflicts_with_all = ["images", "cover_bins"])]
    pub exhaustive: Option<usize>,
    /// One map as 1-based image lists, e.g. `2;1,3;3`.
    #[arg(long, conflicts_with = "cover_bins")]
    pub images: Option<String>,
    /// Map induced by a generator set on this many equal cells.
    #[arg(long)]
    pub cover_bins: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: Source,
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    pub p: Vec<Rational>,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct AcceptanceArgs {
    /// Run only these criteria (1-based); all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub criterion: Vec<usize>,
}

/// Text for standard output plus whether a check inside the run failed.
pub struct Report {
    pub stdout: String,
    pub failed: bool,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Report { stdout, failed: false }
    }
}

fn envelope(cmd: &Command, result: Value) -> CliResult<String> {
    let config = serde_json::to_value(cmd).map_err(|e| CliError::Config(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&json!({ "config": config, "result": result }))
        .map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Config(e.to_string()))
}

fn probs(g: &GeneratorSet, p: &[Rational]) -> Vec<Rational> {
    if p.is_empty() {
        vec![Rational::new(1, g.len() as i64); g.len()]
    } else {
        p.to_vec()
    }
}

fn pick(g: &GeneratorSet, one_based: usize) -> CliResult<&PiecewiseMap> {
    if one_based == 0 || one_based > g.len() {
        return Err(CliError::Config(format!("generator {one_based} outside 1..={}", g.len())));
    }
    Ok(g.get(one_based - 1))
}

fn write_file(path: &PathBuf, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn run(cmd: &Command) -> CliResult<Report> {
    match cmd {
        Command::ListExamples(a) => list_examples(cmd, a),
        Command::Manifest(a) => {
            let m = manifest(&a.name)?;
            let mut result = json!({ "manifest": to_value(&m)? });
            if a.run {
                let results = run_manifest(&m, &a.limits.limits())?;
                let failed = results.iter().any(|r| !r.passed);
                result["results"] = to_value(&results)?;
                return Ok(Report { stdout: envelope(cmd, result)?, failed });
            }
            Ok(Report::ok(envelope(cmd, result)?))
        }
        Command::Classify(a) => classify(cmd, a),
        Command::Series(a) => series(cmd, a),
        Command::Ulam(a) => ulam(cmd, a),
        Command::Kappa(a) => kappa_cmd(cmd, a),
        Command::RFunction(a) => {
            let g = a.source.generators()?;
            let br = r_function(pick(&g, a.generator)?, &a.x, a.horizon, &a.tol, &a.limits.limits())?;
            Ok(Report::ok(envelope(cmd, to_value(&br)?)?))
        }
        Command::Rebase(a) => {
            let g = a.source.generators()?;
            let (h, p) = rebase_generators(&g, &probs(&g, &a.p), &a.words, &a.limits.limits())?;
            Ok(Report::ok(envelope(cmd, json!({ "generators": to_value(&h.maps())?, "p": to_value(&p)? }))?))
        }
        Command::LemmaL1(a) => lemma(cmd, a),
        Command::Acceptance(a) => {
            let ids: Vec<usize> = if a.criterion.is_empty() { (1..=acceptance::COUNT).collect() } else { a.criterion.clone() };
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > acceptance::COUNT) {
                return Err(CliError::Config(format!("criterion {bad} outside 1..={}", acceptance::COUNT)));
            }
            let mut out = String::new();
            let mut failed = false;
            for id in ids {
                let o = acceptance::run_criterion(id);
                failed |= !o.passed;
                let _ = writeln!(out, "{}", o.line());
            }
            Ok(Report { stdout: out, failed })
        }
    }
}

fn list_examples(cmd: &Command, a: &ListArgs) -> CliResult<Report> {
    let rows = NAMES
        .iter()
        .map(|(name, _)| manifest(name))
        .collect::<semirec::Result<Vec<_>>>()?;
    if a.format == Format::Csv {
        let mut s = String::from("name,kind,generators,depth,slope,claims,discrepancies\n");
        for m in &rows {
            let kind = serde_json::to_value(m.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                m.name,
                kind,
                m.generators,
                m.params.depth,
                m.params.slope,
                m.claims.len(),
                m.discrepancies.len()
            );
        }
        return Ok(Report::ok(s));
    }
    let list: Vec<Value> = rows
        .iter()
        .map(|m| {
            json!({
                "name": m.name,
                "kind": m.kind,
                "generators": m.generators,
                "params": m.params,
                "claims": m.claims.len(),
                "discrepancies": m.discrepancies.len(),
            })
        })
        .collect();
    Ok(Report::ok(envelope(cmd, Value::Array(list))?))
}

fn classify(cmd: &Command, a: &ClassifyArgs) -> CliResult<Report> {
    let g = a.source.generators()?;
    let points = match &a.grid {
        Some(grid) => grid.points(),
        None => a.x.clone(),
    };
    let mut cfg = ClassifyConfig::new(a.eps.clone(), a.horizon).with_limits(a.limits.limits());
    if let Some(k) = a.grid_points {
        cfg = cfg.with_grid(k);
    }
    if let Some(r) = a.r_min {
        cfg.r_min = r;
    }
    if let Some(t) = &a.threshold {
        cfg = cfg.with_threshold(t.clone());
    }
    if let Some(mc) = a.mc.config()? {
        if a.subject == SubjectArg::Map {
            return Err(CliError::Config("mc mode applies to chain and semigroup subjects".into()));
        }
        cfg = cfg.with_mode(Mode::Mc(mc));
    }
    let p = probs(&g, &a.p);
    let chain = MarkovChain::new(g.clone(), p.clone())?;
    let map = match a.subject {
        SubjectArg::Map => Some(pick(&g, a.generator)?),
        _ => None,
    };
    let verdicts = points
        .par_iter()
        .map(|x| match a.subject {
            SubjectArg::Map => classify_map_point(map.expect("map subject"), x, &cfg),
            SubjectArg::Chain => classify_chain_point(&chain, x, &cfg),
            SubjectArg::Semigroup => classify_semigroup_point(&g, &p, x, &cfg),
        })
        .collect::<semirec::Result<Vec<RecurrenceVerdict>>>()?;
    if a.format == Format::Csv {
        let mut s = String::from("x,recurrent_time,weak_time,uniform_value,uniform_certified,weak_uniform_value,returns\n");
        let opt = |t: Option<usize>| t.map(|v| v.to_string()).unwrap_or_default();
        for v in &verdicts {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                v.x,
                opt(v.recurrent.time()),
                opt(v.weak.time()),
                v.uniform_estimate.as_ref().map(|u| u.value.to_string()).unwrap_or_default(),
                v.uniform_certified(),
                v.weak_uniform_estimate.as_ref().map(|u| u.value.to_string()).unwrap_or_default(),
                v.return_times.len()
            );
        }
        return Ok(Report::ok(s));
    }
    let count = |f: &dyn Fn(&RecurrenceVerdict) -> bool| verdicts.iter().filter(|v| f(v)).count();
    let summary = json!({
        "points": verdicts.len(),
        "recurrent": count(&|v| v.recurrent.is_certified()),
        "weak": count(&|v| v.weak.is_certified()),
        "uniform": count(&|v| v.uniform_certified()),
    });
    Ok(Report::ok(envelope(cmd, json!({ "summary": summary, "verdicts": to_value(&verdicts)? }))?))
}

fn series(cmd: &Command, a: &SeriesArgs) -> CliResult<Report> {
    let g = a.source.generators()?;
    let limits = a.limits.limits();
    let need_n = || a.n.ok_or_else(|| CliError::Config("--n is required".into()));
    let reports: Vec<SeriesReport> = match a.kind {
        SeriesKind::Poincare => vec![poincare_partial_sums(pick(&g, a.generator)?, &a.measure, &a.set, need_n()?, &limits)?],
        SeriesKind::ChainReturn => {
            let chain = MarkovChain::new(g.clone(), probs(&g, &a.p))?;
            vec![chain_return_sums(&chain, &a.measure, &a.set, need_n()?, &limits)?]
        }
        SeriesKind::Naive => match &a.sequence {
            Some(w) => vec![naive_sequence_sums(&g, &a.measure, &a.set, w, &limits)?],
            None => naive_generator_sums(&g, &a.measure, &a.set, need_n()?, &limits)?,
        },
    };
    if let Some(path) = &a.plot {
        let mut s = String::new();
        for (k, r) in reports.iter().enumerate() {
            if k > 0 {
                s.push_str("\n\n");
            }
            for (i, v) in r.partial_sums.iter().enumerate() {
                let _ = writeln!(s, "{} {}", r.start + i, v.to_f64());
            }
        }
        write_file(path, &s)?;
    }
    if a.format == Format::Csv {
        let mut s = String::from("series,n,term,partial_sum\n");
        for (k, r) in reports.iter().enumerate() {
            for (i, (t, ps)) in r.terms.iter().zip(&r.partial_sums).enumerate() {
                let _ = writeln!(s, "{},{},{},{}", k + 1, r.start + i, t, ps);
            }
        }
        return Ok(Report::ok(s));
    }
    let result = if reports.len() == 1 && !(a.kind == SeriesKind::Naive && a.sequence.is_none()) {
        to_value(&reports[0])?
    } else {
        json!({ "generators": to_value(&reports)? })
    };
    Ok(Report::ok(envelope(cmd, result)?))
}

fn ulam(cmd: &Command, a: &UlamArgs) -> CliResult<Report> {
    let g = a.source.generators()?;
    let chain = MarkovChain::new(g.clone(), probs(&g, &a.p))?;
    let m = ulam_matrix(&chain, a.bins)?;
    if let Some(path) = &a.matrix_market {
        write_file(path, &m.to_matrix_market())?;
    }
    let comps = stationary_components(&m, a.tol)?;
    let components: Vec<Value> = comps
        .iter()
        .map(|c| {
            let lo = bin(c.support[0], a.bins);
            let hi = bin(c.support[c.support.len() - 1], a.bins);
            let u = 1.0 / c.values.len() as f64;
            let deviation = c.values.iter().map(|v| (v - u).abs()).fold(0.0, f64::max);
            Ok(json!({
                "support": c.support,
                "hull": [lo.lo().to_string(), hi.hi().to_string()],
                "weights": to_value(&c.weights)?,
                "residual": c.residual,
                "iterations": c.iterations,
                "uniform_deviation": deviation,
            }))
        })
        .collect::<CliResult<_>>()?;
    let mut result = json!({
        "bins": a.bins,
        "nnz": m.nnz(),
        "stochastic": m.is_stochastic(),
        "components": components,
    });
    if a.matrix {
        let entries: Vec<Value> = m
            .rows()
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| json!([i, j, v.to_string()])))
            .collect();
        result["entries"] = Value::Array(entries);
    }
    Ok(Report::ok(envelope(cmd, result)?))
}

fn kappa_cmd(cmd: &Command, a: &KappaArgs) -> CliResult<Report> {
    let g = a.source.generators()?;
    let limits = a.limits.limits();
    let set = match (&a.set, &a.eps) {
        (Some(s), _) => s.clone(),
        (None, Some(eps)) => chain_ball(&g, &a.x, eps)?,
        (None, None) => return Err(CliError::Config("give --set or --eps".into())),
    };
    if let Some(mc) = a.mc.config()? {
        let (hits, samples) = kappa_mc(&g, &a.x, &set, a.n, mc, &limits)?;
        let estimate = Rational::new(hits as i64, samples as i64);
        if a.format == Format::Csv {
            return Ok(Report::ok(format!("n,hits,samples,estimate\n{},{hits},{samples},{estimate}\n", a.n)));
        }
        let result = json!({ "set": to_value(&set)?, "n": a.n, "hits": hits, "samples": samples, "estimate": estimate });
        return Ok(Report::ok(envelope(cmd, result)?));
    }
    let rows = kappa_sequence(&g, &a.x, &set, a.n, &limits)?;
    if a.format == Format::Csv {
        return Ok(Report::ok(kappa_csv(&rows)));
    }
    Ok(Report::ok(envelope(cmd, json!({ "set": to_value(&set)?, "rows": to_value(&rows)? }))?))
}

fn parse_images(s: &str) -> CliResult<MultivaluedMap> {
    let images = s
        .split(';')
        .map(|part| {
            part.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .ok()
                        .filter(|&j| j > 0)
                        .map(|j| j - 1)
                        .ok_or_else(|| CliError::Config(format!("bad image element `{t}`")))
                })
                .collect::<CliResult<Vec<usize>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(MultivaluedMap::from_images(&images)?)
}

fn lemma(cmd: &Command, a: &LemmaArgs) -> CliResult<Report> {
    if let Some(m) = a.exhaustive {
        let r = l1_exhaustive(m)?;
        return Ok(Report::ok(envelope(cmd, to_value(&r)?)?));
    }
    let g = match (&a.images, a.cover_bins) {
        (Some(s), None) => parse_images(s)?,
        (None, Some(k)) => {
            if k == 0 {
                return Err(CliError::Config("--cover-bins must be positive".into()));
            }
            let gens = a.source.generators()?;
            let chain = MarkovChain::new(gens.clone(), probs(&gens, &a.p))?;
            let cover: Vec<IntervalSet> = (0..k).map(|j| IntervalSet::from_interval(bin(j, k))).collect();
            cover_multimap(&chain, &cover)?
        }
        _ => return Err(CliError::Config("give one of --exhaustive, --images and --cover-bins".into())),
    };
    let w = l1_search(&g);
    let result = json!({
        "map": to_value(&g)?,
        "element": w.element + 1,
        "n": w.n,
        "verified": verify_witness(&g, w),
    });
    Ok(Report::ok(envelope(cmd, result)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use semirec::geometry::q;

    #[test]
    fn set_notation() {
        assert_eq!(interval_set("0,0").unwrap(), IntervalSet::point(q(0, 1)));
        assert_eq!(interval_set("{1/3}").unwrap(), IntervalSet::point(q(1, 3)));
        let s = interval_set("[0,1/4) ; (1/2,1]").unwrap();
        assert!(s.contains(&q(0, 1)) && !s.contains(&q(1, 4)) && !s.contains(&q(1, 2)) && s.contains(&q(1, 1)));
        assert_eq!(interval_set("[0,1/2]∪[1/2,1]").unwrap(), IntervalSet::unit());
        assert!(interval_set("empty").unwrap().is_empty());
        assert!(interval_set("[0,0.5]").is_err());
        assert!(interval_set("[1,0]").is_err());
        assert!(interval_set("[0,1").is_err());
    }

    #[test]
    fn grid_notation() {
        assert_eq!(grid("nodes:256").unwrap(), Grid::Nodes(256));
        assert_eq!(grid("midpoints:3").unwrap().points(), vec![q(1, 6), q(1, 2), q(5, 6)]);
        assert!(grid("nodes:0").is_err() && grid("lattice:4").is_err() && grid("nodes").is_err());
    }

    #[test]
    fn exit_code_classes() {
        assert_eq!(CliError::from(semirec::Error::Budget("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(semirec::Error::BitCap { bits: 9, cap: 8 }).exit_code(), 3);
        assert_eq!(CliError::from(semirec::Error::Parse("x".into())).exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    }
}
