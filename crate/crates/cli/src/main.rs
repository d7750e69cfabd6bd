//! Command-line front end: enumeration dumps, count sweeps, verification
//! reports and SVG rendering.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 usage or I/O error,
//! 3 ceiling exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rectangulations::cache::CACHE_DIR_ENV;
use rectangulations::charging::{run_scheme, Charge, Scheme};
use rectangulations::enumerate::{max_rc_by_n, DEFAULT_MAX_N, DEFAULT_ORACLE_MAX_N};
use rectangulations::io::{dump_jsonl, format_perm, parse_point_set, parse_rectangulation};
use rectangulations::render::{render_svg, RenderOptions};
use rectangulations::stats::{analyze_set, eq2_from_set, verify_recurrence, BoundReport, StatsError};
use rectangulations::symmetry::{all_permutations, is_representative, orbit};
use rectangulations::{
    enumerate_oracle, par, EnumerateError, Enumerator, Execution, PointConfig, RcCache, Rectangulation,
    RectangulationSet,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "rectangulations", version, about = "Enumerate and analyze rectangulations of point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump every rectangulation as JSONL, one canonical key per line.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Keep only members with this property, e.g. `d2=0`.
        #[arg(long)]
        filter: Option<String>,
    },
    /// CSV of rc, maximum degree and minimum d2 per permutation.
    Count {
        #[command(flatten)]
        common: Common,
        /// Only one permutation per symmetry class, with its orbit size.
        #[arg(long)]
        symmetry: bool,
    },
    /// Run exact checks and print a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Charging scheme to check.
        #[arg(long, value_enum, ignore_case = true)]
        scheme: Option<SchemeArg>,
        /// Check sum d2 = 2 sum_q rc(P - q).
        #[arg(long)]
        eq2: bool,
        /// Check max rc(n) <= 17 max rc(n-1) and rc(n) <= 17^n (needs --all-perms).
        #[arg(long)]
        recurrence: bool,
        /// Compare the enumerator with the brute-force oracle.
        #[arg(long)]
        oracle_crosscheck: bool,
        /// Write the charge ledger CSV (rectKey, point, stage, charge) here.
        #[arg(long, requires = "scheme")]
        ledger: Option<PathBuf>,
        /// Write the per-permutation sweep CSV here.
        #[arg(long, requires = "scheme")]
        sweep: Option<PathBuf>,
        /// Directory for witness files written on violations.
        #[arg(long, default_value = "witnesses")]
        witness_dir: PathBuf,
    },
    /// Draw one rectangulation as SVG.
    Render {
        #[command(flatten)]
        common: Common,
        /// One-based position in canonical-key order.
        #[arg(long, conflicts_with = "key")]
        index: Option<usize>,
        /// A serialized rectangulation.
        #[arg(long)]
        key: Option<String>,
        /// Pixels per coordinate unit.
        #[arg(long, default_value_t = 40)]
        scale: u32,
        #[arg(long)]
        no_labels: bool,
    },
    /// Brute-force enumeration, JSONL like `enumerate`.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// One-based ranks in x order, e.g. "2 4 1 3".
    #[arg(long, group = "input")]
    perm: Option<String>,
    /// File holding ranks, {"perm":[..]} or {"points":[[x,y],..]}.
    #[arg(long, group = "input")]
    points_file: Option<PathBuf>,
    /// Every permutation of length N.
    #[arg(long, group = "input", value_name = "N")]
    all_perms: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_N, value_parser = positive)]
    max_n: usize,
    #[arg(long, default_value_t = DEFAULT_ORACLE_MAX_N, value_parser = positive)]
    oracle_max_n: usize,
    /// Worker threads; 0 uses all cores, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory of the persistent rc cache.
    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
    /// Reserved; no command uses randomness.
    #[arg(long)]
    seed: Option<u64>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    A,
    B,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::A => Scheme::A,
            SchemeArg::B => Scheme::B,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Ceiling(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 2,
            Failure::Ceiling(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Ceiling(m) => f.write_str(m),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<EnumerateError> for Failure {
    fn from(e: EnumerateError) -> Self {
        match e {
            EnumerateError::CeilingExceeded { .. } => Failure::Ceiling(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<StatsError> for Failure {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::Enumerate(inner) => inner.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

/// Whether all selected assertions held.
type Verdict = bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = match &cli.command {
        Command::Enumerate { common, .. }
        | Command::Count { common, .. }
        | Command::Verify { common, .. }
        | Command::Render { common, .. }
        | Command::Oracle { common } => common.workers,
    };
    match par::with_workers(workers, || run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<Verdict, Failure> {
    match cli.command {
        Command::Enumerate { common, filter } => cmd_enumerate(&common, filter.as_deref()),
        Command::Count { common, symmetry } => cmd_count(&common, symmetry),
        Command::Verify { common, scheme, eq2, recurrence, oracle_crosscheck, ledger, sweep, witness_dir } => {
            let checks = Checks { scheme: scheme.map(Into::into), eq2, recurrence, oracle_crosscheck };
            cmd_verify(&common, checks, ledger.as_deref(), sweep.as_deref(), &witness_dir)
        }
        Command::Render { common, index, key, scale, no_labels } => {
            cmd_render(&common, index, key.as_deref(), RenderOptions { scale, labels: !no_labels })
        }
        Command::Oracle { common } => cmd_oracle(&common),
    }
}

impl Common {
    fn enumerator(&self) -> Enumerator {
        let execution = if self.workers == 1 { Execution::Sequential } else { Execution::Parallel };
        Enumerator::new(self.max_n, execution)
    }

    /// The selected point sets, in a fixed order.
    fn inputs(&self) -> Result<Vec<PointConfig>, Failure> {
        if let Some(text) = &self.perm {
            return Ok(vec![parse_point_set(text).map_err(|e| Failure::Usage(e.to_string()))?]);
        }
        if let Some(path) = &self.points_file {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            return Ok(vec![parse_point_set(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?]);
        }
        if let Some(n) = self.all_perms {
            if n == 0 {
                return Err(Failure::Usage("--all-perms needs N >= 1".into()));
            }
            if n > self.max_n {
                return Err(Failure::Ceiling(format!("n = {n} exceeds the ceiling {}", self.max_n)));
            }
            return Ok(all_permutations(n).iter().map(|p| PointConfig::from_perm(p).expect("permutation")).collect());
        }
        Err(Failure::Usage("one of --perm, --points-file or --all-perms is required".into()))
    }

    fn single_input(&self) -> Result<PointConfig, Failure> {
        let mut inputs = self.inputs()?;
        if inputs.len() != 1 {
            return Err(Failure::Usage("this command takes a single point set (--perm or --points-file)".into()));
        }
        Ok(inputs.remove(0))
    }

    fn load_cache(&self) -> Result<RcCache, Failure> {
        match &self.cache_dir {
            Some(dir) => RcCache::load(dir).map_err(|e| Failure::Io(format!("cache {}: {e}", dir.display()))),
            None => Ok(RcCache::new()),
        }
    }

    fn save_cache(&self, cache: &RcCache) -> Result<(), Failure> {
        if let Some(dir) = &self.cache_dir {
            cache.save(dir).map_err(|e| Failure::Io(format!("cache {}: {e}", dir.display())))?;
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        write_output(self.out.as_deref(), text)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Parses `d2=0`-style filters: a degree class and the exact count wanted.
fn parse_filter(spec: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("bad filter `{spec}`, expected e.g. d2=0"));
    let (lhs, rhs) = spec.split_once('=').ok_or_else(bad)?;
    let degree = lhs.trim().strip_prefix('d').and_then(|d| d.parse().ok()).ok_or_else(bad)?;
    let count = rhs.trim().parse().map_err(|_| bad())?;
    Ok((degree, count))
}

fn cmd_enumerate(common: &Common, filter: Option<&str>) -> Result<Verdict, Failure> {
    let filter = filter.map(parse_filter).transpose()?;
    let keep = |g: &Rectangulation| filter.is_none_or(|(d, c)| g.degree_histogram().count(d) == c);
    let enumerator = common.enumerator();
    let mut out = String::new();
    for config in common.inputs()? {
        let set = enumerator.backtracking(&config)?;
        out.push_str(&dump_jsonl(&set, keep));
    }
    common.emit(&out)?;
    Ok(true)
}

fn cmd_oracle(common: &Common) -> Result<Verdict, Failure> {
    let mut out = String::new();
    for config in common.inputs()? {
        let set = enumerate_oracle(&config, common.oracle_max_n)?;
        out.push_str(&dump_jsonl(&set, |_| true));
    }
    common.emit(&out)?;
    Ok(true)
}

fn cmd_count(common: &Common, symmetry: bool) -> Result<Verdict, Failure> {
    let configs: Vec<PointConfig> =
        common.inputs()?.into_iter().filter(|c| !symmetry || is_representative(c.perm())).collect();
    let inner = Enumerator { execution: Execution::Sequential, ..common.enumerator() };
    let rows = par::map(common.enumerator().execution, &configs, |c| {
        let set = inner.backtracking(c)?;
        let max_degree = set.iter().filter_map(|g| g.degree_histogram().max_degree()).max().unwrap_or(0);
        let d2_min = set.iter().map(|g| g.degree_histogram().d2()).min().unwrap_or(0);
        Ok::<_, EnumerateError>((set.len(), max_degree, d2_min))
    });
    let cache = common.load_cache()?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["perm", "rc", "maxDegree", "d2min"];
    if symmetry {
        header.push("orbitSize");
    }
    writer.write_record(&header).map_err(csv_failure)?;
    for (config, row) in configs.iter().zip(rows) {
        let (rc, max_degree, d2_min) = row?;
        cache.record(config.perm(), rc as u64);
        let mut record = vec![format_perm(config.perm()), rc.to_string(), max_degree.to_string(), d2_min.to_string()];
        if symmetry {
            record.push(orbit(config.perm()).len().to_string());
        }
        writer.write_record(&record).map_err(csv_failure)?;
    }
    common.save_cache(&cache)?;
    common.emit(&csv_string(writer)?)?;
    Ok(true)
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn csv_string(writer: csv::Writer<Vec<u8>>) -> Result<String, Failure> {
    let bytes = writer.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

fn cmd_render(
    common: &Common,
    index: Option<usize>,
    key: Option<&str>,
    opts: RenderOptions,
) -> Result<Verdict, Failure> {
    let config = Arc::new(common.single_input()?);
    let rect = match (index, key) {
        (_, Some(key)) => {
            parse_rectangulation(&config, key).map_err(|e| Failure::Usage(format!("selector not found: {e}")))?
        }
        (Some(i), None) => {
            let set = common.enumerator().backtracking(&config)?;
            if i == 0 || i > set.len() {
                return Err(Failure::Usage(format!("selector not found: index {i} outside 1..={}", set.len())));
            }
            set.get(i - 1).clone()
        }
        (None, None) => return Err(Failure::Usage("render needs --index or --key".into())),
    };
    common.emit(&render_svg(&rect, &opts))?;
    Ok(true)
}

#[derive(Clone, Copy)]
struct Checks {
    scheme: Option<Scheme>,
    eq2: bool,
    recurrence: bool,
    oracle_crosscheck: bool,
}

fn ratio_string(r: Charge) -> String {
    r.to_string()
}

fn perm_slug(perm: &[usize]) -> String {
    perm.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("-")
}

fn cmd_verify(
    common: &Common,
    checks: Checks,
    ledger_path: Option<&Path>,
    sweep_path: Option<&Path>,
    witness_dir: &Path,
) -> Result<Verdict, Failure> {
    if checks.scheme.is_none() && !checks.eq2 && !checks.recurrence && !checks.oracle_crosscheck {
        return Err(Failure::Usage("select at least one of --scheme, --eq2, --recurrence, --oracle-crosscheck".into()));
    }
    if checks.recurrence && common.all_perms.is_none() {
        return Err(Failure::Usage("--recurrence needs --all-perms N".into()));
    }
    let configs = common.inputs()?;
    let enumerator = common.enumerator();
    let inner = Enumerator { execution: Execution::Sequential, ..enumerator };
    let cache = common.load_cache()?;
    let sets: Vec<RectangulationSet> =
        par::map(enumerator.execution, &configs, |c| inner.backtracking(c)).into_iter().collect::<Result<_, _>>()?;

    let mut pass = true;
    let mut sections = serde_json::Map::new();
    let mut witness_files: Vec<String> = Vec::new();

    if let Some(scheme) = checks.scheme {
        let reports: Vec<BoundReport> = par::map(enumerator.execution, &sets, |s| analyze_set(s, &inner, &cache))
            .into_iter()
            .collect::<Result<_, _>>()?;
        let mut failures = Vec::new();
        let mut max_charge: Option<Charge> = None;
        let mut min_ratio: Option<Charge> = None;
        for r in &reports {
            let stage = match scheme {
                Scheme::A => &r.scheme_a,
                Scheme::B => &r.scheme_b,
            };
            if let Some(m) = stage.max_degree2_charge {
                max_charge = Some(max_charge.map_or(m, |x| x.max(m)));
            }
            let ratio = r.dhat2() / Charge::from_integer(r.perm.len() as i64);
            min_ratio = Some(min_ratio.map_or(ratio, |x| x.min(ratio)));
            if !r.scheme_pass(scheme) {
                let name = format!("scheme-{}-{}.json", scheme_name(scheme), perm_slug(&r.perm));
                let path = write_witness(witness_dir, &name, &serde_json::to_value(r).expect("report serializes"))?;
                witness_files.push(path);
                let violations: Vec<Value> = match scheme {
                    Scheme::A => r.preimages.violations.iter().map(|v| json!(v)).collect(),
                    Scheme::B => r.quarter.violations.iter().map(|v| json!(v)).collect(),
                };
                failures.push(json!({
                    "perm": r.perm,
                    "failed_bounds": r.failed_bounds(),
                    "violation_count": violations.len(),
                    "violations": violations.into_iter().take(10).collect::<Vec<_>>(),
                    "max_charge_witness": stage.witness,
                    "max_charge_point": stage.witness_point,
                }));
            }
        }
        let ok = failures.is_empty();
        pass &= ok;
        sections.insert(
            "scheme".into(),
            json!({
                "scheme": scheme_name(scheme),
                "pass": ok,
                "perms": reports.len(),
                "maxCharge": max_charge.map(ratio_string),
                "bound": match scheme { Scheme::A => "9", Scheme::B => "17/2" },
                "minDhat2OverN": min_ratio.map(ratio_string),
                "failures": failures,
            }),
        );
        if let Some(path) = sweep_path {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(BoundReport::csv_header()).map_err(csv_failure)?;
            for r in &reports {
                w.write_record(r.csv_record()).map_err(csv_failure)?;
            }
            write_output(Some(path), &csv_string(w)?)?;
        }
        if let Some(path) = ledger_path {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["rectKey", "point", "stage", "charge"]).map_err(csv_failure)?;
            for set in &sets {
                let run = run_scheme(set, scheme, enumerator.execution).map_err(|e| Failure::Usage(e.to_string()))?;
                for stage in
                    [Some(&run.initial), Some(&run.after_trim), run.after_quarter.as_ref()].into_iter().flatten()
                {
                    for row in stage.rows(set) {
                        w.write_record(&row).map_err(csv_failure)?;
                    }
                }
            }
            write_output(Some(path), &csv_string(w)?)?;
        }
    }

    if checks.eq2 {
        let results: Vec<_> = par::map(enumerator.execution, &sets, |s| eq2_from_set(s, &inner, &cache))
            .into_iter()
            .collect::<Result<_, _>>()?;
        let ok = results.iter().all(|r| r.equal);
        pass &= ok;
        let rows: Vec<Value> = sets
            .iter()
            .zip(&results)
            .map(|(s, r)| json!({ "perm": s.config().perm(), "lhs": r.lhs, "rhs": r.rhs, "equal": r.equal }))
            .collect();
        let mut section = json!({ "pass": ok, "results": rows });
        if let [only] = results.as_slice() {
            section["lhs"] = json!(only.lhs);
            section["rhs"] = json!(only.rhs);
        }
        sections.insert("eq2".into(), section);
    }

    if checks.recurrence {
        let n = common.all_perms.expect("checked above");
        let maxima = max_rc_by_n(n, &inner, &cache)?;
        let rows: Vec<_> = (1..=n).map(|m| verify_recurrence(&maxima, m, None)).collect::<Result<_, _>>()?;
        let ok = rows.iter().all(|r| r.within_factor_17 && r.within_17_pow_n);
        pass &= ok;
        sections.insert("recurrence".into(), json!({ "pass": ok, "rows": rows }));
    }

    if checks.oracle_crosscheck {
        let mut mismatches = Vec::new();
        let mut checked = 0;
        for set in &sets {
            let config = set.config();
            if config.len() > common.oracle_max_n {
                return Err(Failure::Ceiling(format!(
                    "oracle ceiling {} is below n = {}",
                    common.oracle_max_n,
                    config.len()
                )));
            }
            let oracle = enumerate_oracle(config, common.oracle_max_n)?;
            checked += 1;
            if oracle.keys() != set.keys() {
                let name = format!("oracle-{}.json", perm_slug(config.perm()));
                let only_enum: Vec<&str> =
                    set.keys().iter().filter(|k| !oracle.contains(k)).map(|k| k.as_str()).collect();
                let only_oracle: Vec<&str> =
                    oracle.keys().iter().filter(|k| !set.contains(k)).map(|k| k.as_str()).collect();
                let witness =
                    json!({ "perm": config.perm(), "only_enumerator": only_enum, "only_oracle": only_oracle });
                witness_files.push(write_witness(witness_dir, &name, &witness)?);
                mismatches.push(json!(config.perm()));
            }
        }
        let ok = mismatches.is_empty();
        pass &= ok;
        sections
            .insert("oracle_crosscheck".into(), json!({ "pass": ok, "checked": checked, "mismatches": mismatches }));
    }

    common.save_cache(&cache)?;
    let report = json!({
        "pass": pass,
        "perms": configs.len(),
        "checks": sections,
        "witness_files": witness_files,
    });
    common.emit(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    Ok(pass)
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::A => "A",
        Scheme::B => "B",
    }
}

fn write_witness(dir: &Path, name: &str, value: &Value) -> Result<String, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).expect("witness serializes"))
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(path.display().to_string())
}
