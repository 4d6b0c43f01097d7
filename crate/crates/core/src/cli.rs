//! Command-line front end. [`run_cli`] returns captured output and an exit
//! code so that every command is testable in-process.
//!
//! Exit codes: 0 ok, 1 no match / nothing found, 2 usage or input error,
//! 3 non-integral shadow term, 4 internal invariant breach.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::arith::{format_rational, parse_rational, DualRational};
use crate::markov::{branch_sequence, generate_tree, to_dot, MarkovError, Side, TreeJson};
use crate::matching::{match_sequence, Database, MatchOptions};
use crate::recurrence::{
    builtin, integrality_report, parse_recurrence, run_spec, RunError, RunJson, SequenceRun,
    BUILTIN_NAMES,
};
use crate::verify::{run_suite, Suite, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_MATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NON_INTEGRAL: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Environment variable naming the default b-file directory.
pub const DB_ENV: &str = "SHADOWSEQ_DB";

#[derive(Debug, Parser)]
#[command(name = "shadowseq", version, about = "Shadow sequences of integer recurrences over dual numbers")]
pub struct Cli {
    /// Print a version banner on stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchSide {
    L,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Arith,
    Recurrence,
    Markov,
    Oracles,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a recurrence over dual numbers and print its shadow.
    Run {
        /// Builtin recurrence: naturals, fibonacci-cassini, catalan, naturals-alt.
        #[arg(long, conflicts_with = "rec", required_unless_present = "rec")]
        builtin: Option<String>,
        /// Recurrence text, e.g. "(a[1]^2 - 1)/a[0]".
        #[arg(long)]
        rec: Option<String>,
        /// Initial terms as re[:eps]; use --init=-1:2,3 for leading minus signs.
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        init: Vec<String>,
        #[arg(long, default_value_t = 20)]
        terms: usize,
        /// Index of the first initial term (windowed recurrences only).
        #[arg(long)]
        start: Option<i64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Generate the Markov tree with its shadow.
    Markov {
        /// Shadow initial values "α,β,γ".
        #[arg(long, default_value = "0,1,1", allow_hyphen_values = true)]
        init: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Print only the all-L or all-R branch.
        #[arg(long, value_enum)]
        branch: Option<BranchSide>,
        /// Branch length (defaults to depth + 1).
        #[arg(long, requires = "branch")]
        length: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Look up an integer sequence in the oracle registry and local b-files.
    Match {
        /// File with whitespace- or comma-separated integers; stdin if omitted.
        input: Option<PathBuf>,
        /// Directory of b-files (falls back to $SHADOWSEQ_DB).
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_shift: i64,
        /// Disallow sign-flipped matches.
        #[arg(long)]
        no_sign: bool,
        #[arg(long, default_value_t = 8)]
        min_overlap: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Check the library's invariants.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, stderr: String::new(), code: EXIT_OK }
    }

    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        stderr.push('\n');
        Self { stdout: String::new(), stderr, code: EXIT_USAGE }
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let mut out = execute(cli.command, stdin);
    if cli.verbose {
        out.stderr.insert_str(0, &format!("shadowseq {}\n", env!("CARGO_PKG_VERSION")));
    }
    out
}

pub fn execute(command: Command, stdin: &mut dyn Read) -> Outcome {
    match command {
        Command::Run { builtin, rec, init, terms, start, format } => {
            cmd_run(builtin.as_deref(), rec.as_deref(), &init, terms, start, format)
        }
        Command::Markov { init, depth, branch, length, format } => {
            cmd_markov(&init, depth, branch, length, format)
        }
        Command::Match { input, db, max_shift, no_sign, min_overlap, format } => {
            let opts = MatchOptions { max_shift, allow_sign: !no_sign, min_overlap };
            let db = db.or_else(|| std::env::var_os(DB_ENV).map(PathBuf::from));
            cmd_match(input, db, opts, format, stdin)
        }
        Command::Verify { suite, depth, terms, seed } => cmd_verify(suite, depth, terms, seed),
    }
}

/// Parses `re[:eps]`; `eps` defaults to zero.
pub fn parse_dual(text: &str) -> Option<DualRational> {
    let (re, eps) = match text.split_once(':') {
        Some((re, eps)) => (re, eps),
        None => (text, "0"),
    };
    Some(DualRational::new(parse_rational(re)?, parse_rational(eps)?))
}

pub fn cmd_run(
    builtin_name: Option<&str>,
    rec: Option<&str>,
    init: &[String],
    terms: usize,
    start: Option<i64>,
    format: OutputFormat,
) -> Outcome {
    if format == OutputFormat::Dot {
        return Outcome::usage("error: --format dot is only available for markov");
    }
    let spec = match (builtin_name, rec) {
        (Some(name), _) => match builtin(name) {
            Some(s) => s,
            None => {
                return Outcome::usage(format!(
                    "error: unknown builtin '{name}' (expected one of {})",
                    BUILTIN_NAMES.join(", ")
                ))
            }
        },
        (None, Some(text)) => match parse_recurrence(text) {
            Ok(s) => s,
            Err(e) => return Outcome::usage(format!("error: {e}")),
        },
        (None, None) => return Outcome::usage("error: one of --builtin or --rec is required"),
    };
    let spec = match start {
        Some(s) => spec.with_index_base(s),
        None => spec,
    };
    let mut duals = Vec::with_capacity(init.len());
    for item in init {
        match parse_dual(item) {
            Some(d) => duals.push(d),
            None => return Outcome::usage(format!("error: bad initial term '{item}' (expected re[:eps])")),
        }
    }
    let (run, failure) = match run_spec(&spec, &duals, terms) {
        Ok(run) => (run, None),
        Err(RunError::Step { index, source, partial }) => (*partial, Some((index, source))),
        Err(e) => return Outcome::usage(format!("error: {e}")),
    };
    let mut stdout = render_run(&run, format);
    let report = integrality_report(&run);
    let mut stderr = String::new();
    let code = if let Some((index, source)) = failure {
        let _ = writeln!(stderr, "error: evaluation stopped at n = {index}: {source}");
        EXIT_USAGE
    } else if let Some(n) = report.first_failure {
        if format == OutputFormat::Table {
            let _ = writeln!(stdout, "first non-integral shadow term at n = {n}");
        }
        let _ = writeln!(stderr, "non-integral shadow term at n = {n}");
        EXIT_NON_INTEGRAL
    } else {
        EXIT_OK
    };
    Outcome { stdout, stderr, code }
}

fn render_run(run: &SequenceRun, format: OutputFormat) -> String {
    let json = RunJson::from_run(run);
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("n,re,eps,re_int,eps_int\n");
            for t in &json.terms {
                let _ = writeln!(s, "{},{},{},{},{}", t.n, t.re, t.eps, t.re_int, t.eps_int);
            }
            s
        }
        _ => {
            let rows: Vec<Vec<String>> = json
                .terms
                .iter()
                .map(|t| {
                    let flag = if t.eps_int { "yes" } else { "NO" };
                    vec![t.n.to_string(), t.re.clone(), t.eps.clone(), flag.to_string()]
                })
                .collect();
            let mut s = format!("# {} ({})\n", run.spec.name, run.spec.description);
            s.push_str(&render_table(&["n", "a(n)", "shadow", "integral"], &rows));
            s
        }
    }
}

/// Right-aligned columns separated by two spaces.
fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> =
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}", w = *w)).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn parse_shadow_init(text: &str) -> Option<[BigInt; 3]> {
    let parts: Vec<BigInt> = text
        .split(',')
        .map(|p| p.trim().parse::<BigInt>())
        .collect::<Result<_, _>>()
        .ok()?;
    parts.try_into().ok()
}

pub fn cmd_markov(
    init: &str,
    depth: usize,
    branch: Option<BranchSide>,
    length: Option<usize>,
    format: OutputFormat,
) -> Outcome {
    let Some(shadow_init) = parse_shadow_init(init) else {
        return Outcome::usage(format!("error: bad shadow init '{init}' (expected three integers a,b,c)"));
    };
    let length = branch.map(|_| length.unwrap_or(depth + 1));
    if length == Some(0) {
        return Outcome::usage("error: --length must be at least 1");
    }
    let depth = length.map_or(depth, |m| m - 1);
    let tree = match generate_tree(&shadow_init, depth) {
        Ok(t) => t,
        Err(e @ MarkovError::IntegralityViolation { .. }) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("internal error: {e}\n"),
                code: EXIT_INTERNAL,
            }
        }
        Err(e) => {
            return Outcome { stdout: String::new(), stderr: format!("internal error: {e}\n"), code: EXIT_INTERNAL }
        }
    };

    if let (Some(side), Some(m)) = (branch, length) {
        let side = match side {
            BranchSide::L => Side::L,
            BranchSide::R => Side::R,
        };
        let seq = branch_sequence(&tree, side, m).expect("tree generated to branch length");
        let stdout = match format {
            OutputFormat::Dot => return Outcome::usage("error: --format dot renders whole trees, not branches"),
            OutputFormat::Json => {
                let v: Vec<[String; 2]> = seq.iter().map(|(r, e)| [r.to_string(), e.to_string()]).collect();
                serde_json::to_string_pretty(&serde_json::json!({
                    "shadow_init": shadow_init.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "side": side.to_string(),
                    "terms": v,
                }))
                .expect("serializable")
                    + "\n"
            }
            OutputFormat::Csv => {
                let mut s = String::from("k,re,eps\n");
                for (k, (r, e)) in seq.iter().enumerate() {
                    let _ = writeln!(s, "{k},{r},{e}");
                }
                s
            }
            OutputFormat::Table => {
                let rows: Vec<Vec<String>> = seq
                    .iter()
                    .enumerate()
                    .map(|(k, (r, e))| vec![k.to_string(), r.to_string(), e.to_string()])
                    .collect();
                render_table(&["k", "markov", "shadow"], &rows)
            }
        };
        return Outcome::ok(stdout);
    }

    let stdout = match format {
        OutputFormat::Dot => to_dot(&tree),
        OutputFormat::Json => {
            serde_json::to_string_pretty(&TreeJson::from_tree(&tree)).expect("serializable") + "\n"
        }
        OutputFormat::Csv => {
            let mut s = String::from("path,depth,x_re,x_eps,y_re,y_eps,z_re,z_eps\n");
            for n in &tree.nodes {
                let [x, y, z] = &n.triple.0;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    n.path_string(),
                    n.depth,
                    format_rational(&x.re),
                    format_rational(&x.eps),
                    format_rational(&y.re),
                    format_rational(&y.eps),
                    format_rational(&z.re),
                    format_rational(&z.eps),
                );
            }
            s
        }
        OutputFormat::Table => {
            let pair = |c: &DualRational| format!("{}/{}", format_rational(&c.re), format_rational(&c.eps));
            let rows: Vec<Vec<String>> = tree
                .nodes
                .iter()
                .map(|n| {
                    let [x, y, z] = &n.triple.0;
                    let path = if n.path.is_empty() { "-".to_string() } else { n.path_string() };
                    vec![
                        path,
                        n.depth.to_string(),
                        format_rational(&z.re),
                        format_rational(&z.eps),
                        pair(x),
                        pair(y),
                    ]
                })
                .collect();
            render_table(&["path", "depth", "markov", "shadow", "x", "y"], &rows)
        }
    };
    Outcome::ok(stdout)
}

/// Integers separated by whitespace and/or commas.
pub fn parse_integer_list(text: &str) -> Option<Vec<BigInt>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().ok())
        .collect()
}

pub fn cmd_match(
    input: Option<PathBuf>,
    db_dir: Option<PathBuf>,
    opts: MatchOptions,
    format: OutputFormat,
    stdin: &mut dyn Read,
) -> Outcome {
    if matches!(format, OutputFormat::Dot | OutputFormat::Csv) {
        return Outcome::usage("error: match supports --format table or json");
    }
    let text = match input {
        Some(path) => match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => return Outcome::usage(format!("error: {}: {e}", path.display())),
        },
        None => {
            let mut t = String::new();
            if let Err(e) = stdin.read_to_string(&mut t) {
                return Outcome::usage(format!("error: reading stdin: {e}"));
            }
            t
        }
    };
    let Some(candidate) = parse_integer_list(&text) else {
        return Outcome::usage("error: input must be a list of integers");
    };
    if candidate.len() < opts.min_overlap {
        return Outcome::usage(format!(
            "error: need at least {} integers, got {}",
            opts.min_overlap,
            candidate.len()
        ));
    }
    let db = match Database::load(db_dir.as_deref()) {
        Ok(db) => db,
        Err(e) => return Outcome::usage(format!("error: {e}")),
    };
    let report = match_sequence(&candidate, &db, &opts);
    let stdout = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("serializable") + "\n",
        _ => {
            let rows: Vec<Vec<String>> = report
                .matches
                .iter()
                .map(|m| {
                    let sign = if m.sign < 0 { "-" } else { "+" };
                    vec![m.record.clone(), m.shift.to_string(), sign.to_string(), m.overlap.to_string()]
                })
                .collect();
            let mut s = format!("# {} terms, {} matches\n", report.candidate_length, report.matches.len());
            if !rows.is_empty() {
                s.push_str(&render_table(&["record", "shift", "sign", "overlap"], &rows));
            }
            s
        }
    };
    let code = if report.matches.is_empty() { EXIT_NO_MATCH } else { EXIT_OK };
    Outcome { stdout, stderr: String::new(), code }
}

pub fn cmd_verify(suite: SuiteArg, depth: Option<usize>, terms: Option<usize>, seed: Option<u64>) -> Outcome {
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        depth: depth.unwrap_or(defaults.depth),
        terms: terms.unwrap_or(defaults.terms),
        seed: seed.unwrap_or(defaults.seed),
    };
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Arith => Suite::Arith,
        SuiteArg::Recurrence => Suite::Recurrence,
        SuiteArg::Markov => Suite::Markov,
        SuiteArg::Oracles => Suite::Oracles,
    };
    let checks = run_suite(suite, &opts);
    let mut stdout = String::new();
    for c in &checks {
        let _ = writeln!(stdout, "{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(stdout, "{} checks, {} failed", checks.len(), failed);
    Outcome { stdout, stderr: String::new(), code: if failed == 0 { EXIT_OK } else { EXIT_INTERNAL } }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Outcome {
        let mut argv = vec!["shadowseq"];
        argv.extend_from_slice(args);
        run_cli(argv, &mut std::io::empty())
    }

    #[test]
    fn dual_init_syntax() {
        assert_eq!(parse_dual("2:1"), Some(DualRational::from_ints(2, 1)));
        assert_eq!(parse_dual("5"), Some(DualRational::from_ints(5, 0)));
        assert_eq!(parse_dual("-1:-3"), Some(DualRational::from_ints(-1, -3)));
        assert!(parse_dual("1/2:3").is_some());
        assert_eq!(parse_dual("x:1"), None);
        assert_eq!(parse_dual("1:"), None);
    }

    #[test]
    fn run_naturals_table() {
        let out = cli(&["run", "--builtin", "naturals", "--init", "1:0", "2:1", "--terms", "7"]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        let shadows: Vec<&str> = out
            .stdout
            .lines()
            .skip(2)
            .map(|l| l.split_whitespace().nth(2).unwrap())
            .collect();
        assert_eq!(shadows, ["0", "1", "4", "10", "20", "35", "56"]);
    }

    #[test]
    fn run_csv_columns() {
        let out = cli(&["run", "--builtin", "catalan", "--init", "1:0,1:1", "--terms", "4", "--format", "csv"]);
        assert_eq!(out.stdout, "n,re,eps,re_int,eps_int\n0,1,0,true,true\n1,1,1,true,true\n2,2,2,true,true\n3,5,6,true,true\n");
    }

    #[test]
    fn run_usage_errors() {
        assert_eq!(cli(&["run", "--builtin", "nope", "--init", "1"]).code, EXIT_USAGE);
        assert_eq!(cli(&["run", "--rec", "a[0]/", "--init", "1"]).code, EXIT_USAGE);
        assert_eq!(cli(&["run", "--builtin", "naturals", "--init", "1:0"]).code, EXIT_USAGE);
        assert_eq!(cli(&["run", "--builtin", "naturals", "--init", "1:q", "2"]).code, EXIT_USAGE);
        assert_eq!(cli(&["run", "--builtin", "naturals", "--init", "1", "2", "--format", "dot"]).code, EXIT_USAGE);
        assert_eq!(cli(&["run", "--init", "1", "2"]).code, EXIT_USAGE);
        let zero = cli(&["run", "--rec", "a[1]/a[0]", "--init", "1:3", "0:1", "--terms", "6"]);
        assert_eq!(zero.code, EXIT_USAGE);
        assert!(zero.stderr.contains("n = 4"));
    }

    #[test]
    fn negative_inits_via_equals() {
        let out = cli(&["run", "--builtin", "naturals", "--init=-1:2,-2:0", "--terms", "3", "--format", "csv"]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert!(out.stdout.starts_with("n,re,eps,re_int,eps_int\n1,-1,2,"));
    }

    #[test]
    fn markov_zero_shadow() {
        let out = cli(&["markov", "--init", "0,0,0", "--depth", "1", "--format", "csv"]);
        assert_eq!(out.code, EXIT_OK);
        for line in out.stdout.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!((f[3], f[5], f[7]), ("0", "0", "0"));
        }
        assert_eq!(out.stdout.lines().count(), 4);
    }

    #[test]
    fn markov_errors() {
        assert_eq!(cli(&["markov", "--init", "0,1"]).code, EXIT_USAGE);
        assert_eq!(cli(&["markov", "--init", "a,b,c"]).code, EXIT_USAGE);
        assert_eq!(cli(&["markov", "--branch", "l", "--length", "0"]).code, EXIT_USAGE);
        assert_eq!(cli(&["markov", "--branch", "l", "--format", "dot"]).code, EXIT_USAGE);
        assert_eq!(cli(&["markov", "--init", "-1,2,3", "--depth", "1"]).code, EXIT_OK);
    }

    #[test]
    fn markov_dot() {
        let out = cli(&["markov", "--depth", "1", "--format", "dot"]);
        assert!(out.stdout.contains("n_L [label=\"13 / 40\"]"));
        assert!(out.stdout.contains("n_R [label=\"29 / 117\"]"));
    }

    #[test]
    fn match_from_stdin() {
        let mut input: &[u8] = b"0 1 4 10 20 35 56 84\n";
        let out = run_cli(["shadowseq", "match"], &mut input);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("oracle:tetrahedral "));
        let mut noise: &[u8] = b"7 3 91 4 4 12 8 1000 3";
        assert_eq!(run_cli(["shadowseq", "match"], &mut noise).code, EXIT_NO_MATCH);
        let mut bad: &[u8] = b"1 2 x";
        assert_eq!(run_cli(["shadowseq", "match"], &mut bad).code, EXIT_USAGE);
        let mut short: &[u8] = b"1 2 3";
        assert_eq!(run_cli(["shadowseq", "match"], &mut short).code, EXIT_USAGE);
        let mut ok: &[u8] = b"0 1 4 10 20 35 56 84";
        assert_eq!(
            run_cli(["shadowseq", "match", "--db", "/nonexistent/dir"], &mut ok).code,
            EXIT_USAGE
        );
    }

    #[test]
    fn verbose_banner_only_on_stderr() {
        let quiet = cli(&["markov", "--depth", "1"]);
        let loud = cli(&["-v", "markov", "--depth", "1"]);
        assert_eq!(quiet.stdout, loud.stdout);
        assert!(loud.stderr.starts_with("shadowseq "));
    }

    #[test]
    fn help_exits_zero() {
        let out = cli(&["--help"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("markov"));
    }

    #[test]
    fn table_alignment() {
        let t = render_table(&["a", "bb"], &[vec!["100".into(), "1".into()]]);
        assert_eq!(t, "  a  bb\n100   1\n");
    }
}
