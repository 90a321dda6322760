//! The `tagmap` command line.
//!
//! Exit statuses: 0 success, 1 parse or type errors, 2 warnings under
//! `--strict`, 3 I/O failures, 4 retagging met unknown tags.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::diag::Diagnostic;
use crate::maprules::{parse_rules, RuleSet};
use crate::mtree::{build_mtree, MTree};
use crate::resolver::{render_query, resolve};
use crate::retagger::{retag_stream, CorpusFormat};
use crate::specexpr::{parse_spec, typecheck};
use crate::typegraph::{parse_tagset_definition, TypeGraph};

pub const OK: i32 = 0;
pub const ERRORS: i32 = 1;
pub const STRICT_WARNINGS: i32 = 2;
pub const IO_FAILURE: i32 = 3;
pub const RETAG_HOLES: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Compile tagset and rules and print a summary.
    Compile,
    /// Compile and report diagnostics only.
    Check,
    /// Translate specifications into physical tag patterns.
    Query,
    /// Rewrite a tagged corpus into standard readings.
    Retag,
    /// Print the mapping tree and all diagnostics.
    Explain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Slash,
    Tsv,
}

impl From<Format> for CorpusFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Slash => CorpusFormat::Slash,
            Format::Tsv => CorpusFormat::Tsv,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tagmap",
    about = "Map physical part-of-speech tagsets onto a typed standard tagset"
)]
pub struct Config {
    #[arg(value_enum)]
    pub command: Command,
    /// Tagset definition file.
    #[arg(long)]
    pub tagset: PathBuf,
    /// Mapping rule file.
    #[arg(long)]
    pub rules: PathBuf,
    /// Corpus to retag; standard input when absent.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "slash")]
    pub format: Format,
    /// Treat mapping warnings as failures.
    #[arg(long)]
    pub strict: bool,
    /// File with one query per line.
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Write data output here instead of standard output.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    /// A single query; without it and `--batch`, queries are read
    /// interactively.
    pub spec: Option<String>,
}

struct Failure(i32);

type Step<T> = Result<T, Failure>;

fn read(path: &Path, err: &mut dyn Write) -> Step<String> {
    fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        Failure(IO_FAILURE)
    })
}

fn report(path: &Path, diags: &[Diagnostic], err: &mut dyn Write) {
    for d in diags {
        let _ = writeln!(err, "{}:{d}", path.display());
    }
}

fn io_failure(what: &str, e: io::Error, err: &mut dyn Write) -> Failure {
    let _ = writeln!(err, "error: {what}: {e}");
    Failure(IO_FAILURE)
}

struct Compiled {
    graph: TypeGraph,
    rules: RuleSet,
}

fn compile(cfg: &Config, err: &mut dyn Write) -> Step<Compiled> {
    let tagset_src = read(&cfg.tagset, err)?;
    let rules_src = read(&cfg.rules, err)?;
    let graph = parse_tagset_definition(&tagset_src).map_err(|d| {
        report(&cfg.tagset, &d, err);
        Failure(ERRORS)
    })?;
    let rules = parse_rules(&rules_src, &graph).map_err(|d| {
        report(&cfg.rules, &d, err);
        Failure(ERRORS)
    })?;
    Ok(Compiled { graph, rules })
}

fn warning_count(rs: &RuleSet, mt: &MTree<'_>) -> usize {
    rs.warnings.len() + mt.diagnostics.len()
}

fn print_warnings(cfg: &Config, rs: &RuleSet, mt: &MTree<'_>, err: &mut dyn Write) {
    report(&cfg.rules, &rs.warnings, err);
    for d in &mt.diagnostics {
        let _ = writeln!(err, "{d}");
    }
}

fn strictness(cfg: &Config, rs: &RuleSet, mt: &MTree<'_>) -> i32 {
    if cfg.strict && warning_count(rs, mt) > 0 {
        STRICT_WARNINGS
    } else {
        OK
    }
}

/// Outcome of one query line.
enum Answer {
    Text(String),
    Rejected(String),
}

fn answer(line: &str, c: &Compiled, mt: &MTree<'_>) -> Answer {
    let spec = line.trim();
    let spec = spec.strip_suffix('.').unwrap_or(spec).trim_end();
    let expr = match parse_spec(spec) {
        Ok(e) => e,
        Err(d) if d.message == "empty specification" => {
            return Answer::Rejected(
                "usage: a query is a bracketed specification such as `[pos = v & vtype = aux]`"
                    .to_string(),
            )
        }
        Err(d) => return Answer::Rejected(d.to_string()),
    };
    match typecheck(&expr, &c.graph) {
        Ok(q) => Answer::Text(render_query(&resolve(&q, mt, &c.rules))),
        Err(e) => {
            let d = Diagnostic::error(spec, e.span(), e.to_string());
            Answer::Rejected(d.to_string())
        }
    }
}

fn query(
    cfg: &Config,
    c: &Compiled,
    mt: &MTree<'_>,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Step<i32> {
    let write_failed = |_: io::Error| Failure(IO_FAILURE);
    let batch: Option<Vec<String>> = match (&cfg.spec, &cfg.batch) {
        (Some(s), _) => Some(vec![s.clone()]),
        (None, Some(path)) => Some(read(path, err)?.lines().map(str::to_string).collect()),
        (None, None) => None,
    };
    if let Some(lines) = batch {
        let mut status = OK;
        for (i, line) in lines.iter().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            match answer(line, c, mt) {
                Answer::Text(t) => out.write_all(t.as_bytes()).map_err(write_failed)?,
                Answer::Rejected(msg) => {
                    let _ = writeln!(err, "query {}: {msg}", i + 1);
                    status = ERRORS;
                }
            }
        }
        return Ok(status);
    }
    loop {
        write!(out, "Query> ")
            .and_then(|_| out.flush())
            .map_err(write_failed)?;
        let mut line = String::new();
        let n = input
            .read_line(&mut line)
            .map_err(|e| io_failure("cannot read input", e, err))?;
        if n == 0 {
            writeln!(out).map_err(write_failed)?;
            return Ok(OK);
        }
        match line.trim() {
            "" => continue,
            "\\q" => return Ok(OK),
            _ => {}
        }
        match answer(&line, c, mt) {
            Answer::Text(t) => out.write_all(t.as_bytes()).map_err(write_failed)?,
            Answer::Rejected(msg) => {
                let _ = writeln!(err, "{msg}");
            }
        }
    }
}

fn retag(
    cfg: &Config,
    c: &Compiled,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Step<i32> {
    let summary = match &cfg.corpus {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| {
                let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
                Failure(IO_FAILURE)
            })?;
            retag_stream(BufReader::new(file), &c.rules, cfg.format.into(), out)
        }
        None => retag_stream(input, &c.rules, cfg.format.into(), out),
    }
    .map_err(|e| io_failure("retagging failed", e, err))?;
    let name = cfg
        .corpus
        .as_ref()
        .map_or_else(|| "<stdin>".to_string(), |p| p.display().to_string());
    for d in &summary.malformed {
        let _ = writeln!(err, "{name}:{d}");
    }
    out.write_all(summary.render().as_bytes())
        .map_err(|e| io_failure("cannot write output", e, err))?;
    Ok(if summary.hole_count() > 0 {
        RETAG_HOLES
    } else {
        OK
    })
}

fn execute(
    cfg: &Config,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Step<i32> {
    let c = compile(cfg, err)?;
    let mt = build_mtree(&c.rules, &c.graph);
    let strict = strictness(cfg, &c.rules, &mt);
    let write_failed = |_: io::Error| Failure(IO_FAILURE);
    let status = match cfg.command {
        Command::Compile => {
            print_warnings(cfg, &c.rules, &mt, err);
            writeln!(
                out,
                "tags: {}, classes: {}, warnings: {}",
                c.rules.inventory.len(),
                c.graph.universe_len(),
                warning_count(&c.rules, &mt)
            )
            .map_err(write_failed)?;
            OK
        }
        Command::Check => {
            print_warnings(cfg, &c.rules, &mt, err);
            OK
        }
        Command::Explain => {
            out.write_all(mt.render().as_bytes())
                .map_err(write_failed)?;
            for w in &c.rules.warnings {
                writeln!(out, "WARN redundant_exception: {}:{w}", cfg.rules.display())
                    .map_err(write_failed)?;
            }
            OK
        }
        Command::Query => {
            print_warnings(cfg, &c.rules, &mt, err);
            query(cfg, &c, &mt, input, out, err)?
        }
        Command::Retag => {
            print_warnings(cfg, &c.rules, &mt, err);
            retag(cfg, &c, input, out, err)?
        }
    };
    Ok(if status == OK { strict } else { status })
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match Config::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                ERRORS
            } else {
                let _ = out.write_all(text.as_bytes());
                OK
            };
        }
    };
    let result = match &cfg.output {
        Some(path) => match fs::File::create(path) {
            Ok(file) => {
                let mut file = io::BufWriter::new(file);
                let r = execute(&cfg, input, &mut file, err);
                match file.flush() {
                    Ok(()) => r,
                    Err(e) => Err(io_failure("cannot write output", e, err)),
                }
            }
            Err(e) => Err(io_failure(
                &format!("cannot create {}", path.display()),
                e,
                err,
            )),
        },
        None => execute(&cfg, input, out, err),
    };
    match result {
        Ok(status) | Err(Failure(status)) => status,
    }
}
