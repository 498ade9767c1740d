//! The `catsd` command line.
//!
//! Exit codes: 0 success, 1 validation or computation failure, 2 usage error
//! (bad arguments or unreadable input).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use catsd_core::sdfunc::{format_sd_rows, parse_sd_rows, DomainKind};
use catsd_core::{classify, ClassifyOptions, Exact, Issue, SdFunction, ValidationReport, WeightElicitation};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bundle::{decode, encode, Bundle};
use crate::elicit::{compute_srf, fit_request_from_table, fit_thresholds, ranking_from_table, ElicitError};
use crate::results::{write_results, Detail};
use crate::table::{format_number, Format, Table};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    JsonLines,
}

#[derive(Debug, Parser)]
#[command(
    name = "catsd",
    version,
    about = "Nominal classification by similarity and dissimilarity"
)]
pub struct Cli {
    /// Output and diagnostic format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assign every action to its categories and write result tables.
    Classify {
        #[arg(long, env = "CATSD_MODEL_DIR")]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "summary")]
        detail: Detail,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        epsilon: f64,
    },
    /// Check a model bundle without running it.
    Validate {
        #[arg(long, env = "CATSD_MODEL_DIR")]
        model: PathBuf,
    },
    /// Weights from a deck-of-cards ranking (`criterion,position` rows, 1 = least important).
    Weights {
        #[arg(long)]
        ranking: PathBuf,
        /// Ratio between the most and least important weights; fractions such as `11/2` are accepted.
        #[arg(long)]
        z: String,
    },
    /// Constant or affine thresholds from `threshold,level,difference` rows.
    FitThresholds {
        #[arg(long)]
        points: PathBuf,
    },
    /// Parse or evaluate an SD function given as `condition,value` rows.
    Sd {
        #[command(subcommand)]
        action: SdCommand,
    },
    /// Re-write a bundle in canonical form (directory, or `.zip`).
    Export {
        #[arg(long, env = "CATSD_MODEL_DIR")]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// File format of the data modules.
        #[arg(long = "as", value_enum, default_value = "csv")]
        module_format: ModuleFormat,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, default_value = "catsd-data")]
        data_dir: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModuleFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Cardinal,
    Ordinal,
}

#[derive(Debug, Subcommand)]
pub enum SdCommand {
    /// Print the normalized rows.
    Parse {
        #[arg(long)]
        function: PathBuf,
        #[arg(long, value_enum)]
        domain: Option<DomainArg>,
    },
    /// Print `f(Δ)` with its similarity and dissimilarity parts.
    Eval {
        #[arg(long)]
        function: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum)]
        domain: Option<DomainArg>,
    },
}

enum Failure {
    Usage(String),
    Invalid(ValidationReport),
    Compute(ElicitError),
}

struct Out<'a> {
    format: OutputFormat,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Out<'_> {
    fn line(&mut self, text: impl AsRef<str>) {
        let _ = writeln!(self.stdout, "{}", text.as_ref());
    }

    fn record(&mut self, value: serde_json::Value) {
        let _ = writeln!(self.stdout, "{value}");
    }

    fn issue(&mut self, i: &Issue) {
        match self.format {
            OutputFormat::Text => {
                let _ = writeln!(self.stderr, "error[{}] {}: {}", i.code, i.location, i.message);
            }
            OutputFormat::JsonLines => {
                let v = json!({"level": "error", "code": i.code, "location": i.location, "message": i.message});
                let _ = writeln!(self.stderr, "{v}");
            }
        }
    }

    fn error(&mut self, code: &str, message: &str) {
        match self.format {
            OutputFormat::Text => {
                let _ = writeln!(self.stderr, "error[{code}]: {message}");
            }
            OutputFormat::JsonLines => {
                let _ = writeln!(
                    self.stderr,
                    "{}",
                    json!({"level": "error", "code": code, "message": message})
                );
            }
        }
    }
}

/// Parses `args` and runs the command, writing to the given streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    let mut out = Out {
        format: cli.format,
        stdout,
        stderr,
    };
    match execute(cli.command, &mut out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            out.error("USAGE", &msg);
            2
        }
        Err(Failure::Invalid(report)) => {
            for i in &report.issues {
                out.issue(i);
            }
            1
        }
        Err(Failure::Compute(e)) => {
            out.error(&e.code, &e.message);
            1
        }
    }
}

fn read_bundle(path: &Path) -> Result<Bundle, Failure> {
    Bundle::read(path).map_err(|e| Failure::Usage(e.to_string()))
}

fn read_table(path: &Path) -> Result<Table, Failure> {
    let name = path.display().to_string();
    let format = Format::from_path(&name).unwrap_or(Format::Csv);
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{name}: {e}")))?;
    let file = path
        .file_name()
        .map_or(name.clone(), |f| f.to_string_lossy().into_owned());
    Table::parse(&file, format, &bytes).map_err(Failure::Invalid)
}

fn read_function(path: &Path, domain: Option<DomainArg>) -> Result<SdFunction, Failure> {
    let t = read_table(path)?;
    let mut report = ValidationReport::default();
    if !t.require(&["condition", "value"], &mut report) {
        return Err(Failure::Invalid(report));
    }
    let rows: Vec<(&str, &str)> = t
        .records()
        .map(|r| (r.opt("condition").unwrap_or(""), r.opt("value").unwrap_or("")))
        .collect();
    let id = t.records().find_map(|r| r.opt("function")).unwrap_or("f");
    let domain = domain.map(|d| match d {
        DomainArg::Cardinal => DomainKind::Cardinal,
        DomainArg::Ordinal => DomainKind::Ordinal,
    });
    parse_sd_rows(id, domain, &rows).map_err(|e| {
        Failure::Compute(ElicitError {
            code: e.code().into(),
            message: format!("{}: {e}", t.file),
        })
    })
}

fn domain_name(d: DomainKind) -> &'static str {
    match d {
        DomainKind::Cardinal => "cardinal",
        DomainKind::Ordinal => "ordinal",
    }
}

fn execute(command: Command, out: &mut Out<'_>) -> Result<(), Failure> {
    match command {
        Command::Classify {
            model,
            out: dir,
            detail,
            epsilon,
        } => {
            let data = decode(&read_bundle(&model)?).map_err(Failure::Invalid)?;
            let report = classify(
                &data.model,
                &data.actions,
                &data.performances,
                ClassifyOptions { epsilon },
            )
            .map_err(|e| match e.report() {
                Some(r) => Failure::Invalid(r.clone()),
                None => Failure::Compute(ElicitError {
                    code: e.code().into(),
                    message: e.to_string(),
                }),
            })?;
            let written = write_results(&report, detail, &dir).map_err(|e| {
                Failure::Compute(ElicitError {
                    code: "IO_ERROR".into(),
                    message: e.to_string(),
                })
            })?;
            for a in &report.actions {
                let names: Vec<&str> = if a.assigned_to_dummy {
                    vec![report.dummy_category_name.as_str()]
                } else {
                    a.accepted
                        .iter()
                        .map(|id| {
                            report
                                .categories
                                .iter()
                                .find(|c| &c.id == id)
                                .map_or(id.as_str(), |c| c.name.as_str())
                        })
                        .collect()
                };
                match out.format {
                    OutputFormat::Text => out.line(format!("{}: {}", a.action, names.join(", "))),
                    OutputFormat::JsonLines => out.record(json!({"action": a.action, "categories": names})),
                }
            }
            if out.format == OutputFormat::Text {
                for p in written {
                    let _ = writeln!(out.stderr, "wrote {}", p.display());
                }
            }
            Ok(())
        }
        Command::Validate { model } => {
            let data = decode(&read_bundle(&model)?).map_err(Failure::Invalid)?;
            let summary = json!({
                "valid": true,
                "criteria": data.model.criteria.len(),
                "categories": data.model.categories.len(),
                "actions": data.actions.len(),
            });
            match out.format {
                OutputFormat::Text => out.line(format!(
                    "valid: {} criteria, {} categories, {} actions",
                    data.model.criteria.len(),
                    data.model.categories.len(),
                    data.actions.len()
                )),
                OutputFormat::JsonLines => out.record(summary),
            }
            Ok(())
        }
        Command::Weights { ranking, z } => {
            let z: Exact = z.parse().map_err(|e| Failure::Usage(format!("--z: {e}")))?;
            let ranking = ranking_from_table(&read_table(&ranking)?).map_err(Failure::Invalid)?;
            let w = compute_srf(&WeightElicitation { ranking, z }).map_err(Failure::Compute)?;
            if out.format == OutputFormat::Text {
                out.line("criterion,subset,weight,exact");
            }
            for row in &w.weights {
                match out.format {
                    OutputFormat::Text => out.line(format!(
                        "{},{},{},{}",
                        row.criterion, row.subset, row.display, row.weight
                    )),
                    OutputFormat::JsonLines => out.record(serde_json::to_value(row).expect("serializable")),
                }
            }
            Ok(())
        }
        Command::FitThresholds { points } => {
            let request = fit_request_from_table(&read_table(&points)?).map_err(Failure::Invalid)?;
            let fitted = fit_thresholds(&request).map_err(Failure::Compute)?;
            if out.format == OutputFormat::Text {
                out.line("threshold,kind,display");
            }
            for f in &fitted.thresholds {
                match out.format {
                    OutputFormat::Text => out.line(format!(
                        "{},{},{}",
                        f.threshold.name(),
                        if f.constant { "constant" } else { "affine" },
                        f.display
                    )),
                    OutputFormat::JsonLines => out.record(serde_json::to_value(f).expect("serializable")),
                }
            }
            Ok(())
        }
        Command::Sd {
            action: SdCommand::Parse { function, domain },
        } => {
            let f = read_function(&function, domain)?;
            match out.format {
                OutputFormat::Text => {
                    out.line(format!("# {} ({})", f.id(), domain_name(f.domain())));
                    out.line("condition,value");
                    for (c, v) in format_sd_rows(&f) {
                        out.line(format!("{c},{v}"));
                    }
                }
                OutputFormat::JsonLines => {
                    for (c, v) in format_sd_rows(&f) {
                        out.record(
                            json!({"function": f.id(), "domain": domain_name(f.domain()), "condition": c, "value": v}),
                        );
                    }
                }
            }
            Ok(())
        }
        Command::Sd {
            action:
                SdCommand::Eval {
                    function,
                    delta,
                    domain,
                },
        } => {
            let f = read_function(&function, domain)?;
            let (s, d) = f.split(delta).map_err(|e| {
                Failure::Compute(ElicitError {
                    code: e.code().into(),
                    message: e.to_string(),
                })
            })?;
            let v = s + d;
            match out.format {
                OutputFormat::Text => out.line(format!(
                    "f({}) = {}  s = {}  d = {}",
                    format_number(delta),
                    format_number(v),
                    format_number(s),
                    format_number(d)
                )),
                OutputFormat::JsonLines => out.record(json!({"delta": delta, "f": v, "s": s, "d": d})),
            }
            Ok(())
        }
        Command::Export {
            model,
            out: target,
            module_format,
        } => {
            let bundle = read_bundle(&model)?;
            let data = decode(&bundle).map_err(Failure::Invalid)?;
            let format = match module_format {
                ModuleFormat::Csv => Format::Csv,
                ModuleFormat::Json => Format::Json,
            };
            encode(&data, format, &bundle.extras()).write(&target).map_err(|e| {
                Failure::Compute(ElicitError {
                    code: "IO_ERROR".into(),
                    message: e.to_string(),
                })
            })?;
            Ok(())
        }
        Command::Serve { port, bind, data_dir } => {
            let addr = format!("{bind}:{port}");
            crate::service::serve(&addr, &data_dir).map_err(|e| {
                Failure::Compute(ElicitError {
                    code: "SERVER_ERROR".into(),
                    message: e.to_string(),
                })
            })
        }
    }
}
