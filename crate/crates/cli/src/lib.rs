//! The `sspace` command line: reads JSON space files, runs one check or
//! construction, and prints a report.
//!
//! Exit codes: 0 when every verdict holds, 1 when a checked property fails,
//! 2 when the input is invalid.

pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use structspace::constructions::{
    cone_commutes, direct_limit, normal_subgroup_congruence, product, quotient,
    union_of_direct_limits, validate_direct_system, ConstructionError,
};
use structspace::format::{self, CongruenceEntry, FormatError};
use structspace::lattice::{
    h_map, induced_poset, is_h_surjective, lattice_to_structured_space, LatticeError,
};
use structspace::measure::{self as mu, AtomMeasure};
use structspace::space::StructuredSpace;

pub use report::{Report, VerdictLine};

pub const FORMAT_ENV: &str = "SSPACE_FORMAT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "sspace", version, about = "Checks finite structured spaces")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, env = FORMAT_ENV, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the topology, the neighborhoods and their declared laws.
    Validate { space: PathBuf },
    /// List the open sets.
    Topology { space: PathBuf },
    /// Connectedness, hyperconnectedness and ultraconnectedness.
    Connectivity { space: PathBuf },
    /// List the Borel atoms.
    Atoms { space: PathBuf },
    /// Product of two spaces.
    Product {
        left: PathBuf,
        right: PathBuf,
        /// Also write the product space file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quotient of each neighborhood by a congruence.
    Quotient {
        space: PathBuf,
        #[arg(long)]
        congruence: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Space of the direct limits of one or more direct systems.
    Dirlimit {
        systems: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition and homogeneity checks under a measure.
    Measure {
        space: PathBuf,
        /// Weights file; defaults to the space file's measure section.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Classify a subcollection of neighborhoods under a measure.
    Restrict {
        space: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Comma-separated neighborhood names.
        #[arg(long, value_delimiter = ',', required = true)]
        collection: Vec<String>,
    },
    /// The map to neighborhood sets, its poset of classes and whether it is a lattice.
    Lattice {
        space: PathBuf,
        /// Write the Hasse diagram of the classes as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Space file built from a finite lattice.
    Converse {
        lattice: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("{0}")]
    Invalid(String),
}

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(cli.command, Report::new(echo)) {
        Ok(report) => Outcome {
            stdout: match cli.format {
                OutputFormat::Text => report.to_text(),
                OutputFormat::Json => report.to_json(),
            },
            stderr: String::new(),
            code: report.exit_code(),
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: 2,
        },
    }
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

fn parsed<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Format {
        path: path.to_owned(),
        source,
    })
}

fn load_space(path: &Path) -> Result<(StructuredSpace, Option<AtomMeasure>), CliError> {
    parsed(path, format::parse_space(&read(path)?))
}

/// A space that must validate before anything else is checked.
fn load_valid(path: &Path) -> Result<(StructuredSpace, Option<AtomMeasure>), CliError> {
    let (s, m) = load_space(path)?;
    let report = s.validate();
    if let Some(v) = report.violations.first() {
        return Err(CliError::Invalid(format!(
            "{} does not validate: {v} ({} violation(s))",
            path.display(),
            report.violations.len()
        )));
    }
    Ok((s, m))
}

fn measure_for(
    s: &StructuredSpace,
    section: Option<AtomMeasure>,
    weights: Option<&Path>,
) -> Result<AtomMeasure, CliError> {
    match (weights, section) {
        (Some(w), _) => parsed(w, format::parse_weights(&read(w)?, s.space())),
        (None, Some(m)) => Ok(m),
        (None, None) => Err(CliError::Invalid(
            "no measure: pass --weights or add a measure section".into(),
        )),
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

/// Construction failures that refute a property of valid input, as a
/// verdict name and witness; anything else is invalid input.
fn refutation(e: ConstructionError) -> Result<(&'static str, Value), CliError> {
    use ConstructionError::*;
    let message = e.to_string();
    Ok(match e {
        NotACongruence {
            neighborhood,
            witness,
        } => (
            "congruence",
            json!({"neighborhood": neighborhood, "witness": value(&witness)}),
        ),
        NotAGroup => ("normal subgroup", json!({"error": message})),
        NotASubgroup(f) => (
            "normal subgroup",
            json!({"error": message, "failure": value(&f)}),
        ),
        NotNormal {
            conjugator,
            element,
            conjugate,
        } => (
            "normal subgroup",
            json!({"conjugator": conjugator, "element": element, "conjugate": conjugate}),
        ),
        QuotientTooSmall { neighborhood, size } => (
            "quotient is a structured space",
            json!({"neighborhood": neighborhood, "size": size}),
        ),
        LimitTooSmall { system, size } => (
            "limit is a structured space",
            json!({"system": system, "size": size}),
        ),
        DescriptorLost {
            neighborhood,
            spec,
            witness,
        } => (
            "descriptors preserved",
            json!({"neighborhood": neighborhood, "spec": spec, "witness": value(&witness)}),
        ),
        IllDefinedOperation { op, left, right } => (
            "limit operations well defined",
            json!({"op": op, "left": value(&left), "right": value(&right)}),
        ),
        other => return Err(invalid(other)),
    })
}

fn emit_out(out: Option<&Path>, s: &StructuredSpace) -> Result<Value, CliError> {
    let text = format::emit_space(s, None);
    if let Some(path) = out {
        write(path, &text)?;
    }
    Ok(serde_json::from_str(&text).expect("emitted files are JSON"))
}

fn execute(command: Command, mut r: Report) -> Result<Report, CliError> {
    match command {
        Command::Validate { space } => {
            let (s, _) = load_space(&space)?;
            let report = s.validate();
            r.check(
                "structured space",
                report.passes(),
                Some(value(&report.violations)),
            );
            r.payload = json!({
                "points": s.universe().points(),
                "neighborhoods": s.names().collect::<Vec<_>>(),
                "catalog": s.catalog(),
            });
        }
        Command::Topology { space } => {
            let (s, _) = load_space(&space)?;
            let minimal: serde_json::Map<String, Value> = s
                .universe()
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    (
                        p.to_string(),
                        value(&s.universe().names(s.space().minimal_open(i))),
                    )
                })
                .collect();
            r.payload = json!({"opens": s.space().open_names(), "minimal_opens": minimal});
        }
        Command::Connectivity { space } => {
            let (s, _) = load_space(&space)?;
            let c = s.space().connectivity_report();
            r.check("connected", c.connected, Some(value(&c.disconnection)));
            r.check(
                "hyperconnected",
                c.hyperconnected,
                Some(value(&c.disjoint_opens)),
            );
            r.check(
                "ultraconnected",
                c.ultraconnected,
                Some(value(&c.disjoint_closed)),
            );
            let carriers: Vec<_> = s.carriers().values().cloned().collect();
            r.payload =
                json!({"neighborhoods": value(&s.space().check_complete_openness(&carriers))});
        }
        Command::Atoms { space } => {
            let (s, _) = load_space(&space)?;
            let atoms: Vec<_> = s
                .space()
                .borel_atoms()
                .iter()
                .map(|a| s.universe().names(a))
                .collect();
            r.payload = json!({"atoms": atoms});
        }
        Command::Product { left, right, out } => {
            let (a, _) = load_valid(&left)?;
            let (b, _) = load_valid(&right)?;
            let p = product(&a, &b).map_err(invalid)?;
            let report = p.validate();
            r.check(
                "product validates",
                report.passes(),
                Some(value(&report.violations)),
            );
            r.payload = emit_out(out.as_deref(), &p)?;
        }
        Command::Quotient {
            space,
            congruence,
            out,
        } => {
            let (s, _) = load_valid(&space)?;
            let file = parsed(&congruence, format::parse_congruences(&read(&congruence)?))?;
            let mut specs = Vec::new();
            for entry in file.congruences {
                match entry {
                    CongruenceEntry::Blocks(spec) => specs.push(spec),
                    CongruenceEntry::NormalSubgroup {
                        neighborhood,
                        normal_subgroup,
                    } => {
                        let g = s.neighborhood(&neighborhood).map_err(invalid)?;
                        match normal_subgroup_congruence(&neighborhood, g, &normal_subgroup) {
                            Ok(spec) => specs.push(spec),
                            Err(e) => {
                                let (name, w) = refutation(e)?;
                                r.check(name, false, Some(w));
                                return Ok(r);
                            }
                        }
                    }
                }
            }
            match quotient(&s, &specs) {
                Ok(q) => {
                    r.check("congruence", true, None);
                    let report = q.validate();
                    r.check(
                        "quotient validates",
                        report.passes(),
                        Some(value(&report.violations)),
                    );
                    r.payload = emit_out(out.as_deref(), &q)?;
                }
                Err(e) => {
                    let (name, w) = refutation(e)?;
                    r.check(name, false, Some(w));
                }
            }
        }
        Command::Dirlimit { systems, out } => {
            let list = parsed(&systems, format::parse_direct_systems(&read(&systems)?))?;
            let mut all_valid = true;
            for (name, d) in &list {
                let report = validate_direct_system(d);
                all_valid &= report.violations.is_empty();
                r.check(
                    format!("`{name}` is a direct system"),
                    report.violations.is_empty(),
                    Some(value(&report.violations)),
                );
            }
            if !all_valid {
                return Ok(r);
            }
            match union_of_direct_limits(&list) {
                Ok(space) => {
                    for (name, d) in &list {
                        let commutes = direct_limit(d)
                            .map(|lim| cone_commutes(d, &lim))
                            .unwrap_or(false);
                        r.check(format!("cone of `{name}` commutes"), commutes, None);
                    }
                    let report = space.validate();
                    r.check(
                        "limit space validates",
                        report.passes(),
                        Some(value(&report.violations)),
                    );
                    r.payload = emit_out(out.as_deref(), &space)?;
                }
                Err(e) => {
                    let (name, w) = refutation(e)?;
                    r.check(name, false, Some(w));
                }
            }
        }
        Command::Measure { space, weights } => {
            let (s, section) = load_valid(&space)?;
            let m = measure_for(&s, section, weights.as_deref())?;
            let part = mu::is_partitionable(&s);
            r.check("partitionable", part.holds(), part.witness().map(value));
            let la = mu::find_mu_la_partition(&s, &m).map_err(invalid)?;
            r.check("μ-LA partitionable", la.is_some(), None);
            let all: Vec<String> = s.names().cloned().collect();
            let union = mu::is_mu_union(&s, &m, &all).map_err(invalid)?;
            r.check("μ-union", union.holds(), union.witness().map(value));
            let h = mu::homogeneity(&s, &m).map_err(invalid)?;
            r.check(
                "locally μ-homogeneous",
                h.locally,
                h.local_witness.as_ref().map(value),
            );
            r.check(
                "globally μ-homogeneous",
                h.globally,
                h.global_witness.as_ref().map(value),
            );
            let atoms: Vec<Value> = m
                .atoms()
                .iter()
                .zip(m.atom_weights())
                .map(|(a, w)| json!({"points": s.universe().names(a), "weight": w}))
                .collect();
            r.payload = json!({"atoms": atoms, "total": m.total(), "la_partition": la});
        }
        Command::Restrict {
            space,
            weights,
            collection,
        } => {
            let (s, section) = load_valid(&space)?;
            let m = measure_for(&s, section, weights.as_deref())?;
            let c = mu::classify_restriction(&s, &m, &collection).map_err(invalid)?;
            r.check(
                "μ-union",
                c.is_mu_union,
                c.union_failure.as_ref().map(value),
            );
            let cr_witness = match (&c.union_failure, &c.missing_class) {
                (_, Some(n)) => json!({"missing_class": n}),
                (Some(f), None) => json!({"union_failure": value(f)}),
                (None, None) => Value::Null,
            };
            r.check("μ-CR", c.is_mu_cr, Some(cr_witness));
            let cdr_witness = match &c.equivalent_pair {
                Some(p) => json!({"equivalent_pair": p}),
                None => json!({"not_mu_cr": true}),
            };
            r.check("μ-CDR", c.is_mu_cdr, Some(cdr_witness));
            r.payload = value(&c);
        }
        Command::Lattice { space, dot } => {
            let (s, _) = load_valid(&space)?;
            let sur = is_h_surjective(&s);
            r.check(
                "h surjective",
                sur.holds(),
                sur.witness().map(|m| json!({"missing": m})),
            );
            let q = induced_poset(&s);
            let report = q.verify_lattice();
            r.check(
                "lattice",
                report.verdict.is_lattice,
                report.verdict.counterexample.as_ref().map(value),
            );
            if let Some(u) = report.joins_are_unions {
                r.check("joins are unions", u, None);
            }
            let labels = q.order().elements();
            let table = |t: &Option<Vec<Vec<usize>>>| {
                t.as_ref().map(|t| {
                    t.iter()
                        .map(|row| row.iter().map(|&k| labels[k].clone()).collect::<Vec<_>>())
                        .collect::<Vec<_>>()
                })
            };
            let covers: Vec<(String, String)> = q
                .order()
                .hasse_edges()
                .into_iter()
                .map(|(a, b)| (labels[a].clone(), labels[b].clone()))
                .collect();
            r.payload = json!({
                "h": h_map(&s),
                "classes": q.classes(),
                "covers": covers,
                "join": table(&report.verdict.join_table),
                "meet": table(&report.verdict.meet_table),
            });
            if let Some(path) = dot {
                write(&path, &q.to_dot())?;
            }
        }
        Command::Converse { lattice, out } => {
            let poset = parsed(&lattice, format::parse_poset(&read(&lattice)?))?;
            match lattice_to_structured_space(&poset) {
                Ok(c) => {
                    r.check("lattice", true, None);
                    let report = c.space.validate();
                    r.check(
                        "space validates",
                        report.passes(),
                        Some(value(&report.violations)),
                    );
                    let sur = is_h_surjective(&c.space);
                    r.check(
                        "h surjective",
                        sur.holds(),
                        sur.witness().map(|m| json!({"missing": m})),
                    );
                    let q = induced_poset(&c.space).verify_lattice();
                    r.check(
                        "induced poset is a lattice",
                        q.verdict.is_lattice,
                        q.verdict.counterexample.as_ref().map(value),
                    );
                    r.payload = emit_out(out.as_deref(), &c.space)?;
                }
                Err(LatticeError::NotALattice(f)) => r.check("lattice", false, Some(value(&f))),
                Err(e) => return Err(invalid(e)),
            }
        }
    }
    Ok(r)
}
