//! The `causal` command-line surface: model loading, queries, certification,
//! DOT emission, and sampling.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on model or query errors.
//! Human-readable numeric output carries 12 significant digits; `--json`
//! switches every command to a single machine-readable object with
//! full-precision floats.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::criteria::CDI_TOLERANCE;
use crate::distribution::{decode_cell, InfoValue, JointTable};
use crate::error::{Error, Result};
use crate::format::{self, Model};
use crate::graph::{Dag, VertexSet};
use crate::information::CanonicalKind;
use crate::intervention::InterventionSpec;

#[derive(Parser)]
#[command(
    name = "causal",
    version,
    about = "Exact inference and causal-effect identification for discrete models on DAGs"
)]
struct Cli {
    /// Emit one machine-readable JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and report every violation.
    Validate { file: PathBuf },
    /// Print the exact joint distribution.
    Joint { file: PathBuf },
    /// Print the marginal over the named variables.
    Marginal {
        file: PathBuf,
        /// Variables to keep, e.g. --on X,Z
        #[arg(long, value_delimiter = ',', required = true)]
        on: Vec<String>,
    },
    /// Condition on observed evidence and print the posterior.
    Condition {
        file: PathBuf,
        /// Evidence, e.g. --given X=1,Y=0
        #[arg(long, value_delimiter = ',', required = true)]
        given: Vec<String>,
    },
    /// Apply a hard intervention and print the resulting distribution.
    Intervene {
        file: PathBuf,
        /// Assignments, e.g. --do X3=0
        #[arg(long = "do", value_delimiter = ',', required = true)]
        r#do: Vec<String>,
        /// Variables to marginalize onto (default: all non-intervened).
        #[arg(long, value_delimiter = ',')]
        on: Option<Vec<String>>,
        /// Evidence observed after the intervention, e.g. --given X1=1
        #[arg(long, value_delimiter = ',')]
        given: Option<Vec<String>>,
    },
    /// Directed information I(X^T -> X^S), optionally conditioned.
    Di {
        file: PathBuf,
        /// The target set T.
        #[arg(long, value_delimiter = ',', required = true)]
        from: Vec<String>,
        /// The source set S (the intervened side).
        #[arg(long, value_delimiter = ',', required = true)]
        to: Vec<String>,
        /// Passive conditioning set.
        #[arg(long, value_delimiter = ',')]
        given: Option<Vec<String>>,
    },
    /// Chain-rule decomposition of I(X^T -> X^S).
    Chainrule {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        from: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        to: Vec<String>,
    },
    /// Certify a back-door adjustment set.
    Backdoor {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        cause: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        effect: Vec<String>,
        /// Candidate adjustment set (default: empty).
        #[arg(long, value_delimiter = ',')]
        adjust: Option<Vec<String>>,
        /// Tolerance in bits for "conditional directed information is zero".
        #[arg(long, default_value_t = CDI_TOLERANCE)]
        tolerance: f64,
    },
    /// Enumerate admissible back-door sets up to a size cap.
    Findbackdoor {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        cause: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        effect: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
    },
    /// Emit the model graph as Graphviz DOT.
    Dot {
        file: PathBuf,
        /// Draw these interventions as surgery plus assignment nodes.
        #[arg(long = "do", value_delimiter = ',')]
        r#do: Option<Vec<String>>,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw seeded samples from a functional model.
    Sample {
        file: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Evaluate the directed-information identities of a canonical
    /// three-variable structure.
    Canonical {
        file: PathBuf,
        /// chain, fork, or collider
        #[arg(long)]
        kind: String,
    },
}

/// Formats a value with 12 significant digits, positionally when the
/// exponent allows it.
pub fn fmt_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_infinite() {
        return "inf".to_string();
    }
    let neg = v < 0.0;
    let sci = format!("{:.11e}", v.abs());
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("numeric exponent");
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    debug_assert_eq!(digits.len(), 12);
    let body = if (-4..12).contains(&exp) {
        if exp >= 0 {
            let point = (exp + 1) as usize;
            if point >= digits.len() {
                digits
            } else {
                format!("{}.{}", &digits[..point], &digits[point..])
            }
        } else {
            format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn fmt_info(v: &InfoValue) -> String {
    match v {
        InfoValue::Finite(bits) => fmt_sig12(*bits),
        InfoValue::Infinite => "inf".to_string(),
    }
}

fn json_info(v: &InfoValue) -> Value {
    match v {
        InfoValue::Finite(bits) => json!(bits),
        InfoValue::Infinite => json!("inf"),
    }
}

fn resolve_var(dag: &Dag, name: &str) -> Result<usize> {
    dag.index_of_label(name)
        .ok_or_else(|| Error::Unsupported(format!("unknown variable {name}")))
}

fn resolve_set(dag: &Dag, names: &[String]) -> Result<VertexSet> {
    names
        .iter()
        .filter(|n| !n.is_empty())
        .map(|n| resolve_var(dag, n))
        .collect()
}

/// Parses `Name=value` items against the model's labels.
fn resolve_assignments(dag: &Dag, items: &[String]) -> Result<Vec<(usize, usize)>> {
    items
        .iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Unsupported(format!("expected Name=value, got `{item}`")))?;
            let idx = resolve_var(dag, name.trim())?;
            let value: usize = value.trim().parse().map_err(|_| {
                Error::Unsupported(format!(
                    "bad value in `{item}` (symbol indexes are integers)"
                ))
            })?;
            Ok((idx, value))
        })
        .collect()
}

fn set_names(dag: &Dag, set: &VertexSet) -> Vec<String> {
    set.iter().map(|v| dag.label(v).to_string()).collect()
}

fn assignment_text(dag: &Dag, pairs: &[(usize, usize)]) -> String {
    pairs
        .iter()
        .map(|&(v, val)| format!("{}={val}", dag.label(v)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn table_json(dag: &Dag, description: &str, command: &str, table: &JointTable) -> Value {
    let scope: Vec<Value> = table
        .scope()
        .iter()
        .map(|v| json!({"name": dag.label(v.index), "cardinality": v.cardinality}))
        .collect();
    json!({
        "command": command,
        "description": description,
        "scope": scope,
        "probs": table.probs(),
    })
}

fn write_table(
    out: &mut impl Write,
    dag: &Dag,
    description: &str,
    table: &JointTable,
) -> std::io::Result<()> {
    writeln!(out, "# {description}")?;
    let mut values = vec![0usize; table.scope().len()];
    for (cell, &p) in table.probs().iter().enumerate() {
        decode_cell(table.scope(), cell, &mut values);
        let key = table
            .scope()
            .iter()
            .zip(&values)
            .map(|(v, &val)| format!("{}={val}", dag.label(v.index)))
            .collect::<Vec<_>>()
            .join(" ");
        if key.is_empty() {
            writeln!(out, "{}", fmt_sig12(p))?;
        } else {
            writeln!(out, "{key}  {}", fmt_sig12(p))?;
        }
    }
    Ok(())
}

/// Runs the CLI against explicit arguments and writers; returns the exit
/// code.
pub fn run<O: Write, E: Write>(
    args: impl IntoIterator<Item = String>,
    out: &mut O,
    err: &mut E,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(Error::InvalidModel { .. }) if matches!(cli.command, Command::Validate { .. }) => 2,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli, out: &mut impl Write) -> Result<()> {
    let json = cli.json;
    match &cli.command {
        Command::Validate { file } => {
            let doc = format::parse(&std::fs::read_to_string(file).map_err(|e| Error::Parse {
                line: 0,
                message: format!("cannot read {}: {e}", file.display()),
            })?)?;
            let violations = doc.validate();
            let kind = match doc.kind() {
                format::ModelKind::Cpt => "cpt",
                format::ModelKind::Functional => "functional",
            };
            if json {
                emit(
                    out,
                    json!({
                        "command": "validate",
                        "name": doc.name,
                        "kind": kind,
                        "variables": doc.variable_count(),
                        "valid": violations.is_empty(),
                        "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    }),
                )?;
            } else if violations.is_empty() {
                writeln!(
                    out,
                    "ok: {} (kind {kind}, {} variables)",
                    doc.name,
                    doc.variable_count()
                )
                .map_err(io_err)?;
            } else {
                writeln!(out, "invalid: {}", doc.name).map_err(io_err)?;
                for v in &violations {
                    writeln!(out, "  {v}").map_err(io_err)?;
                }
            }
            if violations.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidModel { violations })
            }
        }
        Command::Joint { file } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let table = model.joint()?;
            let desc = format!("P({})", model.dag().labels().join(", "));
            if json {
                emit(out, table_json(model.dag(), &desc, "joint", &table))?;
            } else {
                write_table(out, model.dag(), &desc, &table).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Marginal { file, on } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let t = resolve_set(model.dag(), on)?;
            let table = model.joint()?.marginal(&t)?;
            let desc = format!("P({})", set_names(model.dag(), &t).join(", "));
            if json {
                emit(out, table_json(model.dag(), &desc, "marginal", &table))?;
            } else {
                write_table(out, model.dag(), &desc, &table).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Condition { file, given } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let evidence = resolve_assignments(model.dag(), given)?;
            let table = model.joint()?.condition(&evidence)?;
            let kept: Vec<String> = table
                .scope()
                .iter()
                .map(|v| model.dag().label(v.index).to_string())
                .collect();
            let desc = format!(
                "P({} | {})",
                kept.join(", "),
                assignment_text(model.dag(), &evidence)
            );
            if json {
                emit(out, table_json(model.dag(), &desc, "condition", &table))?;
            } else {
                write_table(out, model.dag(), &desc, &table).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Intervene {
            file,
            r#do,
            on,
            given,
        } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let dag = model.dag().clone();
            let pairs = resolve_assignments(&dag, r#do)?;
            let spec = InterventionSpec::new(pairs.clone())?;
            let evidence = match given {
                Some(items) => resolve_assignments(&dag, items)?,
                None => Vec::new(),
            };
            let t = match on {
                Some(names) => resolve_set(&dag, names)?,
                None => {
                    let taken: VertexSet = spec
                        .vars()
                        .union(&evidence.iter().map(|&(v, _)| v).collect());
                    (0..dag.vertex_count())
                        .filter(|v| !taken.contains(*v))
                        .collect()
                }
            };
            let table = model.interventional_conditional(&spec, &evidence, &t)?;
            let mut cond = format!("do({})", assignment_text(&dag, &pairs));
            if !evidence.is_empty() {
                cond.push_str(&format!(", {}", assignment_text(&dag, &evidence)));
            }
            let desc = format!("P({} | {cond})", set_names(&dag, &t).join(", "));
            if json {
                emit(out, table_json(&dag, &desc, "intervene", &table))?;
            } else {
                write_table(out, &dag, &desc, &table).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Di {
            file,
            from,
            to,
            given,
        } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let t = resolve_set(model.dag(), from)?;
            let s = resolve_set(model.dag(), to)?;
            let z = match given {
                Some(names) => resolve_set(model.dag(), names)?,
                None => VertexSet::empty(),
            };
            let value = model.conditional_directed_information(&t, &s, &z)?;
            let t_names = set_names(model.dag(), &t).join(",");
            let s_names = set_names(model.dag(), &s).join(",");
            if json {
                emit(
                    out,
                    json!({
                        "command": "di",
                        "from": set_names(model.dag(), &t),
                        "to": set_names(model.dag(), &s),
                        "given": set_names(model.dag(), &z),
                        "bits": json_info(&value),
                    }),
                )?;
            } else if z.is_empty() {
                writeln!(out, "I({t_names} -> {s_names}) = {} bits", fmt_info(&value))
                    .map_err(io_err)?;
            } else {
                let z_names = set_names(model.dag(), &z).join(",");
                writeln!(
                    out,
                    "I({t_names} -> {s_names} | {z_names}) = {} bits",
                    fmt_info(&value)
                )
                .map_err(io_err)?;
            }
            Ok(())
        }
        Command::Chainrule { file, from, to } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let t = resolve_set(model.dag(), from)?;
            let s = resolve_set(model.dag(), to)?;
            let d = model.chain_rule_decomposition(&t, &s)?;
            if json {
                emit(
                    out,
                    json!({
                        "command": "chainrule",
                        "from": set_names(model.dag(), &t),
                        "to": set_names(model.dag(), &s),
                        "mi_term": json_info(&d.mi_term),
                        "cdi_term": json_info(&d.cdi_term),
                        "total": json_info(&d.total),
                    }),
                )?;
            } else {
                writeln!(out, "mi_term  = {} bits", fmt_info(&d.mi_term)).map_err(io_err)?;
                writeln!(out, "cdi_term = {} bits", fmt_info(&d.cdi_term)).map_err(io_err)?;
                writeln!(out, "total    = {} bits", fmt_info(&d.total)).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Backdoor {
            file,
            cause,
            effect,
            adjust,
            tolerance,
        } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let s = resolve_set(model.dag(), cause)?;
            let t = resolve_set(model.dag(), effect)?;
            let z = match adjust {
                Some(names) => resolve_set(model.dag(), names)?,
                None => VertexSet::empty(),
            };
            let cert = model.certify_backdoor_with_tolerance(&s, &t, &z, *tolerance)?;
            if json {
                emit(
                    out,
                    json!({
                        "command": "backdoor",
                        "cause": set_names(model.dag(), &s),
                        "effect": set_names(model.dag(), &t),
                        "adjust": set_names(model.dag(), &cert.z),
                        "graphical_ok": cert.graphical_ok,
                        "information_ok": cert.information_ok,
                        "cdi_bits": json_info(&cert.cdi_value),
                        "max_discrepancy": cert.max_discrepancy,
                        "tolerance": cert.tolerance,
                    }),
                )?;
            } else {
                writeln!(
                    out,
                    "adjust = {{{}}}",
                    set_names(model.dag(), &cert.z).join(", ")
                )
                .map_err(io_err)?;
                writeln!(out, "graphical_ok = {}", cert.graphical_ok).map_err(io_err)?;
                writeln!(out, "information_ok = {}", cert.information_ok).map_err(io_err)?;
                writeln!(out, "cdi_bits = {}", fmt_info(&cert.cdi_value)).map_err(io_err)?;
                writeln!(out, "max_discrepancy = {}", fmt_sig12(cert.max_discrepancy))
                    .map_err(io_err)?;
                writeln!(out, "tolerance = {}", cert.tolerance).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Findbackdoor {
            file,
            cause,
            effect,
            max_size,
        } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let s = resolve_set(model.dag(), cause)?;
            let t = resolve_set(model.dag(), effect)?;
            let sets = model.find_backdoor_sets(&s, &t, *max_size)?;
            if json {
                let as_names: Vec<Vec<String>> =
                    sets.iter().map(|z| set_names(model.dag(), z)).collect();
                emit(
                    out,
                    json!({
                        "command": "findbackdoor",
                        "cause": set_names(model.dag(), &s),
                        "effect": set_names(model.dag(), &t),
                        "max_size": max_size,
                        "sets": as_names,
                    }),
                )?;
            } else {
                for z in &sets {
                    writeln!(out, "{{{}}}", set_names(model.dag(), z).join(", "))
                        .map_err(io_err)?;
                }
            }
            Ok(())
        }
        Command::Dot {
            file,
            r#do,
            out: out_path,
        } => {
            let loaded = format::load_path(file)?;
            let dag = loaded.model.dag();
            let pairs = match r#do {
                Some(items) => resolve_assignments(dag, items)?,
                None => Vec::new(),
            };
            let spec = InterventionSpec::new(pairs)?;
            let mut assigned = vec![String::new(); dag.vertex_count()];
            for (v, val) in spec.iter() {
                assigned[v] = val.to_string();
            }
            let dot = dag.to_dot(&spec.vars(), &assigned)?;
            let payload = if json {
                serde_json::to_string(&json!({"command": "dot", "dot": dot})).expect("serializable")
                    + "\n"
            } else {
                dot
            };
            match out_path {
                Some(path) => std::fs::write(path, payload).map_err(|e| Error::Parse {
                    line: 0,
                    message: format!("cannot write {}: {e}", path.display()),
                })?,
                None => write!(out, "{payload}").map_err(io_err)?,
            }
            Ok(())
        }
        Command::Sample { file, seed, count } => {
            let loaded = format::load_path(file)?;
            let Model::Functional(fm) = &loaded.model else {
                return Err(Error::Unsupported(
                    "sampling requires a functional model".to_string(),
                ));
            };
            let dag = fm.dag();
            let samples = fm.sample_many(*seed, *count);
            if json {
                let rows: Vec<Value> = samples
                    .iter()
                    .map(|a| {
                        let obj: serde_json::Map<String, Value> = dag
                            .labels()
                            .iter()
                            .zip(a.values())
                            .map(|(name, &v)| (name.clone(), json!(v)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                emit(
                    out,
                    json!({"command": "sample", "seed": seed, "count": count, "samples": rows}),
                )?;
            } else {
                for a in &samples {
                    let line = dag
                        .labels()
                        .iter()
                        .zip(a.values())
                        .map(|(name, &v)| format!("{name}={v}"))
                        .collect::<Vec<_>>()
                        .join(" ");
                    writeln!(out, "{line}").map_err(io_err)?;
                }
            }
            Ok(())
        }
        Command::Canonical { file, kind } => {
            let model = format::load_path(file)?.model.to_cpt()?;
            let kind = CanonicalKind::parse(kind).ok_or_else(|| {
                Error::Unsupported(format!("unknown kind `{kind}` (chain, fork, or collider)"))
            })?;
            let report = model.canonical_structure_report(kind)?;
            if json {
                let identities: Vec<Value> = report
                    .identities
                    .iter()
                    .map(|c| {
                        json!({
                            "name": c.name,
                            "lhs": json_info(&c.lhs),
                            "rhs": json_info(&c.rhs),
                            "holds": c.holds,
                        })
                    })
                    .collect();
                emit(
                    out,
                    json!({
                        "command": "canonical",
                        "kind": report.kind.to_string(),
                        "directed_information": {
                            "x_to_y": json_info(&report.di_x_to_y),
                            "y_to_x": json_info(&report.di_y_to_x),
                            "y_to_z": json_info(&report.di_y_to_z),
                            "z_to_y": json_info(&report.di_z_to_y),
                            "x_to_z": json_info(&report.di_x_to_z),
                            "z_to_x": json_info(&report.di_z_to_x),
                        },
                        "mutual_information": {
                            "xy": json_info(&report.mi_xy),
                            "yz": json_info(&report.mi_yz),
                            "xz": json_info(&report.mi_xz),
                        },
                        "identities": identities,
                        "all_hold": report.all_hold(),
                    }),
                )?;
            } else {
                writeln!(out, "kind = {}", report.kind).map_err(io_err)?;
                for (label, v) in [
                    ("I(X->Y)", &report.di_x_to_y),
                    ("I(Y->X)", &report.di_y_to_x),
                    ("I(Y->Z)", &report.di_y_to_z),
                    ("I(Z->Y)", &report.di_z_to_y),
                    ("I(X->Z)", &report.di_x_to_z),
                    ("I(Z->X)", &report.di_z_to_x),
                    ("I(X;Y)", &report.mi_xy),
                    ("I(Y;Z)", &report.mi_yz),
                    ("I(X;Z)", &report.mi_xz),
                ] {
                    writeln!(out, "{label} = {} bits", fmt_info(v)).map_err(io_err)?;
                }
                for c in &report.identities {
                    writeln!(
                        out,
                        "identity {}: {}",
                        c.name,
                        if c.holds { "ok" } else { "VIOLATED" }
                    )
                    .map_err(io_err)?;
                }
                writeln!(out, "all identities hold: {}", report.all_hold()).map_err(io_err)?;
            }
            Ok(())
        }
    }
}

fn emit(out: &mut impl Write, value: Value) -> Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string(&value).expect("serializable")
    )
    .map_err(io_err)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Unsupported(format!("io error: {e}"))
}
