//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for negative findings under `--strict`,
//! 2 for input errors and failed checks.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use crate::analysis::{analyze, render_text, AnalysisOptions};
use crate::catalog::{catalog_entries, find_entry, verify_entry, CatalogEntry, EntryVerification};
use crate::cohomology::{cohomology_group, splitting_equivalence, GModule};
use crate::cryst::reduce_translations;
use crate::error::{Error, Result};
use crate::io::{parse_group, parse_group_spec, parse_overlattice, rat_strings, GroupSpec, OverlatticeSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "bieberbach", version, about = "Exact analysis of Euclidean crystallographic groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the cocycle identities of a group description.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Run the full analysis.
    Analyze {
        file: PathBuf,
        /// Construct and verify a complex structure for every Hodge type.
        #[arg(long)]
        sample_structure: bool,
        /// Exit with status 1 if the group has torsion or is not even.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Group cohomology in degree 1 or 2.
    Cohomology {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        degree: u8,
        /// `lattice`, `scaled:<d>` or `quotient:<overlattice file>`.
        #[arg(long, default_value = "lattice")]
        coefficients: String,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate the three splitting criteria over an overlattice.
    Split {
        file: PathBuf,
        #[arg(long)]
        overlattice: PathBuf,
        /// Exit with status 1 if the extension does not split.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Absorb pure translations into the lattice.
    Reduce {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Built-in example groups.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List {
        #[command(flatten)]
        out: Output,
    },
    Verify {
        name: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Print entries as group input files.
    Export { name: Option<String> },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    writeln!(w, "{text}").map_err(|e| Error::Internal(e.to_string()))
}

fn emit(w: &mut dyn Write, text: &str) -> Result<()> {
    write!(w, "{text}").map_err(|e| Error::Internal(e.to_string()))
}

fn numbers(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn dispatch(command: Command, w: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { file, out } => validate(&file, out.format, w),
        Command::Analyze {
            file,
            sample_structure,
            strict,
            out,
        } => {
            let c = parse_group(&read(&file)?)?;
            let report = analyze(&c, AnalysisOptions { sample_structure })?;
            match out.format {
                Format::Json => emit_json(w, &report)?,
                Format::Text => emit(w, &render_text(&report))?,
            }
            let negative = !report.torsion.torsion_free || !report.evenness.even;
            Ok(if strict && negative { EXIT_NEGATIVE } else { EXIT_OK })
        }
        Command::Cohomology {
            file,
            degree,
            coefficients,
            out,
        } => cohomology(&file, degree as usize, &coefficients, out.format, w),
        Command::Split {
            file,
            overlattice,
            strict,
            out,
        } => split(&file, &overlattice, strict, out.format, w),
        Command::Reduce { file, out } => reduce(&file, out.format, w),
        Command::Catalog { action } => catalog(action, w),
    }
}

#[derive(Serialize)]
struct ValidateOutput {
    valid: bool,
    order: usize,
    violations: Vec<String>,
}

fn validate(file: &Path, format: Format, w: &mut dyn Write) -> Result<i32> {
    let c = parse_group(&read(file)?)?;
    let report = c.validate();
    let out = ValidateOutput {
        valid: report.is_valid(),
        order: c.order(),
        violations: report.violations.iter().map(|v| v.to_string()).collect(),
    };
    match format {
        Format::Json => emit_json(w, &out)?,
        Format::Text => {
            let mut text = format!("point group of order {}: {}\n", out.order, if out.valid { "valid" } else { "invalid" });
            for v in &out.violations {
                text.push_str(&format!("  {v}\n"));
            }
            emit(w, &text)?;
        }
    }
    Ok(if out.valid { EXIT_OK } else { EXIT_ERROR })
}

#[derive(Serialize)]
struct CohomologyOutput {
    degree: usize,
    coefficients: String,
    invariant_factors: Vec<String>,
    order: String,
}

fn cohomology(file: &Path, degree: usize, coefficients: &str, format: Format, w: &mut dyn Write) -> Result<i32> {
    let c = parse_group(&read(file)?)?;
    c.require_valid()?;
    let group = c.group();
    let module = match coefficients.split_once(':') {
        None if coefficients == "lattice" => GModule::lattice(group),
        Some(("scaled", d)) => {
            let d: BigInt = d
                .parse()
                .map_err(|_| Error::Parse(format!("invalid scale {d:?}")))?;
            GModule::scaled(group, d)?
        }
        Some(("quotient", path)) => GModule::quotient(group, &parse_overlattice(&read(Path::new(path))?)?)?,
        _ => {
            return Err(Error::Parse(format!(
                "coefficients must be lattice, scaled:<d> or quotient:<file>, got {coefficients:?}"
            )))
        }
    };
    let h = cohomology_group(&module, degree)?;
    let out = CohomologyOutput {
        degree,
        coefficients: coefficients.into(),
        invariant_factors: numbers(h.invariant_factors()),
        order: h.order().map_or_else(|| "infinite".into(), |o| o.to_string()),
    };
    match format {
        Format::Json => emit_json(w, &out)?,
        Format::Text => {
            let name = if out.invariant_factors.is_empty() {
                "0".to_string()
            } else {
                out.invariant_factors.iter().map(|f| format!("Z/{f}")).collect::<Vec<_>>().join(" + ")
            };
            emit(w, &format!("H^{degree}(G, {coefficients}) = {name}\n"))?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SplitOutput {
    overlattice: OverlatticeSpec,
    index: String,
    realization: bool,
    realization_shift: Option<Vec<String>>,
    class_vanishes: bool,
    class_coords: Vec<String>,
    h2_invariant_factors: Vec<String>,
    fixed_point: bool,
    fixed_point_count: String,
    fixed_points: Vec<Vec<String>>,
}

fn split(file: &Path, lattice: &Path, strict: bool, format: Format, w: &mut dyn Write) -> Result<i32> {
    let c = parse_group(&read(file)?)?;
    let l = parse_overlattice(&read(lattice)?)?;
    let r = splitting_equivalence(&c, &l)?;
    let out = SplitOutput {
        overlattice: OverlatticeSpec::from_overlattice(&l),
        index: l.index().to_string(),
        realization: r.realization,
        realization_shift: r.realization_shift.as_ref().map(rat_strings),
        class_vanishes: r.class_vanishes,
        class_coords: numbers(&r.class_coords),
        h2_invariant_factors: numbers(&r.h2_invariant_factors),
        fixed_point: r.fixed_point,
        fixed_point_count: r.fixed_points.count.to_string(),
        fixed_points: r.fixed_points.points.iter().map(rat_strings).collect(),
    };
    match format {
        Format::Json => emit_json(w, &out)?,
        Format::Text => {
            let mut t = format!("overlattice of index {}\n", out.index);
            t.push_str(&format!("  realization over it: {}", out.realization));
            if let Some(s) = &out.realization_shift {
                t.push_str(&format!(" (w = ({}))", s.join(", ")));
            }
            t.push_str(&format!("\n  extension class vanishes: {}\n", out.class_vanishes));
            t.push_str(&format!(
                "  affine fixed point: {} ({} on the search grid)\n",
                out.fixed_point, out.fixed_point_count
            ));
            for p in &out.fixed_points {
                t.push_str(&format!("    [{}]\n", p.join(", ")));
            }
            emit(w, &t)?;
        }
    }
    Ok(if strict && !r.splits() { EXIT_NEGATIVE } else { EXIT_OK })
}

#[derive(Serialize)]
struct ReduceOutput {
    group: GroupSpec,
    basis: Vec<Vec<String>>,
    translation_quotient: Vec<String>,
}

fn reduce(file: &Path, format: Format, w: &mut dyn Write) -> Result<i32> {
    let spec = parse_group_spec(&read(file)?)?;
    let r = reduce_translations(spec.rank, &spec.affine_generators()?)?;
    let out = ReduceOutput {
        group: GroupSpec::from_group(&r.group),
        basis: (0..r.basis.cols()).map(|j| rat_strings(&r.basis.column(j))).collect(),
        translation_quotient: numbers(r.translation_quotient.invariant_factors()),
    };
    match format {
        Format::Json => emit_json(w, &out)?,
        Format::Text => {
            let mut t = String::from("lattice basis:\n");
            for b in &out.basis {
                t.push_str(&format!("  ({})\n", b.join(", ")));
            }
            t.push_str(&format!(
                "translation quotient: {}\nreduced group (point group of order {}):\n{}\n",
                if out.translation_quotient.is_empty() {
                    "trivial".to_string()
                } else {
                    out.translation_quotient.iter().map(|f| format!("Z/{f}")).collect::<Vec<_>>().join(" + ")
                },
                r.group.order(),
                out.group.to_json()
            ));
            emit(w, &t)?;
        }
    }
    Ok(EXIT_OK)
}

fn select(name: Option<String>) -> Result<Vec<CatalogEntry>> {
    match name {
        None => Ok(catalog_entries()),
        Some(n) => find_entry(&n)
            .map(|e| vec![e])
            .ok_or_else(|| Error::Parse(format!("no catalog entry named {n:?}"))),
    }
}

#[derive(Serialize)]
struct ListItem {
    name: String,
    rank: usize,
    description: String,
}

#[derive(Serialize)]
struct ExportItem {
    name: String,
    group: GroupSpec,
}

fn catalog(action: CatalogAction, w: &mut dyn Write) -> Result<i32> {
    match action {
        CatalogAction::List { out } => {
            let entries = catalog_entries();
            match out.format {
                Format::Json => emit_json(
                    w,
                    &entries
                        .iter()
                        .map(|e| ListItem {
                            name: e.name.clone(),
                            rank: e.group.rank,
                            description: e.description.clone(),
                        })
                        .collect::<Vec<_>>(),
                )?,
                Format::Text => {
                    let text: String = entries
                        .iter()
                        .map(|e| format!("{:<20} rank {}  {}\n", e.name, e.group.rank, e.description))
                        .collect();
                    emit(w, &text)?;
                }
            }
            Ok(EXIT_OK)
        }
        CatalogAction::Verify { name, out } => {
            let entries = select(name)?;
            let results: Vec<EntryVerification> = std::thread::scope(|s| {
                let handles: Vec<_> = entries.iter().map(|e| s.spawn(move || verify_entry(e))).collect();
                handles.into_iter().map(|h| h.join().expect("verification thread")).collect()
            });
            match out.format {
                Format::Json => emit_json(w, &results)?,
                Format::Text => {
                    let mut t = String::new();
                    for r in &results {
                        t.push_str(&format!("{:<20} {}\n", r.name, if r.passed { "pass" } else { "FAIL" }));
                        for d in &r.diffs {
                            t.push_str(&format!("    {}: expected {}, got {}\n", d.field, d.expected, d.actual));
                        }
                        if let Some(e) = &r.error {
                            t.push_str(&format!("    error: {e}\n"));
                        }
                    }
                    emit(w, &t)?;
                }
            }
            Ok(if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_ERROR })
        }
        CatalogAction::Export { name } => {
            let entries = select(name)?;
            let items: Vec<ExportItem> = entries
                .into_iter()
                .map(|e| ExportItem {
                    name: e.name,
                    group: e.group,
                })
                .collect();
            if items.len() == 1 {
                emit_json(w, &items[0].group)?;
            } else {
                emit_json(w, &items)?;
            }
            Ok(EXIT_OK)
        }
    }
}

