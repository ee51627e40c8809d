//! The `dihom` command line: parse a model, run the pipeline, check the
//! duality and exact-sequence statements on it, and write reports and DOT
//! graphs.
//!
//! Settings resolve as flags, then `DIHOM_*` environment variables, then the
//! input document, then defaults. A failed check exits with status 1 and a
//! JSON witness; unreadable or invalid input exits with status 2.

mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dihom_core::dispace::{Model, ModelDoc, SubspaceDoc};
use dihom_core::dot;
use dihom_core::groth::{build_total_category, duality_iso};
use dihom_core::models;
use dihom_core::report::Report;
use dihom_core::trace::{
    check_h_decomposition, natural_p1, relative_p1, reversal_bijections, swap_complex,
    FundCategory, Grid, Homology,
};

pub use report::{
    AnalyzeReport, DualReport, LesReport, ModelSummary, PairReport, ReverseReport, Witness,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Class counts, representatives and homology for the model's pairs.
    Analyze,
    /// The time-reversed model and its symmetry.
    Reverse,
    /// Duality between the total categories of a model and its reversal.
    DualCheck,
    /// Exactness of the relative tail for the model's subspace.
    LesCheck,
    /// DOT graphs of the grid, fundamental category, total category and
    /// swap complexes.
    Export,
}

/// Resolved settings for one run.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "dihom",
    version,
    about = "Directed homotopy invariants of box-complement models"
)]
pub struct AnalysisConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Model document, or `bundled:NAME` for a bundled example.
    #[arg(long, global = true, env = "DIHOM_INPUT")]
    pub input: Option<String>,
    /// Uniform refinement factor; overrides the document's.
    #[arg(long, global = true, env = "DIHOM_REFINE", value_parser = clap::value_parser!(u32).range(1..))]
    pub refine: Option<u32>,
    /// Natural homology degrees to report.
    #[arg(long, global = true, env = "DIHOM_DEGREES", value_delimiter = ',', default_value = "1,2",
          value_parser = clap::value_parser!(u8).range(1..=2))]
    pub degrees: Vec<u8>,
    /// Directory for the report and DOT files.
    #[arg(long, global = true, env = "DIHOM_OUT")]
    pub out: Option<PathBuf>,
    #[arg(
        long,
        global = true,
        env = "DIHOM_FORMAT",
        value_enum,
        default_value = "text"
    )]
    pub format: Format,
    /// Subspace document; replaces the model's own subspace.
    #[arg(long, global = true, env = "DIHOM_SUBSPACE")]
    pub subspace: Option<PathBuf>,
}

/// Result of a run: exit status, what to print, and files written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: u8,
    pub output: String,
    pub files: Vec<PathBuf>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Parses the input document, applying `--subspace` and `--refine`.
pub fn load_model(config: &AnalysisConfig) -> Result<Model> {
    let input = config
        .input
        .as_deref()
        .context("no input model (use --input or DIHOM_INPUT)")?;
    let text = match input.strip_prefix("bundled:") {
        Some(name) => models::BUNDLED
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, t)| t.to_string())
            .with_context(|| format!("no bundled model {name}"))?,
        None => read_text(Path::new(input))?,
    };
    let mut doc: ModelDoc =
        serde_json::from_str(&text).with_context(|| format!("parsing {input}"))?;
    if let Some(path) = &config.subspace {
        let sub: SubspaceDoc = serde_json::from_str(&read_text(path)?)
            .with_context(|| format!("parsing {}", path.display()))?;
        doc.subspace = Some(sub);
    }
    Model::from_doc(&doc, config.refine).with_context(|| format!("invalid model {input}"))
}

fn fund(model: &Model) -> FundCategory {
    FundCategory::new(Arc::new(Grid::new(model.space.region())))
}

/// Named pairs of the document, or the two box corners when it has none.
fn pairs(model: &Model, grid: &Grid) -> Result<Vec<(String, String, usize, usize)>> {
    if model.pairs.is_empty() {
        let lo = vec![0; model.space.dim()];
        let hi = model.space.bounds().to_vec();
        return match (grid.index_of(&lo), grid.index_of(&hi)) {
            (Ok(x), Ok(y)) => Ok(vec![("lo".into(), "hi".into(), x, y)]),
            _ => Ok(vec![]),
        };
    }
    model
        .pairs
        .iter()
        .map(|(a, b)| {
            let x = grid.index_of(model.point(a)?)?;
            let y = grid.index_of(model.point(b)?)?;
            Ok((a.clone(), b.clone(), x, y))
        })
        .collect()
}

fn summary(model: &Model, fc: &FundCategory) -> ModelSummary {
    ModelSummary {
        name: model.name.clone(),
        dim: model.space.dim(),
        bounds: model.space.bounds().to_vec(),
        holes: model.space.holes().len(),
        scale: model.scale.to_string(),
        vertices: fc.grid().num_vertices(),
        morphisms: fc.category().num_morphisms(),
    }
}

fn word(w: &[u8]) -> String {
    w.iter().map(|a| a.to_string()).collect()
}

fn analyze(model: &Model, degrees: &[u8]) -> Result<(AnalyzeReport, Report)> {
    let fc = fund(model);
    let grid = fc.grid();
    let mut checks = Report::new();
    let mut out = Vec::new();
    for (a, b, x, y) in pairs(model, grid)? {
        let count = fc.table().count(x, y);
        let mut homology = BTreeMap::new();
        if count > 0 {
            let h = Homology::new(&swap_complex(grid, x, y))?;
            for &n in degrees {
                let value = if n == 1 { &h.h0 } else { &h.h1 };
                homology.insert(format!("H_{n}"), value.to_string());
            }
            checks.extend_with_context(&format!("({a}, {b})"), check_h_decomposition(grid, x, y)?);
        }
        out.push(PairReport {
            source: a,
            target: b,
            source_vertex: grid.vertex(x).to_vec(),
            target_vertex: grid.vertex(y).to_vec(),
            classes: count,
            representatives: (0..count).map(|c| word(fc.table().rep(x, y, c))).collect(),
            homology,
        });
    }
    Ok((
        AnalyzeReport {
            model: summary(model, &fc),
            pairs: out,
            violations: checks.len(),
        },
        checks,
    ))
}

fn reverse(model: &Model) -> Result<(ReverseReport, Report)> {
    let rev = model.reverse();
    let (f, r) = (fund(model), fund(&rev));
    let mut checks = Report::new();
    let mut counts = Vec::new();
    for (a, b, x, y) in pairs(model, f.grid())? {
        let xs = r.grid().index_of(rev.point(&a)?)?;
        let ys = r.grid().index_of(rev.point(&b)?)?;
        let (n, ns) = (f.table().count(x, y), r.table().count(ys, xs));
        if n != ns {
            checks.push(
                "class count",
                format!("({a}, {b}): {n} forward, {ns} reversed"),
            );
        }
        counts.push((format!("{b}#"), format!("{a}#"), ns));
    }
    let report = ReverseReport {
        model: summary(&rev, &r),
        holes: rev
            .space
            .holes()
            .iter()
            .map(|h| (h.lo.clone(), h.hi.clone()))
            .collect(),
        points: rev.points.clone(),
        time_symmetry: model.space.time_symmetry(),
        time_contractible: model.space.is_time_contractible(),
        reversed_pairs: counts,
    };
    Ok((report, checks))
}

fn dual_check(model: &Model) -> Result<(DualReport, Report)> {
    let rev = model.reverse();
    let (fwd, bwd) = (fund(model), fund(&rev));
    let iso = reversal_bijections(&fwd, &bwd, model.space.bounds())?;
    let mut checks = iso.check_bijections(&bwd, &fwd);
    let total = |fc: &FundCategory| -> Result<_> {
        let (d, nu) = natural_p1(fc);
        Ok(build_total_category(d, nu)?.materialize()?)
    };
    let (tf, tr) = (total(&fwd)?, total(&bwd)?);
    let (_, r) = duality_iso(&tf, &tr, &iso.functor, |f, c| iso.element(&bwd, &fwd, f, c));
    checks.extend(r);
    let t = tr.total();
    let mut tallies = BTreeMap::new();
    for x in 0..t.num_objects() {
        for y in 0..t.num_objects() {
            let n = t.hom(x, y).len();
            if n > 0 {
                *tallies.entry(n).or_insert(0usize) += 1;
            }
        }
    }
    Ok((
        DualReport {
            model: summary(model, &fwd),
            arrows: t.num_morphisms(),
            composites: t.composable_pairs().count(),
            hom_set_sizes: tallies,
            verified: checks.is_clean(),
        },
        checks,
    ))
}

fn les_check(model: &Model) -> Result<(LesReport, Report)> {
    let sub = model
        .subspace
        .as_ref()
        .context("les-check needs a subspace (in the document or via --subspace)")?;
    let fx = fund(model);
    let fa = FundCategory::new(Arc::new(Grid::new(sub.region())));
    let rel = relative_p1(&fx, &fa)?;
    let checks = rel.check();
    let classes = fa.category().num_morphisms();
    let positions = if classes == 0 {
        0
    } else {
        rel.tail(0).maps.len() - 1
    };
    Ok((
        LesReport {
            model: summary(model, &fx),
            subspace_vertices: fa.grid().num_vertices(),
            classes,
            positions,
            collapsed: (0..classes)
                .filter(|&f| rel.p1_rel.value(f).size < rel.p1_x.value(f).size)
                .count(),
            exact: checks.is_clean(),
        },
        checks,
    ))
}

fn export(model: &Model, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let fc = fund(model);
    let grid = fc.grid();
    let mut files = vec![
        ("grid.dot".to_string(), dot::grid_dot(grid, &model.name)),
        (
            "fundamental.dot".to_string(),
            dot::fundamental_dot(&fc, &model.name),
        ),
    ];
    let (d, nu) = natural_p1(&fc);
    let total = build_total_category(d, nu)?.materialize()?;
    files.push((
        "total.dot".into(),
        dot::category_dot(total.total(), &format!("{} total", model.name)),
    ));
    for (a, b, x, y) in pairs(model, grid)? {
        let sc = swap_complex(grid, x, y);
        files.push((
            format!("swap_{a}_{b}.dot"),
            dot::swap_complex_dot(&sc, &format!("{a} -> {b}")),
        ));
    }
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

/// Appends the JSON witness for a failed check; returns the exit status.
fn conclude(command: Command, model: &str, checks: Report, output: &mut String) -> Result<u8> {
    if checks.is_clean() {
        return Ok(0);
    }
    let witness = Witness {
        command: format!("{command:?}").to_lowercase(),
        model: model.to_string(),
        violations: checks.violations,
    };
    output.push_str(&serde_json::to_string_pretty(&witness)?);
    output.push('\n');
    Ok(1)
}

/// Runs one command. Errors are input problems; failed checks come back as
/// an [`Outcome`] with status 1.
pub fn run(config: &AnalysisConfig) -> Result<Outcome> {
    let model = load_model(config)?;
    let mut files = Vec::new();
    let (text, json, checks) = match config.command {
        Command::Analyze => {
            let (r, c) = analyze(&model, &config.degrees)?;
            (r.to_text(), serde_json::to_string_pretty(&r)?, c)
        }
        Command::Reverse => {
            let (r, c) = reverse(&model)?;
            (r.to_text(), serde_json::to_string_pretty(&r)?, c)
        }
        Command::DualCheck => {
            let (r, c) = dual_check(&model)?;
            (r.to_text(), serde_json::to_string_pretty(&r)?, c)
        }
        Command::LesCheck => {
            let (r, c) = les_check(&model)?;
            (r.to_text(), serde_json::to_string_pretty(&r)?, c)
        }
        Command::Export => {
            let Some(dir) = &config.out else {
                bail!("export needs --out DIR")
            };
            files = export(&model, dir)?;
            let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
            let json = serde_json::to_string_pretty(&names)?;
            (
                names.iter().map(|n| format!("wrote {n}\n")).collect(),
                json,
                Report::new(),
            )
        }
    };
    let mut output = match config.format {
        Format::Text => text,
        Format::Structured => json + "\n",
    };
    if let (Some(dir), false) = (&config.out, config.command == Command::Export) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let name = match config.format {
            Format::Text => "report.txt",
            Format::Structured => "report.json",
        };
        let path = dir.join(name);
        fs::write(&path, &output).with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
    }
    let status = conclude(config.command, &model.name, checks, &mut output)?;
    Ok(Outcome {
        status,
        output,
        files,
    })
}
