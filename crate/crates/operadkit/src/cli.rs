//! Command-line front end.
//!
//! ```text
//! operadkit <VERB> [--model M] [--n N] [--stage N] [--format json|dot|table]
//!                  [--seed S] [--bound B] [--allow-large] [--out PATH]
//! ```
//!
//! Exit status is 0 on success or PASS, 2 on FAIL and 1 on usage errors.
//! `OPERADKIT_BOUND` replaces the default bound of 6.

use crate::b_construction::{assemble_b_bar, cube_carriers, quotient_b};
use crate::classic_models::{
    build_complex, check_axioms, check_corrupted_triangle, AxiomReport, Model, ModelId, DEFAULT_SEED,
};
use crate::complexes::{check_refinement, CellComplex};
use crate::tilde_models::{
    check_tilde_axioms, generating_cells, BaseModel, HairyConfig, HairyLine, MetricTree, TildeModel, TILDE_SAMPLES,
};
use crate::towers::{delooping_ladder, fiber_report, schedule, TowerError, TowerModel, EXCEPTIONAL_CELLS};
use crate::wb_construction::{assemble_wb_bar, quotient_wb, wb_cells};
use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

pub const DEFAULT_BOUND: usize = 6;
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Enumerate,
    Build,
    Fvector,
    Euler,
    Homology,
    Axioms,
    Schedule,
    Ladder,
    Fibers,
    Refine,
    Dump,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliModel {
    Triangle,
    Square,
    SquareUnit,
    Pentagon,
    WbSquare,
    WbSquareBar,
    BPentagon,
    BPentagonBar,
    TriangleTilde,
    SquareTilde,
    PentagonTilde,
    WbSquareTilde,
    BPentagonTilde,
    /// Negative control: a right action that breaks one axiom.
    CorruptedTriangle,
    /// Negative control: a refinement map into a vertex.
    DimensionRaising,
}

impl CliModel {
    fn name(self) -> String {
        self.to_possible_value().expect("named variant").get_name().to_string()
    }

    fn tower(self) -> Option<TowerModel> {
        TowerModel::from_name(&self.name())
    }

    fn tilde_base(self) -> Option<BaseModel> {
        self.tower().and_then(TowerModel::tilde).map(TildeModel::base)
    }
}

#[derive(Debug, Parser)]
#[command(name = "operadkit", version, about = "Cell complexes and filtered models of planar-tree operads")]
pub struct Args {
    pub verb: Verb,
    #[arg(long, value_enum)]
    pub model: Option<CliModel>,
    /// Arity (degree) of the complex, or the arity bound for `axioms`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Filtration stage.
    #[arg(long)]
    pub stage: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "OPERADKIT_BOUND")]
    pub bound: Option<usize>,
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug)]
enum Outcome {
    Ok(String),
    Pass(String),
    Fail(String),
    Usage(String),
}

fn usage(msg: impl Into<String>) -> Outcome {
    Outcome::Usage(msg.into())
}

/// Parses `argv` (program name first), runs the verb and writes its output
/// to `--out` or `stdout`. Returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (code, text) = match execute(&args) {
        Outcome::Ok(s) | Outcome::Pass(s) => (EXIT_OK, s),
        Outcome::Fail(s) => (EXIT_FAIL, s),
        Outcome::Usage(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    code
}

struct Ctx<'a> {
    args: &'a Args,
    bound: usize,
    seed: u64,
}

impl Ctx<'_> {
    fn model(&self) -> Result<CliModel, Outcome> {
        self.args.model.ok_or_else(|| usage(format!("{:?} needs --model", self.args.verb).to_lowercase()))
    }

    fn n(&self) -> Result<usize, Outcome> {
        self.args.n.ok_or_else(|| usage("--n is required"))
    }

    fn stage(&self) -> Result<usize, Outcome> {
        self.args.stage.or(self.args.n).ok_or_else(|| usage("--stage is required"))
    }

    /// Refuses sizes beyond the bound unless `--allow-large` is given.
    fn guard(&self, size: usize, estimate: impl FnOnce() -> String) -> Result<usize, Outcome> {
        if size > self.bound && !self.args.allow_large {
            return Err(usage(format!(
                "{size} exceeds the bound {} ({}); pass --allow-large or raise --bound",
                self.bound,
                estimate()
            )));
        }
        Ok(self.bound.max(size))
    }

    fn unsupported(&self, model: CliModel) -> Outcome {
        usage(format!("{} does not support model {}", format!("{:?}", self.args.verb).to_lowercase(), model.name()))
    }
}

fn execute(args: &Args) -> Outcome {
    let ctx = Ctx {
        args,
        bound: args.bound.unwrap_or(DEFAULT_BOUND),
        seed: args.seed.unwrap_or(DEFAULT_SEED),
    };
    let r = match args.verb {
        Verb::Enumerate => enumerate(&ctx),
        Verb::Build => build(&ctx),
        Verb::Fvector | Verb::Euler | Verb::Homology => invariant(&ctx),
        Verb::Axioms => axioms(&ctx),
        Verb::Schedule => schedule_verb(&ctx),
        Verb::Ladder => ladder(&ctx),
        Verb::Fibers => fibers(&ctx),
        Verb::Refine => refine(&ctx),
        Verb::Dump => dump(&ctx),
    };
    r.unwrap_or_else(|o| o)
}

fn pow(b: u128, e: usize) -> u128 {
    (0..e).fold(1u128, |a, _| a.saturating_mul(b))
}

fn catalan(n: usize) -> u128 {
    (0..n).fold(1u128, |c, i| c.saturating_mul(2 * (2 * i as u128 + 1)) / (i as u128 + 2))
}

/// Lower bound on the number of cells in degree `n`.
fn cell_estimate(model: CliModel, n: usize) -> String {
    let k = n.saturating_sub(1);
    let cells = match model {
        CliModel::Triangle => pow(2, n + 1) - 1,
        CliModel::Square | CliModel::SquareUnit | CliModel::BPentagon | CliModel::BPentagonBar => pow(3, k),
        CliModel::Pentagon => catalan(k),
        _ => pow(3, k).saturating_mul(pow(2, k)),
    };
    format!("at least {cells} cells")
}

fn complex_of(ctx: &Ctx, model: CliModel, n: usize) -> Result<CellComplex, Outcome> {
    let bound = ctx.guard(n, || cell_estimate(model, n))?;
    let built = match model {
        CliModel::Triangle => build_complex(Model::Triangle, n, bound).map_err(|e| e.to_string()),
        CliModel::Square => build_complex(Model::Square, n, bound).map_err(|e| e.to_string()),
        CliModel::SquareUnit => build_complex(Model::SquareWithUnit, n, bound).map_err(|e| e.to_string()),
        CliModel::Pentagon => build_complex(Model::Pentagon, n, bound).map_err(|e| e.to_string()),
        CliModel::WbSquare => quotient_wb(n, bound).map_err(|e| e.to_string()),
        CliModel::WbSquareBar => assemble_wb_bar(n, bound).map_err(|e| e.to_string()),
        CliModel::BPentagon => quotient_b(n, bound).map_err(|e| e.to_string()),
        CliModel::BPentagonBar => assemble_b_bar(n, bound).map_err(|e| e.to_string()),
        other => return Err(ctx.unsupported(other)),
    };
    built.map_err(usage)
}

fn complex_table(cx: &CellComplex) -> String {
    let mut s = String::new();
    for (i, c) in cx.cells().iter().enumerate() {
        let faces: Vec<String> = cx
            .boundary(i)
            .iter()
            .map(|&(j, m)| if m == 1 { cx.cell(j).label.clone() } else { format!("{}^{m}", cx.cell(j).label) })
            .collect();
        let _ = writeln!(s, "{}\t{}\t{}\t{}", c.dim, c.degree, c.label, faces.join(" "));
    }
    s
}

fn enumerate(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let model = ctx.model()?;
    if let Some(base) = model.tilde_base() {
        let stage = ctx.stage()?;
        ctx.guard(stage, || format!("{} generating cells", pow(2, stage + 1)))?;
        let keys: Vec<_> = (0..=stage).flat_map(|s| generating_cells(base, s)).collect();
        return Ok(Outcome::Ok(match ctx.args.format {
            Format::Json => {
                let v: Vec<_> = keys
                    .iter()
                    .map(|k| json!({"cell": k.to_string(), "stage": k.stage(), "degree": k.n, "corks": k.alpha, "dim": k.dim()}))
                    .collect();
                format!("{}\n", serde_json::Value::Array(v))
            }
            Format::Table => keys.iter().map(|k| format!("{}\t{}\t{}\t{}\n", k.stage(), k.n, k.dim(), k)).collect(),
            Format::Dot => return Err(usage("enumerate has no dot output")),
        }));
    }
    let cx = complex_of(ctx, model, ctx.n()?)?;
    Ok(Outcome::Ok(match ctx.args.format {
        Format::Json => {
            let v: Vec<_> = cx.cells().iter().map(|c| json!({"label": c.label, "dim": c.dim, "degree": c.degree})).collect();
            format!("{}\n", serde_json::Value::Array(v))
        }
        Format::Table => cx.cells().iter().map(|c| format!("{}\t{}\n", c.dim, c.label)).collect(),
        Format::Dot => return Err(usage("enumerate has no dot output")),
    }))
}

fn build(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let model = ctx.model()?;
    let n = ctx.n()?;
    let cx = complex_of(ctx, model, n)?;
    Ok(Outcome::Ok(match ctx.args.format {
        Format::Dot => cx.to_dot(&format!("{}({n})", model.name())),
        Format::Json => format!("{}\n", cx.to_json()),
        Format::Table => complex_table(&cx),
    }))
}

fn dump(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let model = ctx.model()?;
    let n = ctx.n()?;
    if ctx.args.format == Format::Dot {
        return Err(usage("dump writes json or table"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let points: Vec<(String, serde_json::Value)> = match model {
        CliModel::TriangleTilde | CliModel::SquareTilde | CliModel::PentagonTilde => {
            ctx.guard(n, || format!("points of arity up to {n}"))?;
            (0..10)
                .map(|_| match model {
                    CliModel::TriangleTilde => {
                        let c = HairyConfig::random(&mut rng, n, 3, 6);
                        (c.to_string(), c.to_json())
                    }
                    CliModel::SquareTilde => {
                        let c = HairyLine::random(&mut rng, n, 3, 4);
                        (c.to_string(), c.to_json())
                    }
                    _ => {
                        let t = MetricTree::random(&mut rng, n, 2, 4);
                        (t.to_string(), t.to_json())
                    }
                })
                .collect()
        }
        _ => {
            let cx = complex_of(ctx, model, n)?;
            return Ok(Outcome::Ok(match ctx.args.format {
                Format::Json => format!("{}\n", cx.to_json()),
                _ => complex_table(&cx),
            }));
        }
    };
    Ok(Outcome::Ok(match ctx.args.format {
        Format::Json => {
            let v = json!({"model": model.name(), "seed": ctx.seed, "points": points.iter().map(|p| &p.1).collect::<Vec<_>>()});
            format!("{v}\n")
        }
        _ => points.iter().map(|p| format!("{}\n", p.0)).collect(),
    }))
}

fn invariant(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let model = ctx.model()?;
    let cx = complex_of(ctx, model, ctx.n()?)?;
    let (key, values): (&str, Vec<i64>) = match ctx.args.verb {
        Verb::Fvector => ("fvector", cx.f_vector().0.iter().map(|&x| x as i64).collect()),
        Verb::Euler => ("euler", vec![cx.euler_characteristic()]),
        _ => ("betti", cx.homology_mod2().iter().map(|&x| x as i64).collect()),
    };
    let words: Vec<String> = values.iter().map(i64::to_string).collect();
    Ok(Outcome::Ok(match ctx.args.format {
        Format::Json if key == "euler" => format!("{}\n", json!({ key: values[0] })),
        Format::Json => format!("{}\n", json!({ key: values })),
        Format::Table => format!("{}\n", words.join(" ")),
        Format::Dot => return Err(usage(format!("{key} has no dot output"))),
    }))
}

fn verdict(passed: bool, summary: String, detail: String) -> Outcome {
    let text = format!("{} {summary}\n{detail}", if passed { "PASS" } else { "FAIL" });
    if passed {
        Outcome::Pass(text)
    } else {
        Outcome::Fail(text)
    }
}

fn detail_format(ctx: &Ctx) -> Result<Format, Outcome> {
    match ctx.args.format {
        Format::Dot => Err(usage("verification verbs write json or table")),
        f => Ok(f),
    }
}

fn axioms(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let model = ctx.model()?;
    let format = detail_format(ctx)?;
    let bound = ctx.args.n.unwrap_or(5);
    ctx.guard(bound, || format!("axiom instances grow like {}^3", pow(2, bound)))?;
    let report: AxiomReport = match model {
        CliModel::Triangle => check_axioms(ModelId::default_for(Model::Triangle), bound, TILDE_SAMPLES, ctx.seed),
        CliModel::Square => check_axioms(ModelId::default_for(Model::Square), bound, TILDE_SAMPLES, ctx.seed),
        CliModel::SquareUnit => check_axioms(ModelId::default_for(Model::SquareWithUnit), bound, TILDE_SAMPLES, ctx.seed),
        CliModel::Pentagon => check_axioms(ModelId::default_for(Model::Pentagon), bound, TILDE_SAMPLES, ctx.seed),
        CliModel::CorruptedTriangle => check_corrupted_triangle(bound, TILDE_SAMPLES, ctx.seed),
        other => match other.tower().and_then(TowerModel::tilde) {
            Some(t) => check_tilde_axioms(t, bound, TILDE_SAMPLES, Some(ctx.seed)).ok_or_else(|| ctx.unsupported(other))?,
            None => return Err(ctx.unsupported(other)),
        },
    };
    let failing = report.failing_axioms();
    let summary = if failing.is_empty() {
        format!("axioms {} ({} instances, seed {})", model.name(), report.total_instances(), ctx.seed)
    } else {
        format!("axioms {}: failing {}", model.name(), failing.join(","))
    };
    let detail = match format {
        Format::Json => format!("{}\n", serde_json::to_string(&report).expect("report serialization")),
        _ => report
            .results
            .iter()
            .map(|r| {
                let mut line = format!("{}\t{}\t{}\t{}", r.axiom, r.level, r.instances, r.failures);
                if let Some(c) = &r.counterexample {
                    line.push('\t');
                    line.push_str(c);
                }
                line.push('\n');
                line
            })
            .collect(),
    };
    Ok(verdict(report.passed(), summary, detail))
}

fn schedule_verb(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let model = ctx.model()?;
    let format = detail_format(ctx)?;
    let tower = model.tower().ok_or_else(|| ctx.unsupported(model))?;
    let stage = ctx.stage()?;
    let bound = ctx.guard(stage, || cell_estimate(model, stage))?;
    Ok(match schedule(tower, stage, bound) {
        Ok(s) => {
            let detail = match format {
                Format::Json => format!("{}\n", serde_json::to_string(&s).expect("schedule serialization")),
                _ => s.to_table(),
            };
            verdict(true, format!("schedule {} up to stage {stage} matches the census", tower.name()), detail)
        }
        Err(TowerError::Mismatch { diff, .. }) => {
            let detail = match format {
                Format::Json => format!("{}\n", json!({ "diff": diff })),
                _ => diff.iter().map(|l| format!("{l}\n")).collect(),
            };
            verdict(false, format!("schedule {} differs from the census", tower.name()), detail)
        }
        Err(e) => verdict(false, format!("schedule {}: {e}", tower.name()), String::new()),
    })
}

fn ladder(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let format = detail_format(ctx)?;
    let stage = ctx.args.stage.unwrap_or(ctx.bound);
    ctx.guard(stage, || format!("{} generating cells", pow(2, stage + 1)))?;
    let report = delooping_ladder(stage);
    let unmatched = report.unmatched();
    let ok = report.drops_by_one() && unmatched == EXCEPTIONAL_CELLS.to_vec();
    let summary = format!(
        "ladder up to stage {stage}: drops by one {}, {} unmatched cells",
        report.drops_by_one(),
        unmatched.len()
    );
    let detail = match format {
        Format::Json => format!("{}\n", serde_json::to_string(&report).expect("ladder serialization")),
        _ => report.to_table(),
    };
    Ok(verdict(ok, summary, detail))
}

fn fibers(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let model = ctx.model()?;
    let tower = model.tower().ok_or_else(|| ctx.unsupported(model))?;
    let stage = ctx.stage()?;
    let mut reports = Vec::new();
    for s in 0..=stage {
        reports.push(fiber_report(tower, s).map_err(|e| usage(e.to_string()))?);
    }
    Ok(Outcome::Ok(match ctx.args.format {
        Format::Json => format!("{}\n", serde_json::to_string(&reports).expect("fibre serialization")),
        Format::Table => reports.iter().map(|r| format!("{}\t{}\n", r.stage, r.expression)).collect(),
        Format::Dot => return Err(usage("fibers has no dot output")),
    }))
}

fn refine(ctx: &Ctx) -> Result<Outcome, Outcome> {
    let model = ctx.model()?;
    let format = detail_format(ctx)?;
    let n = ctx.n()?;
    let fine_model = match model {
        CliModel::DimensionRaising => CliModel::WbSquare,
        m => m,
    };
    let (fine, coarse, result) = match model {
        CliModel::WbSquare | CliModel::DimensionRaising => {
            let fine = complex_of(ctx, fine_model, n)?;
            let coarse = complex_of(ctx, CliModel::Triangle, n)?;
            let result = if model == CliModel::WbSquare {
                let cells = wb_cells(n);
                check_refinement(&fine, &coarse, |c| cells.get(&c.label).map(|w| w.simplex_face().to_string()))
            } else {
                let vertex = coarse.cells_of_dim(0).first().map(|&i| coarse.cell(i).label.clone());
                check_refinement(&fine, &coarse, |_| vertex.clone())
            };
            (fine, coarse, result)
        }
        CliModel::BPentagon => {
            let fine = complex_of(ctx, CliModel::BPentagon, n)?;
            let coarse = complex_of(ctx, CliModel::Square, n)?;
            let carriers = cube_carriers(n);
            let result = check_refinement(&fine, &coarse, |c| carriers.get(&c.label).cloned());
            (fine, coarse, result)
        }
        other => return Err(ctx.unsupported(other)),
    };
    let target = if fine_model == CliModel::BPentagon { "square" } else { "triangle" };
    let name = format!("{}({n}) -> {target}({n})", fine_model.name());
    Ok(match result {
        Ok(w) => {
            let profiles: Vec<_> = (0..coarse.len())
                .map(|j| (coarse.cell(j).label.clone(), w.preimage_profile(&fine, j)))
                .collect();
            let detail = match format {
                Format::Json => format!("{}\n", json!({ "preimages": profiles })),
                _ => profiles
                    .iter()
                    .map(|(l, p)| format!("{l}\t{}\n", p.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")))
                    .collect(),
            };
            verdict(true, format!("refinement {name}"), detail)
        }
        Err(e) => {
            let detail = match format {
                Format::Json => format!("{}\n", serde_json::to_string(&e).expect("failure serialization")),
                _ => format!("{e}\n"),
            };
            verdict(false, format!("refinement {name}"), detail)
        }
    })
}
