//! Command-line driver: each pipeline stage can be run and inspected on its
//! own. Exit codes: 0 success, 1 validation or pipeline failure, 2 input
//! error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use skelembed::{
    compute_straight_skeleton, embed, embedding_json, emit_svg, generate_instance, parse_embedding,
    parse_instance, partition, partition_json, report_json, skeleton_json, split_reflex_vertices,
    sss_json, validate_embedding_eps, validation_eps, Artifacts, Error, Instance, Layers,
    RenderSpec,
};

#[derive(Parser)]
#[command(
    name = "skelembed",
    version,
    about = "Embed balanced binary trees on point sets inside simple polygons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Straight skeleton of the polygon as JSON.
    Skeleton(Common),
    /// Split straight skeleton (convex subfaces) as JSON.
    Sss(Common),
    /// Top-level partition of the subface cycle as JSON.
    Partition(Common),
    /// Tree embedding as JSON.
    Embed(Common),
    /// Embeds (or reads `--embedding`) and writes the validation report.
    Validate(Validate),
    /// Writes a random instance.
    Gen(Common),
    /// Runs the whole pipeline and writes the SVG drawing.
    Render(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Instance JSON file; without it an instance is generated from the seed.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG drawing to this file.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Seed of the instance generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Polygon size for generated instances.
    #[arg(long, default_value_t = 12)]
    m: usize,
    /// Point count for generated instances.
    #[arg(long, default_value_t = 31)]
    n: usize,
    /// Absolute tolerance of the validator and of bend counting.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Largest allowed number of bends per edge; 4m when absent.
    #[arg(long = "bend-budget")]
    bend_budget: Option<usize>,
    /// SVG layers: comma-separated from skeleton, sss, backbone, embedding,
    /// or all / none.
    #[arg(long, default_value = "all")]
    layers: String,
}

#[derive(Args)]
struct Validate {
    #[command(flatten)]
    common: Common,
    /// Embedding JSON to check instead of computing one.
    #[arg(long)]
    embedding: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
enum Fail {
    Input(anyhow::Error),
    Run(anyhow::Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Validation(_)
            | Error::GenerationFailure(_)
            | Error::CountMismatch { .. } => Fail::Input(e.into()),
            _ => Fail::Run(e.into()),
        }
    }
}

fn input_err(e: anyhow::Error) -> Fail {
    Fail::Input(e)
}

fn load(c: &Common) -> Result<Instance, Fail> {
    match &c.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(input_err)?;
            Ok(parse_instance(&text)?)
        }
        None => Ok(generate_instance(c.m, c.n, c.seed)?),
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Fail::Run),
        None => {
            let mut out = std::io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            match out
                .write_all(text.as_bytes())
                .and_then(|_| out.write_all(nl.as_bytes()))
                .and_then(|_| out.flush())
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Fail::Run(e.into())),
                _ => Ok(()),
            }
        }
    }
}

fn render_spec(c: &Common) -> Result<RenderSpec, Fail> {
    let spec = RenderSpec {
        layers: Layers::parse(&c.layers)?,
        ..RenderSpec::default()
    };
    spec.check()?;
    Ok(spec)
}

fn write_svg(c: &Common, art: &Artifacts) -> Result<(), Fail> {
    let spec = render_spec(c)?;
    if let Some(p) = &c.svg {
        std::fs::write(p, emit_svg(art, &spec))
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Fail::Run)?;
    }
    Ok(())
}

fn tolerance(c: &Common, inst: &Instance) -> Result<f64, Fail> {
    match c.tolerance {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            Err(Fail::Input(anyhow::anyhow!("--tolerance must be positive")))
        }
        Some(t) => Ok(t),
        None => Ok(validation_eps(&inst.polygon, &inst.points)),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Fail> {
    match cli.command {
        Command::Gen(c) => {
            let inst = generate_instance(c.m, c.n, c.seed)?;
            write_out(&c.out, &inst.to_json())?;
            write_svg(
                &c,
                &Artifacts {
                    points: Some(&inst.points),
                    ..Artifacts::new(&inst.polygon)
                },
            )?;
        }
        Command::Skeleton(c) => {
            let inst = load(&c)?;
            let ss = compute_straight_skeleton(&inst.polygon)?;
            write_out(&c.out, &skeleton_json(&ss))?;
            write_svg(
                &c,
                &Artifacts {
                    points: Some(&inst.points),
                    skeleton: Some(&ss),
                    ..Artifacts::new(&inst.polygon)
                },
            )?;
        }
        Command::Sss(c) => {
            let inst = load(&c)?;
            let ss = compute_straight_skeleton(&inst.polygon)?;
            let sss = split_reflex_vertices(&ss)?;
            write_out(&c.out, &sss_json(&sss))?;
            write_svg(
                &c,
                &Artifacts {
                    points: Some(&inst.points),
                    sss: Some(&sss),
                    ..Artifacts::new(&inst.polygon)
                },
            )?;
        }
        Command::Partition(c) => {
            let inst = load(&c)?;
            let p = partition(&inst.polygon, &inst.points, &inst.tree)?;
            write_out(&c.out, &partition_json(&p))?;
            write_svg(
                &c,
                &Artifacts {
                    points: Some(&inst.points),
                    partition: Some(&p),
                    ..Artifacts::new(&inst.polygon)
                },
            )?;
        }
        Command::Embed(c) => {
            let inst = load(&c)?;
            let e = embed(&inst.polygon, &inst.points, &inst.tree)?;
            write_out(&c.out, &embedding_json(&e, tolerance(&c, &inst)?))?;
            write_svg(
                &c,
                &Artifacts {
                    points: Some(&inst.points),
                    embedding: Some(&e),
                    ..Artifacts::new(&inst.polygon)
                },
            )?;
        }
        Command::Render(c) => {
            let inst = load(&c)?;
            let e = embed(&inst.polygon, &inst.points, &inst.tree)?;
            let art = Artifacts {
                points: Some(&inst.points),
                embedding: Some(&e),
                ..Artifacts::new(&inst.polygon)
            };
            let svg = emit_svg(&art, &render_spec(&c)?);
            write_out(&c.out.clone().or(c.svg.clone()), &svg)?;
        }
        Command::Validate(v) => {
            let c = &v.common;
            let inst = load(c)?;
            let e = match &v.embedding {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(input_err)?;
                    parse_embedding(&text)?
                }
                None => embed(&inst.polygon, &inst.points, &inst.tree)?,
            };
            let budget = c.bend_budget.unwrap_or(4 * inst.polygon.len());
            let mut report = validate_embedding_eps(
                &inst.polygon,
                &inst.points,
                &inst.tree,
                &e,
                budget,
                tolerance(c, &inst)?,
            );
            if compute_straight_skeleton(&inst.polygon).is_ok_and(|ss| ss.degenerate) {
                report
                    .degenerate_flags
                    .push("straight skeleton has merged simultaneous events".into());
            }
            write_out(&c.out, &report_json(&report))?;
            write_svg(
                c,
                &Artifacts {
                    points: Some(&inst.points),
                    embedding: Some(&e),
                    ..Artifacts::new(&inst.polygon)
                },
            )?;
            if !report.valid {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Fail::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Fail::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
