//! Subcommand implementations; each returns the text destined for stdout.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use tannaka::closure::{generate_collection, ClosureOptions, Collection};
use tannaka::hopf::{ideal_basis, of_plus_relations, uq_plus_generators, Relation};
use tannaka::scalar::{zero, C};
use tannaka::tensor::{build_r_from_f, extract_f, FMatrix, InterOp};
use tannaka::verify::{self, VerificationReport, VerifyOptions};

use crate::error::{CliError, CliResult};
use crate::format::{
    dims_csv, matrix_to_json, read_json, reports_text, square_from_json, to_json, write_text,
    CollectionFile, GeneratorFile, MatrixFile, OperatorJson, RelationsFile, FORMAT,
};

#[derive(Debug, Parser)]
#[command(
    name = "tannaka",
    version,
    about = "Intertwiner collections, annihilator ideals and quantum group presentations"
)]
pub struct Cli {
    /// Rank and span tolerance.
    #[arg(long, global = true, env = "TANNAKA_TOLERANCE", default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Largest admissible d^(2n).
    #[arg(
        long,
        global = true,
        env = "TANNAKA_MEMORY_CAP",
        default_value_t = 4096
    )]
    pub memory_cap: usize,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Saturate a generating set and write the collection and dims table.
    Closure(ClosureArgs),
    /// Emit relations: slice-span reduction of a collection, or a builtin family.
    Relations(RelationsArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Write generator files for the builtin families.
    Builtin {
        #[command(subcommand)]
        family: Builtin,
    },
}

/// Where the generating set comes from: a generator file, or `R = (ι⊗F)r`.
#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Generator file (overrides --dim and --F).
    #[arg(long)]
    pub gens: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// `identity` or a matrix file.
    #[arg(long = "F", default_value = "identity")]
    pub f: String,
}

#[derive(Debug, Args)]
pub struct ClosureArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub level: usize,
    /// Collection file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the dims CSV here instead of stdout.
    #[arg(long)]
    pub dims: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RelationsArgs {
    /// Collection file whose ideal is reduced to independent relations.
    #[arg(long)]
    pub collection: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Level for a collection generated from --gens or --F.
    #[arg(long, default_value_t = 2)]
    pub level: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub builtin: Option<RelationsBuiltin>,
}

#[derive(Debug, Subcommand)]
pub enum RelationsBuiltin {
    /// Closed-form presentation of a builtin family.
    Builtin {
        #[command(subcommand)]
        family: Builtin,
    },
}

#[derive(Debug, Subcommand)]
pub enum Builtin {
    /// Free orthogonal family from F.
    OfPlus {
        /// `identity` or a matrix file.
        #[arg(long = "F", default_value = "identity")]
        f: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Free unitary family from Q.
    UqPlus {
        /// `identity` (the 1×1 matrix [1]) or a matrix file.
        #[arg(long = "Q", default_value = "identity")]
        q: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Closure,
    Annihilator,
    BiIdeal,
    HopfStar,
    OfPlus,
    Oracle,
    Uniqueness,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Collection file to check (otherwise generated from --gens or --F).
    #[arg(long)]
    pub collection: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 2)]
    pub level: usize,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Generator file regenerated and compared by the uniqueness suite.
    #[arg(long)]
    pub alternate: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub threshold: f64,
    /// Report file to write (the report is always printed).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Validated settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tolerance: f64,
    pub memory_cap: usize,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> CliResult<Self> {
        if !(cli.tolerance.is_finite() && cli.tolerance > 0.0) {
            return Err(CliError::input(format!(
                "tolerance must be positive, got {}",
                cli.tolerance
            )));
        }
        if cli.jobs == Some(0) {
            return Err(CliError::input("--jobs must be at least 1"));
        }
        Ok(Self {
            tolerance: cli.tolerance,
            memory_cap: cli.memory_cap,
            jobs: cli.jobs,
        })
    }

    fn closure_options(&self) -> ClosureOptions<f64> {
        ClosureOptions {
            tolerance: self.tolerance,
            memory_cap: self.memory_cap,
            ..ClosureOptions::default()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<String> {
    let cfg = RunConfig::from_cli(&cli)?;
    let jobs = cfg.jobs;
    let work = move || match cli.command {
        Command::Closure(args) => cmd_closure(&cfg, &args),
        Command::Relations(args) => cmd_relations(&cfg, &args),
        Command::Verify(args) => cmd_verify(&cfg, &args),
        Command::Builtin { family } => cmd_builtin(&cfg, &family),
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::input(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn load_matrix(arg: &str, identity_dim: usize, what: &str) -> CliResult<DMatrix<C<f64>>> {
    if arg == "identity" {
        if identity_dim == 0 {
            return Err(CliError::input("--dim must be positive"));
        }
        return Ok(DMatrix::identity(identity_dim, identity_dim));
    }
    let file: MatrixFile = read_json(Path::new(arg))?;
    square_from_json(&file.matrix, what)
}

fn load_f(cfg: &RunConfig, arg: &str, dim: usize) -> CliResult<FMatrix<f64>> {
    Ok(FMatrix::new(load_matrix(arg, dim, "F")?, cfg.tolerance)?)
}

fn load_source(
    cfg: &RunConfig,
    src: &SourceArgs,
) -> CliResult<(usize, InterOp<f64>, Vec<InterOp<f64>>)> {
    match &src.gens {
        Some(path) => {
            let file: GeneratorFile = read_json(path)?;
            let (r, gens) = file.operators()?;
            Ok((file.dim, r, gens))
        }
        None => {
            let f = load_f(cfg, &src.f, src.dim)?;
            Ok((f.dim(), build_r_from_f(&f), Vec::new()))
        }
    }
}

fn generate(cfg: &RunConfig, src: &SourceArgs, level: usize) -> CliResult<Collection<f64>> {
    let (dim, r, gens) = load_source(cfg, src)?;
    Ok(generate_collection(
        dim,
        &r,
        &gens,
        level,
        &cfg.closure_options(),
    )?)
}

pub fn cmd_closure(cfg: &RunConfig, args: &ClosureArgs) -> CliResult<String> {
    let c = generate(cfg, &args.source, args.level)?;
    if let Some(out) = &args.out {
        write_text(out, &to_json(&CollectionFile::from_collection(&c)))?;
    }
    let csv = dims_csv(&c.dims_table());
    match &args.dims {
        Some(path) => {
            write_text(path, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn builtin_relations(cfg: &RunConfig, family: &Builtin) -> CliResult<RelationsFile> {
    match family {
        Builtin::OfPlus { f, dim, .. } => {
            let f = load_f(cfg, f, *dim)?;
            let p = of_plus_relations(&f)?;
            Ok(RelationsFile::from_relations(
                p.dim,
                &p.relations,
                Some(&p.involution),
                Some(&p.antipode),
            ))
        }
        Builtin::UqPlus { q, .. } => {
            let uq = uq_plus_generators(&load_matrix(q, 1, "Q")?)?;
            let p = &uq.presentation;
            Ok(RelationsFile::from_relations(
                p.dim,
                &p.relations,
                Some(&p.involution),
                Some(&p.antipode),
            ))
        }
    }
}

pub fn cmd_relations(cfg: &RunConfig, args: &RelationsArgs) -> CliResult<String> {
    let file = match &args.builtin {
        Some(RelationsBuiltin::Builtin { family }) => builtin_relations(cfg, family)?,
        None => {
            let c = match &args.collection {
                Some(path) => read_json::<CollectionFile>(path)?.to_collection()?,
                None => generate(cfg, &args.source, args.level)?,
            };
            let relations: Vec<Relation<f64>> = ideal_basis(&c)
                .elements()
                .into_iter()
                .map(|a| Relation {
                    lhs: a.pruned(cfg.tolerance),
                    equals: zero(),
                })
                .collect();
            RelationsFile::from_relations(c.dim(), &relations, None, None)
        }
    };
    let out = match &args.builtin {
        Some(RelationsBuiltin::Builtin {
            family: Builtin::OfPlus { out, .. } | Builtin::UqPlus { out, .. },
        }) => out.as_ref().or(args.out.as_ref()),
        None => args.out.as_ref(),
    };
    emit_json(out, &file)
}

fn emit_json<T: serde::Serialize>(out: Option<&PathBuf>, value: &T) -> CliResult<String> {
    let text = to_json(value);
    match out {
        Some(path) => {
            write_text(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn cmd_builtin(cfg: &RunConfig, family: &Builtin) -> CliResult<String> {
    let (f, r, gens, out) = match family {
        Builtin::OfPlus { f, dim, out } => {
            let f = load_f(cfg, f, *dim)?;
            f.require_sign()?;
            let r = build_r_from_f(&f);
            (f, r, Vec::new(), out)
        }
        Builtin::UqPlus { q, out } => {
            let uq = uq_plus_generators(&load_matrix(q, 1, "Q")?)?;
            (uq.f, uq.r, vec![uq.p], out)
        }
    };
    let file = GeneratorFile {
        format: FORMAT,
        dim: f.dim(),
        r: OperatorJson::from_op(&r),
        generators: gens.iter().map(OperatorJson::from_op).collect(),
        f: Some(matrix_to_json(f.entries())),
        sign: f.sign().map(|s| s.value()),
    };
    emit_json(out.as_ref(), &file)
}

fn require_f(c: &Collection<f64>, tol: f64) -> CliResult<FMatrix<f64>> {
    let f = extract_f(c.r(), tol)?;
    f.require_sign()?;
    Ok(f)
}

pub fn cmd_verify(cfg: &RunConfig, args: &VerifyArgs) -> CliResult<String> {
    if !(args.threshold.is_finite() && args.threshold > 0.0) {
        return Err(CliError::input("threshold must be positive"));
    }
    let opts = VerifyOptions {
        tolerance: cfg.tolerance,
        threshold: args.threshold,
        seed: args.seed,
        samples: args.samples,
        memory_cap: cfg.memory_cap,
        ..VerifyOptions::default()
    };
    let reports: Vec<VerificationReport> = if args.suite == Suite::Oracle {
        let f = load_f(cfg, &args.source.f, args.source.dim)?;
        vec![verify::verify_oracle(&f, args.level, &opts)?]
    } else {
        let c = match &args.collection {
            Some(path) => read_json::<CollectionFile>(path)?.to_collection()?,
            None => generate(cfg, &args.source, args.level)?,
        };
        let alternate = match &args.alternate {
            Some(path) => {
                let file: GeneratorFile = read_json(path)?;
                Some(file.operators()?.1)
            }
            None => None,
        };
        match args.suite {
            Suite::All => {
                let mut reps = verify::verify_all(&c, &opts);
                if let Some(alt) = &alternate {
                    reps.push(verify::verify_uniqueness(&c, alt, &opts)?);
                }
                reps
            }
            Suite::Closure => vec![verify::verify_closure(&c, &opts)],
            Suite::Annihilator => vec![verify::verify_annihilator(&c, &opts)],
            Suite::BiIdeal => vec![verify::verify_bi_ideal(&c, &opts)],
            Suite::HopfStar => vec![verify::verify_hopf_star(
                &c,
                &require_f(&c, cfg.tolerance)?,
                &opts,
            )],
            Suite::OfPlus => vec![verify::verify_of_plus(
                &require_f(&c, cfg.tolerance)?,
                c.level(),
                &opts,
            )?],
            Suite::Uniqueness => {
                let alt = alternate
                    .ok_or_else(|| CliError::input("--suite uniqueness needs --alternate"))?;
                vec![verify::verify_uniqueness(&c, &alt, &opts)?]
            }
            Suite::Oracle => unreachable!("handled above"),
        }
    };
    let text = reports_text(&reports);
    if let Some(path) = &args.out {
        write_text(path, &text)?;
    }
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures().map(|f| f.name.clone()))
        .collect();
    if failed.is_empty() {
        Ok(text)
    } else {
        eprint!("{text}");
        Err(CliError::VerificationFailed(failed))
    }
}
