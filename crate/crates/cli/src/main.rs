mod commands;
mod config;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::exit::Failure;

#[derive(Parser, Debug)]
#[command(name = "cantorhull", version, about = "Cantor-set construction, verification and export")]
struct Cli {
    /// JSON run configuration; flags override its scalar fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and certify a Cantor state.
    Construct(ConstructArgs),
    /// Run the acceptance suite on a state.
    Verify(VerifyArgs),
    /// Write grid CSVs and SVG heat maps.
    Export(StageArgs),
    /// Estimate a harmonic measure at one point.
    Hm(HmArgs),
    /// Continue the square-root branch along a closed circle or a configured path.
    Monodromy(MonodromyArgs),
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    c0: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    walks: Option<u64>,
    #[arg(long)]
    tolerance_scale: Option<f64>,
    /// Comma-separated criterion numbers.
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<u8>>,
}

#[derive(Args, Debug)]
struct StageArgs {
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    stage: Option<usize>,
}

#[derive(Args, Debug)]
struct HmArgs {
    #[command(flatten)]
    at: StageArgs,
    #[arg(long, allow_hyphen_values = true)]
    re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im: Option<f64>,
    #[arg(long)]
    walks: Option<u64>,
}

#[derive(Args, Debug)]
struct MonodromyArgs {
    #[command(flatten)]
    at: StageArgs,
    #[arg(long, allow_hyphen_values = true)]
    center_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    center_im: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    vertices: Option<usize>,
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn apply(cli: Cli) -> Result<(RunConfig, Command), Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.seed = cli.seed.or(cfg.seed);
    cfg.out = cli.out.or(cfg.out);
    match &cli.command {
        Command::Construct(a) => {
            set(&mut cfg.construct.depth, a.depth);
            cfg.construct.c0 = a.c0.or(cfg.construct.c0);
        }
        Command::Verify(a) => {
            cfg.verify.state = a.state.clone().or(cfg.verify.state.take());
            set(&mut cfg.verify.walks, a.walks);
            set(&mut cfg.verify.tolerance_scale, a.tolerance_scale);
            cfg.verify.criteria = a.criteria.clone().or(cfg.verify.criteria.take());
        }
        Command::Export(a) => {
            cfg.export.state = a.state.clone().or(cfg.export.state.take());
            cfg.export.stage = a.stage.or(cfg.export.stage);
        }
        Command::Hm(a) => {
            cfg.hm.state = a.at.state.clone().or(cfg.hm.state.take());
            cfg.hm.stage = a.at.stage.or(cfg.hm.stage);
            set(&mut cfg.hm.point[0], a.re);
            set(&mut cfg.hm.point[1], a.im);
            set(&mut cfg.hm.walks, a.walks);
        }
        Command::Monodromy(a) => {
            let m = &mut cfg.monodromy;
            m.state = a.at.state.clone().or(m.state.take());
            m.stage = a.at.stage.or(m.stage);
            set(&mut m.center[0], a.center_re);
            set(&mut m.center[1], a.center_im);
            set(&mut m.radius, a.radius);
            set(&mut m.vertices, a.vertices);
            if a.center_re.is_some() || a.center_im.is_some() || a.radius.is_some() || a.vertices.is_some() {
                m.path = None;
            }
        }
    }
    Ok((cfg, cli.command))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = apply(cli).and_then(|(cfg, command)| match command {
        Command::Construct(_) => commands::construct(&cfg),
        Command::Verify(_) => commands::verify(&cfg),
        Command::Export(_) => commands::export(&cfg),
        Command::Hm(_) => commands::hm(&cfg),
        Command::Monodromy(_) => commands::monodromy(&cfg),
    });
    match result {
        Ok(()) => ExitCode::from(exit::SUCCESS),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
