//! Command-line front end over `erbound::experiment`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use erbound::analytic;
use erbound::experiment::{self as exp, Method, Report, Settings, Timings};
use erbound::Error;

#[derive(Parser)]
#[command(name = "erbound", version, about = "Bounds on the relative entropy of entanglement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Run seed; every record derives its own seed from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    pool_size: Option<usize>,
    /// Outer active-learning iterations.
    #[arg(long, global = true)]
    iterations: Option<usize>,
    /// Weight threshold for keeping a candidate.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    delta0: Option<f64>,
    /// cha, ppt or both.
    #[arg(long, global = true)]
    method: Option<Method>,
    /// Start from the smaller desk-scale pool (500 candidates, 20 iterations).
    #[arg(long, global = true)]
    desk: bool,
    /// key = value file; flags given here take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV output path (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON report path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Worker threads (else $ERBOUND_THREADS, else all logical CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Leave timing cells empty so reruns give identical bytes.
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Args)]
struct Grid {
    #[arg(long, conflicts_with = "alpha_grid")]
    alpha: Option<f64>,
    /// start:stop:step, inclusive.
    #[arg(long)]
    alpha_grid: Option<String>,
}

impl Grid {
    fn values(&self, default: &str) -> Result<Vec<f64>, Error> {
        match (self.alpha, &self.alpha_grid) {
            (Some(a), _) => Ok(vec![a]),
            (None, Some(g)) => exp::parse_grid(g),
            (None, None) => exp::parse_grid(default),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep of Werner states against the closed form.
    Werner {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        grid: Grid,
    },
    /// Sweep of isotropic states against the closed form.
    Isotropic {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        grid: Grid,
    },
    /// Sweep of the noisy tiles bound-entangled family.
    Tiles {
        #[command(flatten)]
        grid: Grid,
    },
    /// Both bounds on random entangled states.
    Random {
        #[arg(long, default_value_t = 2)]
        da: usize,
        #[arg(long, default_value_t = 2)]
        db: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Bounds for a state given as a JSON matrix file.
    Bound { input: PathBuf },
    /// The (|00>+|11>+|12>)/sqrt(3) benchmark with its iteration trace.
    DemoPure,
}

fn settings(c: &Common) -> Result<Settings, Error> {
    let mut s = if c.desk { Settings::desk() } else { Settings::default() };
    if let Some(path) = &c.config {
        exp::apply_config_text(&mut s, &std::fs::read_to_string(path)?)?;
    }
    if let Some(v) = c.seed {
        s.seed = v;
    }
    if let Some(v) = c.pool_size {
        s.cha.pool_size = v;
    }
    if let Some(v) = c.iterations {
        s.cha.outer_iterations = v;
    }
    if let Some(v) = c.epsilon {
        s.cha.weight_threshold = v;
    }
    if let Some(v) = c.delta0 {
        s.cha.delta0 = v;
    }
    if let Some(v) = c.method {
        s.method = v;
    }
    s.threads = match c.threads {
        Some(n) => Some(n),
        None => exp::threads_from_env()?,
    };
    s.validate()?;
    Ok(s)
}

fn run(cli: &Cli) -> Result<i32, Error> {
    let s = settings(&cli.common)?;
    let (name, mut report) = match &cli.command {
        Command::Werner { d, grid } => ("werner", Report::new("werner", &s, exp::werner_sweep(*d, &grid.values("0.6:1.0:0.1")?, &s)?)),
        Command::Isotropic { d, grid } => {
            let alphas = grid.values("0.6:1.0:0.1")?;
            let records = exp::isotropic_sweep(*d, &alphas, &s)?;
            eprintln!("alpha  log(d) reading  log(2) reading");
            for &a in &alphas {
                eprintln!(
                    "{a:<6} {:<16.6} {:.6}",
                    analytic::isotropic_er(*d, a)?.value_bits,
                    analytic::isotropic_er_log2_leading(*d, a)?
                );
            }
            ("isotropic", Report::new("isotropic", &s, records))
        }
        Command::Tiles { grid } => {
            let (records, summary) = exp::tiles_sweep(&grid.values("0:1:0.05")?, &s)?;
            eprintln!(
                "first alpha above {} bits: {:?}; onset estimate: {:?}",
                exp::TILES_NONZERO_BITS,
                summary.first_nonzero_alpha,
                summary.onset_alpha
            );
            let mut r = Report::new("tiles", &s, records);
            r.tiles = Some(summary);
            ("tiles", r)
        }
        Command::Random { da, db, count } => ("random", Report::new("random", &s, exp::random_study(*da, *db, *count, &s)?)),
        Command::Bound { input } => {
            let ev = exp::bound_file(input, &s)?;
            let mut r = Report::new("bound", &s, vec![ev.record]);
            r.support = ev.cha.map(|c| c.best_support);
            r.ppt_grad_norm = ev.ppt.map(|p| p.grad_norm);
            ("bound", r)
        }
        Command::DemoPure => {
            let demo = exp::demo_pure(&s)?;
            eprintln!("iteration  value_bits  best_bits  delta");
            for h in &demo.history {
                let show = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "failed".into());
                eprintln!("{:<10} {:<11} {:<10} {:.4}", h.iteration + 1, show(h.value_bits), show(h.best_bits), h.delta);
            }
            let mut r = Report::new("demo-pure", &s, vec![demo.record]);
            r.history = Some(demo.history);
            r.support = Some(demo.support);
            ("demo-pure", r)
        }
    };
    report.command = name.to_string();

    let timings = if cli.common.no_timings { Timings::Omit } else { Timings::Include };
    match &cli.common.out {
        Some(path) => exp::write_csv(std::fs::File::create(path)?, &report.records, &s, timings)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            exp::write_csv(&mut lock, &report.records, &s, timings)?;
            lock.flush()?;
        }
    }
    if let Some(path) = &cli.common.json {
        exp::write_json(path, &report)?;
    }
    for r in &report.records {
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.state);
        }
    }
    Ok(exp::exit_code(&report.records, s.method))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("erbound: {e}");
            ExitCode::from(exp::EXIT_INVALID_INPUT as u8)
        }
    }
}
