//! Command-line front end. All logic lives in the library; the binary is a
//! thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 2 usage error, 3 configuration not found, 4 I/O
//! failure. Every command echoes its fully resolved configuration to stderr
//! before emitting results, so a run can be reproduced from its log.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::apps;
use crate::bitstream::Bitstream;
use crate::circuits::{self, FunctionId, Variant};
use crate::error::Error;
use crate::eval::{self, fmt_float, RefMode, ReportFormat};
use crate::gates;
use crate::rng::SequenceSource;

#[derive(Parser, Debug)]
#[command(
    name = "scsim",
    about = "Stochastic-computing bit-stream simulator and evaluation harness",
    version
)]
struct Cli {
    /// Cap the worker threads used by sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump a number source, one integer per line.
    Gen(GenArgs),
    /// Evaluate one function circuit at a single input.
    Eval(EvalArgs),
    /// Exhaustive accuracy sweeps over [0, N].
    Sweep(SweepArgs),
    /// Correlation profile of the cascade's intermediate stages.
    Corr(CorrArgs),
    /// Figure of merit from accuracy and hardware-cost data.
    Fom(FomArgs),
    /// Per-cycle trace of a sequential element.
    Trace(TraceArgs),
    /// Application studies (image rotation, arm kinematics).
    #[command(subcommand)]
    App(AppCommand),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Source kind: counter | vdc | lfsr | sobol.
    #[arg(long)]
    rng: String,
    /// Output width m in bits (values lie in [0, 2^m)).
    #[arg(long)]
    bits: u32,
    /// VDC base (a power of two >= 2).
    #[arg(long)]
    base: Option<u64>,
    /// LFSR tap exponents, comma separated (e.g. 10,8,5,4).
    #[arg(long, value_delimiter = ',')]
    poly: Option<Vec<u32>>,
    /// LFSR seed (default all-ones).
    #[arg(long)]
    seed: Option<u64>,
    /// Sobol dimension.
    #[arg(long)]
    dim: Option<u32>,
    /// How many values to emit.
    #[arg(long)]
    count: u64,
    /// Start index.
    #[arg(long, default_value_t = 0)]
    offset: u64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    variant: String,
    #[arg(long)]
    n: usize,
    /// Input as a real in [0, 1]; quantized to round(x * N).
    #[arg(long)]
    x: f64,
    /// Reference curve: maclaurin | true.
    #[arg(long, default_value = "maclaurin")]
    reference: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Function name or `all`.
    #[arg(long = "fn")]
    function: String,
    /// Variant name or `all`.
    #[arg(long)]
    variant: String,
    /// Comma-separated stream lengths.
    #[arg(long = "n-list", value_delimiter = ',', default_value = "1024")]
    n_list: Vec<usize>,
    /// Trial count for the seeded LFSR baselines.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Directory for per-combination report files; summary goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Reference curve: maclaurin | true.
    #[arg(long, default_value = "maclaurin")]
    reference: String,
}

#[derive(Args, Debug)]
struct CorrArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    variant: String,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// Restrict output to one stage (i1..i4).
    #[arg(long)]
    stage: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FomArgs {
    /// Hardware-cost CSV (defaults to the bundled table).
    #[arg(long)]
    hw: Option<PathBuf>,
    /// Sweep report CSV to aggregate MSE from.
    #[arg(long)]
    mse: Option<PathBuf>,
    /// Explicit MSE value (pure-formula mode; needs --fn, --design, --n).
    #[arg(long)]
    mse_value: Option<f64>,
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long)]
    design: Option<String>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct TraceArgs {
    /// Element: dff | jkff | cordiv | correlator.
    #[arg(long)]
    element: String,
    /// First input stream as 0/1 text.
    #[arg(long)]
    a: String,
    /// Second input stream (unused for dff).
    #[arg(long)]
    b: Option<String>,
    /// Delay cycles (dff) or correlator depth.
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum AppCommand {
    /// Two-link arm positioning error over the admissible joint grid.
    Arm(ArmArgs),
    /// Rotate an image through the stochastic trig path.
    Rotate(RotateArgs),
    /// Absolute transformation-angle error over the alpha grid.
    Angle(AngleArgs),
}

#[derive(Args, Debug)]
struct ArmArgs {
    #[arg(long, default_value_t = 32)]
    grid: usize,
    #[arg(long)]
    variant: String,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    l1: f64,
    #[arg(long, default_value_t = 0.5)]
    l2: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RotateArgs {
    /// Input PGM image; alternatively use --pattern.
    #[arg(long)]
    image: Option<PathBuf>,
    /// Synthetic pattern: checkerboard | markers.
    #[arg(long)]
    pattern: Option<String>,
    /// Pattern size in pixels.
    #[arg(long, default_value_t = 128)]
    size: usize,
    /// Rotation angle in radians, [0, 1].
    #[arg(long)]
    alpha: f64,
    /// Provider: exact, or a variant name with --n.
    #[arg(long, default_value = "exact")]
    variant: String,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long)]
    bilinear: bool,
    /// Output PGM path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AngleArgs {
    #[arg(long)]
    variant: String,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    run_cli(cli)
}

/// Entry point for tests: parse an explicit argument list.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_cli(cli),
        Err(e) => {
            eprint!("{e}");
            2
        }
    }
}

fn run_cli(cli: Cli) -> i32 {
    if let Some(k) = cli.threads {
        // ignore failure: the global pool can only be sized once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Corr(args) => cmd_corr(args),
        Command::Fom(args) => cmd_fom(args),
        Command::Trace(args) => cmd_trace(args),
        Command::App(AppCommand::Arm(args)) => cmd_app_arm(args),
        Command::App(AppCommand::Rotate(args)) => cmd_app_rotate(args),
        Command::App(AppCommand::Angle(args)) => cmd_app_angle(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ConfigNotFound { .. } => 3,
                Error::Io { .. } => 4,
                _ => 2,
            }
        }
    }
}

fn echo_config(text: &str) {
    eprintln!("# config: {text}");
}

fn parse_ref_mode(text: &str) -> Result<RefMode, Error> {
    match text {
        "maclaurin" => Ok(RefMode::Maclaurin),
        "true" => Ok(RefMode::True),
        other => Err(Error::invalid(format!("unknown reference mode {other:?}"))),
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), Error> {
    let source = match args.rng.as_str() {
        "counter" => SequenceSource::counter(args.bits),
        "vdc" => {
            let base = args
                .base
                .ok_or_else(|| Error::invalid("--base is required for vdc"))?;
            if !base.is_power_of_two() || base < 2 {
                return Err(Error::invalid(format!(
                    "vdc base {base} must be a power of two >= 2"
                )));
            }
            SequenceSource::vdc(args.bits, base.trailing_zeros())
        }
        "lfsr" => {
            let taps = args
                .poly
                .clone()
                .ok_or_else(|| Error::invalid("--poly is required for lfsr"))?;
            match args.seed {
                Some(seed) => SequenceSource::lfsr_seeded(args.bits, taps, seed),
                None => SequenceSource::lfsr(args.bits, taps),
            }
        }
        "sobol" => {
            let dim = args
                .dim
                .ok_or_else(|| Error::invalid("--dim is required for sobol"))?;
            SequenceSource::sobol(args.bits, dim)
        }
        other => return Err(Error::invalid(format!("unknown rng kind {other:?}"))),
    };
    echo_config(&format!(
        "gen rng={source} count={} offset={}",
        args.count, args.offset
    ));
    // probe once so a bad spec (zero seed, unknown dimension) fails cleanly
    source.value_at(args.offset)?;
    let mut stdout = String::new();
    for v in source.iter(args.offset).take(args.count as usize) {
        stdout.push_str(&v.to_string());
        stdout.push('\n');
    }
    print!("{stdout}");
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Error> {
    let function = FunctionId::parse(&args.function)?;
    let variant = Variant::parse(&args.variant)?;
    let reference = parse_ref_mode(&args.reference)?;
    if !(0.0..=1.0).contains(&args.x) {
        return Err(Error::Domain(format!("x={} outside [0, 1]", args.x)));
    }
    let config = circuits::builtin_spec(function, variant, args.n)?;
    let x = (args.x * args.n as f64).round() as u64;
    echo_config(&format!(
        "eval fn={function} variant={variant} n={} x={} (X={x}) reference={:?}",
        args.n, args.x, reference
    ));
    let estimate = circuits::eval_estimate(&config, x)?;
    let r = reference.value(function, x as f64 / args.n as f64);
    println!(
        "function={function} variant={variant} N={} X={x} estimate={} reference={} abs_error={}",
        args.n,
        fmt_float(estimate),
        fmt_float(r),
        fmt_float((estimate - r).abs())
    );
    Ok(())
}

fn parse_function_list(text: &str) -> Result<Vec<FunctionId>, Error> {
    if text == "all" {
        Ok(FunctionId::ALL.to_vec())
    } else {
        text.split(',').map(FunctionId::parse).collect()
    }
}

fn parse_variant_list(text: &str) -> Result<Vec<Variant>, Error> {
    if text == "all" {
        Ok(Variant::ALL.to_vec())
    } else {
        text.split(',').map(Variant::parse).collect()
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let functions = parse_function_list(&args.function)?;
    let variants = parse_variant_list(&args.variant)?;
    let reference = parse_ref_mode(&args.reference)?;
    let format = match args.format.as_str() {
        "csv" => ReportFormat::Csv,
        "json" => ReportFormat::Json,
        other => return Err(Error::invalid(format!("unknown format {other:?}"))),
    };
    for v in &variants {
        if args.trials > 1 && v.is_deterministic() && args.variant != "all" {
            return Err(Error::invalid(format!(
                "--trials {} is only valid with the seeded LFSR variants; {v} is deterministic",
                args.trials
            )));
        }
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }
    echo_config(&format!(
        "sweep fn={:?} variant={:?} n_list={:?} trials={} reference={:?} format={:?} out={:?}",
        functions.iter().map(|f| f.name()).collect::<Vec<_>>(),
        variants.iter().map(|v| v.name()).collect::<Vec<_>>(),
        args.n_list,
        args.trials,
        reference,
        format,
        args.out
    ));
    println!("function,variant,N,trials,mse");
    for function in &functions {
        for variant in &variants {
            for &n in &args.n_list {
                let report =
                    match eval::mse_sweep_with(*function, *variant, n, args.trials, reference) {
                        Ok(r) => r,
                        Err(Error::ConfigNotFound { .. }) if args.variant == "all" => continue,
                        Err(e) => return Err(e),
                    };
                println!(
                    "{},{},{},{},{}",
                    function,
                    variant,
                    n,
                    report.trials,
                    fmt_float(report.mse)
                );
                if let Some(dir) = &args.out {
                    let ext = match format {
                        ReportFormat::Csv => "csv",
                        ReportFormat::Json => "json",
                    };
                    let path = dir.join(format!("{function}-{variant}-{n}.{ext}"));
                    eval::export_report(&report, &path, format)?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_corr(args: CorrArgs) -> Result<(), Error> {
    let function = FunctionId::parse(&args.function)?;
    let variant = Variant::parse(&args.variant)?;
    echo_config(&format!(
        "corr fn={function} variant={variant} n={} stage={:?}",
        args.n, args.stage
    ));
    let profiles = eval::correlation_profile(function, variant, args.n)?;
    if let Some(stage) = &args.stage {
        if !profiles.iter().any(|p| &p.stage == stage) {
            return Err(Error::invalid(format!("unknown stage {stage:?}")));
        }
    }
    let mut out = String::from("stage,X,scc,zce\n");
    for p in &profiles {
        if let Some(stage) = &args.stage {
            if &p.stage != stage {
                continue;
            }
        }
        for (x, (s, z)) in p.scc.iter().zip(&p.zce).enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.stage,
                x,
                fmt_float(*s),
                fmt_float(*z)
            ));
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| Error::io(path.display().to_string(), e))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_fom(args: FomArgs) -> Result<(), Error> {
    let records = match &args.hw {
        Some(path) => eval::load_hw_costs(path)?,
        None => eval::bundled_hw_costs()?,
    };
    echo_config(&format!(
        "fom hw={:?} mse={:?} mse_value={:?}",
        args.hw, args.mse, args.mse_value
    ));
    println!("function,design,N,mse,fom");
    if let Some(value) = args.mse_value {
        let function = FunctionId::parse(
            args.function
                .as_deref()
                .ok_or_else(|| Error::invalid("--mse-value needs --fn"))?,
        )?;
        let design = args
            .design
            .clone()
            .ok_or_else(|| Error::invalid("--mse-value needs --design"))?;
        let n = args
            .n
            .ok_or_else(|| Error::invalid("--mse-value needs --n"))?;
        let hw = eval::hw_lookup(&records, function, &design, n).ok_or_else(|| {
            Error::ConfigNotFound {
                function: function.name().into(),
                variant: design.clone(),
                n,
            }
        })?;
        println!(
            "{},{},{},{},{}",
            function,
            design,
            n,
            fmt_float(value),
            fmt_float(eval::fom(value, hw)?)
        );
        return Ok(());
    }
    let path = args
        .mse
        .as_ref()
        .ok_or_else(|| Error::invalid("either --mse <sweep.csv> or --mse-value is required"))?;
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    // aggregate mean squared error per (function, variant, N) from the report
    let mut groups: std::collections::BTreeMap<(String, String, usize), (f64, u64)> =
        std::collections::BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "function,variant,N,X,estimate,reference,sq_error" {
                return Err(Error::Config(format!("unexpected report header {line:?}")));
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            continue;
        }
        let key = (
            f[0].to_string(),
            f[1].to_string(),
            f[2].parse()
                .map_err(|_| Error::Config(format!("bad N in row {}", i + 1)))?,
        );
        let sq: f64 = f[6]
            .parse()
            .map_err(|_| Error::Config(format!("bad sq_error in row {}", i + 1)))?;
        let entry = groups.entry(key).or_insert((0.0, 0));
        entry.0 += sq;
        entry.1 += 1;
    }
    for ((function, variant, n), (sum, count)) in groups {
        let function = FunctionId::parse(&function)?;
        let variant_parsed = Variant::parse(&variant)?;
        let mse = sum / count as f64;
        let hw = eval::hw_lookup(&records, function, variant_parsed.design_name(), n)
            .ok_or_else(|| Error::ConfigNotFound {
                function: function.name().into(),
                variant: variant.clone(),
                n,
            })?;
        println!(
            "{},{},{},{},{}",
            function,
            variant_parsed.design_name(),
            n,
            fmt_float(mse),
            fmt_float(eval::fom(mse, hw)?)
        );
    }
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<(), Error> {
    let a = Bitstream::parse(&args.a)?;
    echo_config(&format!("trace element={} len={}", args.element, a.len()));
    let need_b = || -> Result<Bitstream, Error> {
        Bitstream::parse(
            args.b
                .as_deref()
                .ok_or_else(|| Error::invalid("--b is required for this element"))?,
        )
    };
    println!("cycle,a,b,state,out");
    match args.element.as_str() {
        "dff" => {
            let k = args.k.unwrap_or(1) as usize;
            let out = gates::dff_delay(&a, k);
            for i in 0..a.len() {
                println!("{i},{},,{},{}", a.get(i) as u8, k, out.get(i) as u8);
            }
        }
        "jkff" => {
            let b = need_b()?;
            let trace = gates::jkff_div_traced(&a, &b)?;
            for i in 0..a.len() {
                println!(
                    "{i},{},{},{},{}",
                    a.get(i) as u8,
                    b.get(i) as u8,
                    trace.state_log[i],
                    trace.output.get(i) as u8
                );
            }
        }
        "cordiv" => {
            let b = need_b()?;
            let trace = gates::cordiv_traced(&a, &b)?;
            for i in 0..a.len() {
                println!(
                    "{i},{},{},{},{}",
                    a.get(i) as u8,
                    b.get(i) as u8,
                    trace.state_log[i],
                    trace.output.get(i) as u8
                );
            }
        }
        "correlator" => {
            let b = need_b()?;
            let depth = args.k.unwrap_or(a.len() as u64);
            let r = gates::correlate_max_traced(&a, &b, depth)?;
            for i in 0..a.len() {
                println!(
                    "{i},{},{},{},{}",
                    a.get(i) as u8,
                    b.get(i) as u8,
                    r.state_log[i],
                    r.a.get(i) as u8
                );
            }
            eprintln!("# residual ones dropped at stream end: {}", r.residual);
        }
        other => return Err(Error::invalid(format!("unknown element {other:?}"))),
    }
    Ok(())
}

fn cmd_app_arm(args: ArmArgs) -> Result<(), Error> {
    let provider = if args.variant == "exact" {
        apps::SinCosProvider::exact()
    } else {
        apps::SinCosProvider::stochastic(Variant::parse(&args.variant)?, args.n)?
    };
    echo_config(&format!(
        "app arm grid={} provider={} l1={} l2={}",
        args.grid,
        provider.label(),
        args.l1,
        args.l2
    ));
    let (mean, records) = apps::perr_sweep(args.l1, args.l2, args.grid, &provider)?;
    if let Some(path) = &args.out {
        let mut text = String::from("alpha1,alpha2,x_ref,y_ref,x_sc,y_sc,perr\n");
        for r in &records {
            text.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_float(r.alpha1),
                fmt_float(r.alpha2),
                fmt_float(r.x_ref),
                fmt_float(r.y_ref),
                fmt_float(r.x_sc),
                fmt_float(r.y_sc),
                fmt_float(r.perr)
            ));
        }
        std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    println!("mean_perr={}", fmt_float(mean));
    Ok(())
}

fn cmd_app_rotate(args: RotateArgs) -> Result<(), Error> {
    let img = match (&args.image, args.pattern.as_deref()) {
        (Some(path), _) => apps::read_pgm(path)?,
        (None, Some("checkerboard")) => apps::GrayImage::checkerboard(args.size, args.size / 8)?,
        (None, Some("markers")) => apps::GrayImage::corner_markers(args.size)?,
        (None, Some(other)) => {
            return Err(Error::invalid(format!("unknown pattern {other:?}")))
        }
        (None, None) => return Err(Error::invalid("need --image or --pattern")),
    };
    let provider = if args.variant == "exact" {
        apps::SinCosProvider::exact()
    } else {
        apps::SinCosProvider::stochastic(Variant::parse(&args.variant)?, args.n)?
    };
    echo_config(&format!(
        "app rotate alpha={} provider={} bilinear={} size={}x{}",
        args.alpha,
        provider.label(),
        args.bilinear,
        img.width,
        img.height
    ));
    let out = apps::rotate_image_sampled(&img, args.alpha, &provider, args.bilinear)?;
    apps::write_pgm(&out, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_app_angle(args: AngleArgs) -> Result<(), Error> {
    let provider = if args.variant == "exact" {
        apps::SinCosProvider::exact()
    } else {
        apps::SinCosProvider::stochastic(Variant::parse(&args.variant)?, args.n)?
    };
    echo_config(&format!("app angle provider={}", provider.label()));
    let (mean, records) = apps::angle_error_sweep(&provider)?;
    if let Some(path) = &args.out {
        let mut text = String::from("alpha,e_deg\n");
        for r in &records {
            text.push_str(&format!("{},{}\n", fmt_float(r.alpha), fmt_float(r.e_deg)));
        }
        std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    println!("mean_angle_error_deg={}", fmt_float(mean));
    Ok(())
}
