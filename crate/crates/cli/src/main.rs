use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qca_core::{
    build_fan_in, build_fan_out, build_inverter, build_majority, build_wire, compare_models,
    failure_onset, field_scale_eo, gamma_eff, load_layout, null_population, read_csv, run_sweep,
    save_layout, truth_table, write_csv, Axis, BuildConfig, FieldRange, FieldVector, Geometry,
    Layout, PhysicalConstants, QcaError, SolverOptions, SweepSpec, ThreeStateParams,
    TwoStateParams, Units, SOFT_MAX_CELLS,
};

#[derive(Parser)]
#[command(name = "qca", version, about = "Field tolerance of clocked molecular QCA circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a stock circuit layout as JSON.
    Build(BuildArgs),
    /// Solve a layout over a grid of in-plane fields and write CSV.
    Sweep(SweepArgs),
    /// Run all eight majority-gate inputs at one field point.
    TruthTable(TruthArgs),
    /// Print E_o, gamma_eff and the null population, and cross-check the two cell models.
    Validate(GeometryArgs),
    /// Failure onsets of a one-dimensional sweep CSV.
    Onset(OnsetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Circuit {
    Wire,
    Fanin,
    Fanout,
    Inverter,
    Majority,
}

#[derive(Args, Clone)]
struct GeometryArgs {
    /// Active-dot separation, nm.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Active-dot elevation, nm.
    #[arg(long, default_value_t = 0.5)]
    h: f64,
    /// Pair-to-pair spacing, nm [default: 2a].
    #[arg(long)]
    pitch: Option<f64>,
    /// Effective tunneling energy, eV.
    #[arg(long, default_value_t = 0.010)]
    gamma_eff: f64,
    /// Relative permittivity.
    #[arg(long, default_value_t = 1.0)]
    epsilon_r: f64,
}

impl GeometryArgs {
    fn config(&self) -> Result<BuildConfig<f64>, QcaError> {
        Ok(BuildConfig {
            geometry: Geometry {
                a: self.a,
                h: self.h,
                pitch: self.pitch.unwrap_or(2.0 * self.a),
            },
            params: TwoStateParams {
                gamma_eff: self.gamma_eff,
                delta_o: 0.0,
            },
            constants: PhysicalConstants::with_epsilon_r(self.epsilon_r)?,
        })
    }
}

#[derive(Args)]
struct BuildArgs {
    circuit: Circuit,
    /// Build with every pair turned a quarter turn about its own center.
    #[arg(long)]
    rotated: bool,
    /// Input bits as a 0/1 string: one bit, or three (A B C) for the majority gate.
    #[arg(long)]
    bits: Option<String>,
    /// Device pairs in a wire.
    #[arg(long, default_value_t = 4)]
    pairs: usize,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Output file, or `-` for stdout.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Layout file.
    #[arg(short, long)]
    layout: PathBuf,
    /// E_x range as MIN:MAX:STEPS, or a single value.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    ex: String,
    /// E_y range as MIN:MAX:STEPS, or a single value.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    ey: String,
    #[arg(long, value_enum, default_value = "eo")]
    units: UnitsArg,
    /// Worker threads; 0 means one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Eigensolver residual tolerance, eV.
    #[arg(long)]
    tol: Option<f64>,
    /// Output CSV, or `-` for stdout.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitsArg {
    /// Multiples of E_o.
    Eo,
    /// V/nm.
    Abs,
}

#[derive(Args)]
struct TruthArgs {
    #[arg(long)]
    rotated: bool,
    /// E_x in units of E_o.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    ex: f64,
    /// E_y in units of E_o.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    ey: f64,
    #[command(flatten)]
    geometry: GeometryArgs,
}

#[derive(Args)]
struct OnsetArgs {
    /// Sweep CSV.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "ey")]
    axis: AxisArg,
    /// Fraction of the zero-field output below which the circuit counts as failed.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Onsets further apart than this (in E_o) are reported as asymmetric.
    #[arg(long, default_value_t = 0.025)]
    asymmetry_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Ex,
    Ey,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<QcaError> for Failure {
    fn from(e: QcaError) -> Self {
        match e {
            QcaError::InvalidArgument(_) | QcaError::InvalidSweep(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::TruthTable(a) => cmd_truth_table(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Onset(a) => cmd_onset(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `qca --help` for usage");
            ExitCode::from(2)
        }
    }
}

fn open_output(path: &Path) -> io::Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

fn parse_bits(text: &str, want: usize) -> Result<Vec<bool>, Failure> {
    let bits: Option<Vec<bool>> = text
        .chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect();
    match bits {
        Some(b) if b.len() == want => Ok(b),
        _ => Err(Failure::Usage(format!(
            "--bits expects {want} digit(s) of 0/1, got `{text}`"
        ))),
    }
}

fn cmd_build(args: BuildArgs) -> CmdResult {
    let cfg = args.geometry.config()?;
    let want = if matches!(args.circuit, Circuit::Majority) { 3 } else { 1 };
    let bits = match &args.bits {
        Some(s) => parse_bits(s, want)?,
        None => vec![false; want],
    };
    let layout = match args.circuit {
        Circuit::Wire => build_wire(&cfg, args.pairs, bits[0], args.rotated)?,
        Circuit::Fanin => build_fan_in(&cfg, bits[0], args.rotated)?,
        Circuit::Fanout => build_fan_out(&cfg, bits[0], args.rotated)?,
        Circuit::Inverter => build_inverter(&cfg, bits[0], args.rotated)?,
        Circuit::Majority => build_majority(&cfg, [bits[0], bits[1], bits[2]], args.rotated)?,
    };
    if layout.cell_count() > SOFT_MAX_CELLS {
        eprintln!(
            "warning: {} cells exceeds the {SOFT_MAX_CELLS}-cell working size; solves will be slow",
            layout.cell_count()
        );
    }
    let mut out = open_output(&args.output)?;
    out.write_all(save_layout(&layout)?.as_bytes())?;
    out.flush()?;
    eprintln!(
        "{}: {} cells, {} device pairs",
        layout.name,
        layout.cell_count(),
        layout.cell_count() / 2
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CmdResult {
    let text = std::fs::read_to_string(&args.layout)
        .map_err(|e| Failure::Check(format!("{}: {e}", args.layout.display())))?;
    let layout: Layout = load_layout(&text)?;
    if layout.cell_count() > SOFT_MAX_CELLS {
        eprintln!(
            "warning: {} cells exceeds the {SOFT_MAX_CELLS}-cell working size; solves will be slow",
            layout.cell_count()
        );
    }
    let mut spec = SweepSpec::new(layout, args.ex.parse::<FieldRange<f64>>()?, args.ey.parse()?);
    spec.units = match args.units {
        UnitsArg::Eo => Units::Eo,
        UnitsArg::Abs => Units::Absolute,
    };
    spec.threads = args.threads;
    if let Some(tol) = args.tol {
        spec.solver = SolverOptions::with_tol(tol);
    }
    let start = Instant::now();
    let result = run_sweep(&spec)?;
    let mut out = open_output(&args.output)?;
    write_csv(&result, &mut out)?;
    out.flush()?;
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    let degenerate = result.rows.iter().filter(|r| r.degenerate).count();
    eprintln!(
        "{} points in {:.2?} ({failed} failed, {degenerate} degenerate)",
        result.rows.len(),
        start.elapsed()
    );
    for row in result.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: ({}, {}) E_o: {}",
            row.ex_over_eo,
            row.ey_over_eo,
            row.error.as_deref().unwrap_or_default()
        );
    }
    Ok(())
}

fn cmd_truth_table(args: TruthArgs) -> CmdResult {
    let cfg = args.geometry.config()?;
    let rows = truth_table(&cfg, args.rotated, args.ex, args.ey, &SolverOptions::default())?;
    let mut out = io::stdout().lock();
    writeln!(out, "A B C  M   p_out            result")?;
    for r in &rows {
        let bit = |b: bool| b as u8;
        let p = match &r.p_out {
            Ok(p) => format!("{p:+.9}"),
            Err(e) => format!("error ({e})"),
        };
        writeln!(
            out,
            "{} {} {}  {}   {p:<16} {}",
            bit(r.bits[0]),
            bit(r.bits[1]),
            bit(r.bits[2]),
            bit(r.expected),
            if r.pass { "PASS" } else { "FAIL" }
        )?;
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    writeln!(out, "{passed}/8 PASS")?;
    if passed == rows.len() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} row(s) failed", rows.len() - passed)))
    }
}

fn cmd_validate(args: GeometryArgs) -> CmdResult {
    let cfg = args.config()?;
    let (a, h) = (cfg.geometry.a, cfg.geometry.h);
    let eo = field_scale_eo(a, &cfg.constants)?;
    let p = ThreeStateParams::strong_clock(a, h, &cfg.constants)?;
    let g = gamma_eff(p.v_c, p.e_a, p.gamma);
    let null = null_population(&p)?;
    let wire = build_wire(&cfg, 2, true, false)?;
    let cmp = compare_models(&wire, &FieldVector::zero(), &p)?;

    let mut out = io::stdout().lock();
    writeln!(out, "E_o              {eo:.6} V/nm  (a = {a} nm, epsilon_r = {})", cfg.constants.epsilon_r)?;
    writeln!(out, "E_k              {:.6} eV", eo * a)?;
    writeln!(
        out,
        "clock            gamma = {} eV, E_a = {} eV, E_z = -10 E_o, V_c = {:.6} eV",
        p.gamma, p.e_a, p.v_c
    )?;
    writeln!(out, "gamma_eff        {:.4} meV", g * 1e3)?;
    writeln!(out, "null population  {:.5}", null.value)?;
    writeln!(
        out,
        "two/three-state  max |dP| = {:.5} on a 2-pair wire (M = {})",
        cmp.max_difference,
        cmp.two_state.len()
    )?;

    let mut problems = Vec::new();
    if a == 1.0 && cfg.constants.epsilon_r == 1.0 && !(0.407..=0.427).contains(&eo) {
        problems.push(format!("E_o = {eo} outside [0.407, 0.427]"));
    }
    if null.value > 0.02 {
        problems.push(format!("null population {} above 0.02", null.value));
    }
    if null.degenerate {
        problems.push("three-state ground state is degenerate".to_string());
    }
    if cmp.max_difference > 0.03 {
        problems.push(format!("model disagreement {} above 0.03", cmp.max_difference));
    }
    if problems.is_empty() {
        writeln!(out, "OK")?;
        Ok(())
    } else {
        Err(Failure::Check(problems.join("; ")))
    }
}

fn cmd_onset(args: OnsetArgs) -> CmdResult {
    let file = File::open(&args.input)
        .map_err(|e| Failure::Check(format!("{}: {e}", args.input.display())))?;
    let result = read_csv(BufReader::new(file))?;
    let axis = match args.axis {
        AxisArg::Ex => Axis::Ex,
        AxisArg::Ey => Axis::Ey,
    };
    let onset = failure_onset(&result, axis, args.threshold)?;
    if onset.excluded > 0 {
        eprintln!("warning: {} degenerate or failed row(s) excluded", onset.excluded);
    }
    let show = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.6}"));
    let mut out = io::stdout().lock();
    writeln!(out, "p_out(0)   {:+.9}", onset.p0)?;
    writeln!(out, "onset(+)   {}", show(onset.positive))?;
    writeln!(out, "onset(-)   {}", show(onset.negative))?;
    writeln!(
        out,
        "asymmetric {}",
        if onset.is_asymmetric(args.asymmetry_tol) { "yes" } else { "no" }
    )?;
    Ok(())
}
