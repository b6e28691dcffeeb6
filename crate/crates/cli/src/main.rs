//! `braidkit` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use braidkit::braid::{analyze, phase_diagram, Axis};
use braidkit::circuit::{
    correspondence_residual, disorder_model, greens_reconstruct, parse_si, stability_check, synthesize,
    CircuitParams,
};
use braidkit::eps::{self, BoundaryLine};
use braidkit::model::{ModelSpec, ParamPath};
use braidkit::spectra::{self, BoundaryCondition};
use braidkit::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

const AFTER_HELP: &str = "Exit codes: 0 success, 1 usage, 2 domain error (boundary, EP, singular), 3 I/O.\n\
BRAIDKIT_THREADS caps the worker thread count.";

#[derive(Parser, Debug)]
#[command(name = "braidkit", version, about = "Braiding topology, skin effect and circuit synthesis for long-range non-Hermitian chains", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Braiding index (both methods), braid word and knot name as JSON.
    Braid {
        #[command(flatten)]
        model: ModelArgs,
        /// Brillouin-zone samples for the winding integral and the braid word.
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// ξ on a two-parameter grid.
    ///
    /// CSV columns: axis1,axis2,xi,boundary_flag (xi empty on boundary cells).
    PhaseDiagram {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// PBC strands, OBC eigenstates, or the left-localized fraction f_L over a grid.
    ///
    /// CSV columns: pbc → k,band,re_e,im_e; obc → index,re_e,im_e,center_of_mass,ipr,side;
    /// fl → axis1,axis2,f_l.
    Spectrum {
        #[arg(value_enum)]
        kind: SpectrumKind,
        #[command(flatten)]
        model: ModelArgs,
        /// k samples (pbc).
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Chain length in nodes, two per unit cell (obc, fl).
        #[arg(long, default_value_t = 40)]
        nodes: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exceptional points at real k.
    ///
    /// With --m-values: table with columns m,AB,EF,PQ,RS (--long: m,boundary,type,k).
    /// With --boundary: one line at --m. Otherwise: gap zeros of the given model.
    /// k lists are ';'-separated.
    EpScan {
        /// Comma-separated orders or a range, e.g. 2..6 or 2,3,5.
        #[arg(long)]
        m_values: Option<String>,
        /// Line to scan at order --m.
        #[arg(long, value_enum)]
        boundary: Option<LineArg>,
        /// One row per (m, boundary) instead of one per m.
        #[arg(long)]
        long: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Circuit synthesis, netlists and checks.
    #[command(subcommand)]
    Circuit(CircuitCommand),
}

#[derive(Subcommand, Debug)]
enum CircuitCommand {
    /// Component values as JSON.
    Synth {
        #[command(flatten)]
        params: ParamsArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// SPICE netlist.
    Export {
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(long, default_value_t = 10)]
        cells: usize,
        #[arg(long, default_value = "pbc")]
        bc: BoundaryCondition,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Correspondence residual between eig J(k; ω_r) and −iω_r E±(k).
    Verify {
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Growth rates of the admittance spectrum.
    Stability {
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(long, default_value_t = 10)]
        cells: usize,
        #[arg(long, default_value = "pbc")]
        bc: BoundaryCondition,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Green's-function measurement and reconstruction of the Laplacian.
    Reconstruct {
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(long, default_value_t = 10)]
        cells: usize,
        #[arg(long, default_value = "pbc")]
        bc: BoundaryCondition,
        #[command(flatten)]
        out: OutArgs,
    },
    /// ξ under seeded component tolerance.
    Disorder {
        #[command(flatten)]
        model: ModelArgs,
        /// Tolerance in percent.
        #[arg(long, default_value_t = 5.0)]
        tolerance: f64,
        #[arg(long, default_value_t = 100)]
        draws: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Model JSON file (required for H2/H3).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    cab0: f64,
    #[arg(long, allow_negative_numbers = true)]
    cabm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    cban: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, default_value = "c_ab_neg_m")]
    x: ParamPath,
    #[arg(long, default_value = "c_ba_n")]
    y: ParamPath,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    y_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    y_max: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 121)]
    points: usize,
}

#[derive(Args, Debug, Clone)]
struct ParamsArgs {
    /// CircuitParams JSON file.
    #[arg(long, conflicts_with = "phase")]
    params: Option<PathBuf>,
    /// Preset phase 1..=4, synthesized at 4.7 nF and 200 kHz.
    #[arg(long)]
    phase: Option<u8>,
    #[command(flatten)]
    model: ModelArgs,
    /// Physical C_AB,0, SI suffixes allowed.
    #[arg(long, default_value = "4.7n", value_parser = si_value)]
    c0: f64,
    /// Target frequency in Hz; 200 kHz when omitted.
    #[arg(long, value_parser = si_value)]
    freq: Option<f64>,
    /// Grounding resistance in Ω, or `inf`.
    #[arg(long)]
    r0: Option<String>,
    #[arg(long, value_parser = si_value)]
    esr: Option<f64>,
    #[arg(long)]
    leak: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SpectrumKind {
    Pbc,
    Obc,
    Fl,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
#[value(rename_all = "UPPER")]
enum LineArg {
    Ab,
    Ef,
    Pq,
    Rs,
}

impl From<LineArg> for BoundaryLine {
    fn from(l: LineArg) -> Self {
        match l {
            LineArg::Ab => BoundaryLine::AB,
            LineArg::Ef => BoundaryLine::EF,
            LineArg::Pq => BoundaryLine::PQ,
            LineArg::Rs => BoundaryLine::RS,
        }
    }
}

fn si_value(s: &str) -> Result<f64, String> {
    parse_si(s).ok_or_else(|| format!("`{s}` is not a number"))
}

enum Failure {
    Usage(String),
    Domain(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(m) => Failure::Io(m),
            other => Failure::Domain(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &OutArgs, text: &str) -> CliResult<()> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &OutArgs, value: &serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    emit(out, &text)
}

impl ModelArgs {
    fn load(&self) -> CliResult<ModelSpec> {
        if let Some(path) = &self.model {
            let text = read_file(path)?;
            return serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())));
        }
        let (Some(cabm), Some(cban)) = (self.cabm, self.cban) else {
            return Err(Failure::Usage("give --model FILE or both --cabm and --cban".into()));
        };
        Ok(ModelSpec::h1(self.cab0, cabm, cban, self.m, self.n)?)
    }
}

impl GridArgs {
    fn axes(&self) -> CliResult<(Axis, Axis)> {
        if self.points == 0 {
            return Err(Failure::Usage("--points must be at least 1".into()));
        }
        Ok((Axis::new(self.x, self.x_min, self.x_max, self.points), Axis::new(self.y, self.y_min, self.y_max, self.points)))
    }
}

impl ParamsArgs {
    fn load(&self) -> CliResult<CircuitParams> {
        let mut p = if let Some(path) = &self.params {
            let text = read_file(path)?;
            serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?
        } else {
            let model = match self.phase {
                Some(phase) => CircuitParams::phase_model(phase)?,
                None => self.model.load()?,
            };
            synthesize(&model, self.c0, self.freq)?
        };
        if let Some(r0) = &self.r0 {
            p.r0 = match r0.as_str() {
                "inf" | "none" => None,
                s => Some(si_value(s).map_err(Failure::Usage)?),
            };
        }
        if let Some(esr) = self.esr {
            p.esr = esr;
        }
        if let Some(leak) = self.leak {
            p.inic_leak = leak;
        }
        p.validate()?;
        Ok(p)
    }
}

fn parse_m_values(s: &str) -> CliResult<Vec<usize>> {
    let bad = || Failure::Usage(format!("bad --m-values `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Braid { model, samples, out } => {
            let model = model.load()?;
            let report = analyze(&model, samples)?;
            if report.on_boundary {
                return Err(Failure::Domain(format!("on phase boundary / EP (ξ by roots = {})", report.xi_roots)));
            }
            let mut v = to_json(&report);
            v["knot"] = json!(report.knot.to_string());
            v["braid_word"] = json!(report.braid_word.as_ref().map(|w| w.to_string()));
            emit_json(&out, &v)
        }
        Command::PhaseDiagram { model, grid, format, out } => {
            let template = model.load()?;
            let (a1, a2) = grid.axes()?;
            let d = phase_diagram(&template, a1, a2)?;
            match format {
                Format::Csv => emit(&out, &d.to_csv()),
                Format::Json => emit_json(
                    &out,
                    &json!({
                        "axis1": to_json(&a1),
                        "axis2": to_json(&a2),
                        "xi": d.cells.iter().map(|c| c.xi).collect::<Vec<_>>(),
                        "boundary_count": d.boundary_count(),
                    }),
                ),
            }
        }
        Command::Spectrum { kind, model, samples, nodes, grid, format, out } => {
            let model = model.load()?;
            if kind != SpectrumKind::Pbc && (nodes == 0 || nodes % 2 != 0) {
                return Err(Failure::Usage(format!("--nodes must be a positive even number, got {nodes}")));
            }
            let cells = nodes / 2;
            match kind {
                SpectrumKind::Pbc => {
                    let s = spectra::pbc_strands(&model, samples)?;
                    match format {
                        Format::Csv => emit(&out, &s.to_csv()),
                        Format::Json => emit_json(&out, &to_json(&s)),
                    }
                }
                SpectrumKind::Obc => {
                    let s = spectra::chain_spectrum(&model, cells, BoundaryCondition::Obc)?;
                    match format {
                        Format::Csv => emit(&out, &s.to_csv()),
                        Format::Json => emit_json(&out, &to_json(&s)),
                    }
                }
                SpectrumKind::Fl => {
                    let (a1, a2) = grid.axes()?;
                    let rows: Vec<(f64, f64, f64)> = (0..a1.points * a2.points)
                        .into_par_iter()
                        .map(|idx| {
                            let (x, y) = (a1.value(idx / a2.points), a2.value(idx % a2.points));
                            let m = model.with_param(a1.param, x)?.with_param(a2.param, y)?;
                            Ok((x, y, spectra::left_fraction(&m, cells)?))
                        })
                        .collect::<braidkit::Result<_>>()?;
                    match format {
                        Format::Csv => {
                            let mut text = String::from("axis1,axis2,f_l\n");
                            for (x, y, f) in rows {
                                text.push_str(&format!("{x},{y},{f}\n"));
                            }
                            emit(&out, &text)
                        }
                        Format::Json => emit_json(
                            &out,
                            &json!(rows.iter().map(|(x, y, f)| json!({"axis1": x, "axis2": y, "f_l": f})).collect::<Vec<_>>()),
                        ),
                    }
                }
            }
        }
        Command::EpScan { m_values, boundary, long, model, format, out } => {
            if let Some(spec) = m_values {
                let rows = eps::ep_table_generate(&parse_m_values(&spec)?)?;
                return match format {
                    Format::Csv if long => emit(&out, &eps::ep_table_csv(&rows)),
                    Format::Csv => emit(&out, &eps::ep_table_wide_csv(&rows)),
                    Format::Json => emit_json(&out, &to_json(&rows)),
                };
            }
            let (k, kind) = if let Some(line) = boundary {
                let line = BoundaryLine::from(line);
                (eps::gap_zeros_real_k(&line.model(model.m)?)?, Some(line.transition()))
            } else {
                (eps::gap_zeros_real_k(&model.load()?)?, None)
            };
            match format {
                Format::Csv => {
                    let ks: Vec<String> = k.iter().map(|x| format!("{x}")).collect();
                    let kind = kind.map(|t| t.to_string()).unwrap_or_default();
                    emit(&out, &format!("type,k\n{kind},{}\n", ks.join(";")))
                }
                Format::Json => emit_json(&out, &json!({"type": kind.map(|t| t.to_string()), "k": k})),
            }
        }
        Command::Circuit(cmd) => run_circuit(cmd),
    }
}

fn run_circuit(cmd: CircuitCommand) -> CliResult<()> {
    match cmd {
        CircuitCommand::Synth { params, out } => {
            let p = params.load()?;
            let mut v = to_json(&p);
            v["detuned"] = json!(p.detuned());
            v["f_r"] = json!(p.resonant_frequency());
            emit_json(&out, &v)
        }
        CircuitCommand::Export { params, cells, bc, out } => {
            let p = params.load()?;
            emit(&out, &p.netlist(cells, bc)?.to_spice())
        }
        CircuitCommand::Verify { params, samples, out } => {
            let mut p = params.load()?;
            p.r0 = None;
            p.esr = 0.0;
            p.inic_leak = 0.0;
            let residual = correspondence_residual(&p, samples)?;
            emit_json(
                &out,
                &json!({
                    "correspondence_residual": residual,
                    "samples": samples,
                    "pass": residual < 1e-10,
                    "f_a": p.omega_a() / (2.0 * std::f64::consts::PI),
                    "f_b": p.omega_b() / (2.0 * std::f64::consts::PI),
                    "detuned": p.detuned(),
                }),
            )
        }
        CircuitCommand::Stability { params, cells, bc, out } => {
            let p = params.load()?;
            let s = stability_check(&p, p.omega_r(), cells, bc)?;
            emit_json(&out, &to_json(&s))
        }
        CircuitCommand::Reconstruct { params, cells, bc, out } => {
            let p = params.load()?;
            let r = greens_reconstruct(&p, p.omega_r(), cells, bc)?;
            emit_json(&out, &json!({"error": r.error, "condition": r.condition, "dim": r.laplacian.dim()}))
        }
        CircuitCommand::Disorder { model, tolerance, draws, seed, out } => {
            let model = model.load()?;
            let base = braidkit::braid::braiding_index_roots(&model)?;
            if base.on_boundary {
                return Err(Failure::Domain("unperturbed model is on a phase boundary".into()));
            }
            let xis: Vec<Option<i32>> = (0..draws)
                .into_par_iter()
                .map(|i| {
                    let d = disorder_model(&model, tolerance, seed.wrapping_add(i))?;
                    let r = braidkit::braid::braiding_index_roots(&d)?;
                    Ok((!r.on_boundary).then_some(r.xi))
                })
                .collect::<braidkit::Result<_>>()?;
            let changed = xis.iter().filter(|x| **x != Some(base.xi)).count();
            let mut counts = std::collections::BTreeMap::new();
            for x in &xis {
                let key = x.map_or_else(|| "boundary".to_string(), |v| v.to_string());
                *counts.entry(key).or_insert(0usize) += 1;
            }
            emit_json(
                &out,
                &json!({
                    "xi": base.xi,
                    "tolerance_pct": tolerance,
                    "draws": draws,
                    "seed": seed,
                    "changed": changed,
                    "stable": changed == 0,
                    "xi_counts": counts,
                }),
            )
        }
    }
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("BRAIDKIT_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Failure::Usage(format!("BRAIDKIT_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(3)
        }
    }
}
