use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use dsqs_core::circuit::{estimate_from_shots, scan_circuit, ScanMode};
use dsqs_core::entropy::{
    entropy_at, entropy_report, min_entropy_scan, scan_report, MinReference, ScanSettings,
};
use dsqs_core::kernels::{kernel_table, load_kernel_cache, save_kernel_cache, KernelKind};
use dsqs_core::phase_space::{
    centered_dft, char_function, overlap_distribution, quasi_distribution, GridExport,
};
use dsqs_core::states::{fock_coefficients, vacuum_state};
use dsqs_core::validate::run_validation;
use dsqs_core::{KernelOrder, LatticeDims, SqueezeParam, StateSpec, ValidationLevel};

use crate::output::{emit, grid_csv_bytes, json_bytes, rows_csv_bytes, scan_csv_bytes};
use crate::{
    CacheArgs, Cmd, DimArgs, Format, GridArgs, KernelKindArg, LevelArg, MinRefArg, ModeArg,
    OutputArgs, StateArgs, TargetArg, WidthArgs,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] dsqs_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Core(err.into())
    }
}

impl CliError {
    /// Exit code for a failed run: conditioning failures get their own
    /// code so callers can distinguish them from bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(err) if err.is_conditioning() => 2,
            _ => 1,
        }
    }
}

pub fn dispatch(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Wavefunction {
            dim,
            level,
            width,
            out,
        } => cmd_wavefunction(dim, level, width, &out).map(|_| 0),
        Cmd::Kernel {
            dim,
            kind,
            level,
            width,
            cache,
            out,
        } => cmd_kernel(dim, kind, level, width, &cache, &out).map(|_| 0),
        Cmd::Wigner(args) => cmd_grid(&args, Quasi::Wigner).map(|_| 0),
        Cmd::Husimi(args) => cmd_grid(&args, Quasi::Husimi).map(|_| 0),
        Cmd::Pfunction(args) => cmd_grid(&args, Quasi::Pfunction).map(|_| 0),
        Cmd::Charfunc(args) => cmd_grid(&args, Quasi::Charfunc).map(|_| 0),
        Cmd::Overlap {
            dim,
            level,
            width,
            cache,
            out,
        } => cmd_overlap(dim, level, width, &cache, &out).map(|_| 0),
        Cmd::Entropy {
            dim,
            state,
            width,
            scan,
            min_ref,
            min_const,
            cache,
            out,
        } => cmd_entropy(dim, &state, width, scan, min_ref, min_const, &cache, &out).map(|_| 0),
        Cmd::Circuit {
            dim,
            state,
            width,
            mode,
            shots,
            seed,
            cache,
            out,
        } => cmd_circuit(dim, &state, width, mode, shots, seed, &cache, &out).map(|_| 0),
        Cmd::Reproduce { target, output } => cmd_reproduce(target, &output).map(|_| 0),
        Cmd::Validate { level, output } => cmd_validate(level, output.as_deref()),
    }
}

/// Reads the state flag: inline JSON when it looks like an object,
/// otherwise the path of a JSON file.
fn load_state(text: &str) -> Result<StateSpec, CliError> {
    let body = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text)?
    };
    Ok(StateSpec::from_json(&body)?)
}

/// Loads the kernel cache before the work and refreshes it afterwards.
fn with_cache<T>(
    cache: &CacheArgs,
    work: impl FnOnce() -> Result<T, CliError>,
) -> Result<T, CliError> {
    if let Some(path) = &cache.cache {
        if path.exists() {
            load_kernel_cache(path)?;
        }
    }
    let value = work()?;
    if let Some(path) = &cache.cache {
        save_kernel_cache(path)?;
    }
    Ok(value)
}

fn emit_grid(
    out: &OutputArgs,
    export: &GridExport,
    coords: (&str, &str),
) -> Result<(), CliError> {
    let bytes = match out.format {
        Format::Json => json_bytes(export)?,
        Format::Csv => grid_csv_bytes(export, coords)?,
    };
    emit(out.output.as_deref(), &bytes)
}

#[derive(Serialize)]
struct WavefunctionExport {
    #[serde(rename = "N")]
    n: u64,
    s: f64,
    level: usize,
    raw_norm: f64,
    amplitudes: Vec<[f64; 2]>,
}

fn cmd_wavefunction(
    dim: DimArgs,
    level: usize,
    width: WidthArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let dims = LatticeDims::new(dim.n_dim)?;
    let s = width.resolve()?;
    let table = fock_coefficients(dims, level, s)?;
    let state = table.state();
    let bytes = match out.format {
        Format::Json => json_bytes(&WavefunctionExport {
            n: dim.n_dim,
            s: s.value(),
            level,
            raw_norm: table.raw_norm(),
            amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        })?,
        Format::Csv => rows_csv_bytes(
            &["kappa", "re", "im"],
            dims.range()
                .zip(state.amplitudes())
                .map(|(kappa, z)| (kappa, z.re, z.im)),
        )?,
    };
    emit(out.output.as_deref(), &bytes)
}

#[derive(Serialize)]
struct KernelExport {
    #[serde(rename = "N")]
    n: u64,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<usize>,
    min_abs: f64,
    max_abs: f64,
    conditioning: f64,
    values: Vec<f64>,
}

fn cmd_kernel(
    dim: DimArgs,
    kind: KernelKindArg,
    level: Option<usize>,
    width: WidthArgs,
    cache: &CacheArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let dims = LatticeDims::new(dim.n_dim)?;
    let s = width.resolve()?;
    let (kernel_kind, label) = match kind {
        KernelKindArg::Vacuum => (KernelKind::Vacuum, "vacuum"),
        KernelKindArg::Squeezed => (KernelKind::Squeezed { s }, "squeezed"),
        KernelKindArg::Ratio => (KernelKind::Ratio { s }, "ratio"),
        KernelKindArg::Number => {
            let level = level.ok_or_else(|| {
                CliError::Usage("the number kernel requires --level".into())
            })?;
            (KernelKind::Number { level }, "number")
        }
    };
    with_cache(cache, || {
        let table = kernel_table(dims, kernel_kind)?;
        let values: Vec<f64> = dims
            .range()
            .flat_map(|eta| dims.range().map(move |xi| (eta, xi)))
            .map(|(eta, xi)| table.value(eta, xi))
            .collect();
        let bytes = match out.format {
            Format::Json => json_bytes(&KernelExport {
                n: dim.n_dim,
                kind: label.to_string(),
                s: match kind {
                    KernelKindArg::Squeezed | KernelKindArg::Ratio => Some(s.value()),
                    _ => None,
                },
                level: match kernel_kind {
                    KernelKind::Number { level } => Some(level),
                    _ => None,
                },
                min_abs: table.min_abs(),
                max_abs: table.max_abs(),
                conditioning: table.conditioning(),
                values,
            })?,
            Format::Csv => rows_csv_bytes(
                &["eta", "xi", "value"],
                dims.range().flat_map(|eta| {
                    let table = table.clone();
                    dims.range()
                        .map(move |xi| (eta, xi, table.value(eta, xi)))
                }),
            )?,
        };
        emit(out.output.as_deref(), &bytes)
    })
}

#[derive(Clone, Copy)]
enum Quasi {
    Wigner,
    Husimi,
    Pfunction,
    Charfunc,
}

fn cmd_grid(args: &GridArgs, which: Quasi) -> Result<(), CliError> {
    let dims = LatticeDims::new(args.dim.n_dim)?;
    let s = args.width.resolve()?;
    let spec = load_state(&args.state.state)?;
    with_cache(&args.cache, || {
        let rho = spec.build_density(dims)?;
        let (function, label, coords) = match which {
            Quasi::Wigner => (
                quasi_distribution(dims, &rho, KernelOrder::Zero, s)?,
                "wigner",
                ("mu", "nu"),
            ),
            Quasi::Husimi => (
                quasi_distribution(dims, &rho, KernelOrder::MinusOne, s)?,
                "husimi",
                ("mu", "nu"),
            ),
            Quasi::Pfunction => (
                quasi_distribution(dims, &rho, KernelOrder::PlusOne, s)?,
                "pfunction",
                ("mu", "nu"),
            ),
            Quasi::Charfunc => (
                char_function(dims, &rho, KernelOrder::Zero, s)?,
                "charfunc",
                ("eta", "xi"),
            ),
        };
        emit_grid(&args.out, &GridExport::from_function(&function, label), coords)
    })
}

fn cmd_overlap(
    dim: DimArgs,
    level: usize,
    width: WidthArgs,
    cache: &CacheArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let dims = LatticeDims::new(dim.n_dim)?;
    let s = width.resolve()?;
    with_cache(cache, || {
        let function = overlap_distribution(dims, level, s)?;
        emit_grid(out, &GridExport::from_function(&function, "overlap"), ("mu", "nu"))
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_entropy(
    dim: DimArgs,
    state: &StateArgs,
    width: WidthArgs,
    scan: Option<ScanSettings>,
    min_ref: MinRefArg,
    min_const: Option<f64>,
    cache: &CacheArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let dims = LatticeDims::new(dim.n_dim)?;
    let s = width.resolve()?;
    let spec = load_state(&state.state)?;
    let reference = match (min_ref, min_const) {
        (MinRefArg::A, None) => MinReference::StateScan,
        (MinRefArg::B, Some(value)) => MinReference::Constant(value),
        (MinRefArg::C, None) => MinReference::VacuumScan,
        (MinRefArg::B, None) => {
            return Err(CliError::Usage("--min-ref B requires --min-const".into()))
        }
        (_, Some(_)) => {
            return Err(CliError::Usage(
                "--min-const only applies to --min-ref B".into(),
            ))
        }
    };
    with_cache(cache, || {
        let rho = spec.build_density(dims)?;
        let bytes = match scan {
            Some(settings) => {
                let rows = scan_report(dims, &rho, reference, &settings)?;
                match out.format {
                    Format::Json => json_bytes(&rows)?,
                    Format::Csv => scan_csv_bytes(&rows)?,
                }
            }
            None => {
                if out.format == Format::Csv {
                    return Err(CliError::Usage(
                        "a single entropy report is json only; pass --scan for csv rows".into(),
                    ));
                }
                let report = entropy_report(dims, &rho, s, reference, &ScanSettings::default())?;
                json_bytes(&report)?
            }
        };
        emit(out.output.as_deref(), &bytes)
    })
}

/// Shot sampling happens at the displacement-readout level; a sampled
/// Wigner grid is assembled by the same centered transform as the exact
/// path, so estimates stay faithful to what the hardware would produce.
fn sampled_circuit_export(
    dims: LatticeDims,
    rho: &dsqs_core::DensityMatrix,
    s: SqueezeParam,
    mode: ScanMode,
    shots: u64,
    seed: u64,
) -> Result<GridExport, CliError> {
    let scan = scan_circuit(dims, rho, s, ScanMode::Characteristic)?;
    let root = dims.n_f64().sqrt();
    let n = dims.n();
    let mut sampled = Array2::<Complex64>::zeros((n, n));
    let mut stream = seed;
    for eta in dims.range() {
        for xi in dims.range() {
            let exact = scan.function.value(eta, xi);
            let sz = estimate_from_shots(root * exact.re, shots, stream)?;
            let sy = estimate_from_shots(root * exact.im, shots, stream.wrapping_add(1))?;
            stream = stream.wrapping_add(2);
            sampled[[dims.idx(eta), dims.idx(xi)]] = Complex64::new(sz, sy) / root;
        }
    }
    let (kind, values, synthesized) = match mode {
        ScanMode::Characteristic => ("charfunc", sampled, false),
        ScanMode::Wigner => ("wigner", centered_dft(dims, &sampled, -1)?, true),
    };
    Ok(GridExport {
        n: dims.n() as u64,
        s: s.value(),
        order: 0,
        kind: kind.to_string(),
        source: Some("circuit".to_string()),
        synthesized_ft: Some(synthesized),
        values: values.iter().map(|z| [z.re, z.im]).collect(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_circuit(
    dim: DimArgs,
    state: &StateArgs,
    width: WidthArgs,
    mode: ModeArg,
    shots: Option<u64>,
    seed: u64,
    cache: &CacheArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let dims = LatticeDims::new(dim.n_dim)?;
    let s = width.resolve()?;
    let spec = load_state(&state.state)?;
    let scan_mode = match mode {
        ModeArg::Char => ScanMode::Characteristic,
        ModeArg::Wigner => ScanMode::Wigner,
    };
    with_cache(cache, || {
        let rho = spec.build_density(dims)?;
        let export = match shots {
            Some(k) => sampled_circuit_export(dims, &rho, s, scan_mode, k, seed)?,
            None => {
                let scan = scan_circuit(dims, &rho, s, scan_mode)?;
                let label = match scan_mode {
                    ScanMode::Characteristic => "charfunc",
                    ScanMode::Wigner => "wigner",
                };
                let mut export = GridExport::from_function(&scan.function, label);
                export.source = Some("circuit".to_string());
                export.synthesized_ft = Some(scan.synthesized_ft);
                export
            }
        };
        let coords = match scan_mode {
            ScanMode::Characteristic => ("eta", "xi"),
            ScanMode::Wigner => ("mu", "nu"),
        };
        emit_grid(out, &export, coords)
    })
}

/// Reference joint-entropy values at unit width for the vacuum.
const REFERENCE_UNIT_WIDTH_ENTROPY: [(u64, f64); 4] = [
    (3, 0.625948),
    (5, 0.953965),
    (7, 0.992272),
    (9, 0.998598),
];

#[derive(Serialize)]
struct EntropyTableRow {
    #[serde(rename = "N")]
    n: u64,
    reference: f64,
    e_unit_width: f64,
    deviation: f64,
    min_e_scan: f64,
    s_at_min: f64,
    multimodal: bool,
}

fn cmd_reproduce(target: TargetArg, outdir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(outdir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    match target {
        TargetArg::Fig1 => {
            let dims = LatticeDims::new(17)?;
            let widths = [
                ("s1", SqueezeParam::unit()),
                ("sq5", SqueezeParam::from_squared(5.0)?),
                ("sinvsq5", SqueezeParam::from_inverse_squared(5.0)?),
            ];
            for level in [0usize, 1] {
                for (tag, s) in widths {
                    let function = overlap_distribution(dims, level, s)?;
                    let export = GridExport::from_function(&function, "overlap");
                    let path = outdir.join(format!("fig1_n{level}_{tag}.csv"));
                    emit(Some(&path), &grid_csv_bytes(&export, ("mu", "nu"))?)?;
                    written.push(path);
                }
            }
        }
        TargetArg::Fig3 => {
            let dims = LatticeDims::new(3)?;
            let rho = vacuum_state(dims)?.density()?;
            let rows = scan_report(
                dims,
                &rho,
                MinReference::StateScan,
                &ScanSettings::default(),
            )?;
            let path = outdir.join("fig3_entropy_scan.csv");
            emit(Some(&path), &scan_csv_bytes(&rows)?)?;
            written.push(path);
        }
        TargetArg::EntropyTable => {
            let mut rows = Vec::new();
            for (n, reference) in REFERENCE_UNIT_WIDTH_ENTROPY {
                let dims = LatticeDims::new(n)?;
                let rho = vacuum_state(dims)?.density()?;
                let (e_unit_width, _, _) = entropy_at(dims, &rho, SqueezeParam::unit())?;
                let scan = min_entropy_scan(dims, &rho, &ScanSettings::default())?;
                rows.push(EntropyTableRow {
                    n,
                    reference,
                    e_unit_width,
                    deviation: (e_unit_width - reference).abs(),
                    min_e_scan: scan.min_e,
                    s_at_min: scan.s_at_min,
                    multimodal: scan.multimodal,
                });
            }
            let path = outdir.join("entropy_table.json");
            emit(Some(&path), &json_bytes(&rows)?)?;
            written.push(path);
        }
    }
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_validate(level: LevelArg, output: Option<&Path>) -> Result<i32, CliError> {
    let level = match level {
        LevelArg::Fast => ValidationLevel::Fast,
        LevelArg::Full => ValidationLevel::Full,
    };
    let report = run_validation(level)?;
    for check in &report.checks {
        let verdict = match check.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        match check.threshold {
            Some(threshold) => eprintln!(
                "{verdict:5} {:<48} measured {:>12.5e}  threshold {:.1e}",
                check.name, check.measured, threshold
            ),
            None => eprintln!(
                "{verdict:5} {:<48} measured {:>12.5e}",
                check.name, check.measured
            ),
        }
    }
    emit(output, &json_bytes(&report)?)?;
    Ok(if report.all_hard_passed { 0 } else { 3 })
}
