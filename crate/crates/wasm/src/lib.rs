//! Browser-facing bindings for the demo page. Each export takes plain
//! scalars, runs one core computation, and returns a JSON string, so the
//! JavaScript side needs no generated glue types. Failures come back as an
//! object with a single "error" field instead of unwinding across the
//! boundary. The same functions compile natively and back the unit tests.

use dsqs_core::circuit::{scan_circuit, squeezed_input};
use dsqs_core::entropy::{min_entropy_scan, scan_report, ScanPoint};
use dsqs_core::phase_space::{char_function, overlap_distribution};
use dsqs_core::states::number_state;
use dsqs_core::{
    KernelOrder, LatticeDims, MinReference, Result, ScanMode, ScanSettings, SqueezeParam,
};
use serde::Serialize;

#[cfg(target_arch = "wasm32")]
use wasm_bindgen::prelude::wasm_bindgen;

fn reply<T: Serialize>(result: Result<T>) -> String {
    let encoded = match result {
        Ok(payload) => serde_json::to_string(&payload),
        Err(err) => return serde_json::json!({ "error": err.to_string() }).to_string(),
    };
    encoded.unwrap_or_else(|err| serde_json::json!({ "error": err.to_string() }).to_string())
}

#[derive(Serialize)]
struct OverlapGrid {
    n: u64,
    level: usize,
    s: f64,
    /// Row-major from the bottom-left window corner (-l, -l).
    values: Vec<f64>,
    max: f64,
}

/// Population of the level-n state over the width-s displaced grid, as a
/// flat nonnegative heatmap.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn overlap_grid(n: u32, level: u32, s: f64) -> String {
    reply((|| {
        let dims = LatticeDims::new(u64::from(n))?;
        let width = SqueezeParam::new(s)?;
        let grid = overlap_distribution(dims, level as usize, width)?.nonnegative_values()?;
        let values: Vec<f64> = grid.iter().copied().collect();
        let max = values.iter().copied().fold(0.0, f64::max);
        Ok(OverlapGrid {
            n: dims.n() as u64,
            level: level as usize,
            s: width.value(),
            values,
            max,
        })
    })())
}

#[derive(Serialize)]
struct EntropyScan {
    n: u64,
    level: usize,
    rows: Vec<ScanPoint>,
    min_e: f64,
    s_at_min: f64,
    multimodal: bool,
}

/// Entropy functionals of the level-n state across a log-spaced width grid,
/// with the correlation referenced to the refined scan minimum.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn entropy_scan(n: u32, level: u32, s_min: f64, s_max: f64, points: u32) -> String {
    reply((|| {
        let dims = LatticeDims::new(u64::from(n))?;
        let rho = number_state(dims, level as usize, SqueezeParam::unit())?.density()?;
        let settings = ScanSettings {
            s_min,
            s_max,
            points: points as usize,
        };
        let min = min_entropy_scan(dims, &rho, &settings)?;
        let rows = scan_report(dims, &rho, MinReference::Constant(min.min_e), &settings)?;
        Ok(EntropyScan {
            n: dims.n() as u64,
            level: level as usize,
            rows,
            min_e: min.min_e,
            s_at_min: min.s_at_min,
            multimodal: min.multimodal,
        })
    })())
}

#[derive(Serialize)]
struct CircuitCompare {
    n: u64,
    level: usize,
    s: f64,
    /// Largest pointwise gap between circuit readouts and the direct trace.
    max_dev: f64,
    input_weight: f64,
    origin_re: f64,
    origin_im: f64,
    /// Row-major |readout| heatmap over the dual lattice.
    magnitudes: Vec<f64>,
    max_magnitude: f64,
}

/// Interference-circuit scan of the level-n state against the directly
/// computed displacement expectations of the same width-toggled input.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn circuit_char_compare(n: u32, level: u32, s: f64) -> String {
    reply((|| {
        let dims = LatticeDims::new(u64::from(n))?;
        let width = SqueezeParam::new(s)?;
        let rho = number_state(dims, level as usize, SqueezeParam::unit())?.density()?;
        let scan = scan_circuit(dims, &rho, width, ScanMode::Characteristic)?;
        let (rho_in, input_weight) = squeezed_input(dims, &rho, width)?;
        let direct = char_function(dims, &rho_in, KernelOrder::Zero, SqueezeParam::unit())?;
        let mut max_dev = 0.0f64;
        for (a, b) in scan.function.values().iter().zip(direct.values()) {
            max_dev = max_dev.max((a - b).norm());
        }
        let magnitudes: Vec<f64> = scan.function.values().iter().map(|z| z.norm()).collect();
        let max_magnitude = magnitudes.iter().copied().fold(0.0, f64::max);
        let origin = scan.function.value(0, 0);
        Ok(CircuitCompare {
            n: dims.n() as u64,
            level: level as usize,
            s: width.value(),
            max_dev,
            input_weight,
            origin_re: origin.re,
            origin_im: origin.im,
            magnitudes,
            max_magnitude,
        })
    })())
}
