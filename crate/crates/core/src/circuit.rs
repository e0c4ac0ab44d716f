use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::SqueezeParam;
use crate::lattice::LatticeDims;
use crate::linalg::operator_norm;
use crate::operators::{
    displacement, involution_defect, mapping_kernel, DensityMatrix, KernelOrder,
};
use crate::phase_space::{centered_dft, FunctionKind, PhaseSpaceFunction};
use crate::states::squeezing_generator;

/// Slack on ancilla trace and eigenvalue checks between stages.
const ANCILLA_TOL: f64 = 1e-12;

/// Largest involution defect under which the rescaled symmetric mapping
/// operator still qualifies as a gate for a direct Wigner readout.
const INVOLUTION_GATE_TOL: f64 = 1e-8;

/// Pauli readouts of one ancilla-interference run. For a unitary gate G
/// they encode sz + i sy = Tr[G rho]. `used_ft` records whether the run
/// gated with a rescaled symmetric mapping operator (the transform stage
/// realized in hardware) instead of a plain displacement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitResult {
    pub sz: f64,
    pub sy: f64,
    pub gate_label: String,
    pub used_ft: bool,
}

/// Which grid a full phase-space scan assembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Characteristic,
    Wigner,
}

/// Result of scanning interference circuits over the dual lattice.
#[derive(Clone, Debug)]
pub struct CircuitScan {
    pub function: PhaseSpaceFunction,
    /// True when the Wigner grid came from a transform of characteristic
    /// readouts rather than direct symmetric-operator gates.
    pub synthesized_ft: bool,
    pub involution_defect: f64,
    /// Weight of the width-toggled input state before renormalization.
    pub input_weight: f64,
}

/// Applies the width toggle to the system register and renormalizes.
/// Unit width leaves the state untouched; the returned weight is the
/// trace absorbed by the renormalization.
pub fn squeezed_input(
    dims: LatticeDims,
    rho: &DensityMatrix,
    s: SqueezeParam,
) -> Result<(DensityMatrix, f64)> {
    if s.value() == 1.0 {
        return Ok((rho.clone(), 1.0));
    }
    let x = squeezing_generator(dims, s)?;
    let xd = x.t().mapv(|z| z.conj());
    let moved = x.dot(rho.matrix()).dot(&xd);
    let weight = moved.diag().sum().re;
    if weight < 1e-12 {
        return Err(Error::InvalidState {
            detail: format!("width toggle annihilates the state, trace {weight:e}"),
        });
    }
    Ok((
        DensityMatrix::from_matrix(dims, moved.mapv(|z| z / weight))?,
        weight,
    ))
}

/// Ancilla-row blocks of the joint state, row-major: [00, 01, 10, 11].
type Blocks = [Array2<Complex64>; 4];

fn block_trace(b: &Array2<Complex64>) -> Complex64 {
    b.diag().sum()
}

fn check_ancilla(blocks: &Blocks, stage: &str) -> Result<()> {
    let r = [
        block_trace(&blocks[0]),
        block_trace(&blocks[1]),
        block_trace(&blocks[2]),
        block_trace(&blocks[3]),
    ];
    let trace = r[0] + r[3];
    if (trace - Complex64::new(1.0, 0.0)).norm() > ANCILLA_TOL {
        return Err(Error::NumericalConsistency {
            detail: format!("ancilla trace {trace} after {stage} deviates from 1"),
        });
    }
    if (r[1] - r[2].conj()).norm() > ANCILLA_TOL {
        return Err(Error::NumericalConsistency {
            detail: format!("ancilla block off-diagonals lose Hermiticity after {stage}"),
        });
    }
    let half = 0.5 * trace.re;
    let det = (r[0] * r[3] - r[1] * r[2]).re;
    let disc = (half * half - det).max(0.0);
    let lo = half - disc.sqrt();
    let hi = half + disc.sqrt();
    if lo < -ANCILLA_TOL || hi > 1.0 + ANCILLA_TOL {
        return Err(Error::NumericalConsistency {
            detail: format!("ancilla eigenvalues [{lo}, {hi}] after {stage} leave [0, 1]"),
        });
    }
    Ok(())
}

fn apply_hadamard(blocks: &mut Blocks) {
    // h = [[1, 1], [1, -1]] / sqrt(2); blocks transform as h b h / 2.
    let sum = |a: &Array2<Complex64>, b: &Array2<Complex64>| a + b;
    let dif = |a: &Array2<Complex64>, b: &Array2<Complex64>| a - b;
    let row0 = [sum(&blocks[0], &blocks[2]), sum(&blocks[1], &blocks[3])];
    let row1 = [dif(&blocks[0], &blocks[2]), dif(&blocks[1], &blocks[3])];
    let next = [
        sum(&row0[0], &row0[1]),
        dif(&row0[0], &row0[1]),
        sum(&row1[0], &row1[1]),
        dif(&row1[0], &row1[1]),
    ];
    for (dst, src) in blocks.iter_mut().zip(next) {
        *dst = src.mapv(|z| z * 0.5);
    }
}

fn apply_pauli_x(blocks: &mut Blocks) {
    blocks.swap(0, 3);
    blocks.swap(1, 2);
}

fn apply_controlled(blocks: &mut Blocks, gate: &Array2<Complex64>) {
    let gd = gate.t().mapv(|z| z.conj());
    blocks[1] = blocks[1].dot(&gd);
    blocks[2] = gate.dot(&blocks[2]);
    blocks[3] = gate.dot(&blocks[3]).dot(&gd);
}

/// Runs the interference sequence (ancilla Hadamard, controlled gate,
/// ancilla flip, ancilla Hadamard) on an already prepared input and reads
/// out both Pauli expectations, checking ancilla health at every stage and
/// the readouts against the direct trace.
fn interfere(dims: LatticeDims, gate: &Array2<Complex64>, rho_in: &DensityMatrix) -> Result<(f64, f64)> {
    let n = dims.n();
    if gate.nrows() != n || gate.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: gate.nrows().max(gate.ncols()),
        });
    }
    let zero = Array2::<Complex64>::zeros((n, n));
    let mut blocks: Blocks = [
        rho_in.matrix().clone(),
        zero.clone(),
        zero.clone(),
        zero,
    ];
    check_ancilla(&blocks, "preparation")?;
    apply_hadamard(&mut blocks);
    check_ancilla(&blocks, "first Hadamard")?;
    apply_controlled(&mut blocks, gate);
    check_ancilla(&blocks, "controlled gate")?;
    apply_pauli_x(&mut blocks);
    check_ancilla(&blocks, "ancilla flip")?;
    apply_hadamard(&mut blocks);
    check_ancilla(&blocks, "second Hadamard")?;

    let sz = block_trace(&blocks[0]) - block_trace(&blocks[3]);
    let sy = Complex64::i() * (block_trace(&blocks[1]) - block_trace(&blocks[2]));
    if sz.im.abs() > ANCILLA_TOL || sy.im.abs() > ANCILLA_TOL {
        return Err(Error::NumericalConsistency {
            detail: format!("complex residue in Pauli readouts ({sz}, {sy})"),
        });
    }
    let direct = gate.dot(rho_in.matrix()).diag().sum();
    if (sz.re - direct.re).abs() > 1e-12 || (sy.re - direct.im).abs() > 1e-12 {
        return Err(Error::NumericalConsistency {
            detail: format!(
                "interference readout ({}, {}) deviates from direct trace {direct}",
                sz.re, sy.re
            ),
        });
    }
    Ok((sz.re, sy.re))
}

/// Interference run against a width-toggled input. The readout magnitude
/// is bounded by the gate's operator norm (the toggled input has unit
/// trace); exceeding it means the simulation lost consistency.
pub fn run_scattering(
    dims: LatticeDims,
    gate: &Array2<Complex64>,
    label: &str,
    rho: &DensityMatrix,
    s: SqueezeParam,
) -> Result<CircuitResult> {
    let (rho_in, _) = squeezed_input(dims, rho, s)?;
    let (sz, sy) = interfere(dims, gate, &rho_in)?;
    let bound = operator_norm(gate)? + 1e-10;
    if sz.hypot(sy) > bound {
        return Err(Error::NumericalConsistency {
            detail: format!(
                "readout magnitude {} exceeds the gate norm bound {bound}",
                sz.hypot(sy)
            ),
        });
    }
    Ok(CircuitResult {
        sz,
        sy,
        gate_label: label.to_string(),
        used_ft: false,
    })
}

/// Single-point Wigner readout. Gates directly with the rescaled symmetric
/// mapping operator when it is close enough to unitary, and otherwise
/// synthesizes the point from a characteristic scan followed by the
/// classical centered transform. Either way sz + i sy = sqrt(N) W(mu, nu).
pub fn wigner_via_circuit(
    dims: LatticeDims,
    mu_bar: i64,
    nu_bar: i64,
    rho: &DensityMatrix,
    s: SqueezeParam,
) -> Result<CircuitResult> {
    let defect = involution_defect(dims)?;
    let root = dims.n_f64().sqrt();
    if defect <= INVOLUTION_GATE_TOL {
        let gate = mapping_kernel(dims, mu_bar, nu_bar, KernelOrder::Zero)?.mapv(|z| z * root);
        let label = format!("sqrt(N) T0({mu_bar}, {nu_bar})");
        let mut out = run_scattering(dims, &gate, &label, rho, s)?;
        out.used_ft = true;
        return Ok(out);
    }
    let scan = scan_circuit(dims, rho, s, ScanMode::Wigner)?;
    let w = scan.function.value(mu_bar, nu_bar) * root;
    Ok(CircuitResult {
        sz: w.re,
        sy: w.im,
        gate_label: format!(
            "synthesized transform readout at ({mu_bar}, {nu_bar}), involution defect {defect:.2e}"
        ),
        used_ft: false,
    })
}

/// Unitary displacement gate sqrt(N) S(eta, xi) with its label.
pub fn displacement_gate(
    dims: LatticeDims,
    eta: i64,
    xi: i64,
) -> Result<(Array2<Complex64>, String)> {
    let root = dims.n_f64().sqrt();
    let gate = displacement(dims, eta, xi)?.mapv(|z| z * root);
    Ok((gate, format!("sqrt(N) S({eta}, {xi})")))
}

/// Scans interference circuits over the dual lattice. Characteristic mode
/// returns the raw readout grid Tr[S rho_in]. Wigner mode gates directly
/// with rescaled symmetric mapping operators when they are close enough to
/// unitary, and otherwise synthesizes the grid by transforming the
/// characteristic readouts.
pub fn scan_circuit(
    dims: LatticeDims,
    rho: &DensityMatrix,
    s: SqueezeParam,
    mode: ScanMode,
) -> Result<CircuitScan> {
    let (rho_in, input_weight) = squeezed_input(dims, rho, s)?;
    let defect = involution_defect(dims)?;
    let unit = SqueezeParam::new(1.0)?;
    let n = dims.n();
    let root = dims.n_f64().sqrt();

    if mode == ScanMode::Wigner && defect <= INVOLUTION_GATE_TOL {
        let mut grid = Array2::<Complex64>::zeros((n, n));
        for mu in dims.range() {
            for nu in dims.range() {
                let gate = mapping_kernel(dims, mu, nu, KernelOrder::Zero)?.mapv(|z| z * root);
                let (sz, sy) = interfere(dims, &gate, &rho_in)?;
                grid[[dims.idx(mu), dims.idx(nu)]] = Complex64::new(sz, sy) / root;
            }
        }
        let function = PhaseSpaceFunction::distribution(
            dims,
            FunctionKind::Quasiprobability,
            KernelOrder::Zero,
            unit,
            grid,
        )?;
        return Ok(CircuitScan {
            function,
            synthesized_ft: false,
            involution_defect: defect,
            input_weight,
        });
    }

    let mut char_grid = Array2::<Complex64>::zeros((n, n));
    for eta in dims.range() {
        for xi in dims.range() {
            let (gate, _) = displacement_gate(dims, eta, xi)?;
            let (sz, sy) = interfere(dims, &gate, &rho_in)?;
            char_grid[[dims.idx(eta), dims.idx(xi)]] = Complex64::new(sz, sy) / root;
        }
    }
    match mode {
        ScanMode::Characteristic => Ok(CircuitScan {
            function: PhaseSpaceFunction::characteristic(
                dims,
                KernelOrder::Zero,
                unit,
                char_grid,
            )?,
            synthesized_ft: false,
            involution_defect: defect,
            input_weight,
        }),
        ScanMode::Wigner => {
            let wigner = centered_dft(dims, &char_grid, -1)?;
            Ok(CircuitScan {
                function: PhaseSpaceFunction::distribution(
                    dims,
                    FunctionKind::Quasiprobability,
                    KernelOrder::Zero,
                    unit,
                    wigner,
                )?,
                synthesized_ft: true,
                involution_defect: defect,
                input_weight,
            })
        }
    }
}

/// Bernoulli estimate of one Pauli expectation from a finite shot budget,
/// with a fixed seed for reproducibility.
pub fn estimate_from_shots(expectation: f64, shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidState {
            detail: "shot budget must be positive".into(),
        });
    }
    if expectation.abs() > 1.0 + 1e-9 {
        return Err(Error::InvalidState {
            detail: format!("expectation {expectation} outside [-1, 1]"),
        });
    }
    let p = (0.5 * (1.0 + expectation)).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..shots).filter(|_| rng.gen_bool(p)).count();
    Ok(2.0 * hits as f64 / shots as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{char_function, quasi_distribution};
    use crate::states::vacuum_state;
    use approx::assert_abs_diff_eq;

    fn dims(n: u64) -> LatticeDims {
        LatticeDims::new(n).unwrap()
    }

    fn sq(s: f64) -> SqueezeParam {
        SqueezeParam::new(s).unwrap()
    }

    fn vacuum_density(d: LatticeDims) -> DensityMatrix {
        vacuum_state(d).unwrap().density().unwrap()
    }

    fn random_mixed(d: LatticeDims, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = d.n();
        let mut a = Array2::<Complex64>::zeros((n, n));
        for v in a.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let prod = a.dot(&a.t().mapv(|z| z.conj()));
        let trace = prod.diag().sum().re;
        DensityMatrix::from_matrix(d, prod.mapv(|z| z / trace)).unwrap()
    }

    fn identity(n: usize) -> Array2<Complex64> {
        Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
    }

    #[test]
    fn identity_gate_reads_unit_z() {
        let d = dims(5);
        let rho = random_mixed(d, 7);
        let out = run_scattering(d, &identity(5), "identity", &rho, sq(1.0)).unwrap();
        assert_abs_diff_eq!(out.sz, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.sy, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn global_phase_gate_reads_its_angle() {
        let d = dims(3);
        let rho = random_mixed(d, 11);
        let phase = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let gate = identity(3).mapv(|z| z * phase);
        let out = run_scattering(d, &gate, "phase", &rho, sq(1.0)).unwrap();
        assert_abs_diff_eq!(out.sz, phase.re, epsilon = 1e-14);
        assert_abs_diff_eq!(out.sy, phase.im, epsilon = 1e-14);
    }

    #[test]
    fn displacement_readout_matches_filtered_characteristic() {
        let d = dims(3);
        let rho = vacuum_density(d);
        for s in [1.0, 5f64.sqrt()] {
            let s = sq(s);
            let reference = char_function(d, &rho, KernelOrder::Zero, s).unwrap();
            let root = d.n_f64().sqrt();
            for eta in d.range() {
                for xi in d.range() {
                    let (gate, label) = displacement_gate(d, eta, xi).unwrap();
                    let out = run_scattering(d, &gate, &label, &rho, s).unwrap();
                    let want = reference.value(eta, xi) * root;
                    assert!(
                        (out.sz - want.re).abs() <= 1e-12 && (out.sy - want.im).abs() <= 1e-12,
                        "s={} ({eta},{xi}): ({}, {}) vs {want}",
                        s.value(),
                        out.sz,
                        out.sy,
                    );
                }
            }
        }
    }

    #[test]
    fn arbitrary_state_readout_matches_at_unit_width() {
        let d = dims(5);
        let rho = random_mixed(d, 23);
        let reference = char_function(d, &rho, KernelOrder::Zero, sq(1.0)).unwrap();
        let root = d.n_f64().sqrt();
        for eta in d.range() {
            for xi in d.range() {
                let (gate, label) = displacement_gate(d, eta, xi).unwrap();
                let out = run_scattering(d, &gate, &label, &rho, sq(1.0)).unwrap();
                let want = reference.value(eta, xi) * root;
                assert!((out.sz - want.re).abs() <= 1e-12);
                assert!((out.sy - want.im).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn wigner_scan_matches_direct_distribution() {
        let d = dims(3);
        for (rho, s) in [
            (random_mixed(d, 31), sq(1.0)),
            (vacuum_density(d), sq(5f64.sqrt())),
        ] {
            let scan = scan_circuit(d, &rho, s, ScanMode::Wigner).unwrap();
            assert!(scan.synthesized_ft, "defect {}", scan.involution_defect);
            assert!(scan.involution_defect > INVOLUTION_GATE_TOL);
            let direct = quasi_distribution(d, &rho, KernelOrder::Zero, s).unwrap();
            for mu in d.range() {
                for nu in d.range() {
                    let got = scan.function.value(mu, nu);
                    let want = direct.value(mu, nu);
                    assert!(
                        (got - want).norm() < 1e-10,
                        "({mu},{nu}): {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_wigner_is_flat() {
        let d = dims(3);
        let rho = DensityMatrix::maximally_mixed(d);
        let scan = scan_circuit(d, &rho, sq(1.0), ScanMode::Wigner).unwrap();
        for v in scan.function.values() {
            assert!((v - Complex64::new(1.0 / d.n_f64(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn characteristic_scan_reports_raw_readouts() {
        let d = dims(3);
        let rho = vacuum_density(d);
        let s = sq(5f64.sqrt());
        let scan = scan_circuit(d, &rho, s, ScanMode::Characteristic).unwrap();
        assert!(!scan.synthesized_ft);
        assert!(scan.input_weight > 0.0 && scan.input_weight < 1.0 + 1e-12);
        let (rho_in, _) = squeezed_input(d, &rho, s).unwrap();
        let reference = char_function(d, &rho_in, KernelOrder::Zero, sq(1.0)).unwrap();
        for eta in d.range() {
            for xi in d.range() {
                let got = scan.function.value(eta, xi);
                assert!((got - reference.value(eta, xi)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_width_skips_the_toggle() {
        let d = dims(5);
        let rho = random_mixed(d, 41);
        let (rho_in, weight) = squeezed_input(d, &rho, sq(1.0)).unwrap();
        assert_eq!(weight, 1.0);
        for (a, b) in rho_in.matrix().iter().zip(rho.matrix().iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn readout_magnitude_bounded_by_unitarity() {
        let d = dims(5);
        let rho = random_mixed(d, 53);
        for eta in d.range() {
            for xi in d.range() {
                let (gate, label) = displacement_gate(d, eta, xi).unwrap();
                let out = run_scattering(d, &gate, &label, &rho, sq(1.0)).unwrap();
                assert!(out.sz.hypot(out.sy) <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn non_unitary_gate_trips_ancilla_checks() {
        let d = dims(3);
        let rho = vacuum_density(d);
        let gate = identity(3).mapv(|z| z * 2.0);
        let err = run_scattering(d, &gate, "2 I", &rho, sq(1.0)).unwrap_err();
        assert!(matches!(err, Error::NumericalConsistency { .. }));
    }

    #[test]
    fn pointwise_wigner_matches_direct_trace_everywhere() {
        let d = dims(3);
        let rho = vacuum_density(d);
        let root = d.n_f64().sqrt();
        let direct = quasi_distribution(d, &rho, KernelOrder::Zero, sq(1.0)).unwrap();
        for mu in d.range() {
            for nu in d.range() {
                let out = wigner_via_circuit(d, mu, nu, &rho, sq(1.0)).unwrap();
                assert!(!out.used_ft);
                let want = direct.value(mu, nu) * root;
                assert!((out.sz - want.re).abs() < 1e-10, "({mu},{nu})");
                assert!(out.sy.abs() < 1e-10, "Wigner readout must stay real");
            }
        }
    }

    #[test]
    fn pointwise_wigner_on_maximally_mixed_is_flat() {
        let d = dims(5);
        let rho = DensityMatrix::maximally_mixed(d);
        let out = wigner_via_circuit(d, 1, -2, &rho, sq(1.0)).unwrap();
        assert_abs_diff_eq!(out.sz, 1.0 / d.n_f64().sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(out.sy, 0.0, epsilon = 1e-12);
        assert!(out.gate_label.contains("synthesized"));
    }

    #[test]
    fn shot_estimates_are_deterministic_and_converge() {
        let a = estimate_from_shots(0.37, 200_000, 9).unwrap();
        let b = estimate_from_shots(0.37, 200_000, 9).unwrap();
        assert_eq!(a, b);
        assert!((a - 0.37).abs() < 0.01, "estimate {a}");
        let c = estimate_from_shots(0.37, 200_000, 10).unwrap();
        assert_ne!(a, c);
        assert!(estimate_from_shots(0.5, 0, 1).is_err());
        assert!(estimate_from_shots(1.5, 10, 1).is_err());
        assert_eq!(estimate_from_shots(1.0, 1000, 3).unwrap(), 1.0);
    }
}
