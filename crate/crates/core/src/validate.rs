use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{displacement_gate, run_scattering};
use crate::entropy::{conditional_entropy, entropy_at, joint_entropy, marginal_entropy, ScanSettings};
use crate::error::Result;
use crate::kernels::{kernel_table, KernelKind, SqueezeParam};
use crate::lattice::LatticeDims;
use crate::numerics::theta::{theta, ThetaKind};
use crate::operators::{
    displacement, involution_defect, mapping_kernel, DensityMatrix, KernelOrder,
};
use crate::phase_space::{
    char_function, continuum_check, husimi_grid, marginals, overlap_distribution,
    quasi_distribution,
};
use crate::states::{
    coherent_state, gamma_element, gamma_from_tables, fock_coefficients, number_state,
    squeezed_coherent_coefficient_via_levels, squeezed_coherent_state,
    squeezing_generator_defect, vacuum_state,
};

/// How much of the suite to run: fast covers the smallest lattice in a few
/// seconds, full adds larger lattices and the continuum limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationLevel {
    Fast,
    Full,
}

impl std::fmt::Display for ValidationLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationLevel::Fast => write!(f, "fast"),
            ValidationLevel::Full => write!(f, "full"),
        }
    }
}

/// One verified identity (measured deviation against a hard threshold) or
/// one monitored diagnostic (no pass verdict, recorded for trend-watching).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// None for monitored quantities.
    pub passed: Option<bool>,
    pub measured: f64,
    pub threshold: Option<f64>,
    pub monitored: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub level: ValidationLevel,
    pub checks: Vec<CheckResult>,
    pub all_hard_passed: bool,
}

impl ValidationReport {
    fn new(level: ValidationLevel) -> Self {
        ValidationReport {
            level,
            checks: Vec::new(),
            all_hard_passed: true,
        }
    }

    fn hard(&mut self, name: &str, measured: f64, threshold: f64, detail: String) {
        let passed = measured <= threshold;
        self.all_hard_passed &= passed;
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: Some(passed),
            measured,
            threshold: Some(threshold),
            monitored: false,
            detail,
        });
    }

    fn monitored(&mut self, name: &str, measured: f64, detail: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: None,
            measured,
            threshold: None,
            monitored: true,
            detail,
        });
    }
}

fn theta_modular_deviation() -> Result<f64> {
    let t = 0.7;
    let lhs = theta(ThetaKind::Three, 0.0, 1.0 / t)?;
    let rhs = t.sqrt() * theta(ThetaKind::Three, 0.0, t)?;
    Ok((lhs / rhs - 1.0).abs())
}

fn kernel_swap_deviation(dims: LatticeDims, s: SqueezeParam) -> Result<f64> {
    let fwd = kernel_table(dims, KernelKind::Squeezed { s })?;
    let inv = kernel_table(dims, KernelKind::Squeezed { s: s.inverse() })?;
    let mut worst = 0.0f64;
    for eta in dims.range() {
        for xi in dims.range() {
            worst = worst.max((inv.value(eta, xi) - fwd.value(xi, eta)).abs());
        }
    }
    Ok(worst)
}

fn duality_deviation(dims: LatticeDims) -> Result<f64> {
    let n = dims.n_f64();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for mu in dims.range() {
        for nu in dims.range() {
            plus.push((mu, nu, mapping_kernel(dims, mu, nu, KernelOrder::PlusOne)?));
            minus.push((mu, nu, mapping_kernel(dims, mu, nu, KernelOrder::MinusOne)?));
        }
    }
    let mut worst = 0.0f64;
    for (mu, nu, tp) in &plus {
        for (mu2, nu2, tm) in &minus {
            let trace = tp.dot(tm).diag().sum();
            let want = if mu == mu2 && nu == nu2 { n } else { 0.0 };
            worst = worst.max((trace - Complex64::new(want, 0.0)).norm());
        }
    }
    Ok(worst)
}

fn level_orthonormality_deviation(dims: LatticeDims, s: SqueezeParam) -> Result<(f64, f64)> {
    let states: Vec<_> = (0..dims.n())
        .map(|lvl| number_state(dims, lvl, s))
        .collect::<Result<_>>()?;
    let mut hard = 0.0f64;
    let mut same_parity = 0.0f64;
    for (m, bra) in states.iter().enumerate() {
        for (n, ket) in states.iter().enumerate() {
            let g = bra.overlap(ket)?;
            if m == n {
                hard = hard.max((g - Complex64::new(1.0, 0.0)).norm());
            } else if (m + n) % 2 == 1 {
                hard = hard.max(g.norm());
            } else {
                same_parity = same_parity.max(g.norm());
            }
        }
    }
    Ok((hard, same_parity))
}

fn resolution_deviation(dims: LatticeDims) -> Result<f64> {
    let n = dims.n();
    let mut acc = Array2::<Complex64>::zeros((n, n));
    for mu in dims.range() {
        for nu in dims.range() {
            let state = coherent_state(dims, mu, nu)?;
            for (row, a) in state.amplitudes().iter().enumerate() {
                for (col, b) in state.amplitudes().iter().enumerate() {
                    acc[[row, col]] += a * b.conj();
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for row in 0..n {
        for col in 0..n {
            let want = if row == col { dims.n_f64() } else { 0.0 };
            worst = worst.max((acc[[row, col]] - Complex64::new(want, 0.0)).norm());
        }
    }
    Ok(worst)
}

fn husimi_route_deviation(dims: LatticeDims, s: SqueezeParam) -> Result<f64> {
    let rho = vacuum_state(dims)?.density()?;
    let filtered = quasi_distribution(dims, &rho, KernelOrder::MinusOne, s)?;
    let tabled = overlap_distribution(dims, 0, s)?;
    let mut worst = 0.0f64;
    for mu in dims.range() {
        for nu in dims.range() {
            worst = worst.max((filtered.value(mu, nu) - tabled.value(mu, nu)).norm());
        }
    }
    Ok(worst)
}

fn wigner_marginal_deviation(dims: LatticeDims, seed: u64) -> Result<f64> {
    let rho = DensityMatrix::seeded_random(dims, seed)?;
    let w = quasi_distribution(dims, &rho, KernelOrder::Zero, SqueezeParam::unit())?;
    let mut worst = 0.0f64;
    for mu in dims.range() {
        let mut acc = Complex64::new(0.0, 0.0);
        for nu in dims.range() {
            acc += w.value(mu, nu);
        }
        let want = rho.matrix()[[dims.idx(mu), dims.idx(mu)]];
        worst = worst.max((acc / dims.n_f64() - want).norm());
    }
    Ok(worst)
}

fn circuit_contract_deviation(dims: LatticeDims, s: SqueezeParam) -> Result<f64> {
    let rho = vacuum_state(dims)?.density()?;
    let reference = char_function(dims, &rho, KernelOrder::Zero, s)?;
    let root = dims.n_f64().sqrt();
    let mut worst = 0.0f64;
    for eta in dims.range() {
        for xi in dims.range() {
            let (gate, label) = displacement_gate(dims, eta, xi)?;
            let out = run_scattering(dims, &gate, &label, &rho, s)?;
            let want = reference.value(eta, xi) * root;
            worst = worst.max((Complex64::new(out.sz, out.sy) - want).norm());
        }
    }
    Ok(worst)
}

fn entropy_published_deviation(dims: LatticeDims, want: f64) -> Result<f64> {
    let rho = vacuum_state(dims)?.density()?;
    let (e, _, _) = entropy_at(dims, &rho, SqueezeParam::unit())?;
    Ok((e - want).abs())
}

fn entropy_balance_deviation(dims: LatticeDims, seed: u64) -> Result<f64> {
    let rho = DensityMatrix::seeded_random(dims, seed)?;
    let s = SqueezeParam::new(1.7)?;
    let h = husimi_grid(dims, &rho, s)?;
    let (q, r) = marginals(dims, &rho, s)?;
    let e = joint_entropy(dims, &h)?;
    let eq = marginal_entropy(dims, &q)?;
    let er = marginal_entropy(dims, &r)?;
    let cond_q = conditional_entropy(dims, &h, &q, true)?;
    let cond_r = conditional_entropy(dims, &h, &r, false)?;
    Ok((cond_q - (e - eq))
        .abs()
        .max((cond_r - (e - er)).abs())
        .max(((cond_q + eq) - (cond_r + er)).abs()))
}

/// Worst violation of subadditivity and the two conditional bounds over
/// the width grid, plus the smallest two-sided bound margin as the second
/// component (monitored).
fn entropy_bounds(dims: LatticeDims, states: &[DensityMatrix]) -> Result<(f64, f64)> {
    let mut violation = 0.0f64;
    let mut al_margin = f64::INFINITY;
    for rho in states {
        for s in ScanSettings::default().widths()? {
            let (e, eq, er) = entropy_at(dims, rho, SqueezeParam::new(s)?)?;
            violation = violation.max(e - (eq + er));
            violation = violation.max((e - eq) - er);
            violation = violation.max((e - er) - eq);
            al_margin = al_margin.min(e - (eq - er).abs());
        }
    }
    Ok((violation.max(0.0), al_margin))
}

fn displaced_level_route_deviation(dims: LatticeDims, s: SqueezeParam) -> Result<f64> {
    let mut worst = 0.0f64;
    for mu in dims.range() {
        for nu in dims.range() {
            let (state, norm) = squeezed_coherent_state(dims, mu, nu, s)?;
            for eta in dims.range() {
                for xi in dims.range() {
                    let sdag = displacement(dims, -eta, -xi)?;
                    let mut direct = Complex64::new(0.0, 0.0);
                    for (row, a) in state.amplitudes().iter().enumerate() {
                        for (col, b) in state.amplitudes().iter().enumerate() {
                            direct += a.conj() * sdag[[row, col]] * b;
                        }
                    }
                    direct *= norm * norm;
                    let via =
                        squeezed_coherent_coefficient_via_levels(dims, mu, nu, eta, xi, s)?;
                    worst = worst.max((via - direct).norm());
                }
            }
        }
    }
    Ok(worst)
}

fn number_kernel_route_deviation(dims: LatticeDims, max_level: usize) -> Result<f64> {
    let unit = SqueezeParam::unit();
    let root = dims.n_f64().sqrt();
    let mut worst = 0.0f64;
    for level in 0..=max_level {
        let jet_table = kernel_table(dims, KernelKind::Number { level })?;
        let coeff = fock_coefficients(dims, level, unit)?;
        let state = number_state(dims, level, unit)?;
        for eta in dims.range() {
            for xi in dims.range() {
                let jet = jet_table.value(eta, xi);
                let gamma = gamma_from_tables(&coeff, &coeff, eta, xi)?;
                worst = worst.max((gamma - Complex64::new(jet, 0.0)).norm());
                let op = displacement(dims, eta, xi)?;
                let mut sandwich = Complex64::new(0.0, 0.0);
                for (row, a) in state.amplitudes().iter().enumerate() {
                    for (col, b) in state.amplitudes().iter().enumerate() {
                        sandwich += a.conj() * op[[row, col]] * b;
                    }
                }
                worst = worst.max((sandwich * root - Complex64::new(jet, 0.0)).norm());
            }
        }
    }
    Ok(worst)
}

struct TransposeChecks {
    transpose: f64,
    symmetric: f64,
    negativity: f64,
    sum: f64,
}

fn overlap_grid_checks(dims: LatticeDims, squared: f64, max_level: usize) -> Result<TransposeChecks> {
    let fwd = SqueezeParam::from_squared(squared)?;
    let inv = SqueezeParam::from_inverse_squared(squared)?;
    let unit = SqueezeParam::unit();
    let mut out = TransposeChecks {
        transpose: 0.0,
        symmetric: 0.0,
        negativity: 0.0,
        sum: 0.0,
    };
    for level in 0..=max_level {
        let a = overlap_distribution(dims, level, fwd)?;
        let b = overlap_distribution(dims, level, inv)?;
        let c = overlap_distribution(dims, level, unit)?;
        let mut total_a = 0.0;
        for mu in dims.range() {
            for nu in dims.range() {
                out.transpose = out
                    .transpose
                    .max((a.value(mu, nu) - b.value(nu, mu)).norm());
                out.symmetric = out
                    .symmetric
                    .max((c.value(mu, nu) - c.value(nu, mu)).norm());
                let v = a.value(mu, nu).re;
                out.negativity = out.negativity.max((-v).max(0.0));
                total_a += v;
            }
        }
        out.sum = out.sum.max((total_a - dims.n_f64()).abs());
    }
    Ok(out)
}

fn fast_suite(report: &mut ValidationReport) -> Result<()> {
    let d3 = LatticeDims::new(3)?;
    let s5 = SqueezeParam::from_squared(5.0)?;

    report.hard(
        "theta-modular-inversion",
        theta_modular_deviation()?,
        1e-12,
        "theta3(0 | i/t) against sqrt(t) theta3(0 | i t) at t = 0.7".into(),
    );
    report.hard(
        "kernel-width-inversion-swap",
        kernel_swap_deviation(d3, s5)?,
        1e-12,
        "inverse-width kernel against the argument-swapped kernel, N = 3".into(),
    );
    report.hard(
        "mapping-family-duality",
        duality_deviation(d3)?,
        1e-10,
        "Tr of opposite-order mapping operator pairs against N delta, N = 3".into(),
    );
    let (ortho, same_parity) = level_orthonormality_deviation(d3, SqueezeParam::unit())?;
    report.hard(
        "level-orthonormality",
        ortho,
        1e-12,
        "norms and opposite-parity overlaps of the level ladder, N = 3".into(),
    );
    report.monitored(
        "same-parity-gram-residue",
        same_parity,
        "largest same-parity cross overlap of the unit-width level ladder, N = 3".into(),
    );
    report.hard(
        "coherent-resolution-of-identity",
        resolution_deviation(d3)?,
        1e-10,
        "sum of coherent projectors against N times identity".into(),
    );
    report.hard(
        "husimi-route-equivalence",
        husimi_route_deviation(d3, s5)?,
        1e-10,
        "filtered transform route against the kernel-product table route, vacuum N = 3".into(),
    );
    report.hard(
        "wigner-position-marginal",
        wigner_marginal_deviation(d3, 17)?,
        1e-11,
        "symmetric-order marginal against the density diagonal, seeded state N = 3".into(),
    );
    report.hard(
        "circuit-readout-contract",
        circuit_contract_deviation(d3, s5)?,
        1e-12,
        "interference readouts against sqrt(N) times the filtered characteristic, vacuum N = 3"
            .into(),
    );
    report.hard(
        "joint-entropy-published-value",
        entropy_published_deviation(d3, 0.625948)?,
        5e-6,
        "vacuum joint entropy at unit width against 0.625948, N = 3".into(),
    );
    report.hard(
        "entropy-balance",
        entropy_balance_deviation(d3, 29)?,
        1e-12,
        "conditional entropies from the double sum against differences, seeded state N = 3".into(),
    );
    let states = vec![
        vacuum_state(d3)?.density()?,
        DensityMatrix::seeded_random(d3, 101)?,
        DensityMatrix::seeded_random(d3, 102)?,
    ];
    let (violation, al_margin) = entropy_bounds(d3, &states)?;
    report.hard(
        "entropy-subadditivity",
        violation,
        1e-10,
        "worst subadditivity or conditional bound violation over the width grid, N = 3".into(),
    );
    report.monitored(
        "two-sided-bound-margin",
        al_margin,
        "smallest margin of the joint entropy above the marginal gap, N = 3".into(),
    );
    report.hard(
        "displaced-level-route",
        displaced_level_route_deviation(d3, s5)?,
        1e-10,
        "level-resolved coefficient route against the direct overlap, N = 3".into(),
    );
    report.hard(
        "number-kernel-routes",
        number_kernel_route_deviation(d3, 2)?,
        1e-10,
        "level kernel from the jet route against table and sandwich routes, N = 3".into(),
    );

    report.monitored(
        "width-toggle-defect",
        squeezing_generator_defect(d3, s5)?,
        "operator norm defect of the width-toggle generator from unitarity, N = 3".into(),
    );
    report.monitored(
        "involution-defect",
        involution_defect(d3)?,
        "norm of N T(0)^2 - 1 for the symmetric mapping operator, N = 3".into(),
    );
    let vacuum_table = kernel_table(d3, KernelKind::Vacuum)?;
    report.monitored(
        "vacuum-kernel-minimum",
        vacuum_table.min_abs(),
        "smallest kernel magnitude on the dual grid, N = 3".into(),
    );
    report.monitored(
        "ratio-kernel-conditioning",
        kernel_table(d3, KernelKind::Ratio { s: s5 })?.conditioning(),
        "max over min magnitude of the ratio kernel, N = 3".into(),
    );
    let mut gamma_dev = 0.0f64;
    for m in 0..3usize {
        for n in 0..3usize {
            let want = if m == n { 1.0 } else { 0.0 };
            let g = gamma_element(d3, m, n, 0, 0, s5)?;
            gamma_dev = gamma_dev.max((g - Complex64::new(want, 0.0)).norm());
        }
    }
    report.monitored(
        "matrix-element-origin-gram",
        gamma_dev,
        "deviation of origin matrix elements from the identity, width-toggled ladder N = 3".into(),
    );
    Ok(())
}

fn full_suite(report: &mut ValidationReport) -> Result<()> {
    for n in [5u64, 7] {
        let d = LatticeDims::new(n)?;
        let s5 = SqueezeParam::from_squared(5.0)?;
        report.hard(
            &format!("number-kernel-routes-n{n}"),
            number_kernel_route_deviation(d, (n as usize - 1).min(10))?,
            1e-10,
            format!("level kernel routes across the ladder, N = {n}"),
        );
        report.hard(
            &format!("kernel-width-inversion-swap-n{n}"),
            kernel_swap_deviation(d, s5)?,
            1e-12,
            format!("inverse-width kernel against the argument-swapped kernel, N = {n}"),
        );
        report.hard(
            &format!("husimi-route-equivalence-n{n}"),
            husimi_route_deviation(d, s5)?,
            1e-10,
            format!("filtered transform route against the table route, vacuum N = {n}"),
        );
    }
    report.hard(
        "mapping-family-duality-n5",
        duality_deviation(LatticeDims::new(5)?)?,
        1e-10,
        "Tr of opposite-order mapping operator pairs against N delta, N = 5".into(),
    );

    let d17 = LatticeDims::new(17)?;
    let grids = overlap_grid_checks(d17, 5.0, 1)?;
    report.hard(
        "overlap-grid-transposition",
        grids.transpose,
        1e-11,
        "squared-width grids against transposed inverse-width grids, N = 17".into(),
    );
    report.hard(
        "overlap-grid-unit-symmetry",
        grids.symmetric,
        1e-11,
        "unit-width grids against their own transpose, N = 17".into(),
    );
    report.hard(
        "overlap-grid-negativity",
        grids.negativity,
        1e-10,
        "worst negative excursion of the overlap grids, N = 17".into(),
    );
    report.hard(
        "overlap-grid-total",
        grids.sum,
        1e-8,
        "grid totals against N, N = 17".into(),
    );
    report.monitored(
        "ratio-kernel-conditioning-n17",
        kernel_table(d17, KernelKind::Ratio {
            s: SqueezeParam::from_squared(5.0)?,
        })?
        .conditioning(),
        "max over min magnitude of the ratio kernel, N = 17".into(),
    );

    let c31 = continuum_check(LatticeDims::new(31)?, 0)?;
    let c51 = continuum_check(LatticeDims::new(51)?, 0)?;
    report.hard(
        "continuum-limit-deviation",
        c51,
        1e-4,
        "vacuum overlap grid against the continuum profile, N = 51".into(),
    );
    report.hard(
        "continuum-limit-decrease",
        c51 - c31,
        0.0,
        format!("N = 51 deviation {c51:e} under N = 31 deviation {c31:e}"),
    );

    for (n, want) in [(5u64, 0.953965), (7, 0.992272), (9, 0.998598)] {
        report.hard(
            &format!("joint-entropy-published-value-n{n}"),
            entropy_published_deviation(LatticeDims::new(n)?, want)?,
            5e-6,
            format!("vacuum joint entropy at unit width against {want}, N = {n}"),
        );
    }
    Ok(())
}

/// Runs the identity suite at the requested depth.
pub fn run_validation(level: ValidationLevel) -> Result<ValidationReport> {
    let mut report = ValidationReport::new(level);
    fast_suite(&mut report)?;
    if level == ValidationLevel::Full {
        full_suite(&mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Instant;

    #[test]
    fn fast_suite_passes_quickly() {
        let start = Instant::now();
        let report = run_validation(ValidationLevel::Fast).unwrap();
        assert!(report.all_hard_passed, "{:#?}", report.checks);
        assert!(start.elapsed().as_secs() < 10, "{:?}", start.elapsed());
        assert!(report.checks.iter().any(|c| c.monitored));
        for check in &report.checks {
            assert_eq!(check.monitored, check.passed.is_none());
            assert!(check.measured.is_finite());
        }
    }

    #[test]
    fn full_suite_passes() {
        let report = run_validation(ValidationLevel::Full).unwrap();
        assert!(report.all_hard_passed, "{:#?}", report.checks);
        assert!(report.checks.len() > 25);
    }

    #[test]
    fn report_serializes_round_trip() {
        let report = run_validation(ValidationLevel::Fast).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: ValidationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.checks.len(), report.checks.len());
        assert!(back.all_hard_passed);
    }
}
