use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{kernel_table, KernelKind, KernelTable, KERNEL_FLOOR};
use crate::lattice::LatticeDims;
use crate::linalg::hermitian_eigenvalues;

/// Exponent -1, 0 or +1 attached to the kernel weight inside the mapping
/// operator family; the three values select the antinormal, symmetric and
/// normal orderings of the associated distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelOrder {
    MinusOne,
    Zero,
    PlusOne,
}

impl KernelOrder {
    pub fn exponent(self) -> i32 {
        match self {
            KernelOrder::MinusOne => -1,
            KernelOrder::Zero => 0,
            KernelOrder::PlusOne => 1,
        }
    }

    pub fn negated(self) -> Self {
        match self {
            KernelOrder::MinusOne => KernelOrder::PlusOne,
            KernelOrder::Zero => KernelOrder::Zero,
            KernelOrder::PlusOne => KernelOrder::MinusOne,
        }
    }

    pub fn from_exponent(k: i32) -> Result<Self> {
        match k {
            -1 => Ok(KernelOrder::MinusOne),
            0 => Ok(KernelOrder::Zero),
            1 => Ok(KernelOrder::PlusOne),
            _ => Err(Error::InvalidState {
                detail: format!("kernel order must be -1, 0 or 1, got {k}"),
            }),
        }
    }
}

fn phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// Clock operator: diagonal phases exp(2 pi i kappa / N).
pub fn build_u(dims: LatticeDims) -> Array2<Complex64> {
    let n = dims.n();
    let mut m = Array2::zeros((n, n));
    for k in dims.range() {
        m[[dims.idx(k), dims.idx(k)]] = phase(2.0 * PI * k as f64 / dims.n_f64());
    }
    m
}

/// Shift operator: maps the position labelled kappa to kappa - 1 (mod N).
pub fn build_v(dims: LatticeDims) -> Array2<Complex64> {
    let n = dims.n();
    let mut m = Array2::zeros((n, n));
    for k in dims.range() {
        m[[dims.idx(dims.wrap(k - 1)), dims.idx(k)]] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Unitary displacement S(eta, xi) = N^(-1/2) exp(i pi eta xi / N) U^eta
/// V^xi. The phase convention is not periodic in eta, xi, so arguments must
/// lie in the principal window.
pub fn displacement(dims: LatticeDims, eta: i64, xi: i64) -> Result<Array2<Complex64>> {
    dims.idx_checked("eta", eta)?;
    dims.idx_checked("xi", xi)?;
    let n = dims.n();
    let nf = dims.n_f64();
    let front = phase(PI * (eta * xi) as f64 / nf) / nf.sqrt();
    let mut m = Array2::zeros((n, n));
    for k in dims.range() {
        let j = dims.wrap(k - xi);
        m[[dims.idx(j), dims.idx(k)]] = front * phase(2.0 * PI * (eta * j) as f64 / nf);
    }
    Ok(m)
}

/// Tr[S(eta, xi) rho] in O(N), without materialising the displacement
/// matrix.
pub fn displacement_trace(
    dims: LatticeDims,
    eta: i64,
    xi: i64,
    rho: &Array2<Complex64>,
) -> Result<Complex64> {
    dims.idx_checked("eta", eta)?;
    dims.idx_checked("xi", xi)?;
    check_square(dims, rho)?;
    let nf = dims.n_f64();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in dims.range() {
        acc += phase(2.0 * PI * (eta * j) as f64 / nf)
            * rho[[dims.idx(dims.wrap(j + xi)), dims.idx(j)]];
    }
    Ok(acc * phase(PI * (eta * xi) as f64 / nf) / nf.sqrt())
}

fn check_square(dims: LatticeDims, m: &Array2<Complex64>) -> Result<()> {
    if m.nrows() != dims.n() || m.ncols() != dims.n() {
        return Err(Error::DimensionMismatch {
            expected: dims.n(),
            got: if m.nrows() != dims.n() { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

pub(crate) fn kernel_power(table: &KernelTable, eta: i64, xi: i64, exponent: i32) -> Result<f64> {
    let v = table.value(eta, xi);
    if exponent < 0 && v.abs() < KERNEL_FLOOR {
        return Err(Error::IllConditionedKernel {
            eta,
            xi,
            value: v.abs(),
            floor: KERNEL_FLOOR,
        });
    }
    Ok(v.powi(exponent))
}

/// Mapping operator T^(order)(mu, nu): the kernel-weighted Fourier sum of
/// displacements, N^(-1/2) sum_(eta,xi) e^(-2 pi i (eta mu + xi nu) / N)
/// K(eta, xi)^(-order) S(eta, xi).
pub fn mapping_kernel(
    dims: LatticeDims,
    mu: i64,
    nu: i64,
    order: KernelOrder,
) -> Result<Array2<Complex64>> {
    dims.idx_checked("mu", mu)?;
    dims.idx_checked("nu", nu)?;
    let table = kernel_table(dims, KernelKind::Vacuum)?;
    let n = dims.n();
    let nf = dims.n_f64();
    let mut m = Array2::<Complex64>::zeros((n, n));
    for eta in dims.range() {
        for xi in dims.range() {
            let w = phase(-2.0 * PI * ((eta * mu + xi * nu) as f64) / nf)
                * kernel_power(&table, eta, xi, -order.exponent())?;
            let s = displacement(dims, eta, xi)?;
            m += &s.mapv(|z| z * w);
        }
    }
    Ok(m.mapv(|z| z / nf.sqrt()))
}

/// Coefficient grid Tr[T^(-order)(mu, nu) O] of an operator against the
/// mapping family, indexed by storage position of (mu, nu).
pub fn decompose(
    dims: LatticeDims,
    op: &Array2<Complex64>,
    order: KernelOrder,
) -> Result<Array2<Complex64>> {
    check_square(dims, op)?;
    let table = kernel_table(dims, KernelKind::Vacuum)?;
    let n = dims.n();
    let nf = dims.n_f64();
    let mut straces = Array2::<Complex64>::zeros((n, n));
    for eta in dims.range() {
        for xi in dims.range() {
            straces[[dims.idx(eta), dims.idx(xi)]] = displacement_trace(dims, eta, xi, op)?
                * kernel_power(&table, eta, xi, order.exponent())?;
        }
    }
    let mut grid = Array2::<Complex64>::zeros((n, n));
    for mu in dims.range() {
        for nu in dims.range() {
            let mut acc = Complex64::new(0.0, 0.0);
            for eta in dims.range() {
                for xi in dims.range() {
                    acc += phase(-2.0 * PI * ((eta * mu + xi * nu) as f64) / nf)
                        * straces[[dims.idx(eta), dims.idx(xi)]];
                }
            }
            grid[[dims.idx(mu), dims.idx(nu)]] = acc / nf.sqrt();
        }
    }
    Ok(grid)
}

/// Inverse of decompose: O = (1/N) sum_(mu,nu) c(mu, nu) T^(order)(mu, nu).
pub fn reconstruct(
    dims: LatticeDims,
    coefficients: &Array2<Complex64>,
    order: KernelOrder,
) -> Result<Array2<Complex64>> {
    check_square(dims, coefficients)?;
    let table = kernel_table(dims, KernelKind::Vacuum)?;
    let n = dims.n();
    let nf = dims.n_f64();
    let mut m = Array2::<Complex64>::zeros((n, n));
    for eta in dims.range() {
        for xi in dims.range() {
            let mut inner = Complex64::new(0.0, 0.0);
            for mu in dims.range() {
                for nu in dims.range() {
                    inner += coefficients[[dims.idx(mu), dims.idx(nu)]]
                        * phase(-2.0 * PI * ((eta * mu + xi * nu) as f64) / nf);
                }
            }
            let w = inner * kernel_power(&table, eta, xi, -order.exponent())?;
            let s = displacement(dims, eta, xi)?;
            m += &s.mapv(|z| z * w);
        }
    }
    Ok(m.mapv(|z| z / nf.powf(1.5)))
}

/// Tr[O rho] evaluated both directly and through the phase-space pairing
/// (1/N) sum of coefficient grids with mutually inverse orders. Errors if
/// the two routes disagree, which flags kernel conditioning loss.
pub fn expectation(
    dims: LatticeDims,
    op: &Array2<Complex64>,
    rho: &DensityMatrix,
    order: KernelOrder,
) -> Result<Complex64> {
    check_square(dims, op)?;
    let direct = op.dot(rho.matrix()).diag().sum();
    let c_op = decompose(dims, op, order)?;
    let c_rho = decompose(dims, rho.matrix(), order.negated())?;
    let paired = (&c_op * &c_rho).sum() / dims.n_f64();
    if (paired - direct).norm() > 1e-10 * direct.norm().max(1.0) {
        return Err(Error::NumericalConsistency {
            detail: format!(
                "phase-space pairing {paired} deviates from direct trace {direct}"
            ),
        });
    }
    Ok(direct)
}

/// Norm defect of N T^(0)(0,0)^2 - 1, reported because the rescaled
/// symmetric mapping operator is not an involution on the discrete lattice.
pub fn involution_defect(dims: LatticeDims) -> Result<f64> {
    let t0 = mapping_kernel(dims, 0, 0, KernelOrder::Zero)?;
    let m = t0.dot(&t0).mapv(|z| z * dims.n_f64());
    let mut diff = m;
    for i in 0..dims.n() {
        diff[[i, i]] -= Complex64::new(1.0, 0.0);
    }
    crate::linalg::operator_norm(&diff)
}

/// Validated density operator: Hermitian, unit trace, positive
/// semidefinite up to tight numerical slack.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dims: LatticeDims,
    matrix: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(dims: LatticeDims, matrix: Array2<Complex64>) -> Result<Self> {
        check_square(dims, &matrix)?;
        let herm_defect = (0..dims.n())
            .flat_map(|i| (i..dims.n()).map(move |j| (i, j)))
            .map(|(i, j)| (matrix[[i, j]] - matrix[[j, i]].conj()).norm())
            .fold(0.0f64, f64::max);
        if herm_defect > 1e-12 {
            return Err(Error::InvalidState {
                detail: format!("density matrix is not Hermitian (defect {herm_defect:.3e})"),
            });
        }
        let trace = matrix.diag().sum();
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidState {
                detail: format!("density matrix trace {trace} is not 1"),
            });
        }
        let eig = hermitian_eigenvalues(&matrix)?;
        if let Some(min) = eig.first() {
            if *min < -1e-10 {
                return Err(Error::InvalidState {
                    detail: format!("density matrix has negative eigenvalue {min:.3e}"),
                });
            }
        }
        Ok(DensityMatrix { dims, matrix })
    }

    /// Projector onto a (possibly unnormalised) pure state.
    pub fn from_pure(dims: LatticeDims, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != dims.n() {
            return Err(Error::DimensionMismatch {
                expected: dims.n(),
                got: amplitudes.len(),
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-300 {
            return Err(Error::InvalidState {
                detail: "pure state has zero norm".to_string(),
            });
        }
        let n = dims.n();
        let mut matrix = Array2::zeros((n, n));
        for j in 0..n {
            for k in 0..n {
                matrix[[j, k]] = amplitudes[j] * amplitudes[k].conj() / norm_sq;
            }
        }
        Ok(DensityMatrix { dims, matrix })
    }

    pub fn maximally_mixed(dims: LatticeDims) -> Self {
        let n = dims.n();
        let mut matrix = Array2::zeros((n, n));
        for i in 0..n {
            matrix[[i, i]] = Complex64::new(1.0 / dims.n_f64(), 0.0);
        }
        DensityMatrix { dims, matrix }
    }

    /// Reproducible full-rank mixed state: A A^dag / Tr for a seeded
    /// complex square A with uniform entries.
    pub fn seeded_random(dims: LatticeDims, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = dims.n();
        let mut a = Array2::<Complex64>::zeros((n, n));
        for v in a.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let prod = a.dot(&a.t().mapv(|z| z.conj()));
        let trace = prod.diag().sum().re;
        Self::from_matrix(dims, prod.mapv(|z| z / trace))
    }

    /// Convex combination of validated densities.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let dims = parts
            .first()
            .ok_or_else(|| Error::InvalidState {
                detail: "mixture needs at least one component".to_string(),
            })?
            .1
            .dims;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || total <= 0.0 {
            return Err(Error::InvalidState {
                detail: "mixture weights must be nonnegative with positive sum".to_string(),
            });
        }
        let mut matrix = Array2::<Complex64>::zeros((dims.n(), dims.n()));
        for (w, part) in parts {
            if part.dims != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims.n(),
                    got: part.dims.n(),
                });
            }
            matrix += &part.matrix.mapv(|z| z * (w / total));
        }
        Ok(DensityMatrix { dims, matrix })
    }

    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.dot(&self.matrix).diag().sum().re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dims(n: u64) -> LatticeDims {
        LatticeDims::new(n).unwrap()
    }

    fn identity(n: usize) -> Array2<Complex64> {
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = Complex64::new(1.0, 0.0);
        }
        m
    }

    fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn matrix_power(m: &Array2<Complex64>, k: usize) -> Array2<Complex64> {
        let mut acc = identity(m.nrows());
        for _ in 0..k {
            acc = acc.dot(m);
        }
        acc
    }

    fn random_density(d: LatticeDims, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = d.n();
        let mut a = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        // A A^dag / tr is Hermitian, positive and unit trace by construction.
        let ah = a.t().mapv(|z| z.conj());
        let g = a.dot(&ah);
        let tr = g.diag().sum();
        DensityMatrix::from_matrix(d, g.mapv(|z| z / tr)).unwrap()
    }

    #[test]
    fn clock_and_shift_have_period_n() {
        for n in [5u64, 7] {
            let d = dims(n);
            let u = build_u(d);
            let v = build_v(d);
            let id = identity(d.n());
            assert!(max_abs_diff(&matrix_power(&u, d.n()), &id) < 1e-13);
            assert!(max_abs_diff(&matrix_power(&v, d.n()), &id) < 1e-13);
        }
    }

    #[test]
    fn weyl_commutation_phase() {
        let d = dims(5);
        let u = build_u(d);
        let v = build_v(d);
        let lhs = v.dot(&u);
        let rhs = u.dot(&v).mapv(|z| z * phase(2.0 * PI / 5.0));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn displacements_are_orthonormal() {
        let d = dims(5);
        for eta in d.range() {
            for xi in d.range() {
                let s1 = displacement(d, eta, xi).unwrap();
                for eta2 in d.range() {
                    for xi2 in d.range() {
                        let s2 = displacement(d, eta2, xi2).unwrap();
                        let overlap = s1.t().mapv(|z| z.conj()).dot(&s2).diag().sum();
                        let want = if (eta, xi) == (eta2, xi2) { 1.0 } else { 0.0 };
                        assert_abs_diff_eq!(overlap.re, want, epsilon = 1e-13);
                        assert_abs_diff_eq!(overlap.im, 0.0, epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_is_negated_argument() {
        let d = dims(5);
        for (eta, xi) in [(1i64, 2i64), (2, -1), (0, 2), (-2, -2)] {
            let s = displacement(d, eta, xi).unwrap();
            let sdag = s.t().mapv(|z| z.conj());
            let neg = displacement(d, -eta, -xi).unwrap();
            assert!(max_abs_diff(&sdag, &neg) < 1e-14);
        }
    }

    #[test]
    fn displacement_rejects_out_of_window_arguments() {
        let d = dims(5);
        assert!(displacement(d, 3, 0).is_err());
        assert!(displacement(d, 0, -3).is_err());
    }

    #[test]
    fn trace_shortcut_matches_matrix_trace() {
        let d = dims(5);
        let rho = random_density(d, 11);
        for eta in d.range() {
            for xi in d.range() {
                let s = displacement(d, eta, xi).unwrap();
                let full = s.dot(rho.matrix()).diag().sum();
                let fast = displacement_trace(d, eta, xi, rho.matrix()).unwrap();
                assert!((full - fast).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn displacement_covariance_under_conjugation() {
        let d = dims(5);
        let nf = d.n_f64();
        for (mu, nu) in [(1i64, 0i64), (0, 1), (2, -1)] {
            let g = displacement(d, nu, -mu).unwrap().mapv(|z| z * nf.sqrt());
            let gdag = g.t().mapv(|z| z.conj());
            for (eta, xi) in [(1i64, 1i64), (2, 0), (-1, 2)] {
                let s = displacement(d, eta, xi).unwrap();
                let conj = g.dot(&s).dot(&gdag);
                let want = s.mapv(|z| {
                    z * phase(-2.0 * PI * ((eta * mu + xi * nu) as f64) / nf)
                });
                assert!(max_abs_diff(&conj, &want) < 1e-12);
            }
        }
    }

    #[test]
    fn mapping_kernel_has_unit_trace() {
        let d = dims(5);
        for order in [KernelOrder::MinusOne, KernelOrder::Zero, KernelOrder::PlusOne] {
            for (mu, nu) in [(0i64, 0i64), (1, -2)] {
                let t = mapping_kernel(d, mu, nu, order).unwrap();
                let tr = t.diag().sum();
                assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_mapping_kernel_is_hermitian() {
        let d = dims(5);
        let t = mapping_kernel(d, 1, 2, KernelOrder::Zero).unwrap();
        let tdag = t.t().mapv(|z| z.conj());
        assert!(max_abs_diff(&t, &tdag) < 1e-13);
    }

    #[test]
    fn mapping_family_duality() {
        let d = dims(3);
        for order in [KernelOrder::MinusOne, KernelOrder::Zero, KernelOrder::PlusOne] {
            for mu in d.range() {
                for nu in d.range() {
                    let t1 = mapping_kernel(d, mu, nu, order).unwrap();
                    for mu2 in d.range() {
                        for nu2 in d.range() {
                            let t2 = mapping_kernel(d, mu2, nu2, order.negated()).unwrap();
                            let tr = t1.dot(&t2).diag().sum();
                            let want = if (mu, nu) == (mu2, nu2) { d.n_f64() } else { 0.0 };
                            assert_abs_diff_eq!(tr.re, want, epsilon = 1e-10);
                            assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn antinormal_family_resolves_identity() {
        let d = dims(5);
        let mut acc = Array2::<Complex64>::zeros((d.n(), d.n()));
        for mu in d.range() {
            for nu in d.range() {
                acc += &mapping_kernel(d, mu, nu, KernelOrder::MinusOne).unwrap();
            }
        }
        acc = acc.mapv(|z| z / d.n_f64());
        assert!(max_abs_diff(&acc, &identity(d.n())) < 1e-11);
    }

    #[test]
    fn decompose_reconstruct_round_trip() {
        let d = dims(3);
        let rho = random_density(d, 3);
        for order in [KernelOrder::MinusOne, KernelOrder::Zero, KernelOrder::PlusOne] {
            let coeffs = decompose(d, rho.matrix(), order).unwrap();
            let back = reconstruct(d, &coeffs, order).unwrap();
            assert!(max_abs_diff(&back, rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn expectation_agrees_with_direct_trace() {
        let d = dims(3);
        let rho = random_density(d, 17);
        let obs = build_u(d) + build_v(d).mapv(|z| z * Complex64::new(0.0, 1.0));
        for order in [KernelOrder::MinusOne, KernelOrder::Zero, KernelOrder::PlusOne] {
            let got = expectation(d, &obs, &rho, order).unwrap();
            let direct = obs.dot(rho.matrix()).diag().sum();
            assert!((got - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn rescaled_symmetric_kernel_is_not_an_involution() {
        let d = dims(3);
        let defect = involution_defect(d).unwrap();
        assert!(defect > 0.1, "defect unexpectedly small: {defect}");
    }

    #[test]
    fn density_validation_rejects_bad_inputs() {
        let d = dims(3);
        let mut m = DensityMatrix::maximally_mixed(d).matrix().clone();
        m[[0, 1]] = Complex64::new(0.5, 0.0);
        assert!(DensityMatrix::from_matrix(d, m.clone()).is_err());
        m[[1, 0]] = Complex64::new(0.5, 0.0);
        // Hermitian now, but indefinite: eigenvalues 1/3 +/- 1/2.
        assert!(DensityMatrix::from_matrix(d, m).is_err());
        let scaled = DensityMatrix::maximally_mixed(d).matrix().mapv(|z| z * 2.0);
        assert!(DensityMatrix::from_matrix(d, scaled).is_err());
    }

    #[test]
    fn purity_of_pure_and_mixed_states() {
        let d = dims(5);
        let amps: Vec<Complex64> = (0..5)
            .map(|k| Complex64::new(1.0 + k as f64, -0.3 * k as f64))
            .collect();
        let pure = DensityMatrix::from_pure(d, &amps).unwrap();
        assert_abs_diff_eq!(pure.purity(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            DensityMatrix::maximally_mixed(d).purity(),
            0.2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn mixture_normalises_weights() {
        let d = dims(3);
        let a = DensityMatrix::maximally_mixed(d);
        let b = DensityMatrix::from_pure(
            d,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let mix = DensityMatrix::mixture(&[(1.0, a), (3.0, b)]).unwrap();
        let tr = mix.matrix().diag().sum();
        assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-14);
        assert!(DensityMatrix::mixture(&[]).is_err());
    }
}
