use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{kernel_table, KernelKind, SqueezeParam};
use crate::lattice::LatticeDims;
use crate::numerics::factorial;
use crate::operators::{displacement_trace, kernel_power, DensityMatrix, KernelOrder};
use crate::states::squeezed_coherent_state;

/// Most negative value tolerated in a distribution that must be
/// nonnegative; anything below aborts instead of being clamped.
pub const NEGATIVITY_FLOOR: f64 = 1e-10;

/// Largest imaginary residue tolerated when a grid is real by symmetry.
pub const REALITY_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Characteristic,
    Quasiprobability,
    Overlap,
    Marginal,
}

/// A phase-space grid with its provenance: the ordering exponent, the
/// basis width and whether it is a characteristic function, a
/// quasiprobability, or an overlap distribution.
#[derive(Clone, Debug)]
pub struct PhaseSpaceFunction {
    dims: LatticeDims,
    kind: FunctionKind,
    order: KernelOrder,
    s: SqueezeParam,
    values: Array2<Complex64>,
}

impl PhaseSpaceFunction {
    pub(crate) fn characteristic(
        dims: LatticeDims,
        order: KernelOrder,
        s: SqueezeParam,
        values: Array2<Complex64>,
    ) -> Result<Self> {
        let origin = values[[dims.idx(0), dims.idx(0)]];
        let want = 1.0 / dims.n_f64().sqrt();
        if (origin - Complex64::new(want, 0.0)).norm() > 1e-12 {
            return Err(Error::NumericalConsistency {
                detail: format!(
                    "characteristic origin {origin} deviates from 1/sqrt(N) = {want}"
                ),
            });
        }
        Ok(PhaseSpaceFunction {
            dims,
            kind: FunctionKind::Characteristic,
            order,
            s,
            values,
        })
    }

    pub(crate) fn distribution(
        dims: LatticeDims,
        kind: FunctionKind,
        order: KernelOrder,
        s: SqueezeParam,
        values: Array2<Complex64>,
    ) -> Result<Self> {
        let total = values.sum() / dims.n_f64();
        if (total - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidDistribution {
                detail: format!("grid sum / N = {total}, expected 1"),
            });
        }
        let f = PhaseSpaceFunction {
            dims,
            kind,
            order,
            s,
            values,
        };
        match order {
            KernelOrder::Zero => {
                f.real_values(REALITY_TOL)?;
            }
            KernelOrder::MinusOne => {
                let grid = f.real_values(REALITY_TOL)?;
                for (pos, v) in grid.iter().enumerate() {
                    if *v < -NEGATIVITY_FLOOR || *v > 1.0 + NEGATIVITY_FLOOR {
                        return Err(Error::InvalidDistribution {
                            detail: format!(
                                "antinormal grid entry {v} at flat index {pos} outside [0, 1]"
                            ),
                        });
                    }
                }
            }
            KernelOrder::PlusOne => {}
        }
        Ok(f)
    }

    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn order(&self) -> KernelOrder {
        self.order
    }

    pub fn squeeze(&self) -> SqueezeParam {
        self.s
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    /// Grid entry at window labels (wrapped).
    pub fn value(&self, mu: i64, nu: i64) -> Complex64 {
        self.values[[self.dims.idx(self.dims.wrap(mu)), self.dims.idx(self.dims.wrap(nu))]]
    }

    /// Real parts, provided every imaginary residue is below `tol`.
    pub fn real_values(&self, tol: f64) -> Result<Array2<f64>> {
        let mut worst = 0.0f64;
        for v in self.values.iter() {
            worst = worst.max(v.im.abs());
        }
        if worst > tol {
            return Err(Error::NumericalConsistency {
                detail: format!("imaginary residue {worst} exceeds {tol} on a real grid"),
            });
        }
        Ok(self.values.mapv(|v| v.re))
    }

    /// Real nonnegative grid: tiny negative dust is clamped to zero,
    /// anything below the negativity floor aborts.
    pub fn nonnegative_values(&self) -> Result<Array2<f64>> {
        let grid = self.real_values(REALITY_TOL)?;
        let mut out = grid.clone();
        for v in out.iter_mut() {
            if *v < -NEGATIVITY_FLOOR {
                return Err(Error::InvalidDistribution {
                    detail: format!("negative entry {v} beyond the {NEGATIVITY_FLOOR} floor"),
                });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(out)
    }
}

/// Centered double DFT over the window. sign = -1 is the forward map with
/// prefactor N^(-1/2); sign = +1 inverts it with prefactor N^(-3/2) so the
/// round trip is the identity.
pub fn centered_dft(
    dims: LatticeDims,
    grid: &Array2<Complex64>,
    sign: i32,
) -> Result<Array2<Complex64>> {
    if grid.nrows() != dims.n() || grid.ncols() != dims.n() {
        return Err(Error::DimensionMismatch {
            expected: dims.n(),
            got: grid.nrows().max(grid.ncols()),
        });
    }
    let front = match sign {
        -1 => 1.0 / dims.n_f64().sqrt(),
        1 => dims.n_f64().powf(-1.5),
        _ => {
            return Err(Error::InvalidState {
                detail: format!("dft sign must be -1 or +1, got {sign}"),
            })
        }
    };
    let nf = dims.n_f64();
    let n = dims.n();
    let mut out = Array2::<Complex64>::zeros((n, n));
    for mu in dims.range() {
        for nu in dims.range() {
            let mut acc = Complex64::new(0.0, 0.0);
            for eta in dims.range() {
                for xi in dims.range() {
                    let angle = sign as f64 * 2.0 * PI * ((eta * mu + xi * nu) as f64) / nf;
                    acc += Complex64::from_polar(1.0, angle)
                        * grid[[dims.idx(eta), dims.idx(xi)]];
                }
            }
            out[[dims.idx(mu), dims.idx(nu)]] = acc * front;
        }
    }
    Ok(out)
}

/// Kernel weight attached to the characteristic function of the given
/// ordering and basis width: K^(-order) at unit width, with one vacuum
/// kernel replaced by the width-s kernel otherwise (the ratio filter).
fn char_weight(
    dims: LatticeDims,
    eta: i64,
    xi: i64,
    order: KernelOrder,
    s: SqueezeParam,
) -> Result<f64> {
    let vacuum = kernel_table(dims, KernelKind::Vacuum)?;
    let base = kernel_power(&vacuum, eta, xi, -order.exponent())?;
    if s.value() == 1.0 {
        return Ok(base);
    }
    let ratio = kernel_table(dims, KernelKind::Ratio { s })?;
    Ok(base * ratio.value(eta, xi))
}

/// Ordered characteristic function of a state: the kernel-weighted grid of
/// displacement expectations Tr[S(eta, xi) rho].
pub fn char_function(
    dims: LatticeDims,
    rho: &DensityMatrix,
    order: KernelOrder,
    s: SqueezeParam,
) -> Result<PhaseSpaceFunction> {
    let n = dims.n();
    let mut values = Array2::<Complex64>::zeros((n, n));
    for eta in dims.range() {
        for xi in dims.range() {
            let w = char_weight(dims, eta, xi, order, s)?;
            values[[dims.idx(eta), dims.idx(xi)]] =
                displacement_trace(dims, eta, xi, rho.matrix())? * w;
        }
    }
    PhaseSpaceFunction::characteristic(dims, order, s, values)
}

/// Quasiprobability grid: the forward centered DFT of the ordered
/// characteristic function. order -1, 0, +1 give the antinormal (Husimi),
/// symmetric (Wigner) and normal (Glauber-Sudarshan) distributions in the
/// width-s coherent family.
pub fn quasi_distribution(
    dims: LatticeDims,
    rho: &DensityMatrix,
    order: KernelOrder,
    s: SqueezeParam,
) -> Result<PhaseSpaceFunction> {
    let chi = char_function(dims, rho, order, s)?;
    let grid = centered_dft(dims, chi.values(), -1)?;
    PhaseSpaceFunction::distribution(dims, FunctionKind::Quasiprobability, order, s, grid)
}

/// Husimi grid as plain nonnegative reals, ready for entropy functionals.
pub fn husimi_grid(dims: LatticeDims, rho: &DensityMatrix, s: SqueezeParam) -> Result<Array2<f64>> {
    quasi_distribution(dims, rho, KernelOrder::MinusOne, s)?.nonnegative_values()
}

/// Overlap distribution of the level-n state over the width-s coherent
/// grid: the double Fourier transform of the kernel product K_s K_n.
pub fn overlap_distribution(
    dims: LatticeDims,
    level: usize,
    s: SqueezeParam,
) -> Result<PhaseSpaceFunction> {
    let squeezed = kernel_table(dims, KernelKind::Squeezed { s })?;
    let number = kernel_table(dims, KernelKind::Number { level })?;
    let n = dims.n();
    let mut prod = Array2::<Complex64>::zeros((n, n));
    for eta in dims.range() {
        for xi in dims.range() {
            prod[[dims.idx(eta), dims.idx(xi)]] = Complex64::new(
                squeezed.value(eta, xi) * number.value(eta, xi),
                0.0,
            );
        }
    }
    let grid = centered_dft(dims, &prod, -1)?.mapv(|v| v / dims.n_f64().sqrt());
    PhaseSpaceFunction::distribution(
        dims,
        FunctionKind::Overlap,
        KernelOrder::MinusOne,
        s,
        grid,
    )
}

/// Population of the level-n state in the width-s displaced state at one
/// phase-space point, assembled from the state's displacement coefficients
/// paired with the level kernel.
pub fn overlap_probability_at(
    dims: LatticeDims,
    level: usize,
    mu: i64,
    nu: i64,
    s: SqueezeParam,
) -> Result<f64> {
    let (state, _) = squeezed_coherent_state(dims, mu, nu, s)?;
    let rho = state.density()?;
    let number = kernel_table(dims, KernelKind::Number { level })?;
    let mut acc = Complex64::new(0.0, 0.0);
    for eta in dims.range() {
        for xi in dims.range() {
            acc += displacement_trace(dims, dims.wrap(-eta), dims.wrap(-xi), rho.matrix())?
                * number.value(eta, xi);
        }
    }
    acc /= dims.n_f64().sqrt();
    if acc.im.abs() > REALITY_TOL {
        return Err(Error::NumericalConsistency {
            detail: format!("overlap population has imaginary residue {}", acc.im),
        });
    }
    if acc.re < -NEGATIVITY_FLOOR {
        return Err(Error::InvalidDistribution {
            detail: format!("overlap population {} is negative", acc.re),
        });
    }
    Ok(acc.re.max(0.0))
}

fn marginal_axis(
    dims: LatticeDims,
    rho: &DensityMatrix,
    s: SqueezeParam,
    position_axis: bool,
) -> Result<Vec<f64>> {
    let squeezed = kernel_table(dims, KernelKind::Squeezed { s })?;
    let nf = dims.n_f64();
    let mut out = vec![0.0; dims.n()];
    for point in dims.range() {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in dims.range() {
            let (eta, xi) = if position_axis { (k, 0) } else { (0, k) };
            acc += Complex64::from_polar(1.0, -2.0 * PI * ((k * point) as f64) / nf)
                * squeezed.value(eta, xi)
                * displacement_trace(dims, eta, xi, rho.matrix())?;
        }
        if acc.im.abs() > REALITY_TOL {
            return Err(Error::NumericalConsistency {
                detail: format!("marginal entry has imaginary residue {}", acc.im),
            });
        }
        if acc.re < -NEGATIVITY_FLOOR {
            return Err(Error::InvalidDistribution {
                detail: format!("marginal entry {} is negative", acc.re),
            });
        }
        out[dims.idx(point)] = acc.re.max(0.0);
    }
    Ok(out)
}

/// Marginal distributions (Q over positions, R over momenta) taken from
/// the axis slices of the width-s antinormal characteristic function. Both
/// satisfy (1/sqrt(N)) * sum = 1.
pub fn marginals(
    dims: LatticeDims,
    rho: &DensityMatrix,
    s: SqueezeParam,
) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((
        marginal_axis(dims, rho, s, true)?,
        marginal_axis(dims, rho, s, false)?,
    ))
}

/// Continuum reference for the level-n overlap distribution at unit width:
/// a Poisson-weighted Gaussian in the rescaled coordinates q = sqrt(2 pi /
/// N) mu, p = sqrt(2 pi / N) nu.
pub fn continuum_overlap(dims: LatticeDims, level: usize, mu: i64, nu: i64) -> f64 {
    let scale = 2.0 * PI / dims.n_f64();
    let r2 = scale * ((mu * mu + nu * nu) as f64);
    (-r2 / 2.0).exp() * (r2 / 2.0).powi(level as i32) / factorial(level)
}

/// Largest pointwise deviation of the lattice overlap distribution from
/// its continuum limit; decays exponentially with N.
pub fn continuum_check(dims: LatticeDims, level: usize) -> Result<f64> {
    let grid = overlap_distribution(dims, level, SqueezeParam::unit())?;
    let values = grid.real_values(1e-9)?;
    let mut worst = 0.0f64;
    for mu in dims.range() {
        for nu in dims.range() {
            let want = continuum_overlap(dims, level, mu, nu);
            worst = worst.max((values[[dims.idx(mu), dims.idx(nu)]] - want).abs());
        }
    }
    Ok(worst)
}

/// Serializable grid: row-major values from the bottom-left window corner,
/// each entry an [re, im] pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridExport {
    #[serde(rename = "N")]
    pub n: u64,
    pub s: f64,
    pub order: i32,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthesized_ft: Option<bool>,
    pub values: Vec<[f64; 2]>,
}

impl GridExport {
    pub fn from_function(f: &PhaseSpaceFunction, kind_label: &str) -> Self {
        GridExport {
            n: f.dims().n() as u64,
            s: f.squeeze().value(),
            order: f.order().exponent(),
            kind: kind_label.to_string(),
            source: None,
            synthesized_ft: None,
            values: f.values().iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn dims(&self) -> Result<LatticeDims> {
        LatticeDims::new(self.n)
    }

    /// (mu, nu, re, im) rows in storage order, for CSV emission.
    pub fn labeled_rows(&self) -> Result<Vec<(i64, i64, f64, f64)>> {
        let dims = self.dims()?;
        if self.values.len() != dims.n() * dims.n() {
            return Err(Error::DimensionMismatch {
                expected: dims.n() * dims.n(),
                got: self.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .enumerate()
            .map(|(pos, v)| {
                let mu = (pos / dims.n()) as i64 - dims.ell();
                let nu = (pos % dims.n()) as i64 - dims.ell();
                (mu, nu, v[0], v[1])
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::kernel_squeezed;
    use crate::operators::{mapping_kernel, KernelOrder};
    use crate::states::{
        coherent_state, displaced_squeezed_vacuum, number_state, squeezing_generator,
        vacuum_state,
    };
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dims(n: u64) -> LatticeDims {
        LatticeDims::new(n).unwrap()
    }

    fn sq(s: f64) -> SqueezeParam {
        SqueezeParam::new(s).unwrap()
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

    #[test]
    fn dft_delta_and_round_trip() {
        let d = dims(5);
        let n = d.n();
        let mut delta = Array2::<Complex64>::zeros((n, n));
        delta[[d.idx(0), d.idx(0)]] = Complex64::new(1.0, 0.0);
        let flat = centered_dft(d, &delta, -1).unwrap();
        for v in flat.iter() {
            assert!((v - Complex64::new(1.0 / d.n_f64().sqrt(), 0.0)).norm() < 1e-14);
        }
        let ones = Array2::<Complex64>::ones((n, n));
        let spike = centered_dft(d, &ones, -1).unwrap();
        assert!(
            (spike[[d.idx(0), d.idx(0)]] - Complex64::new(d.n_f64().powf(1.5), 0.0)).norm()
                < 1e-12
        );
        assert!((spike[[d.idx(1), d.idx(0)]]).norm() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut grid = Array2::<Complex64>::zeros((n, n));
        for v in grid.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let back = centered_dft(d, &centered_dft(d, &grid, -1).unwrap(), 1).unwrap();
        for (a, b) in grid.iter().zip(back.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn characteristic_origin_is_inverse_root_n() {
        let d = dims(5);
        let rho = random_mixed(d, 3);
        for order in [KernelOrder::MinusOne, KernelOrder::Zero, KernelOrder::PlusOne] {
            for &sv in &[1.0, 5f64.sqrt()] {
                let chi = char_function(d, &rho, order, sq(sv)).unwrap();
                let v = chi.value(0, 0);
                assert!((v - Complex64::new(1.0 / d.n_f64().sqrt(), 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn vacuum_antinormal_char_is_kernel_squared() {
        let d = dims(5);
        let rho = vacuum_state(d).unwrap().density().unwrap();
        let chi = char_function(d, &rho, KernelOrder::MinusOne, sq(1.0)).unwrap();
        let vac = kernel_table(d, KernelKind::Vacuum).unwrap();
        for eta in d.range() {
            for xi in d.range() {
                let want = vac.value(eta, xi) * vac.value(eta, xi) / d.n_f64().sqrt();
                assert!((chi.value(eta, xi) - Complex64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn husimi_of_coherent_state_matches_direct_overlaps() {
        let d = dims(5);
        let target = coherent_state(d, 1, -2).unwrap();
        let rho = target.density().unwrap();
        let grid = husimi_grid(d, &rho, sq(1.0)).unwrap();
        for mu in d.range() {
            for nu in d.range() {
                let probe = coherent_state(d, mu, nu).unwrap();
                let want = probe.overlap(&target).unwrap().norm_sqr();
                assert_abs_diff_eq!(
                    grid[[d.idx(mu), d.idx(nu)]],
                    want,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn maximally_mixed_state_has_flat_husimi() {
        let d = dims(7);
        let rho = DensityMatrix::maximally_mixed(d);
        for &sv in &[1.0, 2.0] {
            let grid = husimi_grid(d, &rho, sq(sv)).unwrap();
            for v in grid.iter() {
                assert_abs_diff_eq!(*v, 1.0 / d.n_f64(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn route_equivalence_husimi_overlap_and_inner_products() {
        // Central consistency test: three routes to the same distribution.
        for n in [3u64, 5, 7] {
            let d = dims(n);
            let rho = vacuum_state(d).unwrap().density().unwrap();
            for &sv in &[1.0, 5f64.sqrt(), 1.0 / 5f64.sqrt()] {
                let s = sq(sv);
                let via_char = husimi_grid(d, &rho, s).unwrap();
                let via_kernels = overlap_distribution(d, 0, s)
                    .unwrap()
                    .nonnegative_values()
                    .unwrap();
                for mu in d.range() {
                    for nu in d.range() {
                        let probe = displaced_squeezed_vacuum(d, mu, nu, s).unwrap();
                        let direct = probe
                            .overlap(&vacuum_state(d).unwrap())
                            .unwrap()
                            .norm_sqr();
                        let i = [d.idx(mu), d.idx(nu)];
                        assert!((via_char[i] - direct).abs() < 1e-10);
                        assert!((via_kernels[i] - direct).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn wigner_real_and_normalized_for_random_states() {
        let d = dims(5);
        for seed in 0..20 {
            let rho = random_mixed(d, seed);
            let grid = quasi_distribution(d, &rho, KernelOrder::Zero, sq(1.0)).unwrap();
            let real = grid.real_values(1e-11).unwrap();
            assert_abs_diff_eq!(real.sum() / d.n_f64(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn wigner_position_marginal_is_the_diagonal() {
        let d = dims(5);
        let rho = random_mixed(d, 11);
        let grid = quasi_distribution(d, &rho, KernelOrder::Zero, sq(1.0))
            .unwrap()
            .real_values(1e-11)
            .unwrap();
        for mu in d.range() {
            let mut acc = 0.0;
            for nu in d.range() {
                acc += grid[[d.idx(mu), d.idx(nu)]];
            }
            assert_abs_diff_eq!(
                acc / d.n_f64(),
                rho.matrix()[[d.idx(mu), d.idx(mu)]].re,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn normal_order_round_trip_reconstructs_state() {
        let d = dims(3);
        let target = coherent_state(d, 1, -1).unwrap();
        let rho = target.density().unwrap();
        let p = quasi_distribution(d, &rho, KernelOrder::PlusOne, sq(1.0))
            .unwrap()
            .real_values(1e-9)
            .unwrap();
        let n = d.n();
        let mut acc = Array2::<Complex64>::zeros((n, n));
        for mu in d.range() {
            for nu in d.range() {
                let t = mapping_kernel(d, mu, nu, KernelOrder::MinusOne).unwrap();
                acc += &t.mapv(|z| z * p[[d.idx(mu), d.idx(nu)]]);
            }
        }
        acc = acc.mapv(|z| z / d.n_f64());
        let mut fidelity = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                fidelity += target.amplitudes()[j].conj() * acc[[j, k]] * target.amplitudes()[k];
            }
        }
        assert!(fidelity.re > 1.0 - 1e-8, "fidelity {fidelity}");
    }

    #[test]
    fn overlap_distribution_origin_and_swap() {
        let d = dims(7);
        let p0 = overlap_distribution(d, 0, sq(1.0)).unwrap();
        assert_abs_diff_eq!(p0.value(0, 0).re, 1.0, epsilon = 1e-12);
        for level in [0usize, 1] {
            let s = sq(5f64.sqrt());
            let a = overlap_distribution(d, level, s).unwrap();
            let b = overlap_distribution(d, level, s.inverse()).unwrap();
            for mu in d.range() {
                for nu in d.range() {
                    assert!((a.value(mu, nu) - b.value(nu, mu)).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn overlap_population_matches_direct_inner_product() {
        let d = dims(3);
        let s = sq(5f64.sqrt());
        for level in 0..3usize {
            for mu in d.range() {
                for nu in d.range() {
                    let got = overlap_probability_at(d, level, mu, nu, s).unwrap();
                    let state = squeezed_coherent_state(d, mu, nu, s).unwrap().0;
                    let want = number_state(d, level, sq(1.0))
                        .unwrap()
                        .overlap(&state)
                        .unwrap()
                        .norm_sqr();
                    assert!((got - want).abs() < 1e-10, "n={level} ({mu},{nu})");
                }
            }
        }
    }

    #[test]
    fn overlap_populations_sum_to_one_when_levels_span() {
        let d = dims(3);
        let s = sq(2.0);
        for (mu, nu) in [(0i64, 0i64), (1, -1)] {
            let total: f64 = (0..3)
                .map(|level| overlap_probability_at(d, level, mu, nu, s).unwrap())
                .sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn overlap_population_at_unit_width_reduces_to_distribution() {
        let d = dims(3);
        for level in 0..3usize {
            let grid = overlap_distribution(d, level, sq(1.0)).unwrap();
            for mu in d.range() {
                for nu in d.range() {
                    let got = overlap_probability_at(d, level, mu, nu, sq(1.0)).unwrap();
                    assert!((got - grid.value(mu, nu).re).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn marginals_normalize_and_match_husimi_sums() {
        let d = dims(5);
        let rho = random_mixed(d, 21);
        for &sv in &[1.0, 5f64.sqrt()] {
            let s = sq(sv);
            let (q, r) = marginals(d, &rho, s).unwrap();
            let root = d.n_f64().sqrt();
            assert_abs_diff_eq!(q.iter().sum::<f64>() / root, 1.0, epsilon = 1e-11);
            assert_abs_diff_eq!(r.iter().sum::<f64>() / root, 1.0, epsilon = 1e-11);
            let h = husimi_grid(d, &rho, s).unwrap();
            for mu in d.range() {
                let mut acc = 0.0;
                for nu in d.range() {
                    acc += h[[d.idx(mu), d.idx(nu)]];
                }
                assert_abs_diff_eq!(q[d.idx(mu)], acc / root, epsilon = 1e-11);
            }
            for nu in d.range() {
                let mut acc = 0.0;
                for mu in d.range() {
                    acc += h[[d.idx(mu), d.idx(nu)]];
                }
                assert_abs_diff_eq!(r[d.idx(nu)], acc / root, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn maximally_mixed_marginals_are_flat() {
        let d = dims(7);
        let rho = DensityMatrix::maximally_mixed(d);
        let (q, r) = marginals(d, &rho, sq(3.0)).unwrap();
        for v in q.iter().chain(r.iter()) {
            assert_abs_diff_eq!(*v, 1.0 / d.n_f64().sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn squeeze_toggle_matches_generator_transform() {
        // Width toggling equals pre-transforming the state with the
        // generator adjoint where the level basis is faithful.
        let d = dims(3);
        let s = sq(5f64.sqrt());
        let rho = vacuum_state(d).unwrap().density().unwrap();
        let x = squeezing_generator(d, s).unwrap();
        let xd = x.t().mapv(|z| z.conj());
        let moved = x.dot(rho.matrix()).dot(&xd);
        let trace = moved.diag().sum().re;
        let moved = DensityMatrix::from_matrix(d, moved.mapv(|z| z / trace)).unwrap();
        let toggled = husimi_grid(d, &rho, s).unwrap();
        let pre = husimi_grid(d, &moved, sq(1.0)).unwrap();
        for (a, b) in toggled.iter().zip(pre.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn continuum_deviation_is_small_and_shrinking() {
        let d31 = dims(31);
        let d51 = dims(51);
        for level in [0usize, 1] {
            let big = continuum_check(d31, level).unwrap();
            let small = continuum_check(d51, level).unwrap();
            assert!(small < big, "level {level}: {small} !< {big}");
            if level == 0 {
                assert!(small < 1e-4, "deviation {small}");
            }
        }
    }

    #[test]
    fn export_round_trip_and_labels() {
        let d = dims(3);
        let rho = vacuum_state(d).unwrap().density().unwrap();
        let f = quasi_distribution(d, &rho, KernelOrder::Zero, sq(1.0)).unwrap();
        let export = GridExport::from_function(&f, "wigner");
        let text = serde_json::to_string(&export).unwrap();
        assert!(text.contains("\"N\":3"));
        assert!(text.contains("\"kind\":\"wigner\""));
        assert!(!text.contains("synthesized_ft"));
        let back: GridExport = serde_json::from_str(&text).unwrap();
        let rows = back.labeled_rows().unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!((rows[0].0, rows[0].1), (-1, -1));
        assert_eq!((rows[8].0, rows[8].1), (1, 1));
        assert_abs_diff_eq!(rows[4].2, f.value(0, 0).re, epsilon = 1e-15);
    }

    #[test]
    fn glauber_sudarshan_can_go_negative_but_normalizes() {
        let d = dims(5);
        let rho = number_state(d, 1, sq(1.0)).unwrap().density().unwrap();
        let p = quasi_distribution(d, &rho, KernelOrder::PlusOne, sq(1.0))
            .unwrap()
            .real_values(1e-8)
            .unwrap();
        assert_abs_diff_eq!(p.sum() / d.n_f64(), 1.0, epsilon = 1e-9);
        assert!(p.iter().cloned().fold(f64::INFINITY, f64::min) < -1e-3);
    }

    #[test]
    fn squeezed_kernel_slice_equals_marginal_weight() {
        // The marginal weight on the axis is the squeezed kernel itself.
        let d = dims(5);
        let s = sq(2.0);
        let table = kernel_table(d, KernelKind::Squeezed { s }).unwrap();
        for eta in d.range() {
            assert_abs_diff_eq!(
                table.value(eta, 0),
                kernel_squeezed(d, eta, 0, s).unwrap(),
                epsilon = 1e-14
            );
        }
    }
}
