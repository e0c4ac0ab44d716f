use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernels::{normalizer_inverse_sq, SqueezeParam};
use crate::lattice::LatticeDims;
use crate::numerics::{hermite, lattice_cutoff, theta_arg_jet, Jet, ThetaKind, DEFAULT_TAIL_EPS};
use crate::operators::DensityMatrix;

/// Real expansion coefficients of one width-s level-n profile over the
/// position basis, normalised to unit sum of squares.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    dims: LatticeDims,
    level: usize,
    s: SqueezeParam,
    values: Vec<f64>,
    raw_norm: f64,
}

impl CoefficientTable {
    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn squeeze(&self) -> SqueezeParam {
        self.s
    }

    /// Coefficient at position label kappa (wrapped into the window; the
    /// underlying series is periodic).
    pub fn value(&self, kappa: i64) -> f64 {
        self.values[self.dims.idx(kappa)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Norm of the unnormalised series, which approximates the reciprocal
    /// of the closed-form normalisation constant.
    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }

    pub fn state(&self) -> StateVector {
        StateVector {
            dims: self.dims,
            amplitudes: self
                .values
                .iter()
                .map(|v| Complex64::new(*v, 0.0))
                .collect(),
        }
    }
}

fn check_level(dims: LatticeDims, level: usize) -> Result<()> {
    if level >= dims.n() {
        return Err(Error::LevelOutOfRange {
            n: level,
            max: dims.n() - 1,
        });
    }
    Ok(())
}

/// Unnormalised coefficient series: the phase-paired Gauss-Hermite sum,
/// which is manifestly real. Even levels combine conjugate terms into
/// cosines, odd levels into sines with an overall sign (-1)^floor(n/2)
/// carried by the (-i)^n prefactor.
fn fock_raw(dims: LatticeDims, level: usize, s: SqueezeParam) -> Result<Vec<f64>> {
    check_level(dims, level)?;
    let nf = dims.n_f64();
    let decay = PI / (nf * s.squared());
    let harg = (2.0 * PI / nf).sqrt() / s.value();
    let cutoff = lattice_cutoff(decay, level, DEFAULT_TAIL_EPS);
    let sign = if (level / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let even = level % 2 == 0;
    let mut values = vec![0.0; dims.n()];
    for kappa in dims.range() {
        let mut acc = if even { hermite(level, 0.0) } else { 0.0 };
        if !even && kappa == 0 {
            // Every summand is an exact sine zero; keep the value clean.
            values[dims.idx(kappa)] = 0.0;
            continue;
        }
        for beta in 1..=cutoff {
            let b = beta as f64;
            let weight = (-decay * b * b).exp() * hermite(level, harg * b);
            let angle = 2.0 * PI * b * kappa as f64 / nf;
            acc += 2.0 * weight * if even { angle.cos() } else { angle.sin() };
        }
        values[dims.idx(kappa)] = sign * acc / nf.sqrt();
    }
    Ok(values)
}

/// The same unnormalised series through the generating-function route: the
/// n-th derivative of exp(pi a s^2 w^2) * theta3(2 a (kappa - w) | 2 i a
/// s^-2), scaled by ((pi a s^2)^n N)^(-1/2).
pub fn fock_raw_jet_route(
    dims: LatticeDims,
    level: usize,
    s: SqueezeParam,
) -> Result<Vec<f64>> {
    check_level(dims, level)?;
    let a = dims.a();
    let pas2 = PI * a * s.squared();
    let mut gauss_coeffs = vec![Complex64::new(0.0, 0.0); level + 1];
    gauss_coeffs[0] = Complex64::new(0.0, 0.0);
    if level >= 2 {
        gauss_coeffs[2] = Complex64::new(pas2, 0.0);
    }
    let gauss = Jet::from_coeffs(gauss_coeffs)?.exp();
    let scale = 1.0 / (pas2.powi(level as i32) * dims.n_f64()).sqrt();
    let mut values = vec![0.0; dims.n()];
    for kappa in dims.range() {
        let mut z = vec![Complex64::new(0.0, 0.0); level + 1];
        z[0] = Complex64::new(2.0 * a * kappa as f64, 0.0);
        if level >= 1 {
            z[1] = Complex64::new(-2.0 * a, 0.0);
        }
        let theta = theta_arg_jet(ThetaKind::Three, &Jet::from_coeffs(z)?, 2.0 * a / s.squared())?;
        let d = gauss.mul(&theta).derivative_at_zero(level)?;
        debug_assert!(d.im.abs() < 1e-9 * (1.0 + d.re.abs()));
        values[dims.idx(kappa)] = scale * d.re;
    }
    Ok(values)
}

/// Closed-form normalisation constant of the width-s level-n profile.
pub fn normalization_constant(dims: LatticeDims, level: usize, s: SqueezeParam) -> Result<f64> {
    Ok(1.0 / normalizer_inverse_sq(dims, level, s)?.sqrt())
}

/// Coefficient table of the width-s level-n profile with exact unit norm.
pub fn fock_coefficients(
    dims: LatticeDims,
    level: usize,
    s: SqueezeParam,
) -> Result<CoefficientTable> {
    let raw = fock_raw(dims, level, s)?;
    let raw_norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    if raw_norm < 1e-300 {
        return Err(Error::InvalidState {
            detail: format!("level-{level} coefficient series vanished"),
        });
    }
    Ok(CoefficientTable {
        dims,
        level,
        s,
        values: raw.iter().map(|v| v / raw_norm).collect(),
        raw_norm,
    })
}

/// Normalised state vector over the position basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: LatticeDims,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(dims: LatticeDims, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dims.n() {
            return Err(Error::DimensionMismatch {
                expected: dims.n(),
                got: amplitudes.len(),
            });
        }
        Ok(StateVector { dims, amplitudes })
    }

    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    pub fn amplitude(&self, kappa: i64) -> Complex64 {
        self.amplitudes[self.dims.idx(kappa)]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::InvalidState {
                detail: "cannot normalise a zero vector".to_string(),
            });
        }
        Ok(StateVector {
            dims: self.dims,
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        })
    }

    /// Inner product with this vector on the bra side.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.n(),
                got: other.dims.n(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self.dims, &self.amplitudes)
    }
}

/// Width-s level-n state (s = 1 gives the finite number basis).
pub fn number_state(dims: LatticeDims, level: usize, s: SqueezeParam) -> Result<StateVector> {
    Ok(fock_coefficients(dims, level, s)?.state())
}

pub fn vacuum_state(dims: LatticeDims) -> Result<StateVector> {
    number_state(dims, 0, SqueezeParam::unit())
}

pub fn squeezed_vacuum(dims: LatticeDims, s: SqueezeParam) -> Result<StateVector> {
    number_state(dims, 0, s)
}

/// sqrt(N) S(nu, -mu) applied to a base vector: the finite displacement
/// moving the wavepacket to phase-space point (mu, nu).
fn displace_amplitudes(
    dims: LatticeDims,
    mu: i64,
    nu: i64,
    base: &[Complex64],
) -> Result<Vec<Complex64>> {
    dims.idx_checked("mu", mu)?;
    dims.idx_checked("nu", nu)?;
    let nf = dims.n_f64();
    let front = Complex64::from_polar(1.0, -PI * (mu * nu) as f64 / nf);
    Ok(dims
        .range()
        .map(|j| {
            front
                * Complex64::from_polar(1.0, 2.0 * PI * (nu * j) as f64 / nf)
                * base[dims.idx(dims.wrap(j - mu))]
        })
        .collect())
}

/// Coherent state at (mu, nu): the displaced vacuum.
pub fn coherent_state(dims: LatticeDims, mu: i64, nu: i64) -> Result<StateVector> {
    let vac = vacuum_state(dims)?;
    Ok(StateVector {
        dims,
        amplitudes: displace_amplitudes(dims, mu, nu, &vac.amplitudes)?,
    })
}

/// Displaced squeezed vacuum: the width-s vacuum moved to (mu, nu).
pub fn displaced_squeezed_vacuum(
    dims: LatticeDims,
    mu: i64,
    nu: i64,
    s: SqueezeParam,
) -> Result<StateVector> {
    let vac = squeezed_vacuum(dims, s)?;
    Ok(StateVector {
        dims,
        amplitudes: displace_amplitudes(dims, mu, nu, &vac.amplitudes)?,
    })
}

/// Squeezing generator X(s) = sum_n |n; s><n| as a matrix over the position
/// basis. Not exactly unitary on the finite lattice; see
/// squeezing_generator_defect.
pub fn squeezing_generator(dims: LatticeDims, s: SqueezeParam) -> Result<Array2<Complex64>> {
    let n = dims.n();
    let squeezed: Vec<CoefficientTable> = (0..n)
        .map(|lvl| fock_coefficients(dims, lvl, s))
        .collect::<Result<_>>()?;
    let plain: Vec<CoefficientTable> = (0..n)
        .map(|lvl| fock_coefficients(dims, lvl, SqueezeParam::unit()))
        .collect::<Result<_>>()?;
    let mut m = Array2::<Complex64>::zeros((n, n));
    for row in 0..n {
        for col in 0..n {
            let mut acc = 0.0;
            for lvl in 0..n {
                acc += squeezed[lvl].values[row] * plain[lvl].values[col];
            }
            m[[row, col]] = Complex64::new(acc, 0.0);
        }
    }
    Ok(m)
}

/// Operator norm of X(s)^dag X(s) - 1, quantifying how far the squeezing
/// generator is from unitary at this dimension.
pub fn squeezing_generator_defect(dims: LatticeDims, s: SqueezeParam) -> Result<f64> {
    let x = squeezing_generator(dims, s)?;
    let mut g = x.t().mapv(|z| z.conj()).dot(&x);
    for i in 0..dims.n() {
        g[[i, i]] -= Complex64::new(1.0, 0.0);
    }
    crate::linalg::operator_norm(&g)
}

/// X(s) applied to the coherent state at (mu, nu), renormalised. Returns
/// the state and the norm the generator produced before renormalisation
/// (1 would mean norm-preserving).
pub fn squeezed_coherent_state(
    dims: LatticeDims,
    mu: i64,
    nu: i64,
    s: SqueezeParam,
) -> Result<(StateVector, f64)> {
    let x = squeezing_generator(dims, s)?;
    let base = coherent_state(dims, mu, nu)?;
    let n = dims.n();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
    for (row, amp) in amplitudes.iter_mut().enumerate() {
        for col in 0..n {
            *amp += x[[row, col]] * base.amplitudes[col];
        }
    }
    let unnorm = StateVector { dims, amplitudes };
    let norm = unnorm.norm();
    Ok((unnorm.normalized()?, norm))
}

/// Matrix element sum Gamma_mn(alpha, beta; s): the phase-weighted lattice
/// correlation of two coefficient tables. Equals sqrt(N) times the matrix
/// element of S(alpha, beta) between the level-m and level-n width-s
/// states.
pub fn gamma_element(
    dims: LatticeDims,
    m: usize,
    n: usize,
    alpha: i64,
    beta: i64,
    s: SqueezeParam,
) -> Result<Complex64> {
    dims.idx_checked("alpha", alpha)?;
    dims.idx_checked("beta", beta)?;
    let bra = fock_coefficients(dims, m, s)?;
    let ket = fock_coefficients(dims, n, s)?;
    gamma_from_tables(&bra, &ket, alpha, beta)
}

/// gamma_element for prebuilt tables (the two tables must share dims/width).
pub fn gamma_from_tables(
    bra: &CoefficientTable,
    ket: &CoefficientTable,
    alpha: i64,
    beta: i64,
) -> Result<Complex64> {
    if bra.dims != ket.dims || bra.s != ket.s {
        return Err(Error::InvalidState {
            detail: "matrix element tables must share lattice and width".to_string(),
        });
    }
    let dims = bra.dims;
    let nf = dims.n_f64();
    let mut acc = Complex64::new(0.0, 0.0);
    for kappa in dims.range() {
        acc += Complex64::from_polar(1.0, 2.0 * PI * (kappa * alpha) as f64 / nf)
            * bra.value(kappa - beta)
            * ket.value(kappa);
    }
    Ok(acc * Complex64::from_polar(1.0, -PI * (alpha * beta) as f64 / nf))
}

/// Coefficient of the width-s squeezed coherent projector at (mu, nu) on
/// the displacement S(eta, xi), computed by resolving the squeezing
/// generator over the level basis: a double level sum of three matrix
/// element factors divided by sqrt(N). Exact for the unnormalised state.
pub fn squeezed_coherent_coefficient_via_levels(
    dims: LatticeDims,
    mu: i64,
    nu: i64,
    eta: i64,
    xi: i64,
    s: SqueezeParam,
) -> Result<Complex64> {
    let n = dims.n();
    let plain: Vec<CoefficientTable> = (0..n)
        .map(|lvl| fock_coefficients(dims, lvl, SqueezeParam::unit()))
        .collect::<Result<_>>()?;
    let squeezed: Vec<CoefficientTable> = (0..n)
        .map(|lvl| fock_coefficients(dims, lvl, s))
        .collect::<Result<_>>()?;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..n {
        let left = gamma_from_tables(&plain[0], &plain[m], -nu, mu)?;
        for k in 0..n {
            let mid = gamma_from_tables(&squeezed[m], &squeezed[k], -eta, -xi)?;
            let right = gamma_from_tables(&plain[k], &plain[0], nu, -mu)?;
            acc += left * mid * right;
        }
    }
    Ok(acc / dims.n_f64().sqrt())
}

/// Expansion of |mu,nu><mu',nu'| over displacements: the phase-adjusted
/// kernel sum, using the quasi-periodically extended kernel lookup.
pub fn nondiagonal_projector(
    dims: LatticeDims,
    mu: i64,
    nu: i64,
    mu2: i64,
    nu2: i64,
) -> Result<Array2<Complex64>> {
    for (name, v) in [("mu", mu), ("nu", nu), ("mu'", mu2), ("nu'", nu2)] {
        dims.idx_checked(name, v)?;
    }
    let table = crate::kernels::kernel_table(dims, crate::kernels::KernelKind::Vacuum)?;
    let nf = dims.n_f64();
    let n = dims.n();
    let mut acc = Array2::<Complex64>::zeros((n, n));
    for eta in dims.range() {
        for xi in dims.range() {
            let phase = Complex64::from_polar(
                1.0,
                -PI * ((eta * (mu + mu2) + xi * (nu + nu2) + mu * nu2 - mu2 * nu) as f64) / nf,
            );
            let k = table.value_extended(eta - nu + nu2, xi + mu - mu2);
            let s = crate::operators::displacement(dims, eta, xi)?;
            let w = phase * k;
            acc += &s.mapv(|z| z * w);
        }
    }
    Ok(acc.mapv(|z| z / nf.sqrt()))
}

/// Declarative state description, also the JSON schema used by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Fock {
        n: usize,
    },
    Coherent {
        mu: i64,
        nu: i64,
    },
    SqueezedVacuum {
        s: f64,
    },
    DisplacedSqueezedVacuum {
        mu: i64,
        nu: i64,
        s: f64,
    },
    SqueezedCoherent {
        mu: i64,
        nu: i64,
        s: f64,
    },
    Mixture {
        terms: Vec<MixtureTerm>,
    },
    DensityFile {
        path: String,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureTerm {
    pub weight: f64,
    pub state: Box<StateSpec>,
}

impl StateSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build_density(&self, dims: LatticeDims) -> Result<DensityMatrix> {
        match self {
            StateSpec::Fock { n } => number_state(dims, *n, SqueezeParam::unit())?.density(),
            StateSpec::Coherent { mu, nu } => coherent_state(dims, *mu, *nu)?.density(),
            StateSpec::SqueezedVacuum { s } => {
                squeezed_vacuum(dims, SqueezeParam::new(*s)?)?.density()
            }
            StateSpec::DisplacedSqueezedVacuum { mu, nu, s } => {
                displaced_squeezed_vacuum(dims, *mu, *nu, SqueezeParam::new(*s)?)?.density()
            }
            StateSpec::SqueezedCoherent { mu, nu, s } => {
                squeezed_coherent_state(dims, *mu, *nu, SqueezeParam::new(*s)?)?
                    .0
                    .density()
            }
            StateSpec::Mixture { terms } => {
                let parts: Vec<(f64, DensityMatrix)> = terms
                    .iter()
                    .map(|t| Ok((t.weight, t.state.build_density(dims)?)))
                    .collect::<Result<_>>()?;
                DensityMatrix::mixture(&parts)
            }
            StateSpec::DensityFile { path } => load_density_file(dims, Path::new(path)),
        }
    }
}

/// Load a density matrix stored as a row-major JSON list of N^2 [re, im]
/// pairs, then validate it as a physical state.
pub fn load_density_file(dims: LatticeDims, path: &Path) -> Result<DensityMatrix> {
    let body = std::fs::read_to_string(path)?;
    let flat: Vec<[f64; 2]> = serde_json::from_str(&body)?;
    let n = dims.n();
    if flat.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: flat.len(),
        });
    }
    let mut m = Array2::<Complex64>::zeros((n, n));
    for (pos, pair) in flat.iter().enumerate() {
        m[[pos / n, pos % n]] = Complex64::new(pair[0], pair[1]);
    }
    DensityMatrix::from_matrix(dims, m)
}
