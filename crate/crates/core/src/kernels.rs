use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::lattice::LatticeDims;
use crate::numerics::{theta, theta_jet, Jet, ThetaKind};

/// Magnitude floor below which dividing by a kernel value is refused.
pub const KERNEL_FLOOR: f64 = 1e-12;

/// Width multiplier s > 0 of a squeezed Gaussian profile; s = 1 is the
/// round vacuum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SqueezeParam(f64);

impl SqueezeParam {
    pub fn new(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::NonPositive {
                name: "squeeze",
                value: s,
            });
        }
        Ok(SqueezeParam(s))
    }

    pub fn unit() -> Self {
        SqueezeParam(1.0)
    }

    pub fn from_squared(s2: f64) -> Result<Self> {
        if !(s2.is_finite() && s2 > 0.0) {
            return Err(Error::NonPositive {
                name: "squeeze squared",
                value: s2,
            });
        }
        SqueezeParam::new(s2.sqrt())
    }

    pub fn from_inverse_squared(inv_s2: f64) -> Result<Self> {
        if !(inv_s2.is_finite() && inv_s2 > 0.0) {
            return Err(Error::NonPositive {
                name: "inverse squeeze squared",
                value: inv_s2,
            });
        }
        SqueezeParam::new(1.0 / inv_s2.sqrt())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn squared(self) -> f64 {
        self.0 * self.0
    }

    pub fn inverse(self) -> SqueezeParam {
        SqueezeParam(1.0 / self.0)
    }
}

impl Eq for SqueezeParam {}

impl std::hash::Hash for SqueezeParam {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl TryFrom<f64> for SqueezeParam {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        SqueezeParam::new(s)
    }
}

impl From<SqueezeParam> for f64 {
    fn from(s: SqueezeParam) -> f64 {
        s.0
    }
}

/// Which self-overlap kernel a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    Vacuum,
    Squeezed { s: SqueezeParam },
    Number { level: usize },
    Ratio { s: SqueezeParam },
}

fn parity_sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn cc(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Unnormalised squeezed self-overlap value: the four-term theta product
/// whose ratio to its origin value is the kernel. Real for integer
/// arguments; the eta series carries width a s^2, the xi series a / s^2.
pub fn m_squeezed(dims: LatticeDims, eta: i64, xi: i64, s: SqueezeParam) -> Result<f64> {
    let a = dims.a();
    let (t_eta, t_xi) = (a * s.squared(), a / s.squared());
    let (z_eta, z_xi) = (a * eta as f64, a * xi as f64);
    let t3e = theta(ThetaKind::Three, z_eta, t_eta)?;
    let t4e = theta(ThetaKind::Four, z_eta, t_eta)?;
    let t3x = theta(ThetaKind::Three, z_xi, t_xi)?;
    let t4x = theta(ThetaKind::Four, z_xi, t_xi)?;
    let (se, sx) = (parity_sign(eta), parity_sign(xi));
    // The last phase is exp(i pi (eta + xi + N)) with odd N.
    let sum = t3e * t3x + t3e * t4x * se + t4e * t3x * sx - t4e * t4x * se * sx;
    Ok(0.5 * (a * s.squared()).sqrt() * sum)
}

/// Origin value of m_squeezed through the quarter-period descent identity,
/// reducing the four-term sum to two products.
pub fn m_squeezed_origin(dims: LatticeDims, s: SqueezeParam) -> Result<f64> {
    let a = dims.a();
    let up = 4.0 * a / s.squared();
    let down = a * s.squared();
    let v = theta(ThetaKind::Three, 0.0, up)? * theta(ThetaKind::Three, 0.0, down)?
        + theta(ThetaKind::Two, 0.0, up)? * theta(ThetaKind::Four, 0.0, down)?;
    Ok((a * s.squared()).sqrt() * v)
}

/// Moebius-type modular parameter i a (1 - 2w) / (1 + 2w) as a jet in w.
fn moebius_nome(dims: LatticeDims, order: usize) -> Result<Jet> {
    let a = dims.a();
    let mut num = vec![Complex64::new(0.0, 0.0); order + 1];
    num[0] = Complex64::new(0.0, a);
    if order >= 1 {
        num[1] = Complex64::new(0.0, -2.0 * a);
    }
    let mut den = vec![Complex64::new(0.0, 0.0); order + 1];
    den[0] = Complex64::new(1.0, 0.0);
    if order >= 1 {
        den[1] = Complex64::new(2.0, 0.0);
    }
    Ok(Jet::from_coeffs(num)?.mul(&Jet::from_coeffs(den)?.reciprocal()?))
}

fn one_plus_two_w_recip(order: usize) -> Result<Jet> {
    let mut den = vec![Complex64::new(0.0, 0.0); order + 1];
    den[0] = Complex64::new(1.0, 0.0);
    if order >= 1 {
        den[1] = Complex64::new(2.0, 0.0);
    }
    Jet::from_coeffs(den)?.reciprocal()
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

/// Unnormalised level-n self-overlap value, obtained as the n-th derivative
/// at w = 0 of the generating product (1 + 2w)^(-1) * (four-term theta sum
/// with Moebius nome).
pub fn m_number(dims: LatticeDims, eta: i64, xi: i64, level: usize) -> Result<f64> {
    check_level(dims, level)?;
    let a = dims.a();
    let f = moebius_nome(dims, level)?;
    let (z_eta, z_xi) = (a * eta as f64, a * xi as f64);
    let t3e = theta_jet(ThetaKind::Three, z_eta, &f)?;
    let t4e = theta_jet(ThetaKind::Four, z_eta, &f)?;
    let t3x = theta_jet(ThetaKind::Three, z_xi, &f)?;
    let t4x = theta_jet(ThetaKind::Four, z_xi, &f)?;
    let (se, sx) = (parity_sign(eta), parity_sign(xi));
    let m = t3e
        .mul(&t3x)
        .add(&t3e.mul(&t4x).scale(cc(se)))
        .add(&t4e.mul(&t3x).scale(cc(sx)))
        .add(&t4e.mul(&t4x).scale(cc(-se * sx)))
        .scale(cc(0.5));
    let d = m.mul(&one_plus_two_w_recip(level)?).derivative_at_zero(level)?;
    debug_assert!(d.im.abs() < 1e-9 * (1.0 + d.re.abs()));
    Ok(a.sqrt() * d.re)
}

/// Origin value of m_number through the split route: the underlying lattice
/// sum separates by winding-index parity into theta products, and the
/// generating function becomes (1 - 4w^2)^(-1/2) times their sum.
pub fn m_number_origin_split(dims: LatticeDims, level: usize) -> Result<f64> {
    check_level(dims, level)?;
    let f = moebius_nome(dims, level)?;
    let root = f.scale(Complex64::new(0.0, -1.0)).sqrt()?;
    let pair = theta_jet(ThetaKind::Three, 0.0, &f.scale(cc(4.0)))?
        .mul(&theta_jet(ThetaKind::Three, 0.0, &f)?)
        .add(
            &theta_jet(ThetaKind::Two, 0.0, &f.scale(cc(4.0)))?
                .mul(&theta_jet(ThetaKind::Four, 0.0, &f)?),
        );
    // (1 - 4w^2)^(-1/2) has central-binomial even coefficients.
    let mut pre = vec![Complex64::new(0.0, 0.0); level + 1];
    let mut binom = 1.0;
    pre[0] = cc(1.0);
    for k in 1..=level / 2 {
        binom *= 2.0 * (2.0 * k as f64 - 1.0) / k as f64;
        pre[2 * k] = cc(binom);
    }
    let d = Jet::from_coeffs(pre)?
        .mul(&root.mul(&pair))
        .derivative_at_zero(level)?;
    debug_assert!(d.im.abs() < 1e-9 * (1.0 + d.re.abs()));
    Ok(d.re)
}

/// Inverse squared normalisation constant of the width-s level-n profile,
/// as the n-th derivative of the two-product generating function with the
/// Moebius nome rescaled by 4 / s^2 and s^2.
pub fn normalizer_inverse_sq(dims: LatticeDims, level: usize, s: SqueezeParam) -> Result<f64> {
    check_level(dims, level)?;
    let a = dims.a();
    let f = moebius_nome(dims, level)?;
    let up = f.scale(cc(4.0 / s.squared()));
    let down = f.scale(cc(s.squared()));
    let term = theta_jet(ThetaKind::Three, 0.0, &up)?
        .mul(&theta_jet(ThetaKind::Three, 0.0, &down)?)
        .add(
            &theta_jet(ThetaKind::Two, 0.0, &up)?
                .mul(&theta_jet(ThetaKind::Four, 0.0, &down)?),
        );
    let d = term
        .mul(&one_plus_two_w_recip(level)?)
        .derivative_at_zero(level)?;
    debug_assert!(d.im.abs() < 1e-9 * (1.0 + d.re.abs()));
    Ok((a * s.squared()).sqrt() * d.re)
}

pub fn kernel_squeezed(dims: LatticeDims, eta: i64, xi: i64, s: SqueezeParam) -> Result<f64> {
    Ok(m_squeezed(dims, eta, xi, s)? / m_squeezed(dims, 0, 0, s)?)
}

pub fn kernel_vacuum(dims: LatticeDims, eta: i64, xi: i64) -> Result<f64> {
    kernel_squeezed(dims, eta, xi, SqueezeParam::unit())
}

pub fn kernel_number(dims: LatticeDims, eta: i64, xi: i64, level: usize) -> Result<f64> {
    Ok(m_number(dims, eta, xi, level)? / m_number(dims, 0, 0, level)?)
}

pub fn kernel_ratio_with_floor(
    dims: LatticeDims,
    eta: i64,
    xi: i64,
    s: SqueezeParam,
    floor: f64,
) -> Result<f64> {
    let vac = kernel_vacuum(dims, eta, xi)?;
    if vac.abs() < floor {
        return Err(Error::IllConditionedKernel {
            eta,
            xi,
            value: vac.abs(),
            floor,
        });
    }
    Ok(kernel_squeezed(dims, eta, xi, s)? / vac)
}

pub fn kernel_ratio(dims: LatticeDims, eta: i64, xi: i64, s: SqueezeParam) -> Result<f64> {
    kernel_ratio_with_floor(dims, eta, xi, s, KERNEL_FLOOR)
}

/// Grid of kernel values over one displacement window, with the
/// quasi-periodic extension rule for out-of-window lookups.
#[derive(Clone, Debug)]
pub struct KernelTable {
    dims: LatticeDims,
    kind: KernelKind,
    values: Array2<f64>,
}

impl KernelTable {
    pub fn build(dims: LatticeDims, kind: KernelKind) -> Result<Self> {
        let n = dims.n();
        let mut values = Array2::<f64>::zeros((n, n));
        match kind {
            KernelKind::Vacuum | KernelKind::Squeezed { .. } => {
                let s = match kind {
                    KernelKind::Squeezed { s } => s,
                    _ => SqueezeParam::unit(),
                };
                let norm = m_squeezed(dims, 0, 0, s)?;
                for eta in dims.range() {
                    for xi in dims.range() {
                        values[[dims.idx(eta), dims.idx(xi)]] =
                            m_squeezed(dims, eta, xi, s)? / norm;
                    }
                }
            }
            KernelKind::Number { level } => {
                let norm = m_number(dims, 0, 0, level)?;
                for eta in dims.range() {
                    for xi in dims.range() {
                        values[[dims.idx(eta), dims.idx(xi)]] =
                            m_number(dims, eta, xi, level)? / norm;
                    }
                }
            }
            KernelKind::Ratio { s } => {
                let vac = KernelTable::build(dims, KernelKind::Vacuum)?;
                let sq = KernelTable::build(dims, KernelKind::Squeezed { s })?;
                for eta in dims.range() {
                    for xi in dims.range() {
                        let v = vac.value(eta, xi);
                        if v.abs() < KERNEL_FLOOR {
                            return Err(Error::IllConditionedKernel {
                                eta,
                                xi,
                                value: v.abs(),
                                floor: KERNEL_FLOOR,
                            });
                        }
                        values[[dims.idx(eta), dims.idx(xi)]] = sq.value(eta, xi) / v;
                    }
                }
            }
        }
        Ok(KernelTable { dims, kind, values })
    }

    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Window lookup; arguments are wrapped with plain periodicity.
    pub fn value(&self, eta: i64, xi: i64) -> f64 {
        self.values[[self.dims.idx(eta), self.dims.idx(xi)]]
    }

    /// Lookup honouring the kernel's behaviour under full-period shifts:
    /// shifting eta by p N and xi by q N multiplies the value by
    /// (-1)^(p xi + q eta + p q) (ratio tables are plainly periodic).
    pub fn value_extended(&self, eta: i64, xi: i64) -> f64 {
        let n = self.dims.n() as i64;
        let eb = self.dims.wrap(eta);
        let xb = self.dims.wrap(xi);
        let base = self.values[[self.dims.idx(eb), self.dims.idx(xb)]];
        if matches!(self.kind, KernelKind::Ratio { .. }) {
            return base;
        }
        let p = (eta - eb) / n;
        let q = (xi - xb) / n;
        if (p * xb + q * eb + p * q).rem_euclid(2) == 0 {
            base
        } else {
            -base
        }
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Dynamic range max|K| / min|K|; large values mean inverse-kernel
    /// weighting amplifies noise.
    pub fn conditioning(&self) -> f64 {
        self.max_abs() / self.min_abs()
    }

    fn from_raw(dims: LatticeDims, kind: KernelKind, raw: Vec<f64>) -> Result<Self> {
        let n = dims.n();
        if raw.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: raw.len(),
            });
        }
        let values =
            Array2::from_shape_vec((n, n), raw).expect("length checked against shape");
        Ok(KernelTable { dims, kind, values })
    }
}

type CacheMap = HashMap<(LatticeDims, KernelKind), Arc<KernelTable>>;

fn cache() -> &'static Mutex<CacheMap> {
    static CACHE: OnceLock<Mutex<CacheMap>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, process-wide cached kernel table for the given dimensions and
/// kind; builds on first use.
pub fn kernel_table(dims: LatticeDims, kind: KernelKind) -> Result<Arc<KernelTable>> {
    if let Some(t) = cache().lock().expect("kernel cache poisoned").get(&(dims, kind)) {
        return Ok(t.clone());
    }
    let table = Arc::new(KernelTable::build(dims, kind)?);
    cache()
        .lock()
        .expect("kernel cache poisoned")
        .insert((dims, kind), table.clone());
    Ok(table)
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    n: u64,
    kind: KernelKind,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    entries: Vec<CacheEntry>,
}

/// Snapshot the in-process kernel cache to a JSON file (atomically, via a
/// sibling temp file). Entries are sorted so identical caches serialise to
/// identical bytes.
pub fn save_kernel_cache(path: &Path) -> Result<usize> {
    let mut entries: Vec<CacheEntry> = cache()
        .lock()
        .expect("kernel cache poisoned")
        .iter()
        .map(|((dims, kind), table)| CacheEntry {
            n: dims.n() as u64,
            kind: *kind,
            values: table.values.iter().copied().collect(),
        })
        .collect();
    entries.sort_by_key(|e| {
        (
            e.n,
            serde_json::to_string(&e.kind).expect("kernel kind serialises"),
        )
    });
    let count = entries.len();
    let body = serde_json::to_string(&CacheFile { entries })?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, body)?;
    std::fs::rename(&tmp, path)?;
    Ok(count)
}

/// Load previously saved kernel tables into the in-process cache. Returns
/// the number of entries inserted.
pub fn load_kernel_cache(path: &Path) -> Result<usize> {
    let body = std::fs::read_to_string(path)?;
    let file: CacheFile = serde_json::from_str(&body)?;
    let mut count = 0;
    for entry in file.entries {
        let dims = LatticeDims::new(entry.n)?;
        let table = Arc::new(KernelTable::from_raw(dims, entry.kind, entry.values)?);
        cache()
            .lock()
            .expect("kernel cache poisoned")
            .insert((dims, entry.kind), table);
        count += 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dims(n: u64) -> LatticeDims {
        LatticeDims::new(n).unwrap()
    }

    fn sq(s: f64) -> SqueezeParam {
        SqueezeParam::new(s).unwrap()
    }

    #[test]
    fn vacuum_kernel_is_normalised_and_symmetric() {
        let d = dims(5);
        assert_eq!(kernel_vacuum(d, 0, 0).unwrap(), 1.0);
        for eta in d.range() {
            for xi in d.range() {
                assert_abs_diff_eq!(
                    kernel_vacuum(d, eta, xi).unwrap(),
                    kernel_vacuum(d, xi, eta).unwrap(),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn swap_identity_with_width_inversion() {
        let d = dims(5);
        let s = sq(5f64.sqrt());
        for eta in d.range() {
            for xi in d.range() {
                assert_abs_diff_eq!(
                    m_squeezed(d, xi, eta, s).unwrap(),
                    s.squared() * m_squeezed(d, eta, xi, s.inverse()).unwrap(),
                    epsilon = 1e-13
                );
                assert_abs_diff_eq!(
                    kernel_squeezed(d, eta, xi, s.inverse()).unwrap(),
                    kernel_squeezed(d, xi, eta, s).unwrap(),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn origin_descent_identity() {
        for n in [3, 7] {
            let d = dims(n);
            for &s in &[0.3, 1.0, 5f64.sqrt()] {
                let s = sq(s);
                assert_abs_diff_eq!(
                    m_squeezed_origin(d, s).unwrap(),
                    m_squeezed(d, 0, 0, s).unwrap(),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn level_zero_reduces_to_vacuum() {
        let d = dims(5);
        for eta in d.range() {
            for xi in d.range() {
                assert_abs_diff_eq!(
                    kernel_number(d, eta, xi, 0).unwrap(),
                    kernel_vacuum(d, eta, xi).unwrap(),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn number_kernel_is_symmetric() {
        let d = dims(5);
        for level in 1..=3 {
            for eta in d.range() {
                for xi in d.range() {
                    assert_abs_diff_eq!(
                        kernel_number(d, eta, xi, level).unwrap(),
                        kernel_number(d, xi, eta, level).unwrap(),
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn parity_split_origin_matches_generating_function() {
        for n in [3, 5, 7] {
            let d = dims(n);
            for level in 0..(n as usize).min(6) {
                let split = m_number_origin_split(d, level).unwrap();
                let direct = m_number(d, 0, 0, level).unwrap();
                // Values grow factorially with the level; compare relatively.
                assert_abs_diff_eq!(split, direct, epsilon = 1e-13 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn normalizer_route_consistency() {
        let d = dims(5);
        for &s in &[0.3, 1.0, 5f64.sqrt()] {
            let s = sq(s);
            assert_abs_diff_eq!(
                normalizer_inverse_sq(d, 0, s).unwrap(),
                m_squeezed_origin(d, s).unwrap(),
                epsilon = 1e-13
            );
        }
        for level in 0..=4 {
            assert_abs_diff_eq!(
                normalizer_inverse_sq(d, level, SqueezeParam::unit()).unwrap(),
                m_number(d, 0, 0, level).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn extended_lookup_matches_direct_evaluation() {
        for n in [3u64, 5] {
            let d = dims(n);
            let nn = n as i64;
            for (kind, direct) in [
                (
                    KernelKind::Vacuum,
                    Box::new(move |eta, xi| kernel_vacuum(d, eta, xi).unwrap())
                        as Box<dyn Fn(i64, i64) -> f64>,
                ),
                (
                    KernelKind::Squeezed { s: sq(5f64.sqrt()) },
                    Box::new(move |eta, xi| kernel_squeezed(d, eta, xi, sq(5f64.sqrt())).unwrap()),
                ),
                (
                    KernelKind::Number { level: 1 },
                    Box::new(move |eta, xi| kernel_number(d, eta, xi, 1).unwrap()),
                ),
            ] {
                let table = KernelTable::build(d, kind).unwrap();
                for p in -1..=2i64 {
                    for q in -1..=2i64 {
                        for eta in d.range() {
                            for xi in d.range() {
                                assert_abs_diff_eq!(
                                    table.value_extended(eta + p * nn, xi + q * nn),
                                    direct(eta + p * nn, xi + q * nn),
                                    epsilon = 1e-12
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ratio_table_is_plainly_periodic() {
        let d = dims(5);
        let table = KernelTable::build(d, KernelKind::Ratio { s: sq(2.0) }).unwrap();
        for eta in d.range() {
            for xi in d.range() {
                assert_eq!(
                    table.value_extended(eta + 5, xi - 10),
                    table.value(eta, xi)
                );
            }
        }
    }

    #[test]
    fn ratio_guard_trips_below_floor() {
        let d = dims(3);
        match kernel_ratio_with_floor(d, 1, 1, sq(2.0), 1.0) {
            Err(Error::IllConditionedKernel { eta, xi, floor, .. }) => {
                assert_eq!((eta, xi), (1, 1));
                assert_eq!(floor, 1.0);
            }
            other => panic!("expected conditioning error, got {other:?}"),
        }
        assert!(kernel_ratio(d, 1, 1, sq(2.0)).is_ok());
    }

    #[test]
    fn cached_tables_are_shared() {
        let d = dims(3);
        let a = kernel_table(d, KernelKind::Vacuum).unwrap();
        let b = kernel_table(d, KernelKind::Vacuum).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn cache_file_round_trip() {
        let d = dims(3);
        let _ = kernel_table(d, KernelKind::Squeezed { s: sq(0.7) }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kernels.json");
        let saved = save_kernel_cache(&path).unwrap();
        assert!(saved >= 1);
        let loaded = load_kernel_cache(&path).unwrap();
        assert_eq!(loaded, saved);
        let again = kernel_table(d, KernelKind::Squeezed { s: sq(0.7) }).unwrap();
        assert_abs_diff_eq!(
            again.value(1, -1),
            kernel_squeezed(d, 1, -1, sq(0.7)).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn dynamic_range_grows_with_dimension() {
        let d = dims(17);
        let table = KernelTable::build(d, KernelKind::Vacuum).unwrap();
        assert!(table.min_abs() > 1e-6 && table.min_abs() < 1e-4);
        assert!(table.conditioning() > 1e4 && table.conditioning() < 1e7);
    }

    proptest! {
        #[test]
        fn swap_identity_for_random_widths(
            sval in 0.25f64..4.0,
            eta in -2i64..=2,
            xi in -2i64..=2,
        ) {
            let d = dims(5);
            let s = sq(sval);
            let lhs = m_squeezed(d, xi, eta, s).unwrap();
            let rhs = s.squared() * m_squeezed(d, eta, xi, s.inverse()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
        }
    }
}
