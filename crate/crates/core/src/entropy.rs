use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::SqueezeParam;
use crate::lattice::LatticeDims;
use crate::operators::DensityMatrix;
use crate::phase_space::{husimi_grid, marginals, NEGATIVITY_FLOOR};
use crate::states::vacuum_state;

/// All entropy functionals of one state at one basis width, plus the
/// scan-derived reference minimum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyReport {
    pub s: f64,
    pub e_joint: f64,
    pub e_q: f64,
    pub e_r: f64,
    pub e_cond_q: f64,
    pub e_cond_r: f64,
    pub correlation: f64,
    pub min_e_joint: f64,
    pub s_at_min: f64,
    pub multimodal_scan: bool,
}

/// One row of a width scan, CSV-ready.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanPoint {
    pub s: f64,
    pub e_joint: f64,
    pub e_q: f64,
    pub e_r: f64,
    pub e_cond_q: f64,
    pub e_cond_r: f64,
    pub correlation: f64,
}

/// Reference minimum used by the correlation functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MinReference {
    /// Scan the given state over widths (default).
    StateScan,
    /// Caller-supplied constant.
    Constant(f64),
    /// Scan the vacuum at the same dimension.
    VacuumScan,
}

/// Log-spaced width grid for scans and minimizer brackets.
#[derive(Clone, Copy, Debug)]
pub struct ScanSettings {
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings {
            s_min: 0.125,
            s_max: 8.0,
            points: 33,
        }
    }
}

impl ScanSettings {
    fn validate(&self) -> Result<()> {
        if !(self.s_min > 0.0 && self.s_max > self.s_min) {
            return Err(Error::InvalidState {
                detail: format!("scan bounds {}..{} invalid", self.s_min, self.s_max),
            });
        }
        if self.points < 3 {
            return Err(Error::InvalidState {
                detail: format!("scan needs at least 3 points, got {}", self.points),
            });
        }
        Ok(())
    }

    pub fn widths(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let (lo, hi) = (self.s_min.ln(), self.s_max.ln());
        Ok((0..self.points)
            .map(|i| (lo + (hi - lo) * i as f64 / (self.points - 1) as f64).exp())
            .collect())
    }
}

/// Scan minimum with its location and a unimodality flag.
#[derive(Clone, Copy, Debug)]
pub struct MinScan {
    pub min_e: f64,
    pub s_at_min: f64,
    pub multimodal: bool,
}

fn check_weight(value: f64, what: &str) -> Result<f64> {
    if value < -NEGATIVITY_FLOOR {
        return Err(Error::InvalidDistribution {
            detail: format!("{what} entry {value} is negative"),
        });
    }
    Ok(value.max(0.0))
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Joint entropy -(1/N) sum H ln H over the grid, with 0 ln 0 := 0.
pub fn joint_entropy(dims: LatticeDims, h: &Array2<f64>) -> Result<f64> {
    if h.nrows() != dims.n() || h.ncols() != dims.n() {
        return Err(Error::DimensionMismatch {
            expected: dims.n(),
            got: h.nrows().max(h.ncols()),
        });
    }
    let mut total = 0.0;
    let mut acc = 0.0;
    for v in h.iter() {
        let p = check_weight(*v, "joint grid")?;
        total += p;
        acc += plogp(p);
    }
    if (total / dims.n_f64() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidDistribution {
            detail: format!("joint grid sum / N = {}, expected 1", total / dims.n_f64()),
        });
    }
    Ok(-acc / dims.n_f64())
}

/// Marginal entropy -(1/sqrt(N)) sum q ln q.
pub fn marginal_entropy(dims: LatticeDims, q: &[f64]) -> Result<f64> {
    if q.len() != dims.n() {
        return Err(Error::DimensionMismatch {
            expected: dims.n(),
            got: q.len(),
        });
    }
    let root = dims.n_f64().sqrt();
    let mut total = 0.0;
    let mut acc = 0.0;
    for v in q {
        let p = check_weight(*v, "marginal")?;
        total += p;
        acc += plogp(p);
    }
    if (total / root - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidDistribution {
            detail: format!("marginal sum / sqrt(N) = {}, expected 1", total / root),
        });
    }
    Ok(-acc / root)
}

/// Conditional entropy from its double-sum definition,
/// -(1/N) sum H ln(H / marginal); `position_axis` picks which marginal
/// conditions the grid. Equals joint minus marginal entropy.
pub fn conditional_entropy(
    dims: LatticeDims,
    h: &Array2<f64>,
    marginal: &[f64],
    position_axis: bool,
) -> Result<f64> {
    if marginal.len() != dims.n() {
        return Err(Error::DimensionMismatch {
            expected: dims.n(),
            got: marginal.len(),
        });
    }
    let mut acc = 0.0;
    for mu in dims.range() {
        for nu in dims.range() {
            let p = check_weight(h[[dims.idx(mu), dims.idx(nu)]], "joint grid")?;
            if p == 0.0 {
                continue;
            }
            let m = marginal[dims.idx(if position_axis { mu } else { nu })];
            if m <= 0.0 {
                return Err(Error::InvalidDistribution {
                    detail: format!("marginal vanishes under nonzero joint weight at {mu},{nu}"),
                });
            }
            acc += p * (p / m).ln();
        }
    }
    Ok(-acc / dims.n_f64())
}

/// Correlation functional (E_Q + E_R - E_joint) / (E_Q + E_R - min_E).
/// A degenerate denominator (factorized at the reference) gives 0.
pub fn correlation(e_q: f64, e_r: f64, e_joint: f64, min_e: f64) -> Result<f64> {
    if min_e > e_joint + 1e-12 {
        return Err(Error::InconsistentReference {
            detail: format!("reference minimum {min_e} exceeds joint entropy {e_joint}"),
        });
    }
    let denom = e_q + e_r - min_e;
    if denom <= -1e-9 {
        return Err(Error::InconsistentReference {
            detail: format!("correlation denominator {denom} is negative"),
        });
    }
    if denom < 1e-9 {
        return Ok(0.0);
    }
    Ok((e_q + e_r - e_joint) / denom)
}

/// Joint and marginal entropies of one state at one width.
pub fn entropy_at(
    dims: LatticeDims,
    rho: &DensityMatrix,
    s: SqueezeParam,
) -> Result<(f64, f64, f64)> {
    let h = husimi_grid(dims, rho, s)?;
    let (q, r) = marginals(dims, rho, s)?;
    Ok((
        joint_entropy(dims, &h)?,
        marginal_entropy(dims, &q)?,
        marginal_entropy(dims, &r)?,
    ))
}

/// Grid scan of the joint entropy followed by golden-section refinement of
/// the bracket around the best grid point, to width below 1e-6 in s.
pub fn min_entropy_scan(
    dims: LatticeDims,
    rho: &DensityMatrix,
    settings: &ScanSettings,
) -> Result<MinScan> {
    let widths = settings.widths()?;
    let mut energies = Vec::with_capacity(widths.len());
    for s in &widths {
        let h = husimi_grid(dims, rho, SqueezeParam::new(*s)?)?;
        energies.push(joint_entropy(dims, &h)?);
    }
    let mut best = 0;
    for (i, e) in energies.iter().enumerate() {
        if *e < energies[best] {
            best = i;
        }
    }
    // Plateaus at extreme widths sit at one-ulp noise; only dips clearing
    // this margin count as distinct local minima.
    let sig = 1e-9;
    let mut minima = 0;
    for i in 1..energies.len() - 1 {
        if energies[i] + sig < energies[i - 1] && energies[i] + sig < energies[i + 1] {
            minima += 1;
        }
    }
    if energies[0] + sig < energies[1] {
        minima += 1;
    }
    if energies[energies.len() - 1] + sig < energies[energies.len() - 2] {
        minima += 1;
    }
    let multimodal = minima > 1;

    let lo = if best == 0 { best } else { best - 1 };
    let hi = (best + 1).min(widths.len() - 1);
    let mut a = widths[lo].ln();
    let mut b = widths[hi].ln();
    let mut best_s = widths[best];
    let mut best_e = energies[best];
    let eval = |ls: f64, best_s: &mut f64, best_e: &mut f64| -> Result<f64> {
        let s = ls.exp();
        let h = husimi_grid(dims, rho, SqueezeParam::new(s)?)?;
        let e = joint_entropy(dims, &h)?;
        if e < *best_e {
            *best_e = e;
            *best_s = s;
        }
        Ok(e)
    };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eval(c, &mut best_s, &mut best_e)?;
    let mut fd = eval(d, &mut best_s, &mut best_e)?;
    while b.exp() - a.exp() > 1e-6 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c, &mut best_s, &mut best_e)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d, &mut best_s, &mut best_e)?;
        }
    }
    Ok(MinScan {
        min_e: best_e,
        s_at_min: best_s,
        multimodal,
    })
}

fn resolve_reference(
    dims: LatticeDims,
    rho: &DensityMatrix,
    reference: MinReference,
    settings: &ScanSettings,
) -> Result<MinScan> {
    match reference {
        MinReference::StateScan => min_entropy_scan(dims, rho, settings),
        MinReference::Constant(v) => Ok(MinScan {
            min_e: v,
            s_at_min: f64::NAN,
            multimodal: false,
        }),
        MinReference::VacuumScan => {
            let vac = vacuum_state(dims)?.density()?;
            min_entropy_scan(dims, &vac, settings)
        }
    }
}

/// Full functional set of one state at one width, with the reference
/// minimum resolved per the chosen mode.
pub fn entropy_report(
    dims: LatticeDims,
    rho: &DensityMatrix,
    s: SqueezeParam,
    reference: MinReference,
    settings: &ScanSettings,
) -> Result<EntropyReport> {
    let (e_joint, e_q, e_r) = entropy_at(dims, rho, s)?;
    let scan = resolve_reference(dims, rho, reference, settings)?;
    Ok(EntropyReport {
        s: s.value(),
        e_joint,
        e_q,
        e_r,
        e_cond_q: e_joint - e_q,
        e_cond_r: e_joint - e_r,
        correlation: correlation(e_q, e_r, e_joint, scan.min_e)?,
        min_e_joint: scan.min_e,
        s_at_min: scan.s_at_min,
        multimodal_scan: scan.multimodal,
    })
}

/// Scan rows over the width grid, each with the correlation computed
/// against the resolved reference minimum.
pub fn scan_report(
    dims: LatticeDims,
    rho: &DensityMatrix,
    reference: MinReference,
    settings: &ScanSettings,
) -> Result<Vec<ScanPoint>> {
    let scan = resolve_reference(dims, rho, reference, settings)?;
    let mut rows = Vec::new();
    for s in settings.widths()? {
        let (e_joint, e_q, e_r) = entropy_at(dims, rho, SqueezeParam::new(s)?)?;
        rows.push(ScanPoint {
            s,
            e_joint,
            e_q,
            e_r,
            e_cond_q: e_joint - e_q,
            e_cond_r: e_joint - e_r,
            correlation: correlation(e_q, e_r, e_joint, scan.min_e)?,
        });
    }
    Ok(rows)
}
