use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::jet::Jet;
use crate::numerics::{lattice_cutoff, DEFAULT_TAIL_EPS};

/// Which Jacobi theta function: the index runs over integers (Three),
/// integers with alternating sign (Four), or half-integers (Two).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    Two,
    Three,
    Four,
}

/// theta_kind(z | i t) for real z and purely imaginary modular parameter,
/// t > 0, summed in the manifestly real cosine form. Truncation error is
/// below DEFAULT_TAIL_EPS in absolute terms.
pub fn theta(kind: ThetaKind, z: f64, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::NonPositiveNome { value: t });
    }
    let cutoff = lattice_cutoff(PI * t, 0, DEFAULT_TAIL_EPS);
    Ok(match kind {
        ThetaKind::Three => {
            let mut acc = 1.0;
            for m in 1..=cutoff {
                let m = m as f64;
                acc += 2.0 * (-PI * t * m * m).exp() * (2.0 * PI * m * z).cos();
            }
            acc
        }
        ThetaKind::Four => {
            let mut acc = 1.0;
            for m in 1..=cutoff {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let m = m as f64;
                acc += 2.0 * sign * (-PI * t * m * m).exp() * (2.0 * PI * m * z).cos();
            }
            acc
        }
        ThetaKind::Two => {
            let mut acc = 0.0;
            for j in 0..=cutoff {
                let m = j as f64 + 0.5;
                acc += 2.0 * (-PI * t * m * m).exp() * ((2.0 * j as f64 + 1.0) * PI * z).cos();
            }
            acc
        }
    })
}

fn half_integer_indices(kind: ThetaKind, cutoff: usize) -> Vec<f64> {
    match kind {
        ThetaKind::Two => (0..=cutoff)
            .flat_map(|j| {
                let m = j as f64 + 0.5;
                [m, -m]
            })
            .collect(),
        _ => {
            let mut v = vec![0.0];
            for m in 1..=cutoff {
                v.push(m as f64);
                v.push(-(m as f64));
            }
            v
        }
    }
}

fn kind_sign(kind: ThetaKind, m: f64) -> f64 {
    match kind {
        ThetaKind::Four => {
            if (m.round() as i64).rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            }
        }
        _ => 1.0,
    }
}

/// theta_kind(z | tau(w)) as a jet in w, for real z and a modular-parameter
/// jet whose value at w = 0 has positive imaginary part. Term by term this is
/// exp(i pi m^2 tau(w)) * exp(2 pi i m z).
pub fn theta_jet(kind: ThetaKind, z: f64, tau: &Jet) -> Result<Jet> {
    let t0 = tau.coeff(0).im;
    if t0 <= 0.0 {
        return Err(Error::NonPositiveNome { value: t0 });
    }
    // Derivatives of order n pull down up to n factors of m^2.
    let cutoff = lattice_cutoff(PI * t0, 2 * tau.order(), DEFAULT_TAIL_EPS);
    let mut acc = Jet::constant(Complex64::new(0.0, 0.0), tau.order())?;
    for m in half_integer_indices(kind, cutoff) {
        let phase = Complex64::new(0.0, 2.0 * PI * m * z).exp() * kind_sign(kind, m);
        let term = tau.scale(Complex64::new(0.0, PI * m * m)).exp().scale(phase);
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// theta_kind(z(w) | i t) as a jet in w, for fixed t > 0 and a complex
/// argument jet. Term by term this is exp(-pi t m^2) * exp(2 pi i m z(w)).
pub fn theta_arg_jet(kind: ThetaKind, z: &Jet, t: f64) -> Result<Jet> {
    if t <= 0.0 {
        return Err(Error::NonPositiveNome { value: t });
    }
    let cutoff = lattice_cutoff(PI * t, z.order(), DEFAULT_TAIL_EPS);
    let mut acc = Jet::constant(Complex64::new(0.0, 0.0), z.order())?;
    for m in half_integer_indices(kind, cutoff) {
        let weight = (-PI * t * m * m).exp() * kind_sign(kind, m);
        let term = z
            .scale(Complex64::new(0.0, 2.0 * PI * m))
            .exp()
            .scale(Complex64::new(weight, 0.0));
        acc = acc.add(&term);
    }
    Ok(acc)
}
