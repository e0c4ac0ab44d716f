pub mod hermite;
pub mod jet;
pub mod theta;

pub use hermite::hermite;
pub use jet::{factorial, Jet, MAX_JET_ORDER};
pub use theta::{theta, theta_arg_jet, theta_jet, ThetaKind};

/// Default absolute tail target for truncated lattice sums.
pub const DEFAULT_TAIL_EPS: f64 = 1e-16;

/// Smallest summation radius B >= 1 such that the tail of a Gaussian lattice
/// sum with term bound exp(-decay * m^2) * poly(m), deg poly <= poly_degree,
/// is below eps_tail. The bound used is
///   exp(-decay * B^2) * (1 + B)^poly_degree * C
/// with C = e * poly_degree! * 2^poly_degree * max(1, sqrt(2*decay))^poly_degree,
/// which majorises the comparison of the discrete tail with the Gaussian
/// integral it straddles.
pub fn lattice_cutoff(decay: f64, poly_degree: usize, eps_tail: f64) -> usize {
    assert!(decay > 0.0, "decay rate must be positive");
    assert!(eps_tail > 0.0, "tail target must be positive");
    let c = std::f64::consts::E
        * factorial(poly_degree)
        * 2f64.powi(poly_degree as i32)
        * (1f64.max((2.0 * decay).sqrt())).powi(poly_degree as i32);
    let mut b = 1usize;
    loop {
        let bound = (-decay * (b * b) as f64).exp() * (1.0 + b as f64).powi(poly_degree as i32) * c;
        if bound < eps_tail {
            return b;
        }
        b += 1;
        assert!(b < 1_000_000, "tail target unreachable for decay {decay}");
    }
}
