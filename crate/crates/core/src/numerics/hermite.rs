/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n - 2n H_{n-1}.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_orders_match_closed_forms() {
        for &x in &[-1.3, -0.4, 0.0, 0.3, 2.7] {
            assert_abs_diff_eq!(hermite(0, x), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(hermite(1, x), 2.0 * x, epsilon = 1e-14);
            assert_abs_diff_eq!(hermite(2, x), 4.0 * x * x - 2.0, epsilon = 1e-13);
            assert_abs_diff_eq!(
                hermite(5, x),
                32.0 * x.powi(5) - 160.0 * x.powi(3) + 120.0 * x,
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn parity_alternates_with_order() {
        for n in 0..10 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let x = 0.83;
            assert_abs_diff_eq!(
                hermite(n, -x),
                sign * hermite(n, x),
                epsilon = 1e-9 * hermite(n, x).abs().max(1.0)
            );
        }
    }

    #[test]
    fn odd_orders_vanish_at_origin() {
        for n in (1..12).step_by(2) {
            assert_eq!(hermite(n, 0.0), 0.0);
        }
    }
}
