//! Closed-form array-factor sums.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Below this half-angle the sin-ratio is replaced by its series expansion.
pub const SERIES_THRESHOLD: f64 = 1e-9;

/// `Σ_{m=-(M-1)/2}^{(M-1)/2} e^{jma} = sin(Ma/2)/sin(a/2)`.
///
/// The removable singularities at `a/2 = nπ` are evaluated by their series
/// expansion `±M·(1 - (M²-1)r²/6)` with `r` the distance to the pole.
pub fn dirichlet(count: usize, a: f64) -> f64 {
    let m = count as f64;
    let half = 0.5 * a;
    let n = (half / PI).round();
    let r = half - n * PI;
    if r.abs() < SERIES_THRESHOLD {
        let sign = if (n as i64 * (count as i64 - 1)) % 2 == 0 { 1.0 } else { -1.0 };
        return sign * m * (1.0 - (m * m - 1.0) * r * r / 6.0);
    }
    (m * half).sin() / half.sin()
}

/// `Σ_{m=start}^{start+count-1} e^{jma}` for any real `start`.
pub fn geometric_sum(start: f64, count: usize, a: f64) -> Complex64 {
    let mid = start + 0.5 * (count as f64 - 1.0);
    Complex64::from_polar(dirichlet(count, a), mid * a)
}

/// Unnormalised sinc, `sin(x)/x`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(start: f64, count: usize, a: f64) -> Complex64 {
        (0..count)
            .map(|k| Complex64::from_polar(1.0, (start + k as f64) * a))
            .sum()
    }

    #[test]
    fn limits() {
        assert_eq!(dirichlet(257, 0.0), 257.0);
        assert_eq!(dirichlet(1, 0.7), 1.0);
        assert!((dirichlet(33, 2.0 * PI) - 33.0).abs() < 1e-9);
        assert!((dirichlet(4, 2.0 * PI) + 4.0).abs() < 1e-9);
        assert!((dirichlet(33, 1e-12) - 33.0).abs() < 1e-12);
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(PI)).abs() < 1e-16);
    }

    #[test]
    fn continuous_across_series_switch() {
        for count in [3usize, 33, 257] {
            let below = dirichlet(count, 2.0 * 0.99 * SERIES_THRESHOLD);
            let above = dirichlet(count, 2.0 * 1.01 * SERIES_THRESHOLD);
            assert!((below - above).abs() / count as f64 <= 1e-9);
        }
    }

    #[test]
    fn offset_sums_match_direct() {
        for &(start, count, a) in &[(-3.0, 7usize, 0.3), (5.0, 10, -1.1), (-2.5, 6, 2.0), (0.0, 1, 0.9)] {
            let d = direct(start, count, a);
            let g = geometric_sum(start, count, a);
            assert!((d - g).norm() < 1e-12, "{start} {count} {a}");
        }
    }
}
