use std::f64::consts::{FRAC_PI_4, PI};

// Switch from the integral representation to the Hankel asymptotic series.
const ASYMPTOTIC_CUTOFF: f64 = 25.0;
// Midpoint nodes on [0, pi]; aliasing error ~ 2 J_96(x), negligible below the cutoff.
const QUADRATURE_NODES: usize = 48;

/// Cylindrical Bessel function J0 for real argument.
///
/// Below |x| = 25 the periodic integral J0(x) = (1/pi) int_0^pi cos(x sin t) dt
/// is evaluated with the midpoint rule, which converges geometrically for this
/// integrand. Above it the Hankel asymptotic expansion is summed up to its
/// smallest term, which is below 1e-20 there.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < ASYMPTOTIC_CUTOFF {
        let h = PI / QUADRATURE_NODES as f64;
        let sum: f64 = (0..QUADRATURE_NODES)
            .map(|j| (x * ((j as f64 + 0.5) * h).sin()).cos())
            .sum();
        return sum / QUADRATURE_NODES as f64;
    }

    // |a_k| = prod_{j=1..k} (2j-1)^2 / (k! 8^k); P collects even k, Q odd k.
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        if term.abs() > prev {
            break;
        }
        match k % 4 {
            0 => p += term,
            1 => q -= term,
            2 => p -= term,
            _ => q += term,
        }
        prev = term.abs();
        if prev < 1e-18 {
            break;
        }
        let odd = (2 * k + 1) as f64;
        term *= odd * odd / (8.0 * (k + 1) as f64 * x);
    }
    let phase = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series sum (-x^2/4)^k / (k!)^2 — accurate for small x only.
    fn j0_series(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -(x * x) / (4.0 * (k * k) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn matches_series_for_small_arguments() {
        for x in [0.0, 0.1, 0.5, 1.0, 2.404_825_557_695_773, 3.0, 5.0] {
            assert!((bessel_j0(x) - j0_series(x)).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn known_values() {
        // J0(10), J0(30), J0(100) from standard tables
        assert!((bessel_j0(10.0) - (-0.245_935_764_451_348_32)).abs() < 2e-15);
        assert!((bessel_j0(30.0) - (-0.086_367_983_581_040_31)).abs() < 2e-15);
        assert!((bessel_j0(100.0) - 0.019_985_850_304_223_33).abs() < 2e-15);
    }

    #[test]
    fn branches_agree_at_cutoff() {
        let x = ASYMPTOTIC_CUTOFF;
        let h = PI / QUADRATURE_NODES as f64;
        let integral: f64 = (0..QUADRATURE_NODES)
            .map(|j| (x * ((j as f64 + 0.5) * h).sin()).cos())
            .sum::<f64>()
            / QUADRATURE_NODES as f64;
        assert!((integral - bessel_j0(x)).abs() < 1e-15);
    }

    #[test]
    fn even_function() {
        assert_eq!(bessel_j0(-3.7), bessel_j0(3.7));
    }
}
