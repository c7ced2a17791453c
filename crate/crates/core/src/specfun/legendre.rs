use crate::error::{Error, Result};
use crate::specfun::SphericalOrder;

fn check_domain(x: f64) -> Result<()> {
    if !(x.abs() <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "Legendre argument must lie in [-1, 1], got {x}"
        )));
    }
    Ok(())
}

/// Upward recurrence over P_0(x), P_1(x), ... without an upper bound.
///
/// Stable for every order; used by the multipole sums, which can run to
/// very high l for emitters close to a large sphere.
#[derive(Debug, Clone)]
pub struct LegendreSeries {
    x: f64,
    l: usize,
    prev: f64,
    current: f64,
}

impl LegendreSeries {
    pub fn new(x: f64) -> Result<Self> {
        check_domain(x)?;
        Ok(Self {
            x,
            l: 0,
            prev: 0.0,
            current: 1.0,
        })
    }
}

impl Iterator for LegendreSeries {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.current;
        let l = self.l as f64;
        let next = ((2.0 * l + 1.0) * self.x * self.current - l * self.prev) / (l + 1.0);
        self.prev = self.current;
        self.current = next;
        self.l += 1;
        Some(out)
    }
}

/// Legendre polynomial P_l(x).
pub fn legendre_p(l: usize, x: f64) -> Result<f64> {
    Ok(LegendreSeries::new(x)?.nth(l).unwrap_or(0.0))
}

/// P_l(x), P_l'(x) and P_l''(x) by the recurrences
/// P'_{n+1} = P'_{n-1} + (2n+1) P_n and P''_{n+1} = P''_{n-1} + (2n+1) P'_n,
/// which stay regular at x = +-1.
pub fn legendre_p_derivs(l: usize, x: f64) -> Result<(f64, f64, f64)> {
    check_domain(x)?;
    let (mut p, mut dp, mut d2p) = ([1.0, x], [0.0, 1.0], [0.0, 0.0]);
    if l < 2 {
        return Ok((p[l], dp[l], d2p[l]));
    }
    for n in 1..l {
        let nf = n as f64;
        let p_next = ((2.0 * nf + 1.0) * x * p[1] - nf * p[0]) / (nf + 1.0);
        let dp_next = dp[0] + (2.0 * nf + 1.0) * p[1];
        let d2p_next = d2p[0] + (2.0 * nf + 1.0) * dp[1];
        p = [p[1], p_next];
        dp = [dp[1], dp_next];
        d2p = [d2p[1], d2p_next];
    }
    Ok((p[1], dp[1], d2p[1]))
}

/// Associated Legendre function P_l^m(x) without the Condon-Shortley phase,
/// so P_l^m >= 0 near x = 1 and P_1^1(cos t) = sin t.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> Result<f64> {
    let order = SphericalOrder::new(l, m)?;
    check_domain(x)?;
    assoc_legendre_unchecked(order.l(), order.m(), x)
}

fn assoc_legendre_unchecked(l: usize, m: usize, x: f64) -> Result<f64> {
    if m > l {
        return Ok(0.0);
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    // P_m^m = (2m-1)!! (1-x^2)^{m/2}
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    if l == m {
        return finite(l, x, pmm);
    }
    let mut prev = pmm;
    let mut current = x * (2 * m + 1) as f64 * pmm;
    for n in (m + 1)..l {
        let next = ((2 * n + 1) as f64 * x * current - (n + m) as f64 * prev) / (n + 1 - m) as f64;
        prev = current;
        current = next;
    }
    finite(l, x, current)
}

fn finite(l: usize, x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::OutOfEnvelope {
            func: "assoc_legendre",
            l,
            z: x.into(),
        })
    }
}

/// d P_l^m(cos theta) / d theta for theta in [0, pi].
///
/// Uses 2 dP_l^m/dtheta = (l+m)(l-m+1) P_l^{m-1} - P_l^{m+1}, and
/// dP_l/dtheta = -P_l^1 at m = 0. Neither form divides by sin(theta).
pub fn assoc_legendre_dtheta(l: usize, m: usize, theta: f64) -> Result<f64> {
    SphericalOrder::new(l, m)?;
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidInput(format!(
            "polar angle must lie in [0, pi], got {theta}"
        )));
    }
    let x = theta.cos();
    if m == 0 {
        return Ok(-assoc_legendre_unchecked(l, 1, x)?);
    }
    let lower = assoc_legendre_unchecked(l, m - 1, x)?;
    let upper = assoc_legendre_unchecked(l, m + 1, x)?;
    Ok(0.5 * ((l + m) as f64 * (l - m + 1) as f64 * lower - upper))
}
