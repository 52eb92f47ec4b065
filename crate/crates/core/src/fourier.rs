//! Fourier coefficients of grid functions and the Hardy-type inequality for `H^log`.

use std::f64::consts::{E, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dyadic::Arc;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::maximal;
use crate::orlicz::psi0;

/// Coefficients `c_n` for `|n| <= n_max`, normalised as `(1/2pi) int f e^{-in theta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    n_max: usize,
    values: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn from_fn(n_max: usize, c: impl Fn(i64) -> Complex64) -> Self {
        let values = (-(n_max as i64)..=n_max as i64).map(c).collect();
        Self { n_max, values }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.n_max {
            return Complex64::new(0.0, 0.0);
        }
        self.values[(n + self.n_max as i64) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let base = self.n_max as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &z)| (i as i64 - base, z))
    }

    /// `sum |c_n|^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `n, |c_n|, psi0(|n c_n|)/n^2` rows for `n != 0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,abs_coefficient,contribution\n");
        for (n, z) in self.iter() {
            if n == 0 {
                continue;
            }
            let contribution = psi0((n as f64 * z).norm()) / (n * n) as f64;
            out.push_str(&format!("{n},{:e},{:e}\n", z.norm(), contribution));
        }
        out
    }
}

fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    FftPlanner::<f64>::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

/// Exact coefficients of the piecewise-constant function, `|n| <= n_max <= n_samples / 2`.
pub fn fourier_coefficients(f: &GridFunction, n_max: usize) -> Result<FourierCoefficients> {
    f.torus_depth()?;
    let ns = f.len();
    if n_max > ns / 2 {
        return Err(Error::FrequencyTooHigh {
            n_max,
            limit: ns / 2,
        });
    }
    let spectrum = dft(f.samples());
    let h = f.cell_width();
    let mean = f.mean();
    Ok(FourierCoefficients::from_fn(n_max, |n| {
        if n == 0 {
            return mean;
        }
        let k = n.rem_euclid(ns as i64) as usize;
        let nf = n as f64;
        // (1 - e^{-inh}) / (in)
        let cell = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -nf * h))
            / Complex64::new(0.0, nf);
        spectrum[k] * cell / TAU
    }))
}

/// Coefficients of the trigonometric interpolant through the samples, `|n| < n_samples / 2`.
pub fn band_limited_coefficients(f: &GridFunction) -> Result<FourierCoefficients> {
    f.torus_depth()?;
    let ns = f.len();
    let spectrum = dft(f.samples());
    let n_max = (ns - 1) / 2;
    Ok(FourierCoefficients::from_fn(n_max, |n| {
        spectrum[n.rem_euclid(ns as i64) as usize] / ns as f64
    }))
}

/// Point samples `sum_n c_n e^{i n theta_j}` at `theta_j = 2 pi j / n_samples`.
pub fn band_limited_samples(c: &FourierCoefficients, n_samples: usize) -> Result<GridFunction> {
    if 2 * c.n_max() >= n_samples {
        return Err(Error::FrequencyTooHigh {
            n_max: c.n_max(),
            limit: (n_samples - 1) / 2,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n_samples];
    for (n, z) in c.iter() {
        buf[n.rem_euclid(n_samples as i64) as usize] += z;
    }
    FftPlanner::<f64>::new()
        .plan_fft_inverse(n_samples)
        .process(&mut buf);
    GridFunction::torus(buf)
}

/// `sum_{n != 0} psi0(|n c_n|) / n^2`.
pub fn hl_hlog_functional(c: &FourierCoefficients) -> f64 {
    c.iter()
        .filter(|(n, _)| *n != 0)
        .map(|(n, z)| psi0(n.unsigned_abs() as f64 * z.norm()) / (n * n) as f64)
        .sum()
}

/// `sum_{n != 0} |n c_n| / n^2`: the functional with `psi0` replaced by the identity.
pub fn identity_functional(c: &FourierCoefficients) -> f64 {
    c.iter()
        .filter(|(n, _)| *n != 0)
        .map(|(n, z)| z.norm() / n.unsigned_abs() as f64)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomFourierReport {
    pub n_max: usize,
    pub truncated: f64,
    /// Bound on the modes `|n| > n_max` from Parseval and Holder with exponents 4 and 4/3.
    pub tail_bound: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `(sum_{n != 0} psi0(|n a^(n)|)/n^2) / (|I| psi0(||a||_inf))`, with a certified tail.
pub fn atom_fourier_inequality_check(a: &GridFunction, arc: &Arc) -> Result<AtomFourierReport> {
    let n_max = a.len() / 2;
    let c = fourier_coefficients(a, n_max)?;
    let truncated = hl_hlog_functional(&c);
    let sup = a.sup_norm();
    let energy = a.l2_norm().powi(2) / TAU;
    let tail_energy = (energy - c.energy()).max(0.0);
    let bound_c = arc.length() * sup / TAU;
    let k = n_max as f64;
    let tilde_sum = if bound_c > 0.0 {
        6.0 * bound_c.powf(2.0 / 3.0) * k.powf(-1.0 / 3.0) / (E + k * bound_c).ln().powf(4.0 / 3.0)
    } else {
        0.0
    };
    let tail_bound = tail_energy.powf(0.25) * tilde_sum.powf(0.75);
    let rhs = arc.length() * psi0(sup);
    let ratio = if rhs > 0.0 {
        (truncated + tail_bound) / rhs
    } else {
        0.0
    };
    Ok(AtomFourierReport {
        n_max,
        truncated,
        tail_bound,
        rhs,
        ratio,
    })
}

/// `N 2^N e^{i 2^N theta}` on `[0, 2pi 2^-N)` at grid depth `depth >= N + 2`.
///
/// Cell values carry the factor `i w h / (1 - e^{-i w h})` (with `w = 2^N`), which makes
/// the coefficient at the carrier frequency equal to `N` for the piecewise-constant grid
/// function, as it is for the continuous one.
pub fn a_n_function(big_n: u32, depth: u32) -> Result<GridFunction> {
    if depth < big_n + 2 {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} must be at least N + 2 = {}",
            big_n + 2
        )));
    }
    let n = 3usize << depth;
    let h = TAU / n as f64;
    let w = (big_n as f64).exp2();
    let support = 3usize << (depth - big_n);
    let carrier = Complex64::new(0.0, w * h) / (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -w * h));
    let amp = big_n as f64 * w;
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for (j, s) in samples.iter_mut().enumerate().take(support) {
        *s = carrier * Complex64::from_polar(amp, w * j as f64 * h);
    }
    GridFunction::torus(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub big_n: u32,
    pub carrier_coefficient: f64,
    /// `min |a^_N(n)| / N` over `2^(N-2) <= n < 2^(N-1)`
    pub band_min_ratio: f64,
    pub identity_sum: f64,
    pub maximal_integral: f64,
    pub ratio: f64,
}

/// Coefficient facts for `a_N` and the ratio of the identity-weighted sum to `int psi0(f*)`,
/// with `f*` replaced by the radial Poisson maximal function.
pub fn sharpness_a_n(big_n: u32, depth: u32, r_levels: u32) -> Result<SharpnessReport> {
    let a = a_n_function(big_n, depth)?;
    let c = fourier_coefficients(&a, a.len() / 2)?;
    let w = 1i64 << big_n;
    let carrier_coefficient = c.get(w).norm();
    let band_min_ratio = (w / 4..w / 2)
        .map(|n| c.get(n).norm() / big_n as f64)
        .fold(f64::INFINITY, f64::min);
    let identity_sum = identity_functional(&c);
    let star = maximal::radial_poisson_maximal(&a, r_levels)?;
    let maximal_integral = star.samples().iter().map(|z| psi0(z.re)).sum::<f64>() * star.cell_width();
    Ok(SharpnessReport {
        big_n,
        carrier_coefficient,
        band_min_ratio,
        identity_sum,
        maximal_integral,
        ratio: identity_sum / maximal_integral,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummabilityReport {
    /// `sum_{n != 0} |c_n| / (|n| log(e + |n|))`
    pub sum: f64,
    /// `max_n |c_n| / (1 + |n|)`
    pub growth: f64,
}

pub fn summability_check(c: &FourierCoefficients) -> SummabilityReport {
    let mut sum = 0.0;
    let mut growth = 0.0f64;
    for (n, z) in c.iter() {
        let m = n.unsigned_abs() as f64;
        growth = growth.max(z.norm() / (1.0 + m));
        if n != 0 {
            sum += z.norm() / (m * (E + m).ln());
        }
    }
    SummabilityReport { sum, growth }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_only_zero_mode() {
        let f = GridFunction::torus_real(&[3.0; 48]).unwrap();
        let c = fourier_coefficients(&f, 24).unwrap();
        assert!((c.get(0).re - 3.0).abs() < 1e-14);
        assert!(c.iter().filter(|(n, _)| *n != 0).all(|(_, z)| z.norm() < 1e-14));
    }

    #[test]
    fn indicator_of_half_circle() {
        // (1/2pi) int_0^pi e^{-in t} dt = (1 - (-1)^n) / (2 pi i n)
        let mut v = vec![0.0; 96];
        v[..48].fill(1.0);
        let c = fourier_coefficients(&GridFunction::torus_real(&v).unwrap(), 48).unwrap();
        for n in 1..=48i64 {
            let want = if n % 2 == 1 { 1.0 / (std::f64::consts::PI * n as f64) } else { 0.0 };
            assert!((c.get(n).norm() - want).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn cutoff_above_nyquist_is_rejected() {
        let f = GridFunction::torus_real(&[1.0; 12]).unwrap();
        assert!(matches!(
            fourier_coefficients(&f, 7),
            Err(Error::FrequencyTooHigh { .. })
        ));
    }

    #[test]
    fn single_exponential() {
        let c = FourierCoefficients::from_fn(4, |n| {
            Complex64::new(if n == 1 { 1.0 } else { 0.0 }, 0.0)
        });
        assert!((hl_hlog_functional(&c) - psi0(1.0)).abs() < 1e-15);
        let s = summability_check(&c);
        assert!((s.sum - 1.0 / (E + 1.0).ln()).abs() < 1e-15);
        assert!((s.growth - 0.5).abs() < 1e-15);
    }

    #[test]
    fn band_limited_round_trip() {
        let f = GridFunction::torus_from_fn(3, |t| Complex64::new((2.0 * t).cos(), t.sin())).unwrap();
        let c = band_limited_coefficients(&f).unwrap();
        let g = band_limited_samples(&c, f.len()).unwrap();
        assert!(f.max_abs_diff(&g).unwrap() < 1e-13);
        let energy_samples = f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() / f.len() as f64;
        assert!((c.energy() - energy_samples).abs() < 1e-12);
    }
}
