//! Desk-scale experiments on the line and the circle.

use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::maximal::{self, Mollifier};
use crate::orlicz::{self, psi, OrliczSpec};
use crate::quad::adaptive_simpson;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteinRow {
    pub delta: f64,
    pub loglog_inverse_delta: f64,
    /// `int |f| log+ log+ |f|`
    pub lloglogl: f64,
    /// `int_{[-1, 1]} Psi(x, Mf(x)) dx`
    pub maximal_integral: f64,
    pub lloglogl_ratio: f64,
    pub maximal_ratio: f64,
    pub column_ratio: f64,
}

/// `f = delta^-1 chi_(-delta, delta)` on the line.
pub fn stein_row(delta: f64) -> Result<SteinRow> {
    if !(delta > 0.0 && delta < (-E).exp()) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must lie in (0, e^-e)"
        )));
    }
    let f = GridFunction::line_real(-delta, delta, &[1.0 / delta])?;
    let lloglogl = orlicz::l_loglog_functional(&f);
    let mf = |x: f64| {
        maximal::hl_maximal_line(&f, &[x])
            .map(|v| v[0])
            .unwrap_or(f64::NAN)
    };
    let inside = adaptive_simpson(|x| psi(x, mf(x)), 0.0, delta, 1e-10);
    // outside the support the integrand is smooth in log x
    let outside = adaptive_simpson(
        |u| {
            let x = u.exp();
            psi(x, mf(x)) * x
        },
        delta.ln(),
        0.0,
        1e-10,
    );
    let maximal_integral = 2.0 * (inside + outside);
    if !maximal_integral.is_finite() {
        return Err(Error::InvalidParameter(format!("quadrature failed at delta = {delta}")));
    }
    let loglog = (1.0 / delta).ln().ln();
    Ok(SteinRow {
        delta,
        loglog_inverse_delta: loglog,
        lloglogl,
        maximal_integral,
        lloglogl_ratio: lloglogl / loglog,
        maximal_ratio: maximal_integral / loglog,
        column_ratio: maximal_integral / lloglogl,
    })
}

pub fn run_stein(deltas: &[f64]) -> Result<Vec<SteinRow>> {
    deltas.iter().map(|&d| stein_row(d)).collect()
}

/// `e^-e^k` for `k = 2, 3, 4`.
pub fn default_stein_deltas() -> Vec<f64> {
    [2.0f64, 3.0, 4.0].iter().map(|k| (-k.exp()).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakTypeRow {
    pub alpha: f64,
    /// `|{Mf > alpha}|`
    pub level_measure: f64,
    /// `alpha^-1 int_{|f| > alpha/2} |f|`
    pub upper_mass: f64,
    /// `|{x in rho B : Mf > c1 alpha}|`
    pub reverse_measure: f64,
    /// `alpha^-1 int_{|f| > alpha} |f|`
    pub reverse_mass: f64,
}

/// Sub-cells per cell in the level-set quadrature.
const LEVEL_REFINE: usize = 16;

fn mass_above(f: &GridFunction, level: f64) -> f64 {
    f.abs_values().iter().filter(|&&a| a > level).sum::<f64>() * f.cell_width()
}

/// Distribution of `Mf` for a line function, measured on sub-cell midpoints of a window
/// wide enough that `Mf <= c1 * min(alphas)` outside it.
pub fn weak_type_profile(f: &GridFunction, alphas: &[f64], c1: f64) -> Result<Vec<WeakTypeRow>> {
    let (left, right) = f.bounds();
    let half = 0.5 * (right - left);
    let centre = 0.5 * (left + right);
    let lowest = alphas.iter().cloned().fold(f64::INFINITY, f64::min) * c1.min(1.0);
    let rho = half + f.l1_norm() / (2.0 * lowest) + f.cell_width();
    let step = f.cell_width() / LEVEL_REFINE as f64;
    let count = (2.0 * rho / step).ceil() as usize;
    let points: Vec<f64> = (0..count)
        .map(|i| centre - rho + (i as f64 + 0.5) * step)
        .collect();
    let m = maximal::hl_maximal_line(f, &points)?;
    Ok(alphas
        .iter()
        .map(|&alpha| WeakTypeRow {
            alpha,
            level_measure: m.iter().filter(|&&v| v > alpha).count() as f64 * step,
            upper_mass: mass_above(f, alpha / 2.0) / alpha,
            reverse_measure: m.iter().filter(|&&v| v > c1 * alpha).count() as f64 * step,
            reverse_mass: mass_above(f, alpha) / alpha,
        })
        .collect())
}

/// `sup_r` of centred averages over radii `step, 2 step, ...` up to `r_max`, by direct
/// integration of cell overlaps.
pub fn dense_radius_maximal(f: &GridFunction, x: f64, step: f64, r_max: f64) -> f64 {
    let (left, _) = f.bounds();
    let h = f.cell_width();
    let abs = f.abs_values();
    let integral = |a: f64, b: f64| -> f64 {
        abs.iter()
            .enumerate()
            .map(|(j, v)| {
                let lo = (left + j as f64 * h).max(a);
                let hi = (left + (j + 1) as f64 * h).min(b);
                if hi > lo {
                    v * (hi - lo)
                } else {
                    0.0
                }
            })
            .sum()
    };
    let steps = (r_max / step).ceil() as usize;
    (1..=steps)
        .map(|k| {
            let r = k as f64 * step;
            integral(x - r, x + r) / (2.0 * r)
        })
        .fold(0.0, f64::max)
}

fn simpson_nodes(values: &[f64], du: f64) -> f64 {
    debug_assert!(values.len() % 2 == 1);
    let n = values.len() - 1;
    let mut s = values[0] + values[n];
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * du / 3.0
}

/// Nodes per octave for integrals in `log |x|`.
const OCTAVE_NODES: usize = 32;

/// `int_{1 <= |x| <= 2^octaves} Psi(x, g(x)) dx` per octave, both sides, for a profile
/// `g` evaluated in one batch.
fn octave_integrals(
    octaves: u32,
    g: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let du = std::f64::consts::LN_2 / OCTAVE_NODES as f64;
    let per_side = octaves as usize * OCTAVE_NODES + 1;
    let mut xs: Vec<f64> = (0..per_side).map(|i| (i as f64 * du).exp()).collect();
    let left: Vec<f64> = xs.iter().map(|x| -x).collect();
    xs.extend(left);
    let values = g(&xs)?;
    let integrand = |i: usize| {
        let x = xs[i];
        (psi(x, values[i]) + psi(-x, values[i + per_side])) * x
    };
    Ok((0..octaves as usize)
        .map(|o| {
            let nodes: Vec<f64> = (o * OCTAVE_NODES..=(o + 1) * OCTAVE_NODES).map(integrand).collect();
            simpson_nodes(&nodes, du)
        })
        .collect())
}

/// `int_{[-1, 1]} Psi(x, g(x)) dx` by composite Simpson on a uniform grid.
fn core_integral(g: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<f64> {
    let n = 512;
    let dx = 2.0 / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| -1.0 + i as f64 * dx).collect();
    let v = g(&xs)?;
    let nodes: Vec<f64> = xs.iter().zip(&v).map(|(&x, &m)| psi(x, m)).collect();
    Ok(simpson_nodes(&nodes, dx))
}

fn check_unit_support(f: &GridFunction) -> Result<()> {
    let (l, r) = f.bounds();
    if l < -1.0 || r > 1.0 || f.is_torus() {
        return Err(Error::InvalidParameter(
            "expected a line function supported in [-1, 1]".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub radius: f64,
    pub partial_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub mean: f64,
    pub rows: Vec<DivergenceRow>,
    /// Least-squares slope of the partial integrals against `loglog R` over the rows.
    pub slope: f64,
    pub increasing: bool,
}

/// Partial integrals `int_{|x| < 2^j} Psi(x, M_phi f)` for `j = 1..=max_octave`, reported
/// at `R = 2^j` for `j >= min_octave`.
pub fn run_mean_zero_divergence(
    f: &GridFunction,
    min_octave: u32,
    max_octave: u32,
    mollifier: &Mollifier,
) -> Result<DivergenceReport> {
    check_unit_support(f)?;
    if min_octave < 2 || min_octave > max_octave {
        return Err(Error::InvalidParameter(format!(
            "octaves {min_octave}..={max_octave}"
        )));
    }
    let mphi = |xs: &[f64]| maximal::smooth_maximal(f, xs, mollifier);
    let core = core_integral(mphi)?;
    let octaves = octave_integrals(max_octave, mphi)?;
    let mut acc = core;
    let mut rows = Vec::new();
    for (j, piece) in octaves.iter().enumerate() {
        acc += piece;
        let octave = j as u32 + 1;
        if octave >= min_octave {
            rows.push(DivergenceRow {
                radius: (octave as f64).exp2(),
                partial_integral: acc,
            });
        }
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.radius.ln().ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.partial_integral).collect();
    let increasing = ys.windows(2).all(|w| w[1] > w[0]);
    Ok(DivergenceReport {
        mean: f.integrate().re,
        slope: least_squares_slope(&xs, &ys),
        rows,
        increasing,
    })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZygmundReport {
    pub radius: f64,
    pub partial_integral: f64,
    /// `max_{4 <= |x| <= radius} |x|^2 M_phi f(x)`
    pub decay_constant: f64,
    /// fitted `-d log M_phi f / d log |x|` on `4 <= |x| <= radius`
    pub decay_exponent: f64,
    /// `int_{|x| > radius} decay_constant / x^2`, an upper bound for the rest since `Psi(x, t) <= t`
    pub tail_bound: f64,
    pub certified_total: f64,
}

/// Certifies `int Psi(x, M_phi f) < infinity` for a mean-zero `f` supported in `[-1, 1]`.
pub fn run_zygmund(f: &GridFunction, mollifier: &Mollifier) -> Result<ZygmundReport> {
    check_unit_support(f)?;
    let mean = f.integrate();
    if mean.norm() > 1e-12 * f.l1_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::MeanNotZero(mean.norm()));
    }
    let octaves = 6;
    let radius = (octaves as f64).exp2();
    if f.sup_norm() == 0.0 {
        return Ok(ZygmundReport {
            radius,
            partial_integral: 0.0,
            decay_constant: 0.0,
            decay_exponent: f64::INFINITY,
            tail_bound: 0.0,
            certified_total: 0.0,
        });
    }
    let mphi = |xs: &[f64]| maximal::smooth_maximal(f, xs, mollifier);
    let partial_integral = core_integral(mphi)? + octave_integrals(octaves, mphi)?.iter().sum::<f64>();

    let far: Vec<f64> = (0..=64)
        .map(|i| 4.0 * (radius / 4.0).powf(i as f64 / 64.0))
        .flat_map(|x| [x, -x])
        .collect();
    let m = mphi(&far)?;
    let decay_constant = far
        .iter()
        .zip(&m)
        .map(|(x, v)| v * x * x)
        .fold(0.0, f64::max);
    let logs: Vec<(f64, f64)> = far
        .iter()
        .zip(&m)
        .filter(|(_, &v)| v > 0.0)
        .map(|(x, v)| (x.abs().ln(), v.ln()))
        .collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = logs.into_iter().unzip();
    let decay_exponent = -least_squares_slope(&lx, &ly);
    let tail_bound = 2.0 * decay_constant / radius;
    Ok(ZygmundReport {
        radius,
        partial_integral,
        decay_constant,
        decay_exponent,
        tail_bound,
        certified_total: partial_integral + tail_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformRow {
    pub sup: f64,
    /// `int_{|f| > alpha0} |f| int_{alpha0}^{|f|} psi(s)/s ds`
    pub stein_side: f64,
    /// `int Psi(Mf)`
    pub maximal_side: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformReport {
    pub spec: String,
    pub rows: Vec<TransformRow>,
    pub kendall_tau: f64,
    /// max over min of `maximal_side / stein_side`
    pub bracket: f64,
}

/// Compares the two characterising functionals of `spec` across a corpus.
pub fn run_orlicz_transform(
    spec: &OrliczSpec,
    corpus: &[GridFunction],
    alpha0: f64,
) -> Result<TransformReport> {
    let rows = corpus
        .iter()
        .map(|f| {
            let mf = maximal::hl_maximal_torus(f)?;
            Ok(TransformRow {
                sup: f.sup_norm(),
                stein_side: orlicz::general_stein_transform(f, spec, alpha0)?,
                maximal_side: orlicz::modular(&mf, spec),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let a: Vec<f64> = rows.iter().map(|r| r.stein_side).collect();
    let b: Vec<f64> = rows.iter().map(|r| r.maximal_side).collect();
    let ratios: Vec<f64> = rows
        .iter()
        .filter(|r| r.stein_side > 0.0)
        .map(|r| r.maximal_side / r.stein_side)
        .collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(TransformReport {
        spec: spec.name().to_string(),
        kendall_tau: kendall_tau(&a, &b),
        bracket: if ratios.is_empty() { f64::INFINITY } else { hi / lo },
        rows,
    })
}

/// Kendall's tau-b.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    let (mut concordant, mut discordant, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let da = (a[i] - a[j]).partial_cmp(&0.0);
            let db = (b[i] - b[j]).partial_cmp(&0.0);
            match (da, db) {
                (Some(std::cmp::Ordering::Equal), Some(std::cmp::Ordering::Equal)) => {}
                (Some(std::cmp::Ordering::Equal), _) => ties_a += 1,
                (_, Some(std::cmp::Ordering::Equal)) => ties_b += 1,
                (x, y) if x == y => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = (concordant + discordant) as f64;
    let denom = ((n0 + ties_a as f64) * (n0 + ties_b as f64)).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (concordant - discordant) as f64 / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stein_lloglogl_column_is_analytic() {
        let delta = (-3f64.exp()).exp();
        let row = stein_row(delta).unwrap();
        assert!((row.lloglogl - 6.0).abs() < 1e-9);
        assert!((row.loglog_inverse_delta - 3.0).abs() < 1e-12);
    }

    #[test]
    fn stein_rejects_large_delta() {
        assert!(stein_row(0.5).is_err());
        assert!(stein_row(0.0).is_err());
    }

    #[test]
    fn stein_maximal_column_against_closed_form() {
        // Mf = 1/delta on the support and 1/(x + delta) outside
        let delta = (-2f64.exp()).exp();
        let inside = adaptive_simpson(|x| psi(x, 1.0 / delta), 0.0, delta, 1e-12);
        let outside = adaptive_simpson(|x| psi(x, 1.0 / (x + delta)), delta, 1.0, 1e-12);
        let row = stein_row(delta).unwrap();
        let want = 2.0 * (inside + outside);
        assert!((row.maximal_integral - want).abs() < 1e-7 * want, "{} vs {want}", row.maximal_integral);
    }

    #[test]
    fn dense_oracle_matches_indicator() {
        let f = GridFunction::line_real(0.0, 1.0, &[1.0]).unwrap();
        let m = dense_radius_maximal(&f, 2.0, 1.0 / 64.0, 4.0);
        assert!((m - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kendall_extremes() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&a, &[10.0, 20.0, 30.0, 40.0]), 1.0);
        assert_eq!(kendall_tau(&a, &[4.0, 3.0, 2.0, 1.0]), -1.0);
    }

    #[test]
    fn zygmund_rejects_nonzero_mean() {
        let f = GridFunction::line_real(-1.0, 1.0, &[1.0; 4]).unwrap();
        assert!(matches!(
            run_zygmund(&f, &Mollifier::new()),
            Err(Error::MeanNotZero(_))
        ));
    }

    #[test]
    fn zygmund_of_zero() {
        let f = GridFunction::line_real(-1.0, 1.0, &[0.0; 4]).unwrap();
        let r = run_zygmund(&f, &Mollifier::new()).unwrap();
        assert_eq!(r.certified_total, 0.0);
    }
}
