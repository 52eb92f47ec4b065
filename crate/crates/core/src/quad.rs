//! Adaptive Simpson quadrature.

const PANELS: usize = 16;
const MAX_LEVEL: u32 = 48;

/// Integrates `f` over `[a, b]` to a relative tolerance of the integral's magnitude.
///
/// The interval is first cut into a few panels so that narrow features are not
/// missed by the initial five-point estimate.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let w = (b - a) / PANELS as f64;
    let mut panels = Vec::with_capacity(PANELS);
    let mut rough = 0.0;
    let mut scale = 0.0;
    for i in 0..PANELS {
        let lo = a + w * i as f64;
        let hi = if i + 1 == PANELS { b } else { lo + w };
        let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let s = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        rough += s;
        scale += s.abs();
        panels.push((lo, hi, flo, fmid, fhi, s));
    }
    let eps = rel_tol * rough.abs().max(1e-3 * scale).max(f64::MIN_POSITIVE);
    let eps_panel = eps / PANELS as f64;
    panels
        .into_iter()
        .map(|(lo, hi, flo, fmid, fhi, s)| refine(&f, lo, hi, flo, fmid, fhi, s, eps_panel, MAX_LEVEL))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    level: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if level == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * eps, level - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * eps, level - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_transcendental() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-10);
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn step_discontinuity() {
        let v = adaptive_simpson(|x| if x > 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, 1e-9);
        assert!((v - 0.7).abs() < 1e-8);
    }
}
