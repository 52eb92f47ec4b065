//! Orlicz functions, Luxemburg norms and the Stein-type transforms.

use std::f64::consts::E;
use std::fmt;
use std::sync::Arc as Shared;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::quad::adaptive_simpson;

/// Relative accuracy of the Luxemburg level equation.
pub const LEVEL_TOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

pub fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

/// `t / log(e + t)`.
pub fn psi0(t: f64) -> f64 {
    t / (E + t).ln()
}

/// `t^(2/3) / log(e + t)^(4/3)`.
pub fn psi0_tilde(t: f64) -> f64 {
    t.powf(2.0 / 3.0) / (E + t).ln().powf(4.0 / 3.0)
}

/// `t / (log(e + t) + log(e + |x|))`.
pub fn psi(x: f64, t: f64) -> f64 {
    t / ((E + t).ln() + (E + x.abs()).ln())
}

/// Integrand `1 / (log(e + t) + log(e + r))` whose running integral is comparable to `psi`.
pub fn psi_kernel(r: f64, t: f64) -> f64 {
    1.0 / ((E + t).ln() + (E + r).ln())
}

/// `int_0^t psi_kernel(|x|, tau) d tau`.
pub fn psi_kernel_integral(x: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    adaptive_simpson(|tau| psi_kernel(x.abs(), tau), 0.0, t, 1e-12)
}

/// Inverse of `psi0` on `[0, inf)`.
pub fn psi0_inverse(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, y.max(1.0));
    while psi0(hi) < y {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psi0(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

type Profile = Shared<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// An Orlicz function `Psi(x, t)`, optionally with its density `d Psi / d t`.
#[derive(Clone)]
pub struct OrliczSpec {
    name: String,
    psi: Profile,
    density: Option<Profile>,
}

impl fmt::Debug for OrliczSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrliczSpec")
            .field("name", &self.name)
            .field("has_density", &self.density.is_some())
            .finish()
    }
}

/// Tags accepted by [`OrliczSpec::builtin`].
pub const BUILTIN_TAGS: [&str; 8] = [
    "psi", "psi0", "psi0_tilde", "llogl", "lloglogl", "sjolin", "lie", "expl",
];

fn psi0_density(s: f64) -> f64 {
    let l = (E + s).ln();
    1.0 / l - s / ((E + s) * l * l)
}

fn lie_weight(t: f64) -> f64 {
    log_plus(log_plus(log_plus(log_plus(t))))
}

impl OrliczSpec {
    pub fn custom(
        name: impl Into<String>,
        psi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        density: Option<Box<dyn Fn(f64, f64) -> f64 + Send + Sync>>,
    ) -> Self {
        Self {
            name: name.into(),
            psi: Shared::new(psi),
            density: density.map(Shared::from),
        }
    }

    fn build(
        name: &str,
        psi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        density: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.to_string(),
            psi: Shared::new(psi),
            density: Some(Shared::new(density)),
        }
    }

    pub fn psi0() -> Self {
        Self::builtin("psi0").expect("builtin")
    }

    pub fn builtin(tag: &str) -> Result<Self> {
        let spec = match tag {
            "psi" => Self::build("psi", psi, |x, s| {
                let d = (E + s).ln() + (E + x.abs()).ln();
                1.0 / d - s / ((E + s) * d * d)
            }),
            "psi0" => Self::build("psi0", |_, t| psi0(t), |_, s| psi0_density(s)),
            "psi0_tilde" => Self::build("psi0_tilde", |_, t| psi0_tilde(t), |_, s| {
                if s <= 0.0 {
                    return f64::INFINITY;
                }
                let l = (E + s).ln();
                (2.0 / 3.0) * s.powf(-1.0 / 3.0) / l.powf(4.0 / 3.0)
                    - (4.0 / 3.0) * s.powf(2.0 / 3.0) / ((E + s) * l.powf(7.0 / 3.0))
            }),
            "llogl" => Self::build(
                "llogl",
                |_, t| t * log_plus(t),
                |_, s| if s > 1.0 { s.ln() + 1.0 } else { 0.0 },
            ),
            "lloglogl" => Self::build(
                "lloglogl",
                |_, t| t * log_plus(log_plus(t)),
                |_, s| {
                    if s > E {
                        s.ln().ln() + 1.0 / s.ln()
                    } else {
                        0.0
                    }
                },
            ),
            "sjolin" => Self::build(
                "sjolin",
                |_, t| t * log_plus(t) * log_plus(log_plus(t)),
                |_, s| {
                    if s > E {
                        let l = s.ln();
                        let ll = l.ln();
                        l * ll + ll + 1.0
                    } else {
                        0.0
                    }
                },
            ),
            "lie" => Self::build(
                "lie",
                |_, t| psi0(t) * lie_weight(t),
                |_, s| {
                    let w = lie_weight(s);
                    if w <= 0.0 {
                        return 0.0;
                    }
                    let l1 = s.ln();
                    let l2 = l1.ln();
                    let l3 = l2.ln();
                    psi0_density(s) * w + psi0(s) / (s * l1 * l2 * l3)
                },
            ),
            "expl" => Self::build(
                "expl",
                |_, t| t.exp_m1() - t,
                |_, s| s.exp_m1(),
            ),
            _ => return Err(Error::UnknownSpec(tag.to_string())),
        };
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        (self.psi)(x, t)
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    pub fn density(&self, x: f64, s: f64) -> Result<f64> {
        match &self.density {
            Some(d) => Ok(d(x, s)),
            None => Err(Error::MissingDensity(self.name.clone())),
        }
    }
}

/// Solves `g(lambda) = 1` for a nonincreasing `g` by bisection in `log lambda`.
pub fn solve_unit_level(g: impl Fn(f64) -> f64, scale: f64) -> Result<f64> {
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let (mut lo, mut hi) = (scale, scale);
    let mut guard = 0;
    while g(lo) <= 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 || lo == 0.0 {
            return Err(Error::NonConvergence { lo, hi });
        }
    }
    guard = 0;
    while g(hi) > 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(Error::NonConvergence { lo, hi });
        }
    }
    let mut mid = (lo * hi).sqrt();
    for _ in 0..MAX_BISECTIONS {
        mid = (lo * hi).sqrt();
        let v = g(mid);
        if (v - 1.0).abs() <= 1e-13 {
            return Ok(mid);
        }
        if v > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    let v = g(mid);
    if (v - 1.0).abs() <= LEVEL_TOL || hi / lo - 1.0 < 1e-14 {
        Ok(mid)
    } else {
        Err(Error::NonConvergence { lo, hi })
    }
}

/// `inf { lambda : normalizer * sum_j w_j Psi(x_j, |v_j| / lambda) <= 1 }`.
pub fn luxemburg_norm(
    values: &[f64],
    weights: &[f64],
    positions: &[f64],
    spec: &OrliczSpec,
    normalizer: f64,
) -> Result<f64> {
    if values.len() != weights.len() || values.len() != positions.len() {
        return Err(Error::Mismatch("values, weights and positions differ in length".into()));
    }
    let top = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let g = |lambda: f64| {
        normalizer
            * values
                .iter()
                .zip(weights)
                .zip(positions)
                .filter(|((v, _), _)| **v != 0.0)
                .map(|((v, w), x)| w * spec.eval(*x, v.abs() / lambda))
                .sum::<f64>()
    };
    solve_unit_level(g, top)
}

/// Luxemburg norm of `|f|` with cell weights and left-endpoint positions.
pub fn luxemburg_norm_grid(f: &GridFunction, spec: &OrliczSpec, normalizer: f64) -> Result<f64> {
    let values = f.abs_values();
    let weights = vec![f.cell_width(); f.len()];
    let positions: Vec<f64> = (0..f.len()).map(|j| f.cell_left(j)).collect();
    luxemburg_norm(&values, &weights, &positions, spec, normalizer)
}

/// `int Psi(x, |f(x)|) dx` with left-endpoint positions.
pub fn modular(f: &GridFunction, spec: &OrliczSpec) -> f64 {
    let h = f.cell_width();
    f.samples()
        .iter()
        .enumerate()
        .map(|(j, z)| spec.eval(f.cell_left(j), z.norm()))
        .sum::<f64>()
        * h
}

/// `int |f| log+ log+ |f|`.
pub fn l_loglog_functional(f: &GridFunction) -> f64 {
    let h = f.cell_width();
    f.samples()
        .iter()
        .map(|z| {
            let a = z.norm();
            a * log_plus(log_plus(a))
        })
        .sum::<f64>()
        * h
}

/// `int_{alpha0}^{t} density(x, s) / s ds`, integrated in `log s`.
pub fn stein_inner(spec: &OrliczSpec, x: f64, t: f64, alpha0: f64) -> Result<f64> {
    if !spec.has_density() {
        return Err(Error::MissingDensity(spec.name().to_string()));
    }
    if t <= alpha0 {
        return Ok(0.0);
    }
    Ok(adaptive_simpson(
        |u| spec.density(x, u.exp()).unwrap_or(0.0),
        alpha0.ln(),
        t.ln(),
        1e-8,
    ))
}

/// `int_{|f| > alpha0} |f| int_{alpha0}^{|f|} psi_x(s)/s ds dx`.
pub fn general_stein_transform(f: &GridFunction, spec: &OrliczSpec, alpha0: f64) -> Result<f64> {
    if alpha0.is_nan() || alpha0 <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha0 = {alpha0}")));
    }
    if !spec.has_density() {
        return Err(Error::MissingDensity(spec.name().to_string()));
    }
    let h = f.cell_width();
    let mut total = 0.0;
    for (j, z) in f.samples().iter().enumerate() {
        let a = z.norm();
        if a > alpha0 {
            total += a * stein_inner(spec, f.cell_left(j), a, alpha0)?;
        }
    }
    Ok(total * h)
}

/// Closed form of `int psi(s)/s ds` for the `sjolin` function, valid for `s > e`.
pub fn sjolin_antiderivative(s: f64) -> f64 {
    let l = log_plus(s);
    let ll = log_plus(l);
    0.5 * l * l * ll + l * ll - 0.25 * l * l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi0_fixed_point() {
        let t = psi0_inverse(1.0);
        assert!((t - (E + t).ln()).abs() < 1e-12);
        assert!((t - 1.420_370_118).abs() < 1e-8);
    }

    #[test]
    fn builtins_vanish_at_zero_and_grow() {
        for tag in BUILTIN_TAGS {
            let s = OrliczSpec::builtin(tag).unwrap();
            assert_eq!(s.eval(0.0, 0.0), 0.0, "{tag}");
            assert!(s.eval(0.5, 1e30) > 1e3, "{tag}");
        }
        assert!(matches!(OrliczSpec::builtin("nope"), Err(Error::UnknownSpec(_))));
    }

    #[test]
    fn densities_match_difference_quotients() {
        for tag in BUILTIN_TAGS {
            let s = OrliczSpec::builtin(tag).unwrap();
            for &t in &[0.3, 2.0, 17.0, 1e3, 5e7, 1e12] {
                if tag == "expl" && t > 50.0 {
                    continue;
                }
                let dt = 1e-6 * t;
                let fd = (s.eval(1.5, t + dt) - s.eval(1.5, t - dt)) / (2.0 * dt);
                let d = s.density(1.5, t).unwrap();
                assert!((fd - d).abs() <= 1e-5 * d.abs().max(1e-3), "{tag} at {t}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn luxemburg_of_constant_uses_fixed_point() {
        let f = GridFunction::torus_real(&[3.0; 48]).unwrap();
        let norm = luxemburg_norm_grid(&f, &OrliczSpec::psi0(), 1.0 / std::f64::consts::TAU).unwrap();
        assert!((norm - 3.0 / psi0_inverse(1.0)).abs() < 1e-8);
    }

    #[test]
    fn luxemburg_of_zero_is_zero() {
        let f = GridFunction::torus_real(&[0.0; 12]).unwrap();
        assert_eq!(luxemburg_norm_grid(&f, &OrliczSpec::psi0(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn custom_spec_without_density_is_refused_by_stein_transform() {
        let spec = OrliczSpec::custom("square", |_, t| t * t, None);
        let f = GridFunction::torus_real(&[5.0; 12]).unwrap();
        assert!(matches!(
            general_stein_transform(&f, &spec, 1.0),
            Err(Error::MissingDensity(_))
        ));
        assert!(luxemburg_norm_grid(&f, &spec, 1.0).is_ok());
    }

    #[test]
    fn kernel_integral_is_sandwiched() {
        for &x in &[0.0, 0.7, 40.0] {
            for &t in &[1e-3, 0.5, 3.0, 1e4] {
                let v = psi_kernel_integral(x, t);
                let p = psi(x, t);
                assert!(p <= v * (1.0 + 1e-10) && v <= 2.0 * p * (1.0 + 1e-10));
            }
        }
    }
}
