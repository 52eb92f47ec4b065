//! Hardy-Littlewood, smooth and radial Poisson maximal functions of grid functions.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction};
use crate::quad::adaptive_simpson;

fn line_bounds(f: &GridFunction) -> Result<(f64, f64)> {
    match f.domain() {
        Domain::Line([l, r]) => Ok((l, r)),
        Domain::Torus => Err(Error::WrongDomain { expected: "line" }),
    }
}

/// Running integral of `|f|` on a line grid, extended by constants outside.
struct Cumulative {
    left: f64,
    right: f64,
    n: usize,
    abs: Vec<f64>,
    prefix: Vec<f64>,
}

impl Cumulative {
    fn new(f: &GridFunction) -> Result<Self> {
        let (left, right) = line_bounds(f)?;
        let abs = f.abs_values();
        let h = f.cell_width();
        let mut prefix = Vec::with_capacity(abs.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for a in &abs {
            acc += a * h;
            prefix.push(acc);
        }
        Ok(Self {
            left,
            right,
            n: abs.len(),
            abs,
            prefix,
        })
    }

    fn boundary(&self, i: usize) -> f64 {
        self.left + (self.right - self.left) * i as f64 / self.n as f64
    }

    fn at(&self, y: f64) -> f64 {
        if y <= self.left {
            return 0.0;
        }
        if y >= self.right {
            return self.prefix[self.n];
        }
        let pos = (y - self.left) / (self.right - self.left) * self.n as f64;
        let i = (pos.floor() as usize).min(self.n - 1);
        self.prefix[i] + self.abs[i] * (y - self.boundary(i))
    }

    /// Limit of the centered averages as the radius shrinks to zero.
    fn point_limit(&self, x: f64) -> f64 {
        if x < self.left || x > self.right {
            return 0.0;
        }
        let pos = (x - self.left) / (self.right - self.left) * self.n as f64;
        let i = pos.floor() as usize;
        let on_boundary = self.boundary(i.min(self.n)) == x;
        let cell = |k: isize| -> f64 {
            if k < 0 || k as usize >= self.n {
                0.0
            } else {
                self.abs[k as usize]
            }
        };
        if on_boundary {
            0.5 * (cell(i as isize - 1) + cell(i as isize))
        } else {
            cell(i as isize)
        }
    }

    fn centered(&self, x: f64, r: f64) -> f64 {
        (self.at(x + r) - self.at(x - r)) / (2.0 * r)
    }
}

/// Centered Hardy-Littlewood maximal function on the line at the given points.
///
/// Between consecutive radii at which `x +- r` crosses a cell boundary the average is
/// `(a + b r) / 2r`, monotone in `r`, so the supremum is taken over those radii and the
/// limit `r -> 0`.
pub fn hl_maximal_line(f: &GridFunction, points: &[f64]) -> Result<Vec<f64>> {
    let cum = Cumulative::new(f)?;
    let boundaries: Vec<f64> = (0..=cum.n).map(|i| cum.boundary(i)).collect();
    Ok(points
        .par_iter()
        .map(|&x| {
            let mut best = cum.point_limit(x);
            for &b in &boundaries {
                let r = (x - b).abs();
                if r > 0.0 {
                    best = best.max(cum.centered(x, r));
                }
            }
            best
        })
        .collect())
}

/// Maximal function sampled at the midpoints of `n_points` cells of `[left, right]`.
pub fn hl_maximal_line_grid(
    f: &GridFunction,
    left: f64,
    right: f64,
    n_points: usize,
) -> Result<GridFunction> {
    if n_points == 0 {
        return Err(Error::Empty);
    }
    let h = (right - left) / n_points as f64;
    let points: Vec<f64> = (0..n_points).map(|j| left + (j as f64 + 0.5) * h).collect();
    let values = hl_maximal_line(f, &points)?;
    GridFunction::line_real(left, right, &values)
}

fn torus_abs_prefix(f: &GridFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    f.torus_depth()?;
    let abs = f.abs_values();
    let n = abs.len();
    let mut prefix = Vec::with_capacity(3 * n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for k in 0..3 * n {
        acc += abs[k % n];
        prefix.push(acc);
    }
    Ok((abs, prefix))
}

/// Centered maximal function on the circle at cell midpoints, radii up to `pi`.
///
/// From a midpoint, `theta +- r` meets cell boundaries exactly at half-integer multiples
/// of the cell width, so the candidates are the symmetric windows of `2j + 1` cells and
/// the full circle.
pub fn hl_maximal_torus(f: &GridFunction) -> Result<GridFunction> {
    let (abs, prefix) = torus_abs_prefix(f)?;
    let n = abs.len();
    let full = prefix[n] / n as f64;
    let values: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = full;
            let centre = i + n;
            for j in 0..n.div_ceil(2) {
                if 2 * j + 1 > n {
                    break;
                }
                let s = prefix[centre + j + 1] - prefix[centre - j];
                best = best.max(s / (2 * j + 1) as f64);
            }
            Complex64::new(best, 0.0)
        })
        .collect();
    f.with_samples(values)
}

/// Largest average of `|f|` over cell-aligned arcs containing each cell.
pub fn uncentered_maximal_torus(f: &GridFunction) -> Result<GridFunction> {
    let (abs, prefix) = torus_abs_prefix(f)?;
    let n = abs.len();
    let mut best = abs.clone();
    let mut window = vec![0.0; n];
    for len in 2..=n {
        for (p, w) in window.iter_mut().enumerate() {
            *w = (prefix[p + len] - prefix[p]) / len as f64;
        }
        // max over starts p in [i - len + 1, i], cyclically
        let mut dq: VecDeque<(isize, f64)> = VecDeque::new();
        let lo = -(len as isize) + 1;
        for q in lo..n as isize {
            let v = window[q.rem_euclid(n as isize) as usize];
            while dq.back().is_some_and(|&(_, b)| b <= v) {
                dq.pop_back();
            }
            dq.push_back((q, v));
            let i = q;
            while dq.front().is_some_and(|&(p, _)| p < i - len as isize + 1) {
                dq.pop_front();
            }
            if i >= 0 {
                let m = dq.front().expect("nonempty").1;
                let cell = &mut best[i as usize];
                *cell = cell.max(m);
            }
        }
    }
    f.with_samples(best.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

const BRIDGE_NODES: usize = 4096;

/// Even mollifier on `[-1, 1]`: constant on `|x| <= 1/2`, joined to zero by an
/// `exp(-1/t)` smooth step, with unit mass.
#[derive(Debug, Clone)]
pub struct Mollifier {
    plateau: f64,
    /// `int_s^1 profile` at equally spaced `s` in `[1/2, 1]`
    tail: Vec<f64>,
}

impl Default for Mollifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Mollifier {
    pub fn new() -> Self {
        let step = 0.5 / BRIDGE_NODES as f64;
        let mut tail = vec![0.0; BRIDGE_NODES + 1];
        for k in (0..BRIDGE_NODES).rev() {
            let a = 0.5 + k as f64 * step;
            tail[k] = tail[k + 1] + adaptive_simpson(Self::profile, a, a + step, 1e-13);
        }
        let mass = 2.0 * (0.5 + tail[0]);
        Self {
            plateau: 1.0 / mass,
            tail,
        }
    }

    fn profile(r: f64) -> f64 {
        let r = r.abs();
        if r <= 0.5 {
            1.0
        } else if r >= 1.0 {
            0.0
        } else {
            smooth_step(2.0 * (1.0 - r))
        }
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn value(&self, x: f64) -> f64 {
        self.plateau * Self::profile(x)
    }

    /// Cubic Hermite interpolation of `int_s^1 profile`, whose derivative is known exactly.
    fn tail_at(&self, s: f64) -> f64 {
        if s >= 1.0 {
            return 0.0;
        }
        let step = 0.5 / BRIDGE_NODES as f64;
        let pos = ((s - 0.5) / step).clamp(0.0, BRIDGE_NODES as f64);
        let k = (pos.floor() as usize).min(BRIDGE_NODES - 1);
        let t = pos - k as f64;
        let (s0, s1) = (0.5 + k as f64 * step, 0.5 + (k + 1) as f64 * step);
        let (y0, y1) = (self.tail[k], self.tail[k + 1]);
        let (d0, d1) = (-Self::profile(s0) * step, -Self::profile(s1) * step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    }

    /// `int_{-1}^{u} phi`.
    pub fn cdf(&self, u: f64) -> f64 {
        if u <= -1.0 {
            0.0
        } else if u <= -0.5 {
            self.plateau * self.tail_at(-u)
        } else if u < 0.5 {
            self.plateau * (self.tail[0] + u + 0.5)
        } else if u < 1.0 {
            1.0 - self.plateau * self.tail_at(u)
        } else {
            1.0
        }
    }
}

/// Dilations `2^(j/4)` from a quarter cell up to eight times the reach of the data.
fn dilation_grid(h: f64, reach: f64) -> Vec<f64> {
    let lo = (4.0 * (h / 4.0).log2()).floor() as i64;
    let hi = (4.0 * (8.0 * reach).log2()).ceil() as i64;
    (lo..=hi).map(|j| (j as f64 / 4.0).exp2()).collect()
}

/// `sup_eps |f * phi_eps (x)|` over the dyadic-quarter dilation grid.
pub fn smooth_maximal(f: &GridFunction, points: &[f64], mollifier: &Mollifier) -> Result<Vec<f64>> {
    let (left, right) = line_bounds(f)?;
    let h = f.cell_width();
    let n = f.len();
    let samples = f.samples();
    let far = points
        .iter()
        .map(|&x| (x - left).abs().max((x - right).abs()))
        .fold(0.0, f64::max);
    let eps = dilation_grid(h, (right - left) + far);
    Ok(points
        .par_iter()
        .map(|&x| {
            let mut best = 0.0f64;
            for &e in &eps {
                let lo = ((x - e - left) / h).floor().max(0.0) as usize;
                let hi = (((x + e - left) / h).ceil().max(0.0) as usize).min(n);
                if lo >= hi {
                    continue;
                }
                let mut acc = Complex64::new(0.0, 0.0);
                let mut upper = mollifier.cdf((x - (left + lo as f64 * h)) / e);
                for (j, z) in samples.iter().enumerate().take(hi).skip(lo) {
                    let b = left + (j + 1) as f64 * h;
                    let lower = mollifier.cdf((x - b) / e);
                    acc += z * (upper - lower);
                    upper = lower;
                }
                best = best.max(acc.norm());
            }
            best
        })
        .collect())
}

/// `(1/2pi) int_a^b P_r(t) dt` on `[-pi, pi]`, written through the closed form.
fn poisson_cdf(c: f64, t: f64) -> f64 {
    if t >= PI {
        return 0.5;
    }
    if t <= -PI {
        return -0.5;
    }
    (c * (0.5 * t).tan()).atan() / PI
}

fn poisson_cell_mass(c: f64, lo: f64, hi: f64) -> f64 {
    if hi > PI {
        (0.5 - poisson_cdf(c, lo)) + (poisson_cdf(c, hi - TAU) + 0.5)
    } else if lo < -PI {
        (poisson_cdf(c, hi) + 0.5) + (0.5 - poisson_cdf(c, lo + TAU))
    } else {
        poisson_cdf(c, hi) - poisson_cdf(c, lo)
    }
}

/// `sup_r |P_r * f|` at cell midpoints for `r = 1 - 2^-j`, `j = 0..=r_levels`.
///
/// The Poisson kernel is integrated exactly over each cell, so the convolution of the
/// piecewise-constant function is an exact circular convolution of samples, done by FFT.
pub fn radial_poisson_maximal(f: &GridFunction, r_levels: u32) -> Result<GridFunction> {
    f.torus_depth()?;
    let n = f.len();
    let h = f.cell_width();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fhat = f.samples().to_vec();
    fwd.process(&mut fhat);

    let levels: Vec<u32> = (0..=r_levels).collect();
    let per_level: Vec<Vec<f64>> = levels
        .par_iter()
        .map(|&j| {
            let r = 1.0 - (-(j as f64)).exp2();
            let c = (1.0 + r) / (1.0 - r);
            let mut kernel: Vec<Complex64> = (0..n)
                .map(|d| {
                    let dd = if d <= n / 2 { d as f64 } else { d as f64 - n as f64 };
                    let mass = poisson_cell_mass(c, (dd - 0.5) * h, (dd + 0.5) * h);
                    Complex64::new(mass, 0.0)
                })
                .collect();
            fwd.process(&mut kernel);
            let mut u: Vec<Complex64> = kernel.iter().zip(&fhat).map(|(k, g)| k * g).collect();
            inv.process(&mut u);
            u.iter().map(|z| z.norm() / n as f64).collect()
        })
        .collect();
    let best: Vec<Complex64> = (0..n)
        .map(|i| {
            let m = per_level.iter().map(|v| v[i]).fold(0.0, f64::max);
            Complex64::new(m, 0.0)
        })
        .collect();
    f.with_samples(best)
}
