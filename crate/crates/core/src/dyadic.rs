//! Dyadic arcs of the two shifted systems, Haar transforms, square and maximal functions.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::orlicz::{self, psi0};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Offset of a dyadic system: arcs start at `2*pi*(m/2^k + shift)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Shift {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1/3")]
    Third,
}

impl Shift {
    pub fn fraction(self) -> f64 {
        match self {
            Shift::Zero => 0.0,
            Shift::Third => 1.0 / 3.0,
        }
    }

    /// Offset in cells on a grid of `3 * 2^depth` cells.
    pub fn cell_offset(self, depth: u32) -> usize {
        match self {
            Shift::Zero => 0,
            Shift::Third => 1usize << depth,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(Shift::Zero),
            "1/3" => Ok(Shift::Third),
            _ => Err(Error::InvalidParameter(format!("unknown shift {s:?}"))),
        }
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shift::Zero => "0",
            Shift::Third => "1/3",
        })
    }
}

/// Dyadic arc `[2pi(2^-k m + shift), 2pi(2^-k (m+1) + shift))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub shift: Shift,
    #[serde(rename = "k")]
    pub generation: u32,
    #[serde(rename = "m")]
    pub index: u64,
}

/// Cell indices of an arc, in order from its start, wrapping around the circle.
#[derive(Debug, Clone)]
pub struct ArcCells {
    start: usize,
    pos: usize,
    len: usize,
    n: usize,
}

impl Iterator for ArcCells {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.pos == self.len {
            return None;
        }
        let j = (self.start + self.pos) % self.n;
        self.pos += 1;
        Some(j)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.len - self.pos;
        (r, Some(r))
    }
}

impl ExactSizeIterator for ArcCells {}

impl Arc {
    pub fn new(shift: Shift, generation: u32, index: u64) -> Result<Self> {
        if generation >= 63 || index >> generation != 0 {
            return Err(Error::InvalidParameter(format!(
                "arc index {index} out of range at generation {generation}"
            )));
        }
        Ok(Self {
            shift,
            generation,
            index,
        })
    }

    pub fn root(shift: Shift) -> Self {
        Self {
            shift,
            generation: 0,
            index: 0,
        }
    }

    pub fn length(&self) -> f64 {
        TAU / (1u64 << self.generation) as f64
    }

    pub fn start_angle(&self) -> f64 {
        TAU * (self.index as f64 / (1u64 << self.generation) as f64 + self.shift.fraction())
    }

    /// Left half first, as in the Haar sign convention.
    pub fn children(&self) -> [Arc; 2] {
        let g = self.generation + 1;
        [
            Arc {
                shift: self.shift,
                generation: g,
                index: 2 * self.index,
            },
            Arc {
                shift: self.shift,
                generation: g,
                index: 2 * self.index + 1,
            },
        ]
    }

    pub fn parent(&self) -> Option<Arc> {
        (self.generation > 0).then(|| Arc {
            shift: self.shift,
            generation: self.generation - 1,
            index: self.index / 2,
        })
    }

    /// True when `other` is this arc or one of its descendants.
    pub fn contains(&self, other: &Arc) -> bool {
        self.shift == other.shift
            && other.generation >= self.generation
            && other.index >> (other.generation - self.generation) == self.index
    }

    fn check_depth(&self, depth: u32) -> Result<()> {
        if self.generation > depth {
            return Err(Error::Misaligned {
                generation: self.generation,
                depth,
            });
        }
        Ok(())
    }

    pub fn cell_len(&self, depth: u32) -> Result<usize> {
        self.check_depth(depth)?;
        Ok(3usize << (depth - self.generation))
    }

    pub fn cell_start(&self, depth: u32) -> Result<usize> {
        let len = self.cell_len(depth)?;
        let n = 3usize << depth;
        Ok((self.index as usize * len + self.shift.cell_offset(depth)) % n)
    }

    pub fn cells(&self, depth: u32) -> Result<ArcCells> {
        Ok(ArcCells {
            start: self.cell_start(depth)?,
            pos: 0,
            len: self.cell_len(depth)?,
            n: 3usize << depth,
        })
    }

    /// Position of the arc in generation-major order.
    pub fn heap_index(&self) -> usize {
        (1usize << self.generation) - 1 + self.index as usize
    }

    pub fn from_heap_index(shift: Shift, i: usize) -> Self {
        let generation = (i + 1).ilog2();
        Self {
            shift,
            generation,
            index: (i + 1 - (1usize << generation)) as u64,
        }
    }
}

/// All arcs of generations `0..generations` in generation-major order.
pub fn arcs(shift: Shift, generations: u32) -> impl Iterator<Item = Arc> {
    (0..(1usize << generations) - 1).map(move |i| Arc::from_heap_index(shift, i))
}

/// Samples rotated so that the system's root arc starts at index 0.
fn rotate_in(f: &[Complex64], offset: usize) -> Vec<Complex64> {
    let n = f.len();
    (0..n).map(|i| f[(i + offset) % n]).collect()
}

fn rotate_out(v: &[Complex64], offset: usize) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![ZERO; n];
    for (i, &z) in v.iter().enumerate() {
        out[(i + offset) % n] = z;
    }
    out
}

/// Finite Haar expansion in one dyadic system on a grid of depth N.
///
/// Carries the mean, the coefficients `<f, h_I>` for generations `0..N`, and the
/// part of the samples finer than the generation-N arcs (empty when zero).
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    shift: Shift,
    depth: u32,
    mean: Complex64,
    coeffs: Vec<Complex64>,
    residual: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    k: u32,
    m: u64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CoeffFile {
    shift: Shift,
    depth: u32,
    f0: [f64; 2],
    coeffs: Vec<CoeffEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residual: Option<Vec<[f64; 2]>>,
}

impl HaarCoefficients {
    pub fn zero(shift: Shift, depth: u32) -> Self {
        Self {
            shift,
            depth,
            mean: ZERO,
            coeffs: vec![ZERO; (1usize << depth) - 1],
            residual: Vec::new(),
        }
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn n_cells(&self) -> usize {
        3usize << self.depth
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    pub fn set_mean(&mut self, z: Complex64) {
        self.mean = z;
    }

    /// Coefficients in generation-major order (see [`Arc::heap_index`]).
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn residual(&self) -> &[Complex64] {
        &self.residual
    }

    /// Largest sample of the sub-resolution part; zero for finite expansions.
    pub fn residual_sup(&self) -> f64 {
        self.residual.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn clear_residual(&mut self) {
        self.residual.clear();
    }

    fn check_arc(&self, arc: &Arc) -> Result<()> {
        if arc.shift != self.shift || arc.generation >= self.depth {
            return Err(Error::Misaligned {
                generation: arc.generation,
                depth: self.depth,
            });
        }
        Ok(())
    }

    pub fn get(&self, arc: &Arc) -> Result<Complex64> {
        self.check_arc(arc)?;
        Ok(self.coeffs[arc.heap_index()])
    }

    pub fn set(&mut self, arc: &Arc, z: Complex64) -> Result<()> {
        self.check_arc(arc)?;
        self.coeffs[arc.heap_index()] = z;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Arc, Complex64)> + '_ {
        let shift = self.shift;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &z)| (Arc::from_heap_index(shift, i), z))
    }

    pub fn same_system(&self, other: &Self) -> Result<()> {
        if self.shift != other.shift || self.depth != other.depth {
            return Err(Error::Mismatch(format!(
                "expansions in system {} depth {} and system {} depth {}",
                self.shift, self.depth, other.shift, other.depth
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_system(other)?;
        let residual = match (self.residual.is_empty(), other.residual.is_empty()) {
            (true, _) => other.residual.clone(),
            (_, true) => self.residual.clone(),
            _ => self
                .residual
                .iter()
                .zip(&other.residual)
                .map(|(a, b)| a + b)
                .collect(),
        };
        Ok(Self {
            shift: self.shift,
            depth: self.depth,
            mean: self.mean + other.mean,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            residual,
        })
    }

    /// Keeps the coefficients of arcs inside `arc`, dropping the mean.
    pub fn project_onto(&self, arc: &Arc) -> Result<Self> {
        if arc.shift != self.shift || arc.generation > self.depth {
            return Err(Error::Misaligned {
                generation: arc.generation,
                depth: self.depth,
            });
        }
        let mut out = Self::zero(self.shift, self.depth);
        for (i, (a, z)) in self.iter().enumerate() {
            if arc.contains(&a) {
                out.coeffs[i] = z;
            }
        }
        Ok(out)
    }

    /// Average over every arc of generations `0..depth`, in heap order.
    pub fn arc_averages(&self) -> Vec<Complex64> {
        let mut avg = vec![ZERO; self.coeffs.len()];
        if avg.is_empty() {
            return avg;
        }
        avg[0] = self.mean;
        for i in 0..avg.len() {
            let arc = Arc::from_heap_index(self.shift, i);
            let step = self.coeffs[i] / arc.length().sqrt();
            for (s, child) in arc.children().iter().enumerate() {
                let j = child.heap_index();
                if j < avg.len() {
                    avg[j] = if s == 0 { avg[i] + step } else { avg[i] - step };
                }
            }
        }
        avg
    }

    pub fn to_json(&self) -> Result<String> {
        let coeffs = self
            .iter()
            .filter(|(_, z)| *z != ZERO)
            .map(|(a, z)| CoeffEntry {
                k: a.generation,
                m: a.index,
                re: z.re,
                im: z.im,
            })
            .collect();
        let residual =
            (!self.residual.is_empty()).then(|| self.residual.iter().map(|z| [z.re, z.im]).collect());
        Ok(serde_json::to_string(&CoeffFile {
            shift: self.shift,
            depth: self.depth,
            f0: [self.mean.re, self.mean.im],
            coeffs,
            residual,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CoeffFile = serde_json::from_str(text)?;
        if file.depth > crate::grid::MAX_DEPTH {
            return Err(Error::InvalidParameter(format!("depth {}", file.depth)));
        }
        let mut out = Self::zero(file.shift, file.depth);
        out.mean = Complex64::new(file.f0[0], file.f0[1]);
        for e in file.coeffs {
            let arc = Arc::new(file.shift, e.k, e.m)?;
            out.set(&arc, Complex64::new(e.re, e.im))?;
        }
        if let Some(r) = file.residual {
            if r.len() != out.n_cells() {
                return Err(Error::Mismatch("residual length".into()));
            }
            out.residual = r.into_iter().map(|[a, b]| Complex64::new(a, b)).collect();
        }
        Ok(out)
    }
}

/// Haar analysis in the given system: block sums on a pyramid, O(n).
pub fn analyze(f: &GridFunction, shift: Shift) -> Result<HaarCoefficients> {
    let depth = f.torus_depth()?;
    let n = f.len();
    let h = f.cell_width();
    let offset = shift.cell_offset(depth);
    let rot = rotate_in(f.samples(), offset);

    // integrals over the finest arcs (3 cells each)
    let mut sums: Vec<Complex64> = rot.chunks(3).map(|c| c.iter().sum::<Complex64>() * h).collect();
    let mut out = HaarCoefficients::zero(shift, depth);

    let mut residual = vec![ZERO; n];
    let mut nonzero = false;
    for (b, chunk) in rot.chunks(3).enumerate() {
        let avg = sums[b] / (3.0 * h);
        for (i, &z) in chunk.iter().enumerate() {
            let r = z - avg;
            if r != ZERO {
                nonzero = true;
            }
            residual[3 * b + i] = r;
        }
    }
    if nonzero {
        out.residual = rotate_out(&residual, offset);
    }

    for k in (0..depth).rev() {
        let scale = (TAU / (1u64 << k) as f64).sqrt().recip();
        let base = (1usize << k) - 1;
        let mut parent = Vec::with_capacity(sums.len() / 2);
        for (m, pair) in sums.chunks(2).enumerate() {
            out.coeffs[base + m] = (pair[0] - pair[1]) * scale;
            parent.push(pair[0] + pair[1]);
        }
        sums = parent;
    }
    out.mean = sums[0] / TAU;
    Ok(out)
}

/// Values of the finite expansion on the finest arcs, in rotated order.
fn block_values(c: &HaarCoefficients) -> Vec<Complex64> {
    let mut v = vec![c.mean];
    for k in 0..c.depth {
        let scale = (TAU / (1u64 << k) as f64).sqrt().recip();
        let base = (1usize << k) - 1;
        let mut next = Vec::with_capacity(2 * v.len());
        for (m, &x) in v.iter().enumerate() {
            let step = c.coeffs[base + m] * scale;
            next.push(x + step);
            next.push(x - step);
        }
        v = next;
    }
    v
}

pub fn synthesize(c: &HaarCoefficients) -> GridFunction {
    let blocks = block_values(c);
    let rot: Vec<Complex64> = blocks.iter().flat_map(|&z| [z, z, z]).collect();
    let mut samples = rotate_out(&rot, c.shift.cell_offset(c.depth));
    if !c.residual.is_empty() {
        for (s, r) in samples.iter_mut().zip(&c.residual) {
            *s += r;
        }
    }
    GridFunction::torus(samples).expect("3*2^N cells by construction")
}

/// `S f = |f0| + (sum |f_I|^2 chi_I / |I|)^(1/2)`.
pub fn square_function(c: &HaarCoefficients) -> GridFunction {
    let mut q = vec![0.0f64];
    for k in 0..c.depth {
        let inv_len = (1u64 << k) as f64 / TAU;
        let base = (1usize << k) - 1;
        let mut next = Vec::with_capacity(2 * q.len());
        for (m, &x) in q.iter().enumerate() {
            let add = c.coeffs[base + m].norm_sqr() * inv_len;
            next.push(x + add);
            next.push(x + add);
        }
        q = next;
    }
    let m0 = c.mean.norm();
    let rot: Vec<Complex64> = q
        .iter()
        .flat_map(|&x| {
            let s = Complex64::new(m0 + x.sqrt(), 0.0);
            [s, s, s]
        })
        .collect();
    GridFunction::torus(rotate_out(&rot, c.shift.cell_offset(c.depth))).expect("valid grid")
}

/// `E_k f`: averages over the arcs of generation `level`.
pub fn conditional_expectation(f: &GridFunction, shift: Shift, level: u32) -> Result<GridFunction> {
    let depth = f.torus_depth()?;
    if level > depth {
        return Err(Error::Misaligned {
            generation: level,
            depth,
        });
    }
    let offset = shift.cell_offset(depth);
    let rot = rotate_in(f.samples(), offset);
    let block = 3usize << (depth - level);
    let mut out = Vec::with_capacity(rot.len());
    for chunk in rot.chunks(block) {
        let avg = chunk.iter().sum::<Complex64>() / block as f64;
        out.extend(std::iter::repeat_n(avg, block));
    }
    f.with_samples(rotate_out(&out, offset))
}

/// `sup_k |E_k f|` over generations `0..=N`.
pub fn dyadic_maximal(f: &GridFunction, shift: Shift) -> Result<GridFunction> {
    let depth = f.torus_depth()?;
    let offset = shift.cell_offset(depth);
    let rot = rotate_in(f.samples(), offset);
    let mut best = vec![0.0f64; rot.len()];
    for level in 0..=depth {
        let block = 3usize << (depth - level);
        for (b, chunk) in rot.chunks(block).enumerate() {
            let avg = (chunk.iter().sum::<Complex64>() / block as f64).norm();
            for v in &mut best[b * block..(b + 1) * block] {
                *v = v.max(avg);
            }
        }
    }
    let rot: Vec<Complex64> = best.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    f.with_samples(rotate_out(&rot, offset))
}

/// Luxemburg quasi-norm of the square function with `psi0` and measure `dtheta / 2pi`.
pub fn hlog_dyadic_quasinorm(c: &HaarCoefficients) -> Result<f64> {
    let s = square_function(c);
    orlicz::luxemburg_norm_grid(&s, &orlicz::OrliczSpec::psi0(), 1.0 / TAU)
}

/// `|1-p|^(-1/p) (int psi0(S f))^(1/p)`.
pub fn power_diagnostic(c: &HaarCoefficients, p: f64) -> Result<f64> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("power {p} outside (1/2, 1)")));
    }
    let s = square_function(c);
    let h = s.cell_width();
    let mass: f64 = s.samples().iter().map(|z| psi0(z.re)).sum::<f64>() * h;
    Ok((1.0 - p).abs().powf(-1.0 / p) * mass.powf(1.0 / p))
}

/// `sum_{|I| = 2pi 2^-k} |f_I|^p |I|^(1 - p/2)`.
pub fn level_power_sum(c: &HaarCoefficients, generation: u32, p: f64) -> f64 {
    if generation >= c.depth {
        return 0.0;
    }
    let len = TAU / (1u64 << generation) as f64;
    let base = (1usize << generation) - 1;
    c.coeffs[base..base + (1usize << generation)]
        .iter()
        .map(|z| z.norm().powf(p) * len.powf(1.0 - p / 2.0))
        .sum()
}

/// Grid function of a single Haar function `h_I`.
pub fn haar_function(arc: &Arc, depth: u32) -> Result<GridFunction> {
    if arc.generation >= depth {
        return Err(Error::Misaligned {
            generation: arc.generation,
            depth,
        });
    }
    let mut c = HaarCoefficients::zero(arc.shift, depth);
    c.set(arc, Complex64::new(1.0, 0.0))?;
    Ok(synthesize(&c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn heap_index_round_trips() {
        for i in 0..200 {
            let a = Arc::from_heap_index(Shift::Third, i);
            assert_eq!(a.heap_index(), i);
        }
    }

    #[test]
    fn third_shift_root_starts_at_two_pi_over_three() {
        let a = Arc::root(Shift::Third);
        assert_eq!(a.cell_start(4).unwrap(), 16);
        assert!((a.start_angle() - TAU / 3.0).abs() < 1e-15);
        let last = Arc::new(Shift::Third, 2, 3).unwrap();
        let cells: Vec<usize> = last.cells(2).unwrap().collect();
        assert_eq!(cells, vec![1, 2, 3]);
    }

    #[test]
    fn generation_beyond_depth_is_misaligned() {
        let a = Arc::new(Shift::Zero, 5, 0).unwrap();
        assert!(matches!(a.cells(4), Err(Error::Misaligned { .. })));
    }

    #[test]
    fn constant_has_only_a_mean() {
        let f = GridFunction::torus_real(&[2.5; 48]).unwrap();
        for shift in [Shift::Zero, Shift::Third] {
            let a = analyze(&f, shift).unwrap();
            assert!((a.mean() - c(2.5)).norm() < 1e-14);
            assert!(a.coeffs().iter().all(|z| z.norm() < 1e-13));
            assert!(a.residual_sup() < 1e-14);
        }
    }

    #[test]
    fn indicator_of_left_half_has_one_coefficient() {
        // chi_[0, pi) = 1/2 + (sqrt(2pi)/2) h_root
        let mut v = vec![0.0; 48];
        v[..24].fill(1.0);
        let f = GridFunction::torus_real(&v).unwrap();
        let a = analyze(&f, Shift::Zero).unwrap();
        assert!((a.mean().re - 0.5).abs() < 1e-15);
        assert!((a.coeffs()[0].re - TAU.sqrt() / 2.0).abs() < 1e-14);
        assert!(a.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn single_coefficient_gives_flat_square_function() {
        let mut a = HaarCoefficients::zero(Shift::Zero, 4);
        let arc = Arc::new(Shift::Zero, 2, 1).unwrap();
        a.set(&arc, c(3.0)).unwrap();
        let s = square_function(&a);
        let level = 3.0 / arc.length().sqrt();
        for (j, z) in s.samples().iter().enumerate() {
            let inside = (12..24).contains(&j);
            let want = if inside { level } else { 0.0 };
            assert!((z.re - want).abs() < 1e-13, "cell {j}");
        }
    }

    #[test]
    fn maximal_of_left_half_indicator() {
        let mut v = vec![0.0; 12];
        v[..6].fill(1.0);
        let f = GridFunction::torus_real(&v).unwrap();
        let m = dyadic_maximal(&f, Shift::Zero).unwrap();
        for (j, z) in m.samples().iter().enumerate() {
            assert!((z.re - if j < 6 { 1.0 } else { 0.5 }).abs() < 1e-15);
        }
    }

    #[test]
    fn quasinorm_of_constant() {
        let mut a = HaarCoefficients::zero(Shift::Zero, 3);
        a.set_mean(c(1.0));
        let t_star = crate::orlicz::psi0_inverse(1.0);
        assert!((hlog_dyadic_quasinorm(&a).unwrap() - 1.0 / t_star).abs() < 1e-8);
    }

    #[test]
    fn coefficient_dump_round_trips() {
        let mut a = HaarCoefficients::zero(Shift::Third, 3);
        a.set_mean(Complex64::new(0.25, -1.0));
        a.set(&Arc::new(Shift::Third, 2, 3).unwrap(), Complex64::new(-1.5, 0.125))
            .unwrap();
        a.set(&Arc::new(Shift::Third, 0, 0).unwrap(), c(7.0)).unwrap();
        let text = a.to_json().unwrap();
        assert!(text.starts_with(r#"{"shift":"1/3""#));
        let first = text.find("\"k\":0").unwrap();
        let second = text.find("\"k\":2").unwrap();
        assert!(first < second);
        assert_eq!(HaarCoefficients::from_json(&text).unwrap(), a);
    }
}
