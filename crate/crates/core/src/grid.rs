//! Piecewise-constant functions on the circle or on a bounded interval.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::Arc;
use crate::error::{Error, Result};

/// Deepest torus grid accepted (3 * 2^20 cells).
pub const MAX_DEPTH: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Torus,
    Line([f64; 2]),
}

/// Samples are cell values: sample `j` is the value on `[left + j h, left + (j+1) h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: Domain,
    samples: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct GridFile {
    domain: Domain,
    n_samples: usize,
    samples_re: Vec<f64>,
    samples_im: Vec<f64>,
}

/// Returns N when `n == 3 * 2^N`.
pub fn torus_depth(n: usize) -> Option<u32> {
    if n == 0 || !n.is_multiple_of(3) {
        return None;
    }
    let m = n / 3;
    if !m.is_power_of_two() {
        return None;
    }
    let d = m.trailing_zeros();
    (d <= MAX_DEPTH).then_some(d)
}

impl GridFunction {
    pub fn torus(samples: Vec<Complex64>) -> Result<Self> {
        if torus_depth(samples.len()).is_none() {
            return Err(Error::InvalidSampleCount {
                got: samples.len(),
                max_depth: MAX_DEPTH,
            });
        }
        Ok(Self {
            domain: Domain::Torus,
            samples,
        })
    }

    pub fn line(left: f64, right: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && left < right) {
            return Err(Error::InvalidDomain { left, right });
        }
        if samples.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            domain: Domain::Line([left, right]),
            samples,
        })
    }

    pub fn torus_real(values: &[f64]) -> Result<Self> {
        Self::torus(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn line_real(left: f64, right: f64, values: &[f64]) -> Result<Self> {
        Self::line(
            left,
            right,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Samples `g` at the cell midpoints of the depth-`depth` torus grid.
    pub fn torus_from_fn(depth: u32, g: impl Fn(f64) -> Complex64) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::InvalidSampleCount {
                got: 3usize << depth.min(40),
                max_depth: MAX_DEPTH,
            });
        }
        let n = 3usize << depth;
        let h = TAU / n as f64;
        Self::torus((0..n).map(|j| g((j as f64 + 0.5) * h)).collect())
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            domain: self.domain,
            samples: vec![Complex64::new(0.0, 0.0); self.samples.len()],
        }
    }

    /// Same domain, new samples.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != self.samples.len() {
            return Err(Error::Mismatch(format!(
                "{} samples for a grid of {}",
                samples.len(),
                self.samples.len()
            )));
        }
        Ok(Self {
            domain: self.domain,
            samples,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_torus(&self) -> bool {
        self.domain == Domain::Torus
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Torus depth N, or `None` on a line.
    pub fn depth(&self) -> Option<u32> {
        match self.domain {
            Domain::Torus => torus_depth(self.samples.len()),
            Domain::Line(_) => None,
        }
    }

    pub fn torus_depth(&self) -> Result<u32> {
        self.depth().ok_or(Error::WrongDomain { expected: "torus" })
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self.domain {
            Domain::Torus => (0.0, TAU),
            Domain::Line([l, r]) => (l, r),
        }
    }

    pub fn cell_width(&self) -> f64 {
        let (l, r) = self.bounds();
        (r - l) / self.samples.len() as f64
    }

    pub fn cell_left(&self, j: usize) -> f64 {
        let (l, r) = self.bounds();
        l + (r - l) * j as f64 / self.samples.len() as f64
    }

    pub fn cell_mid(&self, j: usize) -> f64 {
        let (l, r) = self.bounds();
        l + (r - l) * (j as f64 + 0.5) / self.samples.len() as f64
    }

    pub fn integrate(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * self.cell_width()
    }

    /// Average over the domain.
    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.samples.len() as f64
    }

    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).sum::<f64>() * self.cell_width()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_width()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    /// Average over a dyadic arc.
    pub fn restrict_mean(&self, arc: &Arc) -> Result<Complex64> {
        let depth = self.torus_depth()?;
        let cells = arc.cells(depth)?;
        let n = cells.len();
        Ok(cells.map(|j| self.samples[j]).sum::<Complex64>() / n as f64)
    }

    pub fn map(&self, g: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            domain: self.domain,
            samples: self.samples.iter().map(|&z| g(z)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &Self,
        g: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.domain != other.domain || self.len() != other.len() {
            return Err(Error::Mismatch("grids differ".into()));
        }
        Ok(Self {
            domain: self.domain,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| g(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    /// Largest pointwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Mismatch("grids differ".into()));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> Result<String> {
        let file = GridFile {
            domain: self.domain,
            n_samples: self.samples.len(),
            samples_re: self.samples.iter().map(|z| z.re).collect(),
            samples_im: self.samples.iter().map(|z| z.im).collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GridFile = serde_json::from_str(text)?;
        if file.samples_re.len() != file.n_samples || file.samples_im.len() != file.n_samples {
            return Err(Error::Mismatch(format!(
                "n_samples is {} but arrays hold {} and {}",
                file.n_samples,
                file.samples_re.len(),
                file.samples_im.len()
            )));
        }
        let samples = file
            .samples_re
            .into_iter()
            .zip(file.samples_im)
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        match file.domain {
            Domain::Torus => Self::torus(samples),
            Domain::Line([l, r]) => Self::line(l, r, samples),
        }
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_torus_counts() {
        assert!(GridFunction::torus_real(&[1.0; 7]).is_err());
        assert!(GridFunction::torus_real(&[1.0; 9]).is_err());
        assert!(GridFunction::torus_real(&[]).is_err());
        assert_eq!(GridFunction::torus_real(&[1.0; 24]).unwrap().depth(), Some(3));
    }

    #[test]
    fn constant_integrates_to_tau() {
        let f = GridFunction::torus_real(&[1.0; 96]).unwrap();
        assert!((f.integrate().re - TAU).abs() < 1e-13);
        assert!((f.mean().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let f = GridFunction::torus_from_fn(4, |t| Complex64::new(t.sin() / 3.0, t.cos() * 1e-7))
            .unwrap();
        let g = GridFunction::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(f, g);
        let l = GridFunction::line_real(-1.5, 2.0, &[0.1, 0.2, 1.0 / 3.0]).unwrap();
        let text = l.to_json().unwrap();
        assert!(text.contains("\"line\":[-1.5,2.0]"));
        assert_eq!(GridFunction::from_json(&text).unwrap(), l);
    }

    #[test]
    fn json_rejects_short_arrays() {
        let text = r#"{"domain":"torus","n_samples":3,"samples_re":[1,2,3],"samples_im":[0]}"#;
        assert!(GridFunction::from_json(text).is_err());
    }
}
