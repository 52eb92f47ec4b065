//! Seeded test inputs: random finite Haar expansions with heavy-tailed coefficients,
//! spikes, lacunary chains and random atoms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use sha2::{Digest, Sha256};

use crate::dyadic::{self, Arc, HaarCoefficients, Shift};
use crate::grid::GridFunction;

/// Independent generator per `(seed, label)`, so corpora do not shift when others change.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let digest = Sha256::digest(label.as_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from_le_bytes(digest[..8].try_into().expect("8 bytes")));
    rng
}

fn heavy(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    LogNormal::new(0.0, sigma).expect("valid sigma").sample(rng)
}

fn signed(rng: &mut ChaCha8Rng, magnitude: f64, complex: bool) -> Complex64 {
    if complex {
        Complex64::from_polar(magnitude, rng.gen_range(0.0..std::f64::consts::TAU))
    } else if rng.gen_bool(0.5) {
        Complex64::new(magnitude, 0.0)
    } else {
        Complex64::new(-magnitude, 0.0)
    }
}

fn random_shift(rng: &mut ChaCha8Rng) -> Shift {
    if rng.gen_bool(0.5) {
        Shift::Zero
    } else {
        Shift::Third
    }
}

/// Sparse expansion whose terms `f_I h_I` have log-normal sup norms.
pub fn random_coefficients(
    rng: &mut ChaCha8Rng,
    shift: Shift,
    depth: u32,
    complex: bool,
    mean_zero: bool,
) -> HaarCoefficients {
    let mut c = HaarCoefficients::zero(shift, depth);
    if !mean_zero {
        let m = heavy(rng, 1.0);
        c.set_mean(signed(rng, m, complex));
    }
    let density = rng.gen_range(0.1..0.6);
    for arc in dyadic::arcs(shift, depth) {
        if rng.gen_bool(density) {
            let sup = heavy(rng, 1.5);
            let z = signed(rng, sup * arc.length().sqrt(), complex);
            c.set(&arc, z).expect("arc within depth");
        }
    }
    c
}

fn random_arc(rng: &mut ChaCha8Rng, shift: Shift, max_generation: u32) -> Arc {
    let k = rng.gen_range(0..=max_generation);
    Arc::new(shift, k, rng.gen_range(0..1u64 << k)).expect("index in range")
}

/// Adds `height * chi_arc` for a random arc of either system.
fn add_spike(rng: &mut ChaCha8Rng, f: &mut GridFunction, depth: u32, height: f64) {
    let shift = random_shift(rng);
    let arc = random_arc(rng, shift, depth);
    let cells: Vec<usize> = arc.cells(depth).expect("aligned").collect();
    for j in cells {
        f.samples_mut()[j] += height;
    }
}

/// `sum_k c_k h_{I_k}` along a random chain of nested arcs, with `|c_k| ~ |I_k|^(1/2) r^k`.
fn lacunary(rng: &mut ChaCha8Rng, depth: u32, shift: Shift) -> HaarCoefficients {
    let mut c = HaarCoefficients::zero(shift, depth);
    let growth: f64 = rng.gen_range(1.0..1.6);
    let mut arc = Arc::root(shift);
    for k in 0..depth {
        let z = signed(rng, arc.length().sqrt() * growth.powi(k as i32), false);
        c.set(&arc, z).expect("arc within depth");
        arc = arc.children()[rng.gen_range(0..2)];
    }
    c
}

/// Mixed corpus on the circle: generic expansions, spiked expansions and lacunary chains.
pub fn function_corpus(depth: u32, seed: u64, count: usize, mean_zero: bool) -> Vec<GridFunction> {
    let mut rng = stream(seed, if mean_zero { "functions/mean-zero" } else { "functions" });
    (0..count)
        .map(|i| {
            let shift = random_shift(&mut rng);
            let mut f = match i % 10 {
                0 => dyadic::synthesize(&lacunary(&mut rng, depth, shift)),
                _ => dyadic::synthesize(&random_coefficients(
                    &mut rng,
                    shift,
                    depth,
                    i % 5 == 1,
                    mean_zero,
                )),
            };
            if i % 5 == 2 {
                let height = 10f64.powf(rng.gen_range(0.5..3.0));
                add_spike(&mut rng, &mut f, depth, height);
                if mean_zero {
                    let m = f.mean();
                    f = f.map(|z| z - m);
                }
            }
            f
        })
        .collect()
}

/// Pairs of finite expansions in a common system.
pub fn expansion_pairs(
    depth: u32,
    seed: u64,
    count: usize,
) -> Vec<(HaarCoefficients, HaarCoefficients)> {
    let mut rng = stream(seed, "pairs");
    (0..count)
        .map(|i| {
            let shift = random_shift(&mut rng);
            let complex = i % 4 == 3;
            (
                random_coefficients(&mut rng, shift, depth, complex, false),
                random_coefficients(&mut rng, shift, depth, complex, false),
            )
        })
        .collect()
}

/// Mean-zero functions supported on a random arc of either system, with log-normal size.
pub fn atom_corpus(depth: u32, seed: u64, count: usize) -> Vec<(Arc, GridFunction)> {
    let mut rng = stream(seed, "atoms");
    (0..count)
        .map(|i| {
            let shift = random_shift(&mut rng);
            let arc = random_arc(&mut rng, shift, depth - 1);
            if i % 3 == 2 {
                let c = arc_expansion(&mut rng, arc, depth, i % 4 == 3);
                return (arc, dyadic::synthesize(&c));
            }
            let n = 3usize << depth;
            let mut samples = vec![Complex64::new(0.0, 0.0); n];
            let cells: Vec<usize> = arc.cells(depth).expect("aligned").collect();
            let complex = i % 4 == 3;
            for &j in &cells {
                samples[j] = match i % 3 {
                    // two-valued, like a Haar function with jitter
                    0 => {
                        let half = (j + n - cells[0]) % n < cells.len() / 2;
                        let v = if half { 1.0 } else { -1.0 };
                        Complex64::new(v + 0.1 * rng.gen_range(-1.0..1.0), 0.0)
                    }
                    _ => {
                        let m = heavy(&mut rng, 1.0);
                        signed(&mut rng, m, complex)
                    }
                };
            }
            let mean: Complex64 = cells.iter().map(|&j| samples[j]).sum::<Complex64>() / cells.len() as f64;
            let scale = heavy(&mut rng, 1.5);
            for &j in &cells {
                samples[j] = (samples[j] - mean) * scale;
            }
            (arc, GridFunction::torus(samples).expect("torus length"))
        })
        .collect()
}

/// Mean-zero finite expansion on the descendants of `arc` (generations below `depth`).
pub fn arc_expansion(rng: &mut ChaCha8Rng, arc: Arc, depth: u32, complex: bool) -> HaarCoefficients {
    let mut c = HaarCoefficients::zero(arc.shift, depth);
    let mut level = vec![arc];
    while level[0].generation < depth {
        for a in &level {
            if a == &arc || rng.gen_bool(0.5) {
                let m = heavy(rng, 1.0) * a.length().sqrt();
                let z = signed(rng, m, complex);
                c.set(a, z).expect("arc within depth");
            }
        }
        level = level.iter().flat_map(|a| a.children()).collect();
    }
    c
}

/// Dyadic `H^1` atoms: finite expansions on an arc with `||a||_2 = |arc|^(-1/2)`.
pub fn h1_atoms(depth: u32, seed: u64, count: usize) -> Vec<(Arc, HaarCoefficients)> {
    let mut rng = stream(seed, "h1-atoms");
    (0..count)
        .map(|i| {
            let shift = random_shift(&mut rng);
            let arc = random_arc(&mut rng, shift, depth - 1);
            let c = arc_expansion(&mut rng, arc, depth, i % 4 == 3);
            let energy: f64 = c.coeffs().iter().map(|z| z.norm_sqr()).sum();
            let scale = (arc.length() * energy).sqrt().recip();
            let mut out = HaarCoefficients::zero(arc.shift, depth);
            for (a, z) in c.iter() {
                out.set(&a, z * scale).expect("same system");
            }
            (arc, out)
        })
        .collect()
}

/// Nonnegative piecewise-constant functions on `[-1, 1]` with heights spanning several decades.
pub fn line_corpus(seed: u64, count: usize, cells: usize) -> Vec<GridFunction> {
    let mut rng = stream(seed, "line");
    (0..count)
        .map(|_| {
            let values: Vec<f64> = (0..cells)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        0.0
                    } else {
                        heavy(&mut rng, 2.0) * 4.0
                    }
                })
                .collect();
            GridFunction::line_real(-1.0, 1.0, &values).expect("valid interval")
        })
        .collect()
}

/// Nonnegative circle functions dominated by one tall narrow spike.
pub fn spiky_corpus(depth: u32, seed: u64, count: usize) -> Vec<GridFunction> {
    let mut rng = stream(seed, "spiky");
    (0..count)
        .map(|_| {
            let n = 3usize << depth;
            let background: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let mut f = GridFunction::torus_real(&background).expect("torus length");
            let height = 10f64.powf(rng.gen_range(7.0..14.0));
            let width = rng.gen_range(0..=3u32);
            let mut arc = Arc::new(Shift::Zero, depth, rng.gen_range(0..1u64 << depth))
                .expect("finest arc");
            for _ in 0..width {
                arc = arc.parent().expect("below the root");
            }
            for j in arc.cells(depth).expect("aligned") {
                f.samples_mut()[j] += height;
            }
            f
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_are_reproducible() {
        assert_eq!(function_corpus(5, 7, 12, false), function_corpus(5, 7, 12, false));
        assert_ne!(function_corpus(5, 7, 12, false), function_corpus(5, 8, 12, false));
    }

    #[test]
    fn atoms_have_mean_zero_and_arc_support() {
        for (arc, a) in atom_corpus(6, 3, 40) {
            let inside: Vec<usize> = arc.cells(6).unwrap().collect();
            for (j, z) in a.samples().iter().enumerate() {
                if !inside.contains(&j) {
                    assert_eq!(*z, Complex64::new(0.0, 0.0));
                }
            }
            assert!(a.integrate().norm() <= 1e-12 * a.sup_norm() * arc.length());
        }
    }

    #[test]
    fn mean_zero_corpus() {
        for f in function_corpus(6, 11, 30, true) {
            assert!(f.mean().norm() < 1e-12 * f.sup_norm().max(1.0));
        }
    }
}
