//! Dyadic paraproducts, BMO norms, the one-third covering and the product bound.
//!
//! Paraproducts act on the Haar part of an expansion; the sub-resolution part is ignored.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::atomic;
use crate::dyadic::{self, Arc, HaarCoefficients, Shift};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::maximal;
use crate::orlicz::{self, OrliczSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `sum_I f_I <b>_I h_I`, where the averages include the mean of `b`.
pub fn pi1(f: &HaarCoefficients, b: &HaarCoefficients) -> Result<HaarCoefficients> {
    f.same_system(b)?;
    let avg = b.arc_averages();
    let mut out = HaarCoefficients::zero(f.shift(), f.depth());
    for (i, (arc, z)) in f.iter().enumerate() {
        out.set(&arc, z * avg[i])?;
    }
    Ok(out)
}

/// `sum_J <f>_J b_J h_J`, where the averages include the mean of `f`.
pub fn pi2(f: &HaarCoefficients, b: &HaarCoefficients) -> Result<HaarCoefficients> {
    pi1(b, f)
}

/// `f0 b0 + sum_I f_I b_I chi_I / |I|`.
pub fn pi3(f: &HaarCoefficients, b: &HaarCoefficients) -> Result<GridFunction> {
    f.same_system(b)?;
    let depth = f.depth();
    let mut acc = vec![f.mean() * b.mean()];
    for k in 0..depth {
        let inv_len = (1u64 << k) as f64 / TAU;
        let base = (1usize << k) - 1;
        let mut next = Vec::with_capacity(2 * acc.len());
        for (m, &x) in acc.iter().enumerate() {
            let add = f.coeffs()[base + m] * b.coeffs()[base + m] * inv_len;
            next.push(x + add);
            next.push(x + add);
        }
        acc = next;
    }
    let n = 3usize << depth;
    let offset = f.shift().cell_offset(depth);
    let mut out = vec![ZERO; n];
    for (blk, &z) in acc.iter().enumerate() {
        for i in 0..3 {
            out[(3 * blk + i + offset) % n] = z;
        }
    }
    GridFunction::torus(out)
}

/// `(S, T)` with `S = Pi1(f, b)` and `T = Pi2(f, b) + Pi3(f, b)`, so `S + T = f b`.
pub fn split_product(
    f: &HaarCoefficients,
    b: &HaarCoefficients,
) -> Result<(GridFunction, GridFunction)> {
    let s = dyadic::synthesize(&pi1(f, b)?);
    let t = dyadic::synthesize(&pi2(f, b)?).add(&pi3(f, b)?)?;
    Ok((s, t))
}

/// Normalisation of the mean oscillation: `|I|^-1` or `|I|^-2` in front of the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum BmoExponent {
    #[default]
    One,
    Two,
}

/// `sup_I (|I|^-e int_I |b - <b>_I|^2)^(1/2) + |int b|` over arcs of generations `0..=N`.
pub fn bmo_plus_norm(b: &GridFunction, shift: Shift, exponent: BmoExponent) -> Result<f64> {
    let depth = b.torus_depth()?;
    let h = b.cell_width();
    let s = b.samples();
    let mut sup = 0.0f64;
    for k in 0..=depth {
        for m in 0..1u64 << k {
            let arc = Arc {
                shift,
                generation: k,
                index: m,
            };
            let avg = b.restrict_mean(&arc)?;
            let osc: f64 = arc.cells(depth)?.map(|j| (s[j] - avg).norm_sqr()).sum::<f64>() * h;
            let len = arc.length();
            let norm = match exponent {
                BmoExponent::One => len,
                BmoExponent::Two => len * len,
            };
            sup = sup.max((osc / norm).sqrt());
        }
    }
    Ok(sup + b.integrate().norm())
}

/// Luxemburg norm for `e^t - t - 1` with Lebesgue measure on the circle.
pub fn exp_l_norm(b: &GridFunction) -> Result<f64> {
    orlicz::luxemburg_norm_grid(b, &OrliczSpec::builtin("expl")?, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeiCover {
    pub arc: Arc,
    /// `|arc| / |interval|`
    pub ratio: f64,
    /// The interval is longer than a third of the circle; `arc` is the standard root.
    pub oversize: bool,
}

/// Smallest arc of either system containing the cell interval `[start, start + len)`
/// with at most six times its length; ties go to the unshifted system, then the lower index.
pub fn mei_cover(depth: u32, start: usize, len: usize) -> Result<MeiCover> {
    let n = 3usize << depth;
    if len == 0 || len > n || start >= n {
        return Err(Error::InvalidParameter(format!(
            "interval of {len} cells at {start} on a grid of {n}"
        )));
    }
    let mut best: Option<(usize, Shift, u64)> = None;
    for shift in [Shift::Zero, Shift::Third] {
        let offset = shift.cell_offset(depth);
        for k in 0..=depth {
            let arc_len = 3usize << (depth - k);
            if arc_len < len || arc_len > 6 * len {
                continue;
            }
            let rel = (start + n - offset) % n;
            let index = (rel / arc_len) as u64;
            if rel % arc_len + len > arc_len {
                continue;
            }
            let key = (arc_len, shift, index);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    let oversize = 3 * len > n;
    match best {
        Some((arc_len, shift, index)) => Ok(MeiCover {
            arc: Arc::new(shift, depth - (arc_len / 3).ilog2(), index)?,
            ratio: arc_len as f64 / len as f64,
            oversize,
        }),
        None if oversize => Ok(MeiCover {
            arc: Arc::root(Shift::Zero),
            ratio: n as f64 / len as f64,
            oversize,
        }),
        None => Err(Error::InvalidParameter(format!(
            "no covering arc for {len} cells at {start}"
        ))),
    }
}

/// Shortest cyclic cell interval `(start, len)` holding every nonzero sample.
pub fn tight_support(f: &GridFunction) -> Option<(usize, usize)> {
    let n = f.len();
    let nz: Vec<usize> = (0..n).filter(|&j| f.samples()[j] != ZERO).collect();
    let &first = nz.first()?;
    let mut best_gap = 0;
    let mut start = first;
    for (i, &a) in nz.iter().enumerate() {
        let b = if i + 1 < nz.len() { nz[i + 1] } else { first + n };
        let gap = b - a - 1;
        if gap > best_gap {
            best_gap = gap;
            start = b % n;
        }
    }
    Some((start, n - best_gap))
}

#[derive(Debug, Clone)]
pub struct TwoSystemSplit {
    pub first: HaarCoefficients,
    pub second: HaarCoefficients,
    pub routed_first: usize,
    pub routed_second: usize,
}

/// Splits `f` into a part expanded in the standard system and a part in the shifted one.
///
/// The pieces of the standard-system atomic decomposition are routed by the covering arc
/// of their support; the mean stays with the first part.
pub fn split_h1_two_systems(f: &GridFunction) -> Result<TwoSystemSplit> {
    let depth = f.torus_depth()?;
    let dec = atomic::atomic_decompose(f, Shift::Zero)?;
    let n = f.len();
    let mut first = vec![dec.mean; n];
    let mut second = vec![ZERO; n];
    let (mut routed_first, mut routed_second) = (0, 0);
    for atom in &dec.atoms {
        let g = atom.to_grid(depth)?;
        let Some((start, len)) = tight_support(&g) else {
            continue;
        };
        let cover = mei_cover(depth, start, len)?;
        let target = if cover.oversize || cover.arc.shift == Shift::Zero {
            routed_first += 1;
            &mut first
        } else {
            routed_second += 1;
            &mut second
        };
        for (t, z) in target.iter_mut().zip(g.samples()) {
            *t += z;
        }
    }
    Ok(TwoSystemSplit {
        first: dyadic::analyze(&GridFunction::torus(first)?, Shift::Zero)?,
        second: dyadic::analyze(&GridFunction::torus(second)?, Shift::Third)?,
        routed_first,
        routed_second,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductBound {
    pub product_llog: f64,
    pub f_l1: f64,
    pub b_bmo: f64,
    pub ratio: f64,
}

/// `||f b||_{L^log} / (||f||_1 ||b||_{BMO+})`.
pub fn product_llog_bound_check(f: &GridFunction, b: &GridFunction, shift: Shift) -> Result<ProductBound> {
    let product = f.mul(b)?;
    let product_llog = orlicz::luxemburg_norm_grid(&product, &OrliczSpec::psi0(), 1.0 / TAU)?;
    let f_l1 = f.l1_norm();
    let b_bmo = bmo_plus_norm(b, shift, BmoExponent::One)?;
    let ratio = if product_llog == 0.0 {
        0.0
    } else {
        product_llog / (f_l1 * b_bmo)
    };
    Ok(ProductBound {
        product_llog,
        f_l1,
        b_bmo,
        ratio,
    })
}

/// `(||Pi3(a, b)||_1, ||b||_{BMO+})` for an atom `a` carried by `omega`.
pub fn pi3_atom_bound(a: &HaarCoefficients, b: &HaarCoefficients) -> Result<(f64, f64)> {
    let lhs = pi3(a, b)?.l1_norm();
    let bmo = bmo_plus_norm(&dyadic::synthesize(b), b.shift(), BmoExponent::One)?;
    Ok((lhs, bmo))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pi2AtomBound {
    /// `max_theta (S[Pi2(a,b)] - M a * S[P_omega b])`, nonpositive when the pointwise bound holds
    pub pointwise_excess: f64,
    pub square_l1: f64,
    pub bmo: f64,
}

/// Pointwise and integrated forms of the square-function bound for `Pi2(a, b)`.
///
/// `M` is the largest average of `|a|` over cell-aligned arcs through the point, which
/// dominates every dyadic average.
pub fn pi2_atom_bound(a: &HaarCoefficients, b: &HaarCoefficients, omega: &Arc) -> Result<Pi2AtomBound> {
    let s = dyadic::square_function(&pi2(a, b)?);
    let m = maximal::uncentered_maximal_torus(&dyadic::synthesize(a))?;
    let sb = dyadic::square_function(&b.project_onto(omega)?);
    let pointwise_excess = s
        .samples()
        .iter()
        .zip(m.samples())
        .zip(sb.samples())
        .map(|((x, y), z)| x.re - y.re * z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let bmo = bmo_plus_norm(&dyadic::synthesize(b), b.shift(), BmoExponent::One)?;
    Ok(Pi2AtomBound {
        pointwise_excess,
        square_l1: s.l1_norm(),
        bmo,
    })
}

/// Largest coefficient of `Pi1(a, b) - Pi1(a, P_omega b) - <b>_omega a`.
pub fn localisation_defect(a: &HaarCoefficients, b: &HaarCoefficients, omega: &Arc) -> Result<f64> {
    let lhs = pi1(a, b)?;
    let local = pi1(a, &b.project_onto(omega)?)?;
    let avg = dyadic::synthesize(b).restrict_mean(omega)?;
    Ok(lhs
        .coeffs()
        .iter()
        .zip(local.coeffs())
        .zip(a.coeffs())
        .map(|((x, y), z)| (x - y - avg * z).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(shift: Shift, depth: u32, arc: Arc) -> HaarCoefficients {
        let mut c = HaarCoefficients::zero(shift, depth);
        c.set(&arc, Complex64::new(1.0, 0.0)).unwrap();
        c
    }

    #[test]
    fn pi1_with_constant_symbol() {
        let mut b = HaarCoefficients::zero(Shift::Zero, 3);
        b.set_mean(Complex64::new(2.0, 0.0));
        let f = unit(Shift::Zero, 3, Arc::new(Shift::Zero, 1, 1).unwrap());
        let p = pi1(&f, &b).unwrap();
        assert_eq!(p.coeffs()[2], Complex64::new(2.0, 0.0));
        assert!(pi2(&f, &b).unwrap().coeffs().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn pi1_sees_parent_sign() {
        let root = Arc::root(Shift::Zero);
        let left = root.children()[0];
        let f = unit(Shift::Zero, 4, left);
        let b = unit(Shift::Zero, 4, root);
        let p = pi1(&f, &b).unwrap();
        assert!((p.get(&left).unwrap().re - TAU.sqrt().recip()).abs() < 1e-15);
    }

    #[test]
    fn pi3_of_equal_haar_functions() {
        let arc = Arc::new(Shift::Third, 2, 3).unwrap();
        let f = unit(Shift::Third, 4, arc);
        let p = pi3(&f, &f).unwrap();
        let cells: Vec<usize> = arc.cells(4).unwrap().collect();
        for (j, z) in p.samples().iter().enumerate() {
            let want = if cells.contains(&j) { 1.0 / arc.length() } else { 0.0 };
            assert!((z.re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn bmo_of_root_haar_function() {
        let h = dyadic::haar_function(&Arc::root(Shift::Zero), 4).unwrap();
        let v = bmo_plus_norm(&h, Shift::Zero, BmoExponent::One).unwrap();
        assert!((v - TAU.sqrt().recip()).abs() < 1e-13);
        let v2 = bmo_plus_norm(&h, Shift::Zero, BmoExponent::Two).unwrap();
        assert!((v2 - 1.0 / TAU).abs() < 1e-13);
    }

    #[test]
    fn covers_of_aligned_and_straddling_intervals() {
        let c = mei_cover(5, 0, 3).unwrap();
        assert_eq!(c.arc, Arc::new(Shift::Zero, 5, 0).unwrap());
        assert_eq!(c.ratio, 1.0);
        // straddles the standard midpoint; a shifted arc holds it
        let c = mei_cover(5, 46, 4).unwrap();
        assert!(c.ratio <= 6.0);
        let big = mei_cover(5, 5, 80).unwrap();
        assert!(big.oversize);
    }

    #[test]
    fn tight_support_wraps() {
        let mut v = vec![0.0; 24];
        v[22] = 1.0;
        v[1] = -1.0;
        assert_eq!(tight_support(&GridFunction::torus_real(&v).unwrap()), Some((22, 4)));
        assert_eq!(tight_support(&GridFunction::torus_real(&[0.0; 24]).unwrap()), None);
    }

    #[test]
    fn exp_l_of_zero() {
        assert_eq!(exp_l_norm(&GridFunction::torus_real(&[0.0; 12]).unwrap()).unwrap(), 0.0);
    }
}
