//! Calderon-Zygmund stopping times and the atomic decomposition of dyadic `H^log`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::{self, Arc, Shift};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::orlicz::{self, psi0, OrliczSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Longest ladder tried before giving up.
const MAX_LEVEL: i32 = 1100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    /// Difference of the good parts at heights `2^(n+1)` and `2^n` on a stopping arc at `2^n`.
    Block { level: i32 },
    /// Good part at the lowest height of the ladder, carried by the root arc.
    Remainder,
}

/// A multiple of an atom: samples on the cells of `arc`, in order from its start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub arc: Arc,
    pub kind: AtomKind,
    pub sup_norm: f64,
    pub samples: Vec<Complex64>,
}

impl Atom {
    fn from_cells(arc: Arc, kind: AtomKind, depth: u32, values: &[Complex64]) -> Result<Self> {
        let samples: Vec<Complex64> = arc.cells(depth)?.map(|j| values[j]).collect();
        let sup_norm = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(Self {
            arc,
            kind,
            sup_norm,
            samples,
        })
    }

    /// The atom as a function on the whole circle.
    pub fn to_grid(&self, depth: u32) -> Result<GridFunction> {
        let mut out = vec![ZERO; 3usize << depth];
        for (j, &z) in self.arc.cells(depth)?.zip(&self.samples) {
            out[j] = z;
        }
        GridFunction::torus(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDecomposition {
    pub shift: Shift,
    pub depth: u32,
    pub mean: Complex64,
    pub atoms: Vec<Atom>,
    pub lambda_inf: f64,
}

impl AtomDecomposition {
    /// `mean + sum of atoms`.
    pub fn reconstruct(&self) -> Result<GridFunction> {
        let mut out = vec![self.mean; 3usize << self.depth];
        for atom in &self.atoms {
            for (j, &z) in atom.arc.cells(self.depth)?.zip(&atom.samples) {
                out[j] += z;
            }
        }
        GridFunction::torus(out)
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Atom> {
        self.atoms
            .iter()
            .filter(|a| matches!(a.kind, AtomKind::Block { .. }))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Maximal arcs of `{M f > lambda}`, where `M` is the dyadic maximal function.
pub fn cz_stopping_sets(f: &GridFunction, shift: Shift, lambda: f64) -> Result<Vec<Arc>> {
    let depth = f.torus_depth()?;
    let m = dyadic::dyadic_maximal(f, shift)?;
    stopping_from_maximal(m.samples(), shift, depth, lambda)
}

fn stopping_from_maximal(
    maximal: &[Complex64],
    shift: Shift,
    depth: u32,
    lambda: f64,
) -> Result<Vec<Arc>> {
    // full[k][m]: every cell of arc (k, m) lies in the level set
    let mut full: Vec<Vec<bool>> = vec![Vec::new(); depth as usize + 1];
    full[depth as usize] = (0..1u64 << depth)
        .map(|i| {
            let arc = Arc {
                shift,
                generation: depth,
                index: i,
            };
            arc.cells(depth)
                .map(|mut c| c.all(|j| maximal[j].re > lambda))
                .unwrap_or(false)
        })
        .collect();
    for k in (0..depth as usize).rev() {
        full[k] = full[k + 1].chunks(2).map(|p| p[0] && p[1]).collect();
    }
    let mut out = Vec::new();
    let mut stack = vec![Arc::root(shift)];
    while let Some(arc) = stack.pop() {
        if full[arc.generation as usize][arc.index as usize] {
            out.push(arc);
        } else if arc.generation < depth {
            let [a, b] = arc.children();
            stack.push(b);
            stack.push(a);
        }
    }
    Ok(out)
}

fn good_values(f: &GridFunction, depth: u32, stops: &[Arc]) -> Result<Vec<Complex64>> {
    let mut g = f.samples().to_vec();
    for arc in stops {
        let avg = f.restrict_mean(arc)?;
        for j in arc.cells(depth)? {
            g[j] = avg;
        }
    }
    Ok(g)
}

/// Good part `g` and the bad pieces `(f - <f>_I) chi_I` at height `lambda`.
pub fn cz_good_bad_split(
    f: &GridFunction,
    shift: Shift,
    lambda: f64,
) -> Result<(GridFunction, Vec<(Arc, GridFunction)>)> {
    let depth = f.torus_depth()?;
    let stops = cz_stopping_sets(f, shift, lambda)?;
    let g = good_values(f, depth, &stops)?;
    let mut bad = Vec::with_capacity(stops.len());
    for arc in stops {
        let mut piece = vec![ZERO; f.len()];
        for j in arc.cells(depth)? {
            piece[j] = f.samples()[j] - g[j];
        }
        bad.push((arc, GridFunction::torus(piece)?));
    }
    Ok((f.with_samples(g)?, bad))
}

/// Which Calderon-Zygmund ladder `atomic_decompose_with` builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Stopping arcs from `cz_stopping_sets`, levels `2^n` for `n >= 0`, and the good part at
    /// height 1 left as a remainder on the root. For signed data the good part can exceed the
    /// height on a stopping arc, so blocks are not bounded by `3 * 2^n`.
    Literal,
    /// Stopping arcs from `predictable_stopping_sets`, so the good part at height `lambda` is
    /// bounded by `lambda`. Levels run over negative `n` too, down to where the good part is
    /// below `2^-50 ||f - mean||`, which is what is left in the remainder.
    #[default]
    Predictable,
}

/// Maximal arcs with a child arc, or a cell of a finest arc, of average modulus above `lambda`.
pub fn predictable_stopping_sets(f: &GridFunction, shift: Shift, lambda: f64) -> Result<Vec<Arc>> {
    let depth = f.torus_depth()?;
    let flagged = predictable_flags(f, shift, depth, lambda)?;
    let mut out = Vec::new();
    let mut stack = vec![Arc::root(shift)];
    while let Some(arc) = stack.pop() {
        if flagged[arc.generation as usize][arc.index as usize] {
            out.push(arc);
        } else if arc.generation < depth {
            let [a, b] = arc.children();
            stack.push(b);
            stack.push(a);
        }
    }
    Ok(out)
}

fn predictable_flags(f: &GridFunction, shift: Shift, depth: u32, lambda: f64) -> Result<Vec<Vec<bool>>> {
    let values = f.samples();
    let mut avg: Vec<Vec<Complex64>> = vec![Vec::new(); depth as usize + 1];
    let mut flags: Vec<Vec<bool>> = vec![Vec::new(); depth as usize + 1];
    let mut finest_avg = Vec::with_capacity(1 << depth);
    let mut finest_flag = Vec::with_capacity(1 << depth);
    for i in 0..1u64 << depth {
        let arc = Arc::new(shift, depth, i)?;
        let cells: Vec<Complex64> = arc.cells(depth)?.map(|j| values[j]).collect();
        finest_avg.push(cells.iter().sum::<Complex64>() / cells.len() as f64);
        finest_flag.push(cells.iter().any(|z| z.norm() > lambda));
    }
    avg[depth as usize] = finest_avg;
    flags[depth as usize] = finest_flag;
    for k in (0..depth as usize).rev() {
        avg[k] = avg[k + 1].chunks(2).map(|p| (p[0] + p[1]) * 0.5).collect();
        flags[k] = avg[k + 1]
            .chunks(2)
            .map(|p| p[0].norm() > lambda || p[1].norm() > lambda)
            .collect();
    }
    Ok(flags)
}

/// The good part stays at least this far below the sup norm before the ladder stops.
const FLOOR_RATIO: f64 = 1.0 / (1u64 << 50) as f64;

struct Rung {
    level: i32,
    stops: Vec<Arc>,
    good: Vec<Complex64>,
}

fn rung(f: &GridFunction, shift: Shift, depth: u32, level: i32, construction: Construction) -> Result<Rung> {
    let height = (level as f64).exp2();
    let stops = match construction {
        Construction::Literal => cz_stopping_sets(f, shift, height)?,
        Construction::Predictable => predictable_stopping_sets(f, shift, height)?,
    };
    let good = good_values(f, depth, &stops)?;
    Ok(Rung { level, stops, good })
}

/// Decomposes `f - mean` into multiples of atoms along the predictable ladder.
pub fn atomic_decompose(f: &GridFunction, shift: Shift) -> Result<AtomDecomposition> {
    atomic_decompose_with(f, shift, Construction::Predictable)
}

pub fn atomic_decompose_with(
    f: &GridFunction,
    shift: Shift,
    construction: Construction,
) -> Result<AtomDecomposition> {
    let depth = f.torus_depth()?;
    let mean = f.mean();
    let centred = f.map(|z| z - mean);
    let sup = centred.sup_norm();
    if !sup.is_finite() {
        return Err(Error::InvalidParameter("non-finite samples".into()));
    }

    // rungs in increasing level; the last one has no stopping arcs
    let mut rungs = Vec::new();
    match construction {
        Construction::Literal => {
            let mut level = 0;
            loop {
                let r = rung(&centred, shift, depth, level, construction)?;
                let done = r.stops.is_empty();
                rungs.push(r);
                if done {
                    break;
                }
                level += 1;
                if level > MAX_LEVEL {
                    return Err(Error::InvalidParameter("level ladder did not terminate".into()));
                }
            }
        }
        Construction::Predictable if sup > 0.0 => {
            let top = sup.log2().ceil() as i32;
            let floor = sup * FLOOR_RATIO;
            let mut level = top;
            loop {
                let r = rung(&centred, shift, depth, level, construction)?;
                let good_sup = r.good.iter().map(|z| z.norm()).fold(0.0, f64::max);
                rungs.push(r);
                if good_sup <= floor || level <= top - MAX_LEVEL {
                    break;
                }
                level -= 1;
            }
            rungs.reverse();
        }
        Construction::Predictable => {}
    }

    let mut atoms = Vec::new();
    if let Some(bottom) = rungs.first() {
        let rem = Atom::from_cells(Arc::root(shift), AtomKind::Remainder, depth, &bottom.good)?;
        if rem.sup_norm > 0.0 {
            atoms.push(rem);
        }
    }
    for pair in rungs.windows(2) {
        let (low, high) = (&pair[0], &pair[1]);
        let diff: Vec<Complex64> = high.good.iter().zip(&low.good).map(|(a, b)| a - b).collect();
        for arc in &low.stops {
            let atom = Atom::from_cells(*arc, AtomKind::Block { level: low.level }, depth, &diff)?;
            if atom.sup_norm > 0.0 {
                atoms.push(atom);
            }
        }
    }

    let lambda_inf = lambda_inf(mean, &atoms)?;
    Ok(AtomDecomposition {
        shift,
        depth,
        mean,
        atoms,
        lambda_inf,
    })
}

/// `inf { lambda : psi0(|mean|/lambda) + sum |I_k| psi0(||beta_k||/lambda) <= 1 }`.
pub fn lambda_inf(mean: Complex64, atoms: &[Atom]) -> Result<f64> {
    let m = mean.norm();
    let scale = atoms.iter().map(|a| a.sup_norm).fold(m, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    orlicz::solve_unit_level(
        |lambda| {
            psi0(m / lambda)
                + atoms
                    .iter()
                    .map(|a| a.arc.length() * psi0(a.sup_norm / lambda))
                    .sum::<f64>()
        },
        scale,
    )
}

/// `||chi_I||` in `L^log` with measure `dtheta / 2pi`.
pub fn indicator_norm(arc: &Arc) -> Result<f64> {
    orlicz::luxemburg_norm(&[1.0], &[arc.length()], &[0.0], &OrliczSpec::psi0(), 1.0 / TAU)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomCheck {
    pub support_ok: bool,
    pub cancellation_ok: bool,
    pub size_ok: bool,
    pub mean: f64,
    pub sup_norm: f64,
    pub bound: f64,
    /// `bound - sup_norm`
    pub slack: f64,
}

impl AtomCheck {
    pub fn valid(&self) -> bool {
        self.support_ok && self.cancellation_ok && self.size_ok
    }
}

/// Checks support, cancellation and the sup-norm bound of a candidate atom.
pub fn validate_atom(a: &GridFunction, arc: &Arc) -> Result<AtomCheck> {
    let depth = a.torus_depth()?;
    let mut inside = vec![false; a.len()];
    for j in arc.cells(depth)? {
        inside[j] = true;
    }
    let support_ok = a
        .samples()
        .iter()
        .zip(&inside)
        .all(|(z, &ins)| ins || *z == ZERO);
    let sup_norm = a.sup_norm();
    let integral = a.integrate().norm();
    let cancellation_ok = integral <= 1e-12 * sup_norm.max(f64::MIN_POSITIVE) * arc.length();
    let bound = indicator_norm(arc)?;
    Ok(AtomCheck {
        support_ok,
        cancellation_ok: cancellation_ok || sup_norm == 0.0,
        size_ok: sup_norm <= bound,
        mean: integral / TAU,
        sup_norm,
        bound,
        slack: bound - sup_norm,
    })
}

/// Both sides of `int_I psi0(S beta) <= (1 + sqrt(2pi)) |I| psi0(||beta||)`.
pub fn arc_square_bound(beta: &GridFunction, arc: &Arc, shift: Shift) -> Result<(f64, f64)> {
    let depth = beta.torus_depth()?;
    let s = dyadic::square_function(&dyadic::analyze(beta, shift)?);
    let h = beta.cell_width();
    let lhs: f64 = arc.cells(depth)?.map(|j| psi0(s.samples()[j].re)).sum::<f64>() * h;
    let rhs = (1.0 + TAU.sqrt()) * arc.length() * psi0(beta.sup_norm());
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> GridFunction {
        GridFunction::torus_real(v).unwrap()
    }

    #[test]
    fn half_indicator_stops_at_left_half() {
        let mut v = vec![0.0; 48];
        v[..24].fill(1.0);
        let f = real(&v);
        let stops = cz_stopping_sets(&f, Shift::Zero, 0.75).unwrap();
        assert_eq!(stops, vec![Arc::new(Shift::Zero, 1, 0).unwrap()]);
        let (g, bad) = cz_good_bad_split(&f, Shift::Zero, 0.75).unwrap();
        assert_eq!(g, f);
        assert!(bad[0].1.sup_norm() == 0.0);
    }

    // mean zero; the average over the first finest arc is 2 but a cell reaches 100
    fn signed_example() -> GridFunction {
        let mut v = vec![0.0; 12];
        v[..6].copy_from_slice(&[100.0, -48.0, -46.0, -2.0, -2.0, -2.0]);
        real(&v)
    }

    fn worst_level_ratio(d: &AtomDecomposition) -> f64 {
        d.atoms
            .iter()
            .filter_map(|a| match a.kind {
                AtomKind::Block { level } => Some(a.sup_norm / (level as f64).exp2()),
                AtomKind::Remainder => None,
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn average_stopping_breaks_the_level_bound() {
        let f = signed_example();
        let d = atomic_decompose_with(&f, Shift::Zero, Construction::Literal).unwrap();
        assert!(d.reconstruct().unwrap().max_abs_diff(&f).unwrap() < 1e-13);
        assert!(worst_level_ratio(&d) > 40.0);
    }

    #[test]
    fn predictable_stopping_respects_the_level_bound() {
        let f = signed_example();
        let stops = predictable_stopping_sets(&f, Shift::Zero, 1.0).unwrap();
        assert_eq!(stops, vec![Arc::new(Shift::Zero, 1, 0).unwrap()]);
        let stops = predictable_stopping_sets(&f, Shift::Zero, 2.0).unwrap();
        assert_eq!(stops, vec![Arc::new(Shift::Zero, 2, 0).unwrap()]);
        assert!(predictable_stopping_sets(&f, Shift::Zero, 100.0).unwrap().is_empty());

        let d = atomic_decompose(&f, Shift::Zero).unwrap();
        assert!(d.reconstruct().unwrap().max_abs_diff(&f).unwrap() < 1e-13);
        assert!(worst_level_ratio(&d) <= 3.0);
        assert!(d.atoms.iter().all(|a| a.kind != AtomKind::Remainder));
    }

    #[test]
    fn constant_has_no_atoms() {
        let d = atomic_decompose(&real(&[4.0; 24]), Shift::Third).unwrap();
        assert!(d.atoms.is_empty());
        assert!((d.mean.re - 4.0).abs() < 1e-14);
        let t_star = orlicz::psi0_inverse(1.0);
        assert!((d.lambda_inf - 4.0 / t_star).abs() < 1e-8);
    }

    #[test]
    fn zero_function() {
        let d = atomic_decompose(&real(&[0.0; 24]), Shift::Zero).unwrap();
        assert!(d.atoms.is_empty());
        assert_eq!(d.lambda_inf, 0.0);
    }

    #[test]
    fn single_atom_lambda_inf() {
        // one atom on the root with sup t*: 2pi psi0(t*/lambda) = 1
        let t_star = orlicz::psi0_inverse(1.0);
        let atom = Atom {
            arc: Arc::root(Shift::Zero),
            kind: AtomKind::Remainder,
            sup_norm: t_star,
            samples: vec![],
        };
        let lam = lambda_inf(ZERO, &[atom]).unwrap();
        let want = t_star / orlicz::psi0_inverse(1.0 / TAU);
        assert!((lam - want).abs() < 1e-8 * want);
    }

    #[test]
    fn scaled_haar_function_is_an_atom_with_no_slack() {
        let arc = Arc::new(Shift::Zero, 2, 1).unwrap();
        let h = dyadic::haar_function(&arc, 4).unwrap();
        let bound = indicator_norm(&arc).unwrap();
        let a = h.scale(Complex64::new(bound / h.sup_norm(), 0.0));
        let check = validate_atom(&a, &arc).unwrap();
        assert!(check.valid());
        assert!(check.slack.abs() < 1e-15);
    }

    #[test]
    fn constant_on_arc_fails_cancellation() {
        let arc = Arc::new(Shift::Zero, 1, 0).unwrap();
        let mut v = vec![0.0; 48];
        v[..24].fill(1e-3);
        let check = validate_atom(&real(&v), &arc).unwrap();
        assert!(check.support_ok && !check.cancellation_ok);
        assert!(validate_atom(&real(&[0.0; 48]), &arc).unwrap().valid());
    }
}
