//! The acceptance suites. Each returns a report of named checks with observed extremes.

use std::f64::consts::{E, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::constants::Constants;
use super::corpus;
use super::experiments;
use crate::atomic::{self, AtomKind};
use crate::dyadic::{self, Arc, HaarCoefficients, Shift};
use crate::error::Result;
use crate::fourier;
use crate::grid::GridFunction;
use crate::maximal::{self, Mollifier};
use crate::orlicz::{self, psi0, OrliczSpec};
use crate::paraproduct::{self, BmoExponent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One inequality evaluated over a set of cases, summarised by its worst case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub worst: f64,
    pub limit: f64,
    pub cases: usize,
    pub violations: usize,
    pub pass: bool,
}

impl Check {
    /// Every value must be `<= limit`.
    // written negated so that NaN counts as a violation
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn at_most(name: &str, values: &[f64], limit: f64) -> Self {
        let worst = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let violations = values.iter().filter(|v| !(**v <= limit)).count();
        Self::build(name, Relation::AtMost, worst, limit, values.len(), violations)
    }

    /// Every value must be `>= limit`.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn at_least(name: &str, values: &[f64], limit: f64) -> Self {
        let worst = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let violations = values.iter().filter(|v| !(**v >= limit)).count();
        Self::build(name, Relation::AtLeast, worst, limit, values.len(), violations)
    }

    fn build(name: &str, relation: Relation, worst: f64, limit: f64, cases: usize, violations: usize) -> Self {
        Self {
            name: name.to_string(),
            relation,
            worst,
            limit,
            cases,
            violations,
            pass: violations == 0 && cases > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub depth: u32,
    pub seed: u64,
    pub inputs_hash: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl CriterionReport {
    fn new(id: u8, title: &str, depth: u32, seed: u64, inputs: Sha256, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            id,
            title: title.to_string(),
            depth,
            seed,
            inputs_hash: hex(&inputs.finalize()),
            checks,
            pass,
        }
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    /// `criterion N [PASS|FAIL] title (failing checks)`.
    pub fn summary_line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {:>2} {verdict} {}", self.id, self.title);
        let failed = self.failed_checks();
        if !failed.is_empty() {
            line.push_str(&format!(" (failing: {})", failed.join(", ")));
        }
        line
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn hash_grid(h: &mut Sha256, f: &GridFunction) {
    for z in f.samples() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
}

fn hash_coeffs(h: &mut Sha256, c: &HaarCoefficients) {
    h.update(c.mean().re.to_le_bytes());
    h.update(c.mean().im.to_le_bytes());
    for z in c.coeffs() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
}

fn inputs(id: u8, depth: u32, seed: u64) -> Sha256 {
    let mut h = Sha256::new();
    h.update([id]);
    h.update(depth.to_le_bytes());
    h.update(seed.to_le_bytes());
    h
}

fn relative(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

/// Finite expansion part of `f` in `shift` (drops sub-resolution detail).
fn expansion_part(f: &GridFunction, shift: Shift) -> Result<GridFunction> {
    let mut c = dyadic::analyze(f, shift)?;
    c.clear_residual();
    Ok(dyadic::synthesize(&c))
}

pub const CORPUS_SIZE: usize = 200;

/// Round trips, the product splitting and atomic reconstruction.
pub fn exact_identities(depth: u32, seed: u64, k: &Constants) -> Result<CriterionReport> {
    let mut h = inputs(1, depth, seed);
    let pairs = corpus::expansion_pairs(depth, seed, CORPUS_SIZE);
    let functions = corpus::function_corpus(depth, seed, CORPUS_SIZE, false);
    for (f, b) in &pairs {
        hash_coeffs(&mut h, f);
        hash_coeffs(&mut h, b);
    }
    functions.iter().for_each(|f| hash_grid(&mut h, f));

    let round_trip: Vec<f64> = functions
        .par_iter()
        .map(|f| -> Result<f64> {
            let mut worst = 0.0f64;
            for shift in [Shift::Zero, Shift::Third] {
                let g = dyadic::synthesize(&dyadic::analyze(f, shift)?);
                worst = worst.max(relative(f.max_abs_diff(&g)?, f.sup_norm()));
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let splitting: Vec<f64> = pairs
        .par_iter()
        .map(|(f, b)| -> Result<f64> {
            let (s, t) = paraproduct::split_product(f, b)?;
            let (fg, bg) = (dyadic::synthesize(f), dyadic::synthesize(b));
            let product = fg.mul(&bg)?;
            Ok(relative(s.add(&t)?.max_abs_diff(&product)?, fg.sup_norm() * bg.sup_norm()))
        })
        .collect::<Result<_>>()?;
    let reconstruction: Vec<f64> = functions
        .par_iter()
        .map(|f| -> Result<f64> {
            let mut worst = 0.0f64;
            for shift in [Shift::Zero, Shift::Third] {
                let d = atomic::atomic_decompose(f, shift)?;
                worst = worst.max(relative(d.reconstruct()?.max_abs_diff(f)?, f.sup_norm()));
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let tol = k.get("identity_tol");
    Ok(CriterionReport::new(
        1,
        "exact identities",
        depth,
        seed,
        h,
        vec![
            Check::at_most("haar round trip", &round_trip, tol),
            Check::at_most("paraproduct splitting", &splitting, tol),
            Check::at_most("atomic reconstruction", &reconstruction, tol),
        ],
    ))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Inequalities whose constants are exact.
pub fn exact_constants(depth: u32, seed: u64, k: &Constants) -> Result<CriterionReport> {
    let slack = k.get("inequality_slack");
    let mut h = inputs(2, depth, seed);
    let mut checks = Vec::new();

    // Psi <= int_0^t kernel <= 2 Psi, as ratios
    let xs = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e3, 1e6];
    let ts = log_grid(1e-6, 1e12, 37);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &x in &xs {
        for &t in &ts {
            let p = orlicz::psi(x, t);
            let q = orlicz::psi_kernel_integral(x, t);
            lower.push((p - q) / p);
            upper.push((q - k.get("sandwich_factor") * p) / p);
        }
    }
    checks.push(Check::at_most("sandwich lower", &lower, slack));
    checks.push(Check::at_most("sandwich upper", &upper, slack));

    // square-function estimate for arc-supported functions
    let atoms = corpus::atom_corpus(depth, seed, CORPUS_SIZE);
    atoms.iter().for_each(|(_, a)| hash_grid(&mut h, a));
    let atom_excess: Vec<f64> = atoms
        .par_iter()
        .map(|(arc, a)| -> Result<f64> {
            let (lhs, rhs) = atomic::arc_square_bound(a, arc, arc.shift)?;
            let rhs = rhs / (1.0 + TAU.sqrt()) * k.get("atom_square_constant");
            Ok(relative(lhs - rhs, rhs))
        })
        .collect::<Result<_>>()?;
    checks.push(Check::at_most("arc square-function estimate", &atom_excess, slack));

    // stopping-time blocks at level 2^n
    let functions = corpus::function_corpus(depth, seed, CORPUS_SIZE, true);
    functions.iter().for_each(|f| hash_grid(&mut h, f));
    let level_ratios: Vec<f64> = functions
        .par_iter()
        .map(|f| -> Result<Vec<f64>> {
            let mut out = Vec::new();
            for shift in [Shift::Zero, Shift::Third] {
                for atom in atomic::atomic_decompose(f, shift)?.atoms {
                    if let AtomKind::Block { level } = atom.kind {
                        out.push(atom.sup_norm / (level as f64).exp2());
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    checks.push(Check::at_most(
        "block level bound",
        &level_ratios,
        k.get("cz_level_factor") * (1.0 + slack),
    ));

    let mut rng = corpus::stream(seed, "tuples");
    let heavy = LogNormal::new(0.0, 3.0).expect("valid sigma");
    let tuples: Vec<Vec<f64>> = (0..2000)
        .map(|_| {
            let len = rng.gen_range(2..=10);
            (0..len).map(|_| heavy.sample(&mut rng)).collect()
        })
        .collect();
    for t in &tuples {
        for v in t {
            h.update(v.to_le_bytes());
        }
    }
    let sub: Vec<f64> = tuples
        .iter()
        .map(|t| {
            let lhs = psi0(t.iter().sum());
            let rhs: f64 = t.iter().map(|&v| psi0(v)).sum();
            relative(lhs - rhs, rhs)
        })
        .collect();
    checks.push(Check::at_most("subadditivity", &sub, slack));
    let upper_type: Vec<f64> = tuples
        .iter()
        .map(|t| {
            let lhs = psi0(t.iter().sum::<f64>().sqrt());
            let rhs: f64 = t.iter().map(|&v| psi0(v.sqrt())).sum();
            relative(lhs - rhs, rhs)
        })
        .collect();
    checks.push(Check::at_most("upper type 2", &upper_type, slack));

    let mut ts = log_grid(1e-12, 1e12, 97);
    ts.push(0.0);
    for p in [0.6, 0.75, 0.9] {
        let margin: Vec<f64> = ts
            .iter()
            .map(|&t| psi0(t) - (1.0 - p) * t.powf(p) + slack)
            .collect();
        checks.push(Check::at_least(&format!("power lower bound p={p}"), &margin, 0.0));
    }

    let ss = log_grid(1e-8, 1e8, 33);
    let ts = log_grid(1.0, 1e8, 33);
    let mut low = Vec::new();
    let mut high = Vec::new();
    for &s in &ss {
        for &t in &ts {
            let mid = psi0(s * t);
            low.push(relative(t / (1.0 + t.ln()) * psi0(s) - mid, mid));
            high.push(relative(mid - t * psi0(s), mid));
        }
    }
    checks.push(Check::at_most("doubling lower", &low, 1e-12));
    checks.push(Check::at_most("doubling upper", &high, 1e-12));

    Ok(CriterionReport::new(2, "exact-constant inequalities", depth, seed, h, checks))
}

/// Stein example on the line.
pub fn stein(k: &Constants) -> Result<(CriterionReport, Vec<experiments::SteinRow>)> {
    let rows = experiments::run_stein(&experiments::default_stein_deltas())?;
    let mut h = inputs(3, 0, 0);
    rows.iter().for_each(|r| h.update(r.delta.to_le_bytes()));
    let bracket = k.get("stein_bracket");
    let in_bracket = |v: f64| (v / bracket).max(1.0) * (1.0 / (v * bracket)).max(1.0);
    let lloglogl: Vec<f64> = rows.iter().map(|r| in_bracket(r.lloglogl_ratio)).collect();
    let maximal: Vec<f64> = rows.iter().map(|r| in_bracket(r.maximal_ratio)).collect();
    let columns: Vec<f64> = rows.iter().map(|r| r.column_ratio).collect();
    let spread = columns.iter().cloned().fold(0.0, f64::max)
        / columns.iter().cloned().fold(f64::INFINITY, f64::min);
    let report = CriterionReport::new(
        3,
        "Stein example",
        0,
        0,
        h,
        vec![
            // values are 1 inside the bracket and grow outside it
            Check::at_most("L log log L column within bracket", &lloglogl, 1.0),
            Check::at_most("maximal column within bracket", &maximal, 1.0),
            Check::at_most("column ratio spread", &[spread], k.get("stein_ratio_spread")),
        ],
    );
    Ok((report, rows))
}

pub const WEAK_TYPE_FUNCTIONS: usize = 60;
pub const ORACLE_FUNCTIONS: usize = 50;
const LINE_CELLS: usize = 16;

/// Weak-type bounds on the line and the dense-radius cross-check.
pub fn weak_type(seed: u64, k: &Constants) -> Result<CriterionReport> {
    let mut h = inputs(4, 0, seed);
    let funcs = corpus::line_corpus(seed, WEAK_TYPE_FUNCTIONS, LINE_CELLS);
    funcs.iter().for_each(|f| hash_grid(&mut h, f));
    let alphas: Vec<f64> = (0..=16).map(|j| E.exp() * (j as f64 / 2.0).exp2()).collect();
    let (c, c1, c2) = (k.get("weak_upper"), k.get("weak_reverse_c1"), k.get("weak_reverse_c2"));
    let rows: Vec<Vec<experiments::WeakTypeRow>> = funcs
        .par_iter()
        .map(|f| experiments::weak_type_profile(f, &alphas, c1))
        .collect::<Result<_>>()?;
    let rows: Vec<_> = rows.into_iter().flatten().collect();
    let upper: Vec<f64> = rows.iter().map(|r| r.level_measure - c * r.upper_mass).collect();
    let reverse: Vec<f64> = rows.iter().map(|r| r.reverse_measure - c2 * r.reverse_mass).collect();

    let oracle_funcs = &funcs[..ORACLE_FUNCTIONS];
    let oracle: Vec<f64> = oracle_funcs
        .par_iter()
        .map(|f| -> Result<f64> {
            let cell = f.cell_width();
            // offset by an eighth cell so every breakpoint radius is on the h/64 lattice
            let points: Vec<f64> = (0..4 * 4 * LINE_CELLS / 2)
                .map(|i| -2.0 + (i as f64 + 0.5) * cell / 4.0)
                .collect();
            let fast = maximal::hl_maximal_line(f, &points)?;
            Ok(points
                .iter()
                .zip(&fast)
                .map(|(&x, &m)| {
                    let dense = experiments::dense_radius_maximal(f, x, cell / 64.0, x.abs() + 1.0);
                    (dense - m).abs() / m.max(1.0)
                })
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(CriterionReport::new(
        4,
        "weak-type bounds",
        0,
        seed,
        h,
        vec![
            Check::at_most("upper weak type", &upper, 0.0),
            Check::at_least("reverse weak type", &reverse, 0.0),
            Check::at_most("dense-radius oracle", &oracle, k.get("oracle_agreement")),
        ],
    ))
}

/// `Lambda_inf` against the dyadic quasi-norm, and the reverse mass bound.
pub fn atomic_bounds(depth: u32, seed: u64, k: &Constants) -> Result<CriterionReport> {
    let mut h = inputs(5, depth, seed);
    let functions = corpus::function_corpus(depth, seed, CORPUS_SIZE, true);
    let constant = k.get("atom_square_constant");
    let slack = k.get("inequality_slack");
    let results: Vec<(f64, f64)> = functions
        .par_iter()
        .map(|f| -> Result<(f64, f64)> {
            let mut ratio = 0.0f64;
            let mut excess = f64::NEG_INFINITY;
            for shift in [Shift::Zero, Shift::Third] {
                let g = expansion_part(f, shift)?;
                let c = dyadic::analyze(&g, shift)?;
                let norm = dyadic::hlog_dyadic_quasinorm(&c)?;
                let d = atomic::atomic_decompose(&g, shift)?;
                if norm > 0.0 {
                    ratio = ratio.max(d.lambda_inf / norm);
                }
                let mut body = c.clone();
                body.set_mean(Complex64::new(0.0, 0.0));
                let s = dyadic::square_function(&body);
                let lhs: f64 = s.samples().iter().map(|z| psi0(z.re)).sum::<f64>() * s.cell_width();
                let mass: f64 = d.atoms.iter().map(|a| a.arc.length() * psi0(a.sup_norm)).sum();
                excess = excess.max(relative(lhs - constant * mass, constant * mass));
            }
            Ok((ratio, excess))
        })
        .collect::<Result<_>>()?;
    functions.iter().for_each(|f| hash_grid(&mut h, f));
    let ratios: Vec<f64> = results.iter().map(|r| r.0).collect();
    let mut excess: Vec<f64> = results.iter().map(|r| r.1).collect();

    // random families of atoms in one system
    let mut rng = corpus::stream(seed, "atom-families");
    for i in 0..CORPUS_SIZE {
        let shift = if i % 2 == 0 { Shift::Zero } else { Shift::Third };
        let count = rng.gen_range(1..=6);
        let mut total = HaarCoefficients::zero(shift, depth);
        let mut mass = 0.0;
        for _ in 0..count {
            let g = rng.gen_range(0..depth);
            let arc = Arc::new(shift, g, rng.gen_range(0..1u64 << g))?;
            let c = corpus::arc_expansion(&mut rng, arc, depth, false);
            mass += arc.length() * psi0(dyadic::synthesize(&c).sup_norm());
            total = total.add(&c)?;
        }
        hash_coeffs(&mut h, &total);
        let s = dyadic::square_function(&total);
        let lhs: f64 = s.samples().iter().map(|z| psi0(z.re)).sum::<f64>() * s.cell_width();
        excess.push(relative(lhs - constant * mass, constant * mass));
    }
    Ok(CriterionReport::new(
        5,
        "atomic decomposition bounds",
        depth,
        seed,
        h,
        vec![
            Check::at_most("Lambda_inf over quasi-norm", &ratios, k.get("atomic_c0")),
            Check::at_most("reverse mass bound", &excess, slack),
        ],
    ))
}

pub const PAIR_COUNT: usize = 100;

/// Paraproduct bounds for `H^1` atoms, the localisation identity and John-Nirenberg.
pub fn paraproduct_bounds(depth: u32, seed: u64, k: &Constants) -> Result<CriterionReport> {
    let mut h = inputs(6, depth, seed);
    let atoms = corpus::h1_atoms(depth, seed, PAIR_COUNT);
    let mut rng = corpus::stream(seed, "symbols");
    let symbols: Vec<HaarCoefficients> = atoms
        .iter()
        .map(|(arc, _)| corpus::random_coefficients(&mut rng, arc.shift, depth, false, false))
        .collect();
    for ((_, a), b) in atoms.iter().zip(&symbols) {
        hash_coeffs(&mut h, a);
        hash_coeffs(&mut h, b);
    }
    let tol = k.get("identity_tol");
    let per_pair: Vec<(f64, f64, f64, f64)> = atoms
        .par_iter()
        .zip(symbols.par_iter())
        .map(|((arc, a), b)| -> Result<(f64, f64, f64, f64)> {
            let (pi3_l1, bmo) = paraproduct::pi3_atom_bound(a, b)?;
            let p2 = paraproduct::pi2_atom_bound(a, b, arc)?;
            let scale = dyadic::synthesize(a).sup_norm() * dyadic::synthesize(b).sup_norm();
            let defect = paraproduct::localisation_defect(a, b, arc)?;
            let a_sup = dyadic::synthesize(a).sup_norm();
            let b_coeff = b.coeffs().iter().map(|z| z.norm()).fold(b.mean().norm(), f64::max);
            Ok((
                pi3_l1 / bmo,
                relative(p2.pointwise_excess.max(0.0), scale),
                p2.square_l1 / p2.bmo,
                relative(defect, a_sup.max(1.0) * b_coeff.max(1.0)),
            ))
        })
        .collect::<Result<_>>()?;
    let pi3: Vec<f64> = per_pair.iter().map(|r| r.0).collect();
    let pointwise: Vec<f64> = per_pair.iter().map(|r| r.1).collect();
    let pi2: Vec<f64> = per_pair.iter().map(|r| r.2).collect();
    let dec: Vec<f64> = per_pair.iter().map(|r| r.3).collect();

    let functions = corpus::function_corpus(depth, seed, CORPUS_SIZE, false);
    functions.iter().for_each(|f| hash_grid(&mut h, f));
    let jn: Vec<f64> = functions
        .par_iter()
        .map(|b| -> Result<f64> {
            let centred = b.map(|z| z - b.mean());
            let e = paraproduct::exp_l_norm(&centred)?;
            let mut ratio = 0.0f64;
            for shift in [Shift::Zero, Shift::Third] {
                let bmo = paraproduct::bmo_plus_norm(b, shift, BmoExponent::One)?;
                if bmo > 0.0 {
                    ratio = ratio.max(e / bmo);
                }
            }
            Ok(ratio)
        })
        .collect::<Result<_>>()?;
    let product: Vec<f64> = functions
        .par_chunks(2)
        .map(|w| -> Result<f64> {
            let f = w[0].map(|z| Complex64::new(z.norm(), 0.0));
            Ok(paraproduct::product_llog_bound_check(&f, &w[1], Shift::Zero)?.ratio)
        })
        .collect::<Result<_>>()?;
    Ok(CriterionReport::new(
        6,
        "paraproduct bounds",
        depth,
        seed,
        h,
        vec![
            Check::at_most("equal-scale part in L1", &pi3, k.get("pi3_constant")),
            Check::at_most("pointwise square-function bound", &pointwise, k.get("inequality_slack")),
            Check::at_most("coarse-symbol part square function in L1", &pi2, k.get("pi2_constant")),
            Check::at_most("localisation identity", &dec, tol),
            Check::at_most("John-Nirenberg", &jn, k.get("john_nirenberg")),
            Check::at_most("product in L^log", &product, k.get("product_llog")),
        ],
    ))
}

/// Exhaustive one-third covering and exact two-system splitting.
pub fn covering(depth: u32, seed: u64, k: &Constants) -> Result<CriterionReport> {
    let mut h = inputs(7, depth, seed);
    let n = 3usize << depth;
    let limit = k.get("mei_ratio");
    let per_start: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map(|start| -> Result<(f64, usize)> {
            let mut worst = 0.0f64;
            let mut uncovered = 0;
            for len in 1..=n / 3 {
                let cover = paraproduct::mei_cover(depth, start, len)?;
                let cells: Vec<usize> = cover.arc.cells(depth)?.collect();
                let contained = (0..len).all(|i| cells.contains(&((start + i) % n)));
                if !contained || cover.oversize {
                    uncovered += 1;
                }
                worst = worst.max(cells.len() as f64 / len as f64);
            }
            Ok((worst, uncovered))
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = per_start.iter().map(|r| r.0).collect();
    let uncovered: Vec<f64> = per_start.iter().map(|r| r.1 as f64).collect();

    let functions = corpus::function_corpus(depth, seed, CORPUS_SIZE, false);
    functions.iter().for_each(|f| hash_grid(&mut h, f));
    let split: Vec<f64> = functions
        .par_iter()
        .map(|f| -> Result<f64> {
            let s = paraproduct::split_h1_two_systems(f)?;
            let g = dyadic::synthesize(&s.first).add(&dyadic::synthesize(&s.second))?;
            Ok(relative(g.max_abs_diff(f)?, f.sup_norm()))
        })
        .collect::<Result<_>>()?;
    Ok(CriterionReport::new(
        7,
        "one-third covering",
        depth,
        seed,
        h,
        vec![
            Check::at_most("cover ratio", &ratios, limit),
            Check::at_most("uncovered intervals", &uncovered, 0.0),
            Check::at_most("two-system split", &split, k.get("identity_tol")),
        ],
    ))
}

pub const SHARPNESS_ORDERS: [u32; 4] = [4, 6, 8, 10];

/// Atom inequality for Fourier coefficients and the `a_N` family.
pub fn fourier_suite(
    depth: u32,
    seed: u64,
    k: &Constants,
) -> Result<(CriterionReport, Vec<fourier::SharpnessReport>)> {
    let mut h = inputs(8, depth, seed);
    let atoms = corpus::atom_corpus(depth, seed, CORPUS_SIZE);
    atoms.iter().for_each(|(_, a)| hash_grid(&mut h, a));
    let ratios: Vec<f64> = atoms
        .par_iter()
        .map(|(arc, a)| Ok(fourier::atom_fourier_inequality_check(a, arc)?.ratio))
        .collect::<Result<_>>()?;
    let r_levels = k.get("poisson_r_levels") as u32;
    let sharp: Vec<fourier::SharpnessReport> = SHARPNESS_ORDERS
        .par_iter()
        .map(|&big_n| fourier::sharpness_a_n(big_n, big_n + 3, r_levels))
        .collect::<Result<_>>()?;
    let carrier: Vec<f64> = sharp
        .iter()
        .map(|s| (s.carrier_coefficient - s.big_n as f64).abs())
        .collect();
    let band: Vec<f64> = sharp.iter().map(|s| s.band_min_ratio).collect();
    let growth: Vec<f64> = sharp.windows(2).map(|w| w[1].ratio / w[0].ratio).collect();
    Ok((
        CriterionReport::new(
            8,
            "Fourier coefficients of atoms",
            depth,
            seed,
            h,
            vec![
                Check::at_most("atom inequality ratio", &ratios, k.get("atom_fourier_c0")),
                Check::at_most("carrier coefficient", &carrier, k.get("carrier_tol")),
                Check::at_least("band coefficients", &band, k.get("band_c0")),
                Check::at_least("sharpness growth per step", &growth, k.get("sharpness_growth")),
            ],
        ),
        sharp,
    ))
}

pub fn indicator_line() -> GridFunction {
    GridFunction::line_real(-1.0, 1.0, &[1.0; 8]).expect("valid interval")
}

pub fn mean_zero_control() -> GridFunction {
    let v: Vec<f64> = (0..8).map(|j| if j < 4 { 1.0 } else { -1.0 }).collect();
    GridFunction::line_real(-1.0, 1.0, &v).expect("valid interval")
}

/// Growth of the smooth-maximal integral for nonzero mean against a mean-zero control.
pub fn mean_zero_necessity(
    k: &Constants,
) -> Result<(CriterionReport, experiments::DivergenceReport, experiments::DivergenceReport)> {
    let moll = Mollifier::new();
    let f = indicator_line();
    let control = mean_zero_control();
    let mut h = inputs(9, 0, 0);
    hash_grid(&mut h, &f);
    hash_grid(&mut h, &control);
    let grow = experiments::run_mean_zero_divergence(&f, 4, 12, &moll)?;
    let flat = experiments::run_mean_zero_divergence(&control, 4, 12, &moll)?;
    let kappa = k.get("divergence_kappa");
    let zyg = experiments::run_zygmund(&control, &moll)?;
    let report = CriterionReport::new(
        9,
        "mean-zero necessity",
        0,
        0,
        h,
        vec![
            Check::at_least("partials increasing", &[if grow.increasing { 1.0 } else { 0.0 }], 1.0),
            Check::at_least("slope against loglog R", &[grow.slope], kappa),
            Check::at_most("control slope", &[flat.slope], kappa),
            Check::at_least(
                "control far-field decay exponent",
                &[zyg.decay_exponent],
                2.0 - k.get("decay_exponent_tol"),
            ),
        ],
    );
    Ok((report, grow, flat))
}

pub const TRANSFORM_CORPUS: usize = 40;

/// Closed-form antiderivative and rank agreement of the characterising functionals.
pub fn transforms(
    depth: u32,
    seed: u64,
    k: &Constants,
) -> Result<(CriterionReport, Vec<experiments::TransformReport>)> {
    let mut h = inputs(10, depth, seed);
    let spec = OrliczSpec::builtin("sjolin")?;
    let derivative: Vec<f64> = log_grid(E * 1.01, 1e12, 60)
        .iter()
        .map(|&s| {
            let step = s * 1e-5;
            let numeric = (orlicz::sjolin_antiderivative(s + step)
                - orlicz::sjolin_antiderivative(s - step))
                / (2.0 * step);
            let exact = spec.density(0.0, s).expect("density") / s;
            (numeric - exact).abs() / exact
        })
        .collect();
    let corpus = corpus::spiky_corpus(depth, seed, TRANSFORM_CORPUS);
    corpus.iter().for_each(|f| hash_grid(&mut h, f));
    let reports: Vec<experiments::TransformReport> = ["sjolin", "lie"]
        .par_iter()
        .map(|tag| experiments::run_orlicz_transform(&OrliczSpec::builtin(tag)?, &corpus, E))
        .collect::<Result<_>>()?;
    let mut checks = vec![Check::at_most("antiderivative derivative", &derivative, k.get("sjolin_tol"))];
    for r in &reports {
        checks.push(Check::at_least(&format!("{} rank correlation", r.spec), &[r.kendall_tau], k.get("kendall_min")));
        checks.push(Check::at_most(&format!("{} ratio bracket", r.spec), &[r.bracket], k.get("transform_bracket")));
    }
    Ok((CriterionReport::new(10, "Orlicz transforms", depth, seed, h, checks), reports))
}

/// All ten suites at one `(depth, seed)`.
pub fn run_all(depth: u32, seed: u64, k: &Constants) -> Result<Vec<CriterionReport>> {
    Ok(vec![
        exact_identities(depth, seed, k)?,
        exact_constants(depth, seed, k)?,
        stein(k)?.0,
        weak_type(seed, k)?,
        atomic_bounds(depth, seed, k)?,
        paraproduct_bounds(depth, seed, k)?,
        covering(depth, seed, k)?,
        fourier_suite(depth, seed, k)?.0,
        mean_zero_necessity(k)?.0,
        transforms(depth, seed, k)?.0,
    ])
}
