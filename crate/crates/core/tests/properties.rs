use std::f64::consts::TAU;

use hlog::atomic::{self, AtomKind};
use hlog::dyadic::{self, HaarCoefficients, Shift};
use hlog::paraproduct;
use hlog::{maximal, orlicz, GridFunction, OrliczSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn shift() -> impl Strategy<Value = Shift> {
    prop_oneof![Just(Shift::Zero), Just(Shift::Third)]
}

/// Real samples on a torus grid of depth 2..=5, mixing small values and occasional spikes.
fn torus_values() -> impl Strategy<Value = Vec<f64>> {
    (2u32..=5).prop_flat_map(|depth| {
        prop::collection::vec(
            prop_oneof![4 => -3.0..3.0f64, 1 => -500.0..500.0f64, 1 => Just(0.0)],
            3usize << depth,
        )
    })
}

fn torus(values: &[f64]) -> GridFunction {
    GridFunction::torus_real(values).unwrap()
}

fn expansion(shift: Shift, depth: u32, values: &[f64]) -> HaarCoefficients {
    let mut c = HaarCoefficients::zero(shift, depth);
    c.set_mean(Complex64::new(values[0], 0.0));
    for (arc, v) in dyadic::arcs(shift, depth).zip(values[1..].iter().cycle()) {
        c.set(&arc, Complex64::new(v * arc.length().sqrt(), 0.0)).unwrap();
    }
    c
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_is_linear(v in torus_values(), alpha in -4.0..4.0f64, beta in -4.0..4.0f64) {
        let f = torus(&v);
        let g = torus(&v.iter().rev().copied().collect::<Vec<_>>());
        let (a, b) = (Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0));
        let lhs = f.scale(a).add(&g.scale(b)).unwrap().integrate();
        let rhs = a * f.integrate() + b * g.integrate();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (f.l1_norm() + g.l1_norm()).max(1.0) * 8.0);
    }

    #[test]
    fn centring_removes_the_mean(v in torus_values()) {
        let f = torus(&v);
        let m = f.mean();
        prop_assert!(f.map(|z| z - m).mean().norm() <= 1e-12 * f.sup_norm().max(1.0));
        prop_assert_eq!(f.restrict_mean(&dyadic::Arc::root(Shift::Zero)).unwrap(), m);
    }

    #[test]
    fn haar_transform_round_trips(v in torus_values(), s in shift()) {
        let f = torus(&v);
        let c = dyadic::analyze(&f, s).unwrap();
        prop_assert!(dyadic::synthesize(&c).max_abs_diff(&f).unwrap() <= 1e-12 * f.sup_norm().max(1.0));
        let again = dyadic::analyze(&dyadic::synthesize(&c), s).unwrap();
        let worst = c.coeffs().iter().zip(again.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-12 * f.sup_norm().max(1.0));
    }

    #[test]
    fn haar_analysis_is_linear(v in torus_values(), s in shift(), alpha in -3.0..3.0f64) {
        let f = torus(&v);
        let g = f.map(|z| z * z.re.signum());
        let a = Complex64::new(alpha, 0.0);
        let lhs = dyadic::analyze(&f.scale(a).add(&g).unwrap(), s).unwrap();
        let (cf, cg) = (dyadic::analyze(&f, s).unwrap(), dyadic::analyze(&g, s).unwrap());
        let scale = 1e-12 * (f.sup_norm() + g.sup_norm()).max(1.0) * 4.0;
        for ((l, x), y) in lhs.coeffs().iter().zip(cf.coeffs()).zip(cg.coeffs()) {
            prop_assert!((l - (a * x + y)).norm() <= scale);
        }
        prop_assert!((lhs.mean() - (a * cf.mean() + cg.mean())).norm() <= scale);
    }

    #[test]
    fn luxemburg_norm_is_homogeneous(v in torus_values(), mu in 0.01..100.0f64) {
        let f = torus(&v);
        prop_assume!(f.sup_norm() > 0.0);
        let spec = OrliczSpec::psi0();
        let a = orlicz::luxemburg_norm_grid(&f, &spec, 1.0 / TAU).unwrap();
        let b = orlicz::luxemburg_norm_grid(&f.scale(Complex64::new(0.0, mu)), &spec, 1.0 / TAU).unwrap();
        prop_assert!(close(b, mu * a, 1e-7));
    }

    #[test]
    fn luxemburg_norm_quasi_triangle(v in torus_values(), w in torus_values()) {
        prop_assume!(v.len() == w.len());
        let (f, g) = (torus(&v), torus(&w));
        let spec = OrliczSpec::psi0();
        let norm = |h: &GridFunction| orlicz::luxemburg_norm_grid(h, &spec, 1.0 / TAU).unwrap();
        prop_assert!(norm(&f.add(&g).unwrap()) <= 2.0 * (norm(&f) + norm(&g)) + 1e-12);
    }

    #[test]
    fn psi0_doubling_and_sublinearity(s in 1e-8..1e8f64, t in 1.0..1e6f64, parts in prop::collection::vec(0.0..1e4f64, 1..8)) {
        let psi = orlicz::psi0;
        prop_assert!(t / (1.0 + t.ln()) * psi(s) <= psi(s * t) * (1.0 + 1e-12));
        prop_assert!(psi(s * t) <= t * psi(s) * (1.0 + 1e-12));
        let total: f64 = parts.iter().sum();
        prop_assert!(psi(total) <= parts.iter().map(|&x| psi(x)).sum::<f64>() * (1.0 + 1e-12));
        let upper: f64 = parts.iter().map(|&x| psi(x.sqrt())).sum();
        prop_assert!(psi(total.sqrt()) <= upper * (1.0 + 1e-12));
    }

    #[test]
    fn maximal_operators_are_sublinear(v in torus_values(), w in torus_values()) {
        prop_assume!(v.len() == w.len());
        let (f, g) = (torus(&v), torus(&w));
        let sum = f.add(&g).unwrap();
        let slack = 1e-10 * (f.sup_norm() + g.sup_norm()).max(1.0);
        let m = |h: &GridFunction| maximal::hl_maximal_torus(h).unwrap();
        for ((a, b), c) in m(&sum).samples().iter().zip(m(&f).samples()).zip(m(&g).samples()) {
            prop_assert!(a.re <= b.re + c.re + slack);
        }
        let p = |h: &GridFunction| maximal::radial_poisson_maximal(h, 12).unwrap();
        for ((a, b), c) in p(&sum).samples().iter().zip(p(&f).samples()).zip(p(&g).samples()) {
            prop_assert!(a.re <= b.re + c.re + slack);
        }
    }

    #[test]
    fn decomposition_reconstructs_with_level_bound(v in torus_values(), s in shift()) {
        let f = torus(&v);
        let dec = atomic::atomic_decompose(&f, s).unwrap();
        prop_assert!(dec.reconstruct().unwrap().max_abs_diff(&f).unwrap() <= 1e-12 * f.sup_norm().max(1.0));
        let depth = f.torus_depth().unwrap();
        for atom in &dec.atoms {
            let g = atom.to_grid(depth).unwrap();
            let drift = g.integrate().norm();
            prop_assert!(drift <= 1e-12 * f.sup_norm() * TAU, "atom {:?} integral {drift:e}", atom.kind);
            if let AtomKind::Block { level } = atom.kind {
                prop_assert!(atom.sup_norm <= 3.0 * f64::from(level).exp2());
            }
        }
    }

    #[test]
    fn decomposition_of_expansions_is_exact(values in prop::collection::vec(-20.0..20.0f64, 2..40), s in shift(), depth in 2u32..6) {
        let f = dyadic::synthesize(&expansion(s, depth, &values));
        let dec = atomic::atomic_decompose(&f, s).unwrap();
        prop_assert!(dec.reconstruct().unwrap().max_abs_diff(&f).unwrap() <= 1e-12 * f.sup_norm().max(1.0));
    }

    #[test]
    fn lambda_inf_is_homogeneous(v in torus_values(), mu in 0.05..20.0f64, k in -6i32..6) {
        let f = torus(&v);
        let d = atomic::atomic_decompose(&f, Shift::Zero).unwrap();
        let lam = atomic::lambda_inf(d.mean, &d.atoms).unwrap();
        let scaled: Vec<_> = d.atoms.iter().cloned().map(|mut a| {
            a.sup_norm *= mu;
            a
        }).collect();
        prop_assert!(close(atomic::lambda_inf(d.mean * mu, &scaled).unwrap(), mu * lam, 1e-7));
        // the ladder is dyadic, so the decomposition itself is equivariant under powers of two
        let two_k = f64::from(k).exp2();
        let d2 = atomic::atomic_decompose(&f.scale(Complex64::new(two_k, 0.0)), Shift::Zero).unwrap();
        prop_assert!(close(atomic::lambda_inf(d2.mean, &d2.atoms).unwrap(), two_k * lam, 1e-7));
    }

    #[test]
    fn good_bad_parts_have_mean_zero(v in torus_values(), s in shift(), lambda in 0.1..50.0f64) {
        let f = torus(&v);
        let (good, bad) = atomic::cz_good_bad_split(&f, s, lambda).unwrap();
        let mut sum = good;
        for (arc, b) in &bad {
            prop_assert!(b.restrict_mean(arc).unwrap().norm() <= 1e-12 * f.sup_norm().max(1.0));
            sum = sum.add(b).unwrap();
        }
        prop_assert!(sum.max_abs_diff(&f).unwrap() <= 1e-12 * f.sup_norm().max(1.0));
    }

    #[test]
    fn paraproducts_split_the_product(a in prop::collection::vec(-5.0..5.0f64, 2..30), b in prop::collection::vec(-5.0..5.0f64, 2..30), s in shift(), depth in 2u32..6) {
        let (f, g) = (expansion(s, depth, &a), expansion(s, depth, &b));
        let (lo, hi) = paraproduct::split_product(&f, &g).unwrap();
        let product = dyadic::synthesize(&f).mul(&dyadic::synthesize(&g)).unwrap();
        let diff = lo.add(&hi).unwrap().max_abs_diff(&product).unwrap();
        prop_assert!(diff <= 1e-12 * product.sup_norm().max(1.0) * 16.0);
    }

    #[test]
    fn split_into_two_systems_is_a_partition(v in torus_values()) {
        let f = torus(&v);
        let s = paraproduct::split_h1_two_systems(&f).unwrap();
        let back = dyadic::synthesize(&s.first).add(&dyadic::synthesize(&s.second)).unwrap();
        prop_assert!(back.max_abs_diff(&f).unwrap() <= 1e-12 * f.sup_norm().max(1.0));
    }
}
