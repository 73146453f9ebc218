//! Property-based audits of the core invariants: entropies under unitaries
//! and tensor products, divergence positivity, trace preservation and
//! unitality of random channels, Schatten norms, and the quadrature
//! density. Instances are generated from proptest seeds so shrinking finds
//! small counterexamples.

use ncssa::algebra::{AlgElement, Algebra};
use ncssa::channel;
use ncssa::entropy;
use ncssa::linalg::{C64, CMat};
use ncssa::norms;
use ncssa::quad::{alpha_density, alpha_tail_bound, alpha_weight_sum, PanelConfig};
use ncssa::random;
use proptest::prelude::*;

/// State with the given spectrum, rotated by a seeded Haar unitary.
fn rotated_state(probs: &[f64], seed: u64) -> AlgElement {
    let d = probs.len();
    let total: f64 = probs.iter().sum();
    let mut m = CMat::zeros(d, d);
    for (i, p) in probs.iter().enumerate() {
        m[(i, i)] = C64::from(p / total);
    }
    let mut rng = random::seeded_rng(seed);
    let u = random::haar_unitary(d, &mut rng);
    let rotated = &u * m * u.adjoint();
    Algebra::full(d).element(vec![rotated]).expect("state")
}

fn spectrum(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn entropy_range_and_unitary_invariance(
        probs in spectrum(3),
        seed in any::<u64>(),
        seed2 in any::<u64>(),
    ) {
        let rho = rotated_state(&probs, seed);
        let h = entropy::von_neumann_entropy(&rho).unwrap();
        prop_assert!(h >= -1e-12 && h <= 3.0f64.ln() + 1e-12, "H = {h}");
        let again = rotated_state(&probs, seed2);
        let h2 = entropy::von_neumann_entropy(&again).unwrap();
        prop_assert!((h - h2).abs() <= 1e-10, "spectrum invariance broken: {h} vs {h2}");
    }

    #[test]
    fn entropy_additive_on_products(
        pa in spectrum(2),
        pb in spectrum(3),
        seed in any::<u64>(),
    ) {
        let a = rotated_state(&pa, seed);
        let b = rotated_state(&pb, seed ^ 0x9e37_79b9);
        let joint = a.tensor(&b).unwrap();
        let sum = entropy::von_neumann_entropy(&a).unwrap()
            + entropy::von_neumann_entropy(&b).unwrap();
        let h = entropy::von_neumann_entropy(&joint).unwrap();
        prop_assert!((h - sum).abs() <= 1e-9, "H(a⊗b) = {h}, H(a)+H(b) = {sum}");
    }

    #[test]
    fn divergence_positive_and_zero_on_diagonal(
        pr in spectrum(3),
        ps in spectrum(3),
        seed in any::<u64>(),
    ) {
        // A shared rotation keeps the pair generic but jointly measurable
        // states are not needed: positivity holds for any pair.
        let rho = rotated_state(&pr, seed);
        let sig = rotated_state(&ps, seed ^ 0x51ed_270b);
        let d = entropy::relative_entropy(&rho, &sig).unwrap();
        prop_assert!(d >= -1e-10, "D = {d}");
        let self_d = entropy::relative_entropy(&rho, &rho).unwrap();
        prop_assert!(self_d.abs() <= 1e-10, "D(ρ‖ρ) = {self_d}");
    }

    #[test]
    fn divergence_additive_on_products(
        pr in spectrum(2),
        ps in spectrum(2),
        seed in any::<u64>(),
    ) {
        let r1 = rotated_state(&pr, seed);
        let s1 = rotated_state(&ps, seed);
        let r2 = rotated_state(&ps, seed ^ 1);
        let s2 = rotated_state(&pr, seed ^ 1);
        let joint = entropy::relative_entropy(
            &r1.tensor(&r2).unwrap(),
            &s1.tensor(&s2).unwrap(),
        )
        .unwrap();
        let sum = entropy::relative_entropy(&r1, &s1).unwrap()
            + entropy::relative_entropy(&r2, &s2).unwrap();
        prop_assert!((joint - sum).abs() <= 1e-9, "joint {joint} vs sum {sum}");
    }

    #[test]
    fn random_channels_preserve_trace_and_unit(
        seed in any::<u64>(),
        d_in in 2usize..4,
        d_out in 2usize..4,
    ) {
        let mut rng = random::seeded_rng(seed);
        let phi = random::stinespring_channel(d_in, d_out, d_in, &mut rng).unwrap();
        prop_assert!(phi.is_cptp());
        let rho = random::ginibre_state(phi.input(), &mut rng).unwrap();
        let out = phi.apply(&rho).unwrap();
        prop_assert!((out.trace_re() - 1.0).abs() <= 1e-10, "trace {}", out.trace_re());
        prop_assert!(out.hermitize().min_eigenvalue().unwrap() >= -1e-10);
        let one_in = phi.input().identity();
        let one_out = phi.output().identity();
        let back = phi.adjoint().apply(&one_out).unwrap();
        prop_assert!(back.max_abs_diff(&one_in).unwrap() <= 1e-10, "adjoint not unital");
    }

    #[test]
    fn measurement_statistics_form_a_distribution(
        probs in spectrum(3),
        seed in any::<u64>(),
    ) {
        let rho = rotated_state(&probs, seed);
        let mut rng = random::seeded_rng(seed ^ 0xdead);
        let basis = random::haar_unitary(3, &mut rng);
        let povm = ncssa::channel::Povm::from_basis(&basis).unwrap();
        let meas = channel::povm_channel(&povm).unwrap();
        let out = meas.apply(&rho).unwrap();
        let mut total = 0.0;
        for k in 0..out.algebra().blocks().len() {
            let p = out.block(k)[(0, 0)].re;
            prop_assert!(p >= -1e-12, "negative outcome probability {p}");
            total += p * out.algebra().blocks()[k].weight;
        }
        prop_assert!((total - 1.0).abs() <= 1e-10, "probabilities sum to {total}");
    }

    #[test]
    fn schatten_norms_order_on_states(
        probs in spectrum(4),
        seed in any::<u64>(),
        p in 1.2f64..6.0,
    ) {
        let rho = rotated_state(&probs, seed);
        let n1 = norms::schatten_norm(&rho, 1.0).unwrap();
        let np = norms::schatten_norm(&rho, p).unwrap();
        prop_assert!((n1 - 1.0).abs() <= 1e-12, "‖ρ‖₁ = {n1}");
        prop_assert!(np <= n1 + 1e-12, "‖ρ‖_{p} = {np} above ‖ρ‖₁");
        // Frobenius case has a closed form.
        let frob = norms::schatten_norm(&rho, 2.0).unwrap();
        let gram = rho.adjoint().mul(&rho).unwrap().trace_re().sqrt();
        prop_assert!((frob - gram).abs() <= 1e-10, "{frob} vs {gram}");
    }

    #[test]
    fn quadrature_density_even_positive_normalized(
        t in 0.0f64..8.0,
        half_width in 3.0f64..10.0,
    ) {
        prop_assert!(alpha_density(t) > 0.0);
        prop_assert!((alpha_density(t) - alpha_density(-t)).abs() <= 1e-15);
        prop_assert!(alpha_density(t) <= alpha_density(0.0) + 1e-15);

        let cfg = PanelConfig { half_width, ..PanelConfig::default() };
        let mass = alpha_weight_sum(&cfg).unwrap();
        let tail = alpha_tail_bound(half_width);
        prop_assert!(mass <= 1.0 + 1e-12, "mass {mass}");
        prop_assert!(mass >= 1.0 - tail - 1e-12, "mass {mass}, tail bound {tail}");
    }
}
