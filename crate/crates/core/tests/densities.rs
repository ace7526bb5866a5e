use croftonlab_core::coeffcore::{admissible_pairs, ValKey};
use croftonlab_core::extalg::{all_densities, density_beta, density_gamma, permutation_oracle, FormSpec, SffMatrix};
use croftonlab_core::geom::{gauge_rotate_frame, sample_boundary, Ellipsoid, Shape};
use croftonlab_core::planes::{haar_unitary, sample_rng};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand_chacha::rand_core::RngCore;

fn random_sff(n: usize, seed: u64) -> SffMatrix {
    let mut rng = sample_rng(seed, 0);
    let d = 2 * n - 1;
    let m = DMatrix::from_fn(d, d, |_, _| (rng.next_u64() as f64 / u64::MAX as f64) * 2.0 - 1.0);
    SffMatrix::new(n, &m + m.transpose())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn engine_matches_permutation_oracle() {
    for n in 2..=3 {
        for seed in 0..100 {
            let h = random_sff(n, 1000 * n as u64 + seed);
            for (k, q) in admissible_pairs(n) {
                if k != 2 * q {
                    let e = density_beta(k, q, &h).unwrap();
                    let o = permutation_oracle(FormSpec::Beta { k, q }, &h).unwrap();
                    assert!(rel(e, o) < 1e-10, "beta n={n} k={k} q={q}: {e} vs {o}");
                }
                if k != n + q {
                    let e = density_gamma(k, q, &h).unwrap();
                    let o = permutation_oracle(FormSpec::Gamma { k, q }, &h).unwrap();
                    assert!(rel(e, o) < 1e-10, "gamma n={n} k={k} q={q}: {e} vs {o}");
                }
            }
        }
    }
}

#[test]
fn densities_do_not_depend_on_the_frame_of_d() {
    let e = Shape::Ellipsoid(Ellipsoid::from_axes(&[1.0, 0.7, 0.5, 1.3, 0.9, 0.6]).unwrap());
    let mut rng = sample_rng(5, 0);
    for (i, p) in sample_boundary(&e, 0).into_iter().enumerate().step_by(97) {
        let u = haar_unitary(2, &mut rng);
        let q = gauge_rotate_frame(&p, &u).unwrap();
        let (a, b) = (all_densities(&p.h), all_densities(&q.h));
        for (key, v) in a {
            assert!(rel(b[&key], v) < 1e-10, "point {i} {key:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneous_in_the_sff(seed in 0u64..10_000, t in 0.1f64..3.0) {
        let n = 3;
        let h = random_sff(n, seed);
        let a = all_densities(&h);
        let b = all_densities(&h.scaled(t));
        for (key, v) in a {
            // both families carry 2n-k-1 curvature factors
            let deg = match key {
                ValKey::B(k, _) | ValKey::G(k, _) => 2 * n - k - 1,
                ValKey::Vol => unreachable!(),
            };
            prop_assert!(rel(b[&key], v * t.powi(deg as i32)) < 1e-10);
        }
    }

    #[test]
    fn diagonal_closed_form(hopf in -2.0f64..2.0, lambda in 0.1f64..2.0) {
        for n in 2..=4 {
            let h = SffMatrix::diagonal(n, hopf, lambda);
            let fact: f64 = (1..n).map(|i| i as f64).product();
            for (k, q) in admissible_pairs(n) {
                if k != 2 * q {
                    let expect = 2f64.powi((k - 2 * q - 1) as i32) * lambda.powi((2 * n - k - 1) as i32) * fact;
                    prop_assert!(rel(density_beta(k, q, &h).unwrap(), expect) < 1e-12);
                }
            }
        }
    }
}
