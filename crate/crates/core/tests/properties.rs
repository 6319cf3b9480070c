//! Algebraic laws checked on random inputs.

mod common;

use common::*;
use invkit::genmat::ScalarMatrix;
use invkit::{FieldDescriptor, InvariantExpr, MatrixKind, Ring, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sigma_matches_characteristic_polynomial() {
    laws::sigma_matches_characteristic_polynomial(200);
}

#[test]
fn standard_sets_are_conjugation_invariant() {
    laws::standard_sets_are_conjugation_invariant(50);
}

#[test]
fn trace_is_cyclic_and_transpose_reversal_invariant() {
    laws::trace_is_cyclic_and_transpose_reversal_invariant(6, 2, 3);
}

#[test]
fn cyclic_identity_for_three_by_three_on_long_words() {
    laws::cyclic_identity_for_three_by_three_on_long_words();
}

#[test]
fn psi_is_a_ring_homomorphism() {
    laws::psi_is_a_ring_homomorphism(100);
}

#[test]
fn psi_maps_generic_traces_to_symmetric_ones() {
    laws::psi_maps_generic_traces_to_symmetric_ones();
}

fn qis2_scalar() -> impl Strategy<Value = Scalar> {
    prop::array::uniform4(-20i64..=20).prop_map(|c| {
        FieldDescriptor::QAdjoinISqrt2
            .parse_scalar(&format!("{} + {}*i + {}*sqrt2 + {}*i*sqrt2", c[0], c[1], c[2], c[3]))
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn extension_field_axioms(a in qis2_scalar(), b in qis2_scalar(), c in qis2_scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        if !a.is_zero() {
            let inv = a.inv().unwrap();
            prop_assert_eq!(a.mul(&inv), a.one_like());
        }
    }

    #[test]
    fn prime_field_axioms(a in -1000i64..1000, b in -1000i64..1000, p in prop::sample::select(vec![3u64, 5, 7, 17, 2305843009213693951])) {
        let f = FieldDescriptor::prime(p).unwrap();
        let (x, y) = (f.from_i64(a), f.from_i64(b));
        prop_assert_eq!(x.mul(&y), f.from_i64(((a as i128 * b as i128).rem_euclid(p as i128)) as i64));
        if !x.is_zero() {
            prop_assert_eq!(x.mul(&x.inv().unwrap()), f.one());
        }
    }

    #[test]
    fn four_by_four_extension_matrices_invert(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = FieldDescriptor::QAdjoinISqrt2;
        let a = random_matrix(&mut rng, 4, MatrixKind::General, &field, 3);
        match inverse(&a) {
            Some(b) => {
                prop_assert_eq!(a.mul(&b), invkit::Matrix::identity(4, &field.one()));
                prop_assert!(!a.det().is_zero());
            }
            None => prop_assert!(a.det().is_zero()),
        }
    }

    #[test]
    fn evaluation_commutes_with_expansion(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = FieldDescriptor::prime(7).unwrap();
        let w: Vec<usize> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(1..=2)).collect();
        let t = rng.gen_range(1..=3);
        let e = InvariantExpr::sigma_t(t, &w);
        let tuple: Vec<ScalarMatrix> = (0..2).map(|_| random_matrix(&mut rng, 3, MatrixKind::Symmetric, &field, 6)).collect();
        let poly = e.expand(MatrixKind::Symmetric, 3, 2, field).unwrap();
        prop_assert_eq!(invkit::genmat::evaluate_at(&poly, &tuple), e.evaluate(&tuple).unwrap());
    }
}
