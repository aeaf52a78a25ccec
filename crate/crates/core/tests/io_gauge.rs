use std::sync::Arc;

use dgconn::connection::random_connection;
use dgconn::homology::homology_basis;
use dgconn::invariants::invariant_data;
use dgconn::io::{
    decode_complex, decode_connection, decode_invariants, encode_complex, encode_connection,
    encode_invariants,
};
use dgconn::{catalog, Connection, Gauge, Rational};
use num_complex::Complex64;
use proptest::prelude::*;

const NAMES: [&str; 6] = ["sphere2", "sphere3", "torus7", "rp2_6", "genus2", "torus3d"];

fn complex(i: usize) -> Arc<dgconn::SimplicialComplex> {
    Arc::new(catalog(NAMES[i]).unwrap())
}

#[test]
fn complex_files_round_trip() {
    for i in 0..NAMES.len() {
        let k = complex(i);
        let text = encode_complex(&k);
        let back = decode_complex(&text).unwrap();
        assert_eq!(encode_complex(&back), text, "{}", NAMES[i]);
        assert_eq!(back.num_facets(), k.num_facets());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn connection_files_round_trip(i in 0..NAMES.len(), seed in any::<u64>()) {
        let k = complex(i);
        let mu: Connection<Rational> = random_connection(k.clone(), seed);
        let back: Connection<Rational> = decode_connection(k.clone(), &encode_connection(&mu)).unwrap();
        prop_assert!(back.stored() == mu.stored());
        let z: Connection<Complex64> = random_connection(k.clone(), seed);
        let text = encode_connection(&z);
        let back: Connection<Complex64> = decode_connection(k, &text).unwrap();
        prop_assert_eq!(encode_connection(&back), text);
    }

    #[test]
    fn invariants_are_gauge_invariant(i in 0..NAMES.len(), seed in any::<u64>(), gauge in any::<u64>()) {
        let k = complex(i);
        let h1 = homology_basis(&k, 1).unwrap();
        let mu: Connection<Rational> = random_connection(k.clone(), seed);
        let moved = mu.apply_gauge(&Gauge::random(&k, gauge)).unwrap();
        let a = invariant_data(&mu, &h1).unwrap();
        let b = invariant_data(&moved, &h1).unwrap();
        prop_assert!(a == b);
        let text = encode_invariants(&a);
        let back = decode_invariants::<Rational>(k, &h1, &text).unwrap();
        prop_assert!(back == a);
    }
}
