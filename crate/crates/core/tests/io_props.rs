use proptest::prelude::*;
use ztcp_core::io::{parse_tensor, parse_vector, serialize_tensor, serialize_vector};
use ztcp_core::tensor::MultiIndex;
use ztcp_core::Tensor;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -10.0f64..10.0,
        Just(0.1),
        Just(f64::MIN_POSITIVE),
    ]
}

fn tensor() -> impl Strategy<Value = Tensor> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| {
        let total = n.pow(m as u32);
        prop::collection::vec(prop::option::weighted(0.5, finite()), total).prop_map(move |vals| {
            let entries = MultiIndex::new(m, n)
                .zip(vals)
                .filter_map(|(idx, v)| v.map(|v| (idx, v)));
            Tensor::from_entries(m, n, entries).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn tensor_round_trip(t in tensor()) {
        let text = serialize_tensor(&t);
        let back = parse_tensor(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(serialize_tensor(&back), text);
    }

    #[test]
    fn vector_round_trip(x in prop::collection::vec(finite(), 0..12)) {
        let back = parse_vector(&serialize_vector(&x)).unwrap();
        prop_assert_eq!(x.len(), back.len());
        for (a, b) in x.iter().zip(&back) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn garbage_never_panics(s in "\\PC{0,200}") {
        let _ = parse_tensor(&s);
        let _ = parse_vector(&s);
    }
}
