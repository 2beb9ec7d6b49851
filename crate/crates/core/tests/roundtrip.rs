mod common;

use common::{random_instance, submodular_instance, Kind};
use persuasion::json::{instance_digest, parse_instance, scheme_from_json, scheme_to_json, write_instance, SchemeFile};
use persuasion::persuasion::solve_full;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KINDS: [Kind; 5] = [Kind::Uniform, Kind::Partition, Kind::Graphic, Kind::Oracle, Kind::Path];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_survive_serialization(seed in any::<u64>(), kind in 0..5usize, n in 3..7usize, k in 1..4usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, KINDS[kind], n, k);
        let text = write_instance(&inst).unwrap();
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back).unwrap(), text);
        prop_assert_eq!(instance_digest(&back).unwrap(), instance_digest(&inst).unwrap());
    }

    #[test]
    fn tabular_utilities_survive_serialization(seed in any::<u64>(), n in 2..5usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = submodular_instance(&mut rng, n, 2);
        prop_assert_eq!(parse_instance(&write_instance(&inst).unwrap()).unwrap(), inst);
    }

    #[test]
    fn schemes_survive_serialization(seed in any::<u64>(), kind in 0..5usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, KINDS[kind], 4, 2);
        let res = solve_full(&inst).unwrap();
        let file = SchemeFile {
            scheme: res.scheme.clone(),
            value: res.sender_value.clone(),
            method: res.method.name().into(),
            instance_digest: instance_digest(&inst).unwrap(),
        };
        let back = scheme_from_json(&scheme_to_json(&file, 2), 2).unwrap();
        prop_assert_eq!(back.scheme.strip_zeros(), res.scheme.strip_zeros());
        prop_assert_eq!(back.value, res.sender_value);
    }
}

#[test]
fn integers_and_unreduced_fractions_normalize() {
    let text = r#"{
        "states": ["a", "b"], "prior": ["2/4", 0.5e0],
        "elements": ["x", "y"],
        "sender": {"kind": "linear", "values": [[1, 0], [0, 1]]},
        "receiver": {"kind": "linear", "values": [["6/3", 1], [1, 2]]},
        "constraint": {"kind": "uniform", "k": 1}, "sense": "max"
    }"#;
    assert!(parse_instance(text).is_err(), "floats must be rejected");
    let text = text.replace("0.5e0", "\"1/2\"");
    let inst = parse_instance(&text).unwrap();
    let again = parse_instance(&write_instance(&inst).unwrap()).unwrap();
    assert_eq!(inst, again);
    assert!(write_instance(&inst).unwrap().contains("\"2\""));
}
