mod common;

use cabello::npa::NpaLevel;
use cabello::optimize::{SweepRecord, SweepStatus};
use cabello::table::{read_records, round_sig, write_records};
use common::seeded;
use proptest::prelude::*;

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![8 => -2.0..2.0f64, 1 => Just(0.0), 1 => 1e-12..1e-6f64]
}

fn record() -> impl Strategy<Value = SweepRecord> {
    (
        0.0..0.5f64,
        value(),
        value(),
        value(),
        proptest::sample::select(NpaLevel::ALL.to_vec()),
        proptest::sample::select(vec![SweepStatus::Ok, SweepStatus::MaxIter, SweepStatus::Failed]),
    )
        .prop_map(|(eps, local_bound, quantum_lower, quantum_upper, level, status)| SweepRecord {
            eps,
            local_bound,
            quantum_lower,
            quantum_upper,
            level,
            status,
        })
}

fn rounded(r: &SweepRecord) -> SweepRecord {
    SweepRecord {
        eps: round_sig(r.eps),
        local_bound: round_sig(r.local_bound),
        quantum_lower: round_sig(r.quantum_lower),
        quantum_upper: round_sig(r.quantum_upper),
        ..r.clone()
    }
}

proptest! {
    #![proptest_config(seeded(500))]

    #[test]
    fn csv_round_trips(records in proptest::collection::vec(record(), 0..20)) {
        let mut first = Vec::new();
        write_records(&records, &mut first).unwrap();
        let parsed = read_records(first.as_slice()).unwrap();
        let expected: Vec<SweepRecord> = records.iter().map(rounded).collect();
        prop_assert_eq!(&parsed, &expected);
        let mut second = Vec::new();
        write_records(&parsed, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn rounding_keeps_twelve_digits(x in -1e3..1e3f64) {
        prop_assume!(x != 0.0);
        prop_assert!(((round_sig(x) - x) / x).abs() <= 5e-12);
        prop_assert_eq!(round_sig(round_sig(x)), round_sig(x));
    }
}

#[test]
fn header_is_fixed() {
    let mut out = Vec::new();
    write_records(&[], &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "eps,local_bound,quantum_lower,quantum_upper,level,status\n");
}
