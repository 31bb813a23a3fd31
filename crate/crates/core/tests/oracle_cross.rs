//! Cross-validation of the two cohomology routes on products of lines: the
//! weight-graded convolution against the toric oracle on the product fan.

use permucat_core::gitwin::eq_cohomology_p1n;
use permucat_core::toric::{Fan, Oracle, TDivisor};
use proptest::prelude::*;

fn product_fan(k: usize) -> Fan {
    let mut fan = Fan::projective(1);
    for _ in 1..k {
        fan = Fan::product(&fan, &Fan::projective(1));
    }
    fan
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weighted_table_totals_match_the_oracle(
        j in proptest::collection::vec(-3i64..=3, 1..=3),
    ) {
        let k = j.len();
        let oracle = Oracle::new(product_fan(k)).unwrap();
        // the fan lists the first ray of each factor, then the second
        let mut coeffs = vec![0i64; 2 * k];
        for (i, &ji) in j.iter().enumerate() {
            // degree on factor i as a multiple of its first ray divisor
            coeffs[2 * i] = ji;
        }
        let table = oracle.cohomology(&TDivisor { coeffs }, 1).unwrap();
        let weighted = eq_cohomology_p1n(&j);
        for d in 0..=k {
            let total: u64 = weighted
                .dims
                .iter()
                .filter(|&(&(deg, _), _)| deg == d)
                .map(|(_, &c)| c)
                .sum();
            prop_assert_eq!(table.h[d], total, "degree {}", d);
        }
    }
}
