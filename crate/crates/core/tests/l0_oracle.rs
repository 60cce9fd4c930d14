//! BP against a brute-force sparsest-solution oracle.

mod common;

use common::l0_case;
#[test]
fn exact_bp_support_is_sparsest() {
    let mut compared = 0;
    for i in 0..60 {
        if let Some((bp, oracle)) = l0_case(11, i) {
            assert_eq!(bp, oracle, "instance {i}");
            compared += 1;
        }
    }
    assert!(compared >= 30, "only {compared} exact instances");
}
