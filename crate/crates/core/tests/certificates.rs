//! Certificate soundness and the interpolation norm bounds on small
//! near-orthogonal instances.

mod common;

use common::{bound_case, rng, small_instance, soundness_case};

#[test]
fn passing_conditions_imply_exact_recovery() {
    let mut checked = 0;
    for i in 0..80 {
        let s = small_instance(&mut rng(21, i));
        if let Some((exact, certified)) = soundness_case(&s) {
            assert!(exact, "instance {i}: conditions pass but recovery is not exact");
            assert!(certified, "instance {i}: certificate fails verification");
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} instances met the conditions");
}

#[test]
fn interpolation_bounds_hold() {
    let mut total = 0;
    for i in 0..60 {
        let s = small_instance(&mut rng(31, i));
        let (n, bad) = bound_case(&s, i);
        assert!(bad.is_empty(), "instance {i}: {bad:?}");
        total += n;
    }
    assert!(total >= 60, "only {total} bound checks ran");
}
