//! Progress and support of a point, with 1-based coordinate indices.

use std::collections::BTreeSet;

/// Highest 1-based index `j` with `|x_j| > alpha`, or 0 when none exceeds it.
pub fn prog(x: &[f64], alpha: f64) -> usize {
    x.iter().rposition(|v| v.abs() > alpha).map_or(0, |i| i + 1)
}

/// 1-based indices of the non-zero coordinates.
pub fn support(x: &[f64]) -> BTreeSet<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, _)| i + 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prog_examples() {
        assert_eq!(prog(&[0.0, 0.0, 0.0], 0.1), 0);
        let a = 0.25;
        assert_eq!(prog(&[2.0 * a, 0.0, 3.0 * a], a), 3);
        assert_eq!(prog(&[a / 2.0], a), 0);
        // strictly greater
        assert_eq!(prog(&[a], a), 0);
    }

    #[test]
    fn support_examples() {
        let s = support(&[0.0, 1.5, 0.0, -2.0]);
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![2, 4]);
        assert!(support(&[0.0; 5]).is_empty());
    }

    proptest! {
        #[test]
        fn prog_monotone_in_alpha(x in prop::collection::vec(-5.0f64..5.0, 0..20),
                                  a in 0.0f64..3.0, b in 0.0f64..3.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(prog(&x, hi) <= prog(&x, lo));
            prop_assert!(prog(&x, 0.0) <= x.len());
        }

        #[test]
        fn support_max_is_prog_zero(x in prop::collection::vec(
            prop_oneof![Just(0.0f64), -5.0f64..5.0], 1..20)) {
            let s = support(&x);
            prop_assert_eq!(s.iter().next_back().copied().unwrap_or(0), prog(&x, 0.0));
            prop_assert!(s.iter().all(|&i| i >= 1 && i <= x.len()));
        }
    }
}
