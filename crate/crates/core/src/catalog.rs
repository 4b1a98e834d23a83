//! Named example boxes.

use crate::boxes::CondBox;

/// The binary PR box: `P[a_1 a_2 | x_1 x_2] = ½ [a_1 ⊕ a_2 = x_1 ∧ x_2]`.
pub fn pr_box() -> CondBox {
    CondBox::from_fn(2, 2, 2, |x, a| {
        if (a[0] ^ a[1]) == (x[0] & x[1]) {
            0.5
        } else {
            0.0
        }
    })
    .expect("fixed shape")
}

/// First output uniform, second output always 1, independent of inputs.
pub fn q_box() -> CondBox {
    CondBox::from_fn(2, 2, 2, |_, a| if a[1] == 1 { 0.5 } else { 0.0 }).expect("fixed shape")
}

/// `P[a_1 a_2 | x_1 x_2] = [a_1 = x_2][a_2 = x_1]`: each party outputs the other's input.
pub fn signalling_example() -> CondBox {
    CondBox::from_fn(2, 2, 2, |x, a| {
        if a[0] == x[1] && a[1] == x[0] {
            1.0
        } else {
            0.0
        }
    })
    .expect("fixed shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::DEFAULT_TOL;

    #[test]
    fn pr_box_entries() {
        let pr = pr_box();
        assert_eq!(pr.prob(&[0, 0], &[0, 0]), 0.5);
        assert_eq!(pr.prob(&[1, 1], &[0, 1]), 0.5);
        assert_eq!(pr.prob(&[1, 1], &[0, 0]), 0.0);
        for x in 0..2 {
            let m = pr.marginal(&[x], DEFAULT_TOL).unwrap();
            assert!(m.probs().iter().all(|&p| p == 0.5));
        }
    }

    #[test]
    fn q_box_entries() {
        let q = q_box();
        for x1 in 0..2 {
            for x2 in 0..2 {
                assert_eq!(q.prob(&[x1, x2], &[0, 1]), 0.5);
                assert_eq!(q.prob(&[x1, x2], &[1, 1]), 0.5);
                assert_eq!(q.prob(&[x1, x2], &[0, 0]), 0.0);
            }
        }
        assert!(q.is_no_signalling(DEFAULT_TOL).0);
    }

    #[test]
    fn signalling_example_entries() {
        let s = signalling_example();
        assert_eq!(s.prob(&[0, 1], &[1, 0]), 1.0);
        assert_eq!(s.is_no_signalling(DEFAULT_TOL), (false, 1.0));
        let r = s.validate();
        assert_eq!(r.normalization_violation, 0.0);
        assert_eq!(r.negativity_violation, 0.0);
    }
}
