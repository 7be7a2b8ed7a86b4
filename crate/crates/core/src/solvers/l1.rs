use crate::scalar::{abs, norm1, Real};

/// `sign(v) max(|v| - t, 0)` entrywise.
pub fn soft_threshold<T: Real>(v: &[T], t: T) -> Vec<T> {
    v.iter()
        .map(|&x| {
            let m = abs(x) - t;
            if m > T::zero() {
                x.signum() * m
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Euclidean projection onto `{x : ‖x‖₁ ≤ tau}` by the sort-based
/// threshold search. Ties are handled by a stable sort, so the result is
/// deterministic.
pub fn project_l1_ball<T: Real>(v: &[T], tau: T) -> Vec<T> {
    if tau <= T::zero() {
        return vec![T::zero(); v.len()];
    }
    if norm1(v) <= tau {
        return v.to_vec();
    }
    let mut mags: Vec<T> = v.iter().map(|&x| abs(x)).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = T::zero();
    let mut theta = T::zero();
    for (i, &m) in mags.iter().enumerate() {
        cum = cum + m;
        let t = (cum - tau) / T::lit((i + 1) as f64);
        if m > t {
            theta = t;
        } else {
            break;
        }
    }
    soft_threshold(v, theta.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Bisection on the threshold `θ` with `‖soft(v, θ)‖₁ = tau`.
    fn bisection_reference(v: &[f64], tau: f64) -> Vec<f64> {
        if v.iter().map(|x| x.abs()).sum::<f64>() <= tau {
            return v.to_vec();
        }
        let (mut lo, mut hi) = (0.0, v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let s: f64 = v.iter().map(|x| (x.abs() - mid).max(0.0)).sum();
            if s > tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        soft_threshold(v, 0.5 * (lo + hi))
    }

    #[test]
    fn inside_ball_is_unchanged_and_zero_radius_collapses() {
        let v = vec![0.1, -0.2, 0.3];
        assert_eq!(project_l1_ball(&v, 1.0), v);
        assert_eq!(project_l1_ball(&v, 0.0), vec![0.0; 3]);
    }

    #[test]
    fn ties_are_deterministic() {
        let v = vec![1.0, -1.0, 1.0, -1.0];
        let p = project_l1_ball(&v, 2.0);
        assert_eq!(p, vec![0.5, -0.5, 0.5, -0.5]);
    }

    proptest! {
        #[test]
        fn matches_bisection(v in prop::collection::vec(-10.0f64..10.0, 1..40), tau in 0.01f64..20.0) {
            let p = project_l1_ball(&v, tau);
            let r = bisection_reference(&v, tau);
            for (a, b) in p.iter().zip(&r) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
            prop_assert!(norm1(&p) <= tau * (1.0 + 1e-12));
        }
    }
}
