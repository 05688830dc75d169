//! Fitting of integer polynomial-growth exponents from sampled pairs.

/// Smallest integer p in 1..=max_p such that value ≤ C · base^p holds on all
/// pairs (base, value) with C ≤ cap; returns (p, C). Bases must be ≥ 1 so
/// the bound is monotone in p. None when even max_p needs a constant above
/// the cap.
pub fn minimal_integer_exponent(
    pairs: &[(f64, f64)],
    max_p: usize,
    cap: f64,
) -> Option<(usize, f64)> {
    if pairs.is_empty() {
        return Some((1, 0.0));
    }
    for p in 1..=max_p {
        // evaluated in logs so huge bases cannot overflow to an infinite
        // denominator (which would masquerade as a tiny constant)
        let c = pairs
            .iter()
            .map(|&(base, value)| {
                if value <= 0.0 {
                    0.0
                } else {
                    (value.ln() - p as f64 * base.ln()).exp()
                }
            })
            .fold(0.0f64, f64::max);
        if c.is_finite() && c <= cap {
            return Some((p, c));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_growth_needs_exponent_two() {
        let pairs: Vec<(f64, f64)> = (1..2000)
            .map(|i| {
                let b = 1.0 + i as f64;
                (b, 3.0 * b * b)
            })
            .collect();
        let (p, c) = minimal_integer_exponent(&pairs, 6, 1e3).unwrap();
        assert_eq!(p, 2);
        assert!((c - 3.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_growth_rejected() {
        let pairs: Vec<(f64, f64)> = (1..50)
            .map(|i| {
                let b = 1.0 + i as f64;
                (b, b.exp())
            })
            .collect();
        assert!(minimal_integer_exponent(&pairs, 6, 1e3).is_none());
    }
}
