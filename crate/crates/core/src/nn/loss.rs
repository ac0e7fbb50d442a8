use crate::error::{Error, Result};
use crate::scalar::Real;

/// Per-element Smooth L1 value and derivative for residual `d = pred − target`.
#[inline]
pub fn smooth_l1_element<T: Real>(d: T, beta: T) -> (T, T) {
    let half = T::lit(0.5);
    if d.abs() < beta {
        (half * d * d / beta, d / beta)
    } else {
        (d.abs() - half * beta, d.signum())
    }
}

/// Mean Smooth L1 loss over all elements and its gradient with respect to
/// `pred`.
pub fn smooth_l1<T: Real>(pred: &[T], target: &[T], beta: T) -> Result<(T, Vec<T>)> {
    if !(beta > T::zero()) {
        return Err(Error::config(format!("smooth L1 beta must be positive, got {beta}")));
    }
    if pred.len() != target.len() {
        return Err(Error::config(format!(
            "smooth L1 length mismatch: {} vs {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Ok((T::zero(), Vec::new()));
    }
    let n = T::lit(pred.len() as f64);
    let mut total = T::zero();
    let grad = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| {
            let (l, g) = smooth_l1_element(p - t, beta);
            total += l;
            g / n
        })
        .collect();
    Ok((total / n, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_residual() {
        let (l, g) = smooth_l1(&[1.0, -2.0], &[1.0, -2.0], 1.0).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn branch_values() {
        let (l, g) = smooth_l1(&[0.5], &[0.0], 1.0).unwrap();
        assert_eq!(l, 0.125);
        assert_eq!(g, vec![0.5]);
        let (l, g) = smooth_l1(&[-2.0], &[0.0], 1.0).unwrap();
        assert_eq!(l, 1.5);
        assert_eq!(g, vec![-1.0]);
    }

    #[test]
    fn mean_over_elements() {
        let (l, g) = smooth_l1(&[0.5, 2.0], &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(l, (0.125 + 1.5) / 2.0);
        assert_eq!(g, vec![0.25, 0.5]);
    }

    #[test]
    fn rejects_nonpositive_beta() {
        assert!(smooth_l1(&[0.0], &[0.0], 0.0).is_err());
        assert!(smooth_l1(&[0.0], &[0.0], -1.0).is_err());
        assert!(smooth_l1(&[0.0], &[0.0], f64::NAN).is_err());
        assert!(smooth_l1(&[0.0, 1.0], &[0.0], 1.0).is_err());
    }

    #[test]
    fn continuity_at_beta() {
        for beta in [0.1_f64, 1.0, 3.0] {
            let (lo, glo) = smooth_l1_element(beta - 1e-9, beta);
            let (hi, ghi) = smooth_l1_element(beta + 1e-9, beta);
            assert!((lo - hi).abs() < 1e-8);
            assert!((glo - ghi).abs() < 1e-8 / beta.min(1.0));
        }
    }
}
