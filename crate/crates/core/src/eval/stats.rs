use crate::error::{Error, Result};

/// Quantile of sorted data by linear interpolation between order statistics
/// (position `(n - 1) q`).
pub fn quantile_linear(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean squared error, optionally restricted to errors within the
/// inclusive interquartile range `[Q25, Q75]`.
///
/// When no error lies inside the range (possible for two samples) the
/// trimmed value falls back to the median.
pub fn aggregate_mse(errors: &[f64], trim: bool) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::InvalidInput("no squared errors to aggregate".into()));
    }
    if !trim {
        return Ok(errors.iter().sum::<f64>() / errors.len() as f64);
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (q25, q75) = (quantile_linear(&sorted, 0.25), quantile_linear(&sorted, 0.75));
    let kept: Vec<f64> = sorted.iter().copied().filter(|e| (q25..=q75).contains(e)).collect();
    if kept.is_empty() {
        return Ok(quantile_linear(&sorted, 0.5));
    }
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(aggregate_mse(&[1.0, 1.0, 1.0, 1.0], true).unwrap(), 1.0);
        assert_eq!(aggregate_mse(&[0.0, 1.0, 2.0, 100.0], false).unwrap(), 25.75);
        // Q25 = 1.75, Q75 = 5.25 keeps 2, 3, 4, 5
        let v: Vec<f64> = (0..8).map(f64::from).collect();
        assert_eq!(aggregate_mse(&v, true).unwrap(), 3.5);
        assert!(aggregate_mse(&[], false).is_err());
    }

    #[test]
    fn two_point_trim_uses_median() {
        assert_eq!(aggregate_mse(&[0.0, 10.0], true).unwrap(), 5.0);
        assert_eq!(aggregate_mse(&[4.0], true).unwrap(), 4.0);
    }

    #[test]
    fn trimming_drops_right_tail() {
        let e = [0.1, 0.2, 0.2, 0.3, 0.25, 0.15, 9.0, 12.0];
        assert!(aggregate_mse(&e, true).unwrap() < aggregate_mse(&e, false).unwrap());
    }
}
