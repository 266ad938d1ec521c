//! Richardson extrapolation to eps -> 0 for families smooth in eps^2.

use super::QuadError;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Regularization {
    pub epsilon_schedule: Vec<f64>,
    pub extrapolation_order: usize,
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization { epsilon_schedule: vec![0.1, 0.05, 0.025, 0.0125], extrapolation_order: 2 }
    }
}

impl Regularization {
    pub fn new(epsilon_schedule: Vec<f64>, extrapolation_order: usize) -> Result<Self, QuadError> {
        let r = Regularization { epsilon_schedule, extrapolation_order };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let s = &self.epsilon_schedule;
        if s.len() < 3 {
            return Err(QuadError::BadSchedule("need at least 3 epsilons".into()));
        }
        if s.iter().any(|e| !(*e > 0.0)) || s.windows(2).any(|w| w[1] >= w[0]) {
            return Err(QuadError::BadSchedule("epsilons must be positive and strictly decreasing".into()));
        }
        if self.extrapolation_order + 1 > s.len() {
            return Err(QuadError::BadSchedule("order + 1 exceeds the number of samples".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: C64,
    /// |T(last, order) - T(last - 1, order)|, or the order-to-order change
    /// when only order + 1 samples exist.
    pub residual: f64,
    /// false when successive same-order estimates stop shrinking.
    pub reliable: bool,
}

/// Neville tableau in h = eps^2, evaluated at h = 0. Samples may come in any
/// order; they are sorted by decreasing eps first.
pub fn extrapolate_eps(values: &[(f64, C64)], order: usize) -> Result<Extrapolated, QuadError> {
    extrapolate_eps_pow(values, order, 2)
}

/// Same tableau in h = eps^power, for families that also carry odd powers.
pub fn extrapolate_eps_pow(values: &[(f64, C64)], order: usize, power: i32) -> Result<Extrapolated, QuadError> {
    if power < 1 {
        return Err(QuadError::BadSchedule(format!("extrapolation power {power} must be positive")));
    }
    if values.len() < order + 1 {
        return Err(QuadError::BadSchedule(format!("{} samples cannot support order {order}", values.len())));
    }
    let mut v: Vec<(f64, C64)> = values.to_vec();
    v.sort_by(|a, b| b.0.total_cmp(&a.0));
    if v.windows(2).any(|w| w[0].0 == w[1].0) || v.iter().any(|p| !(p.0 > 0.0)) {
        return Err(QuadError::BadSchedule("epsilons must be distinct and positive".into()));
    }
    let h: Vec<f64> = v.iter().map(|p| p.0.powi(power)).collect();
    let n = v.len();
    // t[i][j]: extrapolation of order j using samples i-j..=i
    let mut t = vec![vec![C64::new(0.0, 0.0); order + 1]; n];
    for i in 0..n {
        t[i][0] = v[i].1;
        for j in 1..=order.min(i) {
            let r = h[i - j] / h[i];
            t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) / (r - 1.0);
        }
    }
    let value = t[n - 1][order];
    let scale = value.norm().max(1e-300);
    let (residual, reliable) = if n >= order + 2 {
        let diffs: Vec<f64> = (order + 1..n).map(|i| (t[i][order] - t[i - 1][order]).norm()).collect();
        let floor = 64.0 * f64::EPSILON * scale;
        let mono = diffs.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor);
        (*diffs.last().unwrap(), mono)
    } else if order > 0 {
        ((t[n - 1][order] - t[n - 1][order - 1]).norm(), true)
    } else {
        (f64::INFINITY, false)
    };
    Ok(Extrapolated { value, residual, reliable })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_family_exact_at_order_one() {
        let s: Vec<(f64, C64)> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&e| (e, C64::new(2.0 + 3.0 * e * e, -1.0 + e * e))).collect();
        let r = extrapolate_eps(&s, 1).unwrap();
        assert!((r.value - C64::new(2.0, -1.0)).norm() < 1e-14);
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn lorentzian_limit() {
        let a = 0.7f64;
        let s: Vec<(f64, C64)> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&e| (e, C64::new(1.0 / (e * e + a * a), 0.0))).collect();
        let r = extrapolate_eps(&s, 2).unwrap();
        assert!((r.value.re - 1.0 / (a * a)).abs() < 1e-8);
        assert!(r.reliable);
    }

    #[test]
    fn schedule_validation() {
        assert!(Regularization::new(vec![0.1, 0.05], 1).is_err());
        assert!(Regularization::new(vec![0.1, 0.2, 0.05], 1).is_err());
        assert!(Regularization::new(vec![0.1, 0.05, 0.01], 2).is_ok());
        assert!(extrapolate_eps(&[(0.1, C64::new(1.0, 0.0))], 1).is_err());
    }

    #[test]
    fn erratic_sequence_flagged() {
        let s = vec![(0.1, C64::new(1.0, 0.0)), (0.05, C64::new(1.2, 0.0)), (0.025, C64::new(0.9, 0.0)), (0.0125, C64::new(1.5, 0.0))];
        let r = extrapolate_eps(&s, 1).unwrap();
        assert!(!r.reliable);
    }
}
