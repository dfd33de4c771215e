//! Laurent remainders of `exp(1/t)` and the difference `h(t) = exp(1/t) - psi'(t)`.
//!
//! `H_k(t) = exp(1/t) - sum_{m<=k} t^-m/m!` is never formed by subtraction
//! here. It is carried as the tail `sum_{m>=k+1} t^-m/m!` ([`TailSeries`]) so
//! that it, its derivatives, and the derivatives of `t^r H_k(t)` can be summed
//! termwise without cancellation.

use rug::float::Special;
use rug::ops::Pow;
use rug::{Assign, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::WorkingPrecision;
use crate::specfun::{exp_recip_derivative, polygamma, MAX_SERIES_TERMS};

/// The coefficient rule `m -> 1/m!` restricted to `first <= m <= last`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TailSeries {
    first: u32,
    last: Option<u32>,
}

impl TailSeries {
    /// `H_k(t) = sum_{m >= k+1} t^-m / m!`.
    pub fn remainder(k: u32) -> Self {
        TailSeries { first: k + 1, last: None }
    }

    /// Finitely many terms `sum_{first <= m <= last} t^-m / m!`.
    pub fn finite(first: u32, last: u32) -> Result<Self> {
        if last < first {
            return Err(Error::argument("TailSeries::finite", "last must be >= first"));
        }
        Ok(TailSeries { first, last: Some(last) })
    }

    pub fn first(&self) -> u32 {
        self.first
    }

    pub fn last(&self) -> Option<u32> {
        self.last
    }

    /// Offset `k` when this is an infinite remainder `H_k`.
    pub fn offset(&self) -> Option<u32> {
        match self.last {
            None => self.first.checked_sub(1),
            Some(_) => None,
        }
    }

    /// Exact coefficient of `t^-m`.
    pub fn coefficient(&self, m: u32) -> Rational {
        let inside = m >= self.first && self.last.is_none_or(|last| m <= last);
        if inside {
            Rational::from((1, Integer::from(Integer::factorial(m))))
        } else {
            Rational::new()
        }
    }

    /// Bound on the neglected tail `sum_{m > cutoff} t^-m/m!` of the undifferentiated series.
    ///
    /// For `t >= 1` this is `e / ((cutoff+1)! t^(cutoff+1))`; for smaller `t` the
    /// geometric bound `term_{cutoff+1} / (1 - q)` with `q = 1/(t (cutoff+2))` is
    /// used, and `+inf` is returned while `q >= 1`.
    pub fn tail_bound(&self, cutoff: u32, t: &Float, prec: WorkingPrecision) -> Float {
        if self.last.is_some_and(|last| cutoff >= last) {
            return prec.zero();
        }
        let next = cutoff.max(self.first.saturating_sub(1)) + 1;
        let t = prec.float(t);
        let term = prec.float((&t).pow(next)).recip() / prec.float(Float::factorial(next));
        if t >= 1 {
            return term * prec.one().exp();
        }
        let q = prec.float(&t * (next + 1)).recip();
        if q >= 1 {
            return prec.float(Special::Infinity);
        }
        term / (1u32 - q)
    }

    /// Value of the series at `t > 0`.
    pub fn eval(&self, t: &Float, prec: WorkingPrecision) -> Result<Float> {
        let zero = prec.zero();
        Ok(self.scaled_derivatives(&zero, t, 0, prec)?.swap_remove(0))
    }

    /// `d^n/dt^n [t^r S(t)]` for every `n = 0..=max_order`, summed termwise:
    ///
    /// `sum_m (1/m!) prod_{j<n} (r-m-j) t^(r-m-n)`.
    ///
    /// Summation stops once the index is past `r + 1` (all later factors share a
    /// sign and the term ratio is decreasing), the ratio bound is at most 1/2,
    /// and every order's current term is below the series cutoff relative to
    /// its partial sum, or below the internal resolution relative to the
    /// largest term seen for that order.
    pub fn scaled_derivatives(
        &self,
        r: &Float,
        t: &Float,
        max_order: u32,
        prec: WorkingPrecision,
    ) -> Result<Vec<Float>> {
        const OP: &str = "TailSeries::scaled_derivatives";
        if t.is_sign_negative() || t.is_zero() {
            return Err(Error::domain(OP, "t must be > 0"));
        }
        let t = prec.float(t);
        let r = prec.float(r);
        let inv_t = prec.float(t.recip_ref());
        let cutoff = prec.series_cutoff();
        let eps = prec.epsilon();
        let orders = max_order as usize + 1;

        let mut sums = vec![prec.zero(); orders];
        let mut largest = vec![prec.zero(); orders];

        // base_m = t^(r-m) / m!
        let mut base = if r.is_zero() { prec.one() } else { prec.float((&t).pow(&r)) };
        base *= prec.float((&inv_t).pow(self.first));
        base /= prec.float(Float::factorial(self.first));

        let r_f64 = r.to_f64();
        let t_f64 = t.to_f64();
        let mut term = prec.zero();
        let mut factor = prec.zero();
        let mut m = self.first;
        let mut count = 0u64;
        loop {
            let mut poly = prec.one();
            let mut settled = true;
            for n in 0..orders {
                term.assign(&base * &poly);
                sums[n] += &term;
                term.abs_mut();
                if term > largest[n] {
                    largest[n].assign(&term);
                }
                if term > prec.float(&cutoff * &sums[n]).abs() && term > prec.float(&eps * &largest[n]) {
                    settled = false;
                }
                // poly *= (r - m - n)
                factor.assign(&r - (m as u64 + n as u64));
                poly *= &factor;
            }

            if self.last == Some(m) {
                break;
            }
            let mf = m as f64;
            if mf > r_f64 + 1.0 && settled {
                let rho = (mf + max_order as f64 - r_f64) / ((mf - r_f64) * t_f64 * (mf + 1.0));
                if rho <= 0.5 {
                    break;
                }
            }
            count += 1;
            if count >= MAX_SERIES_TERMS {
                return Err(Error::numeric(OP, format!("no convergence after {count} terms")));
            }
            base *= &inv_t;
            base /= m + 1;
            m += 1;
        }

        // divide order n by t^n
        let mut scale = prec.one();
        for sum in sums.iter_mut() {
            *sum *= &scale;
            scale *= &inv_t;
        }
        Ok(sums)
    }
}

fn require_positive(op: &'static str, t: &Float) -> Result<()> {
    if t.is_sign_negative() || t.is_zero() || t.is_nan() {
        return Err(Error::domain(op, "argument must be > 0"));
    }
    Ok(())
}

/// `H_k(z)` via its tail series.
pub fn remainder_hk(k: u32, z: &Float, prec: WorkingPrecision) -> Result<Float> {
    require_positive("remainder_hk", z)?;
    TailSeries::remainder(k).eval(z, prec)
}

/// `d^n/dt^n H_k(t) = sum_{m>=k+1} (-1)^n (m)_n t^(-m-n) / m!`.
pub fn remainder_hk_derivative(k: u32, n: u32, t: &Float, prec: WorkingPrecision) -> Result<Float> {
    require_positive("remainder_hk_derivative", t)?;
    let zero = prec.zero();
    Ok(TailSeries::remainder(k).scaled_derivatives(&zero, t, n, prec)?.swap_remove(n as usize))
}

/// `d^n/dt^n [t^r H_k(t)]`.
pub fn scaled_remainder_derivative(
    k: u32,
    r: &Float,
    n: u32,
    t: &Float,
    prec: WorkingPrecision,
) -> Result<Float> {
    require_positive("scaled_remainder_derivative", t)?;
    Ok(TailSeries::remainder(k).scaled_derivatives(r, t, n, prec)?.swap_remove(n as usize))
}

/// `h(t) = exp(1/t) - psi'(t)`.
pub fn h_function(t: &Float, prec: WorkingPrecision) -> Result<Float> {
    require_positive("h_function", t)?;
    let exp_recip = prec.float(t.recip_ref()).exp();
    Ok(exp_recip - polygamma(1, t, prec)?)
}

/// `h^(i)(t) = (exp(1/t))^(i) - psi^(i+1)(t)` for `i >= 1`.
pub fn h_derivative(i: u32, t: &Float, prec: WorkingPrecision) -> Result<Float> {
    if i == 0 {
        return Err(Error::argument("h_derivative", "order must be >= 1; use h_function"));
    }
    require_positive("h_derivative", t)?;
    Ok(exp_recip_derivative(i, t, prec)? - polygamma(i + 1, t, prec)?)
}

/// `h^(i)(t)` for any `i >= 0` (order 0 is `h` itself).
pub fn h_nth_derivative(i: u32, t: &Float, prec: WorkingPrecision) -> Result<Float> {
    if i == 0 {
        h_function(t, prec)
    } else {
        h_derivative(i, t, prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::rel_diff;
    use rug::float::Constant;

    fn p() -> WorkingPrecision {
        WorkingPrecision::default()
    }

    /// Test oracle: the cancellation-prone subtractive definition of `H_k`.
    fn subtractive(k: u32, z: &Float, prec: WorkingPrecision) -> Float {
        let mut value = prec.float(z.recip_ref()).exp();
        let mut term = prec.one();
        for m in 0..=k {
            if m > 0 {
                term /= z;
                term /= m;
            }
            value -= &term;
        }
        value
    }

    /// Test oracle: plain partial sum of `sum_m c(m) t^(r-m-n) prod(r-m-j)`.
    fn partial_sum(first: u32, r: f64, n: u32, t: f64, terms: u32, prec: WorkingPrecision) -> Float {
        let t = prec.float(t);
        let r = prec.float(r);
        let mut acc = prec.zero();
        for m in first..first + terms {
            let mut poly = prec.one();
            for j in 0..n {
                poly *= prec.float(&r - (m + j));
            }
            let exponent = prec.float(&r - (m + n));
            let power = prec.float((&t).pow(&exponent));
            acc += poly * power / prec.float(Float::factorial(m));
        }
        acc
    }

    #[test]
    fn remainder_examples() {
        let prec = p();
        let e = prec.one().exp();
        let one = prec.one();
        let got = remainder_hk(0, &one, prec).unwrap();
        assert!(rel_diff(&got, &prec.float(&e - 1u32)) < prec.pow10(-54));
        let got = remainder_hk(1, &one, prec).unwrap();
        assert!(rel_diff(&got, &prec.float(&e - 2u32)) < prec.pow10(-54));
        let got = remainder_hk(2, &prec.float(2), prec).unwrap();
        assert!((got.to_f64() - 0.0237212707001281).abs() < 1e-15);
        assert!(remainder_hk(1, &prec.zero(), prec).is_err());
        assert!(remainder_hk(1, &prec.float(-1), prec).is_err());
    }

    #[test]
    fn tail_beats_subtraction_at_large_z() {
        let prec = p();
        for k in 0..=5 {
            for z in [0.5, 1.0, 2.0, 5.0] {
                let z = prec.float(z);
                let tail = remainder_hk(k, &z, prec).unwrap();
                let sub = subtractive(k, &z, prec);
                assert!(rel_diff(&tail, &sub) < prec.pow10(-30), "k={k}");
                assert!(tail.is_sign_positive());
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let prec = p();
        let one = prec.one();
        let e = prec.one().exp();
        for k in 0..3 {
            let t = prec.float(1.7);
            assert_eq!(
                remainder_hk_derivative(k, 0, &t, prec).unwrap(),
                remainder_hk(k, &t, prec).unwrap()
            );
        }
        let got = remainder_hk_derivative(0, 1, &one, prec).unwrap();
        assert!(rel_diff(&got, &prec.float(-&e)) < prec.pow10(-54));
        let got = remainder_hk_derivative(1, 1, &one, prec).unwrap();
        assert!(rel_diff(&got, &prec.float(1u32 - &e)) < prec.pow10(-54));
    }

    #[test]
    fn scaled_examples() {
        let prec = p();
        let t = prec.float(3.25);
        let zero = prec.zero();
        for n in 0..4 {
            assert_eq!(
                scaled_remainder_derivative(2, &zero, n, &t, prec).unwrap(),
                remainder_hk_derivative(2, n, &t, prec).unwrap()
            );
        }
        let got = scaled_remainder_derivative(0, &prec.one(), 1, &prec.one(), prec).unwrap();
        assert!(rel_diff(&got, &prec.float(-1)) < prec.pow10(-54));

        let got = scaled_remainder_derivative(0, &prec.float(1.5), 1, &prec.float(100), prec).unwrap();
        let oracle = partial_sum(1, 1.5, 1, 100.0, 60, prec);
        assert!(rel_diff(&got, &oracle) < prec.pow10(-54));
        assert!((got.to_f64() - 0.0497475).abs() < 1e-7, "{}", got.to_f64());
    }

    #[test]
    fn scaled_matches_partial_sums_small_t() {
        // t = 0.01 needs several hundred terms
        let prec = p();
        let got = scaled_remainder_derivative(2, &prec.float(3), 4, &prec.float(0.01), prec).unwrap();
        let oracle = partial_sum(3, 3.0, 4, 0.01, 700, prec);
        assert!(rel_diff(&got, &oracle) < prec.pow10(-54));
    }

    #[test]
    fn finite_series_is_exact() {
        let prec = p();
        let one_term = TailSeries::finite(0, 0).unwrap();
        let t = prec.float(7);
        let derivs = one_term.scaled_derivatives(&prec.float(-0.5), &t, 3, prec).unwrap();
        // d^n t^(-1/2)
        let expect = [1.0, -0.5, 0.75, -1.875];
        for (n, e) in expect.iter().enumerate() {
            let exact = prec.float(*e) * prec.float((&t).pow(prec.float(-0.5 - n as f64)));
            assert!(rel_diff(&derivs[n], &exact) < prec.pow10(-60));
        }
        assert!(TailSeries::finite(3, 2).is_err());
        assert_eq!(one_term.offset(), None);
        assert_eq!(TailSeries::remainder(4).offset(), Some(4));
    }

    #[test]
    fn coefficients_are_exact() {
        let s = TailSeries::remainder(2);
        assert_eq!(s.coefficient(2), 0);
        assert_eq!(s.coefficient(3), Rational::from((1, 6)));
        assert_eq!(s.coefficient(5), Rational::from((1, 120)));
        let f = TailSeries::finite(1, 2).unwrap();
        assert_eq!(f.coefficient(3), 0);
    }

    #[test]
    fn tail_bound_covers_truncation() {
        let prec = p();
        let series = TailSeries::remainder(1);
        for t in [1.0, 3.0, 0.5] {
            let t = prec.float(t);
            let full = series.eval(&t, prec).unwrap();
            for cutoff in [5u32, 10, 20] {
                let mut partial = prec.zero();
                for m in 2..=cutoff {
                    partial += prec.float((&t).pow(m)).recip() / prec.float(Float::factorial(m));
                }
                let gap = prec.float(&full - &partial);
                assert!(gap <= series.tail_bound(cutoff, &t, prec));
            }
        }
        let t = prec.float(0.01);
        assert!(series.tail_bound(10, &t, prec).is_infinite());
    }

    #[test]
    fn h_examples() {
        let prec = p();
        let pi = prec.float(Constant::Pi);
        let pi2 = prec.float(pi.square_ref());
        let e = prec.one().exp();
        let got = h_function(&prec.one(), prec).unwrap();
        assert!(rel_diff(&got, &prec.float(&e - prec.float(&pi2 / 6u32))) < prec.pow10(-60));
        let got = h_function(&prec.float(0.5), prec).unwrap();
        let e2 = prec.float(2).exp();
        assert!(rel_diff(&got, &prec.float(e2 - prec.float(&pi2 / 2u32))) < prec.pow10(-60));
        let h100 = h_function(&prec.float(100), prec).unwrap();
        let gap = prec.float(&h100 - 1u32);
        assert!(gap.is_sign_positive() && gap < 1e-8);
        // h - 1 ~ 1/(24 t^4)
        assert!((gap.to_f64() * 24.0e8 - 1.0).abs() < 0.05);
    }

    #[test]
    fn h_derivative_examples() {
        let prec = p();
        let one = prec.one();
        let e = prec.one().exp();
        let zeta3 = prec.float(3).zeta();
        let got = h_derivative(1, &one, prec).unwrap();
        let expect = prec.float(2u32 * &zeta3) - &e;
        assert!(rel_diff(&got, &expect) < prec.pow10(-60));
        assert!((got.to_f64() + 0.3141680221).abs() < 1e-9);

        let got = h_derivative(2, &one, prec).unwrap();
        let pi = prec.float(Constant::Pi);
        let expect = prec.float(3u32 * &e) - prec.float((&pi).pow(4)) / 15u32;
        assert!(rel_diff(&got, &expect) < prec.pow10(-60));
        assert!(got.is_sign_positive());

        let t = prec.float(1000);
        for i in 1..=4 {
            assert!(h_derivative(i, &t, prec).unwrap().abs() < 1e-6);
        }
        assert!(h_derivative(0, &one, prec).is_err());
        assert!(h_derivative(1, &prec.zero(), prec).is_err());
        assert_eq!(h_nth_derivative(0, &one, prec).unwrap(), h_function(&one, prec).unwrap());
    }
}
