use rug::ops::Pow;
use rug::Float;

use super::bernoulli;
use crate::error::{Error, Result};
use crate::precision::WorkingPrecision;

/// `psi^(n)(t)` for `n >= 1`, `t > 0`.
///
/// Uses `psi^(n)(t) = (-1)^(n+1) n! zeta(n+1, t)`. The Hurwitz sum is split
/// into an explicit head `sum_{j<J} (t+j)^(-n-1)` (the upward recurrence,
/// continued as direct summation) and an Euler-Maclaurin tail evaluated at
/// `a = t + J`, where `a` is large enough that the Bernoulli corrections
/// converge to the internal precision.
pub fn polygamma(n: u32, t: &Float, prec: WorkingPrecision) -> Result<Float> {
    if n == 0 {
        return Err(Error::unsupported("polygamma", "digamma (n = 0) is not provided"));
    }
    if t.is_sign_negative() || t.is_zero() {
        return Err(Error::domain("polygamma", "t must be > 0"));
    }
    let s = n + 1;
    let hurwitz = hurwitz_zeta(s, &prec.float(t), prec)?;
    let mut value = hurwitz * prec.float(Float::factorial(n));
    if n.is_multiple_of(2) {
        value = -value;
    }
    Ok(value)
}

/// Smallest argument at which the Euler-Maclaurin tail is started.
fn em_start(s: u32, prec: WorkingPrecision) -> f64 {
    (10.0 * s as f64).max(prec.internal_digits() as f64)
}

fn hurwitz_zeta(s: u32, x: &Float, prec: WorkingPrecision) -> Result<Float> {
    let start = em_start(s, prec);
    let neg_s = -(s as i32);

    let mut head = prec.zero();
    let mut a = prec.float(x);
    while a < start {
        head += prec.float((&a).pow(neg_s));
        a += 1u32;
    }

    // a^(1-s)/(s-1) + a^(-s)/2
    let a_pow = prec.float((&a).pow(neg_s));
    let mut tail = prec.float(&a_pow * &a) / (s - 1);
    tail += prec.float(&a_pow / 2u32);

    // sum_k B_2k/(2k)! (s)_{2k-1} a^(-s-2k+1)
    let eps = prec.epsilon();
    let inv_a_sq = prec.float(a.square_ref()).recip();
    // (s)_{2k-1} a^(-s-2k+1) / (2k)!, updated in place
    let mut factor = prec.float(&a_pow * &a) * s / 2u32 * prec.float(&inv_a_sq);
    // k = 1: (s)_1 a^(-s-1) / 2!
    let mut previous = None::<Float>;
    let mut k = 1usize;
    loop {
        let Some(b) = bernoulli::bernoulli(2 * k) else {
            return Err(Error::numeric(
                "polygamma",
                "Bernoulli table exhausted before Euler-Maclaurin converged",
            ));
        };
        let term = prec.float(b) * &factor;
        let size = prec.float(term.abs_ref());
        tail += &term;
        if size <= prec.float(&eps * &tail).abs() {
            break;
        }
        if let Some(prev) = &previous {
            if &size > prev {
                return Err(Error::numeric("polygamma", "Euler-Maclaurin terms diverged"));
            }
        }
        previous = Some(size);
        // advance (s)_{2k-1}/(2k)! a^{-s-2k+1} to k+1
        let k64 = k as u64;
        let s64 = u64::from(s);
        factor *= (s64 + 2 * k64 - 1) * (s64 + 2 * k64);
        factor /= (2 * k64 + 1) * (2 * k64 + 2);
        factor *= &inv_a_sq;
        k += 1;
    }
    Ok(head + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::rel_diff;
    use rug::float::Constant;

    fn p() -> WorkingPrecision {
        WorkingPrecision::default()
    }

    /// Independent oracle: MPFR's Riemann zeta.
    fn zeta(s: u32, prec: WorkingPrecision) -> Float {
        prec.float(s).zeta()
    }

    #[test]
    fn rejects_bad_arguments() {
        let prec = p();
        assert!(matches!(polygamma(0, &prec.one(), prec), Err(Error::Unsupported { .. })));
        assert!(matches!(polygamma(1, &prec.zero(), prec), Err(Error::Domain { .. })));
        assert!(matches!(polygamma(1, &prec.float(-0.5), prec), Err(Error::Domain { .. })));
    }

    #[test]
    fn values_at_one_match_zeta() {
        let prec = p();
        for n in 1..=8u32 {
            let got = polygamma(n, &prec.one(), prec).unwrap();
            let mut expect = zeta(n + 1, prec) * prec.float(Float::factorial(n));
            if n.is_multiple_of(2) {
                expect = -expect;
            }
            assert!(rel_diff(&got, &expect) < prec.pow10(-65), "n={n}");
        }
    }

    #[test]
    fn trigamma_at_half() {
        let prec = p();
        let pi = prec.float(Constant::Pi);
        let expect = prec.float(pi.square_ref()) / 2u32;
        let got = polygamma(1, &prec.float(0.5), prec).unwrap();
        assert!(rel_diff(&got, &expect) < prec.pow10(-65));
    }

    #[test]
    fn large_argument_asymptotics() {
        // psi'(t) = 1/t + 1/(2t^2) + 1/(6t^3) - 1/(30t^5) + 1/(42t^7) - ...
        let prec = p();
        let t = prec.float(1.0e6);
        let got = polygamma(1, &t, prec).unwrap();
        let inv = prec.float(t.recip_ref());
        let expect = prec.float(&inv)
            + prec.float((&inv).pow(2)) / 2u32
            + prec.float((&inv).pow(3)) / 6u32
            - prec.float((&inv).pow(5)) / 30u32
            + prec.float((&inv).pow(7)) / 42u32;
        assert!(rel_diff(&got, &expect) < prec.pow10(-40));
    }

    #[test]
    fn minimum_precision_still_converges() {
        let prec = WorkingPrecision::new(30).unwrap();
        let got = polygamma(3, &prec.float(0.01), prec).unwrap();
        assert!(got.is_sign_positive());
        let prec = WorkingPrecision::new(200).unwrap();
        let got = polygamma(1, &prec.one(), prec).unwrap();
        let pi = prec.float(Constant::Pi);
        let expect = prec.float(pi.square_ref()) / 6u32;
        assert!(rel_diff(&got, &expect) < prec.pow10(-210));
    }
}
