//! Extended-precision series engines: shifted factorials, the derivative
//! coefficients of `exp(1/t)`, polygamma, modified Bessel `I_nu` for integer
//! order, and `1F2(1; b1, b2; t)`.
//!
//! Every positive-term series here is summed until the current term drops
//! below `10^(-digits-5)` of the partial sum *and* the term ratio is at most
//! one half, so the neglected tail is bounded by the last term.

pub mod bernoulli;
mod polygamma;

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::precision::WorkingPrecision;

pub use polygamma::polygamma;

/// Hard stop for any series loop; hitting it means the argument is far outside the intended range.
pub(crate) const MAX_SERIES_TERMS: u64 = 200_000;

/// Pochhammer symbol `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn shifted_factorial(a: &Float, n: u32, prec: WorkingPrecision) -> Float {
    let mut acc = prec.one();
    let mut factor = prec.float(a);
    for _ in 0..n {
        acc *= &factor;
        factor += 1;
    }
    acc
}

/// Exact `a_{i,k} = C(i,k) C(i-1,k) k!` for `i >= 1`, `0 <= k <= i-1`.
pub fn a_coeff(i: u32, k: u32) -> Result<Integer> {
    if i == 0 || k >= i {
        return Err(Error::argument(
            "a_coeff",
            format!("need 0 <= k <= i-1 with i >= 1, got i={i}, k={k}"),
        ));
    }
    let mut value = Integer::from(Integer::binomial_u(i, k));
    value *= Integer::from(Integer::binomial_u(i - 1, k));
    value *= Integer::from(Integer::factorial(k));
    Ok(value)
}

/// The row `a_{i,0..=i-1}` of derivative coefficients of `exp(1/t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    order: u32,
    entries: Vec<Integer>,
}

impl CoeffTable {
    pub fn new(order: u32) -> Self {
        let entries = (0..order)
            .map(|k| a_coeff(order, k).expect("k < order by construction"))
            .collect();
        CoeffTable { order, entries }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn entries(&self) -> &[Integer] {
        &self.entries
    }
}

/// `(d/dt)^i exp(1/t) = (-1)^i exp(1/t) t^(-2i) sum_k a_{i,k} t^k`.
pub fn exp_recip_derivative(i: u32, t: &Float, prec: WorkingPrecision) -> Result<Float> {
    if t.is_zero() {
        return Err(Error::domain("exp_recip_derivative", "t must be nonzero"));
    }
    let t = prec.float(t);
    let exp_recip = prec.float(t.recip_ref()).exp();
    if i == 0 {
        return Ok(exp_recip);
    }
    let table = CoeffTable::new(i);
    // Horner over k = i-1 down to 0
    let mut poly = prec.zero();
    for a in table.entries().iter().rev() {
        poly *= &t;
        poly += a;
    }
    let mut value = exp_recip * poly;
    value /= prec.float((&t).pow(2 * i as i32));
    if i % 2 == 1 {
        value = -value;
    }
    Ok(value)
}

/// `I_nu(z) = sum_k (z/2)^(2k+nu) / (k! (nu+k)!)` for integer `nu >= 0`, `z >= 0`.
pub fn bessel_i(nu: u32, z: &Float, prec: WorkingPrecision) -> Result<Float> {
    if z.is_sign_negative() && !z.is_zero() {
        return Err(Error::domain("bessel_i", "z must be >= 0"));
    }
    if z.is_zero() {
        return Ok(if nu == 0 { prec.one() } else { prec.zero() });
    }
    let half = prec.float(z) / 2u32;
    let quarter_sq = prec.float(half.square_ref());
    let first = prec.float((&half).pow(nu)) / prec.float(Float::factorial(nu));
    sum_positive_series("bessel_i", first, prec, |k| {
        // term_{k+1} / term_k = (z/2)^2 / ((k+1)(nu+k+1))
        let denom = (k + 1) * (u64::from(nu) + k + 1);
        prec.float(&quarter_sq) / denom
    })
}

/// `1F2(1; b1, b2; t) = sum_n t^n / ((b1)_n (b2)_n)` for integer `b1, b2 >= 1`, `t >= 0`.
pub fn hyp1f2(b1: u32, b2: u32, t: &Float, prec: WorkingPrecision) -> Result<Float> {
    if b1 == 0 || b2 == 0 {
        return Err(Error::argument("hyp1f2", "lower parameters must be >= 1"));
    }
    if t.is_sign_negative() && !t.is_zero() {
        return Err(Error::unsupported("hyp1f2", "only t >= 0 is supported"));
    }
    if t.is_zero() {
        return Ok(prec.one());
    }
    let t = prec.float(t);
    sum_positive_series("hyp1f2", prec.one(), prec, |n| {
        let denom = (u64::from(b1) + n) * (u64::from(b2) + n);
        prec.float(&t) / denom
    })
}

/// Sums `first + first*r_0 + first*r_0*r_1 + ...` for a positive-term series
/// whose ratio `ratio(n) = term_{n+1}/term_n` is eventually decreasing.
pub(crate) fn sum_positive_series<F>(
    op: &'static str,
    first: Float,
    prec: WorkingPrecision,
    mut ratio: F,
) -> Result<Float>
where
    F: FnMut(u64) -> Float,
{
    let cutoff = prec.series_cutoff();
    let mut sum = first.clone();
    let mut term = first;
    for n in 0..MAX_SERIES_TERMS {
        let r = ratio(n);
        term *= &r;
        sum += &term;
        if r <= 0.5 && term <= prec.float(&sum * &cutoff) {
            return Ok(sum);
        }
    }
    Err(Error::numeric(op, format!("series did not settle within {MAX_SERIES_TERMS} terms")))
}
