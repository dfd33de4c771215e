//! Scans of the trigamma and Bessel inequalities, and exact checks of the
//! polynomial `f_i` that bounds `(-1)^i [h(t+1) - h(t)]^(i)`.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::cmdeg::LogGrid;
use crate::error::{Error, Result};
use crate::laplace::h_kernel;
use crate::laurent::h_nth_derivative;
use crate::precision::WorkingPrecision;
use crate::specfun::polygamma;

/// The four algebraically equivalent expressions for `f_i(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FPolyForm {
    /// Powers of `t + 1`.
    A,
    /// Every power of `t + 1` expanded binomially.
    B,
    /// Collected by powers of `t`, with the bracketed sum over `l = 4..=i`.
    C,
    /// Collected by powers of `t`, ending in the single binomial sum.
    D,
}

impl FPolyForm {
    pub const ALL: [FPolyForm; 4] = [FPolyForm::A, FPolyForm::B, FPolyForm::C, FPolyForm::D];

    pub fn name(self) -> &'static str {
        match self {
            FPolyForm::A => "A",
            FPolyForm::B => "B",
            FPolyForm::C => "C",
            FPolyForm::D => "D",
        }
    }

    /// Forms C and D only reproduce A for `i >= 1`.
    pub fn validated_for(self, i: u32) -> bool {
        matches!(self, FPolyForm::A | FPolyForm::B) || i >= 1
    }
}

impl std::str::FromStr for FPolyForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(FPolyForm::A),
            "B" | "b" => Ok(FPolyForm::B),
            "C" | "c" => Ok(FPolyForm::C),
            "D" | "d" => Ok(FPolyForm::D),
            other => Err(Error::argument("FPolyForm", format!("unknown form {other:?}; expected A, B, C or D"))),
        }
    }
}

/// A value of `f_i` together with whether the form is trusted at this `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FPolyValue<T> {
    pub value: T,
    pub validated: bool,
}

fn binom(n: u32, k: i64) -> Integer {
    if k < 0 || k > i64::from(n) {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k as u32))
}

fn rat_pow(t: &Rational, n: u32) -> Rational {
    Rational::from(t.pow(n))
}

/// `f_i(t)` evaluated exactly in the chosen form.
pub fn f_poly_exact(i: u32, t: &Rational, form: FPolyForm) -> Result<FPolyValue<Rational>> {
    if *t <= 0 {
        return Err(Error::domain("f_poly", "t must be > 0"));
    }
    let value = match form {
        FPolyForm::A => f_form_a(i, t),
        FPolyForm::B => f_form_b(i, t),
        FPolyForm::C => f_form_c(i, t),
        FPolyForm::D => f_form_d(i, t),
    };
    Ok(FPolyValue { value, validated: form.validated_for(i) })
}

/// `f_i(t)` at a real `t`; the binary value of `t` is converted exactly and the
/// polynomial is evaluated in rational arithmetic before rounding once.
pub fn f_poly(i: u32, t: &Float, form: FPolyForm, prec: WorkingPrecision) -> Result<FPolyValue<Float>> {
    let Some(exact_t) = t.to_rational() else {
        return Err(Error::domain("f_poly", "t must be finite"));
    };
    let exact = f_poly_exact(i, &exact_t, form)?;
    Ok(FPolyValue { value: prec.float(&exact.value), validated: exact.validated })
}

fn f_form_a(i: u32, t: &Rational) -> Rational {
    let s = Rational::from(t + 1u32);
    let ts = Rational::from(t * &s);
    let first = Rational::from(6 * (i + 1)) * &ts * (rat_pow(&s, i + 2) + rat_pow(t, i + 2));
    let second = Rational::from(12u32) * rat_pow(&ts, 2) * (rat_pow(&s, i + 1) - rat_pow(t, i + 1));
    let third = Rational::from((i + 1) * (i + 2)) * (rat_pow(&s, i + 3) - rat_pow(t, i + 3));
    first - second - third
}

fn f_form_b(i: u32, t: &Rational) -> Rational {
    let s = Rational::from(t + 1u32);
    let ts = Rational::from(t * &s);
    let expand = |n: u32, top: u32| -> Rational {
        let mut acc = Rational::new();
        for l in 0..=top {
            acc += Rational::from(binom(n, i64::from(l))) * rat_pow(t, l);
        }
        acc
    };
    let first = Rational::from(6 * (i + 1)) * &ts * (expand(i + 2, i + 2) + rat_pow(t, i + 2));
    let second = Rational::from(12u32) * rat_pow(&ts, 2) * expand(i + 1, i);
    let third = Rational::from((i + 1) * (i + 2)) * expand(i + 3, i + 2);
    first - second - third
}

/// Terms shared by forms C and D: everything except the constant and the `l >= 4` sum.
fn f_low_order(i: u32, t: &Rational) -> Rational {
    let i = i64::from(i);
    let lead = Rational::from(((i - 1) * (i + 4) * (i + 5), 2));
    let bracket = Rational::from(((2 - i) * (i + 3), 3)) * t - Rational::from(i);
    let linear = Rational::from(i * (i + 1) * (i + 5)) * t;
    lead * bracket * rat_pow(t, 2) - linear
}

fn f_form_c(i: u32, t: &Rational) -> Rational {
    let n = i + 3;
    let mut sum = Rational::new();
    for l in 4..=i {
        let l64 = i64::from(l);
        let coeff = Integer::from((i + 1) * (i + 2)) * binom(n, l64) - Integer::from(6 * (i + 1)) * binom(n, l64 - 1)
            + Integer::from(12u32) * binom(n, l64 - 2);
        sum += Rational::from(coeff) * rat_pow(t, l);
    }
    f_low_order(i, t) - Rational::from((i + 1) * (i + 2)) - sum
}

fn f_form_d(i: u32, t: &Rational) -> Rational {
    let mut sum = Rational::new();
    for l in 4..=i {
        let ratio = Rational::from(((i - l + 1) * (i - l + 2), l * (i - l + 5)));
        sum += ratio * Rational::from(binom(i + 3, i64::from(l) - 1)) * rat_pow(t, l);
    }
    f_low_order(i, t) - Rational::from((1 + i) * (2 + i)) - Rational::from((i + 4) * (i + 5)) * sum
}

/// Result of scanning one inequality, written as `margin(t) > 0`, over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityScanReport {
    pub id: &'static str,
    pub grid: LogGrid,
    pub min_margin: Float,
    pub argmin_t: Float,
    /// `min_margin` exceeds the noise floor.
    pub pass: bool,
}

fn scan<F>(id: &'static str, grid: &LogGrid, prec: WorkingPrecision, margin: F) -> Result<InequalityScanReport>
where
    F: Fn(&Float) -> Result<Float> + Sync,
{
    let points = grid.points(prec);
    let margins = points.par_iter().map(&margin).collect::<Result<Vec<_>>>()?;
    // strict comparison keeps the smallest t among ties
    let mut best = 0;
    for (j, m) in margins.iter().enumerate().skip(1) {
        if *m < margins[best] {
            best = j;
        }
    }
    let min_margin = margins[best].clone();
    let pass = min_margin > prec.noise_floor();
    Ok(InequalityScanReport { id, grid: *grid, min_margin, argmin_t: points[best].clone(), pass })
}

/// `e^(1/t) - 1 - psi'(t)`.
pub fn trigamma_margin(t: &Float, prec: WorkingPrecision) -> Result<Float> {
    if !t.is_sign_positive() || t.is_zero() {
        return Err(Error::domain("trigamma_margin", "t must be > 0"));
    }
    let exp_part = prec.float(t.recip_ref()).exp_m1();
    Ok(exp_part - polygamma(1, t, prec)?)
}

/// `I_1(t) - (t/2)^3 / (1 - e^(-(t/2)^2))`.
///
/// Written as `(t/2) k((t/2)^2)` with the `h` kernel `k`, whose series branch
/// covers `(t/2)^2 < 1/4` where the two sides nearly cancel.
pub fn bessel_margin(t: &Float, prec: WorkingPrecision) -> Result<Float> {
    if !t.is_sign_positive() || t.is_zero() {
        return Err(Error::domain("bessel_margin", "t must be > 0"));
    }
    let half = prec.float(t / 2u32);
    let x = prec.float(half.square_ref());
    Ok(h_kernel(&x, prec)? * half)
}

/// `psi'(t) < e^(1/t) - 1` on the grid.
pub fn check_ineq_trigamma(grid: &LogGrid, prec: WorkingPrecision) -> Result<InequalityScanReport> {
    scan("trigamma", grid, prec, |t| trigamma_margin(t, prec))
}

/// `I_1(t) > (t/2)^3 / (1 - e^(-(t/2)^2))` on the grid.
pub fn check_ineq_bessel(grid: &LogGrid, prec: WorkingPrecision) -> Result<InequalityScanReport> {
    scan("bessel", grid, prec, |t| bessel_margin(t, prec))
}

pub fn default_trigamma_grid() -> LogGrid {
    LogGrid::new(0.01, 100.0, 500).expect("static grid")
}

pub fn default_bessel_grid() -> LogGrid {
    LogGrid::new(0.01, 50.0, 500).expect("static grid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceBound {
    pub i: u32,
    pub t: Float,
    /// `(-1)^i [h^(i)(t+1) - h^(i)(t)]`.
    pub lhs: Float,
    /// `i! f_i(t) / (12 t^(i+3) (t+1)^(i+3))`.
    pub rhs: Float,
    /// `lhs < rhs < 0`, each gap beyond the noise floor.
    pub pass: bool,
}

/// Checks the upper bound on the signed `i`-th derivative of `h(t+1) - h(t)`.
pub fn check_difference_bound(i: u32, t: &Float, prec: WorkingPrecision) -> Result<DifferenceBound> {
    if !t.is_sign_positive() || t.is_zero() {
        return Err(Error::domain("check_difference_bound", "t must be > 0"));
    }
    let t = prec.float(t);
    let shifted = prec.float(&t + 1u32);
    let mut lhs = h_nth_derivative(i, &shifted, prec)? - h_nth_derivative(i, &t, prec)?;
    if i % 2 == 1 {
        lhs = -lhs;
    }
    let f = f_poly(i, &t, FPolyForm::A, prec)?.value;
    let denom = prec.float(prec.float((&t).pow(i + 3)) * prec.float((&shifted).pow(i + 3))) * 12u32;
    let rhs = f * prec.float(Float::factorial(i)) / denom;
    let floor = prec.noise_floor();
    let gap = prec.float(&rhs - &lhs);
    let pass = gap > floor && prec.float(-&rhs) > floor;
    Ok(DifferenceBound { i, t, lhs, rhs, pass })
}
