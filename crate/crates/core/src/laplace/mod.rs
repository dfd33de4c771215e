//! Laplace-transform representations of `H_k` and `h`, and the semi-infinite
//! quadrature that checks them.
//!
//! Three kernels appear:
//!
//! * `1F2` kernel: `t^k 1F2(1; k+1, k+2; t) / (k! (k+1)!)`, whose transform is `H_k(z)`;
//! * Bessel kernel: `I_{k+2}(2 sqrt t) / t^((k+2)/2)`, whose transform is
//!   `z^(k+1) H_k(z) - 1/(k+1)!`;
//! * `h` kernel: `I_1(2 sqrt u)/sqrt u - u/(1 - e^-u)`, whose transform is `h(z) - 1`.
//!
//! Each kernel is bounded by `C u^p e^(2 sqrt u)`, which gives a closed-form
//! bound on the neglected tail `int_T^inf`.

pub mod quadrature;

use std::sync::OnceLock;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::laurent::{h_derivative, h_function, remainder_hk};
use crate::precision::{rel_diff, WorkingPrecision};
use crate::specfun::{bernoulli, bessel_i, hyp1f2, sum_positive_series};
use quadrature::{PanelRule, PanelSet};

/// Hard cap on integrand evaluations per transform.
pub const NODE_BUDGET: usize = 100_000;

/// Below this argument the `h` kernel and Bessel kernel use their power series.
pub const SERIES_CROSSOVER: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelSpec {
    /// `t^k 1F2(1; k+1, k+2; t) / (k! (k+1)!)`.
    F12 { k: u32 },
    /// `I_{k+2}(2 sqrt t) / t^((k+2)/2)`.
    Bessel { k: u32 },
    /// `I_1(2 sqrt u)/sqrt u - u/(1 - e^-u)`.
    H,
    /// `u^n` times the `h` kernel.
    HMoment { n: u32 },
    /// Constant 1 (calibration).
    One,
    /// `t^n` (calibration).
    Power { n: u32 },
}

impl KernelSpec {
    pub fn eval(&self, t: &Float, prec: WorkingPrecision) -> Result<Float> {
        match *self {
            KernelSpec::F12 { k } => kernel_1f2(k, t, prec),
            KernelSpec::Bessel { k } => kernel_bessel(k, t, prec),
            KernelSpec::H => h_kernel(t, prec),
            KernelSpec::HMoment { n } => Ok(h_kernel(t, prec)? * prec.float(t.pow(n))),
            KernelSpec::One => Ok(prec.one()),
            KernelSpec::Power { n } => Ok(prec.float(t.pow(n))),
        }
    }

    /// `(C, p, grows)` such that `0 <= kernel(t) <= C t^p e^(2 sqrt t)` (or without
    /// the exponential when `grows` is false).
    fn envelope(&self, prec: WorkingPrecision) -> (Float, u32, bool) {
        match *self {
            // each is dominated termwise by sum t^j/(j!)^2 = I_0(2 sqrt t) <= e^(2 sqrt t)
            KernelSpec::F12 { .. } | KernelSpec::H => (prec.one(), 0, true),
            KernelSpec::Bessel { k } => (prec.float(Float::factorial(k + 2)).recip(), 0, true),
            KernelSpec::HMoment { n } => (prec.one(), n, true),
            KernelSpec::One => (prec.one(), 0, false),
            KernelSpec::Power { n } => (prec.one(), n, false),
        }
    }
}

fn require_nonnegative(op: &'static str, t: &Float) -> Result<()> {
    if t.is_nan() || (t.is_sign_negative() && !t.is_zero()) {
        return Err(Error::domain(op, "argument must be >= 0"));
    }
    Ok(())
}

/// `t^k 1F2(1; k+1, k+2; t) / (k! (k+1)!) = sum_{m>=k+1} t^(m-1) / (m! (m-1)!)`.
pub fn kernel_1f2(k: u32, t: &Float, prec: WorkingPrecision) -> Result<Float> {
    require_nonnegative("kernel_1f2", t)?;
    if t.is_zero() {
        return Ok(if k == 0 { prec.one() } else { prec.zero() });
    }
    let series = hyp1f2(k + 1, k + 2, t, prec)?;
    let scale = prec.float(Float::factorial(k)) * prec.float(Float::factorial(k + 1));
    Ok(series * prec.float(t.pow(k)) / scale)
}

/// `I_{k+2}(2 sqrt t) / t^((k+2)/2)`, with the removable value `1/(k+2)!` at `t = 0`.
pub fn kernel_bessel(k: u32, t: &Float, prec: WorkingPrecision) -> Result<Float> {
    require_nonnegative("kernel_bessel", t)?;
    let nu = k + 2;
    if *t < SERIES_CROSSOVER {
        // sum_j t^j / (j! (j+nu)!)
        let first = prec.float(Float::factorial(nu)).recip();
        if t.is_zero() {
            return Ok(first);
        }
        let t = prec.float(t);
        return sum_positive_series("kernel_bessel", first, prec, |j| {
            prec.float(&t) / ((j + 1) * (j + 1 + u64::from(nu)))
        });
    }
    let root = prec.float(t.sqrt_ref());
    let bessel = bessel_i(nu, &prec.float(&root * 2u32), prec)?;
    Ok(bessel / prec.float((&root).pow(nu)))
}

/// `I_1(2 sqrt u)/sqrt u - u/(1 - e^-u)`; zero at the origin, `~ u^3/144` near it.
pub fn h_kernel(u: &Float, prec: WorkingPrecision) -> Result<Float> {
    require_nonnegative("h_kernel", u)?;
    if *u < SERIES_CROSSOVER {
        Ok(h_kernel_series(u, prec))
    } else {
        h_kernel_direct(u, prec)
    }
}

/// Both pieces of the `h` kernel evaluated directly from their closed forms.
pub fn h_kernel_direct(u: &Float, prec: WorkingPrecision) -> Result<Float> {
    require_nonnegative("h_kernel_direct", u)?;
    if u.is_zero() {
        return Err(Error::domain("h_kernel_direct", "removable singularity at u = 0"));
    }
    let root = prec.float(u.sqrt_ref());
    let bessel_part = bessel_i(1, &prec.float(&root * 2u32), prec)? / &root;
    let denom = -prec.float(-u).exp_m1();
    Ok(bessel_part - prec.float(u / &denom))
}

/// Power series of the `h` kernel, `sum_j c_j u^j` with
/// `c_j = 1/(j! (j+1)!) - (-1)^j B_j / j!`; the first three coefficients vanish.
pub fn h_kernel_series(u: &Float, prec: WorkingPrecision) -> Float {
    let coeffs = h_kernel_coefficients();
    let terms = h_kernel_series_terms(u.to_f64(), prec).min(coeffs.len());
    // Horner from the top
    let mut acc = prec.zero();
    for c in coeffs[..terms].iter().rev() {
        acc *= u;
        acc += c;
    }
    acc
}

/// Number of coefficients needed for full internal precision at `u`.
///
/// Uses `|c_j| <= 4 / (2 pi)^j` for `j >= 3` and the leading size `u^3/144`.
fn h_kernel_series_terms(u: f64, prec: WorkingPrecision) -> usize {
    let u = u.clamp(1e-300, SERIES_CROSSOVER);
    let target = -(prec.internal_digits() as f64) - 2.0;
    let two_pi = std::f64::consts::TAU;
    let mut j = 3usize;
    loop {
        let log_rel = (576.0f64).log10() + (j as f64 - 3.0) * u.log10() - j as f64 * two_pi.log10();
        if log_rel < target || j + 1 >= bernoulli::MAX_INDEX {
            return j + 1;
        }
        j += 1;
    }
}

fn h_kernel_coefficients() -> &'static [Rational] {
    static COEFFS: OnceLock<Vec<Rational>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        (0..bernoulli::MAX_INDEX)
            .map(|j| {
                let j32 = j as u32;
                let fact = Integer::from(Integer::factorial(j32));
                let bessel = Rational::from((1, &fact * Integer::from(Integer::factorial(j32 + 1))));
                let mut bern = Rational::from(bernoulli::bernoulli(j).expect("index in table")) / &fact;
                if j % 2 == 1 {
                    bern = -bern;
                }
                bessel - bern
            })
            .collect()
    })
}

/// Outcome of one semi-infinite transform.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    pub value: Float,
    /// Panel error estimates plus the certified tail bound.
    pub error_estimate: Float,
    /// Upper limit of the finite part; `[T, inf)` is covered by the tail bound.
    pub truncation_t: Float,
    pub nodes_used: usize,
}

/// `int_0^inf kernel(t) e^(-z t) dt` to relative tolerance `rel_tol`.
pub fn laplace_transform(
    kernel: KernelSpec,
    z: &Float,
    rel_tol: f64,
    prec: WorkingPrecision,
) -> Result<QuadratureResult> {
    laplace_transform_budgeted(kernel, z, rel_tol, NODE_BUDGET, prec)
}

/// As [`laplace_transform`] with an explicit cap on integrand evaluations.
pub fn laplace_transform_budgeted(
    kernel: KernelSpec,
    z: &Float,
    rel_tol: f64,
    node_budget: usize,
    prec: WorkingPrecision,
) -> Result<QuadratureResult> {
    const OP: &str = "laplace_transform";
    if z.is_nan() || z.is_sign_negative() || z.is_zero() {
        return Err(Error::domain(OP, "z must be > 0"));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::argument(OP, "rel_tol must lie in (0, 1)"));
    }
    if rel_tol < 10f64.powi(-(prec.digits() as i32) + 5) {
        return Err(Error::argument(OP, "rel_tol is finer than the working precision supports"));
    }
    let z = prec.float(z);
    let integrand = |t: &Float| -> Result<Float> {
        let weight = prec.float(-prec.float(t * &z)).exp();
        Ok(kernel.eval(t, prec)? * weight)
    };
    let (scale, power, grows) = kernel.envelope(prec);
    let sqrt_coeff = if grows { 1.0 } else { 0.0 };

    // g(T) = p ln T + 2 s sqrt T - z T is concave; once g'(T) <= -delta the tail
    // is at most C e^g(T) / delta.
    let slope = |t: f64| z.to_f64() - power as f64 / t - sqrt_coeff / t.sqrt();
    let mut upper = 1.0f64;
    while slope(upper) < 0.5 * z.to_f64() {
        upper *= 2.0;
    }
    let tail_bound = |t: f64| -> Float {
        let t_big = prec.float(t);
        let mut g = -prec.float(&t_big * &z);
        if power > 0 {
            g += prec.float(t_big.ln_ref()) * power;
        }
        if grows {
            g += prec.float(t_big.sqrt_ref()) * 2u32;
        }
        prec.float(&scale * g.exp()) / slope(t)
    };

    let rule = PanelRule::new(prec);
    let mut panels = PanelSet::new();
    let zero = prec.zero();
    panels.extend(&rule, &integrand, &zero, &prec.float(upper), 8, prec)?;
    let panel_goal = |value: &Float| prec.float(value.abs_ref()) * (rel_tol / 4.0);
    loop {
        panels.refine(&rule, &integrand, panel_goal, node_budget, prec)?;
        let value = panels.value(prec);
        let tail = tail_bound(upper);
        if tail <= prec.float(value.abs_ref()) * (rel_tol / 10.0) {
            let error_estimate = panels.error(prec) + &tail;
            if error_estimate > prec.float(value.abs_ref()) * rel_tol {
                return Err(Error::numeric(OP, "tolerance not met"));
            }
            return Ok(QuadratureResult {
                value,
                error_estimate,
                truncation_t: prec.float(upper),
                nodes_used: panels.nodes_used,
            });
        }
        let next = upper * 2.0;
        panels.extend(&rule, &integrand, &prec.float(upper), &prec.float(next), 8, prec)?;
        upper = next;
        if panels.nodes_used > node_budget {
            return Err(Error::numeric(OP, format!("node budget {node_budget} exhausted while extending T")));
        }
    }
}

/// Which integral representation to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// `H_k(z) = int 1F2-kernel e^(-zt)`.
    F12 { k: u32 },
    /// `H_k(z) = z^-(k+1) (1/(k+1)! + int Bessel-kernel e^(-zt))`.
    ///
    /// The constant is the point mass at `t = 0` that the kernel alone misses.
    Bessel { k: u32 },
    /// `h(z) = 1 + int h-kernel e^(-zu)`.
    H,
    /// `(-1)^n h^(n)(z) = int u^n h-kernel e^(-zu)`.
    HDeriv { n: u32 },
}

impl Representation {
    pub fn name(&self) -> String {
        match self {
            Representation::F12 { k } => format!("F12(k={k})"),
            Representation::Bessel { k } => format!("BESSEL(k={k})"),
            Representation::H => "H".to_string(),
            Representation::HDeriv { n } => format!("H_DERIV(n={n})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub representation: Representation,
    pub z: Float,
    /// Closed form.
    pub lhs: Float,
    /// Quadrature side including prefactors.
    pub rhs: Float,
    pub rel_err: Float,
    pub pass: bool,
    pub quadrature: QuadratureResult,
}

/// Compares a closed form against its integral representation at `z`.
pub fn verify_representation(
    rep: Representation,
    z: &Float,
    rel_tol: f64,
    prec: WorkingPrecision,
) -> Result<Verification> {
    let z = prec.float(z);
    // the quadrature gets a tenth of the budget so a pass reflects the identity
    let quad_tol = rel_tol / 10.0;
    let (lhs, quadrature, rhs) = match rep {
        Representation::F12 { k } => {
            let lhs = remainder_hk(k, &z, prec)?;
            let q = laplace_transform(KernelSpec::F12 { k }, &z, quad_tol, prec)?;
            let rhs = q.value.clone();
            (lhs, q, rhs)
        }
        Representation::Bessel { k } => {
            let lhs = remainder_hk(k, &z, prec)?;
            let q = laplace_transform(KernelSpec::Bessel { k }, &z, quad_tol, prec)?;
            let atom = prec.float(Float::factorial(k + 1)).recip();
            let rhs = prec.float(&atom + &q.value) / prec.float((&z).pow(k + 1));
            (lhs, q, rhs)
        }
        Representation::H => {
            let lhs = h_function(&z, prec)?;
            let q = laplace_transform(KernelSpec::H, &z, quad_tol, prec)?;
            let rhs = prec.float(&q.value + 1u32);
            (lhs, q, rhs)
        }
        Representation::HDeriv { n } => {
            if n == 0 {
                return Err(Error::argument("verify_representation", "H_DERIV needs n >= 1; use H"));
            }
            let mut lhs = h_derivative(n, &z, prec)?;
            if n % 2 == 1 {
                lhs = -lhs;
            }
            let q = laplace_transform(KernelSpec::HMoment { n }, &z, quad_tol, prec)?;
            let rhs = q.value.clone();
            (lhs, q, rhs)
        }
    };
    let rel_err = rel_diff(&rhs, &lhs);
    let pass = rel_err <= rel_tol;
    Ok(Verification { representation: rep, z, lhs, rhs, rel_err, pass, quadrature })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> WorkingPrecision {
        WorkingPrecision::default()
    }

    /// Independent oracle: `sum_{m>=k+1} t^(m-1) / (m! (m-1)!)` by plain partial sums.
    fn f12_tail(k: u32, t: f64, terms: u32, prec: WorkingPrecision) -> Float {
        let t = prec.float(t);
        let mut acc = prec.zero();
        for m in (k + 1)..(k + 1 + terms) {
            let denom = prec.float(Float::factorial(m)) * prec.float(Float::factorial(m - 1));
            acc += prec.float((&t).pow(m - 1)) / denom;
        }
        acc
    }

    #[test]
    fn kernel_1f2_examples() {
        let prec = p();
        assert_eq!(kernel_1f2(0, &prec.zero(), prec).unwrap(), 1);
        assert_eq!(kernel_1f2(3, &prec.zero(), prec).unwrap(), 0);
        let one = prec.one();
        let i1 = bessel_i(1, &prec.float(2), prec).unwrap();
        assert!(rel_diff(&kernel_1f2(0, &one, prec).unwrap(), &i1) < prec.pow10(-54));
        let expect = prec.float(&i1 - 1u32);
        assert!(rel_diff(&kernel_1f2(1, &one, prec).unwrap(), &expect) < prec.pow10(-54));
        assert!(kernel_1f2(0, &prec.float(-1), prec).is_err());
    }

    #[test]
    fn kernel_1f2_is_the_tail_series() {
        let prec = p();
        for k in 0..=5 {
            for t in [0.1, 1.0, 10.0, 100.0] {
                let got = kernel_1f2(k, &prec.float(t), prec).unwrap();
                let oracle = f12_tail(k, t, 150, prec);
                assert!(rel_diff(&got, &oracle) < prec.pow10(-50), "k={k} t={t}");
            }
        }
    }

    #[test]
    fn kernel_bessel_examples() {
        let prec = p();
        for k in 0..4u32 {
            let expect = prec.float(Float::factorial(k + 2)).recip();
            assert_eq!(kernel_bessel(k, &prec.zero(), prec).unwrap(), expect);
        }
        let got = kernel_bessel(0, &prec.one(), prec).unwrap();
        assert!((got.to_f64() - 0.6889484477).abs() < 1e-9);
        let got = kernel_bessel(0, &prec.float(4), prec).unwrap();
        assert!((got.to_f64() - 1.6055473).abs() < 1e-6, "{}", got.to_f64());
        assert!(kernel_bessel(0, &prec.float(-0.5), prec).is_err());
    }

    #[test]
    fn kernel_bessel_branches_agree_at_crossover() {
        let prec = p();
        let t = prec.float(SERIES_CROSSOVER);
        let below = prec.float(SERIES_CROSSOVER * (1.0 - 1e-15));
        for k in 0..4 {
            let a = kernel_bessel(k, &below, prec).unwrap();
            let b = kernel_bessel(k, &t, prec).unwrap();
            assert!(rel_diff(&a, &b) < prec.pow10(-13));
        }
    }

    #[test]
    fn h_kernel_examples() {
        let prec = p();
        assert_eq!(h_kernel(&prec.zero(), prec).unwrap(), 0);
        let got = h_kernel(&prec.one(), prec).unwrap();
        assert!((got.to_f64() - 0.0086602).abs() < 1e-7, "{}", got.to_f64());
        assert!(h_kernel(&prec.float(-1), prec).is_err());
        // leading behaviour u^3 / 144
        let u = prec.float(1e-3);
        let got = h_kernel(&u, prec).unwrap();
        assert!((got.to_f64() / 1e-9 * 144.0 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn h_kernel_series_meets_direct_at_seam() {
        let prec = p();
        let u = prec.float(SERIES_CROSSOVER);
        let s = h_kernel_series(&u, prec);
        let d = h_kernel_direct(&u, prec).unwrap();
        assert!(rel_diff(&s, &d) < prec.pow10(-30));
        for u in [0.01, 0.1, 0.2] {
            let u = prec.float(u);
            let s = h_kernel_series(&u, prec);
            let d = h_kernel_direct(&u, prec).unwrap();
            assert!(rel_diff(&s, &d) < prec.pow10(-30));
        }
    }

    #[test]
    fn h_kernel_coefficients_start_at_cubic() {
        let c = h_kernel_coefficients();
        assert_eq!(c[0], 0);
        assert_eq!(c[1], 0);
        assert_eq!(c[2], 0);
        assert_eq!(c[3], Rational::from((1, 144)));
        // c_4 = 1/(4! 5!) + 1/(30 * 24)
        assert_eq!(c[4], Rational::from((1, 2880)) + Rational::from((1, 720)));
    }

    #[test]
    fn calibration_transforms() {
        let prec = p();
        let q = laplace_transform(KernelSpec::One, &prec.float(2), 1e-12, prec).unwrap();
        assert!(rel_diff(&q.value, &prec.float(0.5)) < prec.pow10(-12));
        assert!(q.error_estimate <= prec.float(&q.value * 1e-12));
        for n in 0..=4u32 {
            for z in [1u32, 3] {
                let zf = prec.float(z);
                let q = laplace_transform(KernelSpec::Power { n }, &zf, 1e-12, prec).unwrap();
                let exact = prec.float(Float::factorial(n)) / prec.float(zf.pow(n + 1));
                assert!(rel_diff(&q.value, &exact) < prec.pow10(-12), "n={n} z={z}");
            }
        }
    }

    #[test]
    fn transform_examples() {
        let prec = p();
        let e_minus_1 = prec.one().exp() - 1u32;
        let one = prec.one();
        let q = laplace_transform(KernelSpec::F12 { k: 0 }, &one, 1e-12, prec).unwrap();
        assert!(rel_diff(&q.value, &e_minus_1) < prec.pow10(-12));
        // the Bessel transform at k = 0 is z H_0(z) - 1
        let q = laplace_transform(KernelSpec::Bessel { k: 0 }, &one, 1e-12, prec).unwrap();
        let e_minus_2 = prec.float(&e_minus_1 - 1u32);
        assert!(rel_diff(&q.value, &e_minus_2) < prec.pow10(-12));
        assert!(q.nodes_used > 0 && q.truncation_t > 1);
    }

    #[test]
    fn transform_rejects_bad_input() {
        let prec = p();
        assert!(matches!(
            laplace_transform(KernelSpec::One, &prec.zero(), 1e-8, prec),
            Err(Error::Domain { .. })
        ));
        assert!(laplace_transform(KernelSpec::One, &prec.one(), 0.0, prec).is_err());
        assert!(laplace_transform(KernelSpec::One, &prec.one(), 1e-60, prec).is_err());
    }

    #[test]
    fn small_budget_is_a_numeric_failure() {
        let prec = p();
        let err = laplace_transform_budgeted(KernelSpec::F12 { k: 0 }, &prec.float(0.1), 1e-12, 100, prec)
            .unwrap_err();
        assert!(err.is_numeric_failure(), "{err}");
    }

    #[test]
    fn small_z_still_resolves_the_peak() {
        // the F12 k = 0 transform is e^(1/z) - 1
        let prec = p();
        let z = prec.float(0.01);
        let q = laplace_transform(KernelSpec::F12 { k: 0 }, &z, 1e-12, prec).unwrap();
        let exact = prec.float(100).exp_m1();
        assert!(rel_diff(&q.value, &exact) < prec.pow10(-12));
    }

    #[test]
    fn verification_examples() {
        let prec = p();
        let v = verify_representation(Representation::F12 { k: 2 }, &prec.float(2), 1e-10, prec).unwrap();
        assert!(v.pass, "{}", v.rel_err.to_f64());
        assert!((v.lhs.to_f64() - 0.0237212707).abs() < 1e-10);

        let one = prec.one();
        let v = verify_representation(Representation::H, &one, 1e-8, prec).unwrap();
        assert!(v.pass);
        assert!((v.lhs.to_f64() - 1.0733477616).abs() < 1e-10);

        let v = verify_representation(Representation::HDeriv { n: 1 }, &one, 1e-8, prec).unwrap();
        assert!(v.pass);
        assert!((v.lhs.to_f64() - 0.3141680221).abs() < 1e-10);

        assert!(verify_representation(Representation::HDeriv { n: 0 }, &one, 1e-8, prec).is_err());
    }
}
