use std::sync::OnceLock;

use rug::{Integer, Rational};

/// Largest Bernoulli index kept in the shared table.
pub const MAX_INDEX: usize = 240;

/// Exact Bernoulli numbers `B_0..=B_MAX_INDEX` with `B_1 = -1/2`.
pub fn table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| compute(MAX_INDEX))
}

/// `B_n`, or `None` past the table.
pub fn bernoulli(n: usize) -> Option<&'static Rational> {
    table().get(n)
}

// B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
fn compute(max: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(max + 1);
    b.push(Rational::from(1));
    for m in 1..=max {
        if m > 1 && m % 2 == 1 {
            b.push(Rational::new());
            continue;
        }
        let mut acc = Rational::new();
        for (j, bj) in b.iter().enumerate() {
            if bj.cmp0().is_eq() {
                continue;
            }
            let c = Integer::from(Integer::binomial_u((m + 1) as u32, j as u32));
            acc += Rational::from(c) * bj;
        }
        acc /= -(m as i64 + 1);
        b.push(acc);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(*bernoulli(0).unwrap(), 1);
        assert_eq!(*bernoulli(1).unwrap(), Rational::from((-1, 2)));
        assert_eq!(*bernoulli(2).unwrap(), Rational::from((1, 6)));
        assert_eq!(*bernoulli(4).unwrap(), Rational::from((-1, 30)));
        assert_eq!(*bernoulli(12).unwrap(), Rational::from((-691, 2730)));
        assert_eq!(*bernoulli(7).unwrap(), 0);
        assert!(bernoulli(MAX_INDEX + 1).is_none());
    }

    #[test]
    fn signs_alternate_for_even_indices() {
        for k in 1..=(MAX_INDEX / 2) {
            let expected = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(bernoulli(2 * k).unwrap().cmp0() as i32, expected, "B_{}", 2 * k);
        }
    }
}
