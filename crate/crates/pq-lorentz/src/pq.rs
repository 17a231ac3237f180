//! Two-parameter calculus primitives: (p,q)-integers, factorials, binomial
//! coefficients, and power products.
//!
//! The (p,q)-integer is `[n] = (p^n - q^n) / (p - q)`, equivalently the sum
//! `p^{n-1} + p^{n-2} q + ... + q^{n-1}`. Factorials and binomials are built
//! from it in the usual way, and the power product is
//! `(x + y)^n = prod_{i=0}^{n-1} (p^i x + q^i y)`.
//!
//! Admissible parameters: `q > p >= 1` with `p` and `q` distinct. The crate
//! distinguishes the strict regime `q > p > 1`, under which every quantitative
//! theorem in the bounds module holds, from the boundary case `p = 1` where
//! only the operator algebra itself is available.

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};

/// Which part of the admissible parameter region (p, q) lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// q > p > 1: all quantitative estimates apply.
    Strict,
    /// p = 1 < q: operator construction only; rate and bound machinery is
    /// outside its hypotheses here.
    QCase,
}

/// Validated parameter pair with its regime tag.
///
/// Both components share a numeric path: mixing an exact value with a float
/// at construction demotes the pair to the float path.
#[derive(Clone, Debug)]
pub struct PqParams {
    p: Scalar,
    q: Scalar,
    regime: Regime,
}

impl PqParams {
    /// Validate `q > p >= 1` (which forces `p != q` and `q > 1`).
    pub fn new(p: Scalar, q: Scalar) -> Result<Self> {
        let (p, q) = if p.is_exact() != q.is_exact() {
            (p.to_float_path(), q.to_float_path())
        } else {
            (p, q)
        };
        let one = Scalar::one();
        if p == q {
            return Err(Error::InvalidParams(format!("p = q = {p} is excluded")));
        }
        if p < one {
            return Err(Error::InvalidParams(format!("p = {p} < 1")));
        }
        if q <= p {
            return Err(Error::InvalidParams(format!("need q > p, got p = {p}, q = {q}")));
        }
        let regime = if p == one { Regime::QCase } else { Regime::Strict };
        Ok(PqParams { p, q, regime })
    }

    pub fn from_rationals(p: &str, q: &str) -> Result<Self> {
        Self::new(
            Scalar::from_rat(parse_rational(p)?),
            Scalar::from_rat(parse_rational(q)?),
        )
    }

    pub fn from_ints(p: (i64, i64), q: (i64, i64)) -> Result<Self> {
        Self::new(Scalar::from_ratio(p.0, p.1), Scalar::from_ratio(q.0, q.1))
    }

    pub fn from_f64s(p: f64, q: f64) -> Result<Self> {
        Self::new(Scalar::from_f64(p), Scalar::from_f64(q))
    }

    pub fn p(&self) -> &Scalar {
        &self.p
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_exact(&self) -> bool {
        self.p.is_exact()
    }

    /// The same parameters demoted to the float path.
    pub fn to_float_path(&self) -> PqParams {
        PqParams {
            p: self.p.to_float_path(),
            q: self.q.to_float_path(),
            regime: self.regime,
        }
    }

    pub fn p_pow(&self, e: i64) -> Scalar {
        self.p.pow_i(e)
    }

    pub fn q_pow(&self, e: i64) -> Scalar {
        self.q.pow_i(e)
    }

    /// `[n] = (p^n - q^n)/(p - q)`; `[0] = 0`.
    pub fn integer(&self, n: u32) -> Scalar {
        if n == 0 {
            return Scalar::zero();
        }
        let num = &self.p.pow_u(n) - &self.q.pow_u(n);
        let den = &self.p - &self.q;
        &num / &den
    }

    /// `[n]` via the defining sum `sum_{i=0}^{n-1} p^{n-1-i} q^i`.
    ///
    /// Independent route kept alongside [`Self::integer`] so the two can be
    /// cross-checked exactly.
    pub fn integer_sum_form(&self, n: u32) -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..n {
            let term = &self.p.pow_u(n - 1 - i) * &self.q.pow_u(i);
            acc = &acc + &term;
        }
        acc
    }

    /// Classical one-parameter q-integer `(q^n - 1)/(q - 1)` for this `q`.
    pub fn q_integer(&self, n: u32) -> Scalar {
        if n == 0 {
            return Scalar::zero();
        }
        let num = &self.q.pow_u(n) - &Scalar::one();
        let den = &self.q - &Scalar::one();
        &num / &den
    }

    /// `[n]! = [1][2]...[n]`, with `[0]! = 1`.
    pub fn factorial(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        for j in 1..=n {
            acc = &acc * &self.integer(j);
        }
        acc
    }

    /// `[n choose k] = [n]! / ([k]! [n-k]!)`; zero outside `0 <= k <= n`.
    pub fn binomial(&self, n: u32, k: i64) -> Scalar {
        if k < 0 || k > i64::from(n) {
            return Scalar::zero();
        }
        let k = k as u32;
        let num = self.factorial(n);
        let den = &self.factorial(k) * &self.factorial(n - k);
        &num / &den
    }

    /// `(x + y)^n_{p,q} = prod_{i=0}^{n-1} (p^i x + q^i y)`; empty product is 1.
    pub fn power_product(&self, x: &Scalar, y: &Scalar, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut p_pow = Scalar::one();
        let mut q_pow = Scalar::one();
        for _ in 0..n {
            let factor = &(&p_pow * x) + &(&q_pow * y);
            acc = &acc * &factor;
            p_pow = &p_pow * &self.p;
            q_pow = &q_pow * &self.q;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params23() -> PqParams {
        PqParams::from_ints((2, 1), (3, 1)).unwrap()
    }

    #[test]
    fn rejects_inadmissible_parameters() {
        assert!(PqParams::from_ints((2, 1), (2, 1)).is_err()); // p = q
        assert!(PqParams::from_ints((3, 1), (2, 1)).is_err()); // p > q
        assert!(PqParams::from_ints((1, 2), (2, 1)).is_err()); // p < 1
        assert!(PqParams::from_ints((1, 1), (1, 1)).is_err());
        assert_eq!(
            PqParams::from_ints((1, 1), (2, 1)).unwrap().regime(),
            Regime::QCase
        );
        assert_eq!(params23().regime(), Regime::Strict);
    }

    #[test]
    fn integers_match_frozen_values() {
        let pq = params23();
        assert_eq!(pq.integer(0), Scalar::zero());
        assert_eq!(pq.integer(1), Scalar::one());
        assert_eq!(pq.integer(2), Scalar::from_int(5)); // 2 + 3
        assert_eq!(pq.integer(4), Scalar::from_int(65)); // (16 - 81)/(2 - 3)
    }

    #[test]
    fn sum_form_agrees_with_closed_form() {
        let pq = PqParams::from_ints((3, 2), (5, 2)).unwrap();
        for n in 0..=40 {
            assert_eq!(pq.integer(n), pq.integer_sum_form(n), "n = {n}");
        }
    }

    #[test]
    fn factorials_match_frozen_values() {
        let pq = params23();
        assert_eq!(pq.factorial(0), Scalar::one());
        assert_eq!(pq.factorial(3), Scalar::from_int(95)); // 1 * 5 * 19
        assert_eq!(pq.factorial(4), Scalar::from_int(6175)); // 95 * 65
    }

    #[test]
    fn binomials_match_frozen_values_and_vanish_outside_range() {
        let pq = params23();
        assert_eq!(pq.binomial(3, 2), Scalar::from_int(19));
        assert_eq!(pq.binomial(4, 2), Scalar::from_int(247));
        assert_eq!(pq.binomial(4, 0), Scalar::one());
        assert_eq!(pq.binomial(4, 4), Scalar::one());
        assert_eq!(pq.binomial(3, -1), Scalar::zero());
        assert_eq!(pq.binomial(3, 4), Scalar::zero());
    }

    #[test]
    fn power_product_matches_frozen_values() {
        let pq = params23();
        let one = Scalar::one();
        let zero = Scalar::zero();
        // (1 + 0)(2*1 + 3*0)(4*1 + 9*0) = 8
        assert_eq!(pq.power_product(&one, &zero, 3), Scalar::from_int(8));
        // (1 + 1)(2 + 3) = 10
        assert_eq!(pq.power_product(&one, &one, 2), Scalar::from_int(10));
        assert_eq!(pq.power_product(&one, &one, 0), Scalar::one());
    }

    #[test]
    fn complement_identity_holds_exactly() {
        // q^i [n-i] = [n] - p^{n-i} [i], the engine behind the multiplier algebra
        for (pn, qd) in [((2, 1), (3, 1)), ((3, 2), (5, 2))] {
            let pq = PqParams::from_ints(pn, qd).unwrap();
            for n in 2..=25u32 {
                for i in 1..n {
                    let lhs = &pq.q_pow(i64::from(i)) * &pq.integer(n - i);
                    let rhs = &pq.integer(n) - &(&pq.p_pow(i64::from(n - i)) * &pq.integer(i));
                    assert_eq!(lhs, rhs, "n = {n}, i = {i}");
                }
            }
        }
    }

    #[test]
    fn q_case_specializes_to_classical_q_integers() {
        let pq = PqParams::from_ints((1, 1), (3, 1)).unwrap();
        for n in 0..=12 {
            assert_eq!(pq.integer(n), pq.q_integer(n), "n = {n}");
        }
    }

    #[test]
    fn float_path_approaches_the_classical_limit() {
        // at p = 1, q -> 1+: [n] -> n (first-order deviation is n(n-1)/2 * (q-1))
        for j in [3, 6, 9] {
            let q = 1.0 + 10f64.powi(-j);
            let pq = PqParams::from_f64s(1.0, q).unwrap();
            let n = 7u32;
            let value = pq.integer(n).to_f64();
            assert!((value - 7.0).abs() < 25.0 * 10f64.powi(-j), "q = {q}, [7] = {value}");
        }
    }

    #[test]
    fn mixed_paths_demote_to_float() {
        let pq = PqParams::new(Scalar::from_ratio(2, 1), Scalar::from_f64(3.0)).unwrap();
        assert!(!pq.is_exact());
        assert_eq!(pq.integer(2).to_f64(), 5.0);
    }
}
