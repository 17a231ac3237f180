//! The polynomial operator itself: coefficient multipliers, application and
//! iteration, the second-order correction term, and the correction
//! coefficients with their recurrence.
//!
//! The operator maps a series `f = sum c_k z^k` to the degree-`n` polynomial
//! `sum_k lambda_{n,k} c_k z^k`, where the multiplier `lambda_{n,k}` is a
//! product of `k-1` factors `1 - p^{n-i}[i]/[n]`. Every entry point here is
//! coefficientwise and exact on the rational path; sup-norms and certified
//! remainders live in [`crate::harness`] and [`crate::bounds`].

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::pq::PqParams;
use crate::scalar::{ComplexScalar, Scalar};
use crate::series::{json_quad, PowerSeries, TailMajorant};

/// All multipliers `lambda_{n,0}..lambda_{n,n}` for one operator index,
/// computed by the incremental product (one new factor per k).
#[derive(Clone, Debug)]
pub struct MultiplierRow {
    n: u32,
    lambdas: Vec<Scalar>,
}

impl MultiplierRow {
    pub fn new(params: &PqParams, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "operator index n must be >= 1".into(),
            ));
        }
        let n_us = n as usize;
        let bn = params.integer(n);
        let mut lambdas = vec![Scalar::one(); n_us + 1];
        // running state entering step k: bracket = [k-1], p_pow = p^{n-k+1},
        // q_pow = q^{k-1} (used to advance the bracket)
        let mut lam = Scalar::one();
        let mut bracket = Scalar::one();
        let mut p_pow = params.p_pow(i64::from(n) - 1);
        let mut q_pow = params.q().clone();
        for slot in lambdas.iter_mut().take(n_us + 1).skip(2) {
            let factor = &Scalar::one() - &(&(&p_pow * &bracket) / &bn);
            lam = &lam * &factor;
            *slot = lam.clone();
            bracket = &(params.p() * &bracket) + &q_pow;
            q_pow = &q_pow * params.q();
            p_pow = &p_pow / params.p();
        }
        Ok(MultiplierRow { n, lambdas })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `lambda_{n,k}`; exactly zero beyond the polynomial degree `n`.
    pub fn lambda(&self, k: usize) -> Scalar {
        self.lambdas.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn lambdas(&self) -> &[Scalar] {
        &self.lambdas
    }
}

/// `lambda_{n,k}` as the bare product `prod_{i=1}^{k-1} (1 - p^{n-i}[i]/[n])`,
/// recomputed from scratch (reference route for the incremental row).
pub fn multiplier_product(params: &PqParams, n: u32, k: usize) -> Result<Scalar> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "operator index n must be >= 1".into(),
        ));
    }
    if k <= 1 {
        return Ok(Scalar::one());
    }
    if k > n as usize {
        // the factor at i = n vanishes, and it appears once k reaches n+1
        return Ok(Scalar::zero());
    }
    let bn = params.integer(n);
    let mut prod = Scalar::one();
    for i in 1..k {
        let scaled = &(&params.p_pow(i64::from(n) - i as i64) * &params.integer(i as u32)) / &bn;
        prod = &prod * &(&Scalar::one() - &scaled);
    }
    Ok(prod)
}

/// `lambda_{n,k}` in closed form:
/// `q^{k(k-1)/2} * binom(n,k) * [k]! / [n]^k` — an independent oracle for
/// [`multiplier_product`]; the two agree identically.
pub fn multiplier_factorial(params: &PqParams, n: u32, k: usize) -> Result<Scalar> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "operator index n must be >= 1".into(),
        ));
    }
    if k > n as usize {
        return Ok(Scalar::zero());
    }
    let tri = params.q_pow((k as i64) * (k as i64 - 1) / 2);
    let binom = params.binomial(n, k as i64);
    let fact = params.factorial(k as u32);
    let bn_pow = params.integer(n).pow_u(k as u32);
    Ok(&(&(&tri * &binom) * &fact) / &bn_pow)
}

/// Result of applying the operator (possibly iterated) to a series:
/// a polynomial of degree at most `n` with the iteration count recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzPolynomial {
    n: u32,
    iterations: u32,
    coeffs: Vec<ComplexScalar>,
}

impl LorentzPolynomial {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    pub fn coeffs(&self) -> &[ComplexScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ComplexScalar {
        self.coeffs.get(k).cloned().unwrap_or_else(ComplexScalar::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Horner evaluation, highest degree first (same deterministic order as
    /// series evaluation). Polynomials are entire, so no radius check.
    pub fn evaluate(&self, z: &ComplexScalar) -> ComplexScalar {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for k in (0..self.coeffs.len() - 1).rev() {
            acc = &(&acc * z) + &self.coeffs[k];
        }
        acc
    }

    pub fn to_series(&self) -> Result<PowerSeries> {
        PowerSeries::polynomial(
            format!("lorentz_n{}_m{}", self.n, self.iterations),
            self.coeffs.clone(),
        )
    }

    pub fn to_json(&self) -> Result<Value> {
        let coeffs = self
            .coeffs
            .iter()
            .map(json_quad)
            .collect::<Result<Vec<_>>>()?;
        Ok(json!({
            "n": self.n,
            "iterations": self.iterations,
            "coeffs": coeffs,
        }))
    }
}

fn check_coverage(f: &PowerSeries, n: u32) -> Result<()> {
    if !f.tail_is_zero() && f.k_trunc() < n as usize {
        // coefficients c_{K+1}..c_n are needed but only bounded, not stored
        return Err(Error::NoTailCoverage {
            k: n as usize,
            k_trunc: f.k_trunc(),
        });
    }
    Ok(())
}

/// Apply the operator once: coefficient `k` becomes `lambda_{n,k} c_k`.
pub fn apply(f: &PowerSeries, n: u32, params: &PqParams) -> Result<LorentzPolynomial> {
    iterate(f, n, 1, params)
}

/// Apply the operator `m` times: coefficient `k` becomes `lambda_{n,k}^m c_k`
/// (the operator is diagonal on monomials, so iteration powers the
/// multipliers).
pub fn iterate(f: &PowerSeries, n: u32, m: u32, params: &PqParams) -> Result<LorentzPolynomial> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "iteration count m must be >= 1".into(),
        ));
    }
    check_coverage(f, n)?;
    let row = MultiplierRow::new(params, n)?;
    let k_max = (n as usize).min(f.k_trunc());
    let mut coeffs = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let lam = row.lambda(k);
        let lam_m = if m == 1 { lam } else { lam.pow_u(m) };
        coeffs.push(f.coeff(k).scale(&lam_m));
    }
    Ok(LorentzPolynomial {
        n,
        iterations: m,
        coeffs,
    })
}

/// Evaluate the operator at one point straight from its defining sum
/// `sum_k q^{k(k-1)/2} binom(n,k) [k]! c_k (z/[n])^k` without forming the
/// multiplier row — an independent route used to cross-check [`apply`].
pub fn apply_definition_at(
    f: &PowerSeries,
    n: u32,
    z: &ComplexScalar,
    params: &PqParams,
) -> Result<ComplexScalar> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "operator index n must be >= 1".into(),
        ));
    }
    check_coverage(f, n)?;
    let k_max = (n as usize).min(f.k_trunc());
    let bn_inv = params.integer(n).recip();
    let w = z.scale(&bn_inv);
    let mut acc = ComplexScalar::zero();
    let mut w_pow = ComplexScalar::one();
    let mut fact = Scalar::one();
    let mut tri = Scalar::one();
    for k in 0..=k_max {
        if k > 0 {
            fact = &fact * &params.integer(k as u32);
            tri = &tri * &params.q_pow(k as i64 - 1);
            w_pow = &w_pow * &w;
        }
        let binom = params.binomial(n, k as i64);
        let weight = &(&tri * &binom) * &fact;
        let term = &f.coeff(k).scale(&weight) * &w_pow;
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `sigma_k = sum_{i=1}^{k-1} [i]` (zero for k <= 1).
pub fn sigma(params: &PqParams, k: usize) -> Scalar {
    let mut acc = Scalar::zero();
    for i in 1..k {
        acc = &acc + &params.integer(i as u32);
    }
    acc
}

/// `sigma_0..sigma_k_max` via the incremental recurrence
/// `sigma_k = sigma_{k-1} + [k-1]`.
pub fn sigma_table(params: &PqParams, k_max: usize) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut acc = Scalar::zero();
    let mut bracket = Scalar::zero(); // [0]
    let mut q_pow = Scalar::one(); // q^0
    for k in 0..=k_max {
        if k >= 1 {
            // entering index k: bracket holds [k-1]; add it, then advance
            // [k-1] -> [k] = p [k-1] + q^{k-1} for the next round
            acc = &acc + &bracket;
            bracket = &(params.p() * &bracket) + &q_pow;
            q_pow = &q_pow * params.q();
        }
        out.push(acc.clone());
    }
    out
}

/// Closed form `([k]_{p,q} - [k]_q) / (p - 1)`; undefined when p = 1.
pub fn sigma_closed_form(params: &PqParams, k: usize) -> Option<Scalar> {
    let one = Scalar::one();
    let pm1 = params.p() - &one;
    if pm1.is_zero() {
        return None;
    }
    let diff = &params.integer(k as u32) - &params.q_integer(k as u32);
    Some(&diff / &pm1)
}

/// The second-order correction series
/// `sum_{k>=2} p^{n-(k-1)} c_k sigma_k z^k`, truncated like `f`.
///
/// When `f` carries a live geometric tail `|c_k| <= A rho^{-k}`, the result
/// carries the induced certificate: `sigma_k <= q^k / ((q-p)(q-1))` and
/// `p^{n-(k-1)} <= p^{n+1} p^{-k}` give amplitude `A p^{n+1} / ((q-p)(q-1))`
/// with decay radius `rho p / q`; the analyticity radius shrinks the same way.
pub fn voronovskaja_term(f: &PowerSeries, n: u32, params: &PqParams) -> Result<PowerSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "operator index n must be >= 1".into(),
        ));
    }
    let k_trunc = f.k_trunc();
    let sig = sigma_table(params, k_trunc);
    let mut coeffs = vec![ComplexScalar::zero(); k_trunc + 1];
    for (k, coeff) in coeffs.iter_mut().enumerate().take(k_trunc + 1).skip(2) {
        let scale = &params.p_pow(i64::from(n) - (k as i64 - 1)) * &sig[k];
        *coeff = f.coeff(k).scale(&scale);
    }
    let shrink = |r: &Scalar| -> Scalar { &(r * params.p()) / params.q() };
    let tail = match f.tail() {
        Some(t) if t.is_zero() => Some(TailMajorant::zero(k_trunc)),
        Some(t) if t.derivative_order() == 0 => {
            let denom = &(params.q() - params.p()) * &(params.q() - &Scalar::one());
            let amp = &(t.amplitude() * &params.p_pow(i64::from(n) + 1)) / &denom;
            Some(TailMajorant::new(
                amp,
                shrink(t.rho()),
                t.guaranteed_from().max(1),
            )?)
        }
        _ => None,
    };
    PowerSeries::new(
        format!("{}_vterm_n{}", f.name(), n),
        coeffs,
        tail,
        f.radius().map(shrink),
    )
}

/// Correction coefficient `e_{n,k} = lambda_{n,k} - 1 + p^{n-(k-1)} sigma_k / [n]`
/// computed directly from its definition; valid for `2 <= k <= n`.
pub fn e_direct(params: &PqParams, n: u32, k: u32) -> Result<Scalar> {
    if n < 2 || k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "correction coefficient needs 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let lam = multiplier_product(params, n, k as usize)?;
    let bn = params.integer(n);
    let sig = sigma(params, k as usize);
    let correction = &(&params.p_pow(i64::from(n) - i64::from(k) + 1) * &sig) / &bn;
    Ok(&(&lam - &Scalar::one()) + &correction)
}

/// All correction coefficients `e_{n,2}..e_{n,n}` built by the one-step
/// recurrence, starting from the exact anchor `e_{n,2} = 0`:
///
/// `e_k = -p^{n-k+1} [k-1](lambda_{k-1}-1)/[n] + (p-1)/p (lambda_{k-1}-1) + e_{k-1}/p`.
///
/// The `[k-1](lambda_{k-1}-1)` ingredient is read off a genuinely different
/// route: it is coefficient `k-2` of the (p,q)-derivative of the defect
/// polynomial `sum_j (lambda_j - 1) z^j`. The recurrence is an algebraic
/// identity, so [`e_residual`] is exactly zero (asserted by the test suite) —
/// it is reported rather than assumed so any regression is observable.
///
/// Entry `i` of the result is `e_{n,i+2}`.
pub fn e_recurrence(params: &PqParams, n: u32) -> Result<Vec<Scalar>> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "correction recurrence needs n >= 2".into(),
        ));
    }
    let row = MultiplierRow::new(params, n)?;
    let defect: Vec<ComplexScalar> = (0..=n as usize)
        .map(|j| ComplexScalar::real(&row.lambda(j) - &Scalar::one()))
        .collect();
    let defect_series = PowerSeries::polynomial("multiplier_defect", defect)?;
    let d_defect = defect_series.pq_derivative(params);
    let bn = params.integer(n);
    let one = Scalar::one();
    let pm1_over_p = &(params.p() - &one) / params.p();
    let mut out = Vec::with_capacity(n as usize - 1);
    let mut eps = Scalar::zero();
    out.push(eps.clone());
    for k in 3..=(n as usize) {
        // coefficient k-2 of the derivative is [k-1](lambda_{k-1} - 1)
        let bracket_defect = d_defect.coeff(k - 2).re;
        let term1 = -(&(&params.p_pow(i64::from(n) - k as i64 + 1) * &bracket_defect) / &bn);
        let term2 = &pm1_over_p * &(&row.lambda(k - 1) - &one);
        eps = &(&term1 + &term2) + &(&eps / params.p());
        out.push(eps.clone());
    }
    Ok(out)
}

/// `e_recurrence - e_direct` at one index — the observable residual of the
/// recurrence route (exactly zero; see [`e_recurrence`]).
pub fn e_residual(params: &PqParams, n: u32, k: u32) -> Result<Scalar> {
    if n < 2 || k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "correction residual needs 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let rec = e_recurrence(params, n)?;
    let direct = e_direct(params, n, k)?;
    Ok(&rec[(k - 2) as usize] - &direct)
}
