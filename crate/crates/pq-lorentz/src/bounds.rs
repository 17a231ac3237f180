//! Certified error constants and hypothesis checks.
//!
//! Everything here is coefficientwise and exact on the rational path: the
//! weighted coefficient sums include a certified remainder for the dropped
//! tail, so each constant is a true upper bound for the quantity it
//! dominates, not a truncated approximation of one.

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::pq::{PqParams, Regime};
use crate::scalar::{Rat, Scalar};
use crate::series::PowerSeries;

/// `p^n / [n]` — the unit in which first-order convergence is measured.
pub fn rate_unit(params: &PqParams, n: u32) -> Result<Scalar> {
    if n == 0 {
        return Err(Error::InvalidArgument("rate unit needs n >= 1".into()));
    }
    Ok(&params.p_pow(i64::from(n)) / &params.integer(n))
}

/// `p^{2n} / [n]^2` — the second-order unit for the correction residual.
pub fn rate_unit_squared(params: &PqParams, n: u32) -> Result<Scalar> {
    let unit = rate_unit(params, n)?;
    Ok(&unit * &unit)
}

/// Weighted coefficient sum `sum_k |c_k| prod_i (k + s_i) x^k` over the
/// stored range plus the certified tail remainder with the same weights.
/// Requires `0 < x` and, for a finite analyticity radius, `x < R`.
fn weighted_coefficient_sum(f: &PowerSeries, x: &Scalar, shifts: &[i64]) -> Result<Scalar> {
    if !(x > &Scalar::zero()) {
        return Err(Error::InvalidArgument(
            "coefficient sums need a positive radius".into(),
        ));
    }
    if let Some(radius) = f.radius() {
        if !(x < radius) {
            return Err(Error::OutsideRadius {
                modulus: x.to_f64(),
                radius: radius.to_f64(),
            });
        }
    }
    let tail = f.tail().ok_or(Error::TailUnavailable)?;
    let mut acc = Scalar::zero();
    let mut x_pow = Scalar::one();
    for k in 0..=f.k_trunc() {
        if k > 0 {
            x_pow = &x_pow * x;
        }
        let c = f.coeff(k);
        if !c.is_zero() {
            let mut w = c.modulus_upper();
            for s in shifts {
                w = &w * &Scalar::from_int(k as i64 + s);
            }
            acc = &acc + &(&w * &x_pow);
        }
    }
    let rem = tail.weighted_remainder(f.k_trunc(), x, shifts)?;
    Ok(&acc + &rem)
}

/// The majorant sum `sum_k |c_k| (k+1) r1^k` (tail included).
pub fn coeff_majorant(f: &PowerSeries, r1: &Scalar) -> Result<Scalar> {
    weighted_coefficient_sum(f, r1, &[1])
}

/// First-order constant: `p (q - p + 1) / (q - p)^2` times the majorant sum.
/// Together with [`rate_unit`] it certifies the approximation error on the
/// disk of radius r whenever `1 <= r < p r1 / q < p R / q`.
pub fn upper_m(params: &PqParams, f: &PowerSeries, r1: &Scalar) -> Result<Scalar> {
    let one = Scalar::one();
    let gap = params.q() - params.p();
    let factor = &(params.p() * &(&gap + &one)) / &(&gap * &gap);
    Ok(&factor * &coeff_majorant(f, r1)?)
}

fn second_order_sum(params: &PqParams, f: &PowerSeries, r1: &Scalar) -> Result<Scalar> {
    // the sum runs at the inflated radius y = q r1 / p
    let y = &(params.q() * r1) / params.p();
    weighted_coefficient_sum(f, &y, &[1, 2, 2])
}

/// Second-order constant:
/// `(pq - q + p - 1) / ((p-1)(q-p)^2) * sum |c_k| (k+1)(k+2)^2 (q r1 / p)^k`.
/// Together with [`rate_unit_squared`] it certifies the correction residual.
/// Undefined when p = 1 (the `1/(p-1)` factor).
pub fn upper_q(params: &PqParams, f: &PowerSeries, r1: &Scalar) -> Result<Scalar> {
    if params.regime() == Regime::QCase {
        return Err(Error::QCaseUndefined(
            "the second-order constant carries a 1/(p-1) factor".into(),
        ));
    }
    let one = Scalar::one();
    let gap = params.q() - params.p();
    let pm1 = params.p() - &one;
    let numer = &(&(params.p() * params.q()) - params.q()) + &pm1; // pq - q + p - 1
    let denom = &pm1 * &(&gap * &gap);
    Ok(&(&numer / &denom) * &second_order_sum(params, f, r1)?)
}

/// Alternate second-order prefactor `(pq - q + p) / ((p-1)(q-p))` over the
/// same weighted sum; reported alongside [`upper_q`] for comparison.
pub fn upper_q_variant(params: &PqParams, f: &PowerSeries, r1: &Scalar) -> Result<Scalar> {
    if params.regime() == Regime::QCase {
        return Err(Error::QCaseUndefined(
            "the second-order constant carries a 1/(p-1) factor".into(),
        ));
    }
    let one = Scalar::one();
    let gap = params.q() - params.p();
    let pm1 = params.p() - &one;
    let numer = &(&(params.p() * params.q()) - params.q()) + params.p(); // pq - q + p
    let denom = &pm1 * &gap;
    Ok(&(&numer / &denom) * &second_order_sum(params, f, r1)?)
}

/// Cauchy-type transfer factor `m! r* / (r* - r)^{m+1}` that carries a
/// sup-norm bound on the disk of radius `r*` to the m-th derivative on the
/// smaller disk of radius `r`.
pub fn simultaneous_factor(m: u32, r: &Scalar, rstar: &Scalar) -> Result<Scalar> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "derivative order m must be >= 1".into(),
        ));
    }
    if !(r > &Scalar::zero()) {
        return Err(Error::InvalidArgument("need r > 0".into()));
    }
    if !(rstar > r) {
        return Err(Error::InvalidArgument(
            "the transfer radius must satisfy r* > r".into(),
        ));
    }
    let mut m_fact = BigInt::from(1u32);
    for i in 2..=m {
        m_fact *= BigInt::from(i);
    }
    let gap = rstar - r;
    Ok(&(&Scalar::from_rat(Rat::from_integer(m_fact)) * rstar) / &gap.pow_u(m + 1))
}

/// Constant certifying the m-fold iterate:
/// `m * (p^n / [n]) * (q - p + 1) / (q - p)^2` times the majorant sum.
pub fn iterate_bound(
    params: &PqParams,
    f: &PowerSeries,
    m: u32,
    n: u32,
    r1: &Scalar,
) -> Result<Scalar> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "iteration count m must be >= 1".into(),
        ));
    }
    let one = Scalar::one();
    let gap = params.q() - params.p();
    let factor = &(&gap + &one) / &(&gap * &gap);
    let rate = rate_unit(params, n)?;
    let pieces = &(&Scalar::from_int(i64::from(m)) * &rate) * &factor;
    Ok(&pieces * &coeff_majorant(f, r1)?)
}

/// Which certified statements apply at the given parameters, radii, and
/// function. Each field names the statement it gates; the `variant_*`
/// fields record alternate radius orderings that are reported for
/// comparison but gate nothing.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct HypothesisFlags {
    /// q > p > 1.
    pub strict_regime: bool,
    /// 1 <= r < p r1 / q < p R / q — first-order bound on the r-disk.
    pub upper: bool,
    /// 1 <= r < r* < p r1 / q < p R / q — derivative transfer through r*.
    pub simultaneous: bool,
    /// strict regime, R > q^4, and 1 <= r < p^3 r1 / q^3 < p^4 R / q^4 —
    /// second-order (correction residual) bound.
    pub voronovskaja: bool,
    /// strict regime plus the first-order chain — iterate bound.
    pub iterates: bool,
    /// R > q^4 > p^4 > 1 (informational).
    pub variant_radius_exceeds_fourth_powers: bool,
    /// R > p^4 / q^4 > 1 (informational; needs p > q, so normally false).
    pub variant_fourth_power_ratio: bool,
    /// R > p > q > 1 (informational; needs p > q, so normally false).
    pub variant_p_dominant: bool,
}

impl HypothesisFlags {
    /// The flag gating the named table kind (used for strict-hypothesis
    /// enforcement).
    pub fn get(&self, name: &str) -> Option<bool> {
        match name {
            "strict_regime" => Some(self.strict_regime),
            "upper" => Some(self.upper),
            "simultaneous" => Some(self.simultaneous),
            "voronovskaja" => Some(self.voronovskaja),
            "iterates" => Some(self.iterates),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("flags serialize")
    }
}

/// Evaluate every hypothesis chain exactly (rational comparisons on the
/// exact path). `rstar` is only consulted for the derivative-transfer chain.
pub fn hypothesis_flags(
    params: &PqParams,
    f: &PowerSeries,
    r: &Scalar,
    rstar: Option<&Scalar>,
    r1: &Scalar,
) -> HypothesisFlags {
    let one = Scalar::one();
    let strict_regime = params.p() > &one; // q > p is guaranteed at construction
    let radius = f.radius();
    let r_ok = r >= &one;
    let pr1q = &(params.p() * r1) / params.q();
    let r1_inside = radius.map(|rr| r1 < rr).unwrap_or(true);
    let upper = r_ok && r < &pr1q && r1_inside;
    let simultaneous = match rstar {
        Some(rs) => r_ok && r < rs && rs < &pr1q && r1_inside,
        None => false,
    };
    let p4 = params.p_pow(4);
    let q4 = params.q_pow(4);
    let p3r1q3 = &(&params.p_pow(3) * r1) / &params.q_pow(3);
    let (voro_radius_ok, voro_hi_ok) = match radius {
        None => (true, true),
        Some(rr) => {
            let hi = &(&p4 * rr) / &q4;
            (rr > &q4, p3r1q3 < hi)
        }
    };
    let voronovskaja = strict_regime && voro_radius_ok && r_ok && r < &p3r1q3 && voro_hi_ok;
    let iterates = strict_regime && upper;
    let ratio = &p4 / &q4;
    let (variant_radius_exceeds_fourth_powers, variant_fourth_power_ratio, variant_p_dominant) =
        match radius {
            None => (
                q4 > p4 && p4 > one,
                ratio > one,
                params.p() > params.q() && params.q() > &one,
            ),
            Some(rr) => (
                rr > &q4 && q4 > p4 && p4 > one,
                rr > &ratio && ratio > one,
                rr > params.p() && params.p() > params.q() && params.q() > &one,
            ),
        };
    HypothesisFlags {
        strict_regime,
        upper,
        simultaneous,
        voronovskaja,
        iterates,
        variant_radius_exceeds_fourth_powers,
        variant_fourth_power_ratio,
        variant_p_dominant,
    }
}

/// Every certified constant for one (params, function, radii) configuration,
/// rendered to floats for reporting. Constants whose hypotheses exclude the
/// configuration (second-order at p = 1, sums past a finite radius) are
/// `None` rather than an error.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub p: f64,
    pub q: f64,
    pub regime: Regime,
    pub function: String,
    pub r: f64,
    pub rstar: Option<f64>,
    pub r1: f64,
    pub coeff_majorant: f64,
    pub first_order_constant: f64,
    pub second_order_constant: Option<f64>,
    pub second_order_constant_variant: Option<f64>,
    pub simultaneous_m: Option<u32>,
    pub simultaneous_factor: Option<f64>,
    pub flags: HypothesisFlags,
}

fn optional_constant(value: Result<Scalar>) -> Result<Option<f64>> {
    match value {
        Ok(v) => Ok(Some(v.to_f64())),
        Err(
            Error::QCaseUndefined(_) | Error::TailDiverges { .. } | Error::OutsideRadius { .. },
        ) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Assemble the full [`BoundReport`].
pub fn bound_report(
    params: &PqParams,
    f: &PowerSeries,
    r: &Scalar,
    rstar: Option<&Scalar>,
    r1: &Scalar,
    m: Option<u32>,
) -> Result<BoundReport> {
    let majorant = coeff_majorant(f, r1)?;
    let first = upper_m(params, f, r1)?;
    let second = optional_constant(upper_q(params, f, r1))?;
    let second_variant = optional_constant(upper_q_variant(params, f, r1))?;
    let (sim_m, sim_factor) = match (m, rstar) {
        (Some(m), Some(rs)) if m >= 1 => (
            Some(m),
            Some(simultaneous_factor(m, r, rs)?.to_f64()),
        ),
        _ => (None, None),
    };
    Ok(BoundReport {
        p: params.p().to_f64(),
        q: params.q().to_f64(),
        regime: params.regime(),
        function: f.name().to_string(),
        r: r.to_f64(),
        rstar: rstar.map(|s| s.to_f64()),
        r1: r1.to_f64(),
        coeff_majorant: majorant.to_f64(),
        first_order_constant: first.to_f64(),
        second_order_constant: second,
        second_order_constant_variant: second_variant,
        simultaneous_m: sim_m,
        simultaneous_factor: sim_factor,
        flags: hypothesis_flags(params, f, r, rstar, r1),
    })
}
