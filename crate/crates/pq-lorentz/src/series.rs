//! Truncated power series with certified tail majorants.
//!
//! A [`PowerSeries`] stores coefficients `c_0..c_K` exactly (or as floats on
//! the fast path) together with an optional geometric tail majorant
//! `|c_k| <= A * rho^{-k}` valid for every `k` beyond a guaranteed index.
//! All catalog entries carry analytically validated majorants, so sup-norms
//! and bound constants can account for the dropped tail with a certified
//! remainder instead of silently ignoring it.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Number, Value};

use crate::error::{Error, Result};
use crate::pq::PqParams;
use crate::scalar::{parse_rational, ComplexScalar, Rat, Scalar};

/// Geometric decay certificate for the coefficients beyond the stored range.
///
/// With `derivative_order = 0` it asserts `|c_k| <= amplitude * rho^{-k}`.
/// Differentiating a series `m` times turns that into
/// `|c_j| <= amplitude * (j+m)(j+m-1)...(j+1) * rho^{-(j+m)}`, which this
/// struct represents exactly via `derivative_order = m` instead of weakening
/// to a fresh geometric envelope.
#[derive(Clone, Debug)]
pub struct TailMajorant {
    amplitude: Scalar,
    rho: Scalar,
    derivative_order: u32,
    /// The majorant is certified for all indices strictly greater than this.
    guaranteed_from: usize,
}

impl TailMajorant {
    pub fn new(amplitude: Scalar, rho: Scalar, guaranteed_from: usize) -> Result<Self> {
        if amplitude.is_negative() {
            return Err(Error::InvalidArgument("tail amplitude must be >= 0".into()));
        }
        if !(rho > Scalar::zero()) {
            return Err(Error::InvalidArgument("tail decay radius must be > 0".into()));
        }
        Ok(TailMajorant {
            amplitude,
            rho,
            derivative_order: 0,
            guaranteed_from,
        })
    }

    /// Exactly-zero tail (polynomials).
    pub fn zero(guaranteed_from: usize) -> Self {
        TailMajorant {
            amplitude: Scalar::zero(),
            rho: Scalar::one(),
            derivative_order: 0,
            guaranteed_from,
        }
    }

    pub fn amplitude(&self) -> &Scalar {
        &self.amplitude
    }

    pub fn rho(&self) -> &Scalar {
        &self.rho
    }

    pub fn derivative_order(&self) -> u32 {
        self.derivative_order
    }

    pub fn guaranteed_from(&self) -> usize {
        self.guaranteed_from
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude.is_zero()
    }

    fn differentiated(&self, m: u32) -> TailMajorant {
        TailMajorant {
            amplitude: self.amplitude.clone(),
            rho: self.rho.clone(),
            derivative_order: self.derivative_order + m,
            guaranteed_from: self.guaranteed_from.saturating_sub(m as usize),
        }
    }

    fn to_float_path(&self) -> TailMajorant {
        TailMajorant {
            amplitude: self.amplitude.to_float_path(),
            rho: self.rho.to_float_path(),
            derivative_order: self.derivative_order,
            guaranteed_from: self.guaranteed_from,
        }
    }

    /// Certified upper bound on the weighted tail sum
    /// `sum_{j > k_stored} |c_j| * prod_i (j + s_i) * radius^j`
    /// where the `s_i` are `extra_shifts` (weights such as `(j+1)` or
    /// `(j+1)(j+2)^2` used by the bound constants; empty for the plain tail).
    ///
    /// The bound substitutes the majorant, takes the first omitted term, and
    /// dominates the rest by a geometric series with ratio
    /// `g * x`, `g` = the (nonincreasing) weight ratio at the first term and
    /// `x = radius / rho`. Errors with [`Error::TailDiverges`] when `g*x >= 1`.
    pub fn weighted_remainder(
        &self,
        k_stored: usize,
        radius: &Scalar,
        extra_shifts: &[i64],
    ) -> Result<Scalar> {
        if self.amplitude.is_zero() {
            return Ok(Scalar::zero());
        }
        if !(radius > &Scalar::zero()) {
            return Err(Error::InvalidArgument(
                "tail remainder requested at a non-positive radius".into(),
            ));
        }
        let m = i64::from(self.derivative_order);
        // first omitted index of the *underlying* (underived) series
        let k_base = k_stored as i64 + m;
        // weight in the underlying index k: prod_{t<m} (k - t) * prod_i (k + s_i - m)
        let mut shifts: Vec<i64> = (0..m).map(|t| -t).collect();
        shifts.extend(extra_shifts.iter().map(|s| s - m));
        for s in &shifts {
            if k_base + 1 + s <= 0 {
                return Err(Error::InvalidArgument(format!(
                    "tail weight factor k + {s} is not positive at k = {}",
                    k_base + 1
                )));
            }
        }
        let weight_at = |k: i64| -> Scalar {
            let mut w = Scalar::one();
            for s in &shifts {
                w = &w * &Scalar::from_int(k + s);
            }
            w
        };
        let x = radius / &self.rho;
        let w1 = weight_at(k_base + 1);
        let g = if shifts.is_empty() {
            Scalar::one()
        } else {
            &weight_at(k_base + 2) / &w1
        };
        let gx = &g * &x;
        if !(gx < Scalar::one()) {
            return Err(Error::TailDiverges {
                radius: radius.to_f64(),
                rho: self.rho.to_f64(),
            });
        }
        let lead = &(&self.amplitude * &w1) * &x.pow_i(k_base + 1);
        let sum = &lead / &(&Scalar::one() - &gx);
        Ok(&sum / &radius.pow_i(m))
    }
}

/// A function represented by stored coefficients plus tail certificate.
#[derive(Clone, Debug)]
pub struct PowerSeries {
    name: String,
    /// `c_0..c_K` inclusive.
    coeffs: Vec<ComplexScalar>,
    tail: Option<TailMajorant>,
    /// Radius of analyticity; `None` means entire.
    radius: Option<Scalar>,
}

impl PowerSeries {
    pub fn new(
        name: impl Into<String>,
        coeffs: Vec<ComplexScalar>,
        tail: Option<TailMajorant>,
        radius: Option<Scalar>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("series needs at least c_0".into()));
        }
        if let Some(r) = &radius {
            if !(r > &Scalar::zero()) {
                return Err(Error::InvalidArgument("radius of analyticity must be > 0".into()));
            }
        }
        Ok(PowerSeries {
            name: name.into(),
            coeffs,
            tail,
            radius,
        })
    }

    /// Entire polynomial with exactly-zero tail.
    pub fn polynomial(name: impl Into<String>, coeffs: Vec<ComplexScalar>) -> Result<Self> {
        let guaranteed = coeffs.len().saturating_sub(1);
        PowerSeries::new(name, coeffs, Some(TailMajorant::zero(guaranteed)), None)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Stored truncation index K.
    pub fn k_trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ComplexScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ComplexScalar {
        self.coeffs.get(k).cloned().unwrap_or_else(ComplexScalar::zero)
    }

    pub fn tail(&self) -> Option<&TailMajorant> {
        self.tail.as_ref()
    }

    pub fn radius(&self) -> Option<&Scalar> {
        self.radius.as_ref()
    }

    /// True when every coefficient beyond the stored range is certified zero.
    pub fn tail_is_zero(&self) -> bool {
        self.tail.as_ref().map(|t| t.is_zero()).unwrap_or(false)
    }

    /// Highest stored index with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// True when no coefficient with index >= 2 can be nonzero.
    ///
    /// Conservative: a series without a zero-certified tail is *not* treated
    /// as affine even if its stored high coefficients vanish.
    pub fn is_affine(&self) -> bool {
        self.tail_is_zero() && self.degree().unwrap_or(0) <= 1
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact())
    }

    /// The whole series demoted to the float path.
    pub fn to_float_path(&self) -> PowerSeries {
        PowerSeries {
            name: self.name.clone(),
            coeffs: self.coeffs.iter().map(|c| c.to_float_path()).collect(),
            tail: self.tail.as_ref().map(|t| t.to_float_path()),
            radius: self.radius.as_ref().map(|r| r.to_float_path()),
        }
    }

    fn check_inside_radius(&self, modulus_sq: &Scalar) -> Result<()> {
        if let Some(r) = &self.radius {
            if !(modulus_sq < &(r * r)) {
                return Err(Error::OutsideRadius {
                    modulus: modulus_sq.to_f64().sqrt(),
                    radius: r.to_f64(),
                });
            }
        }
        Ok(())
    }

    /// Horner evaluation of the stored polynomial part, highest degree first,
    /// in a fixed order so results are reproducible bit-for-bit.
    ///
    /// Requires `|z| < R`. The dropped tail is *not* accounted for here; use
    /// [`Self::evaluate_certified`] for a value with a truncation bound.
    pub fn evaluate(&self, z: &ComplexScalar) -> Result<ComplexScalar> {
        self.check_inside_radius(&z.modulus_sq())?;
        Ok(self.evaluate_unchecked(z))
    }

    fn evaluate_unchecked(&self, z: &ComplexScalar) -> ComplexScalar {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for k in (0..self.coeffs.len() - 1).rev() {
            acc = &(&acc * z) + &self.coeffs[k];
        }
        acc
    }

    /// Value together with a certified truncation bound
    /// `A (|z|/rho)^{K+1} / (1 - |z|/rho)` (its derived-tail analogue after
    /// differentiation). Errors when no tail majorant is attached.
    pub fn evaluate_certified(&self, z: &ComplexScalar) -> Result<(ComplexScalar, Scalar)> {
        let tail = self.tail.as_ref().ok_or(Error::TailUnavailable)?;
        let value = self.evaluate(z)?;
        let bound = if tail.is_zero() {
            Scalar::zero()
        } else {
            let zmod = z.modulus_upper();
            if zmod.is_zero() {
                Scalar::zero()
            } else {
                tail.weighted_remainder(self.k_trunc(), &zmod, &[])?
            }
        };
        Ok((value, bound))
    }

    /// The (p,q)-derivative `(f(pz) - f(qz)) / ((p-q) z)` as a series:
    /// coefficient `k` of the result is `[k+1] c_{k+1}`.
    ///
    /// The result keeps a zero tail certificate when the input has one;
    /// otherwise its tail is uncertified (the (p,q)-integer weights grow
    /// geometrically, outrunning any geometric majorant with the same rho).
    pub fn pq_derivative(&self, params: &PqParams) -> PowerSeries {
        let k_new = self.k_trunc().saturating_sub(1);
        let mut coeffs = Vec::with_capacity(k_new + 1);
        for k in 0..=k_new {
            let bracket = params.integer((k + 1) as u32);
            coeffs.push(self.coeff(k + 1).scale(&bracket));
        }
        if coeffs.is_empty() {
            coeffs.push(ComplexScalar::zero());
        }
        let tail = if self.tail_is_zero() {
            Some(TailMajorant::zero(k_new))
        } else {
            None
        };
        PowerSeries {
            name: format!("{}_dpq", self.name),
            coeffs,
            tail,
            radius: self.radius.clone(),
        }
    }

    /// Difference-quotient form of the (p,q)-derivative at a point:
    /// `(f(pz) - f(qz)) / ((p-q) z)`. Requires `z != 0` and `|q z| < R`.
    pub fn pq_derivative_pointwise(
        &self,
        z: &ComplexScalar,
        params: &PqParams,
    ) -> Result<ComplexScalar> {
        if z.is_zero() {
            return Err(Error::PointwiseAtZero);
        }
        let q_sq = params.q() * params.q();
        self.check_inside_radius(&(&q_sq * &z.modulus_sq()))?;
        let pz = z.scale(params.p());
        let qz = z.scale(params.q());
        let num = &self.evaluate_unchecked(&pz) - &self.evaluate_unchecked(&qz);
        let den_scalar = params.p() - params.q();
        let den = z.scale(&den_scalar);
        Ok(&num / &den)
    }

    /// `D^{(k)} f(0) = [k]! c_k`.
    ///
    /// For `k` beyond the stored range this is zero when the tail is
    /// certified zero and an error otherwise.
    pub fn kth_pq_derivative_at_zero(&self, k: usize, params: &PqParams) -> Result<ComplexScalar> {
        if k > self.k_trunc() {
            if self.tail_is_zero() {
                return Ok(ComplexScalar::zero());
            }
            return Err(Error::NoTailCoverage {
                k,
                k_trunc: self.k_trunc(),
            });
        }
        let factorial = params.factorial(k as u32);
        Ok(self.coeff(k).scale(&factorial))
    }

    /// Ordinary m-th derivative: coefficient `j` becomes
    /// `(j+m)(j+m-1)...(j+1) c_{j+m}`; the tail majorant is carried along as
    /// a derived-geometric certificate.
    pub fn ordinary_derivative(&self, m: u32) -> PowerSeries {
        if m == 0 {
            return self.clone();
        }
        let k_old = self.k_trunc();
        let k_new = k_old.saturating_sub(m as usize);
        let mut coeffs = Vec::with_capacity(k_new + 1);
        for j in 0..=k_new {
            if j + (m as usize) > k_old {
                coeffs.push(ComplexScalar::zero());
                continue;
            }
            let mut factor = Scalar::one();
            for t in 1..=(m as usize) {
                factor = &factor * &Scalar::from_int((j + t) as i64);
            }
            coeffs.push(self.coeff(j + m as usize).scale(&factor));
        }
        let tail = self.tail.as_ref().map(|t| {
            if t.is_zero() {
                TailMajorant::zero(k_new)
            } else {
                t.differentiated(m)
            }
        });
        PowerSeries {
            name: format!("{}_d{}", self.name, m),
            coeffs,
            tail,
            radius: self.radius.clone(),
        }
    }

    /// JSON document: coefficients as exact numerator/denominator quadruples,
    /// tail certificate, and radius (`null` when entire).
    pub fn to_json(&self) -> Result<Value> {
        let coeffs = self
            .coeffs
            .iter()
            .map(json_quad)
            .collect::<Result<Vec<_>>>()?;
        let tail = match &self.tail {
            None => Value::Null,
            Some(t) => json!({
                "A": json_pair(t.amplitude())?,
                "rho": json_pair(t.rho())?,
                "derivative_order": t.derivative_order(),
                "guaranteed_from": t.guaranteed_from(),
            }),
        };
        let radius = match &self.radius {
            None => Value::Null,
            Some(r) => json_pair(r)?,
        };
        Ok(json!({
            "name": self.name,
            "K": self.k_trunc(),
            "coeffs": coeffs,
            "tail": tail,
            "radius": radius,
        }))
    }
}

/// Exact rational rendered as a `[numerator, denominator]` JSON pair.
/// Float-path values are rendered through their exact binary rational value.
pub(crate) fn json_pair(s: &Scalar) -> Result<Value> {
    let rat = match s {
        Scalar::Exact(r) => r.clone(),
        Scalar::Float(x) => Rat::from_float(*x).ok_or_else(|| {
            Error::InvalidArgument(format!("cannot serialize non-finite float {x}"))
        })?,
    };
    let num = Number::from_str(&rat.numer().to_string())
        .map_err(|e| Error::InvalidArgument(format!("bad numerator: {e}")))?;
    let den = Number::from_str(&rat.denom().to_string())
        .map_err(|e| Error::InvalidArgument(format!("bad denominator: {e}")))?;
    Ok(json!([num, den]))
}

/// Complex coefficient as `[re_num, re_den, im_num, im_den]`.
pub(crate) fn json_quad(c: &ComplexScalar) -> Result<Value> {
    let re = json_pair(&c.re)?;
    let im = json_pair(&c.im)?;
    let (re_n, re_d) = (re[0].clone(), re[1].clone());
    let (im_n, im_d) = (im[0].clone(), im[1].clone());
    Ok(json!([re_n, re_d, im_n, im_d]))
}

/// The function catalog available to experiments and the CLI.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogFn {
    /// `sum z^k / k!` (entire).
    Exp,
    /// `1 / (1 - z/a) = sum a^{-k} z^k`, radius `|a|`.
    Geometric(Rat),
    /// `z^j`.
    Monomial(u32),
    /// Finite coefficient list `c_0..c_d`.
    Polynomial(Vec<ComplexScalar>),
    /// Odd part of Exp with alternating signs (sine shape).
    SinLike,
    /// Even part of Exp with alternating signs (cosine shape).
    CosLike,
}

impl CatalogFn {
    /// Parse the CLI form: `exp`, `sinlike`, `coslike`, `geometric:<rat>`,
    /// `monomial:<j>`, `polynomial:<c0,c1,...>`.
    pub fn parse(spec: &str) -> Result<CatalogFn> {
        let spec = spec.trim();
        let lower = spec.to_ascii_lowercase();
        let (head, arg) = match lower.split_once(':') {
            Some((h, a)) => (h.trim().to_string(), Some(a.trim().to_string())),
            None => (lower.clone(), None),
        };
        let need_arg = || {
            Error::InvalidArgument(format!("catalog entry {spec:?} needs an argument after ':'"))
        };
        match head.as_str() {
            "exp" => Ok(CatalogFn::Exp),
            "sinlike" => Ok(CatalogFn::SinLike),
            "coslike" => Ok(CatalogFn::CosLike),
            "geometric" => {
                let a = parse_rational(&arg.ok_or_else(need_arg)?)?;
                if a.is_zero() {
                    return Err(Error::InvalidArgument("geometric pole must be nonzero".into()));
                }
                Ok(CatalogFn::Geometric(a))
            }
            "monomial" => {
                let j: u32 = arg
                    .ok_or_else(need_arg)?
                    .parse()
                    .map_err(|e| Error::InvalidArgument(format!("bad monomial degree: {e}")))?;
                Ok(CatalogFn::Monomial(j))
            }
            "polynomial" => {
                let arg = arg.ok_or_else(need_arg)?;
                let coeffs = arg
                    .split(',')
                    .map(|c| Ok(ComplexScalar::real(Scalar::from_rat(parse_rational(c)?))))
                    .collect::<Result<Vec<_>>>()?;
                if coeffs.is_empty() {
                    return Err(need_arg());
                }
                Ok(CatalogFn::Polynomial(coeffs))
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown catalog entry {other:?} (expected exp, sinlike, coslike, geometric:<a>, monomial:<j>, polynomial:<c0,c1,...>)"
            ))),
        }
    }

    fn display_name(&self) -> String {
        match self {
            CatalogFn::Exp => "exp".into(),
            CatalogFn::Geometric(a) => format!("geometric:{a}"),
            CatalogFn::Monomial(j) => format!("monomial:{j}"),
            CatalogFn::Polynomial(cs) => format!("polynomial:deg{}", cs.len().saturating_sub(1)),
            CatalogFn::SinLike => "sinlike".into(),
            CatalogFn::CosLike => "coslike".into(),
        }
    }
}

/// Build a catalog function truncated at index `k_trunc` (extended as needed
/// to hold a monomial or polynomial of higher degree), with exact rational
/// coefficients and an analytically validated tail majorant.
pub fn catalog(f: &CatalogFn, k_trunc: usize) -> Result<PowerSeries> {
    let name = f.display_name();
    match f {
        CatalogFn::Exp | CatalogFn::SinLike | CatalogFn::CosLike => {
            let k = k_trunc.max(1);
            let mut coeffs = Vec::with_capacity(k + 1);
            let mut factorial = Rat::one();
            for j in 0..=k {
                if j > 0 {
                    factorial *= Rat::from_integer(BigInt::from(j as u64));
                }
                let inv = Scalar::from_rat(factorial.recip());
                let c = match f {
                    CatalogFn::Exp => ComplexScalar::real(inv),
                    CatalogFn::SinLike => {
                        if j % 2 == 1 {
                            let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
                            ComplexScalar::real(&inv * &Scalar::from_int(sign))
                        } else {
                            ComplexScalar::zero()
                        }
                    }
                    CatalogFn::CosLike => {
                        if j % 2 == 0 {
                            let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
                            ComplexScalar::real(&inv * &Scalar::from_int(sign))
                        } else {
                            ComplexScalar::zero()
                        }
                    }
                    _ => unreachable!(),
                };
                coeffs.push(c);
            }
            let tail = factorial_tail_majorant(k)?;
            PowerSeries::new(name, coeffs, Some(tail), None)
        }
        CatalogFn::Geometric(a) => {
            let k = k_trunc.max(1);
            let inv_a = Scalar::from_rat(a.recip());
            let mut coeffs = Vec::with_capacity(k + 1);
            let mut c = Scalar::one();
            for _ in 0..=k {
                coeffs.push(ComplexScalar::real(c.clone()));
                c = &c * &inv_a;
            }
            let rho = Scalar::from_rat(a.abs());
            // |c_k| = |a|^{-k} exactly: amplitude 1, valid from index 0
            let tail = TailMajorant::new(Scalar::one(), rho.clone(), 0)?;
            PowerSeries::new(name, coeffs, Some(tail), Some(rho))
        }
        CatalogFn::Monomial(j) => {
            let k = k_trunc.max(*j as usize);
            let mut coeffs = vec![ComplexScalar::zero(); k + 1];
            coeffs[*j as usize] = ComplexScalar::one();
            PowerSeries::new(name, coeffs, Some(TailMajorant::zero(*j as usize)), None)
        }
        CatalogFn::Polynomial(cs) => {
            let mut coeffs = cs.clone();
            if coeffs.len() < k_trunc + 1 {
                coeffs.resize(k_trunc + 1, ComplexScalar::zero());
            }
            let guaranteed = cs.len().saturating_sub(1);
            PowerSeries::new(name, coeffs, Some(TailMajorant::zero(guaranteed)), None)
        }
    }
}

/// Majorant for `|c_k| <= 1/k!` beyond index K: pick `rho = max(2, (K+1)/2)`
/// and `A = max_{k>K} rho^k / k!`, computed by scanning the (eventually
/// decreasing) terms. The maximum is attained at the first omitted index
/// because `rho < K + 2`.
fn factorial_tail_majorant(k_trunc: usize) -> Result<TailMajorant> {
    let rho_rat = {
        let half = Rat::new(BigInt::from(k_trunc as u64 + 1), BigInt::from(2));
        let two = Rat::from_integer(BigInt::from(2));
        if half > two {
            half
        } else {
            two
        }
    };
    let mut factorial = Rat::one();
    for j in 1..=(k_trunc + 1) {
        factorial *= Rat::from_integer(BigInt::from(j as u64));
    }
    let mut term = rho_rat.pow((k_trunc as i32) + 1) / &factorial;
    let mut amplitude = term.clone();
    let mut k = k_trunc + 1;
    // advance while terms still grow (possible only for tiny K where rho = 2)
    loop {
        let next = &term * &rho_rat / Rat::from_integer(BigInt::from(k as u64 + 1));
        if next <= term {
            break;
        }
        term = next;
        k += 1;
        if term > amplitude {
            amplitude = term.clone();
        }
    }
    TailMajorant::new(
        Scalar::from_rat(amplitude),
        Scalar::from_rat(rho_rat),
        k_trunc,
    )
}
