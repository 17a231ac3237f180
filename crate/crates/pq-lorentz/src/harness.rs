//! Measurement harness: deterministic circle grids, sequential/parallel
//! sup-norm scans, convergence tables with certified bound columns, the
//! empirical order audit, and the lower-constant estimate.
//!
//! Numeric policy: residual *coefficients* are assembled exactly on the
//! rational path; floating point enters only at grid evaluation. Every
//! reported `error` is the grid maximum plus a certified remainder for the
//! coefficients beyond the stored truncation, so it is an upper estimate of
//! the true sup-norm up to grid resolution.

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::bounds::{self, HypothesisFlags};
use crate::error::{Error, Result};
use crate::lorentz::{self, MultiplierRow};
use crate::pq::PqParams;
use crate::scalar::{ComplexScalar, Rat, Scalar};
use crate::series::PowerSeries;

/// Whether grid scans run on one thread or across the rayon pool.
/// With the `parallel` feature disabled, `Parallel` degrades to sequential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl ExecMode {
    /// The compiled-in default: parallel when the feature is enabled.
    pub fn default_mode() -> ExecMode {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Equispaced points on the circle of the given radius:
/// `z_j = r (cos, sin)(TAU j / G)`. The point count is part of the output
/// contract, so the same inputs always produce the same grid.
#[derive(Clone, Debug)]
pub struct CircleGrid {
    radius: Scalar,
    points: Vec<Complex64>,
}

impl CircleGrid {
    pub fn new(radius: &Scalar, samples: usize) -> Result<CircleGrid> {
        if !(radius > &Scalar::zero()) {
            return Err(Error::InvalidArgument("grid radius must be > 0".into()));
        }
        if samples == 0 {
            return Err(Error::InvalidArgument("grid needs at least one point".into()));
        }
        let r = radius.to_f64();
        let points = (0..samples)
            .map(|j| {
                let theta = std::f64::consts::TAU * (j as f64) / (samples as f64);
                Complex64::new(r * theta.cos(), r * theta.sin())
            })
            .collect();
        Ok(CircleGrid {
            radius: radius.clone(),
            points,
        })
    }

    /// The production sizing policy: at least 1024 points, at least 16 per
    /// polynomial degree under scan, never less than an explicit request.
    pub fn for_run(
        radius: &Scalar,
        requested: Option<usize>,
        max_degree: usize,
    ) -> Result<CircleGrid> {
        let samples = 1024usize.max(16 * max_degree).max(requested.unwrap_or(0));
        CircleGrid::new(radius, samples)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self) -> &Scalar {
        &self.radius
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Grid point `j` reinterpreted exactly: each f64 component is a dyadic
    /// rational, so the conversion is lossless. Used to re-run float grid
    /// evaluations through exact arithmetic.
    pub fn exact_point(&self, j: usize) -> Result<ComplexScalar> {
        let z = self
            .points
            .get(j)
            .ok_or_else(|| Error::InvalidArgument(format!("grid index {j} out of range")))?;
        let re = Rat::from_float(z.re)
            .ok_or_else(|| Error::InvalidArgument("non-finite grid point".into()))?;
        let im = Rat::from_float(z.im)
            .ok_or_else(|| Error::InvalidArgument("non-finite grid point".into()))?;
        Ok(ComplexScalar::new(
            Scalar::from_rat(re),
            Scalar::from_rat(im),
        ))
    }
}

/// Result of a sup-norm scan: the maximum modulus and the first grid index
/// attaining it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupNorm {
    pub value: f64,
    pub argmax_index: usize,
}

/// Fixed-order Horner evaluation on the float path (highest degree first),
/// mirroring the exact-path evaluation order.
pub fn horner64(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Exact-path Horner evaluation, same order as [`horner64`].
pub fn horner_exact(coeffs: &[ComplexScalar], z: &ComplexScalar) -> ComplexScalar {
    let mut acc = ComplexScalar::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * z) + c;
    }
    acc
}

/// Maximum of `|eval(z_j)|` over the grid.
///
/// The reduction combines `(value, index)` pairs with a min-index tie-break,
/// which is associative and commutative, so the parallel scan returns the
/// bit-identical result of the sequential one.
pub fn sup_norm_with_mode<F>(grid: &CircleGrid, mode: ExecMode, eval: F) -> Result<SupNorm>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let combine = |a: (f64, usize), b: (f64, usize)| -> (f64, usize) {
        if b.0 > a.0 {
            b
        } else if b.0 < a.0 {
            a
        } else if b.1 < a.1 {
            b
        } else {
            a
        }
    };
    let eval_one = |j: usize, z: Complex64| -> Result<(f64, usize)> {
        let v = eval(z)?;
        let m = v.norm();
        if !m.is_finite() {
            return Err(Error::EvaluationFailed {
                re: z.re,
                im: z.im,
                reason: format!("non-finite value {v}"),
            });
        }
        Ok((m, j))
    };
    let sequential = || -> Result<(f64, usize)> {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (j, z) in grid.points().iter().enumerate() {
            best = combine(best, eval_one(j, *z)?);
        }
        Ok(best)
    };
    let best = match mode {
        ExecMode::Sequential => sequential()?,
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                grid.points()
                    .par_iter()
                    .enumerate()
                    .map(|(j, z)| eval_one(j, *z))
                    .try_reduce(|| (f64::NEG_INFINITY, usize::MAX), |a, b| Ok(combine(a, b)))?
            }
            #[cfg(not(feature = "parallel"))]
            {
                sequential()?
            }
        }
    };
    if best.1 == usize::MAX {
        return Err(Error::InvalidArgument("sup-norm scan over empty grid".into()));
    }
    Ok(SupNorm {
        value: best.0,
        argmax_index: best.1,
    })
}

/// [`sup_norm_with_mode`] at the compiled-in default mode.
pub fn sup_norm<F>(grid: &CircleGrid, eval: F) -> Result<SupNorm>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    sup_norm_with_mode(grid, ExecMode::default_mode(), eval)
}

/// Grid maximum of the polynomial with the given exact coefficients:
/// coefficients are converted to floats once, then scanned with [`horner64`].
pub fn polynomial_grid_max(
    coeffs: &[ComplexScalar],
    grid: &CircleGrid,
    mode: ExecMode,
) -> Result<SupNorm> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("no coefficients to scan".into()));
    }
    let coeffs64: Vec<Complex64> = coeffs.iter().map(|c| c.to_complex64()).collect();
    sup_norm_with_mode(grid, mode, |z| Ok(horner64(&coeffs64, z)))
}

/// Coefficients of `L_n^m f - f` over the stored range, as a series carrying
/// `f`'s tail certificate (the multipliers lie in [0, 1], so
/// `|c_k (lambda_k^m - 1)| <= |c_k|` and the certificate transfers).
pub fn residual_series(
    f: &PowerSeries,
    params: &PqParams,
    n: u32,
    m: u32,
) -> Result<PowerSeries> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "iteration count m must be >= 1".into(),
        ));
    }
    let row = MultiplierRow::new(params, n)?;
    let one = Scalar::one();
    let k_trunc = f.k_trunc();
    let mut coeffs = Vec::with_capacity(k_trunc + 1);
    for k in 0..=k_trunc {
        let lam = row.lambda(k);
        let lam_m = if m == 1 { lam } else { lam.pow_u(m) };
        coeffs.push(f.coeff(k).scale(&(&lam_m - &one)));
    }
    PowerSeries::new(
        format!("residual_n{n}_m{m}({})", f.name()),
        coeffs,
        f.tail().cloned(),
        f.radius().cloned(),
    )
}

fn check_eval_radius(f: &PowerSeries, r: &Scalar) -> Result<()> {
    if let Some(radius) = f.radius() {
        if !(r < radius) {
            return Err(Error::OutsideRadius {
                modulus: r.to_f64(),
                radius: radius.to_f64(),
            });
        }
    }
    Ok(())
}

fn plain_tail_bound(series: &PowerSeries, r: &Scalar) -> Result<Scalar> {
    series
        .tail()
        .ok_or(Error::TailUnavailable)?
        .weighted_remainder(series.k_trunc(), r, &[])
}

/// Which family of measurements a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Convergence,
    Voronovskaja,
    Simultaneous,
    Iterates,
}

impl TableKind {
    /// The hypothesis flag gating this table's certified bound.
    pub fn flag_name(&self) -> &'static str {
        match self {
            TableKind::Convergence => "upper",
            TableKind::Voronovskaja => "voronovskaja",
            TableKind::Simultaneous => "simultaneous",
            TableKind::Iterates => "iterates",
        }
    }
}

/// One measured row: the certified error estimate, the rate unit it is
/// normalized by, and the certified constant the normalized value is
/// compared against.
#[derive(Clone, Debug, Serialize)]
pub struct RateRow {
    pub n: u32,
    /// Derivative order (simultaneous) or iteration count (iterates).
    pub m: Option<u32>,
    /// Grid maximum plus certified tail remainder.
    pub error: f64,
    /// `p^n/[n]`, or its square for the correction residual.
    pub rate: f64,
    /// `error / rate`.
    pub normalized: f64,
    /// The certified constant; NaN when undefined (second-order at p = 1).
    pub bound: f64,
    pub within_bound: bool,
    /// Grid index attaining the maximum (diagnostic).
    pub argmax_index: usize,
}

/// A full measured table with its parameter echo and hypothesis flags.
#[derive(Clone, Debug, Serialize)]
pub struct RateTable {
    pub kind: TableKind,
    pub p: f64,
    pub q: f64,
    pub function: String,
    pub r: f64,
    pub rstar: Option<f64>,
    pub r1: f64,
    pub grid_samples: usize,
    pub flags: HypothesisFlags,
    /// Name of the flag gating this table (see [`TableKind::flag_name`]).
    pub relevant_flag: String,
    pub relevant_flag_holds: bool,
    /// True when the source function is affine (error identically zero;
    /// order audits refuse such tables).
    pub source_is_affine: bool,
    /// First row (by `n`) from which the error column is nonincreasing
    /// through the end of the table.
    pub decreasing_from: Option<u32>,
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("table serializes")
    }

    /// Write the table as CSV with 17 significant digits; simultaneous and
    /// iterate tables carry the extra `m` column.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        let with_m = matches!(self.kind, TableKind::Simultaneous | TableKind::Iterates);
        if with_m {
            writeln!(out, "n,m,error,rate,normalized,bound,within_bound")?;
        } else {
            writeln!(out, "n,error,rate,normalized,bound,within_bound")?;
        }
        for row in &self.rows {
            let numbers = format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                row.error, row.rate, row.normalized, row.bound
            );
            if with_m {
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.n,
                    row.m.unwrap_or(0),
                    numbers,
                    row.within_bound
                )?;
            } else {
                writeln!(out, "{},{},{}", row.n, numbers, row.within_bound)?;
            }
        }
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf)
            .map_err(|e| Error::InvalidArgument(format!("CSV is not UTF-8: {e}")))
    }
}

fn first_nonincreasing_from(rows: &[RateRow]) -> Option<u32> {
    if rows.len() < 2 {
        return None;
    }
    'candidate: for i in 0..rows.len() - 1 {
        for j in i..rows.len() - 1 {
            if rows[j + 1].error > rows[j].error {
                continue 'candidate;
            }
        }
        return Some(rows[i].n);
    }
    None
}

fn validate_indices(ns: &[u32]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one operator index".into(),
        ));
    }
    if ns.contains(&0) {
        return Err(Error::InvalidArgument(
            "operator indices must be >= 1".into(),
        ));
    }
    Ok(())
}

struct TableShell {
    grid: CircleGrid,
    flags: HypothesisFlags,
}

fn table_shell(
    f: &PowerSeries,
    params: &PqParams,
    r: &Scalar,
    rstar: Option<&Scalar>,
    r1: &Scalar,
    grid_samples: Option<usize>,
) -> Result<TableShell> {
    check_eval_radius(f, r)?;
    let grid = CircleGrid::for_run(r, grid_samples, f.k_trunc())?;
    let flags = bounds::hypothesis_flags(params, f, r, rstar, r1);
    Ok(TableShell { grid, flags })
}

#[allow(clippy::too_many_arguments)]
fn finish_table(
    kind: TableKind,
    f: &PowerSeries,
    params: &PqParams,
    r: &Scalar,
    rstar: Option<&Scalar>,
    r1: &Scalar,
    shell: TableShell,
    rows: Vec<RateRow>,
) -> RateTable {
    let relevant = kind.flag_name();
    let holds = shell.flags.get(relevant).unwrap_or(false);
    RateTable {
        kind,
        p: params.p().to_f64(),
        q: params.q().to_f64(),
        function: f.name().to_string(),
        r: r.to_f64(),
        rstar: rstar.map(|s| s.to_f64()),
        r1: r1.to_f64(),
        grid_samples: shell.grid.len(),
        flags: shell.flags,
        relevant_flag: relevant.to_string(),
        relevant_flag_holds: holds,
        source_is_affine: f.is_affine(),
        decreasing_from: first_nonincreasing_from(&rows),
        rows,
    }
}

/// Convergence table: per n, the certified sup estimate of `L_n f - f` on
/// the radius-r circle, normalized by `p^n/[n]` and compared against the
/// first-order constant at majorant radius `r1`.
pub fn convergence_table(
    f: &PowerSeries,
    params: &PqParams,
    r: &Scalar,
    r1: &Scalar,
    ns: &[u32],
    grid_samples: Option<usize>,
    mode: ExecMode,
) -> Result<RateTable> {
    validate_indices(ns)?;
    let shell = table_shell(f, params, r, None, r1, grid_samples)?;
    let m_const = bounds::upper_m(params, f, r1)?;
    let bound = m_const.to_f64();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let res = residual_series(f, params, n, 1)?;
        let sup = polynomial_grid_max(res.coeffs(), &shell.grid, mode)?;
        let error = sup.value + plain_tail_bound(&res, r)?.to_f64();
        let rate = bounds::rate_unit(params, n)?.to_f64();
        let normalized = error / rate;
        rows.push(RateRow {
            n,
            m: None,
            error,
            rate,
            normalized,
            bound,
            within_bound: normalized <= bound,
            argmax_index: sup.argmax_index,
        });
    }
    Ok(finish_table(
        TableKind::Convergence,
        f,
        params,
        r,
        None,
        r1,
        shell,
        rows,
    ))
}

/// Correction-residual table: per n, the certified sup estimate of
/// `L_n f - f + S_n/[n]`, normalized by `p^{2n}/[n]^2` and compared against
/// the second-order constant. At p = 1 the constant is undefined and the
/// bound column is NaN.
pub fn voronovskaja_table(
    f: &PowerSeries,
    params: &PqParams,
    r: &Scalar,
    r1: &Scalar,
    ns: &[u32],
    grid_samples: Option<usize>,
    mode: ExecMode,
) -> Result<RateTable> {
    validate_indices(ns)?;
    let shell = table_shell(f, params, r, None, r1, grid_samples)?;
    let q_const = match bounds::upper_q(params, f, r1) {
        Ok(v) => Some(v.to_f64()),
        Err(
            Error::QCaseUndefined(_) | Error::TailDiverges { .. } | Error::OutsideRadius { .. },
        ) => None,
        Err(e) => return Err(e),
    };
    let k_trunc = f.k_trunc();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let res = residual_series(f, params, n, 1)?;
        let s = lorentz::voronovskaja_term(f, n, params)?;
        check_eval_radius(&s, r)?;
        let bn_inv = params.integer(n).recip();
        let coeffs: Vec<ComplexScalar> = (0..=k_trunc)
            .map(|k| &res.coeff(k) + &s.coeff(k).scale(&bn_inv))
            .collect();
        let sup = polynomial_grid_max(&coeffs, &shell.grid, mode)?;
        let tail = plain_tail_bound(&res, r)?;
        let s_tail = &plain_tail_bound(&s, r)? * &bn_inv;
        let error = sup.value + tail.to_f64() + s_tail.to_f64();
        let rate = bounds::rate_unit_squared(params, n)?.to_f64();
        let normalized = error / rate;
        let bound = q_const.unwrap_or(f64::NAN);
        rows.push(RateRow {
            n,
            m: None,
            error,
            rate,
            normalized,
            bound,
            within_bound: q_const.map(|b| normalized <= b).unwrap_or(false),
            argmax_index: sup.argmax_index,
        });
    }
    Ok(finish_table(
        TableKind::Voronovskaja,
        f,
        params,
        r,
        None,
        r1,
        shell,
        rows,
    ))
}

/// Simultaneous-approximation table: per n, the certified sup estimate of
/// the m-th ordinary derivative of `L_n f - f` on the radius-r circle,
/// normalized by `p^n/[n]` and compared against (transfer factor through
/// r*) x (first-order constant).
#[allow(clippy::too_many_arguments)]
pub fn simultaneous_table(
    f: &PowerSeries,
    params: &PqParams,
    r: &Scalar,
    rstar: &Scalar,
    r1: &Scalar,
    m: u32,
    ns: &[u32],
    grid_samples: Option<usize>,
    mode: ExecMode,
) -> Result<RateTable> {
    validate_indices(ns)?;
    if m == 0 {
        return Err(Error::InvalidArgument(
            "derivative order m must be >= 1".into(),
        ));
    }
    let shell = table_shell(f, params, r, Some(rstar), r1, grid_samples)?;
    let factor = bounds::simultaneous_factor(m, r, rstar)?;
    let m_const = bounds::upper_m(params, f, r1)?;
    let bound = (&factor * &m_const).to_f64();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let res = residual_series(f, params, n, 1)?;
        let deriv = res.ordinary_derivative(m);
        let sup = polynomial_grid_max(deriv.coeffs(), &shell.grid, mode)?;
        let error = sup.value + plain_tail_bound(&deriv, r)?.to_f64();
        let rate = bounds::rate_unit(params, n)?.to_f64();
        let normalized = error / rate;
        rows.push(RateRow {
            n,
            m: Some(m),
            error,
            rate,
            normalized,
            bound,
            within_bound: normalized <= bound,
            argmax_index: sup.argmax_index,
        });
    }
    Ok(finish_table(
        TableKind::Simultaneous,
        f,
        params,
        r,
        Some(rstar),
        r1,
        shell,
        rows,
    ))
}

/// Iterate table over an explicit `(n, m_n)` schedule: per entry, the
/// certified sup estimate of `L_n^{m} f - f`, normalized by `p^n/[n]` and
/// compared against `m (q-p+1)/(q-p)^2` times the majorant sum (that is,
/// the iterate constant divided by the rate unit).
pub fn iterate_table(
    f: &PowerSeries,
    params: &PqParams,
    r: &Scalar,
    r1: &Scalar,
    schedule: &[(u32, u32)],
    grid_samples: Option<usize>,
    mode: ExecMode,
) -> Result<RateTable> {
    let ns: Vec<u32> = schedule.iter().map(|&(n, _)| n).collect();
    validate_indices(&ns)?;
    if schedule.iter().any(|&(_, m)| m == 0) {
        return Err(Error::InvalidArgument(
            "iteration counts must be >= 1".into(),
        ));
    }
    let shell = table_shell(f, params, r, None, r1, grid_samples)?;
    let m_const = bounds::upper_m(params, f, r1)?;
    // iterate constant / (m * rate unit) = M / p
    let per_iteration = (&m_const / params.p()).to_f64();
    let mut rows = Vec::with_capacity(schedule.len());
    for &(n, m) in schedule {
        let res = residual_series(f, params, n, m)?;
        let sup = polynomial_grid_max(res.coeffs(), &shell.grid, mode)?;
        let error = sup.value + plain_tail_bound(&res, r)?.to_f64();
        let rate = bounds::rate_unit(params, n)?.to_f64();
        let normalized = error / rate;
        let bound = f64::from(m) * per_iteration;
        rows.push(RateRow {
            n,
            m: Some(m),
            error,
            rate,
            normalized,
            bound,
            within_bound: normalized <= bound,
            argmax_index: sup.argmax_index,
        });
    }
    Ok(finish_table(
        TableKind::Iterates,
        f,
        params,
        r,
        None,
        r1,
        shell,
        rows,
    ))
}

/// Outcome of the empirical exact-order audit: after a burn-in, the
/// normalized errors must stay within a bounded spread and away from zero,
/// which is what "error is of exact order rate" looks like on finite data.
#[derive(Clone, Debug, Serialize)]
pub struct OrderAudit {
    pub kind: TableKind,
    pub burn_in: u32,
    pub rows_used: usize,
    pub normalized_min: f64,
    pub normalized_max: f64,
    /// `normalized_max / normalized_min`.
    pub spread: f64,
    pub spread_cap: f64,
    pub order_confirmed: bool,
    /// Informational: every row's normalized error sits under its constant.
    pub all_within_bound: bool,
}

impl OrderAudit {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("audit serializes")
    }
}

/// Audit a measured table for exact-order behavior. Requires at least 6
/// rows, and at least 3 past the burn-in. Affine sources are rejected (their
/// error is identically zero, so no order statement applies).
pub fn exact_order_audit(table: &RateTable, burn_in: u32, spread_cap: f64) -> Result<OrderAudit> {
    if table.source_is_affine {
        return Err(Error::LinearExcluded);
    }
    if table.rows.len() < 6 {
        return Err(Error::TooFewRows {
            rows: table.rows.len(),
            needed: 6,
        });
    }
    if table.rows.iter().any(|r| !r.normalized.is_finite()) {
        return Err(Error::AuditNotApplicable(
            "table has non-finite normalized errors".into(),
        ));
    }
    let used: Vec<&RateRow> = table.rows.iter().filter(|row| row.n >= burn_in).collect();
    if used.len() < 3 {
        return Err(Error::TooFewRows {
            rows: used.len(),
            needed: 3,
        });
    }
    let normalized_min = used
        .iter()
        .map(|r| r.normalized)
        .fold(f64::INFINITY, f64::min);
    let normalized_max = used.iter().map(|r| r.normalized).fold(0.0f64, f64::max);
    let spread = if normalized_min > 0.0 {
        normalized_max / normalized_min
    } else {
        f64::INFINITY
    };
    Ok(OrderAudit {
        kind: table.kind,
        burn_in,
        rows_used: used.len(),
        normalized_min,
        normalized_max,
        spread,
        spread_cap,
        order_confirmed: normalized_min > 0.0 && spread <= spread_cap,
        all_within_bound: table.rows.iter().all(|r| r.within_bound),
    })
}

/// Empirical lower-constant estimate: the minimum over `1 <= n <= n_max` of
/// the *grid* maximum of `L_n f - f` times `[n]/p^n`. The grid maximum
/// underestimates the disk sup-norm, so the estimate errs on the safe
/// (small) side for a lower constant.
#[derive(Clone, Debug, Serialize)]
pub struct LowerConstant {
    pub c_estimate: f64,
    pub argmin_n: u32,
    pub n_max: u32,
    /// Half of `||S_{n_max}||_r / p^{n_max}` — n-independent because the
    /// correction term scales as a pure power of p.
    pub half_correction_norm: f64,
    /// First n whose scaled error reaches the half-norm floor, if any.
    pub half_inequality_from: Option<u32>,
    pub grid_samples: usize,
}

impl LowerConstant {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("lower constant serializes")
    }
}

/// Compute the [`LowerConstant`]. Affine functions are rejected: the
/// operator reproduces them exactly, so no positive lower constant exists.
pub fn lower_constant_estimate(
    f: &PowerSeries,
    params: &PqParams,
    r: &Scalar,
    n_max: u32,
    grid_samples: Option<usize>,
    mode: ExecMode,
) -> Result<LowerConstant> {
    if f.is_affine() {
        return Err(Error::LinearExcluded);
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    check_eval_radius(f, r)?;
    let grid = CircleGrid::for_run(r, grid_samples, f.k_trunc())?;
    let s = lorentz::voronovskaja_term(f, n_max, params)?;
    check_eval_radius(&s, r)?;
    let s_sup = polynomial_grid_max(s.coeffs(), &grid, mode)?;
    let s_norm = s_sup.value + plain_tail_bound(&s, r)?.to_f64();
    let half_correction_norm = 0.5 * s_norm / params.p_pow(i64::from(n_max)).to_f64();
    let mut c_estimate = f64::INFINITY;
    let mut argmin_n = 1u32;
    let mut half_inequality_from = None;
    for n in 1..=n_max {
        let res = residual_series(f, params, n, 1)?;
        let sup = polynomial_grid_max(res.coeffs(), &grid, mode)?;
        let inv_rate = bounds::rate_unit(params, n)?.recip().to_f64();
        let scaled = sup.value * inv_rate;
        if scaled < c_estimate {
            c_estimate = scaled;
            argmin_n = n;
        }
        if half_inequality_from.is_none() && scaled >= half_correction_norm {
            half_inequality_from = Some(n);
        }
    }
    Ok(LowerConstant {
        c_estimate,
        argmin_n,
        n_max,
        half_correction_norm,
        half_inequality_from,
        grid_samples: grid.len(),
    })
}
