//! Derivatives of the rotation number along monotone families, the
//! rotation-time limit, and conjugacies built across a parameter grid.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::circle_map::{power_map, FamilyMap, Lift, ParamDomain};
use crate::conjugacy::{c0_distance, conjugacy_defect, orbit_conjugacy, MonotoneTable};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_periodic_trapezoid;
use crate::report::{fmt_float, join_floats};
use crate::rotation::{
    confirm_rational, detect_rational, gcd, periodic_defect, rotation_number, rotation_time,
    weighted_rotation_number, RotationConfig, RotationEstimate,
};

pub const DEFAULT_QUAD_POINTS: usize = 1024;
pub const QUAD_TOL: f64 = 1e-8;
pub const QUAD_CAP: usize = 1 << 16;
pub const DEFAULT_FD_STEP: f64 = 1e-4;
pub const DEFAULT_FD_TOL: f64 = 1e-6;
/// Largest conjugacy defect accepted by [`drho_irrational`].
pub const DEFECT_GATE: f64 = 1e-3;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeStatus {
    Ok,
    /// `∂ₜf^q` is not positive somewhere; the formula does not apply
    /// (possibly `ρ′ = 0`).
    FormulaInapplicable,
    /// No periodic orbit with the requested `p/q` was found at `t0`; the
    /// formula value is computed anyway but carries no guarantee.
    RationalUnconfirmed,
}

impl DerivativeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DerivativeStatus::Ok => "ok",
            DerivativeStatus::FormulaInapplicable => "formula_inapplicable",
            DerivativeStatus::RationalUnconfirmed => "rational_unconfirmed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub t0: f64,
    pub p: i64,
    pub q: u64,
    pub formula_value: f64,
    pub fd_value: f64,
    pub integrand_min: f64,
    pub quad_points: usize,
    pub status: DerivativeStatus,
}

impl DerivativeReport {
    pub const CSV_HEADER: &'static str = "t0,p,q,formula_value,fd_value,integrand_min,quad_points,status";

    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{},{},{},{},{},{},{},{}\n",
            Self::CSV_HEADER,
            fmt_float(self.t0),
            self.p,
            self.q,
            fmt_float(self.formula_value),
            fmt_float(self.fd_value),
            fmt_float(self.integrand_min),
            self.quad_points,
            self.status.as_str()
        )
    }
}

/// Quadrature of `1/∂ₜf_t^q(·, t0)` over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversePartialIntegral {
    pub value: f64,
    pub integrand_min: f64,
    pub points: usize,
}

/// Periodic trapezoid of `1/∂ₜf_t^q(·, t0)` starting at `quad_n` nodes and
/// doubling until successive values agree to [`QUAD_TOL`].
///
/// Fails with the location of the first non-positive sample of `∂ₜf^q`.
pub fn inverse_partial_integral(
    family: &FamilyMap,
    t0: f64,
    q: u64,
    quad_n: usize,
) -> Result<InversePartialIntegral> {
    let pm = power_map(family, t0, q)?;
    let sample = |n: usize| -> Result<(f64, f64)> {
        let h = 1.0 / n as f64;
        let (mut sum, mut min) = (0.0, f64::INFINITY);
        for i in 0..n {
            let x = i as f64 * h;
            let g = pm.dt(x);
            if !(g > 0.0) {
                return Err(Error::NonPositiveIntegrand { x, value: g });
            }
            min = min.min(g);
            sum += 1.0 / g;
        }
        Ok((sum * h, min))
    };
    let mut n = quad_n.max(1);
    let (mut value, mut integrand_min) = sample(n)?;
    while n < QUAD_CAP {
        let (next, m) = sample(2 * n)?;
        n *= 2;
        let done = (next - value).abs() < QUAD_TOL;
        value = next;
        integrand_min = integrand_min.min(m);
        if done {
            break;
        }
    }
    Ok(InversePartialIntegral {
        value,
        integrand_min,
        points: n,
    })
}

fn check_fraction(p: i64, q: u64) -> Result<()> {
    if q == 0 || gcd(p.unsigned_abs(), q) != 1 {
        return Err(Error::InvalidInput(format!("{p}/{q} is not a reduced fraction")));
    }
    Ok(())
}

/// `ρ′(t0) = 1 / (q ∫ 1/∂ₜf_t^q(x, t0) dx)` at a parameter where `f_{t0}`
/// has a periodic orbit of rotation `p/q`.
///
/// The returned report has `fd_value = NaN`; see [`derivative_report`] for
/// the combined check.
pub fn drho_formula(family: &FamilyMap, t0: f64, p: i64, q: u64, quad_n: usize) -> Result<DerivativeReport> {
    check_fraction(p, q)?;
    if quad_n < 64 {
        return Err(Error::InvalidInput(format!("quadrature needs at least 64 nodes, got {quad_n}")));
    }
    if confirm_rational(&family.at(t0), p, q, RotationConfig::default().scan_size).is_none() {
        return Err(Error::RationalNotConfirmed { p, q, t: t0 });
    }
    let integral = inverse_partial_integral(family, t0, q, quad_n)?;
    Ok(DerivativeReport {
        t0,
        p,
        q,
        formula_value: 1.0 / (q as f64 * integral.value),
        fd_value: f64::NAN,
        integrand_min: integral.integrand_min,
        quad_points: integral.points,
        status: DerivativeStatus::Ok,
    })
}

/// `(ρ(t0 + h) − ρ(t0 − h)) / 2h` from rotation-number enclosures of width
/// at most `min(tol, h/100)`.
pub fn drho_finite_difference(family: &FamilyMap, t0: f64, h: f64, tol: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput(format!("step h = {h} must be positive")));
    }
    if let ParamDomain::Interval(lo, hi) = family.t_domain() {
        for t in [t0 - h, t0 + h] {
            if t < lo || t > hi {
                return Err(Error::ParameterOutOfRange {
                    name: "t".into(),
                    value: t,
                    reason: "finite-difference stencil leaves the parameter domain",
                });
            }
        }
    }
    let tol = if tol > 0.0 { tol.min(h * 1e-2) } else { h * 1e-2 };
    let left = rotation_number(&family.at(t0 - h), tol);
    let right = rotation_number(&family.at(t0 + h), tol);
    let width = left.width().max(right.width());
    if width > tol {
        return Err(Error::EnclosureTooWide { width, h });
    }
    let mut diff = right.value - left.value;
    // Translation numbers of continuous lift families do not jump, but a
    // caller-supplied family may wrap its translation part.
    if diff.abs() > 0.5 {
        diff -= diff.round();
    }
    Ok(diff / (2.0 * h))
}

/// Formula value and finite-difference check in one report.
///
/// Fails only on invalid input. An unconfirmed rational still gets a formula
/// value (flagged), a non-positive integrand gives `formula_value = NaN`, and
/// a failed finite difference gives `fd_value = NaN`.
pub fn derivative_report(
    family: &FamilyMap,
    t0: f64,
    p: i64,
    q: u64,
    quad_n: usize,
    h: f64,
    tol: f64,
) -> Result<DerivativeReport> {
    check_fraction(p, q)?;
    if quad_n < 64 {
        return Err(Error::InvalidInput(format!("quadrature needs at least 64 nodes, got {quad_n}")));
    }
    let confirmed = confirm_rational(&family.at(t0), p, q, RotationConfig::default().scan_size).is_some();
    let mut report = DerivativeReport {
        t0,
        p,
        q,
        formula_value: f64::NAN,
        fd_value: f64::NAN,
        integrand_min: f64::NAN,
        quad_points: quad_n,
        status: if confirmed {
            DerivativeStatus::Ok
        } else {
            DerivativeStatus::RationalUnconfirmed
        },
    };
    match inverse_partial_integral(family, t0, q, quad_n) {
        Ok(integral) => {
            report.formula_value = 1.0 / (q as f64 * integral.value);
            report.integrand_min = integral.integrand_min;
            report.quad_points = integral.points;
        }
        Err(Error::NonPositiveIntegrand { value, .. }) => {
            report.integrand_min = value;
            report.status = DerivativeStatus::FormulaInapplicable;
        }
        Err(e) => return Err(e),
    }
    report.fd_value = drho_finite_difference(family, t0, h, tol).unwrap_or(f64::NAN);
    Ok(report)
}

/// Rotation number of `f_t`, reduced mod 1, to roughly `1e-12` when the
/// weighted Birkhoff average settles, otherwise the enclosure value.
pub fn estimate_alpha(lift: &Lift) -> Result<f64> {
    alpha_within(lift, &rotation_number(lift, 1e-7))
}

fn alpha_within(lift: &Lift, est: &RotationEstimate) -> Result<f64> {
    if est.budget_exceeded {
        return Err(Error::BudgetExceeded {
            budget: RotationConfig::default().budget,
        });
    }
    if est.is_exact() {
        return Ok(est.value.rem_euclid(1.0));
    }
    let mut n = 1u64 << 10;
    let mut prev = weighted_rotation_number(lift, n);
    let mut value = est.value;
    while n < 1 << 22 {
        n *= 2;
        let next = weighted_rotation_number(lift, n);
        if (next - prev).abs() < 1e-12 {
            value = next;
            break;
        }
        prev = next;
    }
    let alpha = if est.contains(value) { value } else { est.value };
    Ok(alpha - alpha.floor())
}

/// `ρ′(t0) = ∫ φ′(f(φ⁻¹x)) · ∂ₜf(φ⁻¹x, t0) dx` for `f_{t0}` conjugate to an
/// irrational rotation by the table `phi`.
pub fn drho_irrational(family: &FamilyMap, t0: f64, phi: &MonotoneTable, quad_n: usize) -> Result<f64> {
    let lift = family.at(t0);
    let alpha = estimate_alpha(&lift)?;
    let defect = conjugacy_defect(&lift, phi, alpha, 1000);
    if defect > DEFECT_GATE {
        return Err(Error::DefectTooLarge {
            defect,
            gate: DEFECT_GATE,
        });
    }
    let inv = phi.inverse()?;
    let integrand = |x: f64| {
        let u = inv.eval(x);
        phi.slope_at(lift.eval(u)) * family.dt(u, t0)
    };
    Ok(adaptive_periodic_trapezoid(integrand, quad_n.max(1), QUAD_TOL, QUAD_CAP).0)
}

/// `(t, (t − t0)·T_t)` for each `t`, with `T_t` the rotation time.
pub fn rotation_time_limit(family: &FamilyMap, t0: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    ts.iter()
        .map(|&t| {
            if t <= t0 {
                return Err(Error::InvalidInput(format!("t = {t} must exceed t0 = {t0}")));
            }
            Ok((t, (t - t0) * rotation_time(family, t)? as f64))
        })
        .collect()
}

/// `sup |f̃_{t0}^q(x) − x − p|` over `samples` uniform points. Near zero when
/// `f_{t0}^q` is the identity on the circle.
pub fn identity_check(family: &FamilyMap, t0: f64, p: i64, q: u64, samples: usize) -> f64 {
    let lift = family.at(t0);
    let m = samples.max(1);
    (0..m)
        .map(|i| periodic_defect(&lift, i as f64 / m as f64, p, q).abs())
        .fold(0.0, f64::max)
}

/// `min ∂ₜf_t^q(x, t0)` over `samples` uniform points.
pub fn positivity_check(family: &FamilyMap, t0: f64, q: u64, samples: usize) -> f64 {
    let q = q.max(1);
    let pm = power_map(family, t0, q).expect("q >= 1");
    let m = samples.max(1);
    (0..m)
        .map(|i| pm.dt(i as f64 / m as f64))
        .fold(f64::INFINITY, f64::min)
}

/// `n` uniform points of `[lo, hi]`, each nudged forward by steps of
/// `golden·1e-6` until it is at least `1e-5` away from every fraction with
/// denominator at most 50. Every point moves at least once, since uniform
/// grid points are themselves fractions of moderate denominator.
pub fn irrational_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    const MARGIN: f64 = 1e-5;
    let near_rational = |t: f64| {
        (1..=50u32).any(|q| {
            let qf = q as f64;
            ((t * qf).round() / qf - t).abs() < MARGIN
        })
    };
    (0..n)
        .map(|i| {
            let mut t = if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            t += GOLDEN * 1e-6;
            while near_rational(t) {
                t += GOLDEN * 1e-6;
            }
            t
        })
        .collect()
}

/// A recovered conjugacy at one parameter value.
#[derive(Clone)]
pub struct ConjugacySample {
    pub t: f64,
    pub alpha: f64,
    pub lift: Lift,
    pub table: MonotoneTable,
}

fn conjugacy_at(family: &FamilyMap, t: f64, len: usize) -> Result<ConjugacySample> {
    let lift = family.at(t);
    let est = rotation_number(&lift, 1e-7);
    if est.is_exact() {
        let guess = detect_rational(&lift, &est, RotationConfig::default().q_max);
        let (p, q) = guess.map_or((est.value.round() as i64, 1), |g| (g.p, g.q));
        return Err(Error::RationalParameter { t, p, q });
    }
    if let Some(g) = detect_rational(&lift, &est, 50) {
        return Err(Error::RationalParameter { t, p: g.p, q: g.q });
    }
    let alpha = alpha_within(&lift, &est)?;
    let table = orbit_conjugacy(&lift, alpha, len)?;
    Ok(ConjugacySample { t, alpha, lift, table })
}

/// Orbit conjugacies `ψ_t` anchored at 0, one per grid value, in grid order.
pub fn build_global_conjugacy(family: &FamilyMap, t_grid: &[f64], len: usize) -> Result<Vec<ConjugacySample>> {
    #[cfg(feature = "parallel")]
    let results: Vec<Result<ConjugacySample>> =
        t_grid.par_iter().map(|&t| conjugacy_at(family, t, len)).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<ConjugacySample>> = t_grid.iter().map(|&t| conjugacy_at(family, t, len)).collect();
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub t_grid: Vec<f64>,
    pub max_adjacent_distance: f64,
    pub max_defect: f64,
}

impl ContinuityReport {
    pub const CSV_HEADER: &'static str = "t_grid,max_adjacent_distance,max_defect";

    /// Single-row CSV; the grid is one `;`-separated field.
    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{},{},{}\n",
            Self::CSV_HEADER,
            join_floats(&self.t_grid, ";"),
            fmt_float(self.max_adjacent_distance),
            fmt_float(self.max_defect)
        )
    }
}

/// Largest sup-distance between consecutive tables and largest conjugacy
/// defect, each over `samples` uniform points.
pub fn continuity_modulus(samples: &[ConjugacySample], m: usize) -> ContinuityReport {
    let max_adjacent_distance = samples
        .windows(2)
        .map(|w| c0_distance(&w[0].table, &w[1].table, m))
        .fold(0.0, f64::max);
    let max_defect = samples
        .iter()
        .map(|s| conjugacy_defect(&s.lift, &s.table, s.alpha, m))
        .fold(0.0, f64::max);
    ContinuityReport {
        t_grid: samples.iter().map(|s| s.t).collect(),
        max_adjacent_distance,
        max_defect,
    }
}
