//! Translation and rotation numbers with enclosures.
//!
//! Three facts about a degree-one lift `F` drive everything here:
//!
//! * for any `x`, `|Fⁿ(x) − x − n·τ| < 1`;
//! * if `Fⁿ(x) ≥ x + m` for one `x` and an integer `m`, then `τ ≥ m/n`
//!   (and symmetrically for `≤`), because monotonicity propagates the
//!   inequality along the orbit;
//! * `Fⁿ(x) − x` is bounded on a grid cell `[x_i, x_{i+1}]` by its values at
//!   the ends, widened by the cell length.
//!
//! The second fact, applied at every step of every orbit, brackets an
//! irrational `τ` between Farey neighbours of growing order. Rational `τ`
//! is caught by locating a periodic orbit instead.

use std::collections::HashSet;

use serde::Serialize;

use crate::circle_map::{FamilyMap, Lift, OrbitPoint};
use crate::error::{Error, Result};

/// An enclosure `[lower, upper]` of a translation number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub n_iter: u64,
    pub budget_exceeded: bool,
}

impl RotationEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Shifts by an integer so that `value ∈ [0, 1)`.
    pub fn mod_one(&self) -> RotationEstimate {
        let k = self.value.floor();
        let value = self.value - k;
        RotationEstimate {
            value: if value >= 1.0 { 0.0 } else { value },
            lower: self.lower - k,
            upper: self.upper - k,
            ..*self
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// A rational translation number `p/q`, optionally backed by a periodic point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalGuess {
    pub p: i64,
    pub q: u64,
    pub confirmed: bool,
    pub witness: Option<f64>,
}

impl RationalGuess {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationConfig {
    /// Uniform grid of orbit starting points.
    pub grid_size: usize,
    /// Grid used to look for sign changes of `F^q − id − p`.
    pub scan_size: usize,
    pub initial_iterations: u64,
    /// Total lift evaluations allowed.
    pub budget: u64,
    /// Largest period tried when looking for periodic orbits.
    pub q_max: u64,
}

impl Default for RotationConfig {
    fn default() -> Self {
        Self {
            grid_size: 64,
            scan_size: 256,
            initial_iterations: 1024,
            budget: 100_000_000,
            q_max: 10_000,
        }
    }
}

/// Orbit values within this distance of an exact periodic return count as a
/// return: nothing finer survives `q` rounded lift evaluations.
fn roundoff_zero(q: u64) -> f64 {
    1e-14 * q as f64
}

/// Guard subtracted before taking integer parts of `n`-step displacements.
fn floor_guard(n: u64) -> f64 {
    1e-12 + 1e-15 * n as f64
}

/// `(F̃ⁿ(x0) − x0)/n` with the a-priori enclosure `±1/n`.
pub fn translation_number(lift: &Lift, n: u64, x0: f64) -> RotationEstimate {
    let n = n.max(1);
    let start = OrbitPoint::new(x0);
    let end = lift.step_n(start, n);
    let value = end.displacement_from(start) / n as f64;
    let r = 1.0 / n as f64;
    RotationEstimate {
        value,
        lower: value - r,
        upper: value + r,
        n_iter: n,
        budget_exceeded: false,
    }
}

/// Weighted Birkhoff average of the displacement along the orbit of 0, with
/// the smooth bump `exp(−1/(s(1−s)))` as weight.
///
/// For maps smoothly conjugate to a Diophantine rotation this converges far
/// faster than the plain average; it carries no error bound of its own.
pub fn weighted_rotation_number(lift: &Lift, n: u64) -> f64 {
    let n = n.max(2);
    let mut p = OrbitPoint::new(0.0);
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..n {
        let next = lift.step(p);
        let s = (k as f64 + 0.5) / n as f64;
        let w = (-1.0 / (s * (1.0 - s))).exp();
        num += w * next.displacement_from(p);
        den += w;
        p = next;
    }
    num / den
}

/// Rotation number to enclosure width `tol` with default settings.
pub fn rotation_number(lift: &Lift, tol: f64) -> RotationEstimate {
    rotation_number_with(lift, tol, &RotationConfig::default())
}

pub fn rotation_number_with(lift: &Lift, tol: f64, cfg: &RotationConfig) -> RotationEstimate {
    let m = cfg.grid_size.max(1);
    let h = 1.0 / m as f64;
    let starts: Vec<OrbitPoint> = (0..m).map(|j| OrbitPoint::new(j as f64 * h)).collect();
    let mut points = starts.clone();
    let mut displacement = vec![0.0; m];

    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut steps = 0u64;
    let mut target = cfg.initial_iterations.max(1);
    let mut evals = 0u64;
    let mut budget_exceeded = false;
    let mut exact = None;
    let mut rejected = HashSet::new();

    loop {
        let need = (target - steps) * m as u64;
        if steps > 0 && evals + need > cfg.budget {
            budget_exceeded = true;
            break;
        }
        for j in 0..m {
            let mut p = points[j];
            for k in steps + 1..=target {
                p = lift.step(p);
                let d = p.displacement_from(starts[j]);
                let eps = floor_guard(k);
                let kf = k as f64;
                let lo = (d - eps).floor() / kf;
                let hi = (d + eps).ceil() / kf;
                if lo > lower {
                    lower = lo;
                }
                if hi < upper {
                    upper = hi;
                }
            }
            points[j] = p;
            displacement[j] = p.displacement_from(starts[j]);
        }
        evals += need;
        steps = target;

        let n = steps as f64;
        let (dmin, dmax) = displacement
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
        lower = lower.max((dmin - h) / n).max((displacement[0] - 1.0) / n);
        upper = upper.min((dmax + h) / n).min((displacement[0] + 1.0) / n);

        let q_cap = cfg.q_max.min(steps / 4).max(1);
        let mid = 0.5 * (lower + upper);
        for (p, q) in convergents(mid, q_cap) {
            let r = p as f64 / q as f64;
            if r < lower || r > upper || !rejected.insert((p, q)) {
                continue;
            }
            evals += cfg.scan_size as u64 * q;
            if scan_displacement(lift, p, q, cfg.scan_size).is_crossing() {
                exact = Some(r);
                break;
            }
        }
        if exact.is_some() || upper - lower <= tol {
            break;
        }
        target = target.saturating_mul(2);
    }

    if let Some(r) = exact {
        return RotationEstimate {
            value: r,
            lower: r,
            upper: r,
            n_iter: steps,
            budget_exceeded: false,
        };
    }
    let smooth = weighted_rotation_number(lift, steps.min(1 << 22));
    let value = if smooth.is_finite() {
        smooth.clamp(lower, upper)
    } else {
        0.5 * (lower + upper)
    };
    RotationEstimate {
        value,
        lower,
        upper,
        n_iter: steps,
        budget_exceeded,
    }
}

/// Continued-fraction convergents `p/q` of `x` with `q ≤ q_max`, in order.
pub fn convergents(x: f64, q_max: u64) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut p_prev, mut q_prev): (i128, i128) = (1, 0);
    let (mut p, mut q): (i128, i128) = (x.floor() as i128, 1);
    let mut rem = x - x.floor();
    out.push((p as i64, q as u64));
    for _ in 0..64 {
        if rem < 1e-15 {
            break;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        let a = a as i128;
        let (pn, qn) = (a * p + p_prev, a * q + q_prev);
        if qn > q_max as i128 || qn <= 0 {
            break;
        }
        (p_prev, q_prev, p, q) = (p, q, pn, qn);
        out.push((p as i64, q as u64));
        if ((p as f64) / (q as f64) - x).abs() < 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Where `g(x) = F^q(x) − x − p` vanishes, or its sign if it does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Crossing {
    /// `g` changes sign (or is within roundoff of zero) on `[lo, hi]`.
    Bracket { lo: f64, hi: f64 },
    /// `g > 0` everywhere sampled: `τ > p/q`.
    Above,
    /// `g < 0` everywhere sampled: `τ < p/q`.
    Below,
}

impl Crossing {
    pub(crate) fn is_crossing(&self) -> bool {
        matches!(self, Crossing::Bracket { .. })
    }
}

#[inline]
pub(crate) fn periodic_defect(lift: &Lift, x: f64, p: i64, q: u64) -> f64 {
    let start = OrbitPoint::new(x);
    lift.step_n(start, q).displacement_from(start) - p as f64
}

/// Sign scan of `F^q − id − p` on `n` uniform points of one period.
pub(crate) fn scan_displacement(lift: &Lift, p: i64, q: u64, n: usize) -> Crossing {
    let n = n.max(2);
    let zero = roundoff_zero(q);
    let g0 = periodic_defect(lift, 0.0, p, q);
    if g0.abs() <= zero {
        return Crossing::Bracket { lo: 0.0, hi: 0.0 };
    }
    let mut prev = (0.0, g0);
    for i in 1..=n {
        let x = i as f64 / n as f64;
        let g = if i == n { g0 } else { periodic_defect(lift, x, p, q) };
        if g.abs() <= zero {
            return Crossing::Bracket { lo: x, hi: x };
        }
        if g.signum() != prev.1.signum() {
            return Crossing::Bracket { lo: prev.0, hi: x };
        }
        prev = (x, g);
    }
    if g0 > 0.0 {
        Crossing::Above
    } else {
        Crossing::Below
    }
}

/// Like [`scan_displacement`], but when the coarse scan finds no sign change
/// it rescans on a denser grid and then polishes the most promising local
/// extrema with a golden-section search. Near a tangency the displacement
/// only dips to zero on a tiny set, which a fixed grid easily misses.
pub(crate) fn scan_displacement_refined(
    lift: &Lift,
    p: i64,
    q: u64,
    coarse: usize,
    fine: usize,
) -> Crossing {
    let first = scan_displacement(lift, p, q, coarse);
    if first.is_crossing() || fine <= coarse {
        return first;
    }
    let second = scan_displacement(lift, p, q, fine);
    if second.is_crossing() {
        return second;
    }
    let above = matches!(second, Crossing::Above);
    // Extremum of interest: minimum if g > 0, maximum if g < 0.
    let signed = |x: f64| {
        let g = periodic_defect(lift, x, p, q);
        if above {
            g
        } else {
            -g
        }
    };
    let step = 1.0 / fine as f64;
    let vals: Vec<f64> = (0..fine).map(|i| signed(i as f64 * step)).collect();
    let mut minima: Vec<usize> = (0..fine)
        .filter(|&i| {
            let l = vals[(i + fine - 1) % fine];
            let r = vals[(i + 1) % fine];
            vals[i] <= l && vals[i] <= r
        })
        .collect();
    minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let zero = roundoff_zero(q);
    for &i in minima.iter().take(4) {
        let centre = i as f64 * step;
        let (x, g) = golden_min(&signed, centre - step, centre + step, 80);
        if g <= zero {
            return Crossing::Bracket { lo: x, hi: x };
        }
    }
    second
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a < 1e-15 {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Looks for a periodic point `x*` with `F^q(x*) = x* + p` and residual at
/// most `1e-10`.
pub fn confirm_rational(lift: &Lift, p: i64, q: u64, scan_size: usize) -> Option<f64> {
    const RESIDUAL: f64 = 1e-10;
    let (mut lo, mut hi) = match scan_displacement(lift, p, q, scan_size) {
        Crossing::Bracket { lo, hi } => (lo, hi),
        _ => return None,
    };
    let g = |x: f64| periodic_defect(lift, x, p, q);
    let g_lo = g(lo);
    let mut x = lo;
    for _ in 0..200 {
        x = 0.5 * (lo + hi);
        let gx = g(x);
        if (hi - lo <= RESIDUAL && gx.abs() <= RESIDUAL) || hi - lo <= f64::EPSILON {
            break;
        }
        if gx.signum() == g_lo.signum() {
            lo = x;
        } else {
            hi = x;
        }
    }
    (g(x).abs() <= RESIDUAL).then_some(x)
}

/// Tries the continued-fraction convergents of `est.value` that fall inside
/// the enclosure, smallest denominator first.
pub fn detect_rational(lift: &Lift, est: &RotationEstimate, q_max: u64) -> Option<RationalGuess> {
    let slack = 1e-15 * est.value.abs().max(1.0);
    convergents(est.value, q_max.max(1))
        .into_iter()
        .filter(|&(p, q)| {
            let r = p as f64 / q as f64;
            r >= est.lower - slack && r <= est.upper + slack
        })
        .find_map(|(p, q)| {
            confirm_rational(lift, p, q, RotationConfig::default().scan_size).map(|x| RationalGuess {
                p,
                q,
                confirmed: true,
                witness: Some(x),
            })
        })
}

/// Smallest `T` with `F̃_tᵀ(0) ≥ 1` (up to roundoff), where the lift is normalised so that
/// `F̃_t(0) ∈ [0, 1)`.
pub fn rotation_time(family: &FamilyMap, t: f64) -> Result<u64> {
    rotation_time_with_budget(family, t, RotationConfig::default().budget)
}

pub fn rotation_time_with_budget(family: &FamilyMap, t: f64, budget: u64) -> Result<u64> {
    let raw = family.at(t);
    let lift = raw.shifted(-raw.eval(0.0).floor());
    if scan_displacement(&lift, 0, 1, 256).is_crossing() {
        return Err(Error::FixedPoint { t });
    }
    let start = OrbitPoint::new(0.0);
    let mut p = start;
    for n in 1..=budget {
        p = lift.step(p);
        // A landing within roundoff of 1 counts as a full unit.
        if p.displacement_from(start) >= 1.0 - floor_guard(n) {
            return Ok(n);
        }
    }
    Err(Error::BudgetExceeded { budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, FamilySpec};
    use std::f64::consts::{PI, TAU};

    fn arnold(a: f64, t: f64) -> Lift {
        catalog(&FamilySpec::arnold(a)).unwrap().at(t)
    }

    #[test]
    fn translation_number_rotation() {
        let est = translation_number(&Lift::rotation(0.3), 10, 0.0);
        assert!((est.value - 0.3).abs() < 1e-15);
        assert!((est.lower - 0.2).abs() < 1e-15 && (est.upper - 0.4).abs() < 1e-15);
    }

    #[test]
    fn translation_number_identity() {
        for n in [1, 7, 100] {
            let est = translation_number(&Lift::identity(), n, 0.4);
            assert_eq!(est.value, 0.0);
            assert!((est.width() - 2.0 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_number_identity() {
        let est = rotation_number(&Lift::identity(), 1e-6);
        assert_eq!(est.value, 0.0);
        assert!(est.lower >= -1e-6 && est.upper <= 1e-6);
    }

    #[test]
    fn rotation_number_irrational_rotation() {
        let alpha = 2f64.sqrt() - 1.0;
        let est = rotation_number(&Lift::rotation(alpha), 1e-8);
        assert!(est.width() <= 1e-8);
        assert!(est.contains(alpha));
        assert!(!est.budget_exceeded);
    }

    #[test]
    fn rotation_number_conj_rotation_third() {
        let lift = catalog(&FamilySpec::conj_rotation(0.05, 0.0)).unwrap().at(1.0 / 3.0);
        let est = rotation_number(&lift, 1e-9);
        assert!(est.contains(1.0 / 3.0), "{est:?}");
        assert!(est.width() <= 1e-9);
    }

    #[test]
    fn enclosure_width_bounded_by_two_over_n() {
        for t in [0.11, 0.2, 0.37] {
            let est = rotation_number(&arnold(0.12, t), 1e-7);
            assert!(est.width() <= 2.0 / est.n_iter as f64);
            assert!(est.lower <= est.value && est.value <= est.upper);
        }
    }

    #[test]
    fn budget_exceeded_is_flagged() {
        let cfg = RotationConfig {
            budget: 200_000,
            ..Default::default()
        };
        let lift = catalog(&FamilySpec::dehn(0.07)).unwrap().at(0.3187);
        let est = rotation_number_with(&lift, 1e-14, &cfg);
        assert!(est.budget_exceeded);
        assert!(est.contains(0.3187));
    }

    #[test]
    fn mod_one_shifts_integer_part() {
        let est = rotation_number(&Lift::rotation(2.25), 1e-9).mod_one();
        assert!((est.value - 0.25).abs() < 1e-12);
        assert!(est.contains(0.25));
    }

    #[test]
    fn convergents_of_known_numbers() {
        assert_eq!(convergents(1.0 / 3.0, 50), vec![(0, 1), (1, 3)]);
        let golden = convergents((5f64.sqrt() - 1.0) / 2.0, 100);
        let qs: Vec<u64> = golden.iter().map(|c| c.1).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        assert_eq!(convergents(-0.5, 10), vec![(-1, 1), (-1, 2)]);
        let pi = convergents(PI, 200);
        assert_eq!(pi.last(), Some(&(355, 113)));
    }

    #[test]
    fn detect_third() {
        let lift = Lift::rotation(1.0 / 3.0);
        let est = rotation_number(&lift, 1e-9);
        let g = detect_rational(&lift, &est, 50).unwrap();
        assert_eq!((g.p, g.q), (1, 3));
        assert!(g.confirmed);
        let x = g.witness.unwrap();
        assert!(periodic_defect(&lift, x, 1, 3).abs() <= 1e-10);
    }

    #[test]
    fn detect_none_for_irrational_rotation() {
        let lift = Lift::rotation(2f64.sqrt() - 1.0);
        let est = rotation_number(&lift, 1e-9);
        assert!(detect_rational(&lift, &est, 100).is_none());
    }

    #[test]
    fn detect_arnold_fixed_point() {
        let lift = arnold(0.1, 0.05);
        let est = rotation_number(&lift, 1e-8);
        let g = detect_rational(&lift, &est, 100).unwrap();
        assert_eq!((g.p, g.q), (0, 1));
        let x = g.witness.unwrap();
        // Zeros of 0.05 + 0.1 sin(2πx).
        let s = (TAU * x).sin();
        assert!((s + 0.5).abs() < 1e-8, "{x}");
    }

    #[test]
    fn rotation_time_rotation_family() {
        let rot = catalog(&FamilySpec::rotation()).unwrap();
        assert_eq!(rotation_time(&rot, 0.3).unwrap(), 4);
        assert_eq!(rotation_time(&rot, 0.25).unwrap(), 4);
        assert_eq!(rotation_time(&rot, 1.3).unwrap(), 4);
    }

    #[test]
    fn rotation_time_dehn_bracket() {
        let dehn = catalog(&FamilySpec::dehn(1.0 / (4.0 * PI))).unwrap();
        let t = rotation_time(&dehn, 1e-3).unwrap();
        assert!((1000..=1001).contains(&t), "{t}");
    }

    #[test]
    fn rotation_time_fixed_point_errors() {
        let arn = catalog(&FamilySpec::arnold(0.1)).unwrap();
        assert!(matches!(rotation_time(&arn, 0.05), Err(Error::FixedPoint { .. })));
        let rot = catalog(&FamilySpec::rotation()).unwrap();
        assert!(matches!(rotation_time(&rot, 0.0), Err(Error::FixedPoint { .. })));
    }

    #[test]
    fn gcd_basic() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(7, 0), 7);
    }
}
