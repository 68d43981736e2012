//! Mode-locking plateaus (Arnold tongues) and difference quotients of the
//! rotation number just outside them.

use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{catalog, FamilySpec};
use crate::circle_map::FamilyMap;
use crate::error::{Error, Result};
use crate::report::fmt_float;
use crate::rotation::{gcd, rotation_number, scan_displacement_refined, Crossing};

/// Bisection steps allowed per plateau endpoint.
pub const MAX_BISECTION_STEPS: u32 = 60;
pub const COARSE_SCAN: usize = 256;
pub const FINE_SCAN: usize = 2048;

/// A parameter interval on which the rotation number equals `p/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateau {
    pub t_left: f64,
    pub t_right: f64,
    /// Set when no locked parameter was found at resolution `tol`, or the
    /// locked set is narrower than `tol`; both endpoints are then the
    /// crossing parameter.
    pub degenerate: bool,
    pub steps_left: u32,
    pub steps_right: u32,
}

impl Plateau {
    pub fn width(&self) -> f64 {
        self.t_right - self.t_left
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.t_left + self.t_right)
    }
}

fn classify(family: &FamilyMap, t: f64, p: i64, q: u64) -> Crossing {
    scan_displacement_refined(&family.at(t), p, q, COARSE_SCAN, FINE_SCAN)
}

/// Bisects `[out, inside]` where `out` is unlocked and `inside` is locked.
/// Returns the midpoint of the final bracket and the steps used.
fn bisect_edge(family: &FamilyMap, p: i64, q: u64, mut out: f64, mut inside: f64, tol: f64) -> (f64, u32) {
    let mut steps = 0;
    while (inside - out).abs() > tol && steps < MAX_BISECTION_STEPS {
        let mid = 0.5 * (out + inside);
        if classify(family, mid, p, q).is_crossing() {
            inside = mid;
        } else {
            out = mid;
        }
        steps += 1;
    }
    (0.5 * (out + inside), steps)
}

/// Endpoints of `{t : ρ(f_t) = p/q}` inside `bracket`, each to within `tol`.
///
/// Locking at `t` means `f̃_t^q − id − p` vanishes somewhere, detected by a
/// sign scan refined near tangencies. Requires `ρ(left) < p/q < ρ(right)`.
pub fn plateau_interval(family: &FamilyMap, p: i64, q: u64, bracket: (f64, f64), tol: f64) -> Result<Plateau> {
    if q == 0 || gcd(p.unsigned_abs(), q) != 1 {
        return Err(Error::InvalidInput(format!("{p}/{q} is not a reduced fraction")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol = {tol} must be positive")));
    }
    let (mut lo, mut hi) = bracket;
    let bad = || Error::BadBracket {
        lo: bracket.0,
        hi: bracket.1,
        p,
        q,
    };
    if !(lo < hi) || !matches!(classify(family, lo, p, q), Crossing::Below) {
        return Err(bad());
    }
    if !matches!(classify(family, hi, p, q), Crossing::Above) {
        return Err(bad());
    }

    let mut locked = None;
    let mut steps = 0;
    while hi - lo > tol && steps < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        match classify(family, mid, p, q) {
            Crossing::Bracket { .. } => {
                locked = Some(mid);
                break;
            }
            Crossing::Below => lo = mid,
            Crossing::Above => hi = mid,
        }
        steps += 1;
    }
    let Some(inside) = locked else {
        let t = 0.5 * (lo + hi);
        return Ok(Plateau {
            t_left: t,
            t_right: t,
            degenerate: true,
            steps_left: steps,
            steps_right: steps,
        });
    };

    let (t_left, steps_left) = bisect_edge(family, p, q, lo, inside, tol);
    let (t_right, steps_right) = bisect_edge(family, p, q, hi, inside, tol);
    if t_right - t_left <= tol {
        let t = 0.5 * (t_left + t_right);
        return Ok(Plateau {
            t_left: t,
            t_right: t,
            degenerate: true,
            steps_left,
            steps_right,
        });
    }
    Ok(Plateau {
        t_left,
        t_right,
        degenerate: false,
        steps_left,
        steps_right,
    })
}

/// One row of a tongue scan. `error` is set, and the interval is NaN, when
/// the row failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TongueRecord {
    pub a: f64,
    pub p: i64,
    pub q: u64,
    pub t_left: f64,
    pub t_right: f64,
    pub tol: f64,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TongueRecord {
    pub const CSV_HEADER: &'static str = "a,p,q,t_left,t_right,tol,degenerate";

    pub fn is_failed(&self) -> bool {
        self.error.is_some()
    }

    /// CSV row; failed rows carry `failed:<kind>` in the last column.
    pub fn csv_row(&self) -> String {
        let flag = match &self.error {
            Some(kind) => format!("failed:{kind}"),
            None => self.degenerate.to_string(),
        };
        format!(
            "{},{},{},{},{},{},{}",
            fmt_float(self.a),
            self.p,
            self.q,
            fmt_float(self.t_left),
            fmt_float(self.t_right),
            fmt_float(self.tol),
            flag
        )
    }
}

pub fn tongues_to_csv(records: &[TongueRecord]) -> String {
    let mut out = String::from(TongueRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Name of the parameter a tongue scan varies for catalog family `name`.
pub fn secondary_parameter(name: &str) -> Option<&'static str> {
    match name {
        "arnold" => Some("a"),
        "conj_rotation" | "dehn" => Some("c"),
        _ => None,
    }
}

/// Bracket `p/q ± (w + 10⁻³)` that straddles the `p/q` plateau, where `w`
/// bounds `|ρ(t) − t|` for the family. `None` when no such bound is known.
pub fn default_bracket(spec: &FamilySpec, p: i64, q: u64) -> Option<(f64, f64)> {
    let w = match spec.name.as_str() {
        "rotation" | "dehn" => 0.0,
        "arnold" => spec.params.get("a")?.abs(),
        "conj_rotation" => spec.params.get("beta")?.abs(),
        _ => return None,
    };
    let r = p as f64 / q as f64;
    Some((r - w - 1e-3, r + w + 1e-3))
}

fn tongue_row(template: &FamilySpec, p: i64, q: u64, a: f64, tol: f64, bracket: Option<(f64, f64)>) -> TongueRecord {
    let run = || -> Result<Plateau> {
        let spec = match secondary_parameter(&template.name) {
            Some(key) => template.clone().with(key, a),
            None if a == 0.0 => template.clone(),
            None => {
                return Err(Error::InvalidInput(format!(
                    "family `{}` has no secondary parameter",
                    template.name
                )))
            }
        };
        let family = catalog(&spec)?;
        let bracket = match bracket.or_else(|| default_bracket(&spec, p, q)) {
            Some(b) => b,
            None => {
                return Err(Error::InvalidInput(format!(
                    "family `{}` needs an explicit bracket",
                    spec.name
                )))
            }
        };
        plateau_interval(&family, p, q, bracket, tol)
    };
    match run() {
        Ok(pl) => TongueRecord {
            a,
            p,
            q,
            t_left: pl.t_left,
            t_right: pl.t_right,
            tol,
            degenerate: pl.degenerate,
            error: None,
        },
        Err(e) => TongueRecord {
            a,
            p,
            q,
            t_left: f64::NAN,
            t_right: f64::NAN,
            tol,
            degenerate: false,
            error: Some(e.kind().to_string()),
        },
    }
}

/// One plateau per secondary-parameter value, in input order, using the
/// default bracket.
pub fn tongue_scan(template: &FamilySpec, p: i64, q: u64, a_values: &[f64], tol: f64) -> Vec<TongueRecord> {
    tongue_scan_with(template, p, q, a_values, tol, None)
}

pub fn tongue_scan_with(
    template: &FamilySpec,
    p: i64,
    q: u64,
    a_values: &[f64],
    tol: f64,
    bracket: Option<(f64, f64)>,
) -> Vec<TongueRecord> {
    #[cfg(feature = "parallel")]
    let iter = a_values.par_iter();
    #[cfg(not(feature = "parallel"))]
    let iter = a_values.iter();
    iter.map(|&a| tongue_row(template, p, q, a, tol, bracket)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Above,
    Below,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Above => 1.0,
            Side::Below => -1.0,
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "above" => Ok(Side::Above),
            "below" => Ok(Side::Below),
            _ => Err(Error::InvalidInput(format!("side must be `above` or `below`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeProbe {
    pub rows: Vec<(f64, f64)>,
    /// The enclosure budget ran out before the smallest deltas.
    pub truncated: bool,
}

impl SlopeProbe {
    pub const CSV_HEADER: &'static str = "delta,quotient";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (d, r) in &self.rows {
            out.push_str(&format!("{},{}\n", fmt_float(*d), fmt_float(*r)));
        }
        out
    }

    /// Ratios of consecutive quotients.
    pub fn growth_ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].1 / w[0].1).collect()
    }
}

/// Rows `(δ, |ρ(t_b ± δ) − ρ(t_b)| / δ)` with enclosures of width at most
/// `min(tol, δ·10⁻³)`.
pub fn matsumoto_probe(family: &FamilyMap, t_boundary: f64, side: Side, deltas: &[f64], tol: f64) -> Result<SlopeProbe> {
    if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidInput("deltas must be positive and finite".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("deltas must be strictly decreasing".into()));
    }
    let smallest = deltas[deltas.len() - 1];
    let tol_for = |d: f64| if tol > 0.0 { tol.min(d * 1e-3) } else { d * 1e-3 };
    let base = rotation_number(&family.at(t_boundary), tol_for(smallest));
    if base.budget_exceeded {
        return Err(Error::EnclosureTooWide {
            width: base.width(),
            h: smallest,
        });
    }
    let mut rows = Vec::with_capacity(deltas.len());
    let mut truncated = false;
    for &d in deltas {
        let tol_d = tol_for(d);
        let est = rotation_number(&family.at(t_boundary + side.sign() * d), tol_d);
        if est.budget_exceeded || est.width() > tol_d {
            truncated = true;
            break;
        }
        rows.push((d, (est.value - base.value).abs() / d));
    }
    Ok(SlopeProbe { rows, truncated })
}
