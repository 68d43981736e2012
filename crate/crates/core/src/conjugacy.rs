//! Piecewise-linear circle homeomorphisms used as candidate conjugacies to
//! rigid rotations.

use serde::Serialize;

use crate::circle_map::{power_map, FamilyMap, Lift, OrbitPoint};
use crate::error::{Error, Result};
use crate::quadrature::cumulative_trapezoid;
use crate::report::fmt_float;

/// Orbit points closer than this are treated as the same point.
const COLLISION_GAP: f64 = 1e-13;

/// Strictly increasing piecewise-linear degree-one map given by nodes.
///
/// `xs` lie in `[0, 1)` and increase strictly; `ys` are lifted values that
/// increase strictly with `ys[last] < ys[0] + 1`. Between the last node and
/// the first node of the next period the map interpolates linearly across
/// the wrap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::InvalidInput(format!(
                "table needs matching non-empty node lists ({} x, {} y)",
                xs.len(),
                ys.len()
            )));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("table nodes must be finite".into()));
        }
        if xs[0] < 0.0 || xs[xs.len() - 1] >= 1.0 {
            return Err(Error::InvalidInput("table x-nodes must lie in [0, 1)".into()));
        }
        if let Some(w) = xs.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!("x-nodes not increasing at {}", w[1])));
        }
        if let Some(w) = ys.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!("y-nodes not increasing at {}", w[1])));
        }
        if ys[ys.len() - 1] >= ys[0] + 1.0 {
            return Err(Error::InvalidInput("y-nodes wrap more than one period".into()));
        }
        Ok(Self { xs, ys })
    }

    /// The identity map as a one-node table anchored at the origin.
    pub fn identity() -> Self {
        Self {
            xs: vec![0.0],
            ys: vec![0.0],
        }
    }

    /// Samples a lift `f` at `size` uniform nodes.
    pub fn from_fn(f: impl Fn(f64) -> f64, size: usize) -> Result<Self> {
        let size = size.max(1);
        let xs: Vec<f64> = (0..size).map(|i| i as f64 / size as f64).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn is_anchored(&self) -> bool {
        self.xs[0] == 0.0 && self.ys[0] == 0.0
    }

    /// Node `i` of the periodic extension.
    fn node(&self, i: isize) -> (f64, f64) {
        let n = self.xs.len() as isize;
        let (k, r) = (i.div_euclid(n), i.rem_euclid(n) as usize);
        (self.xs[r] + k as f64, self.ys[r] + k as f64)
    }

    /// Index `i` with `node(i).x ≤ u < node(i + 1).x`, for `u ∈ [0, 1)`.
    fn cell(&self, u: f64) -> isize {
        self.xs.partition_point(|&v| v <= u) as isize - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = x.floor();
        let u = x - k;
        let i = self.cell(u);
        let (x0, y0) = self.node(i);
        let (x1, y1) = self.node(i + 1);
        y0 + (y1 - y0) * (u - x0) / (x1 - x0) + k
    }

    fn node_slope(&self, i: isize) -> f64 {
        let (xl, yl) = self.node(i - 1);
        let (xr, yr) = self.node(i + 1);
        (yr - yl) / (xr - xl)
    }

    /// Derivative estimate from centred differences of neighbouring nodes,
    /// interpolated linearly across the cell containing `x`.
    pub fn slope_at(&self, x: f64) -> f64 {
        let u = x - x.floor();
        let i = self.cell(u);
        let (x0, _) = self.node(i);
        let (x1, _) = self.node(i + 1);
        let (d0, d1) = (self.node_slope(i), self.node_slope(i + 1));
        d0 + (d1 - d0) * (u - x0) / (x1 - x0)
    }

    pub fn inverse(&self) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| {
                let k = y.floor();
                (y - k, x - k)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (xs, ys) = pairs.into_iter().unzip();
        Self::new(xs, ys)
    }

    pub fn to_lift(&self) -> Lift {
        let table = self.clone();
        Lift::new("table", move |x| table.eval(x))
    }

    /// Two-column CSV with header `x,y`; anchored tables start with `0,0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in self.xs.iter().zip(&self.ys) {
            out.push_str(&fmt_float(*x));
            out.push(',');
            out.push_str(&fmt_float(*y));
            out.push('\n');
        }
        out
    }
}

/// Distance between `a` and `b` on `ℝ/ℤ`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Pairs the orbit `fⁿ(0)` with `nα` for `n = 0..=len`: the unique
/// conjugacy to `R_α` that fixes 0, sampled along the orbit.
pub fn orbit_conjugacy(lift: &Lift, alpha: f64, len: usize) -> Result<MonotoneTable> {
    if len < 10 {
        return Err(Error::InvalidInput(format!("orbit length {len} < 10")));
    }
    let mut nodes: Vec<(f64, f64, usize)> = Vec::with_capacity(len + 1);
    let mut p = OrbitPoint::new(0.0);
    for k in 0..=len {
        let mut y = (k as f64 * alpha).rem_euclid(1.0);
        if y >= 1.0 {
            y -= 1.0;
        }
        nodes.push((p.frac, y, k));
        p = lift.step(p);
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    if nodes[0].2 != 0 {
        return Err(Error::OrbitCollision {
            x: 0.0,
            index: nodes[0].2,
        });
    }
    for w in nodes.windows(2) {
        if w[1].0 - w[0].0 < COLLISION_GAP {
            return Err(Error::OrbitCollision {
                x: w[1].0,
                index: w[0].2.max(w[1].2),
            });
        }
        if w[1].1 <= w[0].1 {
            return Err(Error::InconsistentPairing { alpha, x: w[1].0 });
        }
    }
    let last = nodes[nodes.len() - 1];
    if 1.0 - last.0 < COLLISION_GAP {
        return Err(Error::OrbitCollision {
            x: last.0,
            index: last.2,
        });
    }
    let (xs, ys) = nodes.into_iter().map(|(x, y, _)| (x, y)).unzip();
    MonotoneTable::new(xs, ys)
}

/// `x ↦ I(x)/I(1)` with `I(x) = ∫₀ˣ ds / ∂ₜf_t^q(s, t0)`, tabulated at `len`
/// uniform nodes from a composite trapezoid on `4·len` cells.
pub fn integral_conjugacy(family: &FamilyMap, t0: f64, q: u64, len: usize) -> Result<MonotoneTable> {
    if len == 0 {
        return Err(Error::InvalidInput("table needs at least one node".into()));
    }
    let pm = power_map(family, t0, q)?;
    let cells = 4 * len;
    let h = 1.0 / cells as f64;
    let mut integrand = Vec::with_capacity(cells + 1);
    for j in 0..=cells {
        let x = j as f64 * h;
        let g = pm.dt(x);
        if !(g > 0.0) {
            return Err(Error::NonPositiveIntegrand { x, value: g });
        }
        integrand.push(1.0 / g);
    }
    let cumulative = cumulative_trapezoid(&integrand, h);
    let total = cumulative[cells];
    let xs = (0..len).map(|i| i as f64 / len as f64).collect();
    let ys = (0..len).map(|i| cumulative[4 * i] / total).collect();
    MonotoneTable::new(xs, ys)
}

/// `sup_x d(φ(f(x)), φ(x) + α)` over `samples` uniform points.
pub fn conjugacy_defect(lift: &Lift, table: &MonotoneTable, alpha: f64, samples: usize) -> f64 {
    let m = samples.max(1);
    (0..m)
        .map(|i| {
            let x = i as f64 / m as f64;
            circle_distance(table.eval(lift.eval(x)), table.eval(x) + alpha)
        })
        .fold(0.0, f64::max)
}

/// `sup_x d(a(x), b(x))` over `samples` uniform points.
pub fn c0_distance(a: &MonotoneTable, b: &MonotoneTable, samples: usize) -> f64 {
    let m = samples.max(1);
    (0..m)
        .map(|i| {
            let x = i as f64 / m as f64;
            circle_distance(a.eval(x), b.eval(x))
        })
        .fold(0.0, f64::max)
}
