//! Degree-one lifts of circle maps and one-parameter families of them.
//!
//! Formulas are written once on `[0, 1)`; the wrappers here split off the
//! integer part before evaluating and add it back afterwards, so every map
//! automatically satisfies `f(x + 1) = f(x) + 1`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FamilyFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

const INVERSE_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

/// A point on the real line stored as an integer part plus a fraction in
/// `[0, 1)`.
///
/// Long orbits keep full precision in the fractional part this way, which a
/// plain `f64` loses once the orbit has wrapped around millions of times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitPoint {
    pub whole: f64,
    pub frac: f64,
}

impl OrbitPoint {
    pub fn new(x: f64) -> Self {
        let whole = x.floor();
        Self {
            whole,
            frac: x - whole,
        }
    }

    pub fn value(self) -> f64 {
        self.whole + self.frac
    }

    /// `self - other`, computed without cancellation in the integer parts.
    pub fn displacement_from(self, other: OrbitPoint) -> f64 {
        (self.whole - other.whole) + (self.frac - other.frac)
    }
}

/// A strictly increasing degree-one map of the real line.
#[derive(Clone)]
pub struct Lift {
    map: ScalarFn,
    deriv: Option<ScalarFn>,
    label: String,
}

impl fmt::Debug for Lift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lift")
            .field("label", &self.label)
            .field("has_dx", &self.deriv.is_some())
            .finish()
    }
}

impl Lift {
    /// `map` is only ever called on `[0, 1)`.
    pub fn new(label: impl Into<String>, map: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            map: Arc::new(map),
            deriv: None,
            label: label.into(),
        }
    }

    pub fn with_derivative(mut self, dx: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(dx));
        self
    }

    pub fn identity() -> Self {
        Self::new("identity", |x| x).with_derivative(|_| 1.0)
    }

    pub fn rotation(alpha: f64) -> Self {
        Self::new(format!("rotation({alpha})"), move |x| x + alpha).with_derivative(|_| 1.0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = x.floor();
        (self.map)(x - k) + k
    }

    pub fn dx(&self, x: f64) -> Option<f64> {
        self.deriv.as_ref().map(|d| d(x - x.floor()))
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// One step of the orbit in split representation.
    #[inline]
    pub fn step(&self, p: OrbitPoint) -> OrbitPoint {
        let y = (self.map)(p.frac);
        let k = y.floor();
        OrbitPoint {
            whole: p.whole + k,
            frac: y - k,
        }
    }

    pub fn step_n(&self, mut p: OrbitPoint, n: u64) -> OrbitPoint {
        for _ in 0..n {
            p = self.step(p);
        }
        p
    }

    /// `x ↦ self(x) + shift` for an integer `shift`.
    pub fn shifted(&self, shift: f64) -> Lift {
        let map = self.map.clone();
        let mut out = Lift {
            map: Arc::new(move |x| map(x) + shift),
            deriv: self.deriv.clone(),
            label: format!("{}{:+}", self.label, shift),
        };
        if shift == 0.0 {
            out.label = self.label.clone();
        }
        out
    }

    /// The `q`-th iterate as a lift of its own.
    pub fn power(&self, q: u64) -> Lift {
        let base = self.clone();
        let lift = Lift::new(format!("{}^{q}", self.label), {
            let base = base.clone();
            move |x| base.step_n(OrbitPoint::new(x), q).value()
        });
        if self.has_derivative() {
            lift.with_derivative(move |x| {
                let mut y = x;
                let mut d = 1.0;
                for _ in 0..q {
                    d *= base.dx(y).unwrap_or(f64::NAN);
                    y = base.eval(y);
                }
                d
            })
        } else {
            lift
        }
    }
}

/// `f̃ⁿ(x)`; negative `n` iterates the inverse.
pub fn iterate_lift(lift: &Lift, x: f64, n: i64) -> Result<f64> {
    if n >= 0 {
        return Ok(lift.step_n(OrbitPoint::new(x), n as u64).value());
    }
    let mut y = x;
    for _ in 0..n.unsigned_abs() {
        y = inverse_lift(lift, y)?;
    }
    Ok(y)
}

/// Solves `lift(x) = y` by bracketing, bisection and a Newton polish.
pub fn inverse_lift(lift: &Lift, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::InvalidInput(format!("cannot invert at y = {y}")));
    }
    // The displacement of a degree-one homeomorphism varies by less than one,
    // so the root sits within one unit of y - d(y).
    let guess = y - (lift.eval(y) - y);
    let (mut lo, mut hi) = (guess - 1.0, guess + 1.0);
    let tol = INVERSE_TOL * y.abs().max(1.0);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        x = 0.5 * (lo + hi);
        let r = lift.eval(x) - y;
        if r.abs() <= tol * 1e-2 || hi - lo <= f64::EPSILON * x.abs().max(1.0) {
            break;
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
    }
    if lift.has_derivative() {
        for _ in 0..3 {
            let r = lift.eval(x) - y;
            let d = lift.dx(x).unwrap_or(0.0);
            if r == 0.0 || !(d > 0.0) {
                break;
            }
            let next = x - r / d;
            if !(lo..=hi).contains(&next) {
                break;
            }
            x = next;
        }
    }
    let residual = (lift.eval(x) - y).abs();
    if residual > tol {
        return Err(Error::InversionFailed { y, residual });
    }
    Ok(x)
}

/// `x ↦ x + amp·sin(2πx)`: the sinusoidal conjugacies used by the catalog.
///
/// Monotone exactly when `|2π·amp| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineShift {
    pub amp: f64,
}

impl SineShift {
    pub fn new(amp: f64) -> Self {
        Self { amp }
    }

    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        x + self.amp * (TAU * x).sin()
    }

    #[inline]
    pub fn deriv(self, x: f64) -> f64 {
        1.0 + TAU * self.amp * (TAU * x).cos()
    }

    /// Safeguarded Newton on the bracket `[y - |amp|, y + |amp|]`.
    pub fn inverse(self, y: f64) -> f64 {
        if self.amp == 0.0 {
            return y;
        }
        let a = self.amp.abs();
        let (mut lo, mut hi) = (y - a, y + a);
        let mut x = y - self.amp * (TAU * y).sin();
        for _ in 0..60 {
            let (s, c) = (TAU * x).sin_cos();
            let r = x + self.amp * s - y;
            if r == 0.0 {
                return x;
            }
            if r < 0.0 {
                lo = lo.max(x);
            } else {
                hi = hi.min(x);
            }
            let d = 1.0 + TAU * self.amp * c;
            let mut next = x - r / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return next;
            }
            x = next;
        }
        x
    }

    pub fn to_lift(self) -> Lift {
        Lift::new(format!("sine_shift({})", self.amp), move |x| self.eval(x))
            .with_derivative(move |x| self.deriv(x))
    }
}

/// Parameter range of a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamDomain {
    Interval(f64, f64),
    /// Parameters are read mod 1.
    Circle,
}

impl ParamDomain {
    pub fn contains(&self, t: f64) -> bool {
        match *self {
            ParamDomain::Interval(a, b) => (a..=b).contains(&t),
            ParamDomain::Circle => t.is_finite(),
        }
    }
}

/// A parametrized map `(x, t) ↦ f_t(x)` with its partial derivatives.
#[derive(Clone)]
pub struct FamilyMap {
    label: String,
    eval: FamilyFn,
    dx: FamilyFn,
    dt: FamilyFn,
    t_domain: ParamDomain,
    smoothness: String,
}

impl fmt::Debug for FamilyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyMap")
            .field("label", &self.label)
            .field("t_domain", &self.t_domain)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl FamilyMap {
    /// All three functions are only called with `x ∈ [0, 1)`.
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dt: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
            dx: Arc::new(dx),
            dt: Arc::new(dt),
            t_domain: ParamDomain::Circle,
            smoothness: "C2".into(),
        }
    }

    pub fn with_domain(mut self, domain: ParamDomain) -> Self {
        self.t_domain = domain;
        self
    }

    pub fn with_smoothness(mut self, claim: impl Into<String>) -> Self {
        self.smoothness = claim.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn t_domain(&self) -> ParamDomain {
        self.t_domain
    }

    pub fn smoothness(&self) -> &str {
        &self.smoothness
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let k = x.floor();
        (self.eval)(x - k, t) + k
    }

    pub fn dx(&self, x: f64, t: f64) -> f64 {
        (self.dx)(x - x.floor(), t)
    }

    pub fn dt(&self, x: f64, t: f64) -> f64 {
        (self.dt)(x - x.floor(), t)
    }

    /// The map `f_t` as a standalone lift.
    pub fn at(&self, t: f64) -> Lift {
        let (e, d) = (self.eval.clone(), self.dx.clone());
        Lift::new(format!("{}@{t}", self.label), move |x| e(x, t))
            .with_derivative(move |x| d(x, t))
    }

    /// The family `t ↦ f_t^q`, with partials from the chain rule.
    pub fn power(&self, q: u64) -> FamilyMap {
        assert!(q >= 1, "power of a family needs q >= 1");
        if q == 1 {
            return self.clone();
        }
        let (a, b, c) = (self.clone(), self.clone(), self.clone());
        FamilyMap::new(
            format!("{}^{q}", self.label),
            move |x, t| iterate_with_partials(&a, x, t, q).0,
            move |x, t| iterate_with_partials(&b, x, t, q).1,
            move |x, t| iterate_with_partials(&c, x, t, q).2,
        )
        .with_domain(self.t_domain)
        .with_smoothness(self.smoothness.clone())
    }
}

/// `(f_t^q(x), ∂ₓf_t^q(x), ∂ₜf_t^q(x))`.
///
/// The t-partial follows `∂ₜf^{j+1} = f′(f^j)·∂ₜf^j + ∂ₜf(f^j)`, which unrolls
/// to `Σ_j [∏_{k>j} f′(f^k)]·∂ₜf(f^j)`.
pub fn iterate_with_partials(family: &FamilyMap, x: f64, t: f64, q: u64) -> (f64, f64, f64) {
    let mut y = x;
    let mut dx = 1.0;
    let mut dt = 0.0;
    for _ in 0..q {
        let slope = family.dx(y, t);
        dt = slope * dt + family.dt(y, t);
        dx *= slope;
        y = family.eval(y, t);
    }
    (y, dx, dt)
}

/// The lift of `f_t^q` together with its parameter partial.
#[derive(Clone)]
pub struct PowerMap {
    family: FamilyMap,
    t: f64,
    q: u64,
}

impl PowerMap {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn eval(&self, x: f64) -> f64 {
        iterate_with_partials(&self.family, x, self.t, self.q).0
    }

    pub fn dx(&self, x: f64) -> f64 {
        iterate_with_partials(&self.family, x, self.t, self.q).1
    }

    pub fn dt(&self, x: f64) -> f64 {
        iterate_with_partials(&self.family, x, self.t, self.q).2
    }

    pub fn lift(&self) -> Lift {
        self.family.at(self.t).power(self.q)
    }
}

pub fn power_map(family: &FamilyMap, t: f64, q: u64) -> Result<PowerMap> {
    if q == 0 {
        return Err(Error::InvalidInput("power_map needs q >= 1".into()));
    }
    Ok(PowerMap {
        family: family.clone(),
        t,
        q,
    })
}
