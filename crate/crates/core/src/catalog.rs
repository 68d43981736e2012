//! Named families of circle maps.
//!
//! | name            | `f_t`                                    | params      |
//! |-----------------|------------------------------------------|-------------|
//! | `rotation`      | `x + t`                                  | none        |
//! | `arnold`        | `x + a·sin(2πx) + t`                     | `a`         |
//! | `conj_rotation` | `φ⁻¹ ∘ R_{g(t)} ∘ φ`, `φ = x + c·sin 2πx`, `g(t) = t + β·sin 2πt` | `c`, `beta` |
//! | `dehn`          | `φ_t⁻¹ ∘ R_t ∘ φ_t`, `φ_t = x + c·sin(2πt)·sin(2πx)` | `c` |
//! | `example8`      | `φ_t⁻¹ ∘ R_{ρ(t)} ∘ φ_t`, `φ_t = x + sin(1/t)·sin(2πx)/4π`, `ρ(t) = sign(t)·e^{-1/|t|}` | none |

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::circle_map::{FamilyMap, ParamDomain, SineShift};
use crate::error::{Error, Result};

/// Upper bound (exclusive) on sinusoidal amplitudes that keep a map monotone.
pub const MAX_SINE_AMPLITUDE: f64 = 1.0 / TAU;

pub const CATALOG: [&str; 5] = ["rotation", "arnold", "conj_rotation", "dehn", "example8"];

/// Serializable reference to a catalog family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl FamilySpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn rotation() -> Self {
        Self::new("rotation")
    }

    pub fn arnold(a: f64) -> Self {
        Self::new("arnold").with("a", a)
    }

    pub fn conj_rotation(c: f64, beta: f64) -> Self {
        Self::new("conj_rotation").with("c", c).with("beta", beta)
    }

    pub fn dehn(c: f64) -> Self {
        Self::new("dehn").with("c", c)
    }

    pub fn example8() -> Self {
        Self::new("example8")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("family spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("family spec serializes")
    }

    pub fn declared_params(name: &str) -> Result<&'static [&'static str]> {
        Ok(match name {
            "rotation" | "example8" => &[],
            "arnold" => &["a"],
            "conj_rotation" => &["beta", "c"],
            "dehn" => &["c"],
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }

    fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    /// Checks the name and that `params` holds exactly the declared keys.
    pub fn validate(&self) -> Result<()> {
        let declared = Self::declared_params(&self.name)?;
        for key in declared {
            if !self.params.contains_key(*key) {
                return Err(Error::MissingParameter {
                    family: self.name.clone(),
                    name: key.to_string(),
                });
            }
        }
        for (key, value) in &self.params {
            if !declared.contains(&key.as_str()) {
                return Err(Error::UnexpectedParameter {
                    family: self.name.clone(),
                    name: key.clone(),
                });
            }
            if !value.is_finite() {
                return Err(Error::ParameterOutOfRange {
                    name: key.clone(),
                    value: *value,
                    reason: "must be finite",
                });
            }
        }
        Ok(())
    }

    /// Closed-form conjugacy `φ_t` with `f_t = φ_t⁻¹ ∘ R ∘ φ_t`, when the
    /// family is built that way. Rotations return the identity.
    pub fn closed_form_conjugacy(&self, t: f64) -> Result<Option<SineShift>> {
        self.validate()?;
        Ok(match self.name.as_str() {
            "rotation" => Some(SineShift::new(0.0)),
            "arnold" => None,
            _ => Some(SineShift::new(Profile::from_spec(self)?.amp(t))),
        })
    }

    /// Closed-form rotation number, where one is known.
    pub fn exact_rotation_number(&self, t: f64) -> Result<Option<f64>> {
        self.validate()?;
        Ok(match self.name.as_str() {
            "rotation" => Some(t),
            "arnold" => None,
            _ => Some(Profile::from_spec(self)?.angle(t)),
        })
    }
}

fn amplitude(name: &str, value: f64) -> Result<f64> {
    if !(0.0..MAX_SINE_AMPLITUDE).contains(&value) {
        return Err(Error::ParameterOutOfRange {
            name: name.to_string(),
            value,
            reason: "amplitude must lie in [0, 1/2π) for the map to stay monotone",
        });
    }
    Ok(value)
}

/// `f_t = φ_t⁻¹ ∘ R_{angle(t)} ∘ φ_t` with `φ_t = SineShift(amp(t))`.
#[derive(Debug, Clone, Copy)]
enum Profile {
    /// Fixed φ, rotation angle `t + beta·sin 2πt`.
    Fixed { c: f64, beta: f64 },
    /// φ_t amplitude `c·sin 2πt`, angle `t`.
    Dehn { c: f64 },
    /// Oscillating φ_t and an exponentially flat angle.
    Example8,
}

impl Profile {
    fn from_spec(spec: &FamilySpec) -> Result<Self> {
        Ok(match spec.name.as_str() {
            "conj_rotation" => {
                let c = amplitude("c", spec.param("c"))?;
                let beta = spec.param("beta");
                if !(TAU * beta.abs() < 1.0) {
                    return Err(Error::ParameterOutOfRange {
                        name: "beta".into(),
                        value: beta,
                        reason: "|2π·beta| must be < 1 for g to be monotone",
                    });
                }
                Profile::Fixed { c, beta }
            }
            "dehn" => Profile::Dehn {
                c: amplitude("c", spec.param("c"))?,
            },
            "example8" => Profile::Example8,
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }

    fn amp(self, t: f64) -> f64 {
        match self {
            Profile::Fixed { c, .. } => c,
            Profile::Dehn { c } => c * (TAU * t).sin(),
            Profile::Example8 if t == 0.0 => 0.0,
            Profile::Example8 => (1.0 / t).sin() / (4.0 * PI),
        }
    }

    fn amp_dt(self, t: f64) -> f64 {
        match self {
            Profile::Fixed { .. } => 0.0,
            Profile::Dehn { c } => TAU * c * (TAU * t).cos(),
            Profile::Example8 if t == 0.0 => 0.0,
            Profile::Example8 => -(1.0 / t).cos() / (4.0 * PI * t * t),
        }
    }

    fn angle(self, t: f64) -> f64 {
        match self {
            Profile::Fixed { beta, .. } => t + beta * (TAU * t).sin(),
            Profile::Dehn { .. } => t,
            Profile::Example8 if t == 0.0 => 0.0,
            Profile::Example8 => t.signum() * (-1.0 / t.abs()).exp(),
        }
    }

    fn angle_dt(self, t: f64) -> f64 {
        match self {
            Profile::Fixed { beta, .. } => 1.0 + TAU * beta * (TAU * t).cos(),
            Profile::Dehn { .. } => 1.0,
            Profile::Example8 if t == 0.0 => 0.0,
            Profile::Example8 => {
                let flat = (-1.0 / t.abs()).exp();
                if flat == 0.0 {
                    0.0
                } else {
                    flat / (t * t)
                }
            }
        }
    }

    fn eval(self, x: f64, t: f64) -> f64 {
        let phi = SineShift::new(self.amp(t));
        phi.inverse(phi.eval(x) + self.angle(t))
    }

    fn dx(self, x: f64, t: f64) -> f64 {
        let phi = SineShift::new(self.amp(t));
        let y = phi.inverse(phi.eval(x) + self.angle(t));
        phi.deriv(x) / phi.deriv(y)
    }

    // Differentiating φ_t(f_t(x)) = φ_t(x) + angle(t) in t gives
    // φ_t′(y)·∂ₜy + amp′(t)·s(y) = amp′(t)·s(x) + angle′(t), s = sin 2π·.
    fn dt(self, x: f64, t: f64) -> f64 {
        let phi = SineShift::new(self.amp(t));
        let y = phi.inverse(phi.eval(x) + self.angle(t));
        let ds = (TAU * x).sin() - (TAU * y).sin();
        let shape = if ds == 0.0 { 0.0 } else { self.amp_dt(t) * ds };
        (shape + self.angle_dt(t)) / phi.deriv(y)
    }
}

/// Builds the family named by `spec`.
pub fn catalog(spec: &FamilySpec) -> Result<FamilyMap> {
    spec.validate()?;
    let family = match spec.name.as_str() {
        "rotation" => FamilyMap::new("rotation", |x, t| x + t, |_, _| 1.0, |_, _| 1.0)
            .with_smoothness("analytic"),
        "arnold" => {
            let a = amplitude("a", spec.param("a"))?;
            FamilyMap::new(
                format!("arnold(a={a})"),
                move |x, t| x + a * (TAU * x).sin() + t,
                move |x, _| 1.0 + TAU * a * (TAU * x).cos(),
                |_, _| 1.0,
            )
            .with_smoothness("analytic")
        }
        name => {
            let profile = Arc::new(Profile::from_spec(spec)?);
            let (p1, p2, p3) = (profile.clone(), profile.clone(), profile);
            let label = match *p1 {
                Profile::Fixed { c, beta } => format!("conj_rotation(c={c},beta={beta})"),
                Profile::Dehn { c } => format!("dehn(c={c})"),
                Profile::Example8 => "example8".to_string(),
            };
            let fam = FamilyMap::new(
                label,
                move |x, t| p1.eval(x, t),
                move |x, t| p2.dx(x, t),
                move |x, t| p3.dt(x, t),
            );
            if name == "example8" {
                fam.with_domain(ParamDomain::Interval(-0.5, 0.5))
                    .with_smoothness("C-infinity")
            } else {
                fam.with_smoothness("analytic")
            }
        }
    };
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| i as f64 / (n - 1) as f64)
    }

    fn all_specs() -> Vec<FamilySpec> {
        vec![
            FamilySpec::rotation(),
            FamilySpec::arnold(0.1),
            FamilySpec::arnold(0.15),
            FamilySpec::conj_rotation(0.05, 0.0),
            FamilySpec::conj_rotation(0.05, 0.1),
            FamilySpec::dehn(1.0 / (4.0 * PI)),
            FamilySpec::example8(),
        ]
    }

    fn t_values(spec: &FamilySpec) -> Vec<f64> {
        if spec.name == "example8" {
            // Keep away from t = 0 where the t-partials oscillate violently.
            (0..11).map(|i| -0.45 + 0.09 * i as f64).filter(|t| t.abs() > 0.05).collect()
        } else {
            (0..11).map(|i| -0.5 + 0.1 * i as f64).collect()
        }
    }

    #[test]
    fn catalog_values() {
        let rot = catalog(&FamilySpec::rotation()).unwrap();
        assert!((rot.eval(0.2, 0.3) - 0.5).abs() < 1e-15);
        let arn = catalog(&FamilySpec::arnold(0.1)).unwrap();
        assert!((arn.eval(0.25, 0.0) - 0.35).abs() < 1e-15);
    }

    #[test]
    fn degree_one_on_grid() {
        for spec in all_specs() {
            let fam = catalog(&spec).unwrap();
            for t in t_values(&spec) {
                for x in grid(101) {
                    let d = fam.eval(x + 1.0, t) - fam.eval(x, t) - 1.0;
                    assert!(d.abs() <= 1e-12, "{} t={t} x={x}: {d:e}", spec.name);
                }
            }
        }
    }

    #[test]
    fn strictly_increasing_on_grid() {
        for spec in all_specs() {
            let fam = catalog(&spec).unwrap();
            for t in t_values(&spec) {
                let vals: Vec<f64> = grid(101).map(|x| fam.eval(x, t)).collect();
                assert!(vals.windows(2).all(|w| w[0] < w[1]), "{} t={t}", spec.name);
                assert!(grid(101).all(|x| fam.dx(x, t) > 0.0));
            }
        }
    }

    #[test]
    fn partials_match_central_differences() {
        let h = 1e-6;
        for spec in all_specs() {
            let fam = catalog(&spec).unwrap();
            for t in t_values(&spec) {
                for x in grid(101) {
                    let fdx = (fam.eval(x + h, t) - fam.eval(x - h, t)) / (2.0 * h);
                    let fdt = (fam.eval(x, t + h) - fam.eval(x, t - h)) / (2.0 * h);
                    assert!((fam.dx(x, t) - fdx).abs() <= 1e-6, "{} dx t={t} x={x}", spec.name);
                    assert!(
                        (fam.dt(x, t) - fdt).abs() <= 1e-6,
                        "{} dt t={t} x={x}: {} vs {fdt}",
                        spec.name,
                        fam.dt(x, t)
                    );
                }
            }
        }
    }

    #[test]
    fn closed_forms_conjugate() {
        for spec in all_specs().into_iter().filter(|s| s.name != "arnold") {
            let fam = catalog(&spec).unwrap();
            for t in t_values(&spec) {
                let phi = spec.closed_form_conjugacy(t).unwrap().unwrap();
                let angle = spec.exact_rotation_number(t).unwrap().unwrap();
                for x in grid(21) {
                    let lhs = phi.eval(fam.eval(x, t));
                    assert!((lhs - phi.eval(x) - angle).abs() < 1e-12, "{}", spec.name);
                }
            }
        }
    }

    #[test]
    fn example8_is_identity_at_zero() {
        let fam = catalog(&FamilySpec::example8()).unwrap();
        for x in grid(11) {
            assert_eq!(fam.eval(x, 0.0), x);
            assert_eq!(fam.dt(x, 0.0), 0.0);
            assert!(fam.dt(x, 1e-3).is_finite());
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            catalog(&FamilySpec::new("logistic")),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            catalog(&FamilySpec::arnold(0.2)),
            Err(Error::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            catalog(&FamilySpec::new("arnold")),
            Err(Error::MissingParameter { .. })
        ));
        assert!(matches!(
            catalog(&FamilySpec::rotation().with("a", 0.1)),
            Err(Error::UnexpectedParameter { .. })
        ));
        assert!(catalog(&FamilySpec::conj_rotation(0.05, 0.2)).is_err());
        assert!(catalog(&FamilySpec::dehn(-0.01)).is_err());
    }

    #[test]
    fn json_wire_format() {
        let spec = FamilySpec::arnold(0.1);
        assert_eq!(spec.to_json(), r#"{"name":"arnold","params":{"a":0.1}}"#);
        assert_eq!(FamilySpec::from_json(&spec.to_json()).unwrap(), spec);
        let bare = FamilySpec::from_json(r#"{"name":"rotation"}"#).unwrap();
        assert_eq!(bare, FamilySpec::rotation());
        assert!(FamilySpec::from_json("{").is_err());
    }
}
