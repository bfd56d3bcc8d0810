//! Catalog of solvable two-state classes and their basic models `(U*(z), δ*_z(z))`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heun::HeunFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Base,
    Derivative,
}

/// Identifies a class. Base exponents are stored doubled so that
/// half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassId {
    Double { twice_k: i32 },
    Bi { twice_k: i32 },
    Tri,
    TriDerivative,
    BiDerivative,
    DoubleDerivative,
}

pub const DOUBLE_TWICE_K: [i32; 5] = [-4, -3, -2, -1, 0];
pub const BI_TWICE_K: [i32; 5] = [-2, -1, 0, 1, 2];

impl ClassId {
    pub fn double(k: f64) -> Result<Self> {
        let id = ClassId::Double { twice_k: twice(k)? };
        id.validate()?;
        Ok(id)
    }

    pub fn bi(k: f64) -> Result<Self> {
        let id = ClassId::Bi { twice_k: twice(k)? };
        id.validate()?;
        Ok(id)
    }

    pub fn validate(self) -> Result<()> {
        match self {
            ClassId::Double { twice_k } if !DOUBLE_TWICE_K.contains(&twice_k) => Err(Error::InvalidInput(format!(
                "k = {} is not admissible for the double-confluent classes: Q(z) = U0*^2 z^(2k+4) must have degree 0..4",
                fmt_half(twice_k)
            ))),
            ClassId::Bi { twice_k } if !BI_TWICE_K.contains(&twice_k) => Err(Error::InvalidInput(format!(
                "k = {} is not admissible for the bi-confluent classes: Q(z) = U0*^2 z^(2k+2) must have degree 0..4",
                fmt_half(twice_k)
            ))),
            _ => Ok(()),
        }
    }

    pub fn family(self) -> HeunFamily {
        match self {
            ClassId::Double { .. } | ClassId::DoubleDerivative => HeunFamily::Double,
            ClassId::Bi { .. } | ClassId::BiDerivative => HeunFamily::Bi,
            ClassId::Tri | ClassId::TriDerivative => HeunFamily::Tri,
        }
    }

    pub fn kind(self) -> ClassKind {
        match self {
            ClassId::Double { .. } | ClassId::Bi { .. } | ClassId::Tri => ClassKind::Base,
            _ => ClassKind::Derivative,
        }
    }

    pub fn k(self) -> Option<f64> {
        match self {
            ClassId::Double { twice_k } | ClassId::Bi { twice_k } => Some(twice_k as f64 / 2.0),
            ClassId::Tri => Some(0.0),
            _ => None,
        }
    }

    /// Degree of `Q(z) = U0*² z^(2k+4)` (double) or `U0*² z^(2k+2)` (bi).
    pub fn q_degree(self) -> Option<i32> {
        match self {
            ClassId::Double { twice_k } => Some(twice_k + 4),
            ClassId::Bi { twice_k } => Some(twice_k + 2),
            _ => None,
        }
    }

    pub fn parameter_count(self) -> usize {
        match self {
            ClassId::TriDerivative | ClassId::DoubleDerivative => 3,
            _ => 4,
        }
    }

    /// Human-readable form of `U*(z)/U0*`.
    pub fn amplitude_shape(self) -> &'static str {
        match self {
            ClassId::Double { twice_k: -4 } => "1/z^2",
            ClassId::Double { twice_k: -3 } => "1/(z sqrt(z))",
            ClassId::Double { twice_k: -2 } | ClassId::Bi { twice_k: -2 } => "1/z",
            ClassId::Double { twice_k: -1 } | ClassId::Bi { twice_k: -1 } => "1/sqrt(z)",
            ClassId::Double { .. } | ClassId::Tri => "1",
            ClassId::Bi { twice_k: 0 } => "1",
            ClassId::Bi { twice_k: 1 } => "sqrt(z)",
            ClassId::Bi { .. } => "z",
            ClassId::TriDerivative => "z",
            ClassId::BiDerivative => "(z - z0)/z",
            ClassId::DoubleDerivative => "(z - z0)/z^2",
        }
    }

    pub fn detuning_shape(self) -> &'static str {
        match self.family() {
            HeunFamily::Double => "d2/z^2 + d1/z + d0",
            HeunFamily::Bi => "d1/z + d0 + d2 z",
            HeunFamily::Tri => "d0 + d1 z + d2 z^2",
        }
    }

    /// One-line label such as `double k=-1 (4-parametric)`.
    pub fn label(self) -> String {
        let head = match self {
            ClassId::Double { twice_k } => format!("double k={}", fmt_half(twice_k)),
            ClassId::Bi { twice_k } => format!("bi k={}", fmt_half(twice_k)),
            other => other.to_string(),
        };
        format!("{head} ({}-parametric)", self.parameter_count())
    }
}

fn twice(k: f64) -> Result<i32> {
    let t = 2.0 * k;
    if (t - t.round()).abs() > 1e-12 || !t.is_finite() {
        return Err(Error::InvalidInput(format!("k = {k} is not a half-integer")));
    }
    Ok(t.round() as i32)
}

fn fmt_half(twice_k: i32) -> String {
    if twice_k % 2 == 0 {
        format!("{}", twice_k / 2)
    } else {
        format!("{twice_k}/2")
    }
}

fn parse_k(s: &str) -> Result<i32> {
    let bad = || Error::InvalidInput(format!("cannot parse k = '{s}'"));
    if let Some((num, den)) = s.split_once('/') {
        let n: i32 = num.trim().parse().map_err(|_| bad())?;
        let d: i32 = den.trim().parse().map_err(|_| bad())?;
        match d {
            1 => Ok(2 * n),
            2 => Ok(n),
            _ => Err(bad()),
        }
    } else {
        let k: f64 = s.trim().parse().map_err(|_| bad())?;
        twice(k)
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::Double { twice_k } => write!(f, "double:k={}", fmt_half(*twice_k)),
            ClassId::Bi { twice_k } => write!(f, "bi:k={}", fmt_half(*twice_k)),
            ClassId::Tri => f.write_str("tri"),
            ClassId::TriDerivative => f.write_str("tri-derivative"),
            ClassId::BiDerivative => f.write_str("bi-derivative"),
            ClassId::DoubleDerivative => f.write_str("double-derivative"),
        }
    }
}

impl FromStr for ClassId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let id = match s {
            "tri" => ClassId::Tri,
            "tri-derivative" => ClassId::TriDerivative,
            "bi-derivative" => ClassId::BiDerivative,
            "double-derivative" => ClassId::DoubleDerivative,
            _ => {
                let (fam, rest) = s
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidInput(format!("unknown class id '{s}'")))?;
                let k = rest
                    .strip_prefix("k=")
                    .ok_or_else(|| Error::InvalidInput(format!("class id '{s}' needs a 'k=' part")))?;
                match fam {
                    "double" => ClassId::Double { twice_k: parse_k(k)? },
                    "bi" => ClassId::Bi { twice_k: parse_k(k)? },
                    _ => return Err(Error::InvalidInput(format!("unknown class family '{fam}'"))),
                }
            }
        };
        id.validate()?;
        Ok(id)
    }
}

impl Serialize for ClassId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Catalog entry describing one class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassTemplate {
    pub id: ClassId,
    pub family: HeunFamily,
    pub kind: ClassKind,
    pub k: Option<f64>,
    pub parameter_count: usize,
    pub amplitude: String,
    pub detuning: String,
}

/// All fourteen classes: five double, five bi, one tri and three derivative classes.
pub fn enumerate_classes() -> Vec<ClassTemplate> {
    let mut ids: Vec<ClassId> = DOUBLE_TWICE_K.iter().map(|&t| ClassId::Double { twice_k: t }).collect();
    ids.extend(BI_TWICE_K.iter().map(|&t| ClassId::Bi { twice_k: t }));
    ids.extend([ClassId::Tri, ClassId::TriDerivative, ClassId::BiDerivative, ClassId::DoubleDerivative]);
    ids.into_iter()
        .map(|id| ClassTemplate {
            id,
            family: id.family(),
            kind: id.kind(),
            k: id.k(),
            parameter_count: id.parameter_count(),
            amplitude: format!("U*/U0* = {}", id.amplitude_shape()),
            detuning: format!("delta*_z = {}", id.detuning_shape()),
        })
        .collect()
}

/// Sum `Σ c_p z^p` with real, possibly fractional, exponents.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSum {
    pub terms: Vec<(Complex64, f64)>,
}

impl PowerSum {
    pub fn new(terms: Vec<(Complex64, f64)>) -> Self {
        PowerSum { terms }
    }
}

/// A concrete class member: amplitude scale and detuning coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelClass {
    pub id: ClassId,
    pub u0star: Complex64,
    pub d0: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    /// Extra point `z0` of the bi- and double-derivative classes.
    pub z0: Option<Complex64>,
}

fn sqrt_branch(x: Complex64) -> Complex64 {
    x.sqrt()
}

impl ModelClass {
    /// Base class with free `U0*`.
    pub fn base(id: ClassId, u0star: Complex64, d0: Complex64, d1: Complex64, d2: Complex64) -> Result<Self> {
        id.validate()?;
        if id.kind() != ClassKind::Base {
            return Err(Error::InvalidInput(format!("{id} is a derivative class; use its dedicated constructor")));
        }
        Ok(ModelClass { id, u0star, d0, d1, d2, z0: None })
    }

    /// Tri-derivative class with `U0* = sqrt(−δ0 δ2)`.
    pub fn tri_derivative(d0: Complex64, d1: Complex64, d2: Complex64) -> Self {
        ModelClass {
            id: ClassId::TriDerivative,
            u0star: sqrt_branch(-d0 * d2),
            d0,
            d1,
            d2,
            z0: None,
        }
    }

    /// Bi-derivative class; `U0*` follows from `σ`, `α` and `ε`.
    pub fn bi_derivative(d0: Complex64, d1: Complex64, d2: Complex64, z0: Complex64) -> Result<Self> {
        if z0.norm() == 0.0 {
            return Err(Error::InvalidInput("z0 must be nonzero for the bi-derivative class".into()));
        }
        let m = ModelClass {
            id: ClassId::BiDerivative,
            u0star: Complex64::new(0.0, 0.0),
            d0,
            d1,
            d2,
            z0: Some(z0),
        };
        Ok(ModelClass { u0star: sqrt_branch(m.required_u0star_sq().expect("derivative class")), ..m })
    }

    /// Double-derivative class with `z0 = −δ1/(2δ0)` and `U0*² = −εσ`.
    pub fn double_derivative(d0: Complex64, d1: Complex64, d2: Complex64) -> Result<Self> {
        if d0.norm() == 0.0 {
            return Err(Error::InvalidInput("delta0 must be nonzero for the double-derivative class".into()));
        }
        let m = ModelClass {
            id: ClassId::DoubleDerivative,
            u0star: Complex64::new(0.0, 0.0),
            d0,
            d1,
            d2,
            z0: Some(-d1 / (2.0 * d0)),
        };
        Ok(ModelClass { u0star: sqrt_branch(m.required_u0star_sq().expect("derivative class")), ..m })
    }

    pub fn family(&self) -> HeunFamily {
        self.id.family()
    }

    /// `σ` of the bi- and double-derivative prefactors.
    pub fn sigma(&self) -> Option<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        match self.id {
            ClassId::BiDerivative => {
                let z0 = self.z0?;
                Some(i * (self.d1 + self.d0 * z0 + self.d2 * z0 * z0))
            }
            ClassId::DoubleDerivative => Some(i * (self.d2 - self.d1 * self.d1 / (4.0 * self.d0))),
            _ => None,
        }
    }

    /// The value `U0*²` is tied to in the derivative classes.
    pub fn required_u0star_sq(&self) -> Option<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        match self.id {
            ClassId::TriDerivative => Some(-self.d0 * self.d2),
            ClassId::BiDerivative => {
                let z0 = self.z0?;
                let sigma = self.sigma()?;
                let eps = -i * self.d2;
                let alpha = i * self.d2 * (1.0 - 2.0 * sigma) - i * self.d0 * sigma / z0;
                Some(alpha + eps - eps * sigma)
            }
            ClassId::DoubleDerivative => {
                let eps = -i * self.d0;
                Some(-eps * self.sigma()?)
            }
            _ => None,
        }
    }

    /// `U*(z)` as a power sum.
    pub fn amplitude_terms(&self) -> PowerSum {
        let u = self.u0star;
        let z0 = self.z0.unwrap_or_default();
        PowerSum::new(match self.id {
            ClassId::Double { twice_k } | ClassId::Bi { twice_k } => vec![(u, twice_k as f64 / 2.0)],
            ClassId::Tri => vec![(u, 0.0)],
            ClassId::TriDerivative => vec![(u, 1.0)],
            ClassId::BiDerivative => vec![(u, 0.0), (-u * z0, -1.0)],
            ClassId::DoubleDerivative => vec![(u, -1.0), (-u * z0, -2.0)],
        })
    }

    /// `δ*_z(z)` as a power sum.
    pub fn detuning_terms(&self) -> PowerSum {
        PowerSum::new(match self.family() {
            HeunFamily::Double => vec![(self.d2, -2.0), (self.d1, -1.0), (self.d0, 0.0)],
            HeunFamily::Bi => vec![(self.d1, -1.0), (self.d0, 0.0), (self.d2, 1.0)],
            HeunFamily::Tri => vec![(self.d0, 0.0), (self.d1, 1.0), (self.d2, 2.0)],
        })
    }

    /// Coefficient `Q_j` of `z^j` in `Q(z)` for base double and bi classes.
    pub fn q_coeff(&self, j: i32) -> Complex64 {
        match self.id.q_degree() {
            Some(d) if d == j => self.u0star * self.u0star,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn describe(&self) -> String {
        let mut s = format!(
            "{} with U0* = {}, delta0 = {}, delta1 = {}, delta2 = {}",
            self.id, self.u0star, self.d0, self.d1, self.d2
        );
        if let Some(z0) = self.z0 {
            s.push_str(&format!(", z0 = {z0}"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_templates() {
        let all = enumerate_classes();
        assert_eq!(all.len(), 14);
        let labels: Vec<String> = all.iter().map(|t| t.id.label()).collect();
        assert!(labels.contains(&"double k=-1 (4-parametric)".to_string()));
        assert!(labels.contains(&"bi k=1/2 (4-parametric)".to_string()));
        assert!(labels.contains(&"tri-derivative (3-parametric)".to_string()));
        assert!(labels.contains(&"bi-derivative (4-parametric)".to_string()));
        assert!(labels.contains(&"double-derivative (3-parametric)".to_string()));
    }

    #[test]
    fn id_round_trip() {
        for t in enumerate_classes() {
            let s = t.id.to_string();
            assert_eq!(s.parse::<ClassId>().unwrap(), t.id, "{s}");
        }
        assert!("double:k=1".parse::<ClassId>().is_err());
        assert!("bi:k=-3/2".parse::<ClassId>().is_err());
        assert!("quad".parse::<ClassId>().is_err());
        assert_eq!("double:k=-1.5".parse::<ClassId>().unwrap(), ClassId::Double { twice_k: -3 });
    }
}
