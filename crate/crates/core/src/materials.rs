//! Layer susceptibilities and the derived quantities V, W and the decay rate mu.
//!
//! Units are nondimensional with eps0 = mu0 = 1.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

fn default_scale() -> f64 {
    TAU
}

/// Linear susceptibility model of one layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Susceptibility {
    /// chi1 = -scale * omega_p^2 / (omega^2 + i gamma omega).
    Drude {
        plasma_frequency: f64,
        damping: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// chi1 = eta.
    Constant { eta: C64 },
    /// chi1 = P(omega) / Q(omega), coefficients in ascending order.
    Rational {
        numerator: Vec<C64>,
        denominator: Vec<C64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialLayer {
    #[serde(flatten)]
    pub chi1: Susceptibility,
    #[serde(default)]
    pub chi3: C64,
}

fn poly(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn dpoly(c: &[C64], z: C64) -> C64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, (n, &a)| acc * z + a * n as f64)
}

fn pole(omega: C64) -> Error {
    Error::Pole {
        re: omega.re,
        im: omega.im,
    }
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl MaterialLayer {
    pub fn drude(plasma_frequency: f64, damping: f64) -> Self {
        Self {
            chi1: Susceptibility::Drude {
                plasma_frequency,
                damping,
                scale: TAU,
            },
            chi3: C64::new(0.0, 0.0),
        }
    }

    pub fn constant(eta: C64) -> Self {
        Self {
            chi1: Susceptibility::Constant { eta },
            chi3: C64::new(0.0, 0.0),
        }
    }

    pub fn with_chi3(mut self, chi3: C64) -> Self {
        self.chi3 = chi3;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match &self.chi1 {
            Susceptibility::Drude {
                plasma_frequency,
                damping,
                scale,
            } => {
                plasma_frequency.is_finite()
                    && *plasma_frequency > 0.0
                    && damping.is_finite()
                    && scale.is_finite()
            }
            Susceptibility::Constant { eta } => finite(*eta),
            Susceptibility::Rational {
                numerator,
                denominator,
            } => {
                !denominator.is_empty()
                    && denominator.iter().any(|c| c.norm() > 0.0)
                    && numerator.iter().chain(denominator).all(|c| finite(*c))
            }
        };
        if !ok || !finite(self.chi3) {
            return Err(Error::InvalidParameter(format!(
                "material parameters must be finite: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn chi1(&self, omega: C64) -> Result<C64> {
        let v = match &self.chi1 {
            Susceptibility::Drude {
                plasma_frequency,
                damping,
                scale,
            } => {
                let den = omega * omega + C64::i() * damping * omega;
                if den.norm() == 0.0 {
                    return Err(pole(omega));
                }
                -scale * plasma_frequency * plasma_frequency / den
            }
            Susceptibility::Constant { eta } => *eta,
            Susceptibility::Rational {
                numerator,
                denominator,
            } => {
                let q = poly(denominator, omega);
                if q.norm() == 0.0 {
                    return Err(pole(omega));
                }
                poly(numerator, omega) / q
            }
        };
        if finite(v) {
            Ok(v)
        } else {
            Err(pole(omega))
        }
    }

    pub fn dchi1(&self, omega: C64) -> Result<C64> {
        let v = match &self.chi1 {
            Susceptibility::Drude {
                plasma_frequency,
                damping,
                scale,
            } => {
                let den = omega * omega + C64::i() * damping * omega;
                if den.norm() == 0.0 {
                    return Err(pole(omega));
                }
                scale * plasma_frequency * plasma_frequency * (2.0 * omega + C64::i() * damping)
                    / (den * den)
            }
            Susceptibility::Constant { .. } => C64::new(0.0, 0.0),
            Susceptibility::Rational {
                numerator,
                denominator,
            } => {
                let q = poly(denominator, omega);
                if q.norm() == 0.0 {
                    return Err(pole(omega));
                }
                let p = poly(numerator, omega);
                (dpoly(numerator, omega) * q - p * dpoly(denominator, omega)) / (q * q)
            }
        };
        if finite(v) {
            Ok(v)
        } else {
            Err(pole(omega))
        }
    }

    /// V(omega) = -omega (1 + chi1(omega)).
    pub fn potential(&self, omega: C64) -> Result<C64> {
        Ok(-omega * (1.0 + self.chi1(omega)?))
    }

    /// dV/domega.
    pub fn dpotential(&self, omega: C64) -> Result<C64> {
        Ok(-(1.0 + self.chi1(omega)?) - omega * self.dchi1(omega)?)
    }

    /// W(omega) = -omega V(omega).
    pub fn w_quantity(&self, omega: C64) -> Result<C64> {
        Ok(-omega * self.potential(omega)?)
    }

    pub fn decay_rate(&self, k: f64, omega: C64) -> Result<C64> {
        decay_rate(k, self.w_quantity(omega)?)
    }

    /// The PT partner of this layer: V(omega) -> conj(V(conj omega)) at real omega.
    pub fn pt_partner(&self) -> Self {
        let chi1 = match &self.chi1 {
            Susceptibility::Drude {
                plasma_frequency,
                damping,
                scale,
            } => Susceptibility::Drude {
                plasma_frequency: *plasma_frequency,
                damping: -damping,
                scale: *scale,
            },
            Susceptibility::Constant { eta } => Susceptibility::Constant { eta: eta.conj() },
            Susceptibility::Rational {
                numerator,
                denominator,
            } => Susceptibility::Rational {
                numerator: numerator.iter().map(|c| c.conj()).collect(),
                denominator: denominator.iter().map(|c| c.conj()).collect(),
            },
        };
        Self {
            chi1,
            chi3: self.chi3.conj(),
        }
    }
}

/// mu = sqrt(k^2 - W) on the principal branch, requiring Re mu > 0.
pub fn decay_rate(k: f64, w: C64) -> Result<C64> {
    let z = C64::new(k * k, 0.0) - w;
    if !finite(z) {
        return Err(Error::InvalidParameter("non-finite k^2 - W".into()));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::NonEvanescent { re: z.re, im: z.im });
    }
    Ok(z.sqrt())
}

/// Piecewise-constant layered medium. Layer j occupies (x_{j-1}, x_j) with
/// x_{-1} = -inf and x_m = +inf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredGeometry {
    pub interfaces: Vec<f64>,
    pub layers: Vec<MaterialLayer>,
}

impl LayeredGeometry {
    pub fn new(interfaces: Vec<f64>, layers: Vec<MaterialLayer>) -> Result<Self> {
        let g = Self { interfaces, layers };
        g.validate()?;
        Ok(g)
    }

    pub fn two_layer(left: MaterialLayer, right: MaterialLayer) -> Self {
        Self {
            interfaces: vec![0.0],
            layers: vec![left, right],
        }
    }

    pub fn sandwich(left: MaterialLayer, core: MaterialLayer, right: MaterialLayer, d: f64) -> Self {
        Self {
            interfaces: vec![0.0, d],
            layers: vec![left, core, right],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.len() != self.interfaces.len() + 1 {
            return Err(Error::Geometry(format!(
                "{} layers need {} interfaces, got {}",
                self.layers.len(),
                self.layers.len().saturating_sub(1),
                self.interfaces.len()
            )));
        }
        if self.interfaces.iter().any(|x| !x.is_finite()) {
            return Err(Error::Geometry("interface positions must be finite".into()));
        }
        if self.interfaces.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Geometry(
                "interfaces must be strictly increasing".into(),
            ));
        }
        for l in &self.layers {
            l.validate()?;
        }
        Ok(())
    }

    pub fn layer_index(&self, x: f64) -> usize {
        self.interfaces.iter().take_while(|&&xi| x > xi).count()
    }

    pub fn layer_at(&self, x: f64) -> &MaterialLayer {
        &self.layers[self.layer_index(x)]
    }

    /// Left and right layers of a two-layer problem with the interface at 0.
    pub fn as_two_layer(&self) -> Result<(&MaterialLayer, &MaterialLayer)> {
        self.validate()?;
        if self.interfaces != [0.0] {
            return Err(Error::Geometry(
                "two-layer problems need a single interface at x = 0".into(),
            ));
        }
        Ok((&self.layers[0], &self.layers[1]))
    }

    /// Outer-left, core, outer-right layers and the width d of a sandwich.
    pub fn as_sandwich(&self) -> Result<(Sandwich, f64)> {
        self.validate()?;
        if self.interfaces.len() != 2 || self.interfaces[0] != 0.0 {
            return Err(Error::Geometry(
                "three-layer problems need interfaces at 0 and d > 0".into(),
            ));
        }
        Ok((
            Sandwich {
                left: self.layers[0].clone(),
                core: self.layers[1].clone(),
                right: self.layers[2].clone(),
            },
            self.interfaces[1],
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    pub left: MaterialLayer,
    pub core: MaterialLayer,
    pub right: MaterialLayer,
}

/// PT symmetry check on real omega: reflection x -> 2c - x must map the
/// geometry onto itself and V(x) onto conj V(2c - x).
pub fn check_pt_symmetry(geometry: &LayeredGeometry, omega: f64, center: f64, tol: f64) -> bool {
    if geometry.validate().is_err() {
        return false;
    }
    let n = geometry.interfaces.len();
    for (i, &x) in geometry.interfaces.iter().enumerate() {
        let mirrored = 2.0 * center - geometry.interfaces[n - 1 - i];
        if (x - mirrored).abs() > tol * (1.0 + x.abs()) {
            return false;
        }
    }
    let w = C64::new(omega, 0.0);
    let m = geometry.layers.len();
    for j in 0..m {
        let a = &geometry.layers[j];
        let b = &geometry.layers[m - 1 - j];
        let (va, vb) = match (a.potential(w), b.potential(w)) {
            (Ok(va), Ok(vb)) => (va, vb),
            _ => return false,
        };
        if (va - vb.conj()).norm() > tol * (1.0 + va.norm()) {
            return false;
        }
        if (a.chi3 - b.chi3.conj()).norm() > tol * (1.0 + a.chi3.norm()) {
            return false;
        }
    }
    true
}
