use super::OracleError;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use std::f64::consts::PI;
use std::str::FromStr;

/// Catalog of closed-form solutions of `u_t − u_xx = f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExactName {
    /// `(1+4t)^{-1/2} e^{−x²/(1+4t)}`.
    GaussianIVP,
    /// `erfc(x/(2√t))`.
    Erfc,
    /// `e^{−(nπ/ℓ)²t} sin(nπx/ℓ)`.
    EigenDecay,
    /// `a + (b−a)x/ℓ`.
    SteadyLinear,
    /// `(1−e^{−t}) e^{−x²}`, the only entry with nonzero forcing.
    ManufacturedForced,
}

impl ExactName {
    pub const ALL: [ExactName; 5] = [
        ExactName::GaussianIVP,
        ExactName::Erfc,
        ExactName::EigenDecay,
        ExactName::SteadyLinear,
        ExactName::ManufacturedForced,
    ];
}

impl FromStr for ExactName {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExactName::ALL
            .into_iter()
            .find(|n| format!("{n:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| OracleError::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactParams {
    pub n: u32,
    pub ell: f64,
    pub a: f64,
    pub b: f64,
    /// Overall amplitude.
    pub scale: f64,
}

impl Default for ExactParams {
    fn default() -> Self {
        Self { n: 1, ell: 1.0, a: 0.0, b: 1.0, scale: 1.0 }
    }
}

pub fn exact_solution(name: ExactName, params: &ExactParams, x: f64, t: f64) -> f64 {
    let v = match name {
        ExactName::GaussianIVP => {
            let w = 1.0 + 4.0 * t;
            (-x * x / w).exp() / w.sqrt()
        }
        ExactName::Erfc => {
            if t > 0.0 {
                erfc(x / (2.0 * t.sqrt()))
            } else if x == 0.0 {
                1.0
            } else {
                0.0
            }
        }
        ExactName::EigenDecay => {
            let k = params.n as f64 * PI / params.ell;
            (-k * k * t).exp() * (k * x).sin()
        }
        ExactName::SteadyLinear => params.a + (params.b - params.a) * x / params.ell,
        ExactName::ManufacturedForced => (1.0 - (-t).exp()) * (-x * x).exp(),
    };
    params.scale * v
}

/// `u_t − u_xx` of the catalog entry.
pub fn exact_forcing(name: ExactName, params: &ExactParams, x: f64, t: f64) -> f64 {
    match name {
        ExactName::ManufacturedForced => {
            let g = (-x * x).exp();
            params.scale * ((-t).exp() * g - (1.0 - (-t).exp()) * (4.0 * x * x - 2.0) * g)
        }
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values() {
        let p = ExactParams::default();
        assert!((exact_solution(ExactName::Erfc, &p, 1.0, 0.25) - 0.15730).abs() < 5e-6);
        let eigen = exact_solution(ExactName::EigenDecay, &p, 0.5, 0.1);
        assert!((eigen - (-PI * PI / 10.0).exp()).abs() < 1e-15);
        assert!((eigen - 0.37273).abs() < 5e-5);
        assert_eq!(exact_solution(ExactName::SteadyLinear, &p, 0.3, 0.7), 0.3);
        assert_eq!("erfc".parse::<ExactName>().unwrap(), ExactName::Erfc);
        assert!(matches!("Airy".parse::<ExactName>(), Err(OracleError::UnknownName(_))));
    }

    /// Second differences of each entry satisfy the equation to O(h²).
    #[test]
    fn fixtures_satisfy_their_equation() {
        let p = ExactParams { n: 2, ell: 1.5, a: 0.3, b: -1.0, scale: 1.0 };
        for name in ExactName::ALL {
            let (x, t) = (0.37, 0.21);
            let residual = |h: f64| {
                let u = |x: f64, t: f64| exact_solution(name, &p, x, t);
                let ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
                let uxx = (u(x + h, t) - 2.0 * u(x, t) + u(x - h, t)) / (h * h);
                (ut - uxx - exact_forcing(name, &p, x, t)).abs()
            };
            let (coarse, fine) = (residual(1e-2), residual(5e-3));
            assert!(coarse < 1e-2, "{name:?}: {coarse}");
            assert!(fine <= coarse / 3.0 || fine < 1e-9, "{name:?}: {coarse} -> {fine}");
        }
    }
}
