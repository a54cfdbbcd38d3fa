//! Spectral transforms of sampled data and the extension operators.

use crate::norms::{self, Span};
use crate::problem::{Regime, SobolevIndex};
use crate::sampled::{Piecewise, Sampled};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible exponent in `e^{ksq t}`.
pub const OVERFLOW_EXPONENT: f64 = 700.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("kernel e^(-ikx) at k = {k} grows faster than the profile decays")]
    DivergentKernel { k: Complex64 },
    #[error("e^(ksq t) overflows: Re(ksq) T = {0}")]
    OverflowGuard(f64),
    #[error("profile is sampled on [{start}, {end}], expected [0, {expected}]")]
    DomainMismatch { start: f64, end: f64, expected: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub k: Complex64,
    pub value: Complex64,
}

/// `∫_0^L e^{-ikx} u0(x) dx` over the truncated profile.
pub fn half_line_fourier(u0: &Sampled, k: Complex64) -> Result<Complex64, TransformError> {
    let growth = k.im * u0.end();
    if k.im > 0.0 && (growth > OVERFLOW_EXPONENT || growth.exp() * u0.last().abs() > 1.0) {
        return Err(TransformError::DivergentKernel { k });
    }
    Ok(u0.exp_integral(Complex64::new(0.0, -1.0) * k))
}

/// `∫_0^ℓ e^{-ikx} u0(x) dx`, entire in `k`.
pub fn interval_fourier(u0: &Sampled, ell: f64, k: Complex64) -> Result<Complex64, TransformError> {
    if u0.start() != 0.0 || (u0.end() - ell).abs() > 1e-9 * ell.max(1.0) {
        return Err(TransformError::DomainMismatch {
            start: u0.start(),
            end: u0.end(),
            expected: ell,
        });
    }
    Ok(u0.exp_integral(Complex64::new(0.0, -1.0) * k))
}

/// `∫_0^{T_upper} e^{ksq t} g(t) dt`, with `g` taken as zero past its last sample.
pub fn time_transform(g: &Sampled, ksq: Complex64, t_upper: f64) -> Result<Complex64, TransformError> {
    let exponent = ksq.re * t_upper;
    if exponent > OVERFLOW_EXPONENT {
        return Err(TransformError::OverflowGuard(exponent));
    }
    Ok(crate::sampled::PanelCubic::new(g.clone()).exp_integral_upto(ksq, t_upper))
}

fn psi(r: f64) -> f64 {
    if r > 0.0 {
        (-1.0 / r).exp()
    } else {
        0.0
    }
}

/// C^∞ cutoff: 1 on `|t| ≤ 1`, 0 on `|t| ≥ 2`, decreasing in between.
pub fn smooth_cutoff(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let up = psi(2.0 - a);
    up / (up + psi(a - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtensionMethod {
    EvenReflection,
    ZeroExtension,
    CutoffReflection,
}

/// An extended datum together with the original it came from.
#[derive(Debug, Clone)]
pub struct ExtensionRecord {
    pub original: Sampled,
    pub extended: Piecewise,
    pub method: ExtensionMethod,
    /// Extended norm over original norm; 1 for the zero datum.
    pub norm_ratio: f64,
    /// Open support for boundary extensions; `None` for whole-line profiles.
    pub support: Option<(f64, f64)>,
}

impl ExtensionRecord {
    /// Value of the extended datum, zero outside the declared open support.
    pub fn value(&self, t: f64) -> f64 {
        if let Some((a, b)) = self.support {
            if t <= a || t >= b {
                return 0.0;
            }
        }
        self.extended.eval(t)
    }
}

/// Even reflection `U0(x) = u0(|x|)` of a half-line profile.
pub fn extend_initial_datum(u0: &Sampled, s: &SobolevIndex) -> ExtensionRecord {
    let extended = even_reflection(u0);
    let norm_ratio = ratio(
        norms::hs_norm_line(&extended, s.s).map(|r| r.value),
        norms::hs_norm_physical(u0, s.s, Span::HalfLine).map(|r| r.value),
    );
    ExtensionRecord {
        original: u0.clone(),
        extended,
        method: ExtensionMethod::EvenReflection,
        norm_ratio,
        support: None,
    }
}

fn ratio<E>(num: Result<f64, E>, den: Result<f64, E>) -> f64 {
    match (num, den) {
        (Ok(n), Ok(d)) if d > 0.0 => n / d,
        (Ok(_), Ok(_)) => 1.0,
        _ => f64::NAN,
    }
}

/// `[u0(-x) on [-L, 0], u0 on [0, L]]`.
pub fn even_reflection(u0: &Sampled) -> Piecewise {
    debug_assert_eq!(u0.start(), 0.0);
    Piecewise::new(vec![u0.reflected(0.0), u0.clone()]).expect("reflection segments are ordered")
}

/// Extension of an interval profile to the whole line: reflection about `ell`,
/// the cutoff `θ(x/ℓ)` on `[ℓ, 2ℓ]`, then even reflection about 0.
pub fn extend_interval_datum(u0: &Sampled, ell: f64) -> Piecewise {
    let right = u0
        .reflected(2.0 * ell)
        .abscissae()
        .into_iter()
        .zip(u0.values().iter().rev())
        .map(|(x, &v)| v * smooth_cutoff(x / ell))
        .collect::<Vec<_>>();
    let right = Sampled::new(ell, u0.step(), right).expect("cutoff keeps samples finite");
    let segments = vec![
        right.reflected(0.0),
        u0.reflected(0.0),
        u0.clone(),
        right,
    ];
    Piecewise::new(segments).expect("extension segments are ordered")
}

/// Extension of a boundary signal to a datum supported in `(0, 2)`.
///
/// Rough data are extended by zero past `T`. Smooth data use `θ·E` with `E`
/// the even `2T`-periodic reflection of `g0|[0,T]`.
pub fn extend_boundary_datum(g0: &Sampled, s: &SobolevIndex, horizon: f64) -> ExtensionRecord {
    let base = restrict(g0, horizon);
    let (extended, method) = match s.regime {
        Regime::Rough => (Piecewise::single(base.clone()), ExtensionMethod::ZeroExtension),
        Regime::Smooth => (periodic_cutoff(&base, horizon), ExtensionMethod::CutoffReflection),
    };
    let norm_ratio = ratio(
        norms::hs_norm_line(&extended, s.m).map(|r| r.value),
        norms::ht_norm(&base, s.m).map(|r| r.value),
    );
    ExtensionRecord {
        original: g0.clone(),
        extended,
        method,
        norm_ratio,
        support: Some((0.0, 2.0)),
    }
}

/// Samples of `g` on `[start, upper]`, resampled at the same step when `upper`
/// falls between samples.
pub fn restrict(g: &Sampled, upper: f64) -> Sampled {
    if g.end() <= upper * (1.0 + 1e-12) {
        return g.clone();
    }
    let span = upper - g.start();
    let n = ((span / g.step()) - 1e-9).ceil().max(1.0) as usize;
    Sampled::from_fn(g.start(), upper, n, |t| g.eval(t))
}

fn periodic_cutoff(base: &Sampled, horizon: f64) -> Piecewise {
    let mut segments = Vec::new();
    let mut left = 0.0;
    let mut forward = true;
    while left < 2.0 - 1e-12 {
        let piece = if forward {
            Sampled::new(left, base.step(), base.values().to_vec())
        } else {
            Sampled::new(left, base.step(), base.values().iter().rev().copied().collect())
        }
        .expect("shifted samples stay finite");
        let piece = if piece.end() > 2.0 {
            let n = (((2.0 - left) / base.step()) - 1e-9).ceil().max(1.0) as usize;
            Sampled::from_fn(left, 2.0, n, |t| piece.eval(t))
        } else {
            piece
        };
        let cut: Vec<f64> = piece
            .abscissae()
            .iter()
            .zip(piece.values())
            .map(|(&t, &v)| v * smooth_cutoff(t))
            .collect();
        segments.push(Sampled::new(piece.start(), piece.step(), cut).expect("finite"));
        left += horizon;
        forward = !forward;
    }
    Piecewise::new(segments).expect("periodic segments are ordered")
}

/// Extension of a forcing slice on `(0, ∞)` or `(0, ℓ)` to the whole line.
pub fn extend_forcing_slice(slice: &Sampled, regime: Regime, interval: Option<f64>) -> Piecewise {
    match (interval, regime) {
        (Some(ell), Regime::Smooth) => extend_interval_datum(slice, ell),
        (None, Regime::Smooth) => even_reflection(slice),
        (_, Regime::Rough) => Piecewise::single(slice.clone()),
    }
}
