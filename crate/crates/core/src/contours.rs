//! Rays of ∂D⁺, quadrature node sets on them and truncation radii.

use crate::quadrature::{gauss_legendre, RealRule};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use thiserror::Error;

/// `a = e^{iπ/4}`.
pub const A: Complex64 = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
/// `a³ = e^{3iπ/4}`.
pub const A3: Complex64 = Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);

/// Smallest radius `choose_truncation` returns.
pub const R_MIN: f64 = 1.0;
/// Largest radius `choose_truncation` returns.
pub const R_MAX: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContourError {
    #[error("no spatial decay and a non-decaying envelope: capped at R = {0:e}")]
    NoDecay(Truncation),
}

/// A ray `{r e^{i angle}: r ≥ 0}` traversed in `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub angle: f64,
    /// Unit tangent in the direction of traversal.
    pub direction: Complex64,
}

impl Ray {
    pub fn outgoing(angle: f64) -> Self {
        Self {
            angle,
            direction: Complex64::from_polar(1.0, angle),
        }
    }

    pub fn incoming(angle: f64) -> Self {
        Self {
            angle,
            direction: -Complex64::from_polar(1.0, angle),
        }
    }

    pub fn point(&self, r: f64) -> Complex64 {
        Complex64::from_polar(r, self.angle)
    }
}

/// Nodes and weights on one or more rays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourNodeSet {
    pub rays: Vec<Ray>,
    pub nodes: Vec<Complex64>,
    /// Weights including the direction of traversal.
    pub weights: Vec<Complex64>,
    /// Index into `rays` for every node.
    pub ray_of: Vec<usize>,
    /// `k²` at every node.
    pub ksq: Vec<Complex64>,
    pub truncation_radius: f64,
    pub error_estimate: f64,
}

impl ContourNodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w f(k)` over all nodes.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&k, &w)| w * f(k))
            .sum()
    }

    /// Sum of the weights that belong to one ray.
    pub fn ray_weight_sum(&self, ray: usize) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.ray_of)
            .filter(|(_, &r)| r == ray)
            .map(|(w, _)| *w)
            .sum()
    }
}

/// Places a real rule on `[0, R]` onto both rays of ∂D⁺: inward along the
/// `a³` ray, then outward along the `a` ray.
pub fn dplus_from_rule(rule: &RealRule, radius: f64, error_estimate: f64) -> ContourNodeSet {
    let rays = vec![Ray::incoming(3.0 * FRAC_PI_4), Ray::outgoing(FRAC_PI_4)];
    let mut set = ContourNodeSet {
        rays,
        nodes: Vec::with_capacity(2 * rule.len()),
        weights: Vec::with_capacity(2 * rule.len()),
        ray_of: Vec::with_capacity(2 * rule.len()),
        ksq: Vec::with_capacity(2 * rule.len()),
        truncation_radius: radius,
        error_estimate,
    };
    for (idx, ray) in set.rays.clone().iter().enumerate() {
        let order: Box<dyn Iterator<Item = usize>> = if idx == 0 {
            Box::new((0..rule.len()).rev())
        } else {
            Box::new(0..rule.len())
        };
        for i in order {
            let r = rule.nodes[i];
            let k = ray.point(r);
            set.nodes.push(k);
            set.weights.push(ray.direction * rule.weights[i]);
            set.ray_of.push(idx);
            set.ksq.push(k * k);
        }
    }
    set
}

/// Gauss–Legendre nodes on ∂D⁺ truncated at radius `R`, `n` nodes per ray.
pub fn dplus_boundary_nodes(radius: f64, n: usize) -> ContourNodeSet {
    assert!(radius > 0.0 && n >= 4, "need R > 0 and n >= 4");
    dplus_from_rule(&uniform_rule(radius, n), radius, 0.0)
}

fn uniform_rule(radius: f64, n: usize) -> RealRule {
    let per = n.min(16);
    let mut counts = vec![per; n / per];
    if !n.is_multiple_of(per) {
        counts.push(n % per);
    }
    let mut rule = RealRule::default();
    let mut left = 0.0;
    for c in counts {
        let right = (left + radius * c as f64 / n as f64).min(radius);
        for (x, w) in gauss_legendre(c).mapped(left, right) {
            rule.nodes.push(x);
            rule.weights.push(w);
        }
        left = right;
    }
    rule
}

/// Real nodes `κ ∈ (0, R]` for the substituted half-line integrals, graded
/// geometrically (ratio 2) toward `κ = 0`.
pub fn substituted_halfline_nodes(radius: f64, n: usize) -> ContourNodeSet {
    assert!(radius > 0.0 && n >= 4, "need R > 0 and n >= 4");
    let per = 4usize.max(n.min(16));
    let panels = n.div_ceil(per).max(1);
    let mut edges = vec![0.0];
    // Geometric panels [R 2^{-p}, R 2^{-p+1}] with the first one starting at 0.
    for i in (0..panels).rev() {
        edges.push(radius * 0.5f64.powi(i as i32));
    }
    edges.dedup();
    let mut rule = RealRule::default();
    let mut remaining = n;
    for (i, w) in edges.windows(2).enumerate() {
        let left = edges.len() - 2 - i;
        let order = if left == 0 { remaining } else { per.min(remaining - left) };
        for (x, wt) in gauss_legendre(order.max(1)).mapped(w[0], w[1]) {
            rule.nodes.push(x);
            rule.weights.push(wt);
        }
        remaining -= order;
    }
    real_node_set(&rule, radius)
}

/// Wraps a real rule as a node set on the positive real axis.
pub fn real_node_set(rule: &RealRule, radius: f64) -> ContourNodeSet {
    ContourNodeSet {
        rays: vec![Ray::outgoing(0.0)],
        nodes: rule.nodes.iter().map(|&k| Complex64::new(k, 0.0)).collect(),
        weights: rule.weights.iter().map(|&w| Complex64::new(w, 0.0)).collect(),
        ray_of: vec![0; rule.len()],
        ksq: rule.nodes.iter().map(|&k| Complex64::new(k * k, 0.0)).collect(),
        truncation_radius: radius,
        error_estimate: 0.0,
    }
}

/// Chosen truncation radius and the bound left over at it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub radius: f64,
    pub residual: f64,
    pub capped: bool,
}

impl std::fmt::LowerExp for Truncation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::LowerExp::fmt(&self.radius, f)
    }
}

/// Smallest `R ≥ R_MIN` with `e^{-x_min R/√2} B(R) < tol`.
///
/// `envelope` is `B`; it is assumed eventually non-increasing.
pub fn choose_truncation<B: Fn(f64) -> f64>(
    x_min: f64,
    envelope: B,
    tol: f64,
) -> Result<Truncation, ContourError> {
    choose_truncation_capped(x_min, envelope, tol, R_MAX)
}

pub fn choose_truncation_capped<B: Fn(f64) -> f64>(
    x_min: f64,
    envelope: B,
    tol: f64,
    cap: f64,
) -> Result<Truncation, ContourError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let bound = |r: f64| (-x_min * r * FRAC_1_SQRT_2).exp() * envelope(r);
    if bound(R_MIN) < tol {
        return Ok(Truncation {
            radius: R_MIN,
            residual: bound(R_MIN),
            capped: false,
        });
    }
    let mut lo = R_MIN;
    let mut hi = R_MIN;
    loop {
        hi *= 2.0;
        if hi >= cap {
            hi = cap;
            if bound(hi) >= tol {
                let t = Truncation {
                    radius: cap,
                    residual: bound(cap),
                    capped: true,
                };
                return if x_min <= 0.0 {
                    Err(ContourError::NoDecay(t))
                } else {
                    Ok(t)
                };
            }
            break;
        }
        if bound(hi) < tol {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if bound(mid) < tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Truncation {
        radius: hi,
        residual: bound(hi),
        capped: false,
    })
}

/// Panel edges on `[0, radius]`: geometric (ratio 2) from `first`, with each
/// panel's phase `(2κ t_span + rate(κ)) · width` capped by `budget`.
pub fn graded_edges<R: Fn(f64) -> f64>(
    radius: f64,
    first: f64,
    t_span: f64,
    rate: R,
    budget: f64,
) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut k = first.min(radius);
    edges.push(k);
    while k < radius {
        let phase_rate = 2.0 * k * t_span + rate(k);
        let width = if phase_rate > 0.0 {
            (budget / phase_rate).min(k)
        } else {
            k
        };
        k = (k + width).min(radius);
        if radius - k < 1e-3 * width {
            k = radius;
        }
        edges.push(k);
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn ray_points() {
        let set = dplus_boundary_nodes(1.0, 16);
        let on_a3 = Ray::incoming(3.0 * FRAC_PI_4).point(1.0);
        assert!((on_a3 - Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-15);
        let k = Ray::outgoing(FRAC_PI_4).point(1.0);
        assert!((k * k - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        for (k, ksq) in set.nodes.iter().zip(&set.ksq) {
            assert!(ksq.re.abs() < 1e-12 * ksq.norm().max(1e-300));
            let angle = k.arg();
            assert!(
                (angle - FRAC_PI_4).abs() < 1e-14 || (angle - 3.0 * FRAC_PI_4).abs() < 1e-14,
                "{angle}"
            );
        }
        let zero = set.integrate(|k| (Complex64::new(0.0, 1.0) * k - k * k * 0.1).exp() * k * 0.0);
        assert_eq!(zero, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn weights_sum_to_directed_length() {
        for n in [4, 7, 16, 33] {
            let set = dplus_boundary_nodes(2.5, n);
            assert_eq!(set.len(), 2 * n);
            for (idx, ray) in set.rays.iter().enumerate() {
                let s = set.ray_weight_sum(idx);
                assert!((s - ray.direction * 2.5).norm() < 1e-12 * 2.5, "n={n}");
            }
        }
    }

    #[test]
    fn orientation_matches_cauchy() {
        // ∫_{∂D⁺} e^{ik} dk over the closed wedge boundary tends to 0 as R grows,
        // since e^{ik} is entire and decays in D⁺.
        let set = dplus_boundary_nodes(60.0, 400);
        let v = set.integrate(|k| (Complex64::new(0.0, 1.0) * k).exp());
        // Contribution of the closing arc is O(e^{-R/√2}) and of the origin is zero.
        assert!(v.norm() < 1e-10, "{v}");
    }

    #[test]
    fn substituted_nodes() {
        for n in [4, 10, 16, 50] {
            let set = substituted_halfline_nodes(3.0, n);
            assert_eq!(set.len(), n);
            assert!(set.nodes.iter().all(|k| k.im == 0.0 && k.re > 0.0 && k.re <= 3.0));
            let s: f64 = set.weights.iter().map(|w| w.re).sum();
            assert!((s - 3.0).abs() < 1e-12);
        }
        let x = 0.7;
        let kappa = 2.0;
        let factor = (Complex64::new(0.0, 1.0) * A3 * kappa * x).exp();
        assert!((factor.norm() - (-kappa * x / SQRT_2).exp()).abs() < 1e-15);
    }

    #[test]
    fn truncation_examples() {
        let r = choose_truncation(1.0, |_| 1.0, 1e-12).unwrap();
        assert!((r.radius - SQRT_2 * 1e12f64.ln()).abs() < 1e-9, "{}", r.radius);
        let r = choose_truncation(1.0, |_| 1.0, 1.0).unwrap();
        assert_eq!(r.radius, R_MIN);
        let r = choose_truncation(0.0, |r| 1.0 / (r * r), 1e-8).unwrap();
        assert!((r.radius - 1e4).abs() < 1e-6, "{}", r.radius);
        match choose_truncation(0.0, |_| 1.0, 1e-3) {
            Err(ContourError::NoDecay(t)) => assert!(t.capped && t.radius == R_MAX),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refinement_convergence() {
        // Analytic integrand with superexponential decay along the a-ray.
        let f = |k: Complex64| (-(k * k) * Complex64::new(0.0, -1.0) - k).exp();
        let reference = dplus_boundary_nodes(8.0, 256).integrate(f);
        let mut prev = f64::INFINITY;
        for n in [8, 16, 32] {
            let err = (dplus_boundary_nodes(8.0, n).integrate(f) - reference).norm();
            assert!(err < prev / 10.0 || err < 1e-13, "n={n} err={err}");
            prev = err;
        }
    }

    #[test]
    fn graded_edges_respect_budget() {
        let edges = graded_edges(50.0, 1e-3, 0.1, |_| 1.0, 10.0);
        assert_eq!(edges[0], 0.0);
        assert_eq!(*edges.last().unwrap(), 50.0);
        for w in edges.windows(2).skip(1) {
            let k = w[0];
            assert!((w[1] - w[0]) * (2.0 * k * 0.1 + 1.0) <= 10.0 + 1e-9);
            assert!(w[1] - w[0] <= k * (1.0 + 1e-12));
        }
    }
}
