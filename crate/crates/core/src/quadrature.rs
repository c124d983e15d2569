//! Quadrature on the reference triangle and on edges.
//!
//! Triangle rules are collapsed tensor products (Duffy transform): a
//! Gauss–Jacobi rule with weight `(1 - s)` in the collapsed direction times a
//! Gauss–Legendre rule along the fibres. They exist for every degree and all
//! weights are positive. Weights are normalized to sum to one, so
//! `∫_K g ≈ |K| Σ w_q g(x_q)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Highest exactness degree accepted by [`triangle_rule`].
pub const MAX_TRIANGLE_DEGREE: usize = 30;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Barycentric coordinates `(λ0, λ1, λ2)` of each point.
    pub points: Vec<[f64; 3]>,
    /// Weights, summing to one.
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> + '_ {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    /// Parameters in `[0, 1]` along the edge.
    pub points: Vec<f64>,
    /// Weights, summing to one.
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl EdgeRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Golub–Welsch for the Jacobi weight `(1 - x)^α (1 + x)^β` on `[-1, 1]`.
/// Returns nodes and weights (weights sum to the weight's total mass).
fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        let diag = if i == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * fi + ab) * (2.0 * fi + ab + 2.0))
        };
        jacobi[(i, i)] = diag;
        if i + 1 < n {
            let m = fi + 1.0;
            let s = 2.0 * m + ab;
            let off = (4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0)))
                .sqrt();
            jacobi[(i, i + 1)] = off;
            jacobi[(i + 1, i)] = off;
        }
    }
    let mass = 2f64.powf(ab + 1.0) * gamma_int(alpha) * gamma_int(beta) / gamma_int(ab + 1.0);
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Γ(x + 1) for the non-negative integer values used here.
fn gamma_int(x: f64) -> f64 {
    let n = x.round() as u32;
    (1..=n).map(f64::from).product()
}

fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// Triangle rule exact for all polynomials of total degree `≤ degree`.
pub fn triangle_rule(degree: usize) -> Result<QuadratureRule> {
    if degree == 0 || degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::UnsupportedDegree {
            degree,
            reason: "triangle quadrature supports degrees 1..=30",
        });
    }
    let n = points_for_degree(degree);
    let (xs, ws) = gauss_jacobi(n, 1.0, 0.0);
    let (ts, wt) = gauss_jacobi(n, 0.0, 0.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (x, w) in xs.iter().zip(&ws) {
        let s = 0.5 * (x + 1.0);
        // ∫₀¹ (1 - s) g ds = ¼ ∫ (1 - x) g dx
        let ws = w / 4.0;
        for (t, v) in ts.iter().zip(&wt) {
            let t = 0.5 * (t + 1.0);
            let wt = v / 2.0;
            let xi = s;
            let eta = t * (1.0 - s);
            points.push([1.0 - xi - eta, xi, eta]);
            // reference area is 1/2
            weights.push(2.0 * ws * wt);
        }
    }
    Ok(QuadratureRule { points, weights, degree })
}

/// Gauss–Legendre rule on `[0, 1]` exact to `degree`.
pub fn edge_rule(degree: usize) -> EdgeRule {
    let n = points_for_degree(degree);
    let (xs, ws) = gauss_jacobi(n, 0.0, 0.0);
    EdgeRule {
        points: xs.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: ws.iter().map(|w| 0.5 * w).collect(),
        degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// ∫_ref λ0^a λ1^b λ2^c = 2|K| a! b! c! / (a+b+c+2)! with |K| = 1/2.
    fn bary_monomial_integral(a: u32, b: u32, c: u32) -> f64 {
        factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2)
    }

    fn apply(rule: &QuadratureRule, f: impl Fn(&[f64; 3]) -> f64) -> f64 {
        0.5 * rule.iter().map(|(p, w)| w * f(p)).sum::<f64>()
    }

    #[test]
    fn degree_one_is_centroid() {
        let rule = triangle_rule(1).unwrap();
        assert_eq!(rule.len(), 1);
        assert!((rule.weights[0] - 1.0).abs() < 1e-15);
        for c in rule.points[0] {
            assert!((c - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cubic_bubble_integral() {
        let rule = triangle_rule(3).unwrap();
        let got = apply(&rule, |p| p[0] * p[1] * p[2]);
        assert!((got - 1.0 / 120.0).abs() < 1e-16, "{got}");
    }

    #[test]
    fn degree_ten_integrates_x6_y4() {
        let rule = triangle_rule(10).unwrap();
        let got = apply(&rule, |p| p[1].powi(6) * p[2].powi(4));
        let exact = bary_monomial_integral(0, 6, 4);
        assert!(((got - exact) / exact).abs() < 1e-13);
    }

    #[test]
    fn exactness_sweep() {
        for d in 1..=20usize {
            let rule = triangle_rule(d).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let c = d as u32 - a - b;
                    let got = apply(&rule, |p| {
                        p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
                    });
                    let exact = bary_monomial_integral(a, b, c);
                    assert!(((got - exact) / exact).abs() < 1e-13, "d={d} ({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn rejects_unsupported_degree() {
        assert!(triangle_rule(0).is_err());
        assert!(triangle_rule(MAX_TRIANGLE_DEGREE + 1).is_err());
    }

    #[test]
    fn edge_rules() {
        let mid = edge_rule(1);
        assert_eq!(mid.points, vec![0.5]);
        let two = edge_rule(3);
        assert_eq!(two.len(), 2);
        let g = 1.0 / 3f64.sqrt();
        assert!((two.points[0] - 0.5 * (1.0 - g)).abs() < 1e-15);
        assert!((two.points[1] - 0.5 * (1.0 + g)).abs() < 1e-15);
        let r = edge_rule(4);
        let got: f64 = r.points.iter().zip(&r.weights).map(|(s, w)| w * s.powi(4)).sum();
        assert!((got - 0.2).abs() < 1e-15);
        for d in 0..=25 {
            let r = edge_rule(d);
            let got: f64 = r.points.iter().zip(&r.weights).map(|(s, w)| w * s.powi(d as i32)).sum();
            assert!((got - 1.0 / (d as f64 + 1.0)).abs() < 1e-14, "d={d}");
        }
    }
}
