//! Closed-form solutions used to measure discretization errors.

use std::f64::consts::PI;

use serde::Serialize;

use crate::assembly::ComplianceTensor;
use crate::elements::SymMatrix2;
use crate::mesh::Point2;

/// A displacement field with hand-coded first and second derivatives.
/// Strain, stress and load follow from these for any isotropic material.
pub trait ExactSolution: Sync {
    fn name(&self) -> &'static str;

    fn displacement(&self, p: Point2) -> [f64; 2];

    /// `g[i][j] = ∂_j u_i`.
    fn gradient(&self, p: Point2) -> [[f64; 2]; 2];

    /// `h[i][j][l] = ∂_j ∂_l u_i`.
    fn hessian(&self, p: Point2) -> [[[f64; 2]; 2]; 2];

    fn strain(&self, p: Point2) -> SymMatrix2 {
        let g = self.gradient(p);
        SymMatrix2::new(g[0][0], 0.5 * (g[0][1] + g[1][0]), g[1][1])
    }

    fn stress(&self, material: &ComplianceTensor, p: Point2) -> SymMatrix2 {
        material.stiffness(&self.strain(p))
    }

    /// `f = div σ = μ Δu + (μ + λ) ∇ div u`.
    fn load(&self, material: &ComplianceTensor, p: Point2) -> [f64; 2] {
        let h = self.hessian(p);
        let (mu, lambda) = (material.mu, material.lambda);
        let grad_div = [h[0][0][0] + h[1][1][0], h[0][0][1] + h[1][1][1]];
        [0, 1].map(|i| mu * (h[i][0][0] + h[i][1][1]) + (mu + lambda) * grad_div[i])
    }

    fn fields(&self, material: &ComplianceTensor, p: Point2) -> ExactFields {
        ExactFields {
            displacement: self.displacement(p),
            stress: self.stress(material, p),
            load: self.load(material, p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactFields {
    pub displacement: [f64; 2],
    pub stress: SymMatrix2,
    pub load: [f64; 2],
}

fn bubble(x: f64) -> [f64; 3] {
    [x * (1.0 - x), 1.0 - 2.0 * x, -2.0]
}

/// `u = (e^{x-y} x(1-x) y(1-y), sin πx sin πy)`, zero on the boundary of
/// the unit square.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpSineSolution;

impl ExpSineSolution {
    /// `u₁ = a(x) b(y)` with `a = eˣ x(1-x)`, `b = e^{-y} y(1-y)`; returns
    /// `(a, a', a'')` and `(b, b', b'')`.
    fn factors(p: Point2) -> ([f64; 3], [f64; 3]) {
        let [g, g1, g2] = bubble(p.x);
        let ex = p.x.exp();
        let a = [ex * g, ex * (g + g1), ex * (g + 2.0 * g1 + g2)];
        let [g, g1, g2] = bubble(p.y);
        let ey = (-p.y).exp();
        let b = [ey * g, ey * (g1 - g), ey * (g2 - 2.0 * g1 + g)];
        (a, b)
    }
}

impl ExactSolution for ExpSineSolution {
    fn name(&self) -> &'static str {
        "exp-sine"
    }

    fn displacement(&self, p: Point2) -> [f64; 2] {
        let (a, b) = Self::factors(p);
        [a[0] * b[0], (PI * p.x).sin() * (PI * p.y).sin()]
    }

    fn gradient(&self, p: Point2) -> [[f64; 2]; 2] {
        let (a, b) = Self::factors(p);
        let (sx, cx) = (PI * p.x).sin_cos();
        let (sy, cy) = (PI * p.y).sin_cos();
        [[a[1] * b[0], a[0] * b[1]], [PI * cx * sy, PI * sx * cy]]
    }

    fn hessian(&self, p: Point2) -> [[[f64; 2]; 2]; 2] {
        let (a, b) = Self::factors(p);
        let (sx, cx) = (PI * p.x).sin_cos();
        let (sy, cy) = (PI * p.y).sin_cos();
        let pp = PI * PI;
        [
            [[a[2] * b[0], a[1] * b[1]], [a[1] * b[1], a[0] * b[2]]],
            [[-pp * sx * sy, pp * cx * cy], [pp * cx * cy, -pp * sx * sy]],
        ]
    }
}

/// `u = c (x(1-x)y(1-y), x(1-x)y(1-y))`: a quartic that vanishes on the
/// boundary, so its stress is a cubic.
#[derive(Debug, Clone, Copy)]
pub struct PolynomialSolution {
    pub scale: f64,
}

impl Default for PolynomialSolution {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

impl ExactSolution for PolynomialSolution {
    fn name(&self) -> &'static str {
        "polynomial"
    }

    fn displacement(&self, p: Point2) -> [f64; 2] {
        let v = self.scale * bubble(p.x)[0] * bubble(p.y)[0];
        [v, v]
    }

    fn gradient(&self, p: Point2) -> [[f64; 2]; 2] {
        let (gx, gy) = (bubble(p.x), bubble(p.y));
        let row = [self.scale * gx[1] * gy[0], self.scale * gx[0] * gy[1]];
        [row, row]
    }

    fn hessian(&self, p: Point2) -> [[[f64; 2]; 2]; 2] {
        let (gx, gy) = (bubble(p.x), bubble(p.y));
        let c = self.scale;
        let h = [[c * gx[2] * gy[0], c * gx[1] * gy[1]], [c * gx[1] * gy[1], c * gx[0] * gy[2]]];
        [h, h]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn material() -> ComplianceTensor {
        ComplianceTensor::new(0.5, 1.0).unwrap()
    }

    fn random_points(n: usize, seed: u64) -> Vec<Point2> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..n).map(|_| Point2::new(rng.random_range(0.02..0.98), rng.random_range(0.02..0.98))).collect()
    }

    #[test]
    fn center_value() {
        let u = ExpSineSolution.displacement(Point2::new(0.5, 0.5));
        assert!((u[0] - 0.0625).abs() < 1e-15);
        assert!((u[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vanishes_on_boundary() {
        for i in 0..=20 {
            let s = i as f64 / 20.0;
            for p in [Point2::new(s, 0.0), Point2::new(s, 1.0), Point2::new(0.0, s), Point2::new(1.0, s)] {
                for sol in [&ExpSineSolution as &dyn ExactSolution, &PolynomialSolution::default()] {
                    let u = sol.displacement(p);
                    assert!(u[0].abs() < 1e-15 && u[1].abs() < 1e-15, "{p:?}");
                }
            }
        }
    }

    fn check_derivatives(sol: &dyn ExactSolution, seed: u64) {
        let h = 1e-6;
        for p in random_points(20, seed) {
            let g = sol.gradient(p);
            let hs = sol.hessian(p);
            for j in 0..2 {
                let d = if j == 0 { Point2::new(h, 0.0) } else { Point2::new(0.0, h) };
                let plus = Point2::new(p.x + d.x, p.y + d.y);
                let minus = Point2::new(p.x - d.x, p.y - d.y);
                let (up, um) = (sol.displacement(plus), sol.displacement(minus));
                let (gp, gm) = (sol.gradient(plus), sol.gradient(minus));
                for i in 0..2 {
                    let fd = (up[i] - um[i]) / (2.0 * h);
                    assert!((fd - g[i][j]).abs() < 1e-7 * (1.0 + fd.abs()), "{} du{i}/dx{j}", sol.name());
                    for l in 0..2 {
                        let fd = (gp[i][l] - gm[i][l]) / (2.0 * h);
                        assert!((fd - hs[i][l][j]).abs() < 1e-7 * (1.0 + fd.abs()), "{} hessian", sol.name());
                    }
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        check_derivatives(&ExpSineSolution, 3);
        check_derivatives(&PolynomialSolution { scale: 2.5 }, 4);
    }

    /// `f` against central differences of the stress components with step 1e-5.
    fn check_load(sol: &dyn ExactSolution, material: &ComplianceTensor, seed: u64) {
        let h = 1e-5;
        for p in random_points(20, seed) {
            let s = |x: f64, y: f64| sol.stress(material, Point2::new(x, y));
            let (sxp, sxm) = (s(p.x + h, p.y), s(p.x - h, p.y));
            let (syp, sym) = (s(p.x, p.y + h), s(p.x, p.y - h));
            let fd = [
                (sxp.a11 - sxm.a11) / (2.0 * h) + (syp.a12 - sym.a12) / (2.0 * h),
                (sxp.a12 - sxm.a12) / (2.0 * h) + (syp.a22 - sym.a22) / (2.0 * h),
            ];
            let f = sol.load(material, p);
            let scale = f[0].hypot(f[1]).max(1e-3);
            let err = (fd[0] - f[0]).hypot(fd[1] - f[1]);
            assert!(err <= 1e-6 * scale, "{} at {p:?}: {f:?} vs {fd:?}", sol.name());
        }
    }

    #[test]
    fn load_matches_finite_difference_divergence() {
        check_load(&ExpSineSolution, &material(), 11);
        check_load(&ExpSineSolution, &ComplianceTensor::new(2.0, 7.5).unwrap(), 12);
        check_load(&PolynomialSolution { scale: 3.0 }, &material(), 13);
    }

    #[test]
    fn compliance_recovers_strain() {
        let m = material();
        for p in random_points(10, 21) {
            let back = m.apply(&ExpSineSolution.stress(&m, p));
            assert!(back.sub(&ExpSineSolution.strain(p)).norm_sq().sqrt() < 1e-14);
        }
    }
}
