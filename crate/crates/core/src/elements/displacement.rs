use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Point2};

/// Polynomials of total degree `≤ degree` orthonormal in `L²` of the
/// reference triangle (area 1/2). Mode `(p, q)` is the collapsed-coordinate
/// product `t^p P_p(x / t) · P_q^{(2p+1, 0)}(2η - 1)` with `t = 1 - η` and
/// `x = 2ξ + η - 1`, so the basis is orthogonal in closed form. Modes are
/// graded by total degree; mode 0 is the constant `√2`.
#[derive(Debug, Clone)]
pub struct OrthonormalPolynomials {
    pub degree: usize,
    modes: Vec<(usize, usize)>,
    scale: Vec<f64>,
}

/// `P_n^{(α, 0)}(y)` for `n = 0..out.len()`.
fn jacobi_alpha0(alpha: f64, y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 0.5 * (alpha + 2.0) * y + 0.5 * alpha;
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        let s = 2.0 * nf + alpha;
        let a = 2.0 * (nf + 1.0) * (nf + alpha + 1.0) * s;
        let b = (s + 1.0) * ((s + 2.0) * s * y + alpha * alpha);
        let c = 2.0 * (nf + alpha) * nf * (s + 2.0);
        out[n + 1] = (b * out[n] - c * out[n - 1]) / a;
    }
}

impl OrthonormalPolynomials {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > 10 {
            return Err(Error::UnsupportedDegree { degree, reason: "orthonormal polynomials limited to degree 10" });
        }
        let mut modes = Vec::with_capacity((degree + 1) * (degree + 2) / 2);
        for total in 0..=degree {
            for q in 0..=total {
                modes.push((total - q, q));
            }
        }
        // ‖mode (p, q)‖² = 1 / (2 (2p + 1)(p + q + 1))
        let scale = modes
            .iter()
            .map(|&(p, q)| (2.0 * (2 * p + 1) as f64 * (p + q + 1) as f64).sqrt())
            .collect();
        Ok(Self { degree, modes, scale })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Values at reference coordinates `(ξ, η) = (λ1, λ2)`.
    pub fn eval_into(&self, xi: f64, eta: f64, out: &mut [f64]) {
        let d = self.degree;
        let x = 2.0 * xi + eta - 1.0;
        let t = 1.0 - eta;
        // scaled Legendre t^p P_p(x / t)
        let mut leg = [0.0f64; 11];
        leg[0] = 1.0;
        if d > 0 {
            leg[1] = x;
        }
        for n in 1..d {
            let nf = n as f64;
            leg[n + 1] = ((2.0 * nf + 1.0) * x * leg[n] - nf * t * t * leg[n - 1]) / (nf + 1.0);
        }
        let y = 2.0 * eta - 1.0;
        let mut jac = [[0.0f64; 11]; 11];
        for p in 0..=d {
            jacobi_alpha0((2 * p + 1) as f64, y, &mut jac[p][..=d - p]);
        }
        for (j, &(p, q)) in self.modes.iter().enumerate() {
            out[j] = self.scale[j] * leg[p] * jac[p][q];
        }
    }

    pub fn eval(&self, xi: f64, eta: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(xi, eta, &mut out);
        out
    }
}

/// Discontinuous vector `P_{k-1}` basis: on element `K` mode `c·n + m` is
/// `e_c ψ̂_m(F⁻¹x) / √|det B|`, orthonormal in `L²(K)`.
#[derive(Debug, Clone)]
pub struct DisplacementBasis {
    pub k: usize,
    pub scalar: OrthonormalPolynomials,
}

impl DisplacementBasis {
    pub fn new(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::UnsupportedDegree { degree: k, reason: "the element family requires k >= 3" });
        }
        Ok(Self { k, scalar: OrthonormalPolynomials::new(k - 1)? })
    }

    /// Scalar modes per component, `dim P_{k-1}`.
    pub fn scalar_len(&self) -> usize {
        self.scalar.len()
    }

    /// Vector modes per element, `k(k+1)`.
    pub fn len(&self) -> usize {
        2 * self.scalar.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// All displacement modes of `element` evaluated at `point`; zero if the
/// point lies outside the element.
pub fn eval_displacement_basis(
    basis: &DisplacementBasis,
    geometry: &ElementGeometry,
    point: Point2,
) -> Vec<[f64; 2]> {
    let l = geometry.barycentric(point);
    let n = basis.scalar_len();
    let mut out = vec![[0.0; 2]; 2 * n];
    if l.iter().any(|&c| c < -1e-12) {
        return out;
    }
    let scale = 1.0 / geometry.det.abs().sqrt();
    let s = basis.scalar.eval(l[1], l[2]);
    for m in 0..n {
        out[m] = [s[m] * scale, 0.0];
        out[n + m] = [0.0, s[m] * scale];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::triangle_rule;

    #[test]
    fn reference_orthonormality() {
        for d in 0..=6 {
            let p = OrthonormalPolynomials::new(d).unwrap();
            let rule = triangle_rule(2 * d.max(1)).unwrap();
            let n = p.len();
            let mut g = vec![0.0; n * n];
            for (pt, w) in rule.iter() {
                let v = p.eval(pt[1], pt[2]);
                for i in 0..n {
                    for j in 0..n {
                        g[i * n + j] += 0.5 * w * v[i] * v[j];
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g[i * n + j] - e).abs() < 1e-13, "d={d} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn spans_all_polynomials_of_the_degree() {
        // the orthogonal projection of ξ^a η^b (a + b ≤ d) reproduces it
        let d = 4;
        let p = OrthonormalPolynomials::new(d).unwrap();
        let rule = triangle_rule(2 * d).unwrap();
        for a in 0..=d as i32 {
            for b in 0..=(d as i32 - a) {
                let f = |x: f64, y: f64| x.powi(a) * y.powi(b);
                let mut c = vec![0.0; p.len()];
                for (pt, w) in rule.iter() {
                    let v = p.eval(pt[1], pt[2]);
                    for j in 0..p.len() {
                        c[j] += 0.5 * w * f(pt[1], pt[2]) * v[j];
                    }
                }
                for (x, y) in [(0.1, 0.2), (0.7, 0.05), (0.3, 0.6)] {
                    let v = p.eval(x, y);
                    let proj: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                    assert!((proj - f(x, y)).abs() < 1e-13, "({a},{b})");
                }
            }
        }
    }

    #[test]
    fn constant_mode_and_locality() {
        let g = ElementGeometry::from_vertices([
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
        ])
        .unwrap();
        let b = DisplacementBasis::new(3).unwrap();
        assert_eq!(b.len(), 12);
        let expected = 1.0 / g.area().sqrt();
        for p in [Point2::new(0.9, 0.1), Point2::new(0.5, 0.25), Point2::new(0.99, 0.9)] {
            let v = eval_displacement_basis(&b, &g, p);
            assert!((v[0][0] - expected).abs() < 1e-13);
            assert_eq!(v[0][1], 0.0);
            assert!((v[6][1] - expected).abs() < 1e-13);
        }
        // a point of the other half of the square
        let outside = eval_displacement_basis(&b, &g, Point2::new(0.2, 0.8));
        assert!(outside.iter().all(|v| v == &[0.0, 0.0]));
    }

    #[test]
    fn modes_per_element() {
        for k in 3..=5 {
            assert_eq!(DisplacementBasis::new(k).unwrap().len(), k * (k + 1));
        }
    }
}
