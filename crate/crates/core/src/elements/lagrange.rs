use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Point2};
use crate::quadrature::QuadratureRule;

const BARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Vertex(usize),
    /// `j`-th interior node of local edge `edge`, `1 ≤ j ≤ k - 1`.
    Edge { edge: usize, j: usize },
    /// Interior node with barycentric numerators `(l, m, k - l - m)`.
    Interior { l: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LagrangeNode {
    pub kind: NodeKind,
    /// Barycentric coordinates times `k`.
    pub multi_index: [usize; 3],
}

/// Nodes of the degree-`k` Lagrange triangle: vertices, then `k - 1` nodes
/// per edge, then interior nodes.
#[derive(Debug, Clone, Serialize)]
pub struct LagrangeNodeSet {
    pub degree: usize,
    pub nodes: Vec<LagrangeNode>,
}

impl LagrangeNodeSet {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::UnsupportedDegree { degree: k, reason: "Lagrange nodes need k >= 1" });
        }
        if k > 10 {
            return Err(Error::UnsupportedDegree { degree: k, reason: "Lagrange nodes are limited to k <= 10" });
        }
        let mut nodes = Vec::with_capacity((k + 1) * (k + 2) / 2);
        for i in 0..3 {
            let mut multi = [0; 3];
            multi[i] = k;
            nodes.push(LagrangeNode { kind: NodeKind::Vertex(i), multi_index: multi });
        }
        for i in 0..3 {
            for j in 1..k {
                let mut multi = [0; 3];
                multi[(i + 2) % 3] = j;
                multi[(i + 1) % 3] = k - j;
                nodes.push(LagrangeNode { kind: NodeKind::Edge { edge: i, j }, multi_index: multi });
            }
        }
        for l in 1..k {
            for m in 1..k - l {
                nodes.push(LagrangeNode {
                    kind: NodeKind::Interior { l, m },
                    multi_index: [l, m, k - l - m],
                });
            }
        }
        Ok(Self { degree: k, nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn barycentric(&self, a: usize) -> [f64; 3] {
        let k = self.degree as f64;
        self.nodes[a].multi_index.map(|m| m as f64 / k)
    }

    pub fn count_edge_interior(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Edge { .. })).count()
    }

    pub fn count_interior(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Interior { .. })).count()
    }

    pub fn positions(&self, geometry: &ElementGeometry) -> Vec<Point2> {
        (0..self.len()).map(|a| geometry.to_physical(&self.barycentric(a))).collect()
    }
}

/// Lagrange node set of degree `k` placed on a triangle.
pub fn lagrange_nodes(k: usize, geometry: &ElementGeometry) -> Result<(LagrangeNodeSet, Vec<Point2>)> {
    let set = LagrangeNodeSet::new(k)?;
    let pos = set.positions(geometry);
    Ok((set, pos))
}

/// Nodal basis of degree `k` on equispaced nodes, evaluated through the
/// product form `φ_α = Π_i Π_{j<α_i} (k λ_i - j) / (j + 1)`.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    pub nodes: LagrangeNodeSet,
}

/// Basis values and reference gradients tabulated at quadrature points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub num_points: usize,
    pub num_functions: usize,
    /// Row-major `[point][function]`.
    pub values: Vec<f64>,
    /// Gradients with respect to `(λ1, λ2)`, row-major `[point][function]`.
    pub grads: Vec<[f64; 2]>,
}

impl Tabulation {
    #[inline]
    pub fn value(&self, q: usize, a: usize) -> f64 {
        self.values[q * self.num_functions + a]
    }

    #[inline]
    pub fn grad(&self, q: usize, a: usize) -> [f64; 2] {
        self.grads[q * self.num_functions + a]
    }
}

impl LagrangeBasis {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self { nodes: LagrangeNodeSet::new(k)? })
    }

    pub fn degree(&self) -> usize {
        self.nodes.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values and `(λ1, λ2)`-gradients of every basis function, without
    /// validating the point.
    pub fn eval_into(&self, l1: f64, l2: f64, values: &mut [f64], grads: &mut [[f64; 2]]) {
        let k = self.degree();
        let kf = k as f64;
        let l = [1.0 - l1 - l2, l1, l2];
        // f[i][a] = Π_{j<a} (k λ_i - j) / (j + 1) and its λ_i-derivative
        let mut f = [[0.0f64; 11]; 3];
        let mut df = [[0.0f64; 11]; 3];
        for i in 0..3 {
            f[i][0] = 1.0;
            for a in 1..=k {
                let j = (a - 1) as f64;
                let factor = (kf * l[i] - j) / (j + 1.0);
                f[i][a] = f[i][a - 1] * factor;
                df[i][a] = df[i][a - 1] * factor + f[i][a - 1] * kf / (j + 1.0);
            }
        }
        for (n, node) in self.nodes.nodes.iter().enumerate() {
            let [a0, a1, a2] = node.multi_index;
            let (v0, v1, v2) = (f[0][a0], f[1][a1], f[2][a2]);
            values[n] = v0 * v1 * v2;
            let d0 = df[0][a0] * v1 * v2;
            grads[n] = [df[1][a1] * v0 * v2 - d0, df[2][a2] * v0 * v1 - d0];
        }
    }

    /// Checked evaluation at barycentric coordinates.
    pub fn eval(&self, bary: [f64; 3]) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
        validate_barycentric(bary)?;
        let mut v = vec![0.0; self.len()];
        let mut g = vec![[0.0; 2]; self.len()];
        self.eval_into(bary[1], bary[2], &mut v, &mut g);
        Ok((v, g))
    }

    pub fn tabulate(&self, rule: &QuadratureRule) -> Tabulation {
        let n = self.len();
        let mut values = vec![0.0; rule.len() * n];
        let mut grads = vec![[0.0; 2]; rule.len() * n];
        for (q, p) in rule.points.iter().enumerate() {
            self.eval_into(p[1], p[2], &mut values[q * n..(q + 1) * n], &mut grads[q * n..(q + 1) * n]);
        }
        Tabulation { num_points: rule.len(), num_functions: n, values, grads }
    }
}

pub(crate) fn validate_barycentric(bary: [f64; 3]) -> Result<()> {
    let sum: f64 = bary.iter().sum();
    if !bary.iter().all(|c| c.is_finite() && *c >= -BARY_TOL) || (sum - 1.0).abs() > BARY_TOL {
        return Err(Error::InvalidBarycentric(bary));
    }
    Ok(())
}

/// Value and physical gradient of scalar basis function `node` at a point
/// given in barycentric coordinates of `geometry`.
pub fn eval_scalar_basis(
    basis: &LagrangeBasis,
    node: usize,
    geometry: &ElementGeometry,
    bary: [f64; 3],
) -> Result<(f64, [f64; 2])> {
    if node >= basis.len() {
        return Err(Error::IndexOutOfRange { index: node, len: basis.len() });
    }
    let (v, g) = basis.eval(bary)?;
    Ok((v[node], geometry.push_gradient(g[node])))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent construction: invert the Vandermonde matrix of the
    /// monomials `λ1^p λ2^q` at the nodes and evaluate the interpolant.
    fn vandermonde_oracle(b: &LagrangeBasis, l: [f64; 3]) -> Vec<f64> {
        let k = b.degree();
        let exps: Vec<(i32, i32)> = (0..=k as i32).flat_map(|t| (0..=t).map(move |q| (t - q, q))).collect();
        let n = exps.len();
        let mono = |x: [f64; 3]| -> Vec<f64> { exps.iter().map(|&(p, q)| x[1].powi(p) * x[2].powi(q)).collect() };
        let vander = nalgebra::DMatrix::from_fn(n, n, |r, c| mono(b.nodes.barycentric(r))[c]);
        let m = nalgebra::DVector::from_vec(mono(l));
        // basis values φ solve Vᵀ φ = m
        let phi = vander.transpose().lu().solve(&m).unwrap();
        phi.iter().copied().collect()
    }

    /// Closed form of a single basis function, used for finite differences.
    fn product_formula(multi: [usize; 3], k: usize, l: [f64; 3]) -> f64 {
        let mut v = 1.0;
        for i in 0..3 {
            for j in 0..multi[i] {
                v *= (k as f64 * l[i] - j as f64) / (j as f64 + 1.0);
            }
        }
        v
    }

    fn pseudo_random_points(n: usize) -> Vec<[f64; 3]> {
        let mut s = 0x2545_f491u64;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n)
            .map(|_| {
                let (mut a, mut b) = (next(), next());
                if a + b > 1.0 {
                    a = 1.0 - a;
                    b = 1.0 - b;
                }
                [1.0 - a - b, a, b]
            })
            .collect()
    }

    #[test]
    fn node_counts() {
        for k in 1..=6 {
            let s = LagrangeNodeSet::new(k).unwrap();
            assert_eq!(s.len(), (k + 1) * (k + 2) / 2);
            assert_eq!(s.count_edge_interior(), 3 * (k - 1));
            assert_eq!(2 * s.count_interior(), (k - 1) * k.saturating_sub(2));
        }
        assert_eq!(LagrangeNodeSet::new(5).unwrap().count_interior(), 6);
        assert!(LagrangeNodeSet::new(0).is_err());
        assert!(LagrangeNodeSet::new(11).is_err());
    }

    #[test]
    fn cubic_node_positions() {
        let g = ElementGeometry::from_vertices([
            Point2::new(0.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(0.0, 3.0),
        ])
        .unwrap();
        let (set, pos) = lagrange_nodes(3, &g).unwrap();
        // E2 runs from x1 to x0: x_{E2,j} = j/3 x1 + (3-j)/3 x0
        let e2: Vec<Point2> = set
            .nodes
            .iter()
            .zip(&pos)
            .filter(|(n, _)| matches!(n.kind, NodeKind::Edge { edge: 2, .. }))
            .map(|(_, p)| *p)
            .collect();
        assert_eq!(e2, vec![Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)]);
        let interior: Vec<_> = set.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Interior { .. })).collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].multi_index, [1, 1, 1]);
    }

    #[test]
    fn kronecker_property() {
        for k in 3..=6 {
            let b = LagrangeBasis::new(k).unwrap();
            for node in 0..b.len() {
                let (v, _) = b.eval(b.nodes.barycentric(node)).unwrap();
                for (a, va) in v.iter().enumerate() {
                    let e = if a == node { 1.0 } else { 0.0 };
                    assert!((va - e).abs() < 1e-13, "k={k} a={a} node={node} v={va}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        let b = LagrangeBasis::new(3).unwrap();
        let (v, g) = b.eval([0.46, 0.21, 0.33]).unwrap();
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        let gs = g.iter().fold([0.0, 0.0], |acc, x| [acc[0] + x[0], acc[1] + x[1]]);
        assert!(gs[0].abs() < 1e-12 && gs[1].abs() < 1e-12);
        for k in 3..=5 {
            let b = LagrangeBasis::new(k).unwrap();
            for p in pseudo_random_points(50) {
                let (v, _) = b.eval(p).unwrap();
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn matches_vandermonde_interpolant() {
        for k in 3..=5 {
            let b = LagrangeBasis::new(k).unwrap();
            for p in pseudo_random_points(40) {
                let (v, g) = b.eval(p).unwrap();
                let oracle = vandermonde_oracle(&b, p);
                for (a, node) in b.nodes.nodes.iter().enumerate() {
                    assert!((v[a] - oracle[a]).abs() < 1e-10, "k={k} a={a}");
                    // central differences in (λ1, λ2) with λ0 = 1 - λ1 - λ2
                    let h = 1e-6;
                    let f = |d1: f64, d2: f64| {
                        product_formula(node.multi_index, k, [p[0] - d1 - d2, p[1] + d1, p[2] + d2])
                    };
                    let fd = [(f(h, 0.0) - f(-h, 0.0)) / (2.0 * h), (f(0.0, h) - f(0.0, -h)) / (2.0 * h)];
                    assert!((g[a][0] - fd[0]).abs() < 1e-6 * (1.0 + fd[0].abs()));
                    assert!((g[a][1] - fd[1]).abs() < 1e-6 * (1.0 + fd[1].abs()));
                }
            }
        }
    }

    #[test]
    fn cubic_edge_node_matches_figure_formula() {
        // on E0 the node with λ1 = 2/3, λ2 = 1/3 is λ1(λ1 - 1/3)λ2 normalized
        let b = LagrangeBasis::new(3).unwrap();
        let a = b
            .nodes
            .nodes
            .iter()
            .position(|n| n.multi_index == [0, 2, 1])
            .unwrap();
        let tilde = |l: [f64; 3]| l[1] * (l[1] - 1.0 / 3.0) * l[2];
        let norm = tilde([0.0, 2.0 / 3.0, 1.0 / 3.0]);
        for p in pseudo_random_points(20) {
            let (v, _) = b.eval(p).unwrap();
            assert!((v[a] - tilde(p) / norm).abs() < 1e-13);
        }
    }

    #[test]
    fn physical_gradient_and_validation() {
        let g = ElementGeometry::from_vertices([
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 1.0),
            Point2::new(1.0, 3.0),
        ])
        .unwrap();
        let b = LagrangeBasis::new(3).unwrap();
        // vertex 1 basis is λ1(3λ1-1)(3λ1-2)/2; at the centroid its λ1-derivative is
        // (27λ1² - 18λ1 + 2)/2 = -1/2
        let (v, grad) = eval_scalar_basis(&b, 1, &g, [1.0 / 3.0; 3]).unwrap();
        assert!(v.abs() < 1e-14);
        assert!((grad[0] - (-0.5 * 0.6)).abs() < 1e-13);
        assert!((grad[1] - (-0.5 * -0.2)).abs() < 1e-13);
        assert!(matches!(
            eval_scalar_basis(&b, 0, &g, [0.5, 0.6, -0.1]),
            Err(Error::InvalidBarycentric(_))
        ));
        assert!(eval_scalar_basis(&b, 0, &g, [0.5, 0.6, 0.1]).is_err());
        assert!(eval_scalar_basis(&b, 10, &g, [0.5, 0.4, 0.1]).is_err());
    }
}
