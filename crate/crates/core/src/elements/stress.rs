use serde::Serialize;

use super::lagrange::{validate_barycentric, LagrangeBasis};
use super::SymMatrix2;
use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StressClass {
    Vertex,
    Volume,
    EdgeFlux,
    EdgeBubble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatrixDirection {
    /// `T1`, `T2`, `T3`.
    Canonical(u8),
    /// One of the two complements of the edge tangent matrix.
    EdgeComplement(u8),
    /// `t tᵀ` of the edge.
    EdgeTangent,
}

/// The global Lagrange node a stress function is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GlobalNode {
    Vertex(usize),
    /// Node at `step / k` of the way from `edges[edge].vertices[0]`.
    Edge { edge: usize, step: usize },
    /// Local node `node` inside `element`.
    Interior { element: usize, node: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct StressBasisFunction {
    pub class: StressClass,
    pub node: GlobalNode,
    pub direction: MatrixDirection,
    pub matrix: SymMatrix2,
    /// Elements on which the function is nonzero.
    pub support: Vec<usize>,
}

/// `φ M` and its row-wise divergence `M ∇φ` for the scalar basis function
/// `local_node` on the element described by `geometry`.
pub fn eval_stress_basis(
    basis: &LagrangeBasis,
    local_node: usize,
    matrix: &SymMatrix2,
    geometry: &ElementGeometry,
    point: Point2,
) -> Result<(SymMatrix2, [f64; 2])> {
    if local_node >= basis.len() {
        return Err(Error::IndexOutOfRange { index: local_node, len: basis.len() });
    }
    let bary = geometry.barycentric(point);
    validate_barycentric(bary)?;
    let n = basis.len();
    let mut v = vec![0.0; n];
    let mut g = vec![[0.0; 2]; n];
    basis.eval_into(bary[1], bary[2], &mut v, &mut g);
    let grad = geometry.push_gradient(g[local_node]);
    Ok((matrix.scale(v[local_node]), matrix.mul_vec(grad)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{EdgeMatrixFrame, NodeKind};

    fn triangle() -> ElementGeometry {
        ElementGeometry::from_vertices([
            Point2::new(0.1, 0.2),
            Point2::new(1.3, 0.4),
            Point2::new(0.5, 1.1),
        ])
        .unwrap()
    }

    #[test]
    fn vertex_function_at_its_vertex() {
        let g = triangle();
        let b = LagrangeBasis::new(3).unwrap();
        let t2 = SymMatrix2::canonical(2);
        let (v, _) = eval_stress_basis(&b, 0, &t2, &g, Point2::new(0.1, 0.2)).unwrap();
        assert!((v.a12 - 1.0).abs() < 1e-13 && v.a11.abs() < 1e-13 && v.a22.abs() < 1e-13);
    }

    #[test]
    fn divergence_of_t1_picks_first_gradient_component() {
        let g = triangle();
        let b = LagrangeBasis::new(4).unwrap();
        let p = Point2::new(0.6, 0.5);
        for a in 0..b.len() {
            let (_, grad) = crate::elements::eval_scalar_basis(&b, a, &g, g.barycentric(p)).unwrap();
            let (_, div) = eval_stress_basis(&b, a, &SymMatrix2::canonical(1), &g, p).unwrap();
            assert_eq!(div, [grad[0], 0.0]);
        }
    }

    #[test]
    fn edge_bubbles_have_zero_normal_flux() {
        let g = triangle();
        let verts = [Point2::new(0.1, 0.2), Point2::new(1.3, 0.4), Point2::new(0.5, 1.1)];
        for k in 3..=5 {
            let b = LagrangeBasis::new(k).unwrap();
            for (a, node) in b.nodes.nodes.iter().enumerate() {
                let NodeKind::Edge { edge, .. } = node.kind else { continue };
                let (p, q) = (verts[(edge + 1) % 3], verts[(edge + 2) % 3]);
                let d = q.sub(p);
                let len = d[0].hypot(d[1]);
                let t = [d[0] / len, d[1] / len];
                let frame = EdgeMatrixFrame::new(t, [-t[1], t[0]]);
                for l in 0..3 {
                    let (p, q) = (verts[(l + 1) % 3], verts[(l + 2) % 3]);
                    let d = q.sub(p);
                    let n = [-d[1], d[0]];
                    for s in [0.1, 0.35, 0.5, 0.8] {
                        let (v, _) = eval_stress_basis(&b, a, &frame.tangent, &g, p.lerp(q, s)).unwrap();
                        let flux = v.mul_vec(n);
                        assert!(flux[0].abs() < 1e-13 && flux[1].abs() < 1e-13, "k={k} a={a} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_points_outside() {
        let g = triangle();
        let b = LagrangeBasis::new(3).unwrap();
        assert!(eval_stress_basis(&b, 0, &SymMatrix2::IDENTITY, &g, Point2::new(5.0, 5.0)).is_err());
    }
}
