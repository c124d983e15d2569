//! Global numbering of the stress and displacement spaces.
//!
//! Stress unknowns are numbered class by class: three per vertex, two flux
//! functions per edge node, one bubble per edge node and adjacent element,
//! and three per element-interior node. Each element sees exactly
//! `3 · dim P_k` of them, so element matrices are dense square blocks.

use serde::Serialize;

use crate::elements::{
    eval_stress_basis, DisplacementBasis, EdgeMatrixFrame, GlobalNode, LagrangeBasis, MatrixDirection, NodeKind,
    StressBasisFunction, StressClass, SymMatrix2,
};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point2};

pub const SUPPORTED_DEGREES: [usize; 3] = [3, 4, 5];

pub fn check_degree(k: usize) -> Result<()> {
    if SUPPORTED_DEGREES.contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree { degree: k, reason: "supported degrees are k = 3, 4, 5" })
    }
}

/// One stress shape function as seen from one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalStressDof {
    /// Local Lagrange node index.
    pub node: usize,
    pub matrix: SymMatrix2,
    pub global: usize,
    pub sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassCounts {
    pub vertex: usize,
    pub edge_flux: usize,
    pub edge_bubble: usize,
    pub volume: usize,
}

/// Deliberate defects used as negative controls by the verification checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// Negate the restriction of a function to one element of its support.
    FlipSign { function: usize, element: usize },
    /// Give an edge bubble the normal direction `n nᵀ` instead of `t tᵀ`.
    BubbleNormalDirection { function: usize },
}

#[derive(Debug, Clone)]
pub struct StressSpace {
    pub k: usize,
    pub basis: LagrangeBasis,
    pub functions: Vec<StressBasisFunction>,
    pub element_dofs: Vec<Vec<LocalStressDof>>,
    pub counts: ClassCounts,
}

/// `3|V| + 2(k-1)|E| + (3(k-1)(k-2)/2 + 3(k-1))|K|`.
pub fn stress_dimension(num_vertices: usize, num_edges: usize, num_triangles: usize, k: usize) -> usize {
    3 * num_vertices + 2 * (k - 1) * num_edges + (3 * (k - 1) * (k - 2) / 2 + 3 * (k - 1)) * num_triangles
}

/// `k(k+1)|K|`.
pub fn displacement_dimension(num_triangles: usize, k: usize) -> usize {
    k * (k + 1) * num_triangles
}

impl StressSpace {
    pub fn build(mesh: &Mesh, k: usize) -> Result<Self> {
        check_degree(k)?;
        let basis = LagrangeBasis::new(k)?;
        let km1 = k - 1;
        let n_interior = basis.nodes.count_interior();
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let nt = mesh.num_triangles();

        let mut vertex_support = vec![Vec::new(); nv];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for &v in &tri.vertices {
                vertex_support[v].push(t);
            }
        }

        let flux_offset = 3 * nv;
        let bubble_offset = flux_offset + 2 * km1 * ne;
        let mut bubble_base = Vec::with_capacity(ne);
        let mut next = bubble_offset;
        for e in &mesh.edges {
            bubble_base.push(next);
            next += km1 * e.triangles.len();
        }
        let volume_offset = next;
        let dim = volume_offset + 3 * n_interior * nt;
        let frames: Vec<EdgeMatrixFrame> = mesh.edges.iter().map(EdgeMatrixFrame::from_edge).collect();

        let mut functions = Vec::with_capacity(dim);
        for (v, support) in vertex_support.iter().enumerate() {
            for i in 1..=3u8 {
                functions.push(StressBasisFunction {
                    class: StressClass::Vertex,
                    node: GlobalNode::Vertex(v),
                    direction: MatrixDirection::Canonical(i),
                    matrix: SymMatrix2::canonical(i),
                    support: support.clone(),
                });
            }
        }
        for (e, edge) in mesh.edges.iter().enumerate() {
            for step in 1..k {
                for i in 0..2u8 {
                    functions.push(StressBasisFunction {
                        class: StressClass::EdgeFlux,
                        node: GlobalNode::Edge { edge: e, step },
                        direction: MatrixDirection::EdgeComplement(i + 1),
                        matrix: frames[e].complements[i as usize],
                        support: edge.triangles.clone(),
                    });
                }
            }
        }
        for (e, edge) in mesh.edges.iter().enumerate() {
            for step in 1..k {
                for &t in &edge.triangles {
                    functions.push(StressBasisFunction {
                        class: StressClass::EdgeBubble,
                        node: GlobalNode::Edge { edge: e, step },
                        direction: MatrixDirection::EdgeTangent,
                        matrix: frames[e].tangent,
                        support: vec![t],
                    });
                }
            }
        }
        let interior_nodes: Vec<usize> = basis
            .nodes
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, NodeKind::Interior { .. }))
            .map(|(a, _)| a)
            .collect();
        for t in 0..nt {
            for &a in &interior_nodes {
                for i in 1..=3u8 {
                    functions.push(StressBasisFunction {
                        class: StressClass::Volume,
                        node: GlobalNode::Interior { element: t, node: a },
                        direction: MatrixDirection::Canonical(i),
                        matrix: SymMatrix2::canonical(i),
                        support: vec![t],
                    });
                }
            }
        }
        debug_assert_eq!(functions.len(), dim);

        let mut element_dofs = Vec::with_capacity(nt);
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let mut dofs = Vec::with_capacity(3 * basis.len());
            let mut interior_counter = 0;
            for (a, node) in basis.nodes.nodes.iter().enumerate() {
                match node.kind {
                    NodeKind::Vertex(i) => {
                        let v = tri.vertices[i];
                        for d in 0..3u8 {
                            dofs.push(LocalStressDof {
                                node: a,
                                matrix: SymMatrix2::canonical(d + 1),
                                global: 3 * v + d as usize,
                                sign: 1.0,
                            });
                        }
                    }
                    NodeKind::Edge { edge: i, j } => {
                        let e = tri.edges[i];
                        let edge = &mesh.edges[e];
                        // node weight j/k sits on local vertex i-1
                        let step = if edge.vertices[1] == tri.vertices[(i + 2) % 3] { j } else { k - j };
                        let flux = flux_offset + 2 * (e * km1 + step - 1);
                        for d in 0..2 {
                            dofs.push(LocalStressDof {
                                node: a,
                                matrix: frames[e].complements[d],
                                global: flux + d,
                                sign: 1.0,
                            });
                        }
                        let pos = edge.triangles.iter().position(|&s| s == t).expect("edge adjacency");
                        dofs.push(LocalStressDof {
                            node: a,
                            matrix: frames[e].tangent,
                            global: bubble_base[e] + (step - 1) * edge.triangles.len() + pos,
                            sign: 1.0,
                        });
                    }
                    NodeKind::Interior { .. } => {
                        let base = volume_offset + 3 * (t * n_interior + interior_counter);
                        interior_counter += 1;
                        for d in 0..3u8 {
                            dofs.push(LocalStressDof {
                                node: a,
                                matrix: SymMatrix2::canonical(d + 1),
                                global: base + d as usize,
                                sign: 1.0,
                            });
                        }
                    }
                }
            }
            element_dofs.push(dofs);
        }

        let counts = ClassCounts {
            vertex: 3 * nv,
            edge_flux: 2 * km1 * ne,
            edge_bubble: volume_offset - bubble_offset,
            volume: 3 * n_interior * nt,
        };
        Ok(Self { k, basis, functions, element_dofs, counts })
    }

    pub fn build_corrupted(mesh: &Mesh, k: usize, corruption: Corruption) -> Result<Self> {
        let mut space = Self::build(mesh, k)?;
        match corruption {
            Corruption::FlipSign { function, element } => {
                let dof = space.local_dof_mut(function, element)?;
                dof.sign = -dof.sign;
            }
            Corruption::BubbleNormalDirection { function } => {
                let f = space
                    .functions
                    .get(function)
                    .ok_or(Error::IndexOutOfRange { index: function, len: space.dim() })?;
                let (GlobalNode::Edge { edge, .. }, StressClass::EdgeBubble) = (f.node, f.class) else {
                    return Err(Error::DimensionMismatch(format!("function {function} is not an edge bubble")));
                };
                let element = f.support[0];
                let normal = EdgeMatrixFrame::from_edge(&mesh.edges[edge]).complements[0];
                space.local_dof_mut(function, element)?.matrix = normal;
            }
        }
        Ok(space)
    }

    fn local_dof_mut(&mut self, function: usize, element: usize) -> Result<&mut LocalStressDof> {
        self.element_dofs
            .get_mut(element)
            .and_then(|d| d.iter_mut().find(|d| d.global == function))
            .ok_or(Error::OutsideSupport { function, element })
    }

    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    pub fn local_dof(&self, function: usize, element: usize) -> Option<&LocalStressDof> {
        self.element_dofs.get(element)?.iter().find(|d| d.global == function)
    }

    /// Value and divergence of global function `function` restricted to `element`.
    pub fn eval(&self, mesh: &Mesh, function: usize, element: usize, point: Point2) -> Result<(SymMatrix2, [f64; 2])> {
        if function >= self.dim() {
            return Err(Error::IndexOutOfRange { index: function, len: self.dim() });
        }
        let dof = self.local_dof(function, element).ok_or(Error::OutsideSupport { function, element })?;
        let geom = mesh.element_geometry(element)?;
        eval_stress_basis(&self.basis, dof.node, &dof.matrix.scale(dof.sign), &geom, point)
    }
}

#[derive(Debug, Clone)]
pub struct DisplacementSpace {
    pub k: usize,
    pub basis: DisplacementBasis,
    pub num_elements: usize,
}

impl DisplacementSpace {
    pub fn build(mesh: &Mesh, k: usize) -> Result<Self> {
        check_degree(k)?;
        Ok(Self { k, basis: DisplacementBasis::new(k)?, num_elements: mesh.num_triangles() })
    }

    pub fn dim(&self) -> usize {
        self.num_elements * self.per_element()
    }

    pub fn per_element(&self) -> usize {
        self.basis.len()
    }

    /// Global index of scalar mode `mode` of component `component` on `element`.
    pub fn index(&self, element: usize, component: usize, mode: usize) -> usize {
        element * self.per_element() + component * self.basis.scalar_len() + mode
    }

    pub fn element_range(&self, element: usize) -> std::ops::Range<usize> {
        let n = self.per_element();
        element * n..(element + 1) * n
    }
}
