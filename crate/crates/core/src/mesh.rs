//! Unit-square triangulations with uniform red refinement.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, o: Point2) -> [f64; 2] {
        [self.x - o.x, self.y - o.y]
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }
}

/// A counterclockwise triangle. Local edge `i` is opposite local vertex `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub edges: [usize; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    /// Endpoints, lower global index first.
    pub vertices: [usize; 2],
    /// One triangle for boundary edges, two for interior edges.
    pub triangles: Vec<usize>,
    /// Unit tangent pointing from `vertices[0]` to `vertices[1]`.
    pub tangent: [f64; 2],
    /// Tangent rotated a quarter turn counterclockwise.
    pub normal: [f64; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles.len() == 1
    }
}

/// Direction of the cut splitting the level-one unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Diagonal {
    /// From (0,0) to (1,1).
    #[default]
    NorthEast,
    /// From (1,0) to (0,1).
    NorthWest,
}

#[derive(Debug, Clone, Serialize)]
pub struct Mesh {
    pub points: Vec<Point2>,
    pub triangles: Vec<Triangle>,
    pub edges: Vec<Edge>,
    pub level: usize,
}

/// Affine map `x = B x̂ + x0` from the reference triangle and the gradients
/// of the barycentric coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub origin: Point2,
    /// Row-major `[[b11, b12], [b21, b22]]`; columns are `x1 - x0`, `x2 - x0`.
    pub jacobian: [[f64; 2]; 2],
    /// `det B`, twice the signed area.
    pub det: f64,
    /// `∇λ0, ∇λ1, ∇λ2`; rows `∇λ1ᵀ, ∇λ2ᵀ` form `B⁻¹`.
    pub bary_gradients: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn from_vertices(vertices: [Point2; 3]) -> Result<Self> {
        Self::from_vertices_indexed(vertices, 0)
    }

    fn from_vertices_indexed(v: [Point2; 3], index: usize) -> Result<Self> {
        let e1 = v[1].sub(v[0]);
        let e2 = v[2].sub(v[0]);
        let det = e1[0] * e2[1] - e2[0] * e1[1];
        let scale = (e1[0].hypot(e1[1]) * e2[0].hypot(e2[1])).max(f64::MIN_POSITIVE);
        if !det.is_finite() || det.abs() <= 1e-14 * scale {
            return Err(Error::DegenerateTriangle { index, area: det / 2.0 });
        }
        let n1 = [e2[1] / det, -e2[0] / det];
        let n2 = [-e1[1] / det, e1[0] / det];
        let n0 = [-n1[0] - n2[0], -n1[1] - n2[1]];
        Ok(Self {
            origin: v[0],
            jacobian: [[e1[0], e2[0]], [e1[1], e2[1]]],
            det,
            bary_gradients: [n0, n1, n2],
        })
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }

    pub fn to_physical(&self, bary: &[f64; 3]) -> Point2 {
        let b = &self.jacobian;
        Point2::new(
            self.origin.x + b[0][0] * bary[1] + b[0][1] * bary[2],
            self.origin.y + b[1][0] * bary[1] + b[1][1] * bary[2],
        )
    }

    pub fn barycentric(&self, p: Point2) -> [f64; 3] {
        let d = p.sub(self.origin);
        let [_, n1, n2] = self.bary_gradients;
        let l1 = n1[0] * d[0] + n1[1] * d[1];
        let l2 = n2[0] * d[0] + n2[1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }

    /// Physical gradient from a gradient with respect to `(λ1, λ2)`.
    #[inline]
    pub fn push_gradient(&self, reference: [f64; 2]) -> [f64; 2] {
        let [_, n1, n2] = self.bary_gradients;
        [
            reference[0] * n1[0] + reference[1] * n2[0],
            reference[0] * n1[1] + reference[1] * n2[1],
        ]
    }
}

impl Mesh {
    /// Unit square cut along the north-east diagonal, refined `level - 1` times.
    pub fn unit_square(level: usize) -> Result<Self> {
        Self::unit_square_with(level, Diagonal::NorthEast)
    }

    pub fn unit_square_with(level: usize, diagonal: Diagonal) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidLevel(level));
        }
        let points = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let triangles = match diagonal {
            Diagonal::NorthEast => vec![[0, 1, 2], [0, 2, 3]],
            Diagonal::NorthWest => vec![[0, 1, 3], [1, 2, 3]],
        };
        let mut mesh = Self::from_triangles(points, triangles, 1)?;
        for _ in 1..level {
            mesh = mesh.refine()?;
        }
        Ok(mesh)
    }

    /// Builds edges and adjacency from counterclockwise vertex triples.
    pub fn from_triangles(points: Vec<Point2>, tris: Vec<[usize; 3]>, level: usize) -> Result<Self> {
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut triangles = Vec::with_capacity(tris.len());
        for (t, v) in tris.iter().enumerate() {
            for &i in v {
                if i >= points.len() {
                    return Err(Error::IndexOutOfRange { index: i, len: points.len() });
                }
            }
            let geom = ElementGeometry::from_vertices_indexed(v.map(|i| points[i]), t)?;
            if geom.det < 0.0 {
                return Err(Error::DegenerateTriangle { index: t, area: geom.det / 2.0 });
            }
            let mut ids = [0usize; 3];
            for (i, id) in ids.iter_mut().enumerate() {
                let a = v[(i + 1) % 3];
                let b = v[(i + 2) % 3];
                let key = (a.min(b), a.max(b));
                *id = *edge_index.entry(key).or_insert_with(|| {
                    let (p, q) = (points[key.0], points[key.1]);
                    let d = q.sub(p);
                    let len = d[0].hypot(d[1]);
                    let tangent = [d[0] / len, d[1] / len];
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        triangles: Vec::with_capacity(2),
                        tangent,
                        normal: [-tangent[1], tangent[0]],
                    });
                    edges.len() - 1
                });
                edges[*id].triangles.push(t);
            }
            triangles.push(Triangle { vertices: *v, edges: ids });
        }
        Ok(Self { points, triangles, edges, level })
    }

    /// Red refinement: each triangle splits into four congruent children
    /// through its edge midpoints. Existing vertices keep their indices.
    pub fn refine(&self) -> Result<Self> {
        let mut points = self.points.clone();
        let midpoint: Vec<usize> = self
            .edges
            .iter()
            .map(|e| {
                points.push(self.points[e.vertices[0]].lerp(self.points[e.vertices[1]], 0.5));
                points.len() - 1
            })
            .collect();
        let mut tris = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let [a, b, c] = t.vertices;
            // midpoint opposite vertex i sits on local edge i
            let m_bc = midpoint[t.edges[0]];
            let m_ca = midpoint[t.edges[1]];
            let m_ab = midpoint[t.edges[2]];
            tris.push([a, m_ab, m_ca]);
            tris.push([m_ab, b, m_bc]);
            tris.push([m_ca, m_bc, c]);
            tris.push([m_bc, m_ca, m_ab]);
        }
        Self::from_triangles(points, tris, self.level + 1)
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices_of(&self, t: usize) -> [Point2; 3] {
        self.triangles[t].vertices.map(|i| self.points[i])
    }

    pub fn element_geometry(&self, t: usize) -> Result<ElementGeometry> {
        let tri = self
            .triangles
            .get(t)
            .ok_or(Error::IndexOutOfRange { index: t, len: self.triangles.len() })?;
        ElementGeometry::from_vertices_indexed(tri.vertices.map(|i| self.points[i]), t)
    }

    pub fn geometries(&self) -> Result<Vec<ElementGeometry>> {
        (0..self.num_triangles()).map(|t| self.element_geometry(t)).collect()
    }

    /// Per-edge `(tangent, normal)` frames.
    pub fn edge_frames(&self) -> Vec<([f64; 2], [f64; 2])> {
        self.edges.iter().map(|e| (e.tangent, e.normal)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
