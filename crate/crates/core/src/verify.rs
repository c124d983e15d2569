//! Numerical certification of the element's stability properties: normal
//! continuity, `div Σ_h ⊂ V_h`, the local bubble divergence map, rigid-motion
//! orthogonality, the discrete inf-sup constant, and independence of the
//! three rank-one edge matrices.
//!
//! Every check has a deliberate defect ([`NegativeControl`]) that it must
//! detect.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{assemble_with, LoadModel};
use crate::elements::{LagrangeBasis, NodeKind, OrthonormalPolynomials, StressClass, SymMatrix2};
use crate::error::{Error, Result};
use crate::mesh::{Diagonal, ElementGeometry, Mesh, Point2};
use crate::quadrature::{edge_rule, triangle_rule, QuadratureRule};
use crate::spaces::{check_degree, Corruption, DisplacementSpace, StressSpace};

pub const CONFORMITY_TOLERANCE: f64 = 1e-12;
pub const INCLUSION_TOLERANCE: f64 = 1e-12;
pub const RIGID_MOTION_TOLERANCE: f64 = 1e-12;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;
pub const LEMMA3_TOLERANCE: f64 = 1e-10;
/// Largest stress dimension for the dense inf-sup eigenproblem.
pub const INFSUP_DIMENSION_CAP: usize = 4000;

/// A deliberate defect that the corresponding check must report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeControl {
    /// Negate one vertex function on one side of an interior edge.
    FlipSign,
    /// Give one interior edge bubble the matrix `n nᵀ` instead of `t tᵀ`.
    BubbleNormal,
    /// Project divergences onto `P_{k-2}` instead of `P_{k-1}`.
    ProjectionDegree,
    /// Test rigid-motion orthogonality with vertex functions, not bubbles.
    NonBubble,
}

impl NegativeControl {
    pub const ALL: [NegativeControl; 4] = [Self::FlipSign, Self::BubbleNormal, Self::ProjectionDegree, Self::NonBubble];

    pub fn name(self) -> &'static str {
        match self {
            Self::FlipSign => "flip-sign",
            Self::BubbleNormal => "bubble-normal",
            Self::ProjectionDegree => "projection-degree",
            Self::NonBubble => "non-bubble",
        }
    }
}

impl fmt::Display for NegativeControl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NegativeControl {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown negative control '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeOffender {
    pub edge: usize,
    pub function: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformityReport {
    pub interior_edges: usize,
    /// Largest `|[σ·n]|` over interior edges, functions and edge Gauss points.
    pub max_jump: f64,
    pub worst: Option<EdgeOffender>,
    pub passed: bool,
}

/// Normal-flux jumps of every stress basis function across every interior
/// edge. Basis functions have unit nodal values and unit-norm matrices, so
/// the jump is measured in absolute terms.
pub fn check_hdiv_conformity(mesh: &Mesh, space: &StressSpace) -> Result<ConformityReport> {
    let rule = edge_rule(2 * space.k);
    let geoms = mesh.geometries()?;
    let n = space.basis.len();
    let interior: Vec<usize> = (0..mesh.num_edges()).filter(|&e| !mesh.edges[e].is_boundary()).collect();

    let per_edge: Vec<(f64, Option<EdgeOffender>)> = interior
        .par_iter()
        .map(|&e| {
            let edge = &mesh.edges[e];
            let (p, q) = (mesh.points[edge.vertices[0]], mesh.points[edge.vertices[1]]);
            let mut jumps: BTreeMap<usize, Vec<[f64; 2]>> = BTreeMap::new();
            let mut vals = vec![0.0; n];
            let mut grads = vec![[0.0; 2]; n];
            for (side, &t) in edge.triangles.iter().enumerate() {
                let s = if side == 0 { 1.0 } else { -1.0 };
                for (iq, &x) in rule.points.iter().enumerate() {
                    let b = geoms[t].barycentric(p.lerp(q, x));
                    space.basis.eval_into(b[1], b[2], &mut vals, &mut grads);
                    for d in &space.element_dofs[t] {
                        let flux = d.matrix.mul_vec(edge.normal);
                        let c = s * d.sign * vals[d.node];
                        let j = jumps.entry(d.global).or_insert_with(|| vec![[0.0; 2]; rule.len()]);
                        j[iq][0] += c * flux[0];
                        j[iq][1] += c * flux[1];
                    }
                }
            }
            let mut worst = (0.0, None);
            for (&function, v) in &jumps {
                let m = v.iter().map(|j| j[0].hypot(j[1])).fold(0.0, f64::max);
                if m > worst.0 || worst.1.is_none() {
                    worst = (m, Some(EdgeOffender { edge: e, function }));
                }
            }
            worst
        })
        .collect();

    let (max_jump, worst) = per_edge
        .into_iter()
        .fold((0.0, None), |a, b| if b.0 > a.0 || a.1.is_none() { b } else { a });
    Ok(ConformityReport {
        interior_edges: interior.len(),
        max_jump,
        worst,
        passed: max_jump <= CONFORMITY_TOLERANCE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementOffender {
    pub element: usize,
    pub function: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub projection_degree: usize,
    /// Largest `‖div φ - Π div φ‖ / ‖div φ‖` over elements and functions.
    pub max_residual: f64,
    pub worst: Option<ElementOffender>,
    pub passed: bool,
}

/// `L²`-projects the divergence of every stress function on every element
/// onto `P_{k-1}` and reports the relative residual.
pub fn check_div_inclusion(mesh: &Mesh, space: &StressSpace) -> Result<InclusionReport> {
    check_div_inclusion_onto(mesh, space, space.k - 1)
}

/// [`check_div_inclusion`] with an arbitrary projection degree.
pub fn check_div_inclusion_onto(mesh: &Mesh, space: &StressSpace, degree: usize) -> Result<InclusionReport> {
    let rule = triangle_rule(2 * space.k)?;
    let tab = space.basis.tabulate(&rule);
    let poly = OrthonormalPolynomials::new(degree)?;
    let psi: Vec<Vec<f64>> = rule.points.iter().map(|p| poly.eval(p[1], p[2])).collect();
    let geoms = mesh.geometries()?;

    let per_element: Vec<(f64, Option<ElementOffender>)> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = &geoms[t];
            let mut worst = (0.0, None);
            for d in &space.element_dofs[t] {
                let div: Vec<[f64; 2]> = (0..rule.len())
                    .map(|q| {
                        let g = d.matrix.mul_vec(geom.push_gradient(tab.grad(q, d.node)));
                        [d.sign * g[0], d.sign * g[1]]
                    })
                    .collect();
                let r = projection_residual(&rule, &psi, &div);
                if r > worst.0 || worst.1.is_none() {
                    worst = (r, Some(ElementOffender { element: t, function: d.global }));
                }
            }
            worst
        })
        .collect();

    let (max_residual, worst) = per_element
        .into_iter()
        .fold((0.0, None), |a, b| if b.0 > a.0 || a.1.is_none() { b } else { a });
    Ok(InclusionReport {
        projection_degree: degree,
        max_residual,
        worst,
        passed: max_residual <= INCLUSION_TOLERANCE,
    })
}

/// Relative `L²` distance of a vector field sampled at `rule` from the span
/// of the orthonormal modes `psi`.
fn projection_residual(rule: &QuadratureRule, psi: &[Vec<f64>], f: &[[f64; 2]]) -> f64 {
    let nm = psi[0].len();
    let mut coef = vec![[0.0; 2]; nm];
    for (q, w) in rule.weights.iter().enumerate() {
        for m in 0..nm {
            for c in 0..2 {
                coef[m][c] += 0.5 * w * f[q][c] * psi[q][m];
            }
        }
    }
    let (mut res, mut norm) = (0.0, 0.0);
    for (q, w) in rule.weights.iter().enumerate() {
        for c in 0..2 {
            let proj: f64 = (0..nm).map(|m| coef[m][c] * psi[q][m]).sum();
            res += w * (f[q][c] - proj).powi(2);
            norm += w * f[q][c].powi(2);
        }
    }
    if norm > 0.0 {
        (res / norm).sqrt()
    } else {
        res.sqrt()
    }
}

/// Local stress families used by the element-level checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalFamily {
    /// `λ_{i+1} λ_{i+2} p t_i t_iᵀ`, `p ∈ P_{k-2}`, for the three edges.
    EdgeBubbles,
    /// Degree-`k` Lagrange vertex functions times `T1`, `T2`, `T3`.
    VertexFunctions,
}

/// Translates the centroid to the origin and scales the diameter to one.
fn normalized(vertices: [Point2; 3]) -> Result<([Point2; 3], ElementGeometry)> {
    let c = Point2::new(
        (vertices[0].x + vertices[1].x + vertices[2].x) / 3.0,
        (vertices[0].y + vertices[1].y + vertices[2].y) / 3.0,
    );
    let diam = (0..3)
        .map(|i| {
            let d = vertices[(i + 1) % 3].sub(vertices[i]);
            d[0].hypot(d[1])
        })
        .fold(0.0, f64::max);
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(Error::DegenerateTriangle { index: 0, area: 0.0 });
    }
    let v = vertices.map(|p| Point2::new((p.x - c.x) / diam, (p.y - c.y) / diam));
    let geom = ElementGeometry::from_vertices(v)?;
    Ok((v, geom))
}

fn check_local_degree(k: usize) -> Result<()> {
    if (3..=8).contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree { degree: k, reason: "local checks need 3 <= k <= 8" })
    }
}

fn powi(x: f64, n: usize) -> f64 {
    x.powi(n as i32)
}

/// Divergence of every function of `family` at the points of `rule`,
/// indexed `[function][point]`.
fn local_divergences(
    k: usize,
    family: LocalFamily,
    vertices: &[Point2; 3],
    geom: &ElementGeometry,
    rule: &QuadratureRule,
) -> Result<Vec<Vec<[f64; 2]>>> {
    // gradients of λ0, λ1, λ2 with respect to (λ1, λ2)
    const DL: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    match family {
        LocalFamily::EdgeBubbles => {
            let mut out = Vec::new();
            for i in 0..3 {
                let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                let d = vertices[l].sub(vertices[j]);
                let len = d[0].hypot(d[1]);
                let tt = SymMatrix2::outer([d[0] / len, d[1] / len]);
                for total in 0..=k - 2 {
                    for b in 0..=total {
                        let a = total - b;
                        let f = rule
                            .points
                            .iter()
                            .map(|lam| {
                                let (l1, l2) = (lam[1], lam[2]);
                                let m = powi(l1, a) * powi(l2, b);
                                let dm = [
                                    if a > 0 { a as f64 * powi(l1, a - 1) * powi(l2, b) } else { 0.0 },
                                    if b > 0 { b as f64 * powi(l1, a) * powi(l2, b - 1) } else { 0.0 },
                                ];
                                let bub = lam[j] * lam[l];
                                let db = [0, 1].map(|r| lam[l] * DL[j][r] + lam[j] * DL[l][r]);
                                let grad = [0, 1].map(|r| m * db[r] + bub * dm[r]);
                                tt.mul_vec(geom.push_gradient(grad))
                            })
                            .collect();
                        out.push(f);
                    }
                }
            }
            Ok(out)
        }
        LocalFamily::VertexFunctions => {
            let basis = LagrangeBasis::new(k)?;
            let tab = basis.tabulate(rule);
            let mut out = Vec::new();
            for (a, node) in basis.nodes.nodes.iter().enumerate() {
                if !matches!(node.kind, NodeKind::Vertex(_)) {
                    continue;
                }
                for i in 1..=3 {
                    let m = SymMatrix2::canonical(i);
                    out.push((0..rule.len()).map(|q| m.mul_vec(geom.push_gradient(tab.grad(q, a)))).collect());
                }
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalRank {
    pub rank: usize,
    pub nullity: usize,
    pub singular_values: Vec<f64>,
}

/// `(k² + k - 3, dim P_{k-4})`.
pub fn expected_local_rank(k: usize) -> (usize, usize) {
    let nullity = if k >= 4 { (k - 3) * (k - 2) / 2 } else { 0 };
    (k * k + k - 3, nullity)
}

/// Rank and nullity of the divergence map from the local bubble space into
/// `P_{k-1}²`, computed in a frame where the triangle has unit diameter.
pub fn local_divergence_rank(k: usize, vertices: [Point2; 3]) -> Result<LocalRank> {
    check_local_degree(k)?;
    let (v, geom) = normalized(vertices)?;
    let rule = triangle_rule(2 * k)?;
    let divs = local_divergences(k, LocalFamily::EdgeBubbles, &v, &geom, &rule)?;
    let poly = OrthonormalPolynomials::new(k - 1)?;
    let nm = poly.len();
    let mut d = DMatrix::<f64>::zeros(2 * nm, divs.len());
    for (q, (p, w)) in rule.iter().enumerate() {
        let psi = poly.eval(p[1], p[2]);
        for (j, f) in divs.iter().enumerate() {
            for m in 0..nm {
                for c in 0..2 {
                    d[(c * nm + m, j)] += 0.5 * w * f[q][c] * psi[m];
                }
            }
        }
    }
    let mut sv: Vec<f64> = d.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > RANK_THRESHOLD * top).count();
    Ok(LocalRank { rank, nullity: divs.len() - rank, singular_values: sv })
}

/// Largest `|∫_K div τ · r| / (‖div τ‖ ‖r‖)` over the functions `τ` of
/// `family` and the rigid motions `r ∈ {(1,0), (0,1), (-y,x)}`.
pub fn rigid_motion_orthogonality(k: usize, vertices: [Point2; 3], family: LocalFamily) -> Result<f64> {
    Ok(rigid_motion_moments(k, vertices, family)?.into_iter().flatten().map(f64::abs).fold(0.0, f64::max))
}

/// Relative moments `[function][rigid mode]` behind [`rigid_motion_orthogonality`].
pub(crate) fn rigid_motion_moments(k: usize, vertices: [Point2; 3], family: LocalFamily) -> Result<Vec<[f64; 3]>> {
    check_local_degree(k)?;
    let (v, geom) = normalized(vertices)?;
    let rule = triangle_rule(2 * k)?;
    let divs = local_divergences(k, family, &v, &geom, &rule)?;
    let modes: Vec<[[f64; 2]; 3]> = rule
        .points
        .iter()
        .map(|lam| {
            let x = geom.to_physical(lam);
            [[1.0, 0.0], [0.0, 1.0], [-x.y, x.x]]
        })
        .collect();
    let mut mode_norm = [0.0; 3];
    for (q, w) in rule.weights.iter().enumerate() {
        for (r, n) in mode_norm.iter_mut().enumerate() {
            let m = modes[q][r];
            *n += w * (m[0] * m[0] + m[1] * m[1]);
        }
    }
    Ok(divs
        .iter()
        .map(|f| {
            let mut dot = [0.0; 3];
            let mut norm = 0.0;
            for (q, w) in rule.weights.iter().enumerate() {
                norm += w * (f[q][0] * f[q][0] + f[q][1] * f[q][1]);
                for (r, d) in dot.iter_mut().enumerate() {
                    *d += w * (f[q][0] * modes[q][r][0] + f[q][1] * modes[q][r][1]);
                }
            }
            [0, 1, 2].map(|r| dot[r] / (norm * mode_norm[r]).sqrt())
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfSupEstimate {
    pub k: usize,
    pub level: usize,
    pub dim_stress: usize,
    pub dim_displacement: usize,
    /// Smallest generalized singular value of `B`.
    pub beta: f64,
    /// Largest eigenvalue of `B X⁻¹ Bᵀ`; at most one.
    pub lambda_max: f64,
}

impl InfSupEstimate {
    /// `β² > 1e-10 λ_max`: clear of the roundoff floor of a singular `B`.
    pub fn is_positive(&self) -> bool {
        self.beta * self.beta > 1e-10 * self.lambda_max
    }
}

/// `β_h² = λ_min(B X⁻¹ Bᵀ)` with `X = G + BᵀB` the `H(div)` Gram matrix of
/// the stress space. The displacement basis is orthonormal, so `N = I` and
/// `‖div τ‖² = |Bτ|²`.
pub fn discrete_infsup_estimate(mesh: &Mesh, k: usize) -> Result<InfSupEstimate> {
    let stress = StressSpace::build(mesh, k)?;
    infsup_for_space(mesh, &stress)
}

fn infsup_for_space(mesh: &Mesh, stress: &StressSpace) -> Result<InfSupEstimate> {
    let k = stress.k;
    let disp = DisplacementSpace::build(mesh, k)?;
    if stress.dim() > INFSUP_DIMENSION_CAP {
        return Err(Error::DimensionCap { size: stress.dim(), cap: INFSUP_DIMENSION_CAP });
    }
    let sys = assemble_with(mesh, stress, &disp, |s| *s, |_| [0.0, 0.0], LoadModel::Projected, true)?;
    let b = sys.divergence.to_dense();
    let x = sys.stress_mass.to_dense() + b.transpose() * &b;
    let chol = x.cholesky().ok_or(Error::Dense("H(div) Gram matrix is not positive definite"))?;
    let w = chol
        .l()
        .solve_lower_triangular(&b.transpose())
        .ok_or(Error::Dense("triangular solve failed"))?;
    let s = w.transpose() * w;
    let eig = s.symmetric_eigenvalues();
    let lambda_min = eig.min();
    Ok(InfSupEstimate {
        k,
        level: mesh.level,
        dim_stress: stress.dim(),
        dim_displacement: disp.dim(),
        beta: lambda_min.max(0.0).sqrt(),
        lambda_max: eig.max(),
    })
}

/// The matrix whose columns hold `(x², y², xy)` of `v1`, `v2` and `v1 + v2`.
pub fn lemma3_matrix(v1: [f64; 2], v2: [f64; 2]) -> [[f64; 3]; 3] {
    let v0 = [v1[0] + v2[0], v1[1] + v2[1]];
    let col = |v: [f64; 2]| [v[0] * v[0], v[1] * v[1], v[0] * v[1]];
    let (a, b, c) = (col(v1), col(v2), col(v0));
    [[a[0], b[0], c[0]], [a[1], b[1], c[1]], [a[2], b[2], c[2]]]
}

/// Determinant of [`lemma3_matrix`] by cofactor expansion.
pub fn lemma3_check(v1: [f64; 2], v2: [f64; 2]) -> f64 {
    let m = lemma3_matrix(v1, v2);
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `(a₁b₂ - a₂b₁)³`.
pub fn lemma3_expected(v1: [f64; 2], v2: [f64; 2]) -> f64 {
    (v1[0] * v2[1] - v1[1] * v2[0]).powi(3)
}

/// Error of [`lemma3_check`] relative to `(|v1| |v2|)³`, the scale of both
/// sides.
pub fn lemma3_error(v1: [f64; 2], v2: [f64; 2]) -> f64 {
    let scale = (v1[0].hypot(v1[1]) * v2[0].hypot(v2[1])).powi(3);
    (lemma3_check(v1, v2) - lemma3_expected(v1, v2)).abs() / scale
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Report {
    pub pairs: usize,
    pub max_relative_error: f64,
    /// The determinant for `v1 = (1,2)`, `v2 = (3,4)`; `-8`.
    pub example: f64,
    pub passed: bool,
}

/// Checks the determinant identity on `pairs` random pairs with entries in
/// `[-1, 1]`.
pub fn lemma3_random(pairs: usize, seed: u64) -> Lemma3Report {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < pairs {
        let v1 = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let v2 = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if v1[0] * v2[1] - v1[1] * v2[0] == 0.0 {
            continue;
        }
        worst = worst.max(lemma3_error(v1, v2));
        done += 1;
    }
    let example = lemma3_check([1.0, 2.0], [3.0, 4.0]);
    Lemma3Report {
        pairs,
        max_relative_error: worst,
        example,
        passed: worst <= LEMMA3_TOLERANCE && (example + 8.0).abs() <= LEMMA3_TOLERANCE * 8.0,
    }
}

/// Counterclockwise triangles in the unit square with shape quality
/// `4√3 |K| / Σ|e|²` above 0.05 (one for the equilateral triangle).
pub fn random_triangles(count: usize, seed: u64) -> Vec<[Point2; 3]> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut v: [Point2; 3] = std::array::from_fn(|_| Point2::new(rng.random(), rng.random()));
        let e1 = v[1].sub(v[0]);
        let e2 = v[2].sub(v[0]);
        let area2 = e1[0] * e2[1] - e1[1] * e2[0];
        let sq: f64 = (0..3)
            .map(|i| {
                let d = v[(i + 1) % 3].sub(v[i]);
                d[0] * d[0] + d[1] * d[1]
            })
            .sum();
        if 2.0 * 3f64.sqrt() * area2.abs() / sq <= 0.05 {
            continue;
        }
        if area2 < 0.0 {
            v.swap(1, 2);
        }
        out.push(v);
    }
    out
}

pub fn reference_triangle() -> [Point2; 3] {
    [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalRankReport {
    pub expected_rank: usize,
    pub expected_nullity: usize,
    /// On the reference triangle.
    pub rank: usize,
    pub nullity: usize,
    pub random_triangles: usize,
    /// Random triangles with a different rank or nullity.
    pub mismatches: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidMotionReport {
    pub family: LocalFamily,
    pub triangles: usize,
    pub max_relative_moment: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfSupReport {
    pub estimate: Option<InfSupEstimate>,
    /// Why no estimate was computed.
    pub skipped: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub k: usize,
    pub level: usize,
    pub diagonal: Diagonal,
    pub random_triangles: usize,
    pub random_pairs: usize,
    pub seed: u64,
    pub negative_control: Option<NegativeControl>,
}

impl VerifyOptions {
    pub fn new(k: usize, level: usize) -> Self {
        Self {
            k,
            level,
            diagonal: Diagonal::NorthWest,
            random_triangles: 100,
            random_pairs: 1000,
            seed: 20_240_917,
            negative_control: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub options: VerifyOptions,
    pub conformity: ConformityReport,
    pub div_inclusion: InclusionReport,
    pub local_rank: LocalRankReport,
    pub rigid_motion: RigidMotionReport,
    pub inf_sup: InfSupReport,
    pub lemma3: Lemma3Report,
    pub failed_checks: Vec<&'static str>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The corruption applied to the stress space for `control`, if any.
fn corruption_for(mesh: &Mesh, space: &StressSpace, control: NegativeControl) -> Result<Option<Corruption>> {
    let interior_edge = |e: usize| !mesh.edges[e].is_boundary();
    match control {
        NegativeControl::FlipSign => {
            let e = (0..mesh.num_edges())
                .find(|&e| interior_edge(e))
                .ok_or_else(|| Error::DimensionMismatch("mesh has no interior edge".into()))?;
            let v = mesh.edges[e].vertices[0];
            // T2 n = (n_y, n_x) never vanishes
            Ok(Some(Corruption::FlipSign { function: 3 * v + 1, element: mesh.edges[e].triangles[0] }))
        }
        NegativeControl::BubbleNormal => {
            let function = space
                .functions
                .iter()
                .enumerate()
                .find(|(_, f)| {
                    f.class == StressClass::EdgeBubble
                        && matches!(f.node, crate::elements::GlobalNode::Edge { edge, .. } if interior_edge(edge))
                })
                .map(|(i, _)| i)
                .ok_or_else(|| Error::DimensionMismatch("no interior edge bubble".into()))?;
            Ok(Some(Corruption::BubbleNormalDirection { function }))
        }
        NegativeControl::ProjectionDegree | NegativeControl::NonBubble => Ok(None),
    }
}

/// Runs every check for one degree and mesh level.
pub fn run_verification(opts: &VerifyOptions) -> Result<VerificationReport> {
    check_degree(opts.k)?;
    let k = opts.k;
    let mesh = Mesh::unit_square_with(opts.level, opts.diagonal)?;
    let mut space = StressSpace::build(&mesh, k)?;
    if let Some(control) = opts.negative_control {
        if let Some(c) = corruption_for(&mesh, &space, control)? {
            space = StressSpace::build_corrupted(&mesh, k, c)?;
        }
    }
    let projection_degree = if opts.negative_control == Some(NegativeControl::ProjectionDegree) { k - 2 } else { k - 1 };
    let family = if opts.negative_control == Some(NegativeControl::NonBubble) {
        LocalFamily::VertexFunctions
    } else {
        LocalFamily::EdgeBubbles
    };

    let mut triangles = vec![reference_triangle()];
    triangles.extend(random_triangles(opts.random_triangles, opts.seed));

    let ((conformity, div_inclusion), (local, inf_sup)) = rayon::join(
        || {
            rayon::join(
                || check_hdiv_conformity(&mesh, &space),
                || check_div_inclusion_onto(&mesh, &space, projection_degree),
            )
        },
        || {
            rayon::join(
                || {
                    triangles
                        .par_iter()
                        .map(|&t| Ok((local_divergence_rank(k, t)?, rigid_motion_orthogonality(k, t, family)?)))
                        .collect::<Result<Vec<_>>>()
                },
                || match infsup_for_space(&mesh, &space) {
                    Ok(e) => Ok(InfSupReport { estimate: Some(e), skipped: None, passed: e.is_positive() }),
                    Err(Error::DimensionCap { size, cap }) => Ok(InfSupReport {
                        estimate: None,
                        skipped: Some(format!("stress dimension {size} exceeds the dense cap {cap}")),
                        passed: true,
                    }),
                    Err(e) => Err(e),
                },
            )
        },
    );
    let (conformity, div_inclusion, local, inf_sup) = (conformity?, div_inclusion?, local?, inf_sup?);

    let (expected_rank, expected_nullity) = expected_local_rank(k);
    let mismatches = local[1..]
        .iter()
        .filter(|(r, _)| (r.rank, r.nullity) != (expected_rank, expected_nullity))
        .count();
    let reference = &local[0].0;
    let local_rank = LocalRankReport {
        expected_rank,
        expected_nullity,
        rank: reference.rank,
        nullity: reference.nullity,
        random_triangles: local.len() - 1,
        mismatches,
        passed: mismatches == 0 && (reference.rank, reference.nullity) == (expected_rank, expected_nullity),
    };
    let max_moment = local.iter().map(|(_, m)| *m).fold(0.0, f64::max);
    let rigid_motion = RigidMotionReport {
        family,
        triangles: local.len(),
        max_relative_moment: max_moment,
        passed: max_moment <= RIGID_MOTION_TOLERANCE,
    };
    let lemma3 = lemma3_random(opts.random_pairs, opts.seed);

    let mut failed_checks = Vec::new();
    for (name, ok) in [
        ("hdiv-conformity", conformity.passed),
        ("div-inclusion", div_inclusion.passed),
        ("local-divergence-rank", local_rank.passed),
        ("rigid-motion-orthogonality", rigid_motion.passed),
        ("inf-sup", inf_sup.passed),
        ("outer-product-determinant", lemma3.passed),
    ] {
        if !ok {
            failed_checks.push(name);
        }
    }
    Ok(VerificationReport {
        options: opts.clone(),
        conformity,
        div_inclusion,
        local_rank,
        rigid_motion,
        inf_sup,
        lemma3,
        passed: failed_checks.is_empty(),
        failed_checks,
    })
}
