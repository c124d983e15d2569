//! Assembly of the stress–displacement saddle-point system
//!
//! ```text
//! [ M  Bᵀ ] [σ]   [0]
//! [ B  0  ] [u] = [F]
//! ```
//!
//! with `M_ij = (A φ_j, φ_i)`, `B_ij = (div φ_j, ψ_i)` and `F_i = (f, ψ_i)`.
//! The displacement condition `u = 0` on the boundary is natural in this
//! formulation: no row or column is modified for boundary conditions.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::elements::{LagrangeBasis, SymMatrix2, Tabulation};
use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Mesh, Point2};
use crate::quadrature::{triangle_rule, QuadratureRule};
use crate::sparse::{write_vector_market, CsrMatrix, TripletMatrix};
use crate::spaces::{DisplacementSpace, StressSpace};

/// Isotropic compliance `Aτ = (τ - λ/(2μ + 2λ) tr(τ) δ) / 2μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplianceTensor {
    pub mu: f64,
    pub lambda: f64,
}

impl ComplianceTensor {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && lambda > 0.0 && mu.is_finite() && lambda.is_finite()) {
            return Err(Error::InvalidMaterial { mu, lambda });
        }
        Ok(Self { mu, lambda })
    }

    #[inline]
    pub fn apply(&self, tau: &SymMatrix2) -> SymMatrix2 {
        let c = self.lambda / (2.0 * self.mu + 2.0 * self.lambda) * tau.trace();
        SymMatrix2::new(tau.a11 - c, tau.a12, tau.a22 - c).scale(1.0 / (2.0 * self.mu))
    }

    /// Inverse map: `σ = 2μ ε + λ tr(ε) δ`.
    pub fn stiffness(&self, eps: &SymMatrix2) -> SymMatrix2 {
        let t = self.lambda * eps.trace();
        SymMatrix2::new(2.0 * self.mu * eps.a11 + t, 2.0 * self.mu * eps.a12, 2.0 * self.mu * eps.a22 + t)
    }
}

/// Reference-element integrals shared by every element of a degree.
#[derive(Debug, Clone)]
pub(crate) struct ReferenceIntegrals {
    /// `∫ φ̂_a φ̂_b` over the reference triangle.
    pub scalar_mass: Vec<f64>,
    /// `∫ ∂_r φ̂_a ψ̂_m` for `r = λ1, λ2`, row-major `[r][a][m]`.
    pub grad_moments: Vec<f64>,
    pub n_scalar: usize,
    pub n_modes: usize,
}

impl ReferenceIntegrals {
    pub fn new(stress: &StressSpace, disp: &DisplacementSpace) -> Result<Self> {
        let k = stress.k;
        let rule = triangle_rule(2 * k)?;
        let tab = stress.basis.tabulate(&rule);
        let n = tab.num_functions;
        let nm = disp.basis.scalar_len();
        let mut scalar_mass = vec![0.0; n * n];
        let mut grad_moments = vec![0.0; 2 * n * nm];
        let mut psi = vec![0.0; nm];
        for (q, (p, w)) in rule.iter().enumerate() {
            let w = 0.5 * w;
            disp.basis.scalar.eval_into(p[1], p[2], &mut psi);
            for a in 0..n {
                let va = tab.value(q, a);
                for b in 0..n {
                    scalar_mass[a * n + b] += w * va * tab.value(q, b);
                }
                let g = tab.grad(q, a);
                for (m, pm) in psi.iter().enumerate() {
                    grad_moments[a * nm + m] += w * g[0] * pm;
                    grad_moments[(n + a) * nm + m] += w * g[1] * pm;
                }
            }
        }
        Ok(Self { scalar_mass, grad_moments, n_scalar: n, n_modes: nm })
    }

    #[inline]
    pub fn grad_moment(&self, r: usize, a: usize, m: usize) -> f64 {
        self.grad_moments[(r * self.n_scalar + a) * self.n_modes + m]
    }
}

/// Local divergence block: rows `(component, mode)`, columns local stress dofs.
pub(crate) fn local_divergence(
    stress: &StressSpace,
    refs: &ReferenceIntegrals,
    geom: &ElementGeometry,
    element: usize,
) -> Vec<f64> {
    let dofs = &stress.element_dofs[element];
    let nm = refs.n_modes;
    let nl = dofs.len();
    let sq = geom.det.abs().sqrt();
    let [_, n1, n2] = geom.bary_gradients;
    let mut out = vec![0.0; 2 * nm * nl];
    for (i, d) in dofs.iter().enumerate() {
        let s1 = d.matrix.mul_vec(n1);
        let s2 = d.matrix.mul_vec(n2);
        for m in 0..nm {
            let g1 = refs.grad_moment(0, d.node, m);
            let g2 = refs.grad_moment(1, d.node, m);
            for c in 0..2 {
                out[(c * nm + m) * nl + i] = d.sign * sq * (s1[c] * g1 + s2[c] * g2);
            }
        }
    }
    out
}

fn local_mass(
    stress: &StressSpace,
    refs: &ReferenceIntegrals,
    geom: &ElementGeometry,
    element: usize,
    op: &(impl Fn(&SymMatrix2) -> SymMatrix2 + Sync),
) -> Vec<f64> {
    let dofs = &stress.element_dofs[element];
    let nl = dofs.len();
    let n = refs.n_scalar;
    let det = geom.det.abs();
    let applied: Vec<SymMatrix2> = dofs.iter().map(|d| op(&d.matrix)).collect();
    let mut out = vec![0.0; nl * nl];
    for (i, di) in dofs.iter().enumerate() {
        for (j, dj) in dofs.iter().enumerate() {
            out[i * nl + j] =
                det * refs.scalar_mass[di.node * n + dj.node] * applied[j].frobenius(&di.matrix) * di.sign * dj.sign;
        }
    }
    out
}

/// How the load enters the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadModel {
    /// `F = (f, ψ)` by quadrature of degree `2k + 4`.
    #[default]
    Projected,
    /// `f` is first replaced on each element by its Lagrange interpolant of
    /// degree `k - 1` at equispaced nodes; `F = (I_h f, ψ)` is then exact.
    Interpolated,
}

/// Computes element load moments `(f_h, ψ)` for a load model, where `f_h`
/// is `f` itself or its element-wise interpolant.
#[derive(Debug, Clone)]
pub struct LoadIntegrator {
    pub model: LoadModel,
    pub rule: QuadratureRule,
    n_modes: usize,
    /// Displacement modes at `rule`, `[point][mode]`.
    psi_tab: Vec<f64>,
    interp: Option<Interpolation>,
}

#[derive(Debug, Clone)]
struct Interpolation {
    basis: LagrangeBasis,
    /// `∫_ref φ̂_a ψ̂_m`, `[a][m]`.
    moments: Vec<f64>,
}

impl LoadIntegrator {
    pub fn new(disp: &DisplacementSpace, model: LoadModel) -> Result<Self> {
        let rule = triangle_rule(load_quadrature_degree(disp.k))?;
        let psi_tab = tabulate_modes(disp, &rule);
        let nm = disp.basis.scalar_len();
        let interp = match model {
            LoadModel::Projected => None,
            LoadModel::Interpolated => {
                let basis = LagrangeBasis::new(disp.k - 1)?;
                let exact = triangle_rule(2 * (disp.k - 1))?;
                let tab = basis.tabulate(&exact);
                let psi = tabulate_modes(disp, &exact);
                let n = basis.len();
                let mut moments = vec![0.0; n * nm];
                for (q, w) in exact.weights.iter().enumerate() {
                    for a in 0..n {
                        for m in 0..nm {
                            moments[a * nm + m] += 0.5 * w * tab.value(q, a) * psi[q * nm + m];
                        }
                    }
                }
                Some(Interpolation { basis, moments })
            }
        };
        Ok(Self { model, rule, n_modes: nm, psi_tab, interp })
    }

    /// Moments `(f_h, ψ)` on one element, indexed `(component, mode)`. With
    /// the orthonormal displacement basis these are also the coefficients of
    /// `Π_h f_h`.
    pub fn moments(&self, geom: &ElementGeometry, load: &(impl Fn(Point2) -> [f64; 2] + ?Sized)) -> Vec<f64> {
        let nm = self.n_modes;
        let mut out = vec![0.0; 2 * nm];
        let scale = geom.det.abs().sqrt();
        match &self.interp {
            None => {
                for (q, (p, w)) in self.rule.iter().enumerate() {
                    let f = load(geom.to_physical(p));
                    for m in 0..nm {
                        let psi = 0.5 * scale * w * self.psi_tab[q * nm + m];
                        out[m] += f[0] * psi;
                        out[nm + m] += f[1] * psi;
                    }
                }
            }
            Some(ip) => {
                for (a, f) in self.nodal_values(geom, load).iter().enumerate() {
                    for m in 0..nm {
                        let r = scale * ip.moments[a * nm + m];
                        out[m] += f[0] * r;
                        out[nm + m] += f[1] * r;
                    }
                }
            }
        }
        out
    }

    /// Values of `f` at the interpolation nodes of an element (empty for the
    /// projected model).
    pub fn nodal_values(&self, geom: &ElementGeometry, load: &(impl Fn(Point2) -> [f64; 2] + ?Sized)) -> Vec<[f64; 2]> {
        match &self.interp {
            None => Vec::new(),
            Some(ip) => (0..ip.basis.len()).map(|a| load(geom.to_physical(&ip.basis.nodes.barycentric(a)))).collect(),
        }
    }

    /// `f_h` at quadrature point `q` of [`Self::rule`], given the element's
    /// nodal values and the exact value there.
    pub fn discrete_load_at(&self, q: usize, nodal: &[[f64; 2]], exact: [f64; 2]) -> [f64; 2] {
        match &self.interp {
            None => exact,
            Some(ip) => {
                let p = self.rule.points[q];
                let n = ip.basis.len();
                let mut v = [0.0f64; 66];
                let mut g = [[0.0f64; 2]; 66];
                ip.basis.eval_into(p[1], p[2], &mut v[..n], &mut g[..n]);
                let mut out = [0.0; 2];
                for (a, f) in nodal.iter().enumerate() {
                    out[0] += v[a] * f[0];
                    out[1] += v[a] * f[1];
                }
                out
            }
        }
    }

    /// Displacement modes at quadrature point `q`, on the reference element.
    pub fn modes_at(&self, q: usize) -> &[f64] {
        &self.psi_tab[q * self.n_modes..(q + 1) * self.n_modes]
    }
}

pub(crate) fn tabulate_modes(disp: &DisplacementSpace, rule: &QuadratureRule) -> Vec<f64> {
    let nm = disp.basis.scalar_len();
    let mut out = vec![0.0; rule.len() * nm];
    for (q, p) in rule.points.iter().enumerate() {
        disp.basis.scalar.eval_into(p[1], p[2], &mut out[q * nm..(q + 1) * nm]);
    }
    out
}

/// Quadrature degree for integrals of the (non-polynomial) load.
pub fn load_quadrature_degree(k: usize) -> usize {
    2 * k + 4
}

#[derive(Debug, Clone)]
pub struct SaddleSystem {
    /// `M`, `dim Σ × dim Σ`.
    pub stress_mass: CsrMatrix,
    /// `B`, `dim V × dim Σ`.
    pub divergence: CsrMatrix,
    /// `F`, `dim V`.
    pub load: Vec<f64>,
}

impl SaddleSystem {
    pub fn dim_stress(&self) -> usize {
        self.stress_mass.nrows
    }

    pub fn dim_displacement(&self) -> usize {
        self.divergence.nrows
    }

    pub fn dim(&self) -> usize {
        self.dim_stress() + self.dim_displacement()
    }

    /// `[[M, Bᵀ], [B, 0]]`.
    pub fn full_matrix(&self) -> CsrMatrix {
        let ns = self.dim_stress();
        let n = self.dim();
        let mut t = TripletMatrix::with_capacity(n, n, self.stress_mass.nnz() + 2 * self.divergence.nnz());
        for i in 0..ns {
            for (j, v) in self.stress_mass.row(i) {
                t.push(i, j, v);
            }
        }
        for i in 0..self.dim_displacement() {
            for (j, v) in self.divergence.row(i) {
                t.push(ns + i, j, v);
                t.push(j, ns + i, v);
            }
        }
        t.to_csr()
    }

    /// `(0, F)`.
    pub fn rhs(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.dim_stress()];
        r.extend_from_slice(&self.load);
        r
    }

    /// Writes the full matrix to `path` and the right-hand side next to it
    /// with a `_rhs` suffix.
    pub fn write_matrix_market(&self, path: &Path) -> Result<()> {
        self.full_matrix().write_matrix_market(BufWriter::new(File::create(path)?), true)?;
        write_vector_market(BufWriter::new(File::create(rhs_path(path))?), &self.rhs())?;
        Ok(())
    }
}

/// `system.mtx` → `system_rhs.mtx`.
pub fn rhs_path(path: &Path) -> std::path::PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_rhs.{}", ext.to_string_lossy()),
        None => format!("{stem}_rhs"),
    };
    path.with_file_name(name)
}

fn check_compatible(mesh: &Mesh, stress: &StressSpace, disp: &DisplacementSpace) -> Result<()> {
    if stress.element_dofs.len() != mesh.num_triangles() || disp.num_elements != mesh.num_triangles() {
        return Err(Error::DimensionMismatch(format!(
            "mesh has {} elements, stress space {}, displacement space {}",
            mesh.num_triangles(),
            stress.element_dofs.len(),
            disp.num_elements
        )));
    }
    if stress.k != disp.k {
        return Err(Error::DimensionMismatch(format!(
            "stress degree {} differs from displacement degree {}",
            stress.k, disp.k
        )));
    }
    Ok(())
}

struct ElementBlocks {
    mass: Vec<f64>,
    div: Vec<f64>,
    load: Vec<f64>,
}

fn assemble_blocks(
    mesh: &Mesh,
    stress: &StressSpace,
    disp: &DisplacementSpace,
    blocks: &[ElementBlocks],
) -> (CsrMatrix, CsrMatrix, Vec<f64>) {
    let ns = stress.dim();
    let nv = disp.dim();
    let nl = 3 * stress.basis.len();
    let nd = disp.per_element();
    let mut m = TripletMatrix::with_capacity(ns, ns, blocks.len() * nl * nl);
    let mut b = TripletMatrix::with_capacity(nv, ns, blocks.len() * nl * nd);
    let mut f = vec![0.0; nv];
    for (t, blk) in blocks.iter().enumerate() {
        let dofs = &stress.element_dofs[t];
        for (i, di) in dofs.iter().enumerate() {
            for (j, dj) in dofs.iter().enumerate() {
                m.push(di.global, dj.global, blk.mass[i * nl + j]);
            }
        }
        let rows = disp.element_range(t);
        for (r, row) in rows.clone().enumerate() {
            for (j, dj) in dofs.iter().enumerate() {
                b.push(row, dj.global, blk.div[r * nl + j]);
            }
            f[row] += blk.load[r];
        }
    }
    debug_assert_eq!(mesh.num_triangles(), blocks.len());
    (m.to_csr(), b.to_csr(), f)
}

/// Assembles `M`, `B` and `F = (f, ψ)` for the given material and load.
/// Element blocks are computed in parallel and merged in element order, so
/// the result does not depend on the thread count.
pub fn assemble(
    mesh: &Mesh,
    stress: &StressSpace,
    disp: &DisplacementSpace,
    compliance: &ComplianceTensor,
    load: impl Fn(Point2) -> [f64; 2] + Sync,
) -> Result<SaddleSystem> {
    assemble_with(mesh, stress, disp, |s| compliance.apply(s), load, LoadModel::Projected, true)
}

/// [`assemble`] with a choice of load model.
pub fn assemble_with_load(
    mesh: &Mesh,
    stress: &StressSpace,
    disp: &DisplacementSpace,
    compliance: &ComplianceTensor,
    load: impl Fn(Point2) -> [f64; 2] + Sync,
    model: LoadModel,
) -> Result<SaddleSystem> {
    assemble_with(mesh, stress, disp, |s| compliance.apply(s), load, model, true)
}

/// Same as [`assemble`] without the thread pool.
pub fn assemble_serial(
    mesh: &Mesh,
    stress: &StressSpace,
    disp: &DisplacementSpace,
    compliance: &ComplianceTensor,
    load: impl Fn(Point2) -> [f64; 2] + Sync,
) -> Result<SaddleSystem> {
    assemble_with(mesh, stress, disp, |s| compliance.apply(s), load, LoadModel::Projected, false)
}

/// Assembles with an arbitrary symmetric operator in place of the
/// compliance; the identity gives the `L²` Gram matrix of the stress space.
pub fn assemble_with(
    mesh: &Mesh,
    stress: &StressSpace,
    disp: &DisplacementSpace,
    op: impl Fn(&SymMatrix2) -> SymMatrix2 + Sync,
    load: impl Fn(Point2) -> [f64; 2] + Sync,
    model: LoadModel,
    parallel: bool,
) -> Result<SaddleSystem> {
    check_compatible(mesh, stress, disp)?;
    let geoms = mesh.geometries()?;
    let refs = ReferenceIntegrals::new(stress, disp)?;
    let integrator = LoadIntegrator::new(disp, model)?;
    let element = |t: usize| ElementBlocks {
        mass: local_mass(stress, &refs, &geoms[t], t, &op),
        div: local_divergence(stress, &refs, &geoms[t], t),
        load: integrator.moments(&geoms[t], &load),
    };
    let blocks: Vec<ElementBlocks> = if parallel {
        (0..mesh.num_triangles()).into_par_iter().map(element).collect()
    } else {
        (0..mesh.num_triangles()).map(element).collect()
    };
    let (stress_mass, divergence, load) = assemble_blocks(mesh, stress, disp, &blocks);
    Ok(SaddleSystem { stress_mass, divergence, load })
}

/// Stress values at quadrature points of one element from global coefficients.
pub(crate) fn stress_at_points(
    stress: &StressSpace,
    tab: &Tabulation,
    geom: &ElementGeometry,
    element: usize,
    coeffs: &[f64],
) -> Vec<(SymMatrix2, [f64; 2])> {
    let dofs = &stress.element_dofs[element];
    (0..tab.num_points)
        .map(|q| {
            let mut s = SymMatrix2::ZERO;
            let mut div = [0.0; 2];
            for d in dofs {
                let c = coeffs[d.global] * d.sign;
                if c == 0.0 {
                    continue;
                }
                s.axpy(c * tab.value(q, d.node), &d.matrix);
                let g = d.matrix.mul_vec(geom.push_gradient(tab.grad(q, d.node)));
                div[0] += c * g[0];
                div[1] += c * g[1];
            }
            (s, div)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_material() -> ComplianceTensor {
        ComplianceTensor::new(0.5, 1.0).unwrap()
    }

    #[test]
    fn compliance_examples() {
        let a = default_material();
        let r = a.apply(&SymMatrix2::IDENTITY);
        assert!((r.a11 - 1.0 / 3.0).abs() < 1e-15 && r.a12 == 0.0 && (r.a22 - 1.0 / 3.0).abs() < 1e-15);

        let a = ComplianceTensor::new(0.7, 3.2).unwrap();
        let tau = SymMatrix2::new(0.4, -1.1, -0.4);
        let r = a.apply(&tau);
        let e = tau.scale(1.0 / 1.4);
        assert!(r.sub(&e).norm_sq().sqrt() < 1e-15);

        assert!(ComplianceTensor::new(0.0, 1.0).is_err());
        assert!(ComplianceTensor::new(1.0, -1.0).is_err());
    }

    #[test]
    fn compliance_inverts_stiffness() {
        let a = ComplianceTensor::new(0.5, 1.0).unwrap();
        for i in 0..20 {
            let x = i as f64 * 0.37;
            let eps = SymMatrix2::new(x.sin(), (2.0 * x).cos(), x.cos() - 0.3);
            let back = a.apply(&a.stiffness(&eps));
            assert!(back.sub(&eps).norm_sq().sqrt() < 1e-14);
        }
    }

    #[test]
    fn compliance_is_symmetric_positive() {
        let a = ComplianceTensor::new(0.3, 5.0).unwrap();
        let s = SymMatrix2::new(1.0, 2.0, -0.5);
        let t = SymMatrix2::new(-0.3, 0.1, 0.9);
        assert!((a.apply(&s).frobenius(&t) - a.apply(&t).frobenius(&s)).abs() < 1e-14);
        for m in [s, t, SymMatrix2::IDENTITY] {
            assert!(a.apply(&m).frobenius(&m) > 0.0);
        }
    }

    fn setup(level: usize, k: usize) -> (Mesh, StressSpace, DisplacementSpace) {
        let mesh = Mesh::unit_square(level).unwrap();
        let s = StressSpace::build(&mesh, k).unwrap();
        let d = DisplacementSpace::build(&mesh, k).unwrap();
        (mesh, s, d)
    }

    #[test]
    fn mass_is_symmetric_positive_definite() {
        let (mesh, s, d) = setup(1, 3);
        let sys = assemble(&mesh, &s, &d, &default_material(), |_| [0.0, 0.0]).unwrap();
        let m = &sys.stress_mass;
        assert!(m.asymmetry() <= 1e-13 * m.max_abs());
        let dense = m.to_dense();
        let eig = nalgebra::SymmetricEigen::new(dense);
        assert!(eig.eigenvalues.min() > 0.0);
    }

    #[test]
    fn divergence_has_full_row_rank() {
        let (mesh, s, d) = setup(1, 3);
        let sys = assemble(&mesh, &s, &d, &default_material(), |_| [0.0, 0.0]).unwrap();
        let b = sys.divergence.to_dense();
        assert_eq!(b.nrows(), 24);
        assert_eq!(b.rank(1e-10 * b.norm()), 24);
    }

    #[test]
    fn zero_load_gives_zero_rhs() {
        let (mesh, s, d) = setup(2, 4);
        let sys = assemble(&mesh, &s, &d, &default_material(), |_| [0.0, 0.0]).unwrap();
        assert!(sys.rhs().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn compliance_scaling_scales_mass() {
        let (mesh, s, d) = setup(2, 3);
        let a = default_material();
        let sys = assemble(&mesh, &s, &d, &a, |_| [0.0, 0.0]).unwrap();
        let half = ComplianceTensor::new(a.mu / 2.0, a.lambda / 2.0).unwrap();
        let scaled = assemble(&mesh, &s, &d, &half, |_| [0.0, 0.0]).unwrap();
        for (x, y) in sys.stress_mass.values.iter().zip(&scaled.stress_mass.values) {
            assert_eq!(2.0 * x, *y);
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let (mesh, s, d) = setup(3, 4);
        let a = default_material();
        let f = |p: Point2| [p.x.sin() * p.y, (p.x * p.y).exp()];
        let par = assemble(&mesh, &s, &d, &a, f).unwrap();
        let ser = assemble_serial(&mesh, &s, &d, &a, f).unwrap();
        assert_eq!(par.stress_mass.indices, ser.stress_mass.indices);
        for (x, y) in par.stress_mass.values.iter().zip(&ser.stress_mass.values) {
            assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0));
        }
        assert_eq!(par.load, ser.load);
        assert_eq!(par.divergence, ser.divergence);
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let (mesh, s, _) = setup(2, 3);
        let coarse = Mesh::unit_square(1).unwrap();
        let d = DisplacementSpace::build(&coarse, 3).unwrap();
        assert!(matches!(
            assemble(&mesh, &s, &d, &default_material(), |_| [0.0, 0.0]),
            Err(Error::DimensionMismatch(_))
        ));
        let d4 = DisplacementSpace::build(&mesh, 4).unwrap();
        assert!(assemble(&mesh, &s, &d4, &default_material(), |_| [0.0, 0.0]).is_err());
    }

    #[test]
    fn load_models_agree_on_low_degree_loads() {
        let (mesh, _, d) = setup(2, 4);
        let proj = LoadIntegrator::new(&d, LoadModel::Projected).unwrap();
        let interp = LoadIntegrator::new(&d, LoadModel::Interpolated).unwrap();
        // cubic: reproduced by the degree-3 interpolant
        let cubic = |p: Point2| [p.x * p.x * p.y - 2.0 * p.y.powi(3), 1.0 + p.x - p.x * p.y * p.y];
        let wavy = |p: Point2| [(3.0 * p.x).sin() * p.y.exp(), (2.0 * p.y).cos()];
        for geom in mesh.geometries().unwrap() {
            let (a, b) = (proj.moments(&geom, &cubic), interp.moments(&geom, &cubic));
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-13), "{a:?} {b:?}");
            let (a, b) = (proj.moments(&geom, &wavy), interp.moments(&geom, &wavy));
            let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(gap > 1e-8, "{gap}");
        }
    }

    #[test]
    fn interpolated_load_reproduces_nodal_values() {
        let (mesh, _, d) = setup(1, 3);
        let ip = LoadIntegrator::new(&d, LoadModel::Interpolated).unwrap();
        let f = |p: Point2| [p.x.exp(), p.y.sin()];
        let geom = mesh.element_geometry(1).unwrap();
        let nodal = ip.nodal_values(&geom, &f);
        assert_eq!(nodal.len(), 6);
        // f_h at the quadrature points equals the quadratic interpolant, and
        // its moments equal the integrator's exact moments
        let mut moments = vec![0.0; 2 * d.basis.scalar_len()];
        let nm = d.basis.scalar_len();
        for (q, (p, w)) in ip.rule.iter().enumerate() {
            let fh = ip.discrete_load_at(q, &nodal, f(geom.to_physical(p)));
            for m in 0..nm {
                let psi = 0.5 * geom.det.abs().sqrt() * w * ip.modes_at(q)[m];
                moments[m] += fh[0] * psi;
                moments[nm + m] += fh[1] * psi;
            }
        }
        let direct = ip.moments(&geom, &f);
        assert!(moments.iter().zip(&direct).all(|(x, y)| (x - y).abs() < 1e-13));
        let proj = LoadIntegrator::new(&d, LoadModel::Projected).unwrap();
        assert!(proj.nodal_values(&geom, &f).is_empty());
        assert_eq!(proj.discrete_load_at(0, &[], [1.5, -2.0]), [1.5, -2.0]);
    }

    #[test]
    fn rhs_path_suffix() {
        assert_eq!(rhs_path(Path::new("/tmp/sys.mtx")), Path::new("/tmp/sys_rhs.mtx"));
        assert_eq!(rhs_path(Path::new("sys")), Path::new("sys_rhs"));
    }
}
