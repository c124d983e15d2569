//! `L²` errors of a discrete solution against an exact one.

use rayon::prelude::*;
use serde::Serialize;

use super::exact::ExactSolution;
use crate::assembly::{stress_at_points, ComplianceTensor, LoadIntegrator, LoadModel};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::solver::Solution;
use crate::spaces::{DisplacementSpace, StressSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub level: usize,
    pub k: usize,
    /// `‖u - u_h‖₀`.
    pub displacement: f64,
    /// `‖σ - σ_h‖₀`.
    pub stress: f64,
    /// `‖div(σ - σ_h)‖₀`.
    pub divergence: f64,
    pub dim_displacement: usize,
    pub dim_stress: usize,
    /// `‖div σ_h - Π_h f_h‖₀ / ‖f_h‖₀`, where `f_h` is the load the system
    /// was assembled with.
    pub divergence_identity: f64,
    /// `‖div σ_h - Π_h f‖₀ / ‖f‖₀` with the exact load; equal to the above
    /// for the projected load model.
    pub exact_load_identity: f64,
    pub relative_residual: f64,
}

/// Squared element contributions, summed in element order afterwards so the
/// totals do not depend on scheduling.
#[derive(Default, Clone, Copy)]
struct Squares {
    u: f64,
    sigma: f64,
    div: f64,
    identity: f64,
    load: f64,
    exact_identity: f64,
    exact_load: f64,
}

/// Element-wise quadrature of degree `2k + 4`; the divergence error uses
/// the analytic divergence of `σ_h`. `model` must be the load model the
/// solved system was assembled with.
pub fn compute_errors(
    mesh: &Mesh,
    stress: &StressSpace,
    disp: &DisplacementSpace,
    solution: &Solution,
    exact: &dyn ExactSolution,
    material: &ComplianceTensor,
    model: LoadModel,
) -> Result<ErrorReport> {
    if solution.stress.len() != stress.dim() || solution.displacement.len() != disp.dim() {
        return Err(Error::DimensionMismatch(format!(
            "solution has {} + {} coefficients, spaces have {} + {}",
            solution.stress.len(),
            solution.displacement.len(),
            stress.dim(),
            disp.dim()
        )));
    }
    let k = stress.k;
    let integrator = LoadIntegrator::new(disp, model)?;
    let projector = LoadIntegrator::new(disp, LoadModel::Projected)?;
    let rule = &integrator.rule;
    let tab = stress.basis.tabulate(rule);
    let nm = disp.basis.scalar_len();
    let geoms = mesh.geometries()?;
    let load = |p| exact.load(material, p);

    let per_element: Vec<Squares> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = &geoms[t];
            let area = geom.area();
            let inv_sqrt = 1.0 / geom.det.abs().sqrt();
            let sig = stress_at_points(stress, &tab, geom, t, &solution.stress);
            let u_coef = &solution.displacement[disp.element_range(t)];
            // (f_h, ψ) are the coefficients of Π_h f_h in the orthonormal basis
            let proj = integrator.moments(geom, &load);
            let nodal = integrator.nodal_values(geom, &load);
            let exact_proj = if model == LoadModel::Projected { proj.clone() } else { projector.moments(geom, &load) };
            let mut acc = Squares::default();
            for (q, (bary, w)) in rule.iter().enumerate() {
                let x = geom.to_physical(bary);
                let wa = w * area;
                let psi = integrator.modes_at(q);
                let mut uh = [0.0; 2];
                let mut pf = [0.0; 2];
                let mut pe = [0.0; 2];
                for c in 0..2 {
                    for m in 0..nm {
                        uh[c] += u_coef[c * nm + m] * psi[m] * inv_sqrt;
                        pf[c] += proj[c * nm + m] * psi[m] * inv_sqrt;
                        pe[c] += exact_proj[c * nm + m] * psi[m] * inv_sqrt;
                    }
                }
                let fields = exact.fields(material, x);
                let (sh, dh) = sig[q];
                let du = [fields.displacement[0] - uh[0], fields.displacement[1] - uh[1]];
                let ds = fields.stress.sub(&sh);
                let dd = [fields.load[0] - dh[0], fields.load[1] - dh[1]];
                let di = [dh[0] - pf[0], dh[1] - pf[1]];
                let fh = integrator.discrete_load_at(q, &nodal, fields.load);
                acc.u += wa * (du[0] * du[0] + du[1] * du[1]);
                acc.sigma += wa * ds.norm_sq();
                acc.div += wa * (dd[0] * dd[0] + dd[1] * dd[1]);
                acc.identity += wa * (di[0] * di[0] + di[1] * di[1]);
                acc.load += wa * (fh[0] * fh[0] + fh[1] * fh[1]);
                let de = [dh[0] - pe[0], dh[1] - pe[1]];
                acc.exact_identity += wa * (de[0] * de[0] + de[1] * de[1]);
                acc.exact_load += wa * (fields.load[0] * fields.load[0] + fields.load[1] * fields.load[1]);
            }
            acc
        })
        .collect();

    let total = per_element.iter().fold(Squares::default(), |a, e| Squares {
        u: a.u + e.u,
        sigma: a.sigma + e.sigma,
        div: a.div + e.div,
        identity: a.identity + e.identity,
        load: a.load + e.load,
        exact_identity: a.exact_identity + e.exact_identity,
        exact_load: a.exact_load + e.exact_load,
    });
    let relative = |num: f64, den: f64| if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(ErrorReport {
        level: mesh.level,
        k,
        displacement: total.u.sqrt(),
        stress: total.sigma.sqrt(),
        divergence: total.div.sqrt(),
        dim_displacement: disp.dim(),
        dim_stress: stress.dim(),
        divergence_identity: relative(total.identity, total.load),
        exact_load_identity: relative(total.exact_identity, total.exact_load),
        relative_residual: solution.relative_residual,
    })
}
