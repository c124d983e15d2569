//! Scalar Lagrange bases, symmetric-matrix directions and the local
//! stress/displacement shape functions built from them.

mod displacement;
mod lagrange;
mod stress;

pub use displacement::{eval_displacement_basis, DisplacementBasis, OrthonormalPolynomials};
pub use lagrange::{
    eval_scalar_basis, lagrange_nodes, LagrangeBasis, LagrangeNode, LagrangeNodeSet, NodeKind, Tabulation,
};
pub use stress::{
    eval_stress_basis, GlobalNode, MatrixDirection, StressBasisFunction, StressClass,
};

use serde::Serialize;

/// Symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SymMatrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymMatrix2 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const IDENTITY: Self = Self::new(1.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    /// `T1`, `T2`, `T3` for `i = 1, 2, 3`.
    pub fn canonical(i: u8) -> Self {
        match i {
            1 => Self::new(1.0, 0.0, 0.0),
            2 => Self::new(0.0, 1.0, 0.0),
            3 => Self::new(0.0, 0.0, 1.0),
            _ => panic!("canonical direction index must be 1, 2 or 3, got {i}"),
        }
    }

    /// `v vᵀ`.
    pub fn outer(v: [f64; 2]) -> Self {
        Self::new(v[0] * v[0], v[0] * v[1], v[1] * v[1])
    }

    /// `(a bᵀ + b aᵀ) / 2`.
    pub fn sym_outer(a: [f64; 2], b: [f64; 2]) -> Self {
        Self::new(a[0] * b[0], 0.5 * (a[0] * b[1] + a[1] * b[0]), a[1] * b[1])
    }

    /// Full Frobenius product, counting the off-diagonal entry twice.
    #[inline]
    pub fn frobenius(&self, o: &Self) -> f64 {
        self.a11 * o.a11 + 2.0 * self.a12 * o.a12 + self.a22 * o.a22
    }

    pub fn norm_sq(&self) -> f64 {
        self.frobenius(self)
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    #[inline]
    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a11 * v[0] + self.a12 * v[1], self.a12 * v[0] + self.a22 * v[1]]
    }

    #[inline]
    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.a11, s * self.a12, s * self.a22)
    }

    #[inline]
    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a22 + o.a22)
    }

    #[inline]
    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.a11 - o.a11, self.a12 - o.a12, self.a22 - o.a22)
    }

    #[inline]
    pub fn axpy(&mut self, s: f64, o: &Self) {
        self.a11 += s * o.a11;
        self.a12 += s * o.a12;
        self.a22 += s * o.a22;
    }
}

/// The rank-one tangent matrix of an edge and two Frobenius-orthonormal
/// complements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMatrixFrame {
    /// `t tᵀ`.
    pub tangent: SymMatrix2,
    /// `n nᵀ` and `(t nᵀ + n tᵀ) / √2`.
    pub complements: [SymMatrix2; 2],
}

impl EdgeMatrixFrame {
    pub fn new(tangent: [f64; 2], normal: [f64; 2]) -> Self {
        Self {
            tangent: SymMatrix2::outer(tangent),
            complements: [
                SymMatrix2::outer(normal),
                SymMatrix2::sym_outer(tangent, normal).scale(std::f64::consts::SQRT_2),
            ],
        }
    }

    pub fn from_edge(edge: &crate::mesh::Edge) -> Self {
        Self::new(edge.tangent, edge.normal)
    }
}
