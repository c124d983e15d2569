//! Fixtures shared by the benchmarks.

use mixel_core::analysis::{reference_load_model, ExactSolution, ExpSineSolution};
use mixel_core::{assemble_with_load, ComplianceTensor, Diagonal, DisplacementSpace, Mesh, Result, SaddleSystem, StressSpace};

/// Mesh, spaces and material of one study level.
pub struct Fixture {
    pub k: usize,
    pub mesh: Mesh,
    pub stress: StressSpace,
    pub displacement: DisplacementSpace,
    pub material: ComplianceTensor,
}

impl Fixture {
    pub fn new(k: usize, level: usize) -> Result<Self> {
        let mesh = Mesh::unit_square_with(level, Diagonal::NorthWest)?;
        let stress = StressSpace::build(&mesh, k)?;
        let displacement = DisplacementSpace::build(&mesh, k)?;
        Ok(Self { k, mesh, stress, displacement, material: ComplianceTensor::new(0.5, 1.0)? })
    }

    pub fn assemble(&self) -> Result<SaddleSystem> {
        let m = self.material;
        assemble_with_load(
            &self.mesh,
            &self.stress,
            &self.displacement,
            &m,
            |p| ExpSineSolution.load(&m, p),
            reference_load_model(self.k),
        )
    }
}
