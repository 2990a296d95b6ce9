use crate::{CMatrix, CRow, CVector, Complex64, Error, Result};

/// Block-diagonal scattering matrix of a group connected surface.
///
/// Only the `G` blocks of size `N_G × N_G` are stored. Single connected
/// (`N_G = 1`) and fully connected (`G = 1`) surfaces are the two extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    blocks: Vec<CMatrix>,
    group_size: usize,
}

/// Worst entrywise violation of `Θ = Θᵀ` and `ΘᴴΘ = I` over all blocks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstraintResidual {
    pub symmetry: f64,
    pub unitarity: f64,
}

impl ConstraintResidual {
    pub fn max(&self) -> f64 {
        self.symmetry.max(self.unitarity)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.symmetry <= tol && self.unitarity <= tol
    }
}

impl ScatteringMatrix {
    pub fn from_blocks(blocks: Vec<CMatrix>) -> Result<Self> {
        let group_size = blocks
            .first()
            .map(|b| b.nrows())
            .ok_or_else(|| Error::InvalidInput("scattering matrix needs at least one block".into()))?;
        if group_size == 0 || blocks.iter().any(|b| b.shape() != (group_size, group_size)) {
            return Err(Error::DimensionMismatch(
                "all blocks must be square with the same non-zero size".into(),
            ));
        }
        Ok(Self { blocks, group_size })
    }

    /// Diagonal matrix `diag(e^{jθ₁}, …, e^{jθ_N})`.
    pub fn diagonal(phases: &[f64]) -> Result<Self> {
        Self::from_blocks(
            phases
                .iter()
                .map(|&p| CMatrix::from_element(1, 1, Complex64::from_polar(1.0, p)))
                .collect(),
        )
    }

    pub fn identity(n_ris: usize, group_size: usize) -> Result<Self> {
        if group_size == 0 || n_ris % group_size != 0 {
            return Err(Error::DimensionMismatch(format!(
                "group size {group_size} does not divide {n_ris}"
            )));
        }
        Self::from_blocks(vec![CMatrix::identity(group_size, group_size); n_ris / group_size])
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn num_groups(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_ris(&self) -> usize {
        self.group_size * self.blocks.len()
    }

    /// Materializes the full `N_I × N_I` matrix.
    pub fn to_dense(&self) -> CMatrix {
        let n = self.n_ris();
        let mut m = CMatrix::zeros(n, n);
        for (g, block) in self.blocks.iter().enumerate() {
            let o = g * self.group_size;
            m.view_mut((o, o), (self.group_size, self.group_size))
                .copy_from(block);
        }
        m
    }

    /// Multiplies every block by `phase` (expected unit modulus).
    pub fn rotate(&mut self, phase: Complex64) {
        for b in &mut self.blocks {
            *b *= phase;
        }
    }

    /// Scalar gain `h_RI Θ h_IT`, accumulated block by block.
    pub fn cascade(&self, h_ri: &CRow, h_it: &CVector) -> Result<Complex64> {
        self.check_len(h_ri.len())?;
        self.check_len(h_it.len())?;
        let ng = self.group_size;
        Ok(self
            .blocks
            .iter()
            .enumerate()
            .map(|(g, b)| {
                let r = h_ri.columns(g * ng, ng);
                let t = h_it.rows(g * ng, ng);
                (r * (b * t))[0]
            })
            .sum())
    }

    /// `Θ M` for an `N_I × k` matrix.
    pub fn left_apply(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_len(m.nrows())?;
        let ng = self.group_size;
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for (g, b) in self.blocks.iter().enumerate() {
            let prod = b * m.rows(g * ng, ng);
            out.rows_mut(g * ng, ng).copy_from(&prod);
        }
        Ok(out)
    }

    /// Worst constraint violation across all blocks.
    pub fn constraint_residual(&self) -> ConstraintResidual {
        let mut res = ConstraintResidual::default();
        for b in &self.blocks {
            let sym = (b - b.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            let n = b.nrows();
            let unit = (b.adjoint() * b - CMatrix::identity(n, n))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            res.symmetry = res.symmetry.max(sym);
            res.unitarity = res.unitarity.max(unit);
        }
        res
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_ris() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} surface elements, got {len}",
                self.n_ris()
            )));
        }
        Ok(())
    }
}
