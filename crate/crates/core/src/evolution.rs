//! Shared machinery for dilations on `H ⊗ K̃ ⊗ Z`, where `Z` is a space of
//! shift cells (the last, fastest factor) and the ancilla starts in a pure
//! product vector.
//!
//! States are never formed on the full space. Instead the isometry
//! `Ψ = V^n V_w` with `V_w : x ↦ x ⊗ w` is propagated column by column, and
//! reduced states are read off as `Σ_j Ψ_j ρ Ψ_j†` over the ancilla rows `j`.

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64, ZERO};

/// Layout of a cell-structured dilation: system `d`, ancilla `ktilde`, and
/// `cells` shift cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Layout {
    pub d: usize,
    pub ktilde: usize,
    pub cells: usize,
}

impl Layout {
    /// Dimension of `H ⊗ K̃`.
    pub fn inner(&self) -> usize {
        self.d * self.ktilde
    }

    pub fn total(&self) -> usize {
        self.inner() * self.cells
    }

    /// Block-diagonal operator with `blocks[c]` acting on cell `c`; `None`
    /// stands for the identity.
    pub fn block_diagonal(&self, blocks: &[Option<ComplexMatrix>]) -> ComplexMatrix {
        debug_assert_eq!(blocks.len(), self.cells);
        let (n, cells) = (self.inner(), self.cells);
        let mut m = ComplexMatrix::zeros(self.total(), self.total());
        for (c, block) in blocks.iter().enumerate() {
            for x in 0..n {
                match block {
                    Some(b) => {
                        for y in 0..n {
                            m[(x * cells + c, y * cells + c)] = b[(x, y)];
                        }
                    }
                    None => m[(x * cells + c, x * cells + c)] = C64::new(1.0, 0.0),
                }
            }
        }
        m
    }

    /// Permutation `id ⊗ P` moving cell `c` to cell `target[c]`.
    pub fn cell_permutation(&self, target: &[usize]) -> ComplexMatrix {
        debug_assert_eq!(target.len(), self.cells);
        let cells = self.cells;
        let mut m = ComplexMatrix::zeros(self.total(), self.total());
        for x in 0..self.inner() {
            for (c, &t) in target.iter().enumerate() {
                m[(x * cells + t, x * cells + c)] = C64::new(1.0, 0.0);
            }
        }
        m
    }

    /// `V_w` for `w = e_0 ⊗ e_cell` on `K̃ ⊗ Z`.
    pub fn start_embedding(&self, cell: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.total(), self.d);
        for h in 0..self.d {
            m[(h * self.ktilde * self.cells + cell, h)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Largest entry of `Ψ - (U_block V_w̃) ⊗ e_cell`, where `V_w̃` embeds
    /// `x ↦ x ⊗ e_0` into `H ⊗ K̃` and `None` stands for the identity.
    pub fn support_deviation(
        &self,
        psi: &ComplexMatrix,
        block: Option<&ComplexMatrix>,
        cell: usize,
    ) -> f64 {
        let cells = self.cells;
        let mut dev: f64 = 0.0;
        for col in 0..self.d {
            for x in 0..self.inner() {
                let target = match block {
                    Some(b) => b[(x, col * self.ktilde)],
                    None if x == col * self.ktilde => C64::new(1.0, 0.0),
                    None => ZERO,
                };
                for c in 0..cells {
                    let expected = if c == cell { target } else { ZERO };
                    dev = dev.max((psi[(x * cells + c, col)] - expected).norm());
                }
            }
        }
        dev
    }

    /// Marginal on the shift cells of `Ψ ρ Ψ†`.
    pub fn cell_marginal(&self, psi: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
        let cells = self.cells;
        let x = psi.matmul(rho);
        ComplexMatrix::from_fn(cells, cells, |c, cp| {
            let mut acc = ZERO;
            for r in 0..self.inner() {
                for col in 0..self.d {
                    acc += x[(r * cells + c, col)] * psi[(r * cells + cp, col)].conj();
                }
            }
            acc
        })
    }
}

/// `tr_K(Ψ A Ψ†)` for an isometry `Ψ : H → H ⊗ K` with `dim H = a.rows()`.
pub(crate) fn reduce(psi: &ComplexMatrix, a: &ComplexMatrix) -> ComplexMatrix {
    let d = a.rows();
    let r = psi.rows() / d;
    let x = psi.matmul(a);
    ComplexMatrix::from_fn(d, d, |h, hp| {
        let mut acc = ZERO;
        for j in 0..r {
            let xr = x.row(h * r + j);
            let pr = psi.row(hp * r + j);
            for c in 0..d {
                acc += xr[c] * pr[c].conj();
            }
        }
        acc
    })
}

/// `Ψ† (B ⊗ id_K) Ψ` for an isometry `Ψ : H → H ⊗ K`.
pub(crate) fn pull_back(psi: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let d = b.rows();
    let r = psi.rows() / d;
    let mut y = ComplexMatrix::zeros(psi.rows(), psi.cols());
    for h in 0..d {
        for hh in 0..d {
            let bv = b[(h, hh)];
            if bv == ZERO {
                continue;
            }
            for j in 0..r {
                for c in 0..psi.cols() {
                    y[(h * r + j, c)] += bv * psi[(hh * r + j, c)];
                }
            }
        }
    }
    psi.adjoint().matmul(&y)
}

/// Checks that `n` does not exceed `horizon`.
pub(crate) fn check_horizon(n: usize, horizon: usize) -> Result<()> {
    if n > horizon {
        Err(Error::HorizonExceeded {
            requested: n,
            horizon,
        })
    } else {
        Ok(())
    }
}

/// Refuses dilations whose dense unitary would exceed `limit`.
pub(crate) fn check_size(size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::ResourceLimit { size, limit })
    } else {
        Ok(())
    }
}

/// Unitarity check used when assembling or loading dilations.
pub(crate) fn check_unitary(u: &ComplexMatrix, what: &str) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let dev = u.unitarity_deviation();
    if dev > crate::tensor::ISOMETRY_TOL {
        return Err(Error::ConstructionCheck(format!(
            "{what} deviates from unitarity by {dev:.3e}"
        )));
    }
    Ok(())
}
