//! Jordan bases of nilpotent operators and subquotients of spaces carrying one.

use crate::linalg::{complement_columns, kernel_basis, left_inverse, EchelonBasis, Matrix};

/// Jordan decomposition of a nilpotent operator.
///
/// Returns block sizes in descending order and a basis (as columns) laid out
/// block by block as `g, Ag, ..., A^{j-1}g`.
pub fn jordan_basis(action: &Matrix) -> (Vec<usize>, Matrix) {
    let f = action.field();
    let q = action.rows();
    assert_eq!(q, action.cols(), "operator must be square");
    if q == 0 {
        return (Vec::new(), Matrix::zeros(f, 0, 0));
    }
    let mut powers = vec![Matrix::identity(f, q)];
    while !powers.last().unwrap().is_zero() {
        assert!(powers.len() <= q + 1, "operator is not nilpotent");
        let next = powers.last().unwrap().mul(action);
        powers.push(next);
    }
    let index = powers.len() - 1;
    let kernels: Vec<Matrix> = powers.iter().map(kernel_basis).collect();

    let mut blocks = Vec::new();
    let mut basis: Vec<Vec<u32>> = Vec::with_capacity(q);
    for j in (1..=index).rev() {
        let mut ech = EchelonBasis::new(f, q);
        for c in kernels[j - 1].columns() {
            ech.insert(&c);
        }
        for c in &basis {
            ech.insert(c);
        }
        for v in kernels[j].columns() {
            if ech.contains(&v) {
                continue;
            }
            ech.insert(&v);
            let mut w = v;
            for _ in 0..j {
                let next = action.mul_vec(&w);
                basis.push(w);
                w = next;
            }
            blocks.push(j);
        }
    }
    debug_assert_eq!(basis.len(), q);
    (blocks, Matrix::from_columns(f, q, &basis))
}

/// A subquotient `upper / lower` of an ambient space with nilpotent action,
/// put in Jordan form.
#[derive(Clone, Debug)]
pub struct Subquotient {
    /// Jordan type, descending.
    pub blocks: Vec<usize>,
    /// Ambient representatives of the canonical basis (`ambient x dim`).
    pub reps: Matrix,
    /// Coordinates in the canonical basis (`dim x ambient`); only meaningful
    /// on vectors of `upper`.
    pub coords: Matrix,
}

impl Subquotient {
    pub fn dim(&self) -> usize {
        self.reps.cols()
    }

    /// Ambient representatives of the block generators.
    pub fn generators(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut offset = 0;
        for &j in &self.blocks {
            out.push(self.reps.column(offset));
            offset += j;
        }
        out
    }
}

/// Computes `span(upper) / span(lower)` under `action`.
///
/// Both spans must be stable under `action` and `span(lower) ⊆ span(upper)`;
/// spanning sets may be dependent.
pub fn subquotient(action: &Matrix, upper: &Matrix, lower: &Matrix) -> Subquotient {
    let d = action.rows();
    assert_eq!(upper.rows(), d);
    assert_eq!(lower.rows(), d);
    let k = upper.column_space();
    let k_inv = left_inverse(&k);
    let a_k = k_inv.mul(action).mul(&k);
    let y = k_inv.mul(lower);
    debug_assert_eq!(k.mul(&y), *lower, "lower span must lie inside upper span");
    let yb = y.column_space();
    let comp = complement_columns(&yb);
    let full = yb.hstack(&comp);
    let inv = full.inverse().expect("complement completes a basis");
    let q_rows = inv.submatrix(yb.cols()..k.cols(), 0..k.cols());
    let a_q = q_rows.mul(&a_k).mul(&comp);
    let (blocks, jb) = jordan_basis(&a_q);
    let jb_inv = jb.inverse().expect("Jordan basis is invertible");
    let reps = k.mul(&comp).mul(&jb);
    let coords = jb_inv.mul(&q_rows).mul(&k_inv);
    debug_assert_eq!(reps.cols(), coords.rows());
    Subquotient {
        blocks,
        reps,
        coords,
    }
}

/// The canonical nilpotent operator of Jordan type `blocks`.
pub fn canonical_action(field: crate::linalg::Fp, blocks: &[usize]) -> Matrix {
    let dim: usize = blocks.iter().sum();
    let mut a = Matrix::zeros(field, dim, dim);
    let mut offset = 0;
    for &j in blocks {
        for t in 0..j.saturating_sub(1) {
            a.set(offset + t + 1, offset + t, 1);
        }
        offset += j;
    }
    a
}
