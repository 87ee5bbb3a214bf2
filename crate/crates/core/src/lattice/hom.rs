use num_bigint::BigInt;
use num_traits::Zero;

use super::lattice::{right_kernel, Lattice};
use super::matrix::IntMatrix;
use crate::error::{invalid, Result};

/// A lattice together with commuting finite-order automorphisms of the ambient space.
///
/// Generators act on row vectors from the right: `v -> v * g`.
#[derive(Clone, Debug)]
pub struct ActionLattice {
    pub lattice: Lattice,
    pub generators: Vec<IntMatrix>,
}

impl ActionLattice {
    pub fn new(lattice: Lattice, generators: Vec<IntMatrix>) -> Result<Self> {
        let n = lattice.ambient_rank();
        for g in &generators {
            if g.rows() != n || g.cols() != n {
                return invalid("generator size does not match ambient rank");
            }
        }
        let al = ActionLattice { lattice, generators };
        for g in 0..al.generators.len() {
            al.restricted(g)?;
        }
        Ok(al)
    }

    /// Matrix of generator `g` in the lattice basis: `basis * G = A * basis`.
    pub fn restricted(&self, g: usize) -> Result<IntMatrix> {
        restrict_action(&self.lattice, &self.generators[g])
    }
}

/// Matrix of `gen` restricted to `lat`, expressed in the HNF basis of `lat`.
pub fn restrict_action(lat: &Lattice, gen: &IntMatrix) -> Result<IntMatrix> {
    let mut out = IntMatrix::zeros(0, lat.rank());
    for i in 0..lat.rank() {
        let img = gen.vec_mul(lat.basis().row(i));
        match lat.coords(&img) {
            Some(c) => out.push_row(&c),
            None => return invalid("generator does not preserve the lattice"),
        }
    }
    Ok(out)
}

/// Equivariant maps from a module with one cyclic generator into a ring target.
///
/// `target_shift` is the matrix of multiplication by the group generator on the
/// target, acting on row vectors; `order` is the order of the cyclic group.
/// Each returned matrix `phi` has one row per basis vector of the module
/// lattice, holding its image in target coordinates.
pub fn hom_module(m: &ActionLattice, target_shift: &IntMatrix, order: u64) -> Result<Vec<IntMatrix>> {
    if m.generators.len() != 1 {
        return invalid("hom computation expects exactly one cyclic generator");
    }
    let rank = m.lattice.rank();
    let r = target_shift.rows();
    if rank == 0 {
        return Ok(Vec::new());
    }
    let a = m.restricted(0)?;
    if a.pow(order) != IntMatrix::identity(rank) {
        return invalid("module action order is incompatible with the target group");
    }
    let n = rank * r;
    let mut eqs = IntMatrix::zeros(n, n);
    for i in 0..rank {
        for c in 0..r {
            let row = i * r + c;
            for j in 0..rank {
                let x = &a[(i, j)];
                if !x.is_zero() {
                    eqs[(row, j * r + c)] += x;
                }
            }
            for l in 0..r {
                let y = &target_shift[(l, c)];
                if !y.is_zero() {
                    eqs[(row, i * r + l)] -= y;
                }
            }
        }
    }
    let kernel = right_kernel(&eqs);
    let mut homs = Vec::with_capacity(kernel.rows());
    for h in 0..kernel.rows() {
        let flat = kernel.row(h);
        let rows: Vec<Vec<BigInt>> = (0..rank).map(|i| flat[i * r..(i + 1) * r].to_vec()).collect();
        let phi = IntMatrix::from_rows(rows, r)?;
        if a.mul(&phi)? != phi.mul(target_shift)? {
            return Err(crate::error::Error::Internal("hom kernel vector is not equivariant".into()));
        }
        homs.push(phi);
    }
    Ok(homs)
}
