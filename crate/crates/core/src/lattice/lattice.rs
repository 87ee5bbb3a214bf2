use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::{is_zero_vec, IntMatrix};
use super::normal::{abs_det, hnf, hnf_only, snf};
use crate::error::{invalid, Error, Result};

/// A sublattice of `Z^n`, stored as the nonzero rows of its Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient_rank: usize,
    basis: IntMatrix,
    pivots: Vec<usize>,
}

/// Result of an integer linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
}

/// `[L2 : L1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Index {
    Finite(BigInt),
    Infinite,
}

impl Lattice {
    pub fn zero(ambient_rank: usize) -> Self {
        Lattice { ambient_rank, basis: IntMatrix::zeros(0, ambient_rank), pivots: Vec::new() }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Self::from_generators(&IntMatrix::identity(ambient_rank))
    }

    /// Lattice spanned by the rows of `gens`.
    pub fn from_generators(gens: &IntMatrix) -> Self {
        let h = hnf_only(gens);
        Lattice { ambient_rank: gens.cols(), basis: h.basis(), pivots: h.pivots }
    }

    pub fn from_vectors(ambient_rank: usize, vecs: &[Vec<BigInt>]) -> Self {
        let mut m = IntMatrix::zeros(0, ambient_rank);
        for v in vecs {
            m.push_row(v);
        }
        Self::from_generators(&m)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the HNF basis, if `v` lies in the lattice.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient_rank, "vector length mismatch");
        let mut rest = v.to_vec();
        let mut c = Vec::with_capacity(self.rank());
        for (row, &col) in self.pivots.iter().enumerate() {
            let piv = &self.basis[(row, col)];
            let (q, r) = rest[col].div_rem(piv);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, b) in rest[col..].iter_mut().zip(&self.basis.row(row)[col..]) {
                    if !b.is_zero() {
                        *x -= &q * b;
                    }
                }
            }
            c.push(q);
        }
        if is_zero_vec(&rest) {
            Some(c)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coords(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        (0..other.rank()).all(|i| self.contains(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        Lattice::from_generators(&self.basis.vstack(&other.basis).expect("same ambient"))
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient_rank, other.ambient_rank, "ambient mismatch");
        if self.rank() == 0 || other.rank() == 0 {
            return Lattice::zero(self.ambient_rank);
        }
        let stacked = self.basis.vstack(&other.basis.scale(&BigInt::from(-1))).expect("same ambient");
        let k = left_kernel(&stacked);
        let a = k.select_cols(&(0..self.rank()).collect::<Vec<_>>());
        Lattice::from_generators(&a.mul(&self.basis).expect("dims"))
    }

    /// Coordinates of every basis vector of `sub` in this lattice, as rows.
    pub fn coords_matrix(&self, sub: &Lattice) -> Option<IntMatrix> {
        let mut m = IntMatrix::zeros(0, self.rank());
        for i in 0..sub.rank() {
            m.push_row(&self.coords(sub.basis.row(i))?);
        }
        Some(m)
    }
}

/// Rows spanning the integer left kernel `{x : x * a = 0}`, in HNF.
pub fn left_kernel(a: &IntMatrix) -> IntMatrix {
    let h = hnf(a);
    let k = h.left_kernel_rows();
    if k.rows() == 0 {
        return k;
    }
    hnf_only(&k).basis()
}

/// Columns spanning the integer right kernel `{x : a * x = 0}`, returned as rows.
pub fn right_kernel(a: &IntMatrix) -> IntMatrix {
    left_kernel(&a.transpose())
}

/// Solve `a * x = b` over the integers.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Solution>> {
    if b.len() != a.rows() {
        return invalid(format!("right-hand side has length {} but matrix has {} rows", b.len(), a.rows()));
    }
    let s = snf(a);
    let c = s.p.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    for i in 0..a.rows() {
        if i < s.rank {
            let (q, r) = c[i].div_rem(&s.d[(i, i)]);
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return Ok(None);
        }
    }
    let particular = s.q.mul_vec(&y);
    let kernel = (s.rank..a.cols()).map(|j| s.q.column(j)).collect();
    Ok(Some(Solution { particular, kernel }))
}

/// Solve the row system `x * a = b`.
pub fn solve_row(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Solution>> {
    solve_integer(&a.transpose(), b)
}

/// `{x : m x in l for some m >= 1}`.
pub fn saturate(l: &Lattice) -> Lattice {
    if l.rank() == 0 {
        return l.clone();
    }
    if l.pivots.iter().enumerate().all(|(r, &c)| l.basis[(r, c)].is_one()) {
        return l.clone();
    }
    let s = snf(&l.basis);
    Lattice::from_generators(&s.q_inv.select_rows(0..s.rank))
}

pub fn is_saturated(l: &Lattice) -> bool {
    saturate(l) == *l
}

/// `[l2 : l1]` for `l1` inside `l2`.
pub fn lattice_index(l1: &Lattice, l2: &Lattice) -> Result<Index> {
    if l1.ambient_rank != l2.ambient_rank {
        return invalid("ambient rank mismatch");
    }
    let Some(c) = l2.coords_matrix(l1) else {
        return Err(Error::NotSublattice("first lattice is not contained in the second".into()));
    };
    if l1.rank() < l2.rank() {
        return Ok(Index::Infinite);
    }
    Ok(Index::Finite(abs_det(&c)))
}

/// Torsion-free quotient `Z^n / sat(L)` with explicit projection and lift.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    /// `n x d` matrix: `x -> x * projection`.
    pub projection: IntMatrix,
    /// `d x n` matrix whose rows lift the quotient basis.
    pub lift: IntMatrix,
    /// Saturated kernel of the projection.
    pub kernel: Lattice,
}

impl QuotientMap {
    pub fn new(sub: &Lattice) -> Self {
        let n = sub.ambient_rank;
        let unit_pivots = sub.pivots.iter().enumerate().all(|(r, &c)| sub.basis[(r, c)].is_one());
        if unit_pivots {
            let free: Vec<usize> = (0..n).filter(|c| !sub.pivots.contains(c)).collect();
            let d = free.len();
            let mut projection = IntMatrix::zeros(n, d);
            let mut lift = IntMatrix::zeros(d, n);
            for (k, &c) in free.iter().enumerate() {
                projection[(c, k)] = BigInt::one();
                lift[(k, c)] = BigInt::one();
            }
            for (r, &pc) in sub.pivots.iter().enumerate() {
                for (k, &c) in free.iter().enumerate() {
                    projection[(pc, k)] = -&sub.basis[(r, c)];
                }
            }
            return QuotientMap { projection, lift, kernel: sub.clone() };
        }
        let sat = saturate(sub);
        if sat.pivots.iter().enumerate().all(|(r, &c)| sat.basis[(r, c)].is_one()) {
            return Self::new(&sat);
        }
        let s = snf(&sat.basis);
        let r = s.rank;
        let cols: Vec<usize> = (r..n).collect();
        QuotientMap { projection: s.q.select_cols(&cols), lift: s.q_inv.select_rows(r..n), kernel: sat }
    }

    pub fn dim(&self) -> usize {
        self.projection.cols()
    }

    pub fn project(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.projection.vec_mul(v)
    }
}
