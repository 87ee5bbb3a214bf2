//! The relation module `U` as a presented, torsion-free lattice with group action.
//!
//! The free module has one block `Z[G/T_J] x_J` for every proper subset `J` of the
//! prime indices, a rank-one block `Z x_I` with trivial action, and free
//! generators `e_j`. Relations:
//!
//! * `s(T_j) x_J = (1 - λ_j^{-1}) x_{J ∪ {j}}` for `j ∉ J`, `J ∪ {j} ≠ I`;
//! * `s(T_j) x_{I - {j}} = t_j e_j`.
//!
//! `U` is the free module modulo the saturation of the relations.

mod extension;
mod roots;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{discrepancy, Result};
use crate::frame::{Element, Frame, GroupData};
use crate::group_ring::GroupRingElement;
use crate::lattice::{dot, left_kernel, IntMatrix, Lattice, QuotientMap};

pub use extension::{build_uq, chi_embeddings, solve_beta, BetaCertificate, ChiReport, PrimeQuotient};
pub use roots::{
    direct_solve, hom_criterion, hom_sweep, solve_root, verify_delta_identity, HomEvidence, HomSweep, RootCertificate,
    RootOutcome, SweepEntry,
};

/// Bitmask of prime indices.
pub type Subset = u32;

#[derive(Clone, Debug)]
pub struct Block {
    pub mask: Subset,
    pub offset: usize,
    /// Components not in the subset; the block is indexed by their exponents.
    pub comps: Vec<usize>,
    pub size: usize,
}

/// Coordinates of the free module.
#[derive(Clone, Debug)]
pub struct FreeLayout {
    pub orders: Vec<u64>,
    pub blocks: Vec<Block>,
    pub e_offset: usize,
    pub total: usize,
}

impl FreeLayout {
    pub fn new(orders: &[u64]) -> Self {
        let v = orders.len();
        let full: Subset = (1 << v) - 1;
        let mut masks: Vec<Subset> = (0..=full).collect();
        masks.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
        let mut blocks = Vec::with_capacity(masks.len());
        let mut offset = 0;
        for mask in masks {
            let comps: Vec<usize> = (0..v).filter(|&c| mask & (1 << c) == 0).collect();
            let size = comps.iter().map(|&c| orders[c] as usize).product();
            blocks.push(Block { mask, offset, comps, size });
            offset += size;
        }
        FreeLayout { orders: orders.to_vec(), blocks, e_offset: offset, total: offset + v }
    }

    pub fn v(&self) -> usize {
        self.orders.len()
    }

    pub fn full(&self) -> Subset {
        (1 << self.v()) - 1
    }

    pub fn block(&self, mask: Subset) -> &Block {
        self.blocks.iter().find(|b| b.mask == mask).expect("every subset has a block")
    }

    /// Index of the basis vector `g · x_J`.
    pub fn index(&self, mask: Subset, g: &[u64]) -> usize {
        let b = self.block(mask);
        let mut idx = 0usize;
        for &c in &b.comps {
            idx = idx * self.orders[c] as usize + (g[c] % self.orders[c]) as usize;
        }
        b.offset + idx
    }

    /// Group element representing coset `idx` of a block.
    pub fn coset_rep(&self, b: &Block, mut idx: usize) -> Element {
        let mut g = vec![0; self.v()];
        for &c in b.comps.iter().rev() {
            let t = self.orders[c] as usize;
            g[c] = (idx % t) as u64;
            idx /= t;
        }
        g
    }

    pub fn e_index(&self, j: usize) -> usize {
        self.e_offset + j
    }

    /// Basis permutation of generator `j`, as `image[index]`.
    pub fn generator_permutation(&self, j: usize) -> Vec<usize> {
        let mut image: Vec<usize> = (0..self.total).collect();
        for b in &self.blocks {
            if b.mask & (1 << j) != 0 {
                continue;
            }
            for idx in 0..b.size {
                let mut g = self.coset_rep(b, idx);
                g[j] = (g[j] + 1) % self.orders[j];
                image[b.offset + idx] = self.index(b.mask, &g);
            }
        }
        image
    }
}

/// Presentation data: a group `∏ T_j` with one inertia component per prime and splitting elements.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub group: GroupData,
    pub lambda: Vec<Element>,
}

impl Presentation {
    pub fn from_frame(frame: &Frame) -> Self {
        Presentation { group: frame.group.clone(), lambda: frame.lambda.clone() }
    }

    /// Relation rows over the free layout, and the layout.
    pub fn relations(&self) -> (FreeLayout, IntMatrix) {
        let layout = FreeLayout::new(&self.group.orders);
        let v = layout.v();
        let full = layout.full();
        let mut rows = IntMatrix::zeros(0, layout.total);
        for mask in 0..full {
            for j in 0..v {
                let bigger = mask | (1 << j);
                if mask & (1 << j) != 0 || bigger == full {
                    continue;
                }
                let target = layout.block(bigger).clone();
                for idx in 0..target.size {
                    let g = layout.coset_rep(&target, idx);
                    let mut row = vec![BigInt::zero(); layout.total];
                    for a in 0..self.group.orders[j] {
                        let mut h = g.clone();
                        h[j] = a;
                        row[layout.index(mask, &h)] += 1;
                    }
                    row[layout.index(bigger, &g)] -= 1;
                    let shifted = self.group.add(&g, &self.group.neg(&self.lambda[j]));
                    row[layout.index(bigger, &shifted)] += 1;
                    rows.push_row(&row);
                }
            }
        }
        for j in 0..v {
            let mask = full & !(1 << j);
            let b = layout.block(mask).clone();
            let mut row = vec![BigInt::zero(); layout.total];
            for idx in 0..b.size {
                row[b.offset + idx] += 1;
            }
            row[layout.e_index(j)] -= BigInt::from(self.group.orders[j]);
            rows.push_row(&row);
        }
        (layout, rows)
    }
}

/// The built module: coordinates, action, distinguished vectors and functionals.
#[derive(Clone, Debug)]
pub struct SmModule {
    pub group: GroupData,
    pub lambda: Vec<Element>,
    pub layout: FreeLayout,
    pub relations: IntMatrix,
    pub quotient: QuotientMap,
    /// Action of each component generator in module coordinates.
    pub gens: Vec<IntMatrix>,
    /// Powers `ŝ^0 .. ŝ^{p^k-1}` of the lifted generator.
    pub lift_powers: Vec<IntMatrix>,
    pub rho: BTreeMap<Subset, Vec<BigInt>>,
    pub e: Vec<Vec<BigInt>>,
    pub valuations: Vec<Vec<BigInt>>,
    /// Span of all `g · ρ_J`, `J` proper.
    pub psi_part: Lattice,
}

/// Rank diagnostic emitted by the builder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDiagnostic {
    pub rank: usize,
    pub expected: usize,
    pub relation_rank: usize,
    pub free_rank: usize,
    pub degenerate: bool,
    pub checksum: String,
}

/// Apply a permutation of free coordinates to a free-module row vector.
fn permute_vec(v: &[BigInt], image: &[usize]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); v.len()];
    for (i, x) in v.iter().enumerate() {
        if !x.is_zero() {
            out[image[i]] = x.clone();
        }
    }
    out
}

/// Matrices of the component generators on a torsion-free quotient of the free module.
pub(crate) fn induced_action(layout: &FreeLayout, q: &QuotientMap) -> Result<Vec<IntMatrix>> {
    (0..layout.v())
        .map(|j| {
            let image = layout.generator_permutation(j);
            let mut rows = IntMatrix::zeros(0, layout.total);
            for i in 0..q.lift.rows() {
                rows.push_row(&permute_vec(q.lift.row(i), &image));
            }
            rows.mul(&q.projection)
        })
        .collect()
}

impl SmModule {
    pub fn build(pres: &Presentation) -> Result<SmModule> {
        let (layout, relations) = pres.relations();
        let rel_lattice = Lattice::from_generators(&relations);
        let quotient = QuotientMap::new(&rel_lattice);
        Self::from_quotient(pres, layout, relations, quotient)
    }

    fn from_quotient(
        pres: &Presentation,
        layout: FreeLayout,
        relations: IntMatrix,
        quotient: QuotientMap,
    ) -> Result<SmModule> {
        let v = layout.v();
        let group = pres.group.clone();
        let gens = induced_action(&layout, &quotient)?;
        let d = quotient.dim();
        let mut s = IntMatrix::identity(d);
        for (j, &a) in group.lift.iter().enumerate() {
            for _ in 0..a {
                s = s.mul(&gens[j])?;
            }
        }
        let order = group.modulus() as usize;
        let mut lift_powers = Vec::with_capacity(order);
        let mut acc = IntMatrix::identity(d);
        for _ in 0..order {
            lift_powers.push(acc.clone());
            acc = acc.mul(&s)?;
        }
        let zero = group.identity();
        let mut rho = BTreeMap::new();
        for b in &layout.blocks {
            rho.insert(b.mask, quotient.projection.row(layout.index(b.mask, &zero)).to_vec());
        }
        let e = (0..v).map(|j| quotient.projection.row(layout.e_index(j)).to_vec()).collect();
        let full = layout.full();
        let mut vf = vec![vec![BigInt::zero(); layout.total]; v];
        for j in 0..v {
            let b = layout.block(full & !(1 << j));
            for idx in 0..b.size {
                vf[j][b.offset + idx] = BigInt::one();
            }
            vf[j][layout.e_index(j)] = BigInt::one();
        }
        for row in 0..relations.rows() {
            for (j, f) in vf.iter().enumerate() {
                if !dot(f, relations.row(row)).is_zero() {
                    return discrepancy(format!("valuation v_{} does not vanish on relation {row}", j + 1));
                }
            }
        }
        let valuations = vf.iter().map(|f| quotient.lift.mul_vec(f)).collect();
        let psi_rows: Vec<usize> = layout.blocks.iter().filter(|b| b.mask != full).flat_map(|b| b.offset..b.offset + b.size).collect();
        let psi_part = Lattice::from_generators(&quotient.projection.select_rows(psi_rows));
        Ok(SmModule {
            group,
            lambda: pres.lambda.clone(),
            layout,
            relations,
            quotient,
            gens,
            lift_powers,
            rho,
            e,
            valuations,
            psi_part,
        })
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn full_lattice(&self) -> Lattice {
        Lattice::full(self.dim())
    }

    pub fn v(&self) -> usize {
        self.layout.v()
    }

    pub fn full_mask(&self) -> Subset {
        self.layout.full()
    }

    pub fn rank_diagnostic(&self) -> RankDiagnostic {
        let expected = self.group.order() as usize + self.v();
        let rank = self.dim();
        RankDiagnostic {
            rank,
            expected,
            relation_rank: self.quotient.kernel.rank(),
            free_rank: self.layout.total,
            degenerate: rank != expected,
            checksum: lattice_checksum(&self.quotient.kernel),
        }
    }

    /// Matrix of a group element in module coordinates.
    pub fn element_matrix(&self, g: &[u64]) -> Result<IntMatrix> {
        let mut m = IntMatrix::identity(self.dim());
        for (j, &a) in g.iter().enumerate() {
            for _ in 0..a % self.group.orders[j] {
                m = m.mul(&self.gens[j])?;
            }
        }
        Ok(m)
    }

    pub fn act(&self, g: &[u64], x: &[BigInt]) -> Vec<BigInt> {
        let mut y = x.to_vec();
        for (j, &a) in g.iter().enumerate() {
            for _ in 0..a % self.group.orders[j] {
                y = self.gens[j].vec_mul(&y);
            }
        }
        y
    }

    /// `g · ρ_J`.
    pub fn rho_translate(&self, mask: Subset, g: &[u64]) -> Vec<BigInt> {
        self.quotient.projection.row(self.layout.index(mask, g)).to_vec()
    }

    /// Matrix of a group-ring element acting through the lift `ŝ`.
    pub fn ring_matrix(&self, a: &GroupRingElement) -> IntMatrix {
        let d = self.dim();
        let mut m = IntMatrix::zeros(d, d);
        for (i, c) in a.coeffs().iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.lift_powers[i].scale(c)).expect("same size");
            }
        }
        m
    }

    pub fn apply_ring(&self, a: &GroupRingElement, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); x.len()];
        for (i, c) in a.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let y = self.lift_powers[i].vec_mul(x);
            for (o, t) in out.iter_mut().zip(y) {
                *o += c * t;
            }
        }
        out
    }

    pub fn lift_matrix(&self) -> &IntMatrix {
        &self.lift_powers[1 % self.lift_powers.len()]
    }

    pub fn valuation(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.valuations.iter().map(|f| dot(f, x)).collect()
    }

    pub fn is_unit(&self, x: &[BigInt]) -> bool {
        self.valuation(x).iter().all(Zero::is_zero)
    }

    /// Sublattice of units: the common kernel of all valuation functionals.
    pub fn unit_lattice(&self) -> Lattice {
        let mut m = IntMatrix::zeros(self.dim(), 0);
        for f in &self.valuations {
            let col = IntMatrix::from_rows(f.iter().map(|x| vec![x.clone()]).collect(), 1).expect("column");
            m = m.hstack(&col).expect("rows");
        }
        Lattice::from_generators(&left_kernel(&m))
    }

    /// Vectors of `w` fixed by every listed group element.
    pub fn fixed_sublattice(&self, w: &Lattice, elements: &[Element]) -> Result<Lattice> {
        if elements.is_empty() || w.rank() == 0 {
            return Ok(w.clone());
        }
        let d = self.dim();
        let id = IntMatrix::identity(d);
        let mut cond = IntMatrix::zeros(w.rank(), 0);
        for g in elements {
            let diff = self.element_matrix(g)?.sub(&id)?;
            cond = cond.hstack(&w.basis().mul(&diff)?)?;
        }
        let k = left_kernel(&cond);
        Ok(Lattice::from_generators(&k.mul(w.basis())?))
    }

    /// Vectors of `w` killed by `N_n`, acting through the lift.
    pub fn kernel_of_norm(&self, w: &Lattice, n: u64, ring: crate::group_ring::CyclicGroupRing) -> Result<Lattice> {
        if w.rank() == 0 {
            return Ok(w.clone());
        }
        let norm = self.ring_matrix(&ring.norm(n)?);
        let k = left_kernel(&w.basis().mul(&norm)?);
        if k.rows() == 0 {
            return Ok(Lattice::zero(self.dim()));
        }
        Ok(Lattice::from_generators(&k.mul(w.basis())?))
    }

    /// `Σ_{b ∈ B_i / T_J} b · ρ_J` with `J = I - M_i`.
    pub fn relative_norm(&self, mask: Subset, kernel: &[Element]) -> Vec<BigInt> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = vec![BigInt::zero(); self.dim()];
        for b in kernel {
            let idx = self.layout.index(mask, b);
            if seen.insert(idx) {
                for (o, x) in out.iter_mut().zip(self.quotient.projection.row(idx)) {
                    *o += x;
                }
            }
        }
        out
    }
}

/// Stable hex digest of a lattice's HNF basis.
pub fn lattice_checksum(l: &Lattice) -> String {
    let mut h = Sha256::new();
    h.update(format!("{}x{}\n", l.rank(), l.ambient_rank()).as_bytes());
    for i in 0..l.rank() {
        let row: Vec<String> = l.basis().row(i).iter().map(|x| x.to_string()).collect();
        h.update(row.join(",").as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests;
