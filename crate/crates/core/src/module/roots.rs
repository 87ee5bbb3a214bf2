//! Root extraction `y · δ = target` inside a norm-kernel sublattice, with the
//! Hom-functional divisibility certificate, and the Hom sweep on `U^B`.

use num_bigint::BigInt;

use super::SmModule;
use crate::error::{invalid, Error, Result};
use crate::frame::Element;
use crate::group_ring::{CyclicGroupRing, GroupRingElement, SpecialKind};
use crate::lattice::{hom_module, restrict_action, solve_row, vec_scale, ActionLattice, IntMatrix, Lattice};

/// One Hom generator and the membership test of its value at the target.
#[derive(Clone, Debug)]
pub struct HomEvidence {
    pub hom: IntMatrix,
    /// Image of the target, in canonical coordinates of the target ring.
    pub image: Vec<BigInt>,
    /// `z` with `z · y = image`, when it exists.
    pub witness: Option<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
pub struct RootCertificate {
    pub level: u32,
    pub y: GroupRingElement,
    pub target: Vec<BigInt>,
    pub delta: Vec<BigInt>,
    pub hom_evidence: Vec<HomEvidence>,
}

/// Outcome of a root solve; `NoRoot` carries the failing Hom evidence.
#[derive(Clone, Debug)]
pub enum RootOutcome {
    Root(RootCertificate),
    NoRoot { hom_evidence: Vec<HomEvidence> },
}

/// Matrix of `y` on `m` in the HNF basis of `m`.
fn restricted_ring_matrix(u: &SmModule, m: &Lattice, y: &GroupRingElement) -> Result<IntMatrix> {
    restrict_action(m, &u.ring_matrix(y))
}

/// The unique `δ ∈ m` with `y δ = target`, if it exists.
pub fn direct_solve(u: &SmModule, m: &Lattice, y: &GroupRingElement, target: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let Some(t) = m.coords(target) else {
        return invalid("target does not lie in the norm-kernel lattice");
    };
    let ym = restricted_ring_matrix(u, m, y)?;
    let Some(sol) = solve_row(&ym, &t)? else { return Ok(None) };
    if !sol.kernel.is_empty() {
        return Err(Error::Internal("y does not act injectively on the norm-kernel lattice".into()));
    }
    Ok(Some(m.basis().vec_mul(&sol.particular)))
}

/// Evaluate every generator of `Hom(M, R)` at `target` and test membership in `y R`.
///
/// `level_ring` is the group ring of `Gal(L_i/K)`; `n` the quotient parameter.
pub fn hom_criterion(
    u: &SmModule,
    m: &Lattice,
    y: &GroupRingElement,
    target: &[BigInt],
    level_ring: CyclicGroupRing,
    n: u64,
) -> Result<(bool, Vec<HomEvidence>)> {
    let Some(t) = m.coords(target) else {
        return invalid("target does not lie in the norm-kernel lattice");
    };
    let r = level_ring.quotient(n)?;
    let action = ActionLattice::new(m.clone(), vec![u.lift_matrix().clone()])?;
    let homs = hom_module(&action, &r.shift_matrix(), level_ring.order())?;
    let y_level = level_ring.from_poly(y.coeffs());
    let y_mat = r.reduce(&y_level).mul_matrix();
    let mut all = true;
    let mut evidence = Vec::with_capacity(homs.len());
    for h in homs {
        let image = h.vec_mul(&t);
        let witness = solve_row(&y_mat, &image)?.map(|s| s.particular);
        all &= witness.is_some();
        evidence.push(HomEvidence { hom: h, image, witness });
    }
    Ok((all, evidence))
}

/// Solve `y δ = target` in `m` and certify by the Hom criterion.
pub fn solve_root(
    u: &SmModule,
    m: &Lattice,
    y: &GroupRingElement,
    target: &[BigInt],
    level_ring: CyclicGroupRing,
    n: u64,
    level: u32,
) -> Result<RootOutcome> {
    let r = level_ring.quotient(n)?;
    if !r.reduce(&level_ring.from_poly(y.coeffs())).is_nonzerodivisor() {
        return invalid(format!("{y} is a zero divisor modulo N_{n}"));
    }
    let direct = direct_solve(u, m, y, target)?;
    let (all, hom_evidence) = hom_criterion(u, m, y, target, level_ring, n)?;
    match (direct, all) {
        (Some(delta), true) => {
            if u.apply_ring(y, &delta) != target {
                return Err(Error::Internal("root does not reproduce the target".into()));
            }
            Ok(RootOutcome::Root(RootCertificate { level, y: y.clone(), target: target.to_vec(), delta, hom_evidence }))
        }
        (None, false) => Ok(RootOutcome::NoRoot { hom_evidence }),
        (Some(_), false) => Err(Error::Internal("direct solve succeeded but a Hom functional rejects the target".into())),
        (None, true) => Err(Error::Internal("every Hom functional accepts the target but no root exists".into())),
    }
}

/// Check `(∏ Δ_{n_j, c_j}) · target = (-1)^{s'} r δ` with `r = ∏ p^k / n_j` over the middle indices.
pub fn verify_delta_identity(
    u: &SmModule,
    cert: &RootCertificate,
    ring: CyclicGroupRing,
    middle: &[(u64, u64)],
    members: usize,
) -> Result<bool> {
    let deltas = middle
        .iter()
        .map(|&(n, c)| ring.special_element_twisted(SpecialKind::Delta, n, c))
        .collect::<Result<Vec<_>>>()?;
    let prod = GroupRingElement::product(ring, &deltas)?;
    let lhs = u.apply_ring(&prod, &cert.target);
    let r: BigInt = middle.iter().map(|&(n, _)| BigInt::from(ring.order() / n)).product();
    let sign = if members.is_multiple_of(2) { BigInt::from(1) } else { BigInt::from(-1) };
    Ok(lhs == vec_scale(&cert.delta, &(sign * r)))
}

#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub hom: IntMatrix,
    /// `(1 - σ) φ(w)`.
    pub value: GroupRingElement,
    /// `q` with `q · ∏(1 - σ^{n_i}) = value`.
    pub witness: Option<GroupRingElement>,
}

#[derive(Clone, Debug)]
pub struct HomSweep {
    pub modulus: GroupRingElement,
    pub fixed_rank: usize,
    pub entries: Vec<SweepEntry>,
}

impl HomSweep {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.witness.is_some())
    }
}

/// For every generator `φ` of `Hom_{Z[Γ]}(U^B, Z[Γ])`, test `(1-σ) φ(w) ∈ ∏ (1 - σ^{n_i}) Z[Γ]`.
pub fn hom_sweep(u: &SmModule, b_gens: &[Element], w: &[BigInt], ring: CyclicGroupRing, n: &[u64]) -> Result<HomSweep> {
    let fixed = u.fixed_sublattice(&u.full_lattice(), b_gens)?;
    let Some(coords) = fixed.coords(w) else {
        return invalid("sweep vector is not fixed by the subgroup");
    };
    let action = ActionLattice::new(fixed.clone(), vec![u.lift_matrix().clone()])?;
    let homs = hom_module(&action, &ring.shift_matrix(), ring.order())?;
    let factors: Vec<GroupRingElement> = n.iter().map(|&x| ring.one_minus_sigma_pow(x as i64)).collect();
    let modulus = GroupRingElement::product(ring, &factors)?;
    let one_minus = ring.one_minus_sigma_pow(1);
    let mut entries = Vec::with_capacity(homs.len());
    for h in homs {
        let value = one_minus.mul(&ring.element(h.vec_mul(&coords))?)?;
        let witness = if value.is_zero() { Some(ring.zero()) } else { value.divide(&modulus)? };
        entries.push(SweepEntry { hom: h, value, witness });
    }
    Ok(HomSweep { modulus, fixed_rank: fixed.rank(), entries })
}
