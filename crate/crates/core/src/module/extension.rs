//! The quotient `U'` killing the `e_j`, the augmented module `U_q` over `G × Z/m`,
//! the embeddings `χ`, `χ'`, and the root `δ` of `(1-σ) y δ = s(B) ρ̃_∅`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::roots::{solve_root, RootCertificate, RootOutcome};
use super::{induced_action, Presentation, SmModule, Subset};
use crate::error::{discrepancy, invalid, Error, Result};
use crate::frame::{Element, Frame};
use crate::group_ring::{GroupRingElement, SpecialKind};
use crate::lattice::{hnf_only, is_zero_vec, vec_scale, IntMatrix, Lattice, QuotientMap};

/// `U' = U / sat(span e_j)`, presented directly over the same free module.
#[derive(Clone, Debug)]
pub struct PrimeQuotient {
    pub quotient: QuotientMap,
    /// Matrix of the projection `U -> U'`.
    pub from_u: IntMatrix,
    pub gens: Vec<IntMatrix>,
    pub rho: BTreeMap<Subset, Vec<BigInt>>,
}

impl PrimeQuotient {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn build(u: &SmModule) -> Result<Self> {
        let mut rel = u.relations.clone();
        for j in 0..u.v() {
            let mut row = vec![BigInt::zero(); u.layout.total];
            row[u.layout.e_index(j)] = BigInt::from(1);
            rel.push_row(&row);
        }
        let quotient = QuotientMap::new(&Lattice::from_generators(&rel));
        let from_u = u.quotient.lift.mul(&quotient.projection)?;
        let gens = induced_action(&u.layout, &quotient)?;
        let zero = u.group.identity();
        let rho = u
            .layout
            .blocks
            .iter()
            .map(|b| (b.mask, quotient.projection.row(u.layout.index(b.mask, &zero)).to_vec()))
            .collect();
        Ok(PrimeQuotient { quotient, from_u, gens, rho })
    }

    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.from_u.vec_mul(x)
    }
}

/// Build `U_q` for the frame extended by `Z/m` with splitting element `(b, 0)`.
pub fn build_uq(frame: &Frame, m: u64, lambda_extra: &[i64]) -> Result<(SmModule, Vec<String>)> {
    let p = frame.p;
    let mut warnings = Vec::new();
    let mut mm = m;
    while mm > 1 && mm.is_multiple_of(p) {
        mm /= p;
    }
    if m < p || mm != 1 {
        return invalid(format!("m = {m} must be a positive power of p = {p}"));
    }
    let need = BigInt::from(p).pow(frame.k * frame.s() as u32);
    if !(BigInt::from(m) % &need).is_zero() {
        warnings.push(format!("p^(ks) = {need} does not divide m = {m}; proceeding with the given m"));
    }
    if lambda_extra.len() != frame.s() {
        return invalid(format!("lambda-extra must have {} entries", frame.s()));
    }
    let b = frame.group.normalize(lambda_extra);
    if frame.group.res(&b) != 0 {
        return invalid(format!("lambda-extra {b:?} does not lie in the kernel of restriction"));
    }
    if b.iter().all(|&x| x == 0) {
        warnings.push("lambda-extra is the identity; the extension is degenerate".into());
    }
    let group = frame.group.extend(m);
    let mut lambda: Vec<Element> = frame.lambda.iter().map(|l| l.iter().copied().chain([0]).collect()).collect();
    lambda.push(b.into_iter().chain([0]).collect());
    let uq = SmModule::build(&Presentation { group, lambda })?;
    Ok((uq, warnings))
}

#[derive(Clone, Debug)]
pub struct ChiReport {
    pub chi: IntMatrix,
    pub chi_prime: IntMatrix,
    pub chi_well_defined: bool,
    pub chi_prime_well_defined: bool,
    pub chi_injective: bool,
    pub chi_prime_injective: bool,
    pub chi_equivariant: bool,
    pub chi_prime_equivariant: bool,
    pub generator_images: bool,
    pub e_images: bool,
    pub rank_u: usize,
    pub rank_u_prime: usize,
    pub rank_uq: usize,
    pub m: u64,
    pub rank_identity: bool,
}

impl ChiReport {
    pub fn passed(&self) -> bool {
        self.chi_well_defined
            && self.chi_prime_well_defined
            && self.chi_injective
            && self.chi_prime_injective
            && self.chi_equivariant
            && self.chi_prime_equivariant
            && self.generator_images
            && self.e_images
            && self.rank_identity
    }
}

/// Image of a free vector of `U`'s layout under a monomial index map, projected to `U_q`.
fn map_free(uq: &SmModule, v: &[BigInt], index_map: &dyn Fn(usize) -> Option<usize>) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); uq.layout.total];
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        if let Some(t) = index_map(i) {
            out[t] += x;
        }
    }
    uq.quotient.project(&out)
}

fn rank_of(m: &IntMatrix) -> usize {
    hnf_only(m).rank()
}

/// Construct `χ: U -> U_q` and `χ': U' -> U_q` and verify them.
pub fn chi_embeddings(u: &SmModule, up: &PrimeQuotient, uq: &SmModule) -> Result<ChiReport> {
    let s = u.v();
    if uq.v() != s + 1 {
        return invalid("U_q must have exactly one more prime than U");
    }
    let m = uq.group.orders[s];
    let extra: Subset = 1 << s;
    let locate = |i: usize| -> (Option<Subset>, Element) {
        for b in &u.layout.blocks {
            if (b.offset..b.offset + b.size).contains(&i) {
                let g: Element = u.layout.coset_rep(b, i - b.offset).into_iter().chain([0]).collect();
                return (Some(b.mask), g);
            }
        }
        (None, vec![0; s + 1])
    };
    let chi_map = |i: usize| -> Option<usize> {
        match locate(i) {
            (Some(mask), g) => Some(uq.layout.index(mask | extra, &g)),
            (None, _) => Some(uq.layout.e_index(i - u.layout.e_offset)),
        }
    };
    let chi_prime_map = |i: usize| -> Option<usize> {
        match locate(i) {
            (Some(mask), g) => Some(uq.layout.index(mask, &g)),
            (None, _) => None,
        }
    };
    let mut chi = IntMatrix::zeros(0, uq.dim());
    for i in 0..u.dim() {
        chi.push_row(&map_free(uq, u.quotient.lift.row(i), &chi_map));
    }
    let mut chi_prime = IntMatrix::zeros(0, uq.dim());
    for i in 0..up.dim() {
        chi_prime.push_row(&map_free(uq, up.quotient.lift.row(i), &chi_prime_map));
    }
    let kernel_maps_to_zero = |k: &Lattice, f: &dyn Fn(usize) -> Option<usize>| {
        (0..k.rank()).all(|i| is_zero_vec(&map_free(uq, k.basis().row(i), f)))
    };
    let chi_well_defined = kernel_maps_to_zero(&u.quotient.kernel, &chi_map);
    let chi_prime_well_defined = kernel_maps_to_zero(&up.quotient.kernel, &chi_prime_map);
    let mut chi_equivariant = true;
    let mut chi_prime_equivariant = true;
    for j in 0..s {
        chi_equivariant &= u.gens[j].mul(&chi)? == chi.mul(&uq.gens[j])?;
        chi_prime_equivariant &= up.gens[j].mul(&chi_prime)? == chi_prime.mul(&uq.gens[j])?;
    }
    let full = u.full_mask();
    let mut generator_images = true;
    for (&mask, rho) in &u.rho {
        generator_images &= chi.vec_mul(rho) == uq.rho[&(mask | extra)];
        generator_images &= chi_prime.vec_mul(&up.rho[&mask]) == uq.rho[&mask];
    }
    generator_images &= !is_zero_vec(&up.rho[&full]);
    let mut e_images = true;
    for j in 0..s {
        let t = BigInt::from(u.group.orders[j]);
        e_images &= chi.vec_mul(&vec_scale(&u.e[j], &t)) == vec_scale(&uq.e[j], &t);
        e_images &= is_zero_vec(&up.project(&vec_scale(&u.e[j], &t)));
    }
    let rank_identity = uq.dim() as u64 == u.dim() as u64 + 1 + (m - 1) * up.dim() as u64;
    Ok(ChiReport {
        chi_injective: rank_of(&chi) == u.dim(),
        chi_prime_injective: rank_of(&chi_prime) == up.dim(),
        chi,
        chi_prime,
        chi_well_defined,
        chi_prime_well_defined,
        chi_equivariant,
        chi_prime_equivariant,
        generator_images,
        e_images,
        rank_u: u.dim(),
        rank_u_prime: up.dim(),
        rank_uq: uq.dim(),
        m,
        rank_identity,
    })
}

#[derive(Clone, Debug)]
pub struct BetaCertificate {
    pub certificate: RootCertificate,
    pub unit: bool,
    pub root_identity: bool,
    pub norm_identity: bool,
    pub r: BigInt,
}

impl BetaCertificate {
    pub fn passed(&self) -> bool {
        self.unit && self.root_identity && self.norm_identity
    }
}

/// Solve `(1-σ) y δ = s(B) ρ̃_∅` in `{x ∈ Ψ_q(P)^B : N_n x = 0}` and check the power identities.
pub fn solve_beta(uq: &SmModule, frame: &Frame, target_override: Option<&[BigInt]>) -> Result<Option<BetaCertificate>> {
    let ring = frame.ring;
    let s = frame.s();
    let n = *frame.n.last().expect("s >= 2");
    let base_kernel = frame.group.kernel_elements(frame.k);
    let embed = |g: &Element| -> Element { g.iter().copied().chain([0]).collect() };
    let b_elems: Vec<Element> = base_kernel.iter().map(embed).collect();
    let b_gens: Vec<Element> = frame.group.kernel_generators(frame.k).iter().map(embed).collect();
    let target = match target_override {
        Some(t) => t.to_vec(),
        None => uq.relative_norm(0, &b_elems),
    };
    let fixed = uq.fixed_sublattice(&uq.psi_part, &b_gens)?;
    let mq = uq.kernel_of_norm(&fixed, n, ring)?;
    if !mq.contains(&target) {
        return discrepancy("s(B) ρ̃_∅ is not killed by N_n inside the B-fixed part of U_q");
    }
    let middle: Vec<u64> = frame.n[1..s - 1].to_vec();
    let y = GroupRingElement::product(ring, &middle.iter().map(|&x| ring.one_minus_sigma_pow(x as i64)).collect::<Vec<_>>())?;
    let y_full = ring.one_minus_sigma_pow(1).mul(&y)?;
    let cert = match solve_root(uq, &mq, &y_full, &target, ring, n, frame.k)? {
        RootOutcome::Root(c) => c,
        RootOutcome::NoRoot { .. } => return Ok(None),
    };
    let r: BigInt = middle.iter().map(|&x| BigInt::from(ring.order() / x)).product();
    let sign = |e: usize| if e.is_multiple_of(2) { BigInt::from(1) } else { BigInt::from(-1) };
    let deltas_mid = middle.iter().map(|&x| ring.special_element(SpecialKind::Delta, x)).collect::<Result<Vec<_>>>()?;
    let prod_mid = GroupRingElement::product(ring, &deltas_mid)?;
    let lhs = uq.apply_ring(&ring.one_minus_sigma_pow(1), &cert.delta);
    let root_identity = vec_scale(&lhs, &r) == vec_scale(&uq.apply_ring(&prod_mid, &cert.target), &sign(s));
    let prod_all = ring.delta(frame.n[0])?.mul(&prod_mid)?;
    let norm_identity = vec_scale(&cert.delta, &(BigInt::from(ring.order()) * &r))
        == vec_scale(&uq.apply_ring(&prod_all, &cert.target), &sign(s + 1));
    let unit = uq.is_unit(&cert.delta);
    if !unit {
        return Err(Error::ModelDiscrepancy("the augmented root is not a unit".into()));
    }
    Ok(Some(BetaCertificate { certificate: cert, unit, root_identity, norm_identity, r }))
}
