//! Per-level roots, the unit lattices `C ⊆ C̄`, index statements, the jump basis,
//! the z-map and annihilator transfer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;

use crate::error::{discrepancy, Error, Result};
use crate::frame::Frame;
use crate::group_ring::{CyclicGroupRing, GroupRingElement};
use crate::lattice::{lattice_index, solve_row, vec_add, vec_scale, Index, IntMatrix, Lattice};
use crate::module::{solve_root, verify_delta_identity, RootCertificate, RootOutcome, SmModule, Subset};

#[derive(Clone, Debug)]
pub struct LevelSolution {
    pub level: u32,
    pub eta: Vec<BigInt>,
    pub delta: Vec<BigInt>,
    pub singleton: bool,
    pub certificate: Option<RootCertificate>,
    pub delta_identity: Option<bool>,
    pub eta_is_unit: bool,
}

/// Bitmask of `I - M_i`.
fn complement_mask(u: &SmModule, members: &[usize]) -> Subset {
    u.full_mask() & !members.iter().fold(0, |a, &j| a | (1 << j))
}

/// `Σ_{b ∈ B_i / T_{I - M_i}} b · ρ_{I - M_i}`.
///
/// Outside the singleton case the result is checked to be killed by the level norm.
pub fn target_vector(frame: &Frame, u: &SmModule, level: u32) -> Result<Vec<BigInt>> {
    let ld = frame.level_data(level)?;
    let eta = u.relative_norm(complement_mask(u, &ld.members), &frame.group.kernel_elements(level));
    if ld.members.len() == 1 {
        return Ok(eta);
    }
    let killed = u.apply_ring(&frame.ring.norm(ld.n_level)?, &eta);
    if !killed.iter().all(Zero::is_zero) {
        return discrepancy(format!("level {level} target is not killed by N_{}", ld.n_level));
    }
    Ok(eta)
}

/// `{x ∈ Ψ(P)^{B_i} : N_n x = 0}` for a level.
pub fn level_norm_kernel(frame: &Frame, u: &SmModule, level: u32) -> Result<Lattice> {
    let ld = frame.level_data(level)?;
    let fixed = u.fixed_sublattice(&u.psi_part, &frame.group.kernel_generators(level))?;
    u.kernel_of_norm(&fixed, ld.n_level, frame.ring)
}

pub fn build_levels(frame: &Frame, u: &SmModule) -> Result<Vec<LevelSolution>> {
    let c = frame.all_c()?;
    let mut out = Vec::with_capacity(frame.k as usize);
    for level in 1..=frame.k {
        let ld = frame.level_data(level)?;
        let eta = target_vector(frame, u, level)?;
        let eta_is_unit = u.is_unit(&eta);
        let (delta, certificate, delta_identity) = match ld.members.len() {
            1 => (u.apply_ring(&frame.ring.one_minus_sigma_pow(1), &eta), None, None),
            2 => {
                if !level_norm_kernel(frame, u, level)?.contains(&eta) {
                    return discrepancy(format!("level {level} target is outside the norm-kernel lattice"));
                }
                (eta.clone(), None, None)
            }
            _ => {
                let m = level_norm_kernel(frame, u, level)?;
                let y = ld.y.clone().expect("non-singleton level");
                let level_ring = CyclicGroupRing::new(frame.p, level)?;
                match solve_root(u, &m, &y, &eta, level_ring, ld.n_level, level)? {
                    RootOutcome::Root(cert) => {
                        let middle: Vec<(u64, u64)> = ld.middle.iter().map(|&j| (frame.n[j], c[j])).collect();
                        let ok = verify_delta_identity(u, &cert, frame.ring, &middle, ld.members.len())?;
                        if !ok {
                            return discrepancy(format!("delta identity fails at level {level}"));
                        }
                        (cert.delta.clone(), Some(cert), Some(ok))
                    }
                    RootOutcome::NoRoot { .. } => {
                        return discrepancy(format!("no root of y_{level} exists for the level {level} target"))
                    }
                }
            }
        };
        if !u.is_unit(&delta) {
            return discrepancy(format!("level {level} root is not a unit"));
        }
        out.push(LevelSolution { level, eta, delta, singleton: ld.members.len() == 1, certificate, delta_identity, eta_is_unit });
    }
    Ok(out)
}

/// All `ŝ^a x` for `a < p^k`.
pub fn orbit(u: &SmModule, x: &[BigInt]) -> Vec<Vec<BigInt>> {
    u.lift_powers.iter().map(|s| s.vec_mul(x)).collect()
}

fn orbit_span(u: &SmModule, xs: &[&Vec<BigInt>]) -> Lattice {
    let vecs: Vec<Vec<BigInt>> = xs.iter().flat_map(|x| orbit(u, x)).collect();
    Lattice::from_vectors(u.dim(), &vecs)
}

#[derive(Clone, Debug)]
pub struct UnitLattices {
    pub cbar: Lattice,
    pub c: Lattice,
    /// `cbar_sub[i - 1]` is spanned by the orbits of `δ_1 .. δ_i`.
    pub cbar_sub: Vec<Lattice>,
    /// Unit part of the span of every relative norm `w_J`, when requested.
    pub c_all_j: Option<Lattice>,
}

/// `w_J`: relative norm of `ρ_{I-J}` from `F_J` down to `F_J ∩ L`.
pub fn all_j_generators(frame: &Frame, u: &SmModule) -> Vec<Vec<BigInt>> {
    let full = u.full_mask();
    let mut out = Vec::new();
    for j_mask in 1..=full {
        let rest = full & !j_mask;
        let tmax = (0..frame.s()).filter(|&j| rest & (1 << j) != 0).map(|j| frame.t[j]).max().unwrap_or(1);
        let mut e = 0;
        let mut x = 1;
        while x < tmax {
            x *= frame.p;
            e += 1;
        }
        let level = frame.k - e;
        out.push(u.relative_norm(rest, &frame.group.kernel_elements(level)));
    }
    out
}

pub fn unit_lattices(frame: &Frame, u: &SmModule, levels: &[LevelSolution], all_j: bool) -> UnitLattices {
    let deltas: Vec<&Vec<BigInt>> = levels.iter().map(|l| &l.delta).collect();
    let etas: Vec<&Vec<BigInt>> = levels.iter().map(|l| &l.eta).collect();
    let cbar = orbit_span(u, &deltas);
    let units = u.unit_lattice();
    let c = orbit_span(u, &etas).intersect(&units);
    let cbar_sub = (1..=deltas.len()).map(|i| orbit_span(u, &deltas[..i])).collect();
    let c_all_j = all_j.then(|| {
        let w = all_j_generators(frame, u);
        orbit_span(u, &w.iter().collect::<Vec<_>>()).intersect(&units)
    });
    UnitLattices { cbar, c, cbar_sub, c_all_j }
}

#[derive(Clone, Debug)]
pub struct IndexReport {
    pub nu: u64,
    pub phi_l: BigInt,
    pub l_index: u64,
    pub fi_over_l: u64,
    pub lattice_index: BigInt,
    pub p_nu: BigInt,
    pub p_nu_matches: bool,
    pub fi_divides_phi: bool,
    pub equality_case: bool,
    pub equality_expected: bool,
    pub rank_cbar: usize,
    pub rank_c: usize,
    pub all_j_index: Option<BigInt>,
    pub all_j_changes_c: Option<bool>,
}

impl IndexReport {
    pub fn passed(&self) -> bool {
        self.p_nu_matches && self.lattice_index == self.p_nu && self.fi_divides_phi && self.equality_case == self.equality_expected
    }
}

pub fn index_check(frame: &Frame, lat: &UnitLattices) -> Result<IndexReport> {
    let nu = frame.nu();
    let phi_l = frame.phi_l()?;
    let jp = frame.jump_profile();
    let p_nu = BigInt::from(frame.p).pow(nu as u32);
    let (q, rem) = phi_l.div_rem(&BigInt::from(jp.l_index));
    let p_nu_matches = rem.is_zero() && q == p_nu;
    let finite = |i: Index, what: &str| match i {
        Index::Finite(x) => Ok(x),
        Index::Infinite => Err(Error::ModelDiscrepancy(format!("{what} has smaller rank than C̄"))),
    };
    let lattice_idx = match lattice_index(&lat.c, &lat.cbar) {
        Ok(i) => finite(i, "C")?,
        Err(Error::NotSublattice(_)) => return discrepancy("C is not contained in C̄"),
        Err(e) => return Err(e),
    };
    let fi_over_l = frame.fi_over_l();
    let fi = BigInt::from(fi_over_l);
    let fi_divides_phi = phi_l.is_multiple_of(&fi);
    let equality_case = phi_l == fi;
    let equality_expected = frame.n[..frame.s() - 1].iter().all(|&x| x == 1);
    let (all_j_index, all_j_changes_c) = match &lat.c_all_j {
        Some(cj) => {
            let idx = match lattice_index(cj, &lat.cbar) {
                Ok(Index::Finite(x)) => Some(x),
                _ => None,
            };
            (idx, Some(cj != &lat.c))
        }
        None => (None, None),
    };
    Ok(IndexReport {
        nu,
        phi_l,
        l_index: jp.l_index,
        fi_over_l,
        lattice_index: lattice_idx,
        p_nu,
        p_nu_matches,
        fi_divides_phi,
        equality_case,
        equality_expected,
        rank_cbar: lat.cbar.rank(),
        rank_c: lat.c.rank(),
        all_j_index,
        all_j_changes_c,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaValues {
    pub fi_units: Option<BigInt>,
    pub l_units_c: BigInt,
    pub l_units_cbar: BigInt,
    pub warnings: Vec<String>,
}

fn exact_div(num: &BigInt, den: &BigInt, what: &str, notes: &[String]) -> Result<BigInt> {
    if den.is_zero() || !num.is_multiple_of(den) {
        let mut msgs = vec![format!("{what} = {num}/{den} is not an integer")];
        msgs.extend(notes.iter().cloned());
        return Err(Error::Validation(msgs));
    }
    Ok(num / den)
}

/// Consistency notes on the analytic inputs; for `p > 3` the index formula forces `φ_L | h_L`.
pub fn formula_warnings(frame: &Frame) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if let Some(h_l) = frame.analytic.as_ref().and_then(|a| a.h_l.clone()) {
        let phi = frame.phi_l()?;
        if frame.p > 3 && !h_l.is_multiple_of(&phi) {
            out.push(format!("phi_L = {phi} does not divide h_L = {h_l}, although p > 3"));
        }
    }
    Ok(out)
}

/// Exact evaluation of the unit index formulas from the analytic inputs.
pub fn index_formulas(frame: &Frame) -> Result<FormulaValues> {
    let Some(a) = &frame.analytic else {
        return Err(Error::Validation(vec!["analytic inputs are required for the index formulas".into()]));
    };
    let need = |v: &Option<BigInt>, name: &str| {
        v.clone().ok_or_else(|| Error::Validation(vec![format!("analytic input {name} is missing")]))
    };
    let h = need(&a.h, "h")?;
    let w = need(&a.w_k, "w_K")?;
    let f = need(&a.f_i, "f_I")?;
    let h_l = need(&a.h_l, "h_L")?;
    let warnings = formula_warnings(frame)?;
    let base = BigInt::from(12) * &w * &f;
    let phi = frame.phi_l()?;
    let l_index = BigInt::from(frame.jump_profile().l_index);
    let pow_l = base.pow((frame.pk() - 1) as u32);
    let l_units_cbar = exact_div(&(&pow_l * &h_l), &(&h * &phi), "[O_L^x : C̄_L]", &warnings)?;
    let l_units_c = exact_div(&(&pow_l * &h_l), &(&h * &l_index), "[O_L^x : C_L]", &warnings)?;
    let fi_units = match &a.h_fi {
        Some(h_fi) => {
            let e = frame.fi_degree() - 1;
            Some(exact_div(&(base.pow(e as u32) * h_fi), &h, "[O_FI^x : C_FI]", &warnings)?)
        }
        None => None,
    };
    Ok(FormulaValues { fi_units, l_units_c, l_units_cbar, warnings })
}

#[derive(Clone, Debug)]
pub struct JumpBasis {
    pub vectors: Vec<Vec<BigInt>>,
    /// `(jump level, block size)` per block.
    pub blocks: Vec<(u32, usize)>,
    pub count_matches: bool,
    pub spans: bool,
}

impl JumpBasis {
    pub fn verified(&self) -> bool {
        self.count_matches && self.spans
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.1).collect()
    }

    pub fn matrix(&self, dim: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(0, dim);
        for v in &self.vectors {
            m.push_row(v);
        }
        m
    }
}

/// `{ŝ^a δ_{s_t} : a < p^{s_t} - p^{s_{t-1}}}` over consecutive jumps.
pub fn jump_basis(frame: &Frame, u: &SmModule, levels: &[LevelSolution], lat: &UnitLattices) -> JumpBasis {
    let jumps = frame.jump_profile().jumps;
    let mut vectors = Vec::new();
    let mut blocks = Vec::new();
    for w in jumps.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let size = (frame.p.pow(hi) - frame.p.pow(lo)) as usize;
        let delta = &levels[(hi - 1) as usize].delta;
        vectors.extend(orbit(u, delta).into_iter().take(size));
        blocks.push((hi, size));
    }
    let count_matches = vectors.len() == lat.cbar.rank();
    let spans = Lattice::from_vectors(u.dim(), &vectors) == lat.cbar;
    JumpBasis { vectors, blocks, count_matches, spans }
}

/// `(1 - σ^{p^r}) κ`.
pub fn annihilator_transfer(frame: &Frame, kappa: &GroupRingElement) -> Result<GroupRingElement> {
    let r = frame.r_characterization()?;
    frame.ring.one_minus_sigma_pow(frame.p.pow(r) as i64).mul(kappa)
}

/// Read `ρ` off the top block of the jump-basis coordinates of `f κ x` and return `(1 - σ^{p^r}) ρ`.
pub fn z_map(
    frame: &Frame,
    u: &SmModule,
    jb: &JumpBasis,
    x: &[BigInt],
    f: &BigInt,
    kappa: &GroupRingElement,
) -> Result<GroupRingElement> {
    let y = vec_scale(&u.apply_ring(kappa, x), f);
    let m = jb.matrix(u.dim());
    let Some(sol) = solve_row(&m, &y)? else {
        return Err(Error::InvalidInput("vector does not lie in C̄".into()));
    };
    let (_, top) = *jb.blocks.last().expect("at least one block");
    let start = jb.vectors.len() - top;
    let mut rho = frame.ring.zero().into_coeffs();
    rho[..top].clone_from_slice(&sol.particular[start..]);
    let r = frame.jump_profile().r;
    frame.ring.one_minus_sigma_pow(frame.p.pow(r) as i64).mul(&frame.ring.element(rho)?)
}

/// The same quantity from a random decomposition `f κ x = (part in C̄_{L_r}) + ρ δ_k`, with `ρ` a full orbit coefficient vector.
pub fn z_map_alternative<R: Rng>(
    frame: &Frame,
    u: &SmModule,
    levels: &[LevelSolution],
    x: &[BigInt],
    f: &BigInt,
    kappa: &GroupRingElement,
    rng: &mut R,
) -> Result<GroupRingElement> {
    let r = frame.jump_profile().r as usize;
    let pk = frame.pk() as usize;
    let mut gens = IntMatrix::zeros(0, u.dim());
    for l in &levels[..r] {
        for v in orbit(u, &l.delta) {
            gens.push_row(&v);
        }
    }
    let low = gens.rows();
    for v in orbit(u, &levels.last().expect("k >= 1").delta) {
        gens.push_row(&v);
    }
    let y = vec_scale(&u.apply_ring(kappa, x), f);
    let Some(sol) = solve_row(&gens, &y)? else {
        return Err(Error::InvalidInput("vector does not lie in C̄".into()));
    };
    let mut coeffs = sol.particular;
    for k in &sol.kernel {
        let c = BigInt::from(rng.gen_range(-3i64..=3));
        coeffs = vec_add(&coeffs, &vec_scale(k, &c));
    }
    if gens.vec_mul(&coeffs) != y {
        return Err(Error::Internal("alternative decomposition does not reproduce the vector".into()));
    }
    let rho = frame.ring.element(coeffs[low..low + pk].to_vec())?;
    frame.ring.one_minus_sigma_pow(frame.p.pow(r as u32) as i64).mul(&rho)
}

#[derive(Clone, Debug)]
pub struct NormCheck {
    pub level: u32,
    pub member: bool,
    pub equal_mu: bool,
    pub span_equal: Option<bool>,
}

/// `ν_{i,i-1} δ_i` lies in the `Z[Γ]`-span of `δ_{i-1}`, with span equality when `μ_i = μ_{i-1}`.
pub fn norm_membership_checks(frame: &Frame, u: &SmModule, levels: &[LevelSolution]) -> Result<Vec<NormCheck>> {
    let mu = frame.jump_profile().mu;
    let mut out = Vec::new();
    for i in 2..=frame.k {
        let step = frame.p.pow(i - 1);
        let nu = (0..frame.p).fold(frame.ring.zero(), |acc, a| acc.add(&frame.ring.sigma_pow((a * step) as i64)).expect("same ring"));
        let image = u.apply_ring(&nu, &levels[(i - 1) as usize].delta);
        let lower = orbit_span(u, &[&levels[(i - 2) as usize].delta]);
        let member = lower.contains(&image);
        let equal_mu = mu[(i - 1) as usize] == mu[(i - 2) as usize];
        let span_equal = equal_mu.then(|| orbit_span(u, &[&image]) == lower);
        out.push(NormCheck { level: i, member, equal_mu, span_equal });
    }
    Ok(out)
}

/// Whether `ρ δ_k` lies in `C̄_{L_r}` and whether `(1 - σ^{p^r}) ρ = 0`.
pub fn uniqueness_probe(frame: &Frame, u: &SmModule, levels: &[LevelSolution], lat: &UnitLattices, rho: &GroupRingElement) -> Result<(bool, bool)> {
    let r = frame.jump_profile().r as usize;
    let v = u.apply_ring(rho, &levels.last().expect("k >= 1").delta);
    let inside = if r == 0 { v.iter().all(Zero::is_zero) } else { lat.cbar_sub[r - 1].contains(&v) };
    let killed = frame.ring.one_minus_sigma_pow(frame.p.pow(r as u32) as i64).mul(rho)?.is_zero();
    Ok((inside, killed))
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub level: u32,
    pub probes: usize,
    pub agree: usize,
    pub solvable: usize,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.agree == self.probes
    }
}

/// Random `(y, target)` pairs on the top level: direct solvability against the Hom criterion.
pub fn oracle_probes<R: Rng>(frame: &Frame, u: &SmModule, count: usize, rng: &mut R) -> Result<OracleReport> {
    let level = frame.k;
    let ld = frame.level_data(level)?;
    let m = level_norm_kernel(frame, u, level)?;
    let level_ring = CyclicGroupRing::new(frame.p, level)?;
    let quotient = level_ring.quotient(ld.n_level)?;
    let span = level_ring.order() as usize;
    let mut report = OracleReport { level, ..Default::default() };
    while report.probes < count {
        let coeffs: Vec<BigInt> = (0..span).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect();
        let y = frame.ring.from_poly(&coeffs);
        if !quotient.reduce(&level_ring.from_poly(&coeffs)).is_nonzerodivisor() {
            continue;
        }
        let x = m.basis().to_rows().iter().fold(vec![BigInt::zero(); u.dim()], |acc, r| {
            vec_add(&acc, &vec_scale(r, &BigInt::from(rng.gen_range(-3i64..=3))))
        });
        let target = if rng.gen_bool(0.5) { u.apply_ring(&y, &x) } else { x };
        let direct = crate::module::direct_solve(u, &m, &y, &target)?;
        let (criterion, _) = crate::module::hom_criterion(u, &m, &y, &target, level_ring, ld.n_level)?;
        report.probes += 1;
        report.solvable += usize::from(direct.is_some());
        report.agree += usize::from(direct.is_some() == criterion);
    }
    Ok(report)
}
