//! Seeded invariant sweep over every layer for one instance.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::annihilator::{
    annihilator_transfer, build_levels, index_check, index_formulas, jump_basis, norm_membership_checks, oracle_probes,
    uniqueness_probe, unit_lattices, z_map, z_map_alternative,
};
use crate::error::Result;
use crate::frame::Frame;
use crate::group_ring::{CyclicGroupRing, GroupRingElement};
use crate::lattice::{abs_det, hnf, saturate, snf, solve_integer, vec_add, vec_scale, IntMatrix, Lattice};
use crate::module::{build_uq, chi_embeddings, hom_sweep, solve_beta, Presentation, PrimeQuotient, SmModule};

/// Groups of at most this order also run the auxiliary-prime suite.
const EXTENSION_ORDER_LIMIT: u64 = 81;

#[derive(Default)]
struct Suite {
    name: &'static str,
    passed: usize,
    failures: Vec<String>,
    skipped: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, ..Default::default() }
    }

    fn check(&mut self, ok: bool, label: impl Into<String>) {
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(label.into());
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed,
            "failed": self.failures.len(),
            "failures": self.failures,
            "skipped": self.skipped,
        })
    }
}

fn random_element<R: Rng>(ring: CyclicGroupRing, rng: &mut R, bound: i64) -> GroupRingElement {
    let coeffs = (0..ring.order()).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    ring.element(coeffs).expect("length matches")
}

fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> IntMatrix {
    let data = (0..rows).map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-6i64..=6))).collect()).collect();
    IntMatrix::from_rows(data, cols).expect("shape")
}

fn group_ring_suite<R: Rng>(frame: &Frame, rng: &mut R) -> Result<Suite> {
    let mut s = Suite::new("group_ring");
    let mut rings = vec![CyclicGroupRing::new(3, 1)?, CyclicGroupRing::new(3, 2)?, CyclicGroupRing::new(5, 1)?];
    if !rings.contains(&frame.ring) {
        rings.push(frame.ring);
    }
    for ring in rings {
        let pk = ring.order();
        let divisors: Vec<u64> = (1..=pk).filter(|d| pk % d == 0).collect();
        for &d in &divisors {
            let n = ring.norm(d)?;
            let delta = ring.delta(d)?;
            let one_minus = ring.one_minus_sigma_pow(d as i64);
            s.check(one_minus.mul(&n)?.is_zero(), format!("(1-s^{d}) N_{d} = 0 in {pk}"));
            let rhs = n.sub(&ring.one().scale(&BigInt::from(pk / d)))?;
            s.check(one_minus.mul(&delta)? == rhs, format!("(1-s^{d}) D_{d} = N_{d} - {} in {pk}", pk / d));
            for &e in &divisors {
                if e % d == 0 {
                    let steps: Vec<GroupRingElement> = (0..e / d).map(|b| ring.sigma_pow((b * d) as i64)).collect();
                    let partial = steps.iter().try_fold(ring.zero(), |acc, x| acc.add(x))?;
                    s.check(ring.norm(e)?.mul(&partial)? == n, format!("N_{d} = N_{e} * partial sum in {pk}"));
                }
            }
        }
        for _ in 0..5 {
            let a = random_element(ring, rng, 3);
            let b = random_element(ring, rng, 3);
            s.check(a.mul(&b)? == b.mul(&a)?, "commutativity");
            s.check(ring.parse(&a.to_string())? == a, format!("parse round trip of {a}"));
        }
    }
    Ok(s)
}

fn lattice_suite<R: Rng>(rng: &mut R) -> Suite {
    let mut s = Suite::new("lattice");
    for probe in 0..20 {
        let a = random_matrix(4, 3, rng);
        let h = hnf(&a);
        s.check(h.u.mul(&a).ok() == Some(h.h.clone()), format!("hnf transform {probe}"));
        s.check(abs_det(&h.u) == BigInt::from(1), format!("hnf unimodular {probe}"));
        let mut u = IntMatrix::identity(4);
        for _ in 0..6 {
            let (i, j) = (rng.gen_range(0..4), rng.gen_range(0..4));
            if i != j {
                u.add_row_multiple(i, j, &BigInt::from(rng.gen_range(-3i64..=3)), 0);
            }
        }
        s.check(hnf(&u.mul(&a).expect("shape")).basis() == h.basis(), format!("hnf uniqueness {probe}"));
        let sm = snf(&a);
        let chain = sm.diagonal().windows(2).all(|w| (&w[1] % &w[0]).is_zero());
        s.check(chain && sm.p.mul(&a).and_then(|x| x.mul(&sm.q)).ok() == Some(sm.d.clone()), format!("snf {probe}"));
        let x: Vec<BigInt> = (0..3).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect();
        let b = a.mul_vec(&x);
        let solved = solve_integer(&a, &b).ok().flatten().map(|sol| a.mul_vec(&sol.particular) == b);
        s.check(solved == Some(true), format!("solve {probe}"));
        let l = Lattice::from_generators(&a);
        let sat = saturate(&l);
        s.check(saturate(&sat) == sat && sat.contains_lattice(&l) && sat.rank() == l.rank(), format!("saturate {probe}"));
    }
    s
}

fn frame_suite(frame: &Frame) -> Result<Suite> {
    let mut s = Suite::new("frame");
    let jp = frame.jump_profile();
    s.check(frame.r_characterization().is_ok(), "r from jumps equals r from inertia");
    let phi = frame.phi_l()?;
    let p_nu = BigInt::from(frame.p).pow(frame.nu() as u32);
    s.check(p_nu * BigInt::from(jp.l_index) == phi, "p^nu [L:L~] = phi_L");
    s.check((&phi % BigInt::from(frame.fi_over_l())).is_zero(), "[F_I:L] divides phi_L");
    let c = frame.all_c()?;
    for j in 0..frame.s() {
        let a = frame.ring.one_minus_sigma_pow((c[j] * frame.n[j]) as i64);
        let b = frame.ring.one_minus_sigma_pow(frame.n[j] as i64);
        s.check(a.divide(&b)?.is_some() && b.divide(&a)?.is_some(), format!("c_{} generates the same ideal", j + 1));
    }
    Ok(s)
}

fn module_suite(frame: &Frame, u: &SmModule) -> Result<Suite> {
    let mut s = Suite::new("module");
    let d = u.rank_diagnostic();
    s.check(!d.degenerate, format!("rank {} equals |G| + s = {}", d.rank, d.expected));
    s.check(PrimeQuotient::build(u)?.dim() as u64 == frame.group.order(), "rank of the e-free quotient equals |G|");
    let id = IntMatrix::identity(u.dim());
    for (j, a) in u.gens.iter().enumerate() {
        s.check(a.pow(frame.group.orders[j]) == id, format!("generator {} has its order", j + 1));
        for b in &u.gens {
            s.check(a.mul(b)? == b.mul(a)?, "generators commute");
        }
        s.check(a.vec_mul(&u.rho[&u.full_mask()]) == u.rho[&u.full_mask()], "full-set generator is fixed");
        s.check(u.act(&frame.group.generator(j), &u.e[j]) == u.e[j], format!("e_{} is fixed by its inertia", j + 1));
    }
    Ok(s)
}

fn extension_suite(frame: &Frame, u: &SmModule) -> Result<Suite> {
    let mut s = Suite::new("extension");
    if frame.group.order() > EXTENSION_ORDER_LIMIT {
        s.skipped = Some(format!("group order {} exceeds {EXTENSION_ORDER_LIMIT}", frame.group.order()));
        return Ok(s);
    }
    let b = frame.group.kernel_elements(frame.k).into_iter().find(|g| g.iter().any(|&x| x != 0));
    let Some(b) = b else {
        s.skipped = Some("restriction kernel is trivial".into());
        return Ok(s);
    };
    let b: Vec<i64> = b.iter().map(|&x| x as i64).collect();
    let up = PrimeQuotient::build(u)?;
    let (uq, _) = build_uq(frame, frame.p, &b)?;
    let chi = chi_embeddings(u, &up, &uq)?;
    s.check(chi.rank_identity, "rank identity");
    s.check(chi.chi_well_defined && chi.chi_prime_well_defined, "embeddings are well defined");
    s.check(chi.chi_injective && chi.chi_prime_injective, "embeddings are injective");
    s.check(chi.chi_equivariant && chi.chi_prime_equivariant, "embeddings are equivariant");
    match solve_beta(&uq, frame, None)? {
        Some(beta) => {
            s.check(beta.unit, "auxiliary root is a unit");
            s.check(beta.root_identity, "auxiliary root identity");
            s.check(beta.norm_identity, "auxiliary norm identity");
        }
        None => s.check(false, "auxiliary root exists"),
    }
    Ok(s)
}

/// Run every suite; the body carries per-suite counts and totals.
pub fn run(frame: &Frame, seed: u64) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suites = vec![group_ring_suite(frame, &mut rng)?, lattice_suite(&mut rng), frame_suite(frame)?];
    let u = SmModule::build(&Presentation::from_frame(frame))?;
    suites.push(module_suite(frame, &u)?);

    let mut roots = Suite::new("roots");
    let levels = build_levels(frame, &u)?;
    for l in &levels {
        check_level(&mut roots, frame, &u, l)?;
    }
    suites.push(roots);

    let mut oracle = Suite::new("oracle");
    let report = oracle_probes(frame, &u, 50, &mut rng)?;
    oracle.check(report.passed(), format!("{}/{} probes agree", report.agree, report.probes));
    suites.push(oracle);

    let mut sweep_suite = Suite::new("hom_sweep");
    let w = u.relative_norm(0, &frame.group.kernel_elements(frame.k));
    let sweep = hom_sweep(&u, &frame.group.kernel_generators(frame.k), &w, frame.ring, &frame.n)?;
    for (i, e) in sweep.entries.iter().enumerate() {
        sweep_suite.check(e.witness.is_some(), format!("hom generator {}", i + 1));
    }
    suites.push(sweep_suite);

    suites.push(extension_suite(frame, &u)?);

    let mut ann = Suite::new("annihilator");
    let lat = unit_lattices(frame, &u, &levels, false);
    let idx = index_check(frame, &lat)?;
    ann.check(idx.passed(), format!("[C̄ : C] = {} against p^nu = {}", idx.lattice_index, idx.p_nu));
    let jb = jump_basis(frame, &u, &levels, &lat);
    ann.check(jb.verified(), "jump basis is a basis of C̄");
    for c in norm_membership_checks(frame, &u, &levels)? {
        ann.check(c.member && c.span_equal != Some(false), format!("norm relation at level {}", c.level));
    }
    let top = &levels.last().expect("k >= 1").delta;
    let cbar_rows = lat.cbar.basis().to_rows();
    for probe in 0..20 {
        let kappa = random_element(frame.ring, &mut rng, 2);
        let f = BigInt::from(rng.gen_range(1..=20u64)) * BigInt::from(frame.p) + 1;
        let z = z_map(frame, &u, &jb, top, &f, &kappa)?;
        ann.check(z == annihilator_transfer(frame, &kappa)?.scale(&f), format!("z-map on the top root, probe {probe}"));
        let x = cbar_rows.iter().fold(vec![BigInt::zero(); u.dim()], |acc, r| {
            vec_add(&acc, &vec_scale(r, &BigInt::from(rng.gen_range(-2i64..=2))))
        });
        let a = z_map(frame, &u, &jb, &x, &f, &kappa)?;
        let b = z_map_alternative(frame, &u, &levels, &x, &f, &kappa, &mut rng)?;
        ann.check(a == b, format!("z-map independent of decomposition, probe {probe}"));
        let rho = random_element(frame.ring, &mut rng, 3);
        let (inside, killed) = uniqueness_probe(frame, &u, &levels, &lat, &rho)?;
        ann.check(inside == killed, format!("lower-span membership matches the kernel, probe {probe}"));
    }
    suites.push(ann);

    let mut formulas = Suite::new("formulas");
    if frame.analytic.is_some() {
        formulas.check(index_formulas(frame).is_ok(), "index formulas are integral");
    } else {
        formulas.skipped = Some("no analytic inputs".into());
    }
    suites.push(formulas);

    let passed: usize = suites.iter().map(|s| s.passed).sum();
    let failed: usize = suites.iter().map(|s| s.failures.len()).sum();
    Ok(json!({
        "seed": seed,
        "suites": suites.iter().map(Suite::to_json).collect::<Vec<_>>(),
        "passed": passed,
        "failed": failed,
    }))
}

fn check_level(s: &mut Suite, frame: &Frame, u: &SmModule, l: &crate::annihilator::LevelSolution) -> Result<()> {
    let i = l.level;
    s.check(u.is_unit(&l.delta), format!("root at level {i} is a unit"));
    if l.singleton {
        s.check(!l.eta_is_unit, format!("singleton target at level {i} is not a unit"));
        let expected = u.apply_ring(&frame.ring.one_minus_sigma_pow(1), &l.eta);
        s.check(expected == l.delta, format!("singleton root at level {i}"));
    }
    if let Some(cert) = &l.certificate {
        s.check(u.apply_ring(&cert.y, &cert.delta) == l.eta, format!("y delta = target at level {i}"));
        s.check(cert.hom_evidence.iter().all(|e| e.witness.is_some()), format!("Hom certificate at level {i}"));
        s.check(l.delta_identity == Some(true), format!("delta identity at level {i}"));
    }
    Ok(())
}
