use num_traits::Zero;

use super::*;
use crate::frame::{fixtures::*, validate, Frame, RamificationInstance};
use crate::group_ring::CyclicGroupRing;
use crate::lattice::IntMatrix;

fn built(inst: RamificationInstance) -> (Frame, SmModule) {
    let f = validate(&inst).unwrap();
    let u = SmModule::build(&Presentation::from_frame(&f)).unwrap();
    (f, u)
}

#[test]
fn rank_rule_instance_a() {
    let (f, u) = built(instance_a());
    let d = u.rank_diagnostic();
    assert_eq!((d.rank, d.expected), (11, 11));
    assert!(!d.degenerate);
    assert_eq!(d.rank as u64, f.group.order() + f.s() as u64);
    assert_eq!(PrimeQuotient::build(&u).unwrap().dim(), 9);
}

#[test]
fn rank_rule_instance_b() {
    let (_, u) = built(instance_b());
    assert_eq!(u.rank_diagnostic().rank, 84);
    assert_eq!(PrimeQuotient::build(&u).unwrap().dim(), 81);
}

#[test]
fn checksum_is_stable() {
    let (_, u1) = built(instance_a());
    let (_, u2) = built(instance_a());
    assert_eq!(u1.rank_diagnostic().checksum, u2.rank_diagnostic().checksum);
    assert_eq!(u1.rank_diagnostic().checksum.len(), 64);
}

#[test]
fn generators_commute_and_have_their_orders() {
    let (f, u) = built(instance_b());
    for (j, a) in u.gens.iter().enumerate() {
        assert_eq!(a.pow(f.group.orders[j]), IntMatrix::identity(u.dim()));
        for b in &u.gens {
            assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
        }
    }
}

#[test]
fn e_vectors_are_fixed_by_inertia() {
    let (f, u) = built(instance_a());
    for j in 0..f.s() {
        let g = f.group.generator(j);
        assert_eq!(u.act(&g, &u.e[j]), u.e[j]);
    }
}

#[test]
fn valuations_detect_single_prime_complements() {
    let (_, u) = built(instance_a());
    let full = u.full_mask();
    for (&mask, rho) in &u.rho {
        let v = u.valuation(rho);
        let expected_unit = (full & !mask).count_ones() != 1;
        assert_eq!(v.iter().all(Zero::is_zero), expected_unit, "mask {mask}");
    }
}

#[test]
fn root_extraction_on_instance_b() {
    let (f, u) = built(instance_b());
    let ld = f.level_data(2).unwrap();
    let target = crate::annihilator::target_vector(&f, &u, 2).unwrap();
    let m = crate::annihilator::level_norm_kernel(&f, &u, 2).unwrap();
    let y = ld.y.clone().unwrap();
    assert_eq!(y, f.ring.one_minus_sigma_pow(2));
    let level_ring = CyclicGroupRing::new(3, 2).unwrap();
    let RootOutcome::Root(cert) = solve_root(&u, &m, &y, &target, level_ring, ld.n_level, 2).unwrap() else {
        panic!("expected a root");
    };
    assert_eq!(u.apply_ring(&y, &cert.delta), target);
    assert!(u.is_unit(&cert.delta));
    assert!(!cert.hom_evidence.is_empty());
    assert!(cert.hom_evidence.iter().all(|e| e.witness.is_some()));
    let c = f.all_c().unwrap();
    let middle: Vec<(u64, u64)> = ld.middle.iter().map(|&j| (f.n[j], c[j])).collect();
    assert!(verify_delta_identity(&u, &cert, f.ring, &middle, ld.members.len()).unwrap());
}

#[test]
fn perturbed_target_has_no_root() {
    let (f, u) = built(instance_b());
    let ld = f.level_data(2).unwrap();
    let m = crate::annihilator::level_norm_kernel(&f, &u, 2).unwrap();
    let y = ld.y.clone().unwrap();
    let level_ring = CyclicGroupRing::new(3, 2).unwrap();
    let basis = m.basis().row(0).to_vec();
    match solve_root(&u, &m, &y, &basis, level_ring, ld.n_level, 2).unwrap() {
        RootOutcome::Root(cert) => assert_eq!(u.apply_ring(&y, &cert.delta), basis),
        RootOutcome::NoRoot { hom_evidence } => assert!(hom_evidence.iter().any(|e| e.witness.is_none())),
    }
}

#[test]
fn zero_divisor_is_rejected() {
    let (f, u) = built(instance_b());
    let m = crate::annihilator::level_norm_kernel(&f, &u, 2).unwrap();
    let target = crate::annihilator::target_vector(&f, &u, 2).unwrap();
    let y = f.ring.from_i64(&[1, 1, 1]);
    let level_ring = CyclicGroupRing::new(3, 2).unwrap();
    assert!(solve_root(&u, &m, &y, &target, level_ring, 1, 2).is_err());
}

#[test]
fn hom_sweep_passes() {
    for inst in [instance_a(), instance_b()] {
        let (f, u) = built(inst);
        let w = u.relative_norm(0, &f.group.kernel_elements(f.k));
        let sweep = hom_sweep(&u, &f.group.kernel_generators(f.k), &w, f.ring, &f.n).unwrap();
        assert!(!sweep.entries.is_empty());
        for e in &sweep.entries {
            let q = e.witness.as_ref().unwrap();
            assert_eq!(q.mul(&sweep.modulus).unwrap(), e.value);
        }
    }
}

#[test]
fn augmentation_of_instance_a() {
    let (f, u) = built(instance_a());
    let up = PrimeQuotient::build(&u).unwrap();
    let (uq, warnings) = build_uq(&f, 3, &[1, 2]).unwrap();
    assert_eq!(uq.dim(), 30);
    assert_eq!(warnings.len(), 1);
    let chi = chi_embeddings(&u, &up, &uq).unwrap();
    assert!(chi.passed());
    assert_eq!(chi.rank_uq, chi.rank_u + 1 + 2 * chi.rank_u_prime);
    let beta = solve_beta(&uq, &f, None).unwrap().unwrap();
    assert!(beta.passed());
}

#[test]
fn augmentation_rejects_bad_inputs() {
    let f = validate(&instance_a()).unwrap();
    assert!(build_uq(&f, 4, &[1, 2]).is_err());
    assert!(build_uq(&f, 3, &[1, 1]).is_err());
}

#[test]
fn degenerate_lambda_is_flagged() {
    let (_, u) = built(RamificationInstance::from_json(DEGENERATE).unwrap());
    let d = u.rank_diagnostic();
    assert_eq!(d.degenerate, d.rank != d.expected);
}
