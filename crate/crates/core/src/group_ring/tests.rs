use super::*;
use proptest::prelude::*;

fn ring(p: u64, k: u32) -> CyclicGroupRing {
    CyclicGroupRing::new(p, k).unwrap()
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

#[test]
fn small_products() {
    let r = ring(3, 1);
    let a = r.from_i64(&[1, 1]);
    assert_eq!(a.mul(&r.norm(1).unwrap()).unwrap(), r.from_i64(&[2, 2, 2]));
    assert_eq!(r.one().mul(&a).unwrap(), a);
    let r = ring(3, 2);
    let prod = r.one_minus_sigma_pow(3).mul(&r.from_i64(&[2, 1])).unwrap();
    assert_eq!(prod, r.from_i64(&[2, 1, 0, -2, -1]));
}

#[test]
fn special_elements() {
    let r = ring(3, 1);
    assert_eq!(r.norm(1).unwrap(), r.from_i64(&[1, 1, 1]));
    assert_eq!(r.delta(1).unwrap(), r.from_i64(&[0, 1, 2]));
    let r = ring(3, 2);
    assert_eq!(r.norm(3).unwrap(), r.from_i64(&[1, 0, 0, 1, 0, 0, 1]));
    assert!(r.norm(2).is_err());
}

#[test]
fn norm_and_delta_identities() {
    for (p, k) in [(3, 1), (3, 2), (5, 1), (3, 3), (7, 1)] {
        let r = ring(p, k);
        let order = r.order();
        for d in divisors(order) {
            let n = r.norm(d).unwrap();
            let u = r.one_minus_sigma_pow(d as i64);
            assert!(u.mul(&n).unwrap().is_zero());
            if d < order {
                let lhs = u.mul(&r.delta(d).unwrap()).unwrap();
                let rhs = n.sub(&r.one().scale(&BigInt::from(order / d))).unwrap();
                assert_eq!(lhs, rhs, "p={p} k={k} d={d}");
            }
        }
    }
}

#[test]
fn ring_mismatch_is_rejected() {
    let a = ring(3, 1).one();
    let b = ring(5, 1).one();
    assert!(matches!(a.mul(&b), Err(crate::Error::InvalidInput(_))));
}

#[test]
fn quotient_reduction_examples() {
    let r = ring(3, 2);
    let q = r.quotient(3).unwrap();
    assert_eq!(q.rank(), 6);
    let red = q.reduce(&r.sigma_pow(6));
    assert_eq!(red.coeffs(), &ints(&[-1, 0, 0, -1, 0, 0])[..]);
    assert!(q.reduce(&r.norm(3).unwrap()).is_zero());
    assert_eq!(q.reduce(&r.one()).coeffs()[0], BigInt::one());
    for n in [1, 3] {
        let q = r.quotient(n).unwrap();
        assert!(q.reduce(&r.norm(n).unwrap()).is_zero());
        assert!(!q.reduce(&r.norm(n).unwrap()).is_nonzerodivisor());
        assert!(q.reduce(&r.one()).is_nonzerodivisor());
        assert!(q.reduce(&r.one_minus_sigma_pow(n as i64)).is_nonzerodivisor());
    }
    assert!(r.quotient(9).is_err());
}

#[test]
fn zero_divisor_detected() {
    let r = ring(3, 2);
    let q = r.quotient(1).unwrap();
    // 1 - s^3 vanishes at the cube roots of unity, which are roots of f.
    assert!(!q.reduce(&r.one_minus_sigma_pow(3)).is_nonzerodivisor());
    assert!(q.reduce(&r.one_minus_sigma_pow(2)).is_nonzerodivisor());
}

#[test]
fn division_in_group_ring() {
    let r = ring(3, 2);
    let a = r.one_minus_sigma_pow(1);
    let b = r.one_minus_sigma_pow(2);
    assert!(a.divide(&b).unwrap().is_some());
    assert!(b.divide(&a).unwrap().is_some());
    assert!(r.one().divide(&a).unwrap().is_none());
}

#[test]
fn parse_and_format() {
    let r = ring(3, 2);
    assert_eq!(r.parse("1 - s^3").unwrap(), r.one_minus_sigma_pow(3));
    assert_eq!(r.parse("(1-s^3)(2+s)").unwrap().to_string(), "2 + s - 2*s^3 - s^4");
    assert_eq!(r.parse("3s^2 - s").unwrap(), r.from_i64(&[0, -1, 3]));
    assert_eq!(r.parse("s^9").unwrap(), r.one());
    assert_eq!(r.zero().to_string(), "0");
    assert!(r.parse("1 + t").is_err());
    assert!(r.parse("").is_err());
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn element(r: CyclicGroupRing) -> impl Strategy<Value = GroupRingElement> {
    prop::collection::vec(-6i64..=6, r.order() as usize).prop_map(move |c| r.from_i64(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn reduction_is_multiplicative(a in element(ring(3, 2)), b in element(ring(3, 2)), pick in 0usize..2) {
        let r = ring(3, 2);
        let q = r.quotient([1, 3][pick]).unwrap();
        let lhs = q.reduce(&a.mul(&b).unwrap());
        let rhs = q.reduce(&a).mul(&q.reduce(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplication_commutes_and_associates(a in element(ring(5, 1)), b in element(ring(5, 1)), c in element(ring(5, 1))) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn nonzerodivisors_act_injectively(a in element(ring(3, 2)), x in element(ring(3, 2)), y in element(ring(3, 2))) {
        let r = ring(3, 2);
        let q = r.quotient(1).unwrap();
        let a = q.reduce(&a);
        prop_assume!(a.is_nonzerodivisor());
        let (x, y) = (q.reduce(&x), q.reduce(&y));
        prop_assert_eq!(a.mul(&x).unwrap() == a.mul(&y).unwrap(), x == y);
    }

    #[test]
    fn norm_factoring(k in 1u32..=3) {
        let r = ring(3, k);
        let top = r.order() / 3;
        for n in divisors(top) {
            for nj in divisors(n) {
                let steps: Vec<GroupRingElement> = (1..=n / nj).map(|b| r.sigma_pow((b * nj) as i64)).collect();
                let sum = steps.iter().try_fold(r.zero(), |acc, s| acc.add(s)).unwrap();
                prop_assert_eq!(r.norm(nj).unwrap(), r.norm(n).unwrap().mul(&sum).unwrap());
            }
        }
    }
}
