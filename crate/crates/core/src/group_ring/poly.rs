//! Dense integer polynomials, lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub fn degree(a: &[BigInt]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

fn trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Remainder modulo a monic polynomial, padded to `len` coefficients.
pub fn rem_monic(a: &[BigInt], f: &[BigInt], len: usize) -> Vec<BigInt> {
    let df = degree(f).expect("nonzero modulus");
    debug_assert!(f[df].is_one());
    let mut r = a.to_vec();
    let mut top = r.len();
    while top > df {
        top -= 1;
        let c = std::mem::take(&mut r[top]);
        if c.is_zero() {
            continue;
        }
        let shift = top - df;
        for (j, fc) in f[..df].iter().enumerate() {
            if !fc.is_zero() {
                r[shift + j] -= &c * fc;
            }
        }
    }
    r.resize(len, BigInt::zero());
    r.truncate(len);
    r
}

fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn primitive(a: Vec<BigInt>) -> Vec<BigInt> {
    let c = content(&a);
    if c.is_zero() || c.is_one() {
        return a;
    }
    a.into_iter().map(|x| x / &c).collect()
}

/// Pseudo-remainder of `a` by `b`.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = degree(b).expect("nonzero divisor");
    let lc = b[db].clone();
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr].clone();
        for x in r.iter_mut() {
            *x *= &lc;
        }
        let shift = dr - db;
        for (j, bc) in b[..=db].iter().enumerate() {
            r[shift + j] -= &c * bc;
        }
        r = trim(r);
    }
    r
}

/// Primitive greatest common divisor over `Q[X]`, normalized with positive leading coefficient.
pub fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = primitive(trim(a.to_vec()));
    let mut y = primitive(trim(b.to_vec()));
    while degree(&y).is_some() {
        let r = primitive(prem(&x, &y));
        x = y;
        y = r;
    }
    if x.last().is_some_and(|c| c.is_negative()) {
        x = x.into_iter().map(|c| -c).collect();
    }
    x
}
