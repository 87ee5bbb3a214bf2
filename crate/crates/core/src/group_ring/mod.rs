//! Arithmetic in `Z[Γ]` for a cyclic group of order `p^k` and in its quotient by a norm element.

mod parse;
mod poly;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{invalid, Result};
use crate::lattice::{solve_row, IntMatrix};

pub use parse::parse_polynomial;

/// The integral group ring of `⟨σ⟩`, cyclic of order `p^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CyclicGroupRing {
    p: u64,
    k: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialKind {
    Norm,
    Delta,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl CyclicGroupRing {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return invalid(format!("{p} is not an odd prime"));
        }
        if k == 0 {
            return invalid("k must be positive");
        }
        match p.checked_pow(k) {
            Some(o) if o <= 1 << 20 => Ok(CyclicGroupRing { p, k }),
            _ => invalid(format!("group order {p}^{k} is too large")),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }

    fn len(&self) -> usize {
        self.order() as usize
    }

    pub fn zero(&self) -> GroupRingElement {
        GroupRingElement { ring: *self, coeffs: vec![BigInt::zero(); self.len()] }
    }

    pub fn one(&self) -> GroupRingElement {
        self.sigma_pow(0)
    }

    /// `σ^e`, exponent taken mod the group order.
    pub fn sigma_pow(&self, e: i64) -> GroupRingElement {
        let mut z = self.zero();
        let i = e.rem_euclid(self.order() as i64) as usize;
        z.coeffs[i] = BigInt::one();
        z
    }

    /// `1 - σ^e`.
    pub fn one_minus_sigma_pow(&self, e: i64) -> GroupRingElement {
        self.one().sub(&self.sigma_pow(e)).expect("same ring")
    }

    pub fn element(&self, coeffs: Vec<BigInt>) -> Result<GroupRingElement> {
        if coeffs.len() != self.len() {
            return invalid(format!("expected {} coefficients, got {}", self.len(), coeffs.len()));
        }
        Ok(GroupRingElement { ring: *self, coeffs })
    }

    /// Reduce an arbitrary-degree polynomial in `σ` using `σ^{p^k} = 1`.
    pub fn from_poly(&self, poly: &[BigInt]) -> GroupRingElement {
        let mut z = self.zero();
        let n = self.len();
        for (i, c) in poly.iter().enumerate() {
            z.coeffs[i % n] += c;
        }
        z
    }

    pub fn from_i64(&self, coeffs: &[i64]) -> GroupRingElement {
        self.from_poly(&coeffs.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>())
    }

    pub fn parse(&self, s: &str) -> Result<GroupRingElement> {
        Ok(self.from_poly(&parse_polynomial(s)?))
    }

    pub fn divides_order(&self, d: u64) -> bool {
        d > 0 && self.order().is_multiple_of(d)
    }

    /// `N_d = Σ_{i=1}^{p^k/d} σ^{id}` or `Δ_d = Σ_{i=1}^{p^k/d - 1} i σ^{id}`.
    pub fn special_element(&self, kind: SpecialKind, d: u64) -> Result<GroupRingElement> {
        self.special_element_twisted(kind, d, 1)
    }

    /// As [`special_element`](Self::special_element) with steps `σ^{c d}` in place of `σ^d`.
    pub fn special_element_twisted(&self, kind: SpecialKind, d: u64, c: u64) -> Result<GroupRingElement> {
        if !self.divides_order(d) {
            return invalid(format!("{d} does not divide {}", self.order()));
        }
        let count = self.order() / d;
        let step = (c % self.order()) * d;
        let mut z = self.zero();
        match kind {
            SpecialKind::Norm => {
                for i in 1..=count {
                    z.coeffs[((i * step) % self.order()) as usize] += 1;
                }
            }
            SpecialKind::Delta => {
                for i in 1..count {
                    z.coeffs[((i * step) % self.order()) as usize] += i;
                }
            }
        }
        Ok(z)
    }

    pub fn norm(&self, d: u64) -> Result<GroupRingElement> {
        self.special_element(SpecialKind::Norm, d)
    }

    pub fn delta(&self, d: u64) -> Result<GroupRingElement> {
        self.special_element(SpecialKind::Delta, d)
    }

    /// Matrix of multiplication by `σ` on row vectors of coefficients.
    pub fn shift_matrix(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, (i + 1) % n)] = BigInt::one();
        }
        m
    }

    /// Reduce modulo `N_n`; `n` must divide `p^{k-1}`.
    pub fn quotient(&self, n: u64) -> Result<QuotientRing> {
        if n == 0 || !self.order().is_multiple_of(n * self.p) {
            return invalid(format!("{n} does not divide p^(k-1) = {}", self.order() / self.p));
        }
        Ok(QuotientRing { ring: *self, n })
    }
}

/// Element of `Z[Γ]`; `coeffs[i]` is the coefficient of `σ^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    ring: CyclicGroupRing,
    coeffs: Vec<BigInt>,
}

impl GroupRingElement {
    pub fn ring(&self) -> CyclicGroupRing {
        self.ring
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return invalid("group ring mismatch");
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[(i + j) % n] += a * b;
                }
            }
        }
        Ok(GroupRingElement { ring: self.ring, coeffs: out })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(GroupRingElement { ring: self.ring, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(GroupRingElement { ring: self.ring, coeffs })
    }

    pub fn neg(&self) -> Self {
        GroupRingElement { ring: self.ring, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        GroupRingElement { ring: self.ring, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn augmentation(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Product of a list; the empty product is `1`.
    pub fn product(ring: CyclicGroupRing, factors: &[GroupRingElement]) -> Result<Self> {
        factors.iter().try_fold(ring.one(), |acc, f| acc.mul(f))
    }

    /// Matrix of `z -> z * self` on row vectors of coefficients.
    pub fn mul_matrix(&self) -> IntMatrix {
        let n = self.coeffs.len();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            for (j, c) in self.coeffs.iter().enumerate() {
                m[(i, (i + j) % n)] = c.clone();
            }
        }
        m
    }

    /// Some `q` with `q * divisor = self`, if one exists in `Z[Γ]`.
    pub fn divide(&self, divisor: &Self) -> Result<Option<Self>> {
        self.check(divisor)?;
        let sol = solve_row(&divisor.mul_matrix(), &self.coeffs)?;
        Ok(sol.map(|s| GroupRingElement { ring: self.ring, coeffs: s.particular }))
    }

    pub fn reduce(&self, n: u64) -> Result<QuotientRingElement> {
        Ok(self.ring.quotient(n)?.reduce(self))
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(&self.coeffs))
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingElement({})", self)
    }
}

/// Render coefficients as `2 + s - 2*s^3`.
pub fn format_poly(coeffs: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => "s".to_string(),
            _ => format!("s^{i}"),
        };
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{a}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `R = Z[Γ]/N_n Z[Γ]`, realized as `Z[X]/(f)` with `f = Σ_{i<p^k/n} X^{in}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuotientRing {
    ring: CyclicGroupRing,
    n: u64,
}

impl QuotientRing {
    pub fn base(&self) -> CyclicGroupRing {
        self.ring
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Rank of `R` over `Z`, equal to `deg f = p^k - n`.
    pub fn rank(&self) -> usize {
        (self.ring.order() - self.n) as usize
    }

    /// Coefficients of the monic modulus `f`.
    pub fn modulus(&self) -> Vec<BigInt> {
        let mut f = vec![BigInt::zero(); self.rank() + 1];
        for i in 0..self.ring.order() / self.n {
            f[(i * self.n) as usize] = BigInt::one();
        }
        f
    }

    fn reduce_poly(&self, poly: &[BigInt]) -> Vec<BigInt> {
        poly::rem_monic(poly, &self.modulus(), self.rank())
    }

    pub fn reduce(&self, a: &GroupRingElement) -> QuotientRingElement {
        QuotientRingElement { ring: *self, coeffs: self.reduce_poly(a.coeffs()) }
    }

    pub fn element(&self, coeffs: Vec<BigInt>) -> Result<QuotientRingElement> {
        if coeffs.len() != self.rank() {
            return invalid(format!("expected {} coefficients, got {}", self.rank(), coeffs.len()));
        }
        Ok(QuotientRingElement { ring: *self, coeffs })
    }

    /// Matrix of multiplication by `X` on row vectors of canonical coefficients.
    pub fn shift_matrix(&self) -> IntMatrix {
        let r = self.rank();
        let mut m = IntMatrix::zeros(r, r);
        for i in 0..r {
            let mut mono = vec![BigInt::zero(); i + 2];
            mono[i + 1] = BigInt::one();
            for (j, c) in self.reduce_poly(&mono).into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        m
    }
}

/// Canonical representative in `R`, of length `p^k - n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuotientRingElement {
    ring: QuotientRing,
    coeffs: Vec<BigInt>,
}

impl QuotientRingElement {
    pub fn ring(&self) -> QuotientRing {
        self.ring
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return invalid("quotient ring mismatch");
        }
        let prod = poly::mul(&self.coeffs, &other.coeffs);
        Ok(QuotientRingElement { ring: self.ring, coeffs: self.ring.reduce_poly(&prod) })
    }

    /// True iff the representing polynomial is coprime to `f` over the rationals.
    pub fn is_nonzerodivisor(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        poly::degree(&poly::gcd(&self.coeffs, &self.ring.modulus())) == Some(0)
    }

    /// Matrix of `z -> z * self` on canonical coefficient rows.
    pub fn mul_matrix(&self) -> IntMatrix {
        let r = self.ring.rank();
        let mut m = IntMatrix::zeros(r, r);
        for i in 0..r {
            let mut shifted = vec![BigInt::zero(); i];
            shifted.extend(self.coeffs.iter().cloned());
            for (j, c) in self.ring.reduce_poly(&shifted).into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        m
    }

    /// Lift back to `Z[Γ]` by zero-extending the canonical representative.
    pub fn lift(&self) -> GroupRingElement {
        self.ring.ring.from_poly(&self.coeffs)
    }
}

#[cfg(test)]
mod tests;
