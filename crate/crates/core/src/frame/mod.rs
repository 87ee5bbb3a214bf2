//! The Galois frame of an instance: the group `G = ∏ T_j`, its restriction to `Γ`,
//! the splitting elements, and every combinatorial quantity derived from them.

mod instance;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{discrepancy, Error, Result};
use crate::group_ring::{is_prime, CyclicGroupRing, GroupRingElement};

pub use instance::{Analytic, RamificationInstance};

/// A finite abelian group `∏ Z/orders[j]` with a homomorphism `res` onto `Z/p^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupData {
    pub p: u64,
    pub k: u32,
    pub orders: Vec<u64>,
    /// `res(g_j)` for each component generator, in `0..p^k`.
    pub res_gens: Vec<u64>,
    /// Exponent vector of the chosen lift of `σ`.
    pub lift: Vec<u64>,
}

pub type Element = Vec<u64>;

impl GroupData {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn identity(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn generator(&self, j: usize) -> Element {
        let mut g = self.identity();
        g[j] = 1 % self.orders[j];
        g
    }

    pub fn normalize(&self, g: &[i64]) -> Element {
        g.iter().zip(&self.orders).map(|(&a, &t)| a.rem_euclid(t as i64) as u64).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Element {
        a.iter().zip(b).zip(&self.orders).map(|((x, y), t)| (x + y) % t).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Element {
        a.iter().zip(&self.orders).map(|(x, t)| (t - x % t) % t).collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Element {
        a.iter().zip(&self.orders).map(|(x, t)| (x * (c % t)) % t).collect()
    }

    pub fn res(&self, g: &[u64]) -> u64 {
        let m = self.modulus();
        g.iter().zip(&self.res_gens).fold(0, |acc, (a, r)| (acc + a * r) % m)
    }

    /// All elements, in lexicographic order of exponent vectors.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = vec![self.identity()];
        for (j, &t) in self.orders.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * t as usize);
            for g in &out {
                for a in 0..t {
                    let mut h = g.clone();
                    h[j] = a;
                    next.push(h);
                }
            }
            out = next;
        }
        out
    }

    /// `B_i = ker(res mod p^i)`; level `k` gives `B`.
    pub fn kernel_elements(&self, level: u32) -> Vec<Element> {
        let m = self.p.pow(level);
        self.elements().into_iter().filter(|g| self.res(g).is_multiple_of(m)).collect()
    }

    /// Generators of `B_i`: `g_j - res(g_j)·ŝ` together with `p^i·ŝ`.
    pub fn kernel_generators(&self, level: u32) -> Vec<Element> {
        let mut gens: Vec<Element> = (0..self.rank())
            .map(|j| {
                let shift = self.scale(&self.lift, self.res_gens[j]);
                self.add(&self.generator(j), &self.neg(&shift))
            })
            .collect();
        gens.push(self.scale(&self.lift, self.p.pow(level)));
        gens.retain(|g| g.iter().any(|&x| x != 0));
        gens.sort();
        gens.dedup();
        gens
    }

    /// `G × Z/m`, with the new component restricting trivially to `Γ`.
    pub fn extend(&self, m: u64) -> GroupData {
        let mut orders = self.orders.clone();
        orders.push(m);
        let mut res_gens = self.res_gens.clone();
        res_gens.push(0);
        let mut lift = self.lift.clone();
        lift.push(0);
        GroupData { p: self.p, k: self.k, orders, res_gens, lift }
    }
}

/// A validated instance, reordered canonically.
#[derive(Clone, Debug)]
pub struct Frame {
    pub name: Option<String>,
    pub p: u64,
    pub k: u32,
    pub t: Vec<u64>,
    pub res_units: Vec<u64>,
    pub lambda: Vec<Element>,
    pub analytic: Option<Analytic>,
    /// Position `a` of the canonical order holds input index `permutation[a]`.
    pub permutation: Vec<usize>,
    pub group: GroupData,
    pub ring: CyclicGroupRing,
    pub n: Vec<u64>,
}

/// Combinatorial data of one intermediate level.
#[derive(Clone, Debug)]
pub struct LevelData {
    pub level: u32,
    /// `M_i` as zero-based indices, ascending.
    pub members: Vec<usize>,
    /// Indices strictly between the first and the largest member.
    pub middle: Vec<usize>,
    /// Largest level decomposition index over `M_i`.
    pub n_level: u64,
    /// `y_i`, absent for singleton levels.
    pub y: Option<GroupRingElement>,
    pub z: GroupRingElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpProfile {
    pub mu: Vec<u64>,
    pub jumps: Vec<u32>,
    pub r: u32,
    pub i_star: u32,
    pub l_index: u64,
}

fn small(v: &BigInt, field: &str, errs: &mut Vec<String>) -> Option<u64> {
    match v.to_u64() {
        Some(x) => Some(x),
        None => {
            errs.push(format!("{field} = {v} is out of range"));
            None
        }
    }
}

fn log_p(p: u64, x: u64) -> Option<u32> {
    let mut e = 0;
    let mut y = 1u64;
    while y < x {
        y = y.checked_mul(p)?;
        e += 1;
    }
    (y == x).then_some(e)
}

/// `gcd(a, b, m)` for residues in `Z/m`: the index of `⟨a, b⟩` in `Z/m`.
fn subgroup_index(a: u64, b: u64, m: u64) -> u64 {
    a.gcd(&b).gcd(&m)
}

/// Check the structural hypotheses and build the canonical frame.
pub fn validate(inst: &RamificationInstance) -> Result<Frame> {
    let mut errs = Vec::new();
    let p = small(&inst.p, "p", &mut errs);
    let k = small(&inst.k, "k", &mut errs).and_then(|k| k.to_u32());
    let (Some(p), Some(k)) = (p, k) else {
        return Err(Error::Validation(errs));
    };
    if p == 2 || !is_prime(p) {
        errs.push(format!("p = {p} is not an odd prime"));
    }
    if k == 0 {
        errs.push("k must be at least 1".into());
    }
    let ring = match CyclicGroupRing::new(p, k) {
        Ok(r) => r,
        Err(e) => {
            errs.push(e.to_string());
            return Err(Error::Validation(errs));
        }
    };
    let pk = ring.order();
    let s = inst.t.len();
    if s < 2 {
        errs.push(format!("at least two ramified primes are required, got {s}"));
    }
    if inst.res_units.len() != s {
        errs.push(format!("res_units has {} entries, expected {s}", inst.res_units.len()));
    }
    if inst.lambda.len() != s || inst.lambda.iter().any(|r| r.len() != s) {
        errs.push(format!("lambda must be an {s}x{s} array of exponent vectors"));
    }
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }
    let mut t = Vec::with_capacity(s);
    for (j, tj) in inst.t.iter().enumerate() {
        let Some(x) = small(tj, &format!("t[{}]", j + 1), &mut errs) else { continue };
        if log_p(p, x).is_none_or(|e| e == 0) || x > pk {
            errs.push(format!("t[{}] = {x} is not a power of p between p and p^k", j + 1));
        }
        t.push(x);
    }
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }
    if !t.contains(&pk) {
        errs.push(format!("no t_j = p^k = {pk}: some ramified prime must be totally ramified in L"));
    }
    let mut units = Vec::with_capacity(s);
    for (j, u) in inst.res_units.iter().enumerate() {
        let r = u.mod_floor(&BigInt::from(pk)).to_u64().unwrap_or(0);
        if r % p == 0 {
            errs.push(format!("res_units[{}] = {u} is divisible by p", j + 1));
        }
        units.push(r);
    }
    let mut lambda = Vec::with_capacity(s);
    for (j, row) in inst.lambda.iter().enumerate() {
        let v: Vec<u64> = row
            .iter()
            .zip(&t)
            .map(|(a, &tl)| a.mod_floor(&BigInt::from(tl)).to_u64().unwrap_or(0))
            .collect();
        if v[j] != 0 {
            errs.push(format!(
                "lambda[{}] has nontrivial component {} in its own inertia group (must be 0 mod {})",
                j + 1,
                row[j],
                t[j]
            ));
        }
        lambda.push(v);
    }
    if let Some(a) = &inst.analytic {
        analytic_checks(a, p, &t, &mut errs);
    }
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }

    let res_gens: Vec<u64> = (0..s).map(|j| units[j] * (pk / t[j]) % pk).collect();
    let res_of = |g: &[u64]| g.iter().zip(&res_gens).fold(0, |acc, (a, r)| (acc + a * r) % pk);
    let n_orig: Vec<u64> = (0..s).map(|j| subgroup_index(res_of(&lambda[j]), pk / t[j], pk)).collect();
    for j in 0..s {
        if (pk / t[j]) % n_orig[j] != 0 {
            errs.push(format!("t_{} * n_{} does not divide p^k", j + 1, j + 1));
        }
    }
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }

    let mut perm: Vec<usize> = (0..s).collect();
    perm.sort_by(|&a, &b| n_orig[a].cmp(&n_orig[b]).then(t[b].cmp(&t[a])));
    let t_sorted: Vec<u64> = perm.iter().map(|&j| t[j]).collect();
    let units_sorted: Vec<u64> = perm.iter().map(|&j| units[j]).collect();
    let res_sorted: Vec<u64> = perm.iter().map(|&j| res_gens[j]).collect();
    let lambda_sorted: Vec<Element> =
        perm.iter().map(|&j| perm.iter().map(|&l| lambda[j][l]).collect()).collect();
    let n_sorted: Vec<u64> = perm.iter().map(|&j| n_orig[j]).collect();
    let analytic = inst.analytic.clone().map(|mut a| {
        if let Some(q) = &a.q {
            a.q = Some(perm.iter().map(|&j| q[j].clone()).collect());
        }
        a
    });

    let mut group = GroupData { p, k, orders: t_sorted.clone(), res_gens: res_sorted, lift: vec![0; s] };
    match (0..s).find(|&j| t_sorted[j] == pk && units_sorted[j] == 1) {
        Some(j0) => group.lift = group.generator(j0),
        None => match group.elements().into_iter().find(|g| group.res(g) == 1 % pk) {
            Some(g) => group.lift = g,
            None => return Err(Error::Validation(vec!["restriction to the cyclic quotient is not surjective".into()])),
        },
    }

    Ok(Frame {
        name: inst.name.clone(),
        p,
        k,
        t: t_sorted,
        res_units: units_sorted,
        lambda: lambda_sorted,
        analytic,
        permutation: perm,
        group,
        ring,
        n: n_sorted,
    })
}

fn analytic_checks(a: &Analytic, p: u64, t: &[u64], errs: &mut Vec<String>) {
    let bp = BigInt::from(p);
    let positive = [("h", &a.h), ("w_K", &a.w_k), ("f_I", &a.f_i), ("h_L", &a.h_l), ("h_FI", &a.h_fi)];
    for (name, v) in positive {
        if let Some(v) = v {
            if v <= &BigInt::zero() {
                errs.push(format!("analytic {name} = {v} must be positive"));
            }
        }
    }
    if let Some(h) = &a.h {
        if h.is_multiple_of(&bp) {
            errs.push(format!("p divides h = {h}"));
        }
    }
    if let Some(w) = &a.w_k {
        if w.is_multiple_of(&bp) {
            errs.push(format!("p divides w_K = {w}"));
        }
    }
    if p > 3 {
        if let (Some(w), Some(f)) = (&a.w_k, &a.f_i) {
            let x = BigInt::from(12) * w * f;
            if x.is_multiple_of(&bp) {
                errs.push(format!("p divides 12 * w_K * f_I = {x}"));
            }
        }
    }
    if let Some(q) = &a.q {
        if q.len() != t.len() {
            errs.push(format!("analytic q has {} entries, expected {}", q.len(), t.len()));
        } else {
            for (j, (qj, &tj)) in q.iter().zip(t).enumerate() {
                if !(qj - BigInt::one()).is_multiple_of(&BigInt::from(tj)) {
                    errs.push(format!("norm q[{}] = {qj} is not 1 mod t_{} = {tj}", j + 1, j + 1));
                }
            }
        }
    }
}

impl Frame {
    pub fn s(&self) -> usize {
        self.t.len()
    }

    pub fn pk(&self) -> u64 {
        self.ring.order()
    }

    /// `[F_I : K] = ∏ t_j`.
    pub fn fi_degree(&self) -> u64 {
        self.t.iter().product()
    }

    /// `[F_I : L] = |B|`.
    pub fn fi_over_l(&self) -> u64 {
        self.fi_degree() / self.pk()
    }

    /// `n_j` (zero-based `j`), recomputed from the frame data.
    pub fn decomposition_index(&self, j: usize) -> u64 {
        let pk = self.pk();
        subgroup_index(self.group.res(&self.lambda[j]), pk / self.t[j], pk)
    }

    /// Decomposition index of the `j`-th prime in the level-`i` subextension.
    pub fn level_decomposition_index(&self, j: usize, level: u32) -> u64 {
        let m = self.p.pow(level);
        subgroup_index(self.group.res(&self.lambda[j]) % m, (self.pk() / self.t[j]) % m, m)
    }

    /// `M_i = {j : t_j > p^{k-i}}` for `i = 1..k`, zero-based indices.
    pub fn ramified_sets(&self) -> Vec<Vec<usize>> {
        (1..=self.k).map(|i| self.ramified_set(i)).collect()
    }

    pub fn ramified_set(&self, level: u32) -> Vec<usize> {
        let bound = self.p.pow(self.k - level);
        (0..self.s()).filter(|&j| self.t[j] > bound).collect()
    }

    pub fn jump_profile(&self) -> JumpProfile {
        let k = self.k;
        let mu: Vec<u64> = (1..=k).map(|i| self.n[*self.ramified_set(i).last().expect("nonempty")]).collect();
        let mut jumps = vec![0];
        for i in 1..k {
            if mu[(i - 1) as usize] < mu[i as usize] {
                jumps.push(i);
            }
        }
        jumps.push(k);
        jumps.dedup();
        let r = *jumps.iter().filter(|&&j| j < k).max().expect("0 is a jump");
        let i_star = (0..=k).filter(|&i| i == 0 || self.ramified_set(i).len() <= 1).max().unwrap_or(0);
        JumpProfile { mu, jumps, r, i_star, l_index: self.p.pow(k - i_star) }
    }

    /// `k - log_p max{t_j : n_j = n_s}`.
    pub fn r_characterization(&self) -> Result<u32> {
        let ns = *self.n.last().expect("s >= 2");
        let tmax = (0..self.s()).filter(|&j| self.n[j] == ns).map(|j| self.t[j]).max().expect("nonempty");
        let e = log_p(self.p, tmax).expect("t_j is a p-power");
        let r = self.k - e;
        let jp = self.jump_profile();
        if jp.r != r {
            return discrepancy(format!("jump profile gives r = {} but the inertia characterization gives {r}", jp.r));
        }
        Ok(r)
    }

    /// Smallest `c >= 1` with `-c n_j ≡ res(λ_j) mod p^i`, `t_j = p^{k-i}`.
    pub fn compute_c(&self, j: usize) -> Result<u64> {
        let i = self.k - log_p(self.p, self.t[j]).expect("p-power");
        if i == 0 {
            return Ok(1);
        }
        let m = self.p.pow(i);
        let target = self.group.res(&self.lambda[j]) % m;
        let nj = self.n[j] % m;
        for c in 1..=m {
            if (m - (c * nj) % m) % m == target {
                if c % self.p == 0 {
                    return discrepancy(format!("c_{} = {c} is divisible by p", j + 1));
                }
                return Ok(c);
            }
        }
        discrepancy(format!("no c_{} solves -c n_j = res(lambda_j) mod {m}", j + 1))
    }

    pub fn all_c(&self) -> Result<Vec<u64>> {
        (0..self.s()).map(|j| self.compute_c(j)).collect()
    }

    pub fn level_data(&self, level: u32) -> Result<LevelData> {
        let members = self.ramified_set(level);
        let top = *members.last().expect("1 is always a member");
        let middle: Vec<usize> = members.iter().copied().filter(|&j| j != 0 && j != top).collect();
        let n_level = members.iter().map(|&j| self.level_decomposition_index(j, level)).max().unwrap_or(1);
        let c = self.all_c()?;
        let z = self.ring.one_minus_sigma_pow((c[top] * self.n[top]) as i64);
        let y = if members.len() == 1 {
            None
        } else {
            let factors: Vec<GroupRingElement> =
                middle.iter().map(|&j| self.ring.one_minus_sigma_pow((c[j] * self.n[j]) as i64)).collect();
            Some(GroupRingElement::product(self.ring, &factors)?)
        };
        Ok(LevelData { level, members, middle, n_level, y, z })
    }

    /// `ν = Σ_i Σ_{j ∈ M_i, 1 < j < max M_i} n_j`.
    pub fn nu(&self) -> u64 {
        (1..=self.k)
            .map(|i| {
                let m = self.ramified_set(i);
                let top = *m.last().expect("nonempty");
                m.iter().filter(|&&j| j != 0 && j != top).map(|&j| self.n[j]).sum::<u64>()
            })
            .sum()
    }

    /// `φ_L = ∏ t_j^{n_j} / ∏_i p^{μ_i}`.
    pub fn phi_l(&self) -> Result<BigInt> {
        let num = (0..self.s()).fold(BigInt::one(), |acc, j| acc * BigInt::from(self.t[j]).pow(self.n[j] as u32));
        let den = self.jump_profile().mu.iter().fold(BigInt::one(), |acc, &m| acc * BigInt::from(self.p).pow(m as u32));
        let (q, r) = num.div_rem(&den);
        if !r.is_zero() {
            return discrepancy(format!("phi_L is not integral: {num}/{den}"));
        }
        Ok(q)
    }

    /// Map a zero-based canonical index back to the one-based input index.
    pub fn input_index(&self, j: usize) -> usize {
        self.permutation[j] + 1
    }
}

/// The two worked instances shipped with the crate.
pub mod fixtures {
    use super::RamificationInstance;

    pub const INSTANCE_A: &str = include_str!("../../../../instances/instance_a.json");
    pub const INSTANCE_B: &str = include_str!("../../../../instances/instance_b.json");
    pub const INVALID: &str = include_str!("../../../../instances/invalid_no_full_inertia.json");
    pub const DEGENERATE: &str = include_str!("../../../../instances/degenerate_lambda.json");

    pub fn instance_a() -> RamificationInstance {
        RamificationInstance::from_json(INSTANCE_A).expect("shipped instance parses")
    }

    pub fn instance_b() -> RamificationInstance {
        RamificationInstance::from_json(INSTANCE_B).expect("shipped instance parses")
    }
}
