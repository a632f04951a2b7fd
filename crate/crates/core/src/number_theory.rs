//! Primality, factorization, valuations and quadratic residues.
//!
//! Factorizations are honest about what they could not finish: whatever
//! Pollard rho fails to split within its budget is reported as a composite
//! `residual` and the factorization is flagged incomplete.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial division runs over every prime below this bound.
pub const TRIAL_DIVISION_BOUND: u32 = 1_000_000;

/// Miller-Rabin with the first thirteen prime bases is deterministic below
/// this value (3.3 * 10^24).
const DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";
const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const RANDOM_WITNESSES: usize = 64;
const DEFAULT_SEED: u64 = 0x6473_6773_7065_6374;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_DIVISION_BOUND as usize;
        let mut composite = vec![false; limit];
        let mut out = Vec::new();
        for i in 2..limit {
            if composite[i] {
                continue;
            }
            out.push(i as u32);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
        out
    })
}

fn deterministic_limit() -> &'static BigUint {
    static LIMIT: OnceLock<BigUint> = OnceLock::new();
    LIMIT.get_or_init(|| DETERMINISTIC_LIMIT.parse().expect("valid constant"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primality {
    Composite,
    /// Proven prime (deterministic witness set).
    Prime,
    /// Passed random strong-probable-prime rounds; above the deterministic range.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        self != Primality::Composite
    }
}

/// Primality with the default witness seed.
pub fn is_prime(x: &BigUint) -> bool {
    primality(x, DEFAULT_SEED).is_prime()
}

pub fn primality(x: &BigUint, seed: u64) -> Primality {
    if let Some(small) = x.to_u64() {
        if small < 2 {
            return Primality::Composite;
        }
        if small < 64 {
            return if small_primes().binary_search(&(small as u32)).is_ok() {
                Primality::Prime
            } else {
                Primality::Composite
            };
        }
    }
    for &p in &DETERMINISTIC_BASES {
        if (x % p).is_zero() {
            return Primality::Composite;
        }
    }
    if let Some(small) = x.to_u64() {
        return if DETERMINISTIC_BASES.iter().all(|&a| strong_probable_prime_u64(small, a as u64)) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    let bases_ok = DETERMINISTIC_BASES
        .iter()
        .all(|&a| strong_probable_prime(x, &BigUint::from(a)));
    if !bases_ok {
        return Primality::Composite;
    }
    if x < deterministic_limit() {
        return Primality::Prime;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    let upper = x - 2u32;
    for _ in 0..RANDOM_WITNESSES {
        let a = rng.gen_biguint_range(&two, &upper);
        if !strong_probable_prime(x, &a) {
            return Primality::Composite;
        }
    }
    Primality::ProbablePrime
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 1");
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Prime factorization `sign * prod(p^e) * residual`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    /// Distinct primes in ascending order with their exponents.
    pub factors: Vec<(BigUint, u32)>,
    /// Unsplit composite cofactor, or 1.
    pub residual: BigUint,
    pub complete: bool,
    /// Some listed prime is only a strong probable prime.
    pub probabilistic: bool,
}

impl Factorization {
    pub fn exponent_of(&self, p: &BigUint) -> Option<u32> {
        self.factors.iter().find(|(q, _)| q == p).map(|&(_, e)| e)
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> BigInt {
        let mag: BigUint = self
            .factors
            .iter()
            .fold(self.residual.clone(), |acc, (p, e)| acc * p.pow(*e));
        let sign = if self.sign < 0 { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, mag)
    }

    /// True when every exponent is 1 and nothing is left unfactored.
    pub fn is_square_free(&self) -> Option<bool> {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            return Some(false);
        }
        self.complete.then_some(true)
    }
}

impl std::fmt::Display for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        if !self.residual.is_one() {
            parts.push(format!("[{}]", self.residual));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}{}", if self.sign < 0 { "-" } else { "" }, parts.join(" * "))
    }
}

/// Factors `x` by trial division below [`TRIAL_DIVISION_BOUND`], then Pollard
/// rho (Brent's variant) with at most `effort_bound` iterations per composite
/// cofactor.
pub fn factor(x: &BigInt, effort_bound: u64) -> Result<Factorization> {
    factor_with_seed(x, effort_bound, DEFAULT_SEED)
}

pub fn factor_with_seed(x: &BigInt, effort_bound: u64, seed: u64) -> Result<Factorization> {
    if x.is_zero() {
        return Err(Error::Argument("cannot factor zero".into()));
    }
    let sign = if x.sign() == Sign::Minus { -1 } else { 1 };
    let mut m = x.magnitude().clone();
    let mut found: Vec<(BigUint, u32)> = Vec::new();

    trial_divide(&mut m, &mut found);

    let mut residual = BigUint::one();
    let mut probabilistic = false;
    let mut stack = vec![m];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        match primality(&c, seed) {
            Primality::Prime => {
                push_factor(&mut found, c, 1);
                continue;
            }
            Primality::ProbablePrime => {
                probabilistic = true;
                push_factor(&mut found, c, 1);
                continue;
            }
            Primality::Composite => {}
        }
        if let Some((root, k)) = perfect_power(&c) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        match pollard_brent(&c, effort_bound, &mut rng) {
            Some(d) => {
                let other = &c / &d;
                stack.push(d);
                stack.push(other);
            }
            None => residual *= c,
        }
    }
    found.sort();
    Ok(Factorization {
        sign,
        complete: residual.is_one(),
        factors: found,
        residual,
        probabilistic,
    })
}

fn push_factor(found: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    match found.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += e,
        None => found.push((p, e)),
    }
}

fn trial_divide(m: &mut BigUint, found: &mut Vec<(BigUint, u32)>) {
    for &p in small_primes() {
        if let Some(small) = m.to_u64() {
            trial_divide_u64(small, p, found, m);
            return;
        }
        let p_big = BigUint::from(p);
        let mut e = 0;
        while (&*m % p).is_zero() {
            *m /= &p_big;
            e += 1;
        }
        if e > 0 {
            found.push((p_big, e));
        }
    }
}

/// Finishes trial division natively once the cofactor fits in a `u64`.
fn trial_divide_u64(mut small: u64, start: u32, found: &mut Vec<(BigUint, u32)>, m: &mut BigUint) {
    let primes = small_primes();
    let from = primes.partition_point(|&q| q < start);
    for &p in &primes[from..] {
        let p = p as u64;
        if p * p > small {
            break;
        }
        let mut e = 0;
        while small.is_multiple_of(p) {
            small /= p;
            e += 1;
        }
        if e > 0 {
            found.push((BigUint::from(p), e));
        }
    }
    // A cofactor below the square of the bound with no small factor is prime
    // (or 1); it is left for the caller's primality check.
    *m = BigUint::from(small);
}

/// Largest `k >= 2` with `c = r^k`, if any.
fn perfect_power(c: &BigUint) -> Option<(BigUint, u32)> {
    let bits = c.bits() as u32;
    for k in (2..=bits.max(2)).rev() {
        let r = c.nth_root(k);
        if r > BigUint::one() && r.pow(k) == *c {
            return Some((r, k));
        }
    }
    None
}

/// Pollard rho with Brent's cycle detection and batched gcds.
fn pollard_brent(n: &BigUint, budget: u64, rng: &mut ChaCha8Rng) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    const BATCH: u64 = 128;
    let one = BigUint::one();
    let mut spent = 0u64;
    while spent < budget {
        let c = rng.gen_biguint_range(&one, n);
        let mut y = rng.gen_biguint_range(&one, n);
        let step = |v: &BigUint| (v * v + &c) % n;
        let mut g = one.clone();
        let mut r = 1u64;
        let mut q = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() && spent < budget {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let lim = BATCH.min(r - k);
                for _ in 0..lim {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                spent += lim;
                g = q.gcd(n);
                k += lim;
            }
            r *= 2;
        }
        if g == *n {
            // Batch overshot; replay one step at a time.
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Largest `k` with `p^k | x`.
pub fn p_adic_valuation(x: &BigInt, p: &BigUint) -> Result<u32> {
    if x.is_zero() {
        return Err(Error::Argument("valuation of zero is undefined".into()));
    }
    if !is_prime(p) {
        return Err(Error::Argument(format!("{p} is not prime")));
    }
    let mut m = x.magnitude().clone();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Ok(k);
        }
        m = q;
        k += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QrClass {
    Zero,
    Residue,
    Nonresidue,
}

/// Euler-criterion classification of `a` modulo an odd prime `p`.
pub fn qr_class(a: &BigInt, p: u64) -> Result<QrClass> {
    if p == 2 || !is_prime(&BigUint::from(p)) {
        return Err(Error::Argument(format!("{p} is not an odd prime")));
    }
    let r = a
        .mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits");
    Ok(qr_class_u64(r, p))
}

pub(crate) fn qr_class_u64(r: u64, p: u64) -> QrClass {
    if r.is_multiple_of(p) {
        QrClass::Zero
    } else if pow_mod(r, (p - 1) / 2, p) == 1 {
        QrClass::Residue
    } else {
        QrClass::Nonresidue
    }
}
