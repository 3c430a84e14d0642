//! Small helpers for arithmetic in F_p with word-sized primes.

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) && p < (1 << 31) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[inline]
pub fn reduce(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub fn pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue, by Fermat.
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero mod {p}");
    pow(a, p - 2, p)
}

/// Falling factorial x(x-1)...(x-k+1) reduced mod p.
pub fn falling(x: u64, k: u64, p: u64) -> u64 {
    if k > x {
        return 0;
    }
    if k >= p {
        // k consecutive integers contain a multiple of p
        return 0;
    }
    (0..k).fold(1 % p, |acc, j| acc * ((x - j) % p) % p)
}

/// Table of 0!, ..., (p-1)! and their inverses mod p.
#[derive(Clone, Debug)]
pub struct FactorialTable {
    p: u64,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl FactorialTable {
    pub fn new(p: u64) -> Self {
        let mut fact = Vec::with_capacity(p as usize);
        let mut acc = 1 % p;
        for k in 0..p {
            if k > 0 {
                acc = acc * k % p;
            }
            fact.push(acc);
        }
        let inv_fact = fact.iter().map(|&f| inv(f, p)).collect();
        FactorialTable { p, fact, inv_fact }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// k! mod p for k <= p-1.
    pub fn fact(&self, k: u64) -> u64 {
        self.fact[k as usize]
    }

    /// 1/k! mod p for k <= p-1.
    pub fn inv_fact(&self, k: u64) -> u64 {
        self.inv_fact[k as usize]
    }

    /// 1/(u_1! ... u_N!) for a vector with all entries <= p-1.
    pub fn inv_fact_product(&self, u: &[u64]) -> u64 {
        u.iter()
            .fold(1 % self.p, |acc, &x| acc * self.inv_fact(x) % self.p)
    }
}

/// Binomial coefficient C(n, k) reduced mod p, computed exactly.
pub fn binomial(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    (acc % p as u128) as u64
}
