//! Word-size prime field helpers backing the modular gcd.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_traits::Zero;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic list of large primes just below 2^62.
pub fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(512);
        let mut n = (1u64 << 62) - 1;
        while out.len() < 512 {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

pub fn reduce(a: &BigInt, p: u64) -> u64 {
    let (sign, digits) = a.to_u64_digits();
    let mut r: u128 = 0;
    for d in digits.iter().rev() {
        r = ((r << 64) | *d as u128) % p as u128;
    }
    let r = r as u64;
    if sign == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

pub fn reduce_poly(a: &[BigInt], p: u64) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().map(|c| reduce(c, p)).collect();
    trim(&mut v);
    v
}

pub fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` by `b` in F_p[x]; `b` must be nonzero.
fn rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while a.len() > db {
        let da = a.len() - 1;
        let c = mul_mod(a[da], inv, p);
        if c != 0 {
            let shift = da - db;
            for (i, bi) in b.iter().enumerate() {
                a[shift + i] = sub_mod(a[shift + i], mul_mod(c, *bi, p), p);
            }
        }
        a.pop();
        trim(&mut a);
    }
    a
}

/// Monic gcd in F_p[x]; empty vector for gcd(0, 0).
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&lc) = x.last() {
        let inv = inv_mod(lc, p);
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    x
}

/// True when `b` divides `a` in F_p[x].
pub fn divides(b: &[u64], a: &[u64], p: u64) -> bool {
    if b.is_empty() {
        return a.is_empty();
    }
    rem(a.to_vec(), b, p).is_empty()
}

pub fn is_zero_poly(v: &[BigInt]) -> bool {
    v.iter().all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_prime_and_large() {
        let ps = primes();
        assert_eq!(ps.len(), 512);
        assert!(ps.iter().all(|&p| p > (1 << 61) && is_prime(p)));
        assert!(!is_prime(1u64 << 62));
    }

    #[test]
    fn gcd_mod_small() {
        let p = 1_000_000_007u64;
        // (x-1)(x+2) and (x-1)(x+5)
        let a = vec![p - 2, 1, 1];
        let b = vec![p - 5, 4, 1];
        assert_eq!(gcd(&a, &b, p), vec![p - 1, 1]);
    }

    #[test]
    fn reduce_negative() {
        assert_eq!(reduce(&BigInt::from(-3), 7), 4);
        assert_eq!(reduce(&BigInt::from(-14), 7), 0);
    }
}
