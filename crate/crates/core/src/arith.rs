//! Small integer helpers shared by the cyclotomic and group code.

use num_integer::Integer;

/// Prime factorisation as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn distinct_primes(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut hi: Vec<u64> = out.iter().rev().map(|d| n / d).filter(|&e| e * e != n).collect();
    out.append(&mut hi);
    out
}

/// Inverse of `a` modulo `m`; `m == 1` yields 0.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let g = a.extended_gcd(&m);
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m))
}

/// Writes `n = s^2 * f` with `f` square-free; returns `(s, f)`.
pub fn split_square(n: u64) -> (u64, u64) {
    let mut s = 1;
    let mut f = 1;
    for (p, k) in factorize(n) {
        s *= p.pow(k / 2);
        if k % 2 == 1 {
            f *= p;
        }
    }
    (s, f)
}

pub fn squarefree_part(n: u64) -> u64 {
    split_square(n).1
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, k)| k == 1)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

pub fn is_perfect_square(n: u64) -> bool {
    split_square(n).1 == 1
}
