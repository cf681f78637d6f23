//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! An element is stored at its minimal conductor `n` as coefficients in the
//! power basis `1, ζ_n, …, ζ_n^{φ(n)-1}`, i.e. reduced modulo the `n`-th
//! cyclotomic polynomial. Because both the conductor and the reduced
//! coefficients are unique, equality and hashing are structural.
//!
//! Conductors never end up `≡ 2 (mod 4)`: `Q(ζ_{2m}) = Q(ζ_m)` for odd `m`
//! and the normaliser always descends.
//!
//! The coefficient type is generic; [`crate::Cyclo`] (arbitrary precision
//! rationals) is the one the rest of the crate uses.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;

/// Default cap on conductors: `lcm(16, 2·60)`.
pub const DEFAULT_CONDUCTOR_LIMIT: usize = 1920;

static CONDUCTOR_LIMIT: AtomicUsize = AtomicUsize::new(DEFAULT_CONDUCTOR_LIMIT);

/// Current conductor cap. Operations that would need a larger field fail.
pub fn conductor_limit() -> usize {
    CONDUCTOR_LIMIT.load(Ordering::Relaxed)
}

/// Changes the conductor cap process-wide.
pub fn set_conductor_limit(limit: usize) {
    CONDUCTOR_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("conductor {requested} exceeds the configured limit {limit}")]
    ConductorLimit { requested: usize, limit: usize },
    #[error("Jacobi symbol needs an odd positive modulus, got {0}")]
    BadJacobiModulus(i64),
    #[error("{0} must be odd")]
    EvenArgument(u64),
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("division by zero")]
    DivisionByZero,
}

/// Coefficient field for [`Cyclotomic`]. Exact types (rationals) give exact
/// arithmetic; everything here only relies on the ring and field operations.
pub trait Coefficient:
    Clone + fmt::Debug + PartialEq + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
}

impl<T> Coefficient for T where
    T: Clone + fmt::Debug + PartialEq + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
}

struct FieldData {
    phi: usize,
    primes: Vec<usize>,
    /// Nonzero coefficients of `Φ_n` strictly below the leading term.
    low: Vec<(usize, i64)>,
    /// All coefficients of `Φ_n`, constant term first.
    dense: Vec<i64>,
}

fn field(n: usize) -> Arc<FieldData> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<FieldData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(fd) = cache.lock().unwrap().get(&n) {
        return fd.clone();
    }
    let dense = cyclotomic_polynomial(n as u64);
    let phi = dense.len() - 1;
    let low = dense[..phi]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c))
        .collect();
    let fd = Arc::new(FieldData {
        phi,
        primes: arith::distinct_primes(n as u64).into_iter().map(|p| p as usize).collect(),
        low,
        dense,
    });
    cache.lock().unwrap().insert(n, fd.clone());
    fd
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n >= 1);
    let rad: u64 = arith::distinct_primes(n).iter().product();
    let stretch = (n / rad) as usize;
    // Φ_rad = Π_{d | rad} (x^d - 1)^{μ(rad/d)}
    let mut poly: Vec<i128> = vec![1];
    let divs = arith::divisors(rad);
    for &d in &divs {
        if arith::mobius(rad / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i128; poly.len() + d];
            for (i, &c) in poly.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divs {
        if arith::mobius(rad / d) == -1 {
            let d = d as usize;
            let deg = poly.len() - 1;
            let mut q = vec![0i128; deg + 1 - d];
            for k in (d..=deg).rev() {
                let carry = if k <= deg - d { q[k] } else { 0 };
                q[k - d] = poly[k] + carry;
            }
            poly = q;
        }
    }
    let mut out = vec![0i64; (poly.len() - 1) * stretch + 1];
    for (i, c) in poly.into_iter().enumerate() {
        out[i * stretch] = c as i64;
    }
    out
}

fn checked_lcm(a: usize, b: usize) -> Result<usize, CycloError> {
    let l = a.lcm(&b);
    let limit = conductor_limit();
    if l > limit {
        Err(CycloError::ConductorLimit { requested: l, limit })
    } else {
        Ok(l)
    }
}

fn scale_by<T: Coefficient>(c: &T, k: i64) -> T {
    match k {
        1 => c.clone(),
        -1 => -c.clone(),
        _ => c.clone() * T::from_i64(k).expect("small integer"),
    }
}

/// Reduces an element of the group ring `Q[Z/n]` (length `n`) to the power
/// basis of `Q(ζ_n)` (length `φ(n)`).
fn reduce_group_ring<T: Coefficient>(mut buf: Vec<T>, n: usize) -> Vec<T> {
    debug_assert_eq!(buf.len(), n);
    let fd = field(n);
    let phi = fd.phi;
    for k in (phi..n).rev() {
        if buf[k].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut buf[k], T::zero());
        let base = k - phi;
        for &(j, pj) in &fd.low {
            let slot = &mut buf[base + j];
            *slot = slot.clone() - scale_by(&c, pj);
        }
    }
    buf.truncate(phi);
    buf
}

/// Tries to rewrite a reduced element of `Q(ζ_n)` in `Q(ζ_{n/p})`.
fn descend<T: Coefficient>(n: usize, coeffs: &[T], p: usize) -> Option<Vec<T>> {
    let m = n / p;
    if m.is_multiple_of(p) {
        // Φ_n(x) = Φ_m(x^p): the subfield is spanned by exponents divisible by p.
        if coeffs.iter().enumerate().any(|(k, c)| k % p != 0 && !c.is_zero()) {
            return None;
        }
        return Some(coeffs.iter().step_by(p).cloned().collect());
    }
    // ζ_n = ζ_m^α ζ_p^β with αp + βm ≡ 1 (mod n); split by powers of ζ_p.
    let alpha = arith::mod_inverse(p as i64, m as i64)? as usize;
    let beta = arith::mod_inverse(m as i64, p as i64)? as usize;
    let mut buckets: Vec<Vec<T>> = vec![vec![T::zero(); m]; p];
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let slot = &mut buckets[(beta * k) % p][(alpha * k) % m];
        *slot = slot.clone() + c.clone();
    }
    let reduced: Vec<Vec<T>> = buckets.into_iter().map(|b| reduce_group_ring(b, m)).collect();
    let diff = |j: usize| -> Vec<T> {
        reduced[j]
            .iter()
            .zip(&reduced[0])
            .map(|(a, b)| a.clone() - b.clone())
            .collect()
    };
    let first = diff(1);
    for j in 2..p {
        if diff(j) != first {
            return None;
        }
    }
    Some(first.into_iter().map(|c| -c).collect())
}

/// An exact element of a cyclotomic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic<T> {
    conductor: usize,
    coeffs: Vec<T>,
}

impl<T: Coefficient> Cyclotomic<T> {
    fn normalize(mut n: usize, mut coeffs: Vec<T>) -> Self {
        'outer: loop {
            if n == 1 || coeffs.iter().skip(1).all(Zero::is_zero) {
                coeffs.truncate(1);
                if coeffs.is_empty() {
                    coeffs.push(T::zero());
                }
                return Cyclotomic { conductor: 1, coeffs };
            }
            let fd = field(n);
            for &p in &fd.primes {
                if let Some(c) = descend(n, &coeffs, p) {
                    n /= p;
                    coeffs = c;
                    continue 'outer;
                }
            }
            return Cyclotomic { conductor: n, coeffs };
        }
    }

    fn from_group_ring(n: usize, buf: Vec<T>) -> Self {
        Self::normalize(n, reduce_group_ring(buf, n))
    }

    /// Adds `self` into a group-ring buffer of length `big` (a multiple of the conductor).
    fn lift_into(&self, buf: &mut [T], big: usize) {
        let step = big / self.conductor;
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let slot = &mut buf[(k * step) % big];
                *slot = slot.clone() + c.clone();
            }
        }
    }

    pub fn zero() -> Self {
        Self::from_scalar(T::zero())
    }

    pub fn one() -> Self {
        Self::from_scalar(T::one())
    }

    pub fn from_scalar(c: T) -> Self {
        Cyclotomic { conductor: 1, coeffs: vec![c] }
    }

    pub fn from_integer(k: i64) -> Self {
        Self::from_scalar(T::from_i64(k).expect("integer coefficient"))
    }

    /// `Σ c·ζ_n^e` over the given terms; exponents are read modulo `n`.
    pub fn from_terms<I>(conductor: usize, terms: I) -> Result<Self, CycloError>
    where
        I: IntoIterator<Item = (i64, T)>,
    {
        if conductor == 0 {
            return Err(CycloError::ZeroConductor);
        }
        let limit = conductor_limit();
        if conductor > limit {
            return Err(CycloError::ConductorLimit { requested: conductor, limit });
        }
        let mut buf = vec![T::zero(); conductor];
        for (e, c) in terms {
            let slot = &mut buf[e.rem_euclid(conductor as i64) as usize];
            *slot = slot.clone() + c;
        }
        Ok(Self::from_group_ring(conductor, buf))
    }

    /// `e^{2πi·num/den}`.
    pub fn try_root_of_unity(num: i64, den: u64) -> Result<Self, CycloError> {
        assert!(den >= 1, "root_of_unity needs a positive denominator");
        let den = den as i64;
        let e = num.rem_euclid(den);
        let g = e.gcd(&den);
        let (e, n) = ((e / g) as usize, (den / g) as usize);
        let limit = conductor_limit();
        if n > limit {
            return Err(CycloError::ConductorLimit { requested: n, limit });
        }
        let mut buf = vec![T::zero(); n];
        buf[e] = T::one();
        Ok(Self::from_group_ring(n, buf))
    }

    /// `e^{2πi·num/den}`. Panics if the conductor exceeds [`conductor_limit`].
    pub fn root_of_unity(num: i64, den: u64) -> Self {
        Self::try_root_of_unity(num, den).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `ζ_n = e^{2πi/n}`.
    pub fn zeta(n: u64) -> Self {
        Self::root_of_unity(1, n)
    }

    pub fn i() -> Self {
        Self::root_of_unity(1, 4)
    }

    pub fn conductor(&self) -> usize {
        self.conductor
    }

    /// Power-basis coefficients at the minimal conductor.
    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &T)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_one()
    }

    /// The rational value, if the element is rational.
    pub fn as_scalar(&self) -> Option<&T> {
        (self.conductor == 1).then(|| &self.coeffs[0])
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, CycloError> {
        if self.conductor == rhs.conductor {
            let v = self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect();
            return Ok(Self::normalize(self.conductor, v));
        }
        if rhs.conductor == 1 || self.conductor == 1 {
            let (big, small) = if rhs.conductor == 1 { (self, rhs) } else { (rhs, self) };
            let mut out = big.clone();
            out.coeffs[0] = out.coeffs[0].clone() + small.coeffs[0].clone();
            return Ok(out);
        }
        let l = checked_lcm(self.conductor, rhs.conductor)?;
        let mut buf = vec![T::zero(); l];
        self.lift_into(&mut buf, l);
        rhs.lift_into(&mut buf, l);
        Ok(Self::from_group_ring(l, buf))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, CycloError> {
        self.checked_add(&-rhs)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, CycloError> {
        if let Some(c) = rhs.as_scalar() {
            return Ok(self.scale(c));
        }
        if let Some(c) = self.as_scalar() {
            return Ok(rhs.scale(c));
        }
        let l = checked_lcm(self.conductor, rhs.conductor)?;
        let mut buf = vec![T::zero(); l];
        mul_into(&mut buf, l, self, rhs);
        Ok(Self::from_group_ring(l, buf))
    }

    /// Complex conjugation, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// The Galois automorphism `ζ_n ↦ ζ_n^k`; `k` must be a unit modulo the conductor.
    pub fn galois(&self, k: i64) -> Self {
        let n = self.conductor;
        if n == 1 {
            return self.clone();
        }
        let k = k.rem_euclid(n as i64) as usize;
        assert!(k.gcd(&n) == 1, "Galois exponent {k} is not a unit modulo {n}");
        let mut buf = vec![T::zero(); n];
        for (e, c) in self.terms() {
            buf[(e * k) % n] = c.clone();
        }
        Cyclotomic { conductor: n, coeffs: reduce_group_ring(buf, n) }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        if let Some(c) = self.as_scalar() {
            return Ok(Self::from_scalar(T::one() / c.clone()));
        }
        let fd = field(self.conductor);
        let modulus: Vec<T> = fd.dense.iter().map(|&c| T::from_i64(c).unwrap()).collect();
        let inv = poly_inverse(&self.coeffs, &modulus).ok_or(CycloError::DivisionByZero)?;
        let mut coeffs = inv;
        coeffs.resize(fd.phi, T::zero());
        Ok(Self::normalize(self.conductor, coeffs))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, CycloError> {
        self.checked_mul(&rhs.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 {
            self.inv().unwrap_or_else(|err| panic!("{err}"))
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Value under the embedding `ζ_n ↦ e^{2πi/n}`.
    pub fn to_complex<F: Float + FloatConst + FromPrimitive>(&self) -> Complex<F> {
        let n = F::from_usize(self.conductor).unwrap();
        let mut acc = Complex::new(F::zero(), F::zero());
        for (k, c) in self.terms() {
            let theta = F::TAU() * F::from_usize(k).unwrap() / n;
            let c = F::from_f64(c.to_f64().unwrap_or(f64::NAN)).unwrap();
            acc = acc + Complex::new(theta.cos(), theta.sin()) * c;
        }
        acc
    }

    /// Smallest `k ≥ 1` with `self^k = 1`, or `None` if this is not a root of unity.
    pub fn order_of_unity(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let z = self.to_complex::<f64>();
        if (z.norm() - 1.0).abs() > 1e-6 {
            return None;
        }
        // A root of unity in Q(ζ_n) is ±ζ_n^k, so its order divides lcm(2, n).
        let n = self.conductor as u64;
        let bound = if n % 2 == 1 { 2 * n } else { n };
        if !self.pow(bound as i64).is_one() {
            return None;
        }
        arith::divisors(bound)
            .into_iter()
            .find(|&d| self.pow(d as i64).is_one())
    }
}

/// Accumulates `Σ a·b` products into the group ring of a fixed conductor and
/// reduces once at the end. This is how long exact sums stay cheap.
pub struct Accumulator<T> {
    conductor: usize,
    buf: Vec<T>,
}

impl<T: Coefficient> Accumulator<T> {
    /// `conductor` must be a multiple of every operand's conductor.
    pub fn new(conductor: usize) -> Self {
        Accumulator { conductor, buf: vec![T::zero(); conductor] }
    }

    pub fn add(&mut self, x: &Cyclotomic<T>) {
        assert_eq!(self.conductor % x.conductor, 0, "accumulator conductor too small");
        x.lift_into(&mut self.buf, self.conductor);
    }

    pub fn add_product(&mut self, a: &Cyclotomic<T>, b: &Cyclotomic<T>) {
        assert!(
            self.conductor.is_multiple_of(a.conductor) && self.conductor.is_multiple_of(b.conductor),
            "accumulator conductor too small"
        );
        mul_into(&mut self.buf, self.conductor, a, b);
    }

    pub fn finish(self) -> Cyclotomic<T> {
        Cyclotomic::from_group_ring(self.conductor, self.buf)
    }
}

fn mul_into<T: Coefficient>(buf: &mut [T], big: usize, a: &Cyclotomic<T>, b: &Cyclotomic<T>) {
    let sa = big / a.conductor;
    let sb = big / b.conductor;
    for (i, x) in a.terms() {
        let ei = i * sa;
        for (j, y) in b.terms() {
            let slot = &mut buf[(ei + j * sb) % big];
            *slot = slot.clone() + x.clone() * y.clone();
        }
    }
}

fn trim<T: Coefficient>(p: &mut Vec<T>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divmod<T: Coefficient>(num: &[T], den: &[T]) -> (Vec<T>, Vec<T>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    if rem.len() - 1 < dd {
        return (vec![T::zero()], rem);
    }
    let mut quot = vec![T::zero(); rem.len() - dd];
    for k in (dd..rem.len()).rev() {
        if rem[k].is_zero() {
            continue;
        }
        let f = rem[k].clone() / lead.clone();
        for (j, d) in den.iter().enumerate() {
            rem[k - dd + j] = rem[k - dd + j].clone() - f.clone() * d.clone();
        }
        quot[k - dd] = f;
    }
    rem.truncate(dd.max(1));
    trim(&mut rem);
    (quot, rem)
}

fn poly_mul<T: Coefficient>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(&mut out);
    out
}

fn poly_sub<T: Coefficient>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = out[i].clone() - y.clone();
    }
    trim(&mut out);
    out
}

/// Inverse of `a` modulo the irreducible `modulus`, by the extended Euclidean algorithm.
fn poly_inverse<T: Coefficient>(a: &[T], modulus: &[T]) -> Option<Vec<T>> {
    let mut r0 = modulus.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    let mut t0 = vec![T::zero()];
    let mut t1 = vec![T::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divmod(&r0, &r1);
        r0 = std::mem::replace(&mut r1, r);
        let t = poly_sub(&t0, &poly_mul(&q, &t1));
        t0 = std::mem::replace(&mut t1, t);
    }
    if r0.len() != 1 || r0[0].is_zero() {
        return None;
    }
    let c = r0[0].clone();
    Some(t0.into_iter().map(|x| x / c.clone()).collect())
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a, 'b, T: Coefficient> $tr<&'b Cyclotomic<T>> for &'a Cyclotomic<T> {
            type Output = Cyclotomic<T>;
            fn $method(self, rhs: &'b Cyclotomic<T>) -> Cyclotomic<T> {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<T: Coefficient> $tr<Cyclotomic<T>> for Cyclotomic<T> {
            type Output = Cyclotomic<T>;
            fn $method(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
                (&self).$method(&rhs)
            }
        }
        impl<'b, T: Coefficient> $tr<&'b Cyclotomic<T>> for Cyclotomic<T> {
            type Output = Cyclotomic<T>;
            fn $method(self, rhs: &'b Cyclotomic<T>) -> Cyclotomic<T> {
                (&self).$method(rhs)
            }
        }
        impl<'a, T: Coefficient> $tr<Cyclotomic<T>> for &'a Cyclotomic<T> {
            type Output = Cyclotomic<T>;
            fn $method(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl<T: Coefficient> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<T: Coefficient> Neg for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        -&self
    }
}

impl<T: Coefficient> std::iter::Sum for Cyclotomic<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T: Coefficient + fmt::Display> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_scalar() {
            return write!(f, "{c}");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{}^{k}", self.conductor)?,
                (_, false) => write!(f, "{mag}*z{}^{k}", self.conductor)?,
            }
        }
        Ok(())
    }
}

/// Jacobi symbol `(a/n)` for odd `n ≥ 1`.
pub fn jacobi(a: i64, n: i64) -> Result<i8, CycloError> {
    if n < 1 || n % 2 == 0 {
        return Err(CycloError::BadJacobiModulus(n));
    }
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Classical quadratic Gauss sum `Σ_{j=1}^{p-1} (j/p) ζ_p^j` for an odd prime `p`.
pub fn quadratic_gauss_sum<T: Coefficient>(p: u64) -> Cyclotomic<T> {
    let terms = (1..p as i64).map(|j| {
        let s = jacobi(j, p as i64).expect("odd prime");
        (j, T::from_i8(s).unwrap())
    });
    Cyclotomic::from_terms(p as usize, terms).unwrap_or_else(|e| panic!("{e}"))
}

/// The positive square root of `n ≥ 1`, built from Gauss sums.
pub fn sqrt_int<T: Coefficient>(n: u64) -> Cyclotomic<T> {
    assert!(n >= 1, "sqrt_int needs a positive integer");
    let (square, free) = arith::split_square(n);
    let mut acc = Cyclotomic::<T>::from_integer(square as i64);
    for p in arith::distinct_primes(free) {
        let root = if p == 2 {
            // ζ_8 + ζ_8^{-1}
            Cyclotomic::root_of_unity(1, 8) + Cyclotomic::root_of_unity(-1, 8)
        } else {
            let g = quadratic_gauss_sum::<T>(p);
            if p % 4 == 1 {
                g
            } else {
                // g = i√p
                -(Cyclotomic::i() * g)
            }
        };
        acc = acc * root;
    }
    if acc.to_complex::<f64>().re < 0.0 {
        acc = -acc;
    }
    acc
}

/// `G(N) = (−1/N)√N` for `N ≡ 1 (mod 4)` and `i(−1/N)√N` for `N ≡ 3 (mod 4)`.
pub fn gauss_value<T: Coefficient>(n: u64) -> Result<Cyclotomic<T>, CycloError> {
    if n.is_multiple_of(2) {
        return Err(CycloError::EvenArgument(n));
    }
    let sign = jacobi(-1, n as i64)?;
    let root = sqrt_int::<T>(n).scale(&T::from_i8(sign).unwrap());
    Ok(if n % 4 == 1 { root } else { Cyclotomic::i() * root })
}
