//! Validated prime-modulus context and exact modular arithmetic.
//!
//! Every residue is kept canonical in `[0, p)` so that scalar equality is
//! raw integer equality; all the keyed counters elsewhere in the crate
//! depend on that. Moduli are restricted to odd primes below `2^31` so
//! that products fit in 64-bit intermediates.

use thiserror::Error;

/// Canonical residue in `[0, p)`.
pub type Scalar = u64;

/// Largest supported modulus (exclusive): products of two residues must
/// fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("2 is not an odd prime")]
    NotOdd,
    #[error("modulus {0} exceeds the supported range (p < 2^31)")]
    TooLarge(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// A validated odd prime modulus together with its residue class mod 4.
///
/// Construction runs a deterministic Miller-Rabin test, so a value of this
/// type is a proof that `p` is an odd prime in the supported range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeModulus {
    p: u64,
    mod4: u8,
    // floor(2^64 / p), for Barrett reduction of values below 2^63.
    barrett: u64,
}

/// Validates `n` and builds the modulus context.
pub fn make_modulus(n: u64) -> Result<PrimeModulus, FieldError> {
    if n == 2 {
        return Err(FieldError::NotOdd);
    }
    if n >= MAX_MODULUS {
        return Err(FieldError::TooLarge(n));
    }
    if !is_prime_u64(n) {
        return Err(FieldError::NotPrime(n));
    }
    // floor(2^64 / p); p is odd so this equals (2^64 - 1) / p.
    Ok(PrimeModulus {
        p: n,
        mod4: (n % 4) as u8,
        barrett: u64::MAX / n,
    })
}

impl PrimeModulus {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residue of `p` modulo 4; always 1 or 3 for an odd prime.
    pub fn mod4(&self) -> u8 {
        self.mod4
    }

    /// True when `p = 3 (mod 4)`, i.e. the quadratic form `x^2 + y^2` is
    /// anisotropic and `||v|| = 0` forces `v = 0`.
    pub fn is_three_mod_four(&self) -> bool {
        self.mod4 == 3
    }

    /// Reduces any `x < 2^63` to its canonical residue.
    ///
    /// Barrett reduction: one wide multiply plus at most two conditional
    /// subtractions, substantially cheaper than a hardware division in the
    /// pair-enumeration loops.
    #[inline]
    pub fn reduce(&self, x: u64) -> Scalar {
        debug_assert!(x < 1 << 63);
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let mut r = x - q.wrapping_mul(self.p);
        while r >= self.p {
            r -= self.p;
        }
        debug_assert_eq!(r, x % self.p);
        r
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        debug_assert!(a < self.p && b < self.p);
        self.reduce(a * b)
    }

    /// `base^exp mod p` by square-and-multiply.
    pub fn pow(&self, base: Scalar, mut exp: u64) -> Scalar {
        let mut base = base % self.p;
        let mut acc: u64 = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Canonicalizes an arbitrary `u64` (not restricted to `< 2^63`).
    #[inline]
    pub fn canon(&self, x: u64) -> Scalar {
        x % self.p
    }
}

/// Multiplicative inverse of `a` modulo `p`; errors on `a = 0`.
pub fn fp_inv(a: Scalar, m: &PrimeModulus) -> Result<Scalar, FieldError> {
    if a % m.p() == 0 {
        return Err(FieldError::ZeroInverse);
    }
    // p is prime, so a^(p-2) works and avoids signed extended-gcd bookkeeping.
    Ok(m.pow(a, m.p() - 2))
}

/// True iff `a` is a square modulo `p` (zero counts as a square).
pub fn fp_is_square(a: Scalar, m: &PrimeModulus) -> bool {
    let a = a % m.p();
    if a == 0 {
        return true;
    }
    m.pow(a, (m.p() - 1) / 2) == 1
}

/// A square root of `a` modulo `p` when one exists.
///
/// Uses the `(p+1)/4` exponent shortcut for `p = 3 (mod 4)` and
/// Tonelli-Shanks otherwise.
pub fn fp_sqrt(a: Scalar, m: &PrimeModulus) -> Option<Scalar> {
    let p = m.p();
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if !fp_is_square(a, m) {
        return None;
    }
    if m.is_three_mod_four() {
        let r = m.pow(a, (p + 1) / 4);
        debug_assert_eq!(m.mul(r, r), a);
        return Some(r);
    }
    // Tonelli-Shanks. Write p - 1 = q * 2^s with q odd.
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    // Any quadratic non-residue works as the seed; scan deterministically.
    let mut z = 2;
    while fp_is_square(z, m) {
        z += 1;
    }
    let mut c = m.pow(z, q);
    let mut t = m.pow(a, q);
    let mut r = m.pow(a, (q + 1) / 2);
    let mut e = s;
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = m.mul(t2, t2);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(e - i - 1) {
            b = m.mul(b, b);
        }
        r = m.mul(r, b);
        c = m.mul(b, b);
        t = m.mul(t, c);
        e = i;
    }
    debug_assert_eq!(m.mul(r, r), a);
    Some(r)
}

/// Deterministic Miller-Rabin, valid for all `n < 2^64` with this witness set.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n % small == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> PrimeModulus {
        make_modulus(n).unwrap()
    }

    #[test]
    fn modulus_classification() {
        assert_eq!(p(7).mod4(), 3);
        assert_eq!(p(13).mod4(), 1);
        assert_eq!(make_modulus(4), Err(FieldError::NotPrime(4)));
        assert_eq!(make_modulus(2), Err(FieldError::NotOdd));
        assert_eq!(make_modulus(1), Err(FieldError::NotPrime(1)));
        assert_eq!(make_modulus(0), Err(FieldError::NotPrime(0)));
        assert!(matches!(make_modulus(1 << 31), Err(FieldError::TooLarge(_))));
        // Largest prime below 2^31.
        assert!(make_modulus(2147483647).is_ok());
    }

    #[test]
    fn primality_small_range() {
        let primes: Vec<u64> = (2..100).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
                79, 83, 89, 97
            ]
        );
        assert!(is_prime_u64(100_003));
        assert!(!is_prime_u64(100_001));
    }

    #[test]
    fn inverse_examples() {
        let m = p(7);
        assert_eq!(fp_inv(3, &m), Ok(5));
        assert_eq!(fp_inv(1, &m), Ok(1));
        assert_eq!(fp_inv(0, &m), Err(FieldError::ZeroInverse));
        for q in [3u64, 7, 11, 13, 10007] {
            let m = p(q);
            for a in 1..q.min(200) {
                let inv = fp_inv(a, &m).unwrap();
                assert_eq!(m.mul(a, inv), 1);
                assert_eq!(fp_inv(inv, &m).unwrap(), a);
            }
        }
    }

    #[test]
    fn square_examples() {
        let m = p(7);
        assert!(fp_is_square(2, &m));
        assert!(!fp_is_square(6, &m));
        assert!(fp_is_square(0, &m));
        let squares: Vec<u64> = (0..7).filter(|&a| fp_is_square(a, &m)).collect();
        assert_eq!(squares, vec![0, 1, 2, 4]);
    }

    #[test]
    fn square_census_and_negative_one() {
        for q in [3u64, 7, 11, 13, 19, 23, 31, 43] {
            let m = p(q);
            let count = (0..q).filter(|&a| fp_is_square(a, &m)).count() as u64;
            assert_eq!(count, (q + 1) / 2);
            // -1 is a square exactly when p = 1 (mod 4).
            assert_eq!(fp_is_square(q - 1, &m), m.mod4() == 1);
        }
    }

    #[test]
    fn sqrt_roundtrip() {
        for q in [3u64, 7, 11, 13, 17, 29, 10007, 100_003] {
            let m = p(q);
            for a in 0..q.min(300) {
                match fp_sqrt(a, &m) {
                    Some(r) => assert_eq!(m.mul(r, r), a),
                    None => assert!(!fp_is_square(a, &m)),
                }
            }
        }
    }

    #[test]
    fn barrett_reduction_matches_division() {
        for q in [3u64, 7, 100_003, 2147483647] {
            let m = p(q);
            let mut x = 1u64;
            for _ in 0..10_000 {
                // xorshift to cover the u64 range below 2^63
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                let v = x & ((1 << 63) - 1);
                assert_eq!(m.reduce(v), v % q);
            }
            assert_eq!(m.reduce((1 << 63) - 1), ((1u64 << 63) - 1) % q);
            assert_eq!(m.reduce(0), 0);
        }
    }

    #[test]
    fn arithmetic_basics() {
        let m = p(7);
        assert_eq!(m.add(5, 4), 2);
        assert_eq!(m.sub(2, 5), 4);
        assert_eq!(m.neg(0), 0);
        assert_eq!(m.neg(3), 4);
        assert_eq!(m.mul(3, 5), 1);
        assert_eq!(m.pow(3, 6), 1);
    }
}
