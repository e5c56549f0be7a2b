//! Coefficient domains for sparse multivariate polynomials.
//!
//! Arithmetic is routed through a ring context object rather than bare
//! element methods so the same polynomial code serves exact prime-field
//! coefficients and floating (real/complex) coefficients.

use num_complex::Complex64;
use num_rational::Ratio;

/// A commutative coefficient ring (in practice, a field) usable as the
/// scalar domain of [`crate::polyform::MultiPoly`].
pub trait CoeffRing: Clone + Send + Sync + std::fmt::Debug {
    type Elem: Clone + PartialEq + Send + Sync + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero (or non-units).
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Embed the rational `num/den`. `den` must be a unit in the ring.
    fn from_ratio(&self, num: i64, den: i64) -> Self::Elem;

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_ratio(n, 1)
    }

    fn pow(&self, a: &Self::Elem, mut k: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Absolute value for float-like domains; `None` in exact domains
    /// (used to decide whether per-equation coefficient normalization applies).
    fn magnitude(&self, a: &Self::Elem) -> Option<f64>;

    /// Embed an f64 scale factor; `None` in exact domains.
    fn from_f64(&self, _x: f64) -> Option<Self::Elem> {
        None
    }

    /// Render an element for the text serialization of systems.
    fn format_elem(&self, a: &Self::Elem) -> String;
}

/// Real floating-point coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Reals;

impl CoeffRing for Reals {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn inv(&self, a: &f64) -> Option<f64> {
        (*a != 0.0).then(|| 1.0 / a)
    }
    fn from_ratio(&self, num: i64, den: i64) -> f64 {
        num as f64 / den as f64
    }
    fn magnitude(&self, a: &f64) -> Option<f64> {
        Some(a.abs())
    }
    fn from_f64(&self, x: f64) -> Option<f64> {
        Some(x)
    }
    fn format_elem(&self, a: &f64) -> String {
        format!("{a:.17e}")
    }
}

/// Complex floating-point coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Complexes;

impl CoeffRing for Complexes {
    type Elem = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self, a: &Complex64) -> bool {
        a.re == 0.0 && a.im == 0.0
    }
    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }
    fn sub(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a - b
    }
    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }
    fn neg(&self, a: &Complex64) -> Complex64 {
        -a
    }
    fn inv(&self, a: &Complex64) -> Option<Complex64> {
        (!self.is_zero(a)).then(|| a.inv())
    }
    fn from_ratio(&self, num: i64, den: i64) -> Complex64 {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn magnitude(&self, a: &Complex64) -> Option<f64> {
        Some(a.norm())
    }
    fn from_f64(&self, x: f64) -> Option<Complex64> {
        Some(Complex64::new(x, 0.0))
    }
    fn format_elem(&self, a: &Complex64) -> String {
        if a.im == 0.0 {
            format!("{:.17e}", a.re)
        } else {
            format!("({:.17e}{:+.17e}i)", a.re, a.im)
        }
    }
}

/// Exact rational coefficients, for small integer-coefficient systems and
/// as the source domain of exact specialization into a prime field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl CoeffRing for Rationals {
    type Elem = Ratio<i128>;

    fn zero(&self) -> Ratio<i128> {
        Ratio::from_integer(0)
    }
    fn one(&self) -> Ratio<i128> {
        Ratio::from_integer(1)
    }
    fn is_zero(&self, a: &Ratio<i128>) -> bool {
        *a.numer() == 0
    }
    fn add(&self, a: &Ratio<i128>, b: &Ratio<i128>) -> Ratio<i128> {
        a + b
    }
    fn sub(&self, a: &Ratio<i128>, b: &Ratio<i128>) -> Ratio<i128> {
        a - b
    }
    fn mul(&self, a: &Ratio<i128>, b: &Ratio<i128>) -> Ratio<i128> {
        a * b
    }
    fn neg(&self, a: &Ratio<i128>) -> Ratio<i128> {
        -a
    }
    fn inv(&self, a: &Ratio<i128>) -> Option<Ratio<i128>> {
        (!self.is_zero(a)).then(|| a.recip())
    }
    fn from_ratio(&self, num: i64, den: i64) -> Ratio<i128> {
        Ratio::new(num as i128, den as i128)
    }
    fn magnitude(&self, _a: &Ratio<i128>) -> Option<f64> {
        None
    }
    fn format_elem(&self, a: &Ratio<i128>) -> String {
        if *a.denom() == 1 {
            format!("{}", a.numer())
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

/// The prime field GF(p) for an odd prime `p < 2^31`, with elements
/// stored as canonical representatives in `[0, p)`.
///
/// All products fit in `u64` without overflow since `p^2 < 2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Construct GF(p). Panics if `p` is not an odd prime below `2^31`.
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 31), "modulus out of range");
        assert!(is_prime_u64(p), "modulus {p} is not prime");
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduce an arbitrary signed integer into `[0, p)`.
    pub fn reduce_i128(&self, n: i128) -> u64 {
        let p = self.p as i128;
        (((n % p) + p) % p) as u64
    }

    pub fn reduce_u64(&self, n: u64) -> u64 {
        n % self.p
    }

    pub fn pow_u64(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }

    /// Legendre symbol: 1 if `a` is a nonzero quadratic residue, `p-1` if a
    /// non-residue, 0 if `a == 0`.
    pub fn legendre(&self, a: u64) -> u64 {
        self.pow_u64(a, (self.p - 1) / 2)
    }

    /// Square root mod p via Tonelli-Shanks, returning the representative in
    /// `[0, (p-1)/2]` when one exists.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        let p = self.p;
        let a = a % p;
        if a == 0 {
            return Some(0);
        }
        if self.legendre(a) != 1 {
            return None;
        }
        let root = if p % 4 == 3 {
            self.pow_u64(a, (p + 1) / 4)
        } else {
            // Write p-1 = q * 2^s with q odd.
            let mut q = p - 1;
            let mut s = 0u32;
            while q % 2 == 0 {
                q /= 2;
                s += 1;
            }
            // Smallest quadratic non-residue; a short deterministic scan.
            let mut z = 2u64;
            while self.legendre(z) != p - 1 {
                z += 1;
            }
            let mut m = s;
            let mut c = self.pow_u64(z, q);
            let mut t = self.pow_u64(a, q);
            let mut r = self.pow_u64(a, (q + 1) / 2);
            while t != 1 {
                let mut i = 0u32;
                let mut t2 = t;
                while t2 != 1 {
                    t2 = t2 * t2 % p;
                    i += 1;
                }
                let b = self.pow_u64(c, 1 << (m - i - 1));
                m = i;
                c = b * b % p;
                t = t * c % p;
                r = r * b % p;
            }
            r
        };
        Some(root.min(p - root))
    }
}

impl CoeffRing for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a != 0).then(|| self.pow_u64(*a, self.p - 2))
    }
    fn from_ratio(&self, num: i64, den: i64) -> u64 {
        let n = self.reduce_i128(num as i128);
        let d = self.reduce_i128(den as i128);
        let dinv = self.inv(&d).expect("denominator divisible by modulus");
        self.mul(&n, &dinv)
    }
    fn magnitude(&self, _a: &u64) -> Option<f64> {
        None
    }
    fn format_elem(&self, a: &u64) -> String {
        format!("{a}")
    }
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        a %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
