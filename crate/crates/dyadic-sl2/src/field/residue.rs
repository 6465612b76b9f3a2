//! Small binary fields GF(2^k), elements stored as bit-polynomials.

use crate::error::{Error, Result};

/// Largest supported extension degree. Tables are q x q, so 2^8 keeps them small.
pub const MAX_DEGREE: u32 = 8;

/// A finite field of characteristic 2 with full multiplication and log tables.
///
/// Elements are integers `0..q` read as polynomials over 𝔽₂ in a generator `a`
/// (bit `j` is the coefficient of `a^j`), reduced modulo `modulus`.
#[derive(Clone, Debug)]
pub struct BinaryField {
    degree: u32,
    modulus: u32,
    mul: Vec<u8>,
    inv: Vec<u8>,
    log: Vec<u32>,
    exp: Vec<u32>,
    trace: Vec<u8>,
}

fn clmul_reduce(mut a: u32, mut b: u32, modulus: u32, degree: u32) -> u32 {
    let mut r = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> degree & 1 == 1 {
            a ^= modulus;
        }
    }
    r
}

/// Irreducibility over 𝔽₂ by trial division; fine for degree ≤ 16.
pub fn is_irreducible(poly: u32) -> bool {
    if poly < 2 {
        return false;
    }
    let deg = 31 - poly.leading_zeros();
    if deg == 0 {
        return false;
    }
    for d in 2u32..(1 << (deg / 2 + 1)) {
        let dd = 31 - d.leading_zeros();
        if dd == 0 || dd > deg / 2 {
            continue;
        }
        if poly_mod(poly, d) == 0 {
            return false;
        }
    }
    true
}

fn poly_mod(mut a: u32, b: u32) -> u32 {
    let db = 31 - b.leading_zeros();
    while a != 0 && 31 - a.leading_zeros() >= db {
        let shift = 31 - a.leading_zeros() - db;
        a ^= b << shift;
    }
    a
}

/// The least irreducible polynomial of the given degree (as a bit pattern).
pub fn least_irreducible(degree: u32) -> u32 {
    (1u32 << degree..1u32 << (degree + 1))
        .find(|&p| is_irreducible(p))
        .expect("irreducible polynomials exist in every degree")
}

impl BinaryField {
    /// Builds GF(2^degree) using `modulus` (bit pattern including the leading term).
    pub fn new(degree: u32, modulus: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::InvalidField(format!(
                "residue degree {degree} outside 1..={MAX_DEGREE}"
            )));
        }
        if 31 - modulus.leading_zeros() != degree || !is_irreducible(modulus) {
            return Err(Error::InvalidField(format!(
                "residue modulus {modulus:#b} is not an irreducible polynomial of degree {degree}"
            )));
        }
        let q = 1usize << degree;
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                mul[a * q + b] = clmul_reduce(a as u32, b as u32, modulus, degree) as u8;
            }
        }
        // primitive element: least element of multiplicative order q-1
        let order = |x: usize| {
            let mut y = x;
            let mut k = 1;
            while y != 1 {
                y = mul[y * q + x] as usize;
                k += 1;
            }
            k
        };
        let g = (1..q).find(|&x| order(x) == q - 1).unwrap_or(1);
        let mut exp = vec![0u32; q - 1];
        let mut log = vec![0u32; q];
        let mut y = 1usize;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = y as u32;
            log[y] = k as u32;
            y = mul[y * q + g] as usize;
        }
        let mut inv = vec![0u8; q];
        for x in 1..q {
            inv[x] = exp[(q - 1 - log[x] as usize) % (q - 1)] as u8;
        }
        let mut trace = vec![0u8; q];
        for (x, t) in trace.iter_mut().enumerate() {
            let mut acc = 0usize;
            let mut y = x;
            for _ in 0..degree {
                acc ^= y;
                y = mul[y * q + y] as usize;
            }
            *t = acc as u8;
        }
        Ok(BinaryField {
            degree,
            modulus,
            mul,
            inv,
            log,
            exp,
            trace,
        })
    }

    pub fn with_default_modulus(degree: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::InvalidField(format!(
                "residue degree {degree} outside 1..={MAX_DEGREE}"
            )));
        }
        Self::new(degree, least_irreducible(degree))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn modulus(&self) -> u32 {
        self.modulus
    }
    pub fn size(&self) -> u32 {
        1 << self.degree
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a as usize) << self.degree | b as usize] as u32
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::NotAUnit("0 in the residue field".into()));
        }
        Ok(self.inv[a as usize] as u32)
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let n = (self.size() - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (k % n)) % n) as usize]
    }

    /// Discrete log to the fixed primitive element.
    pub fn log(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::NotAUnit("0 has no logarithm".into()));
        }
        Ok(self.log[a as usize])
    }

    /// The fixed primitive element raised to `k`.
    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % (self.size() as u64 - 1)) as usize]
    }

    /// Absolute trace to 𝔽₂.
    pub fn trace(&self, a: u32) -> u32 {
        self.trace[a as usize] as u32
    }

    /// Square root (inverse Frobenius).
    pub fn sqrt(&self, a: u32) -> u32 {
        self.pow(a, (self.size() / 2) as u64)
    }

    /// Image of `x ↦ x² + c·x`.
    pub fn artin_schreier_image(&self, c: u32) -> Vec<u32> {
        let mut img: Vec<u32> = (0..self.size())
            .map(|x| self.mul(x, x) ^ self.mul(c, x))
            .collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    /// Some `x` with `x² + c·x = target`, if one exists.
    pub fn artin_schreier_preimage(&self, c: u32, target: u32) -> Option<u32> {
        (0..self.size()).find(|&x| self.mul(x, x) ^ self.mul(c, x) == target)
    }

    /// Renders an element in the generator `a`, e.g. `a+1`.
    pub fn render(&self, x: u32) -> String {
        if x == 0 {
            return "0".into();
        }
        let mut terms = Vec::new();
        for j in (0..self.degree).rev() {
            if x >> j & 1 == 1 {
                terms.push(match j {
                    0 => "1".to_string(),
                    1 => "a".to_string(),
                    _ => format!("a^{j}"),
                });
            }
        }
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli() {
        assert_eq!(least_irreducible(1), 0b10);
        assert_eq!(least_irreducible(2), 0b111);
        assert_eq!(least_irreducible(3), 0b1011);
        assert_eq!(least_irreducible(4), 0b10011);
    }

    #[test]
    fn field_axioms_small() {
        for k in 1..=4 {
            let f = BinaryField::with_default_modulus(k).unwrap();
            let q = f.size();
            for a in 1..q {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                assert_eq!(f.mul(f.sqrt(a), f.sqrt(a)), a);
                for b in 0..q {
                    for c in 0..q {
                        assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                    }
                }
            }
            let ones = (0..q).filter(|&x| f.trace(x) == 1).count() as u32;
            assert_eq!(ones, q / 2);
            assert_eq!(f.artin_schreier_image(1).len() as u32, q / 2);
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert!(BinaryField::new(2, 0b101).is_err());
    }
}
