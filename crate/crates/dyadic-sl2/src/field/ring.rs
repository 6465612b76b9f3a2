//! The finite rings R/P^n with elements packed into `u64` codes.
//!
//! Characteristic 2: digit `i` (an element of 𝔽_q) occupies bits `f·i..f·(i+1)`.
//! Characteristic 0: an element is Σ_{i<e} c_i ϖ^i with c_i in the Galois ring
//! ℤ/2^{r_i}[y]/(h), r_i = ⌈(n-i)/e⌉, and each of the f coefficients of c_i
//! takes r_i bits. Either way every integer in `0..q^n` is a valid code and
//! distinct codes are distinct elements.

use super::{FieldSpec, MAX_E, MAX_F};

const MAXC: usize = (MAX_E * MAX_F) as usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Flavor {
    /// ℤ/2^n: code is the integer itself.
    TwoAdic,
    /// e, f general, characteristic 0.
    Mixed,
    /// 𝔽₂[t]/t^n: code is the bit vector of coefficients.
    BinaryPoly,
    /// 𝔽_q[t]/t^n with q > 2.
    Poly,
}

#[derive(Clone)]
pub struct Ring {
    field: FieldSpec,
    n: u32,
    flavor: Flavor,
    e: usize,
    f: usize,
    /// r_i for each ϖ-component (characteristic 0).
    widths: Vec<u32>,
    /// bit offset of coefficient (i, j) at index i·f + j.
    offsets: Vec<u32>,
    mask: u64,
    pi_pows: Vec<u64>,
    lifts: Vec<u64>,
}

#[inline]
fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl std::fmt::Debug for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ring({}/P^{})", self.field.name(), self.n)
    }
}

impl Ring {
    /// R/P^n for the given field. Panics if n = 0 or f·n > 60.
    pub fn new(field: &FieldSpec, n: u32) -> Ring {
        assert!(n >= 1, "R/P^0 is the zero ring");
        let f = field.f() as usize;
        assert!(f as u32 * n <= 60, "f·n too large for packed codes");
        let (flavor, e) = if field.characteristic() == 2 {
            (
                if f == 1 {
                    Flavor::BinaryPoly
                } else {
                    Flavor::Poly
                },
                1,
            )
        } else {
            let e = field.e().finite().unwrap() as usize;
            (
                if e == 1 && f == 1 {
                    Flavor::TwoAdic
                } else {
                    Flavor::Mixed
                },
                e,
            )
        };
        let mut widths = Vec::new();
        let mut offsets = Vec::new();
        if flavor == Flavor::Mixed {
            let mut off = 0;
            for i in 0..e {
                let r = if n as usize > i {
                    (n as usize - i).div_ceil(e) as u32
                } else {
                    0
                };
                widths.push(r);
                for _ in 0..f {
                    offsets.push(off);
                    off += r;
                }
            }
        }
        let mut ring = Ring {
            field: field.clone(),
            n,
            flavor,
            e,
            f,
            widths,
            offsets,
            mask: low_mask(f as u32 * n),
            pi_pows: Vec::new(),
            lifts: Vec::new(),
        };
        let q = field.q();
        ring.lifts = (0..q as u32).map(|d| ring.lift_raw(d)).collect();
        let pi = ring.uniformizer_raw();
        let mut p = ring.one();
        for _ in 0..n {
            ring.pi_pows.push(p);
            p = ring.mul(p, pi);
        }
        ring
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn level(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> u64 {
        1 << self.f
    }
    /// Number of elements, q^n.
    pub fn size(&self) -> u64 {
        1u64 << (self.f as u32 * self.n)
    }
    /// Number of units, (q-1)q^{n-1}.
    pub fn unit_count(&self) -> u64 {
        (self.q() - 1) * (self.size() / self.q())
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        match self.flavor {
            Flavor::Mixed => 1, // coefficient (0,0) sits at offset 0
            _ => 1,
        }
    }

    fn lift_raw(&self, d: u32) -> u64 {
        match self.flavor {
            Flavor::TwoAdic | Flavor::BinaryPoly | Flavor::Poly => d as u64,
            Flavor::Mixed => {
                let mut c = [0u64; MAXC];
                for j in 0..self.f {
                    c[j] = (d >> j & 1) as u64;
                }
                self.pack(&c)
            }
        }
    }

    fn uniformizer_raw(&self) -> u64 {
        if self.n == 1 {
            return 0;
        }
        match self.flavor {
            Flavor::TwoAdic => 2 & self.mask,
            Flavor::BinaryPoly => 2,
            Flavor::Poly => 1 << self.f,
            Flavor::Mixed => {
                let mut c = [0u64; MAXC];
                if self.e >= 2 {
                    c[self.f] = 1;
                } else {
                    // e = 1: ϖ = -E_0
                    c[0] = (self.field.0.eisenstein[0]).wrapping_neg() as u64;
                }
                self.pack(&c)
            }
        }
    }

    #[inline]
    fn unpack(&self, x: u64) -> [u64; MAXC] {
        let mut c = [0u64; MAXC];
        for i in 0..self.e {
            let m = low_mask(self.widths[i]);
            for j in 0..self.f {
                let k = i * self.f + j;
                let off = self.offsets[k];
                c[k] = if off >= 64 { 0 } else { (x >> off) & m };
            }
        }
        c
    }

    #[inline]
    fn pack(&self, c: &[u64]) -> u64 {
        let mut x = 0u64;
        for i in 0..self.e {
            let w = self.widths[i];
            if w == 0 {
                continue;
            }
            let m = low_mask(w);
            for j in 0..self.f {
                let k = i * self.f + j;
                x |= (c[k] & m) << self.offsets[k];
            }
        }
        x
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        match self.flavor {
            Flavor::TwoAdic => x.wrapping_add(y) & self.mask,
            Flavor::BinaryPoly | Flavor::Poly => x ^ y,
            Flavor::Mixed => {
                let a = self.unpack(x);
                let b = self.unpack(y);
                let mut c = [0u64; MAXC];
                for k in 0..self.e * self.f {
                    c[k] = a[k].wrapping_add(b[k]);
                }
                self.pack(&c)
            }
        }
    }

    pub fn neg(&self, x: u64) -> u64 {
        match self.flavor {
            Flavor::TwoAdic => x.wrapping_neg() & self.mask,
            Flavor::BinaryPoly | Flavor::Poly => x,
            Flavor::Mixed => {
                let a = self.unpack(x);
                let mut c = [0u64; MAXC];
                for k in 0..self.e * self.f {
                    c[k] = a[k].wrapping_neg();
                }
                self.pack(&c)
            }
        }
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        match self.flavor {
            Flavor::TwoAdic => x.wrapping_sub(y) & self.mask,
            Flavor::BinaryPoly | Flavor::Poly => x ^ y,
            _ => self.add(x, self.neg(y)),
        }
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        match self.flavor {
            Flavor::TwoAdic => x.wrapping_mul(y) & self.mask,
            Flavor::BinaryPoly => {
                let mut r = 0u64;
                let mut a = x;
                let mut i = 0;
                while a != 0 && i < self.n {
                    if a & 1 == 1 {
                        r ^= y << i;
                    }
                    a >>= 1;
                    i += 1;
                }
                r & self.mask
            }
            Flavor::Poly => {
                let res = self.field.residue();
                let f = self.f as u32;
                let dm = (1u64 << f) - 1;
                let n = self.n;
                let mut out = 0u64;
                for i in 0..n {
                    let a = (x >> (f * i) & dm) as u32;
                    if a == 0 {
                        continue;
                    }
                    for j in 0..n - i {
                        let b = (y >> (f * j) & dm) as u32;
                        if b != 0 {
                            out ^= (res.mul(a, b) as u64) << (f * (i + j));
                        }
                    }
                }
                out
            }
            Flavor::Mixed => self.mul_mixed(x, y),
        }
    }

    fn mul_mixed(&self, x: u64, y: u64) -> u64 {
        let (e, f) = (self.e, self.f);
        let a = self.unpack(x);
        let b = self.unpack(y);
        let h = &self.field.0.residue_lift;
        let mut prod = [0u64; 2 * MAXC];
        for i in 0..e {
            let ai = &a[i * f..(i + 1) * f];
            if ai.iter().all(|&v| v == 0) {
                continue;
            }
            for i2 in 0..e {
                let bi = &b[i2 * f..(i2 + 1) * f];
                if bi.iter().all(|&v| v == 0) {
                    continue;
                }
                // Galois-ring product of ai and bi
                let mut tmp = [0u64; 2 * MAX_F as usize];
                for j in 0..f {
                    if ai[j] == 0 {
                        continue;
                    }
                    for k in 0..f {
                        tmp[j + k] = tmp[j + k].wrapping_add(ai[j].wrapping_mul(bi[k]));
                    }
                }
                for s in (f..2 * f - 1).rev() {
                    let c = tmp[s];
                    if c == 0 {
                        continue;
                    }
                    tmp[s] = 0;
                    for j in 0..f {
                        if h[j] != 0 {
                            tmp[s - f + j] = tmp[s - f + j].wrapping_sub(c.wrapping_mul(h[j] as u64));
                        }
                    }
                }
                let base = (i + i2) * f;
                for j in 0..f {
                    prod[base + j] = prod[base + j].wrapping_add(tmp[j]);
                }
            }
        }
        // ϖ^e = -Σ_{k<e} E_k ϖ^k
        let eis = &self.field.0.eisenstein;
        if e >= 2 {
            for t in (e..2 * e - 1).rev() {
                for j in 0..f {
                    let c = prod[t * f + j];
                    if c == 0 {
                        continue;
                    }
                    prod[t * f + j] = 0;
                    for k in 0..e {
                        let idx = (t - e + k) * f + j;
                        prod[idx] = prod[idx].wrapping_sub(c.wrapping_mul(eis[k] as u64));
                    }
                }
            }
        }
        self.pack(&prod)
    }

    pub fn pow(&self, x: u64, mut k: u64) -> u64 {
        let mut base = x;
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn square(&self, x: u64) -> u64 {
        self.mul(x, x)
    }

    /// Residue class mod P as an element of 𝔽_q.
    pub fn residue(&self, x: u64) -> u32 {
        match self.flavor {
            Flavor::TwoAdic | Flavor::BinaryPoly => (x & 1) as u32,
            Flavor::Poly => (x & ((1 << self.f) - 1)) as u32,
            Flavor::Mixed => {
                let mut r = 0;
                for j in 0..self.f {
                    r |= ((x >> self.offsets[j]) & 1) << j;
                }
                r as u32
            }
        }
    }

    pub fn is_unit(&self, x: u64) -> bool {
        self.residue(x) != 0
    }

    /// Valuation, with `n` standing for zero.
    pub fn valuation(&self, x: u64) -> u32 {
        if x == 0 {
            return self.n;
        }
        match self.flavor {
            Flavor::TwoAdic | Flavor::BinaryPoly => x.trailing_zeros().min(self.n),
            Flavor::Poly => (x.trailing_zeros() / self.f as u32).min(self.n),
            Flavor::Mixed => {
                let c = self.unpack(x);
                let mut v = self.n;
                for i in 0..self.e {
                    for j in 0..self.f {
                        let cij = c[i * self.f + j];
                        if cij != 0 {
                            v = v.min(self.e as u32 * cij.trailing_zeros() + i as u32);
                        }
                    }
                }
                v
            }
        }
    }

    /// x ∈ P^k?
    pub fn in_ideal(&self, x: u64, k: u32) -> bool {
        self.valuation(x) >= k.min(self.n)
    }

    /// Inverse of a unit. Panics on non-units.
    pub fn inv(&self, x: u64) -> u64 {
        assert!(self.is_unit(x), "inverse of a non-unit");
        match self.flavor {
            Flavor::TwoAdic => {
                let mut y = x; // correct mod 8 for odd x
                for _ in 0..6 {
                    y = y.wrapping_mul(2u64.wrapping_sub(x.wrapping_mul(y)));
                }
                y & self.mask
            }
            _ => self.pow(x, self.unit_count() - 1),
        }
    }

    /// Checked inverse.
    pub fn try_inv(&self, x: u64) -> Option<u64> {
        self.is_unit(x).then(|| self.inv(x))
    }

    /// Canonical lift of a residue digit.
    pub fn lift(&self, d: u32) -> u64 {
        self.lifts[d as usize]
    }

    /// ϖ^k (zero once k ≥ n).
    pub fn pi_pow(&self, k: u32) -> u64 {
        if k >= self.n {
            0
        } else {
            self.pi_pows[k as usize]
        }
    }

    pub fn uniformizer(&self) -> u64 {
        self.pi_pow(1)
    }

    pub fn from_int(&self, v: i64) -> u64 {
        match self.flavor {
            Flavor::TwoAdic => (v as u64) & self.mask,
            Flavor::BinaryPoly | Flavor::Poly => (v.rem_euclid(2)) as u64,
            Flavor::Mixed => {
                let mut c = [0u64; MAXC];
                c[0] = v as u64;
                self.pack(&c)
            }
        }
    }

    /// The ϖ-adic digits d_0..d_{n-1} with x = Σ lift(d_i) ϖ^i.
    pub fn digits(&self, x: u64) -> Vec<u32> {
        let n = self.n as usize;
        match self.flavor {
            Flavor::TwoAdic | Flavor::BinaryPoly => (0..n).map(|i| (x >> i & 1) as u32).collect(),
            Flavor::Poly => {
                let f = self.f;
                (0..n).map(|i| (x >> (f * i) & ((1 << f) - 1)) as u32).collect()
            }
            Flavor::Mixed => {
                let res = self.field.residue();
                let iota = self.field.iota_residue();
                let mut out = vec![0u32; n];
                let mut cur = x;
                for (p, slot) in out.iter_mut().enumerate() {
                    if cur == 0 {
                        break;
                    }
                    // the only term of valuation exactly p is c_i ϖ^i, i = p mod e
                    let i = p % self.e;
                    let s = (p / self.e) as u32;
                    let c = self.unpack(cur);
                    let mut d = 0u32;
                    for j in 0..self.f {
                        d |= ((c[i * self.f + j] >> s & 1) as u32) << j;
                    }
                    let d = res.mul(d, res.pow(iota, s as u64));
                    *slot = d;
                    if d != 0 {
                        cur = self.sub(cur, self.mul(self.lift(d), self.pi_pow(p as u32)));
                    }
                }
                debug_assert_eq!(cur, 0);
                out
            }
        }
    }

    pub fn from_digits(&self, digits: &[u32]) -> u64 {
        match self.flavor {
            Flavor::TwoAdic | Flavor::BinaryPoly | Flavor::Poly => {
                let mut x = 0u64;
                for (i, &d) in digits.iter().take(self.n as usize).enumerate() {
                    x |= (d as u64) << (self.f * i);
                }
                x
            }
            Flavor::Mixed => {
                let mut x = 0;
                for (i, &d) in digits.iter().take(self.n as usize).enumerate() {
                    if d != 0 {
                        x = self.add(x, self.mul(self.lift(d), self.pi_pow(i as u32)));
                    }
                }
                x
            }
        }
    }

    /// Digit `p` of x.
    pub fn digit(&self, x: u64, p: u32) -> u32 {
        match self.flavor {
            Flavor::TwoAdic | Flavor::BinaryPoly => (x >> p & 1) as u32,
            Flavor::Poly => (x >> (self.f as u32 * p) & ((1 << self.f) - 1)) as u32,
            Flavor::Mixed => self.digits(x)[p as usize],
        }
    }

    /// Digit string, one hex character per digit, lowest position first.
    pub fn digit_string(&self, x: u64) -> String {
        self.digits(x)
            .iter()
            .map(|&d| std::char::from_digit(d, 16).unwrap())
            .collect()
    }

    /// Key that orders elements lexicographically by digit vector.
    pub fn order_key(&self, x: u64) -> u64 {
        match self.flavor {
            Flavor::TwoAdic | Flavor::BinaryPoly => x.reverse_bits() >> (64 - self.n),
            _ => {
                let mut k = 0u64;
                for d in self.digits(x) {
                    k = k << self.f | d as u64;
                }
                k
            }
        }
    }

    /// Image of x under R/P^n → R/P^m for m ≤ n.
    pub fn reduce_to(&self, target: &Ring, x: u64) -> u64 {
        debug_assert!(target.n <= self.n && target.field == self.field);
        match self.flavor {
            Flavor::Mixed => target.pack(&self.unpack(x)),
            _ => x & target.mask,
        }
    }

    /// A lift of x ∈ R/P^m (from `source`) into this ring, keeping the packed
    /// coefficients (zero extension). Not digit-canonical in ramified fields.
    pub fn extend_from(&self, source: &Ring, x: u64) -> u64 {
        debug_assert!(source.n <= self.n);
        match self.flavor {
            Flavor::Mixed => self.pack(&source.unpack(x)),
            _ => x,
        }
    }

    /// Digit-canonical lift: same low digits, zeros above.
    pub fn lift_from(&self, source: &Ring, x: u64) -> u64 {
        self.from_digits(&source.digits(x))
    }

    /// x / ϖ^k for x ∈ P^k, as an element of R/P^{n-k}, computed from digits.
    pub fn shift_down(&self, target: &Ring, x: u64, k: u32) -> u64 {
        let d = self.digits(x);
        target.from_digits(&d[k as usize..])
    }

    /// Component coefficients c_{i,j} (characteristic 0 only; used by ψ).
    pub(crate) fn coefficients(&self, x: u64) -> Vec<u64> {
        assert!(self.field.characteristic() == 0);
        match self.flavor {
            Flavor::TwoAdic => vec![x],
            _ => self.unpack(x)[..self.e * self.f].to_vec(),
        }
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.size()).filter(move |&x| self.is_unit(x))
    }

    /// All x with x ≡ 0 mod P^k.
    pub fn ideal(&self, k: u32) -> impl Iterator<Item = u64> + '_ {
        (0..self.size()).filter(move |&x| self.in_ideal(x, k))
    }
}

#[cfg(test)]
mod tests {
    use crate::field::{FieldSpec, Ring};

    fn fields() -> Vec<FieldSpec> {
        vec![
            FieldSpec::q2(12),
            FieldSpec::q2_sqrt2(12),
            FieldSpec::laurent(1, 12).unwrap(),
            FieldSpec::laurent(2, 12).unwrap(),
            FieldSpec::new(crate::field::FieldConfig::eisenstein(2, vec![2, 2, 1], 10)).unwrap(),
            FieldSpec::new(crate::field::FieldConfig::preset("q4", 8).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn digits_round_trip_everywhere() {
        for f in fields() {
            let r = Ring::new(&f, 4.min(f.precision()));
            for x in 0..r.size() {
                let d = r.digits(x);
                assert_eq!(r.from_digits(&d), x, "{f:?} {x}");
            }
        }
    }

    #[test]
    fn ring_axioms_exhaustive_small() {
        for f in fields() {
            let r = Ring::new(&f, 3);
            let s = r.size();
            for x in 0..s {
                assert_eq!(r.add(x, r.neg(x)), 0);
                for y in 0..s {
                    assert_eq!(r.mul(x, y), r.mul(y, x));
                    let z = (x * 7 + y * 3) % s;
                    assert_eq!(r.mul(r.mul(x, y), z), r.mul(x, r.mul(y, z)));
                    assert_eq!(r.mul(x, r.add(y, z)), r.add(r.mul(x, y), r.mul(x, z)));
                }
                if r.is_unit(x) {
                    assert_eq!(r.mul(x, r.inv(x)), 1);
                }
            }
        }
    }

    #[test]
    fn unit_count_matches() {
        for f in fields() {
            let r = Ring::new(&f, 3);
            assert_eq!(r.units().count() as u64, r.unit_count());
        }
    }

    #[test]
    fn valuation_of_pi_powers() {
        for f in fields() {
            let r = Ring::new(&f, 6);
            for k in 0..6 {
                assert_eq!(r.valuation(r.pi_pow(k)), k);
                let mut d = vec![0; 6];
                d[k as usize] = 1;
                assert_eq!(r.from_digits(&d), r.pi_pow(k));
            }
        }
    }

    #[test]
    fn sqrt2_pi_squared_is_two() {
        let f = FieldSpec::q2_sqrt2(12);
        let r = Ring::new(&f, 12);
        let pi = r.uniformizer();
        assert_eq!(r.mul(pi, pi), r.from_int(2));
    }

    #[test]
    fn iota_times_pi_e_is_two() {
        for f in fields() {
            if f.characteristic() != 0 {
                continue;
            }
            let e = f.e().finite().unwrap();
            let r = Ring::new(&f, 8);
            // ϖ^e = -2V with V = Σ (E_j/2) ϖ^j
            let eis = f.eisenstein().unwrap();
            let mut v = 0;
            for j in 0..e as usize {
                v = r.add(v, r.mul(r.from_int(eis[j] / 2), r.pi_pow(j as u32)));
            }
            let iota = r.neg(r.inv(v));
            assert_eq!(r.mul(iota, r.pi_pow(e)), r.from_int(2));
            assert_eq!(r.residue(iota), f.iota_residue());
        }
    }

    #[test]
    fn reduce_and_extend() {
        for f in fields() {
            let big = Ring::new(&f, 6);
            let small = Ring::new(&f, 3);
            for x in (0..big.size()).step_by(7) {
                let y = big.reduce_to(&small, x);
                assert_eq!(small.digits(y)[..], big.digits(x)[..3]);
                let z = big.extend_from(&small, y);
                assert_eq!(big.reduce_to(&small, z), y);
                let w = big.lift_from(&small, y);
                assert_eq!(big.reduce_to(&small, w), y);
            }
        }
    }
}
