//! Exact sums of roots of unity, and a compensated floating-point mirror.
//!
//! Character values in this crate are integer combinations of roots of unity.
//! [`Cyclotomic`] keeps them exactly and decides integrality by reducing modulo
//! the cyclotomic polynomial; [`FloatSum`] accumulates the same terms in double
//! precision with Neumaier summation.

use crate::field::RootOfUnity;
use std::collections::BTreeMap;
use std::fmt;

/// A finite formal sum Σ c·ζ with ζ roots of unity, compared after reduction.
#[derive(Clone, Default)]
pub struct Cyclotomic {
    terms: BTreeMap<RootOfUnity, i64>,
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn mobius(mut n: u64) -> i32 {
    let mut m = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

/// Coefficients of Φ_n, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i128> {
    let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    let mut num = vec![1i128];
    let mut den = vec![1i128];
    for &d in &divisors {
        let mu = mobius(n / d);
        if mu == 0 {
            continue;
        }
        // (x^d - 1)
        let target = if mu == 1 { &mut num } else { &mut den };
        let mut next = vec![0i128; target.len() + d as usize];
        for (i, &c) in target.iter().enumerate() {
            next[i] -= c;
            next[i + d as usize] += c;
        }
        *target = next;
    }
    // exact division num / den
    let mut rem = num;
    let dd = den.len() - 1;
    let mut quot = vec![0i128; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd] / den[dd];
        quot[i] = c;
        for j in 0..=dd {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_int(c: i64) -> Self {
        let mut z = Self::zero();
        z.add_term(c, RootOfUnity::ONE);
        z
    }

    pub fn root(r: RootOfUnity) -> Self {
        let mut z = Self::zero();
        z.add_term(1, r);
        z
    }

    pub fn add_term(&mut self, c: i64, r: RootOfUnity) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(r).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&r);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (RootOfUnity, i64)> + '_ {
        self.terms.iter().map(|(r, c)| (*r, *c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut z = self.clone();
        for (r, c) in other.terms() {
            z.add_term(c, r);
        }
        z
    }

    pub fn neg(&self) -> Self {
        let mut z = Self::zero();
        for (r, c) in self.terms() {
            z.add_term(-c, r);
        }
        z
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut z = Self::zero();
        for (r, c) in self.terms() {
            z.add_term(c * k, r);
        }
        z
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut z = Self::zero();
        for (r, c) in self.terms() {
            for (s, d) in other.terms() {
                z.add_term(c * d, r.mul(s));
            }
        }
        z
    }

    pub fn mul_root(&self, r: RootOfUnity) -> Self {
        let mut z = Self::zero();
        for (s, c) in self.terms() {
            z.add_term(c, s.mul(r));
        }
        z
    }

    pub fn conj(&self) -> Self {
        let mut z = Self::zero();
        for (r, c) in self.terms() {
            z.add_term(c, r.conj());
        }
        z
    }

    /// Common order of all roots appearing.
    pub fn order(&self) -> u64 {
        self.terms.keys().fold(1, |acc, r| lcm(acc, r.order))
    }

    /// Canonical form: coefficients of the remainder modulo Φ_N, N = order().
    pub fn reduced(&self) -> (u64, Vec<i128>) {
        let n = self.order();
        let mut dense = vec![0i128; n as usize];
        for (r, c) in self.terms() {
            dense[(r.exponent * (n / r.order)) as usize] += c as i128;
        }
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        for i in (deg..dense.len()).rev() {
            let c = dense[i];
            if c == 0 {
                continue;
            }
            for j in 0..=deg {
                dense[i - deg + j] -= c * phi[j];
            }
        }
        dense.truncate(deg.max(1));
        while dense.len() > 1 && *dense.last().unwrap() == 0 {
            dense.pop();
        }
        (n, dense)
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<i64> {
        let (_, d) = self.reduced();
        if d.len() == 1 {
            Some(d[0] as i64)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.to_integer() == Some(0)
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.add(&other.neg()).is_zero()
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let mut s = FloatSum::default();
        for (r, c) in self.terms() {
            s.add_term(c as f64, r);
        }
        s.value()
    }

    /// Human-readable form like `-z15^3 - z15^12`.
    pub fn render(&self) -> String {
        if let Some(k) = self.to_integer() {
            return k.to_string();
        }
        let mut out = String::new();
        for (r, c) in self.terms() {
            let mono = if r.order == 1 {
                format!("{}", c.abs())
            } else {
                let z = format!("z{}^{}", r.order, r.exponent);
                if c.abs() == 1 {
                    z
                } else {
                    format!("{}·{z}", c.abs())
                }
            };
            if out.is_empty() {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            out.push_str(&mono);
        }
        out
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Default, Debug)]
pub struct FloatSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl FloatSum {
    pub fn add_term(&mut self, c: f64, r: RootOfUnity) {
        let (x, y) = r.to_complex();
        neumaier(&mut self.re, &mut self.re_c, c * x);
        neumaier(&mut self.im, &mut self.im_c, c * y);
    }

    pub fn merge(&mut self, other: &FloatSum) {
        neumaier(&mut self.re, &mut self.re_c, other.re);
        neumaier(&mut self.re, &mut self.re_c, other.re_c);
        neumaier(&mut self.im, &mut self.im_c, other.im);
        neumaier(&mut self.im, &mut self.im_c, other.im_c);
    }

    pub fn value(&self) -> (f64, f64) {
        (self.re + self.re_c, self.im + self.im_c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(15).len(), 9);
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for n in [2u64, 3, 4, 6, 8, 12, 15, 16] {
            let mut z = Cyclotomic::zero();
            for k in 0..n {
                z.add_term(1, RootOfUnity::new(n, k));
            }
            assert!(z.is_zero(), "n={n}");
        }
    }

    #[test]
    fn primitive_cube_roots_sum_to_minus_one() {
        let mut z = Cyclotomic::zero();
        z.add_term(1, RootOfUnity::new(3, 1));
        z.add_term(1, RootOfUnity::new(3, 2));
        assert_eq!(z.to_integer(), Some(-1));
        let mut w = Cyclotomic::root(RootOfUnity::new(8, 1));
        w = w.mul(&w.conj());
        assert_eq!(w.to_integer(), Some(1));
        assert_eq!(Cyclotomic::root(RootOfUnity::new(4, 1)).to_integer(), None);
    }

    #[test]
    fn float_mirror_agrees() {
        let mut z = Cyclotomic::zero();
        let mut s = FloatSum::default();
        for k in 0..64u64 {
            let r = RootOfUnity::new(64, k * 5);
            z.add_term((k % 3) as i64, r);
            s.add_term((k % 3) as f64, r);
        }
        let (a, b) = z.to_complex();
        let (c, d) = s.value();
        assert!((a - c).abs() < 1e-12 && (b - d).abs() < 1e-12);
    }
}
