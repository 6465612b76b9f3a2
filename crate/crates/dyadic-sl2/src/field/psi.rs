//! The additive character ψ of conductor P.
//!
//! Characteristic 0: ψ(x) = exp(2πi·Tr_{F/ℚ₂}(ϖ^{-d-1}x)) with d the different
//! exponent, so ψ is trivial on P and not on R. Characteristic 2:
//! ψ(x) = (-1)^{Tr(coefficient of t^0 of x)}.

use super::{FieldSpec, Ring, TruncatedScalar};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// exp(2πi·exponent/order), kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub order: u64,
    pub exponent: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity {
        order: 1,
        exponent: 0,
    };

    pub fn new(order: u64, exponent: u64) -> Self {
        assert!(order > 0);
        let exponent = exponent % order;
        let g = gcd(order, exponent);
        RootOfUnity {
            order: order / g,
            exponent: exponent / g,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        let l = self.order / gcd(self.order, other.order) * other.order;
        Self::new(
            l,
            self.exponent * (l / self.order) + other.exponent * (l / other.order),
        )
    }

    pub fn conj(self) -> Self {
        Self::new(self.order, self.order - self.exponent)
    }

    pub fn is_one(self) -> bool {
        self.exponent == 0
    }

    pub fn to_complex(self) -> (f64, f64) {
        let t = 2.0 * std::f64::consts::PI * self.exponent as f64 / self.order as f64;
        (t.cos(), t.sin())
    }
}

/// Evaluates z ↦ ψ(c·ϖ^{-ℓ}·z) on R/P^{ℓ+1} for a fixed shift ℓ and twist unit c.
///
/// With c = 1 this is ψ itself; other units give the other conductor-P
/// characters used to check that integer answers do not depend on ψ.
pub struct PsiEvaluator {
    source: Ring,
    shift: u32,
    twist: u64,
    kind: PsiKind,
}

enum PsiKind {
    Char2,
    Char0 { big: Ring, w: u64, bits: u32 },
}

impl PsiEvaluator {
    pub fn new(field: &FieldSpec, shift: u32) -> Self {
        Self::twisted(field, shift, None)
    }

    /// `twist` is a unit of R/P^{shift+1} given as a code.
    pub fn twisted(field: &FieldSpec, shift: u32, twist: Option<u64>) -> Self {
        let source = Ring::new(field, shift + 1);
        let twist = twist.unwrap_or(source.one());
        assert!(source.is_unit(twist), "twist must be a unit");
        let kind = if field.characteristic() == 2 {
            PsiKind::Char2
        } else {
            let e = field.e().finite().unwrap();
            let k = shift + field.different_exponent() + 1;
            let j = k.div_ceil(e);
            let big = Ring::new(field, e * j);
            // ι = -1/V where ϖ^e = -2V
            let eis = field.eisenstein().unwrap();
            let mut v = 0;
            for (i, &c) in eis.iter().take(e as usize).enumerate() {
                v = big.add(v, big.mul(big.from_int(c / 2), big.pi_pow(i as u32)));
            }
            let iota = big.neg(big.inv(v));
            let w = big.mul(big.pi_pow(e * j - k), big.pow(iota, j as u64));
            PsiKind::Char0 { big, w, bits: j }
        };
        PsiEvaluator {
            source,
            shift,
            twist,
            kind,
        }
    }

    /// The ring R/P^{ℓ+1} that arguments live in.
    pub fn ring(&self) -> &Ring {
        &self.source
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn eval(&self, z: u64) -> RootOfUnity {
        let z = self.source.mul(z, self.twist);
        match &self.kind {
            PsiKind::Char2 => {
                let d = self.source.digit(z, self.shift);
                RootOfUnity::new(2, self.source.field().residue().trace(d) as u64)
            }
            PsiKind::Char0 { big, w, bits } => {
                let y = big.mul(big.extend_from(&self.source, z), *w);
                let field = big.field();
                let coeffs = big.coefficients(y);
                let f = field.f() as usize;
                let mut tr: u64 = 0;
                for (idx, &c) in coeffs.iter().enumerate() {
                    let (i, j) = (idx / f, idx % f);
                    let t = (field.0.trace_pi[i] as u64).wrapping_mul(field.0.trace_y[j] as u64);
                    tr = tr.wrapping_add(c.wrapping_mul(t));
                }
                let m = if *bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
                RootOfUnity::new(1u64 << bits, tr & m)
            }
        }
    }
}

/// ψ(x) for a scalar whose value is determined by its retained digits.
pub fn psi_eval(field: &FieldSpec, x: &TruncatedScalar) -> Result<RootOfUnity> {
    match x.valuation() {
        None => {
            if x.absolute_precision() >= 1 {
                Ok(RootOfUnity::ONE)
            } else {
                Err(Error::Precision {
                    needed: (1 - x.absolute_precision()) as u32,
                    available: 0,
                })
            }
        }
        Some(v) if v >= 1 => Ok(RootOfUnity::ONE),
        Some(v) => {
            let shift = (-v) as u32;
            let rel = x.relative_precision();
            if rel < shift + 1 {
                return Err(Error::Precision {
                    needed: shift + 1,
                    available: rel,
                });
            }
            let ev = PsiEvaluator::new(field, shift);
            let z = ev.ring().from_digits(x.unit_digits());
            Ok(ev.eval(z))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q2_psi_of_one() {
        let f = FieldSpec::q2(12);
        let one = TruncatedScalar::from_int(&f, 1);
        assert_eq!(psi_eval(&f, &one).unwrap(), RootOfUnity::new(2, 1));
        // ψ(x) = exp(πi·x) on ℚ₂, so ψ(1/4) is a primitive 8th root
        let quarter = TruncatedScalar::from_int(&f, 1).shifted(-2);
        assert_eq!(psi_eval(&f, &quarter).unwrap(), RootOfUnity::new(8, 1));
    }

    #[test]
    fn trivial_on_p_nontrivial_on_r() {
        for f in [
            FieldSpec::q2(10),
            FieldSpec::q2_sqrt2(10),
            FieldSpec::laurent(1, 10).unwrap(),
            FieldSpec::laurent(2, 10).unwrap(),
        ] {
            // ψ on R/P: z ↦ ψ(z) with shift 0
            let ev = PsiEvaluator::new(&f, 0);
            let vals: Vec<_> = (0..ev.ring().size()).map(|z| ev.eval(z)).collect();
            assert!(vals.iter().any(|v| !v.is_one()), "{f:?}");
            // ψ(ϖ^{-1}·ϖ z) = ψ(z): shift 1 on multiples of ϖ agrees with shift 0
            let ev1 = PsiEvaluator::new(&f, 1);
            let r1 = ev1.ring();
            for z in 0..ev.ring().size() {
                let zz = r1.mul(r1.lift(z as u32), r1.uniformizer());
                assert_eq!(ev1.eval(zz), ev.eval(z));
            }
        }
    }

    #[test]
    fn additive_on_p_minus_two_exhaustive() {
        for f in [
            FieldSpec::q2(10),
            FieldSpec::q2_sqrt2(10),
            FieldSpec::laurent(1, 10).unwrap(),
            FieldSpec::laurent(2, 10).unwrap(),
        ] {
            // P^{-2}/P ≅ ϖ^{-2}·(R/P^3)
            let ev = PsiEvaluator::new(&f, 2);
            let r = ev.ring();
            for x in 0..r.size() {
                for y in 0..r.size() {
                    assert_eq!(ev.eval(r.add(x, y)), ev.eval(x).mul(ev.eval(y)));
                }
            }
        }
    }

    #[test]
    fn f4_trace_one_unit_gives_minus_one() {
        let f = FieldSpec::laurent(2, 8).unwrap();
        let res = f.residue();
        for d in 1..4 {
            let u = TruncatedScalar::from_digits(&f, 0, &[d, 1, 0, 0]);
            let want = if res.trace(d) == 1 { RootOfUnity::new(2, 1) } else { RootOfUnity::ONE };
            assert_eq!(psi_eval(&f, &u).unwrap(), want);
        }
    }

    #[test]
    fn twisted_differs_but_same_conductor() {
        let f = FieldSpec::q2(10);
        let ev = PsiEvaluator::new(&f, 2);
        let tw = PsiEvaluator::twisted(&f, 2, Some(3));
        assert_ne!(ev.eval(1), tw.eval(1));
        for z in 0..8u64 {
            if z % 8 == 0 {
                assert!(tw.eval(z).is_one());
            }
        }
    }

    #[test]
    fn undetermined_value_rejected() {
        let f = FieldSpec::q2(4);
        let x = TruncatedScalar::from_digits(&f, -5, &[1, 0, 1]);
        assert!(psi_eval(&f, &x).is_err());
    }
}
