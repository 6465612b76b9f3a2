use super::{FieldSpec, Ring};
use crate::error::{Error, Result};
use std::fmt;

/// An element of P^v·(R/P^N) written as ϖ^v times a unit with N known digits.
///
/// Zero is kept separately together with the absolute precision to which it
/// is known to vanish.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedScalar {
    field: FieldSpec,
    repr: Repr,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Repr {
    Zero { absolute: i64 },
    Unit { valuation: i64, digits: Vec<u32> },
}

impl TruncatedScalar {
    pub fn zero(field: &FieldSpec, absolute: i64) -> Self {
        TruncatedScalar {
            field: field.clone(),
            repr: Repr::Zero { absolute },
        }
    }

    /// ϖ^valuation · Σ digits[i] ϖ^i. Leading zero digits are absorbed into the valuation.
    pub fn from_digits(field: &FieldSpec, valuation: i64, digits: &[u32]) -> Self {
        let q = field.q() as u32;
        assert!(digits.iter().all(|&d| d < q), "digit outside the residue field");
        match digits.iter().position(|&d| d != 0) {
            None => Self::zero(field, valuation + digits.len() as i64),
            Some(k) => TruncatedScalar {
                field: field.clone(),
                repr: Repr::Unit {
                    valuation: valuation + k as i64,
                    digits: digits[k..].to_vec(),
                },
            },
        }
    }

    /// ϖ^offset times an element of a finite ring, at the ring's precision.
    pub fn from_ring(field: &FieldSpec, ring: &Ring, x: u64, offset: i64) -> Self {
        Self::from_digits(field, offset, &ring.digits(x))
    }

    /// An integer at the field's working precision (relative precision N).
    pub fn from_int(field: &FieldSpec, v: i64) -> Self {
        let n = field.precision();
        if v == 0 {
            return Self::zero(field, n as i64);
        }
        if field.characteristic() == 2 {
            return if v % 2 == 0 {
                Self::zero(field, n as i64)
            } else {
                Self::one(field)
            };
        }
        let e = field.e().finite().unwrap();
        let s = v.unsigned_abs().trailing_zeros();
        let ring = Ring::new(field, n);
        let mut out = Self::from_ring(field, &ring, ring.from_int(v >> s), 0);
        if s > 0 {
            // 2 = ϖ^e·unit; only the unit needs the extra e digits
            let wide = Ring::new(field, n + e);
            let two = Self::from_ring(field, &wide, wide.from_int(2), 0).truncate_relative(n);
            for _ in 0..s {
                out = out.mul(&two);
            }
        }
        out
    }

    pub fn one(field: &FieldSpec) -> Self {
        let mut d = vec![0; field.precision() as usize];
        d[0] = 1;
        Self::from_digits(field, 0, &d)
    }

    pub fn uniformizer(field: &FieldSpec) -> Self {
        Self::one(field).shifted(1)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// None for zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { valuation, .. } => Some(*valuation),
        }
    }

    /// Number of known digits of the unit part (0 for zero).
    pub fn relative_precision(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Unit { digits, .. } => digits.len() as u32,
        }
    }

    /// The element is known modulo P^{absolute_precision}.
    pub fn absolute_precision(&self) -> i64 {
        match &self.repr {
            Repr::Zero { absolute } => *absolute,
            Repr::Unit { valuation, digits } => valuation + digits.len() as i64,
        }
    }

    /// Digits of the unit part (empty for zero).
    pub fn unit_digits(&self) -> &[u32] {
        match &self.repr {
            Repr::Zero { .. } => &[],
            Repr::Unit { digits, .. } => digits,
        }
    }

    /// Multiplies by ϖ^k.
    pub fn shifted(&self, k: i64) -> Self {
        let repr = match &self.repr {
            Repr::Zero { absolute } => Repr::Zero {
                absolute: absolute + k,
            },
            Repr::Unit { valuation, digits } => Repr::Unit {
                valuation: valuation + k,
                digits: digits.clone(),
            },
        };
        TruncatedScalar {
            field: self.field.clone(),
            repr,
        }
    }

    /// Keeps at most `n` digits of the unit part.
    pub fn truncate_relative(&self, n: u32) -> Self {
        match &self.repr {
            Repr::Unit { valuation, digits } if digits.len() > n as usize => {
                Self::from_digits(&self.field, *valuation, &digits[..n as usize])
            }
            _ => self.clone(),
        }
    }

    /// Digits from position `valuation` over `len` places, e.g. "1001" for 9 in ℚ₂.
    pub fn digits_string(&self) -> String {
        match &self.repr {
            Repr::Zero { .. } => "0".into(),
            Repr::Unit { digits, .. } => digits
                .iter()
                .map(|&d| std::char::from_digit(d, 16).unwrap())
                .collect(),
        }
    }

    /// Digit vector of a unit or integral element from position 0 to `len`.
    pub fn integral_digits(&self, len: u32) -> Result<Vec<u32>> {
        let mut out = vec![0; len as usize];
        match &self.repr {
            Repr::Zero { absolute } => {
                if *absolute < len as i64 {
                    return Err(Error::Precision {
                        needed: len,
                        available: (*absolute).max(0) as u32,
                    });
                }
            }
            Repr::Unit { valuation, digits } => {
                if *valuation < 0 {
                    return Err(Error::Precondition("element is not integral".into()));
                }
                if valuation + (digits.len() as i64) < len as i64 {
                    return Err(Error::Precision {
                        needed: len,
                        available: (valuation + digits.len() as i64) as u32,
                    });
                }
                for (i, &d) in digits.iter().enumerate() {
                    let p = *valuation as usize + i;
                    if p < len as usize {
                        out[p] = d;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Image in R/P^n for an integral element known at least to P^n.
    pub fn to_ring(&self, ring: &Ring) -> Result<u64> {
        Ok(ring.from_digits(&self.integral_digits(ring.level())?))
    }

    fn check_field(&self, other: &Self) {
        assert!(self.field == other.field, "scalars over different fields");
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        match (&self.repr, &other.repr) {
            (Repr::Zero { absolute: a }, Repr::Zero { absolute: b }) => Self::zero(&self.field, a + b),
            (Repr::Zero { absolute }, Repr::Unit { valuation, .. })
            | (Repr::Unit { valuation, .. }, Repr::Zero { absolute }) => {
                Self::zero(&self.field, absolute + valuation)
            }
            (
                Repr::Unit {
                    valuation: va,
                    digits: da,
                },
                Repr::Unit {
                    valuation: vb,
                    digits: db,
                },
            ) => {
                let n = da.len().min(db.len()) as u32;
                let ring = Ring::new(&self.field, n);
                let p = ring.mul(ring.from_digits(da), ring.from_digits(db));
                Self::from_ring(&self.field, &ring, p, va + vb)
            }
        }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { valuation, digits } => {
                let ring = Ring::new(&self.field, digits.len() as u32);
                let x = ring.neg(ring.from_digits(digits));
                Self::from_ring(&self.field, &ring, x, *valuation)
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        let abs = self.absolute_precision().min(other.absolute_precision());
        let (va, vb) = match (self.valuation(), other.valuation()) {
            (None, None) => return Self::zero(&self.field, abs),
            (Some(v), None) => (v, abs),
            (None, Some(v)) => (abs, v),
            (Some(a), Some(b)) => (a, b),
        };
        let v = va.min(vb);
        if abs <= v {
            return Self::zero(&self.field, abs);
        }
        let n = (abs - v) as u32;
        let ring = Ring::new(&self.field, n);
        let place = |s: &Self| -> u64 {
            match &s.repr {
                Repr::Zero { .. } => 0,
                Repr::Unit { valuation, digits } => {
                    let k = (valuation - v) as usize;
                    if k >= n as usize {
                        return 0;
                    }
                    let mut d = vec![0; n as usize];
                    for (i, &x) in digits.iter().enumerate() {
                        if k + i < n as usize {
                            d[k + i] = x;
                        }
                    }
                    ring.from_digits(&d)
                }
            }
        };
        let s = ring.add(place(self), place(other));
        Self::from_ring(&self.field, &ring, s, v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Inverse of a nonzero element; the valuation changes sign.
    pub fn inverse(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::NotAUnit("zero has no inverse".into())),
            Repr::Unit { valuation, digits } => {
                let ring = Ring::new(&self.field, digits.len() as u32);
                let x = ring.inv(ring.from_digits(digits));
                Ok(Self::from_ring(&self.field, &ring, x, -valuation))
            }
        }
    }

    /// Unit part ϖ^{-v}·x.
    pub fn unit_part(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::NotAUnit("zero has no unit part".into())),
            Repr::Unit { digits, .. } => Ok(Self::from_digits(&self.field, 0, digits)),
        }
    }

    /// True iff a unit (valuation 0).
    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// "ϖ^v·(d₀ + d₁ϖ + …)" with residue digits written in the generator `a`.
    pub fn render(&self) -> String {
        let res = self.field.residue();
        match &self.repr {
            Repr::Zero { absolute } => format!("O(ϖ^{absolute})"),
            Repr::Unit { valuation, digits } => {
                let mut terms = Vec::new();
                for (i, &d) in digits.iter().enumerate() {
                    if d == 0 {
                        continue;
                    }
                    let c = res.render(d);
                    let c = if c.contains('+') { format!("({c})") } else { c };
                    terms.push(match (i, c.as_str()) {
                        (0, _) => c,
                        (1, "1") => "ϖ".to_string(),
                        (_, "1") => format!("ϖ^{i}"),
                        (1, _) => format!("{c}ϖ"),
                        _ => format!("{c}ϖ^{i}"),
                    });
                }
                format!(
                    "ϖ^{valuation}·({}) + O(ϖ^{})",
                    terms.join(" + "),
                    valuation + digits.len() as i64
                )
            }
        }
    }
}

impl fmt::Debug for TruncatedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for TruncatedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl std::ops::Mul for &TruncatedScalar {
    type Output = TruncatedScalar;
    fn mul(self, rhs: Self) -> TruncatedScalar {
        TruncatedScalar::mul(self, rhs)
    }
}

impl std::ops::Add for &TruncatedScalar {
    type Output = TruncatedScalar;
    fn add(self, rhs: Self) -> TruncatedScalar {
        TruncatedScalar::add(self, rhs)
    }
}

impl std::ops::Sub for &TruncatedScalar {
    type Output = TruncatedScalar;
    fn sub(self, rhs: Self) -> TruncatedScalar {
        TruncatedScalar::sub(self, rhs)
    }
}

impl std::ops::Neg for &TruncatedScalar {
    type Output = TruncatedScalar;
    fn neg(self) -> TruncatedScalar {
        TruncatedScalar::neg(self)
    }
}

/// Product of two scalars (valuations add, relative precision is the minimum).
pub fn scalar_mul(a: &TruncatedScalar, b: &TruncatedScalar) -> TruncatedScalar {
    a.mul(b)
}

/// Reads an integer ("-5") or a finite ϖ-adic expansion "d:DIGITS[@v]",
/// lowest digit first, one hex digit per residue, times ϖ^v. Expansions are
/// padded with zeros to the working precision.
pub fn parse_scalar(field: &FieldSpec, s: &str) -> Result<TruncatedScalar> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("d:") {
        let (digits, val) = match rest.split_once('@') {
            Some((d, v)) => (d, v.parse::<i64>().map_err(|e| Error::Parse(format!("valuation {v:?}: {e}")))?),
            None => (rest, 0),
        };
        let q = field.q() as u32;
        let mut out = Vec::new();
        for c in digits.chars() {
            let d = c
                .to_digit(16)
                .filter(|&d| d < q)
                .ok_or_else(|| Error::Parse(format!("digit {c:?} is not a residue of 𝔽_{q}")))?;
            out.push(d);
        }
        if out.is_empty() {
            return Err(Error::Parse("empty digit string".into()));
        }
        let n = field.precision() as usize;
        if out.len() < n {
            out.resize(n, 0);
        }
        return Ok(TruncatedScalar::from_digits(field, val, &out));
    }
    let v: i64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("expected an integer or d:DIGITS, got {s:?}")))?;
    Ok(TruncatedScalar::from_int(field, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        let f = FieldSpec::q2(8);
        assert_eq!(parse_scalar(&f, "5").unwrap(), TruncatedScalar::from_int(&f, 5));
        assert_eq!(parse_scalar(&f, "d:101").unwrap(), TruncatedScalar::from_int(&f, 5));
        assert_eq!(parse_scalar(&f, "d:1@1").unwrap(), TruncatedScalar::from_int(&f, 2));
        assert!(parse_scalar(&f, "d:102").is_err());
        assert!(parse_scalar(&f, "x").is_err());
        let g = FieldSpec::laurent(2, 6).unwrap();
        assert_eq!(parse_scalar(&g, "d:31").unwrap().unit_digits()[..2], [3, 1]);
    }

    #[test]
    fn three_squared_in_q2() {
        let f = FieldSpec::q2(12);
        let three = TruncatedScalar::from_int(&f, 3);
        assert_eq!(three.square().digits_string(), "100100000000");
    }

    #[test]
    fn one_plus_t_squared() {
        let f = FieldSpec::laurent(1, 8).unwrap();
        let a = TruncatedScalar::from_digits(&f, 0, &[1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(a.square().digits_string(), "10100000");
    }

    #[test]
    fn pi_squared_is_two_in_sqrt2() {
        let f = FieldSpec::q2_sqrt2(12);
        let pi = TruncatedScalar::uniformizer(&f);
        let two = TruncatedScalar::from_int(&f, 2);
        assert_eq!(pi.mul(&pi), two);
        assert_eq!(two.valuation(), Some(2));
    }

    #[test]
    fn negative_valuation_and_inverse() {
        let f = FieldSpec::q2(8);
        let x = TruncatedScalar::from_int(&f, 12); // 4·3
        let y = x.inverse().unwrap();
        assert_eq!(y.valuation(), Some(-2));
        let one = x.mul(&y);
        assert_eq!(one, TruncatedScalar::one(&f));
    }

    #[test]
    fn addition_with_carries() {
        let f = FieldSpec::q2(8);
        let a = TruncatedScalar::from_int(&f, 7);
        let b = TruncatedScalar::from_int(&f, 1);
        let s = a.add(&b);
        assert_eq!(s.valuation(), Some(3));
        assert_eq!(s, TruncatedScalar::from_int(&f, 8).truncate_relative(5));
        let minus_one = TruncatedScalar::from_int(&f, -1);
        assert_eq!(minus_one.digits_string(), "11111111");
    }

    #[test]
    fn render_format() {
        let f = FieldSpec::q2(4);
        assert_eq!(TruncatedScalar::from_int(&f, 5).render(), "ϖ^0·(1 + ϖ^2) + O(ϖ^4)");
        let g = FieldSpec::laurent(2, 3).unwrap();
        let x = TruncatedScalar::from_digits(&g, -1, &[3, 2, 0]);
        assert_eq!(x.render(), "ϖ^-1·((a+1) + aϖ) + O(ϖ^2)");
    }
}
