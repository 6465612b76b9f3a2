//! Truncated arithmetic in dyadic local fields: ℚ₂, Eisenstein extensions of
//! unramified extensions of ℚ₂, and 𝔽_q((t)).
//!
//! A [`FieldSpec`] fixes the field and its working precision. Finite quotients
//! R/P^n live in [`Ring`], whose elements are packed `u64` codes; the
//! user-facing scalar type is [`TruncatedScalar`].

mod psi;
mod residue;
mod ring;
mod scalar;

pub use psi::{psi_eval, PsiEvaluator, RootOfUnity};
pub use residue::{is_irreducible, least_irreducible, BinaryField};
pub use ring::Ring;
pub use scalar::{parse_scalar, scalar_mul, TruncatedScalar};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Largest ramification index supported by the packed representation.
pub const MAX_E: u32 = 16;
/// Largest residue degree supported.
pub const MAX_F: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// ℚ₂ itself, or its unramified extension of degree f.
    Q2,
    /// A totally ramified extension given by an Eisenstein polynomial.
    Eisenstein,
    /// 𝔽_q((t)).
    Laurent,
}

/// Ramification index; infinite in characteristic 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ramification {
    Finite(u32),
    Infinite,
}

impl Ramification {
    /// `m < e`, which always holds when e is infinite.
    pub fn exceeds(self, m: i64) -> bool {
        match self {
            Ramification::Finite(e) => m < e as i64,
            Ramification::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Ramification::Finite(e) => Some(e),
            Ramification::Infinite => None,
        }
    }
}

impl fmt::Display for Ramification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ramification::Finite(e) => write!(f, "{e}"),
            Ramification::Infinite => write!(f, "infinity"),
        }
    }
}

/// Serializable description of a field, as read from a key-value config.
///
/// ```toml
/// kind = "eisenstein"
/// f = 1
/// eisenstein = [-2, 0, 1]
/// N = 12
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub kind: FieldKind,
    #[serde(default = "one")]
    pub f: u32,
    /// Only checked against the Eisenstein degree when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<u32>,
    /// Integer coefficients, constant term first, monic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<Vec<i64>>,
    /// Bit pattern of the residue polynomial; least irreducible when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue_modulus: Option<u32>,
    #[serde(rename = "N", default = "default_precision")]
    pub precision: u32,
}

fn one() -> u32 {
    1
}
fn default_precision() -> u32 {
    12
}

impl FieldConfig {
    pub fn q2(precision: u32) -> Self {
        FieldConfig {
            kind: FieldKind::Q2,
            f: 1,
            e: None,
            eisenstein: None,
            residue_modulus: None,
            precision,
        }
    }

    pub fn eisenstein(f: u32, coeffs: Vec<i64>, precision: u32) -> Self {
        FieldConfig {
            kind: FieldKind::Eisenstein,
            f,
            e: Some(coeffs.len().saturating_sub(1) as u32),
            eisenstein: Some(coeffs),
            residue_modulus: None,
            precision,
        }
    }

    pub fn laurent(f: u32, precision: u32) -> Self {
        FieldConfig {
            kind: FieldKind::Laurent,
            f,
            e: None,
            eisenstein: None,
            residue_modulus: None,
            precision,
        }
    }

    /// Parses the TOML key-value form.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("field config serializes")
    }

    /// Short names accepted on the command line.
    pub fn preset(name: &str, precision: u32) -> Option<Self> {
        Some(match name {
            "q2" | "Q2" => Self::q2(precision),
            "q2sqrt2" | "Q2sqrt2" => Self::eisenstein(1, vec![-2, 0, 1], precision),
            "q2sqrt-2" => Self::eisenstein(1, vec![2, 0, 1], precision),
            "q4" => FieldConfig {
                f: 2,
                ..Self::q2(precision)
            },
            "f2t" => Self::laurent(1, precision),
            "f4t" => Self::laurent(2, precision),
            "f8t" => Self::laurent(3, precision),
            "f16t" => Self::laurent(4, precision),
            _ => return None,
        })
    }
}

pub(crate) struct FieldData {
    pub(crate) config: FieldConfig,
    pub(crate) characteristic: u32,
    pub(crate) f: u32,
    pub(crate) e: Ramification,
    /// Monic Eisenstein polynomial, constant term first; `[-2, 1]` for ℚ₂.
    pub(crate) eisenstein: Vec<i64>,
    pub(crate) residue: BinaryField,
    /// Monic integer lift of the residue modulus, constant term first (degree f).
    pub(crate) residue_lift: Vec<i64>,
    /// Residue of ι (0 in characteristic 2).
    pub(crate) iota_bar: u32,
    /// Least residue outside the image of x ↦ x² + x.
    pub(crate) aleph: u32,
    /// Valuation of E'(ϖ), the different exponent (characteristic 0).
    pub(crate) different: u32,
    /// Tr(ϖ^i) over the unramified subfield, i < e.
    pub(crate) trace_pi: Vec<i64>,
    /// Tr(y^j) from the unramified subfield to ℚ₂, j < f.
    pub(crate) trace_y: Vec<i64>,
}

/// A validated field descriptor with its working precision N.
///
/// Cheap to clone; shared immutably.
#[derive(Clone)]
pub struct FieldSpec(pub(crate) Arc<FieldData>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.config == other.0.config
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec({})", self.name())
    }
}

/// Newton power sums p_1..p_{n-1} (and p_0 = deg) of the roots of a monic
/// integer polynomial given constant-term first.
fn power_sums(poly: &[i64]) -> Vec<i64> {
    let deg = poly.len() - 1;
    // a_{deg-k} is the coefficient of x^{deg-k}
    let a = |k: usize| poly[deg - k];
    let mut p = vec![0i64; deg.max(1)];
    p[0] = deg as i64;
    for k in 1..deg {
        let mut s = k as i64 * a(k);
        for i in 1..k {
            s += a(i) * p[k - i];
        }
        p[k] = -s;
    }
    p
}

/// Builds a field from its kind, residue degree, Eisenstein data and precision.
pub fn make_field(
    kind: FieldKind,
    f: u32,
    eisenstein: Option<Vec<i64>>,
    precision: u32,
) -> Result<FieldSpec> {
    let config = FieldConfig {
        kind,
        f,
        e: eisenstein.as_ref().map(|c| c.len().saturating_sub(1) as u32),
        eisenstein,
        residue_modulus: None,
        precision,
    };
    FieldSpec::new(config)
}

impl FieldSpec {
    pub fn new(config: FieldConfig) -> Result<Self> {
        if config.precision < 1 {
            return Err(Error::InvalidField("precision N must be at least 1".into()));
        }
        if config.f < 1 || config.f > MAX_F {
            return Err(Error::InvalidField(format!(
                "residue degree f = {} outside 1..={MAX_F}",
                config.f
            )));
        }
        let modulus = config
            .residue_modulus
            .unwrap_or_else(|| least_irreducible(config.f));
        let residue = BinaryField::new(config.f, modulus)?;
        let residue_lift: Vec<i64> = (0..=config.f).map(|j| (modulus >> j & 1) as i64).collect();
        let aleph = (1..residue.size())
            .find(|x| !residue.artin_schreier_image(1).contains(x))
            .expect("x^2+x is never surjective on a finite field of characteristic 2");

        let (characteristic, e, eisenstein) = match config.kind {
            FieldKind::Laurent => {
                if config.eisenstein.is_some() {
                    return Err(Error::InvalidField(
                        "Eisenstein data is meaningless in characteristic 2".into(),
                    ));
                }
                (2, Ramification::Infinite, vec![0, 1])
            }
            FieldKind::Q2 => {
                if let Some(e) = config.e {
                    if e != 1 {
                        return Err(Error::InvalidField("kind q2 has e = 1".into()));
                    }
                }
                (0, Ramification::Finite(1), vec![-2, 1])
            }
            FieldKind::Eisenstein => {
                let c = config.eisenstein.clone().ok_or_else(|| {
                    Error::InvalidField("kind eisenstein needs eisenstein coefficients".into())
                })?;
                validate_eisenstein(&c)?;
                let e = (c.len() - 1) as u32;
                if let Some(given) = config.e {
                    if given != e {
                        return Err(Error::InvalidField(format!(
                            "e = {given} but the Eisenstein polynomial has degree {e}"
                        )));
                    }
                }
                if e > MAX_E {
                    return Err(Error::InvalidField(format!("e = {e} exceeds {MAX_E}")));
                }
                (0, Ramification::Finite(e), c)
            }
        };
        // in characteristic 0 the digits of 2 are computed e places past N
        let headroom = match e {
            Ramification::Finite(e) => e,
            Ramification::Infinite => 0,
        };
        if config.f as u64 * (config.precision + headroom) as u64 > 60 {
            return Err(Error::InvalidField(format!(
                "f·(N+{headroom}) = {} exceeds the 60-bit packed representation",
                config.f * (config.precision + headroom)
            )));
        }
        let trace_pi = if characteristic == 0 {
            power_sums(&eisenstein)
        } else {
            vec![]
        };
        let trace_y = if characteristic == 0 {
            power_sums(&residue_lift)
        } else {
            vec![]
        };
        let mut data = FieldData {
            config,
            characteristic,
            f: residue.degree(),
            e,
            eisenstein,
            residue,
            residue_lift,
            iota_bar: 0,
            aleph,
            different: 0,
            trace_pi,
            trace_y,
        };
        if characteristic == 0 {
            let e = data.e.finite().unwrap();
            // ϖ^e = -2V with V = Σ (E_j/2) ϖ^j, so ι = -1/V. With integer
            // coefficients V ≡ E_0/2 ≡ 1 mod P, hence ι ≡ 1.
            data.iota_bar = 1;
            let probe = FieldSpec(Arc::new(clone_data(&data)));
            // different exponent: valuation of E'(ϖ)
            let level = 4 * e + 8;
            let big = Ring::new(&probe, level);
            let pi = big.uniformizer();
            let mut acc = big.zero();
            let mut pw = big.one();
            for (j, &c) in data.eisenstein.iter().enumerate().skip(1) {
                acc = big.add(acc, big.mul(big.from_int(j as i64 * c), pw));
                pw = big.mul(pw, pi);
            }
            let d = big.valuation(acc);
            if d >= level {
                return Err(Error::InvalidField("E'(ϖ) vanishes to working precision".into()));
            }
            data.different = d;
        }
        Ok(FieldSpec(Arc::new(data)))
    }

    pub fn from_config(config: &FieldConfig) -> Result<Self> {
        Self::new(config.clone())
    }

    pub fn q2(precision: u32) -> Self {
        Self::new(FieldConfig::q2(precision)).expect("ℚ₂ is valid")
    }

    pub fn q2_sqrt2(precision: u32) -> Self {
        Self::new(FieldConfig::eisenstein(1, vec![-2, 0, 1], precision)).expect("x²-2 is Eisenstein")
    }

    pub fn laurent(f: u32, precision: u32) -> Result<Self> {
        Self::new(FieldConfig::laurent(f, precision))
    }

    /// Same field, different working precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        let mut c = self.0.config.clone();
        c.precision = precision;
        Self::new(c)
    }

    pub fn config(&self) -> &FieldConfig {
        &self.0.config
    }
    pub fn kind(&self) -> FieldKind {
        self.0.config.kind
    }
    pub fn characteristic(&self) -> u32 {
        self.0.characteristic
    }
    pub fn f(&self) -> u32 {
        self.0.f
    }
    /// Residue field size q = 2^f.
    pub fn q(&self) -> u64 {
        1 << self.0.f
    }
    pub fn e(&self) -> Ramification {
        self.0.e
    }
    pub fn precision(&self) -> u32 {
        self.0.config.precision
    }
    pub fn residue(&self) -> &BinaryField {
        &self.0.residue
    }
    pub fn iota_residue(&self) -> u32 {
        self.0.iota_bar
    }
    /// The chosen residue outside the image of x ↦ x² + x.
    pub fn aleph(&self) -> u32 {
        self.0.aleph
    }
    pub fn different_exponent(&self) -> u32 {
        self.0.different
    }
    pub fn eisenstein(&self) -> Option<&[i64]> {
        (self.0.characteristic == 0).then_some(&self.0.eisenstein[..])
    }

    /// 2e as an optional integer (None in characteristic 2).
    pub fn two_e(&self) -> Option<u32> {
        self.0.e.finite().map(|e| 2 * e)
    }

    /// The unit ι with 2 = ι ϖ^e, at the field precision (zero in characteristic 2).
    pub fn iota(&self) -> TruncatedScalar {
        if self.0.characteristic == 2 {
            return TruncatedScalar::zero(self, self.precision() as i64);
        }
        let e = self.0.e.finite().unwrap();
        let n = self.precision();
        let ring = Ring::new(self, n + e);
        let two = ring.from_int(2);
        TruncatedScalar::from_ring(self, &ring, two, 0)
            .shifted(-(e as i64))
            .truncate_relative(n)
    }

    /// Fails unless the field carries at least `needed` digits.
    pub fn require_precision(&self, needed: u32) -> Result<()> {
        if self.precision() < needed {
            Err(Error::Precision {
                needed,
                available: self.precision(),
            })
        } else {
            Ok(())
        }
    }

    pub fn name(&self) -> String {
        let f = self.f();
        match self.kind() {
            FieldKind::Q2 if f == 1 => "Q2".into(),
            FieldKind::Q2 => format!("Q2(unramified f={f})"),
            FieldKind::Laurent => format!("F{}((t))", self.q()),
            FieldKind::Eisenstein => {
                let c = &self.0.eisenstein;
                let mut terms = Vec::new();
                for (j, &a) in c.iter().enumerate().rev() {
                    if a == 0 {
                        continue;
                    }
                    let mono = match j {
                        0 => format!("{}", a.abs()),
                        1 if a.abs() == 1 => "x".into(),
                        1 => format!("{}x", a.abs()),
                        _ if a.abs() == 1 => format!("x^{j}"),
                        _ => format!("{}x^{j}", a.abs()),
                    };
                    let sign = if a < 0 { "-" } else { "+" };
                    if terms.is_empty() {
                        terms.push(if a < 0 { format!("-{mono}") } else { mono });
                    } else {
                        terms.push(format!("{sign}{mono}"));
                    }
                }
                if f == 1 {
                    format!("Q2[x]/({})", terms.join(""))
                } else {
                    format!("Q2(f={f})[x]/({})", terms.join(""))
                }
            }
        }
    }
}

fn clone_data(d: &FieldData) -> FieldData {
    FieldData {
        config: d.config.clone(),
        characteristic: d.characteristic,
        f: d.f,
        e: d.e,
        eisenstein: d.eisenstein.clone(),
        residue: d.residue.clone(),
        residue_lift: d.residue_lift.clone(),
        iota_bar: d.iota_bar,
        aleph: d.aleph,
        different: d.different,
        trace_pi: d.trace_pi.clone(),
        trace_y: d.trace_y.clone(),
    }
}

fn validate_eisenstein(c: &[i64]) -> Result<()> {
    if c.len() < 2 {
        return Err(Error::InvalidField("Eisenstein polynomial must have degree ≥ 1".into()));
    }
    if *c.last().unwrap() != 1 {
        return Err(Error::InvalidField("Eisenstein polynomial must be monic".into()));
    }
    if c[0].rem_euclid(4) != 2 {
        return Err(Error::InvalidField(
            "constant term must have 2-adic valuation exactly 1".into(),
        ));
    }
    if c[1..c.len() - 1].iter().any(|a| a.rem_euclid(2) != 0) {
        return Err(Error::InvalidField("middle coefficients must be even".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q2_iota_is_one() {
        let f = FieldSpec::q2(12);
        assert_eq!(f.q(), 2);
        assert_eq!(f.e(), Ramification::Finite(1));
        assert_eq!(f.iota().digits_string(), "100000000000");
        assert_eq!(f.different_exponent(), 0);
    }

    #[test]
    fn laurent_f4() {
        let f = make_field(FieldKind::Laurent, 2, None, 12).unwrap();
        assert_eq!(f.e(), Ramification::Infinite);
        assert!(f.e().exceeds(1_000_000));
        assert!(f.iota().is_zero());
        assert_eq!(f.q(), 4);
    }

    #[test]
    fn sqrt2_iota_is_one() {
        let f = make_field(FieldKind::Eisenstein, 1, Some(vec![-2, 0, 1]), 12).unwrap();
        assert_eq!(f.e(), Ramification::Finite(2));
        // ϖ² = 2 exactly, so ι = 1
        let iota = f.iota();
        assert_eq!(iota.valuation(), Some(0));
        assert_eq!(iota.digits_string(), "100000000000");
        assert_eq!(f.different_exponent(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_field(FieldKind::Eisenstein, 1, Some(vec![-4, 0, 1]), 12).is_err());
        assert!(make_field(FieldKind::Eisenstein, 1, Some(vec![-2, 1, 1]), 12).is_err());
        assert!(make_field(FieldKind::Q2, 1, None, 0).is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = FieldConfig::eisenstein(1, vec![-2, 0, 1], 10);
        let text = c.to_toml();
        assert_eq!(FieldConfig::from_toml(&text).unwrap(), c);
        let parsed = FieldConfig::from_toml("kind = \"laurent\"\nf = 2\nN = 9\n").unwrap();
        assert_eq!(parsed, FieldConfig::laurent(2, 9));
    }

    #[test]
    fn power_sums_small() {
        // x^2 - 2: roots ±√2, p1 = 0
        assert_eq!(power_sums(&[-2, 0, 1]), vec![2, 0]);
        // x^2 + 2x + 2: p1 = -2
        assert_eq!(power_sums(&[2, 2, 1]), vec![2, -2]);
        assert_eq!(power_sums(&[-2, 1]), vec![1]);
    }
}
