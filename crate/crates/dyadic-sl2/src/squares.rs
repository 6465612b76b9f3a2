//! Square classes of units: representatives of S_k = R^× / (R^×)²(1+P^k),
//! canonicalization, the squaring bound and the image of the pair map
//! (a, d) ↦ (a - d) mod P^{δ+1}.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Ring, TruncatedScalar};
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;

/// Truncation level of a square-class set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Level {
    Finite(u32),
    /// All of R^× / (R^×)², finite only in characteristic 0.
    Full,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(k) => write!(f, "{k}"),
            Level::Full => write!(f, "FULL"),
        }
    }
}

impl Level {
    /// The finite level at which classes are computed: FULL and every k > 2e
    /// collapse to 2e+1 in characteristic 0.
    pub fn working(self, field: &FieldSpec) -> Result<u32> {
        match (self, field.two_e()) {
            (Level::Full, None) => Err(Error::InfiniteSet(
                "R^×/(R^×)² is infinite in characteristic 2; give a finite level".into(),
            )),
            (Level::Full, Some(te)) => Ok(te + 1),
            (Level::Finite(0), _) => Err(Error::OutOfRange("square-class level must be ≥ 1".into())),
            (Level::Finite(k), None) => Ok(k),
            (Level::Finite(k), Some(te)) => Ok(k.min(te + 1)),
        }
    }
}

/// Canonical representatives of S_k, ordered lexicographically by digits.
#[derive(Clone, Debug)]
pub struct SquareClassSet {
    field: FieldSpec,
    level: Level,
    ring: Ring,
    codes: Vec<u64>,
}

impl SquareClassSet {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn level(&self) -> Level {
        self.level
    }
    /// The ring R/P^L the representatives are stored in.
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn len(&self) -> usize {
        self.codes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
    /// Representatives as codes of [`Self::ring`].
    pub fn codes(&self) -> &[u64] {
        &self.codes
    }
    pub fn reps(&self) -> Vec<TruncatedScalar> {
        self.codes
            .iter()
            .map(|&c| TruncatedScalar::from_ring(&self.field, &self.ring, c, 0))
            .collect()
    }
    pub fn digit_strings(&self) -> Vec<String> {
        self.codes.iter().map(|&c| self.ring.digit_string(c)).collect()
    }
    pub fn contains_code(&self, c: u64) -> bool {
        self.codes.contains(&c)
    }
    /// Canonical representative of a unit given in any ring of level ≥ L.
    pub fn canonicalize_code(&self, ring: &Ring, u: u64) -> Result<u64> {
        if ring.level() < self.ring.level() {
            return Err(Error::Precision {
                needed: self.ring.level(),
                available: ring.level(),
            });
        }
        canonical_in(&self.ring, ring.reduce_to(&self.ring, u))
    }
}

/// The rep of the class of a unit of R/P^L, L the working level.
fn canonical_in(ring: &Ring, u: u64) -> Result<u64> {
    if !ring.is_unit(u) {
        return Err(Error::NotAUnit(ring.digit_string(u)));
    }
    let field = ring.field();
    let res = field.residue();
    let big_l = ring.level();
    let two_e = field.two_e();
    let free_below = two_e.map_or(big_l, |t| t.min(big_l));
    // residue 1
    let s = ring.lift(res.inv(res.sqrt(ring.residue(u)))?);
    let mut u = ring.mul(u, ring.square(s));
    // clear even digits below 2e (all even digits in characteristic 2)
    for p in (2..free_below).step_by(2) {
        let d = ring.digit(u, p);
        if d == 0 {
            continue;
        }
        let c = res.sqrt(d);
        let t = ring.add(ring.one(), ring.mul(ring.lift(c), ring.pi_pow(p / 2)));
        u = ring.mul(u, ring.inv(ring.square(t)));
        debug_assert_eq!(ring.digit(u, p), 0);
    }
    let digits = ring.digits(u);
    let mut r0_digits = vec![0u32; big_l as usize];
    r0_digits[0] = 1;
    for p in (1..free_below).step_by(2) {
        r0_digits[p as usize] = digits[p as usize];
    }
    let r0 = ring.from_digits(&r0_digits);
    match two_e {
        Some(te) if big_l == te + 1 => {
            // classes in 1+P^{2e} split by the Artin–Schreier image
            let t = ring.mul(u, ring.inv(r0));
            let delta = ring.digit(t, te);
            let image = res.artin_schreier_image(field.iota_residue());
            if image.contains(&delta) {
                Ok(r0)
            } else {
                Ok(ring.add(r0, ring.mul(ring.from_int(4), ring.lift(field.aleph()))))
            }
        }
        _ => Ok(r0),
    }
}

/// Representatives 1 + Σ a_i ϖ^{2i-1} (+ 4γ, γ ∈ {0, ℵ}, at full level).
pub fn square_class_reps(field: &FieldSpec, level: Level) -> Result<SquareClassSet> {
    let big_l = level.working(field)?;
    let ring = Ring::new(field, big_l);
    let q = field.q() as u32;
    let free_below = field.two_e().map_or(big_l, |t| t.min(big_l));
    let odd: Vec<u32> = (1..free_below).step_by(2).collect();
    let mut codes = Vec::new();
    let total = (q as u64).pow(odd.len() as u32);
    for idx in 0..total {
        let mut d = vec![0u32; big_l as usize];
        d[0] = 1;
        let mut k = idx;
        for &p in &odd {
            d[p as usize] = (k % q as u64) as u32;
            k /= q as u64;
        }
        let r = ring.from_digits(&d);
        codes.push(r);
        if let Some(te) = field.two_e() {
            if big_l == te + 1 {
                codes.push(ring.add(r, ring.mul(ring.from_int(4), ring.lift(field.aleph()))));
            }
        }
    }
    codes.sort_by_key(|&c| ring.order_key(c));
    Ok(SquareClassSet {
        field: field.clone(),
        level,
        ring,
        codes,
    })
}

/// Predicted size of S_k: q^{⌊k/2⌋} for k ≤ 2e, 2q^e beyond.
pub fn square_class_count(field: &FieldSpec, level: Level) -> Result<u64> {
    let q = field.q();
    let big_l = level.working(field)?;
    Ok(match field.two_e() {
        Some(te) if big_l > te => 2 * q.pow(te / 2),
        _ => q.pow(big_l / 2),
    })
}

/// The representative of the class of a unit.
pub fn canonicalize(field: &FieldSpec, u: &TruncatedScalar, level: Level) -> Result<TruncatedScalar> {
    let big_l = level.working(field)?;
    if !u.is_unit() {
        return Err(Error::NotAUnit(u.render()));
    }
    let ring = Ring::new(field, big_l);
    let code = ring.from_digits(&u.integral_digits(big_l)?);
    let r = canonical_in(&ring, code)?;
    Ok(TruncatedScalar::from_ring(field, &ring, r, 0))
}

/// S_{ℓ,k} = S_{min(ℓ-k, k)}.
pub fn s_ell_k(field: &FieldSpec, ell: u32, k: u32) -> Result<SquareClassSet> {
    if k < 1 || k >= ell {
        return Err(Error::OutOfRange(format!("need 1 ≤ k < ℓ, got k={k}, ℓ={ell}")));
    }
    square_class_reps(field, Level::Finite((ell - k).min(k)))
}

/// max(δ - e, ⌈δ/2⌉), with e = ∞ in characteristic 2.
pub fn squaring_bound(field: &FieldSpec, delta: u32) -> u32 {
    let half = delta.div_ceil(2);
    match field.e().finite() {
        Some(e) => half.max(delta.saturating_sub(e)),
        None => half,
    }
}

/// For a unit a with a² ∈ 1+P^δ, reports whether a ∈ ±1 + P^{max(δ-e, ⌈δ/2⌉)}.
pub fn squaring_bound_check(field: &FieldSpec, a: &TruncatedScalar, delta: u32) -> Result<bool> {
    if delta < 1 {
        return Err(Error::OutOfRange("δ ≥ 1".into()));
    }
    field.require_precision(delta + 1)?;
    if !a.is_unit() {
        return Err(Error::NotAUnit(a.render()));
    }
    let ring = Ring::new(field, delta + 1);
    let x = ring.from_digits(&a.integral_digits(delta + 1)?);
    Ok(squaring_bound_check_code(&ring, x, delta)?)
}

pub(crate) fn squaring_bound_check_code(ring: &Ring, x: u64, delta: u32) -> Result<bool> {
    let one = ring.one();
    if !ring.in_ideal(ring.sub(ring.square(x), one), delta) {
        return Err(Error::Precondition(format!(
            "a² ∉ 1+P^{delta} for a = {}",
            ring.digit_string(x)
        )));
    }
    let b = squaring_bound(ring.field(), delta);
    Ok(ring.in_ideal(ring.sub(x, one), b) || ring.in_ideal(ring.add(x, one), b))
}

/// Which case of the ρ-image description applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RhoCase {
    /// The whole residue line.
    Full,
    /// Only zero.
    Zero,
    /// The Artin–Schreier image of x ↦ ι̅x + x², of size q/2.
    ArtinSchreier,
}

/// Image of ρ(a, d) = (a - d) mod P^{δ+1} as a sorted set of residues of
/// the ϖ^δ coefficient.
pub fn rho_image(field: &FieldSpec, delta: u32) -> Result<(RhoCase, Vec<u32>)> {
    if delta < 1 {
        return Err(Error::OutOfRange("δ ≥ 1".into()));
    }
    field.require_precision(delta + 2)?;
    let res = field.residue();
    let case = match field.two_e() {
        None if delta % 2 == 0 => RhoCase::Full,
        None => RhoCase::Zero,
        Some(te) if delta > te => RhoCase::Full,
        Some(te) if delta == te => RhoCase::ArtinSchreier,
        Some(_) if delta % 2 == 0 => RhoCase::Full,
        Some(_) => RhoCase::Zero,
    };
    let set = match case {
        RhoCase::Full => (0..res.size()).collect(),
        RhoCase::Zero => vec![0],
        RhoCase::ArtinSchreier => res.artin_schreier_image(field.iota_residue()),
    };
    Ok((case, set))
}

/// Independent brute-force witnesses for this module.
pub mod brute {
    use super::*;

    /// The squares of (R/P^k)^×.
    pub fn unit_squares(ring: &Ring) -> HashSet<u64> {
        ring.units().map(|x| ring.square(x)).collect()
    }

    /// Partition of (R/P^k)^× into classes modulo squares; returns one
    /// lexicographically least member per class.
    pub fn unit_classes(field: &FieldSpec, k: u32) -> Vec<u64> {
        let ring = Ring::new(field, k);
        let sq: Vec<u64> = unit_squares(&ring).into_iter().collect();
        let mut seen = HashSet::new();
        let mut mins = Vec::new();
        let mut units: Vec<u64> = ring.units().collect();
        units.sort_by_key(|&u| ring.order_key(u));
        for u in units {
            if seen.contains(&u) {
                continue;
            }
            for &s in &sq {
                seen.insert(ring.mul(u, s));
            }
            mins.push(u);
        }
        mins
    }

    /// Image of ρ by enumerating all pairs (a, d) ∈ (1+P)² mod P^{δ+1} with
    /// a ≡ d mod P^δ and ad ≡ 1 mod P^{δ+1}.
    pub fn rho_image_pairs(field: &FieldSpec, delta: u32) -> Vec<u32> {
        let ring = Ring::new(field, delta + 1);
        let mut out = HashSet::new();
        for a in ring.units().filter(|&a| ring.residue(a) == 1) {
            for x in 0..field.q() as u32 {
                let d = ring.add(a, ring.mul(ring.lift(x), ring.pi_pow(delta)));
                if ring.mul(a, d) == ring.one() {
                    out.insert(ring.digit(ring.sub(a, d), delta));
                }
            }
        }
        let mut v: Vec<u32> = out.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Same image using d = a⁻¹ directly.
    pub fn rho_image_direct(field: &FieldSpec, delta: u32) -> Vec<u32> {
        let ring = Ring::new(field, delta + 1);
        let mut out = HashSet::new();
        for a in ring.units().filter(|&a| ring.residue(a) == 1) {
            let d = ring.inv(a);
            let diff = ring.sub(a, d);
            if ring.in_ideal(diff, delta) {
                out.insert(ring.digit(diff, delta));
            }
        }
        let mut v: Vec<u32> = out.into_iter().collect();
        v.sort_unstable();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> FieldSpec {
        FieldSpec::q2(12)
    }

    #[test]
    fn q2_full_classes() {
        let s = square_class_reps(&q2(), Level::Full).unwrap();
        let mut ints: Vec<u64> = s.codes().to_vec();
        ints.sort();
        assert_eq!(ints, vec![1, 3, 5, 7]);
    }

    #[test]
    fn level_one_is_trivial() {
        for f in [q2(), FieldSpec::laurent(2, 6).unwrap(), FieldSpec::q2_sqrt2(6)] {
            let s = square_class_reps(&f, Level::Finite(1)).unwrap();
            assert_eq!(s.digit_strings(), vec!["1"]);
        }
    }

    #[test]
    fn f2t_level_four() {
        let f = FieldSpec::laurent(1, 8).unwrap();
        let s = square_class_reps(&f, Level::Finite(4)).unwrap();
        // 1, 1+t, 1+t^3, 1+t+t^3
        let mut got = s.digit_strings();
        got.sort();
        let mut want = vec!["1000", "1100", "1001", "1101"];
        want.sort();
        assert_eq!(got, want);
        // against the brute-force partition
        assert_eq!(brute::unit_classes(&f, 4).len(), 4);
    }

    #[test]
    fn full_is_error_in_char_two() {
        let f = FieldSpec::laurent(1, 8).unwrap();
        assert!(matches!(square_class_reps(&f, Level::Full), Err(Error::InfiniteSet(_))));
    }

    #[test]
    fn canonicalize_examples() {
        let f = q2();
        let c = |v: i64| {
            canonicalize(&f, &TruncatedScalar::from_int(&f, v), Level::Full)
                .unwrap()
                .digits_string()
        };
        assert_eq!(c(17), "100");
        assert_eq!(c(5), "101");
        assert_eq!(c(-1), "111");
        let g = FieldSpec::laurent(1, 8).unwrap();
        let u = TruncatedScalar::from_digits(&g, 0, &[1, 0, 1, 0, 0, 0, 0, 0]);
        assert_eq!(canonicalize(&g, &u, Level::Finite(4)).unwrap().digits_string(), "1000");
    }

    #[test]
    fn s_ell_k_examples() {
        let f = q2();
        let s = s_ell_k(&f, 4, 2).unwrap();
        assert_eq!(s.digit_strings(), vec!["10", "11"]);
        assert_eq!(s_ell_k(&f, 3, 2).unwrap().len(), 1);
        let g = FieldSpec::laurent(2, 8).unwrap();
        assert_eq!(s_ell_k(&g, 5, 2).unwrap().len(), 4);
        assert!(s_ell_k(&f, 3, 3).is_err());
    }

    #[test]
    fn squaring_bound_examples() {
        let f = q2();
        assert!(squaring_bound_check(&f, &TruncatedScalar::from_int(&f, 7), 4).unwrap());
        assert!(squaring_bound_check(&f, &TruncatedScalar::from_int(&f, 1), 6).unwrap());
        assert!(matches!(
            squaring_bound_check(&f, &TruncatedScalar::from_int(&f, 3), 4),
            Err(Error::Precondition(_))
        ));
        let g = FieldSpec::laurent(1, 8).unwrap();
        let a = TruncatedScalar::from_digits(&g, 0, &[1, 0, 1, 0, 0, 0, 0, 0]);
        assert!(squaring_bound_check(&g, &a, 4).unwrap());
    }

    #[test]
    fn rho_examples() {
        let f = q2();
        assert_eq!(rho_image(&f, 1).unwrap().1, vec![0]);
        assert_eq!(rho_image(&f, 2).unwrap(), (RhoCase::ArtinSchreier, vec![0]));
        assert_eq!(rho_image(&f, 3).unwrap().1, vec![0, 1]);
        assert_eq!(brute::rho_image_pairs(&f, 3), vec![0, 1]);
    }
}
