//! Nilpotent orbits in sl(2): labels, degenerate cosets X_{uϖ^s} + 𝔤'_{x₀,t},
//! equivalence modulo depth, the index sets T_{u,ℓ} and wavefront sets.
//!
//! X_v is v·E₂₁, so k·X_v·k⁻¹ = v·[[bd, -b²], [d², -bd]] for k = [[a,b],[c,d]].

use crate::error::{budget_check, Error, Result};
use crate::field::{FieldSpec, Ring, TruncatedScalar};
use crate::matgroups::{enumerate_group, Flavor, Mat2};
use crate::squares::{square_class_reps, Level};
use serde::Serialize;
use std::fmt;

/// A nilpotent G'-orbit: zero, or the class of v modulo squares written as
/// (canonical unit rep, val(v) mod 2). In characteristic 2 the unit class is
/// truncated at an explicit level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OrbitLabel {
    Zero,
    Nonzero {
        /// digits of the canonical unit, lowest first
        unit: String,
        parity: u8,
        /// "FULL" or the truncation level
        level: String,
    },
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitLabel::Zero => write!(f, "O_0"),
            OrbitLabel::Nonzero { unit, parity, level } => write!(f, "O({unit},{parity})@{level}"),
        }
    }
}

fn label_from_code(ring: &Ring, code: u64, parity: u8, level: Level) -> OrbitLabel {
    OrbitLabel::Nonzero {
        unit: ring.digit_string(code),
        parity,
        level: level.to_string(),
    }
}

/// The orbit of X_v.
pub fn orbit_label(field: &FieldSpec, v: &TruncatedScalar, level: Level) -> Result<OrbitLabel> {
    let Some(val) = v.valuation() else {
        return Ok(OrbitLabel::Zero);
    };
    let reps = square_class_reps(field, level)?;
    let ring = reps.ring();
    let u = v.unit_part()?.to_ring(ring)?;
    let c = reps.canonicalize_code(ring, u)?;
    Ok(label_from_code(ring, c, val.rem_euclid(2) as u8, level))
}

/// Number of orbits met by a degenerate coset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitCount {
    Finite(u64),
    Infinite,
}

impl fmt::Display for OrbitCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitCount::Finite(n) => write!(f, "{n}"),
            OrbitCount::Infinite => write!(f, "INFINITE"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meeting {
    pub count: OrbitCount,
    /// The orbits (characteristic 0) or the truncated classes that refine
    /// u's class (characteristic 2).
    pub orbits: Vec<OrbitLabel>,
}

/// Closed-form count: 1 if t-s > 2e, 2 if t-s = 2e, 2q^{e-k} if t-s ∈ {2k, 2k+1}.
pub fn orbits_meeting_count(field: &FieldSpec, depth_gap: u32) -> OrbitCount {
    match field.e().finite() {
        None => OrbitCount::Infinite,
        Some(e) => {
            let q = field.q();
            let r = depth_gap;
            OrbitCount::Finite(if r > 2 * e {
                1
            } else if r == 2 * e {
                2
            } else {
                2 * q.pow(e - r / 2)
            })
        }
    }
}

/// Orbits met by X_{uϖ^s} + 𝔤'_{x₀,t}: the 𝒪_{u'ϖ^s} with u' ≡ u in S_{t-s}.
/// `trunc` is the listing level in characteristic 2 (defaults to t-s there).
pub fn orbits_meeting(field: &FieldSpec, u: &TruncatedScalar, s: i64, t: i64, trunc: Option<u32>) -> Result<Meeting> {
    if t <= s {
        return Err(Error::Precondition(format!("need s < t, got s={s}, t={t}")));
    }
    let gap = (t - s) as u32;
    let parity = s.rem_euclid(2) as u8;
    let level = match field.e().finite() {
        Some(_) => Level::Full,
        None => Level::Finite(trunc.unwrap_or(gap).max(gap)),
    };
    let all = square_class_reps(field, level)?;
    let coarse = square_class_reps(field, Level::Finite(gap))?;
    let ring = all.ring();
    let cr = coarse.ring();
    let target = coarse.canonicalize_code(cr, u.to_ring(cr)?)?;
    let mut orbits = Vec::new();
    for &c in all.codes() {
        // representatives of the finer set live at a level ≥ the coarse one,
        // except FULL below the gap, where the classes coincide
        let hit = if ring.level() >= cr.level() {
            coarse.canonicalize_code(ring, c)? == target
        } else {
            all.canonicalize_code(ring, u.to_ring(ring)?)? == c
        };
        if hit {
            orbits.push(label_from_code(ring, c, parity, level));
        }
    }
    Ok(Meeting {
        count: orbits_meeting_count(field, gap),
        orbits,
    })
}

/// Formula answer: u' ≡ u in S_{t-s}.
pub fn kprime_orbit_equiv(field: &FieldSpec, u: &TruncatedScalar, u2: &TruncatedScalar, s: i64, t: i64) -> Result<bool> {
    if t <= s {
        return Err(Error::Precondition(format!("need s < t, got s={s}, t={t}")));
    }
    let reps = square_class_reps(field, Level::Finite((t - s) as u32))?;
    let r = reps.ring();
    Ok(reps.canonicalize_code(r, u.to_ring(r)?)? == reps.canonicalize_code(r, u2.to_ring(r)?)?)
}

/// k·X_v·k⁻¹ by matrix multiplication.
pub fn conjugate_nilpotent(ring: &Ring, k: &Mat2, v: u64) -> Mat2 {
    let x = Mat2 {
        a: 0,
        b: 0,
        c: v,
        d: 0,
    };
    k.mul(ring, &x).mul(ring, &k.inverse(ring))
}

/// v·[[bd, -b²], [d², -bd]].
pub fn conjugate_nilpotent_closed(ring: &Ring, k: &Mat2, v: u64) -> Mat2 {
    let bd = ring.mul(ring.mul(k.b, k.d), v);
    Mat2 {
        a: bd,
        b: ring.neg(ring.mul(ring.square(k.b), v)),
        c: ring.mul(ring.square(k.d), v),
        d: ring.neg(bd),
    }
}

/// Searches SL(2, R/P^{t-s}) for k with k·X_u·k⁻¹ ≡ X_{u'} mod P^{t-s}, which
/// after scaling by ϖ^s is the degenerate-coset condition.
pub fn kprime_equiv_witness(
    field: &FieldSpec,
    u: &TruncatedScalar,
    u2: &TruncatedScalar,
    s: i64,
    t: i64,
    budget: u64,
) -> Result<Option<Mat2>> {
    if t <= s {
        return Err(Error::Precondition(format!("need s < t, got s={s}, t={t}")));
    }
    let ring = Ring::new(field, (t - s) as u32);
    let (a, b) = (u.to_ring(&ring)?, u2.to_ring(&ring)?);
    let target = Mat2 { a: 0, b: 0, c: b, d: 0 };
    budget_check("SL(2) witness search", ring.size().pow(3) as u128, budget)?;
    Ok(enumerate_group(&ring, Flavor::Sl, budget)?
        .into_iter()
        .find(|k| conjugate_nilpotent(&ring, k, a) == target))
}

/// One element (u', ℓ') of T_{u,ℓ}; u' is a digit string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TEntry {
    pub unit: String,
    pub depth: u32,
}

/// {(u', ℓ') : ℓ' ≡ ℓ mod 2, ℓ ≤ ℓ' ≤ bound, u' ∈ S_{⌈ℓ'/2⌉}, u' ~ u in S_{⌈ℓ/2⌉}}.
pub fn t_set(field: &FieldSpec, u: &TruncatedScalar, ell: u32, bound: u32) -> Result<Vec<TEntry>> {
    if ell < 1 {
        return Err(Error::OutOfRange("ℓ ≥ 1".into()));
    }
    let m = ell.div_ceil(2);
    let coarse = square_class_reps(field, Level::Finite(m))?;
    let cr = coarse.ring();
    let target = coarse.canonicalize_code(cr, u.to_ring(cr)?)?;
    let mut out = Vec::new();
    for lp in (ell..=bound).step_by(2) {
        let fine = square_class_reps(field, Level::Finite(lp.div_ceil(2)))?;
        let fr = fine.ring();
        for &c in fine.codes() {
            if coarse.canonicalize_code(fr, c)? == target {
                out.push(TEntry {
                    unit: fr.digit_string(c),
                    depth: lp,
                });
            }
        }
    }
    Ok(out)
}

/// All nonzero orbits of parity i; characteristic 2 needs a truncation level.
pub fn wavefront(field: &FieldSpec, i: u8, trunc: Option<u32>) -> Result<Vec<OrbitLabel>> {
    if i > 1 {
        return Err(Error::OutOfRange(format!("vertex index must be 0 or 1, got {i}")));
    }
    let level = match (field.e().finite(), trunc) {
        (Some(_), None) => Level::Full,
        (_, Some(k)) => Level::Finite(k),
        (None, None) => {
            return Err(Error::InfiniteSet(
                "the wavefront set is infinite in characteristic 2; give a truncation level".into(),
            ))
        }
    };
    let reps = square_class_reps(field, level)?;
    Ok(reps
        .codes()
        .iter()
        .map(|&c| label_from_code(reps.ring(), c, i, level))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intertwining::sigma_end_dim;

    fn int(f: &FieldSpec, v: i64) -> TruncatedScalar {
        TruncatedScalar::from_int(f, v)
    }

    #[test]
    fn labels() {
        let f = FieldSpec::q2(12);
        let l = |v| orbit_label(&f, &int(&f, v), Level::Full).unwrap();
        assert_eq!(l(4), l(1));
        assert_eq!(l(4), OrbitLabel::Nonzero { unit: "100".into(), parity: 0, level: "FULL".into() });
        assert_ne!(l(5), l(1));
        assert_eq!(l(5), l(5 * 9));
        assert_eq!(l(2), OrbitLabel::Nonzero { unit: "100".into(), parity: 1, level: "FULL".into() });
        assert_eq!(orbit_label(&f, &int(&f, 0), Level::Full).unwrap(), OrbitLabel::Zero);
        let g = FieldSpec::laurent(1, 10).unwrap();
        assert!(matches!(orbit_label(&g, &int(&g, 1), Level::Full), Err(Error::InfiniteSet(_))));
    }

    #[test]
    fn meeting_counts_q2() {
        let f = FieldSpec::q2(12);
        let one = int(&f, 1);
        let counts: Vec<_> = (1..=3)
            .map(|gap| orbits_meeting(&f, &one, -6, -6 + gap, None).unwrap())
            .map(|m| (m.count, m.orbits.len() as u64))
            .collect();
        assert_eq!(counts[0], (OrbitCount::Finite(4), 4));
        assert_eq!(counts[1], (OrbitCount::Finite(2), 2));
        assert_eq!(counts[2], (OrbitCount::Finite(1), 1));
    }

    /// Distinct FULL classes among units u' ≡ u mod P^{gap}.
    fn meeting_brute(f: &FieldSpec, u: u64, gap: u32) -> usize {
        let reps = square_class_reps(f, Level::Full).unwrap();
        let n = reps.ring().level().max(gap);
        let ring = Ring::new(f, n);
        let small = Ring::new(f, gap);
        let u = ring.lift_from(&small, small.reduce_to(&small, u));
        let mut seen = std::collections::HashSet::new();
        for x in ring.units() {
            if ring.reduce_to(&small, x) == ring.reduce_to(&small, u) {
                seen.insert(reps.canonicalize_code(&ring, x).unwrap());
            }
        }
        seen.len()
    }

    #[test]
    fn meeting_counts_vs_brute() {
        for f in [FieldSpec::q2(12), FieldSpec::q2_sqrt2(14)] {
            for gap in 1..=5u32 {
                let small = Ring::new(&f, gap);
                for u in small.units() {
                    let us = TruncatedScalar::from_ring(&f, &small, u, 0);
                    let m = orbits_meeting(&f, &us, 0, gap as i64, None).unwrap();
                    let b = meeting_brute(&f, u, gap);
                    assert_eq!(m.orbits.len(), b);
                    assert_eq!(m.count, OrbitCount::Finite(b as u64), "{f:?} gap {gap}");
                }
            }
        }
    }

    #[test]
    fn char2_meeting_is_infinite() {
        let g = FieldSpec::laurent(1, 10).unwrap();
        let m = orbits_meeting(&g, &int(&g, 1), 0, 2, Some(4)).unwrap();
        assert_eq!(m.count, OrbitCount::Infinite);
        // S_4 refines S_2 by a factor q
        assert_eq!(m.orbits.len(), 2);
    }

    #[test]
    fn equivalence_examples_and_witness() {
        let f = FieldSpec::q2(12);
        let (one, five) = (int(&f, 1), int(&f, 5));
        assert!(kprime_orbit_equiv(&f, &one, &five, -4, -2).unwrap());
        assert!(!kprime_orbit_equiv(&f, &one, &five, -5, -2).unwrap());
        assert!(kprime_orbit_equiv(&f, &five, &five, -5, 3).unwrap());
        for (s, t) in [(-4, -2), (-5, -2), (0, 1), (0, 4)] {
            for (a, b) in [(1, 5), (1, 3), (3, 7), (5, 5)] {
                let formula = kprime_orbit_equiv(&f, &int(&f, a), &int(&f, b), s, t).unwrap();
                let w = kprime_equiv_witness(&f, &int(&f, a), &int(&f, b), s, t, 5_000_000).unwrap();
                assert_eq!(formula, w.is_some(), "{a} {b} {s} {t}");
            }
        }
    }

    #[test]
    fn t_set_examples() {
        let f = FieldSpec::q2(12);
        let one = int(&f, 1);
        let show = |v: Vec<TEntry>| v.into_iter().map(|e| (e.unit, e.depth)).collect::<Vec<_>>();
        // S₂ = {1, 3}: 5 ≡ 1 mod P², so the depth-4 slice is {1, 3}
        let t = show(t_set(&f, &one, 2, 6).unwrap());
        assert_eq!(t.len(), 1 + 2 + 4);
        assert_eq!(t[0], ("1".into(), 2));
        assert_eq!(&t[1..3], &[("10".into(), 4), ("11".into(), 4)]);
        let t = show(t_set(&f, &one, 5, 7).unwrap());
        assert_eq!(t, vec![("100".into(), 5), ("100".into(), 7)]);
        assert_eq!(t_set(&f, &one, 3, 3).unwrap().len(), 1);
    }

    #[test]
    fn t_set_slices_sum_to_end_dim() {
        for f in [FieldSpec::q2(14), FieldSpec::q2_sqrt2(14), FieldSpec::laurent(1, 12).unwrap()] {
            for ell in 1..=5u32 {
                let m = ell.div_ceil(2);
                let reps = square_class_reps(&f, Level::Finite(m)).unwrap();
                let mut per_depth = std::collections::BTreeMap::new();
                for u in reps.reps() {
                    let t = t_set(&f, &u, ell, 9).unwrap();
                    let distinct: std::collections::HashSet<_> = t.iter().collect();
                    assert_eq!(distinct.len(), t.len());
                    for e in t {
                        *per_depth.entry(e.depth).or_insert(0u64) += 1;
                    }
                }
                for (d, n) in per_depth {
                    assert_eq!(n, sigma_end_dim(&f, d).unwrap(), "{f:?} ℓ={ell} ℓ'={d}");
                }
            }
        }
    }

    #[test]
    fn wavefront_sets() {
        let f = FieldSpec::q2(12);
        let w0 = wavefront(&f, 0, None).unwrap();
        assert_eq!(w0.len(), 4);
        assert_eq!(wavefront(&f, 1, None).unwrap().len(), 4);
        assert!(w0.iter().all(|l| matches!(l, OrbitLabel::Nonzero { parity: 0, .. })));
        assert_eq!(wavefront(&FieldSpec::q2_sqrt2(12), 0, None).unwrap().len(), 8);
        let g = FieldSpec::laurent(1, 10).unwrap();
        assert_eq!(wavefront(&g, 0, Some(4)).unwrap().len(), 4);
        assert!(wavefront(&g, 0, None).is_err());
    }
}
