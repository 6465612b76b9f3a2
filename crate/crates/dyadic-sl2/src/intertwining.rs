//! Intertwining dimensions: per-double-coset Hom dimensions for the Mackey
//! components, their sum, and irreducibility/distinctness of the induced
//! representations built from the characters η̂.

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::finchar::{chi_ell_via_psi, CharSum, Gl2Row, Gl2Table, InnerProduct};
use crate::field::{FieldSpec, PsiEvaluator, RootOfUnity, Ring};
use crate::matgroups::{
    double_cosets, double_cosets_bell, enumerate_group, enumerate_sl_upper_ideal, generators, m_pair, CosetLabel,
    DoubleCosetRep, Flavor, Mat2, Subgroup,
};
use crate::squares::{square_class_reps, Level};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A character ζ of R^× of depth zero: trivial, or x ↦ ζ_{q-1}^{k·log(x mod P)}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Zeta {
    #[default]
    Trivial,
    DepthZero(u64),
}

impl Zeta {
    pub fn eval(self, ring: &Ring, x: u64) -> RootOfUnity {
        match self {
            Zeta::Trivial => RootOfUnity::ONE,
            Zeta::DepthZero(k) => {
                let res = ring.field().residue();
                let n = ring.q() - 1;
                RootOfUnity::new(n, k * res.log(ring.residue(x)).unwrap() as u64)
            }
        }
    }
}

/// The character g ↦ ζ(g₁₁)·ψ(u·ϖ^{-ℓ}·g₁₁⁻¹g₁₂) of Z₀U₀K_{m,m'} (or its
/// intersection with SL(2)), on R/P^{ℓ+1}.
pub struct EtaHat {
    pub ell: u32,
    pub zeta: Zeta,
    psi: PsiEvaluator,
}

impl EtaHat {
    /// `u` is a unit code of R/P^{ℓ+1}; `twist` rescales ψ by another unit.
    pub fn new(field: &FieldSpec, ell: u32, u: u64, zeta: Zeta, twist: Option<u64>) -> Result<Self> {
        field.require_precision(ell + 2)?;
        let ring = Ring::new(field, ell + 1);
        if !ring.is_unit(u) {
            return Err(Error::NotAUnit(ring.digit_string(u)));
        }
        let t = twist.map_or(u, |t| ring.mul(t, u));
        Ok(EtaHat {
            ell,
            zeta,
            psi: PsiEvaluator::twisted(field, ell, Some(t)),
        })
    }
    pub fn ring(&self) -> &Ring {
        self.psi.ring()
    }
    pub fn m(&self) -> u32 {
        m_pair(self.ell).0
    }
    pub fn m_prime(&self) -> u32 {
        m_pair(self.ell).1
    }
    pub fn eval(&self, g: &Mat2) -> RootOfUnity {
        let r = self.ring();
        let x = r.mul(r.inv(g.a), g.b);
        self.zeta.eval(r, g.a).mul(self.psi.eval(x))
    }
}

/// Closed-form Hom dimension on the double coset of γ.
pub fn intertwine_dim_formula(field: &FieldSpec, ell: u32, label: &CosetLabel) -> i64 {
    let q = field.q() as i64;
    match label {
        CosetLabel::Identity => 1,
        CosetLabel::Weyl => 0,
        CosetLabel::Shift { k, .. } => {
            let i = ell - k;
            if 2 * k <= ell {
                return 0;
            }
            match field.two_e() {
                None => {
                    if i % 2 == 1 {
                        q - 1
                    } else {
                        0
                    }
                }
                Some(te) if i < te && i % 2 == 1 => q - 1,
                Some(te) if i == te => 1,
                _ => 0,
            }
        }
    }
}

/// One row of the intertwining table.
#[derive(Clone, Debug, Serialize)]
pub struct CosetDim {
    pub coset: String,
    pub formula: i64,
    pub brute: Option<i64>,
    pub brute_twisted: Option<i64>,
    pub intersection_order: Option<usize>,
}

impl CosetDim {
    pub fn passed(&self) -> bool {
        self.brute.is_none_or(|b| b == self.formula) && self.brute_twisted.is_none_or(|b| b == self.formula)
    }
}

/// B'_ℓ in SL(2,R/P^{ℓ+1}), enumerated directly.
pub fn enumerate_bprime(field: &FieldSpec, ell: u32, budget: u64) -> Result<(Ring, Vec<Mat2>)> {
    field.require_precision(ell + 2)?;
    let ring = Ring::new(field, ell + 1);
    let v = enumerate_sl_upper_ideal(&ring, ell, budget, |_| true)?;
    Ok((ring, v))
}

/// dim Hom over ᵞB'_ℓ ∩ B'_ℓ between χ_ℓ and its γ-translate, by direct
/// character sum. `twist` replaces ψ by x ↦ ψ(cx).
pub fn intertwine_dim_brute(
    ring: &Ring,
    bprime: &[Mat2],
    ell: u32,
    gamma: &Mat2,
    twist: Option<u64>,
) -> Result<InnerProduct> {
    let field = ring.field();
    let psi = PsiEvaluator::twisted(field, ell, twist);
    let gi = gamma.inverse(ring);
    let sub = Subgroup::LowerMod(ell);
    let h: Vec<(Mat2, Mat2)> = bprime
        .iter()
        .filter_map(|x| {
            let y = gi.mul(ring, x).mul(ring, gamma);
            sub.contains(ring, &y).then_some((*x, y))
        })
        .collect();
    let sum = h
        .par_iter()
        .fold(CharSum::default, |mut acc, (x, y)| {
            let v = chi_ell_via_psi(&psi, x).mul(&chi_ell_via_psi(&psi, y).conj());
            acc.add(&v);
            acc
        })
        .reduce(CharSum::default, CharSum::merge);
    sum.finish(h.len())
}

/// Per-coset dimensions over 𝒮_ℓ, with brute force when `verify` is set.
pub fn intertwine_table(field: &FieldSpec, ell: u32, verify: bool, budget: u64) -> Result<Vec<CosetDim>> {
    let reps = double_cosets_bell(field, ell)?;
    let data = if verify {
        Some(enumerate_bprime(field, ell, budget)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for rep in &reps {
        let formula = intertwine_dim_formula(field, ell, &rep.label);
        let (brute, brute_twisted, order) = match &data {
            Some((ring, b)) => {
                let plain = intertwine_dim_brute(ring, b, ell, &rep.matrix, None)?;
                let tw = intertwine_dim_brute(ring, b, ell, &rep.matrix, Some(twist_unit(ring)))?;
                (Some(plain.exact), Some(tw.exact), Some(plain.order))
            }
            None => (None, None, None),
        };
        out.push(CosetDim {
            coset: rep.label.to_string(),
            formula,
            brute,
            brute_twisted,
            intersection_order: order,
        });
    }
    Ok(out)
}

/// The unit used for the twisted ψ: 1+ϖ, or a nontrivial residue when q > 2.
pub fn twist_unit(ring: &Ring) -> u64 {
    if ring.q() > 2 {
        ring.lift(2)
    } else {
        ring.add(ring.one(), ring.uniformizer())
    }
}

/// Single-coset entry point.
pub fn intertwine_dim_coset(field: &FieldSpec, ell: u32, rep: &DoubleCosetRep, verify: bool, budget: u64) -> Result<CosetDim> {
    let formula = intertwine_dim_formula(field, ell, &rep.label);
    let mut row = CosetDim {
        coset: rep.label.to_string(),
        formula,
        brute: None,
        brute_twisted: None,
        intersection_order: None,
    };
    if verify {
        let (ring, b) = enumerate_bprime(field, ell, budget)?;
        let plain = intertwine_dim_brute(&ring, &b, ell, &rep.matrix, None)?;
        let tw = intertwine_dim_brute(&ring, &b, ell, &rep.matrix, Some(twist_unit(&ring)))?;
        row.brute = Some(plain.exact);
        row.brute_twisted = Some(tw.exact);
        row.intersection_order = Some(plain.order);
    }
    Ok(row)
}

/// dim End(σ(ℓ)) in closed form: q^{⌊(ℓ+1)/4⌋} for ℓ ≤ 4e, 2q^e beyond.
pub fn sigma_end_dim(field: &FieldSpec, ell: u32) -> Result<u64> {
    if ell < 1 {
        return Err(Error::OutOfRange("ℓ ≥ 1".into()));
    }
    let q = field.q();
    Ok(match field.e().finite() {
        Some(e) if ell > 4 * e => 2 * q.pow(e),
        _ => q.pow((ell + 1) / 4),
    })
}

/// Σ(ℓ) three ways: closed form, sum of per-coset formulas, sum of brute
/// force values (when verifying).
#[derive(Clone, Debug, Serialize)]
pub struct EndDimReport {
    pub ell: u32,
    pub closed_form: u64,
    pub coset_formula_sum: i64,
    pub brute_sum: Option<i64>,
    pub rows: Vec<CosetDim>,
}

impl EndDimReport {
    pub fn passed(&self) -> bool {
        self.coset_formula_sum == self.closed_form as i64
            && self.brute_sum.is_none_or(|b| b == self.closed_form as i64)
            && self.rows.iter().all(CosetDim::passed)
    }
}

pub fn sigma_end_dim_report(field: &FieldSpec, ell: u32, verify: bool, budget: u64) -> Result<EndDimReport> {
    let rows = intertwine_table(field, ell, verify, budget)?;
    Ok(EndDimReport {
        ell,
        closed_form: sigma_end_dim(field, ell)?,
        coset_formula_sum: rows.iter().map(|r| r.formula).sum(),
        brute_sum: if verify {
            Some(rows.iter().map(|r| r.brute.unwrap()).sum())
        } else {
            None
        },
        rows,
    })
}

/// 1 iff u and u' have the same class in S_m, m = ⌈ℓ/2⌉.
pub fn i_intertwine_formula(field: &FieldSpec, ell: u32, u: u64, u_prime: u64, ring: &Ring) -> Result<i64> {
    let m = m_pair(ell).0;
    let s = square_class_reps(field, Level::Finite(m))?;
    let a = s.canonicalize_code(ring, u)?;
    let b = s.canonicalize_code(ring, u_prime)?;
    Ok((a == b) as i64)
}

/// The finite data for brute-force intertwining of the I(ζ,u,ℓ): the group
/// Γ'(ℓ) in SL(2,R/P^{ℓ+1}) and representatives of Γ'\K'/Γ'.
pub struct GammaPrimeData {
    pub ell: u32,
    pub ring: Ring,
    pub gamma: Vec<Mat2>,
    pub double_coset_reps: Vec<Mat2>,
}

impl GammaPrimeData {
    pub fn new(field: &FieldSpec, ell: u32, budget: u64) -> Result<Self> {
        field.require_precision(ell + 2)?;
        let ring = Ring::new(field, ell + 1);
        let sub = Subgroup::Gamma(ell);
        let (_, mp) = m_pair(ell);
        let gamma = enumerate_sl_upper_ideal(&ring, mp, budget, |g| sub.contains(&ring, g))?;
        let all = enumerate_group(&ring, Flavor::Sl, budget)?;
        let gens = generators(&ring, Flavor::Sl, &sub, budget)?;
        let classes = double_cosets(&ring, &all, &gens, &gens);
        let double_coset_reps = classes.iter().map(|c| c[0]).collect();
        Ok(GammaPrimeData {
            ell,
            ring,
            gamma,
            double_coset_reps,
        })
    }

    /// dim Hom_{K'}(I(ζ,u,ℓ), I(ζ,u',ℓ)) by Mackey: Σ over Γ'\K'/Γ' of the
    /// inner products on Γ' ∩ gΓ'g⁻¹. Also returns the number of double
    /// cosets with a nonzero contribution.
    pub fn intertwining(&self, u: u64, u_prime: u64, zeta: Zeta, twist: Option<u64>) -> Result<(i64, usize)> {
        let field = self.ring.field();
        let e1 = EtaHat::new(field, self.ell, u, zeta, twist)?;
        let e2 = EtaHat::new(field, self.ell, u_prime, zeta, twist)?;
        let sub = Subgroup::Gamma(self.ell);
        let r = &self.ring;
        let parts: Vec<Result<i64>> = self
            .double_coset_reps
            .par_iter()
            .map(|g| {
                let gi = g.inverse(r);
                let mut acc = CharSum::default();
                let mut n = 0;
                for x in &self.gamma {
                    let y = gi.mul(r, x).mul(r, g);
                    if sub.contains(r, &y) {
                        n += 1;
                        acc.add_root(1, e1.eval(x).mul(e2.eval(&y).conj()));
                    }
                }
                Ok(acc.finish(n)?.exact)
            })
            .collect();
        let mut total = 0;
        let mut support = 0;
        for p in parts {
            let v = p?;
            total += v;
            if v != 0 {
                support += 1;
            }
        }
        Ok((total, support))
    }
}

/// Outcome of the I(ζ,u,ℓ) intertwining comparison.
#[derive(Clone, Debug, Serialize)]
pub struct IntertwineReport {
    pub ell: u32,
    pub u: String,
    pub u_prime: String,
    pub formula: i64,
    pub brute: Option<i64>,
    pub supporting_cosets: Option<usize>,
    pub double_cosets: Option<usize>,
}

impl IntertwineReport {
    pub fn passed(&self) -> bool {
        self.brute.is_none_or(|b| b == self.formula)
    }
}

/// I_intertwine for units given as codes of `ring` (level ≥ ⌈ℓ/2⌉).
pub fn i_intertwine(
    field: &FieldSpec,
    ell: u32,
    u: u64,
    u_prime: u64,
    ring: &Ring,
    zeta: Zeta,
    verify: bool,
    budget: u64,
) -> Result<IntertwineReport> {
    if ell < 1 {
        return Err(Error::OutOfRange("ℓ ≥ 1".into()));
    }
    let formula = i_intertwine_formula(field, ell, u, u_prime, ring)?;
    let mut rep = IntertwineReport {
        ell,
        u: ring.digit_string(u),
        u_prime: ring.digit_string(u_prime),
        formula,
        brute: None,
        supporting_cosets: None,
        double_cosets: None,
    };
    if verify {
        let data = GammaPrimeData::new(field, ell, budget)?;
        let top = &data.ring;
        let lift = |x: u64| top.lift_from(ring, ring.reduce_to(&Ring::new(field, ring.level().min(ell + 1)), x));
        let (v, s) = data.intertwining(lift(u), lift(u_prime), zeta, None)?;
        rep.brute = Some(v);
        rep.supporting_cosets = Some(s);
        rep.double_cosets = Some(data.double_coset_reps.len());
    }
    Ok(rep)
}

/// Full matrix of I_intertwine values over the square-class representatives
/// of S (FULL in characteristic 0, level ⌈ℓ/2⌉+1 in characteristic 2).
#[derive(Clone, Debug, Serialize)]
pub struct IntertwineMatrix {
    pub ell: u32,
    pub units: Vec<String>,
    pub formula: Vec<Vec<i64>>,
    pub brute: Vec<Vec<i64>>,
    pub double_cosets: usize,
}

impl IntertwineMatrix {
    pub fn passed(&self) -> bool {
        self.formula == self.brute
    }
}

pub fn i_intertwine_matrix(field: &FieldSpec, ell: u32, zeta: Zeta, budget: u64) -> Result<IntertwineMatrix> {
    let data = GammaPrimeData::new(field, ell, budget)?;
    let level = match field.two_e() {
        Some(_) => Level::Full,
        None => Level::Finite(m_pair(ell).0 + 1),
    };
    let s = square_class_reps(field, level)?;
    let top = &data.ring;
    let units: Vec<u64> = s
        .codes()
        .iter()
        .map(|&c| {
            if s.ring().level() <= top.level() {
                top.lift_from(s.ring(), c)
            } else {
                s.ring().reduce_to(top, c)
            }
        })
        .collect();
    let mut formula = Vec::new();
    let mut brute = Vec::new();
    for &u in &units {
        let mut fr = Vec::new();
        let mut br = Vec::new();
        for &v in &units {
            fr.push(i_intertwine_formula(field, ell, u, v, top)?);
            br.push(data.intertwining(u, v, zeta, None)?.0);
        }
        formula.push(fr);
        brute.push(br);
    }
    Ok(IntertwineMatrix {
        ell,
        units: s.digit_strings(),
        formula,
        brute,
        double_cosets: data.double_coset_reps.len(),
    })
}

/// dim Hom over Γ(ℓ) ∩ B_ℓ in GL(2,R/P^{ℓ+1}) between η̂_{ω,ℓ} and the
/// g_ℓ-conjugate of the cuspidal representation with parameter `omega`
/// (an exponent of a regular character of 𝔽_{q²}^×).
pub fn j_is_mackey(field: &FieldSpec, ell: u32, omega: u64, budget: u64) -> Result<InnerProduct> {
    if ell < 1 {
        return Err(Error::OutOfRange("ℓ ≥ 1".into()));
    }
    field.require_precision(ell + 2)?;
    let table = Gl2Table::new(field.f())?;
    let ring = Ring::new(field, ell + 1);
    let (m, _) = m_pair(ell);
    let psi = PsiEvaluator::new(field, ell);
    let units: Vec<u64> = ring.units().collect();
    let pm: Vec<u64> = ring.ideal(m).collect();
    let pl: Vec<u64> = ring.ideal(ell).collect();
    let card = units.len() as u128 * pm.len() as u128 * pl.len() as u128 * ring.size() as u128;
    crate::error::budget_check("Γ(ℓ) ∩ B_ℓ", card, budget)?;
    let central = |a: u64| table.omega_on_base(omega, ring.residue(a));
    let mut acc = CharSum::default();
    let mut n = 0usize;
    for &a in &units {
        for &dm in &pm {
            let d = ring.add(a, dm);
            for &b in &pl {
                for c in 0..ring.size() {
                    let g = Mat2::new(a, b, c, d);
                    n += 1;
                    let eta = central(a).mul(psi.eval(ring.mul(ring.inv(a), b)));
                    // g_ℓ⁻¹ g g_ℓ mod P
                    let class = table.classify(ring.residue(a), ring.digit(g.b, ell), 0, ring.residue(d))?;
                    let sigma: Cyclotomic = table.value(Gl2Row::Cuspidal(omega), class)?;
                    for (r, k) in sigma.conj().terms() {
                        acc.add_root(k, eta.mul(r));
                    }
                }
            }
        }
    }
    acc.finish(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finchar::regular_orbits;

    const BUDGET: u64 = 5_000_000;

    #[test]
    fn formula_examples() {
        let f = FieldSpec::q2(12);
        let shift = |k| CosetLabel::Shift { k, alpha: "1".into() };
        assert_eq!(intertwine_dim_formula(&f, 3, &shift(2)), 1);
        assert_eq!(intertwine_dim_formula(&f, 5, &shift(3)), 1);
        assert_eq!(intertwine_dim_formula(&f, 5, &CosetLabel::Weyl), 0);
        assert_eq!(intertwine_dim_formula(&f, 5, &CosetLabel::Identity), 1);
    }

    #[test]
    fn end_dims() {
        let f = FieldSpec::q2(12);
        let v: Vec<u64> = (1..=5).map(|l| sigma_end_dim(&f, l).unwrap()).collect();
        assert_eq!(v, vec![1, 1, 2, 2, 4]);
        let g = FieldSpec::laurent(1, 12).unwrap();
        let v: Vec<u64> = (1..=8).map(|l| sigma_end_dim(&g, l).unwrap()).collect();
        assert_eq!(v, vec![1, 1, 2, 2, 2, 2, 4, 4]);
    }

    #[test]
    fn brute_table_small() {
        let f = FieldSpec::q2(12);
        for ell in 1..=3 {
            let rep = sigma_end_dim_report(&f, ell, true, BUDGET).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
        let g = FieldSpec::laurent(2, 8).unwrap();
        let rep = sigma_end_dim_report(&g, 2, true, BUDGET).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn i_intertwine_small() {
        let f = FieldSpec::q2(12);
        for ell in 1..=3 {
            let m = i_intertwine_matrix(&f, ell, Zeta::Trivial, BUDGET).unwrap();
            assert!(m.passed(), "{m:?}");
        }
    }

    #[test]
    fn gamma_prime_classes_are_double_cosets() {
        // |Γ'gΓ'| = |Γ'|² / |Γ' ∩ gΓ'g⁻¹| for each class found
        let f = FieldSpec::q2(12);
        for ell in [2, 3, 4] {
            let d = GammaPrimeData::new(&f, ell, BUDGET).unwrap();
            let r = &d.ring;
            let all = enumerate_group(r, Flavor::Sl, BUDGET).unwrap();
            let gens = generators(r, Flavor::Sl, &Subgroup::Gamma(ell), BUDGET).unwrap();
            let classes = double_cosets(r, &all, &gens, &gens);
            let sub = Subgroup::Gamma(ell);
            let n = d.gamma.len();
            for c in &classes {
                let g = c[0];
                let gi = g.inverse(r);
                let inter = d.gamma.iter().filter(|x| sub.contains(r, &gi.mul(r, x).mul(r, &g))).count();
                assert_eq!(c.len() * inter, n * n);
            }
        }
    }

    #[test]
    fn j_mackey_small() {
        let f = FieldSpec::q2(12);
        let om = regular_orbits(2)[0].0;
        for ell in 1..=3 {
            assert_eq!(j_is_mackey(&f, ell, om, BUDGET).unwrap().exact, 1);
        }
        let g = FieldSpec::laurent(2, 8).unwrap();
        for (om, _) in regular_orbits(4) {
            assert_eq!(j_is_mackey(&g, 1, om, BUDGET).unwrap().exact, 1);
        }
    }
}
