//! Characters of the finite layer: 𝔽_q^× and 𝔽_{q²}^× characters, the
//! GL(2,𝔽_q) character table, the twisted characters χ_ℓ on B'_ℓ and exact
//! inner products of class functions.

use crate::cyclotomic::{Cyclotomic, FloatSum};
use crate::error::{Error, Result};
use crate::field::{BinaryField, FieldSpec, PsiEvaluator, RootOfUnity, Ring};
use crate::matgroups::{Mat2, Subgroup};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// GL(2,𝔽_q) for q = 2^f together with an embedding 𝔽_q ⊂ 𝔽_{q²}.
#[derive(Clone, Debug)]
pub struct Gl2Table {
    fq: BinaryField,
    fq2: BinaryField,
    embed: Vec<u32>,
}

/// Conjugacy classes, in the four shapes of the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Gl2Class {
    /// a·I.
    Central(u32),
    /// diag(a, b), a ≠ b, stored with a < b.
    Split(u32, u32),
    /// Eigenvalues {x, x^q} with x ∈ 𝔽_{q²} ∖ 𝔽_q (x the smaller code).
    Elliptic(u32),
    /// [[a, 1], [0, a]].
    Unipotent(u32),
}

/// Irreducible characters, in the four families of the table. Characters of
/// 𝔽_q^× are exponents k (γ ↦ ζ_{q-1}^{k·log γ}), characters of 𝔽_{q²}^× are
/// exponents j modulo q²-1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Gl2Row {
    /// R({α, β}), α ≠ β.
    Principal(u64, u64),
    /// γ∘det.
    Det(u64),
    /// γ∘det ⊗ St.
    Steinberg(u64),
    /// -R_T^G(ω), ω ≠ ω^q.
    Cuspidal(u64),
}

impl Gl2Table {
    pub fn new(f: u32) -> Result<Self> {
        let fq = BinaryField::with_default_modulus(f)?;
        let fq2 = BinaryField::with_default_modulus(2 * f)?;
        // a root of the modulus of 𝔽_q inside 𝔽_{q²}
        let modulus = fq.modulus();
        let eval = |r: u32| {
            let mut acc = 0u32;
            for i in (0..=f).rev() {
                acc = fq2.mul(acc, r);
                if modulus >> i & 1 == 1 {
                    acc ^= 1;
                }
            }
            acc
        };
        let root = (0..fq2.size())
            .find(|&r| eval(r) == 0)
            .ok_or_else(|| Error::InvalidField("no embedding of the residue field".into()))?;
        let embed = (0..fq.size())
            .map(|a| {
                let mut acc = 0;
                let mut p = 1;
                for i in 0..f {
                    if a >> i & 1 == 1 {
                        acc ^= p;
                    }
                    p = fq2.mul(p, root);
                }
                acc
            })
            .collect();
        Ok(Gl2Table { fq, fq2, embed })
    }

    pub fn q(&self) -> u64 {
        self.fq.size() as u64
    }
    pub fn residue_field(&self) -> &BinaryField {
        &self.fq
    }
    pub fn quadratic_field(&self) -> &BinaryField {
        &self.fq2
    }
    pub fn embed(&self, a: u32) -> u32 {
        self.embed[a as usize]
    }

    /// All conjugacy classes with their sizes.
    pub fn classes(&self) -> Vec<(Gl2Class, u64)> {
        let q = self.q();
        let qs = self.fq.size();
        let mut out = Vec::new();
        for a in 1..qs {
            out.push((Gl2Class::Central(a), 1));
        }
        for a in 1..qs {
            for b in a + 1..qs {
                out.push((Gl2Class::Split(a, b), q * q + q));
            }
        }
        for x in 1..self.fq2.size() {
            let xq = self.fq2.pow(x, q);
            if xq != x && x < xq {
                out.push((Gl2Class::Elliptic(x), q * (q - 1)));
            }
        }
        for a in 1..qs {
            out.push((Gl2Class::Unipotent(a), q * q - 1));
        }
        out
    }

    /// All irreducible characters.
    pub fn rows(&self) -> Vec<Gl2Row> {
        let q = self.q();
        let mut out = Vec::new();
        for a in 0..q - 1 {
            for b in a + 1..q - 1 {
                out.push(Gl2Row::Principal(a, b));
            }
        }
        for g in 0..q - 1 {
            out.push(Gl2Row::Det(g));
        }
        for g in 0..q - 1 {
            out.push(Gl2Row::Steinberg(g));
        }
        out.extend(regular_orbits(q).into_iter().map(|(j, _)| Gl2Row::Cuspidal(j)));
        out
    }

    fn chi_q(&self, k: u64, a: u32) -> RootOfUnity {
        let n = self.q() - 1;
        RootOfUnity::new(n, k * self.fq.log(a).unwrap() as u64)
    }

    fn chi_q2(&self, j: u64, x: u32) -> RootOfUnity {
        let n = self.q() * self.q() - 1;
        RootOfUnity::new(n, j * self.fq2.log(x).unwrap() as u64)
    }

    /// ω restricted to 𝔽_q^× through the embedding.
    pub fn omega_on_base(&self, j: u64, a: u32) -> RootOfUnity {
        self.chi_q2(j, self.embed(a))
    }

    /// x·x^q ∈ 𝔽_q, pulled back through the embedding.
    fn norm(&self, x: u32) -> u32 {
        let n = self.fq2.mul(x, self.fq2.pow(x, self.q()));
        self.embed.iter().position(|&e| e == n).unwrap() as u32
    }

    /// The value of an irreducible character on a class.
    pub fn value(&self, row: Gl2Row, class: Gl2Class) -> Result<Cyclotomic> {
        let q = self.q() as i64;
        let fq = &self.fq;
        let one = |r: RootOfUnity| Cyclotomic::root(r);
        let v = match row {
            Gl2Row::Principal(al, be) => {
                if al == be {
                    return Err(Error::Precondition("principal series needs α ≠ β".into()));
                }
                match class {
                    Gl2Class::Central(a) => one(self.chi_q(al, a).mul(self.chi_q(be, a))).scale(q + 1),
                    Gl2Class::Split(a, b) => one(self.chi_q(al, a).mul(self.chi_q(be, b)))
                        .add(&one(self.chi_q(al, b).mul(self.chi_q(be, a)))),
                    Gl2Class::Elliptic(_) => Cyclotomic::zero(),
                    Gl2Class::Unipotent(a) => one(self.chi_q(al, a).mul(self.chi_q(be, a))),
                }
            }
            Gl2Row::Det(g) => match class {
                Gl2Class::Central(a) | Gl2Class::Unipotent(a) => one(self.chi_q(g, fq.mul(a, a))),
                Gl2Class::Split(a, b) => one(self.chi_q(g, fq.mul(a, b))),
                Gl2Class::Elliptic(x) => one(self.chi_q(g, self.norm(x))),
            },
            Gl2Row::Steinberg(g) => match class {
                Gl2Class::Central(a) => one(self.chi_q(g, fq.mul(a, a))).scale(q),
                Gl2Class::Split(a, b) => one(self.chi_q(g, fq.mul(a, b))),
                Gl2Class::Elliptic(x) => one(self.chi_q(g, self.norm(x))).neg(),
                Gl2Class::Unipotent(_) => Cyclotomic::zero(),
            },
            Gl2Row::Cuspidal(j) => {
                if !is_regular(self.q(), j) {
                    return Err(Error::Precondition(format!("ω = ·^{j} is not regular (ω = ω^q)")));
                }
                match class {
                    Gl2Class::Central(a) => one(self.omega_on_base(j, a)).scale(q - 1),
                    Gl2Class::Split(..) => Cyclotomic::zero(),
                    Gl2Class::Elliptic(x) => one(self.chi_q2(j, x))
                        .add(&one(self.chi_q2(j, self.fq2.pow(x, self.q()))))
                        .neg(),
                    Gl2Class::Unipotent(a) => one(self.omega_on_base(j, a)).neg(),
                }
            }
        };
        Ok(v)
    }

    /// Degree of a row.
    /// Number of failures among: row orthogonality over the class sizes, the
    /// group order, and value at the identity = degree. Zero for a correct table.
    pub fn orthogonality_defects(&self) -> Result<usize> {
        let q = self.q() as i64;
        let classes = self.classes();
        let order: i64 = classes.iter().map(|c| c.1 as i64).sum();
        let mut bad = usize::from(order != (q * q - 1) * (q * q - q));
        let rows = self.rows();
        bad += usize::from(rows.len() != classes.len());
        for &r1 in &rows {
            for &r2 in &rows {
                let mut s = Cyclotomic::zero();
                for &(c, size) in &classes {
                    let v = self.value(r1, c)?.mul(&self.value(r2, c)?.conj());
                    s = s.add(&v.scale(size as i64));
                }
                let want = if r1 == r2 { order } else { 0 };
                bad += usize::from(s.to_integer() != Some(want));
            }
            bad += usize::from(self.value(r1, Gl2Class::Central(1))?.to_integer() != Some(self.degree(r1)));
        }
        Ok(bad)
    }

    pub fn degree(&self, row: Gl2Row) -> i64 {
        let q = self.q() as i64;
        match row {
            Gl2Row::Principal(..) => q + 1,
            Gl2Row::Det(_) => 1,
            Gl2Row::Steinberg(_) => q,
            Gl2Row::Cuspidal(_) => q - 1,
        }
    }

    /// Conjugacy class of an invertible matrix over 𝔽_q given by residue codes.
    pub fn classify(&self, a: u32, b: u32, c: u32, d: u32) -> Result<Gl2Class> {
        let fq = &self.fq;
        let tr = a ^ d;
        let det = fq.mul(a, d) ^ fq.mul(b, c);
        if det == 0 {
            return Err(Error::NotAUnit("singular matrix".into()));
        }
        // roots of t² + tr·t + det in 𝔽_q
        let roots: Vec<u32> = (1..fq.size())
            .filter(|&t| fq.mul(t, t) ^ fq.mul(tr, t) ^ det == 0)
            .collect();
        Ok(match roots.len() {
            2 => Gl2Class::Split(roots[0], roots[1]),
            1 => {
                if b == 0 && c == 0 {
                    Gl2Class::Central(a)
                } else {
                    Gl2Class::Unipotent(roots[0])
                }
            }
            _ => {
                let f2 = &self.fq2;
                let (tr2, det2) = (self.embed(tr), self.embed(det));
                let x = (1..f2.size())
                    .find(|&t| f2.mul(t, t) ^ f2.mul(tr2, t) ^ det2 == 0)
                    .unwrap();
                let xq = f2.pow(x, self.q());
                Gl2Class::Elliptic(x.min(xq))
            }
        })
    }
}

fn is_regular(q: u64, j: u64) -> bool {
    let n = q * q - 1;
    (j * q) % n != j % n
}

/// Frobenius orbits {ω, ω^q} of regular characters of 𝔽_{q²}^×, each as
/// (smaller exponent, larger exponent).
pub fn regular_orbits(q: u64) -> Vec<(u64, u64)> {
    let n = q * q - 1;
    (0..n)
        .filter(|&j| is_regular(q, j) && j < (j * q) % n)
        .map(|j| (j, (j * q) % n))
        .collect()
}

/// The cuspidal representations of GL(2,𝔽_q): their number and degree.
#[derive(Clone, Debug, Serialize)]
pub struct CuspidalCount {
    pub q: u64,
    pub count: u64,
    pub degree: u64,
    pub orbits: Vec<(u64, u64)>,
}

pub fn count_cuspidals(q: u64) -> Result<CuspidalCount> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::OutOfRange(format!("q = {q} is not a power of 2")));
    }
    let orbits = regular_orbits(q);
    Ok(CuspidalCount {
        q,
        count: orbits.len() as u64,
        degree: q - 1,
        orbits,
    })
}

/// χ_ℓ(a) for a ∈ B'_ℓ: q-1, -1 or 0 according to a₁₁ mod P and the ϖ^ℓ
/// digit of a₁₂. `ring` has level ≥ ℓ+1.
pub fn chi_ell(ring: &Ring, ell: u32, a: &Mat2) -> Result<i64> {
    if ring.level() < ell + 1 {
        return Err(Error::Precision {
            needed: ell + 1,
            available: ring.level(),
        });
    }
    if !Subgroup::LowerMod(ell).contains(ring, a) {
        return Err(Error::NotInSubgroup(format!("B'_{ell}")));
    }
    let q = ring.q() as i64;
    if ring.residue(a.a) != 1 {
        return Ok(0);
    }
    Ok(if ring.digit(a.b, ell) == 0 { q - 1 } else { -1 })
}

/// χ_ℓ read off the character table: the class of g_ℓ⁻¹·a·g_ℓ mod P under a
/// cuspidal row.
pub fn chi_ell_from_table(table: &Gl2Table, omega: u64, ring: &Ring, ell: u32, a: &Mat2) -> Result<Cyclotomic> {
    if !Subgroup::LowerMod(ell).contains(ring, a) {
        return Err(Error::NotInSubgroup(format!("B'_{ell}")));
    }
    let class = table.classify(ring.residue(a.a), ring.digit(a.b, ell), 0, ring.residue(a.d))?;
    table.value(Gl2Row::Cuspidal(omega), class)
}

/// χ_ℓ by the additive-character route: [a₁₁ ≡ 1]·Σ_{x ∈ 𝔽_q^×} ψ(x·a₁₂ϖ^{-ℓ}).
pub fn chi_ell_via_psi(psi: &PsiEvaluator, a: &Mat2) -> Cyclotomic {
    let ring = psi.ring();
    if ring.residue(a.a) != 1 {
        return Cyclotomic::zero();
    }
    let mut s = Cyclotomic::zero();
    for x in 1..ring.q() as u32 {
        s.add_term(1, psi.eval(ring.mul(ring.lift(x), a.b)));
    }
    s
}

/// Σ_{x∈𝔽_q^×} ψ(x·u) for u ∈ R/P (evaluated at shift 0).
pub fn additive_sum(field: &FieldSpec, u: u32) -> Result<i64> {
    let psi = PsiEvaluator::new(field, 0);
    let r = psi.ring();
    let mut s = Cyclotomic::zero();
    for x in 1..field.q() as u32 {
        s.add_term(1, psi.eval(r.mul(r.lift(x), r.lift(u))));
    }
    s.to_integer()
        .ok_or_else(|| Error::NonIntegral(s.render()))
}

/// A class function given by a closure on group elements.
pub struct ClassFunction<'a> {
    pub name: String,
    eval: Box<dyn Fn(&Mat2) -> Cyclotomic + Sync + 'a>,
}

impl<'a> ClassFunction<'a> {
    pub fn new(name: impl Into<String>, eval: impl Fn(&Mat2) -> Cyclotomic + Sync + 'a) -> Self {
        ClassFunction {
            name: name.into(),
            eval: Box::new(eval),
        }
    }
    pub fn trivial() -> Self {
        Self::new("1", |_| Cyclotomic::from_int(1))
    }
    pub fn eval(&self, g: &Mat2) -> Cyclotomic {
        (self.eval)(g)
    }
}

/// An inner product computed both exactly and in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InnerProduct {
    pub exact: i64,
    pub float: f64,
    pub order: usize,
}

/// Accumulates Σ φ₁(h)·conj(φ₂(h)) term by term.
#[derive(Default, Clone)]
pub struct CharSum {
    terms: HashMap<RootOfUnity, i64>,
    float: FloatSum,
}

impl CharSum {
    pub fn add_root(&mut self, c: i64, r: RootOfUnity) {
        *self.terms.entry(r).or_insert(0) += c;
        self.float.add_term(c as f64, r);
    }
    pub fn add(&mut self, v: &Cyclotomic) {
        for (r, c) in v.terms() {
            self.add_root(c, r);
        }
    }
    pub fn merge(mut self, other: CharSum) -> CharSum {
        for (r, c) in other.terms {
            *self.terms.entry(r).or_insert(0) += c;
        }
        self.float.merge(&other.float);
        self
    }
    pub fn exact(&self) -> Cyclotomic {
        let mut z = Cyclotomic::zero();
        for (&r, &c) in &self.terms {
            z.add_term(c, r);
        }
        z
    }
    /// Divides by `order`; errors unless the result is an integer and the
    /// float path agrees within 10⁻⁶.
    pub fn finish(&self, order: usize) -> Result<InnerProduct> {
        let z = self.exact();
        let total = z
            .to_integer()
            .ok_or_else(|| Error::NonIntegral(format!("Σ = {}", z.render())))?;
        if order == 0 || total % order as i64 != 0 {
            return Err(Error::NonIntegral(format!("{total}/{order}")));
        }
        let exact = total / order as i64;
        let (re, im) = self.float.value();
        let float = re / order as f64;
        if (float - exact as f64).abs() > 1e-6 || (im / order as f64).abs() > 1e-6 {
            return Err(Error::Verification(format!(
                "float path {float}+{}i disagrees with exact {exact}",
                im / order as f64
            )));
        }
        Ok(InnerProduct { exact, float, order })
    }
}

/// (1/|H|)·Σ_{h∈H} φ₁(h)·conj(φ₂(h)) over an explicit list of elements.
pub fn inner_product(elems: &[Mat2], phi1: &ClassFunction, phi2: &ClassFunction) -> Result<InnerProduct> {
    let sum = elems
        .par_iter()
        .fold(CharSum::default, |mut acc, h| {
            acc.add(&phi1.eval(h).mul(&phi2.eval(h).conj()));
            acc
        })
        .reduce(CharSum::default, CharSum::merge);
    sum.finish(elems.len())
}
