//! Finite congruence quotients of SL(2,R) and GL(2,R): elements, subgroup
//! predicates, enumeration, generating sets, cosets and double cosets.

use crate::error::{budget_check, Error, Result};
use crate::field::{FieldSpec, PsiEvaluator, Ring};
use crate::squares::s_ell_k;
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// A 2×2 matrix [[a, b], [c, d]] with entries stored as codes of some [`Ring`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Mat2 {
    pub const fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Mat2 { a, b, c, d }
    }
    pub fn identity(ring: &Ring) -> Self {
        Mat2::new(ring.one(), 0, 0, ring.one())
    }
    /// w = [[0, 1], [-1, 0]].
    pub fn weyl(ring: &Ring) -> Self {
        Mat2::new(0, ring.one(), ring.neg(ring.one()), 0)
    }
    /// [[1, x], [0, 1]].
    pub fn upper(ring: &Ring, x: u64) -> Self {
        Mat2::new(ring.one(), x, 0, ring.one())
    }
    /// [[1, 0], [x, 1]].
    pub fn lower(ring: &Ring, x: u64) -> Self {
        Mat2::new(ring.one(), 0, x, ring.one())
    }
    pub fn diag(s: u64, t: u64) -> Self {
        Mat2::new(s, 0, 0, t)
    }
    pub fn mul(&self, ring: &Ring, o: &Mat2) -> Mat2 {
        let m = |x, y| ring.mul(x, y);
        Mat2::new(
            ring.add(m(self.a, o.a), m(self.b, o.c)),
            ring.add(m(self.a, o.b), m(self.b, o.d)),
            ring.add(m(self.c, o.a), m(self.d, o.c)),
            ring.add(m(self.c, o.b), m(self.d, o.d)),
        )
    }
    pub fn det(&self, ring: &Ring) -> u64 {
        ring.sub(ring.mul(self.a, self.d), ring.mul(self.b, self.c))
    }
    pub fn is_invertible(&self, ring: &Ring) -> bool {
        ring.is_unit(self.det(ring))
    }
    /// Inverse; the determinant must be a unit.
    pub fn inverse(&self, ring: &Ring) -> Mat2 {
        let di = ring.inv(self.det(ring));
        Mat2::new(
            ring.mul(self.d, di),
            ring.neg(ring.mul(self.b, di)),
            ring.neg(ring.mul(self.c, di)),
            ring.mul(self.a, di),
        )
    }
    /// g · self · g⁻¹.
    pub fn conjugate_by(&self, ring: &Ring, g: &Mat2) -> Mat2 {
        g.mul(ring, self).mul(ring, &g.inverse(ring))
    }
    pub fn reduce(&self, from: &Ring, to: &Ring) -> Mat2 {
        let r = |x| from.reduce_to(to, x);
        Mat2::new(r(self.a), r(self.b), r(self.c), r(self.d))
    }
    /// Digit-canonical lift into a larger ring.
    pub fn lift(&self, from: &Ring, to: &Ring) -> Mat2 {
        let r = |x| to.lift_from(from, x);
        Mat2::new(r(self.a), r(self.b), r(self.c), r(self.d))
    }
    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }
    /// Lexicographic key on the four digit strings.
    pub fn order_key(&self, ring: &Ring) -> [u64; 4] {
        self.entries().map(|x| ring.order_key(x))
    }
    pub fn digit_strings(&self, ring: &Ring) -> [String; 4] {
        self.entries().map(|x| ring.digit_string(x))
    }
}

/// Whether the ambient group is SL(2) or GL(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Flavor {
    Sl,
    Gl,
}

/// Membership predicates for the congruence subgroups used throughout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// The whole ambient group.
    Full,
    /// Matrices lower triangular mod P^ℓ (upper-right entry in P^ℓ).
    LowerMod(u32),
    /// Principal congruence subgroup: g ≡ I mod P^m.
    Congruence(u32),
    /// Diagonal mod P^ℓ.
    DiagonalMod(u32),
    /// Upper-right entry in P^{m'} and g₁₁ ≡ g₂₂ mod P^m, m = ⌈ℓ/2⌉, m' = ⌊ℓ/2⌋+1.
    Gamma(u32),
    /// [[1+P^m, P^{m'}], [P^{m'}, 1+P^m]].
    Kmm(u32, u32),
    /// γ·H·γ⁻¹; γ is given in the ambient ring.
    Conjugate(Box<Subgroup>, Mat2),
    Intersection(Vec<Subgroup>),
}

/// m = ⌈ℓ/2⌉ and m' = ⌊ℓ/2⌋ + 1.
pub fn m_pair(ell: u32) -> (u32, u32) {
    (ell.div_ceil(2), ell / 2 + 1)
}

impl Subgroup {
    pub fn contains(&self, ring: &Ring, g: &Mat2) -> bool {
        match self {
            Subgroup::Full => true,
            Subgroup::LowerMod(l) => ring.in_ideal(g.b, *l),
            Subgroup::Congruence(m) => {
                let one = ring.one();
                ring.in_ideal(ring.sub(g.a, one), *m)
                    && ring.in_ideal(ring.sub(g.d, one), *m)
                    && ring.in_ideal(g.b, *m)
                    && ring.in_ideal(g.c, *m)
            }
            Subgroup::DiagonalMod(l) => ring.in_ideal(g.b, *l) && ring.in_ideal(g.c, *l),
            Subgroup::Gamma(l) => {
                let (m, mp) = m_pair(*l);
                ring.in_ideal(g.b, mp) && ring.in_ideal(ring.sub(g.a, g.d), m)
            }
            Subgroup::Kmm(m, mp) => {
                let one = ring.one();
                ring.in_ideal(ring.sub(g.a, one), *m)
                    && ring.in_ideal(ring.sub(g.d, one), *m)
                    && ring.in_ideal(g.b, *mp)
                    && ring.in_ideal(g.c, *mp)
            }
            Subgroup::Conjugate(h, gamma) => {
                // x ∈ γHγ⁻¹ iff γ⁻¹xγ ∈ H
                let gi = gamma.inverse(ring);
                h.contains(ring, &gi.mul(ring, g).mul(ring, gamma))
            }
            Subgroup::Intersection(v) => v.iter().all(|h| h.contains(ring, g)),
        }
    }

    /// Ideal exponents (upper-right, lower-left) if every element is the
    /// product lower · diagonal · upper with off-diagonal entries ranging over
    /// exactly these ideals.
    fn factorization(&self) -> Option<(u32, u32)> {
        match self {
            Subgroup::LowerMod(l) => Some((*l, 0)),
            Subgroup::Congruence(m) => Some((*m, *m)),
            Subgroup::DiagonalMod(l) => Some((*l, *l)),
            Subgroup::Gamma(l) => Some((m_pair(*l).1, 0)),
            Subgroup::Kmm(m, mp) if 2 * mp >= *m => Some((*mp, *mp)),
            _ => None,
        }
    }
}

/// |SL(2,R/P^n)| or |GL(2,R/P^n)|.
pub fn group_order(q: u64, n: u32, flavor: Flavor) -> u128 {
    let q = q as u128;
    let base = match flavor {
        Flavor::Sl => q * q * q - q,
        Flavor::Gl => (q * q - 1) * (q * q - q),
    };
    let k: u32 = match flavor {
        Flavor::Sl => 3,
        Flavor::Gl => 4,
    };
    base * q.pow(k * (n - 1))
}

fn flavor_name(flavor: Flavor) -> &'static str {
    match flavor {
        Flavor::Sl => "SL",
        Flavor::Gl => "GL",
    }
}

/// Every element of SL(2,R/P^n) or GL(2,R/P^n), no duplicates.
pub fn enumerate_group(ring: &Ring, flavor: Flavor, budget: u64) -> Result<Vec<Mat2>> {
    let n = ring.level();
    let card = group_order(ring.q(), n, flavor);
    budget_check(
        &format!("{}(2, R/P^{}) over {}", flavor_name(flavor), n, ring.field().name()),
        card,
        budget,
    )?;
    let size = ring.size();
    let mut out = Vec::with_capacity(card as usize);
    match flavor {
        Flavor::Sl => {
            let one = ring.one();
            for a in 0..size {
                if ring.is_unit(a) {
                    let ai = ring.inv(a);
                    for b in 0..size {
                        for c in 0..size {
                            let d = ring.mul(ring.add(one, ring.mul(b, c)), ai);
                            out.push(Mat2::new(a, b, c, d));
                        }
                    }
                } else {
                    // b must be a unit; c = (ad - 1)/b
                    for b in 0..size {
                        if !ring.is_unit(b) {
                            continue;
                        }
                        let bi = ring.inv(b);
                        for d in 0..size {
                            let c = ring.mul(ring.sub(ring.mul(a, d), one), bi);
                            out.push(Mat2::new(a, b, c, d));
                        }
                    }
                }
            }
        }
        Flavor::Gl => {
            for a in 0..size {
                for b in 0..size {
                    for c in 0..size {
                        for d in 0..size {
                            let g = Mat2::new(a, b, c, d);
                            if g.is_invertible(ring) {
                                out.push(g);
                            }
                        }
                    }
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u128, card);
    Ok(out)
}

/// SL elements with upper-right entry in P^k (k ≥ 1) satisfying `keep`,
/// enumerated without touching the rest of the group.
pub fn enumerate_sl_upper_ideal(
    ring: &Ring,
    k: u32,
    budget: u64,
    keep: impl Fn(&Mat2) -> bool,
) -> Result<Vec<Mat2>> {
    assert!(k >= 1);
    let n = ring.level();
    let bs: Vec<u64> = ring.ideal(k.min(n)).collect();
    let units: Vec<u64> = ring.units().collect();
    let card = units.len() as u128 * bs.len() as u128 * ring.size() as u128;
    budget_check(&format!("SL(2, R/P^{n}) with upper entry in P^{k}"), card, budget)?;
    let one = ring.one();
    let mut out = Vec::new();
    for &a in &units {
        let ai = ring.inv(a);
        for &b in &bs {
            for c in 0..ring.size() {
                let d = ring.mul(ring.add(one, ring.mul(b, c)), ai);
                let g = Mat2::new(a, b, c, d);
                if keep(&g) {
                    out.push(g);
                }
            }
        }
    }
    Ok(out)
}

/// Elements of a subgroup, in canonical order.
pub fn enumerate_subgroup(ring: &Ring, flavor: Flavor, sub: &Subgroup, budget: u64) -> Result<Vec<Mat2>> {
    let mut v: Vec<Mat2> = enumerate_group(ring, flavor, budget)?
        .into_iter()
        .filter(|g| sub.contains(ring, g))
        .collect();
    sort_canonical(ring, &mut v);
    Ok(v)
}

pub fn sort_canonical(ring: &Ring, v: &mut [Mat2]) {
    v.sort_by_cached_key(|g| g.order_key(ring));
}

/// Additive generators lift(basisⱼ)·ϖ^p of P^k/P^n.
pub fn ideal_generators(ring: &Ring, k: u32) -> Vec<u64> {
    let f = ring.field().f();
    let mut out = Vec::new();
    for p in k..ring.level() {
        for j in 0..f {
            out.push(ring.mul(ring.lift(1 << j), ring.pi_pow(p)));
        }
    }
    out
}

/// Subgroup closure of `gens` by breadth-first search.
pub fn closure(ring: &Ring, gens: &[Mat2]) -> HashSet<Mat2> {
    let id = Mat2::identity(ring);
    let mut seen = HashSet::from([id]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.mul(ring, g);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Greedy generating set: walk the elements in order and keep each one not
/// already in the subgroup generated so far.
pub fn greedy_generators(ring: &Ring, elems: &[Mat2]) -> Vec<Mat2> {
    let mut gens = Vec::new();
    let mut span = HashSet::from([Mat2::identity(ring)]);
    for g in elems {
        if span.contains(g) {
            continue;
        }
        gens.push(*g);
        // extend the span: everything reachable from it with the new set
        let mut frontier: Vec<Mat2> = span.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for h in &gens {
                let y = x.mul(ring, h);
                if span.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// A generating set for a subgroup. Uses the lower·diagonal·upper
/// factorization where available, otherwise greedy generation from the
/// enumerated elements.
pub fn generators(ring: &Ring, flavor: Flavor, sub: &Subgroup, budget: u64) -> Result<Vec<Mat2>> {
    let Some((bk, ck)) = sub.factorization() else {
        let elems = enumerate_subgroup(ring, flavor, sub, budget)?;
        return Ok(greedy_generators(ring, &elems));
    };
    let mut gens: Vec<Mat2> = Vec::new();
    for x in ideal_generators(ring, bk) {
        gens.push(Mat2::upper(ring, x));
    }
    for x in ideal_generators(ring, ck) {
        gens.push(Mat2::lower(ring, x));
    }
    let mut diag: Vec<Mat2> = Vec::new();
    let units: Vec<u64> = ring.units().collect();
    match flavor {
        Flavor::Sl => {
            for &t in &units {
                let g = Mat2::diag(t, ring.inv(t));
                if sub.contains(ring, &g) {
                    diag.push(g);
                }
            }
        }
        Flavor::Gl => {
            budget_check("diagonal torus", (units.len() * units.len()) as u128, budget)?;
            for &s in &units {
                for &t in &units {
                    let g = Mat2::diag(s, t);
                    if sub.contains(ring, &g) {
                        diag.push(g);
                    }
                }
            }
        }
    }
    sort_canonical(ring, &mut diag);
    gens.extend(greedy_generators(ring, &diag));
    Ok(gens)
}

/// Union–find partition of `elems` into H₁\G/H₂ double cosets.
///
/// Returns the classes, each sorted canonically, ordered by their least
/// element.
pub fn double_cosets(ring: &Ring, elems: &[Mat2], left: &[Mat2], right: &[Mat2]) -> Vec<Vec<Mat2>> {
    let index: HashMap<Mat2, usize> = elems.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mut parent: Vec<usize> = (0..elems.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, g) in elems.iter().enumerate() {
        let nbrs = left
            .iter()
            .map(|h| h.mul(ring, g))
            .chain(right.iter().map(|h| g.mul(ring, h)));
        for y in nbrs {
            let j = *index.get(&y).expect("generator leaves the ambient set");
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: HashMap<usize, Vec<Mat2>> = HashMap::new();
    for (i, g) in elems.iter().enumerate() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(*g);
    }
    let mut out: Vec<Vec<Mat2>> = classes.into_values().collect();
    for c in out.iter_mut() {
        sort_canonical(ring, c);
    }
    out.sort_by_cached_key(|c| c[0].order_key(ring));
    out
}

/// A representative of a double coset B'_ℓ\K'/B'_ℓ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CosetLabel {
    Identity,
    Weyl,
    /// g(k, α) = [[1, αϖ^k], [0, 1]]; α given as a digit string.
    Shift { k: u32, alpha: String },
}

impl std::fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CosetLabel::Identity => write!(f, "I"),
            CosetLabel::Weyl => write!(f, "w"),
            CosetLabel::Shift { k, alpha } => write!(f, "g({k},{alpha})"),
        }
    }
}

impl std::str::FromStr for CosetLabel {
    type Err = Error;

    /// Accepts "I", "w" or "g(k,α)" with α a digit string.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "I" => return Ok(CosetLabel::Identity),
            "w" => return Ok(CosetLabel::Weyl),
            _ => {}
        }
        let bad = || Error::Parse(format!("coset label {s:?}: expected I, w or g(k,digits)"));
        let inner = s.strip_prefix("g(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (k, alpha) = inner.split_once(',').ok_or_else(bad)?;
        let k = k.trim().parse().map_err(|_| bad())?;
        let alpha = alpha.trim();
        if alpha.is_empty() || !alpha.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(bad());
        }
        Ok(CosetLabel::Shift { k, alpha: alpha.to_string() })
    }
}

/// One of the formula representatives, with its matrix in R/P^{ℓ+1}.
#[derive(Clone, Debug)]
pub struct DoubleCosetRep {
    pub label: CosetLabel,
    pub matrix: Mat2,
    /// For `Shift`: k and α as a code of R/P^{ℓ+1}.
    pub shift: Option<(u32, u64)>,
}

/// {I, w} ∪ {g(k,α) : 1 ≤ k < ℓ, α ∈ S_{ℓ,k}}, matrices in R/P^{ℓ+1}.
pub fn double_cosets_bell(field: &FieldSpec, ell: u32) -> Result<Vec<DoubleCosetRep>> {
    if ell < 1 {
        return Err(Error::OutOfRange("ℓ ≥ 1".into()));
    }
    field.require_precision(ell + 1)?;
    let ring = Ring::new(field, ell + 1);
    let mut out = vec![
        DoubleCosetRep {
            label: CosetLabel::Identity,
            matrix: Mat2::identity(&ring),
            shift: None,
        },
        DoubleCosetRep {
            label: CosetLabel::Weyl,
            matrix: Mat2::weyl(&ring),
            shift: None,
        },
    ];
    for k in 1..ell {
        let s = s_ell_k(field, ell, k)?;
        for &alpha in s.codes() {
            let a = ring.lift_from(s.ring(), alpha);
            out.push(DoubleCosetRep {
                label: CosetLabel::Shift {
                    k,
                    alpha: s.ring().digit_string(alpha),
                },
                matrix: Mat2::upper(&ring, ring.mul(a, ring.pi_pow(k))),
                shift: Some((k, a)),
            });
        }
    }
    Ok(out)
}

/// Result of comparing the formula double cosets with brute-force orbits.
#[derive(Clone, Debug, Serialize)]
pub struct DoubleCosetReport {
    pub ell: u32,
    pub formula_count: usize,
    pub orbit_count: usize,
    /// Whether the formula representatives lie in pairwise distinct orbits.
    pub reps_distinct: bool,
    /// Orbit sizes in the order of the formula representatives.
    pub orbit_sizes: Vec<usize>,
}

impl DoubleCosetReport {
    pub fn passed(&self) -> bool {
        self.reps_distinct && self.formula_count == self.orbit_count
    }
}

/// Orbit partition of SL(2,R/P^{ℓ+1}) under B'_ℓ × B'_ℓ.
pub fn double_cosets_bell_brute(field: &FieldSpec, ell: u32, budget: u64) -> Result<DoubleCosetReport> {
    let reps = double_cosets_bell(field, ell)?;
    let ring = Ring::new(field, ell + 1);
    let elems = enumerate_group(&ring, Flavor::Sl, budget)?;
    let gens = generators(&ring, Flavor::Sl, &Subgroup::LowerMod(ell), budget)?;
    let classes = double_cosets(&ring, &elems, &gens, &gens);
    let mut which: HashMap<Mat2, usize> = HashMap::new();
    for (i, c) in classes.iter().enumerate() {
        for g in c {
            which.insert(*g, i);
        }
    }
    let idx: Vec<usize> = reps.iter().map(|r| which[&r.matrix]).collect();
    let distinct: HashSet<usize> = idx.iter().copied().collect();
    Ok(DoubleCosetReport {
        ell,
        formula_count: reps.len(),
        orbit_count: classes.len(),
        reps_distinct: distinct.len() == reps.len(),
        orbit_sizes: idx.iter().map(|&i| classes[i].len()).collect(),
    })
}

/// u_β = [[1, β], [0, 1]] for β ∈ R/P^ℓ, and u_β·w for β ∈ P/P^ℓ, in R/P^{ℓ+1}.
#[derive(Clone, Debug)]
pub struct CosetReps {
    pub ring: Ring,
    pub ell: u32,
    /// β codes (digit-canonical lifts of R/P^ℓ) for Σ₀.
    pub sigma0: Vec<u64>,
    /// β codes for Σ_w.
    pub sigma_w: Vec<u64>,
}

impl CosetReps {
    pub fn len(&self) -> usize {
        self.sigma0.len() + self.sigma_w.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// All representatives: Σ₀ first, then Σ_w.
    pub fn matrices(&self) -> Vec<Mat2> {
        let r = &self.ring;
        let w = Mat2::weyl(r);
        self.sigma0
            .iter()
            .map(|&b| Mat2::upper(r, b))
            .chain(self.sigma_w.iter().map(|&b| Mat2::upper(r, b).mul(r, &w)))
            .collect()
    }
}

/// Coset representatives for B'_ℓ\K'.
pub fn coset_reps_bell(field: &FieldSpec, ell: u32) -> Result<CosetReps> {
    if ell < 1 {
        return Err(Error::OutOfRange("ℓ ≥ 1".into()));
    }
    field.require_precision(ell + 1)?;
    let ring = Ring::new(field, ell + 1);
    let small = Ring::new(field, ell);
    let mut sigma0: Vec<u64> = (0..small.size()).collect();
    sigma0.sort_by_key(|&x| small.order_key(x));
    let sigma_w: Vec<u64> = sigma0.iter().copied().filter(|&x| !small.is_unit(x)).collect();
    let lift = |v: Vec<u64>| v.into_iter().map(|x| ring.lift_from(&small, x)).collect();
    Ok(CosetReps {
        sigma0: lift(sigma0),
        sigma_w: lift(sigma_w),
        ring,
        ell,
    })
}

/// Key of the coset B'_ℓ·g: the line through g⁻¹e₂ in (R/P^ℓ)², normalized.
pub fn bprime_coset_key(ring: &Ring, ell: u32, g: &Mat2) -> (u64, u64) {
    // g⁻¹e₂ is proportional to (-b, a)
    let (x, y) = (ring.neg(g.b), g.a);
    let small = Ring::new(ring.field(), ell);
    let (x, y) = (ring.reduce_to(&small, x), ring.reduce_to(&small, y));
    if small.is_unit(y) {
        (small.mul(x, small.inv(y)), small.one())
    } else {
        (small.one(), small.mul(y, small.inv(x)))
    }
}

/// Same key but reusing a prebuilt R/P^ℓ.
pub(crate) fn bprime_coset_key_in(ring: &Ring, small: &Ring, g: &Mat2) -> (u64, u64) {
    let (x, y) = (ring.reduce_to(small, ring.neg(g.b)), ring.reduce_to(small, g.a));
    if small.is_unit(y) {
        (small.mul(x, small.inv(y)), small.one())
    } else {
        (small.one(), small.mul(y, small.inv(x)))
    }
}

/// Brute-force check of the coset representatives.
#[derive(Clone, Debug, Serialize)]
pub struct CosetReport {
    pub ell: u32,
    pub count: usize,
    pub expected: u128,
    pub pairwise_disjoint: bool,
    /// |B'_ℓ| · |Σ| = |SL(2, R/P^{ℓ+1})|.
    pub lagrange: bool,
    /// Every group element lies in the coset of some representative.
    pub exhaustive: bool,
}

impl CosetReport {
    pub fn passed(&self) -> bool {
        self.pairwise_disjoint && self.lagrange && self.exhaustive && self.count as u128 == self.expected
    }
}

pub fn coset_reps_bell_brute(field: &FieldSpec, ell: u32, budget: u64) -> Result<CosetReport> {
    let reps = coset_reps_bell(field, ell)?;
    let ring = &reps.ring;
    let small = Ring::new(field, ell);
    let keys: HashSet<(u64, u64)> = reps
        .matrices()
        .iter()
        .map(|g| bprime_coset_key_in(ring, &small, g))
        .collect();
    let elems = enumerate_group(ring, Flavor::Sl, budget)?;
    let b_order = elems.iter().filter(|g| Subgroup::LowerMod(ell).contains(ring, g)).count();
    let exhaustive = elems.iter().all(|g| keys.contains(&bprime_coset_key_in(ring, &small, g)));
    let q = field.q() as u128;
    Ok(CosetReport {
        ell,
        count: reps.len(),
        expected: (q + 1) * q.pow(ell - 1),
        pairwise_disjoint: keys.len() == reps.len(),
        lagrange: (b_order * reps.len()) as u128 == elems.len() as u128,
        exhaustive,
    })
}

/// Outcome of the brute-force normalizer computation.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizerReport {
    pub ell: u32,
    pub m: u32,
    pub m_prime: u32,
    /// Level of the finite group that was enumerated.
    pub gl_level: u32,
    pub sl_level: u32,
    pub gl_size: usize,
    pub sl_size: usize,
    /// Human-readable closed forms.
    pub gl_closed_form: String,
    pub sl_closed_form: String,
    pub gl_mismatch: Option<[String; 4]>,
    pub sl_mismatch: Option<[String; 4]>,
}

impl NormalizerReport {
    pub fn passed(&self) -> bool {
        self.gl_mismatch.is_none() && self.sl_mismatch.is_none()
    }
}

/// Whether ℓ > 4e, and the level j of the K'_j factor in the SL(2) normalizer.
fn normalizer_shape(field: &FieldSpec, ell: u32) -> (bool, u32) {
    let (m, _) = m_pair(ell);
    match field.e().finite() {
        Some(e) if ell > 4 * e => (true, m - e),
        _ => (false, m.div_ceil(2)),
    }
}

/// The normalizers of η in GL(2) and SL(2), as group expressions.
pub fn normalizer_closed_form(field: &FieldSpec, ell: u32) -> (String, String) {
    let (m, _) = m_pair(ell);
    let (big, j) = normalizer_shape(field, ell);
    let sl = if big { format!("Z'·U0·K'_{j}") } else { format!("U0·K'_{j}") };
    (format!("Z0·U0·K_{m}"), sl)
}

/// Compares {g : ᵍη = η} with the closed forms in GL(2) and SL(2).
///
/// Conjugation by K_m acts trivially on K_{m'}/K_{ℓ+1}, so membership only
/// depends on g mod P^m; the group is enumerated at level ℓ+1 when the budget
/// allows and at level m otherwise.
pub fn normalizer_check(field: &FieldSpec, u: u64, u_ring: &Ring, ell: u32, budget: u64) -> Result<NormalizerReport> {
    if ell < 1 {
        return Err(Error::OutOfRange("ℓ ≥ 1".into()));
    }
    field.require_precision(ell + 2)?;
    let (m, mp) = m_pair(ell);
    let top = Ring::new(field, ell + 1);
    if u_ring.level() < 1 || !u_ring.is_unit(u) {
        return Err(Error::NotAUnit(u_ring.digit_string(u)));
    }
    let u_top = top.lift_from(u_ring, u_ring.reduce_to(&Ring::new(field, u_ring.level().min(ell + 1)), u));
    let psi = PsiEvaluator::twisted(field, ell, Some(u_top));
    let eta = |k: &Mat2| psi.eval(k.b);
    let gens_x = ideal_generators(&top, mp);
    let mut sl_gens = Vec::new();
    let mut gl_gens = Vec::new();
    for &x in &gens_x {
        let one_x = top.add(top.one(), x);
        sl_gens.push(Mat2::upper(&top, x));
        sl_gens.push(Mat2::lower(&top, x));
        sl_gens.push(Mat2::diag(one_x, top.inv(one_x)));
        gl_gens.push(Mat2::upper(&top, x));
        gl_gens.push(Mat2::lower(&top, x));
        gl_gens.push(Mat2::diag(one_x, top.one()));
        gl_gens.push(Mat2::diag(top.one(), one_x));
    }
    let normalizes = |g: &Mat2, gens: &[Mat2]| {
        let gi = g.inverse(&top);
        gens.iter().all(|k| eta(&gi.mul(&top, k).mul(&top, g)) == eta(k))
    };
    let pick_level = |flavor| {
        if group_order(field.q(), ell + 1, flavor) <= budget as u128 {
            ell + 1
        } else {
            m
        }
    };
    let (big, j) = normalizer_shape(field, ell);
    let gl_pred = |r: &Ring, g: &Mat2| r.in_ideal(r.sub(g.a, g.d), m) && r.in_ideal(g.b, m);
    let sl_pred = |r: &Ring, g: &Mat2| {
        let near = |s: u64| {
            r.in_ideal(r.sub(g.a, s), j) && r.in_ideal(r.sub(g.d, s), j) && r.in_ideal(g.b, j)
        };
        near(r.one()) || (big && near(r.neg(r.one())))
    };
    let run = |flavor: Flavor, gens: &[Mat2], pred: &dyn Fn(&Ring, &Mat2) -> bool| -> Result<(u32, usize, Option<[String; 4]>)> {
        let lvl = pick_level(flavor);
        let ring = Ring::new(field, lvl);
        let elems = enumerate_group(&ring, flavor, budget)?;
        let mut count = 0;
        let mut bad = None;
        for g in &elems {
            let lifted = Mat2::new(
                top.extend_from(&ring, g.a),
                top.extend_from(&ring, g.b),
                top.extend_from(&ring, g.c),
                top.extend_from(&ring, g.d),
            );
            let brute = normalizes(&lifted, gens);
            if brute {
                count += 1;
            }
            if brute != pred(&ring, g) && bad.is_none() {
                bad = Some(g.digit_strings(&ring));
            }
        }
        Ok((lvl, count, bad))
    };
    let (gl_level, gl_size, gl_mismatch) = run(Flavor::Gl, &gl_gens, &gl_pred)?;
    let (sl_level, sl_size, sl_mismatch) = run(Flavor::Sl, &sl_gens, &sl_pred)?;
    let (gl_closed_form, sl_closed_form) = normalizer_closed_form(field, ell);
    Ok(NormalizerReport {
        ell,
        m,
        m_prime: mp,
        gl_level,
        sl_level,
        gl_size,
        sl_size,
        gl_closed_form,
        sl_closed_form,
        gl_mismatch,
        sl_mismatch,
    })
}

/// Convenience wrapper: u given as an integer.
pub fn normalizer_check_int(field: &FieldSpec, u: i64, ell: u32, budget: u64) -> Result<NormalizerReport> {
    let r = Ring::new(field, ell + 1);
    normalizer_check(field, r.from_int(u), &r, ell, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 5_000_000;

    #[test]
    fn group_orders() {
        let f = FieldSpec::q2(12);
        for (n, want) in [(1, 6), (3, 384)] {
            let r = Ring::new(&f, n);
            let v = enumerate_group(&r, Flavor::Sl, BUDGET).unwrap();
            assert_eq!(v.len(), want);
            assert_eq!(v.iter().collect::<HashSet<_>>().len(), want);
            assert!(v.iter().all(|g| g.det(&r) == r.one()));
        }
        let g = FieldSpec::laurent(2, 8).unwrap();
        let r = Ring::new(&g, 2);
        assert_eq!(enumerate_group(&r, Flavor::Sl, BUDGET).unwrap().len(), 3840);
        let r1 = Ring::new(&f, 2);
        assert_eq!(enumerate_group(&r1, Flavor::Gl, BUDGET).unwrap().len() as u128, group_order(2, 2, Flavor::Gl));
    }

    #[test]
    fn budget_error_names_cardinality() {
        let f = FieldSpec::q2(12);
        let r = Ring::new(&f, 3);
        match enumerate_group(&r, Flavor::Sl, 10) {
            Err(Error::Budget { cardinality, .. }) => assert_eq!(cardinality, 384),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn factorized_generators_generate() {
        let f = FieldSpec::q2(12);
        let r = Ring::new(&f, 4);
        for sub in [Subgroup::LowerMod(2), Subgroup::Gamma(3), Subgroup::Congruence(2), Subgroup::DiagonalMod(2)] {
            for flavor in [Flavor::Sl, Flavor::Gl] {
                let gens = generators(&r, flavor, &sub, BUDGET).unwrap();
                let span = closure(&r, &gens);
                let elems = enumerate_subgroup(&r, flavor, &sub, BUDGET).unwrap();
                assert_eq!(span.len(), elems.len(), "{sub:?} {flavor:?}");
                assert!(elems.iter().all(|g| span.contains(g)));
            }
        }
    }

    #[test]
    fn dcoset_counts_q2() {
        let f = FieldSpec::q2(12);
        for (ell, want) in [(1, 2), (2, 3), (3, 4)] {
            let rep = double_cosets_bell_brute(&f, ell, BUDGET).unwrap();
            assert_eq!(rep.formula_count, want);
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn coset_counts() {
        let f = FieldSpec::q2(12);
        assert_eq!(coset_reps_bell(&f, 1).unwrap().len(), 3);
        assert_eq!(coset_reps_bell(&f, 3).unwrap().len(), 12);
        let g = FieldSpec::laurent(2, 8).unwrap();
        assert_eq!(coset_reps_bell(&g, 2).unwrap().len(), 20);
        for ell in 1..=3 {
            assert!(coset_reps_bell_brute(&f, ell, BUDGET).unwrap().passed());
        }
    }

    #[test]
    fn torus_conjugates_shifts() {
        // diag(u, u⁻¹)·g(k,α)·diag(u, u⁻¹)⁻¹ = g(k, u²α)
        let f = FieldSpec::q2(12);
        let r = Ring::new(&f, 5);
        let small = Ring::new(&f, 3);
        for u in small.units() {
            let u = r.lift_from(&small, u);
            let h = Mat2::diag(u, r.inv(u));
            for k in 1..4 {
                let x = r.pi_pow(k);
                let c = Mat2::upper(&r, x).conjugate_by(&r, &h);
                assert_eq!(c, Mat2::upper(&r, r.mul(r.square(u), x)));
            }
        }
    }

    #[test]
    fn normalizers_small() {
        let f = FieldSpec::q2(12);
        for ell in [2, 3, 4] {
            let rep = normalizer_check_int(&f, 1, ell, BUDGET).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
        let g = FieldSpec::laurent(1, 10).unwrap();
        let rep = normalizer_check_int(&g, 1, 3, BUDGET).unwrap();
        assert_eq!(rep.sl_closed_form, "U0·K'_1");
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn coset_labels_parse_back() {
        let f = FieldSpec::q2(12);
        for ell in 1..=5 {
            for rep in double_cosets_bell(&f, ell).unwrap() {
                assert_eq!(rep.label.to_string().parse::<CosetLabel>().unwrap(), rep.label);
            }
        }
        assert!("g(3)".parse::<CosetLabel>().is_err());
        assert!("x".parse::<CosetLabel>().is_err());
    }
}
