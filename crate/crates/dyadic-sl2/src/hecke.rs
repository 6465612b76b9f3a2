//! The Hecke algebra of B'_ℓ\K'/B'_ℓ with the character ϑ_ℓ when q = 2: basis
//! operators, their action on the induced-space basis {h_a : a ∈ Σ}, and
//! commutativity.

use crate::error::{budget_check, Error, Result};
use crate::field::{FieldSpec, Ring};
use crate::intertwining::{enumerate_bprime, intertwine_dim_formula};
use crate::matgroups::{
    bprime_coset_key_in, coset_reps_bell, double_cosets_bell, enumerate_group, CosetLabel, CosetReps, DoubleCosetRep,
    Flavor, Mat2, Subgroup,
};
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// Double cosets carrying a nonzero Hecke operator: I and the g(ℓ-i, α) with
/// i < ℓ/2 and either i < 2e odd or i = 2e.
pub fn supported_cosets(field: &FieldSpec, ell: u32) -> Result<Vec<DoubleCosetRep>> {
    let all = double_cosets_bell(field, ell)?;
    Ok(all
        .into_iter()
        .filter(|r| match &r.label {
            CosetLabel::Identity => true,
            CosetLabel::Weyl => false,
            CosetLabel::Shift { k, .. } => {
                let i = ell - k;
                2 * i < ell
                    && match field.two_e() {
                        None => i % 2 == 1,
                        Some(te) => (i < te && i % 2 == 1) || i == te,
                    }
            }
        })
        .collect())
}

/// Shared data: B'_ℓ, the character ϑ_ℓ and the coset basis.
pub struct HeckeContext {
    pub ell: u32,
    pub ring: Ring,
    small: Ring,
    pub bprime: Vec<Mat2>,
    pub reps: CosetReps,
    rep_mats: Vec<Mat2>,
    rep_index: HashMap<(u64, u64), usize>,
}

impl HeckeContext {
    pub fn new(field: &FieldSpec, ell: u32, budget: u64) -> Result<Self> {
        if field.q() != 2 {
            return Err(Error::Unsupported("the Hecke algebra computation needs residue field 𝔽₂".into()));
        }
        let (ring, bprime) = enumerate_bprime(field, ell, budget)?;
        let reps = coset_reps_bell(field, ell)?;
        let small = Ring::new(field, ell);
        let rep_mats = reps.matrices();
        let rep_index = rep_mats
            .iter()
            .enumerate()
            .map(|(i, g)| (bprime_coset_key_in(&ring, &small, g), i))
            .collect();
        Ok(HeckeContext {
            ell,
            ring,
            small,
            bprime,
            reps,
            rep_mats,
            rep_index,
        })
    }

    /// ϑ_ℓ(b) = ±1 according to the ϖ^ℓ digit of b₁₂.
    pub fn theta(&self, b: &Mat2) -> i64 {
        if self.ring.digit(b.b, self.ell) == 0 {
            1
        } else {
            -1
        }
    }

    pub fn dim(&self) -> usize {
        self.rep_mats.len()
    }

    /// Index of the basis vector whose coset contains g.
    pub fn coset_index(&self, g: &Mat2) -> usize {
        self.rep_index[&bprime_coset_key_in(&self.ring, &self.small, g)]
    }

    /// h_a(z): ϑ(z·a⁻¹) if z ∈ B'a, else 0.
    pub fn h(&self, a: usize, z: &Mat2) -> i64 {
        let x = z.mul(&self.ring, &self.rep_mats[a].inverse(&self.ring));
        if Subgroup::LowerMod(self.ell).contains(&self.ring, &x) {
            self.theta(&x)
        } else {
            0
        }
    }
}

/// ℱ_γ: the function on B'γB' with ℱ(tγt') = ϑ(t)ϑ(t'), zero elsewhere.
pub struct HeckeFunction<'a> {
    ctx: &'a HeckeContext,
    gamma: Mat2,
    gamma_inv: Mat2,
    /// line(t·γ·e₂) ↦ t
    lines: HashMap<(u64, u64), Mat2>,
}

fn line_of(ring: &Ring, small: &Ring, x: u64, y: u64) -> (u64, u64) {
    let (x, y) = (ring.reduce_to(small, x), ring.reduce_to(small, y));
    if small.is_unit(y) {
        (small.mul(x, small.inv(y)), small.one())
    } else {
        (small.one(), small.mul(y, small.inv(x)))
    }
}

impl<'a> HeckeFunction<'a> {
    pub fn new(ctx: &'a HeckeContext, gamma: Mat2) -> Self {
        let r = &ctx.ring;
        let mut lines = HashMap::new();
        for t in &ctx.bprime {
            let v = t.mul(r, &gamma);
            lines.entry(line_of(r, &ctx.small, v.b, v.d)).or_insert(*t);
        }
        HeckeFunction {
            ctx,
            gamma,
            gamma_inv: gamma.inverse(r),
            lines,
        }
    }

    /// y = tγt' iff line(y·e₂) = line(t·γ·e₂) and γ⁻¹t⁻¹y ∈ B'.
    pub fn eval(&self, y: &Mat2) -> i64 {
        let r = &self.ctx.ring;
        let Some(t) = self.lines.get(&line_of(r, &self.ctx.small, y.b, y.d)) else {
            return 0;
        };
        let tp = self.gamma_inv.mul(r, &t.inverse(r)).mul(r, y);
        if !Subgroup::LowerMod(self.ctx.ell).contains(r, &tp) {
            return 0;
        }
        self.ctx.theta(t) * self.ctx.theta(&tp)
    }

    pub fn gamma(&self) -> &Mat2 {
        &self.gamma
    }
}

/// Action matrix of ℱ_γ: column a holds the coordinates of ℱ_γ * h_a.
#[derive(Clone, Debug, Serialize)]
pub struct HeckeOperator {
    pub ell: u32,
    pub coset: String,
    pub matrix: Vec<Vec<i64>>,
}

impl HeckeOperator {
    /// For a monomial matrix, the image index of each column.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        let n = self.matrix.len();
        let mut perm = vec![usize::MAX; n];
        for col in 0..n {
            let nz: Vec<usize> = (0..n).filter(|&row| self.matrix[row][col] != 0).collect();
            if nz.len() != 1 {
                return None;
            }
            perm[col] = nz[0];
        }
        let distinct: HashSet<usize> = perm.iter().copied().collect();
        (distinct.len() == n).then_some(perm)
    }

    /// The distinct nonzero entries (the scalars λ, up to the volume).
    pub fn scalars(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.matrix.iter().flatten().copied().filter(|&x| x != 0).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// M[a', a] = |B'|·ℱ_γ(a'a⁻¹).
pub fn hecke_action_in(ctx: &HeckeContext, rep: &DoubleCosetRep) -> HeckeOperator {
    let f = HeckeFunction::new(ctx, rep.matrix);
    let r = &ctx.ring;
    let n = ctx.dim();
    let vol = ctx.bprime.len() as i64;
    let mut matrix = vec![vec![0i64; n]; n];
    let invs: Vec<Mat2> = ctx.rep_mats.iter().map(|a| a.inverse(r)).collect();
    for (i, ap) in ctx.rep_mats.iter().enumerate() {
        for (j, ai) in invs.iter().enumerate() {
            matrix[i][j] = vol * f.eval(&ap.mul(r, ai));
        }
    }
    HeckeOperator {
        ell: ctx.ell,
        coset: rep.label.to_string(),
        matrix,
    }
}

pub fn hecke_action(field: &FieldSpec, ell: u32, coset: &CosetLabel, budget: u64) -> Result<HeckeOperator> {
    let ctx = HeckeContext::new(field, ell, budget)?;
    let rep = supported_cosets(field, ell)?
        .into_iter()
        .find(|r| &r.label == coset)
        .ok_or_else(|| Error::Precondition(format!("{coset} does not support a Hecke operator")))?;
    Ok(hecke_action_in(&ctx, &rep))
}

/// The same matrix by literal convolution over SL(2,R/P^{ℓ+1}), with ℱ_γ
/// tabulated by multiplying out B'γB' (which also checks it is well defined).
pub fn hecke_action_literal(ctx: &HeckeContext, rep: &DoubleCosetRep, budget: u64) -> Result<HeckeOperator> {
    let r = &ctx.ring;
    let nb = ctx.bprime.len() as u128;
    budget_check("B' × B' products", nb * nb, budget)?;
    let mut table: HashMap<Mat2, i64> = HashMap::new();
    for t in &ctx.bprime {
        let tg = t.mul(r, &rep.matrix);
        let th = ctx.theta(t);
        for tp in &ctx.bprime {
            let y = tg.mul(r, tp);
            let v = th * ctx.theta(tp);
            if let Some(old) = table.insert(y, v) {
                if old != v {
                    return Err(Error::Verification(format!("ℱ_{} is not well defined", rep.label)));
                }
            }
        }
    }
    let group = enumerate_group(r, Flavor::Sl, budget)?;
    let n = ctx.dim();
    let mut matrix = vec![vec![0i64; n]; n];
    for (i, ap) in ctx.rep_mats.iter().enumerate() {
        for (j, entry) in matrix[i].iter_mut().enumerate() {
            *entry = group
                .iter()
                .filter_map(|y| table.get(y).map(|&fy| fy * ctx.h(j, &y.inverse(r).mul(r, ap))))
                .sum();
        }
    }
    Ok(HeckeOperator {
        ell: ctx.ell,
        coset: rep.label.to_string(),
        matrix,
    })
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Per-operator shape checks.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorShape {
    pub coset: String,
    pub monomial: bool,
    /// Σ₀ and Σ_w are each preserved.
    pub block_preserving: bool,
    /// On Σ₀ the index β goes to β + αϖ^k (ℱ_I: the identity).
    pub shift_pattern: bool,
    pub scalars: Vec<i64>,
    pub order: Option<usize>,
    pub matches_literal: Option<bool>,
}

/// Commutativity certificate and shape report for all supported operators.
#[derive(Clone, Debug, Serialize)]
pub struct HeckeReport {
    pub ell: u32,
    pub dimension: usize,
    pub basis_size: usize,
    pub volume: usize,
    pub identity_is_scalar: bool,
    pub max_off_diagonal_commutator: i64,
    pub operators: Vec<OperatorShape>,
    /// Order of the group generated by the permutation parts.
    pub permutation_group_order: usize,
    pub permutation_group_cyclic: bool,
    /// Σ(ℓ) via the intertwining formula, for comparison with `dimension`.
    pub end_dim: i64,
}

impl HeckeReport {
    /// ℱ_I scalar, all commutators zero, dimension Σ(ℓ), literal sums agree.
    pub fn passed(&self) -> bool {
        self.identity_is_scalar
            && self.max_off_diagonal_commutator == 0
            && self.dimension as i64 == self.end_dim
            && self.operators.iter().all(|o| o.matches_literal != Some(false))
    }

    /// Every operator is monomial, block preserving and shifts β by αϖ^k.
    /// Fails once some i ≥ 3 is supported: the double coset then contains
    /// several u_x and ℱ_γ * h_a has several terms.
    pub fn shape_passed(&self) -> bool {
        self.operators
            .iter()
            .all(|o| o.monomial && o.block_preserving && o.shift_pattern)
    }
}

fn perm_order(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut ord = 1usize;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        ord = num_lcm(ord, len);
    }
    ord
}

fn num_lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Multiplicative order of the permutation part of ℱ_γ.
pub fn operator_order(field: &FieldSpec, ell: u32, coset: &CosetLabel, budget: u64) -> Result<usize> {
    let op = hecke_action(field, ell, coset, budget)?;
    let p = op
        .permutation()
        .ok_or_else(|| Error::Verification(format!("ℱ_{coset} is not monomial")))?;
    Ok(perm_order(&p))
}

/// Builds every supported operator and checks commutators, shapes and (for
/// `literal_up_to` ≥ ℓ) agreement with literal convolution.
pub fn commutativity_certificate(field: &FieldSpec, ell: u32, literal_up_to: u32, budget: u64) -> Result<HeckeReport> {
    let ctx = HeckeContext::new(field, ell, budget)?;
    let sup = supported_cosets(field, ell)?;
    let r = &ctx.ring;
    let ops: Vec<HeckeOperator> = sup.iter().map(|g| hecke_action_in(&ctx, g)).collect();
    let n = ctx.dim();
    let vol = ctx.bprime.len();
    let identity_is_scalar = ops[0]
        .matrix
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &x)| x == if i == j { vol as i64 } else { 0 }));
    let mut max_off = 0i64;
    for a in &ops {
        for b in &ops {
            let ab = matmul(&a.matrix, &b.matrix);
            let ba = matmul(&b.matrix, &a.matrix);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        max_off = max_off.max((ab[i][j] - ba[i][j]).abs());
                    }
                }
            }
        }
    }
    let n0 = ctx.reps.sigma0.len();
    let small = &ctx.small;
    let beta_index: HashMap<u64, usize> = ctx
        .reps
        .sigma0
        .iter()
        .enumerate()
        .map(|(i, &b)| (r.reduce_to(small, b), i))
        .collect();
    let mut shapes = Vec::new();
    let mut perms = Vec::new();
    for (rep, op) in sup.iter().zip(&ops) {
        let perm = op.permutation();
        let block_preserving = perm
            .as_ref()
            .is_some_and(|p| p.iter().enumerate().all(|(c, &row)| (c < n0) == (row < n0)));
        let shift_pattern = perm.as_ref().is_some_and(|p| {
            let shift = rep.shift.map_or(0, |(k, a)| r.reduce_to(small, r.mul(a, r.pi_pow(k))));
            (0..n0).all(|c| {
                let beta = r.reduce_to(small, ctx.reps.sigma0[c]);
                p[c] == beta_index[&small.add(beta, shift)]
            })
        });
        let matches_literal = if ell <= literal_up_to {
            Some(hecke_action_literal(&ctx, rep, budget)?.matrix == op.matrix)
        } else {
            None
        };
        if let Some(p) = &perm {
            perms.push(p.clone());
        }
        shapes.push(OperatorShape {
            coset: rep.label.to_string(),
            monomial: perm.is_some(),
            block_preserving,
            shift_pattern,
            scalars: op.scalars(),
            order: perm.as_ref().map(|p| perm_order(p)),
            matches_literal,
        });
    }
    // group generated by the permutation parts
    let id: Vec<usize> = (0..n).collect();
    let mut group: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for p in &perms {
            let y: Vec<usize> = x.iter().map(|&i| p[i]).collect();
            if group.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let order = group.len();
    let cyclic = group.iter().any(|p| perm_order(p) == order);
    let end_dim = double_cosets_bell(field, ell)?
        .iter()
        .map(|g| intertwine_dim_formula(field, ell, &g.label))
        .sum();
    Ok(HeckeReport {
        ell,
        dimension: ops.len(),
        basis_size: n,
        volume: vol,
        identity_is_scalar,
        max_off_diagonal_commutator: max_off,
        operators: shapes,
        permutation_group_order: order,
        permutation_group_cyclic: cyclic,
        end_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 5_000_000;

    #[test]
    fn supported_lists() {
        let f = FieldSpec::q2(12);
        let labels = |l| {
            supported_cosets(&f, l)
                .unwrap()
                .iter()
                .map(|r| r.label.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(labels(2), vec!["I"]);
        assert_eq!(labels(3), vec!["I", "g(2,1)"]);
        assert_eq!(labels(5), vec!["I", "g(3,10)", "g(3,11)", "g(4,1)"]);
    }

    #[test]
    fn certificate_small() {
        let f = FieldSpec::q2(12);
        for ell in 1..=3 {
            let rep = commutativity_certificate(&f, ell, 3, BUDGET).unwrap();
            assert!(rep.passed() && rep.shape_passed(), "{rep:?}");
        }
        let g = FieldSpec::laurent(1, 10).unwrap();
        let rep = commutativity_certificate(&g, 4, 0, BUDGET).unwrap();
        assert!(rep.passed() && rep.shape_passed(), "{rep:?}");
    }

    #[test]
    fn char2_ell7_commutes_but_is_not_monomial() {
        let g = FieldSpec::laurent(1, 12).unwrap();
        let rep = commutativity_certificate(&g, 7, 0, BUDGET).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.dimension, 4);
        assert!(!rep.shape_passed());
    }

    #[test]
    fn q2_ell5_orders_and_cyclic_group() {
        let f = FieldSpec::q2(12);
        let rep = commutativity_certificate(&f, 5, 0, BUDGET).unwrap();
        assert!(rep.passed() && rep.shape_passed());
        let orders: Vec<_> = rep.operators.iter().map(|o| o.order.unwrap()).collect();
        assert_eq!(orders, vec![1, 4, 4, 2]);
        assert_eq!(rep.permutation_group_order, 4);
        assert!(rep.permutation_group_cyclic);
        assert_eq!(operator_order(&f, 6, &CosetLabel::Shift { k: 4, alpha: "11".into() }, BUDGET).unwrap(), 4);
    }

    #[test]
    fn q4_is_unsupported() {
        let g = FieldSpec::laurent(2, 8).unwrap();
        assert!(matches!(HeckeContext::new(&g, 2, BUDGET), Err(Error::Unsupported(_))));
    }
}
