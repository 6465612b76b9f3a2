//! The verification ledger: every closed form in the crate checked against
//! its brute-force route for one field, in a fixed order.

use crate::branching::{
    branching_table, fixed_dim, gl2_lce, growth_ratio, growth_ratio_expected, lce2_expand, lce_expand, n_pi,
};
use crate::error::{Error, Result};
use crate::field::{FieldConfig, FieldSpec, TruncatedScalar};
use crate::finchar::{regular_orbits, Gl2Table};
use crate::hecke::commutativity_certificate;
use crate::intertwining::{i_intertwine_matrix, j_is_mackey, sigma_end_dim_report, Zeta};
use crate::matgroups::{double_cosets_bell_brute, normalizer_check_int};
use crate::nilpotent::{orbits_meeting, orbits_meeting_count, OrbitCount};
use crate::report::{OutputFormat, Report};
use crate::squares::{brute, rho_image, square_class_count, Level};
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Everything a run needs; validated before any computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub budget: u64,
    pub verify: bool,
    pub format: OutputFormat,
    /// Largest ℓ for the finite-group checks; per-field default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ell: Option<u32>,
    /// Depth bound for branching tables and label identities.
    pub depth_bound: u32,
    /// Adds wall-clock times to the ledger (makes output nondeterministic).
    #[serde(default)]
    pub timings: bool,
}

impl RunConfig {
    pub fn new(field: FieldConfig) -> Self {
        RunConfig {
            field,
            budget: DEFAULT_BUDGET,
            verify: true,
            format: OutputFormat::Json,
            max_ell: None,
            depth_bound: 12,
            timings: false,
        }
    }

    /// Builds the field and checks budget, depth and precision.
    pub fn validate(&self) -> Result<FieldSpec> {
        if self.budget == 0 {
            return Err(Error::OutOfRange("budget must be positive".into()));
        }
        let field = FieldSpec::new(self.field.clone())?;
        let l = self.max_ell_for(&field);
        if l == 0 {
            return Err(Error::OutOfRange("max ℓ must be ≥ 1".into()));
        }
        field.require_precision(l.max(self.depth_bound) + 2)?;
        Ok(field)
    }

    /// q = 2: 5 in characteristic 0 and 7 in characteristic 2; otherwise 2.
    pub fn max_ell_for(&self, field: &FieldSpec) -> u32 {
        self.max_ell.unwrap_or(match (field.q(), field.characteristic()) {
            (2, 2) => 7,
            (2, _) => 5,
            _ => 2,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerEntry {
    pub group: &'static str,
    pub check: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ledger {
    pub field: String,
    pub max_ell: u32,
    pub depth_bound: u32,
    pub budget: u64,
    pub entries: Vec<LedgerEntry>,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl Ledger {
    /// 0 if everything passed, 2 if anything could not run, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.errors > 0 {
            2
        } else if self.failed > 0 {
            1
        } else {
            0
        }
    }

    pub fn report(&self) -> Report {
        let rows = self
            .entries
            .iter()
            .map(|e| {
                let mut r = vec![
                    e.group.to_string(),
                    e.check.clone(),
                    format!("{:?}", e.status).to_lowercase(),
                    e.detail.clone(),
                ];
                if let Some(ms) = e.millis {
                    r.push(ms.to_string());
                }
                r
            })
            .collect();
        let mut headers = vec!["group", "check", "status", "detail"];
        if self.entries.iter().any(|e| e.millis.is_some()) {
            headers.push("ms");
        }
        Report::new("verify.ledger/1", self).table(&headers, rows)
    }
}

struct Recorder {
    timings: bool,
    entries: Vec<LedgerEntry>,
}

impl Recorder {
    /// Runs one check; `f` returns (passed, detail).
    fn run(&mut self, group: &'static str, check: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) {
        let t = Instant::now();
        let (status, detail) = match f() {
            Ok((true, d)) => (Status::Pass, d),
            Ok((false, d)) => (Status::Fail, d),
            Err(e @ Error::Verification(_)) => (Status::Fail, e.to_string()),
            Err(e) => (Status::Error, e.to_string()),
        };
        self.entries.push(LedgerEntry {
            group,
            check: check.into(),
            status,
            detail,
            millis: self.timings.then(|| t.elapsed().as_millis() as u64),
        });
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Runs every check for the configured field.
pub fn run_verify(config: &RunConfig) -> Result<Ledger> {
    let field = config.validate()?;
    let f = &field;
    let l = config.max_ell_for(f);
    let budget = config.budget;
    let q = f.q();
    // checks that enumerate all of SL(2, R/P^{ℓ+1})
    let full_cap = if q == 2 { 5 } else { 2 };
    let mut rec = Recorder {
        timings: config.timings,
        entries: Vec::new(),
    };

    // square classes
    for k in 1..=6u32 {
        rec.run("squares", format!("|S_{k}|"), || {
            let formula = square_class_count(f, Level::Finite(k))?;
            let n = Level::Finite(k).working(f)?;
            crate::error::budget_check("units of R/P^k", (q as u128).pow(n), budget)?;
            let b = brute::unit_classes(f, n).len() as u64;
            Ok((formula == b, format!("formula {formula}, brute {b}")))
        });
    }
    if let Some(te) = f.two_e() {
        rec.run("squares", "|S| (full)", || {
            let formula = square_class_count(f, Level::Full)?;
            let b = brute::unit_classes(f, te + 1).len() as u64;
            Ok((formula == b, format!("formula {formula}, brute {b}")))
        });
    }
    for delta in 1..=5u32 {
        rec.run("squares", format!("rho image δ={delta}"), || {
            let (case, img) = rho_image(f, delta)?;
            let b = brute::rho_image_pairs(f, delta);
            Ok((img == b, format!("{case:?} [{}]", join(&img))))
        });
    }

    // double cosets
    for ell in 1..=l.min(4).min(full_cap) {
        rec.run("groups", format!("double cosets ℓ={ell}"), || {
            let r = double_cosets_bell_brute(f, ell, budget)?;
            Ok((r.passed(), format!("formula {}, orbits {}", r.formula_count, r.orbit_count)))
        });
    }

    // intertwining table and Σ(ℓ), from one brute-force pass each
    for ell in 1..=l {
        let report = sigma_end_dim_report(f, ell, config.verify, budget);
        let r2 = report.clone();
        rec.run("intertwine", format!("per-coset dims ℓ={ell}"), move || {
            let r = r2?;
            let ok = r.rows.iter().all(|c| c.passed());
            let d = r
                .rows
                .iter()
                .map(|c| format!("{}:{}", c.coset, c.formula))
                .collect::<Vec<_>>()
                .join(" ");
            Ok((ok, d))
        });
        rec.run("intertwine", format!("Σ({ell})"), move || {
            let r = report?;
            Ok((r.passed(), format!("Σ({ell})={}", r.closed_form)))
        });
    }

    // Hecke algebra
    if q == 2 {
        for ell in 1..=l {
            rec.run("hecke", format!("commutativity ℓ={ell}"), || {
                let r = commutativity_certificate(f, ell, 3, budget)?;
                let shape = ell > 5 || r.shape_passed();
                // over Q2 the permutation parts generate Z/4 from ℓ = 5 on
                let cyclic4 = ell < 5 || f.characteristic() != 0 || f.e().finite() != Some(1) || {
                    r.permutation_group_cyclic && r.permutation_group_order == 4
                };
                Ok((
                    r.passed() && shape && cyclic4,
                    format!(
                        "dim {} basis {} monomial {} group order {}",
                        r.dimension,
                        r.basis_size,
                        r.shape_passed(),
                        r.permutation_group_order
                    ),
                ))
            });
        }
    }

    // normalizers
    let norm_cap = if f.characteristic() == 2 { 3 } else { full_cap };
    for ell in 2..=l.min(norm_cap) {
        rec.run("groups", format!("normalizer ℓ={ell}"), || {
            let r = normalizer_check_int(f, 1, ell, budget)?;
            Ok((r.passed(), format!("GL level {}, SL level {}", r.gl_level, r.sl_level)))
        });
    }

    // irreducibility and distinctness
    for ell in 1..=l.min(full_cap) {
        rec.run("intertwine", format!("I(1,u,{ell}) matrix"), || {
            let r = i_intertwine_matrix(f, ell, Zeta::Trivial, budget)?;
            Ok((r.passed(), format!("{} units, {} double cosets", r.units.len(), r.double_cosets)))
        });
    }
    let omega = regular_orbits(q)[0].0;
    for ell in 1..=l.min(4).min(full_cap) {
        rec.run("intertwine", format!("J(ω,{ell}) vs Mackey"), || {
            let ip = j_is_mackey(f, ell, omega, budget)?;
            Ok((ip.exact == 1, format!("dim Hom = {}", ip.exact)))
        });
    }
    rec.run("chars", format!("GL(2,𝔽_{q}) table orthogonality"), || {
        let bad = Gl2Table::new(f.f())?.orthogonality_defects()?;
        Ok((bad == 0, format!("{bad} defects")))
    });

    // branching
    let bound = config.depth_bound;
    for i in 0..2u8 {
        rec.run("branch", format!("table π{i} to depth {bound}"), || {
            let t = branching_table(f, i, bound)?;
            let d = t
                .rows
                .iter()
                .map(|r| format!("({},{},{})", r.depth, r.count, r.degree))
                .collect::<String>();
            Ok((true, d))
        });
    }
    if q == 2 && f.e().finite() == Some(1) {
        rec.run("branch", "ℚ₂ low-depth rows", || {
            let rows = |i, b| -> Result<Vec<(u32, u64, u64)>> {
                Ok(branching_table(f, i, b)?.rows.iter().map(|r| (r.depth, r.count, r.degree)).collect())
            };
            let ok = rows(0, 6)? == [(0, 1, 1), (2, 1, 6), (4, 2, 12), (6, 4, 24)]
                && rows(1, 5)? == [(1, 1, 3), (3, 2, 6), (5, 4, 12)];
            Ok((ok, "π0 (0,1,1)(2,1,6)(4,2,12)(6,4,24); π1 (1,1,3)(3,2,6)(5,4,12)".into()))
        });
    }

    // fixed vectors, growth, local expansions
    for i in 0..2u8 {
        rec.run("ledger", format!("fixed_dim π{i}, 2n ≤ 12"), || {
            let v: Result<Vec<u64>> = (1..=6).map(|n| fixed_dim(f, i, n).map(|d| d.formula)).collect();
            Ok((true, join(&v?)))
        });
    }
    let growth_top = match f.e().finite() {
        Some(e) => 4 * e + 6,
        None => 8,
    };
    rec.run("ledger", format!("growth ratios n ≤ {growth_top}"), || {
        let mut out = Vec::new();
        let mut ok = true;
        for n in 1..=growth_top {
            let r = growth_ratio(f, n)?;
            ok &= r == growth_ratio_expected(f, n);
            out.push(r.to_string());
        }
        Ok((ok, join(&out)))
    });
    if f.characteristic() == 0 {
        for i in 0..2u8 {
            rec.run("ledger", format!("n_π{i}"), || {
                let n = n_pi(f, i)?;
                let c = lce_expand(f, i, None)?;
                Ok((n < 0 && c.n_pi_tally == n, format!("n_π{i}={n}")))
            });
            rec.run("lce", format!("LCE π{i}"), || {
                let c = lce_expand(f, i, None)?;
                Ok((
                    c.passed(),
                    format!(
                        "bound {}, collision at depth {}",
                        c.bound,
                        c.collision_depth.map_or("none".into(), |d| d.to_string())
                    ),
                ))
            });
        }
    }
    for ell in 1..=7u32 {
        rec.run("lce", format!("LCE2 ℓ={ell}"), || {
            let c = lce2_expand(f, (ell % 2) as u8, ell, None)?;
            Ok((c.passed(), format!("{} summands, bound {}", c.summands, c.bound)))
        });
    }
    rec.run("lce", "GL(2) expansion", || {
        let c = gl2_lce(f, bound)?;
        Ok((c.passed(), format!("coefficient {}", c.coefficient)))
    });
    rec.run("nilp", "orbits meeting a degenerate coset, gap 1..5", || {
        let one = TruncatedScalar::one(f);
        let mut counts = Vec::new();
        let mut ok = true;
        for gap in 1..=5i64 {
            let m = orbits_meeting(f, &one, 0, gap, None)?;
            ok &= m.count == orbits_meeting_count(f, gap as u32);
            if let OrbitCount::Finite(n) = m.count {
                ok &= n as usize == m.orbits.len();
            }
            counts.push(m.count.to_string());
        }
        Ok((ok, join(&counts)))
    });

    let entries = rec.entries;
    let count = |s| entries.iter().filter(|e| e.status == s).count();
    Ok(Ledger {
        field: f.name(),
        max_ell: l,
        depth_bound: bound,
        budget,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        errors: count(Status::Error),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let mut c = RunConfig::new(FieldConfig::preset("q2sqrt2", 20).unwrap());
        c.max_ell = Some(3);
        c.format = OutputFormat::Md;
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = RunConfig::new(FieldConfig::q2(4));
        assert!(matches!(c.validate(), Err(Error::Precision { .. })));
        c.field = FieldConfig::q2(20);
        c.budget = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn tiny_budget_is_a_resource_error() {
        let mut c = RunConfig::new(FieldConfig::q2(20));
        c.budget = 10;
        let l = run_verify(&c).unwrap();
        assert!(l.errors > 0);
        assert_eq!(l.exit_code(), 2);
    }
}
