//! One line per acceptance criterion; exits nonzero if any fails.

use dyadic_sl2::branching::{
    branching_table, fixed_dim, fixed_dim_at_level, gl2_lce, growth_ratio, growth_ratio_expected, lce2_expand,
    lce_expand, mackey_degree, n_pi, render_table_md,
};
use dyadic_sl2::field::{FieldConfig, FieldSpec, TruncatedScalar};
use dyadic_sl2::finchar::regular_orbits;
use dyadic_sl2::hecke::commutativity_certificate;
use dyadic_sl2::intertwining::{i_intertwine_matrix, intertwine_table, j_is_mackey, sigma_end_dim_report, Zeta};
use dyadic_sl2::matgroups::{double_cosets_bell_brute, normalizer_check_int};
use dyadic_sl2::nilpotent::{orbits_meeting, OrbitCount};
use dyadic_sl2::squares::{brute, canonicalize, rho_image, square_class_count, square_class_reps, Level};
use dyadic_sl2::Result;
use std::time::Instant;

const BUDGET: u64 = 5_000_000;

fn fields() -> Vec<FieldSpec> {
    vec![
        FieldSpec::q2(24),
        FieldSpec::q2_sqrt2(24),
        FieldSpec::laurent(1, 24).unwrap(),
        FieldSpec::laurent(2, 24).unwrap(),
    ]
}

fn q2() -> FieldSpec {
    FieldSpec::q2(24)
}

fn ensure(cond: bool, what: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(dyadic_sl2::Error::Verification(what.into()))
    }
}

fn c1() -> Result<String> {
    let f = q2();
    let full = square_class_reps(&f, Level::Full)?;
    ensure(full.len() == 4, "Q2 has 4 unit square classes")?;
    let mut canon: Vec<String> = [1, 5, -1, -5]
        .iter()
        .map(|&v| canonicalize(&f, &TruncatedScalar::from_int(&f, v), Level::Full).map(|c| c.digits_string()))
        .collect::<Result<_>>()?;
    canon.sort();
    canon.dedup();
    let mut reps: Vec<String> = full.reps().iter().map(|r| r.digits_string()).collect();
    reps.sort();
    ensure(canon == reps, "1, 5, -1, -5 represent the four classes")?;
    for f in fields() {
        for k in 1..=6u32 {
            let formula = square_class_count(&f, Level::Finite(k))?;
            let b = brute::unit_classes(&f, Level::Finite(k).working(&f)?).len() as u64;
            ensure(formula == b, format!("{} |S_{k}| {formula} vs {b}", f.name()))?;
            if f.two_e().is_none_or(|t| k <= t) {
                ensure(formula == f.q().pow(k / 2), format!("{} |S_{k}| = q^⌊k/2⌋", f.name()))?;
            }
        }
    }
    Ok("Q2 classes {1,5,-1,-5}; |S_k| = brute for 4 fields, k ≤ 6".into())
}

fn c2() -> Result<String> {
    for f in fields() {
        for delta in 1..=5u32 {
            let (_, img) = rho_image(&f, delta)?;
            ensure(img == brute::rho_image_pairs(&f, delta), format!("{} δ={delta}", f.name()))?;
        }
        if let Some(te) = f.two_e() {
            let (_, img) = rho_image(&f, te)?;
            ensure(img.len() as u64 == f.q() / 2, format!("{} |image| at δ=2e", f.name()))?;
        }
    }
    Ok("ρ image = pair oracle, δ ≤ 5, 4 fields; q/2 at δ = 2e".into())
}

fn c3() -> Result<String> {
    let f = q2();
    let mut counts = Vec::new();
    for ell in 1..=4 {
        let r = double_cosets_bell_brute(&f, ell, BUDGET)?;
        ensure(r.passed(), format!("ℓ={ell}"))?;
        counts.push(r.orbit_count);
    }
    ensure(counts == [2, 3, 4, 6], format!("{counts:?}"))?;
    Ok(format!("orbit counts {counts:?}"))
}

fn c4() -> Result<String> {
    let f = q2();
    let mut n = 0;
    for ell in 1..=5 {
        for row in intertwine_table(&f, ell, true, BUDGET)? {
            ensure(
                row.brute == Some(row.formula) && row.brute_twisted == Some(row.formula),
                format!("ℓ={ell} {}", row.coset),
            )?;
            ensure([0, 1].contains(&row.formula), "case values for q=2")?;
            n += 1;
        }
    }
    Ok(format!("{n} cosets, ℓ ≤ 5, plain and twisted ψ agree"))
}

fn c5() -> Result<String> {
    let run = |f: &FieldSpec, top: u32| -> Result<Vec<u64>> {
        (1..=top)
            .map(|ell| {
                let r = sigma_end_dim_report(f, ell, true, BUDGET)?;
                ensure(r.passed(), format!("{} ℓ={ell}", f.name()))?;
                Ok(r.closed_form)
            })
            .collect()
    };
    let a = run(&q2(), 5)?;
    let b = run(&FieldSpec::laurent(1, 24)?, 7)?;
    ensure(a == [1, 1, 2, 2, 4], format!("Q2 {a:?}"))?;
    ensure(b == [1, 1, 2, 2, 2, 2, 4], format!("F2((t)) {b:?}"))?;
    Ok(format!("Q2 {a:?}, F2((t)) {b:?}"))
}

fn c6() -> Result<String> {
    let f = q2();
    let mut last = None;
    for ell in 1..=5 {
        let r = commutativity_certificate(&f, ell, 3, BUDGET)?;
        ensure(r.passed() && r.shape_passed(), format!("ℓ={ell}"))?;
        last = Some(r);
    }
    let r = last.unwrap();
    ensure(r.permutation_group_cyclic && r.permutation_group_order == 4, "ℓ=5 group is Z/4")?;
    Ok("commutators diagonal, F_I scalar, monomial shifts, ℓ=5 group cyclic of order 4".into())
}

fn c7() -> Result<String> {
    let f = q2();
    for ell in 2..=5 {
        ensure(normalizer_check_int(&f, 1, ell, BUDGET)?.passed(), format!("Q2 ℓ={ell}"))?;
    }
    let g = FieldSpec::laurent(1, 24)?;
    for ell in 2..=3 {
        ensure(normalizer_check_int(&g, 1, ell, BUDGET)?.passed(), format!("F2((t)) ℓ={ell}"))?;
    }
    Ok("Q2 ℓ = 2..5, F2((t)) ℓ = 2, 3".into())
}

fn c8() -> Result<String> {
    let f = q2();
    for ell in 1..=5 {
        let m = i_intertwine_matrix(&f, ell, Zeta::Trivial, BUDGET)?;
        ensure(m.passed(), format!("ℓ={ell}"))?;
        ensure((0..m.units.len()).all(|i| m.brute[i][i] == 1), format!("diagonal ℓ={ell}"))?;
    }
    let omega = regular_orbits(2)[0].0;
    for ell in 1..=4 {
        ensure(j_is_mackey(&f, ell, omega, BUDGET)?.exact == 1, format!("J ℓ={ell}"))?;
    }
    Ok("I matrices match S_m collisions, ℓ ≤ 5; J ℓ ≤ 4 is 1".into())
}

fn c9() -> Result<String> {
    let f = q2();
    let md = render_table_md(&branching_table(&f, 0, 6)?, &branching_table(&f, 1, 5)?);
    let expected = "| depth | # components | degree | depth | # components | degree |\n\
                    |---|---|---|---|---|---|\n\
                    | 0 | 1 | 1 |  |  |  |\n\
                    | 2 | 1 | 6 | 1 | 1 | 3 |\n\
                    | 4 | 2 | 12 | 3 | 2 | 6 |\n\
                    | 6 | 4 | 24 | 5 | 4 | 12 |\n";
    ensure(md == expected, "table layout")?;
    let t0 = branching_table(&f, 0, 12)?;
    let t1 = branching_table(&f, 1, 13)?;
    for k in 4..=6u32 {
        let r = t0.rows.iter().find(|r| r.depth == 2 * k).unwrap();
        ensure((r.count, r.degree) == (4, 3 * 2u64.pow(2 * k - 3)), format!("π0 depth {}", 2 * k))?;
        ensure(r.count * r.degree == mackey_degree(&f, 2 * k)?, "degree conservation")?;
    }
    for k in 3..=6u32 {
        let r = t1.rows.iter().find(|r| r.depth == 2 * k + 1).unwrap();
        ensure((r.count, r.degree) == (4, 3 * 2u64.pow(2 * k - 2)), format!("π1 depth {}", 2 * k + 1))?;
    }
    Ok("ℚ₂ low-depth rows reproduced; general rows through k = 6".into())
}

fn c10() -> Result<String> {
    let f = q2();
    ensure(fixed_dim_at_level(&f, 0, 5)? == 31, "dim π0^{K'_5}")?;
    let (a, b) = (n_pi(&f, 0)?, n_pi(&f, 1)?);
    ensure((a, b) == (-41, -21), format!("n_π = {a}, {b}"))?;
    for n in 1..=6u32 {
        let d0 = fixed_dim(&f, 0, n)?;
        let d1 = fixed_dim(&f, 1, n)?;
        ensure(d0.formula == 2u64.pow(2 * n - 1) - 1 && d0.tally == d0.formula, format!("π0 n={n}"))?;
        ensure(d1.formula == 2u64.pow(2 * n) - 1 && d1.tally == d1.formula, format!("π1 n={n}"))?;
    }
    let growth_fields = [
        FieldSpec::q2(24),
        FieldSpec::q2_sqrt2(24),
        FieldSpec::new(FieldConfig::preset("q4", 24).unwrap())?,
        FieldSpec::new(FieldConfig::eisenstein(2, vec![-2, 0, 1], 24))?,
    ];
    for g in &growth_fields {
        let (q, e) = (g.q(), g.e().finite().unwrap());
        let mut cases = [false; 4];
        for n in 1..=4 * e + 6 {
            // (numerator, denominator, case)
            let (num, den, case) = match n {
                n if n + 3 <= 4 * e => (q.pow(3), 1, 0),
                n if n < 4 * e => (q.pow(3), 2, 1),
                n if n <= 4 * e + 1 => (q.pow(4), 2, 2),
                _ => (q.pow(4), 1, 3),
            };
            let r = growth_ratio(g, n)?;
            ensure(*r.numer() * den == num * *r.denom(), format!("{} n={n} ratio {r}", g.name()))?;
            ensure(r == growth_ratio_expected(g, n), format!("{} n={n}", g.name()))?;
            cases[case] = true;
        }
        ensure(cases.iter().all(|&c| c), format!("{} covers all four cases", g.name()))?;
    }
    let one = TruncatedScalar::one(&f);
    let counts: Vec<OrbitCount> = (1..=3)
        .map(|gap| orbits_meeting(&f, &one, 0, gap, None).map(|m| m.count))
        .collect::<Result<_>>()?;
    ensure(
        counts == [OrbitCount::Finite(4), OrbitCount::Finite(2), OrbitCount::Finite(1)],
        format!("{counts:?}"),
    )?;
    Ok("31; n_π -41, -21; fixed dims 2n ≤ 12; growth cases; meeting counts 4/2/1".into())
}

fn c11() -> Result<String> {
    let mut witnesses = Vec::new();
    for f in [FieldSpec::q2(24), FieldSpec::q2_sqrt2(24)] {
        let e = f.e().finite().unwrap();
        for i in 0..2u8 {
            let c = lce_expand(&f, i, None)?;
            ensure(c.passed(), format!("{} π{i}", f.name()))?;
            if i == 0 {
                ensure(c.collision_depth == Some(4 * e), format!("{} witness depth", f.name()))?;
                witnesses.push(4 * e);
            }
        }
    }
    for f in fields() {
        for ell in 1..=7u32 {
            let c = lce2_expand(&f, (ell % 2) as u8, ell, None)?;
            let want = square_class_count(&f, Level::Finite(ell.div_ceil(2)))?;
            ensure(c.passed() && c.summands as u64 == want, format!("{} ℓ={ell}", f.name()))?;
        }
    }
    for f in [FieldSpec::q2(24), FieldSpec::laurent(2, 24)?] {
        let c = gl2_lce(&f, 10)?;
        ensure(c.passed() && c.coefficient == 1 - f.q() as i64, format!("{} coefficient", f.name()))?;
    }
    Ok(format!("collision witnesses at depth {witnesses:?}; LCE2 ℓ ≤ 7 on 4 fields; GL(2) coefficient 1-q"))
}

fn main() {
    let criteria: [(&str, fn() -> Result<String>); 11] = [
        ("square classes", c1),
        ("rho image", c2),
        ("double cosets", c3),
        ("intertwining table", c4),
        ("end dimensions", c5),
        ("hecke algebra", c6),
        ("normalizers", c7),
        ("irreducibility and distinctness", c8),
        ("branching tables", c9),
        ("fixed vectors, growth, orbits", c10),
        ("local expansions", c11),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", n + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e} ({secs:.1}s)", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
