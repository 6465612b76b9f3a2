use clap::{Args, Parser, Subcommand};
use dyadic_sl2::branching::{
    branching_table, fixed_dim, gl2_lce, growth_ratio, growth_ratio_expected, lce2_expand, lce_expand, n_pi,
    render_table_md, two_step_ratios,
};
use dyadic_sl2::field::{parse_scalar, FieldConfig, FieldSpec, Ring};
use dyadic_sl2::finchar::{count_cuspidals, regular_orbits, Gl2Table};
use dyadic_sl2::hecke::{commutativity_certificate, hecke_action_in, hecke_action_literal, operator_order, supported_cosets, HeckeContext};
use dyadic_sl2::intertwining::{
    i_intertwine, intertwine_dim_coset, intertwine_table, j_is_mackey, sigma_end_dim, sigma_end_dim_report, Zeta,
};
use dyadic_sl2::matgroups::{
    coset_reps_bell, coset_reps_bell_brute, double_cosets_bell, double_cosets_bell_brute, enumerate_group,
    group_order, normalizer_check_int, normalizer_closed_form, CosetLabel, Flavor,
};
use dyadic_sl2::nilpotent::{
    kprime_equiv_witness, kprime_orbit_equiv, orbit_label, orbits_meeting, orbits_meeting_count, t_set, wavefront,
};
use dyadic_sl2::report::{OutputFormat, Report};
use dyadic_sl2::squares::{brute, canonicalize, rho_image, square_class_count, square_class_reps, Level};
use dyadic_sl2::verify::{run_verify, RunConfig, DEFAULT_BUDGET};
use dyadic_sl2::{Error, Result};
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dyadic-sl2", version, about = "Exact SL(2) branching computations over dyadic local fields")]
struct Cli {
    /// Preset (q2, q2sqrt2, q2sqrt-2, q4, f2t, f4t, f8t, f16t) or a TOML file.
    #[arg(long, global = true, default_value = "q2")]
    field: String,
    /// Working precision in digits; overrides N from a TOML file.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Largest number of group elements any enumeration may touch.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Also run the brute-force oracle and compare.
    #[arg(long, global = true)]
    verify: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Field invariants.
    Field,
    #[command(subcommand)]
    Squares(SquaresCmd),
    #[command(subcommand)]
    Groups(GroupsCmd),
    #[command(subcommand)]
    Chars(CharsCmd),
    #[command(subcommand)]
    Intertwine(IntertwineCmd),
    #[command(subcommand)]
    Hecke(HeckeCmd),
    #[command(subcommand)]
    Nilp(NilpCmd),
    #[command(subcommand)]
    Branch(BranchCmd),
    /// Run every check and print the ledger.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum SquaresCmd {
    /// Square-class representatives at a level (an integer or "full").
    Reps {
        #[arg(long, default_value = "full")]
        level: String,
    },
    /// Canonical representative of a unit.
    Canon {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, default_value = "full")]
        level: String,
    },
    /// Image of ρ on the ϖ^δ digit.
    Rho {
        #[arg(long)]
        delta: u32,
    },
}

#[derive(Subcommand)]
enum GroupsCmd {
    /// Order of SL(2) or GL(2) over R/P^n.
    Enum {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        gl: bool,
        /// Include every element (needs --verify).
        #[arg(long)]
        list: bool,
    },
    /// Double coset representatives of B'\K'/B'.
    Dcosets {
        #[arg(long)]
        ell: u32,
    },
    /// Coset representatives of B'\K'.
    Cosets {
        #[arg(long)]
        ell: u32,
    },
    /// Normalizer of the character η_u.
    Normalizer {
        #[arg(long)]
        ell: u32,
        #[arg(long, default_value_t = 1)]
        u: i64,
    },
}

#[derive(Subcommand)]
enum CharsCmd {
    /// Character table of GL(2, 𝔽_q), q = 2^f.
    Table {
        #[arg(long)]
        f: Option<u32>,
    },
    /// Number and degree of cuspidal representations.
    Cuspidal {
        #[arg(long)]
        q: Option<u64>,
    },
}

#[derive(Subcommand)]
enum IntertwineCmd {
    /// Intertwining dimension at one double coset.
    Coset {
        #[arg(long)]
        ell: u32,
        /// I, w or g(k,digits).
        #[arg(long)]
        gamma: String,
    },
    /// Intertwining dimensions at every double coset.
    Table {
        #[arg(long)]
        ell: u32,
    },
    /// dim End σ(ℓ).
    EndDim {
        #[arg(long)]
        ell: u32,
    },
    /// dim Hom between I(ζ,u,ℓ) and I(ζ,u',ℓ).
    Irrep {
        #[arg(long)]
        ell: u32,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        u2: String,
        /// Depth-zero ζ as an exponent of the residue field character group.
        #[arg(long)]
        zeta: Option<u64>,
    },
    /// dim Hom(J(ω,ℓ), Mackey) for the first regular ω.
    Jmackey {
        #[arg(long)]
        ell: u32,
    },
}

#[derive(Subcommand)]
enum HeckeCmd {
    /// Action matrix of one basis operator (q = 2).
    Action {
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        gamma: String,
    },
    /// Commutativity certificate for all supported operators.
    Commute {
        #[arg(long)]
        ell: u32,
    },
    /// Order of the permutation part of one operator.
    Order {
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        gamma: String,
    },
}

#[derive(Subcommand)]
enum NilpCmd {
    /// Orbit label of X_v.
    Label {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value = "full")]
        level: String,
    },
    /// Orbits met by the degenerate coset at (u, s, t).
    Meet {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        u: String,
        #[arg(long, default_value_t = 0)]
        s: i64,
        #[arg(long)]
        t: i64,
        #[arg(long)]
        trunc: Option<u32>,
    },
    /// Whether two degenerate cosets lie in one K'-orbit.
    Equiv {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        u2: String,
        #[arg(long, default_value_t = 0)]
        s: i64,
        #[arg(long)]
        t: i64,
    },
    /// The set T_{u,ℓ} through a depth bound.
    Tset {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        bound: u32,
    },
    /// Nonzero orbits of parity i.
    Wf {
        #[arg(long)]
        i: u8,
        #[arg(long)]
        trunc: Option<u32>,
    },
}

#[derive(Subcommand)]
enum BranchCmd {
    /// Branching table; both vertices when --i is omitted.
    Table {
        #[arg(long)]
        i: Option<u8>,
        #[arg(long, default_value_t = 6)]
        bound: u32,
    },
    /// dim of fixed vectors under the level-2n congruence subgroup.
    Fixed {
        #[arg(long)]
        i: u8,
        #[arg(long)]
        n: u32,
    },
    /// Ratio of largest degrees at consecutive depths.
    Growth {
        #[arg(long)]
        n: u32,
    },
    /// Coefficient of the trivial representation in the local expansion.
    Npi {
        #[arg(long)]
        i: u8,
    },
    Lce {
        #[arg(long)]
        i: u8,
        #[arg(long)]
        bound: Option<u32>,
    },
    Lce2 {
        #[arg(long)]
        i: u8,
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        bound: Option<u32>,
    },
    Gl2lce {
        #[arg(long, default_value_t = 12)]
        bound: u32,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest ℓ for the group checks.
    #[arg(long)]
    max_ell: Option<u32>,
    #[arg(long, default_value_t = 12)]
    depth_bound: u32,
    /// Record wall-clock time per check.
    #[arg(long)]
    timings: bool,
    /// Read the whole run configuration from a JSON file.
    #[arg(long)]
    config: Option<String>,
}

/// A rendered result and its exit code.
struct Outcome {
    report: Report,
    code: i32,
}

/// `ok` is false when a formula and its oracle disagreed.
fn out(report: Report, ok: bool) -> Result<Outcome> {
    Ok(Outcome {
        report,
        code: if ok { 0 } else { 1 },
    })
}

fn field_config(cli: &Cli) -> Result<FieldConfig> {
    let precision = cli.precision.unwrap_or(24);
    if let Some(c) = FieldConfig::preset(&cli.field, precision) {
        return Ok(c);
    }
    let text = std::fs::read_to_string(&cli.field)
        .map_err(|e| Error::InvalidField(format!("{}: not a preset and not readable ({e})", cli.field)))?;
    let mut c = FieldConfig::from_toml(&text)?;
    if let Some(p) = cli.precision {
        c.precision = p;
    }
    Ok(c)
}

fn parse_level(s: &str) -> Result<Level> {
    if s.eq_ignore_ascii_case("full") {
        return Ok(Level::Full);
    }
    s.parse()
        .map(Level::Finite)
        .map_err(|_| Error::Parse(format!("level {s:?}: expected an integer or \"full\"")))
}

fn find_coset<T>(items: Vec<T>, label: &CosetLabel, get: impl Fn(&T) -> &CosetLabel) -> Result<T> {
    items
        .into_iter()
        .find(|x| get(x) == label)
        .ok_or_else(|| Error::OutOfRange(format!("{label} is not a listed representative")))
}

fn unit_code(f: &FieldSpec, ring: &Ring, s: &str) -> Result<u64> {
    let x = parse_scalar(f, s)?.to_ring(ring)?;
    if !ring.is_unit(x) {
        return Err(Error::NotAUnit(s.into()));
    }
    Ok(x)
}

fn matrix_rows(m: &[Vec<i64>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

fn run(cli: &Cli) -> Result<Outcome> {
    let budget = cli.budget;
    let verify = cli.verify;
    if budget == 0 {
        return Err(Error::OutOfRange("budget must be positive".into()));
    }
    if let Verb::Verify(a) = &cli.verb {
        let config = match &a.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig {
                field: field_config(cli)?,
                budget,
                verify: true,
                format: cli.format,
                max_ell: a.max_ell,
                depth_bound: a.depth_bound,
                timings: a.timings,
            },
        };
        let ledger = run_verify(&config)?;
        return Ok(Outcome {
            report: ledger.report(),
            code: ledger.exit_code(),
        });
    }
    let f = &FieldSpec::new(field_config(cli)?)?;
    match &cli.verb {
        Verb::Verify(_) => unreachable!(),
        Verb::Field => {
            let c = f.config();
            let body = json!({
                "field": f.name(),
                "characteristic": f.characteristic(),
                "q": f.q(),
                "f": f.f(),
                "e": f.e().finite(),
                "precision": f.precision(),
                "different_exponent": f.different_exponent(),
                "config": c,
            });
            out(Report::new("field/1", body), true)
        }
        Verb::Squares(cmd) => squares(f, cmd, verify),
        Verb::Groups(cmd) => groups(f, cmd, verify, budget),
        Verb::Chars(cmd) => chars(f, cmd, verify),
        Verb::Intertwine(cmd) => intertwine(f, cmd, verify, budget),
        Verb::Hecke(cmd) => hecke(f, cmd, verify, budget),
        Verb::Nilp(cmd) => nilp(f, cmd, verify, budget),
        Verb::Branch(cmd) => branch(f, cmd, verify),
    }
}

fn squares(f: &FieldSpec, cmd: &SquaresCmd, verify: bool) -> Result<Outcome> {
    match cmd {
        SquaresCmd::Reps { level } => {
            let level = parse_level(level)?;
            let reps = square_class_reps(f, level)?;
            let count = square_class_count(f, level)?;
            let mut body = json!({
                "field": f.name(),
                "level": level.to_string(),
                "count": count,
                "reps": reps.digit_strings(),
            });
            let mut ok = count as usize == reps.len();
            if verify {
                let b = brute::unit_classes(f, level.working(f)?).len();
                body["brute_count"] = json!(b);
                ok &= b == reps.len();
            }
            let rows = reps.digit_strings().into_iter().map(|r| vec![r]).collect();
            out(Report::new("squares.reps/1", body).table(&["rep"], rows), ok)
        }
        SquaresCmd::Canon { u, level } => {
            let level = parse_level(level)?;
            let x = parse_scalar(f, u)?;
            let c = canonicalize(f, &x, level)?;
            let body = json!({
                "field": f.name(),
                "level": level.to_string(),
                "input": x.digits_string(),
                "rep": c.digits_string(),
            });
            out(Report::new("squares.canon/1", body), true)
        }
        SquaresCmd::Rho { delta } => {
            let (case, img) = rho_image(f, *delta)?;
            let mut body = json!({
                "field": f.name(),
                "delta": delta,
                "case": case,
                "image": img,
            });
            let mut ok = true;
            if verify {
                let pairs = brute::rho_image_pairs(f, *delta);
                let direct = brute::rho_image_direct(f, *delta);
                ok = pairs == img && direct == img;
                body["brute_pairs"] = json!(pairs);
                body["brute_direct"] = json!(direct);
            }
            out(Report::new("squares.rho/1", body), ok)
        }
    }
}

fn groups(f: &FieldSpec, cmd: &GroupsCmd, verify: bool, budget: u64) -> Result<Outcome> {
    match cmd {
        GroupsCmd::Enum { level, gl, list } => {
            let flavor = if *gl { Flavor::Gl } else { Flavor::Sl };
            f.require_precision(*level)?;
            let order = group_order(f.q(), *level, flavor);
            let mut body = json!({"field": f.name(), "level": level, "flavor": flavor, "order": order.to_string()});
            let mut ok = true;
            let mut rows = Vec::new();
            if verify || *list {
                let ring = Ring::new(f, *level);
                let elems = enumerate_group(&ring, flavor, budget)?;
                ok = elems.len() as u128 == order;
                body["enumerated"] = json!(elems.len());
                if *list {
                    rows = elems.iter().map(|g| g.digit_strings(&ring).to_vec()).collect();
                    body["elements"] = json!(rows);
                }
            }
            out(Report::new("groups.enum/1", body).table(&["a", "b", "c", "d"], rows), ok)
        }
        GroupsCmd::Dcosets { ell } => {
            let reps = double_cosets_bell(f, *ell)?;
            let ring = Ring::new(f, ell + 1);
            let rows: Vec<Vec<String>> = reps
                .iter()
                .map(|r| {
                    let [a, b, c, d] = r.matrix.digit_strings(&ring);
                    vec![r.label.to_string(), a, b, c, d]
                })
                .collect();
            let mut body = json!({
                "field": f.name(),
                "ell": ell,
                "count": reps.len(),
                "reps": rows.iter().map(|r| json!({"label": r[0], "matrix": &r[1..]})).collect::<Vec<_>>(),
            });
            let mut ok = true;
            if verify {
                let r = double_cosets_bell_brute(f, *ell, budget)?;
                ok = r.passed();
                body["brute"] = json!(r);
            }
            out(Report::new("groups.dcosets/1", body).table(&["label", "a", "b", "c", "d"], rows), ok)
        }
        GroupsCmd::Cosets { ell } => {
            let reps = coset_reps_bell(f, *ell)?;
            let rows: Vec<Vec<String>> = reps.matrices().iter().map(|g| g.digit_strings(&reps.ring).to_vec()).collect();
            let mut body = json!({"field": f.name(), "ell": ell, "count": reps.len(), "reps": rows});
            let mut ok = true;
            if verify {
                let r = coset_reps_bell_brute(f, *ell, budget)?;
                ok = r.passed();
                body["brute"] = json!(r);
            }
            out(Report::new("groups.cosets/1", body).table(&["a", "b", "c", "d"], rows), ok)
        }
        GroupsCmd::Normalizer { ell, u } => {
            let (gl, sl) = normalizer_closed_form(f, *ell);
            let mut body = json!({"field": f.name(), "ell": ell, "u": u, "gl": gl, "sl": sl});
            let mut ok = true;
            if verify {
                let r = normalizer_check_int(f, *u, *ell, budget)?;
                ok = r.passed();
                body["brute"] = json!(r);
            }
            out(Report::new("groups.normalizer/1", body), ok)
        }
    }
}

fn chars(f: &FieldSpec, cmd: &CharsCmd, verify: bool) -> Result<Outcome> {
    match cmd {
        CharsCmd::Table { f: deg } => {
            let t = Gl2Table::new(deg.unwrap_or(f.f()))?;
            let classes = t.classes();
            let mut rows = Vec::new();
            let mut body_rows = Vec::new();
            for row in t.rows() {
                let vals: Vec<String> = classes
                    .iter()
                    .map(|(c, _)| t.value(row, *c).map(|v| v.render()))
                    .collect::<Result<_>>()?;
                body_rows.push(json!({"row": format!("{row:?}"), "degree": t.degree(row), "values": vals}));
                let mut r = vec![format!("{row:?}")];
                r.extend(vals);
                rows.push(r);
            }
            let mut headers = vec!["character".to_string()];
            headers.extend(classes.iter().map(|(c, _)| format!("{c:?}")));
            let mut body = json!({
                "q": t.q(),
                "classes": classes.iter().map(|(c, n)| json!({"class": format!("{c:?}"), "size": n})).collect::<Vec<_>>(),
                "rows": body_rows,
            });
            let mut ok = true;
            if verify {
                let bad = t.orthogonality_defects()?;
                body["orthogonality_defects"] = json!(bad);
                ok = bad == 0;
            }
            let h: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
            out(Report::new("chars.table/1", body).table(&h, rows), ok)
        }
        CharsCmd::Cuspidal { q } => {
            let c = count_cuspidals(q.unwrap_or(f.q()))?;
            out(Report::new("chars.cuspidal/1", c), true)
        }
    }
}

fn intertwine(f: &FieldSpec, cmd: &IntertwineCmd, verify: bool, budget: u64) -> Result<Outcome> {
    match cmd {
        IntertwineCmd::Coset { ell, gamma } => {
            let label: CosetLabel = gamma.parse()?;
            let rep = find_coset(double_cosets_bell(f, *ell)?, &label, |r| &r.label)?;
            let row = intertwine_dim_coset(f, *ell, &rep, verify, budget)?;
            let ok = row.passed();
            out(Report::new("intertwine.coset/1", row), ok)
        }
        IntertwineCmd::Table { ell } => {
            let rows = intertwine_table(f, *ell, verify, budget)?;
            let ok = rows.iter().all(|r| r.passed());
            let opt = |x: Option<i64>| x.map_or(String::new(), |v| v.to_string());
            let t = rows
                .iter()
                .map(|r| vec![r.coset.clone(), r.formula.to_string(), opt(r.brute), opt(r.brute_twisted)])
                .collect();
            let body = json!({"field": f.name(), "ell": ell, "rows": rows});
            out(
                Report::new("intertwine.table/1", body).table(&["coset", "formula", "brute", "brute_twisted"], t),
                ok,
            )
        }
        IntertwineCmd::EndDim { ell } => {
            if verify {
                let r = sigma_end_dim_report(f, *ell, true, budget)?;
                let ok = r.passed();
                out(Report::new("intertwine.end_dim/1", r), ok)
            } else {
                let d = sigma_end_dim(f, *ell)?;
                out(Report::new("intertwine.end_dim/1", json!({"ell": ell, "closed_form": d})), true)
            }
        }
        IntertwineCmd::Irrep { ell, u, u2, zeta } => {
            let ring = Ring::new(f, ell + 1);
            let a = unit_code(f, &ring, u)?;
            let b = unit_code(f, &ring, u2)?;
            let z = zeta.map_or(Zeta::Trivial, Zeta::DepthZero);
            let r = i_intertwine(f, *ell, a, b, &ring, z, verify, budget)?;
            let ok = r.passed();
            out(Report::new("intertwine.irrep/1", r), ok)
        }
        IntertwineCmd::Jmackey { ell } => {
            let omega = regular_orbits(f.q()).first().map(|o| o.0).ok_or_else(|| Error::Unsupported("no regular ω".into()))?;
            let mut body = json!({"ell": ell, "omega": omega, "formula": 1});
            let mut ok = true;
            if verify {
                let ip = j_is_mackey(f, *ell, omega, budget)?;
                ok = ip.exact == 1;
                body["brute"] = json!(ip);
            }
            out(Report::new("intertwine.jmackey/1", body), ok)
        }
    }
}

fn hecke(f: &FieldSpec, cmd: &HeckeCmd, verify: bool, budget: u64) -> Result<Outcome> {
    match cmd {
        HeckeCmd::Action { ell, gamma } => {
            let label: CosetLabel = gamma.parse()?;
            let rep = find_coset(supported_cosets(f, *ell)?, &label, |r| &r.label)?;
            let ctx = HeckeContext::new(f, *ell, budget)?;
            let op = hecke_action_in(&ctx, &rep);
            let mut ok = true;
            let mut body = json!({"field": f.name(), "ell": ell, "coset": op.coset, "matrix": op.matrix});
            if verify {
                let lit = hecke_action_literal(&ctx, &rep, budget)?;
                ok = lit.matrix == op.matrix;
                body["matches_literal"] = json!(ok);
            }
            let headers: Vec<String> = (0..op.matrix.len()).map(|j| format!("h{j}")).collect();
            let h: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
            out(Report::new("hecke.action/1", body).table(&h, matrix_rows(&op.matrix)), ok)
        }
        HeckeCmd::Commute { ell } => {
            let literal = if verify { *ell } else { 0 };
            let r = commutativity_certificate(f, *ell, literal, budget)?;
            let ok = r.passed();
            let rows = r
                .operators
                .iter()
                .map(|o| {
                    vec![
                        o.coset.clone(),
                        o.monomial.to_string(),
                        o.shift_pattern.to_string(),
                        o.order.map_or(String::new(), |x| x.to_string()),
                    ]
                })
                .collect();
            out(
                Report::new("hecke.commute/1", &r).table(&["coset", "monomial", "shift_pattern", "order"], rows),
                ok,
            )
        }
        HeckeCmd::Order { ell, gamma } => {
            let label: CosetLabel = gamma.parse()?;
            let order = operator_order(f, *ell, &label, budget)?;
            out(
                Report::new("hecke.order/1", json!({"ell": ell, "coset": label.to_string(), "order": order})),
                true,
            )
        }
    }
}

fn nilp(f: &FieldSpec, cmd: &NilpCmd, verify: bool, budget: u64) -> Result<Outcome> {
    match cmd {
        NilpCmd::Label { v, level } => {
            let x = parse_scalar(f, v)?;
            let l = orbit_label(f, &x, parse_level(level)?)?;
            out(
                Report::new("nilp.label/1", json!({"field": f.name(), "v": x.render(), "label": l.to_string(), "orbit": l})),
                true,
            )
        }
        NilpCmd::Meet { u, s, t, trunc } => {
            let x = parse_scalar(f, u)?;
            let m = orbits_meeting(f, &x, *s, *t, *trunc)?;
            let mut ok = true;
            let mut body = json!({
                "field": f.name(),
                "u": x.digits_string(),
                "s": s,
                "t": t,
                "count": m.count.to_string(),
                "orbits": m.orbits.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            });
            if verify {
                let gap = u32::try_from(t - s).map_err(|_| Error::OutOfRange("t ≥ s".into()))?;
                let formula = orbits_meeting_count(f, gap);
                ok = formula == m.count;
                body["formula"] = json!(formula.to_string());
            }
            let rows = m.orbits.iter().map(|o| vec![o.to_string()]).collect();
            out(Report::new("nilp.meet/1", body).table(&["orbit"], rows), ok)
        }
        NilpCmd::Equiv { u, u2, s, t } => {
            let a = parse_scalar(f, u)?;
            let b = parse_scalar(f, u2)?;
            let eq = kprime_orbit_equiv(f, &a, &b, *s, *t)?;
            let mut body = json!({"u": a.digits_string(), "u2": b.digits_string(), "s": s, "t": t, "equivalent": eq});
            let mut ok = true;
            if verify {
                let w = kprime_equiv_witness(f, &a, &b, *s, *t, budget)?;
                ok = w.is_some() == eq;
                body["witness"] = json!(w.map(|k| {
                    let r = Ring::new(f, (t - s).max(1) as u32 + 1);
                    k.digit_strings(&r)
                }));
            }
            out(Report::new("nilp.equiv/1", body), ok)
        }
        NilpCmd::Tset { u, ell, bound } => {
            let x = parse_scalar(f, u)?;
            let set = t_set(f, &x, *ell, *bound)?;
            let rows = set.iter().map(|e| vec![e.unit.clone(), e.depth.to_string()]).collect();
            let body = json!({"field": f.name(), "u": x.digits_string(), "ell": ell, "bound": bound, "entries": set});
            out(Report::new("nilp.tset/1", body).table(&["unit", "depth"], rows), true)
        }
        NilpCmd::Wf { i, trunc } => {
            let w = wavefront(f, *i, *trunc)?;
            let labels: Vec<String> = w.iter().map(|o| o.to_string()).collect();
            let rows = labels.iter().map(|l| vec![l.clone()]).collect();
            out(
                Report::new("nilp.wf/1", json!({"field": f.name(), "i": i, "orbits": labels})).table(&["orbit"], rows),
                true,
            )
        }
    }
}

fn branch(f: &FieldSpec, cmd: &BranchCmd, verify: bool) -> Result<Outcome> {
    match cmd {
        BranchCmd::Table { i: Some(i), bound } => {
            let t = branching_table(f, *i, *bound)?;
            let rows = t
                .rows
                .iter()
                .map(|r| vec![r.depth.to_string(), r.count.to_string(), r.degree.to_string()])
                .collect();
            out(Report::new(t.schema, &t).table(&["depth", "# components", "degree"], rows), true)
        }
        BranchCmd::Table { i: None, bound } => {
            let t0 = branching_table(f, 0, *bound)?;
            let t1 = branching_table(f, 1, bound.saturating_sub(1).max(1))?;
            let rows = [&t0, &t1]
                .iter()
                .flat_map(|t| {
                    t.rows
                        .iter()
                        .map(|r| vec![t.i.to_string(), r.depth.to_string(), r.count.to_string(), r.degree.to_string()])
                })
                .collect();
            let md = render_table_md(&t0, &t1);
            let report = Report::new("branch.tables/1", json!({"field": f.name(), "tables": [&t0, &t1]}))
                .table(&["i", "depth", "# components", "degree"], rows)
                .with_markdown(md);
            out(report, true)
        }
        BranchCmd::Fixed { i, n } => {
            let d = fixed_dim(f, *i, *n)?;
            let ok = d.formula == d.tally;
            out(Report::new("branch.fixed/1", d), ok)
        }
        BranchCmd::Growth { n } => {
            let r = growth_ratio(f, *n)?;
            let e = growth_ratio_expected(f, *n);
            let two = two_step_ratios(f, *n).ok().map(|[a, b]| [a.to_string(), b.to_string()]);
            out(
                Report::new(
                    "branch.growth/1",
                    json!({"field": f.name(), "n": n, "ratio": r.to_string(), "expected": e.to_string(), "two_step": two}),
                ),
                r == e,
            )
        }
        BranchCmd::Npi { i } => {
            let n = n_pi(f, *i)?;
            let mut body = json!({"field": f.name(), "i": i, "n_pi": n});
            let mut ok = true;
            if verify {
                let c = lce_expand(f, *i, None)?;
                ok = c.n_pi_tally == n;
                body["tally"] = json!(c.n_pi_tally);
            }
            out(Report::new("branch.npi/1", body), ok)
        }
        BranchCmd::Lce { i, bound } => {
            let c = lce_expand(f, *i, *bound)?;
            let ok = c.passed();
            out(Report::new(c.schema, &c), ok)
        }
        BranchCmd::Lce2 { i, ell, bound } => {
            let c = lce2_expand(f, *i, *ell, *bound)?;
            let ok = c.passed();
            out(Report::new(c.schema, &c), ok)
        }
        BranchCmd::Gl2lce { bound } => {
            let c = gl2_lce(f, *bound)?;
            let ok = c.passed();
            out(Report::new(c.schema, &c), ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.report.render(cli.format));
            match o.code {
                0 => {}
                1 => eprintln!("verification mismatch"),
                _ => eprintln!("some checks could not run"),
            }
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
