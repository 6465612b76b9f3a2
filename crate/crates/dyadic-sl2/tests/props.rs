use dyadic_sl2::branching::{GrothendieckExpr, IrrepLabel};
use dyadic_sl2::field::{FieldConfig, FieldSpec, Ring, TruncatedScalar};
use dyadic_sl2::matgroups::Mat2;
use dyadic_sl2::nilpotent::{conjugate_nilpotent, conjugate_nilpotent_closed};
use dyadic_sl2::report::OutputFormat;
use dyadic_sl2::squares::{square_class_reps, Level};
use dyadic_sl2::verify::RunConfig;
use proptest::prelude::*;

fn field(idx: usize) -> FieldSpec {
    match idx {
        0 => FieldSpec::q2(16),
        1 => FieldSpec::q2_sqrt2(16),
        2 => FieldSpec::laurent(1, 16).unwrap(),
        3 => FieldSpec::laurent(2, 16).unwrap(),
        _ => FieldSpec::new(FieldConfig::eisenstein(2, vec![-2, 0, 1], 16)).unwrap(),
    }
}

fn element(r: &Ring, digits: &[u32]) -> u64 {
    let q = r.q() as u32;
    let d: Vec<u32> = digits.iter().take(r.level() as usize).map(|x| x % q).collect();
    r.from_digits(&d)
}

fn unit(r: &Ring, digits: &[u32]) -> u64 {
    let x = element(r, digits);
    if r.is_unit(x) {
        x
    } else {
        r.add(x, r.one())
    }
}

/// [[a, b], [c, (1 + bc)/a]] with a a unit.
fn sl2(r: &Ring, a: &[u32], b: &[u32], c: &[u32]) -> Mat2 {
    let a = unit(r, a);
    let (b, c) = (element(r, b), element(r, c));
    let d = r.mul(r.add(r.one(), r.mul(b, c)), r.inv(a));
    Mat2::new(a, b, c, d)
}

fn digits() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..16, 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn nilpotent_conjugation_formula(fi in 0usize..5, n in 1u32..8, a in digits(), b in digits(), c in digits(), v in digits()) {
        let f = field(fi);
        let r = Ring::new(&f, n);
        let k = sl2(&r, &a, &b, &c);
        prop_assert_eq!(k.det(&r), r.one());
        let v = element(&r, &v);
        prop_assert_eq!(conjugate_nilpotent(&r, &k, v), conjugate_nilpotent_closed(&r, &k, v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ring_laws(fi in 0usize..5, n in 1u32..8, x in digits(), y in digits(), z in digits()) {
        let f = field(fi);
        let r = Ring::new(&f, n);
        let (x, y, z) = (element(&r, &x), element(&r, &y), element(&r, &z));
        prop_assert_eq!(r.add(x, y), r.add(y, x));
        prop_assert_eq!(r.mul(x, y), r.mul(y, x));
        prop_assert_eq!(r.mul(r.mul(x, y), z), r.mul(x, r.mul(y, z)));
        prop_assert_eq!(r.add(r.add(x, y), z), r.add(x, r.add(y, z)));
        prop_assert_eq!(r.mul(x, r.add(y, z)), r.add(r.mul(x, y), r.mul(x, z)));
        prop_assert_eq!(r.add(x, r.neg(x)), r.zero());
        prop_assert_eq!(r.sub(r.add(x, y), y), x);
        if r.is_unit(x) {
            prop_assert_eq!(r.mul(x, r.inv(x)), r.one());
        }
    }

    #[test]
    fn group_inverse(fi in 0usize..5, n in 1u32..7, a in digits(), b in digits(), c in digits()) {
        let f = field(fi);
        let r = Ring::new(&f, n);
        let g = sl2(&r, &a, &b, &c);
        prop_assert_eq!(g.mul(&r, &g.inverse(&r)), Mat2::identity(&r));
    }

    /// Scaling by a square never changes the class; the representative is fixed.
    #[test]
    fn square_classes_are_a_partition(fi in 0usize..4, k in 1u32..7, u in digits(), s in digits()) {
        let f = field(fi);
        let reps = square_class_reps(&f, Level::Finite(k)).unwrap();
        let r = reps.ring();
        let (u, s) = (unit(r, &u), unit(r, &s));
        let c = reps.canonicalize_code(r, u).unwrap();
        prop_assert!(reps.contains_code(c));
        prop_assert_eq!(reps.canonicalize_code(r, c).unwrap(), c);
        prop_assert_eq!(reps.canonicalize_code(r, r.mul(u, r.square(s))).unwrap(), c);
    }

    #[test]
    fn scalar_arithmetic(fi in 0usize..5, x in -500i64..500, y in -500i64..500) {
        let f = field(fi);
        let (a, b) = (TruncatedScalar::from_int(&f, x), TruncatedScalar::from_int(&f, y));
        // equal up to the precision the truncated result carries
        prop_assert!(a.mul(&b).sub(&TruncatedScalar::from_int(&f, x * y)).is_zero());
        prop_assert!(a.add(&b).sub(&TruncatedScalar::from_int(&f, x + y)).is_zero());
        // in characteristic 2 even integers are zero
        if !a.is_zero() {
            let one = a.mul(&a.inverse().unwrap());
            prop_assert!(one.sub(&TruncatedScalar::one(&f)).is_zero());
        }
    }

    #[test]
    fn grothendieck_plus_minus(xs in prop::collection::vec((0u32..6, -3i64..4), 0..8), ys in prop::collection::vec((0u32..6, -3i64..4), 0..8)) {
        let build = |v: &[(u32, i64)]| {
            let mut e = GrothendieckExpr::new();
            for &(l, c) in v {
                e.add(IrrepLabel::J { ell: l + 1 }, c);
            }
            e
        };
        let (a, b) = (build(&xs), build(&ys));
        prop_assert_eq!(a.plus(&b).minus(&b), a.clone());
        prop_assert!(a.minus(&a).is_zero());
    }

    #[test]
    fn run_config_round_trips(fi in 0usize..5, budget in 1u64..10_000_000, verify: bool, fmt in 0usize..3, max_ell in proptest::option::of(1u32..9), depth in 1u32..20, timings: bool) {
        let mut c = RunConfig::new(field(fi).config().clone());
        c.budget = budget;
        c.verify = verify;
        c.format = [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Md][fmt];
        c.max_ell = max_ell;
        c.depth_bound = depth;
        c.timings = timings;
        prop_assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }
}
