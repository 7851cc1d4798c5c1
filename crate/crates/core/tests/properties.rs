use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use qohno::connect::{connected_sum_truncated, connector, connector_decay_constant, exact_symmetry};
use qohno::report::{CaseRecord, ParamsSnapshot, Report};
use qohno::{parse_expr, Index, LambdaPoly, Params, Real, Word};

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![Just("x"), Just("y"), Just("R"), Just("L"), Just("(1 + x L)")].prop_map(String::from)
}

fn term() -> impl Strategy<Value = String> {
    (any::<bool>(), 1i64..=3, 1i64..=3, prop::collection::vec(atom(), 0..=3))
        .prop_map(|(neg, n, d, atoms)| format!("{} {n}/{d} {}", if neg { "-" } else { "+" }, atoms.join(" ")))
}

fn expr_text() -> impl Strategy<Value = String> {
    prop::collection::vec(term(), 1..=3).prop_map(|ts| ts.concat())
}

fn expr(order: usize) -> impl Strategy<Value = LambdaPoly> {
    expr_text().prop_map(move |t| parse_expr(&t, order).unwrap())
}

fn any_index(max_depth: usize, max_part: u32) -> impl Strategy<Value = Index> {
    prop::collection::vec(1..=max_part, 0..=max_depth).prop_map(|v| Index::new(v).unwrap())
}

fn admissible(max_depth: usize, max_part: u32) -> impl Strategy<Value = Index> {
    (prop::collection::vec(1..=max_part, 0..max_depth), 2..=max_part + 1).prop_map(|(mut v, last)| {
        v.push(last);
        Index::new(v).unwrap()
    })
}

const N: usize = 3;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tau_is_an_involution(w in expr(N)) {
        prop_assert_eq!(w.tau().tau(), w);
    }

    #[test]
    fn tau_reverses_products(a in expr(N), b in expr(N)) {
        prop_assert_eq!(a.mul(&b).unwrap().tau(), b.tau().mul(&a.tau()).unwrap());
    }

    #[test]
    fn tau_is_additive(a in expr(N), b in expr(N)) {
        prop_assert_eq!(a.add(&b).unwrap().tau(), a.tau().add(&b.tau()).unwrap());
    }

    #[test]
    fn multiplication_is_associative(a in expr(N), b in expr(N), c in expr(N)) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn printing_round_trips(w in expr(N)) {
        prop_assert_eq!(parse_expr(&w.to_string(), N).unwrap(), w);
    }

    #[test]
    fn index_text_round_trips(k in any_index(5, 4)) {
        prop_assert_eq!(k.to_string().parse::<Index>().unwrap(), k);
    }

    #[test]
    fn dual_is_an_involution(k in admissible(4, 4)) {
        let d = k.dual().unwrap();
        prop_assert!(d.is_admissible());
        prop_assert_eq!(d.weight(), k.weight());
        prop_assert_eq!(d.dual().unwrap(), k);
    }

    #[test]
    fn dual_is_reversal_with_swap(k in admissible(4, 4)) {
        let w: Word = k.to_word();
        prop_assert_eq!(Index::from_word(&w.reversed_swapped()).unwrap(), k.dual().unwrap());
    }

    #[test]
    fn report_json_round_trips(
        inputs in prop::collection::vec("[a-z0-9(),;= ]{0,12}", 0..5),
        residuals in prop::collection::vec(prop::option::of(0.0f64..1.0), 5),
        passes in prop::collection::vec(any::<bool>(), 5),
        wall in 0.0f64..100.0,
    ) {
        let cases = inputs.iter().enumerate().map(|(i, s)| CaseRecord {
            input: s.clone(),
            lhs: Some(format!("{i}.5e-3")),
            rhs: None,
            residual: residuals[i],
            tolerance: Some(1e-10),
            pass: passes[i],
            error: (!passes[i]).then(|| "boom".to_string()),
        }).collect();
        let r = Report::new("suite prop", ParamsSnapshot::new(&Params::default(), 6), cases, wall);
        prop_assert_eq!(r.passed(), passes.iter().take(inputs.len()).all(|&p| p));
        prop_assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn connected_sum_is_exactly_symmetric(k in any_index(2, 3), l in any_index(2, 3), cutoff in 1usize..6) {
        let p = Params::default();
        prop_assume!(qohno::connect::check_convergent(&k, &l).is_ok());
        prop_assert!(exact_symmetry(&k, &l, cutoff, &p).unwrap());
    }

    #[test]
    fn partial_sums_never_decrease(k in any_index(2, 3), l in admissible(2, 3)) {
        let p = Params::default();
        let mut prev = BigRational::from_integer(BigInt::from(0));
        for cutoff in 1..8 {
            let z: BigRational = connected_sum_truncated(&k, &l, cutoff, &p).unwrap();
            prop_assert!(z >= prev);
            prev = z;
        }
        prop_assert!(prev > BigRational::from_integer(BigInt::from(0)));
    }
}

#[test]
fn connector_decays_geometrically() {
    let p = Params::default();
    let c0 = connector_decay_constant(&p);
    for n in 1..=3u64 {
        for m in 0..=64u64 {
            let c: Real = connector(m, n, &p);
            let scaled = c.to_f64() / 0.5f64.powi((m * n) as i32);
            assert!(scaled <= c0, "c({m},{n}) q^-mn = {scaled} > {c0}");
        }
        assert!(connector::<Real>(64, n, &p).to_f64() < 1e-15);
    }
}

#[test]
fn word_evaluation_matches_connected_sum_pipeline() {
    let mut p = Params::default();
    qohno::validate_epsilon(&mut p).unwrap();
    for text in qohno::suite::random_expressions(8, 7) {
        let w = parse_expr(&text, 4).unwrap();
        let (o, z) = qohno::connect::main_pipeline_sides(&w, &p).unwrap();
        let r = qohno::Residual::from_evaluations(&text, &o, &z, &p);
        assert!(r.residual <= o.budget.total() + z.budget.total() + 1e-30, "{text}: {}", r.residual);
    }
}
