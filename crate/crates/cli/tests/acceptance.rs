//! One PASS/FAIL line per acceptance criterion. All comparisons are exact.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use common::{closing_corner_count, gl2, handle_fixture, matrix, polygon, rational_rank, sl2_word, worked_example};
use loctorus::base_complex::BaseComplex;
use loctorus::four_manifold::{blow_up_corner, meyer_tau1, necklace_from_self_intersections, total_signature, BoundaryContribution, SingleCornerData};
use loctorus::lattice::{inverse_unimodular, kernel_lattice, signature_of_symmetric, smith_normal_form};
use loctorus::spectral::{coefficient_system, e2_page, euler_characteristic, k_e2_page, twisted_coboundary, FiberDegree, Fibration};
use loctorus::torus_data::{validate_characteristic, CharacteristicData, MonodromyData};
use loctorus::{int_matrix, int_vector, IntegerMatrix};
use loctorus_cli::{execute, fixture, Command, Source};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::Value;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn eq<T: PartialEq + std::fmt::Debug>(label: &str, got: T, want: T) -> Check {
    ensure(got == want, || format!("{label}: got {got:?}, expected {want:?}"))
}

fn json_of(cmd: Command, source: &Source) -> (Value, i32) {
    let out = execute(cmd, source, true, None);
    let v = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (v, out.code)
}

fn section<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["sections"]
        .as_array()
        .and_then(|s| s.iter().find(|x| x["name"] == name))
        .unwrap_or(&Value::Null)
}

fn row(page: &Value, q: &str) -> Vec<String> {
    page["rows"][q]
        .as_array()
        .map(|r| r.iter().map(|x| x.as_str().unwrap_or("?").to_string()).collect())
        .unwrap_or_default()
}

fn criterion_1() -> Check {
    let (r, code) = json_of(Command::Report, &Source::Fixture("holed_torus".into()));
    eq("exit code", code, 0)?;
    let v = &section(&r, "validate")["data"];
    eq("valid", v["valid"].as_bool(), Some(true))?;
    eq("locally_standard", v["locally_standard"].as_bool(), Some(false))?;
    eq("chi", section(&r, "euler")["data"]["euler_characteristic"].as_i64(), Some(1))?;
    let h = &section(&r, "cohomology")["data"];
    eq("E2 q=0", row(&h["e2"], "0"), vec!["Z".into(), "Z^2".into(), "0".into()])?;
    eq("E2 q=1", row(&h["e2"], "1"), vec!["0".into(), "Z^3".into(), "0".into()])?;
    eq("E2 q=2", row(&h["e2"], "2"), vec!["0".into(), "Z^2".into(), "Z".into()])?;
    let groups: Vec<_> = (0..=4).map(|k| h["groups"]["groups"][k.to_string()].as_str().map(String::from)).collect();
    eq("H*", groups, ["Z", "Z^2", "Z^3", "Z^2", "Z"].map(|s| Some(s.to_string())).to_vec())?;
    let k = &section(&r, "ktheory")["data"];
    eq("K E2 even", row(&k["e2"], "0"), vec!["Z".into(), "Z^4".into(), "Z".into()])?;
    eq("K E2 odd", row(&k["e2"], "1"), vec!["0".into(), "Z^3".into(), "0".into()])?;
    eq("K^0", k["groups"]["groups"]["0"].as_str(), Some("Z^5"))?;
    eq("K^1", k["groups"]["groups"]["1"].as_str(), Some("Z^4"))?;
    let p = &section(&r, "pi1")["data"];
    eq("pi1 isomorphic", p["isomorphic"].as_bool(), Some(true))?;
    eq("pi1 free rank", p["free_rank"].as_u64(), Some(2))?;
    eq("sigma", section(&r, "signature")["data"]["sigma"].as_i64(), Some(-1))?;
    let text = execute(Command::Report, &Source::Fixture("holed_torus".into()), false, None).stdout;
    eq("golden file", text.as_str(), include_str!("../fixtures/holed_torus.report.txt"))
}

fn criterion_2() -> Check {
    let (b, m, ch) = worked_example();
    let fib = Fibration::new(&b, &m, &ch, true).map_err(|e| e.to_string())?;
    let cs = coefficient_system(&fib, FiberDegree::Cohomology(1)).map_err(|e| e.to_string())?;
    let d = twisted_coboundary(&cs, 1);
    eq("delta^1", d.clone(), int_matrix(&[[-1, 1, -2, 2, 3], [-1, 1, -1, 1, 1]]))?;
    let snf = smith_normal_form(&d);
    eq("divisors", snf.elementary_divisors, vec![BigInt::from(1), BigInt::from(1)])?;
    eq("kernel rank", kernel_lattice(&d).rank(), 3)?;
    eq("E2^{1,1}", e2_page(&fib).map_err(|e| e.to_string())?.get(1, 1).to_string(), "Z^3".to_string())
}

fn criterion_3() -> Check {
    let (_, m, _) = worked_example();
    let inv = |s: &str| inverse_unimodular(&m.images[s]).unwrap();
    eq("tau_1(rho(alpha)^-1, rho(gamma)^-1)", meyer_tau1(&inv("alpha1"), &inv("gamma1")).ok(), Some(0))?;
    let corner = SingleCornerData {
        v: int_vector(&[1, 0]),
        other: int_vector(&[0, 1]),
        monodromy: m.images["gamma1"].clone(),
    };
    let blow = blow_up_corner(&corner).map_err(|e| e.to_string())?;
    eq("u1", blow.u1.clone(), int_vector(&[4, -1]))?;
    eq("u2", blow.u2.clone(), int_vector(&[1, 1]))?;
    let neck = necklace_from_self_intersections(&blow.self_intersections).map_err(|e| e.to_string())?;
    eq("necklace", neck.clone(), int_matrix(&[[-1, 2], [2, -5]]))?;
    eq("necklace signature", signature_of_symmetric(&neck.to_rational()).ok(), Some(-2))?;
    let s = total_signature(true, &[], &[BoundaryContribution::Corner(corner)]).map_err(|e| e.to_string())?;
    eq("corrected sigma", s.sigma_total, -1)
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run_prop<S: Strategy>(label: &str, cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| format!("{label}: {e}"))
}

type Fixture = (BaseComplex, MonodromyData, CharacteristicData);

fn fixture_strategy() -> impl Strategy<Value = Fixture> {
    prop_oneof![
        (-2i32..=2, -2i32..=2, closing_corner_count(), gl2()).prop_map(|(a, b, k, g)| handle_fixture(a, b, k, &g)),
        gl2().prop_map(|g| {
            let (b, m, ch) = worked_example();
            (b, m.conjugated(&g).unwrap(), ch.transformed(&g))
        }),
    ]
}

fn criterion_4() -> Check {
    run_prop("SNF", 500, matrix(6, 9), |a| {
        let s = smith_normal_form(&a);
        let unit = |m: &IntegerMatrix| m.determinant().unwrap().abs() == BigInt::from(1);
        prop_assert!(unit(&s.u) && unit(&s.v));
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
        for w in s.elementary_divisors.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        Ok(())
    })?;
    let tau = |a: &IntegerMatrix, b: &IntegerMatrix| meyer_tau1(a, b).unwrap();
    run_prop("Meyer cocycle", 100, (sl2_word(), sl2_word(), sl2_word()), |(a, b, c)| {
        prop_assert_eq!(tau(&a, &b) + tau(&(&a * &b), &c), tau(&a, &(&b * &c)) + tau(&b, &c));
        Ok(())
    })?;
    run_prop("Meyer identity", 100, sl2_word(), |c| {
        prop_assert_eq!(tau(&IntegerMatrix::identity(2), &c), 0);
        Ok(())
    })?;
    run_prop("fixtures", 24, fixture_strategy(), |(b, m, ch)| {
        let fib = Fibration::new(&b, &m, &ch, true).unwrap();
        let degrees = [0, 1, 2].map(FiberDegree::Cohomology).into_iter().chain([FiberDegree::KEven, FiberDegree::KOdd]);
        for degree in degrees {
            let cs = coefficient_system(&fib, degree).unwrap();
            prop_assert!((&twisted_coboundary(&cs, 1) * &twisted_coboundary(&cs, 0)).is_zero());
        }
        let chi = euler_characteristic(&b);
        let h = e2_page(&fib).unwrap();
        for page in [&h, &k_e2_page(&fib).unwrap()] {
            prop_assert_eq!(page.e1_euler_sum(), chi);
        }
        let r: Vec<usize> = (0..2).map(|p| rational_rank(&b.untwisted_coboundary(p))).collect();
        let cells = |p| b.cells_of_dim(p).len();
        let base = [cells(0) - r[0], cells(1) - r[1] - r[0], cells(2) - r[1]];
        for (p, e) in base.iter().enumerate() {
            prop_assert_eq!(h.get(p, 0).free_rank, *e);
        }
        Ok(())
    })?;
    let symmetric = (1usize..=4).prop_flat_map(|n| {
        let sym = prop::collection::vec(-6i64..=6, n * n)
            .prop_map(move |v| IntegerMatrix::from_fn(n, n, |i, j| BigInt::from(v[i.min(j) * n + i.max(j)])));
        let inv = prop::collection::vec(-4i64..=4, n * n)
            .prop_map(move |v| IntegerMatrix::from_fn(n, n, |i, j| BigInt::from(v[i * n + j])))
            .prop_filter("invertible", |m| !m.determinant().unwrap().is_zero());
        (sym, inv)
    });
    run_prop("Sylvester", 200, symmetric, |(g, p)| {
        let c = &(&p.transpose() * &g) * &p;
        prop_assert_eq!(signature_of_symmetric(&g.to_rational()).unwrap(), signature_of_symmetric(&c.to_rational()).unwrap());
        Ok(())
    })?;
    let frames = (closing_corner_count(), gl2(), prop::sample::select(vec![[1i64, 2], [2, 1], [3, 2], [0, 1]]));
    run_prop("unimodularity invariance", 50, frames, |(k, g, bad)| {
        let cycle = [[1i64, 0], [0, 1], [1, 1]];
        let mut vs: Vec<[i64; 2]> = (0..k).map(|i| cycle[i % 3]).collect();
        vs[0] = bad;
        let (b, m, ch) = polygon(&vs);
        let before = validate_characteristic(&b, &m, &ch).is_valid();
        let after = validate_characteristic(&b, &m.conjugated(&g).unwrap(), &ch.transformed(&g)).is_valid();
        prop_assert_eq!(before, after);
        Ok(())
    })
}

fn expect_error(label: &str, cmd: Command, text: String, kind: &str) -> Check {
    let (r, code) = json_of(cmd, &Source::Text(text));
    let err = &r["sections"][0]["error"];
    eq(&format!("{label} kind"), err["kind"].as_str(), Some(kind))?;
    ensure(code != 0, || format!("{label}: exit code 0"))?;
    eq(&format!("{label} exit"), code, 3)
}

fn criterion_5() -> Check {
    expect_error("K-theory on n = 3", Command::Ktheory, fixture("point_rank_3").unwrap().to_string(), "UnsupportedRank")?;
    let example = fixture("holed_torus").unwrap();
    let unoriented = example.replace("\"oriented\": true", "\"oriented\": false");
    expect_error("signature unoriented", Command::Signature, unoriented, "OrientationMissing")?;
    let no_section = example.replace("\"section_exists\": true", "\"section_exists\": false");
    expect_error("cohomology without section", Command::Cohomology, no_section.clone(), "SectionRequired")?;
    expect_error("K-theory without section", Command::Ktheory, no_section, "SectionRequired")
}

fn main() {
    let criteria: [Criterion; 5] = [
        ("1 holed-torus report (exact)", criterion_1),
        ("2 twisted coboundary and its Smith form (exact)", criterion_2),
        ("3 signature sub-chain (exact)", criterion_3),
        ("4 property suites (exact; stated case counts)", criterion_4),
        ("5 scope enforcement (structured error, nonzero exit)", criterion_5),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS criterion {name}"),
            Err(why) => {
                println!("FAIL criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("{} criteria failed", failed.len());
        std::process::exit(1);
    }
}
