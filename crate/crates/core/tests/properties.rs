use lingroups::arith::{self, int_matrix, LatticeFamily};
use lingroups::exact::groupfile::load_group;
use lingroups::exact::{Field, Matrix};
use lingroups::structure::{self, jordan, Config};
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

fn q() -> Field {
    Field::Rational
}

fn square(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3i64..=3, n * n).prop_map(move |v| {
        let rows: Vec<Vec<i64>> = v.chunks(n).map(|c| c.to_vec()).collect();
        int_matrix(&rows)
    })
}

/// Random conjugates of block matrices with repeated eigenvalues, so that the
/// unipotent part is usually nontrivial.
fn defective(n: usize) -> impl Strategy<Value = Matrix> {
    (prop::collection::vec(-2i64..=2, n), prop::collection::vec(0i64..=1, n), prop::collection::vec(-2i64..=2, n * n))
        .prop_map(move |(eig, sup, p)| {
            let f = q();
            let mut j = vec![vec![0i64; n]; n];
            for i in 0..n {
                j[i][i] = if eig[i] == 0 { 1 } else { eig[i] };
                if i + 1 < n && sup[i] == 1 {
                    j[i + 1][i + 1] = j[i][i];
                    j[i][i + 1] = 1;
                }
            }
            // unitriangular times permutation-free lower part keeps P invertible
            let mut up = vec![vec![0i64; n]; n];
            let mut lo = vec![vec![0i64; n]; n];
            for a in 0..n {
                for b in 0..n {
                    up[a][b] = if a == b { 1 } else if a < b { p[a * n + b] } else { 0 };
                    lo[a][b] = if a == b { 1 } else if a > b { p[a * n + b] } else { 0 };
                }
            }
            let pm = int_matrix(&up).mul(&int_matrix(&lo), &f);
            let pi = pm.inverse(&f).unwrap();
            pm.mul(&int_matrix(&j), &f).mul(&pi, &f)
        })
}

fn any_invertible() -> impl Strategy<Value = Matrix> {
    (1usize..=5)
        .prop_flat_map(|n| prop_oneof![square(n), defective(n)])
        .prop_filter("invertible", |m| !q().is_zero(&m.det(&q())))
}

fn check_jordan(g: &Matrix) -> Result<(), TestCaseError> {
    let f = q();
    let n = g.n();
    let j = jordan(g, &f).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(j.d.mul(&j.u, &f), g.clone());
    prop_assert_eq!(j.u.mul(&j.d, &f), g.clone());
    let mp = j.d.minpoly(&f);
    prop_assert_eq!(mp.gcd(&mp.derivative(&f), &f).degree(), Some(0));
    let nil = j.u.sub(&Matrix::identity(n, &f), &f);
    prop_assert!(nil.pow(n as i64, &f).unwrap().is_zero(&f));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn jordan_parts_multiply_commute_and_are_pure(g in any_invertible()) {
        check_jordan(&g)?;
    }
}

fn e3(m: i64) -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let mut r = vec![vec![0i64; 3]; 3];
                for k in 0..3 {
                    r[k][k] = 1;
                }
                r[i][j] = m;
                out.push(int_matrix(&r));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn delta_times_image_is_lattice_order(m in 2u64..=12, k in prop::sample::select(vec![1i64, 2, 3])) {
        let f = LatticeFamily::sl(3).unwrap();
        let s = e3(k);
        let img = arith::image_mod(&f, &s, m, None).unwrap();
        let d = arith::delta(&f, &s, m, None).unwrap();
        prop_assert_eq!(d * img.order(), arith::lattice_order_mod(&f, m));
    }

    #[test]
    fn random_words_are_members(word in prop::collection::vec((0usize..6, any::<bool>()), 1..30)) {
        let f = LatticeFamily::sl(3).unwrap();
        let s = e3(2);
        let (d, _) = arith::describe(&f, &s, &arith::LatticeOpts::default()).unwrap();
        let qf = q();
        let mut x = Matrix::identity(3, &qf);
        for (i, inv) in word {
            let g = if inv { s[i].inverse(&qf).unwrap() } else { s[i].clone() };
            x = x.mul(&g, &qf);
        }
        prop_assert!(arith::membership(&d, &x).unwrap());
    }

    #[test]
    fn stabilizer_fixes_vector(u in prop::collection::vec(-20i64..=20, 3)) {
        prop_assume!(u.iter().any(|&c| c != 0));
        let f = LatticeFamily::sl(3).unwrap();
        let bu: Vec<BigInt> = u.iter().map(|&c| c.into()).collect();
        let st = arith::stabilizer_gamma(&f, &bu).unwrap();
        for g in &st.gens {
            prop_assert_eq!(arith::apply(g, &bu), bu.clone());
        }
    }
}

#[test]
fn delta_stabilizes_after_level() {
    let f = LatticeFamily::sl(3).unwrap();
    let s = e3(2);
    let tr = arith::level_max_pcs(&f, &s, &[2], None).unwrap();
    assert_eq!(tr.level, 4);
    let d4 = arith::delta(&f, &s, 4, None).unwrap();
    for m in [8, 16] {
        assert_eq!(arith::delta(&f, &s, m, None).unwrap(), d4);
    }
}

#[test]
fn non_members_are_rejected() {
    let f = LatticeFamily::sl(3).unwrap();
    let (d, _) = arith::describe(&f, &e3(2), &arith::LatticeOpts::default()).unwrap();
    assert!(!arith::membership(&d, &e3(1)[0]).unwrap());
    assert!(arith::membership(&d, &e3(4)[3]).unwrap());
}

#[test]
fn function_field_over_nonprime_constants() {
    let g = load_group(r#"{"field": {"ratfunc": {"base": "Fq", "q": 9, "num_vars": 1}}, "degree": 2,
        "generators": [[["a*x", "1"], ["1", "0"]]]}"#)
    .unwrap();
    let cfg = Config::default();
    assert!(!structure::is_finite(&g, &cfg).unwrap().value);
    assert!(structure::is_solvable_by_finite(&g, &cfg).unwrap().value);
}

#[test]
fn lattice_orders_small_cases() {
    let sl3 = LatticeFamily::sl(3).unwrap();
    let sp4 = LatticeFamily::sp(4).unwrap();
    assert_eq!(arith::lattice_order_mod(&sl3, 2), BigUint::from(168u32));
    assert_eq!(arith::lattice_order_mod(&sp4, 2), BigUint::from(720u32));
}
