use daest_core::lyapunov::{direct_sum_terms, picard_from, residual};
use daest_core::{examples, solve_embryo, EmbryoMethod, ExtFloat, Poly, PolyMap, TruncatedSeries};
use proptest::prelude::*;

fn rel_close(a: ExtFloat, b: ExtFloat, tol: f64) -> bool {
    if a.is_zero() && b.is_zero() {
        return true;
    }
    let scale = a.abs().max_abs(b.abs());
    ((a - b).abs() / scale).to_f64() <= tol
}

fn agree(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) -> Result<(), String> {
    for (e, c) in a.terms() {
        let d = b.coeff(&e);
        if !rel_close(c, d, tol) {
            return Err(format!("{e:?}: {} vs {}", c.to_f64(), d.to_f64()));
        }
    }
    for (e, d) in b.terms() {
        if a.coeff(&e).is_zero() && !d.is_zero() {
            return Err(format!("{e:?} only in second series"));
        }
    }
    Ok(())
}

// Example 5 is left to the acceptance target: its x^(m-1)·y coefficients
// only appear after ~m/2 orbit terms and fall below both truncations.
#[test]
fn three_methods_agree() {
    for (id, p) in [(1, 64), (4, 64)] {
        let f = examples::by_id(id).unwrap();
        let alpha = f.jacobian_at_zero().unwrap().spectral_norm();
        let a = solve_embryo(&f, p, EmbryoMethod::PerDegreeSolve).unwrap();
        let b = solve_embryo(&f, p, EmbryoMethod::Picard { tol: 1e-12, max_iter: 10_000 }).unwrap();
        let c = solve_embryo(&f, p, EmbryoMethod::DirectSum { terms: direct_sum_terms(alpha, 1e-14, p) }).unwrap();
        agree(&a, &b, 1e-8).unwrap_or_else(|e| panic!("example {id}, picard: {e}"));
        agree(&a, &c, 1e-8).unwrap_or_else(|e| panic!("example {id}, direct sum: {e}"));
        assert!(residual(&a, &f, p).unwrap() <= 1e-12, "example {id}");
        assert!(residual(&b, &f, p).unwrap() <= 1e-9, "example {id}");
        assert!(residual(&c, &f, p).unwrap() <= 1e-9, "example {id}");
    }
}

#[test]
fn linear_map_closed_form() {
    for k in 1..=9 {
        let a = k as f64 / 10.0;
        let f = PolyMap::from_components(vec![Poly::from_terms(1, vec![(vec![1], a)]).unwrap()]).unwrap();
        let v = solve_embryo(&f, 12, EmbryoMethod::PerDegreeSolve).unwrap();
        let want = 1.0 / (1.0 - a * a);
        assert!((v.coeff(&[2]).to_f64() - want).abs() <= 1e-14 * want, "a = {a}");
        assert_eq!(v.terms().count(), 1, "a = {a}");
    }
}

#[test]
fn picard_is_unique() {
    for id in [1, 4, 5] {
        let f = examples::by_id(id).unwrap();
        let n = f.dim();
        let p = 24;
        let from_zero = picard_from(&f, p, 1e-13, 20_000, TruncatedSeries::zero(n, vec![0.0; n], p)).unwrap();
        let from_r2 =
            picard_from(&f, p, 1e-13, 20_000, TruncatedSeries::norm_squared(n, vec![0.0; n], p)).unwrap();
        agree(&from_zero, &from_r2, 1e-9).unwrap_or_else(|e| panic!("example {id}: {e}"));
    }
}

fn small_map() -> impl Strategy<Value = PolyMap> {
    (prop::collection::vec(-0.35f64..0.35, 4), prop::collection::vec(-1.0f64..1.0, 7)).prop_map(|(l, q)| {
        PolyMap::from_components(vec![
            Poly::from_terms(
                2,
                vec![(vec![1, 0], l[0]), (vec![0, 1], l[1]), (vec![2, 0], q[0]), (vec![1, 1], q[1]), (vec![0, 3], q[2])],
            )
            .unwrap(),
            Poly::from_terms(
                2,
                vec![
                    (vec![1, 0], l[2]),
                    (vec![0, 1], l[3]),
                    (vec![0, 2], q[3]),
                    (vec![2, 1], q[4]),
                    (vec![1, 2], q[5]),
                    (vec![3, 0], q[6]),
                ],
            )
            .unwrap(),
        ])
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conjugation_rescales_coefficients(f in small_map(), s in 0.25f64..4.0) {
        let p = 8;
        let v = solve_embryo(&f, p, EmbryoMethod::PerDegreeSolve).unwrap();
        // x ↦ s·f(x/s) has Lyapunov series s²·V(x/s)
        let g = f.conjugate_scale(1.0 / s);
        let w = solve_embryo(&g, p, EmbryoMethod::PerDegreeSolve).unwrap();
        for (e, c) in v.terms() {
            let m: u32 = e.iter().sum();
            let want = c * ExtFloat::from_f64(s).powi(2) / ExtFloat::from_f64(s).powi(m);
            prop_assert!(rel_close(w.coeff(&e), want, 1e-9), "{e:?}: {} vs {}", w.coeff(&e).to_f64(), want.to_f64());
        }
        prop_assert!(residual(&v, &f, p).unwrap() <= 1e-12);
    }
}
