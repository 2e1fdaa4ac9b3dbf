use valcalc::forms::HwvId;
use valcalc::operators::*;
use valcalc::scalar::{parse_scalar, ExactScalar};

fn s(t: &str) -> ExactScalar {
    parse_scalar(t).unwrap()
}

#[test]
fn fourier_table_is_complete_and_closed() {
    for m in 2..=8 {
        let table = fourier_solver(7, m).unwrap();
        let ids: Vec<HwvId> = (2..=7)
            .flat_map(|n| HwvId::grid(n, m))
            .filter(|i| i.m == m)
            .collect();
        assert_eq!(table.entries.len(), ids.len());
        for id in ids {
            let f = &table.entries[&id];
            assert_eq!(f, &fourier_closed_form(id), "{id}");
            let dual = &table.entries[&HwvId {
                r: id.n - id.r,
                ..id
            }];
            assert_eq!(f * dual, ExactScalar::sign(m as i64), "{id}");
        }
    }
}

#[test]
fn fourier_values() {
    assert_eq!(
        fourier_closed_form(HwvId::new(2, 1, 1, 2).unwrap()),
        s("-1")
    );
    assert_eq!(fourier_closed_form(HwvId::new(5, 2, 2, 3).unwrap()), s("i"));
    assert_eq!(
        fourier_closed_form(HwvId::new(6, 3, -3, 3).unwrap()),
        s("i")
    );
}

#[test]
fn lefschetz_kills_exactly_the_primitive_weights() {
    for n in 2..=5 {
        for id in HwvId::grid(n, 4) {
            let c = lefschetz_coeff(id).unwrap();
            assert_eq!(c, lefschetz_closed_form(id), "{id}");
            assert_eq!(c.is_zero(), id.k < 0 || id.k as u8 == id.r, "{id}");
        }
    }
}

#[test]
fn lefschetz_value() {
    // (n-r-k+1) v_{n+m-r-1}/v_{n+m-r-2} with n=4, r=2, k=1, m=2: 2 v_3/v_2 = 8/3
    assert_eq!(
        lefschetz_coeff(HwvId::new(4, 2, 1, 2).unwrap()).unwrap(),
        s("8/3")
    );
}

#[test]
fn hodge_riemann_positive_and_growth_stable() {
    for n in 2..=7 {
        for r in 1..=n / 2 {
            let report = hodge_riemann_report(n, r, 8);
            let bad: Vec<_> = report.failures().collect();
            assert!(bad.is_empty(), "{bad:?}");
            assert!(report.items.iter().any(|i| i.check == "growth ratio"));
        }
    }
}

#[test]
fn hodge_riemann_values() {
    assert_eq!(hr_form_value(4, 2, 2, 2).unwrap(), s("1"));
    assert_eq!(
        hr_form_value(4, 2, -2, 2).unwrap(),
        hr_form_value(4, 2, 2, 2).unwrap()
    );
    assert!(hl_eigenvalue(5, 3, 1, 2).is_err());
    for id in HwvId::grid(6, 6).into_iter().filter(|i| 2 * i.r <= i.n) {
        let e = hl_eigenvalue(id.n, id.r, id.k, id.m).unwrap();
        assert_eq!(e, hl_closed_form(id));
        let q = hr_form_value(id.n, id.r, id.k, id.m).unwrap();
        assert_eq!(q.terms().len(), 1, "{id}: {q}");
        assert!(q.is_real(), "{id}: {q}");
    }
}
