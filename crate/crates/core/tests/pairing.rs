mod common;

use common::*;
use valcalc::forms::HwvId;
use valcalc::pairing::{
    eval_zeta_poly, pairing_closed_form, pairing_constant, pairing_from_density,
    sphere_integral_poly, wdw_density,
};
use valcalc::scalar::{parse_scalar, ExactScalar};

fn id(n: u8, r: u8, k: i8, m: u32) -> HwvId {
    HwvId::new(n, r, k, m).unwrap()
}

fn ids(n_max: u8, m_max: u32) -> Vec<HwvId> {
    (2..=n_max).flat_map(|n| HwvId::grid(n, m_max)).collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

type Spot = ((u8, u8, i8, u32), &'static str);

const SPOTS: [Spot; 3] = [
    ((2, 1, 1, 2), "-3/8*pi"),
    ((3, 1, 1, 2), "-16/15"),
    ((4, 2, 2, 2), "1"),
];

#[test]
fn spot_values() {
    for ((n, r, k, m), text) in SPOTS {
        assert_eq!(
            pairing_constant(id(n, r, k, m)).unwrap(),
            parse_scalar(text).unwrap(),
            "{n} {r} {k} {m}"
        );
        let oracle = oracle_pairing(n, r, k as u8, m);
        let exact = parse_scalar(text).unwrap().to_complex().0;
        assert!(close(oracle, exact, 1e-12), "oracle {oracle} vs {exact}");
    }
}

#[test]
fn pipeline_matches_oracle() {
    for id in ids(6, 5).into_iter().filter(|i| i.k > 0) {
        let (re, im) = pairing_from_density(id).unwrap().to_complex();
        let oracle = oracle_pairing(id.n, id.r, id.k as u8, id.m);
        assert!(
            close(re, oracle, 1e-9) && im.abs() < 1e-12,
            "{id}: {re}+{im}i vs {oracle}"
        );
    }
}

#[test]
fn pipeline_matches_closed_form() {
    for id in ids(6, 5) {
        assert_eq!(
            pairing_from_density(id).unwrap(),
            pairing_closed_form(id),
            "{id}"
        );
    }
}

#[test]
fn reflected_weight_pairs_like_its_mirror() {
    for n in [4u8, 6] {
        let l = n / 2;
        for m in 2..=5 {
            let neg = pairing_from_density(id(n, l, -(l as i8), m)).unwrap();
            let pos = pairing_from_density(id(n, l, l as i8, m)).unwrap();
            assert_eq!(neg, pos);
        }
    }
}

#[test]
fn quadrature_agrees_with_exact_integrals() {
    let quad = SphereQuadrature::new(48);
    for id in ids(6, 5) {
        let dens = wdw_density(id).unwrap().density;
        let exact = sphere_integral_poly(&dens).unwrap().to_complex();
        let q = quad.integrate(&to_real(&dens));
        let scale = exact.0.hypot(exact.1);
        assert!(scale > 0.0, "{id}");
        assert!(
            (q.re - exact.0).hypot(q.im - exact.1) <= 1e-9 * scale,
            "{id}: {q} vs {exact:?}"
        );
    }
}

#[test]
fn real_coordinates_agree_pointwise() {
    let xi = [0.31, -0.42, 0.18, 0.55, -0.27, 0.37];
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    for id in ids(6, 3) {
        let p: Vec<f64> = xi[..id.n as usize].iter().map(|x| x / norm).collect();
        let dens = wdw_density(id).unwrap().density;
        let a = to_real(&dens).eval(&p);
        let b = eval_zeta_poly(&dens, &p);
        assert!((a.re - b.0).abs() + (a.im - b.1).abs() < 1e-9, "{id}");
    }
}

#[test]
fn monomial_quadrature_matches_gamma_formula() {
    let quad = SphereQuadrature::new(48);
    for alpha in [
        vec![2, 0],
        vec![4, 2, 0],
        vec![2, 2, 2, 2],
        vec![6, 0, 2, 0, 4],
        vec![1, 2, 0],
    ] {
        let exact = valcalc::scalar::sphere_integral_monomial(&alpha)
            .to_complex()
            .0;
        assert!((quad.monomial(&alpha) - exact).abs() < 1e-12, "{alpha:?}");
    }
    assert_eq!(
        valcalc::scalar::sphere_integral_monomial(&[0, 0, 0]),
        ExactScalar::pi().scale_int(4)
    );
}
