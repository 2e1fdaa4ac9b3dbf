use valcalc::forms::{hwv_form, HwvId};
use valcalc::repn::{certify_hwv, highest_weight, primitive_weights};
use valcalc::rumin::{rumin_differential, verify_negative_ledger, verify_rumin_ledger};

#[test]
fn certified_through_dimension_seven() {
    let mut count = 0;
    for n in 2..=7 {
        for id in HwvId::grid(n, 5) {
            let cert = certify_hwv(id).unwrap();
            assert_eq!(cert.weight, highest_weight(id));
            assert_eq!(cert.weight[0], id.m as i64);
            count += 1;
        }
    }
    assert_eq!(count, 144);
}

#[test]
fn weights() {
    assert_eq!(highest_weight(HwvId::new(2, 1, 1, 2).unwrap()), vec![2]);
    assert_eq!(highest_weight(HwvId::new(5, 2, 1, 3).unwrap()), vec![3, 0]);
    assert_eq!(highest_weight(HwvId::new(5, 2, 2, 3).unwrap()), vec![3, 2]);
    assert_eq!(
        highest_weight(HwvId::new(6, 3, -3, 4).unwrap()),
        vec![4, 2, -2]
    );
    assert_eq!(primitive_weights(4, 2, 2), vec![vec![2, -2], vec![2, 2]]);
}

#[test]
fn invalid_ids() {
    assert!(HwvId::new(3, 2, 2, 2).is_err());
    assert!(HwvId::new(5, 2, -2, 2).is_err());
    assert!(HwvId::new(4, 1, 1, 1).is_err());
    assert!(hwv_form(HwvId {
        n: 2,
        r: 1,
        k: -1,
        m: 2
    })
    .is_err());
}

#[test]
fn rumin_identities() {
    for n in 2..=6u8 {
        for r in 1..n {
            for k in 1..=r.min(n - r) {
                for e in verify_rumin_ledger(n, r, k) {
                    assert!(e.holds, "({n},{r},{k}) {}", e.name);
                }
            }
        }
        if n % 2 == 0 && n >= 4 {
            assert!(verify_negative_ledger(n).iter().all(|e| e.holds));
        }
    }
}

#[test]
fn rumin_differentials() {
    for n in 2..=6 {
        for id in HwvId::grid(n, 5) {
            let c = rumin_differential(id).unwrap();
            assert!(c.terms > 0, "{id}");
        }
    }
}
