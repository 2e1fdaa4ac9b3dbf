//! The Rumin differential of the highest weight forms and the identities behind it.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{DoubleForm, Subset};
use crate::forms::{
    alpha, dressed, dz, dzeta, gamma, hwv_form, named_form, nu, zeta, zeta_bar1_pow, FormsError,
    HwvId, NamedForm, Sets,
};
use crate::scalar::ExactScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuminError {
    #[error("d(ω + c·θα) differs from the closed form on the sphere bundle for {0}")]
    NotEquivalent(HwvId),
    #[error("exact residue check failed for {0}")]
    Residue(HwvId),
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub name: String,
    pub holds: bool,
}

pub(crate) struct Ledger(pub Vec<LedgerEntry>);

impl Ledger {
    pub(crate) fn exact(&mut self, name: &str, lhs: &DoubleForm, rhs: &DoubleForm) {
        self.0.push(LedgerEntry {
            name: name.into(),
            holds: lhs == rhs,
        });
    }

    pub(crate) fn sphere(&mut self, name: &str, lhs: &DoubleForm, rhs: &DoubleForm) {
        self.0.push(LedgerEntry {
            name: name.into(),
            holds: lhs.sphere_equiv(rhs),
        });
    }
}

fn sgn(k: i64) -> ExactScalar {
    ExactScalar::sign(k)
}

/// `c_{r,m} = (-1)^{n+1}(n+m-r-2)`.
pub fn primitive_coefficient(n: u8, r: u8, m: u32) -> ExactScalar {
    sgn(n as i64 + 1).scale_int(n as i64 + m as i64 - r as i64 - 2)
}

/// Scalar coefficients `(a_σ, a_τ)` with `Dω = c ζ_1̄^{m-2} (a_σ σ + a_τ τ) α`.
pub fn sigma_tau_coefficients(id: HwvId) -> (i64, i64) {
    let (n, r, k, m) = (id.n as i64, id.r as i64, id.k as i64, id.m as i64);
    if k < 0 {
        let l = n / 2;
        (m + l - 1, if (l + 1) % 2 == 0 { 1 } else { -1 })
    } else {
        let s = if (k + 1) % 2 == 0 { 1 } else { -1 };
        (m + k - 1, s * (n - r - k + 1))
    }
}

/// The primitive `ω_{r,k,m} + c_{r,m} ζ_1̄^{m-2} θ_{r,k} α`.
pub fn primitive_form(id: HwvId) -> Result<DoubleForm, RuminError> {
    let n = id.n;
    let w = hwv_form(id)?;
    let th = named_form(NamedForm::Theta, n, id.r as i64, id.k as i64);
    let zb = zeta_bar1_pow(n, id.m);
    let a = alpha(n, Subset::full(n));
    let c = primitive_coefficient(n, id.r, id.m);
    Ok(&w + &(&(&zb * &th) * &a).scale(&c))
}

/// The closed form of the Rumin differential `D ω_{r,k,m}`.
pub fn d_omega(id: HwvId) -> DoubleForm {
    let n = id.n;
    let (r, k) = (id.r as i64, id.k as i64);
    let (a_s, a_t) = sigma_tau_coefficients(id);
    let sigma = named_form(NamedForm::Sigma, n, r, k);
    let tau = named_form(NamedForm::Tau, n, r, k);
    let bracket = &sigma.scale_int(a_s) + &tau.scale_int(a_t);
    let c = primitive_coefficient(n, id.r, id.m);
    (&(&zeta_bar1_pow(n, id.m) * &bracket) * &alpha(n, Subset::full(n))).scale(&c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuminCertificate {
    pub id: HwvId,
    pub c: String,
    pub sigma_coefficient: String,
    pub tau_coefficient: String,
    pub terms: usize,
}

/// Certifies `d(ω + c ζ_1̄^{m-2} θ α) ≡ D ω` on the sphere bundle and the exact identity
/// `(d(prim) - Dω) γ = ζ_1̄^{m-2} (n+m-r-2)(1-ν) δ γ`.
pub fn rumin_differential(id: HwvId) -> Result<RuminCertificate, RuminError> {
    let n = id.n;
    let prim = primitive_form(id)?;
    let dprim = prim.d();
    let rhs = d_omega(id);
    if !dprim.sphere_equiv(&rhs) {
        return Err(RuminError::NotEquivalent(id));
    }
    let g = gamma(n, Subset::full(n));
    let delta = named_form(NamedForm::Delta, n, id.r as i64, id.k as i64);
    let one_minus_nu = &DoubleForm::one(n) - &nu(n, Subset::full(n));
    let scale = ExactScalar::int(n as i64 + id.m as i64 - id.r as i64 - 2);
    let expect = (&(&(&zeta_bar1_pow(n, id.m) * &one_minus_nu) * &delta) * &g).scale(&scale);
    if &(&dprim - &rhs) * &g != expect {
        return Err(RuminError::Residue(id));
    }
    let c = primitive_coefficient(n, id.r, id.m);
    let (a_s, a_t) = sigma_tau_coefficients(id);
    Ok(RuminCertificate {
        id,
        sigma_coefficient: (&c * &ExactScalar::int(a_s)).to_string(),
        tau_coefficient: (&c * &ExactScalar::int(a_t)).to_string(),
        c: c.to_string(),
        terms: rhs.len(),
    })
}

/// Every identity used in computing the Rumin differential, checked for `(n, r, k)`
/// with `k ≥ 1`. Identities involving `m` are checked for `2 ≤ m ≤ 4`.
pub fn verify_rumin_ledger(n: u8, r: u8, k: u8) -> Vec<LedgerEntry> {
    let mut led = Ledger(Vec::new());
    let s = Sets::new(n, k);
    let (ni, ri, ki) = (n as i64, r as i64, k as i64);
    let full = s.all();

    let czk = zeta(n, s.k).conj();
    let cdzk = dzeta(n, s.k).conj();
    let cdzk_pow = |j: i64| cdzk.dp(j);
    let dzl = dzeta(n, s.l);
    let dzz_l = dz(n, s.l);
    let dzz_kb = dz(n, s.kb);
    let dzz_j = dz(n, s.j);
    let zl = zeta(n, s.l);
    let zkb = zeta(n, s.kb);
    let zj = zeta(n, s.j);
    let dzj = dzeta(n, s.j);

    let prod = |fs: &[&DoubleForm]| fs.iter().fold(DoubleForm::one(n), |acc, f| &acc * *f);

    let lhs = prod(&[&czk, &cdzk_pow(ki - 1), &dzeta(n, s.kb)]);
    let rhs = prod(&[&cdzk_pow(ki), &zkb]).scale(&sgn(ki - 1));
    led.exact("conj(zeta_K) dzeta_Kb product", &lhs, &rhs);

    let lhs = prod(&[&czk, &cdzk_pow(ki - 1), &gamma(n, s.kb)]);
    let rhs = prod(&[&cdzk_pow(ki), &nu(n, s.k)]).scale(&sgn(ki - 1));
    led.exact("conj(zeta_K) gamma_Kb product", &lhs, &rhs);

    let delta = dressed(NamedForm::Delta, n, ri, ki);
    let theta = dressed(NamedForm::Theta, n, ri, ki);
    let sigma = dressed(NamedForm::Sigma, n, ri, ki);
    let omega = dressed(NamedForm::Omega, n, ri, ki);

    let rhs = prod(&[
        &cdzk_pow(ki),
        &dzl.dp(ni - ri - ki),
        &dzz_l.dp(ri - ki),
        &dzz_kb.dp(ki),
    ])
    .scale(&sgn(ki));
    led.exact("delta split", &delta, &rhs);

    let rhs = &prod(&[
        &cdzk_pow(ki),
        &zkb,
        &dzl.dp(ni - ri - ki),
        &dzz_l.dp(ri - ki),
        &dzz_kb.dp(ki - 1),
    ]) + &prod(&[
        &cdzk_pow(ki),
        &zl,
        &dzl.dp(ni - ri - ki),
        &dzz_l.dp(ri - ki - 1),
        &dzz_kb.dp(ki),
    ]);
    led.exact("sigma split", &sigma, &rhs);

    let al = alpha(n, s.l);
    let gl = gamma(n, s.l);
    let nl = nu(n, s.l);
    let lhs = prod(&[&dzl.dp(ni - ri - ki), &dzz_l.dp(ri - ki), &al]);
    let rhs = -prod(&[&dzl.dp(ni - ri - ki - 1), &dzz_l.dp(ri - ki + 1), &gl]);
    led.exact("alpha_L into gamma_L", &lhs, &rhs);

    let lhs = prod(&[&zl, &dzl.dp(ni - ri - ki), &dzz_l.dp(ri - ki - 1), &al]);
    let rhs = &prod(&[&dzl.dp(ni - ri - ki), &dzz_l.dp(ri - ki), &nl]).scale(&sgn(ni - 1))
        - &prod(&[&zl, &dzl.dp(ni - ri - ki - 1), &dzz_l.dp(ri - ki), &gl]);
    led.exact("zeta_L alpha_L rewrite", &lhs, &rhs);

    let dal = alpha(n, s.l).d();
    let lhs = prod(&[&zj, &dzj.dp(ni - ri - ki), &dzz_j.dp(ri - 1), &dal]);
    let rhs = prod(&[&dzj.dp(ni - ri - ki), &dzz_j.dp(ri), &gl]).scale(&sgn(ni - ki));
    led.exact("dalpha_L rewrite", &lhs, &rhs);

    let dakb = alpha(n, s.kb).d();
    let gk = gamma(n, s.k);
    let lhs = &theta * &dakb;
    let rhs = &prod(&[
        &czk,
        &cdzk_pow(ki - 1),
        &dzl.dp(ni - ri - ki),
        &dzz_j.dp(ri),
        &gk,
    ])
    .scale(&sgn(ni - ki))
        + &prod(&[
            &cdzk_pow(ki),
            &zl,
            &dzl.dp(ni - ri - ki - 1),
            &dzz_j.dp(ri),
            &gk,
        ])
        .scale(&sgn(ni));
    led.exact("theta dalpha_Kb rewrite", &lhs, &rhs);

    // products that vanish identically on R^n × R^n
    let ak = alpha(n, s.k);
    let akb = alpha(n, s.kb);
    let dak = alpha(n, s.k).d();
    let gkb = gamma(n, s.kb);
    let nk = nu(n, s.k);
    let pn = sgn(ni);
    let zero = DoubleForm::zero(n);
    let items: Vec<(&str, DoubleForm)> = vec![
        (
            "theta dalpha_K = (-1)^n sigma alpha_K",
            &(-(&theta * &dak)) + &(&sigma * &ak).scale(&pn),
        ),
        (
            "delta nu_K = -(-1)^n sigma alpha_Kb",
            &(&delta * &nk) + &(&sigma * &akb).scale(&pn),
        ),
        ("theta dalpha_Kb gamma_K = 0", prod(&[&theta, &dakb, &gk])),
        ("sigma gamma_Kb = 0", &sigma * &gkb),
        ("delta gamma_Kb = 0", &delta * &gkb),
        (
            "delta nu_K gamma_K = theta dalpha_Kb gamma_Kb",
            &prod(&[&delta, &nk, &gk]) - &prod(&[&theta, &dakb, &gkb]),
        ),
        (
            "delta nu_L gamma_L = -(-1)^n sigma alpha_L gamma_L",
            &prod(&[&delta, &nl, &gl]) + &prod(&[&sigma, &al, &gl]).scale(&pn),
        ),
        (
            "delta nu_K gamma_L = theta dalpha_L gamma_Kb",
            &prod(&[&delta, &nk, &gl]) - &prod(&[&theta, &dal, &gkb]),
        ),
        ("theta dalpha_L gamma_L = 0", prod(&[&theta, &dal, &gl])),
        (
            "mixed gamma_K, gamma_L terms",
            &(&(&(&(&delta * &nl) - &(&theta * &dal)) + &(&sigma * &al).scale(&pn)) * &gk)
                - &prod(&[&theta, &dakb, &gl]),
        ),
    ];
    for (name, f) in items {
        led.exact(name, &f, &zero);
    }

    // Plain forms from here on.
    let p = |name| named_form(name, n, ri, ki);
    let (w, de, th, si, ta) = (
        p(NamedForm::Omega),
        p(NamedForm::Delta),
        p(NamedForm::Theta),
        p(NamedForm::Sigma),
        p(NamedForm::Tau),
    );
    let a = alpha(n, full);
    let g = gamma(n, full);
    let da = a.d();
    let nuf = nu(n, full);

    // exact form of the identity, then its restriction to the sphere bundle
    let exact =
        &(&prod(&[&de, &nuf, &g]) - &prod(&[&th, &da, &g])) + &prod(&[&si, &a, &g]).scale(&pn);
    led.exact("theta dalpha off the sphere", &exact, &zero);
    led.sphere(
        "theta dalpha on the sphere",
        &(&th * &da),
        &(&de + &(&si * &a).scale(&pn)),
    );

    led.exact("d omega = (n-r) delta", &w.d(), &de.scale_int(ni - ri));
    let zb = zeta_bar1_pow(n, 3);
    let dzb = zb.d();
    led.exact("dzeta_1b omega = zeta_1b delta", &(&dzb * &w), &(&zb * &de));
    led.exact(
        "dzeta_1b theta = zeta_1b sigma",
        &(&dzb * &th),
        &(&zb * &si),
    );
    let rhs = &si.scale_int(ki) + &ta.scale(&sgn(ki + 1).scale_int(ni - ri - ki + 1));
    led.exact("d theta", &th.d(), &rhs);

    led.exact("dzeta_1b sigma = 0", &(&dzb * &si), &zero);
    led.exact(
        "dzeta_1b d theta = -zeta_1b d sigma",
        &(&dzb * &th.d()),
        &-(&zb * &si.d()),
    );
    if ki < ri {
        let mut all = true;
        for m in 2..=4u32 {
            let lhs = &zeta_bar1_pow(n, m) * &si.d();
            let target = hwv_form(HwvId {
                n,
                r: r - 1,
                k: k as i8,
                m,
            })
            .expect("valid id")
            .d();
            let coef = ExactScalar::ratio(ni - ri - ki + 1, ni + m as i64 - ri - 1);
            all &= lhs == target.scale(&coef);
        }
        led.0.push(LedgerEntry {
            name: "d sigma lowers r".into(),
            holds: all,
        });
    }
    let skk = named_form(NamedForm::Sigma, n, ki, ki);
    led.exact("d sigma_kk = 0", &skk.d(), &zero);

    // Contractions with the Reeb field
    let t = crate::operators::reeb_field(n);
    led.exact("iT(alpha)", &a.contract(&t), &nuf);
    led.exact("iT(sigma)", &si.contract(&t), &zero);
    let th_lower = if ri - 1 < ki {
        zero.clone()
    } else {
        named_form(NamedForm::Theta, n, ri - 1, ki)
    };
    led.exact("iT(tau)", &ta.contract(&t), &th_lower.scale(&sgn(ki + 1)));

    // dressings of ω: two-term split and the (n-r)δ differential on dressed forms
    let split = &prod(&[
        &zkb,
        &dzeta(n, s.kb).dp(ki - 1),
        &dzl.dp(ni - ri - ki),
        &dzz_l.dp(ri - ki),
        &dz(n, s.k).conj().dp(ki),
    ]) + &prod(&[
        &zl,
        &dzeta(n, s.kb).dp(ki),
        &dzl.dp(ni - ri - ki - 1),
        &dzz_l.dp(ri - ki),
        &dz(n, s.k).conj().dp(ki),
    ]);
    led.exact("omega split", &omega, &split);
    led.exact("dOmega(dressed)", &omega.d(), &delta.scale_int(ni - ri));
    led.0
}

/// The identities of the `k = -l` family: the reflected forms and the Rumin
/// differential of `ω_{l,-l,m}` for `2 ≤ m ≤ 4`.
pub fn verify_negative_ledger(n: u8) -> Vec<LedgerEntry> {
    let mut led = Ledger(Vec::new());
    let l = (n / 2) as i64;
    for name in [
        NamedForm::Omega,
        NamedForm::Delta,
        NamedForm::Theta,
        NamedForm::Sigma,
        NamedForm::Tau,
    ] {
        led.exact(
            &format!("reflect({name:?})"),
            &dressed(name, n, l, l).reflect(),
            &dressed(name, n, l, -l),
        );
    }
    for m in 2..=4 {
        let id = HwvId {
            n,
            r: n / 2,
            k: -(l as i8),
            m,
        };
        led.0.push(LedgerEntry {
            name: format!("D omega certified (m={m})"),
            holds: rumin_differential(id).is_ok(),
        });
    }
    led.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_differential() {
        let cert = rumin_differential(HwvId {
            n: 2,
            r: 1,
            k: 1,
            m: 2,
        })
        .unwrap();
        assert_eq!(cert.c, "-1");
    }

    #[test]
    fn small_ledger() {
        for e in verify_rumin_ledger(3, 1, 1) {
            assert!(e.holds, "{} fails", e.name);
        }
    }
}
