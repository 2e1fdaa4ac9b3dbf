//! The pairing `φ̄_{r,k,m} * φ_{n-r,k,m}` through the density `ω̄ ∧ Dω` on the sphere.

use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::algebra::{DoubleForm, Idx, IndexSet, Poly, Subset, Var};
use crate::forms::{
    alpha, deta, dressing, dressing2, dw, dz, dzeta, eta, gamma, hwv_form, named_form,
    normalization, nu, theta, theta_both, zeta, FormsError, HwvId, NamedForm, Sets,
};
use crate::rumin::{d_omega, Ledger, LedgerEntry};
use crate::scalar::{ball_volume, binomial, sphere_area, sphere_integral_monomial, ExactScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("ω̄ ∧ Dω ∧ γ is not a multiple of Θ for {0}")]
    NotTopDegree(HwvId),
    #[error("density for {0} differs from the closed form on the sphere")]
    DensityMismatch(HwvId),
    #[error("polynomial depends on variables other than ζ")]
    NotZetaPolynomial,
    #[error("pipeline value {computed} differs from the closed form {expected} for {id}")]
    ClosedFormMismatch {
        id: HwvId,
        computed: String,
        expected: String,
    },
    #[error(transparent)]
    Forms(#[from] FormsError),
}

fn sgn(k: i64) -> ExactScalar {
    ExactScalar::sign(k)
}

fn bin(n: i64, k: i64) -> ExactScalar {
    ExactScalar::bigint(binomial(n, k))
}

/// `∫_{S^{n-1}} p` for a polynomial in the `ζ` variables, after substituting
/// `ζ_j = (ξ_{2j-1} + iξ_{2j})/√2`, `ζ_j̄ = (ξ_{2j-1} - iξ_{2j})/√2` and `ζ_{l+1} = ξ_n`.
pub fn sphere_integral_poly(p: &Poly) -> Result<ExactScalar, PairingError> {
    let n = p.n();
    let ix = IndexSet { n };
    let l = ix.l();
    let mut cache: HashMap<Vec<u32>, ExactScalar> = HashMap::new();
    let mut total = ExactScalar::zero();
    for (mono, c) in p.terms() {
        for pos in 0..n {
            if mono.exp(Var::Z(Idx(pos))) > 0 {
                return Err(PairingError::NotZetaPolynomial);
            }
        }
        if mono.exp(Var::Cos) > 0 || mono.exp(Var::Sin) > 0 {
            return Err(PairingError::NotZetaPolynomial);
        }
        // expansions per coordinate block, as lists of (exponents, coefficient)
        let mut acc: Vec<(Vec<u32>, ExactScalar)> = vec![(Vec::new(), c.clone())];
        for j in 1..=l {
            let a = mono.exp(Var::Zeta(Idx::plain(j))) as i64;
            let b = mono.exp(Var::Zeta(Idx::barred(j))) as i64;
            let pre = ExactScalar::sqrt2_pow(-(a + b) as i32);
            let mut block: HashMap<(u32, u32), ExactScalar> = HashMap::new();
            for s in 0..=a {
                for t in 0..=b {
                    let e1 = (s + t) as u32;
                    let e2 = (a - s + b - t) as u32;
                    if e1 % 2 == 1 || e2 % 2 == 1 {
                        continue;
                    }
                    // (iξ2)^{a-s} (-iξ2)^{b-t}
                    let phase = &ExactScalar::i_pow(a - s) * &ExactScalar::i_pow(3 * (b - t));
                    let coeff =
                        &(&phase * &ExactScalar::bigint(binomial(a, s) * binomial(b, t))) * &pre;
                    *block.entry((e1, e2)).or_default() += &coeff;
                }
            }
            let mut next = Vec::new();
            for (ex, cx) in &acc {
                for ((e1, e2), cb) in &block {
                    if cb.is_zero() {
                        continue;
                    }
                    let mut ey = ex.clone();
                    ey.push(*e1);
                    ey.push(*e2);
                    next.push((ey, cx * cb));
                }
            }
            acc = next;
        }
        if let Some(u) = ix.unpaired() {
            let e = mono.exp(Var::Zeta(u)) as u32;
            if e % 2 == 1 {
                continue;
            }
            acc.iter_mut().for_each(|(ex, _)| ex.push(e));
        }
        for (ex, cx) in acc {
            let val = cache
                .entry(ex.clone())
                .or_insert_with(|| sphere_integral_monomial(&ex));
            total += &(&cx * val);
        }
    }
    Ok(total)
}

/// The coefficients `a = (m+r-2)(m+r) C(n-2k, r-k)` and `b = (m+r-2)(m+k-1) C(n-2k-1, r-k)`.
pub fn density_coefficients(id: HwvId) -> (BigInt, BigInt) {
    let (n, r, k, m) = (id.n as i64, id.r as i64, id.k as i64, id.m as i64);
    let a = BigInt::from((m + r - 2) * (m + r)) * binomial(n - 2 * k, r - k);
    let b = BigInt::from((m + r - 2) * (m + k - 1)) * binomial(n - 2 * k - 1, r - k);
    (a, b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WdwDensity {
    pub id: HwvId,
    /// `f` with `ω̄_{r,k,m} ∧ Dω_{n-r,k,m} ≡ f · vol` on the sphere bundle.
    pub density: Poly,
    pub a: BigInt,
    pub b: BigInt,
}

/// The density of `ω̄_{r,k,m} ∧ Dω_{n-r,k,m}`, read off from the top-degree form
/// `ω̄ Dω γ = P Θ` together with `Θ = (-1)^{n+l+1} vol γ`. For `k ≥ 1` it is checked
/// against `(-1)^{r+k} |ζ_1|^{2(m-2)} (a ν_K^2 + b ν_L)` modulo `ν - 1`.
pub fn wdw_density(id: HwvId) -> Result<WdwDensity, PairingError> {
    let n = id.n;
    let full = Subset::full(n);
    let wbar = hwv_form(id)?.conj();
    let dual = HwvId { r: n - id.r, ..id };
    let top = &(&wbar * &d_omega(dual)) * &gamma(n, full);
    let theta_mask = theta(n, full)
        .terms()
        .next()
        .map(|((_, l, _), _)| *l)
        .expect("Θ is a word");
    let sign = sgn(n as i64 + (n / 2) as i64 + 1);
    let mut density = Poly::zero(n);
    for ((mono, l, r), c) in top.terms() {
        if *l != theta_mask || *r != 0 {
            return Err(PairingError::NotTopDegree(id));
        }
        density.add_term(*mono, c * &sign);
    }
    let (a, b) = density_coefficients(id);
    if id.k > 0 {
        let s = Sets::new(n, id.k as u8);
        let z1 = &DoubleForm::var(n, Var::Zeta(Idx::plain(1)))
            * &DoubleForm::var(n, Var::Zeta(Idx::barred(1)));
        let z1pow = (0..id.m - 2).fold(DoubleForm::one(n), |acc, _| &acc * &z1);
        let nk = nu(n, s.k);
        let inner = &(&nk * &nk).scale(&ExactScalar::bigint(a.clone()))
            + &nu(n, s.l).scale(&ExactScalar::bigint(b.clone()));
        let expect = (&z1pow * &inner).scale(&sgn(id.r as i64 + id.k as i64));
        if !(&density.to_form() - &expect).reduce_mod_sphere().is_zero() {
            return Err(PairingError::DensityMismatch(id));
        }
    }
    Ok(WdwDensity { id, density, a, b })
}

/// `(-1)^k (m+k-1)(n+m-k) C(n-2k, r-k) v_{n+2m-2} / (v_{n+m-r-2} v_{r+m-2} s_{2m-3})`.
/// For `k = -l` the value of `k = l` is returned.
pub fn pairing_closed_form(id: HwvId) -> ExactScalar {
    let k = id.k.unsigned_abs() as i64;
    let (n, r, m) = (id.n as i64, id.r as i64, id.m as i64);
    let num = (&sgn(k) * &bin(n - 2 * k, r - k)).scale_int((m + k - 1) * (n + m - k));
    let num = &num * &ball_volume((n + 2 * m - 2) as u32);
    let den = &(&ball_volume((n + m - r - 2) as u32) * &ball_volume((r + m - 2) as u32))
        * &sphere_area((2 * m - 3) as u32);
    num.try_div(&den).expect("volumes are invertible")
}

/// `φ̄_{r,k,m} * φ_{n-r,k,m}` through the full pipeline: the engine density is
/// integrated over the sphere and multiplied by `(-1)^r conj(N_r) N_{n-r}`.
pub fn pairing_from_density(id: HwvId) -> Result<ExactScalar, PairingError> {
    let dens = wdw_density(id)?;
    let integral = sphere_integral_poly(&dens.density)?;
    let nr = normalization(id.n, id.r, id.m).conj();
    let nd = normalization(id.n, id.n - id.r, id.m);
    Ok(&(&(&nr * &nd) * &integral) * &sgn(id.r as i64))
}

/// Pipeline value, checked against the closed form.
pub fn pairing_constant(id: HwvId) -> Result<ExactScalar, PairingError> {
    let computed = pairing_from_density(id)?;
    let expected = pairing_closed_form(id);
    if computed != expected {
        return Err(PairingError::ClosedFormMismatch {
            id,
            computed: computed.to_string(),
            expected: expected.to_string(),
        });
    }
    Ok(computed)
}

/// The identities used for the density, checked for `(n, r, k)` with `k ≥ 1`.
pub fn verify_pairing_ledger(n: u8, r: u8, k: u8) -> Vec<LedgerEntry> {
    let mut led = Ledger(Vec::new());
    let s = Sets::new(n, k);
    let (ni, ri, ki) = (n as i64, r as i64, k as i64);
    let l = (n / 2) as i64;
    let full = s.all();
    let prod = |fs: &[&DoubleForm]| fs.iter().fold(DoubleForm::one(n), |acc, f| &acc * *f);

    let ceta_k = eta(n, s.k).conj();
    let cdeta_k = deta(n, s.k).conj();
    let eta_kb = eta(n, s.kb);
    let eta_l = eta(n, s.l);
    let deta_l = deta(n, s.l);
    let dw_kb = dw(n, s.kb);
    let dw_l = dw(n, s.l);
    let czeta_kb = zeta(n, s.kb).conj();
    let cdzeta_kb = dzeta(n, s.kb).conj();
    let czeta_l = zeta(n, s.l).conj();
    let cdzeta_l = dzeta(n, s.l).conj();
    let cdz_l = dz(n, s.l).conj();
    let dz_k = dz(n, s.k);
    let (nk, nl, nf) = (nu(n, s.k), nu(n, s.l), nu(n, full));
    let (gk, gkb, gl, g) = (gamma(n, s.k), gamma(n, s.kb), gamma(n, s.l), gamma(n, full));
    let (ak, akb, al, a) = (alpha(n, s.k), alpha(n, s.kb), alpha(n, s.l), alpha(n, full));

    led.exact(
        "conj(eta_K) deta_Kb product",
        &prod(&[&ceta_k, &cdeta_k.dp(ki - 1), &deta(n, s.kb)]),
        &prod(&[&cdeta_k.dp(ki), &eta_kb]).scale(&sgn(ki - 1)),
    );
    led.exact(
        "conj(eta_K) gamma_Kb product",
        &prod(&[&ceta_k, &cdeta_k.dp(ki - 1), &gkb]),
        &prod(&[&cdeta_k.dp(ki), &nk]).scale(&sgn(ki - 1)),
    );
    led.exact(
        "conj(zeta_Kb) gamma_K product",
        &prod(&[&czeta_kb, &cdzeta_kb.dp(ki - 1), &gk]),
        &prod(&[&cdzeta_kb.dp(ki), &nk]).scale(&sgn(ki - 1)),
    );
    led.exact(
        "eta_Kb alpha_Kb product",
        &prod(&[&eta_kb, &dw_kb.dp(ki - 1), &akb]),
        &prod(&[&dw_kb.dp(ki), &nk]).scale(&sgn(ki - 1)),
    );

    let wbar = named_form(NamedForm::Omega, n, ri, ki).conj();
    let split = &prod(&[
        &czeta_kb,
        &cdzeta_kb.dp(ki - 1),
        &cdzeta_l.dp(ni - ri - ki),
        &cdz_l.dp(ri - ki),
        &dz_k.dp(ki),
    ]) + &prod(&[
        &czeta_l,
        &cdzeta_kb.dp(ki),
        &cdzeta_l.dp(ni - ri - ki - 1),
        &cdz_l.dp(ri - ki),
        &dz_k.dp(ki),
    ]);
    led.exact("conj(omega) split", &(&wbar * &dressing(n)), &split);

    let sig = named_form(NamedForm::Sigma, n, ni - ri, ki);
    let tau = named_form(NamedForm::Tau, n, ni - ri, ki);
    let th2 = dressing2(n);
    let sig_split = &prod(&[
        &cdeta_k.dp(ki),
        &eta_kb,
        &deta_l.dp(ri - ki),
        &dw_kb.dp(ki - 1),
        &dw_l.dp(ni - ri - ki),
    ]) + &prod(&[
        &cdeta_k.dp(ki),
        &eta_l,
        &deta_l.dp(ri - ki),
        &dw_kb.dp(ki),
        &dw_l.dp(ni - ri - ki - 1),
    ]);
    led.exact("sigma Theta_2 split", &(&sig * &th2), &sig_split);
    let tau_split = &prod(&[
        &ceta_k,
        &cdeta_k.dp(ki - 1),
        &deta_l.dp(ri - ki + 1),
        &dw_kb.dp(ki),
        &dw_l.dp(ni - ri - ki - 1),
    ]) + &prod(&[
        &cdeta_k.dp(ki),
        &eta_kb,
        &deta_l.dp(ri - ki),
        &dw_kb.dp(ki - 1),
        &dw_l.dp(ni - ri - ki),
    ])
    .scale(&sgn(ki - 1));
    led.exact("tau Theta_2 split", &(&tau * &th2), &tau_split);

    led.exact(
        "alpha_L into gamma_L",
        &prod(&[&deta_l.dp(ri - ki), &dw_l.dp(ni - ri - ki), &al]),
        &-prod(&[&deta_l.dp(ri - ki - 1), &dw_l.dp(ni - ri - ki + 1), &gl]),
    );
    led.exact(
        "eta_L alpha_L rewrite",
        &prod(&[&eta_l, &deta_l.dp(ri - ki), &dw_l.dp(ni - ri - ki - 1), &al]),
        &(&prod(&[&deta_l.dp(ri - ki), &dw_l.dp(ni - ri - ki), &nl]).scale(&sgn(ni - 1))
            - &prod(&[&eta_l, &deta_l.dp(ri - ki - 1), &dw_l.dp(ni - ri - ki), &gl])),
    );
    let kk = s.k.union(s.kb);
    led.exact(
        "K block volume",
        &prod(&[
            &cdzeta_kb.dp(ki),
            &dz_k.dp(ki),
            &cdeta_k.dp(ki),
            &dw_kb.dp(ki),
        ]),
        &theta_both(n, kk),
    );
    let tl = theta_both(n, s.l);
    led.exact(
        "L block volume",
        &prod(&[
            &cdzeta_l.dp(ni - ri - ki),
            &cdz_l.dp(ri - ki),
            &deta_l.dp(ri - ki),
            &dw_l.dp(ni - ri - ki),
        ]),
        &tl.scale(&(&sgn(ni + l + ri) * &bin(ni - 2 * ki, ri - ki))),
    );
    let c11 = &sgn(ni + l + ri + 1) * &bin(ni - 2 * ki - 1, ri - ki);
    led.exact(
        "L block volume with gamma_L",
        &prod(&[
            &czeta_l,
            &cdzeta_l.dp(ni - ri - ki - 1),
            &cdz_l.dp(ri - ki),
            &deta_l.dp(ri - ki),
            &dw_l.dp(ni - ri - ki),
            &gl,
        ]),
        &(&nl * &tl).scale(&c11),
    );
    led.exact(
        "L block volume with alpha_L",
        &prod(&[
            &eta_l,
            &cdzeta_l.dp(ni - ri - ki),
            &cdz_l.dp(ri - ki),
            &deta_l.dp(ri - ki),
            &dw_l.dp(ni - ri - ki - 1),
            &al,
        ]),
        &(&nl * &tl).scale(&c11),
    );

    let zero = DoubleForm::zero(n);
    led.exact("conj(omega) alpha_K = 0", &(&wbar * &ak), &zero);
    led.exact("sigma gamma_Kb = 0", &(&sig * &gkb), &zero);
    led.exact(
        "tau alpha_Kb gamma_Kb = 0",
        &prod(&[&tau, &akb, &gkb]),
        &zero,
    );
    led.exact(
        "conj(omega) gamma_K",
        &prod(&[&wbar, &gk, &dressing(n)]),
        &prod(&[
            &cdzeta_kb.dp(ki),
            &cdzeta_l.dp(ni - ri - ki),
            &cdz_l.dp(ri - ki),
            &dz_k.dp(ki),
            &nk,
        ])
        .scale(&sgn(ni + 1)),
    );
    let common = prod(&[
        &cdeta_k.dp(ki),
        &deta_l.dp(ri - ki),
        &dw_kb.dp(ki),
        &dw_l.dp(ni - ri - ki),
    ]);
    led.exact(
        "sigma alpha_Kb",
        &prod(&[&sig, &akb, &th2]),
        &(&common * &nk).scale(&sgn(ni + ki + 1)),
    );
    led.exact(
        "tau alpha_Kb",
        &prod(&[&tau, &akb, &th2]),
        &(&common * &nk).scale(&sgn(ni)),
    );

    // modulo γ_L, with the witness produced by rearranging the two-term dressing of σ
    let p1 = prod(&[&cdeta_k.dp(ki), &eta_kb, &dw_kb.dp(ki - 1)]);
    let x1 = -prod(&[&p1, &deta_l.dp(ri - ki - 1), &dw_l.dp(ni - ri - ki + 1)]);
    let p2 = prod(&[&cdeta_k.dp(ki), &dw_kb.dp(ki)]);
    let x2 = -prod(&[&p2, &eta_l, &deta_l.dp(ri - ki - 1), &dw_l.dp(ni - ri - ki)]).scale(&sgn(ki));
    let lhs = prod(&[&sig, &al, &th2]);
    let rhs = (&common * &nl).scale(&sgn(ni + ki + 1));
    led.exact(
        "sigma alpha_L modulo gamma_L",
        &(&lhs - &rhs),
        &(&(&x1 + &x2) * &gl),
    );
    let rhs = &prod(&[
        &cdeta_k.dp(ki),
        &eta_kb,
        &dw_kb.dp(ki - 1),
        &deta_l.dp(ri - ki - 1),
        &dw_l.dp(ni - ri - ki + 1),
        &gl,
    ])
    .scale(&sgn(ki))
        - &prod(&[
            &ceta_k,
            &cdeta_k.dp(ki - 1),
            &dw_kb.dp(ki),
            &deta_l.dp(ri - ki),
            &dw_l.dp(ni - ri - ki),
            &gl,
        ]);
    led.exact("tau alpha_L", &prod(&[&tau, &al, &th2]), &rhs);

    let th = theta(n, full);
    let inner = &(&nk * &nk).scale(&bin(ni - 2 * ki, ri - ki))
        + &(&nl * &nf).scale(&bin(ni - 2 * ki - 1, ri - ki));
    led.exact(
        "conj(omega) sigma alpha gamma",
        &prod(&[&wbar, &sig, &a, &g]),
        &(&inner * &th).scale(&sgn(ki + l + ri)),
    );
    led.exact(
        "conj(omega) tau alpha gamma",
        &prod(&[&wbar, &tau, &a, &g]),
        &prod(&[&nk, &nk, &th]).scale(&(&sgn(l + ri + 1) * &bin(ni - 2 * ki, ri - ki))),
    );
    led.0
}

/// The alternative dressings: the split forms of `ω` and `ω̄`, of `δ`, and the `Θ_2`
/// dressings of `σ_{n-r,k}` and `τ_{n-r,k}`.
pub fn verify_dressings(n: u8, r: u8, k: u8) -> bool {
    let names = [
        "conj(omega) split",
        "sigma Theta_2 split",
        "tau Theta_2 split",
    ];
    let ok_pd = verify_pairing_ledger(n, r, k)
        .iter()
        .filter(|e| names.contains(&e.name.as_str()))
        .all(|e| e.holds);
    let ok_r = crate::rumin::verify_rumin_ledger(n, r, k)
        .iter()
        .filter(|e| ["delta split", "sigma split", "omega split"].contains(&e.name.as_str()))
        .all(|e| e.holds);
    ok_pd && ok_r
}

/// Density as a floating-point function of a unit vector, for numerical checks.
pub fn eval_zeta_poly(p: &Poly, xi: &[f64]) -> (f64, f64) {
    let n = p.n();
    let ix = IndexSet { n };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut zeta = vec![(0.0, 0.0); n as usize];
    for j in 1..=ix.l() {
        let (x, y) = (xi[2 * (j as usize - 1)], xi[2 * (j as usize - 1) + 1]);
        zeta[Idx::plain(j).pos()] = (x * s, y * s);
        zeta[Idx::barred(j).pos()] = (x * s, -y * s);
    }
    if let Some(u) = ix.unpaired() {
        zeta[u.pos()] = (xi[n as usize - 1], 0.0);
    }
    let mut total = (0.0, 0.0);
    for (mono, c) in p.terms() {
        let mut v = c.to_complex();
        for i in ix.all() {
            for _ in 0..mono.exp(Var::Zeta(i)) {
                let w = zeta[i.pos()];
                v = (v.0 * w.0 - v.1 * w.1, v.0 * w.1 + v.1 * w.0);
            }
        }
        total.0 += v.0;
        total.1 += v.1;
    }
    total
}
