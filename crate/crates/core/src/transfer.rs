//! Pullback along `ι: ℝ^{n-1} → ℝ^n` and pushforward along `π: ℝ^n → ℝ^{n-1}` on
//! highest weight vectors.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Dir, DoubleForm, Idx, Poly, PolyMap, RGen, Var, VectorField};
use crate::forms::{dressing, dz, hwv_form, normalization, z, zeta, FormsError, HwvId, Sets};
use crate::rumin::{Ledger, LedgerEntry};
use crate::scalar::{trig_moment, ExactScalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("transfer needs n ≥ 3, got {0}")]
    Dimension(u8),
    #[error("form has no substitution rule for {0}")]
    NoRule(&'static str),
    #[error("transfer of {0} is not covered by the case table")]
    OutOfScope(HwvId),
    #[error("transferred form of {0} is not a multiple of the target form")]
    Residual(HwvId),
    #[error("transfer of {id}: computed {computed}, expected {expected}")]
    CaseMismatch {
        id: HwvId,
        computed: String,
        expected: String,
    },
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// `coefficient · φ^{(n-1)}_{target}`; `target = None` means the transfer vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferResult {
    #[serde(serialize_with = "ser_scalar")]
    pub coefficient: ExactScalar,
    pub target: Option<HwvId>,
}

fn ser_scalar<S: serde::Serializer>(x: &ExactScalar, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl TransferResult {
    pub fn zero() -> Self {
        TransferResult {
            coefficient: ExactScalar::zero(),
            target: None,
        }
    }

    fn to(coefficient: ExactScalar, target: HwvId) -> Self {
        TransferResult {
            coefficient,
            target: Some(target),
        }
    }
}

impl std::fmt::Display for TransferResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.target {
            Some(t) => write!(f, "{} * phi{}", self.coefficient, t),
            None => f.write_str("0"),
        }
    }
}

fn check_dim(n: u8) -> Result<(), TransferError> {
    if n < 3 || n as usize > crate::algebra::MAX_N {
        return Err(TransferError::Dimension(n));
    }
    Ok(())
}

/// The substitution table of `F(x, u, ϑ) = (ι x, cos ϑ ι u + sin ϑ e_n)`. With
/// `fiber = false` it is the table of `ι` itself (`ϑ = 0`). Right generators of the
/// last direction go to `Dx`, `Dξ`.
fn substitution(n: u8, fiber: bool) -> PolyMap {
    let t = n - 1;
    let one = || Poly::constant(t, ExactScalar::one());
    let (c, s) = if fiber {
        (Poly::var(t, Var::Cos), Poly::var(t, Var::Sin))
    } else {
        (one(), Poly::zero(t))
    };
    let mut map = PolyMap::new(t);
    let paired = if n % 2 == 1 { n - 1 } else { n - 2 };
    for p in 0..paired {
        let i = Idx(p);
        map = map.set(Var::Zeta(i), &c * &Poly::var(t, Var::Zeta(i)));
    }
    if n % 2 == 1 {
        let u = Idx(n - 1);
        map = map
            .set(Var::Z(u), Poly::zero(t))
            .set(Var::Zeta(u), s)
            .set_right(RGen::Dz(u), DoubleForm::right(t, RGen::Dx))
            .set_right(RGen::Dzeta(u), DoubleForm::right(t, RGen::Dxi));
    } else {
        let (a, b) = (Idx(n - 2), Idx(n - 1));
        let u = Idx(n - 2);
        let h = ExactScalar::sqrt2_pow(-1);
        let zu = Poly::var(t, Var::Z(u)).scale(&h);
        let cz = &c * &Poly::var(t, Var::Zeta(u));
        let is = s.scale(&ExactScalar::i());
        let rz = |g: fn(Idx) -> RGen, extra: RGen, sign: i64| {
            let ix = DoubleForm::right(t, extra).scale(&ExactScalar::i().scale_int(sign));
            (&DoubleForm::right(t, g(u)) + &ix).scale(&h)
        };
        map = map
            .set(Var::Z(a), zu.clone())
            .set(Var::Z(b), zu)
            .set(Var::Zeta(a), (&cz + &is).scale(&h))
            .set(Var::Zeta(b), (&cz - &is).scale(&h))
            .set_right(RGen::Dz(a), rz(RGen::Dz, RGen::Dx, 1))
            .set_right(RGen::Dz(b), rz(RGen::Dz, RGen::Dx, -1))
            .set_right(RGen::Dzeta(a), rz(RGen::Dzeta, RGen::Dxi, 1))
            .set_right(RGen::Dzeta(b), rz(RGen::Dzeta, RGen::Dxi, -1));
    }
    map
}

fn check_generators(w: &DoubleForm) -> Result<(), TransferError> {
    const EXTRA_RIGHT: u32 = 0b11 << 16;
    const THETA_LEFT: u32 = 1 << 16;
    for ((m, l, r), _) in w.terms() {
        if m.exp(Var::Cos) > 0 || m.exp(Var::Sin) > 0 {
            return Err(TransferError::NoRule("cos ϑ, sin ϑ"));
        }
        if l & THETA_LEFT != 0 {
            return Err(TransferError::NoRule("dϑ"));
        }
        if r & EXTRA_RIGHT != 0 {
            return Err(TransferError::NoRule("Dx, Dξ"));
        }
    }
    Ok(())
}

/// `F^* w`, a double form over `ℝ^{n-1}` with the extra variables `cos ϑ, sin ϑ`, `dϑ`
/// and the right generators `Dx, Dξ` of the last direction.
pub fn fiber_pullback(w: &DoubleForm) -> Result<DoubleForm, TransferError> {
    check_dim(w.n())?;
    check_generators(w)?;
    Ok(w.pullback(&substitution(w.n(), true)))
}

/// `ι^* w`.
pub fn inclusion_pullback(w: &DoubleForm) -> Result<DoubleForm, TransferError> {
    check_dim(w.n())?;
    check_generators(w)?;
    Ok(w.pullback(&substitution(w.n(), false)))
}

/// `∫_{-π/2}^{π/2} i_{∂ϑ} w dϑ`.
pub fn fiber_integral(w: &DoubleForm) -> DoubleForm {
    let n = w.n();
    let contracted =
        w.contract(&VectorField::new(n).with(Dir::Theta, Poly::constant(n, ExactScalar::one())));
    let mut out = DoubleForm::zero(n);
    for ((m, l, r), c) in contracted.terms() {
        let (a, b) = (m.exp(Var::Cos), m.exp(Var::Sin));
        if b % 2 == 1 {
            continue;
        }
        let mut mono = *m;
        mono.0
            .iter_mut()
            .skip(2 * crate::algebra::MAX_N)
            .for_each(|e| *e = 0);
        let val = trig_moment(a as u32, b as u32).scale_int(2);
        out.add_term((mono, *l, *r), c * &val);
    }
    out
}

/// The field `∂/∂x_n` in complex coordinates.
pub fn last_coordinate_field(n: u8) -> VectorField {
    let one = Poly::constant(n, ExactScalar::one());
    if n % 2 == 1 {
        VectorField::new(n).with(Dir::Z(Idx(n - 1)), one)
    } else {
        let h = &ExactScalar::i() * &ExactScalar::sqrt2_pow(-1);
        VectorField::new(n)
            .with(Dir::Z(Idx::plain(n / 2)), one.scale(&h))
            .with(Dir::Z(Idx::barred(n / 2)), one.scale(&-h))
    }
}

/// `c̃_n`: `i` for even `n`, `1` for odd `n`.
pub fn tilde_c(n: u8) -> ExactScalar {
    if n.is_multiple_of(2) {
        ExactScalar::i()
    } else {
        ExactScalar::one()
    }
}

/// Checks `F^* Θ_1^{(n)} = c̃_n (-1)^{n+1} Θ_1^{(n-1)} Dx`.
pub fn vol_dimension_holds(n: u8) -> Result<bool, TransferError> {
    let lhs = fiber_pullback(&dressing(n))?;
    let rhs = (&dressing(n - 1) * &DoubleForm::right(n - 1, RGen::Dx))
        .scale(&(&tilde_c(n) * &ExactScalar::sign(n as i64 + 1)));
    Ok(lhs == rhs)
}

/// `κ` with `w = κ · target`, exactly or on the sphere bundle.
fn proportionality(w: &DoubleForm, target: &DoubleForm) -> Option<ExactScalar> {
    if target.is_zero() {
        return (w.is_zero() || w.sphere_equiv(target)).then(ExactScalar::zero);
    }
    let ((key, c0), _) = (target.terms().next()?, ());
    let c = w
        .terms()
        .find(|(k, _)| *k == key)
        .map(|(_, c)| c.clone())
        .unwrap_or_default();
    let kappa = c.try_div(c0).ok()?;
    let scaled = target.scale(&kappa);
    (*w == scaled || w.sphere_equiv(&scaled)).then_some(kappa)
}

fn target_form(t: Option<HwvId>, n: u8) -> Result<DoubleForm, TransferError> {
    Ok(match t {
        Some(t) => hwv_form(t)?,
        None => DoubleForm::zero(n),
    })
}

/// The case table for `ι^* φ^{(n)}_{r,k,m}`.
pub fn pullback_expected(id: HwvId) -> TransferResult {
    let (n, r, k) = (id.n, id.r, id.k);
    if k > 0 && n % 2 == 0 && k as u8 == n / 2 {
        let t = HwvId {
            n: n - 1,
            r: k as u8,
            k: k - 1,
            m: id.m,
        };
        TransferResult::to(ExactScalar::ratio(1, 2), t)
    } else if k > 0 && r < n - 1 && (k as u8) < n - r {
        TransferResult::to(ExactScalar::one(), HwvId { n: n - 1, ..id })
    } else {
        TransferResult::zero()
    }
}

/// The case table for `π_* φ^{(n)}_{r,k,m}`.
pub fn pushforward_expected(id: HwvId) -> TransferResult {
    let (n, r, k) = (id.n, id.r, id.k);
    if k > 0 && (k as u8) < r {
        TransferResult::to(
            ExactScalar::one(),
            HwvId {
                n: n - 1,
                r: r - 1,
                ..id
            },
        )
    } else if k > 0 && n % 2 == 0 && k as u8 == n / 2 {
        let t = HwvId {
            n: n - 1,
            r: k as u8 - 1,
            k: k - 1,
            m: id.m,
        };
        TransferResult::to(ExactScalar::ratio(-1, 2), t)
    } else {
        TransferResult::zero()
    }
}

fn finish(
    id: HwvId,
    computed: &DoubleForm,
    expected: TransferResult,
) -> Result<TransferResult, TransferError> {
    let n = id.n;
    let target = target_form(expected.target, n - 1)?;
    let kappa = proportionality(computed, &target).ok_or(TransferError::Residual(id))?;
    let result = match expected.target {
        Some(t) => {
            let ratio = normalization(n, id.r, id.m)
                .try_div(&normalization(n - 1, t.r, t.m))
                .expect("normalizations are invertible");
            TransferResult {
                coefficient: &ratio * &kappa,
                target: Some(t),
            }
        }
        None => TransferResult::zero(),
    };
    if result != expected {
        return Err(TransferError::CaseMismatch {
            id,
            computed: result.to_string(),
            expected: expected.to_string(),
        });
    }
    Ok(result)
}

/// `(-1)^n ∫ i_{∂ϑ} F^* ω_{r,k,m} dϑ`, the form over `ℝ^{n-1}` representing `ι^* φ` up
/// to normalization.
pub fn pullback_form(id: HwvId) -> Result<DoubleForm, TransferError> {
    check_dim(id.n)?;
    let w = hwv_form(id)?;
    Ok(fiber_integral(&fiber_pullback(&w)?).scale(&ExactScalar::sign(id.n as i64)))
}

/// `(-1)^n ι^*(i_{∂x_n} ω_{r,k,m})`.
pub fn pushforward_form(id: HwvId) -> Result<DoubleForm, TransferError> {
    check_dim(id.n)?;
    let w = hwv_form(id)?.contract(&last_coordinate_field(id.n));
    Ok(inclusion_pullback(&w)?.scale(&ExactScalar::sign(id.n as i64)))
}

/// `ι^* φ^{(n)}_{r,k,m}` computed through the fiber integral and matched against the
/// case table.
pub fn pullback_transfer(id: HwvId) -> Result<TransferResult, TransferError> {
    if id.k < 0 {
        return Err(TransferError::OutOfScope(id));
    }
    let form = pullback_form(id)?;
    finish(id, &form, pullback_expected(id))
}

/// `π_* φ^{(n)}_{r,k,m}` computed through the contraction with `∂/∂x_n`.
pub fn pushforward_transfer(id: HwvId) -> Result<TransferResult, TransferError> {
    if id.k < 0 {
        return Err(TransferError::OutOfScope(id));
    }
    let form = pushforward_form(id)?;
    finish(id, &form, pushforward_expected(id))
}

/// The generator rows of `F^*`, `ι^*` and `i_{∂/∂x_n}` for every `k < n/2`, and the
/// `k = n/2` rows when `n` is even.
pub fn verify_substitution_rows(n: u8) -> Result<Vec<LedgerEntry>, TransferError> {
    check_dim(n)?;
    let t = n - 1;
    let mut led = Ledger(Vec::new());
    let c = Poly::var(t, Var::Cos).to_form();
    let s = Poly::var(t, Var::Sin).to_form();
    let dx = DoubleForm::right(t, RGen::Dx);
    let tc = tilde_c(n);
    let field = last_coordinate_field(n);
    for k in 1..n.div_ceil(2) {
        let (hi, lo) = (Sets::new(n, k), Sets::new(t, k));
        let tag = |name: &str| format!("{name}(k={k})");
        led.exact(&tag("F*z_K"), &fiber_pullback(&z(n, hi.k))?, &z(t, lo.k));
        led.exact(&tag("F*z_J"), &fiber_pullback(&z(n, hi.j))?, &z(t, lo.j));
        let rhs = &(&c * &zeta(t, lo.j)) + &(&s * &dx).scale(&(&tc * &tc));
        led.exact(&tag("F*zeta_J"), &fiber_pullback(&zeta(n, hi.j))?, &rhs);
        let lhs = inclusion_pullback(&dz(n, hi.j).contract(&field))?;
        led.exact(&tag("i_dxn dz_J"), &lhs, &dx.scale(&(&tc * &tc)));
        led.exact(
            &tag("i*z_J"),
            &inclusion_pullback(&z(n, hi.j))?,
            &z(t, lo.j),
        );
        led.exact(
            &tag("i*zeta_J"),
            &inclusion_pullback(&zeta(n, hi.j))?,
            &zeta(t, lo.j),
        );
    }
    if n.is_multiple_of(2) {
        let l = n / 2;
        let (hi, lo) = (Sets::new(n, l), Sets::new(t, l - 1));
        let map = substitution(n, true);
        let (rl, rlb) = (
            map.right_image(RGen::Dz(Idx::plain(l))),
            map.right_image(RGen::Dz(Idx::barred(l))),
        );
        let h = ExactScalar::sqrt2_pow(-1);
        let u = Idx(n - 2);
        let xu = Poly::var(t, Var::Z(u)).to_form();
        let xiu = Poly::var(t, Var::Zeta(u)).to_form();
        let rhs = &z(t, lo.k) + &(&xu * &rl).scale(&h);
        led.exact("F*z_K(k=n/2)", &fiber_pullback(&z(n, hi.k))?, &rhs);
        led.exact("i*z_K(k=n/2)", &inclusion_pullback(&z(n, hi.k))?, &rhs);
        let is = s.scale(&ExactScalar::i());
        let rhs = &(&c * &zeta(t, lo.kb)) + &(&(&(&c * &xiu) - &is) * &rlb).scale(&h);
        led.exact("F*zeta_Kb(k=n/2)", &fiber_pullback(&zeta(n, hi.kb))?, &rhs);
        let rhs = &zeta(t, lo.kb) + &(&xiu * &rlb).scale(&h);
        led.exact(
            "i*zeta_Kb(k=n/2)",
            &inclusion_pullback(&zeta(n, hi.kb))?,
            &rhs,
        );
        let lhs = inclusion_pullback(&dz(n, hi.k).contract(&field))?;
        led.exact(
            "i_dxn dz_K(k=n/2)",
            &lhs,
            &rl.scale(&(&ExactScalar::i() * &h)),
        );
    }
    Ok(led.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(n: u8, r: u8, k: i8, m: u32) -> HwvId {
        HwvId { n, r, k, m }
    }

    #[test]
    fn pullback_examples() {
        let a = pullback_transfer(id(3, 1, 1, 2)).unwrap();
        assert_eq!(a, TransferResult::to(ExactScalar::one(), id(2, 1, 1, 2)));
        assert_eq!(
            pullback_transfer(id(3, 2, 1, 2)).unwrap(),
            TransferResult::zero()
        );
        let b = pullback_transfer(id(4, 2, 2, 2)).unwrap();
        assert_eq!(
            b,
            TransferResult::to(ExactScalar::ratio(1, 2), id(3, 2, 1, 2))
        );
    }

    #[test]
    fn pushforward_examples() {
        let a = pushforward_transfer(id(3, 2, 1, 2)).unwrap();
        assert_eq!(a, TransferResult::to(ExactScalar::one(), id(2, 1, 1, 2)));
        assert_eq!(
            pushforward_transfer(id(3, 1, 1, 2)).unwrap(),
            TransferResult::zero()
        );
        let b = pushforward_transfer(id(4, 2, 2, 2)).unwrap();
        assert_eq!(
            b,
            TransferResult::to(ExactScalar::ratio(-1, 2), id(3, 1, 1, 2))
        );
    }

    #[test]
    fn volume_bridge() {
        for n in 3..=6 {
            assert!(vol_dimension_holds(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn generator_rows() {
        for n in 3..=6 {
            let bad: Vec<_> = verify_substitution_rows(n)
                .unwrap()
                .into_iter()
                .filter(|e| !e.holds)
                .collect();
            assert!(bad.is_empty(), "n = {n}: {bad:?}");
        }
    }

    #[test]
    fn rejects_trig_input() {
        let w = Poly::var(3, Var::Cos).to_form();
        assert!(matches!(fiber_pullback(&w), Err(TransferError::NoRule(_))));
        assert_eq!(
            fiber_pullback(&DoubleForm::one(2)),
            Err(TransferError::Dimension(2))
        );
    }
}
