//! Building blocks and the named forms `ω, δ, θ, σ, τ` attached to a highest weight.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Dir, DoubleForm, IndexSet, RGen, Subset, Var, MAX_N};
use crate::scalar::ExactScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormsError {
    #[error("invalid highest weight id {0}")]
    InvalidId(HwvId),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Parameters `(n, r, k, m)` of a highest weight vector `φ_{r,k,m}` in `Val_r` of `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HwvId {
    pub n: u8,
    pub r: u8,
    pub k: i8,
    pub m: u32,
}

impl fmt::Display for HwvId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n={}, r={}, k={}, m={})",
            self.n, self.r, self.k, self.m
        )
    }
}

impl HwvId {
    pub fn new(n: u8, r: u8, k: i8, m: u32) -> Result<Self, FormsError> {
        let id = HwvId { n, r, k, m };
        if id.is_valid() {
            Ok(id)
        } else {
            Err(FormsError::InvalidId(id))
        }
    }

    /// Valid when `1 ≤ k ≤ min(r, n-r)`, or `n = 2l ≥ 4`, `r = l`, `k = -l`; always `m ≥ 2`.
    pub fn is_valid(&self) -> bool {
        let HwvId { n, r, k, m } = *self;
        if !(2..=MAX_N as u8).contains(&n) || m < 2 || r < 1 || r >= n {
            return false;
        }
        if k >= 1 {
            return k as u8 <= r.min(n - r);
        }
        n % 2 == 0 && n >= 4 && r == n / 2 && k == -((n / 2) as i8)
    }

    pub fn is_negative(&self) -> bool {
        self.k < 0
    }

    pub fn l(&self) -> u8 {
        self.n / 2
    }

    /// Every valid id with `2 ≤ m ≤ m_max`, in lexicographic order.
    pub fn grid(n: u8, m_max: u32) -> Vec<HwvId> {
        let mut out = Vec::new();
        for r in 1..n {
            let mut ks: Vec<i8> = (1..=r.min(n - r) as i8).collect();
            if n.is_multiple_of(2) && n >= 4 && r == n / 2 {
                ks.insert(0, -((n / 2) as i8));
            }
            for &k in &ks {
                for m in 2..=m_max {
                    out.push(HwvId { n, r, k, m });
                }
            }
        }
        out
    }
}

/// Index subsets used in the constructions.
#[derive(Clone, Copy, Debug)]
pub struct Sets {
    pub ix: IndexSet,
    /// `K = {1, …, k}`
    pub k: Subset,
    /// `K̄`
    pub kb: Subset,
    /// `J = 𝓘 ∖ K`
    pub j: Subset,
    /// `L = J ∖ K̄`
    pub l: Subset,
}

impl Sets {
    pub fn new(n: u8, k: u8) -> Sets {
        let ix = IndexSet { n };
        let kset = Subset((0..k).fold(0, |m, j| m | (1 << (2 * j))));
        let kb = kset.bar(&ix);
        let full = Subset::full(n);
        Sets {
            ix,
            k: kset,
            kb,
            j: full.minus(kset),
            l: full.minus(kset).minus(kb),
        }
    }

    /// `M = {1, …, l-1, l̄}` for even `n`.
    pub fn m_set(n: u8) -> Subset {
        let l = n / 2;
        Subset((0..l - 1).fold(1 << (2 * l - 1), |m, j| m | (1 << (2 * j))))
    }

    pub fn all(&self) -> Subset {
        Subset::full(self.ix.n)
    }
}

fn sum_over(n: u8, set: Subset, f: impl Fn(crate::algebra::Idx) -> DoubleForm) -> DoubleForm {
    set.iter().fold(DoubleForm::zero(n), |acc, i| &acc + &f(i))
}

/// `Σ_{i∈I} ζ_i ⊗ Dz_i`
pub fn zeta(n: u8, set: Subset) -> DoubleForm {
    sum_over(n, set, |i| {
        &DoubleForm::var(n, Var::Zeta(i)) * &DoubleForm::right(n, RGen::Dz(i))
    })
}

/// `Σ_{i∈I} z_i ⊗ Dz_i`
pub fn z(n: u8, set: Subset) -> DoubleForm {
    sum_over(n, set, |i| {
        &DoubleForm::var(n, Var::Z(i)) * &DoubleForm::right(n, RGen::Dz(i))
    })
}

/// `Σ_{i∈I} ζ_i ⊗ Dζ_i`
pub fn eta(n: u8, set: Subset) -> DoubleForm {
    sum_over(n, set, |i| {
        &DoubleForm::var(n, Var::Zeta(i)) * &DoubleForm::right(n, RGen::Dzeta(i))
    })
}

/// `Σ_{i∈I} z_i ⊗ Dζ_i`
pub fn w(n: u8, set: Subset) -> DoubleForm {
    sum_over(n, set, |i| {
        &DoubleForm::var(n, Var::Z(i)) * &DoubleForm::right(n, RGen::Dzeta(i))
    })
}

pub fn dzeta(n: u8, set: Subset) -> DoubleForm {
    zeta(n, set).d()
}

pub fn dz(n: u8, set: Subset) -> DoubleForm {
    z(n, set).d()
}

pub fn deta(n: u8, set: Subset) -> DoubleForm {
    eta(n, set).d()
}

pub fn dw(n: u8, set: Subset) -> DoubleForm {
    w(n, set).d()
}

/// `α_I = Σ_{i∈I} ζ_ī dz_i`
pub fn alpha(n: u8, set: Subset) -> DoubleForm {
    let ix = IndexSet { n };
    sum_over(n, set, |i| {
        &DoubleForm::var(n, Var::Zeta(ix.bar(i))) * &DoubleForm::left(n, Dir::Z(i))
    })
}

/// `γ_I = Σ_{i∈I} ζ_ī dζ_i`
pub fn gamma(n: u8, set: Subset) -> DoubleForm {
    let ix = IndexSet { n };
    sum_over(n, set, |i| {
        &DoubleForm::var(n, Var::Zeta(ix.bar(i))) * &DoubleForm::left(n, Dir::Zeta(i))
    })
}

/// `ν_I = Σ_{i∈I} ζ_ī ζ_i`
pub fn nu(n: u8, set: Subset) -> DoubleForm {
    let ix = IndexSet { n };
    sum_over(n, set, |i| {
        &DoubleForm::var(n, Var::Zeta(ix.bar(i))) * &DoubleForm::var(n, Var::Zeta(i))
    })
}

/// `Θ_{1,I} = Π_{i∈I} dz_i`
pub fn theta1(n: u8, set: Subset) -> DoubleForm {
    DoubleForm::left_word(n, &set.iter().map(Dir::Z).collect::<Vec<_>>())
}

/// `Θ_{2,I} = Π_{i∈I} dζ_i`
pub fn theta2(n: u8, set: Subset) -> DoubleForm {
    DoubleForm::left_word(n, &set.iter().map(Dir::Zeta).collect::<Vec<_>>())
}

/// `Θ_I = Θ_{1,I} Θ_{2,I}`
pub fn theta(n: u8, set: Subset) -> DoubleForm {
    &theta1(n, set) * &theta2(n, set)
}

/// `Θ_{1,I}` placed in the right slot.
pub fn theta1_right(n: u8, set: Subset) -> DoubleForm {
    DoubleForm::right_word(n, &set.iter().map(RGen::Dz).collect::<Vec<_>>())
}

/// `Θ_{2,I}` placed in the right slot.
pub fn theta2_right(n: u8, set: Subset) -> DoubleForm {
    DoubleForm::right_word(n, &set.iter().map(RGen::Dzeta).collect::<Vec<_>>())
}

/// `Θ_I ⊗ Θ_I`
pub fn theta_both(n: u8, set: Subset) -> DoubleForm {
    &theta(n, set) * &(&theta1_right(n, set) * &theta2_right(n, set))
}

/// Names for the generic building blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Alpha,
    Gamma,
    Nu,
    Zeta,
    Z,
    Eta,
    W,
    Theta1,
    Theta2,
    Theta,
}

pub fn building_block(tag: Block, n: u8, set: Subset) -> DoubleForm {
    match tag {
        Block::Alpha => alpha(n, set),
        Block::Gamma => gamma(n, set),
        Block::Nu => nu(n, set),
        Block::Zeta => zeta(n, set),
        Block::Z => z(n, set),
        Block::Eta => eta(n, set),
        Block::W => w(n, set),
        Block::Theta1 => theta1(n, set),
        Block::Theta2 => theta2(n, set),
        Block::Theta => theta(n, set),
    }
}

/// The forms that appear in the differential of a highest weight form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedForm {
    Omega,
    Delta,
    Theta,
    Sigma,
    Tau,
}

/// `Θ_1 = Π_{i∈𝓘} Dz_i`, the right word used to dress forms of top `z`-degree.
pub fn dressing(n: u8) -> DoubleForm {
    theta1_right(n, Subset::full(n))
}

/// `Θ_2 = Π_{i∈𝓘} Dζ_i`.
pub fn dressing2(n: u8) -> DoubleForm {
    theta2_right(n, Subset::full(n))
}

/// The named form for `(n, r, k)` tensored with `Θ_1`. Out-of-range divided powers
/// are zero. `k = -l` selects the reflected family built on `M`.
pub fn dressed(name: NamedForm, n: u8, r: i64, k: i64) -> DoubleForm {
    if k < 0 {
        return dressed_negative(name, n);
    }
    let s = Sets::new(n, k as u8);
    let ni = n as i64;
    let cz = dz(n, s.k).conj();
    let cdzeta = dzeta(n, s.k).conj();
    let czeta = zeta(n, s.k).conj();
    let zj = zeta(n, s.j);
    let dzj = dzeta(n, s.j);
    let dzjz = dz(n, s.j);
    match name {
        NamedForm::Omega => &(&(&zj * &dzj.dp(ni - r - 1)) * &dzjz.dp(r - k)) * &cz.dp(k),
        NamedForm::Delta => &(&dzj.dp(ni - r) * &dzjz.dp(r - k)) * &cz.dp(k),
        NamedForm::Theta => {
            &(&(&(&czeta * &cdzeta.dp(k - 1)) * &zj) * &dzj.dp(ni - r - k)) * &dzjz.dp(r - 1)
        }
        NamedForm::Sigma => &(&(&cdzeta.dp(k) * &zj) * &dzj.dp(ni - r - k)) * &dzjz.dp(r - 1),
        NamedForm::Tau => {
            &(&(&czeta * &cdzeta.dp(k - 1)) * &dzj.dp(ni - r - k + 1)) * &dzjz.dp(r - 1)
        }
    }
}

fn dressed_negative(name: NamedForm, n: u8) -> DoubleForm {
    let ix = IndexSet { n };
    let l = (n / 2) as i64;
    let mset = Sets::m_set(n);
    let mb = mset.bar(&ix);
    let czeta = zeta(n, mset).conj();
    let cdzeta = dzeta(n, mset).conj();
    let cdz = dz(n, mset).conj();
    match name {
        NamedForm::Omega => &(&zeta(n, mb) * &dzeta(n, mb).dp(l - 1)) * &cdz.dp(l),
        NamedForm::Delta => &dzeta(n, mb).dp(l) * &cdz.dp(l),
        NamedForm::Theta => &(&(&czeta * &cdzeta.dp(l - 1)) * &zeta(n, mb)) * &dz(n, mb).dp(l - 1),
        NamedForm::Sigma => &(&cdzeta.dp(l) * &zeta(n, mb)) * &dz(n, mb).dp(l - 1),
        NamedForm::Tau => &(&(&czeta * &cdzeta.dp(l - 1)) * &dzeta(n, mb)) * &dz(n, mb).dp(l - 1),
    }
}

/// The plain form, recovered from its `Θ_1` dressing.
pub fn named_form(name: NamedForm, n: u8, r: i64, k: i64) -> DoubleForm {
    dressed(name, n, r, k)
        .extract(&dressing(n))
        .expect("named forms are dressed by Θ_1")
}

/// `ζ_1̄^{m-2}`
pub fn zeta_bar1_pow(n: u8, m: u32) -> DoubleForm {
    let p = crate::algebra::Poly::var(n, Var::Zeta(crate::algebra::Idx::barred(1))).pow(m - 2);
    p.to_form()
}

/// The highest weight form `ω_{r,k,m} = ζ_1̄^{m-2} ω_{r,k}`.
pub fn hwv_form(id: HwvId) -> Result<DoubleForm, FormsError> {
    if !id.is_valid() {
        return Err(FormsError::InvalidId(id));
    }
    let w = named_form(NamedForm::Omega, id.n, id.r as i64, id.k as i64);
    Ok(&zeta_bar1_pow(id.n, id.m) * &w)
}

/// The dressed highest weight form `ω_{r,k,m} ⊗ Θ_1`.
pub fn hwv_dressed(id: HwvId) -> Result<DoubleForm, FormsError> {
    if !id.is_valid() {
        return Err(FormsError::InvalidId(id));
    }
    Ok(&zeta_bar1_pow(id.n, id.m) * &dressed(NamedForm::Omega, id.n, id.r as i64, id.k as i64))
}

/// The normalization `i^{⌊n/2⌋} (√2)^{m-2} / s_{n+m-r-3}` relating `ω_{r,k,m}` to `φ_{r,k,m}`.
pub fn normalization(n: u8, r: u8, m: u32) -> ExactScalar {
    let s = crate::scalar::sphere_area(n as u32 + m - r as u32 - 3);
    let num = &ExactScalar::i_pow((n / 2) as i64) * &ExactScalar::sqrt2_pow(m as i32 - 2);
    num.try_div(&s).expect("sphere areas are invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Idx;

    #[test]
    fn grid_counts() {
        assert_eq!(HwvId::grid(2, 2).len(), 1);
        assert_eq!(HwvId::grid(3, 3).len(), 4);
        // n = 4: (1,1), (2,-2), (2,1), (2,2), (3,1)
        assert_eq!(HwvId::grid(4, 2).len(), 5);
        assert!(!HwvId {
            n: 2,
            r: 1,
            k: -1,
            m: 2
        }
        .is_valid());
    }

    #[test]
    fn omega_11_in_the_plane() {
        // ω_{1,1,m} = -ζ_1̄^{m-1} dz_1̄
        let n = 2;
        let b = Idx::barred(1);
        let w = hwv_form(HwvId {
            n,
            r: 1,
            k: 1,
            m: 3,
        })
        .unwrap();
        let expect = -(&DoubleForm::var(n, Var::Zeta(b)) * &DoubleForm::var(n, Var::Zeta(b)))
            * DoubleForm::left(n, Dir::Z(b));
        assert_eq!(w, expect);
    }

    #[test]
    fn m_set_layout() {
        let ix = IndexSet { n: 6 };
        let mset = Sets::m_set(6);
        let v: Vec<String> = mset.iter().map(|i| ix.label(i)).collect();
        assert_eq!(v, vec!["1", "2", "3b"]);
    }
}
