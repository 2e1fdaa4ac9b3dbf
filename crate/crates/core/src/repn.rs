//! Borel action of `so(n)` on forms, weights and highest weight certification.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Dir, DoubleForm, Idx, IndexSet, Poly, Var, VectorField};
use crate::forms::{hwv_form, FormsError, HwvId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReprError {
    #[error("form is not a weight vector")]
    NotWeightVector,
    #[error("highest weight form for {0} vanishes")]
    ZeroForm(HwvId),
    #[error("positive root {root} does not annihilate the form for {id}")]
    NotHighest { id: HwvId, root: String },
    #[error("weight of {id} is {found:?}, expected {expected:?}")]
    WrongWeight {
        id: HwvId,
        found: Vec<i64>,
        expected: Vec<i64>,
    },
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// A weight `(λ_1, …, λ_l)`.
pub type Weight = Vec<i64>;

fn field(n: u8, parts: &[(Dir, Var, i64)]) -> VectorField {
    parts.iter().fold(VectorField::new(n), |x, &(d, v, s)| {
        x.with(
            d,
            Poly::var(n, v).scale(&crate::scalar::ExactScalar::int(s)),
        )
    })
}

/// Both `z` and `ζ` parts of `a ∂_{b} - c ∂_{d}` style fields.
fn lifted(n: u8, plus: (Idx, Idx), minus: (Idx, Idx)) -> VectorField {
    // plus = (coefficient index, direction index)
    field(
        n,
        &[
            (Dir::Z(plus.1), Var::Z(plus.0), 1),
            (Dir::Z(minus.1), Var::Z(minus.0), -1),
            (Dir::Zeta(plus.1), Var::Zeta(plus.0), 1),
            (Dir::Zeta(minus.1), Var::Zeta(minus.0), -1),
        ],
    )
}

/// Fields `X̃_β` for the positive roots `ε_i ± ε_j` (`i < j`) and `ε_i` (odd `n`).
pub fn positive_root_fields(n: u8) -> Vec<(String, VectorField)> {
    let ix = IndexSet { n };
    let l = ix.l();
    let mut out = Vec::new();
    for i in 1..=l {
        let (pi, bi) = (Idx::plain(i), Idx::barred(i));
        for j in i + 1..=l {
            let (pj, bj) = (Idx::plain(j), Idx::barred(j));
            out.push((format!("e{i}-e{j}"), lifted(n, (bi, bj), (pj, pi))));
            out.push((format!("e{i}+e{j}"), lifted(n, (bi, pj), (bj, pi))));
        }
        if let Some(u) = ix.unpaired() {
            out.push((format!("e{i}"), lifted(n, (bi, u), (u, pi))));
        }
    }
    out
}

/// Fields `H̃_i` spanning the Cartan subalgebra.
pub fn cartan_fields(n: u8) -> Vec<VectorField> {
    (1..=n / 2)
        .map(|i| {
            let (p, b) = (Idx::plain(i), Idx::barred(i));
            lifted(n, (b, b), (p, p))
        })
        .collect()
}

/// The weight of a form that is a simultaneous eigenvector of every `𝓛_{H̃_i}`.
pub fn weight_of(w: &DoubleForm) -> Result<Weight, ReprError> {
    let ((key, c0), _) = (w.terms().next().ok_or(ReprError::NotWeightVector)?, ());
    let mut out = Vec::new();
    for h in cartan_fields(w.n()) {
        let lw = w.lie(&h);
        let c = lw
            .terms()
            .find(|(k, _)| *k == key)
            .map(|(_, c)| c.clone())
            .unwrap_or_default();
        let ratio = c.try_div(c0).map_err(|_| ReprError::NotWeightVector)?;
        let q = ratio.as_rational().ok_or(ReprError::NotWeightVector)?;
        if !q.is_integer() || lw != w.scale(&ratio) {
            return Err(ReprError::NotWeightVector);
        }
        out.push(i64::try_from(q.to_integer()).map_err(|_| ReprError::NotWeightVector)?);
    }
    Ok(out)
}

/// `λ_{k,m} = (m, 2, …, 2, 0, …, 0)` with `k` nonzero entries, or
/// `λ_{-l,m} = (m, 2, …, 2, -2)`.
pub fn highest_weight(id: HwvId) -> Weight {
    let l = id.l() as usize;
    let mut wt = vec![0i64; l];
    if id.k < 0 {
        wt.iter_mut().for_each(|x| *x = 2);
        wt[l - 1] = -2;
    } else {
        wt.iter_mut().take(id.k as usize).for_each(|x| *x = 2);
    }
    wt[0] = id.m as i64;
    wt
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HwvCertificate {
    pub id: HwvId,
    pub weight: Weight,
    pub roots_checked: usize,
    pub terms: usize,
}

/// Checks that `ω_{r,k,m}` is nonzero, killed by every positive root field and of
/// weight `λ_{k,m}`.
pub fn certify_hwv(id: HwvId) -> Result<HwvCertificate, ReprError> {
    let w = hwv_form(id)?;
    if w.is_zero() {
        return Err(ReprError::ZeroForm(id));
    }
    let roots = positive_root_fields(id.n);
    for (name, x) in &roots {
        if !w.lie(x).is_zero() {
            return Err(ReprError::NotHighest {
                id,
                root: name.clone(),
            });
        }
    }
    let found = weight_of(&w)?;
    let expected = highest_weight(id);
    if found != expected {
        return Err(ReprError::WrongWeight {
            id,
            found,
            expected,
        });
    }
    Ok(HwvCertificate {
        id,
        weight: found,
        roots_checked: roots.len(),
        terms: w.len(),
    })
}

/// Weights occurring in `Val_r`, truncated at `m ≤ m_max`, including the trivial weight.
pub fn abs_weights(n: u8, r: u8, m_max: u32) -> Vec<Weight> {
    let mut out: Vec<Weight> = vec![vec![0; (n / 2) as usize]];
    for id in HwvId::grid(n, m_max) {
        if id.r == r {
            out.push(highest_weight(id));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Weights of `Λ_r` whose `r`-th entry is nonzero (for `1 ≤ r ≤ n/2`).
pub fn primitive_weights(n: u8, r: u8, m_max: u32) -> Vec<Weight> {
    abs_weights(n, r, m_max)
        .into_iter()
        .filter(|w| w.get(r as usize - 1).is_some_and(|&x| x != 0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_bar_power_weight() {
        let n = 3;
        let f = Poly::var(n, Var::Zeta(Idx::barred(1))).pow(4).to_form();
        assert_eq!(weight_of(&f).unwrap(), vec![4]);
        let g = &f + &Poly::var(n, Var::Zeta(Idx::plain(1))).to_form();
        assert_eq!(weight_of(&g), Err(ReprError::NotWeightVector));
    }

    #[test]
    fn small_weight_sets() {
        assert_eq!(
            abs_weights(4, 1, 3),
            vec![vec![0, 0], vec![2, 0], vec![3, 0]]
        );
        assert_eq!(positive_root_fields(4).len(), 2);
        assert_eq!(positive_root_fields(5).len(), 4);
    }

    #[test]
    fn plane_hwv() {
        let c = certify_hwv(HwvId {
            n: 2,
            r: 1,
            k: 1,
            m: 2,
        })
        .unwrap();
        assert_eq!(c.weight, vec![2]);
    }
}
