//! Double forms on `R^n × R^n` in the complex coordinates `z_i, ζ_i`.
//!
//! A double form is a finite sum of terms `coeff · monomial · (left word) ⊗ (right word)`.
//! The left word is a product of `dz_i, dζ_i, dθ` and carries the differential
//! calculus; the right word is a product of `Dz_i, Dζ_i` and is only bookkeeping.
//! Products follow `(a ⊗ b)(c ⊗ d) = (a ∧ c) ⊗ (b ∧ d)` with the two signs computed
//! independently, so `ωθ = (-1)^{pr+qs} θω` for `ω` of type `(p,q)` and `θ` of
//! type `(r,s)`.
//!
//! Index positions follow the order `1 ≺ 1̄ ≺ 2 ≺ 2̄ ≺ … ≺ l ≺ l̄ (≺ l+1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::BigRational;
use thiserror::Error;

use crate::scalar::ExactScalar;

/// Largest supported ambient dimension.
pub const MAX_N: usize = 8;
const NVARS: usize = 2 * MAX_N + 2;
const COS: usize = 2 * MAX_N;
const SIN: usize = 2 * MAX_N + 1;
const DTHETA_BIT: u32 = 1 << (2 * MAX_N);
const DX_BIT: u32 = 1 << (2 * MAX_N);
const DXI_BIT: u32 = 1 << (2 * MAX_N + 1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u8, u8),
    #[error("divided powers need a form of type (1,1)")]
    NotOneOne,
    #[error("form is not of the shape ω ⊗ W for the given right word")]
    NotDressed,
    #[error("expected a single right word with unit monomial and empty left word")]
    NotAWord,
    #[error("dimension {0} is outside 2..={MAX_N}")]
    BadDimension(u8),
    #[error("scalar error: {0}")]
    Scalar(#[from] crate::scalar::ScalarError),
}

/// Position of an element of the index set `𝓘`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Idx(pub u8);

impl Idx {
    /// The unbarred index `j` (1-based).
    pub fn plain(j: u8) -> Idx {
        Idx(2 * (j - 1))
    }

    /// The barred index `j̄` (1-based).
    pub fn barred(j: u8) -> Idx {
        Idx(2 * (j - 1) + 1)
    }

    pub fn pos(self) -> usize {
        self.0 as usize
    }
}

/// The ordered index set `𝓘` for a given dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexSet {
    pub n: u8,
}

impl IndexSet {
    pub fn new(n: u8) -> Result<Self, AlgebraError> {
        if !(1..=MAX_N as u8).contains(&n) {
            return Err(AlgebraError::BadDimension(n));
        }
        Ok(IndexSet { n })
    }

    pub fn l(&self) -> u8 {
        self.n / 2
    }

    pub fn all(&self) -> Vec<Idx> {
        (0..self.n).map(Idx).collect()
    }

    pub fn bar(&self, i: Idx) -> Idx {
        if (i.0 as usize) < 2 * self.l() as usize {
            Idx(i.0 ^ 1)
        } else {
            i
        }
    }

    /// The unpaired index `l+1` for odd `n`.
    pub fn unpaired(&self) -> Option<Idx> {
        (self.n % 2 == 1).then_some(Idx(self.n - 1))
    }

    pub fn label(&self, i: Idx) -> String {
        let j = i.0 / 2 + 1;
        if self.bar(i) != i && i.0 % 2 == 1 {
            format!("{j}b")
        } else {
            format!("{j}")
        }
    }
}

/// A subset of `𝓘`, stored as a bit mask over positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub fn from_indices(ix: &[Idx]) -> Self {
        Subset(ix.iter().fold(0, |m, i| m | (1 << i.0)))
    }

    pub fn full(n: u8) -> Self {
        Subset((1u32 << n) - 1)
    }

    pub fn contains(&self, i: Idx) -> bool {
        self.0 & (1 << i.0) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Idx> + '_ {
        (0..32u8).filter(move |b| self.0 & (1 << b) != 0).map(Idx)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Subset) -> Subset {
        Subset(self.0 | o.0)
    }

    pub fn minus(self, o: Subset) -> Subset {
        Subset(self.0 & !o.0)
    }

    pub fn bar(self, ix: &IndexSet) -> Subset {
        Subset(self.iter().fold(0, |m, i| m | (1 << ix.bar(i).0)))
    }
}

/// Polynomial variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Z(Idx),
    Zeta(Idx),
    Cos,
    Sin,
}

impl Var {
    fn slot(self) -> usize {
        match self {
            Var::Z(i) => i.pos(),
            Var::Zeta(i) => MAX_N + i.pos(),
            Var::Cos => COS,
            Var::Sin => SIN,
        }
    }

    fn from_slot(s: usize) -> Var {
        match s {
            COS => Var::Cos,
            SIN => Var::Sin,
            s if s < MAX_N => Var::Z(Idx(s as u8)),
            s => Var::Zeta(Idx((s - MAX_N) as u8)),
        }
    }
}

/// Coordinate directions for vector fields and left generators `dz_i, dζ_i, dθ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Z(Idx),
    Zeta(Idx),
    Theta,
}

impl Dir {
    fn bit(self) -> u32 {
        match self {
            Dir::Z(i) => 1 << i.0,
            Dir::Zeta(i) => 1 << (MAX_N + i.pos()),
            Dir::Theta => DTHETA_BIT,
        }
    }

    fn from_bit(b: usize) -> Dir {
        if b == 2 * MAX_N {
            Dir::Theta
        } else if b < MAX_N {
            Dir::Z(Idx(b as u8))
        } else {
            Dir::Zeta(Idx((b - MAX_N) as u8))
        }
    }
}

/// Right generators `Dz_i, Dζ_i`, plus the two extra generators `Dx, Dξ` that
/// stand for the last coordinate direction after restricting to a hyperplane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RGen {
    Dz(Idx),
    Dzeta(Idx),
    Dx,
    Dxi,
}

impl RGen {
    fn bit(self) -> u32 {
        match self {
            RGen::Dz(i) => 1 << i.0,
            RGen::Dzeta(i) => 1 << (MAX_N + i.pos()),
            RGen::Dx => DX_BIT,
            RGen::Dxi => DXI_BIT,
        }
    }

    fn from_bit(b: usize) -> RGen {
        match b {
            b if b == 2 * MAX_N => RGen::Dx,
            b if b == 2 * MAX_N + 1 => RGen::Dxi,
            b if b < MAX_N => RGen::Dz(Idx(b as u8)),
            b => RGen::Dzeta(Idx((b - MAX_N) as u8)),
        }
    }
}

/// Exponent vector over `z_i, ζ_i, cos θ, sin θ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub [u8; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(v: Var) -> Self {
        let mut m = Self::ONE;
        m.0[v.slot()] = 1;
        m
    }

    pub fn exp(&self, v: Var) -> u8 {
        self.0[v.slot()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = self.0;
        for (a, b) in out.iter_mut().zip(o.0.iter()) {
            *a += *b;
        }
        Monomial(out)
    }

    fn with(&self, v: Var, e: u8) -> Monomial {
        let mut out = self.0;
        out[v.slot()] = e;
        Monomial(out)
    }

    fn vars(&self) -> impl Iterator<Item = (Var, u8)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(s, &e)| (Var::from_slot(s), e))
    }
}

/// Sign of `a ∧ b` for canonically ordered words, or `None` if they overlap.
fn word_sign(a: u32, b: u32) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(swaps % 2 == 1)
}

fn bits(w: u32) -> impl Iterator<Item = usize> {
    (0..32usize).filter(move |b| w & (1 << b) != 0)
}

type Key = (Monomial, u32, u32);

/// Double form over the ambient dimension `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleForm {
    n: u8,
    terms: BTreeMap<Key, ExactScalar>,
}

/// A polynomial in `z_i, ζ_i, cos θ, sin θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    n: u8,
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl Poly {
    pub fn zero(n: u8) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: u8, c: ExactScalar) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn var(n: u8, v: Var) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::var(v), ExactScalar::one());
        p
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> Poly {
        let mut out = Poly::zero(self.n);
        for (m, x) in &self.terms {
            out.add_term(*m, x * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(self.n, ExactScalar::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to a variable.
    pub fn partial(&self, v: Var) -> Poly {
        let mut out = Poly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                out.add_term(m.with(v, e - 1), c.scale_int(e as i64));
            }
        }
        out
    }

    /// Derivative along a coordinate direction; `∂_θ` acts through `cos θ` and `sin θ`.
    pub fn derivative(&self, d: Dir) -> Poly {
        match d {
            Dir::Z(i) => self.partial(Var::Z(i)),
            Dir::Zeta(i) => self.partial(Var::Zeta(i)),
            Dir::Theta => {
                let s = Poly::var(self.n, Var::Sin);
                let c = Poly::var(self.n, Var::Cos);
                &(&self.partial(Var::Sin) * &c) - &(&self.partial(Var::Cos) * &s)
            }
        }
    }

    pub fn to_form(&self) -> DoubleForm {
        let mut f = DoubleForm::zero(self.n);
        for (m, c) in &self.terms {
            f.add_term((*m, 0, 0), c.clone());
        }
        f
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

/// A vector field `Σ a_j ∂_{x_j}` with polynomial coefficients along coordinate directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub n: u8,
    comps: BTreeMap<Dir, Poly>,
}

impl VectorField {
    pub fn new(n: u8) -> Self {
        VectorField {
            n,
            comps: BTreeMap::new(),
        }
    }

    /// Adds `coeff · ∂_dir`; repeated directions are merged.
    pub fn with(mut self, d: Dir, coeff: Poly) -> Self {
        let entry = self.comps.entry(d).or_insert_with(|| Poly::zero(coeff.n));
        *entry = &*entry + &coeff;
        if entry.is_zero() {
            self.comps.remove(&d);
        }
        self
    }

    pub fn component(&self, d: Dir) -> Option<&Poly> {
        self.comps.get(&d)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Dir, &Poly)> {
        self.comps.iter()
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (d, a) in &self.comps {
            out = &out + &(a * &f.derivative(*d));
        }
        out
    }
}

impl DoubleForm {
    pub fn zero(n: u8) -> Self {
        DoubleForm {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: u8, c: ExactScalar) -> Self {
        let mut f = Self::zero(n);
        f.add_term((Monomial::ONE, 0, 0), c);
        f
    }

    pub fn one(n: u8) -> Self {
        Self::scalar(n, ExactScalar::one())
    }

    pub fn var(n: u8, v: Var) -> Self {
        let mut f = Self::zero(n);
        f.add_term((Monomial::var(v), 0, 0), ExactScalar::one());
        f
    }

    pub fn left(n: u8, d: Dir) -> Self {
        let mut f = Self::zero(n);
        f.add_term((Monomial::ONE, d.bit(), 0), ExactScalar::one());
        f
    }

    pub fn right(n: u8, g: RGen) -> Self {
        let mut f = Self::zero(n);
        f.add_term((Monomial::ONE, 0, g.bit()), ExactScalar::one());
        f
    }

    /// The right word `g_1 ∧ … ∧ g_k` with unit coefficient.
    pub fn right_word(n: u8, gens: &[RGen]) -> Self {
        gens.iter()
            .fold(Self::one(n), |acc, g| &acc * &Self::right(n, *g))
    }

    /// The left word `g_1 ∧ … ∧ g_k` with unit coefficient.
    pub fn left_word(n: u8, gens: &[Dir]) -> Self {
        gens.iter()
            .fold(Self::one(n), |acc, g| &acc * &Self::left(n, *g))
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn index_set(&self) -> IndexSet {
        IndexSet { n: self.n }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, u32, u32), &ExactScalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, k: Key, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    /// Bidegree `(p, q)` if every term has the same one.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self
            .terms
            .keys()
            .map(|(_, l, r)| (l.count_ones(), r.count_ones()));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = Self::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (k, x) in &self.terms {
            out.add_term(*k, x * c);
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&ExactScalar::int(k))
    }

    pub fn try_wedge(&self, o: &DoubleForm) -> Result<DoubleForm, AlgebraError> {
        if self.n != o.n {
            return Err(AlgebraError::DimensionMismatch(self.n, o.n));
        }
        let mut out = Self::zero(self.n);
        for ((ma, la, ra), ca) in &self.terms {
            for ((mb, lb, rb), cb) in &o.terms {
                let Some(sl) = word_sign(*la, *lb) else {
                    continue;
                };
                let Some(sr) = word_sign(*ra, *rb) else {
                    continue;
                };
                let c = ca * cb;
                let c = if sl != sr { -c } else { c };
                out.add_term((ma.mul(mb), la | lb, ra | rb), c);
            }
        }
        Ok(out)
    }

    /// `β^{[j]} = β^j / j!` for a form of type `(1,1)`; zero for negative `j`.
    pub fn divided_power(&self, j: i64) -> Result<DoubleForm, AlgebraError> {
        if !self.is_zero() && self.bidegree() != Some((1, 1)) {
            return Err(AlgebraError::NotOneOne);
        }
        if j < 0 {
            return Ok(Self::zero(self.n));
        }
        let mut acc = Self::one(self.n);
        for k in 1..=j {
            acc = (&acc * self).scale(&ExactScalar::ratio(1, k));
        }
        Ok(acc)
    }

    /// `β^{[j]}` for forms known to be of type `(1,1)`.
    pub fn dp(&self, j: i64) -> DoubleForm {
        self.divided_power(j)
            .expect("divided power of a (1,1)-form")
    }

    fn map_terms(&self, f: impl Fn(&Key, &ExactScalar) -> Option<(Key, ExactScalar)>) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            if let Some((k2, c2)) = f(k, c) {
                out.add_term(k2, c2);
            }
        }
        out
    }

    /// Relabels positions by an involution on `𝓘` applied to variables and left
    /// generators, and optionally to right generators.
    fn relabel(
        &self,
        perm: &dyn Fn(Idx) -> Idx,
        sign: &dyn Fn(Idx) -> bool,
        right_too: bool,
    ) -> Self {
        let n = self.n;
        let map_mono = |m: &Monomial, neg: &mut bool| {
            let mut out = Monomial::ONE;
            out.0[COS] = m.0[COS];
            out.0[SIN] = m.0[SIN];
            for p in 0..n {
                let q = perm(Idx(p)).pos();
                let (ez, ezeta) = (m.0[p as usize], m.0[MAX_N + p as usize]);
                out.0[q] = ez;
                out.0[MAX_N + q] = ezeta;
                if sign(Idx(p)) && (ez + ezeta) % 2 == 1 {
                    *neg = !*neg;
                }
            }
            out
        };
        let map_word = |w: u32, neg: &mut bool| -> u32 {
            let mut acc = 0u32;
            for b in bits(w) {
                let nb = if b < MAX_N {
                    let p = Idx(b as u8);
                    if sign(p) {
                        *neg = !*neg;
                    }
                    perm(p).pos()
                } else if b < 2 * MAX_N {
                    let p = Idx((b - MAX_N) as u8);
                    if sign(p) {
                        *neg = !*neg;
                    }
                    MAX_N + perm(p).pos()
                } else {
                    b
                };
                let nbit = 1u32 << nb;
                if word_sign(acc, nbit).expect("relabel is a bijection") {
                    *neg = !*neg;
                }
                acc |= nbit;
            }
            acc
        };
        self.map_terms(|(m, l, r), c| {
            let mut neg = false;
            let m2 = map_mono(m, &mut neg);
            let l2 = map_word(*l, &mut neg);
            let r2 = if right_too {
                map_word(*r, &mut neg)
            } else {
                *r
            };
            Some(((m2, l2, r2), if neg { -c } else { c.clone() }))
        })
    }

    /// Complex conjugation: conjugates coefficients and swaps `i ↔ ī` on variables
    /// and left generators. The right slot, `cos θ`, `sin θ` and `dθ` are fixed.
    pub fn conj(&self) -> Self {
        let ix = self.index_set();
        self.relabel(&|i| ix.bar(i), &|_| false, false)
            .map_terms(|k, c| Some((*k, c.conj())))
    }

    /// The reflection `x_n ↦ -x_n`, acting on both slots. For even `n` it swaps
    /// `l ↔ l̄`; for odd `n` it negates the `l+1` coordinates.
    pub fn reflect(&self) -> Self {
        let n = self.n;
        let l = n / 2;
        if n.is_multiple_of(2) {
            let a = Idx::plain(l);
            let b = Idx::barred(l);
            self.relabel(
                &|i| {
                    if i == a {
                        b
                    } else if i == b {
                        a
                    } else {
                        i
                    }
                },
                &|_| false,
                true,
            )
        } else {
            let u = Idx(n - 1);
            self.relabel(&|i| i, &|i| i == u, true)
        }
    }

    /// Exterior derivative, acting on the left slot.
    pub fn d(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for ((m, l, r), c) in &self.terms {
            for (v, e) in m.vars() {
                let lower = m.with(v, e - 1);
                let ce = c.scale_int(e as i64);
                let mut push = |mono: Monomial, dir: Dir, coeff: ExactScalar| {
                    if let Some(neg) = word_sign(dir.bit(), *l) {
                        out.add_term((mono, dir.bit() | l, *r), if neg { -coeff } else { coeff });
                    }
                };
                match v {
                    Var::Z(i) => push(lower, Dir::Z(i), ce),
                    Var::Zeta(i) => push(lower, Dir::Zeta(i), ce),
                    Var::Cos => {
                        let mono = lower.with(Var::Sin, lower.exp(Var::Sin) + 1);
                        push(mono, Dir::Theta, -ce)
                    }
                    Var::Sin => {
                        let mono = lower.with(Var::Cos, lower.exp(Var::Cos) + 1);
                        push(mono, Dir::Theta, ce)
                    }
                }
            }
        }
        out
    }

    /// Interior product `i_X`, acting on the left slot.
    pub fn contract(&self, x: &VectorField) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for ((m, l, r), c) in &self.terms {
            for (pos, b) in bits(*l).enumerate() {
                let Some(a) = x.component(Dir::from_bit(b)) else {
                    continue;
                };
                let rest = l & !(1u32 << b);
                let c = if pos % 2 == 1 { -c } else { c.clone() };
                for (ma, ca) in a.terms() {
                    out.add_term((m.mul(ma), rest, *r), &c * ca);
                }
            }
        }
        out
    }

    /// Lie derivative computed generator by generator.
    pub fn lie(&self, x: &VectorField) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for ((m, l, r), c) in &self.terms {
            // X(f) · word
            let f = Poly::constant(n, c.clone()).with_monomial(m);
            for (mf, cf) in x.apply(&f).terms() {
                out.add_term((*mf, *l, *r), cf.clone());
            }
            // f · (g_1 … d(X^{g_j}) … g_p)
            for (pos, b) in bits(*l).enumerate() {
                let Some(a) = x.component(Dir::from_bit(b)) else {
                    continue;
                };
                let rest = l & !(1u32 << b);
                let sgn = pos % 2 == 1;
                let da = a.to_form().d();
                for ((ma, la, _), ca) in da.terms() {
                    let Some(neg) = word_sign(*la, rest) else {
                        continue;
                    };
                    let coeff = c * ca;
                    let coeff = if neg != sgn { -coeff } else { coeff };
                    out.add_term((m.mul(ma), la | rest, *r), coeff);
                }
            }
        }
        out
    }

    /// Lie derivative through Cartan's formula `i_X d + d i_X`.
    pub fn lie_cartan(&self, x: &VectorField) -> Self {
        &self.d().contract(x) + &self.contract(x).d()
    }

    /// The unique `ω` with `self = ω ⊗ W`, where `W` is a single right word.
    pub fn extract(&self, w: &DoubleForm) -> Result<DoubleForm, AlgebraError> {
        let (wr, wc) = w.as_right_word()?;
        let inv = wc.inv()?;
        let mut out = Self::zero(self.n);
        for ((m, l, r), c) in &self.terms {
            if *r != wr {
                return Err(AlgebraError::NotDressed);
            }
            out.add_term((*m, *l, 0), c * &inv);
        }
        Ok(out)
    }

    fn as_right_word(&self) -> Result<(u32, ExactScalar), AlgebraError> {
        match self.terms.iter().collect::<Vec<_>>().as_slice() {
            [((m, 0, r), c)] if *m == Monomial::ONE => Ok((*r, (*c).clone())),
            _ => Err(AlgebraError::NotAWord),
        }
    }

    /// Applies `cos^2 + sin^2 = 1` until every `sin θ` exponent is at most one.
    pub fn trig_normalize(&self) -> Self {
        let n = self.n;
        let one_minus_c2 = &Poly::constant(n, ExactScalar::one()) - &Poly::var(n, Var::Cos).pow(2);
        let mut out = Self::zero(n);
        for ((m, l, r), c) in &self.terms {
            let e = m.exp(Var::Sin);
            if e < 2 {
                out.add_term((*m, *l, *r), c.clone());
                continue;
            }
            let base = m.with(Var::Sin, e % 2);
            for (mp, cp) in one_minus_c2.pow((e / 2) as u32).terms() {
                out.add_term((base.mul(mp), *l, *r), c * cp);
            }
        }
        out
    }

    /// Normal form modulo `ν - 1` (leading term `ζ_1 ζ_1̄`) followed by trigonometric
    /// normalization.
    pub fn reduce_mod_sphere(&self) -> Self {
        let n = self.n;
        let ix = self.index_set();
        let (a, b) = if ix.l() >= 1 {
            (Idx::plain(1), Idx::barred(1))
        } else {
            (Idx(0), Idx(0))
        };
        // ζ_1 ζ_1̄ ≡ (1 - ν') / 2, ν' the remaining part of ν.
        let mut h = Poly::constant(n, ExactScalar::one());
        for i in ix.all() {
            if i != a && i != b {
                let t = &Poly::var(n, Var::Zeta(ix.bar(i))) * &Poly::var(n, Var::Zeta(i));
                h = &h - &t;
            }
        }
        let (h, single) = if a == b {
            (h, true)
        } else {
            (h.scale(&ExactScalar::ratio(1, 2)), false)
        };
        let mut powers = vec![Poly::constant(n, ExactScalar::one())];
        let mut out = Self::zero(n);
        for ((m, l, r), c) in &self.terms {
            let (ea, eb) = (m.exp(Var::Zeta(a)), m.exp(Var::Zeta(b)));
            let (t, base) = if single {
                (ea / 2, m.with(Var::Zeta(a), ea % 2))
            } else {
                let t = ea.min(eb);
                (t, m.with(Var::Zeta(a), ea - t).with(Var::Zeta(b), eb - t))
            };
            while powers.len() <= t as usize {
                let next = powers.last().unwrap() * &h;
                powers.push(next);
            }
            for (mp, cp) in powers[t as usize].terms() {
                out.add_term((base.mul(mp), *l, *r), c * cp);
            }
        }
        out.trig_normalize()
    }

    /// Equality after restriction to the sphere bundle: `(A - B) ∧ γ ≡ 0 mod (ν - 1)`.
    pub fn sphere_equiv(&self, other: &DoubleForm) -> bool {
        let g = gamma_all(self.n);
        (&(self - other) * &g).reduce_mod_sphere().is_zero()
    }

    /// Pullback along a polynomial map: variables go to polynomials over the target
    /// dimension, left generators to their differentials, and right generators
    /// through `right` (identity on positions when `None`).
    pub fn pullback(&self, map: &PolyMap) -> DoubleForm {
        let tn = map.target_n;
        let mut out = DoubleForm::zero(tn);
        let mut dcache: BTreeMap<usize, DoubleForm> = BTreeMap::new();
        let mut rcache: BTreeMap<usize, DoubleForm> = BTreeMap::new();
        for ((m, l, r), c) in &self.terms {
            let mut acc = DoubleForm::scalar(tn, c.clone());
            for (v, e) in m.vars() {
                let img = map.image(v).to_form();
                for _ in 0..e {
                    acc = &acc * &img;
                }
            }
            for b in bits(*l) {
                let dv = dcache.entry(b).or_insert_with(|| match Dir::from_bit(b) {
                    Dir::Z(i) => map.image(Var::Z(i)).to_form().d(),
                    Dir::Zeta(i) => map.image(Var::Zeta(i)).to_form().d(),
                    Dir::Theta => DoubleForm::left(tn, Dir::Theta),
                });
                acc = &acc * dv;
            }
            for b in bits(*r) {
                let g = rcache
                    .entry(b)
                    .or_insert_with(|| map.right_image(RGen::from_bit(b)));
                acc = &acc * g;
            }
            out += &acc;
        }
        out
    }
}

impl Poly {
    fn with_monomial(&self, m: &Monomial) -> Poly {
        let mut out = Poly::zero(self.n);
        for (mm, c) in &self.terms {
            out.add_term(mm.mul(m), c.clone());
        }
        out
    }
}

/// A polynomial map used for pullbacks between dimensions.
#[derive(Clone, Debug)]
pub struct PolyMap {
    pub target_n: u8,
    vars: BTreeMap<(u8, u8), Poly>,
    right: BTreeMap<(u8, u8), DoubleForm>,
}

fn var_key(v: Var) -> (u8, u8) {
    match v {
        Var::Z(i) => (0, i.0),
        Var::Zeta(i) => (1, i.0),
        Var::Cos => (2, 0),
        Var::Sin => (3, 0),
    }
}

fn rgen_key(g: RGen) -> (u8, u8) {
    match g {
        RGen::Dz(i) => (0, i.0),
        RGen::Dzeta(i) => (1, i.0),
        RGen::Dx => (2, 0),
        RGen::Dxi => (3, 0),
    }
}

impl PolyMap {
    pub fn new(target_n: u8) -> Self {
        PolyMap {
            target_n,
            vars: BTreeMap::new(),
            right: BTreeMap::new(),
        }
    }

    pub fn set(mut self, v: Var, img: Poly) -> Self {
        self.vars.insert(var_key(v), img);
        self
    }

    pub fn set_right(mut self, g: RGen, img: DoubleForm) -> Self {
        self.right.insert(rgen_key(g), img);
        self
    }

    pub fn image(&self, v: Var) -> Poly {
        self.vars
            .get(&var_key(v))
            .cloned()
            .unwrap_or_else(|| Poly::var(self.target_n, v))
    }

    pub fn right_image(&self, g: RGen) -> DoubleForm {
        self.right
            .get(&rgen_key(g))
            .cloned()
            .unwrap_or_else(|| DoubleForm::right(self.target_n, g))
    }
}

/// `γ = Σ_{i∈𝓘} ζ_ī dζ_i`.
pub fn gamma_all(n: u8) -> DoubleForm {
    let ix = IndexSet { n };
    let mut g = DoubleForm::zero(n);
    for i in ix.all() {
        g += &(&DoubleForm::var(n, Var::Zeta(ix.bar(i))) * &DoubleForm::left(n, Dir::Zeta(i)));
    }
    g
}

fn check_same(a: &DoubleForm, b: &DoubleForm) {
    assert_eq!(a.n, b.n, "double forms of different dimensions");
}

impl<'a> Mul<&'a DoubleForm> for &'a DoubleForm {
    type Output = DoubleForm;
    fn mul(self, o: &DoubleForm) -> DoubleForm {
        check_same(self, o);
        self.try_wedge(o).expect("same dimension")
    }
}

impl Mul for DoubleForm {
    type Output = DoubleForm;
    fn mul(self, o: DoubleForm) -> DoubleForm {
        &self * &o
    }
}

impl AddAssign<&DoubleForm> for DoubleForm {
    fn add_assign(&mut self, o: &DoubleForm) {
        check_same(self, o);
        for (k, c) in &o.terms {
            self.add_term(*k, c.clone());
        }
    }
}

impl<'a> Add<&'a DoubleForm> for &'a DoubleForm {
    type Output = DoubleForm;
    fn add(self, o: &DoubleForm) -> DoubleForm {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl Add for DoubleForm {
    type Output = DoubleForm;
    fn add(mut self, o: DoubleForm) -> DoubleForm {
        self += &o;
        self
    }
}

impl<'a> Sub<&'a DoubleForm> for &'a DoubleForm {
    type Output = DoubleForm;
    fn sub(self, o: &DoubleForm) -> DoubleForm {
        check_same(self, o);
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, -c);
        }
        out
    }
}

impl Sub for DoubleForm {
    type Output = DoubleForm;
    fn sub(self, o: DoubleForm) -> DoubleForm {
        &self - &o
    }
}

impl Neg for &DoubleForm {
    type Output = DoubleForm;
    fn neg(self) -> DoubleForm {
        self.scale(&ExactScalar::int(-1))
    }
}

impl Neg for DoubleForm {
    type Output = DoubleForm;
    fn neg(self) -> DoubleForm {
        -&self
    }
}

impl fmt::Display for DoubleForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let ix = self.index_set();
        let name = |v: Var| match v {
            Var::Z(i) => format!("z{}", ix.label(i)),
            Var::Zeta(i) => format!("zeta{}", ix.label(i)),
            Var::Cos => "c".into(),
            Var::Sin => "s".into(),
        };
        let mut first = true;
        for ((m, l, r), c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, e) in m.vars() {
                if e == 1 {
                    write!(f, "*{}", name(v))?;
                } else {
                    write!(f, "*{}^{e}", name(v))?;
                }
            }
            for b in bits(*l) {
                match Dir::from_bit(b) {
                    Dir::Z(i) => write!(f, " dz{}", ix.label(i))?,
                    Dir::Zeta(i) => write!(f, " dzeta{}", ix.label(i))?,
                    Dir::Theta => f.write_str(" dtheta")?,
                }
            }
            if *r != 0 {
                f.write_str(" ⊗")?;
                for b in bits(*r) {
                    match RGen::from_bit(b) {
                        RGen::Dz(i) => write!(f, " Dz{}", ix.label(i))?,
                        RGen::Dzeta(i) => write!(f, " Dzeta{}", ix.label(i))?,
                        RGen::Dx => f.write_str(" Dx")?,
                        RGen::Dxi => f.write_str(" Dxi")?,
                    }
                }
            }
        }
        Ok(())
    }
}

/// Rational scalar helper.
pub fn q(n: i64, d: i64) -> ExactScalar {
    ExactScalar::rational(BigRational::new(n.into(), d.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u8, i: Idx) -> DoubleForm {
        DoubleForm::var(n, Var::Z(i))
    }

    #[test]
    fn wedge_signs() {
        let n = 2;
        let a = Idx::plain(1);
        let b = Idx::barred(1);
        let dza = DoubleForm::left(n, Dir::Z(a));
        let dzb = DoubleForm::left(n, Dir::Z(b));
        assert_eq!(&dza * &dzb, -(&dzb * &dza));
        assert!((&dza * &dza).is_zero());
        let one_one = &dza * &DoubleForm::right(n, RGen::Dz(a));
        let other = &dzb * &DoubleForm::right(n, RGen::Dz(b));
        assert_eq!(&one_one * &other, &other * &one_one);
    }

    #[test]
    fn d_of_cos_and_sin() {
        let n = 2;
        let c = DoubleForm::var(n, Var::Cos);
        let s = DoubleForm::var(n, Var::Sin);
        let dth = DoubleForm::left(n, Dir::Theta);
        assert_eq!(c.d(), -(&s * &dth));
        assert_eq!(s.d(), &c * &dth);
    }

    #[test]
    fn conj_swaps_bars() {
        let n = 3;
        let a = Idx::plain(1);
        let b = Idx::barred(1);
        let f = (&z(n, a) * &DoubleForm::left(n, Dir::Z(b))).scale(&ExactScalar::i());
        let g = (&z(n, b) * &DoubleForm::left(n, Dir::Z(a))).scale(&-ExactScalar::i());
        assert_eq!(f.conj(), g);
        assert_eq!(f.conj().conj(), f);
    }

    #[test]
    fn reduce_examples() {
        let n = 2;
        let a = Idx::plain(1);
        let b = Idx::barred(1);
        let nu =
            &(&DoubleForm::var(n, Var::Zeta(a)) * &DoubleForm::var(n, Var::Zeta(b))).scale_int(2);
        assert_eq!(nu.reduce_mod_sphere(), DoubleForm::one(n));
        let s2 = DoubleForm::var(n, Var::Sin).pow_naive(2);
        let expect = &DoubleForm::one(n) - &DoubleForm::var(n, Var::Cos).pow_naive(2);
        assert_eq!(s2.reduce_mod_sphere(), expect);
    }

    impl DoubleForm {
        fn pow_naive(&self, e: u32) -> DoubleForm {
            (0..e).fold(DoubleForm::one(self.n), |acc, _| &acc * self)
        }
    }
}
