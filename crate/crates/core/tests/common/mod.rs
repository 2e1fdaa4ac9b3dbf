#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::sample::subsequence;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use valcalc::algebra::{Dir, DoubleForm, Idx, IndexSet, Poly, RGen, Var, VectorField};
use valcalc::scalar::ExactScalar;

// ---------------------------------------------------------------------------
// Random forms

pub const CASES: u32 = 64;
pub const DIMS: std::ops::RangeInclusive<u8> = 2..=5;

/// Runs `test` on `CASES` values drawn from a ChaCha stream keyed by `label` and `n`,
/// so every run sees the same inputs. Returns the number of cases.
pub fn check<S: Strategy>(
    label: &str,
    n: u8,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    let mut seed = [0u8; 32];
    for (i, b) in label.bytes().chain([n]).enumerate() {
        seed[i % 32] ^= b.rotate_left(i as u32 % 8);
    }
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &seed));
    runner
        .run(&strategy, test)
        .map(|_| CASES)
        .map_err(|e| format!("{label} (n={n}): {e}"))
}

#[derive(Clone, Debug)]
pub struct TermSpec {
    re: i64,
    im: i64,
    sqrt2: i32,
    pi_half: i32,
    exps: Vec<u8>,
    trig: (u8, u8),
    left: Vec<Dir>,
    right: Vec<RGen>,
}

fn idxs(n: u8) -> Vec<Idx> {
    (0..n).map(Idx).collect()
}

fn dirs(n: u8, theta: bool) -> Vec<Dir> {
    let mut v: Vec<Dir> = idxs(n)
        .into_iter()
        .flat_map(|i| [Dir::Z(i), Dir::Zeta(i)])
        .collect();
    if theta {
        v.push(Dir::Theta);
    }
    v
}

fn rgens(n: u8) -> Vec<RGen> {
    idxs(n)
        .into_iter()
        .flat_map(|i| [RGen::Dz(i), RGen::Dzeta(i)])
        .collect()
}

fn scalar_parts() -> impl Strategy<Value = (i64, i64, i32, i32)> {
    (-3i64..=3, -2i64..=2, 0i32..=1, -1i32..=1)
}

fn term(
    n: u8,
    p: std::ops::RangeInclusive<usize>,
    q: std::ops::RangeInclusive<usize>,
    trig: bool,
) -> impl Strategy<Value = TermSpec> {
    let t = if trig { 1u8 } else { 0 };
    (
        scalar_parts(),
        prop::collection::vec(0u8..=2, 2 * n as usize),
        (0..=t, 0..=t),
        subsequence(dirs(n, trig), p),
        subsequence(rgens(n), q),
    )
        .prop_map(
            |((re, im, sqrt2, pi_half), exps, trig, left, right)| TermSpec {
                re,
                im,
                sqrt2,
                pi_half,
                exps,
                trig,
                left,
                right,
            },
        )
}

pub fn scalar(re: i64, im: i64, sqrt2: i32, pi_half: i32) -> ExactScalar {
    let c = &ExactScalar::int(re) + &(&ExactScalar::i() * &ExactScalar::int(im));
    &(&c * &ExactScalar::sqrt2_pow(sqrt2)) * &ExactScalar::pi_pow_half(pi_half)
}

fn build(n: u8, terms: &[TermSpec]) -> DoubleForm {
    let mut out = DoubleForm::zero(n);
    for t in terms {
        let mut f = DoubleForm::scalar(n, scalar(t.re, t.im, t.sqrt2, t.pi_half));
        for (i, &e) in t.exps.iter().enumerate() {
            let p = Idx((i / 2) as u8);
            let v = if i % 2 == 0 { Var::Z(p) } else { Var::Zeta(p) };
            for _ in 0..e {
                f = &f * &DoubleForm::var(n, v);
            }
        }
        for _ in 0..t.trig.0 {
            f = &f * &DoubleForm::var(n, Var::Cos);
        }
        for _ in 0..t.trig.1 {
            f = &f * &DoubleForm::var(n, Var::Sin);
        }
        f = &f * &DoubleForm::left_word(n, &t.left);
        f = &f * &DoubleForm::right_word(n, &t.right);
        out += &f;
    }
    out
}

/// Mixed-degree forms over `n`, including `cos θ`, `sin θ` and `dθ`.
pub fn any_form(n: u8) -> impl Strategy<Value = DoubleForm> {
    prop::collection::vec(term(n, 0..=2, 0..=2, true), 1..=3).prop_map(move |t| build(n, &t))
}

/// Forms of bidegree `(p, q)`.
pub fn form_of(n: u8, p: usize, q: usize) -> impl Strategy<Value = DoubleForm> {
    prop::collection::vec(term(n, p..=p, q..=q, false), 1..=3).prop_map(move |t| build(n, &t))
}

/// A homogeneous form together with its bidegree.
pub fn graded_form(n: u8) -> impl Strategy<Value = (DoubleForm, usize, usize)> {
    (0usize..=2, 0usize..=2)
        .prop_flat_map(move |(p, q)| form_of(n, p, q).prop_map(move |f| (f, p, q)))
}

/// Polynomial vector fields in the `z`, `ζ`, `θ` directions.
pub fn vector_field(n: u8) -> impl Strategy<Value = VectorField> {
    let comp = (
        subsequence(dirs(n, true), 1..=3),
        prop::collection::vec(
            (
                scalar_parts(),
                prop::collection::vec(0u8..=1, 2 * n as usize),
            ),
            3,
        ),
    );
    comp.prop_map(move |(ds, polys)| {
        let mut x = VectorField::new(n);
        for (d, ((re, im, b, c), exps)) in ds.into_iter().zip(polys) {
            let mut p = Poly::constant(n, scalar(re, im, b, c));
            for (i, &e) in exps.iter().enumerate() {
                let v = if i % 2 == 0 {
                    Var::Z(Idx((i / 2) as u8))
                } else {
                    Var::Zeta(Idx((i / 2) as u8))
                };
                if e > 0 {
                    p = &p * &Poly::var(n, v);
                }
            }
            x = x.with(d, p);
        }
        x
    })
}

/// Random element of the scalar ring with up to three terms.
pub fn any_scalar() -> impl Strategy<Value = ExactScalar> {
    prop::collection::vec(
        (
            -40i64..=40,
            1i64..=12,
            -9i64..=9,
            1i64..=7,
            0i32..=1,
            -4i32..=4,
        ),
        0..=3,
    )
    .prop_map(|ts| {
        ts.into_iter()
            .fold(ExactScalar::zero(), |acc, (a, b, c, d, s, p)| {
                let x = &(&ExactScalar::ratio(a, b)
                    + &(&ExactScalar::i() * &ExactScalar::ratio(c, d)))
                    * &(&ExactScalar::sqrt2_pow(s) * &ExactScalar::pi_pow_half(p));
                &acc + &x
            })
    })
}

// ---------------------------------------------------------------------------
// The algebra properties, one function per law

fn same(lhs: &DoubleForm, rhs: &DoubleForm, what: &str) -> Result<(), TestCaseError> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{what}: {lhs} != {rhs}")))
    }
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn wedge_associative(n: u8) -> Result<u32, String> {
    check(
        "associativity",
        n,
        (any_form(n), any_form(n), any_form(n)),
        |(a, b, c)| same(&(&(&a * &b) * &c), &(&a * &(&b * &c)), "(ab)c = a(bc)"),
    )
}

pub fn graded_commutative(n: u8) -> Result<u32, String> {
    check(
        "wedge sign law",
        n,
        (graded_form(n), graded_form(n)),
        |((a, p, q), (b, r, s))| {
            same(
                &(&a * &b),
                &(&b * &a).scale_int(sign(p * r + q * s)),
                "ab = ±ba",
            )
        },
    )
}

pub fn leibniz(n: u8) -> Result<u32, String> {
    check(
        "leibniz",
        n,
        (graded_form(n), any_form(n)),
        |((a, p, _), b)| {
            let rhs = &(&a.d() * &b) + &(&a * &b.d()).scale_int(sign(p));
            same(&(&a * &b).d(), &rhs, "d(ab)")
        },
    )
}

pub fn d_squared(n: u8) -> Result<u32, String> {
    check("d∘d = 0", n, any_form(n), |a| {
        same(&a.d().d(), &DoubleForm::zero(n), "dd")
    })
}

pub fn cartan(n: u8) -> Result<u32, String> {
    check("cartan", n, (any_form(n), vector_field(n)), |(a, x)| {
        same(&a.lie(&x), &a.lie_cartan(&x), "L_X")
    })
}

pub fn contraction_nilpotent(n: u8) -> Result<u32, String> {
    check(
        "i_X i_X = 0",
        n,
        (any_form(n), vector_field(n)),
        |(a, x)| {
            same(
                &a.contract(&x).contract(&x),
                &DoubleForm::zero(n),
                "i_X i_X",
            )
        },
    )
}

pub fn conjugation(n: u8) -> Result<u32, String> {
    check("conjugation", n, (any_form(n), any_form(n)), |(a, b)| {
        same(&a.conj().conj(), &a, "conj conj")?;
        same(&(&a * &b).conj(), &(&a.conj() * &b.conj()), "conj(ab)")?;
        same(&a.reflect().reflect(), &a, "reflect reflect")
    })
}

pub fn divided_power_binomial(n: u8) -> Result<u32, String> {
    check(
        "divided-power binomial",
        n,
        (form_of(n, 1, 1), form_of(n, 1, 1)),
        |(a, b)| {
            let s = &a + &b;
            for j in 0..=3i64 {
                let rhs = (0..=j).fold(DoubleForm::zero(n), |acc, i| {
                    &acc + &(&a.dp(i) * &b.dp(j - i))
                });
                same(&s.dp(j), &rhs, &format!("(a+b)^[{j}]"))?;
            }
            Ok(())
        },
    )
}

pub type Law = fn(u8) -> Result<u32, String>;

pub const LAWS: [(&str, Law); 8] = [
    ("associativity", wedge_associative),
    ("wedge sign law", graded_commutative),
    ("leibniz", leibniz),
    ("d∘d = 0", d_squared),
    ("cartan", cartan),
    ("i_X i_X = 0", contraction_nilpotent),
    ("conjugation", conjugation),
    ("divided-power binomial", divided_power_binomial),
];

// ---------------------------------------------------------------------------
// Product quadrature on spheres

pub struct SphereQuadrature {
    gl: GaussLegendre,
}

impl SphereQuadrature {
    pub fn new(nodes: usize) -> Self {
        SphereQuadrature {
            gl: GaussLegendre::new(NonZeroUsize::new(nodes).unwrap()),
        }
    }

    fn trig(&self, a: u32, b: u32, lo: f64, hi: f64) -> f64 {
        let f = |t: f64| t.cos().powi(a as i32) * t.sin().powi(b as i32);
        let mid = 0.5 * (lo + hi);
        self.gl.integrate(lo, mid, f) + self.gl.integrate(mid, hi, f)
    }

    /// `∫_{S^{n-1}} Π ξ_i^{α_i}` in hyperspherical angles, one 1-D rule per angle.
    pub fn monomial(&self, alpha: &[u32]) -> f64 {
        let n = alpha.len();
        if n == 1 {
            return 1.0
                + if alpha[0].is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
        }
        let mut total = self.trig(alpha[n - 2], alpha[n - 1], 0.0, 2.0 * PI);
        let mut tail = alpha[n - 2] + alpha[n - 1];
        for j in (0..n - 2).rev() {
            // ξ_{j+1} = (Π_{i≤j} sin φ_i) cos φ_{j+1}; the Jacobian contributes sin^{n-2-j}
            total *= self.trig(alpha[j], tail + (n - 2 - j) as u32, 0.0, PI);
            tail += alpha[j];
        }
        total
    }

    pub fn integrate(&self, p: &RealPoly) -> Complex64 {
        p.0.iter().map(|(e, c)| c * self.monomial(e)).sum()
    }
}

/// Polynomial in the real coordinates `ξ_1, …, ξ_n` with complex coefficients.
#[derive(Clone, Debug, Default)]
pub struct RealPoly(pub HashMap<Vec<u32>, Complex64>);

impl RealPoly {
    pub fn constant(n: usize, c: f64) -> Self {
        RealPoly(HashMap::from([(vec![0; n], Complex64::new(c, 0.0))]))
    }

    pub fn coord(n: usize, i: usize, c: Complex64) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        RealPoly(HashMap::from([(e, c)]))
    }

    pub fn add(&self, o: &RealPoly) -> RealPoly {
        let mut out = self.clone();
        for (e, c) in &o.0 {
            *out.0.entry(e.clone()).or_default() += c;
        }
        out
    }

    pub fn mul(&self, o: &RealPoly) -> RealPoly {
        let mut out = RealPoly::default();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &o.0 {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *out.0.entry(e).or_default() += ca * cb;
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> RealPoly {
        RealPoly(self.0.iter().map(|(e, v)| (e.clone(), v * c)).collect())
    }

    pub fn pow(&self, n: usize, e: u32) -> RealPoly {
        (0..e).fold(RealPoly::constant(n, 1.0), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        self.0
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(xi)
                    .map(|(&k, x)| x.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

/// `ζ_i` as a polynomial in `ξ`: `(ξ_{2j-1} ± iξ_{2j})/√2` for the pair `j, j̄` and `ξ_n`
/// for the unpaired index.
pub fn zeta_coord(n: u8, i: Idx) -> RealPoly {
    let nn = n as usize;
    let ix = IndexSet { n };
    if ix.unpaired() == Some(i) {
        return RealPoly::coord(nn, nn - 1, Complex64::new(1.0, 0.0));
    }
    let p = i.pos();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let im = if p.is_multiple_of(2) { s } else { -s };
    let (x, y) = (p - p % 2, p - p % 2 + 1);
    RealPoly::coord(nn, x, Complex64::new(s, 0.0)).add(&RealPoly::coord(
        nn,
        y,
        Complex64::new(0.0, im),
    ))
}

/// Rewrites a polynomial in the `ζ` variables in terms of `ξ`.
pub fn to_real(p: &Poly) -> RealPoly {
    let n = p.n();
    let coords: Vec<RealPoly> = (0..n).map(|i| zeta_coord(n, Idx(i))).collect();
    let mut out = RealPoly::default();
    for (mono, c) in p.terms() {
        let (re, im) = c.to_complex();
        let mut t = RealPoly(HashMap::from([(
            vec![0; n as usize],
            Complex64::new(re, im),
        )]));
        for i in 0..n {
            let e = mono.exp(Var::Zeta(Idx(i)));
            if e > 0 {
                t = t.mul(&coords[i as usize].pow(n as usize, e as u32));
            }
        }
        out = out.add(&t);
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force pairing oracle

fn gamma_half(k: u32) -> f64 {
    // Γ(k/2) by the recursion Γ(x+1) = xΓ(x)
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    let mut g = if k.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    while 2.0 * x < k as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Area of the unit sphere `S^d`.
pub fn sphere_area(d: u32) -> f64 {
    2.0 * PI.powf((d + 1) as f64 / 2.0) / gamma_half(d + 1)
}

fn choose(n: i64, k: i64) -> f64 {
    if k < 0 || n < k {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `φ̄_{r,k,m} * φ_{n-r,k,m}` for `k ≥ 1`, from the density
/// `(-1)^{r+k} |ζ_1|^{2(m-2)} (a ν_K^2 + b ν_L)` written out in Euclidean coordinates,
/// integrated by quadrature and scaled by `(-1)^r 2^{m-2} / (s_{n+m-r-3} s_{m+r-3})`.
pub fn oracle_pairing(n: u8, r: u8, k: u8, m: u32) -> f64 {
    let (nn, ni, ri, ki, mi) = (n as usize, n as i64, r as i64, k as i64, m as i64);
    let sq = |i: usize| RealPoly::coord(nn, i, Complex64::new(1.0, 0.0)).pow(nn, 2);
    let mut nu_k = RealPoly::default();
    for i in 0..2 * k as usize {
        nu_k = nu_k.add(&sq(i).scale(0.5));
    }
    let mut nu_l = RealPoly::default();
    for i in 2 * k as usize..nn {
        nu_l = nu_l.add(&sq(i));
    }
    let z1 = sq(0).add(&sq(1)).scale(0.5);
    let a = ((mi + ri - 2) * (mi + ri)) as f64 * choose(ni - 2 * ki, ri - ki);
    let b = ((mi + ri - 2) * (mi + ki - 1)) as f64 * choose(ni - 2 * ki - 1, ri - ki);
    let inner = nu_k.mul(&nu_k).scale(a).add(&nu_l.scale(b));
    let density = z1
        .pow(nn, m - 2)
        .mul(&inner)
        .scale(if (r + k).is_multiple_of(2) { 1.0 } else { -1.0 });
    let integral = SphereQuadrature::new(48).integrate(&density).re;
    let norm = 2f64.powi(m as i32 - 2)
        / (sphere_area((ni + mi - ri - 3) as u32) * sphere_area((mi + ri - 3) as u32));
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * norm * integral
}
