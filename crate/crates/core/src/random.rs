//! Seeded generators for property checks. All take an explicit RNG so a
//! fixed seed reproduces the same inputs.

use alloc::vec::Vec;

use rand::Rng;

use crate::blade;
use crate::poly::{Monomial, Poly, Var};
use crate::scalar::Scalar;
use crate::tla::{TlaForm, TlaSection, ValueKind};

/// Small rational, occasionally with denominator 2 or 3.
pub fn scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    let num = rng.gen_range(-3i64..=3);
    let den = [1i64, 1, 1, 2, 3][rng.gen_range(0..5)];
    Scalar::frac(num, den)
}

pub fn nonzero_scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let s = scalar(rng);
        if s != Scalar::frac(0, 1) {
            return s;
        }
    }
}

/// Polynomial in `x1..xm` of degree at most `max_deg` with up to `max_terms` terms.
pub fn poly<R: Rng + ?Sized>(rng: &mut R, m: usize, max_deg: u32, max_terms: usize) -> Poly {
    let mut p = Poly::default();
    let count = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..count {
        let deg = rng.gen_range(0..=max_deg);
        let mut pairs = Vec::new();
        if m > 0 {
            for _ in 0..deg {
                pairs.push((Var::X(rng.gen_range(0..m) as u8), 1));
            }
        }
        p.add_term(Monomial::from_pairs(pairs), scalar(rng));
    }
    p
}

/// Sum of up to `max_terms` random basis terms of any bidegree.
pub fn form<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, kind: ValueKind, max_deg: u32, max_terms: usize) -> TlaForm {
    let mut w = TlaForm::zero(m, n, kind);
    let count = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..count {
        let k: u32 = if m + n == 0 { 0 } else { rng.gen_range(0..(1u32 << (m + n))) };
        w = w.add(&basis_term(rng, m, n, kind, k, max_deg));
    }
    w
}

/// Random form homogeneous of total degree `p`.
pub fn homogeneous_form<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    kind: ValueKind,
    p: usize,
    max_deg: u32,
    max_terms: usize,
) -> TlaForm {
    let keys = blade::subsets(blade::range(0, (m + n) as u32), p);
    let mut w = TlaForm::zero(m, n, kind);
    if keys.is_empty() {
        return w;
    }
    let count = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..count {
        let k = keys[rng.gen_range(0..keys.len())];
        w = w.add(&basis_term(rng, m, n, kind, k, max_deg));
    }
    w
}

fn basis_term<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, kind: ValueKind, k: u32, max_deg: u32) -> TlaForm {
    let bits: Vec<usize> = blade::bits(k).map(|b| b as usize).collect();
    let i: Vec<usize> = bits.iter().copied().filter(|&b| b < m).collect();
    let j: Vec<usize> = bits.iter().copied().filter(|&b| b >= m).map(|b| b - m).collect();
    let v = if kind == ValueKind::Algebra && n > 0 { rng.gen_range(0..n) } else { 0 };
    let kind = if n == 0 { ValueKind::Scalar } else { kind };
    TlaForm::term(m, n, kind, &i, &j, v, poly(rng, m, max_deg, 2)).expect("in range")
}

pub fn section<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, max_deg: u32) -> TlaSection {
    TlaSection::new(
        (0..m).map(|_| poly(rng, m, max_deg, 2)).collect(),
        (0..n).map(|_| poly(rng, m, max_deg, 2)).collect(),
    )
}

/// A `p`-cochain with a random homogeneous degree-`q` form on every `p`-simplex.
pub fn cochain<R: Rng + ?Sized>(
    rng: &mut R,
    gd: &crate::gluing::GluingData,
    p: usize,
    kind: ValueKind,
    q: usize,
    max_deg: u32,
    max_terms: usize,
) -> crate::cech::CechCochain {
    let mut c = crate::cech::CechCochain::zero(p, kind);
    for s in gd.nerve.simplices(p) {
        let w = homogeneous_form(rng, gd.m(), gd.n(), kind, q, max_deg, max_terms);
        if !w.is_zero() {
            c.components.insert(s, w);
        }
    }
    c
}
