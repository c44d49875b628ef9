//! Forms on a trivial Lie algebroid `TLA(U, g)`: elements of
//! `Ω^r(U) ⊗ Λ^s g* ⊗ V` with `V` the scalars or `g`.
//!
//! A term is keyed by a [`Blade`] and a value index. `dx^mu` is bit `mu`,
//! `θ^a` is bit `m + a`; the value index is the `E_a` component for
//! algebra-valued forms and `0` otherwise.
//!
//! # Mixed basis
//!
//! With `ℓ^a = A^a − θ^a` the substitution `θ^a ↦ A^a − ℓ^a` is the same map
//! as `ℓ^a ↦ A^a − θ^a`, so [`TlaForm::to_mixed`] and [`TlaForm::from_mixed`]
//! coincide; a form "in the mixed basis" reuses the `θ` slots for `ℓ`.
//!
//! # Hodge star
//!
//! The star is the one of the block metric `g ⊕ h` in the basis
//! `(dx, ℓ)`, oriented by `√|g|√|h| dx^1…dx^m ℓ^1…ℓ^n`:
//!
//! `⋆e^K = √|g|√|h| Σ_L det(g⁻¹[I_K, I_L]) det(h⁻¹[J_K, J_L]) sgn(L, L^c) e^{L^c}`
//!
//! over increasing index sets. Written with repeated indices this is the
//! `1/(r!s!)` contraction with an extra `1/((m−r)!(n−s)!)`, and it satisfies
//! `⋆⋆ = (−1)^{p(m+n−p)} sgn(det g · det h)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::blade::{self, Blade};
use crate::ce::{add_term, ce_part, Terms};
use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::Matrix;
use crate::poly::{Poly, Var};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    Scalar,
    Algebra,
}

/// A chart `U ⊂ R^m`, optionally with a rational box for integration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub m: usize,
    pub bounds: Option<Vec<(Scalar, Scalar)>>,
}

impl Chart {
    pub fn new(m: usize) -> Self {
        Chart { m, bounds: None }
    }

    pub fn with_box(bounds: Vec<(Scalar, Scalar)>) -> Result<Self> {
        for (lo, hi) in &bounds {
            let ok = lo.is_real() && hi.is_real() && lo.re() < hi.re();
            if !ok {
                return Err(Error::Invalid(format!("box interval [{lo}, {hi}] is empty or not real")));
            }
        }
        Ok(Chart { m: bounds.len(), bounds: Some(bounds) })
    }

    pub fn unit_box(m: usize) -> Self {
        Chart { m, bounds: Some((0..m).map(|_| (Scalar::zero(), Scalar::one())).collect()) }
    }

    pub fn contains(&self, p: &[Scalar]) -> bool {
        match &self.bounds {
            None => true,
            Some(b) => b.iter().zip(p).all(|((lo, hi), x)| x.is_real() && lo.re() <= x.re() && x.re() <= hi.re()),
        }
    }
}

/// A section `X ⊕ γ` of `TLA(U, g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TlaSection {
    pub x: Vec<Poly>,
    pub gamma: Vec<Poly>,
}

impl TlaSection {
    pub fn new(x: Vec<Poly>, gamma: Vec<Poly>) -> Self {
        TlaSection { x, gamma }
    }

    pub fn zero(m: usize, n: usize) -> Self {
        TlaSection { x: alloc::vec![Poly::zero(); m], gamma: alloc::vec![Poly::zero(); n] }
    }

    /// `∂_mu ⊕ 0`.
    pub fn coordinate(m: usize, n: usize, mu: usize) -> Self {
        let mut s = TlaSection::zero(m, n);
        s.x[mu] = Poly::one();
        s
    }

    /// `0 ⊕ E_a`.
    pub fn inner(m: usize, n: usize, a: usize) -> Self {
        let mut s = TlaSection::zero(m, n);
        s.gamma[a] = Poly::one();
        s
    }

    /// Derivative of `f` along `X`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (mu, xm) in self.x.iter().enumerate() {
            if !xm.is_zero() {
                out = &out + &(xm * &f.derivative(mu));
            }
        }
        out
    }
}

/// `[X ⊕ γ, Y ⊕ η] = [X, Y] ⊕ (X·η − Y·γ + [γ, η])`.
pub fn tla_bracket(g: &LieAlgebra, a: &TlaSection, b: &TlaSection) -> Result<TlaSection> {
    if a.x.len() != b.x.len() {
        return Err(Error::DimensionMismatch { expected: a.x.len(), got: b.x.len() });
    }
    let x = (0..a.x.len()).map(|mu| &a.apply(&b.x[mu]) - &b.apply(&a.x[mu])).collect();
    let br = g.bracket_poly(&a.gamma, &b.gamma)?;
    let gamma = (0..g.dim()).map(|c| &(&a.apply(&b.gamma[c]) - &b.apply(&a.gamma[c])) + &br[c]).collect();
    Ok(TlaSection { x, gamma })
}

/// `A = A^a_mu dx^mu ⊗ E_a`, stored as an `n × m` matrix (row `a`, column `mu`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConnectionForm {
    pub a: Matrix<Poly>,
}

impl LocalConnectionForm {
    pub fn new(a: Matrix<Poly>) -> Self {
        LocalConnectionForm { a }
    }

    pub fn zero(m: usize, n: usize) -> Self {
        LocalConnectionForm { a: Matrix::zeros(n, m) }
    }

    pub fn m(&self) -> usize {
        self.a.cols()
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// `A` as an algebra-valued 1-form.
    pub fn as_form(&self) -> TlaForm {
        let (m, n) = (self.m(), self.n());
        let mut f = TlaForm::zero(m, n, ValueKind::Algebra);
        for (a, mu, v) in self.a.nonzero() {
            add_term(&mut f.terms, (1 << mu, a), v.clone());
        }
        f
    }

    /// Inverse of [`LocalConnectionForm::as_form`] on degree-1 dx-only forms.
    pub fn from_form(f: &TlaForm) -> Result<Self> {
        let mut a = Matrix::zeros(f.n, f.m);
        for (&(k, v), c) in &f.terms {
            if blade::grade(k) != 1 || k >> f.m != 0 || f.kind != ValueKind::Algebra {
                return Err(Error::Invalid("connection form must be an algebra-valued dx 1-form".into()));
            }
            a.set(v, k.trailing_zeros() as usize, c.clone());
        }
        Ok(LocalConnectionForm { a })
    }
}

fn checked_sqrt(det: &Scalar) -> Option<Scalar> {
    det.sqrt_abs_rational()
}

/// Constant inner metric `h_ab` on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerMetricLocal {
    h: Matrix<Scalar>,
    inv: Option<Matrix<Scalar>>,
    det: Scalar,
    sqrt: Option<Scalar>,
}

impl InnerMetricLocal {
    /// Symmetric matrix; need not be nondegenerate or have a square determinant
    /// until an operation requires it.
    pub fn new(h: Matrix<Scalar>) -> Result<Self> {
        if !h.is_symmetric() {
            return Err(Error::Invalid("inner metric is not symmetric".into()));
        }
        let det = h.det();
        let inv = h.inverse();
        let sqrt = if det.is_zero() { None } else { checked_sqrt(&det) };
        Ok(InnerMetricLocal { h, inv, det, sqrt })
    }

    pub fn identity(n: usize) -> Self {
        InnerMetricLocal::new(Matrix::identity(n)).expect("identity")
    }

    pub fn matrix(&self) -> &Matrix<Scalar> {
        &self.h
    }

    pub fn det(&self) -> &Scalar {
        &self.det
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.inv.is_some()
    }

    pub fn inverse(&self) -> Result<&Matrix<Scalar>> {
        self.inv.as_ref().ok_or_else(|| Error::Degenerate("inner metric".into()))
    }

    /// `√|det h|`.
    pub fn sqrt_det(&self) -> Result<&Scalar> {
        self.inverse()?;
        self.sqrt.as_ref().ok_or_else(|| Error::NonSquareDeterminant(format!("{}", self.det)))
    }
}

/// Constant base metric `g_{mu nu}` on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMetricLocal {
    g: Matrix<Scalar>,
    inv: Matrix<Scalar>,
    det: Scalar,
    sqrt: Option<Scalar>,
}

impl BaseMetricLocal {
    pub fn new(g: Matrix<Scalar>) -> Result<Self> {
        if !g.is_symmetric() {
            return Err(Error::Invalid("base metric is not symmetric".into()));
        }
        let inv = g.inverse().ok_or_else(|| Error::Degenerate("base metric".into()))?;
        let det = g.det();
        let sqrt = checked_sqrt(&det);
        Ok(BaseMetricLocal { g, inv, det, sqrt })
    }

    pub fn identity(m: usize) -> Self {
        BaseMetricLocal::new(Matrix::identity(m)).expect("identity")
    }

    pub fn matrix(&self) -> &Matrix<Scalar> {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix<Scalar> {
        &self.inv
    }

    pub fn det(&self) -> &Scalar {
        &self.det
    }

    pub fn sqrt_det(&self) -> Result<&Scalar> {
        self.sqrt.as_ref().ok_or_else(|| Error::NonSquareDeterminant(format!("{}", self.det)))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TlaForm {
    m: usize,
    n: usize,
    kind: ValueKind,
    terms: Terms<Poly>,
}

impl TlaForm {
    pub fn zero(m: usize, n: usize, kind: ValueKind) -> Self {
        assert!(m + n <= 32, "at most 32 generators");
        TlaForm { m, n, kind, terms: Terms::new() }
    }

    /// Scalar 0-form `f`.
    pub fn function(m: usize, n: usize, f: Poly) -> Self {
        let mut w = TlaForm::zero(m, n, ValueKind::Scalar);
        add_term(&mut w.terms, (0, 0), f);
        w
    }

    pub fn one(m: usize, n: usize) -> Self {
        TlaForm::function(m, n, Poly::one())
    }

    pub fn dx(m: usize, n: usize, mu: usize) -> Self {
        assert!(mu < m);
        let mut w = TlaForm::zero(m, n, ValueKind::Scalar);
        add_term(&mut w.terms, (1 << mu, 0), Poly::one());
        w
    }

    pub fn theta(m: usize, n: usize, a: usize) -> Self {
        assert!(a < n);
        let mut w = TlaForm::zero(m, n, ValueKind::Scalar);
        add_term(&mut w.terms, (1 << (m + a), 0), Poly::one());
        w
    }

    /// Algebra-valued 0-form `f ⊗ E_a`.
    pub fn value(m: usize, n: usize, a: usize, f: Poly) -> Self {
        assert!(a < n);
        let mut w = TlaForm::zero(m, n, ValueKind::Algebra);
        add_term(&mut w.terms, (0, a), f);
        w
    }

    /// `coeff · dx^I ∧ θ^J (⊗ E_value)` with 0-based indices in any order.
    pub fn term(m: usize, n: usize, kind: ValueKind, i: &[usize], j: &[usize], value: usize, coeff: Poly) -> Result<Self> {
        let mut w = TlaForm::zero(m, n, kind);
        if i.iter().any(|&mu| mu >= m) {
            return Err(Error::DimensionMismatch { expected: m, got: i.iter().max().unwrap() + 1 });
        }
        if j.iter().any(|&a| a >= n) {
            return Err(Error::DimensionMismatch { expected: n, got: j.iter().max().unwrap() + 1 });
        }
        let v = match kind {
            ValueKind::Scalar => 0,
            ValueKind::Algebra if value < n => value,
            ValueKind::Algebra => return Err(Error::DimensionMismatch { expected: n, got: value + 1 }),
        };
        let idx: Vec<u32> = i.iter().map(|&mu| mu as u32).chain(j.iter().map(|&a| (m + a) as u32)).collect();
        let Some(sign) = blade::sort_sign(&idx) else { return Ok(w) };
        let c = if sign > 0 { coeff } else { -coeff };
        add_term(&mut w.terms, (blade::from_indices(&idx), v), c);
        Ok(w)
    }

    pub fn from_terms(m: usize, n: usize, kind: ValueKind, terms: Terms<Poly>) -> Self {
        let mut w = TlaForm::zero(m, n, kind);
        for (k, v) in terms {
            add_term(&mut w.terms, k, v);
        }
        w
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn terms(&self) -> &Terms<Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dx_mask(&self) -> Blade {
        blade::range(0, self.m as u32)
    }

    pub fn theta_mask(&self) -> Blade {
        blade::range(self.m as u32, (self.m + self.n) as u32)
    }

    /// Splits a blade into `(dx part, θ part)` bit masks, the θ part shifted down to bit 0.
    pub fn split(&self, k: Blade) -> (Blade, Blade) {
        (k & self.dx_mask(), (k & self.theta_mask()) >> self.m)
    }

    pub fn join(&self, i: Blade, j: Blade) -> Blade {
        i | (j << self.m)
    }

    /// Total degree when homogeneous; `Some(0)` for the zero form.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|(k, _)| blade::grade(*k));
        let Some(d) = it.next() else { return Some(0) };
        it.all(|e| e == d).then_some(d)
    }

    /// Part of total degree `p`.
    pub fn part(&self, p: usize) -> TlaForm {
        self.filter(|k, _| blade::grade(k) == p)
    }

    /// Part of bidegree `(r, s)`.
    pub fn bidegree_part(&self, r: usize, s: usize) -> TlaForm {
        let (dm, tm) = (self.dx_mask(), self.theta_mask());
        self.filter(|k, _| blade::grade(k & dm) == r && blade::grade(k & tm) == s)
    }

    pub fn filter(&self, keep: impl Fn(Blade, usize) -> bool) -> TlaForm {
        let terms = self.terms.iter().filter(|((k, v), _)| keep(*k, *v)).map(|(k, c)| (*k, c.clone())).collect();
        TlaForm { m: self.m, n: self.n, kind: self.kind, terms }
    }

    pub fn coefficient(&self, k: Blade, value: usize) -> Poly {
        self.terms.get(&(k, value)).cloned().unwrap_or_else(Poly::zero)
    }

    fn same_shape(&self, o: &TlaForm) -> Result<()> {
        if self.m != o.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: o.m });
        }
        if self.n != o.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: o.n });
        }
        Ok(())
    }

    pub fn add(&self, o: &TlaForm) -> TlaForm {
        assert!(self.m == o.m && self.n == o.n && (self.kind == o.kind || self.is_zero() || o.is_zero()));
        let kind = if self.is_zero() { o.kind } else { self.kind };
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            add_term(&mut terms, *k, v.clone());
        }
        TlaForm { m: self.m, n: self.n, kind, terms }
    }

    pub fn sub(&self, o: &TlaForm) -> TlaForm {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> TlaForm {
        self.map_coeffs(|c| -c)
    }

    /// Multiply by a function.
    pub fn mul_poly(&self, f: &Poly) -> TlaForm {
        self.map_coeffs(|c| c * f)
    }

    pub fn scale(&self, s: &Scalar) -> TlaForm {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> TlaForm {
        let mut out = TlaForm::zero(self.m, self.n, self.kind);
        for (k, c) in &self.terms {
            add_term(&mut out.terms, *k, f(c));
        }
        out
    }

    /// Scalar form `self` tensored with `E_a`.
    pub fn with_value(&self, a: usize) -> Result<TlaForm> {
        if self.kind != ValueKind::Scalar {
            return Err(Error::AlgebraValued);
        }
        let terms = self.terms.iter().map(|((k, _), c)| ((*k, a), c.clone())).collect();
        Ok(TlaForm { m: self.m, n: self.n, kind: ValueKind::Algebra, terms })
    }

    /// The scalar form `ω^a` with `ω = ω^a ⊗ E_a`.
    pub fn component(&self, a: usize) -> TlaForm {
        let mut out = TlaForm::zero(self.m, self.n, ValueKind::Scalar);
        for ((k, v), c) in &self.terms {
            if *v == a || self.kind == ValueKind::Scalar {
                add_term(&mut out.terms, (*k, 0), c.clone());
            }
        }
        out
    }

    /// Graded product. At most one factor may be algebra-valued.
    pub fn wedge(&self, o: &TlaForm) -> Result<TlaForm> {
        self.same_shape(o)?;
        if self.kind == ValueKind::Algebra && o.kind == ValueKind::Algebra {
            return Err(Error::BothAlgebraValued);
        }
        let kind = if self.kind == ValueKind::Algebra || o.kind == ValueKind::Algebra {
            ValueKind::Algebra
        } else {
            ValueKind::Scalar
        };
        let mut out = TlaForm::zero(self.m, self.n, kind);
        for (&(k1, v1), c1) in &self.terms {
            for (&(k2, v2), c2) in &o.terms {
                let Some(s) = blade::wedge_sign(k1, k2) else { continue };
                let c = c1 * c2;
                add_term(&mut out.terms, (k1 | k2, v1.max(v2)), if s > 0 { c } else { -c });
            }
        }
        Ok(out)
    }

    /// de Rham differential of the coefficient functions.
    pub fn de_rham_d(&self) -> TlaForm {
        let mut out = TlaForm::zero(self.m, self.n, self.kind);
        for (&(k, v), f) in &self.terms {
            for mu in 0..self.m {
                let Some(s) = blade::wedge_sign(1 << mu, k) else { continue };
                let df = f.derivative(mu);
                if df.is_zero() {
                    continue;
                }
                add_term(&mut out.terms, (k | (1 << mu), v), if s > 0 { df } else { -df });
            }
        }
        out
    }

    /// `s` (scalar-valued) or `s′` (algebra-valued) on the `θ` legs.
    pub fn ce_diff(&self, g: &LieAlgebra) -> Result<TlaForm> {
        if g.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: g.dim() });
        }
        let terms = ce_part(g, self.m as u32, self.kind == ValueKind::Algebra, &self.terms);
        Ok(TlaForm { m: self.m, n: self.n, kind: self.kind, terms })
    }

    /// `ĥd = d + s′` (or `d + s` on scalar-valued forms).
    pub fn total_diff(&self, g: &LieAlgebra) -> Result<TlaForm> {
        Ok(self.de_rham_d().add(&self.ce_diff(g)?))
    }

    /// Value of a homogeneous degree-`q` form on `q` sections; one entry per
    /// value component (length 1 for scalar-valued forms).
    pub fn evaluate(&self, args: &[TlaSection]) -> Result<Vec<Poly>> {
        let q = args.len();
        if self.degree() != Some(q) && !self.is_zero() {
            return Err(Error::NotHomogeneous(q));
        }
        let width = if self.kind == ValueKind::Algebra { self.n } else { 1 };
        let mut out = alloc::vec![Poly::zero(); width];
        for (&(k, v), f) in &self.terms {
            let gens: Vec<u32> = blade::bits(k).collect();
            let mat = Matrix::from_fn(q, q, |i, j| {
                let b = gens[i] as usize;
                if b < self.m {
                    args[j].x[b].clone()
                } else {
                    args[j].gamma[b - self.m].clone()
                }
            });
            out[v] = &out[v] + &(f * &mat.det_expand());
        }
        Ok(out)
    }

    /// Algebra morphism replacing each generator (bit) by a 1-form; `None`
    /// leaves the generator in place. Images are sparse maps blade → coefficient.
    pub fn substitute_generators(&self, images: &[Option<BTreeMap<Blade, Poly>>]) -> TlaForm {
        let mut out = TlaForm::zero(self.m, self.n, self.kind);
        for (&(k, v), f) in &self.terms {
            let mut acc: BTreeMap<Blade, Poly> = BTreeMap::new();
            acc.insert(0, f.clone());
            for bit in blade::bits(k) {
                let img = images.get(bit as usize).and_then(Option::as_ref);
                let mut next: BTreeMap<Blade, Poly> = BTreeMap::new();
                for (b1, c1) in &acc {
                    let mut push = |b2: Blade, c2: &Poly| {
                        if let Some(s) = blade::wedge_sign(*b1, b2) {
                            let c = c1 * c2;
                            let c = if s > 0 { c } else { -c };
                            let e = next.entry(b1 | b2).or_insert_with(Poly::zero);
                            *e = &*e + &c;
                        }
                    };
                    match img {
                        None => push(1 << bit, &Poly::one()),
                        Some(map) => {
                            for (b2, c2) in map {
                                push(*b2, c2);
                            }
                        }
                    }
                }
                next.retain(|_, c| !c.is_zero());
                acc = next;
            }
            for (b, c) in acc {
                add_term(&mut out.terms, (b, v), c);
            }
        }
        out
    }

    /// Replace `θ^a ↦ A^a − θ^a`; see the module docs.
    pub fn to_mixed(&self, conn: &LocalConnectionForm) -> TlaForm {
        let mut images: Vec<Option<BTreeMap<Blade, Poly>>> = alloc::vec![None; self.m + self.n];
        for a in 0..self.n {
            let mut img = BTreeMap::new();
            img.insert(1 << (self.m + a), -Poly::one());
            for mu in 0..self.m {
                let c = conn.a.get(a, mu);
                if !c.is_zero() {
                    img.insert(1 << mu, c.clone());
                }
            }
            images[self.m + a] = Some(img);
        }
        self.substitute_generators(&images)
    }

    pub fn from_mixed(&self, conn: &LocalConnectionForm) -> TlaForm {
        self.to_mixed(conn)
    }

    /// Map `g`-values by `G`: `E_a ↦ G^b_a E_b`.
    pub fn map_values(&self, g: &Matrix<Poly>) -> TlaForm {
        if self.kind == ValueKind::Scalar {
            return self.clone();
        }
        let mut out = TlaForm::zero(self.m, self.n, self.kind);
        for (&(k, a), f) in &self.terms {
            for b in 0..self.n {
                let gba = g.get(b, a);
                if !gba.is_zero() {
                    add_term(&mut out.terms, (k, b), f * gba);
                }
            }
        }
        out
    }

    /// Substitute a variable in every coefficient.
    pub fn substitute_var(&self, v: Var, p: &Poly) -> TlaForm {
        self.map_coeffs(|c| c.substitute(v, p))
    }

    /// Evaluate coefficients at a point of the chart.
    pub fn eval_x(&self, point: &[Scalar]) -> TlaForm {
        self.map_coeffs(|c| c.eval_x(point))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.values().all(Poly::is_constant)
    }

    pub fn has_rho(&self) -> bool {
        self.terms.values().any(Poly::has_rho)
    }

    /// Maximal polynomial degree of the coefficients.
    pub fn coeff_degree(&self) -> u32 {
        self.terms.values().map(Poly::degree).max().unwrap_or(0)
    }
}

impl fmt::Display for TlaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, ((k, v), c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for b in blade::bits(*k) {
                let b = b as usize;
                if b < self.m {
                    write!(f, " dx{}", b + 1)?;
                } else {
                    write!(f, " th{}", b - self.m + 1)?;
                }
            }
            if self.kind == ValueKind::Algebra {
                write!(f, " E{}", v + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TlaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TlaForm[m={}, n={}, {:?}]({})", self.m, self.n, self.kind, self)
    }
}

/// `Σ h_ab ω^a ∧ η^b`, the antisymmetrized extension of `h`.
pub fn h_pairing(h: &InnerMetricLocal, w: &TlaForm, e: &TlaForm) -> Result<TlaForm> {
    w.same_shape(e)?;
    if w.kind != ValueKind::Algebra || e.kind != ValueKind::Algebra {
        return Err(Error::ScalarValued);
    }
    let n = w.n;
    if h.matrix().rows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h.matrix().rows() });
    }
    let mut out = TlaForm::zero(w.m, n, ValueKind::Scalar);
    let wc: Vec<TlaForm> = (0..n).map(|a| w.component(a)).collect();
    let ec: Vec<TlaForm> = (0..n).map(|b| e.component(b)).collect();
    for (a, b, hab) in h.matrix().nonzero() {
        if wc[a].is_zero() || ec[b].is_zero() {
            continue;
        }
        out = out.add(&wc[a].wedge(&ec[b])?.scale(hab));
    }
    Ok(out)
}

/// `(−1)^n √|h| ℓ^1 ∧ … ∧ ℓ^n` expanded in the `(dx, θ)` basis.
pub fn volume_form(m: usize, h: &InnerMetricLocal, conn: &LocalConnectionForm) -> Result<TlaForm> {
    let n = h.matrix().rows();
    let sq = h.sqrt_det()?.clone();
    let c = if n.is_multiple_of(2) { sq } else { -sq };
    let top: Vec<usize> = (0..n).collect();
    let mixed = TlaForm::term(m, n, ValueKind::Scalar, &[], &top, 0, Poly::constant(c))?;
    Ok(mixed.from_mixed(conn))
}

/// Coefficient of `E_1 ∧ … ∧ E_n` in `ε = (−1)^n √|h|⁻¹ E_1∧…∧E_n`.
pub fn epsilon_section(h: &InnerMetricLocal) -> Result<Scalar> {
    let n = h.matrix().rows();
    let inv = h.sqrt_det()?.inv().expect("nonzero");
    Ok(if n.is_multiple_of(2) { inv } else { -inv })
}

/// Contraction of the `n` inner legs against `ε`. Inner sections enter
/// through `ι(E_a)`, on which `θ^a` takes the value `−δ^a_b`, so
/// `i_ε(f dx^I ∧ θ^1…θ^n) = f/√|h| dx^I`; forms with fewer θ-legs map to 0.
pub fn i_epsilon(w: &TlaForm, h: &InnerMetricLocal) -> Result<TlaForm> {
    let eps = epsilon_section(h)?;
    let n = w.n;
    // ε · (−1)^n from evaluating θ^top on ι(E_1), …, ι(E_n)
    let factor = if n.is_multiple_of(2) { eps } else { -eps };
    let top = w.theta_mask();
    let mut out = TlaForm::zero(w.m, n, w.kind);
    for (&(k, v), c) in &w.terms {
        if k & top == top {
            add_term(&mut out.terms, (k & !top, v), c.scale(&factor));
        }
    }
    Ok(out)
}

/// `ω^{m.i.}`: the coefficient of `√|h| θ^1∧…∧θ^n`, a form with dx legs only.
pub fn inner_integrate(w: &TlaForm, h: &InnerMetricLocal) -> Result<TlaForm> {
    if h.matrix().rows() != w.n {
        return Err(Error::DimensionMismatch { expected: w.n, got: h.matrix().rows() });
    }
    let inv = h.sqrt_det()?.inv().expect("nonzero");
    let top = w.theta_mask();
    let mut out = TlaForm::zero(w.m, w.n, w.kind);
    for (&(k, v), c) in &w.terms {
        if k & top == top {
            add_term(&mut out.terms, (k & !top, v), c.scale(&inv));
        }
    }
    Ok(out)
}

/// The same extraction done in the mixed basis of `conn`: the coefficient of
/// `ω_{h,ℓ}` there. Agrees with [`inner_integrate`] for every `conn`.
pub fn inner_integrate_mixed(w: &TlaForm, h: &InnerMetricLocal, conn: &LocalConnectionForm) -> Result<TlaForm> {
    let mixed = w.to_mixed(conn);
    let mut r = inner_integrate(&mixed, h)?;
    if w.n % 2 == 1 {
        r = r.neg();
    }
    Ok(r)
}

/// `∫_U ∫_inner ω` over the chart box.
pub fn integrate(w: &TlaForm, h: &InnerMetricLocal, chart: &Chart) -> Result<Scalar> {
    if w.kind != ValueKind::Scalar {
        return Err(Error::AlgebraValued);
    }
    let bounds = chart.bounds.as_ref().ok_or(Error::MissingBox)?;
    let inner = inner_integrate(w, h)?;
    let top = inner.coefficient(inner.dx_mask(), 0);
    top.integrate_box(bounds).ok_or_else(|| Error::Invalid("coefficient is not a polynomial in the chart coordinates".into()))
}

/// Hodge star of the block metric `g ⊕ h` in the mixed basis of `conn`;
/// input and output are in the `(dx, θ)` basis. Values are untouched.
pub fn hodge_star(w: &TlaForm, g: &BaseMetricLocal, h: &InnerMetricLocal, conn: &LocalConnectionForm) -> Result<TlaForm> {
    let (m, n) = (w.m, w.n);
    if g.matrix().rows() != m {
        return Err(Error::DimensionMismatch { expected: m, got: g.matrix().rows() });
    }
    if h.matrix().rows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h.matrix().rows() });
    }
    let vol = g.sqrt_det()? * h.sqrt_det()?;
    let (ginv, hinv) = (g.inverse(), h.inverse()?);
    let mixed = w.to_mixed(conn);
    let all = blade::range(0, (m + n) as u32);
    let mut out = TlaForm::zero(m, n, w.kind);
    let mut cache: BTreeMap<Blade, Vec<(Blade, Scalar)>> = BTreeMap::new();
    for (&(k, v), c) in &mixed.terms {
        let images = cache.entry(k).or_insert_with(|| star_basis(m, k, ginv, hinv, &vol, all));
        for (b, s) in images.iter() {
            add_term(&mut out.terms, (*b, v), c.scale(s));
        }
    }
    Ok(out.from_mixed(conn))
}

/// `⋆e^K` as a list of `(blade, coefficient)`.
fn star_basis(m: usize, k: Blade, ginv: &Matrix<Scalar>, hinv: &Matrix<Scalar>, vol: &Scalar, all: Blade) -> Vec<(Blade, Scalar)> {
    let dm = blade::range(0, m as u32);
    let (ik, jk) = (k & dm, k & !dm);
    let mut out = Vec::new();
    for il in blade::subsets(dm, blade::grade(ik)) {
        let dg = minor(ginv, ik, il, 0);
        if dg.is_zero() {
            continue;
        }
        for jl in blade::subsets(all & !dm, blade::grade(jk)) {
            let dh = minor(hinv, jk, jl, m as u32);
            if dh.is_zero() {
                continue;
            }
            let l = il | jl;
            let lc = all & !l;
            let s = blade::wedge_sign(l, lc).expect("disjoint");
            let c = &(&dg * &dh) * vol;
            out.push((lc, if s > 0 { c } else { -c }));
        }
    }
    out
}

/// `det M[rows, cols]` with rows/cols given as masks offset by `off`.
pub(crate) fn minor(mat: &Matrix<Scalar>, rows: Blade, cols: Blade, off: u32) -> Scalar {
    let r: Vec<usize> = blade::bits(rows).map(|b| (b - off) as usize).collect();
    let c: Vec<usize> = blade::bits(cols).map(|b| (b - off) as usize).collect();
    if r.is_empty() {
        return Scalar::one();
    }
    Matrix::from_fn(r.len(), c.len(), |i, j| mat.get(r[i], c[j]).clone()).det()
}

fn pairing(w: &TlaForm, e: &TlaForm, h: &InnerMetricLocal) -> Result<TlaForm> {
    match (w.kind, e.kind) {
        (ValueKind::Algebra, ValueKind::Algebra) => h_pairing(h, w, e),
        (ValueKind::Scalar, ValueKind::Scalar) => w.wedge(e),
        _ => Err(Error::Invalid("cannot pair scalar- and algebra-valued forms".into())),
    }
}

/// `(ω, η) = ∫_𝒜 ⟨ω, ⋆η⟩`.
pub fn star_inner_product(
    w: &TlaForm,
    e: &TlaForm,
    g: &BaseMetricLocal,
    h: &InnerMetricLocal,
    conn: &LocalConnectionForm,
    chart: &Chart,
) -> Result<Scalar> {
    let p = w.degree().ok_or(Error::NotHomogeneous(0))?;
    if !e.is_zero() && e.degree() != Some(p) && !w.is_zero() {
        return Err(Error::NotHomogeneous(p));
    }
    let star = hodge_star(e, g, h, conn)?;
    integrate(&pairing(w, &star, h)?, h, chart)
}

/// The same scalar product by direct contraction of mixed-basis components:
/// `(−1)^n ∫ √|g| Σ h_ab ω^a_K η^b_L det(g⁻¹[I_K,I_L]) det(h⁻¹[J_K,J_L])`.
pub fn star_inner_product_components(
    w: &TlaForm,
    e: &TlaForm,
    g: &BaseMetricLocal,
    h: &InnerMetricLocal,
    conn: &LocalConnectionForm,
    chart: &Chart,
) -> Result<Scalar> {
    let p = w.degree().ok_or(Error::NotHomogeneous(0))?;
    if !e.is_zero() && e.degree() != Some(p) && !w.is_zero() {
        return Err(Error::NotHomogeneous(p));
    }
    if w.kind != e.kind {
        return Err(Error::Invalid("cannot pair scalar- and algebra-valued forms".into()));
    }
    let bounds = chart.bounds.as_ref().ok_or(Error::MissingBox)?;
    let (m, n) = (w.m, w.n);
    let (ginv, hinv) = (g.inverse(), h.inverse()?);
    let wm = w.to_mixed(conn);
    let em = e.to_mixed(conn);
    let dm = blade::range(0, m as u32);
    let mut density = Poly::zero();
    for (&(k, a), wc) in &wm.terms {
        for (&(l, b), ec) in &em.terms {
            let hab = if w.kind == ValueKind::Algebra { h.matrix().get(a, b).clone() } else { Scalar::one() };
            if hab.is_zero() {
                continue;
            }
            if blade::grade(k & dm) != blade::grade(l & dm) {
                continue;
            }
            let dg = minor(ginv, k & dm, l & dm, 0);
            let dh = minor(hinv, k & !dm, l & !dm, m as u32);
            let c = &(&dg * &dh) * &hab;
            if !c.is_zero() {
                density = &density + &(wc * ec).scale(&c);
            }
        }
    }
    let mut sign = g.sqrt_det()?.clone();
    if n % 2 == 1 {
        sign = -sign;
    }
    let total = density.integrate_box(bounds).ok_or_else(|| Error::Invalid("non-polynomial density".into()))?;
    Ok(&total * &sign)
}

/// Algebraic Poincaré homotopy on the dx legs, centered at `center`:
/// `K(f dx^{i_1…i_k}) = Σ_t (−1)^{t−1} (∫_0^1 s^{k−1} f(c + s(x−c)) ds) (x^{i_t} − c^{i_t}) dx^{I∖i_t}`,
/// and `K(α ∧ θ^J) = K(α) ∧ θ^J`. Then `dK + Kd = id − ev_c` where `ev_c`
/// evaluates the dx-degree-0 part at the center.
pub fn poincare_homotopy(w: &TlaForm, center: &[Scalar]) -> TlaForm {
    let m = w.m;
    let neg: Vec<Scalar> = center.iter().map(|c| -c).collect();
    let dm = w.dx_mask();
    let mut out = TlaForm::zero(m, w.n, w.kind);
    for (&(key, v), f) in &w.terms {
        let i = key & dm;
        let k = blade::grade(i);
        if k == 0 {
            continue;
        }
        // work in y = x − c
        let fy = f.shift_x(center);
        let mut weighted = Poly::zero();
        for (mono, c) in fy.terms() {
            let w8 = Scalar::frac(1, (k as u32 + mono.x_degree()) as i64);
            weighted.add_term(mono.clone(), c * &w8);
        }
        for (t, bit) in blade::bits(i).enumerate() {
            let coeff = (&weighted * &Poly::x(bit as usize)).shift_x(&neg);
            let c = if t % 2 == 0 { coeff } else { -coeff };
            add_term(&mut out.terms, (key ^ (1 << bit), v), c);
        }
    }
    out
}

/// `ev_c`: the dx-degree-0 part evaluated at `center`.
pub fn evaluate_at_center(w: &TlaForm, center: &[Scalar]) -> TlaForm {
    let dm = w.dx_mask();
    w.filter(|k, _| k & dm == 0).eval_x(center)
}
