//! The Chevalley–Eilenberg complex `Λg* ⊗ V` for `V` trivial or adjoint.
//!
//! Convention: `s θ^c = −Σ_{a<b} C^c_{ab} θ^a∧θ^b`, extended as a graded
//! derivation, and for adjoint values
//! `s′(α⊗v) = s(α)⊗v + (−1)^{|α|} α∧θ^a ⊗ [E_a, v]`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::blade::{self, Blade};
use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, Scale};
use crate::linalg::{Matrix, Ring};
use crate::scalar::Scalar;

pub trait Coeff: Ring + Scale {}
impl<T: Ring + Scale> Coeff for T {}

/// Sparse terms keyed by `(blade, value index)`.
pub type Terms<T> = BTreeMap<(Blade, usize), T>;

pub(crate) fn add_term<T: Coeff>(terms: &mut Terms<T>, key: (Blade, usize), v: T) {
    if v.is_zero() {
        return;
    }
    match terms.entry(key) {
        alloc::collections::btree_map::Entry::Vacant(e) => {
            e.insert(v);
        }
        alloc::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().radd(&v);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// The CE differential applied to terms whose `θ^a` sit at bit `off + a`.
/// Any other bits (dx legs) are carried along as passive generators.
pub(crate) fn ce_part<T: Coeff>(g: &LieAlgebra, off: u32, adjoint: bool, terms: &Terms<T>) -> Terms<T> {
    let n = g.dim();
    // s θ^c as a list of (blade of θ^aθ^b, −C^c_ab)
    let gens: Vec<Vec<(Blade, Scalar)>> = (0..n)
        .map(|c| {
            let mut out = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    let k = g.structure(a, b, c);
                    if !k.is_zero() {
                        out.push(((1 << (off + a as u32)) | (1 << (off + b as u32)), -k));
                    }
                }
            }
            out
        })
        .collect();
    let theta_mask = blade::range(off, off + n as u32);
    let mut out = Terms::new();
    for (&(k, v), f) in terms {
        for bit in blade::bits(k & theta_mask) {
            let c = (bit - off) as usize;
            let rest = k ^ (1 << bit);
            let base = if blade::below(k, bit).is_multiple_of(2) { 1 } else { -1 };
            for (two, coeff) in &gens[c] {
                if let Some(sg) = blade::wedge_sign(*two, rest) {
                    let w = if base * sg > 0 { coeff.clone() } else { -coeff };
                    add_term(&mut out, (two | rest, v), f.scale_by(&w));
                }
            }
        }
        if adjoint {
            let deg_sign = if blade::grade(k).is_multiple_of(2) { 1 } else { -1 };
            for a in 0..n {
                let tb = 1 << (off + a as u32);
                let Some(sg) = blade::wedge_sign(k, tb) else { continue };
                for c in 0..n {
                    let kc = g.structure(a, v, c);
                    if kc.is_zero() {
                        continue;
                    }
                    let w = if deg_sign * sg > 0 { kc.clone() } else { -kc };
                    add_term(&mut out, (k | tb, c), f.scale_by(&w));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rep {
    TrivialScalar,
    Adjoint,
}

/// An element of `Λg* ⊗ V`; `θ^a` is bit `a`, value index is `0` for scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CeElement {
    n: usize,
    rep: Rep,
    terms: Terms<Scalar>,
}

impl CeElement {
    pub fn zero(n: usize, rep: Rep) -> Self {
        CeElement { n, rep, terms: Terms::new() }
    }

    /// `coeff · θ^J ⊗ v` with `J` given as 0-based indices in any order.
    pub fn monomial(n: usize, rep: Rep, j: &[u32], value: usize, coeff: Scalar) -> Result<Self> {
        let mut x = CeElement::zero(n, rep);
        let Some(sign) = blade::sort_sign(j) else { return Ok(x) };
        if j.iter().any(|&a| a as usize >= n) || (rep == Rep::Adjoint && value >= n) {
            return Err(Error::DimensionMismatch { expected: n, got: j.len().max(value + 1) });
        }
        let v = if rep == Rep::TrivialScalar { 0 } else { value };
        let c = if sign > 0 { coeff } else { -coeff };
        add_term(&mut x.terms, (blade::from_indices(j), v), c);
        Ok(x)
    }

    pub fn from_terms(n: usize, rep: Rep, terms: Terms<Scalar>) -> Self {
        let terms = terms.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        CeElement { n, rep, terms }
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &Terms<Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &CeElement) -> CeElement {
        let mut t = self.terms.clone();
        for (k, v) in &o.terms {
            add_term(&mut t, *k, v.clone());
        }
        CeElement { n: self.n, rep: self.rep, terms: t }
    }

    pub fn scale(&self, s: &Scalar) -> CeElement {
        let terms = if s.is_zero() {
            Terms::new()
        } else {
            self.terms.iter().map(|(k, v)| (*k, v * s)).collect()
        };
        CeElement { n: self.n, rep: self.rep, terms }
    }

    /// Degrees of the stored terms, `None` when empty or mixed.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|(k, _)| blade::grade(*k));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }
}

pub fn ce_diff(g: &LieAlgebra, x: &CeElement) -> Result<CeElement> {
    if x.n != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: x.n });
    }
    let terms = ce_part(g, 0, x.rep == Rep::Adjoint, &x.terms);
    Ok(CeElement { n: x.n, rep: x.rep, terms })
}

/// Ordered basis `(blade, value)` of `Λ^q g* ⊗ V`.
pub fn cochain_basis(n: usize, rep: Rep, q: usize) -> Vec<(Blade, usize)> {
    let vals = if rep == Rep::Adjoint { n } else { 1 };
    let mut out = Vec::new();
    for k in blade::subsets(blade::range(0, n as u32), q) {
        for v in 0..vals {
            out.push((k, v));
        }
    }
    out
}

/// Matrix of the differential `C^q → C^{q+1}` in the [`cochain_basis`] bases.
pub fn diff_matrix(g: &LieAlgebra, rep: Rep, q: usize) -> Matrix<Scalar> {
    let n = g.dim();
    let src = cochain_basis(n, rep, q);
    let dst = cochain_basis(n, rep, q + 1);
    let index: BTreeMap<(Blade, usize), usize> = dst.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut m = Matrix::zeros(dst.len(), src.len());
    for (col, key) in src.iter().enumerate() {
        let mut t = Terms::new();
        t.insert(*key, Scalar::one());
        for (k, v) in ce_part(g, 0, rep == Rep::Adjoint, &t) {
            m.set(index[&k], col, v);
        }
    }
    m
}

/// `H^q(g; V)` with chosen representatives and a class projector.
#[derive(Clone, Debug)]
pub struct LieCohomology {
    pub q: usize,
    pub dim: usize,
    pub rep: Rep,
    pub representatives: Vec<CeElement>,
    basis: Vec<(Blade, usize)>,
    /// columns: image spanning set, then representatives
    system: Matrix<Scalar>,
    image_cols: usize,
    next_diff: Matrix<Scalar>,
    n: usize,
}

impl LieCohomology {
    pub fn basis(&self) -> &[(Blade, usize)] {
        &self.basis
    }

    pub fn to_vector(&self, x: &CeElement) -> Result<Vec<Scalar>> {
        let mut v = alloc::vec![Scalar::zero(); self.basis.len()];
        for (k, c) in &x.terms {
            match self.basis.iter().position(|b| b == k) {
                Some(i) => v[i] = c.clone(),
                None => return Err(Error::NotHomogeneous(self.q)),
            }
        }
        Ok(v)
    }

    pub fn from_vector(&self, v: &[Scalar]) -> CeElement {
        let terms = self.basis.iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k, c.clone())).collect();
        CeElement { n: self.n, rep: self.rep, terms }
    }

    /// Class coordinates of a cocycle with respect to `representatives`.
    pub fn project(&self, x: &CeElement) -> Result<Vec<Scalar>> {
        let v = self.to_vector(x)?;
        if !self.next_diff.mul_vec(&v).iter().all(Zero::is_zero) {
            return Err(Error::NotCocycle);
        }
        let sol = self.system.solve(&v).ok_or(Error::NotCocycle)?;
        Ok(sol[self.image_cols..].to_vec())
    }

    /// The representative combination for class coordinates `c`.
    pub fn lift(&self, c: &[Scalar]) -> CeElement {
        let mut out = CeElement::zero(self.n, self.rep);
        for (r, k) in self.representatives.iter().zip(c) {
            out = out.add(&r.scale(k));
        }
        out
    }
}

pub fn lie_algebra_cohomology(g: &LieAlgebra, rep: Rep, q: usize) -> Result<LieCohomology> {
    let n = g.dim();
    if q > n {
        return Err(Error::DegreeOutOfRange { degree: q, max: n });
    }
    let basis = cochain_basis(n, rep, q);
    let next_diff = diff_matrix(g, rep, q);
    let image = if q == 0 { Matrix::zeros(basis.len(), 0) } else { diff_matrix(g, rep, q - 1) };
    let kernel = next_diff.kernel();
    let len = basis.len();
    let mut cols: Vec<Vec<Scalar>> = (0..image.cols()).map(|j| (0..len).map(|i| image.get(i, j).clone()).collect()).collect();
    let image_cols = cols.len();
    cols.extend(kernel.iter().cloned());
    let joint = Matrix::from_columns(len, &cols);
    let (_, pivots) = joint.rref();
    let reps: Vec<Vec<Scalar>> = pivots.iter().filter(|&&p| p >= image_cols).map(|&p| cols[p].clone()).collect();
    let mut sys_cols: Vec<Vec<Scalar>> = cols[..image_cols].to_vec();
    sys_cols.extend(reps.iter().cloned());
    let system = Matrix::from_columns(len, &sys_cols);
    let mut h = LieCohomology {
        q,
        dim: reps.len(),
        rep,
        representatives: Vec::new(),
        basis,
        system,
        image_cols,
        next_diff,
        n,
    };
    h.representatives = reps.iter().map(|v| h.from_vector(v)).collect();
    Ok(h)
}
