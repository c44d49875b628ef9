//! The Čech–de Rham bicomplex `C^{p,q} = Π_{i_0<…<i_p} Ω^q_TLA(U_{i_0…i_p}, g)`.
//!
//! Each simplex is expressed in the trivialization of its smallest chart,
//! and restriction from a face `τ` to `σ` is `α̂^{σ_0}_{τ_0}`. The
//! differential is `(δω)_σ = Σ_t (−1)^t ω_{σ∖σ_t}|_σ`.
//!
//! The partition of unity is formal: `rho_k` are polynomial symbols. On a
//! simplex `σ`, `rho_k = 0` unless `σ ∪ {k}` is listed, and the largest
//! supported `rho` is eliminated through `Σ rho_k = 1`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::blade;
use crate::ce::{lie_algebra_cohomology, CeElement, LieCohomology, Rep};
use crate::error::{Error, Result};
use crate::gluing::{apply_alpha_hat, sorted, GlobalForm, GluingData, Simplex};
use crate::linalg::Matrix;
use crate::poly::{Monomial, Poly, Var};
use crate::scalar::Scalar;
use crate::tla::{evaluate_at_center, poincare_homotopy, TlaForm, ValueKind};

/// A `p`-cochain; missing simplices carry the zero form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechCochain {
    pub p: usize,
    pub kind: ValueKind,
    pub components: BTreeMap<Simplex, TlaForm>,
}

impl CechCochain {
    pub fn zero(p: usize, kind: ValueKind) -> Self {
        CechCochain { p, kind, components: BTreeMap::new() }
    }

    pub fn component(&self, gd: &GluingData, s: &[usize]) -> TlaForm {
        self.components.get(s).cloned().unwrap_or_else(|| TlaForm::zero(gd.m(), gd.n(), self.kind))
    }

    /// `ω_s` for an arbitrary ordering of `s`, using antisymmetry.
    pub fn get_ordered(&self, gd: &GluingData, s: &[usize]) -> TlaForm {
        let idx: Vec<u32> = s.iter().map(|&i| i as u32).collect();
        match blade::sort_sign(&idx) {
            None => TlaForm::zero(gd.m(), gd.n(), self.kind),
            Some(sign) => {
                let w = self.component(gd, &sorted(s));
                if sign > 0 { w } else { w.neg() }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(TlaForm::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Simplex, &TlaForm) -> Result<TlaForm>) -> Result<CechCochain> {
        let mut components = BTreeMap::new();
        for (s, w) in &self.components {
            let r = f(s, w)?;
            if !r.is_zero() {
                components.insert(s.clone(), r);
            }
        }
        Ok(CechCochain { p: self.p, kind: self.kind, components })
    }

    fn normalized(mut self) -> Self {
        self.components.retain(|_, w| !w.is_zero());
        self
    }
}

/// Equality as cochains, comparing components after reducing the formal
/// partition of unity on each simplex.
pub fn cochains_equal(gd: &GluingData, a: &CechCochain, b: &CechCochain) -> bool {
    if a.p != b.p {
        return false;
    }
    gd.nerve.simplices(a.p).iter().all(|s| {
        let d = a.component(gd, s).sub(&b.component(gd, s));
        reduce_rho(gd, s, &d).is_zero()
    })
}

/// Restriction of a form on face `tau` to the simplex `sigma ⊇ tau`.
pub fn restrict(gd: &GluingData, tau: &[usize], sigma: &[usize], w: &TlaForm) -> Result<TlaForm> {
    let r = apply_alpha_hat(gd, sigma[0], tau[0], w)?;
    Ok(reduce_rho(gd, sigma, &r))
}

fn check_simplex(gd: &GluingData, s: &[usize]) -> Result<()> {
    if gd.nerve.contains(s) {
        Ok(())
    } else {
        Err(Error::NotSimplex(s.to_vec()))
    }
}

pub fn cech_delta(gd: &GluingData, c: &CechCochain) -> Result<CechCochain> {
    for s in c.components.keys() {
        check_simplex(gd, s)?;
    }
    let mut out = CechCochain::zero(c.p + 1, c.kind);
    for sigma in gd.nerve.simplices(c.p + 1) {
        let mut acc = TlaForm::zero(gd.m(), gd.n(), c.kind);
        for t in 0..sigma.len() {
            let mut face = sigma.clone();
            face.remove(t);
            let Some(w) = c.components.get(&face) else { continue };
            let r = restrict(gd, &face, &sigma, w)?;
            acc = if t % 2 == 0 { acc.add(&r) } else { acc.sub(&r) };
        }
        out.components.insert(sigma, acc);
    }
    Ok(out.normalized())
}

/// Chartwise `ĥd`.
pub fn cochain_total_diff(gd: &GluingData, c: &CechCochain) -> Result<CechCochain> {
    c.map(|_, w| w.total_diff(&gd.algebra))
}

/// Charts `k` whose `rho_k` survives on `sigma`.
pub fn rho_support(gd: &GluingData, sigma: &[usize]) -> Vec<usize> {
    (0..gd.nerve.num_charts())
        .filter(|&k| {
            let mut s = sigma.to_vec();
            if !s.contains(&k) {
                s.push(k);
                s.sort_unstable();
            }
            gd.nerve.contains(&s)
        })
        .collect()
}

/// Normal form of the coefficients in the partition-of-unity ring of `sigma`.
pub fn reduce_rho(gd: &GluingData, sigma: &[usize], w: &TlaForm) -> TlaForm {
    if !w.has_rho() {
        return w.clone();
    }
    let supp = rho_support(gd, sigma);
    let last = *supp.last().expect("a simplex supports its own charts");
    let mut rest = Poly::one();
    for &k in &supp {
        if k != last {
            rest = &rest - &Poly::rho(k);
        }
    }
    w.map_coeffs(|c| {
        let mut out = Poly::zero();
        for (mono, coeff) in c.terms() {
            if mono.pairs().iter().any(|(v, _)| matches!(v, Var::Rho(k) if !supp.contains(&(*k as usize)))) {
                continue;
            }
            out.add_term(mono.clone(), coeff.clone());
        }
        out.substitute(Var::Rho(last as u8), &rest)
    })
}

/// A primitive of a Čech cocycle: a cochain one degree lower, or a global
/// form when the cocycle has degree 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Primitive {
    Global(GlobalForm),
    Cochain(CechCochain),
}

/// `τ_σ = Σ_k rho_k ω_{kσ}|_σ`, with unlisted `kσ` dropped. Then `δτ = c`
/// in the formal partition-of-unity ring.
pub fn delta_homotopy(gd: &GluingData, c: &CechCochain) -> Result<Primitive> {
    let dc = cech_delta(gd, c)?;
    if let Some(s) = dc.components.keys().find(|s| !reduce_rho(gd, s, &dc.components[*s]).is_zero()) {
        return Err(Error::NotClosed(s.clone()));
    }
    if c.p == 0 {
        return assemble_global(gd, c).map(Primitive::Global);
    }
    let mut out = CechCochain::zero(c.p - 1, c.kind);
    for sigma in gd.nerve.simplices(c.p - 1) {
        let mut acc = TlaForm::zero(gd.m(), gd.n(), c.kind);
        for k in 0..gd.nerve.num_charts() {
            if sigma.contains(&k) {
                continue;
            }
            let mut ext = alloc::vec![k];
            ext.extend_from_slice(&sigma);
            let ks = sorted(&ext);
            if !gd.nerve.contains(&ks) {
                continue;
            }
            let w = c.get_ordered(gd, &ext);
            if w.is_zero() {
                continue;
            }
            let moved = apply_alpha_hat(gd, sigma[0], ks[0], &w)?;
            acc = acc.add(&moved.mul_poly(&Poly::rho(k)));
        }
        out.components.insert(sigma.clone(), reduce_rho(gd, &sigma, &acc));
    }
    Ok(Primitive::Cochain(out.normalized()))
}

/// The `p = −1` map: a global form as a 0-cochain.
pub fn trivialize(gf: &GlobalForm) -> Result<CechCochain> {
    let kind = gf.locals.values().next().map_or(ValueKind::Scalar, TlaForm::kind);
    let components = gf.locals.iter().map(|(&i, w)| (alloc::vec![i], w.clone())).collect();
    Ok(CechCochain { p: 0, kind, components }.normalized())
}

/// A 0-cochain with `δ = 0` as a global form.
pub fn assemble_global(gd: &GluingData, c: &CechCochain) -> Result<GlobalForm> {
    if c.p != 0 {
        return Err(Error::Invalid(format!("expected a 0-cochain, got degree {}", c.p)));
    }
    let dc = cech_delta(gd, c)?;
    if let Some(s) = dc.components.keys().next() {
        return Err(Error::NotClosed(s.clone()));
    }
    let locals = (0..gd.nerve.num_charts()).map(|i| (i, c.component(gd, &[i]))).collect();
    Ok(GlobalForm::new(locals))
}

/// One page: `(p, q) ↦ dim`, with short descriptions of basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralPage {
    pub r: usize,
    pub dims: BTreeMap<(usize, usize), usize>,
    pub basis: BTreeMap<(usize, usize), Vec<String>>,
}

impl SpectralPage {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }
}

fn value_rep(kind: ValueKind) -> Rep {
    match kind {
        ValueKind::Scalar => Rep::TrivialScalar,
        ValueKind::Algebra => Rep::Adjoint,
    }
}

/// `E_1^{p,q} = Π_σ H^q(g; V)`. By the algebraic Poincaré lemma each
/// intersection has the cohomology of the dx-free constant complex
/// `(Λ g* ⊗ V, s′)`, which is what is computed here.
pub fn e1_page(gd: &GluingData, kind: ValueKind) -> Result<SpectralPage> {
    let n = gd.n();
    let rep = value_rep(kind);
    let mut dims = BTreeMap::new();
    let mut basis = BTreeMap::new();
    for q in 0..=n {
        let h = lie_algebra_cohomology(&gd.algebra, rep, q)?;
        for p in 0..=gd.nerve.max_dim() {
            let simplices = gd.nerve.simplices(p);
            dims.insert((p, q), simplices.len() * h.dim);
            let reps = rep_names(gd.m(), &h);
            let mut names = Vec::new();
            for s in &simplices {
                for r in &reps {
                    names.push(format!("{s:?} ({r})"));
                }
            }
            basis.insert((p, q), names);
        }
    }
    Ok(SpectralPage { r: 1, dims, basis })
}

fn rep_names(m: usize, h: &LieCohomology) -> Vec<String> {
    h.representatives.iter().map(|x| format!("{}", ce_to_form(m, x))).collect()
}

/// `c_0 σ_0 (rep) + …` for a vector of `E_1^{p,q}` in the simplex-major basis.
fn describe(simplices: &[Simplex], reps: &[String], v: &[Scalar]) -> String {
    let d = reps.len();
    let mut parts = Vec::new();
    for (k, c) in v.iter().enumerate() {
        if !c.is_zero() {
            parts.push(format!("({c}) {:?} ({})", simplices[k / d], reps[k % d]));
        }
    }
    parts.join(" + ")
}

/// An element of `Λ g* ⊗ V` as a dx-free constant form.
pub fn ce_to_form(m: usize, x: &CeElement) -> TlaForm {
    let kind = match x.rep() {
        Rep::TrivialScalar => ValueKind::Scalar,
        Rep::Adjoint => ValueKind::Algebra,
    };
    let terms = x.terms().iter().map(|(&(k, v), c)| ((k << m, v), Poly::constant(c.clone()))).collect();
    TlaForm::from_terms(m, x.dim(), kind, terms)
}

/// The dx-free part of a form with constant coefficients, as a CE element.
pub fn form_to_ce(w: &TlaForm, rep: Rep) -> Result<CeElement> {
    let m = w.m();
    let mut terms = BTreeMap::new();
    for (&(k, v), c) in w.terms() {
        if k & w.dx_mask() != 0 {
            continue;
        }
        let c = c.as_constant().ok_or_else(|| Error::Invalid("coefficient is not constant".into()))?;
        terms.insert((k >> m, v), c);
    }
    Ok(CeElement::from_terms(w.n(), rep, terms))
}

/// Class of `α̂^i_j` applied to a representative, evaluated at `point` with
/// dx legs dropped. Errors if the representative is not a cocycle.
pub fn restrict_representative(
    gd: &GluingData,
    i: usize,
    j: usize,
    point: &[Scalar],
    h: &LieCohomology,
    rep: &CeElement,
) -> Result<Vec<Scalar>> {
    h.project(rep)?;
    let w = ce_to_form(gd.m(), rep);
    let moved = evaluate_at_center(&apply_alpha_hat(gd, i, j, &w)?, point);
    h.project(&form_to_ce(&moved, h.rep)?)
}

/// Induced map on classes; `class` are coordinates with respect to `h.representatives`.
pub fn induced_restriction(
    gd: &GluingData,
    i: usize,
    j: usize,
    point: &[Scalar],
    h: &LieCohomology,
    class: &[Scalar],
) -> Result<Vec<Scalar>> {
    restrict_representative(gd, i, j, point, h, &h.lift(class))
}

/// Matrix of [`induced_restriction`] (column `r` is the image of class `r`).
pub fn induced_matrix(gd: &GluingData, i: usize, j: usize, point: &[Scalar], h: &LieCohomology) -> Result<Matrix<Scalar>> {
    let mut cols = Vec::new();
    for r in 0..h.dim {
        let mut e = alloc::vec![Scalar::zero(); h.dim];
        e[r] = Scalar::one();
        cols.push(induced_restriction(gd, i, j, point, h, &e)?);
    }
    Ok(Matrix::from_columns(h.dim, &cols))
}

/// Matrix of the induced `δ : E_1^{p,q} → E_1^{p+1,q}`.
pub fn e1_differential(gd: &GluingData, h: &LieCohomology, p: usize) -> Result<Matrix<Scalar>> {
    let src = gd.nerve.simplices(p);
    let dst = gd.nerve.simplices(p + 1);
    let d = h.dim;
    let mut m = Matrix::zeros(dst.len() * d, src.len() * d);
    for (row, sigma) in dst.iter().enumerate() {
        let point = gd.nerve.sample_point(sigma);
        for t in 0..sigma.len() {
            let mut face = sigma.clone();
            face.remove(t);
            let col = src.iter().position(|s| *s == face).expect("faces are listed");
            let block = induced_matrix(gd, sigma[0], face[0], &point, h)?;
            for (r, c, v) in block.nonzero() {
                let v = if t % 2 == 0 { v.clone() } else { -v };
                m.set(row * d + r, col * d + c, v);
            }
        }
    }
    Ok(m)
}

/// `E_2^{p,q} = H^p(E_1^{·,q}, δ)` by rank computation.
pub fn e2_page(gd: &GluingData, kind: ValueKind) -> Result<SpectralPage> {
    let n = gd.n();
    let rep = value_rep(kind);
    let top = gd.nerve.max_dim();
    let mut dims = BTreeMap::new();
    let mut basis = BTreeMap::new();
    for q in 0..=n {
        let h = lie_algebra_cohomology(&gd.algebra, rep, q)?;
        let reps = rep_names(gd.m(), &h);
        let diffs: Vec<Matrix<Scalar>> = (0..=top).map(|p| e1_differential(gd, &h, p)).collect::<Result<_>>()?;
        for p in 0..=top {
            let simplices = gd.nerve.simplices(p);
            let size = simplices.len() * h.dim;
            // kernel of d_p, completed against the image of d_{p-1} by pivot columns
            let kernel = if diffs[p].rows() == 0 {
                (0..size)
                    .map(|k| (0..size).map(|r| if r == k { Scalar::one() } else { Scalar::zero() }).collect())
                    .collect()
            } else {
                diffs[p].kernel()
            };
            let mut cols: Vec<Vec<Scalar>> = Vec::new();
            if p > 0 {
                let prev = &diffs[p - 1];
                cols.extend((0..prev.cols()).map(|c| (0..prev.rows()).map(|r| prev.get(r, c).clone()).collect()));
            }
            let image_cols = cols.len();
            cols.extend(kernel.iter().cloned());
            let names: Vec<String> = if size == 0 {
                Vec::new()
            } else {
                let (_, pivots) = Matrix::from_columns(size, &cols).rref();
                pivots.iter().filter(|&&c| c >= image_cols).map(|&c| describe(&simplices, &reps, &cols[c])).collect()
            };
            dims.insert((p, q), names.len());
            basis.insert((p, q), names);
        }
    }
    Ok(SpectralPage { r: 2, dims, basis })
}

/// Simplicial cohomology of the nerve with rational coefficients.
pub fn nerve_cohomology(gd_nerve: &crate::gluing::Nerve) -> Vec<usize> {
    let top = gd_nerve.max_dim();
    let mut ranks = Vec::new();
    for p in 0..=top {
        let src = gd_nerve.simplices(p);
        let dst = gd_nerve.simplices(p + 1);
        let m = Matrix::from_fn(dst.len(), src.len(), |r, c| {
            let (sigma, tau) = (&dst[r], &src[c]);
            match (0..sigma.len()).find(|&t| {
                let mut f = sigma.clone();
                f.remove(t);
                f == *tau
            }) {
                Some(t) if t % 2 == 0 => Scalar::one(),
                Some(_) => Scalar::from_int(-1),
                None => Scalar::zero(),
            }
        });
        ranks.push(if m.rows() == 0 || m.cols() == 0 { 0 } else { m.rank() });
    }
    (0..=top)
        .map(|p| gd_nerve.simplices(p).len() - ranks[p] - if p == 0 { 0 } else { ranks[p - 1] })
        .collect()
}

/// De Rham cohomology of a polynomial chart, witnessed by the Poincaré
/// homotopy: `dK + Kd = id − ev` is checked on every `x^β dx^I` with
/// `|β| ≤ max_deg`, so closed forms of positive degree are exact and closed
/// functions are constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartCohomology {
    pub dims: Vec<usize>,
    pub checked: usize,
}

pub fn chart_de_rham_cohomology(m: usize, qmax: usize, max_deg: u32) -> Result<ChartCohomology> {
    let center = alloc::vec![Scalar::zero(); m];
    let mut checked = 0;
    let monomials = monomials_up_to(m, max_deg);
    for q in 0..=qmax.min(m) {
        for i in blade::subsets(blade::range(0, m as u32), q) {
            for mono in &monomials {
                let mut w = TlaForm::zero(m, 0, ValueKind::Scalar);
                w = w.add(&TlaForm::from_terms(m, 0, ValueKind::Scalar, BTreeMap::from([((i, 0), Poly::monomial(mono.clone(), Scalar::one()))])));
                let lhs = poincare_homotopy(&w, &center).de_rham_d().add(&poincare_homotopy(&w.de_rham_d(), &center));
                let rhs = w.sub(&evaluate_at_center(&w, &center));
                if lhs != rhs {
                    return Err(Error::Invalid(format!("homotopy identity fails on {w}")));
                }
                checked += 1;
            }
        }
    }
    let dims = (0..=qmax).map(|q| usize::from(q == 0)).collect();
    Ok(ChartCohomology { dims, checked })
}

fn monomials_up_to(m: usize, d: u32) -> Vec<Monomial> {
    let mut out = alloc::vec![Monomial::one()];
    let mut frontier = alloc::vec![Monomial::one()];
    for _ in 0..d {
        let mut next = Vec::new();
        for mono in &frontier {
            let last = mono.pairs().last().map_or(0, |(v, _)| match v {
                Var::X(mu) => *mu as usize,
                Var::Rho(_) => 0,
            });
            for mu in last..m {
                next.push(mono.mul(&Monomial::var(Var::X(mu as u8), 1)));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::Nerve;
    use crate::lie::LieAlgebra;
    use alloc::vec;

    #[test]
    fn delta_of_constants() {
        let gd = GluingData::trivial(Nerve::full(1, 2), LieAlgebra::abelian(1));
        let one = TlaForm::one(1, 1);
        let c = CechCochain {
            p: 0,
            kind: ValueKind::Scalar,
            components: BTreeMap::from([(vec![0], one.clone()), (vec![1], one)]),
        };
        assert!(cech_delta(&gd, &c).unwrap().is_zero());
    }

    #[test]
    fn two_chart_homotopy() {
        // c_01 = κ: τ_0 = −rho_1 κ = (rho_0 − 1) κ, τ_1 = rho_0 κ
        let gd = GluingData::trivial(Nerve::full(1, 2), LieAlgebra::abelian(1));
        let kappa = TlaForm::function(1, 1, Poly::from_int(5));
        let c = CechCochain { p: 1, kind: ValueKind::Scalar, components: BTreeMap::from([(vec![0, 1], kappa.clone())]) };
        let Primitive::Cochain(tau) = delta_homotopy(&gd, &c).unwrap() else { panic!() };
        assert_eq!(tau.components[&vec![0]], kappa.mul_poly(&(&Poly::rho(0) - &Poly::one())));
        assert_eq!(tau.components[&vec![1]], kappa.mul_poly(&Poly::rho(0)));
        assert!(cochains_equal(&gd, &cech_delta(&gd, &tau).unwrap(), &c));
    }

    #[test]
    fn circle_pages() {
        let gd = GluingData::trivial(Nerve::circle(), LieAlgebra::abelian(1));
        let e1 = e1_page(&gd, ValueKind::Algebra).unwrap();
        assert_eq!((e1.dim(0, 0), e1.dim(0, 1), e1.dim(1, 0), e1.dim(1, 1)), (3, 3, 3, 3));
        let e2 = e2_page(&gd, ValueKind::Algebra).unwrap();
        for p in 0..2 {
            for q in 0..2 {
                assert_eq!(e2.dim(p, q), 1);
            }
        }
        assert_eq!(nerve_cohomology(&gd.nerve), vec![1, 1]);
    }

    #[test]
    fn chart_cohomology() {
        assert_eq!(chart_de_rham_cohomology(1, 1, 3).unwrap().dims, vec![1, 0]);
        assert_eq!(chart_de_rham_cohomology(2, 2, 2).unwrap().dims, vec![1, 0, 0]);
    }
}
