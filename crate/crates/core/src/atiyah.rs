//! Gluing generated by matrix-valued transitions `g_ij`, inner metrics from
//! invariant forms, and the endomorphism model over `M_p`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gluing::{global_inner_integrate, GlobalForm, GluingData, Nerve};
use crate::lie::LieAlgebra;
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::tla::{InnerMetricLocal, TlaForm, TlaSection, ValueKind};

/// `g_ij` together with a supplied inverse, for both orientations of every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionFamily {
    pub nerve: Nerve,
    p: usize,
    g: BTreeMap<(usize, usize), (Matrix<Poly>, Matrix<Poly>)>,
}

impl TransitionFamily {
    /// `forward` holds `(g_ij, g_ij^{-1})` for `i < j`; the reverse
    /// orientation is the swapped pair. Checks inverses and the cocycle.
    pub fn new(nerve: Nerve, p: usize, forward: BTreeMap<(usize, usize), (Matrix<Poly>, Matrix<Poly>)>) -> Result<Self> {
        let tf = TransitionFamily::new_unchecked(nerve, p, forward)?;
        tf.check_inverses()?;
        tf.check_cocycle()?;
        Ok(tf)
    }

    /// Only shapes and edge coverage are checked.
    pub fn new_unchecked(nerve: Nerve, p: usize, forward: BTreeMap<(usize, usize), (Matrix<Poly>, Matrix<Poly>)>) -> Result<Self> {
        let mut g = BTreeMap::new();
        for ((i, j), (a, b)) in forward {
            if i >= j {
                return Err(Error::Invalid(format!("transition keys need i < j, got ({i}, {j})")));
            }
            if !nerve.contains(&[i, j]) {
                return Err(Error::NotSimplex(alloc::vec![i, j]));
            }
            for mat in [&a, &b] {
                if mat.rows() != p || mat.cols() != p {
                    return Err(Error::DimensionMismatch { expected: p, got: mat.rows() });
                }
            }
            g.insert((j, i), (b.clone(), a.clone()));
            g.insert((i, j), (a, b));
        }
        for e in nerve.simplices(1) {
            if !g.contains_key(&(e[0], e[1])) {
                return Err(Error::Invalid(format!("missing transition for {e:?}")));
            }
        }
        Ok(TransitionFamily { nerve, p, g })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `(g_ij, g_ij^{-1})`; identities for `i == j`.
    pub fn get(&self, i: usize, j: usize) -> Result<(Matrix<Poly>, Matrix<Poly>)> {
        if i == j {
            return Ok((Matrix::identity(self.p), Matrix::identity(self.p)));
        }
        self.g.get(&(i, j)).cloned().ok_or_else(|| Error::NotSimplex(crate::gluing::sorted(&[i, j])))
    }

    pub fn set(&mut self, i: usize, j: usize, g: Matrix<Poly>, ginv: Matrix<Poly>) {
        self.g.insert((j, i), (ginv.clone(), g.clone()));
        self.g.insert((i, j), (g, ginv));
    }

    pub fn check_inverses(&self) -> Result<()> {
        let id = Matrix::identity(self.p);
        for (&(i, j), (g, ginv)) in &self.g {
            if g.mul(ginv) != id || ginv.mul(g) != id {
                return Err(Error::BadInverse(i, j));
            }
        }
        Ok(())
    }

    /// `g_ik = g_ij g_jk` on every listed 2-simplex.
    pub fn check_cocycle(&self) -> Result<()> {
        for t in self.nerve.simplices(2) {
            let (i, j, k) = (t[0], t[1], t[2]);
            if self.get(i, k)?.0 != self.get(i, j)?.0.mul(&self.get(j, k)?.0) {
                return Err(Error::Invalid(format!("transition cocycle fails on {t:?}")));
            }
        }
        Ok(())
    }
}

/// A Lie algebra realized by `p × p` matrices `B_a` with `[B_a, B_b] = C^c_{ab} B_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixRealization {
    pub algebra: LieAlgebra,
    p: usize,
    basis: Vec<Matrix<Scalar>>,
    /// Left inverse of the `p² × n` matrix whose columns are `vec(B_a)`.
    coords: Matrix<Scalar>,
}

impl MatrixRealization {
    pub fn new(algebra: LieAlgebra, basis: Vec<Matrix<Scalar>>) -> Result<Self> {
        let n = algebra.dim();
        if basis.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: basis.len() });
        }
        let p = basis.first().map_or(0, Matrix::rows);
        let cols: Vec<Vec<Scalar>> = basis.iter().map(|b| b.to_rows().concat()).collect();
        let big = Matrix::from_columns(p * p, &cols);
        let gram = big.transpose().mul(&big);
        let coords = gram
            .inverse()
            .ok_or_else(|| Error::Degenerate("matrix basis is linearly dependent".into()))?
            .mul(&big.transpose());
        for a in 0..n {
            for b in 0..n {
                let comm = basis[a].mul(&basis[b]).sub(&basis[b].mul(&basis[a]));
                let mut expect = Matrix::zeros(p, p);
                for (c, bc) in basis.iter().enumerate() {
                    expect = expect.add(&bc.scale(algebra.structure(a, b, c)));
                }
                if comm != expect {
                    return Err(Error::NotLieAlgebra(format!("matrix commutator of basis {a}, {b}")));
                }
            }
        }
        Ok(MatrixRealization { algebra, p, basis, coords })
    }

    /// `M_p` with the elementary matrices.
    pub fn gl(p: usize) -> Self {
        let basis = (0..p * p)
            .map(|x| Matrix::from_fn(p, p, |r, c| if r == x / p && c == x % p { Scalar::one() } else { Scalar::zero() }))
            .collect();
        MatrixRealization::new(LieAlgebra::gl(p), basis).expect("gl")
    }

    /// `sl2` with `H = diag(1, −1)`, `E = E_12`, `F = E_21`.
    pub fn sl2() -> Self {
        let m = |rows: [[i64; 2]; 2]| Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect());
        MatrixRealization::new(LieAlgebra::sl2(), alloc::vec![m([[1, 0], [0, -1]]), m([[0, 1], [0, 0]]), m([[0, 0], [1, 0]])])
            .expect("sl2")
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn basis(&self) -> &[Matrix<Scalar>] {
        &self.basis
    }

    /// Coordinates of a polynomial matrix; errors if it leaves the span.
    pub fn coordinates(&self, m: &Matrix<Poly>) -> Result<Vec<Poly>> {
        let v: Vec<Poly> = m.to_rows().concat();
        let out: Vec<Poly> = (0..self.algebra.dim())
            .map(|a| {
                let mut acc = Poly::zero();
                for (k, vk) in v.iter().enumerate() {
                    let c = self.coords.get(a, k);
                    if !c.is_zero() && !vk.is_zero() {
                        acc = &acc + &vk.scale(c);
                    }
                }
                acc
            })
            .collect();
        if self.matrix_of(&out) != *m {
            return Err(Error::Invalid("matrix is outside the realized algebra".into()));
        }
        Ok(out)
    }

    pub fn matrix_of(&self, v: &[Poly]) -> Matrix<Poly> {
        let mut acc = Matrix::zeros(self.p, self.p);
        for (b, vb) in self.basis.iter().zip(v) {
            if !vb.is_zero() {
                acc = acc.add(&b.to_poly().map(|e| e * vb));
            }
        }
        acc
    }

    /// `tr(B_a)` for each basis element.
    pub fn trace_functional(&self) -> Vec<Scalar> {
        self.basis
            .iter()
            .map(|b| (0..self.p).fold(Scalar::zero(), |acc, i| &acc + b.get(i, i)))
            .collect()
    }
}

/// `G^i_j = Ad_{g_ij}` and `χ_ij = Σ_mu g_ij ∂_mu(g_ij^{-1}) dx^mu`, in the
/// basis of `real`. Inverses are checked; the transition cocycle is not, so
/// that a broken family shows up in `verify_cocycles`.
pub fn atiyah_gluing(tf: &TransitionFamily, real: &MatrixRealization) -> Result<GluingData> {
    if tf.p != real.p {
        return Err(Error::DimensionMismatch { expected: real.p, got: tf.p });
    }
    tf.check_inverses()?;
    let m = tf.nerve.m();
    let n = real.algebra.dim();
    let mut alpha = BTreeMap::new();
    let mut chi = BTreeMap::new();
    for (&(i, j), (g, ginv)) in &tf.g {
        let mut cols = Vec::new();
        for b in &real.basis {
            cols.push(real.coordinates(&g.mul(&b.to_poly()).mul(ginv))?);
        }
        alpha.insert((i, j), Matrix::from_fn(n, n, |r, c| cols[c][r].clone()));
        let mut chi_cols = Vec::new();
        for mu in 0..m {
            chi_cols.push(real.coordinates(&g.mul(&ginv.derivative(mu)))?);
        }
        chi.insert((i, j), Matrix::from_fn(n, m, |r, c| chi_cols[c][r].clone()));
    }
    GluingData::new(tf.nerve.clone(), real.algebra.clone(), alpha, chi)
}

/// The Killing form on every chart. Errors if it is degenerate.
pub fn killing_inner_metric(gd: &GluingData) -> Result<BTreeMap<usize, InnerMetricLocal>> {
    killing_inner_metric_scaled(gd, &Scalar::one())
}

/// `c · k` on every chart. A square factor can make `|det|` a rational square
/// (for `sl2`, `c = 1/2` gives `det = −16`).
pub fn killing_inner_metric_scaled(gd: &GluingData, c: &Scalar) -> Result<BTreeMap<usize, InnerMetricLocal>> {
    let k = gd.algebra.killing_form().scale(c);
    let h = InnerMetricLocal::new(k)?;
    if !h.is_nondegenerate() {
        return Err(Error::Degenerate(format!("Killing form of {}", gd.algebra.name())));
    }
    Ok((0..gd.nerve.num_charts()).map(|i| (i, h.clone())).collect())
}

/// `tr(E_ab E_cd) = δ_bc δ_ad` on `M_p`.
pub fn trace_inner_metric(p: usize) -> InnerMetricLocal {
    let h = Matrix::from_fn(p * p, p * p, |x, y| {
        let (a, b, c, d) = (x / p, x % p, y / p, y % p);
        if b == c && a == d { Scalar::one() } else { Scalar::zero() }
    });
    InnerMetricLocal::new(h).expect("symmetric")
}

/// Scalar form `Σ_a t_a ω^a` for an algebra-valued `ω`.
pub fn apply_functional(w: &TlaForm, t: &[Scalar]) -> Result<TlaForm> {
    if w.kind() != ValueKind::Algebra {
        return Err(Error::ScalarValued);
    }
    let mut terms = BTreeMap::new();
    for (&(k, v), c) in w.terms() {
        if t[v].is_zero() {
            continue;
        }
        let e: &mut Poly = terms.entry((k, 0)).or_insert_with(Poly::zero);
        *e = &*e + &c.scale(&t[v]);
    }
    terms.retain(|_, c: &mut Poly| !c.is_zero());
    Ok(TlaForm::from_terms(w.m(), w.n(), ValueKind::Scalar, terms))
}

/// `tr ∘ ∫_inner`, chartwise. The results are plain scalar forms that agree
/// on overlaps.
pub fn inner_integrate_trace(
    gd: &GluingData,
    real: &MatrixRealization,
    gf: &GlobalForm,
    h: &BTreeMap<usize, InnerMetricLocal>,
) -> Result<GlobalForm> {
    let tr = real.trace_functional();
    global_inner_integrate(gd, gf, h)?.map(|_, w| apply_functional(w, &tr))
}

/// `X ⊕ γ ↦ X ⊕ tr γ`, landing in the abelian algebra of dimension 1.
pub fn det_projection(real: &MatrixRealization, s: &TlaSection) -> TlaSection {
    let tr = real.trace_functional();
    let mut lambda = Poly::zero();
    for (g, t) in s.gamma.iter().zip(&tr) {
        if !t.is_zero() {
            lambda = &lambda + &g.scale(t);
        }
    }
    TlaSection::new(s.x.clone(), alloc::vec![lambda])
}

/// `γ = (λ/p) 1_p + γ₀` with `λ = tr γ` and `tr γ₀ = 0`.
pub fn sl_splitting(real: &MatrixRealization, s: &TlaSection) -> Result<(Poly, TlaSection)> {
    let lambda = det_projection(real, s).gamma.remove(0);
    let unit = real.coordinates(&Matrix::identity(real.p))?;
    let share = lambda.scale(&Scalar::from_int(real.p as i64).inv().expect("p > 0"));
    let gamma0 = s.gamma.iter().zip(&unit).map(|(g, u)| g - &(u * &share)).collect();
    Ok((lambda, TlaSection::new(s.x.clone(), gamma0)))
}
