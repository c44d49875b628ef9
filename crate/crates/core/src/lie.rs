//! Finite-dimensional Lie algebras given by structure constants.
//!
//! `C^c_{ab}` is the coefficient of `E_c` in `[E_a, E_b]`. Indices are 0-based.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    names: Vec<String>,
    c: Vec<Scalar>,
}

impl LieAlgebra {
    /// Builds an algebra from the nonzero constants `(a, b, c, C^c_{ab})`
    /// with `a < b`; the `b > a` half is filled in by antisymmetry.
    pub fn new(name: &str, dim: usize, brackets: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        let mut c = alloc::vec![Scalar::zero(); dim * dim * dim];
        for (a, b, k, v) in brackets {
            if *a >= dim || *b >= dim || *k >= dim {
                return Err(Error::Invalid(format!("bracket index out of range in ({a},{b},{k})")));
            }
            if a >= b {
                return Err(Error::Invalid(format!("bracket ({a},{b}) must have a < b")));
            }
            c[(a * dim + b) * dim + k] = v.clone();
            c[(b * dim + a) * dim + k] = -v;
        }
        let names = (0..dim).map(|i| format!("E{}", i + 1)).collect();
        let alg = LieAlgebra { name: name.into(), dim, names, c };
        alg.check_jacobi()?;
        Ok(alg)
    }

    pub fn with_basis_names(mut self, names: &[&str]) -> Self {
        assert_eq!(names.len(), self.dim);
        self.names = names.iter().map(|s| String::from(*s)).collect();
        self
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra::new(&format!("abelian{dim}"), dim, &[]).expect("abelian")
    }

    /// Basis `(H, E, F)` with `[H,E] = 2E`, `[H,F] = -2F`, `[E,F] = H`.
    pub fn sl2() -> Self {
        let i = Scalar::from_int;
        LieAlgebra::new("sl2", 3, &[(0, 1, 1, i(2)), (0, 2, 2, i(-2)), (1, 2, 0, i(1))])
            .expect("sl2")
            .with_basis_names(&["H", "E", "F"])
    }

    /// `[e1, e2] = e3`.
    pub fn heis3() -> Self {
        LieAlgebra::new("heis3", 3, &[(0, 1, 2, Scalar::one())]).expect("heis3")
    }

    /// `[e1, e2] = e1`; not unimodular.
    pub fn aff1() -> Self {
        LieAlgebra::new("aff1", 2, &[(0, 1, 0, Scalar::one())]).expect("aff1")
    }

    /// `M_p` with the commutator, basis `E_{ab}` at index `a*p + b`.
    pub fn gl(p: usize) -> Self {
        let n = p * p;
        let mut br = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                let (a, b) = (x / p, x % p);
                let (c, d) = (y / p, y % p);
                // [E_ab, E_cd] = δ_bc E_ad − δ_da E_cb
                let mut out = alloc::vec![Scalar::zero(); n];
                if b == c {
                    out[a * p + d] += &Scalar::one();
                }
                if d == a {
                    out[c * p + b] -= &Scalar::one();
                }
                for (k, v) in out.into_iter().enumerate() {
                    if !v.is_zero() {
                        br.push((x, y, k, v));
                    }
                }
            }
        }
        let names: Vec<String> = (0..n).map(|x| format!("E{}{}", x / p + 1, x % p + 1)).collect();
        let mut alg = LieAlgebra::new(&format!("gl{p}"), n, &br).expect("gl");
        alg.names = names;
        alg
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    /// `C^c_{ab}`.
    pub fn structure(&self, a: usize, b: usize, c: usize) -> &Scalar {
        &self.c[(a * self.dim + b) * self.dim + c]
    }

    /// Nonzero `(a, b, c, C^c_{ab})` with `a < b`.
    pub fn brackets(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let n = self.dim;
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    let v = self.structure(a, b, c);
                    if !v.is_zero() {
                        out.push((a, b, c, v.clone()));
                    }
                }
            }
        }
        out
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = Scalar::zero();
                        for e in 0..n {
                            s += &(self.structure(a, b, e) * self.structure(e, c, d));
                            s += &(self.structure(b, c, e) * self.structure(e, a, d));
                            s += &(self.structure(c, a, e) * self.structure(e, b, d));
                        }
                        if !s.is_zero() {
                            return Err(Error::NotLieAlgebra(format!("Jacobi at ({a},{b},{c};{d})")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn bracket(&self, u: &[Scalar], v: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        Ok(self.bracket_generic(u, v))
    }

    /// Bracket of `g`-vectors with polynomial components.
    pub fn bracket_poly(&self, u: &[Poly], v: &[Poly]) -> Result<Vec<Poly>> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        Ok(self.bracket_generic(u, v))
    }

    fn bracket_generic<T: crate::linalg::Ring + Scale>(&self, u: &[T], v: &[T]) -> Vec<T> {
        let n = self.dim;
        let mut w = alloc::vec![T::zero(); n];
        for a in 0..n {
            if u[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if a == b || v[b].is_zero() {
                    continue;
                }
                let uv = u[a].rmul(&v[b]);
                for (c, wc) in w.iter_mut().enumerate() {
                    let k = self.structure(a, b, c);
                    if !k.is_zero() {
                        *wc = wc.radd(&uv.scale_by(k));
                    }
                }
            }
        }
        w
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got })
        }
    }

    /// Matrix of `ad_{E_a}`: entry `(c, b)` is `C^c_{ab}`.
    pub fn ad(&self, a: usize) -> Matrix<Scalar> {
        Matrix::from_fn(self.dim, self.dim, |c, b| self.structure(a, b, c).clone())
    }

    pub fn killing_form(&self) -> Matrix<Scalar> {
        let n = self.dim;
        let ads: Vec<Matrix<Scalar>> = (0..n).map(|a| self.ad(a)).collect();
        Matrix::from_fn(n, n, |a, b| {
            let prod = ads[a].mul(&ads[b]);
            let mut t = Scalar::zero();
            for i in 0..n {
                t += prod.get(i, i);
            }
            t
        })
    }

    /// `tr ad_{E_a} = sum_b C^b_{ab}`.
    pub fn ad_trace(&self, a: usize) -> Scalar {
        let mut t = Scalar::zero();
        for b in 0..self.dim {
            t += self.structure(a, b, b);
        }
        t
    }

    pub fn is_unimodular(&self) -> bool {
        (0..self.dim).all(|a| self.ad_trace(a).is_zero())
    }

    /// Checks that `G` (column `a` = image of `E_a`) preserves the bracket as a
    /// polynomial identity and that `det G` is invertible: a nonzero constant,
    /// or nonzero at every sample point.
    pub fn check_automorphism(&self, g: &Matrix<Poly>, samples: &[Vec<Scalar>]) -> AutomorphismCheck {
        let n = self.dim;
        if g.rows() != n || g.cols() != n {
            return AutomorphismCheck { bracket_ok: false, det_ok: false, witness: None };
        }
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    let mut lhs = Poly::zero();
                    for e in 0..n {
                        let k = self.structure(a, b, e);
                        if !k.is_zero() {
                            lhs = &lhs + &g.get(c, e).scale(k);
                        }
                    }
                    let mut rhs = Poly::zero();
                    for d in 0..n {
                        if g.get(d, a).is_zero() {
                            continue;
                        }
                        for e in 0..n {
                            let k = self.structure(d, e, c);
                            if k.is_zero() || g.get(e, b).is_zero() {
                                continue;
                            }
                            rhs = &rhs + &(g.get(d, a) * g.get(e, b)).scale(k);
                        }
                    }
                    if lhs != rhs {
                        return AutomorphismCheck { bracket_ok: false, det_ok: false, witness: Some((a, b, c)) };
                    }
                }
            }
        }
        let det = g.det_expand();
        let det_ok = match det.as_constant() {
            Some(c) => !c.is_zero(),
            None => {
                !samples.is_empty()
                    && samples.iter().all(|p| det.eval(p).is_some_and(|v| !v.is_zero()))
            }
        };
        AutomorphismCheck { bracket_ok: true, det_ok, witness: None }
    }

    /// Coordinates of `E_a` as a vector.
    pub fn basis_vector(&self, a: usize) -> Vec<Scalar> {
        let mut v = alloc::vec![Scalar::zero(); self.dim];
        v[a] = Scalar::one();
        v
    }
}

/// Outcome of [`LieAlgebra::check_automorphism`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismCheck {
    pub bracket_ok: bool,
    pub det_ok: bool,
    /// First `(a, b, c)` where the bracket identity fails.
    pub witness: Option<(usize, usize, usize)>,
}

impl AutomorphismCheck {
    pub fn ok(&self) -> bool {
        self.bracket_ok && self.det_ok
    }
}

/// Multiplication by an exact scalar.
pub trait Scale {
    fn scale_by(&self, s: &Scalar) -> Self;
}

impl Scale for Scalar {
    fn scale_by(&self, s: &Scalar) -> Self {
        self * s
    }
}

impl Scale for Poly {
    fn scale_by(&self, s: &Scalar) -> Self {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    #[test]
    fn sl2_bracket_and_killing() {
        let g = LieAlgebra::sl2();
        let w = g.bracket(&g.basis_vector(0), &g.basis_vector(1)).unwrap();
        assert_eq!(w, vec![s(0), s(2), s(0)]);
        let k = g.killing_form();
        assert_eq!(k.get(0, 0), &s(8));
        assert_eq!(k.get(1, 2), &s(4));
        assert_eq!(k.get(0, 1), &s(0));
        assert!(k.is_symmetric());
        assert!(!k.det().is_zero());
    }

    #[test]
    fn heis_and_aff() {
        assert!(LieAlgebra::heis3().killing_form().is_zero());
        let aff = LieAlgebra::aff1();
        assert!(!aff.is_unimodular());
        assert_eq!(aff.ad_trace(1), s(-1));
        assert!(LieAlgebra::sl2().is_unimodular());
        assert!(LieAlgebra::gl(2).is_unimodular());
    }

    #[test]
    fn gl2_commutator() {
        let g = LieAlgebra::gl(2);
        // [E12, E21] = E11 - E22
        let w = g.bracket(&g.basis_vector(1), &g.basis_vector(2)).unwrap();
        assert_eq!(w, vec![s(1), s(0), s(0), s(-1)]);
    }

    #[test]
    fn bad_jacobi_rejected() {
        // [e1,e2]=e3, [e2,e3]=e1, [e1,e3]=e1 is not a Lie algebra
        let r = LieAlgebra::new("bad", 3, &[(0, 1, 2, s(1)), (1, 2, 0, s(1)), (0, 2, 0, s(1))]);
        assert!(matches!(r, Err(Error::NotLieAlgebra(_))));
    }

    #[test]
    fn automorphisms() {
        let g = LieAlgebra::sl2();
        assert!(g.check_automorphism(&Matrix::identity(3), &[]).ok());
        // Ad of diag(t, 1/t): H -> H, E -> t^2 E, F -> t^-2 F
        let t2 = Scalar::frac(9, 4);
        let ad = Matrix::from_rows(vec![
            vec![Poly::one(), Poly::zero(), Poly::zero()],
            vec![Poly::zero(), Poly::constant(t2.clone()), Poly::zero()],
            vec![Poly::zero(), Poly::zero(), Poly::constant(t2.inv().unwrap())],
        ]);
        assert!(g.check_automorphism(&ad, &[]).ok());
        let bad = Matrix::from_rows(vec![
            vec![Poly::from_int(2), Poly::zero(), Poly::zero()],
            vec![Poly::zero(), Poly::one(), Poly::zero()],
            vec![Poly::zero(), Poly::zero(), Poly::one()],
        ]);
        let r = g.check_automorphism(&bad, &[]);
        assert!(!r.ok());
        assert!(r.witness.is_some());
    }
}
