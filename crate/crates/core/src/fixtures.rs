//! Ready-made gluings used by tests, examples and the command line.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::atiyah::{atiyah_gluing, MatrixRealization, TransitionFamily};
use crate::gluing::{GluingData, Nerve};
use crate::lie::LieAlgebra;
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// `α = Id`, `χ = 0` on three mutually overlapping charts.
pub fn trivial(m: usize, algebra: LieAlgebra) -> GluingData {
    GluingData::trivial(Nerve::full(m, 3), algebra)
}

/// Abelian `n = 2` on three charts of dimension 2 with `χ_ij = d f_ij`,
/// `f_01 = x1 x2`, `f_12 = x1² − x2`, `f_02 = f_01 + f_12`.
pub fn abelian_chi() -> GluingData {
    let (x1, x2) = (Poly::x(0), Poly::x(1));
    let f01 = &x1 * &x2;
    let f12 = &(&x1 * &x1) - &x2;
    let f02 = &f01 + &f12;
    let grad = |f: &Poly, w: i64| {
        Matrix::from_fn(2, 2, |a, mu| f.derivative(mu).scale(&Scalar::from_int(if a == 0 { 1 } else { w })))
    };
    let fwd = BTreeMap::from([
        ((0, 1), (Matrix::identity(2), grad(&f01, 2))),
        ((1, 2), (Matrix::identity(2), grad(&f12, 2))),
        ((0, 2), (Matrix::identity(2), grad(&f02, 2))),
    ]);
    GluingData::from_forward(Nerve::full(2, 3), LieAlgebra::abelian(2), fwd).expect("abelian chi")
}

fn diag(a: Scalar, b: Scalar) -> Matrix<Poly> {
    Matrix::from_rows(vec![vec![Poly::constant(a), Poly::zero()], vec![Poly::zero(), Poly::constant(b)]])
}

fn torus(t: i64) -> (Matrix<Poly>, Matrix<Poly>) {
    let s = Scalar::from_int(t);
    let inv = s.inv().expect("nonzero");
    (diag(s.clone(), inv.clone()), diag(inv, s))
}

/// `sl2` glued by constant `Ad(diag(t, 1/t))`, `t = 2, 3, 6` on three charts.
pub fn constant_ad(m: usize) -> GluingData {
    let fwd = BTreeMap::from([((0, 1), torus(2)), ((1, 2), torus(3)), ((0, 2), torus(6))]);
    let tf = TransitionFamily::new(Nerve::full(m, 3), 2, fwd).expect("cocycle");
    atiyah_gluing(&tf, &MatrixRealization::sl2()).expect("constant Ad")
}

fn unipotent(f: &Poly) -> Matrix<Poly> {
    Matrix::from_rows(vec![vec![Poly::one(), f.clone()], vec![Poly::zero(), Poly::one()]])
}

/// Unipotent polynomial transitions `[[1, f_ij], [0, 1]]` with
/// `f_01 = x1`, `f_12 = x2²`, `f_02 = x1 + x2²`.
pub fn unipotent_family(m: usize) -> TransitionFamily {
    let x1 = Poly::x(0);
    let x2 = if m > 1 { Poly::x(1) } else { Poly::zero() };
    let f12 = &x2 * &x2;
    let fs: Vec<((usize, usize), Poly)> = vec![((0, 1), x1.clone()), ((1, 2), f12.clone()), ((0, 2), &x1 + &f12)];
    let fwd = fs.into_iter().map(|(k, f)| (k, (unipotent(&f), unipotent(&-&f)))).collect();
    TransitionFamily::new(Nerve::full(m, 3), 2, fwd).expect("cocycle")
}

/// [`unipotent_family`] on `M_2`.
pub fn unipotent_gl2(m: usize) -> GluingData {
    atiyah_gluing(&unipotent_family(m), &MatrixRealization::gl(2)).expect("unipotent")
}

/// [`unipotent_family`] on `sl2`.
pub fn unipotent_sl2(m: usize) -> GluingData {
    atiyah_gluing(&unipotent_family(m), &MatrixRealization::sl2()).expect("unipotent")
}

/// `p = 1` with unit transitions `2, 3, 6`. Units of a polynomial ring are
/// constants, so `χ = 0` and `α = 1`.
pub fn units_p1(m: usize) -> GluingData {
    let unit = |v: i64| {
        let s = Scalar::from_int(v);
        (Matrix::from_rows(vec![vec![Poly::constant(s.clone())]]), Matrix::from_rows(vec![vec![Poly::constant(s.inv().expect("unit"))]]))
    };
    let fwd = BTreeMap::from([((0, 1), unit(2)), ((1, 2), unit(3)), ((0, 2), unit(6))]);
    let tf = TransitionFamily::new(Nerve::full(m, 3), 1, fwd).expect("cocycle");
    atiyah_gluing(&tf, &MatrixRealization::gl(1)).expect("units")
}

/// Every fixture above, by name.
pub fn all() -> Vec<(&'static str, GluingData)> {
    vec![
        ("trivial-sl2", trivial(2, LieAlgebra::sl2())),
        ("abelian-chi", abelian_chi()),
        ("constant-ad-sl2", constant_ad(2)),
        ("unipotent-gl2", unipotent_gl2(2)),
        ("unipotent-sl2", unipotent_sl2(2)),
        ("units-p1", units_p1(2)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::verify_cocycles;

    #[test]
    fn fixtures_are_cocycles() {
        for (name, gd) in all() {
            let r = verify_cocycles(&gd);
            assert!(r.ok(), "{name}: {:?}", r.violations.first());
        }
    }
}
