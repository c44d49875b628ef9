//! Sparse multivariate polynomials over [`Scalar`] in chart coordinates
//! `x1..xm` and formal partition-of-unity symbols `rho_k`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// A polynomial variable. `X(mu)` is the chart coordinate with 0-based index
/// `mu` (rendered `x{mu+1}`), `Rho(k)` the formal partition function of chart `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(u8),
    Rho(u8),
}

/// Sorted list of `(variable, exponent)` with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(alloc::vec![(v, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|p| p.1 > 0);
        pairs.sort_by_key(|p| p.0);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|p| p.0 == v).map_or(0, |p| p.1)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    /// Total degree in the chart coordinates only.
    pub fn x_degree(&self) -> u32 {
        self.0.iter().filter(|p| matches!(p.0, Var::X(_))).map(|p| p.1).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                core::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Monomial with the exponent of `v` removed, and that exponent.
    fn split(&self, v: Var) -> (Monomial, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|p| {
                if p.0 == v {
                    e = p.1;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (Monomial(rest), e)
    }
}

/// Polynomial with exact Gaussian-rational coefficients. No zero
/// coefficient is ever stored, so structural equality is polynomial equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn constant(c: Scalar) -> Self {
        let mut p = Poly::default();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(Scalar::from_int(c))
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Monomial::var(v, 1), Scalar::one())
    }

    /// Chart coordinate with 0-based index `mu`.
    pub fn x(mu: usize) -> Self {
        Poly::var(Var::X(mu as u8))
    }

    pub fn rho(k: usize) -> Self {
        Poly::var(Var::Rho(k as u8))
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = Poly::default();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn has_rho(&self) -> bool {
        self.terms.keys().any(|m| m.pairs().iter().any(|p| matches!(p.0, Var::Rho(_))))
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Partial derivative with respect to `x{mu+1}`; `rho` symbols are constants.
    pub fn derivative(&self, mu: usize) -> Poly {
        let v = Var::X(mu as u8);
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.split(v);
            if e == 0 {
                continue;
            }
            let m2 = rest.mul(&Monomial::var(v, e - 1));
            out.add_term(m2, c * &Scalar::from_int(e as i64));
        }
        out
    }

    /// Substitute `v := value` everywhere.
    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        let mut powers: Vec<Poly> = alloc::vec![Poly::one()];
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.split(v);
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let term = Poly::monomial(rest, c.clone());
            out = &out + &(&term * &powers[e as usize]);
        }
        out
    }

    /// Evaluate the chart coordinates at `point`, leaving `rho` symbols.
    pub fn eval_x(&self, point: &[Scalar]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.pairs() {
                match v {
                    Var::X(mu) => {
                        let x = point.get(mu as usize).cloned().unwrap_or_else(Scalar::zero);
                        coeff = &coeff * &x.pow(e);
                    }
                    Var::Rho(_) => rest.push((v, e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Full evaluation; `None` if a `rho` symbol remains.
    pub fn eval(&self, point: &[Scalar]) -> Option<Scalar> {
        self.eval_x(point).as_constant()
    }

    /// Translate coordinates: `x := x + shift`.
    pub fn shift_x(&self, shift: &[Scalar]) -> Poly {
        let mut out = self.clone();
        for (mu, s) in shift.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            let repl = &Poly::x(mu) + &Poly::constant(s.clone());
            out = out.substitute(Var::X(mu as u8), &repl);
        }
        out
    }

    /// Exact integral over the box `prod [lo_mu, hi_mu]` in the first
    /// `bounds.len()` coordinates; `None` if a `rho` symbol or a higher
    /// coordinate is present.
    pub fn integrate_box(&self, bounds: &[(Scalar, Scalar)]) -> Option<Scalar> {
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut val = c.clone();
            let mut seen = alloc::vec![0u32; bounds.len()];
            for &(v, e) in m.pairs() {
                match v {
                    Var::X(mu) if (mu as usize) < bounds.len() => seen[mu as usize] = e,
                    _ => return None,
                }
            }
            for (mu, (lo, hi)) in bounds.iter().enumerate() {
                let e = seen[mu];
                let k = Scalar::from_int(e as i64 + 1);
                val = &val * &(&(&hi.pow(e + 1) - &lo.pow(e + 1)) / &k);
            }
            total += &val;
        }
        Some(total)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::constant(Scalar::one())
    }
}

impl From<Scalar> for Poly {
    fn from(c: Scalar) -> Self {
        Poly::constant(c)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= o.len() { (self.clone(), o) } else { (o.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(mu) => write!(f, "x{}", *mu as usize + 1),
            Var::Rho(k) => write!(f, "rho{}", k),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// Canonical rendering, e.g. `2*x1^2*x2 - 1/3*x1 + (1+2*i)`; parses back
/// through the scenario grammar.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_real() && c.re() < &num_rational::BigRational::zero();
            let mag = if negative { -c } else { c.clone() };
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let complex = !mag.is_real();
            let unit = mag == Scalar::one();
            if m.is_one() {
                if complex {
                    write!(f, "({})", mag)?;
                } else {
                    write!(f, "{}", mag)?;
                }
            } else if unit {
                write!(f, "{}", m)?;
            } else if complex {
                write!(f, "({})*{}", mag, m)?;
            } else {
                write!(f, "{}*{}", mag, m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn arithmetic_and_derivative() {
        let x = Poly::x(0);
        let y = Poly::x(1);
        let p = &(&x * &x) * &y;
        assert_eq!(p.derivative(0), &(&x * &y) * &Poly::from_int(2));
        assert_eq!(p.derivative(1), &x * &x);
        assert!((&p - &p).is_zero());
        assert!(Poly::rho(2).derivative(0).is_zero());
    }

    #[test]
    fn substitution_and_shift() {
        let x = Poly::x(0);
        let sq = &x * &x;
        let shifted = sq.shift_x(&[Scalar::from_int(1)]);
        // (x+1)^2
        let expected = &(&sq + &(&x * &Poly::from_int(2))) + &Poly::one();
        assert_eq!(shifted, expected);
        let r = &Poly::rho(0) * &Poly::rho(1);
        let sub = r.substitute(Var::Rho(1), &(&Poly::one() - &Poly::rho(0)));
        assert_eq!(sub, &Poly::rho(0) - &(&Poly::rho(0) * &Poly::rho(0)));
    }

    #[test]
    fn box_integral() {
        let x = Poly::x(0);
        let v = x.integrate_box(&[(Scalar::zero(), Scalar::one())]).unwrap();
        assert_eq!(v, Scalar::frac(1, 2));
    }

    #[test]
    fn display() {
        let p = &(&Poly::x(0) * &Poly::from_int(2)) - &Poly::constant(Scalar::frac(1, 3));
        assert_eq!(format!("{}", p), "-1/3 + 2*x1");
        assert_eq!(format!("{}", Poly::zero()), "0");
    }
}
