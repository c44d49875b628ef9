//! Atlases, transition data and the change of trivialization on forms.
//!
//! All charts share one ambient coordinate system `x1..xm`; a chart is a
//! region of it and intersections are combinatorial (the nerve).
//!
//! Transition data between trivializations `j → i` on `U_ij` is a matrix
//! `G^i_j` (column `a` is `α^i_j(E_a)`) and a `g`-valued 1-form `χ_ij`,
//! stored as an `n × m` matrix of coefficients. Sections transform by
//! `γ^i = α^i_j(γ^j) + χ_ij(X)`.
//!
//! `α̂^i_j(ω) = α^i_j ∘ ω ∘ s_i^j` with `s_i^j(X ⊕ γ) = X ⊕ (α^j_i γ + χ_ji(X))`.
//! Evaluating `θ^a` on `s_i^j(X ⊕ γ)` gives the substitution
//! `θ^a ↦ (G^j_i)^a_b θ^b + χ_ji^a{}_mu dx^mu`; `dx^mu` is unchanged and the
//! value is mapped by `G^i_j`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::blade::Blade;
use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::tla::{inner_integrate, BaseMetricLocal, Chart, InnerMetricLocal, LocalConnectionForm, TlaForm};

pub type Simplex = Vec<usize>;

/// Nerve of a cover: charts, listed simplices (downward closed) and sample
/// points for every simplex of dimension at least one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nerve {
    charts: Vec<Chart>,
    simplices: BTreeSet<Simplex>,
    samples: BTreeMap<Simplex, Vec<Vec<Scalar>>>,
}

impl Nerve {
    /// `simplices` lists index tuples of dimension `>= 1`; vertices are implied.
    /// Missing sample points default to the origin.
    pub fn new(charts: Vec<Chart>, simplices: Vec<Simplex>, samples: BTreeMap<Simplex, Vec<Vec<Scalar>>>) -> Result<Self> {
        let m = charts.first().map_or(0, |c| c.m);
        if let Some(c) = charts.iter().find(|c| c.m != m) {
            return Err(Error::DimensionMismatch { expected: m, got: c.m });
        }
        let mut set: BTreeSet<Simplex> = (0..charts.len()).map(|i| alloc::vec![i]).collect();
        for s in simplices {
            let mut t = s.clone();
            t.sort_unstable();
            t.dedup();
            if t.len() != s.len() || t.iter().any(|&i| i >= charts.len()) {
                return Err(Error::Invalid(format!("bad simplex {s:?}")));
            }
            set.insert(t);
        }
        for s in &set {
            for k in 0..s.len() {
                if s.len() > 1 {
                    let mut face = s.clone();
                    face.remove(k);
                    if !set.contains(&face) {
                        return Err(Error::Invalid(format!("face {face:?} of {s:?} is not listed")));
                    }
                }
            }
        }
        let mut all_samples = BTreeMap::new();
        for s in &set {
            let pts = samples.get(s).cloned().unwrap_or_default();
            for p in &pts {
                if p.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: p.len() });
                }
                if let Some(i) = s.iter().find(|&&i| !charts[i].contains(p)) {
                    return Err(Error::Invalid(format!("sample point of {s:?} lies outside chart {i}")));
                }
            }
            let pts = if pts.is_empty() { alloc::vec![default_point(s, &charts, m)] } else { pts };
            all_samples.insert(s.clone(), pts);
        }
        Ok(Nerve { charts, simplices: set, samples: all_samples })
    }

    /// One chart of dimension `m`.
    pub fn single(chart: Chart) -> Self {
        Nerve::new(alloc::vec![chart], Vec::new(), BTreeMap::new()).expect("single chart")
    }

    /// `k` charts of dimension `m` with every subset listed.
    pub fn full(m: usize, k: usize) -> Self {
        let mut simplices = Vec::new();
        for mask in 1u32..(1 << k) {
            if mask.count_ones() >= 2 {
                simplices.push(crate::blade::bits(mask).map(|b| b as usize).collect());
            }
        }
        Nerve::new((0..k).map(|_| Chart::new(m)).collect(), simplices, BTreeMap::new()).expect("full nerve")
    }

    /// Three charts on a circle: pairwise overlaps, no triple overlap.
    pub fn circle() -> Self {
        Nerve::new(
            (0..3).map(|_| Chart::new(1)).collect(),
            alloc::vec![alloc::vec![0, 1], alloc::vec![1, 2], alloc::vec![0, 2]],
            BTreeMap::new(),
        )
        .expect("circle")
    }

    pub fn m(&self) -> usize {
        self.charts.first().map_or(0, |c| c.m)
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn num_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.simplices.contains(s)
    }

    /// Listed simplices with `p + 1` vertices, in lexicographic order.
    pub fn simplices(&self, p: usize) -> Vec<Simplex> {
        self.simplices.iter().filter(|s| s.len() == p + 1).cloned().collect()
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    pub fn samples(&self, s: &[usize]) -> &[Vec<Scalar>] {
        self.samples.get(s).map_or(&[], Vec::as_slice)
    }

    /// The first sample point of a listed simplex.
    pub fn sample_point(&self, s: &[usize]) -> Vec<Scalar> {
        self.samples(s).first().cloned().unwrap_or_else(|| alloc::vec![Scalar::zero(); self.m()])
    }
}

fn default_point(s: &[usize], charts: &[Chart], m: usize) -> Vec<Scalar> {
    // midpoint of the intersection of the boxes, which may be empty
    let mut p = alloc::vec![Scalar::zero(); m];
    for (mu, x) in p.iter_mut().enumerate() {
        let mut lo: Option<Scalar> = None;
        let mut hi: Option<Scalar> = None;
        for &i in s {
            if let Some(b) = &charts[i].bounds {
                let (l, h) = &b[mu];
                if lo.as_ref().is_none_or(|c| l.re() > c.re()) {
                    lo = Some(l.clone());
                }
                if hi.as_ref().is_none_or(|c| h.re() < c.re()) {
                    hi = Some(h.clone());
                }
            }
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            *x = &(&l + &h) / &Scalar::from_int(2);
        }
    }
    p
}

/// Transition data on the nerve. Both orientations of every 1-simplex are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingData {
    pub nerve: Nerve,
    pub algebra: LieAlgebra,
    alpha: BTreeMap<(usize, usize), Matrix<Poly>>,
    chi: BTreeMap<(usize, usize), Matrix<Poly>>,
}

impl GluingData {
    /// Checks shapes and that every ordered pair of every 1-simplex is
    /// present. Cocycle relations are not checked here; see [`verify_cocycles`].
    pub fn new(
        nerve: Nerve,
        algebra: LieAlgebra,
        alpha: BTreeMap<(usize, usize), Matrix<Poly>>,
        chi: BTreeMap<(usize, usize), Matrix<Poly>>,
    ) -> Result<Self> {
        let (m, n) = (nerve.m(), algebra.dim());
        for e in nerve.simplices(1) {
            for key in [(e[0], e[1]), (e[1], e[0])] {
                let g = alpha.get(&key).ok_or_else(|| Error::Invalid(format!("missing alpha for {key:?}")))?;
                let c = chi.get(&key).ok_or_else(|| Error::Invalid(format!("missing chi for {key:?}")))?;
                if g.rows() != n || g.cols() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: g.rows() });
                }
                if c.rows() != n || c.cols() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: c.cols() });
                }
            }
        }
        for key in alpha.keys().chain(chi.keys()) {
            let mut s = alloc::vec![key.0, key.1];
            s.sort_unstable();
            if !nerve.contains(&s) {
                return Err(Error::NotSimplex(s));
            }
        }
        Ok(GluingData { nerve, algebra, alpha, chi })
    }

    /// Builds both orientations from `(G^i_j, χ_ij)` given for `i < j`, using
    /// `G^j_i = (G^i_j)^{-1}` and `χ_ji = −G^j_i χ_ij`. The matrices `G^i_j`
    /// must be constant.
    pub fn from_forward(
        nerve: Nerve,
        algebra: LieAlgebra,
        forward: BTreeMap<(usize, usize), (Matrix<Scalar>, Matrix<Poly>)>,
    ) -> Result<Self> {
        let mut alpha = BTreeMap::new();
        let mut chi = BTreeMap::new();
        for ((i, j), (g, c)) in forward {
            let ginv = g.inverse().ok_or_else(|| Error::Degenerate(format!("transition {i}{j}")))?;
            let back = ginv.to_poly().mul(&c).neg();
            alpha.insert((i, j), g.to_poly());
            alpha.insert((j, i), ginv.to_poly());
            chi.insert((i, j), c);
            chi.insert((j, i), back);
        }
        GluingData::new(nerve, algebra, alpha, chi)
    }

    /// `α = Id`, `χ = 0` on every edge.
    pub fn trivial(nerve: Nerve, algebra: LieAlgebra) -> Self {
        let (m, n) = (nerve.m(), algebra.dim());
        let mut alpha = BTreeMap::new();
        let mut chi = BTreeMap::new();
        for e in nerve.simplices(1) {
            for key in [(e[0], e[1]), (e[1], e[0])] {
                alpha.insert(key, Matrix::identity(n));
                chi.insert(key, Matrix::zeros(n, m));
            }
        }
        GluingData { nerve, algebra, alpha, chi }
    }

    pub fn m(&self) -> usize {
        self.nerve.m()
    }

    pub fn n(&self) -> usize {
        self.algebra.dim()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.alpha.keys()
    }

    /// `G^i_j`; the identity for `i == j`.
    pub fn alpha(&self, i: usize, j: usize) -> Result<Matrix<Poly>> {
        if i == j {
            return Ok(Matrix::identity(self.n()));
        }
        self.alpha.get(&(i, j)).cloned().ok_or_else(|| Error::NotSimplex(sorted(&[i, j])))
    }

    /// `χ_ij` as an `n × m` coefficient matrix; zero for `i == j`.
    pub fn chi(&self, i: usize, j: usize) -> Result<Matrix<Poly>> {
        if i == j {
            return Ok(Matrix::zeros(self.n(), self.m()));
        }
        self.chi.get(&(i, j)).cloned().ok_or_else(|| Error::NotSimplex(sorted(&[i, j])))
    }

    pub fn set_alpha(&mut self, i: usize, j: usize, g: Matrix<Poly>) {
        self.alpha.insert((i, j), g);
    }

    pub fn set_chi(&mut self, i: usize, j: usize, c: Matrix<Poly>) {
        self.chi.insert((i, j), c);
    }
}

pub(crate) fn sorted(s: &[usize]) -> Simplex {
    let mut v = s.to_vec();
    v.sort_unstable();
    v
}

/// One failed identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub simplex: Simplex,
    pub relation: String,
    /// Matrix entry `(row, col)` of the first mismatch, if applicable.
    pub entry: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn check_matrix(&mut self, simplex: &[usize], relation: &str, lhs: &Matrix<Poly>, rhs: &Matrix<Poly>) {
        self.checked += 1;
        if let Some((r, c)) = first_mismatch(lhs, rhs) {
            self.violations.push(Violation { simplex: sorted(simplex), relation: relation.into(), entry: Some((r, c)) });
        }
    }

    fn fail(&mut self, simplex: &[usize], relation: String) {
        self.violations.push(Violation { simplex: sorted(simplex), relation, entry: None });
    }

    /// Simplices named by violations, deduplicated.
    pub fn simplices(&self) -> Vec<Simplex> {
        let set: BTreeSet<Simplex> = self.violations.iter().map(|v| v.simplex.clone()).collect();
        set.into_iter().collect()
    }
}

fn first_mismatch(a: &Matrix<Poly>, b: &Matrix<Poly>) -> Option<(usize, usize)> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Some((0, 0));
    }
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            if a.get(r, c) != b.get(r, c) {
                return Some((r, c));
            }
        }
    }
    None
}

/// `ad(v)` for a polynomial `g`-vector: entry `(c, b)` is `Σ_a v^a C^c_{ab}`.
fn ad_poly(g: &LieAlgebra, v: &[Poly]) -> Matrix<Poly> {
    let n = g.dim();
    Matrix::from_fn(n, n, |c, b| {
        let mut acc = Poly::zero();
        for (a, va) in v.iter().enumerate() {
            let k = g.structure(a, b, c);
            if !k.is_zero() && !va.is_zero() {
                acc = &acc + &va.scale(k);
            }
        }
        acc
    })
}

fn column(m: &Matrix<Poly>, mu: usize) -> Vec<Poly> {
    (0..m.rows()).map(|r| m.get(r, mu).clone()).collect()
}

/// Checks, as polynomial identities:
/// pair inverses `G^i_j G^j_i = 1`, `G^i_j χ_ji + χ_ij = 0`;
/// on 2-simplices `G^i_k = G^i_j G^j_k`, `χ_ik = G^i_j χ_jk + χ_ij`;
/// that each `G^i_j` is an automorphism; and the compatibility of `(α, χ)`
/// with brackets, `∂_mu G = −ad(χ_mu) G` and `dχ + [χ ∧ χ]/2 = 0`.
pub fn verify_cocycles(gd: &GluingData) -> Report {
    let mut rep = Report::default();
    let n = gd.n();
    let m = gd.m();
    let id = Matrix::identity(n);
    for e in gd.nerve.simplices(1) {
        let samples = gd.nerve.samples(&e);
        for (i, j) in [(e[0], e[1]), (e[1], e[0])] {
            let (gij, gji) = (gd.alpha(i, j).unwrap(), gd.alpha(j, i).unwrap());
            let (cij, cji) = (gd.chi(i, j).unwrap(), gd.chi(j, i).unwrap());
            rep.check_matrix(&e, &format!("G^{i}_{j} G^{j}_{i} = 1"), &gij.mul(&gji), &id);
            rep.check_matrix(&e, &format!("G^{i}_{j} chi_{j}{i} + chi_{i}{j} = 0"), &gij.mul(&cji).add(&cij), &Matrix::zeros(n, m));
            rep.checked += 1;
            let auto = gd.algebra.check_automorphism(&gij, samples);
            if !auto.ok() {
                let what = match auto.witness {
                    Some((a, b, c)) => format!("G^{i}_{j} is not an automorphism at (a,b,c)=({a},{b},{c})"),
                    None => format!("det G^{i}_{j} vanishes"),
                };
                rep.fail(&e, what);
            }
            for mu in 0..m {
                let lhs = gij.derivative(mu);
                let rhs = ad_poly(&gd.algebra, &column(&cij, mu)).mul(&gij).neg();
                rep.check_matrix(&e, &format!("d_{mu} G^{i}_{j} = -ad(chi_{i}{j}) G^{i}_{j}"), &lhs, &rhs);
                for nu in mu + 1..m {
                    let br = gd.algebra.bracket_poly(&column(&cij, mu), &column(&cij, nu)).expect("dims");
                    let curv: Vec<Poly> = (0..n)
                        .map(|a| &(&cij.get(a, nu).derivative(mu) - &cij.get(a, mu).derivative(nu)) + &br[a])
                        .collect();
                    rep.checked += 1;
                    if let Some(a) = curv.iter().position(|p| !p.is_zero()) {
                        rep.violations.push(Violation {
                            simplex: e.clone(),
                            relation: format!("d chi_{i}{j} + [chi_{i}{j}, chi_{i}{j}]/2 = 0 in (dx{}, dx{})", mu + 1, nu + 1),
                            entry: Some((a, 0)),
                        });
                    }
                }
            }
        }
    }
    for t in gd.nerve.simplices(2) {
        for (i, j, k) in orderings(&t) {
            let (gij, gjk, gik) = (gd.alpha(i, j).unwrap(), gd.alpha(j, k).unwrap(), gd.alpha(i, k).unwrap());
            rep.check_matrix(&t, &format!("G^{i}_{k} = G^{i}_{j} G^{j}_{k}"), &gik, &gij.mul(&gjk));
            let (cjk, cij, cik) = (gd.chi(j, k).unwrap(), gd.chi(i, j).unwrap(), gd.chi(i, k).unwrap());
            rep.check_matrix(&t, &format!("chi_{i}{k} = G^{i}_{j} chi_{j}{k} + chi_{i}{j}"), &cik, &gij.mul(&cjk).add(&cij));
        }
    }
    rep
}

fn orderings(t: &[usize]) -> Vec<(usize, usize, usize)> {
    let (a, b, c) = (t[0], t[1], t[2]);
    alloc::vec![(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
}

/// `α̂^i_j`: a form in trivialization `j` re-expressed in trivialization `i`.
pub fn apply_alpha_hat(gd: &GluingData, i: usize, j: usize, w: &TlaForm) -> Result<TlaForm> {
    if i == j {
        return Ok(w.clone());
    }
    let (m, n) = (w.m(), w.n());
    if m != gd.m() || n != gd.n() {
        return Err(Error::DimensionMismatch { expected: gd.n(), got: n });
    }
    let gji = gd.alpha(j, i)?;
    let cji = gd.chi(j, i)?;
    let gij = gd.alpha(i, j)?;
    let mut images: Vec<Option<BTreeMap<Blade, Poly>>> = alloc::vec![None; m + n];
    for a in 0..n {
        let mut img = BTreeMap::new();
        for b in 0..n {
            let c = gji.get(a, b);
            if !c.is_zero() {
                img.insert(1 << (m + b), c.clone());
            }
        }
        for mu in 0..m {
            let c = cji.get(a, mu);
            if !c.is_zero() {
                img.insert(1 << mu, c.clone());
            }
        }
        images[m + a] = Some(img);
    }
    Ok(w.substitute_generators(&images).map_values(&gij))
}

/// A family of local forms, one per chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalForm {
    pub locals: BTreeMap<usize, TlaForm>,
}

impl GlobalForm {
    pub fn new(locals: BTreeMap<usize, TlaForm>) -> Self {
        GlobalForm { locals }
    }

    pub fn get(&self, i: usize) -> Result<&TlaForm> {
        self.locals.get(&i).ok_or_else(|| Error::Invalid(format!("no local form on chart {i}")))
    }

    pub fn map(&self, f: impl Fn(usize, &TlaForm) -> Result<TlaForm>) -> Result<GlobalForm> {
        let mut locals = BTreeMap::new();
        for (i, w) in &self.locals {
            locals.insert(*i, f(*i, w)?);
        }
        Ok(GlobalForm { locals })
    }
}

/// `α̂^i_j(ω^j) = ω^i` on every ordered pair of every 1-simplex.
pub fn check_global_form(gd: &GluingData, gf: &GlobalForm) -> Result<Report> {
    let mut rep = Report::default();
    for i in 0..gd.nerve.num_charts() {
        gf.get(i)?;
    }
    for e in gd.nerve.simplices(1) {
        for (i, j) in [(e[0], e[1]), (e[1], e[0])] {
            rep.checked += 1;
            if apply_alpha_hat(gd, i, j, gf.get(j)?)? != *gf.get(i)? {
                rep.fail(&e, format!("alpha_hat^{i}_{j}(w_{j}) = w_{i}"));
            }
        }
    }
    Ok(rep)
}

/// Pushes `w` from chart `root` to every chart along a spanning tree of the 1-skeleton.
pub fn propagate(gd: &GluingData, root: usize, w: &TlaForm) -> Result<GlobalForm> {
    let mut locals = BTreeMap::new();
    locals.insert(root, w.clone());
    let mut queue = VecDeque::from([root]);
    let edges = gd.nerve.simplices(1);
    while let Some(j) = queue.pop_front() {
        for e in &edges {
            let i = if e[0] == j { e[1] } else if e[1] == j { e[0] } else { continue };
            if locals.contains_key(&i) {
                continue;
            }
            let wi = apply_alpha_hat(gd, i, j, &locals[&j])?;
            locals.insert(i, wi);
            queue.push_back(i);
        }
    }
    if locals.len() != gd.nerve.num_charts() {
        return Err(Error::Invalid("nerve is not connected".into()));
    }
    Ok(GlobalForm { locals })
}

/// Chartwise `ĥd`; the input must glue, and the output is checked to glue.
pub fn global_total_diff(gd: &GluingData, gf: &GlobalForm) -> Result<GlobalForm> {
    let before = check_global_form(gd, gf)?;
    if let Some(v) = before.violations.first() {
        return Err(Error::NotGlobal(v.simplex.clone()));
    }
    let out = gf.map(|_, w| w.total_diff(&gd.algebra))?;
    let after = check_global_form(gd, &out)?;
    if let Some(v) = after.violations.first() {
        return Err(Error::NotGlobal(v.simplex.clone()));
    }
    Ok(out)
}

/// Local connection forms `A_i`, one per chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalConnection {
    pub a: BTreeMap<usize, LocalConnectionForm>,
}

impl GlobalConnection {
    pub fn get(&self, i: usize) -> Result<&LocalConnectionForm> {
        self.a.get(&i).ok_or_else(|| Error::Invalid(format!("no connection form on chart {i}")))
    }
}

/// `A_i = G^i_j A_j + χ_ij` on every ordered pair of every 1-simplex.
pub fn check_global_connection(gd: &GluingData, conn: &GlobalConnection) -> Result<Report> {
    let mut rep = Report::default();
    for e in gd.nerve.simplices(1) {
        for (i, j) in [(e[0], e[1]), (e[1], e[0])] {
            let rhs = gd.alpha(i, j)?.mul(&conn.get(j)?.a).add(&gd.chi(i, j)?);
            rep.check_matrix(&e, &format!("A_{i} = G^{i}_{j} A_{j} + chi_{i}{j}"), &conn.get(i)?.a, &rhs);
        }
    }
    Ok(rep)
}

/// Raw blocks of a metric on `TLA(U_i, g)` in the basis `(∂_mu, E_a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricBlocks {
    /// `m × m`, `ĝ(∂_mu, ∂_nu)`.
    pub g: Matrix<Poly>,
    /// `m × n`, `ĝ(∂_mu, E_b)`.
    pub gmix: Matrix<Poly>,
    pub h: InnerMetricLocal,
}

impl MetricBlocks {
    /// The full `(m+n) × (m+n)` matrix.
    pub fn full(&self) -> Matrix<Poly> {
        let (m, n) = (self.g.rows(), self.h.matrix().rows());
        Matrix::from_fn(m + n, m + n, |r, c| match (r < m, c < m) {
            (true, true) => self.g.get(r, c).clone(),
            (true, false) => self.gmix.get(r, c - m).clone(),
            (false, true) => self.gmix.get(c, r - m).clone(),
            (false, false) => Poly::constant(self.h.matrix().get(r - m, c - m).clone()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricData {
    pub charts: BTreeMap<usize, MetricBlocks>,
}

/// A metric as `(g, h, ∇)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricTriple {
    pub g: BTreeMap<usize, BaseMetricLocal>,
    pub h: BTreeMap<usize, InnerMetricLocal>,
    pub conn: GlobalConnection,
}

/// `A_i = −h_i⁻¹ ĝ^mixᵀ`, i.e. `A^a_mu = −(h⁻¹)^{ab} ĝ^mix_{mu b}`, the unique
/// solution of `ĝ(∇_X, ι(γ)) = 0`.
pub fn metric_connection(md: &MetricData) -> Result<GlobalConnection> {
    let mut a = BTreeMap::new();
    for (i, b) in &md.charts {
        let hinv = b.h.inverse()?.to_poly();
        a.insert(*i, LocalConnectionForm::new(hinv.mul(&b.gmix.transpose()).neg()));
    }
    Ok(GlobalConnection { a })
}

/// `h A + ĝ^mixᵀ`, which vanishes exactly for the metric connection.
pub fn connection_defect(blocks: &MetricBlocks, conn: &LocalConnectionForm) -> Matrix<Poly> {
    blocks.h.matrix().to_poly().mul(&conn.a).add(&blocks.gmix.transpose())
}

/// `ĝ(𝔛, 𝔜) = g(X, Y) + h(ℓ(𝔛), ℓ(𝔜))` with `ℓ(X ⊕ γ) = A(X) − γ`:
/// `g_loc = g + Aᵀ h A`, `ĝ^mix = −Aᵀ h`, `h_loc = h`.
pub fn triple_to_metric(t: &MetricTriple) -> Result<MetricData> {
    let mut charts = BTreeMap::new();
    for (i, g) in &t.g {
        let h = t.h.get(i).ok_or_else(|| Error::Invalid(format!("no inner metric on chart {i}")))?;
        let a = &t.conn.get(*i)?.a;
        let hp = h.matrix().to_poly();
        let at_h = a.transpose().mul(&hp);
        let gloc = g.matrix().to_poly().add(&at_h.mul(a));
        charts.insert(*i, MetricBlocks { g: gloc, gmix: at_h.neg(), h: h.clone() });
    }
    Ok(MetricData { charts })
}

/// Inverse of [`triple_to_metric`]: `A` from [`metric_connection`],
/// `g = g_loc − Aᵀ h A` (must be constant), `h = h_loc`.
pub fn metric_to_triple(md: &MetricData) -> Result<MetricTriple> {
    let conn = metric_connection(md)?;
    let mut g = BTreeMap::new();
    let mut h = BTreeMap::new();
    for (i, b) in &md.charts {
        let a = &conn.get(*i)?.a;
        let base = b.g.sub(&a.transpose().mul(&b.h.matrix().to_poly()).mul(a));
        let c = base.as_constant().ok_or_else(|| Error::Invalid(format!("base metric on chart {i} is not constant")))?;
        g.insert(*i, BaseMetricLocal::new(c)?);
        h.insert(*i, b.h.clone());
    }
    Ok(MetricTriple { g, h, conn })
}

/// `Ĝ_i = Tᵀ Ĝ_j T` with `T = [[1, 0], [χ_ji, G^j_i]]`, the matrix of
/// `s_i^j`, on every ordered pair of every 1-simplex.
pub fn check_metric_transitions(gd: &GluingData, md: &MetricData) -> Result<Report> {
    let (m, n) = (gd.m(), gd.n());
    let mut rep = Report::default();
    for e in gd.nerve.simplices(1) {
        for (i, j) in [(e[0], e[1]), (e[1], e[0])] {
            let (gji, cji) = (gd.alpha(j, i)?, gd.chi(j, i)?);
            let t = Matrix::from_fn(m + n, m + n, |r, c| match (r < m, c < m) {
                (true, true) if r == c => Poly::one(),
                (true, _) => Poly::zero(),
                (false, true) => cji.get(r - m, c).clone(),
                (false, false) => gji.get(r - m, c - m).clone(),
            });
            let bi = md.charts.get(&i).ok_or_else(|| Error::Invalid(format!("no metric on chart {i}")))?;
            let bj = md.charts.get(&j).ok_or_else(|| Error::Invalid(format!("no metric on chart {j}")))?;
            let rhs = t.transpose().mul(&bj.full()).mul(&t);
            rep.check_matrix(&e, &format!("metric_{i} = s^*metric_{j}"), &bi.full(), &rhs);
        }
    }
    Ok(rep)
}

/// `h^i = (G^j_i)ᵀ h^j G^j_i` on every ordered pair.
pub fn check_h_transitions(gd: &GluingData, h: &BTreeMap<usize, InnerMetricLocal>) -> Result<Report> {
    let mut rep = Report::default();
    for e in gd.nerve.simplices(1) {
        for (i, j) in [(e[0], e[1]), (e[1], e[0])] {
            let gji = gd.alpha(j, i)?;
            let hj = h.get(&j).ok_or_else(|| Error::Invalid(format!("no inner metric on chart {j}")))?;
            let hi = h.get(&i).ok_or_else(|| Error::Invalid(format!("no inner metric on chart {i}")))?;
            let rhs = gji.transpose().mul(&hj.matrix().to_poly()).mul(&gji);
            rep.check_matrix(&e, &format!("h_{i} = G^T h_{j} G"), &hi.matrix().to_poly(), &rhs);
        }
    }
    Ok(rep)
}

/// `det G^i_j > 0` at every sample point of every 1-simplex.
pub fn check_inner_orientable(gd: &GluingData) -> Result<bool> {
    let mut ok = true;
    for e in gd.nerve.simplices(1) {
        for (i, j) in [(e[0], e[1]), (e[1], e[0])] {
            let det = gd.alpha(i, j)?.det_expand();
            for p in gd.nerve.samples(&e) {
                let v = det.eval(p).ok_or_else(|| Error::Invalid("determinant depends on rho".into()))?;
                match v.real_sign() {
                    None if v.is_zero() => return Err(Error::SingularTransition(e.clone())),
                    Some(1) => {}
                    _ => ok = false,
                }
            }
        }
    }
    Ok(ok)
}

/// Chartwise [`inner_integrate`]; the results must satisfy
/// `ω^{m.i.}_i = α^i_j(ω^{m.i.}_j)`.
pub fn global_inner_integrate(gd: &GluingData, gf: &GlobalForm, h: &BTreeMap<usize, InnerMetricLocal>) -> Result<GlobalForm> {
    if !check_inner_orientable(gd)? {
        return Err(Error::NotOrientable);
    }
    let out = gf.map(|i, w| {
        let hi = h.get(&i).ok_or_else(|| Error::Invalid(format!("no inner metric on chart {i}")))?;
        inner_integrate(w, hi)
    })?;
    let rep = check_global_form(gd, &out)?;
    if let Some(v) = rep.violations.first() {
        return Err(Error::NotGlobal(v.simplex.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn abelian_chi(c01: i64, c12: i64, c02: i64) -> GluingData {
        let nerve = Nerve::full(1, 3);
        let mut fwd = BTreeMap::new();
        for ((i, j), c) in [((0, 1), c01), ((1, 2), c12), ((0, 2), c02)] {
            fwd.insert((i, j), (Matrix::identity(1), Matrix::from_rows(vec![vec![Poly::from_int(c)]])));
        }
        GluingData::from_forward(nerve, LieAlgebra::abelian(1), fwd).unwrap()
    }

    #[test]
    fn trivial_and_additive_cocycles() {
        let gd = GluingData::trivial(Nerve::full(2, 3), LieAlgebra::sl2());
        assert!(verify_cocycles(&gd).ok());
        assert!(verify_cocycles(&abelian_chi(1, 2, 3)).ok());
        let bad = verify_cocycles(&abelian_chi(1, 2, 4));
        assert!(!bad.ok());
        assert_eq!(bad.simplices(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn alpha_hat_on_theta() {
        // abelian n=1, chi_01 = dx: θ in trivialization 1 becomes θ + chi_10 = θ − dx
        let gd = abelian_chi(1, 2, 3);
        let th = TlaForm::theta(1, 1, 0);
        let r = apply_alpha_hat(&gd, 0, 1, &th).unwrap();
        assert_eq!(r, th.sub(&TlaForm::dx(1, 1, 0)));
        assert_eq!(apply_alpha_hat(&gd, 1, 0, &r).unwrap(), th);
    }

    #[test]
    fn connection_gluing_matches_alpha_hat() {
        // ℓ_j = A_j − θ maps to ℓ_i exactly when A_i = G A_j + χ_ij
        let gd = abelian_chi(1, 2, 3);
        let a1 = LocalConnectionForm::new(Matrix::from_rows(vec![vec![Poly::x(0)]]));
        let a0 = LocalConnectionForm::new(a1.a.add(&gd.chi(0, 1).unwrap()));
        let ell = |a: &LocalConnectionForm| a.as_form().component(0).sub(&TlaForm::theta(1, 1, 0));
        assert_eq!(apply_alpha_hat(&gd, 0, 1, &ell(&a1)).unwrap(), ell(&a0));
    }

    #[test]
    fn global_forms() {
        let gd = abelian_chi(1, 2, 3);
        let w = TlaForm::theta(1, 1, 0).with_value(0).unwrap();
        let gf = propagate(&gd, 0, &w).unwrap();
        assert!(check_global_form(&gd, &gf).unwrap().ok());
        let mut bad = gf.clone();
        let w2 = bad.locals[&2].add(&TlaForm::theta(1, 1, 0).with_value(0).unwrap());
        bad.locals.insert(2, w2);
        let rep = check_global_form(&gd, &bad).unwrap();
        assert!(!rep.ok());
        assert!(rep.simplices().iter().all(|s| s.contains(&2)));
        assert!(global_total_diff(&gd, &gf).is_ok());
    }

    #[test]
    fn metric_round_trip() {
        let gd = GluingData::trivial(Nerve::single(Chart::new(1)), LieAlgebra::abelian(1));
        let h = InnerMetricLocal::new(Matrix::from_rows(vec![vec![Scalar::from_int(2)]])).unwrap();
        let md = MetricData {
            charts: BTreeMap::from([(0, MetricBlocks {
                g: Matrix::from_rows(vec![vec![Poly::one()]]),
                gmix: Matrix::from_rows(vec![vec![Poly::x(0)]]),
                h: h.clone(),
            })]),
        };
        let conn = metric_connection(&md).unwrap();
        assert_eq!(conn.a[&0].a.get(0, 0), &Poly::x(0).scale(&Scalar::frac(-1, 2)));
        assert!(check_global_connection(&gd, &conn).unwrap().ok());
        let md2 = MetricData {
            charts: BTreeMap::from([(0, MetricBlocks {
                g: Matrix::from_rows(vec![vec![Poly::one()]]),
                gmix: Matrix::zeros(1, 1),
                h,
            })]),
        };
        let t = metric_to_triple(&md2).unwrap();
        assert!(t.conn.a[&0].a.is_zero());
        assert_eq!(triple_to_metric(&t).unwrap(), md2);
    }

    #[test]
    fn orientability() {
        let gd = GluingData::trivial(Nerve::full(1, 2), LieAlgebra::abelian(1));
        assert!(check_inner_orientable(&gd).unwrap());
        let mut fwd = BTreeMap::new();
        fwd.insert((0, 1), (Matrix::from_rows(vec![vec![Scalar::from_int(-1)]]), Matrix::zeros(1, 1)));
        let flip = GluingData::from_forward(Nerve::full(1, 2), LieAlgebra::abelian(1), fwd).unwrap();
        assert!(!check_inner_orientable(&flip).unwrap());
        let h = BTreeMap::from([(0, InnerMetricLocal::identity(1)), (1, InnerMetricLocal::identity(1))]);
        let vol = TlaForm::theta(1, 1, 0);
        let gf = GlobalForm::new(BTreeMap::from([(0, vol.clone()), (1, vol.neg())]));
        assert_eq!(global_inner_integrate(&flip, &gf, &h), Err(Error::NotOrientable));
        let gf = GlobalForm::new(BTreeMap::from([(0, vol.clone()), (1, vol)]));
        let r = global_inner_integrate(&gd, &gf, &h).unwrap();
        assert_eq!(r.locals[&0], TlaForm::one(1, 1));
    }
}
