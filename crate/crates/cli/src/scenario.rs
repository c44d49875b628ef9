//! Scenario files: JSON with polynomial entries as strings (see [`crate::expr`]).
//!
//! Chart indices are 0-based, matching `rho<k>`. Lie basis indices (brackets,
//! `J`, `value`) and base indices (`I`) are 1-based, matching `x1..xm`.

use std::collections::BTreeMap;

use algebroid_core::atiyah::{
    atiyah_gluing, killing_inner_metric_scaled, trace_inner_metric, MatrixRealization, TransitionFamily,
};
use algebroid_core::gluing::{GlobalConnection, GlobalForm, GluingData, Nerve};
use algebroid_core::tla::{BaseMetricLocal, Chart, InnerMetricLocal, LocalConnectionForm};
use algebroid_core::{blade, LieAlgebra, Matrix, Poly, Scalar, TlaForm, ValueKind};
use serde::{Deserialize, Serialize};

use crate::expr::{parse_poly, parse_scalar};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl ToString) -> ScenarioError {
    ScenarioError::Invalid { path: path.into(), message: message.to_string() }
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub algebra: AlgebraDef,
    pub nerve: NerveDef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluing: Option<GluingDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transitions: Option<TransitionsDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forms: Vec<FormDef>,
    #[serde(default)]
    pub params: Params,
}

/// Either a named algebra (`sl2`, `heis3`, `aff1`, `abelian`, `gl<p>`) or
/// explicit brackets `[a, b, c, coeff]` meaning `C^c_{ab} = coeff`, `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<Vec<(usize, usize, usize, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NerveDef {
    pub m: usize,
    pub charts: usize,
    /// Simplices of dimension at least one; vertices are implied.
    #[serde(default)]
    pub simplices: Vec<Vec<usize>>,
    /// Per chart, per coordinate `[lo, hi]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boxes: Option<Vec<Vec<(String, String)>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleDef {
    pub simplex: Vec<usize>,
    pub points: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingDef {
    /// `(i, j)` entries; an edge given in one orientation only gets its
    /// reverse from `G^j_i = (G^i_j)^{-1}`, which needs a constant `alpha`.
    #[serde(default)]
    pub pairs: Vec<PairDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDef {
    pub i: usize,
    pub j: usize,
    /// `G^i_j`, `n × n`, by rows.
    pub alpha: Vec<Vec<String>>,
    /// `χ_ij`: for each `dx^mu` a vector of `n` components.
    pub chi: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionsDef {
    /// `gl<p>` or `sl2`.
    pub realization: String,
    pub edges: Vec<EdgeDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDef {
    pub i: usize,
    pub j: usize,
    pub g: Vec<Vec<String>>,
    pub inverse: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Atiyah,
    Endomorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDef {
    /// `identity`, `killing`, `trace`, `killing*<c>` or an explicit matrix.
    pub h: HDef,
    /// Constant base metric, same on every chart; identity if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<String>>>,
    /// Per chart `A` as `n × m`; zero where absent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub connection: Vec<ConnectionDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HDef {
    Named(String),
    Matrix(Vec<Vec<String>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionDef {
    pub chart: usize,
    pub a: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindDef {
    Scalar,
    Algebra,
}

impl From<KindDef> for ValueKind {
    fn from(k: KindDef) -> Self {
        match k {
            KindDef::Scalar => ValueKind::Scalar,
            KindDef::Algebra => ValueKind::Algebra,
        }
    }
}

impl From<ValueKind> for KindDef {
    fn from(k: ValueKind) -> Self {
        match k {
            ValueKind::Scalar => KindDef::Scalar,
            ValueKind::Algebra => KindDef::Algebra,
        }
    }
}

/// A named form, given on some charts; with `propagate_from` the form on that
/// chart is pushed to the others through `α̂`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDef {
    pub name: String,
    pub kind: KindDef,
    pub locals: Vec<LocalFormDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagate_from: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalFormDef {
    pub chart: usize,
    pub terms: Vec<TermDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDef {
    #[serde(rename = "I", default)]
    pub i: Vec<usize>,
    #[serde(rename = "J", default)]
    pub j: Vec<usize>,
    pub coeff: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<usize>,
}

fn default_samples() -> usize {
    100
}
fn default_degree() -> u32 {
    2
}
fn default_terms() -> usize {
    3
}
fn default_one() -> usize {
    1
}

/// Sizes for the randomized checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_degree")]
    pub degree: u32,
    #[serde(default = "default_terms")]
    pub terms: usize,
    /// Čech degree for `cech delta` and `cech homotopy`.
    #[serde(default = "default_one")]
    pub p: usize,
    /// Form degree for `cech`.
    #[serde(default = "default_one")]
    pub q: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { samples: default_samples(), degree: default_degree(), terms: default_terms(), p: 1, q: 1 }
    }
}

/// A named global or partial family of local forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedForm {
    pub name: String,
    pub kind: ValueKind,
    pub locals: BTreeMap<usize, TlaForm>,
}

impl NamedForm {
    pub fn global(&self) -> GlobalForm {
        GlobalForm::new(self.locals.clone())
    }
}

/// Everything a command needs, validated.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub gluing: GluingData,
    pub realization: Option<MatrixRealization>,
    pub transitions: Option<TransitionFamily>,
    pub h: Option<BTreeMap<usize, InnerMetricLocal>>,
    pub g: Option<BaseMetricLocal>,
    pub connection: GlobalConnection,
    pub forms: Vec<NamedForm>,
}

pub fn parse(text: &str) -> Result<Scenario> {
    serde_json::from_str(text).map_err(|e| ScenarioError::Json { line: e.line(), column: e.column(), message: e.to_string() })
}

pub fn to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(s).expect("serializable")
}

fn poly_at(path: &str, s: &str) -> Result<Poly> {
    parse_poly(s).map_err(|e| invalid(path, format!("`{s}`: {e}")))
}

fn scalar_at(path: &str, s: &str) -> Result<Scalar> {
    parse_scalar(s).map_err(|e| invalid(path, format!("`{s}`: {e}")))
}

fn poly_matrix(path: &str, rows: &[Vec<String>], r: usize, c: usize) -> Result<Matrix<Poly>> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(invalid(path, format!("expected a {r} x {c} matrix")));
    }
    let mut out = Vec::new();
    for (a, row) in rows.iter().enumerate() {
        let mut v = Vec::new();
        for (b, e) in row.iter().enumerate() {
            v.push(poly_at(&format!("{path}[{a}][{b}]"), e)?);
        }
        out.push(v);
    }
    Ok(Matrix::from_rows(out))
}

fn scalar_matrix(path: &str, rows: &[Vec<String>], r: usize, c: usize) -> Result<Matrix<Scalar>> {
    poly_matrix(path, rows, r, c)?.as_constant().ok_or_else(|| invalid(path, "entries must be constants"))
}

pub fn matrix_strings(m: &Matrix<Poly>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

impl AlgebraDef {
    pub fn build(&self) -> Result<LieAlgebra> {
        let alg = match &self.brackets {
            Some(br) => {
                let dim = self.dim.ok_or_else(|| invalid("algebra.dim", "required with brackets"))?;
                let mut list = Vec::new();
                for (k, (a, b, c, v)) in br.iter().enumerate() {
                    let path = format!("algebra.brackets[{k}]");
                    if *a == 0 || *b == 0 || *c == 0 || *a > dim || *b > dim || *c > dim {
                        return Err(invalid(&path, format!("indices are 1..={dim}")));
                    }
                    list.push((a - 1, b - 1, c - 1, scalar_at(&path, v)?));
                }
                LieAlgebra::new(&self.name, dim, &list).map_err(|e| invalid("algebra", e))?
            }
            None => named_algebra(&self.name, self.dim)?,
        };
        match &self.basis_names {
            Some(names) if names.len() != alg.dim() => Err(invalid("algebra.basis_names", format!("expected {} names", alg.dim()))),
            Some(names) => Ok(alg.with_basis_names(&names.iter().map(String::as_str).collect::<Vec<_>>())),
            None => Ok(alg),
        }
    }
}

fn named_algebra(name: &str, dim: Option<usize>) -> Result<LieAlgebra> {
    match name {
        "sl2" => Ok(LieAlgebra::sl2()),
        "heis3" => Ok(LieAlgebra::heis3()),
        "aff1" => Ok(LieAlgebra::aff1()),
        "abelian" => Ok(LieAlgebra::abelian(dim.ok_or_else(|| invalid("algebra.dim", "required for abelian"))?)),
        _ => match name.strip_prefix("gl").and_then(|p| p.parse::<usize>().ok()) {
            Some(p) if p > 0 => Ok(LieAlgebra::gl(p)),
            _ => Err(invalid("algebra.name", format!("unknown algebra `{name}`; give brackets"))),
        },
    }
}

fn realization(name: &str) -> Result<MatrixRealization> {
    if name == "sl2" {
        return Ok(MatrixRealization::sl2());
    }
    match name.strip_prefix("gl").and_then(|p| p.parse::<usize>().ok()) {
        Some(p) if p > 0 => Ok(MatrixRealization::gl(p)),
        _ => Err(invalid("transitions.realization", format!("unknown realization `{name}`"))),
    }
}

impl NerveDef {
    pub fn build(&self) -> Result<Nerve> {
        let mut charts = Vec::new();
        for k in 0..self.charts {
            let chart = match &self.boxes {
                None => Chart::new(self.m),
                Some(b) => {
                    let path = format!("nerve.boxes[{k}]");
                    let bx = b.get(k).ok_or_else(|| invalid("nerve.boxes", "one box per chart"))?;
                    if bx.len() != self.m {
                        return Err(invalid(&path, format!("expected {} intervals", self.m)));
                    }
                    let mut bounds = Vec::new();
                    for (mu, (lo, hi)) in bx.iter().enumerate() {
                        let p = format!("{path}[{mu}]");
                        bounds.push((scalar_at(&p, lo)?, scalar_at(&p, hi)?));
                    }
                    Chart::with_box(bounds).map_err(|e| invalid(&path, e))?
                }
            };
            charts.push(chart);
        }
        let mut samples = BTreeMap::new();
        for (k, s) in self.samples.iter().enumerate() {
            let mut pts = Vec::new();
            for (r, p) in s.points.iter().enumerate() {
                let path = format!("nerve.samples[{k}].points[{r}]");
                pts.push(p.iter().map(|x| scalar_at(&path, x)).collect::<Result<Vec<_>>>()?);
            }
            let mut key = s.simplex.clone();
            key.sort_unstable();
            samples.insert(key, pts);
        }
        Nerve::new(charts, self.simplices.clone(), samples).map_err(|e| invalid("nerve", e))
    }
}

impl GluingDef {
    pub fn build(&self, nerve: Nerve, alg: LieAlgebra) -> Result<GluingData> {
        let (m, n) = (nerve.m(), alg.dim());
        let mut alpha = BTreeMap::new();
        let mut chi = BTreeMap::new();
        for (k, p) in self.pairs.iter().enumerate() {
            let path = format!("gluing.pairs[{k}]");
            let g = poly_matrix(&format!("{path}.alpha"), &p.alpha, n, n)?;
            let c = poly_matrix(&format!("{path}.chi"), &p.chi, m, n)?.transpose();
            alpha.insert((p.i, p.j), g);
            chi.insert((p.i, p.j), c);
        }
        for (&(i, j), g) in alpha.clone().iter() {
            if alpha.contains_key(&(j, i)) {
                continue;
            }
            let gc = g.as_constant().ok_or_else(|| invalid("gluing.pairs", format!("pair ({j}, {i}) is missing and alpha_{i}{j} is not constant")))?;
            let inv = gc.inverse().ok_or_else(|| invalid("gluing.pairs", format!("alpha_{i}{j} is singular")))?.to_poly();
            chi.insert((j, i), inv.mul(&chi[&(i, j)]).neg());
            alpha.insert((j, i), inv);
        }
        GluingData::new(nerve, alg, alpha, chi).map_err(|e| invalid("gluing", e))
    }

    /// Both orientations of every edge.
    pub fn from_gluing(gd: &GluingData) -> Self {
        let mut pairs = Vec::new();
        for &(i, j) in gd.pairs() {
            pairs.push(PairDef {
                i,
                j,
                alpha: matrix_strings(&gd.alpha(i, j).expect("listed")),
                chi: matrix_strings(&gd.chi(i, j).expect("listed").transpose()),
            });
        }
        GluingDef { pairs }
    }
}

impl TransitionsDef {
    pub fn build(&self, nerve: Nerve) -> Result<(TransitionFamily, MatrixRealization)> {
        let real = realization(&self.realization)?;
        let p = real.p();
        let mut fwd = BTreeMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            let path = format!("transitions.edges[{k}]");
            let g = poly_matrix(&format!("{path}.g"), &e.g, p, p)?;
            let inv = poly_matrix(&format!("{path}.inverse"), &e.inverse, p, p)?;
            let (key, val) = if e.i < e.j { ((e.i, e.j), (g, inv)) } else { ((e.j, e.i), (inv, g)) };
            fwd.insert(key, val);
        }
        let tf = TransitionFamily::new(nerve, p, fwd).map_err(|e| invalid("transitions", e))?;
        Ok((tf, real))
    }
}

fn form_from_terms(path: &str, m: usize, n: usize, kind: ValueKind, terms: &[TermDef]) -> Result<TlaForm> {
    let mut w = TlaForm::zero(m, n, kind);
    for (k, t) in terms.iter().enumerate() {
        let p = format!("{path}.terms[{k}]");
        let check = |idx: &[usize], max: usize, what: &str| -> Result<Vec<usize>> {
            idx.iter()
                .map(|&a| if a == 0 || a > max { Err(invalid(&p, format!("{what} index {a} outside 1..={max}"))) } else { Ok(a - 1) })
                .collect()
        };
        let i = check(&t.i, m, "I")?;
        let j = check(&t.j, n, "J")?;
        let value = match (kind, t.value) {
            (ValueKind::Scalar, None) => 0,
            (ValueKind::Scalar, Some(_)) => return Err(invalid(&p, "scalar forms take no value")),
            (ValueKind::Algebra, Some(v)) => check(&[v], n, "value")?[0],
            (ValueKind::Algebra, None) => return Err(invalid(&p, "algebra-valued term needs a value")),
        };
        let coeff = poly_at(&format!("{p}.coeff"), &t.coeff)?;
        if coeff.has_rho() {
            return Err(invalid(&p, "rho symbols are not allowed in forms"));
        }
        w = w.add(&TlaForm::term(m, n, kind, &i, &j, value, coeff).map_err(|e| invalid(&p, e))?);
    }
    Ok(w)
}

/// Terms of a form in the scenario notation, in canonical order.
pub fn form_terms(w: &TlaForm) -> Vec<TermDef> {
    let m = w.m();
    w.terms()
        .iter()
        .map(|(&(k, v), c)| {
            let bits: Vec<usize> = blade::bits(k).map(|b| b as usize).collect();
            TermDef {
                i: bits.iter().filter(|&&b| b < m).map(|b| b + 1).collect(),
                j: bits.iter().filter(|&&b| b >= m).map(|b| b - m + 1).collect(),
                coeff: c.to_string(),
                value: (w.kind() == ValueKind::Algebra).then_some(v + 1),
            }
        })
        .collect()
}

fn build_h(def: &HDef, gd: &GluingData, real: Option<&MatrixRealization>) -> Result<InnerMetricLocal> {
    let n = gd.n();
    match def {
        HDef::Named(s) if s == "identity" => Ok(InnerMetricLocal::identity(n)),
        HDef::Named(s) if s == "trace" => {
            let p = real.map(MatrixRealization::p).or_else(|| (1..=8).find(|p| p * p == n));
            match p {
                Some(p) if p * p == n => Ok(trace_inner_metric(p)),
                _ => Err(invalid("metric.h", "the trace metric needs gl<p>")),
            }
        }
        HDef::Named(s) if s == "killing" || s.starts_with("killing*") => {
            let c = match s.strip_prefix("killing*") {
                Some(c) => scalar_at("metric.h", c)?,
                None => Scalar::from_int(1),
            };
            let h = killing_inner_metric_scaled(gd, &c)
                .map_err(|e| invalid("metric.h", format!("{e}; give `h` as an explicit nondegenerate matrix")))?;
            Ok(h[&0].clone())
        }
        HDef::Named(s) => Err(invalid("metric.h", format!("unknown metric `{s}`"))),
        HDef::Matrix(rows) => {
            InnerMetricLocal::new(scalar_matrix("metric.h", rows, n, n)?).map_err(|e| invalid("metric.h", e))
        }
    }
}

pub fn load(text: &str) -> Result<Loaded> {
    let scenario = parse(text)?;
    let alg = scenario.algebra.build()?;
    let nerve = scenario.nerve.build()?;
    if scenario.gluing.is_some() && scenario.transitions.is_some() {
        return Err(invalid("", "give either `gluing` or `transitions`, not both"));
    }
    let (gluing, realization, transitions) = match (&scenario.transitions, &scenario.gluing) {
        (Some(t), _) => {
            let (tf, real) = t.build(nerve)?;
            if scenario.model == Some(Model::Endomorphism) && real.algebra.name() != format!("gl{}", real.p()) {
                return Err(invalid("model", "the endomorphism model needs a gl<p> realization"));
            }
            if real.algebra.dim() != alg.dim() || real.algebra.brackets() != alg.brackets() {
                return Err(invalid("transitions.realization", "does not match `algebra`"));
            }
            let gd = atiyah_gluing(&tf, &real).map_err(|e| invalid("transitions", e))?;
            (gd, Some(real), Some(tf))
        }
        (None, Some(g)) => (g.build(nerve, alg)?, None, None),
        (None, None) => (GluingData::trivial(nerve, alg), None, None),
    };
    let realization = realization.or_else(|| {
        let name = gluing.algebra.name();
        name.strip_prefix("gl").and_then(|p| p.parse::<usize>().ok()).map(MatrixRealization::gl)
    });
    let (m, n) = (gluing.m(), gluing.n());
    let charts = gluing.nerve.num_charts();
    let mut h = None;
    let mut g = None;
    let mut conn = BTreeMap::new();
    for i in 0..charts {
        conn.insert(i, LocalConnectionForm::zero(m, n));
    }
    if let Some(ms) = &scenario.metric {
        let hl = build_h(&ms.h, &gluing, realization.as_ref())?;
        h = Some((0..charts).map(|i| (i, hl.clone())).collect());
        let gm = match &ms.g {
            Some(rows) => scalar_matrix("metric.g", rows, m, m)?,
            None => Matrix::identity(m),
        };
        g = Some(BaseMetricLocal::new(gm).map_err(|e| invalid("metric.g", e))?);
        for (k, c) in ms.connection.iter().enumerate() {
            let path = format!("metric.connection[{k}]");
            if c.chart >= charts {
                return Err(invalid(&path, format!("chart {} is not listed", c.chart)));
            }
            conn.insert(c.chart, LocalConnectionForm::new(poly_matrix(&format!("{path}.a"), &c.a, n, m)?));
        }
    }
    let mut forms = Vec::new();
    for (k, f) in scenario.forms.iter().enumerate() {
        let path = format!("forms[{k}]");
        let kind = ValueKind::from(f.kind);
        let mut locals = BTreeMap::new();
        for (r, l) in f.locals.iter().enumerate() {
            let lp = format!("{path}.locals[{r}]");
            if l.chart >= charts {
                return Err(invalid(&lp, format!("chart {} is not listed", l.chart)));
            }
            locals.insert(l.chart, form_from_terms(&lp, m, n, kind, &l.terms)?);
        }
        if let Some(root) = f.propagate_from {
            let w = locals.get(&root).cloned().ok_or_else(|| invalid(&path, format!("no local form on chart {root}")))?;
            locals = algebroid_core::gluing::propagate(&gluing, root, &w).map_err(|e| invalid(&path, e))?.locals;
        }
        forms.push(NamedForm { name: f.name.clone(), kind, locals });
    }
    Ok(Loaded {
        scenario,
        gluing,
        realization,
        transitions,
        h,
        g,
        connection: GlobalConnection { a: conn },
        forms,
    })
}
