//! Batch commands over a loaded scenario. Each returns a [`Report`]; the
//! process exit code is 0 exactly when `report.ok`.

use std::collections::BTreeMap;

use algebroid_core::atiyah::{apply_functional, inner_integrate_trace};
use algebroid_core::ce::{lie_algebra_cohomology, Rep};
use algebroid_core::cech::{
    assemble_global, ce_to_form, cech_delta, cochain_total_diff, cochains_equal, delta_homotopy, e1_page, e2_page,
    nerve_cohomology, trivialize, Primitive, SpectralPage,
};
use algebroid_core::gluing::{
    apply_alpha_hat, check_global_connection, check_global_form, check_h_transitions, check_inner_orientable,
    check_metric_transitions, global_inner_integrate, metric_to_triple, propagate, triple_to_metric, verify_cocycles,
    MetricTriple, Report as CoreReport,
};
use algebroid_core::random;
use algebroid_core::tla::{hodge_star, inner_integrate, integrate, star_inner_product, star_inner_product_components};
use algebroid_core::{Error, Poly, TlaForm, ValueKind};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::scenario::{form_terms, GluingDef, Loaded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CechOp {
    Delta,
    Homotopy,
    E1,
    E2,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Diff,
    Hodge,
    Integrate,
    LieCohomology,
    Cech(CechOp),
    AtiyahGen,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Verify => "verify".into(),
            Command::Diff => "diff".into(),
            Command::Hodge => "hodge".into(),
            Command::Integrate => "integrate".into(),
            Command::LieCohomology => "lie-cohomology".into(),
            Command::Cech(op) => format!("cech {}", format!("{op:?}").to_lowercase()),
            Command::AtiyahGen => "atiyah-gen".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub ok: bool,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl Report {
    fn new(command: &Command, seed: u64) -> Self {
        Report { command: command.name(), seed, ok: true, checks: Vec::new(), data: json!({}) }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, detail: Value) {
        self.ok &= ok;
        self.checks.push(Check { name: name.into(), ok, detail });
    }

    fn core(&mut self, name: impl Into<String>, r: &CoreReport) {
        let violations: Vec<Value> =
            r.violations.iter().map(|v| json!({"simplex": v.simplex, "relation": v.relation})).collect();
        let detail = json!({"checked": r.checked, "violations": violations});
        self.check(name, r.ok(), detail);
    }

    fn put(&mut self, key: &str, v: Value) {
        self.data.as_object_mut().expect("object").insert(key.into(), v);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Missing(String),
}

type Result<T> = std::result::Result<T, CommandError>;

pub fn run(cmd: Command, l: &Loaded, seed: u64) -> Result<Report> {
    let mut rep = Report::new(&cmd, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match cmd {
        Command::Verify => verify(l, &mut rep)?,
        Command::Diff => diff(l, &mut rep, &mut rng)?,
        Command::Hodge => hodge(l, &mut rep, &mut rng)?,
        Command::Integrate => integrate_cmd(l, &mut rep, &mut rng)?,
        Command::LieCohomology => lie_cohomology(l, &mut rep)?,
        Command::Cech(op) => cech(l, op, &mut rep, &mut rng)?,
        Command::AtiyahGen => atiyah_gen(l, &mut rep)?,
    }
    Ok(rep)
}

fn form_json(w: &TlaForm) -> Value {
    serde_json::to_value(form_terms(w)).expect("serializable")
}

fn is_global(l: &Loaded, locals: &BTreeMap<usize, TlaForm>) -> bool {
    locals.len() == l.gluing.nerve.num_charts()
}

fn verify(l: &Loaded, rep: &mut Report) -> Result<()> {
    let gd = &l.gluing;
    rep.core("cocycles", &verify_cocycles(gd));
    for f in &l.forms {
        if is_global(l, &f.locals) {
            rep.core(format!("global form {}", f.name), &check_global_form(gd, &f.global())?);
        }
    }
    if let (Some(h), Some(g)) = (&l.h, &l.g) {
        rep.core("connection", &check_global_connection(gd, &l.connection)?);
        rep.core("inner metric transitions", &check_h_transitions(gd, h)?);
        let charts = 0..gd.nerve.num_charts();
        let triple = MetricTriple {
            g: charts.clone().map(|i| (i, g.clone())).collect(),
            h: h.clone(),
            conn: l.connection.clone(),
        };
        let md = triple_to_metric(&triple)?;
        rep.core("metric transitions", &check_metric_transitions(gd, &md)?);
        let back = metric_to_triple(&md)?;
        rep.check("metric round trip", back == triple, Value::Null);
    }
    rep.put("inner_orientable", json!(check_inner_orientable(gd)?));
    Ok(())
}

fn diff(l: &Loaded, rep: &mut Report, rng: &mut ChaCha8Rng) -> Result<()> {
    let gd = &l.gluing;
    let g = &gd.algebra;
    let mut out = Vec::new();
    for f in &l.forms {
        for (i, w) in &f.locals {
            let dw = w.total_diff(g)?;
            rep.check(format!("{} on chart {i}: total differential squares to zero", f.name), dw.total_diff(g)?.is_zero(), Value::Null);
            out.push(json!({"form": f.name, "chart": i, "d": form_json(&dw)}));
        }
    }
    rep.put("differentials", json!(out));
    let p = &l.scenario.params;
    let (m, n) = (gd.m(), gd.n());
    let (mut dd, mut ss, mut tt, mut comm) = (0, 0, 0, 0);
    let pairs: Vec<(usize, usize)> = gd.pairs().copied().collect();
    for _ in 0..p.samples {
        let kind = if rng.gen() { ValueKind::Algebra } else { ValueKind::Scalar };
        let w = random::form(rng, m, n, kind, p.degree, p.terms);
        dd += usize::from(w.de_rham_d().de_rham_d().is_zero());
        ss += usize::from(w.ce_diff(g)?.ce_diff(g)?.is_zero());
        let dw = w.total_diff(g)?;
        tt += usize::from(dw.total_diff(g)?.is_zero());
        if let Some(&(i, j)) = pairs.get(rng.gen_range(0..pairs.len().max(1))) {
            let lhs = apply_alpha_hat(gd, i, j, &dw)?;
            let rhs = apply_alpha_hat(gd, i, j, &w)?.total_diff(g)?;
            comm += usize::from(lhs == rhs);
        } else {
            comm += 1;
        }
    }
    let total = p.samples;
    rep.check("random: d^2 = 0", dd == total, json!({"passed": dd, "total": total}));
    rep.check("random: s'^2 = 0", ss == total, json!({"passed": ss, "total": total}));
    rep.check("random: total differential squares to zero", tt == total, json!({"passed": tt, "total": total}));
    rep.check("random: alpha-hat commutes with the total differential", comm == total, json!({"passed": comm, "total": total}));
    Ok(())
}

fn need_metric(l: &Loaded) -> Result<(&BTreeMap<usize, algebroid_core::tla::InnerMetricLocal>, &algebroid_core::tla::BaseMetricLocal)> {
    match (&l.h, &l.g) {
        (Some(h), Some(g)) => Ok((h, g)),
        _ => Err(CommandError::Missing("this command needs a `metric` section".into())),
    }
}

fn hodge(l: &Loaded, rep: &mut Report, rng: &mut ChaCha8Rng) -> Result<()> {
    let gd = &l.gluing;
    let (h, g) = need_metric(l)?;
    let (m, n) = (gd.m(), gd.n());
    let big_n = m + n;
    let metric_sign = g.det().real_sign().unwrap_or(1) * h[&0].det().real_sign().unwrap_or(1);
    let double_star_ok = |w: &TlaForm, i: usize| -> Result<bool> {
        let (hi, ci) = (&h[&i], l.connection.get(i)?);
        let Some(p) = w.degree() else { return Ok(w.is_zero()) };
        let ss = hodge_star(&hodge_star(w, g, hi, ci)?, g, hi, ci)?;
        let flip = (p * (big_n - p)) % 2 == 1;
        let neg = flip != (metric_sign < 0);
        Ok(ss == if neg { w.neg() } else { w.clone() })
    };
    let mut stars = Vec::new();
    for f in &l.forms {
        for (i, w) in &f.locals {
            let mut s = TlaForm::zero(m, n, w.kind());
            for p in 0..=big_n {
                let part = w.part(p);
                if part.is_zero() {
                    continue;
                }
                s = s.add(&hodge_star(&part, g, &h[i], l.connection.get(*i)?)?);
                rep.check(format!("{} on chart {i}: double star in degree {p}", f.name), double_star_ok(&part, *i)?, Value::Null);
            }
            stars.push(json!({"form": f.name, "chart": i, "star": form_json(&s)}));
        }
    }
    rep.put("stars", json!(stars));
    let mut products = Vec::new();
    for (a, fa) in l.forms.iter().enumerate() {
        for fb in &l.forms[a..] {
            for (i, wa) in &fa.locals {
                let Some(wb) = fb.locals.get(i) else { continue };
                let chart = &gd.nerve.charts()[*i];
                if chart.bounds.is_none() || fa.kind != fb.kind || wa.degree() != wb.degree() || wa.degree().is_none() {
                    continue;
                }
                let conn = l.connection.get(*i)?;
                let x = star_inner_product(wa, wb, g, &h[i], conn, chart)?;
                let y = star_inner_product_components(wa, wb, g, &h[i], conn, chart)?;
                rep.check(format!("({}, {}) on chart {i}: both paths agree", fa.name, fb.name), x == y, Value::Null);
                products.push(json!({"left": fa.name, "right": fb.name, "chart": i, "value": x.to_string()}));
            }
        }
    }
    rep.put("products", json!(products));
    let p = &l.scenario.params;
    let (mut ds, mut paths, mut tried) = (0, 0, 0);
    let chart0 = &gd.nerve.charts()[0];
    for _ in 0..p.samples {
        let deg = rng.gen_range(0..=big_n);
        let kind = if rng.gen() { ValueKind::Algebra } else { ValueKind::Scalar };
        let w = random::homogeneous_form(rng, m, n, kind, deg, p.degree, p.terms);
        ds += usize::from(double_star_ok(&w, 0)?);
        if chart0.bounds.is_some() {
            let e = random::homogeneous_form(rng, m, n, kind, deg, p.degree, p.terms);
            let conn = l.connection.get(0)?;
            let x = star_inner_product(&w, &e, g, &h[&0], conn, chart0)?;
            let y = star_inner_product_components(&w, &e, g, &h[&0], conn, chart0)?;
            paths += usize::from(x == y);
            tried += 1;
        }
    }
    rep.check("random: double star sign law", ds == p.samples, json!({"passed": ds, "total": p.samples}));
    if tried > 0 {
        rep.check("random: scalar product paths agree", paths == tried, json!({"passed": paths, "total": tried}));
    }
    Ok(())
}

fn integrate_cmd(l: &Loaded, rep: &mut Report, rng: &mut ChaCha8Rng) -> Result<()> {
    let gd = &l.gluing;
    let (h, _) = need_metric(l)?;
    let g = &gd.algebra;
    let mut results = Vec::new();
    for f in &l.forms {
        let inner = if is_global(l, &f.locals) {
            global_inner_integrate(gd, &f.global(), h)?.locals
        } else {
            let mut out = BTreeMap::new();
            for (i, w) in &f.locals {
                out.insert(*i, inner_integrate(w, &h[i])?);
            }
            out
        };
        for (i, w) in &f.locals {
            let mut entry = json!({"form": f.name, "chart": i, "inner": form_json(&inner[i])});
            let chart = &gd.nerve.charts()[*i];
            if chart.bounds.is_some() && w.kind() == ValueKind::Scalar {
                entry["full"] = json!(integrate(w, &h[i], chart)?.to_string());
            }
            if let (Some(real), ValueKind::Algebra) = (&l.realization, w.kind()) {
                entry["trace"] = form_json(&apply_functional(&inner[i], &real.trace_functional())?);
            }
            results.push(entry);
        }
    }
    rep.put("integrals", json!(results));
    let p = &l.scenario.params;
    let (m, n) = (gd.m(), gd.n());
    let mut agree = 0;
    let mut counterexample = None;
    for _ in 0..p.samples {
        let w = random::form(rng, m, n, ValueKind::Scalar, p.degree, p.terms);
        if inner_integrate(&w.total_diff(g)?, &h[&0])? == inner_integrate(&w, &h[&0])?.de_rham_d() {
            agree += 1;
        } else if counterexample.is_none() {
            counterexample = Some(w);
        }
    }
    if counterexample.is_none() && !g.is_unimodular() {
        // the top-minus-one generators detect a nonzero trace of ad
        for a in 0..n {
            let rest: Vec<usize> = (0..n).filter(|&b| b != a).collect();
            let w = TlaForm::term(m, n, ValueKind::Scalar, &[], &rest, 0, Poly::one())?;
            if inner_integrate(&w.total_diff(g)?, &h[&0])? != inner_integrate(&w, &h[&0])?.de_rham_d() {
                counterexample = Some(w);
                break;
            }
        }
    }
    let unimodular = g.is_unimodular();
    rep.put("unimodular", json!(unimodular));
    let detail = json!({
        "agreed": agree,
        "total": p.samples,
        "counterexample": counterexample.as_ref().map(form_json),
    });
    rep.check("inner integration commutes with the total differential iff unimodular", unimodular == counterexample.is_none(), detail);
    if let Some(real) = &l.realization {
        {
            let mut ok = 0;
            for _ in 0..p.samples {
                let w = random::form(rng, m, n, ValueKind::Algebra, p.degree, p.terms);
                let gf = propagate(gd, 0, &w)?;
                let dgf = gf.map(|_, x| x.total_diff(g))?;
                let lhs = inner_integrate_trace(gd, real, &dgf, h)?;
                let rhs = inner_integrate_trace(gd, real, &gf, h)?.map(|_, x| Ok(x.de_rham_d()))?;
                ok += usize::from(lhs == rhs);
            }
            rep.check("random: trace integration commutes with the total differential", ok == p.samples, json!({"passed": ok, "total": p.samples}));
        }
    }
    Ok(())
}

fn lie_cohomology(l: &Loaded, rep: &mut Report) -> Result<()> {
    let g = &l.gluing.algebra;
    let m = l.gluing.m();
    for (name, r) in [("adjoint", Rep::Adjoint), ("trivial", Rep::TrivialScalar)] {
        let mut rows = Vec::new();
        for q in 0..=g.dim() {
            let hc = lie_algebra_cohomology(g, r, q)?;
            let reps: Vec<Value> = hc.representatives.iter().map(|x| form_json(&ce_to_form(m, x))).collect();
            rows.push(json!({"q": q, "dim": hc.dim, "representatives": reps}));
        }
        rep.put(name, json!(rows));
    }
    rep.put("algebra", json!(g.name()));
    rep.put("unimodular", json!(g.is_unimodular()));
    Ok(())
}

fn page_json(p: &SpectralPage) -> Value {
    let rows: Vec<Value> = p
        .dims
        .iter()
        .map(|(&(pp, q), d)| json!({"p": pp, "q": q, "dim": d, "generators": p.basis.get(&(pp, q)).cloned().unwrap_or_default()}))
        .collect();
    json!(rows)
}

fn cech(l: &Loaded, op: CechOp, rep: &mut Report, rng: &mut ChaCha8Rng) -> Result<()> {
    let gd = &l.gluing;
    let p = &l.scenario.params;
    let kind = ValueKind::Algebra;
    let top = gd.nerve.max_dim();
    if matches!(op, CechOp::Delta | CechOp::All) {
        let deg = p.p.min(top);
        let (mut sq, mut comm) = (0, 0);
        for _ in 0..p.samples {
            let c = random::cochain(rng, gd, deg, kind, p.q, p.degree, p.terms);
            let dc = cech_delta(gd, &c)?;
            sq += usize::from(cech_delta(gd, &dc)?.is_zero());
            let a = cech_delta(gd, &cochain_total_diff(gd, &c)?)?;
            comm += usize::from(cochains_equal(gd, &a, &cochain_total_diff(gd, &dc)?));
        }
        rep.check("delta squares to zero", sq == p.samples, json!({"passed": sq, "total": p.samples, "p": deg}));
        rep.check("delta commutes with the total differential", comm == p.samples, json!({"passed": comm, "total": p.samples}));
    }
    if matches!(op, CechOp::Homotopy | CechOp::All) {
        let deg = p.p.clamp(1, top.max(1));
        let mut ok = 0;
        let mut tried = 0;
        if deg <= top {
            for _ in 0..p.samples {
                let b = random::cochain(rng, gd, deg - 1, kind, p.q, p.degree, p.terms);
                let c = cech_delta(gd, &b)?;
                tried += 1;
                if let Primitive::Cochain(tau) = delta_homotopy(gd, &c)? {
                    ok += usize::from(cochains_equal(gd, &cech_delta(gd, &tau)?, &c));
                }
            }
        }
        rep.check("homotopy inverts delta on cocycles", ok == tried, json!({"passed": ok, "total": tried, "p": deg}));
        let mut glob = 0;
        for _ in 0..p.samples {
            let w = random::form(rng, gd.m(), gd.n(), kind, p.degree, p.terms);
            let gf = propagate(gd, 0, &w)?;
            let c = trivialize(&gf)?;
            let back = assemble_global(gd, &c)?;
            glob += usize::from(cech_delta(gd, &c)?.is_zero() && back == gf && check_global_form(gd, &back)?.ok());
        }
        rep.check("global forms are exactly the 0-cocycles", glob == p.samples, json!({"passed": glob, "total": p.samples}));
    }
    if matches!(op, CechOp::E1 | CechOp::All) {
        rep.put("e1_adjoint", page_json(&e1_page(gd, ValueKind::Algebra)?));
        rep.put("e1_trivial", page_json(&e1_page(gd, ValueKind::Scalar)?));
    }
    if matches!(op, CechOp::E2 | CechOp::All) {
        rep.put("e2_adjoint", page_json(&e2_page(gd, ValueKind::Algebra)?));
        rep.put("e2_trivial", page_json(&e2_page(gd, ValueKind::Scalar)?));
        rep.put("nerve_cohomology", json!(nerve_cohomology(&gd.nerve)));
    }
    Ok(())
}

fn atiyah_gen(l: &Loaded, rep: &mut Report) -> Result<()> {
    if l.transitions.is_none() {
        return Err(CommandError::Missing("atiyah-gen needs a `transitions` section".into()));
    }
    rep.core("cocycles", &verify_cocycles(&l.gluing));
    let def = GluingDef::from_gluing(&l.gluing);
    rep.put("gluing", serde_json::to_value(def).expect("serializable"));
    Ok(())
}
