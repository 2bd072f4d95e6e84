//! Output records and their text, CSV and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Instant;

use clap::ValueEnum;
use klcells::cells::{fc_cell_report, CellSide, FcCellReport};
use klcells::coxeter::{parse_word, CoxeterGroup, Element, Gen};
use klcells::tl::TlElt;
use klcells::verify::{self, CorollaryRow, Verdict, VerifyContext, Witness};
use klcells::{Error, LinComb, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    #[serde(rename = "type")]
    pub kind: String,
    pub rank: u32,
    pub format: Format,
    pub long_run: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// The JSON document printed by `--format json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: Config,
    pub results: Vec<Value>,
    pub witnesses: Vec<Witness>,
    pub timings: BTreeMap<String, Value>,
    #[serde(skip)]
    text: String,
    #[serde(skip)]
    csv: String,
}

/// What a command produced.
pub struct Outcome {
    pub results: Vec<Value>,
    pub witnesses: Vec<Witness>,
    pub text: String,
    pub csv: String,
    pub failed: bool,
}

impl Outcome {
    fn new(results: Vec<Value>, text: String, csv: String) -> Self {
        Outcome {
            results,
            witnesses: Vec::new(),
            text,
            csv,
            failed: false,
        }
    }
}

impl Report {
    pub fn new(command: &str, config: Config) -> Self {
        Report {
            command: command.to_string(),
            config,
            results: Vec::new(),
            witnesses: Vec::new(),
            timings: BTreeMap::new(),
            text: String::new(),
            csv: String::new(),
        }
    }

    pub fn time(&mut self, key: &str, since: Instant) {
        self.timings.insert(
            format!("{key}_ms"),
            json!(since.elapsed().as_millis() as u64),
        );
    }

    pub fn note(&mut self, key: &str, value: String) {
        self.timings.insert(key.to_string(), json!(value));
    }

    pub fn absorb(&mut self, out: Outcome) {
        self.results = out.results;
        self.witnesses = out.witnesses;
        self.text = out.text;
        self.csv = out.csv;
    }

    pub fn render(&self, format: Format, timings: bool) -> String {
        match format {
            Format::Text => {
                let mut s = self.text.clone();
                if timings {
                    for (k, v) in &self.timings {
                        writeln!(s, "# {k} {v}").unwrap();
                    }
                }
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Json => {
                let mut doc = self.clone();
                if !timings {
                    doc.timings.clear();
                }
                serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",") + "\n";
    for r in rows {
        let fields: Vec<String> = r.iter().map(|f| csv_field(f)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// `p * B(x) + ...` with `B` the basis label; `0` when empty.
fn format_comb(group: &CoxeterGroup, u: &LinComb, basis: &str) -> String {
    if u.is_zero() {
        return "0".into();
    }
    u.iter()
        .map(|(&x, p)| format!("{p} * {basis}({})", group.format(x)))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn comb_json(group: &CoxeterGroup, u: &LinComb) -> Value {
    Value::Array(
        u.iter()
            .map(|(&x, p)| json!({"x": group.format(x), "coeff": p.to_string()}))
            .collect(),
    )
}

pub fn enumerate(group: &CoxeterGroup, max_length: Option<usize>) -> Outcome {
    let fc = group.fc_flags();
    let elems = group.enumerate(max_length);
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &w in &elems {
        let (word, len, is_fc) = (group.format(w), group.length(w), fc[w.index()]);
        writeln!(text, "{word}\t{len}").unwrap();
        rows.push(vec![word.clone(), len.to_string(), is_fc.to_string()]);
        results.push(json!({"element": word, "length": len, "fully_commutative": is_fc}));
    }
    Outcome::new(
        results,
        text,
        csv_rows(&["element", "length", "fully_commutative"], &rows),
    )
}

pub fn fc(group: &CoxeterGroup, count: bool) -> Outcome {
    let fc = group.fully_commutative();
    if count {
        let n = fc.len();
        return Outcome::new(
            vec![json!({"count": n})],
            format!("{n}\n"),
            format!("count\n{n}\n"),
        );
    }
    let words: Vec<String> = fc.iter().map(|&w| group.format(w)).collect();
    let rows: Vec<Vec<String>> = words.iter().map(|w| vec![w.clone()]).collect();
    Outcome::new(
        words.iter().map(|w| json!({"element": w})).collect(),
        words.iter().map(|w| format!("{w}\n")).collect(),
        csv_rows(&["element"], &rows),
    )
}

pub fn kl(ctx: &VerifyContext, w: Element) -> Outcome {
    let g = ctx.group();
    let c = ctx.kl().clprime_elt(w);
    let wf = g.format(w);
    let text = format!("C'({wf}) = {}\n", format_comb(g, &c, "Tt"));
    let rows: Vec<Vec<String>> = c
        .iter()
        .map(|(&x, p)| vec![wf.clone(), g.format(x), p.to_string()])
        .collect();
    let results = c
        .iter()
        .map(|(&x, p)| json!({"w": wf, "x": g.format(x), "p_tilde": p.to_string(), "mu": ctx.kl().mu(x, w)}))
        .collect();
    Outcome::new(results, text, csv_rows(&["w", "x", "p_tilde"], &rows))
}

pub fn mu(ctx: &VerifyContext, x: Element, w: Element) -> Outcome {
    let g = ctx.group();
    let m = ctx.kl().mu(x, w);
    let (xf, wf) = (g.format(x), g.format(w));
    Outcome::new(
        vec![json!({"x": xf, "w": wf, "mu": m})],
        format!("{m}\n"),
        csv_rows(&["x", "w", "mu"], &[vec![xf, wf, m.to_string()]]),
    )
}

fn side_label(side: CellSide) -> &'static str {
    match side {
        CellSide::Left => "left",
        CellSide::Right => "right",
        CellSide::TwoSided => "two-sided",
    }
}

pub fn cells(ctx: &VerifyContext, side: CellSide) -> Outcome {
    let g = ctx.group();
    let fc = g.fc_flags();
    let part = ctx.cells(side);
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (i, cell) in part.cells.iter().enumerate() {
        let words: Vec<String> = cell.iter().map(|&w| g.format(w)).collect();
        let kind = if cell.iter().all(|w| fc[w.index()]) {
            "fc"
        } else if cell.iter().any(|w| fc[w.index()]) {
            "mixed"
        } else {
            "non-fc"
        };
        writeln!(text, "{i} [{kind}] {}", words.join(" ")).unwrap();
        for w in &words {
            rows.push(vec![i.to_string(), w.clone()]);
        }
        results.push(json!({
            "cell": i,
            "side": side_label(side),
            "minimal": words[0],
            "kind": kind,
            "elements": words,
            "below": part.order[i],
        }));
    }
    Outcome::new(results, text, csv_rows(&["cell", "element"], &rows))
}

pub fn theta(ctx: &VerifyContext, w: Element) -> Result<Outcome> {
    let g = ctx.group();
    let tl = ctx.tl()?;
    let wf = g.format(w);
    let t = tl.theta_t(w);
    let c = &ctx.theta_clprime()?[w.index()];
    let text = format!(
        "theta(Tt({wf})) = {}\ntheta(C'({wf})) = {}\n",
        format_comb(g, t, "t"),
        format_comb(g, c, "t")
    );
    let mut rows = Vec::new();
    for (label, u) in [("Tt", t), ("C'", c)] {
        for (&x, p) in u {
            rows.push(vec![
                label.to_string(),
                wf.clone(),
                g.format(x),
                p.to_string(),
            ]);
        }
    }
    Ok(Outcome::new(
        vec![
            json!({"of": "Tt", "w": wf, "terms": comb_json(g, t)}),
            json!({"of": "C'", "w": wf, "terms": comb_json(g, c)}),
        ],
        text,
        csv_rows(&["of", "w", "x", "coeff"], &rows),
    ))
}

pub fn canonical(ctx: &VerifyContext) -> Result<Outcome> {
    let g = ctx.group();
    let tl = ctx.tl()?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &w in tl.fully_commutative() {
        let c = tl.canonical(w);
        for (&x, p) in c {
            rows.push(vec![g.format(w), g.format(x), p.to_string()]);
        }
        results.push(json!({"w": g.format(w), "terms": comb_json(g, c)}));
    }
    Ok(Outcome::new(
        results,
        tl.canonical_dump(),
        csv_rows(&["w", "x", "coeff"], &rows),
    ))
}

/// A TL operand: `t:<word>` is `t~_w`, `b:<word>` is the monomial along the
/// word; a bare word means `t:`.
#[derive(Debug, Clone)]
pub enum TlArg {
    T(Element),
    B(Vec<Gen>),
}

pub fn parse_tl_arg(group: &CoxeterGroup, text: &str) -> Result<TlArg> {
    if let Some(rest) = text.strip_prefix("b:") {
        group.parse(rest)?;
        return Ok(TlArg::B(parse_word(rest, group.rank())?));
    }
    let rest = text.strip_prefix("t:").unwrap_or(text);
    Ok(TlArg::T(group.parse(rest)?))
}

pub fn tl_mult(ctx: &VerifyContext, u: &TlArg, v: &TlArg) -> Result<Outcome> {
    let g = ctx.group();
    let tl = ctx.tl()?;
    let eval = |a: &TlArg| -> TlElt {
        match a {
            TlArg::T(w) => tl.theta_t(*w).clone(),
            TlArg::B(word) => tl.b_of_word(word),
        }
    };
    let prod = tl.tl_mult(&eval(u), &eval(v));
    let in_b = tl.to_b_basis(&prod);
    let text = format!(
        "t: {}\nb: {}\n",
        format_comb(g, &prod, "t"),
        format_comb(g, &in_b, "b")
    );
    let mut rows = Vec::new();
    for (label, c) in [("t", &prod), ("b", &in_b)] {
        for (&x, p) in c {
            rows.push(vec![label.to_string(), g.format(x), p.to_string()]);
        }
    }
    Ok(Outcome::new(
        vec![
            json!({"basis": "t", "terms": comb_json(g, &prod)}),
            json!({"basis": "b", "terms": comb_json(g, &in_b)}),
        ],
        text,
        csv_rows(&["basis", "x", "coeff"], &rows),
    ))
}

fn witness_line(w: &Witness) -> String {
    let mut s = w.elements.join(" > ");
    if let Some(g) = w.generator {
        write!(s, " via s{g}").unwrap();
    }
    if let Some(side) = &w.side {
        write!(s, " ({side})").unwrap();
    }
    if let Some(c) = &w.coefficient {
        write!(s, " [{c}]").unwrap();
    }
    s
}

pub fn verdicts(verdicts: Vec<Verdict>) -> Outcome {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    let mut failed = false;
    for v in &verdicts {
        let status = if v.holds { "holds" } else { "fails" };
        writeln!(text, "{} {} {status}", v.group, v.check).unwrap();
        let wtext = v.witness.as_ref().map(witness_line).unwrap_or_default();
        if let Some(w) = &v.witness {
            failed = true;
            writeln!(text, "  witness: {wtext}").unwrap();
            witnesses.push(w.clone());
        }
        for w in &v.cell_witnesses {
            writeln!(text, "  cell witness: {}", witness_line(w)).unwrap();
        }
        failed |= !v.holds;
        rows.push(vec![
            v.group.clone(),
            v.check.clone(),
            v.holds.to_string(),
            wtext,
        ]);
    }
    let results = verdicts
        .iter()
        .map(|v| serde_json::to_value(v).expect("serializable"))
        .collect();
    Outcome {
        results,
        witnesses,
        text,
        csv: csv_rows(&["group", "check", "holds", "witness"], &rows),
        failed,
    }
}

pub fn corollary(rows: &[CorollaryRow]) -> Outcome {
    let mut text = String::new();
    let mut csv = Vec::new();
    let mut failed = false;
    for r in rows {
        writeln!(
            text,
            "{:<7} order={:<6} fc={:<5} union_of_cells={:<5} contains_d4={:<5} {}",
            r.group,
            r.order,
            r.fully_commutative,
            r.union_of_cells,
            r.contains_d4,
            if r.agrees { "agrees" } else { "DISAGREES" }
        )
        .unwrap();
        failed |= !r.agrees;
        csv.push(vec![
            r.group.clone(),
            r.order.to_string(),
            r.fully_commutative.to_string(),
            r.union_of_cells.to_string(),
            r.contains_d4.to_string(),
            r.agrees.to_string(),
        ]);
    }
    Outcome {
        results: rows
            .iter()
            .map(|r| serde_json::to_value(r).expect("serializable"))
            .collect(),
        witnesses: Vec::new(),
        text,
        csv: csv_rows(
            &[
                "group",
                "order",
                "fully_commutative",
                "union_of_cells",
                "contains_d4",
                "agrees",
            ],
            &csv,
        ),
        failed,
    }
}

pub fn intersections(ctx: &VerifyContext) -> Result<Outcome> {
    let g = ctx.group();
    let report = fc_cell_report(
        ctx.kl(),
        ctx.cells(CellSide::Left),
        ctx.cells(CellSide::Right),
        ctx.cells(CellSide::TwoSided),
    );
    let FcCellReport::Report(cells) = report else {
        return Err(Error::Contract(
            "fully commutative elements are not a union of two-sided cells".into(),
        ));
    };
    let fmt_opt = |d: Option<Element>| d.map(|d| g.format(d)).unwrap_or_else(|| "-".into());
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        writeln!(
            text,
            "two-sided cell {ci}: {} elements, {} left cells, {} right cells",
            cell.elements.len(),
            cell.left_cells.len(),
            cell.right_cells.len()
        )
        .unwrap();
        for (li, lc) in cell.left_cells.iter().enumerate() {
            writeln!(
                text,
                "  left cell {li}: {} elements, {} involutions, distinguished {}",
                lc.len(),
                cell.involutions[li].len(),
                fmt_opt(cell.distinguished[li])
            )
            .unwrap();
        }
        let mut inters = Vec::new();
        for it in &cell.intersections {
            let pred = it
                .predicted
                .map(|p| p.to_string())
                .unwrap_or_else(|| "-".into());
            writeln!(
                text,
                "  R{} x L{}: k={} predicted={pred} d={} d'={}",
                it.right_cell,
                it.left_cell,
                it.k,
                fmt_opt(it.d),
                fmt_opt(it.d_prime)
            )
            .unwrap();
            rows.push(vec![
                ci.to_string(),
                it.right_cell.to_string(),
                it.left_cell.to_string(),
                fmt_opt(it.d),
                fmt_opt(it.d_prime),
                it.k.to_string(),
                pred,
            ]);
            inters.push(json!({
                "right_cell": it.right_cell,
                "left_cell": it.left_cell,
                "d": it.d.map(|d| g.format(d)),
                "d_prime": it.d_prime.map(|d| g.format(d)),
                "k": it.k,
                "predicted": it.predicted,
            }));
        }
        results.push(json!({
            "cell": ci,
            "minimal": g.format(cell.elements[0]),
            "size": cell.elements.len(),
            "left_cells": cell.left_cells.iter().map(|c| g.format(c[0])).collect::<Vec<_>>(),
            "right_cells": cell.right_cells.iter().map(|c| g.format(c[0])).collect::<Vec<_>>(),
            "distinguished": cell.distinguished.iter().map(|d| d.map(|d| g.format(d))).collect::<Vec<_>>(),
            "intersections": inters,
        }));
    }
    let rule = verify::intersection_rule(ctx)?.without_timing();
    let invols = verify::involution_check(ctx)?.without_timing();
    let mut out = verdicts(vec![rule, invols]);
    out.text = text + &out.text;
    out.results = results.into_iter().chain(out.results).collect();
    out.csv = csv_rows(
        &[
            "two_sided",
            "right_cell",
            "left_cell",
            "d",
            "d_prime",
            "k",
            "predicted",
        ],
        &rows,
    );
    Ok(out)
}
