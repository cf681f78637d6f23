use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use mtc_core::analyze::{self, Pattern};
use mtc_core::format::{self, Document};
use mtc_core::fusion::dihedral_rep_ring;
use mtc_core::moddata::{deligne_product, equivalent_data, ModularData};
use mtc_core::zoo;

use crate::{Cli, Command, Family, Predicate};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

/// What to print, and whether the finding was positive (exit 0) or not (exit 1).
pub struct Outcome {
    pub text: String,
    pub positive: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, positive: true }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Construct { family, output } => {
            let text = construct(family)?;
            match output {
                Some(path) => {
                    fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
                    Ok(Outcome::ok(String::new()))
                }
                None => Ok(Outcome::ok(text)),
            }
        }
        Command::Verify { path } => verify(cli, path),
        Command::Analyze { path, predicates, p, m } => analyze_file(cli, path, predicates, *p, *m),
        Command::Condense { path, boson } => condense(cli, path, boson),
        Command::Enumerate { metaplectic_count, cyclic_classes } => {
            match (metaplectic_count, cyclic_classes) {
                (Some(n), _) => count(cli, *n),
                (None, Some(n)) => classes(cli, *n),
                (None, None) => Err("nothing to enumerate".into()),
            }
        }
        Command::Compare { left, right } => compare(cli, left, right),
    }
}

fn read(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    format::parse_document(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn read_data(path: &Path) -> Result<ModularData> {
    match read(path)? {
        Document::Data(md) => Ok(md),
        _ => Err(format!("{}: expected a modular_data document", path.display()).into()),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable report");
    s.push('\n');
    s
}

fn construct(family: &Family) -> Result<String> {
    Ok(match family {
        Family::Cyclic { n, a, semion } => {
            let mg = zoo::cyclic_form(*n, *a, *semion)?;
            format::data_to_json(&zoo::pointed_data(&mg)?)
        }
        Family::Semion { sign } => format::data_to_json(&zoo::semion(*sign)),
        Family::Ising { nu } => format::data_to_json(&zoo::ising(*nu)?),
        Family::Metaplectic { n } => format::data_to_json(&zoo::metaplectic_data(*n)?),
        Family::Deligne { left, right } => {
            format::data_to_json(&deligne_product(&read_data(left)?, &read_data(right)?)?)
        }
        Family::Z2z2Family => format::data_list_to_json(&zoo::z2z2_premodular_family()),
        Family::DihedralRing { m } => format::ring_to_json(&dihedral_rep_ring(*m)?),
    })
}

fn verify(cli: &Cli, path: &Path) -> Result<Outcome> {
    let members = match read(path)? {
        Document::Data(md) => vec![md],
        Document::DataList(list) => list,
        Document::Ring(ring) => {
            let report = ring.validate();
            let text = if cli.json {
                to_json(&report)
            } else if report.is_valid() {
                format!("ok: fusion ring of rank {}\n", ring.rank())
            } else {
                report.failures.iter().map(|f| format!("{f}\n")).collect()
            };
            return Ok(Outcome { text, positive: report.is_valid() });
        }
    };
    let reports: Vec<_> = members.iter().map(ModularData::verify).collect();
    let positive = reports.iter().all(|r| r.passed());
    let text = if cli.json {
        if reports.len() == 1 {
            to_json(&reports[0])
        } else {
            to_json(&reports)
        }
    } else if reports.len() == 1 {
        reports[0].to_string()
    } else {
        reports.iter().enumerate().map(|(i, r)| format!("member {i}: {r}")).collect()
    };
    Ok(Outcome { text, positive })
}

fn default_predicates(shape: bool) -> Vec<Predicate> {
    let mut out = vec![
        Predicate::Swi,
        Predicate::Semion,
        Predicate::Ising,
        Predicate::TannakianZ2,
        Predicate::Primality,
        Predicate::Metaplectic,
    ];
    if shape {
        out.extend([Predicate::Pointedness, Predicate::Theorem]);
    }
    out.sort();
    out
}

fn predicate_name(p: Predicate) -> &'static str {
    match p {
        Predicate::Swi => "swi",
        Predicate::Pointedness => "pointedness",
        Predicate::Semion => "semion",
        Predicate::Ising => "ising",
        Predicate::TannakianZ2 => "tannakian-z2",
        Predicate::Primality => "primality",
        Predicate::Metaplectic => "metaplectic",
        Predicate::Theorem => "theorem",
    }
}

fn analyze_file(cli: &Cli, path: &Path, predicates: &[Predicate], p: Option<u64>, m: Option<u64>) -> Result<Outcome> {
    let md = read_data(path)?;
    let mut list = if predicates.is_empty() {
        default_predicates(p.is_some() && m.is_some())
    } else {
        predicates.to_vec()
    };
    list.dedup();
    let shape = || -> Result<(u64, u64)> {
        match (p, m) {
            (Some(p), Some(m)) => Ok((p, m)),
            _ => Err("this predicate needs --p and --m".into()),
        }
    };
    let mut positive = true;
    let mut text = String::new();
    let mut reports = Map::new();
    for pred in list {
        let name = predicate_name(pred);
        let (value, line) = match pred {
            Predicate::Swi => {
                let r = analyze::check_swi_divisibility(&md)?;
                positive &= r.holds;
                let kind = if r.integral { "integral" } else { "strictly weakly integral" };
                let verdict = if r.holds { "holds" } else { "FAILS" };
                (json!(r), format!("{verdict} (D = {}, {kind})", r.global_dim))
            }
            Predicate::Pointedness => {
                let (p, m) = shape()?;
                let r = analyze::pointedness_criteria(&md, p, m)?;
                positive &= r.holds();
                let mut line = format!("D = {p}^{} * {m}, pointed part of dimension {}", r.k, r.pointed_dim);
                for i in &r.implications {
                    let how = match (i.holds, i.is_vacuous()) {
                        (false, _) => "FAILS",
                        (true, true) => "holds vacuously",
                        (true, false) => "holds",
                    };
                    let _ = write!(line, "\n  {}: {how}", i.name);
                }
                (json!(r), line)
            }
            Predicate::Semion | Predicate::Ising | Predicate::TannakianZ2 => {
                let pattern = match pred {
                    Predicate::Semion => Pattern::Semion,
                    Predicate::Ising => Pattern::Ising,
                    _ => Pattern::TannakianZ2,
                };
                let w = analyze::detect_subdata(&md, pattern)?;
                let line = match &w {
                    Some(w) => format!("found {{{}}} ({})", w.names.join(", "), w.reference),
                    None => "absent".into(),
                };
                (json!(w), line)
            }
            Predicate::Primality => {
                let r = analyze::primality(&md)?;
                let line = match &r.witness {
                    Some(w) => format!(
                        "not prime: {{{}}} x {{{}}}",
                        w.left_names.join(", "),
                        w.right_names.join(", ")
                    ),
                    None => format!("prime ({} spans examined)", r.spans_examined),
                };
                (json!(r), line)
            }
            Predicate::Metaplectic => {
                let r = analyze::recognize_metaplectic(&md)?;
                let line = match &r {
                    Some(found) => format!("N = {}", found.n),
                    None => "not metaplectic".into(),
                };
                (json!(r), line)
            }
            Predicate::Theorem => {
                let (p, m) = shape()?;
                let r = analyze::theorem_conclusions(&md, p, m)?;
                positive &= r.holds;
                let verdict = if r.holds { "holds" } else { "FAILS" };
                let mut line = format!("{verdict}: {}", r.statement);
                for b in r.branches.iter().filter(|b| b.holds) {
                    let _ = write!(line, "\n  case {}", b.name);
                    if let Some(d) = &b.detail {
                        let _ = write!(line, " ({d})");
                    }
                }
                (json!(r), line)
            }
        };
        reports.insert(name.to_string(), value);
        let _ = writeln!(text, "{name}: {line}");
    }
    let text = if cli.json { to_json(&Value::Object(reports)) } else { text };
    Ok(Outcome { text, positive })
}

fn condense(cli: &Cli, path: &Path, boson: &str) -> Result<Outcome> {
    let md = read_data(path)?;
    let b = md.label(boson)?;
    let r = analyze::condense_boson(&md, b)?;
    let text = if cli.json {
        to_json(&r)
    } else {
        let mut s = format!("{}\n", r.summary());
        if cli.verbose {
            let _ = writeln!(s, "condensed dimension {} (parent {})", r.condensed_dim, r.parent_dim);
            for c in &r.inventory {
                let _ = writeln!(s, "  {} dim {}", c.name, analyze::dim_label(&c.dim));
            }
        }
        s
    };
    Ok(Outcome { text, positive: r.conserved })
}

fn count(cli: &Cli, n: u64) -> Result<Outcome> {
    let c = analyze::count_metaplectic(n)?;
    let text = if cli.json {
        to_json(&c)
    } else {
        let mut s = format!("{}\n", c.count);
        if cli.verbose {
            let _ = writeln!(s, "r = {}, {} forms in {} classes on Z_{}", c.r, c.forms, c.classes, 2 * n);
            for (q, k) in &c.per_prime {
                let _ = writeln!(s, "  Z_{q}: {k} classes");
            }
            let _ = writeln!(s, "  Z_2: {} classes; times {} for H^3", c.semion_classes, c.h3_choices);
        }
        s
    };
    Ok(Outcome { text, positive: c.matches() })
}

fn classes(cli: &Cli, n: u64) -> Result<Outcome> {
    let classes = zoo::cyclic_form_classes(n)?;
    let text = if cli.json {
        to_json(&json!({ "n": n, "count": classes.len(), "classes": classes }))
    } else {
        let mut s = format!("{}\n", classes.len());
        if cli.verbose {
            for c in &classes {
                let _ = writeln!(s, "  {c:?}");
            }
        }
        s
    };
    Ok(Outcome::ok(text))
}

fn compare(cli: &Cli, left: &Path, right: &Path) -> Result<Outcome> {
    let (a, b) = (read_data(left)?, read_data(right)?);
    let phi = equivalent_data(&a, &b);
    let text = if cli.json {
        to_json(&json!({ "equivalent": phi.is_some(), "bijection": phi }))
    } else {
        match &phi {
            Some(map) => map.iter().enumerate().map(|(x, &y)| format!("{} -> {}\n", a.name(x), b.name(y))).collect(),
            None => "not equivalent\n".into(),
        }
    };
    Ok(Outcome { text, positive: phi.is_some() })
}
