//! LP-format text export (`Minimize` / `Subject To` / `Bounds` / `Binary` /
//! `End`) with deterministic name sanitisation, plus a re-parser used to
//! verify round trips.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::milp::{MilpModel, Relation, VarKind};

#[derive(Debug, Error)]
pub enum LpParseError {
    #[error("LP parse error on line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameMapEntry {
    /// `"variable"` or `"constraint"`.
    pub kind: &'static str,
    pub original: String,
    pub sanitized: String,
}

#[derive(Debug, Clone)]
pub struct LpExport {
    pub text: String,
    /// Original → sanitised names, in emission order.
    pub name_map: Vec<NameMapEntry>,
}

impl LpExport {
    /// Sidecar text mapping sanitised names back to the originals
    /// (`kind,sanitized,original` per line).
    pub fn name_map_text(&self) -> String {
        let mut out = String::from("kind,sanitized,original\n");
        for e in &self.name_map {
            out.push_str(&format!("{},{},{:?}\n", e.kind, e.sanitized, e.original));
        }
        out
    }
}

/// Maps a name onto the `[A-Za-z0-9_]` alphabet, prefixing names that would
/// start with a non-letter. Uniqueness against `used` is enforced with a
/// numeric suffix.
fn sanitize(name: &str, used: &mut BTreeMap<String, ()>) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() || !(s.as_bytes()[0].is_ascii_alphabetic() || s.as_bytes()[0] == b'_') {
        s.insert(0, 'x');
    }
    if used.contains_key(&s) {
        let mut k = 2usize;
        loop {
            let candidate = format!("{s}_{k}");
            if !used.contains_key(&candidate) {
                s = candidate;
                break;
            }
            k += 1;
        }
    }
    used.insert(s.clone(), ());
    s
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn push_terms(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    for &(j, c) in terms {
        if c < 0.0 {
            out.push_str(&format!(" - {} {}", fmt_num(-c), names[j]));
        } else {
            out.push_str(&format!(" + {} {}", fmt_num(c), names[j]));
        }
    }
}

/// Writes the model as LP-format text. Variable and constraint names are
/// sanitised deterministically; the mapping is returned alongside the text.
pub fn export_lp(model: &MilpModel) -> LpExport {
    let mut used_vars = BTreeMap::new();
    let mut used_cons = BTreeMap::new();
    let mut name_map = Vec::new();

    let var_names: Vec<String> = model
        .variables
        .iter()
        .map(|v| {
            let s = sanitize(&v.name, &mut used_vars);
            name_map.push(NameMapEntry { kind: "variable", original: v.name.clone(), sanitized: s.clone() });
            s
        })
        .collect();
    let con_names: Vec<String> = model
        .constraints
        .iter()
        .map(|c| {
            let s = sanitize(&c.name, &mut used_cons);
            name_map.push(NameMapEntry { kind: "constraint", original: c.name.clone(), sanitized: s.clone() });
            s
        })
        .collect();

    let mut objective: Vec<(usize, f64)> = Vec::new();
    for &(v, c) in &model.objective {
        match objective.iter_mut().find(|(j, _)| *j == v.index()) {
            Some((_, acc)) => *acc += c,
            None => objective.push((v.index(), c)),
        }
    }

    let mut text = String::from("\\ LP export\nMinimize\n obj:");
    push_terms(&mut text, &objective, &var_names);
    text.push_str("\nSubject To\n");
    for (c, cname) in model.constraints.iter().zip(&con_names) {
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for &(v, a) in &c.terms {
            match merged.iter_mut().find(|(j, _)| *j == v.index()) {
                Some((_, acc)) => *acc += a,
                None => merged.push((v.index(), a)),
            }
        }
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let mut line = format!(" {cname}:");
        push_terms(&mut line, &merged, &var_names);
        text.push_str(&format!("{line} {rel} {}\n", fmt_num(c.rhs)));
    }

    text.push_str("Bounds\n");
    for (v, name) in model.variables.iter().zip(&var_names) {
        let default_binary = v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0;
        let default_continuous =
            v.kind == VarKind::Continuous && v.lower == 0.0 && v.upper == f64::INFINITY;
        if default_binary || default_continuous {
            continue;
        }
        let line = if v.lower == v.upper {
            format!(" {name} = {}", fmt_num(v.lower))
        } else if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            format!(" {name} free")
        } else if v.lower == f64::NEG_INFINITY {
            format!(" -inf <= {name} <= {}", fmt_num(v.upper))
        } else if v.upper == f64::INFINITY {
            format!(" {name} >= {}", fmt_num(v.lower))
        } else {
            format!(" {} <= {name} <= {}", fmt_num(v.lower), fmt_num(v.upper))
        };
        text.push_str(&line);
        text.push('\n');
    }

    let binaries: Vec<&String> = model
        .variables
        .iter()
        .zip(&var_names)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        text.push_str("Binary\n");
        for chunk in binaries.chunks(8) {
            text.push(' ');
            text.push_str(&chunk.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "));
            text.push('\n');
        }
    }
    text.push_str("End\n");

    LpExport { text, name_map }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binary,
    Done,
}

fn parse_bound_num(tok: &str, line: usize) -> Result<f64, LpParseError> {
    let t = tok.to_ascii_lowercase();
    match t.as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse::<f64>().map_err(|_| LpParseError::Syntax {
            line,
            message: format!("expected a number, found {tok:?}"),
        }),
    }
}

struct Parser {
    model: MilpModel,
    ids: BTreeMap<String, crate::milp::VarId>,
    explicit_bounds: Vec<bool>,
    con_count: usize,
}

impl Parser {
    fn intern(&mut self, name: &str) -> crate::milp::VarId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.model.add_variable(name, VarKind::Continuous, 0.0, f64::INFINITY);
        self.ids.insert(name.to_string(), id);
        self.explicit_bounds.push(false);
        id
    }

    /// Turns `[+|-] [number] ident` token runs into (var, coeff) terms.
    fn parse_expr(
        &mut self,
        toks: &[(String, usize)],
    ) -> Result<Vec<(crate::milp::VarId, f64)>, LpParseError> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        let mut coeff: Option<f64> = None;
        for (tok, line) in toks {
            match tok.as_str() {
                "+" => {}
                "-" => sign = -sign,
                _ => {
                    if let Ok(num) = tok.parse::<f64>() {
                        if coeff.is_some() {
                            return Err(LpParseError::Syntax {
                                line: *line,
                                message: "two consecutive numbers in expression".into(),
                            });
                        }
                        coeff = Some(num);
                    } else {
                        let id = self.intern(tok);
                        terms.push((id, sign * coeff.unwrap_or(1.0)));
                        sign = 1.0;
                        coeff = None;
                    }
                }
            }
        }
        if coeff.is_some() {
            return Err(LpParseError::Syntax {
                line: toks.last().map(|(_, l)| *l).unwrap_or(0),
                message: "dangling coefficient at end of expression".into(),
            });
        }
        Ok(terms)
    }

    fn flush_objective(
        &mut self,
        pending: &mut Vec<(String, usize)>,
        negate: bool,
    ) -> Result<(), LpParseError> {
        let mut toks = std::mem::take(pending);
        if let Some((first, _)) = toks.first() {
            if first.ends_with(':') {
                toks.remove(0);
            }
        }
        let terms = self.parse_expr(&toks)?;
        for (v, c) in terms {
            self.model.add_objective_term(v, if negate { -c } else { c });
        }
        Ok(())
    }

    fn finish_constraint(&mut self, toks: &mut Vec<(String, usize)>) -> Result<(), LpParseError> {
        if toks.is_empty() {
            return Ok(());
        }
        let line = toks[0].1;
        let mut name = format!("r{}", self.con_count);
        if toks[0].0.ends_with(':') {
            name = toks[0].0.trim_end_matches(':').to_string();
            toks.remove(0);
        }
        self.con_count += 1;
        let rel_pos = toks
            .iter()
            .position(|(t, _)| matches!(t.as_str(), "<=" | ">=" | "=" | "<" | ">" | "=<" | "=>"))
            .ok_or_else(|| LpParseError::Syntax {
                line,
                message: format!("constraint {name:?} has no relation operator"),
            })?;
        let relation = match toks[rel_pos].0.as_str() {
            "<=" | "<" | "=<" => Relation::Le,
            ">=" | ">" | "=>" => Relation::Ge,
            _ => Relation::Eq,
        };
        if rel_pos + 1 >= toks.len() {
            return Err(LpParseError::Syntax { line, message: "missing right-hand side".into() });
        }
        // Right-hand side may carry its own sign token.
        let mut rhs_sign = 1.0;
        let mut idx = rel_pos + 1;
        if toks[idx].0 == "-" {
            rhs_sign = -1.0;
            idx += 1;
        } else if toks[idx].0 == "+" {
            idx += 1;
        }
        if idx + 1 != toks.len() {
            return Err(LpParseError::Syntax {
                line,
                message: "unexpected tokens after right-hand side".into(),
            });
        }
        let rhs = rhs_sign * parse_bound_num(&toks[idx].0, toks[idx].1)?;
        let terms = self.parse_expr(&toks[..rel_pos])?;
        self.model.add_constraint(name, terms, relation, rhs);
        toks.clear();
        Ok(())
    }

    fn set_bounds(&mut self, id: crate::milp::VarId, lo: f64, up: f64) {
        let v = &mut self.model.variables[id.index()];
        v.lower = lo;
        v.upper = up;
        self.explicit_bounds[id.index()] = true;
    }

    fn bounds_line(&mut self, line: &str, line_no: usize) -> Result<(), LpParseError> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [name, kw] if kw.eq_ignore_ascii_case("free") => {
                let id = self.intern(name);
                self.set_bounds(id, f64::NEG_INFINITY, f64::INFINITY);
                Ok(())
            }
            [a, op1, name, op2, b] if matches!(*op1, "<=" | "<") && matches!(*op2, "<=" | "<") => {
                let lo = parse_bound_num(a, line_no)?;
                let up = parse_bound_num(b, line_no)?;
                let id = self.intern(name);
                self.set_bounds(id, lo, up);
                Ok(())
            }
            [name, op, v] => {
                let val = parse_bound_num(v, line_no)?;
                let id = self.intern(name);
                let (lo, up) = {
                    let var = &self.model.variables[id.index()];
                    match *op {
                        "<=" | "<" => (var.lower, val),
                        ">=" | ">" => (val, var.upper),
                        "=" => (val, val),
                        _ => {
                            return Err(LpParseError::Syntax {
                                line: line_no,
                                message: format!("unrecognised bound operator {op:?}"),
                            })
                        }
                    }
                };
                self.set_bounds(id, lo, up);
                Ok(())
            }
            _ => Err(LpParseError::Syntax {
                line: line_no,
                message: format!("unrecognised bounds line: {line:?}"),
            }),
        }
    }
}

/// Parses LP-format text back into a bare model (variables, constraints,
/// objective — no flow registry). Covers the dialect written by
/// [`export_lp`].
pub fn parse_lp(text: &str) -> Result<MilpModel, LpParseError> {
    let mut p = Parser {
        model: MilpModel::new(),
        ids: BTreeMap::new(),
        explicit_bounds: Vec::new(),
        con_count: 0,
    };
    let mut section = Section::Preamble;
    let mut negate_objective = false;
    // Token accumulator for the objective and constraint sections; both may
    // span lines.
    let mut pending: Vec<(String, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        let keyword = match lower.as_str() {
            "minimize" | "minimise" | "min" => Some(Section::Objective),
            "maximize" | "maximise" | "max" => {
                negate_objective = true;
                Some(Section::Objective)
            }
            "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" | "bound" => Some(Section::Bounds),
            "binary" | "binaries" | "bin" => Some(Section::Binary),
            "end" => Some(Section::Done),
            "general" | "generals" | "integer" | "integers" => {
                return Err(LpParseError::Syntax {
                    line: line_no,
                    message: "general integer sections are not supported".into(),
                })
            }
            _ => None,
        };
        if let Some(next) = keyword {
            match section {
                Section::Objective => p.flush_objective(&mut pending, negate_objective)?,
                Section::Constraints => p.finish_constraint(&mut pending)?,
                _ => {}
            }
            section = next;
            continue;
        }

        match section {
            Section::Preamble => {
                return Err(LpParseError::Syntax {
                    line: line_no,
                    message: format!("unexpected content before objective: {line:?}"),
                })
            }
            Section::Done => {
                return Err(LpParseError::Syntax {
                    line: line_no,
                    message: "content after End".into(),
                })
            }
            Section::Objective => {
                for tok in line.split_whitespace() {
                    pending.push((tok.to_string(), line_no));
                }
            }
            Section::Constraints => {
                // A new label token means the previous constraint is complete.
                for tok in line.split_whitespace() {
                    if tok.ends_with(':') && !pending.is_empty() {
                        p.finish_constraint(&mut pending)?;
                    }
                    pending.push((tok.to_string(), line_no));
                }
                if pending
                    .iter()
                    .any(|(t, _)| matches!(t.as_str(), "<=" | ">=" | "=" | "<" | ">" | "=<" | "=>"))
                {
                    p.finish_constraint(&mut pending)?;
                }
            }
            Section::Bounds => p.bounds_line(line, line_no)?,
            Section::Binary => {
                for tok in line.split_whitespace() {
                    let id = p.intern(tok);
                    p.model.variables[id.index()].kind = VarKind::Binary;
                    if !p.explicit_bounds[id.index()] {
                        p.model.variables[id.index()].lower = 0.0;
                        p.model.variables[id.index()].upper = 1.0;
                    }
                }
            }
        }
    }

    match section {
        Section::Done => Ok(p.model),
        _ => Err(LpParseError::Syntax { line: text.lines().count(), message: "missing End".into() }),
    }
}
