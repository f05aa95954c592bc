//! CPLEX-style LP text format.
//!
//! The writer emits `Maximize|Minimize`, `Subject To`, `Bounds`, `Binaries`
//! and `End` sections. Every variable gets an explicit bounds entry, which
//! also pins the variable order on re-read, so `export(parse(export(lp)))`
//! reproduces the first export byte for byte. The reader accepts the common
//! spellings of the section keywords and the usual bound and sense forms;
//! general integers and semi-continuous sections are rejected.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Direction, LinearProgram, LpError, Sense, VarId, VarKind};

const TERMS_PER_LINE: usize = 8;
const MAX_NAME_LEN: usize = 255;
const RESERVED: &[&str] = &["inf", "infinity", "free", "st", "end", "bounds", "binaries", "binary", "bin"];

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(c)
}

fn is_name_start(c: char) -> bool {
    is_name_char(c) && !c.is_ascii_digit() && c != '.'
}

pub(crate) fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if name.len() > MAX_NAME_LEN || !is_name_start(first) || !name.chars().all(is_name_char) {
        return false;
    }
    // `e12` reads as an exponent in some parsers.
    if matches!(first, 'e' | 'E') && chars.next().is_some_and(|c| c.is_ascii_digit()) {
        return false;
    }
    !RESERVED.contains(&name.to_ascii_lowercase().as_str())
}

fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn write_terms(out: &mut String, lp: &LinearProgram, terms: &[(VarId, f64)]) {
    for (k, &(v, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let name = &lp.variables[v.0].name;
        if k == 0 {
            let _ = write!(out, " {} {}", num(c), name);
        } else if c < 0.0 {
            let _ = write!(out, " - {} {}", num(-c), name);
        } else {
            let _ = write!(out, " + {} {}", num(c), name);
        }
    }
}

pub fn export_lp_text(lp: &LinearProgram) -> Result<String, LpError> {
    lp.validate()?;
    for var in &lp.variables {
        if !valid_name(&var.name) {
            return Err(LpError::InvalidName(var.name.clone()));
        }
    }
    for con in &lp.constraints {
        if !valid_name(&con.name) || (con.terms.is_empty() && lp.variables.is_empty()) {
            return Err(LpError::InvalidName(con.name.clone()));
        }
    }

    let mut out = String::new();
    out.push_str(match lp.objective.direction {
        Direction::Maximize => "Maximize\n",
        Direction::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    if lp.objective.terms.is_empty() && !lp.variables.is_empty() {
        let _ = write!(out, " 0 {}", lp.variables[0].name);
    }
    write_terms(&mut out, lp, &lp.objective.terms);
    out.push('\n');

    if !lp.constraints.is_empty() {
        out.push_str("Subject To\n");
        for con in &lp.constraints {
            let _ = write!(out, " {}:", con.name);
            if con.terms.is_empty() {
                let _ = write!(out, " 0 {}", lp.variables[0].name);
            }
            write_terms(&mut out, lp, &con.terms);
            let _ = writeln!(out, " {} {}", con.sense, num(con.rhs));
        }
    }

    if !lp.variables.is_empty() {
        out.push_str("Bounds\n");
        for var in &lp.variables {
            let _ = writeln!(out, " {} <= {} <= {}", num(var.lower), var.name, num(var.upper));
        }
    }

    let binaries: Vec<&str> =
        lp.variables.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for name in binaries {
            let _ = writeln!(out, " {name}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Colon,
    Sense(Sense),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

fn err(line: usize, message: impl Into<String>) -> LpError {
    LpError::Parse { line, message: message.into() }
}

fn lex_line(line: &str, lineno: usize, out: &mut Vec<(Tok, usize)>) -> Result<(), LpError> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\\' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let tok = match c {
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' => {
                i += 1;
                Tok::Minus
            }
            ':' => {
                i += 1;
                Tok::Colon
            }
            '<' | '>' | '=' => {
                let (sense, width) = match (c, next) {
                    ('<', Some('=')) | ('=', Some('<')) => (Sense::Le, 2),
                    ('>', Some('=')) | ('=', Some('>')) => (Sense::Ge, 2),
                    ('<', _) => (Sense::Le, 1),
                    ('>', _) => (Sense::Ge, 1),
                    _ => (Sense::Eq, 1),
                };
                i += width;
                Tok::Sense(sense)
            }
            c if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && matches!(chars[j], '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<f64>().map_err(|_| err(lineno, format!("bad number `{text}`")))?;
                Tok::Num(value)
            }
            c if is_name_start(c) => {
                let start = i;
                while i < chars.len() && is_name_char(chars[i]) {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                match name.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" => Tok::Num(f64::INFINITY),
                    _ => Tok::Name(name),
                }
            }
            other => return Err(err(lineno, format!("unexpected character `{other}`"))),
        };
        out.push((tok, lineno));
    }
    Ok(())
}

fn section_keyword(line: &str) -> Option<Result<Section, String>> {
    let key = line.split_whitespace().collect::<Vec<_>>().join(" ").to_ascii_lowercase();
    Some(Ok(match key.as_str() {
        "maximize" | "maximise" | "maximum" | "max" => Section::Objective,
        "minimize" | "minimise" | "minimum" | "min" => Section::Objective,
        "subject to" | "such that" | "st" | "s.t." => Section::Constraints,
        "bounds" | "bound" => Section::Bounds,
        "binaries" | "binary" | "bin" => Section::Binaries,
        "end" => Section::End,
        "general" | "generals" | "gen" | "semi-continuous" | "semis" | "semi" | "sos" => {
            return Some(Err(format!("unsupported section `{key}`")))
        }
        _ => return None,
    }))
}

#[derive(Default)]
struct Names {
    order: Vec<String>,
    index: HashMap<String, usize>,
}

impl Names {
    fn id(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.order.push(name.to_string());
        self.index.insert(name.to_string(), self.order.len() - 1);
        self.order.len() - 1
    }
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    last_line: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, l)| l).unwrap_or(self.last_line)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn at_label(&self) -> bool {
        matches!(
            (self.toks.get(self.pos), self.toks.get(self.pos + 1)),
            (Some((Tok::Name(_), _)), Some((Tok::Colon, _)))
        )
    }

    fn signed_number(&mut self) -> Result<f64, LpError> {
        let line = self.line();
        let mut sign = 1.0;
        loop {
            match self.next() {
                Some(Tok::Plus) => {}
                Some(Tok::Minus) => sign = -sign,
                Some(Tok::Num(v)) => return Ok(sign * v),
                _ => return Err(err(line, "expected a number")),
            }
        }
    }

    /// Linear expression terms up to (not including) a sense token, a label
    /// or the end of the section.
    fn terms(&mut self, names: &mut Names, stop_at_label: bool) -> Result<Vec<(usize, f64)>, LpError> {
        let mut terms = Vec::new();
        loop {
            if stop_at_label && !terms.is_empty() && self.at_label() {
                return Ok(terms);
            }
            match self.peek() {
                None | Some(Tok::Sense(_)) => return Ok(terms),
                _ => {}
            }
            let line = self.line();
            let mut sign = 1.0;
            let mut coef = None;
            let mut seen_sign = false;
            loop {
                match self.peek() {
                    Some(Tok::Plus) => {
                        seen_sign = true;
                        self.pos += 1;
                    }
                    Some(Tok::Minus) => {
                        seen_sign = true;
                        sign = -sign;
                        self.pos += 1;
                    }
                    _ => break,
                }
            }
            if !seen_sign && !terms.is_empty() {
                return Err(err(line, "expected `+` or `-` between terms"));
            }
            if let Some(Tok::Num(v)) = self.peek() {
                coef = Some(*v);
                self.pos += 1;
            }
            match self.next() {
                Some(Tok::Name(name)) => terms.push((names.id(&name), sign * coef.unwrap_or(1.0))),
                _ => return Err(err(line, "expected a variable name")),
            }
        }
    }
}

pub fn parse_lp_text(text: &str) -> Result<LinearProgram, LpError> {
    let mut direction = None;
    let mut section = Section::Preamble;
    let mut chunks: Vec<(Section, Vec<(Tok, usize)>)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let content = line.split('\\').next().unwrap_or("");
        if let Some(kw) = section_keyword(content) {
            let next = kw.map_err(|m| err(lineno, m))?;
            if next == Section::Objective {
                if direction.is_some() {
                    return Err(err(lineno, "second objective section"));
                }
                let lower = content.trim().to_ascii_lowercase();
                direction = Some(if lower.starts_with("max") { Direction::Maximize } else { Direction::Minimize });
            }
            section = next;
            chunks.push((section, Vec::new()));
            continue;
        }
        if content.trim().is_empty() {
            continue;
        }
        match section {
            Section::Preamble => return Err(err(lineno, "content before the objective section")),
            Section::End => return Err(err(lineno, "content after `End`")),
            _ => {}
        }
        let (_, toks) = chunks.last_mut().expect("a section is open");
        lex_line(content, lineno, toks)?;
    }
    let last_line = text.lines().count();
    let direction = direction.ok_or_else(|| err(last_line, "missing objective section"))?;

    let mut names = Names::default();
    let mut objective = Vec::new();
    let mut rows: Vec<(String, Vec<(usize, f64)>, Sense, f64)> = Vec::new();
    let mut bounds: Vec<(usize, Option<f64>, Option<f64>)> = Vec::new();
    let mut binaries: Vec<usize> = Vec::new();

    for (sec, toks) in &chunks {
        let mut cur = Cursor { toks, pos: 0, last_line };
        match sec {
            Section::Objective => {
                if cur.at_label() {
                    cur.pos += 2;
                }
                objective.extend(cur.terms(&mut names, false)?);
                if cur.peek().is_some() {
                    return Err(err(cur.line(), "unexpected token in objective"));
                }
            }
            Section::Constraints => {
                while cur.peek().is_some() {
                    let name = if cur.at_label() {
                        let Some(Tok::Name(n)) = cur.next() else { unreachable!() };
                        cur.pos += 1;
                        n
                    } else {
                        format!("c{}", rows.len() + 1)
                    };
                    let line = cur.line();
                    let terms = cur.terms(&mut names, true)?;
                    let Some(Tok::Sense(sense)) = cur.next() else {
                        return Err(err(line, format!("constraint `{name}` has no sense")));
                    };
                    let rhs = cur.signed_number()?;
                    rows.push((name, terms, sense, rhs));
                }
            }
            Section::Bounds => {
                while cur.peek().is_some() {
                    parse_bound(&mut cur, &mut names, &mut bounds)?;
                }
            }
            Section::Binaries => {
                for (tok, line) in toks.iter() {
                    match tok {
                        Tok::Name(n) => binaries.push(names.id(n)),
                        _ => return Err(err(*line, "expected a variable name")),
                    }
                }
            }
            Section::Preamble | Section::End => {}
        }
    }

    // Bounds-section order first: the writer lists every variable there.
    let mut order: Vec<usize> = Vec::with_capacity(names.order.len());
    let mut placed = vec![false; names.order.len()];
    for &(v, _, _) in &bounds {
        if !placed[v] {
            placed[v] = true;
            order.push(v);
        }
    }
    for v in 0..names.order.len() {
        if !placed[v] {
            order.push(v);
        }
    }
    let mut remap = vec![0; names.order.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }

    let mut lower = vec![None; names.order.len()];
    let mut upper = vec![None; names.order.len()];
    for &(v, lo, hi) in &bounds {
        if lo.is_some() {
            lower[v] = lo;
        }
        if hi.is_some() {
            upper[v] = hi;
        }
    }
    let mut is_binary = vec![false; names.order.len()];
    for &b in &binaries {
        is_binary[b] = true;
    }

    let mut lp = LinearProgram::new(direction);
    for &old in &order {
        let (lo, hi, kind) = if is_binary[old] {
            (lower[old].unwrap_or(0.0), upper[old].unwrap_or(1.0), VarKind::Binary)
        } else {
            (lower[old].unwrap_or(0.0), upper[old].unwrap_or(f64::INFINITY), VarKind::Continuous)
        };
        lp.add_var(names.order[old].clone(), lo, hi, kind);
    }
    lp.set_objective(objective.into_iter().map(|(v, c)| (VarId(remap[v]), c)).collect());
    for (name, terms, sense, rhs) in rows {
        lp.add_constraint(name, terms.into_iter().map(|(v, c)| (VarId(remap[v]), c)).collect(), sense, rhs);
    }
    lp.validate()?;
    Ok(lp)
}

fn parse_bound(
    cur: &mut Cursor<'_>,
    names: &mut Names,
    bounds: &mut Vec<(usize, Option<f64>, Option<f64>)>,
) -> Result<(), LpError> {
    let line = cur.line();
    let starts_with_name = matches!(cur.peek(), Some(Tok::Name(_)));
    if starts_with_name {
        let Some(Tok::Name(name)) = cur.next() else { unreachable!() };
        if name.eq_ignore_ascii_case("free") {
            return Err(err(line, "misplaced `free`"));
        }
        let v = names.id(&name);
        match cur.next() {
            Some(Tok::Sense(sense)) => {
                let value = cur.signed_number()?;
                bounds.push(match sense {
                    Sense::Le => (v, None, Some(value)),
                    Sense::Ge => (v, Some(value), None),
                    Sense::Eq => (v, Some(value), Some(value)),
                });
            }
            Some(Tok::Name(word)) if word.eq_ignore_ascii_case("free") => {
                bounds.push((v, Some(f64::NEG_INFINITY), Some(f64::INFINITY)));
            }
            _ => return Err(err(line, format!("incomplete bound for `{name}`"))),
        }
        return Ok(());
    }
    let first = cur.signed_number()?;
    let Some(Tok::Sense(s1)) = cur.next() else {
        return Err(err(line, "expected a comparison in bound"));
    };
    let Some(Tok::Name(name)) = cur.next() else {
        return Err(err(line, "expected a variable in bound"));
    };
    let v = names.id(&name);
    let (mut lo, mut hi) = match s1 {
        Sense::Le => (Some(first), None),
        Sense::Ge => (None, Some(first)),
        Sense::Eq => (Some(first), Some(first)),
    };
    if let Some(Tok::Sense(s2)) = cur.peek().cloned() {
        cur.pos += 1;
        let second = cur.signed_number()?;
        match (s1, s2) {
            (Sense::Le, Sense::Le) => hi = Some(second),
            (Sense::Ge, Sense::Ge) => lo = Some(second),
            _ => return Err(err(line, "inconsistent double bound")),
        }
    }
    bounds.push((v, lo, hi));
    Ok(())
}
