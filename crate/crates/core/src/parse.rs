//! Text formats for hypergraphs: the benchmark edge-list format and plain
//! conjunctive-query atom lists.
//!
//! Edge-list grammar:
//!
//! ```text
//! file  := edge (',' edge)* '.'?
//! edge  := NAME '(' NAME (',' NAME)* ')'
//! NAME  := [A-Za-z0-9_:.\-]+
//! ```
//!
//! `%` starts a comment running to the end of the line.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, HypergraphBuilder};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Open,
    Close,
    Comma,
    Dot,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '.' | '-')
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (li + 1, i + 1);
            match c {
                '%' => break,
                c if c.is_whitespace() => i += 1,
                '(' | ')' | ',' => {
                    let tok = match c {
                        '(' => Tok::Open,
                        ')' => Tok::Close,
                        _ => Tok::Comma,
                    };
                    out.push(Spanned { tok, line, col });
                    i += 1;
                }
                c if is_name_char(c) => {
                    let start = i;
                    while i < chars.len() && is_name_char(chars[i]) {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    // a name made only of dots is the terminator
                    if word.chars().all(|c| c == '.') {
                        for k in 0..word.len() {
                            out.push(Spanned { tok: Tok::Dot, line, col: col + k });
                        }
                    } else {
                        out.push(Spanned { tok: Tok::Name(word), line, col });
                    }
                }
                other => {
                    return Err(Error::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.col)).unwrap_or(self.eof)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<()> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn name(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Name(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err(format!("expected {what}")),
        }
    }
}

/// Parses the benchmark edge-list format.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    parse_hypergraph_named(text, "")
}

pub fn parse_hypergraph_named(text: &str, name: &str) -> Result<Hypergraph> {
    let toks = lex(text)?;
    let eof = (text.lines().count().max(1), text.lines().last().map(|l| l.len() + 1).unwrap_or(1));
    let mut cur = Cursor { toks, pos: 0, eof };
    let mut b = HypergraphBuilder::new(name);
    if cur.peek().is_none() {
        return Err(Error::NoEdges);
    }
    loop {
        let en = cur.name("edge name")?;
        cur.expect(&Tok::Open, "`(`")?;
        let mut vs = Vec::new();
        if cur.peek() != Some(&Tok::Close) {
            loop {
                vs.push(cur.name("vertex name")?);
                match cur.peek() {
                    Some(Tok::Comma) => cur.pos += 1,
                    Some(Tok::Close) => break,
                    _ => return cur.err("expected `,` or `)`"),
                }
            }
        }
        cur.expect(&Tok::Close, "`)`")?;
        if b.has_edge(&en) {
            return Err(Error::DuplicateEdge(en));
        }
        if vs.is_empty() {
            return Err(Error::EmptyEdge(en));
        }
        b.add_edge(&en, vs.iter().map(String::as_str))?;
        match cur.peek() {
            Some(Tok::Comma) => {
                cur.pos += 1;
                // tolerate a trailing comma before the terminator
                if matches!(cur.peek(), Some(Tok::Dot) | None) {
                    break;
                }
            }
            Some(Tok::Dot) | None => break,
            _ => return cur.err("expected `,` or `.`"),
        }
    }
    if cur.peek() == Some(&Tok::Dot) {
        cur.pos += 1;
    }
    if cur.peek().is_some() {
        return cur.err("unexpected input after terminating `.`");
    }
    b.build()
}

/// Writes the edge-list format; vertices inside an edge appear in index
/// order, so parsing the output reproduces the same indices.
pub fn serialize_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::new();
    if !h.name().is_empty() {
        out.push_str(&format!("% {}\n", h.name()));
    }
    let n = h.num_edges();
    for (j, e) in h.edges().iter().enumerate() {
        out.push_str(&e.name);
        out.push('(');
        out.push_str(&h.vertex_set_names(&e.vertices).join(","));
        out.push(')');
        out.push_str(if j + 1 == n { ".\n" } else { ",\n" });
    }
    out
}

fn sanitize(raw: &str) -> String {
    let s: String = raw.chars().map(|c| if is_name_char(c) { c } else { '_' }).collect();
    if s.is_empty() {
        "_".to_string()
    } else {
        s
    }
}

/// `AND` used as a separator, not as a relation name `AND(...)`.
fn is_and_keyword(rest: &str) -> bool {
    rest.strip_prefix("AND").is_some_and(|after| {
        after.starts_with(char::is_whitespace) && !after.trim_start().starts_with('(')
    })
}

fn is_variable(arg: &str) -> bool {
    arg.starts_with('?') || arg.chars().next().is_some_and(|c| c.is_uppercase())
}

/// Converts a conjunctive query (a list of atoms `rel(a1,...,an)`) into its
/// hypergraph: one edge per atom holding the atom's variables.
///
/// Arguments starting with an uppercase letter or `?` are variables; all
/// others, including quoted strings and numbers, are constants. Atoms may be
/// separated by commas, `∧`, `AND`, or newlines. A rule head ending in `:-`
/// is skipped.
pub fn cq_to_hypergraph(cq_text: &str) -> Result<Hypergraph> {
    let body = match cq_text.find(":-") {
        Some(p) => &cq_text[p + 2..],
        None => cq_text,
    };
    let body_offset = cq_text.len() - body.len();
    let chars: Vec<(usize, char)> = body.char_indices().collect();
    let pos_of = |byte: usize| -> (usize, usize) {
        let upto = &cq_text[..body_offset + byte];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
        (line, col)
    };
    let syntax = |byte: usize, msg: &str| {
        let (line, col) = pos_of(byte);
        Error::Syntax { line, col, msg: msg.to_string() }
    };

    let mut atoms: Vec<(String, Vec<String>)> = Vec::new();
    let mut i = 0;
    let skip_sep = |i: &mut usize| {
        while *i < chars.len() {
            let c = chars[*i].1;
            if c.is_whitespace() || c == ',' || c == '∧' || c == '.' || c == ';' {
                *i += 1;
            } else if is_and_keyword(&body[chars[*i].0..]) {
                *i += 3;
            } else {
                break;
            }
        }
    };
    loop {
        skip_sep(&mut i);
        if i >= chars.len() {
            break;
        }
        let start = i;
        while i < chars.len() && chars[i].1 != '(' && !chars[i].1.is_whitespace() && chars[i].1 != ',' {
            i += 1;
        }
        let rel: String = chars[start..i].iter().map(|(_, c)| c).collect();
        if rel.is_empty() {
            return Err(syntax(chars[start].0, "expected relation name"));
        }
        while i < chars.len() && chars[i].1.is_whitespace() {
            i += 1;
        }
        if i >= chars.len() || chars[i].1 != '(' {
            let at = chars.get(i).map(|c| c.0).unwrap_or(body.len());
            return Err(syntax(at, "expected `(` after relation name"));
        }
        i += 1;
        let mut args = Vec::new();
        loop {
            while i < chars.len() && chars[i].1.is_whitespace() {
                i += 1;
            }
            if i >= chars.len() {
                return Err(syntax(body.len(), "unterminated atom"));
            }
            let c = chars[i].1;
            if c == ')' && args.is_empty() {
                i += 1;
                break;
            }
            let arg: String = if c == '\'' || c == '"' {
                let q = c;
                let s = i;
                i += 1;
                while i < chars.len() && chars[i].1 != q {
                    i += 1;
                }
                if i >= chars.len() {
                    return Err(syntax(chars[s].0, "unterminated string constant"));
                }
                i += 1;
                chars[s..i].iter().map(|(_, c)| c).collect()
            } else {
                let s = i;
                while i < chars.len() && !matches!(chars[i].1, ',' | ')') && !chars[i].1.is_whitespace() {
                    i += 1;
                }
                chars[s..i].iter().map(|(_, c)| c).collect()
            };
            if arg.is_empty() {
                return Err(syntax(chars[i.min(chars.len() - 1)].0, "empty argument"));
            }
            args.push(arg);
            while i < chars.len() && chars[i].1.is_whitespace() {
                i += 1;
            }
            match chars.get(i).map(|c| c.1) {
                Some(',') => i += 1,
                Some(')') => {
                    i += 1;
                    break;
                }
                _ => {
                    let at = chars.get(i).map(|c| c.0).unwrap_or(body.len());
                    return Err(syntax(at, "expected `,` or `)`"));
                }
            }
        }
        atoms.push((rel, args));
    }

    let mut b = HypergraphBuilder::new("");
    let mut var_names: HashMap<String, String> = HashMap::new();
    let mut used_vertex_names: HashSet<String> = HashSet::new();
    let mut rel_count: HashMap<String, usize> = HashMap::new();
    let mut added = 0;
    for (rel, args) in &atoms {
        let mut vars: Vec<String> = Vec::new();
        for a in args.iter().filter(|a| is_variable(a)) {
            let name = var_names
                .entry(a.clone())
                .or_insert_with(|| {
                    let base = sanitize(a.trim_start_matches('?'));
                    let mut n = base.clone();
                    let mut k = 2;
                    while used_vertex_names.contains(&n) {
                        n = format!("{base}_{k}");
                        k += 1;
                    }
                    used_vertex_names.insert(n.clone());
                    n
                })
                .clone();
            if !vars.contains(&name) {
                vars.push(name);
            }
        }
        if vars.is_empty() {
            continue;
        }
        let base = sanitize(rel);
        let count = rel_count.entry(base.clone()).or_default();
        *count += 1;
        let mut en = if *count == 1 { base.clone() } else { format!("{base}.{count}") };
        while b.has_edge(&en) {
            *count += 1;
            en = format!("{base}.{count}");
        }
        b.add_edge(&en, vars.iter().map(String::as_str))?;
        added += 1;
    }
    if added == 0 {
        return Err(Error::NoVariables);
    }
    b.build()
}
