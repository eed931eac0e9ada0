//! Text formats: algebra documents, direct-system documents, partition
//! grids.
//!
//! Documents are line-oriented UTF-8 with `#` comments. An algebra document:
//!
//! ```text
//! algebra A4
//! elements a b c d
//! op star arity 2
//! a b c d
//! b b c d
//! c c d c
//! d d d c
//! ```
//!
//! Arity-1 tables are `<element> -> <value>` lines, one per element; arity 3
//! and up use `<e1> ... <ek> -> <value>` lines covering every tuple. A system
//! document declares `indices`, `order <i> <j>` pairs, one embedded algebra
//! block per index, and `hom <i> <j>: <e> -> <v> ...` lines.

use std::collections::BTreeMap;

use crate::algebra::{ElementId, ElementMap, FiniteAlgebra, Operation};
use crate::error::{Error, Result};
use crate::partition::PartitionFunction;
use crate::systems::{DirectSystem, Semilattice};
use crate::Limits;

struct Line<'a> {
    no: usize,
    tokens: Vec<(usize, &'a str)>,
}

struct Cursor<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let mut lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let content = match raw.find('#') {
                Some(cut) => &raw[..cut],
                None => raw,
            };
            let mut tokens = Vec::new();
            let mut col = 0;
            for piece in content.split_whitespace() {
                let at = content[col..].find(piece).unwrap() + col;
                tokens.push((at + 1, piece));
                col = at + piece.len();
            }
            if !tokens.is_empty() {
                lines.push(Line {
                    no: idx + 1,
                    tokens,
                });
            }
        }
        Cursor { lines, pos: 0 }
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    fn next(&mut self) -> Option<&Line<'a>> {
        let line = self.lines.get(self.pos);
        if line.is_some() {
            self.pos += 1;
        }
        line
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<&Line<'a>> {
        match self.lines.get(self.pos) {
            Some(line) if line.tokens[0].1 == keyword => {
                self.pos += 1;
                Ok(&self.lines[self.pos - 1])
            }
            Some(line) => Err(Error::parse(
                line.no,
                line.tokens[0].0,
                format!("expected '{keyword}', found '{}'", line.tokens[0].1),
            )),
            None => Err(Error::parse(
                self.lines.last().map(|l| l.no + 1).unwrap_or(1),
                1,
                format!("expected '{keyword}', found end of input"),
            )),
        }
    }

    fn eof_line(&self) -> usize {
        self.lines.last().map(|l| l.no + 1).unwrap_or(1)
    }
}

fn element_id(elements: &[String], token: (usize, &str), line: usize) -> Result<ElementId> {
    elements
        .iter()
        .position(|e| e == token.1)
        .ok_or_else(|| Error::parse(line, token.0, format!("unknown element '{}'", token.1)))
}

/// Parses the body of an algebra block (everything after `algebra <name>`):
/// an `elements` line followed by `op` blocks, stopping before the next
/// top-level keyword.
fn parse_algebra_body(cur: &mut Cursor, name: &str, limits: &Limits) -> Result<FiniteAlgebra> {
    let line = cur.expect_keyword("elements")?;
    let line_no = line.no;
    let cols: Vec<usize> = line.tokens[1..].iter().map(|t| t.0).collect();
    let elements: Vec<String> = line.tokens[1..].iter().map(|t| t.1.to_string()).collect();
    if elements.is_empty() {
        return Err(Error::parse(line_no, 1, "empty element list".to_string()));
    }
    for (i, e) in elements.iter().enumerate() {
        if elements[..i].contains(e) {
            return Err(Error::parse(
                line_no,
                cols[i],
                format!("duplicate element name '{e}'"),
            ));
        }
    }
    let n = elements.len();
    let mut operations: Vec<Operation> = Vec::new();

    while let Some(line) = cur.peek() {
        if line.tokens[0].1 != "op" {
            break;
        }
        let (line_no, tokens): (usize, Vec<(usize, &str)>) = (line.no, line.tokens.clone());
        cur.pos += 1;
        if tokens.len() != 4 || tokens[2].1 != "arity" {
            return Err(Error::parse(
                line_no,
                tokens[0].0,
                "expected 'op <name> arity <k>'".to_string(),
            ));
        }
        let op_name = tokens[1].1.to_string();
        let arity: usize = tokens[3].1.parse().map_err(|_| {
            Error::parse(line_no, tokens[3].0, format!("bad arity '{}'", tokens[3].1))
        })?;
        if arity == 0 {
            return Err(Error::parse(
                line_no,
                tokens[3].0,
                format!("operation '{op_name}': arity must be at least 1"),
            ));
        }
        if arity > limits.max_arity {
            return Err(Error::resource(format!(
                "operation '{op_name}' has arity {arity}, above the configured maximum {}",
                limits.max_arity
            )));
        }

        let table = match arity {
            1 => parse_unary_table(cur, &elements, &op_name)?,
            2 => parse_grid_table(cur, &elements, &op_name)?,
            _ => parse_tuple_table(cur, &elements, &op_name, arity)?,
        };
        operations.push(Operation::new(op_name, arity, n, table)?);
    }

    FiniteAlgebra::new(name, elements, operations)
}

fn parse_unary_table(cur: &mut Cursor, elements: &[String], op: &str) -> Result<Vec<ElementId>> {
    let n = elements.len();
    let mut table: Vec<Option<ElementId>> = vec![None; n];
    for _ in 0..n {
        let eof = cur.eof_line();
        let line = cur
            .next()
            .ok_or_else(|| Error::parse(eof, 1, format!("operation '{op}': table ended early")))?;
        let (no, toks) = (line.no, line.tokens.clone());
        if toks.len() != 3 || toks[1].1 != "->" {
            return Err(Error::parse(
                no,
                toks[0].0,
                format!("operation '{op}': expected '<element> -> <value>'"),
            ));
        }
        let src = element_id(elements, toks[0], no)?;
        let val = element_id(elements, toks[2], no)?;
        if table[src].is_some() {
            return Err(Error::parse(
                no,
                toks[0].0,
                format!("operation '{op}': duplicate entry for '{}'", elements[src]),
            ));
        }
        table[src] = Some(val);
    }
    Ok(table.into_iter().map(|v| v.unwrap()).collect())
}

fn parse_grid_table(cur: &mut Cursor, elements: &[String], op: &str) -> Result<Vec<ElementId>> {
    let n = elements.len();
    let mut table = Vec::with_capacity(n * n);
    for row in 0..n {
        let eof = cur.eof_line();
        let line = cur.next().ok_or_else(|| {
            Error::parse(
                eof,
                1,
                format!("operation '{op}': grid ended early, expected {n} rows"),
            )
        })?;
        let (no, toks) = (line.no, line.tokens.clone());
        if toks.len() != n {
            return Err(Error::parse(
                no,
                toks[0].0,
                format!(
                    "operation '{op}': table row for '{}' has {} entries, expected {n}",
                    elements[row],
                    toks.len()
                ),
            ));
        }
        for tok in toks {
            table.push(element_id(elements, tok, no)?);
        }
    }
    Ok(table)
}

fn parse_tuple_table(
    cur: &mut Cursor,
    elements: &[String],
    op: &str,
    arity: usize,
) -> Result<Vec<ElementId>> {
    let n = elements.len();
    let total = n.pow(arity as u32);
    let mut table: Vec<Option<ElementId>> = vec![None; total];
    for _ in 0..total {
        let eof = cur.eof_line();
        let line = cur.next().ok_or_else(|| {
            Error::parse(
                eof,
                1,
                format!("operation '{op}': table ended early, expected {total} tuples"),
            )
        })?;
        let (no, toks) = (line.no, line.tokens.clone());
        if toks.len() != arity + 2 || toks[arity].1 != "->" {
            return Err(Error::parse(
                no,
                toks[0].0,
                format!("operation '{op}': expected '<e1> ... <e{arity}> -> <value>'"),
            ));
        }
        let mut idx = 0usize;
        for tok in &toks[..arity] {
            idx = idx * n + element_id(elements, *tok, no)?;
        }
        let val = element_id(elements, toks[arity + 1], no)?;
        if table[idx].is_some() {
            return Err(Error::parse(
                no,
                toks[0].0,
                format!("operation '{op}': duplicate tuple"),
            ));
        }
        table[idx] = Some(val);
    }
    Ok(table.into_iter().map(|v| v.unwrap()).collect())
}

/// Parses an algebra document.
pub fn parse_algebra_with(text: &str, limits: &Limits) -> Result<FiniteAlgebra> {
    let mut cur = Cursor::new(text);
    let line = cur.expect_keyword("algebra")?;
    if line.tokens.len() != 2 {
        return Err(Error::parse(
            line.no,
            line.tokens[0].0,
            "expected 'algebra <name>'".to_string(),
        ));
    }
    let name = line.tokens[1].1.to_string();
    let alg = parse_algebra_body(&mut cur, &name, limits)?;
    if let Some(line) = cur.peek() {
        return Err(Error::parse(
            line.no,
            line.tokens[0].0,
            format!(
                "unexpected '{}' after the algebra document",
                line.tokens[0].1
            ),
        ));
    }
    Ok(alg)
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    parse_algebra_with(text, &Limits::default())
}

/// Canonical rendering; `parse(render(a)) == a` bit-exactly.
pub fn render_algebra(alg: &FiniteAlgebra) -> String {
    let mut out = String::new();
    out.push_str(&format!("algebra {}\n", alg.name()));
    out.push_str(&format!("elements {}\n", alg.element_names().join(" ")));
    let n = alg.size();
    for (k, op) in alg.operations().iter().enumerate() {
        out.push_str(&format!("op {} arity {}\n", op.name(), op.arity()));
        match op.arity() {
            1 => {
                for a in 0..n {
                    out.push_str(&format!(
                        "{} -> {}\n",
                        alg.element_name(a),
                        alg.element_name(alg.eval(k, &[a]))
                    ));
                }
            }
            2 => {
                for a in 0..n {
                    let row: Vec<&str> = (0..n)
                        .map(|b| alg.element_name(alg.eval(k, &[a, b])))
                        .collect();
                    out.push_str(&row.join(" "));
                    out.push('\n');
                }
            }
            arity => {
                let all: Vec<ElementId> = (0..n).collect();
                crate::algebra::scan_tuples(&all, arity, |tup| {
                    let args: Vec<&str> = tup.iter().map(|a| alg.element_name(*a)).collect();
                    out.push_str(&format!(
                        "{} -> {}\n",
                        args.join(" "),
                        alg.element_name(alg.eval(k, tup))
                    ));
                    true
                });
            }
        }
    }
    out
}

/// Parses a direct-system document and validates it as a direct system.
pub fn parse_system_with(text: &str, limits: &Limits) -> Result<DirectSystem> {
    let mut cur = Cursor::new(text);
    let line = cur.expect_keyword("system")?;
    if line.tokens.len() != 2 {
        return Err(Error::parse(
            line.no,
            line.tokens[0].0,
            "expected 'system <name>'".to_string(),
        ));
    }
    let sys_name = line.tokens[1].1.to_string();

    let line = cur.expect_keyword("indices")?;
    let index_names: Vec<String> = line.tokens[1..].iter().map(|t| t.1.to_string()).collect();
    if index_names.is_empty() {
        return Err(Error::parse(line.no, 1, "empty index list".to_string()));
    }
    let lookup_index = |tok: (usize, &str), no: usize| -> Result<usize> {
        let name = tok.1.trim_end_matches(':');
        index_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::parse(no, tok.0, format!("unknown index '{name}'")))
    };

    // (line, source index, target index, [(column, "elem value")])
    type HomLine = (usize, usize, usize, Vec<(usize, String)>);
    let mut order_pairs: Vec<(usize, usize)> = Vec::new();
    let mut algebras: BTreeMap<usize, FiniteAlgebra> = BTreeMap::new();
    let mut hom_lines: Vec<HomLine> = Vec::new();

    while let Some(line) = cur.peek() {
        let keyword = line.tokens[0].1;
        let (no, toks): (usize, Vec<(usize, &str)>) = (line.no, line.tokens.clone());
        match keyword {
            "order" => {
                cur.pos += 1;
                if toks.len() != 3 {
                    return Err(Error::parse(
                        no,
                        toks[0].0,
                        "expected 'order <i> <j>'".to_string(),
                    ));
                }
                order_pairs.push((lookup_index(toks[1], no)?, lookup_index(toks[2], no)?));
            }
            "algebra" => {
                cur.pos += 1;
                if toks.len() != 2 {
                    return Err(Error::parse(
                        no,
                        toks[0].0,
                        "expected 'algebra <index>'".to_string(),
                    ));
                }
                let idx = lookup_index(toks[1], no)?;
                if algebras.contains_key(&idx) {
                    return Err(Error::parse(
                        no,
                        toks[1].0,
                        format!("index '{}' already has an algebra", toks[1].1),
                    ));
                }
                let alg = parse_algebra_body(&mut cur, toks[1].1, limits)?;
                algebras.insert(idx, alg);
            }
            "hom" => {
                cur.pos += 1;
                if toks.len() < 5 {
                    return Err(Error::parse(
                        no,
                        toks[0].0,
                        "expected 'hom <i> <j>: <e> -> <v> ...'".to_string(),
                    ));
                }
                let i = lookup_index(toks[1], no)?;
                let j = lookup_index(toks[2], no)?;
                let mut rest = &toks[3..];
                if rest.first().map(|t| t.1) == Some(":") {
                    rest = &rest[1..];
                }
                if rest.len() % 3 != 0 || rest.is_empty() {
                    return Err(Error::parse(
                        no,
                        toks[0].0,
                        "hom entries must be '<e> -> <v>' triples".to_string(),
                    ));
                }
                let mut entries = Vec::new();
                for triple in rest.chunks(3) {
                    if triple[1].1 != "->" {
                        return Err(Error::parse(
                            no,
                            triple[1].0,
                            format!("expected '->', found '{}'", triple[1].1),
                        ));
                    }
                    entries.push((triple[0].0, format!("{} {}", triple[0].1, triple[2].1)));
                }
                hom_lines.push((no, i, j, entries));
            }
            other => {
                return Err(Error::parse(
                    no,
                    toks[0].0,
                    format!("unexpected '{other}' in system document"),
                ));
            }
        }
    }

    let indices = Semilattice::new(index_names.clone(), &order_pairs)?;
    let mut components = Vec::with_capacity(index_names.len());
    for (i, name) in index_names.iter().enumerate() {
        match algebras.remove(&i) {
            Some(a) => components.push(a),
            None => {
                return Err(Error::input(format!(
                    "system '{sys_name}': no algebra block for index '{name}'"
                )))
            }
        }
    }

    let mut homs: BTreeMap<(usize, usize), ElementMap> = BTreeMap::new();
    for (no, i, j, entries) in hom_lines {
        let mut map_entries = Vec::new();
        for (col, pair) in entries {
            let (e, v) = pair.split_once(' ').expect("joined above");
            let src = components[i].element_id(e).ok_or_else(|| {
                Error::parse(
                    no,
                    col,
                    format!(
                        "element '{e}' is not in the component at '{}'",
                        index_names[i]
                    ),
                )
            })?;
            let dst = components[j].element_id(v).ok_or_else(|| {
                Error::parse(
                    no,
                    col,
                    format!(
                        "element '{v}' is not in the component at '{}'",
                        index_names[j]
                    ),
                )
            })?;
            map_entries.push((src, dst));
        }
        if homs.insert((i, j), ElementMap::new(map_entries)?).is_some() {
            return Err(Error::parse(
                no,
                1,
                format!(
                    "duplicate hom line for '{}' <= '{}'",
                    index_names[i], index_names[j]
                ),
            ));
        }
    }

    DirectSystem::new(sys_name, indices, components, homs)
}

pub fn parse_system(text: &str) -> Result<DirectSystem> {
    parse_system_with(text, &Limits::default())
}

/// Renders a partition function in the same grid shape as a binary operation
/// table.
pub fn render_partition(alg: &FiniteAlgebra, f: &PartitionFunction) -> String {
    let n = alg.size();
    let mut out = String::new();
    for a in 0..n {
        let row: Vec<&str> = (0..n).map(|b| alg.element_name(f.value(a, b))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
