//! Equation files: one `name = expr` per line, `output a, b` to force outputs,
//! `#` comments. Expressions use `+ - * /`, `sqrt`, `abs`, parentheses and
//! numeric literals; free names are inputs.

use std::collections::{HashMap, HashSet};

use super::{DataFlowGraph, Op, PipegenError, Vertex, VertexKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>, PipegenError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
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
            let value = text.parse().map_err(|_| PipegenError::Syntax {
                line: lineno,
                col,
                msg: format!("bad number {text:?}"),
            })?;
            out.push((Tok::Num(value), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/()=,".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(PipegenError::Syntax { line: lineno, col, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
    target: &'a str,
    g: &'a mut DataFlowGraph,
    names: &'a HashMap<String, usize>,
    assigned_later: &'a HashSet<String>,
    inputs: &'a mut HashMap<String, usize>,
    used: &'a mut HashSet<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn err(&self, msg: impl Into<String>) -> PipegenError {
        PipegenError::Syntax { line: self.line, col: self.col(), msg: msg.into() }
    }

    fn push(&mut self, kind: VertexKind, args: Vec<usize>) -> usize {
        self.g.vertices.push(Vertex::new(kind, args));
        self.g.len() - 1
    }

    fn expr(&mut self) -> Result<usize, PipegenError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { Op::Add } else { Op::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = self.push(VertexKind::Operator { op }, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<usize, PipegenError> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Sym(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { Op::Mul } else { Op::Div };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = self.push(VertexKind::Operator { op }, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<usize, PipegenError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                let zero = self.push(VertexKind::Constant { value: 0.0 }, vec![]);
                let x = self.factor()?;
                Ok(self.push(VertexKind::Operator { op: Op::Sub }, vec![zero, x]))
            }
            Some(Tok::Num(value)) => {
                self.pos += 1;
                Ok(self.push(VertexKind::Constant { value }, vec![]))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(Tok::Sym('(')) = self.peek() {
                    let op = match name.as_str() {
                        "sqrt" => Op::Sqrt,
                        "abs" => Op::Abs,
                        _ => return Err(PipegenError::Syntax { line: self.line, col, msg: format!("unknown function {name:?}") }),
                    };
                    self.pos += 1;
                    let a = self.expr()?;
                    self.expect(')')?;
                    return Ok(self.push(VertexKind::Operator { op }, vec![a]));
                }
                self.name(name, col)
            }
            Some(_) => Err(self.err("expected an operand")),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn name(&mut self, name: String, col: usize) -> Result<usize, PipegenError> {
        if let Some(&v) = self.names.get(&name) {
            self.used.insert(name);
            return Ok(v);
        }
        if name == self.target {
            return Err(PipegenError::Cycle(format!("{name:?} on line {}", self.line)));
        }
        if self.assigned_later.contains(&name) {
            return Err(PipegenError::UseBeforeDef { line: self.line, col, name });
        }
        if let Some(&v) = self.inputs.get(&name) {
            return Ok(v);
        }
        let v = self.push(VertexKind::Input { name: name.clone() }, vec![]);
        self.inputs.insert(name, v);
        Ok(v)
    }

    fn expect(&mut self, c: char) -> Result<(), PipegenError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {c:?}")))
        }
    }
}

/// Builds the dataflow graph of an equation file: one operator vertex per
/// syntactic operation, one input vertex per free name, one output vertex per
/// result that is not consumed later or is listed on an `output` line.
pub fn parse_equations(text: &str) -> Result<DataFlowGraph, PipegenError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap()))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();

    let mut pending: HashSet<String> = HashSet::new();
    let mut assignments = Vec::new();
    let mut marked = Vec::new();
    for &(lineno, line) in &lines {
        let toks = tokenize(line, lineno)?;
        match toks.as_slice() {
            [(Tok::Ident(kw), _), rest @ ..] if kw == "output" && !rest.iter().any(|t| t.0 == Tok::Sym('=')) => {
                let mut expect_name = true;
                for (t, col) in rest {
                    match (t, expect_name) {
                        (Tok::Ident(n), true) => marked.push((lineno, *col, n.clone())),
                        (Tok::Sym(','), false) => {}
                        _ => return Err(PipegenError::Syntax { line: lineno, col: *col, msg: "expected a name list".into() }),
                    }
                    expect_name = !expect_name;
                }
                if expect_name {
                    return Err(PipegenError::Syntax { line: lineno, col: line.len() + 1, msg: "expected a name".into() });
                }
            }
            [(Tok::Ident(name), _), (Tok::Sym('='), _), ..] => {
                if !pending.insert(name.clone()) {
                    return Err(PipegenError::Redefinition { line: lineno, name: name.clone() });
                }
                assignments.push((lineno, line.len() + 1, name.clone(), toks));
            }
            [(_, col), ..] => {
                return Err(PipegenError::Syntax { line: lineno, col: *col, msg: "expected `name = expression`".into() })
            }
            [] => {}
        }
    }

    let mut g = DataFlowGraph::default();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut inputs: HashMap<String, usize> = HashMap::new();
    let mut used_after: Vec<HashSet<String>> = Vec::new();
    let mut order = Vec::new();
    for (lineno, end_col, name, toks) in &assignments {
        pending.remove(name);
        let mut used = HashSet::new();
        let mut p = Parser {
            toks: &toks[2..],
            pos: 0,
            line: *lineno,
            end_col: *end_col,
            target: name,
            g: &mut g,
            names: &names,
            assigned_later: &pending,
            inputs: &mut inputs,
            used: &mut used,
        };
        let v = p.expr()?;
        if p.pos < p.toks.len() {
            return Err(p.err("unexpected token"));
        }
        used_after.push(used);
        names.insert(name.clone(), v);
        order.push(name.clone());
    }

    let consumed: HashSet<&String> = used_after.iter().flatten().collect();
    let mut outputs: Vec<String> = order.iter().filter(|n| !consumed.contains(n)).cloned().collect();
    for (lineno, col, n) in marked {
        let known = names.contains_key(&n) || inputs.contains_key(&n);
        if !known {
            return Err(PipegenError::Syntax { line: lineno, col, msg: format!("unknown output {n:?}") });
        }
        if !outputs.contains(&n) {
            outputs.push(n);
        }
    }
    for n in outputs {
        let src = names.get(&n).or_else(|| inputs.get(&n)).copied().unwrap();
        g.vertices.push(Vertex::new(VertexKind::Output { name: n }, vec![src]));
    }
    Ok(g)
}
