use super::{AtomId, Program};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    If,
    Bar,
    Comma,
    Dot,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> Error {
        Error::Syntax { line, col, msg: msg.into() }
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize, usize)>> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let c = self.bump().expect("peeked");
        let tok = match c {
            '|' | ';' => Tok::Bar,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => {
                if self.chars.peek() == Some(&'-') {
                    self.bump();
                    Tok::If
                } else {
                    return Err(self.err(line, col, "expected `:-`"));
                }
            }
            c if c.is_ascii_lowercase() => {
                let mut s = c.to_string();
                while let Some(&n) = self.chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' || n == '\'' {
                        s.push(n);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => return Err(self.err(line, col, format!("unexpected character `{other}`"))),
        };
        Ok(Some((tok, line, col)))
    }
}

/// Whether `s` matches `[a-z][A-Za-z0-9_']*`.
pub fn is_atom_name(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_ascii_lowercase())
        && it.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub fn parse_program(text: &str) -> Result<Program> {
    let mut lex = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lex.next_token()? {
        toks.push(t);
    }
    let end = (lex.line, lex.col);
    let mut prog = Program::new();
    let mut i = 0;
    while i < toks.len() {
        let (start_line, _) = (toks[i].1, toks[i].2);
        let mut head: Vec<(String, usize, usize)> = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let at = |i: usize| toks.get(i).map(|t| (t.1, t.2)).unwrap_or(end);

        if let Tok::Ident(name) = &toks[i].0 {
            head.push((name.clone(), toks[i].1, toks[i].2));
            i += 1;
            while i < toks.len() && toks[i].0 == Tok::Bar {
                i += 1;
                match toks.get(i) {
                    Some((Tok::Ident(n), l, c)) => head.push((n.clone(), *l, *c)),
                    _ => {
                        let (l, c) = at(i);
                        return Err(Error::Syntax { line: l, col: c, msg: "expected atom after `|`".into() });
                    }
                }
                i += 1;
            }
        }
        if i < toks.len() && toks[i].0 == Tok::If {
            i += 1;
            loop {
                match toks.get(i) {
                    Some((Tok::Ident(n), l, c)) => {
                        if n == "not" {
                            if let Some((Tok::Ident(m), l2, c2)) = toks.get(i + 1) {
                                neg.push((m.clone(), *l2, *c2));
                                i += 2;
                            } else {
                                pos.push((n.clone(), *l, *c));
                                i += 1;
                            }
                        } else {
                            pos.push((n.clone(), *l, *c));
                            i += 1;
                        }
                    }
                    _ => {
                        let (l, c) = at(i);
                        return Err(Error::Syntax { line: l, col: c, msg: "expected body literal".into() });
                    }
                }
                if i < toks.len() && toks[i].0 == Tok::Comma {
                    i += 1;
                } else {
                    break;
                }
            }
        }
        match toks.get(i) {
            Some((Tok::Dot, _, _)) => i += 1,
            _ => {
                let (l, c) = at(i);
                return Err(Error::Syntax { line: l, col: c, msg: "expected `.`".into() });
            }
        }
        if head.is_empty() && pos.is_empty() && neg.is_empty() {
            return Err(Error::EmptyRule { line: start_line });
        }
        let label = format!("r{}", prog.num_rules() + 1);
        let mut seen = std::collections::HashSet::new();
        for (n, _, _) in head.iter().chain(&pos).chain(&neg) {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateAtom { rule: label, atom: n.clone() });
            }
        }
        let mut ids = |v: &[(String, usize, usize)]| -> Vec<AtomId> { v.iter().map(|(n, _, _)| prog.intern(n)).collect() };
        let h = ids(&head);
        let p = ids(&pos);
        let n = ids(&neg);
        prog.add_labeled_rule(label, &h, &p, &n)?;
    }
    Ok(prog)
}
