//! Text format for word systems.
//!
//! ```text
//! mcwords v1
//! m=3
//! kind=mc
//! let e0 = lit(2 2 3 3);
//! word s1 = inter(1, pow(e0, 6));
//! word s2 = concat(pow(e0, 12), lit(1));
//! ```
//!
//! Expressions: `lit(c c ...)`, `concat(e, e, ...)`, `pow(e, k)`,
//! `inter(c, e)`, `restrict(e, {c, ...})`, `shift(e, d)`,
//! `relabel(e, c1 c2 ...)` (chair `i` becomes `ci`), or a name bound by an
//! earlier `let` or `word`. `#` starts a comment running to the end of the line.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;

use super::chairset::ChairSet;
use super::error::{WordError, WordResult};
use super::expr::{Node, Relabeling, WordExpr};
use super::system::{SystemKind, WordSystem};
use super::Chair;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigUint),
    Minus,
    Punct(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> WordResult<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let bump = |ch: char, line: &mut usize, column: &mut usize| {
            if ch == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            bump(c, &mut line, &mut column);
        } else if c == '#' {
            while let Some(&ch) = chars.peek() {
                if ch == '\n' {
                    break;
                }
                chars.next();
                column += 1;
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if !ch.is_ascii_digit() {
                    break;
                }
                s.push(ch);
                chars.next();
                column += 1;
            }
            out.push(Token {
                tok: Tok::Int(s.parse().unwrap()),
                line: l,
                column: col,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if !(ch.is_ascii_alphanumeric() || ch == '_') {
                    break;
                }
                s.push(ch);
                chars.next();
                column += 1;
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l,
                column: col,
            });
        } else if "(),;{}=".contains(c) {
            chars.next();
            column += 1;
            out.push(Token {
                tok: Tok::Punct(c),
                line: l,
                column: col,
            });
        } else if c == '-' {
            chars.next();
            column += 1;
            out.push(Token {
                tok: Tok::Minus,
                line: l,
                column: col,
            });
        } else {
            return Err(WordError::Syntax {
                line: l,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    m: u32,
    env: HashMap<String, WordExpr>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at<T>(t: &Token, message: impl Into<String>) -> WordResult<T> {
        Err(WordError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect_punct(&mut self, p: char) -> WordResult<()> {
        let t = self.next();
        if t.tok == Tok::Punct(p) {
            Ok(())
        } else {
            Self::err_at(&t, format!("expected `{p}`"))
        }
    }

    fn expect_word(&mut self, w: &str) -> WordResult<()> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == w => Ok(()),
            _ => Self::err_at(&t, format!("expected `{w}`")),
        }
    }

    fn ident(&mut self) -> WordResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            _ => Self::err_at(&t, "expected identifier"),
        }
    }

    fn int(&mut self) -> WordResult<(BigUint, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Int(v) => Ok((v.clone(), t.clone())),
            _ => Self::err_at(&t, "expected integer"),
        }
    }

    fn signed(&mut self) -> WordResult<(i64, Token)> {
        let neg = self.peek().tok == Tok::Minus;
        if neg {
            self.next();
        }
        let (v, t) = self.int()?;
        let v: i64 = match i64::try_from(v) {
            Ok(v) => v,
            Err(_) => return Self::err_at(&t, "integer too large"),
        };
        Ok((if neg { -v } else { v }, t))
    }

    fn chair(&mut self) -> WordResult<Chair> {
        let (v, t) = self.int()?;
        match u32::try_from(&v) {
            Ok(c) if c >= 1 && c <= self.m => Ok(c),
            _ => {
                let _ = t;
                Err(WordError::BadChair {
                    chair: i64::try_from(v).unwrap_or(i64::MAX),
                    m: self.m,
                })
            }
        }
    }

    fn wrap<T>(&self, at: &Token, r: WordResult<T>) -> WordResult<T> {
        r.map_err(|e| match e {
            WordError::Syntax { .. }
            | WordError::BadChair { .. }
            | WordError::UndefinedName { .. } => e,
            other => WordError::Syntax {
                line: at.line,
                column: at.column,
                message: other.to_string(),
            },
        })
    }

    fn expr(&mut self) -> WordResult<WordExpr> {
        let (name, t) = self.ident()?;
        let is_call = self.peek().tok == Tok::Punct('(');
        if !is_call {
            return self
                .env
                .get(&name)
                .cloned()
                .ok_or(WordError::UndefinedName {
                    line: t.line,
                    column: t.column,
                    name,
                });
        }
        self.expect_punct('(')?;
        let e = match name.as_str() {
            "lit" => {
                let mut chairs = Vec::new();
                while matches!(self.peek().tok, Tok::Int(_)) {
                    chairs.push(self.chair()?);
                }
                if chairs.is_empty() {
                    return Self::err_at(self.peek(), "lit needs at least one chair");
                }
                WordExpr::literal(&chairs)
            }
            "concat" => {
                let mut parts = vec![self.expr()?];
                while self.peek().tok == Tok::Punct(',') {
                    self.next();
                    parts.push(self.expr()?);
                }
                if parts.len() < 2 {
                    return Self::err_at(self.peek(), "concat needs at least two operands");
                }
                WordExpr::concat(parts)
            }
            "pow" => {
                let base = self.expr()?;
                self.expect_punct(',')?;
                let (k, kt) = self.int()?;
                if k.is_zero() {
                    return Self::err_at(&kt, "exponent must be at least 1");
                }
                WordExpr::power(base, k)
            }
            "inter" => {
                let c = self.chair()?;
                self.expect_punct(',')?;
                let base = self.expr()?;
                WordExpr::interleave(c, base)
            }
            "restrict" => {
                let base = self.expr()?;
                self.expect_punct(',')?;
                self.expect_punct('{')?;
                let mut keep = vec![self.chair()?];
                while self.peek().tok == Tok::Punct(',') {
                    self.next();
                    keep.push(self.chair()?);
                }
                self.expect_punct('}')?;
                WordExpr::restrict(base, ChairSet::new(keep))
            }
            "shift" => {
                let base = self.expr()?;
                self.expect_punct(',')?;
                let (d, dt) = self.signed()?;
                let lo = base.chairs().iter().next().unwrap_or(1) as i64 + d;
                let hi = base.max_chair() as i64 + d;
                if lo < 1 || hi > self.m as i64 {
                    let _ = dt;
                    return Err(WordError::BadChair {
                        chair: if lo < 1 { lo } else { hi },
                        m: self.m,
                    });
                }
                WordExpr::shift(base, d)
            }
            "relabel" => {
                let base = self.expr()?;
                self.expect_punct(',')?;
                let mut image = Vec::new();
                while matches!(self.peek().tok, Tok::Int(_)) {
                    image.push(self.chair()?);
                }
                Relabeling::new(image).and_then(|map| WordExpr::relabel(base, map))
            }
            other => return Self::err_at(&t, format!("unknown constructor `{other}`")),
        };
        let e = self.wrap(&t, e)?;
        self.expect_punct(')')?;
        Ok(e)
    }
}

/// Parse a word file.
pub fn parse(src: &str) -> WordResult<WordSystem> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        m: 0,
        env: HashMap::new(),
    };
    p.expect_word("mcwords")?;
    p.expect_word("v1")?;
    p.expect_word("m")?;
    p.expect_punct('=')?;
    let (m, mt) = p.int()?;
    p.m = match u32::try_from(&m) {
        Ok(m) if m >= 1 => m,
        _ => return Parser::err_at(&mt, "m must be a positive 32-bit integer"),
    };
    let mut kind = SystemKind::Mc;
    if matches!(&p.peek().tok, Tok::Ident(s) if s == "kind") {
        p.next();
        p.expect_punct('=')?;
        let (k, kt) = p.ident()?;
        kind = match k.as_str() {
            "mc" => SystemKind::Mc,
            "renaming" => SystemKind::Renaming,
            _ => return Parser::err_at(&kt, "kind must be `mc` or `renaming`"),
        };
    }
    let mut labels = Vec::new();
    let mut words = Vec::new();
    loop {
        let t = p.next();
        let is_word = match &t.tok {
            Tok::Eof => break,
            Tok::Ident(s) if s == "word" => true,
            Tok::Ident(s) if s == "let" => false,
            _ => return Parser::err_at(&t, "expected `word` or `let`"),
        };
        let (name, nt) = p.ident()?;
        if p.env.contains_key(&name) {
            return Parser::err_at(&nt, format!("`{name}` is already defined"));
        }
        p.expect_punct('=')?;
        let e = p.expr()?;
        p.expect_punct(';')?;
        if is_word {
            labels.push(name.clone());
            words.push(e.clone());
        }
        p.env.insert(name, e);
    }
    WordSystem::with_labels(p.m, kind, labels, words)
}

/// Serialize with shared sub-expressions bound by `let`.
pub fn serialize(system: &WordSystem) -> WordResult<String> {
    serialize_with_header(system, &[])
}

/// Like [`serialize`], prefixed by `# ` comment lines.
pub fn serialize_with_header(system: &WordSystem, header: &[String]) -> WordResult<String> {
    let mut refs: HashMap<usize, usize> = HashMap::new();
    for w in system.words() {
        count_refs(w, &mut refs);
    }
    let mut out = String::new();
    for h in header {
        for line in h.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = writeln!(out, "mcwords v1");
    let _ = writeln!(out, "m={}", system.m());
    let kind = match system.kind() {
        SystemKind::Mc => "mc",
        SystemKind::Renaming => "renaming",
    };
    let _ = writeln!(out, "kind={kind}");
    let mut w = Writer {
        refs,
        names: HashMap::new(),
        out,
        reserved: system.labels().iter().cloned().collect(),
    };
    for (label, e) in system.labels().iter().zip(system.words()) {
        w.bind_shared(e)?;
        let text = w.reference(e)?;
        let _ = writeln!(w.out, "word {label} = {text};");
    }
    Ok(w.out)
}

fn children(e: &WordExpr) -> Vec<&WordExpr> {
    match e.node() {
        Node::Literal(_) => vec![],
        Node::Concat(parts) => parts.iter().collect(),
        Node::Power { base, .. }
        | Node::Interleave { base, .. }
        | Node::Restrict { base, .. }
        | Node::Relabel { base, .. } => vec![base],
    }
}

fn count_refs(e: &WordExpr, refs: &mut HashMap<usize, usize>) {
    let n = refs.entry(e.ptr_id()).or_insert(0);
    *n += 1;
    if *n == 1 {
        for c in children(e) {
            count_refs(c, refs);
        }
    }
}

struct Writer {
    refs: HashMap<usize, usize>,
    names: HashMap<usize, String>,
    out: String,
    reserved: HashSet<String>,
}

impl Writer {
    fn shared(&self, e: &WordExpr) -> bool {
        self.refs.get(&e.ptr_id()).copied().unwrap_or(0) > 1
    }

    /// Emit `let` bindings for every shared node below (and including) `e`.
    fn bind_shared(&mut self, e: &WordExpr) -> WordResult<()> {
        if self.names.contains_key(&e.ptr_id()) {
            return Ok(());
        }
        for c in children(e) {
            self.bind_shared(c)?;
        }
        if self.shared(e) {
            let mut k = self.names.len();
            let name = loop {
                let cand = format!("e{k}");
                if !self.reserved.contains(&cand) {
                    break cand;
                }
                k += 1;
            };
            let text = self.inline(e)?;
            let _ = writeln!(self.out, "let {name} = {text};");
            self.names.insert(e.ptr_id(), name);
        }
        Ok(())
    }

    fn reference(&self, e: &WordExpr) -> WordResult<String> {
        match self.names.get(&e.ptr_id()) {
            Some(n) => Ok(n.clone()),
            None => self.inline(e),
        }
    }

    fn inline(&self, e: &WordExpr) -> WordResult<String> {
        Ok(match e.node() {
            Node::Literal(s) => {
                let body: Vec<String> = s.iter().map(|c| c.to_string()).collect();
                format!("lit({})", body.join(" "))
            }
            Node::Concat(parts) => {
                if parts.len() == 1 {
                    // the grammar wants two operands; a one-part concat is its operand
                    return self.reference(&parts[0]);
                }
                let body = parts
                    .iter()
                    .map(|p| self.reference(p))
                    .collect::<WordResult<Vec<_>>>()?;
                format!("concat({})", body.join(", "))
            }
            Node::Power { base, exponent } => format!("pow({}, {exponent})", self.reference(base)?),
            Node::Interleave { chair, base } => {
                format!("inter({chair}, {})", self.reference(base)?)
            }
            Node::Restrict { base, keep } => {
                let body: Vec<String> = keep.iter().map(|c| c.to_string()).collect();
                format!(
                    "restrict({}, {{{}}})",
                    self.reference(base)?,
                    body.join(",")
                )
            }
            Node::Relabel { base, map } => match map.as_shift() {
                Some(d) => format!("shift({}, {d})", self.reference(base)?),
                None => {
                    let body: Vec<String> = map.image().iter().map(|c| c.to_string()).collect();
                    format!("relabel({}, {})", self.reference(base)?, body.join(" "))
                }
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_base_case_words() {
        let s = parse("mcwords v1 m=2\nword a = lit(1 1);\nword b = lit(1 1 2 2);").unwrap();
        assert_eq!(s.m(), 2);
        assert_eq!(s.kind(), SystemKind::Mc);
        assert_eq!(s.word(0).materialize(10).unwrap(), vec![1, 1]);
        assert_eq!(s.word(1).materialize(10).unwrap(), vec![1, 1, 2, 2]);
        assert_eq!(s.labels(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn zero_exponent_is_a_syntax_error() {
        let err = parse("mcwords v1 m=2\nword a = pow(lit(1 2), 0);").unwrap_err();
        match err {
            WordError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 24)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_undefined_names_and_bad_chairs() {
        assert!(matches!(
            parse("mcwords v1\nm=2\nword a = b;").unwrap_err(),
            WordError::UndefinedName {
                line: 3,
                column: 10,
                ..
            }
        ));
        assert!(matches!(
            parse("mcwords v1\nm=2\nword a = lit(1 3);").unwrap_err(),
            WordError::BadChair { chair: 3, m: 2 }
        ));
        assert!(matches!(
            parse("mcwords v1\nm=2\nword a = shift(lit(1 2), 1);").unwrap_err(),
            WordError::BadChair { chair: 3, m: 2 }
        ));
    }

    #[test]
    fn let_bindings_and_kind() {
        let src = "# header\nmcwords v1\nm=3\nkind=renaming\nlet x = lit(2 3);\nword a = concat(lit(1), pow(x, 2));\nword b = restrict(inter(1, x), {1,3});\n";
        let s = parse(src).unwrap();
        assert_eq!(s.kind(), SystemKind::Renaming);
        assert_eq!(s.word(0).materialize(10).unwrap(), vec![1, 2, 3, 2, 3]);
        assert_eq!(s.word(1).materialize(10).unwrap(), vec![1, 1, 3]);
    }

    #[test]
    fn shared_nodes_serialize_once() {
        let x = WordExpr::literal(&[2, 2, 3, 3]).unwrap();
        let a = WordExpr::interleave(1, WordExpr::power(x.clone(), 6u32).unwrap()).unwrap();
        let b = WordExpr::concat(vec![
            WordExpr::power(x, 12u32).unwrap(),
            WordExpr::literal(&[1]).unwrap(),
        ])
        .unwrap();
        let s = WordSystem::new(3, SystemKind::Mc, vec![a, b]).unwrap();
        let text = serialize(&s).unwrap();
        assert_eq!(text.matches("lit(2 2 3 3)").count(), 1, "{text}");
        assert_eq!(parse(&text).unwrap(), s);
    }

    #[test]
    fn general_relabel_round_trips() {
        let base = WordExpr::literal(&[1, 2, 3]).unwrap();
        let e = WordExpr::relabel(base, Relabeling::new(vec![3, 1, 2]).unwrap()).unwrap();
        let s = WordSystem::new(3, SystemKind::Mc, vec![e]).unwrap();
        let back = parse(&serialize(&s).unwrap()).unwrap();
        assert_eq!(back.word(0).materialize(10).unwrap(), vec![3, 1, 2]);
        assert_eq!(back, s);
    }
}
