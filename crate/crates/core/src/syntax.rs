//! Concrete syntax for terms and theory files.
//!
//! Terms use `;` for sequential and `+` for parallel composition, with `+`
//! binding tighter; both associate to the left. Besides generator names and
//! `id`, `id0`, `sym`, a few indexed forms expand at parse time:
//! `id(n)`, `sym(n,m)`, `copy(n)`, `discard(n)`, `cocopy(n)`, `codiscard(n)`,
//! `cap(n)`, `cup(n)`, `top(m,n)`, `bottom(m,n)`, `dagger(t)`, `meet(a,b)`
//! and `join(a,b)`.
//!
//! A theory file looks like
//!
//! ```text
//! theory preorder : frobenius {
//!   gen le : 1 -> 1;
//!   law refl: id <= le;
//!   law trans: le ; le <= le
//! }
//! ```
//!
//! Inside a theory block a `;` ends an item only when it is followed by an
//! item keyword or the closing brace; otherwise it is sequential composition.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::cartesian::{ArrowList, CartesianTerm};
use crate::combinators::{cap, convolution, cup, dagger, extremal, Color};
use crate::ring::FiniteRing;
use crate::term::{structural, Generator, Flags, Signature, Structural, Term};
use crate::theory::{CartesianLaw, Comparison, Law, Theory, TheoryKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn at(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    /// Shifts the reported line, for text embedded in a larger file.
    pub fn offset_lines(mut self, by: usize) -> Self {
        self.line += by;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LAngle,
    RAngle,
    Semi,
    Plus,
    Comma,
    Colon,
    Arrow,
    Le,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LAngle => f.write_str("`<`"),
            Tok::RAngle => f.write_str("`>`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '\'')
}

/// Splits text into tokens; `#` starts a comment running to end of line.
pub fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ';' => (Tok::Semi, 1),
            '+' => (Tok::Plus, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            '=' => (Tok::Eq, 1),
            '>' => (Tok::RAngle, 1),
            '<' if next == Some('=') => (Tok::Le, 2),
            '<' => (Tok::LAngle, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '≤' => (Tok::Le, 1),
            '⊕' => (Tok::Plus, 1),
            '→' => (Tok::Arrow, 1),
            d if d.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let n = s
                    .parse()
                    .map_err(|_| ParseError::at(pos, format!("number `{s}` is too large")))?;
                (Tok::Num(n), j - i)
            }
            a if is_ident_start(a) => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    if chars[j] == '-' && chars.get(j + 1) == Some(&'>') {
                        break;
                    }
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => return Err(ParseError::at(pos, format!("unexpected character `{other}`"))),
        };
        out.push((tok, pos));
        advance(len, &mut i, &mut col);
    }
    Ok(out)
}

const ITEM_KEYWORDS: [&str; 6] = ["gen", "law", "def", "swap", "ring", "theory"];

/// Recursive-descent parser over a token list.
pub struct Parser<'a> {
    toks: &'a [(Tok, Pos)],
    i: usize,
    end: Pos,
    /// Whether `;` followed by an item keyword or `}` ends a term.
    item_mode: bool,
}

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [(Tok, Pos)], end: Pos) -> Self {
        Parser {
            toks,
            i: 0,
            end,
            item_mode: false,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|(t, _)| t.clone());
        self.i += 1;
        t
    }

    pub fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.pos(), message)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.i += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn semi_ends_item(&self) -> bool {
        if !self.item_mode {
            return false;
        }
        match self.peek_at(1) {
            None | Some(Tok::RBrace) => true,
            Some(Tok::Ident(s)) => ITEM_KEYWORDS.contains(&s.as_str()),
            _ => false,
        }
    }

    /// `seq := par (';' par)*`
    pub fn term(&mut self, sig: &Signature) -> Result<Term, ParseError> {
        let mut acc = self.par(sig)?;
        while self.peek() == Some(&Tok::Semi) && !self.semi_ends_item() {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.par(sig)?;
            acc = acc
                .seq(rhs)
                .map_err(|e| ParseError::at(pos, e.to_string()))?;
        }
        Ok(acc)
    }

    fn par(&mut self, sig: &Signature) -> Result<Term, ParseError> {
        let mut acc = self.atom(sig)?;
        while self.peek() == Some(&Tok::Plus) {
            self.i += 1;
            acc = acc.par(self.atom(sig)?);
        }
        Ok(acc)
    }

    fn indices(&mut self, count: usize) -> Result<Vec<usize>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        for k in 0..count {
            if k > 0 {
                self.expect(Tok::Comma)?;
            }
            out.push(self.number()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn term_args(&mut self, sig: &Signature, count: usize) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let saved = self.item_mode;
        self.item_mode = false;
        let mut out = Vec::new();
        for k in 0..count {
            if k > 0 {
                self.expect(Tok::Comma)?;
            }
            out.push(self.term(sig)?);
        }
        self.item_mode = saved;
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn atom(&mut self, sig: &Signature) -> Result<Term, ParseError> {
        let pos = self.pos();
        let wrap = |r: Result<Term, crate::term::TermError>| r.map_err(|e| ParseError::at(pos, e.to_string()));
        match self.peek() {
            Some(Tok::LParen) => {
                self.i += 1;
                let saved = self.item_mode;
                self.item_mode = false;
                let t = self.term(sig)?;
                self.item_mode = saved;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                let called = self.peek() == Some(&Tok::LParen);
                let structural_kind = match name.as_str() {
                    "copy" => Some(Structural::Copy),
                    "discard" => Some(Structural::Discard),
                    "cocopy" => Some(Structural::Cocopy),
                    "codiscard" => Some(Structural::Codiscard),
                    _ => None,
                };
                match (name.as_str(), called) {
                    ("id", false) => Ok(Term::id()),
                    ("id0", false) => Ok(Term::id0()),
                    ("sym", false) => Ok(Term::sym()),
                    ("id", true) => {
                        let n = self.indices(1)?;
                        wrap(structural(Structural::Id, n[0], 0, sig))
                    }
                    ("sym", true) => {
                        let n = self.indices(2)?;
                        wrap(structural(Structural::Sym, n[0], n[1], sig))
                    }
                    (_, true) if structural_kind.is_some() => {
                        let n = self.indices(1)?;
                        wrap(structural(structural_kind.unwrap(), n[0], 0, sig))
                    }
                    ("cap", true) => {
                        let n = self.indices(1)?;
                        wrap(cap(n[0], sig))
                    }
                    ("cup", true) => {
                        let n = self.indices(1)?;
                        wrap(cup(n[0], sig))
                    }
                    ("top", true) => {
                        let n = self.indices(2)?;
                        wrap(extremal(Color::Black, n[0], n[1], sig))
                    }
                    ("bottom", true) => {
                        let n = self.indices(2)?;
                        wrap(extremal(Color::White, n[0], n[1], sig))
                    }
                    ("dagger", true) => {
                        let a = self.term_args(sig, 1)?;
                        wrap(dagger(&a[0], sig))
                    }
                    ("meet", true) => {
                        let a = self.term_args(sig, 2)?;
                        wrap(convolution(Color::Black, &a[0], &a[1], sig))
                    }
                    ("join", true) => {
                        let a = self.term_args(sig, 2)?;
                        wrap(convolution(Color::White, &a[0], &a[1], sig))
                    }
                    (_, _) => wrap(sig.term(&name)),
                }
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn comparison(&mut self) -> Result<Comparison, ParseError> {
        match self.peek() {
            Some(Tok::Le) => {
                self.i += 1;
                Ok(Comparison::Le)
            }
            Some(Tok::Eq) => {
                self.i += 1;
                Ok(Comparison::Eq)
            }
            _ => Err(self.unexpected("`<=` or `=`")),
        }
    }

    fn cartesian_term(&mut self) -> Result<CartesianTerm, ParseError> {
        let name = self.ident()?;
        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                if i == 0 {
                    return Err(self.error("variables are numbered from x1"));
                }
                return Ok(CartesianTerm::var(i));
            }
        }
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.i += 1;
            loop {
                args.push(self.cartesian_term()?);
                match self.bump() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RParen) => break,
                    _ => {
                        self.i -= 1;
                        return Err(self.unexpected("`,` or `)`"));
                    }
                }
            }
        }
        Ok(CartesianTerm::app(&name, args))
    }

    fn cartesian_list(&mut self) -> Result<Vec<CartesianTerm>, ParseError> {
        self.expect(Tok::LAngle)?;
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RAngle) {
            self.i += 1;
            return Ok(out);
        }
        loop {
            out.push(self.cartesian_term()?);
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RAngle) => return Ok(out),
                _ => {
                    self.i -= 1;
                    return Err(self.unexpected("`,` or `>`"));
                }
            }
        }
    }
}

fn end_pos(text: &str) -> Pos {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    Pos { line, col }
}

/// Parses a complete term against a signature.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(&toks, end_pos(text));
    let t = p.term(sig)?;
    if !p.at_end() {
        return Err(p.unexpected("end of term"));
    }
    Ok(t)
}

/// Parses `LHS <= RHS` or `LHS = RHS`.
pub fn parse_law(name: &str, text: &str, sig: &Signature) -> Result<Law, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(&toks, end_pos(text));
    let lhs = p.term(sig)?;
    let pos = p.pos();
    let cmp = p.comparison()?;
    let rhs = p.term(sig)?;
    if !p.at_end() {
        return Err(p.unexpected("end of law"));
    }
    Law::new(name, lhs, cmp, rhs).map_err(|e| ParseError::at(pos, e.to_string()))
}

/// Parses a theory file.
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(&toks, end_pos(text));
    let theory = theory_block(&mut p)?;
    if !p.at_end() {
        return Err(p.unexpected("end of file"));
    }
    Ok(theory)
}

/// A theory name: an identifier, optionally with one parenthesised parameter.
fn theory_name(p: &mut Parser) -> Result<String, ParseError> {
    let mut name = p.ident()?;
    if p.peek() == Some(&Tok::LParen) {
        p.i += 1;
        let arg = match p.bump() {
            Some(Tok::Ident(s)) => s,
            Some(Tok::Num(n)) => n.to_string(),
            _ => {
                p.i -= 1;
                return Err(p.unexpected("a parameter"));
            }
        };
        p.expect(Tok::RParen)?;
        name = format!("{name}({arg})");
    }
    Ok(name)
}

fn theory_block(p: &mut Parser) -> Result<Theory, ParseError> {
    match p.peek() {
        Some(Tok::Ident(s)) if s == "theory" => p.i += 1,
        _ => return Err(p.unexpected("`theory`")),
    }
    let name = theory_name(p)?;
    p.expect(Tok::Colon)?;
    let kind_pos = p.pos();
    let kind: TheoryKind = p
        .ident()?
        .parse()
        .map_err(|e: crate::theory::TheoryError| ParseError::at(kind_pos, e.to_string()))?;
    p.expect(Tok::LBrace)?;
    let mut theory = Theory::new(&name, kind);
    p.item_mode = true;
    loop {
        if p.peek() == Some(&Tok::RBrace) {
            p.i += 1;
            break;
        }
        item(p, &mut theory)?;
        match p.peek() {
            Some(Tok::Semi) => {
                p.i += 1;
            }
            Some(Tok::RBrace) => {}
            _ => return Err(p.unexpected("`;` or `}`")),
        }
    }
    p.item_mode = false;
    Ok(theory)
}

fn item(p: &mut Parser, theory: &mut Theory) -> Result<(), ParseError> {
    let pos = p.pos();
    let keyword = p.ident()?;
    let fail = |e: crate::theory::TheoryError| ParseError::at(pos, e.to_string());
    match keyword.as_str() {
        "gen" => {
            let name = p.ident()?;
            if ITEM_KEYWORDS.contains(&name.as_str()) || matches!(name.as_str(), "id" | "id0" | "sym") {
                return Err(ParseError::at(pos, format!("`{name}` is a keyword")));
            }
            p.expect(Tok::Colon)?;
            let arity = p.number()?;
            p.expect(Tok::Arrow)?;
            let coarity = p.number()?;
            let mut flags = Flags::NONE;
            while let Some(Tok::Ident(f)) = p.peek() {
                match f.as_str() {
                    "map" => flags.map = true,
                    "comap" => flags.comap = true,
                    _ => break,
                }
                p.i += 1;
            }
            theory
                .declare(Generator::new(&name, arity, coarity).with_flags(flags))
                .map_err(fail)
        }
        "law" => {
            let name = p.ident()?;
            p.expect(Tok::Colon)?;
            if theory.kind() == TheoryKind::Cartesian {
                let lpos = p.pos();
                let lhs = p.cartesian_list()?;
                p.expect(Tok::Eq)?;
                let rhs = p.cartesian_list()?;
                let domain = lhs
                    .iter()
                    .chain(&rhs)
                    .map(CartesianTerm::max_var)
                    .max()
                    .unwrap_or(0);
                let build = |terms| ArrowList::new(domain, terms).map_err(|e| ParseError::at(lpos, e.to_string()));
                let law = CartesianLaw {
                    name,
                    lhs: build(lhs)?,
                    rhs: build(rhs)?,
                };
                return theory.add_cartesian_law(law).map_err(fail);
            }
            let lhs = p.term(theory.signature())?;
            let cpos = p.pos();
            let cmp = p.comparison()?;
            let rhs = p.term(theory.signature())?;
            let law = Law::new(&name, lhs, cmp, rhs)
                .map_err(|e| ParseError::at(cpos, e.to_string()))?;
            theory.add_law(law).map_err(fail)
        }
        "def" => {
            let name = p.ident()?;
            p.expect(Tok::Eq)?;
            let body = p.term(theory.signature())?;
            theory.define(&name, body).map_err(fail)
        }
        "swap" => {
            let a = p.ident()?;
            let b = p.ident()?;
            theory.add_swap(&a, &b).map_err(fail)
        }
        "ring" => {
            let kind = p.ident()?;
            if kind != "zmod" {
                return Err(ParseError::at(pos, format!("unknown ring family `{kind}`")));
            }
            let n = p.number()?;
            let ring = FiniteRing::zmod(n).map_err(|e| ParseError::at(pos, e.to_string()))?;
            theory.set_ring(ring);
            Ok(())
        }
        other => Err(ParseError::at(pos, format!("unknown item `{other}`"))),
    }
}

/// Prints a theory in the file format accepted by [`parse_theory`].
pub fn print_theory(theory: &Theory) -> String {
    let mut out = String::new();
    writeln!(out, "theory {} : {} {{", theory.name(), theory.kind()).unwrap();
    let mut items: Vec<String> = Vec::new();
    if let Some(ring) = theory.ring() {
        if let Some(n) = ring.name().strip_prefix('z') {
            items.push(format!("ring zmod {n}"));
        }
    }
    // Declarations and definitions are interleaved in the order a reparse
    // needs: every definition after the generators it mentions.
    let sig = theory.signature();
    for g in sig.generators() {
        let mut line = format!("gen {} : {} -> {}", g.name, g.arity, g.coarity);
        if g.flags.map {
            line.push_str(" map");
        }
        if g.flags.comap {
            line.push_str(" comap");
        }
        items.push(line);
    }
    for (name, body) in sig.defs() {
        items.push(format!("def {name} = {body}"));
    }
    for (a, b) in theory.swap_table().pairs() {
        items.push(format!("swap {a} {b}"));
    }
    for law in theory.axioms() {
        items.push(format!("law {}: {} {} {}", law.name, law.lhs, law.cmp.symbol(), law.rhs));
    }
    for law in theory.cartesian_axioms() {
        items.push(format!("law {}: {} = {}", law.name, law.lhs, law.rhs));
    }
    let n = items.len();
    for (i, line) in items.into_iter().enumerate() {
        let sep = if i + 1 < n { ";" } else { "" };
        writeln!(out, "  {line}{sep}").unwrap();
    }
    out.push_str("}\n");
    out
}
