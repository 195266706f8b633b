//! Concrete syntax: formula parsing and deterministic rendering, the
//! line-oriented structure format, and TPTP FOF export.
//!
//! Formula grammar: atoms `name(x1,...,xk)` or bare `name` for arity 0;
//! connectives `~`, `&`, `|`, `->`, `<->` with precedence `~ > & > | > ->
//! > <->` and right-associative arrows; quantifiers `forall xK ( ... )`
//! and `exists xK ( ... )`. Identifiers may contain letters, digits and
//! `_ . @`; names introduced by the toolkit use the reserved `@` prefix or
//! an `@` separator.

use std::fmt::Write as _;

use crate::error::{Error, Result, SourceSpan};
use crate::model::Structure;
use crate::syntax::{Formula, Signature};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(usize),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Arrow,
    DArrow,
    Forall,
    Exists,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_' || c == b'@'
}

fn ident_cont(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || c == b'@'
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next_token(&mut self) -> Result<(Tok, SourceSpan)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, SourceSpan::new(start, start)));
        }
        let c = self.src[self.pos];
        let simple = |me: &mut Self, t: Tok, n: usize| {
            me.pos += n;
            Ok((t, SourceSpan::new(start, start + n)))
        };
        match c {
            b'(' => simple(self, Tok::LParen, 1),
            b')' => simple(self, Tok::RParen, 1),
            b',' => simple(self, Tok::Comma, 1),
            b'~' => simple(self, Tok::Not, 1),
            b'&' => simple(self, Tok::And, 1),
            b'|' => simple(self, Tok::Or, 1),
            b'-' => {
                if self.src.get(self.pos + 1) == Some(&b'>') {
                    simple(self, Tok::Arrow, 2)
                } else {
                    Err(Error::parse(
                        SourceSpan::new(start, start + 1),
                        "expected `->`",
                    ))
                }
            }
            b'<' => {
                if self.src.get(self.pos + 1) == Some(&b'-')
                    && self.src.get(self.pos + 2) == Some(&b'>')
                {
                    simple(self, Tok::DArrow, 3)
                } else {
                    Err(Error::parse(
                        SourceSpan::new(start, start + 1),
                        "expected `<->`",
                    ))
                }
            }
            c if ident_start(c) => {
                let mut end = self.pos + 1;
                while end < self.src.len() && ident_cont(self.src[end]) {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                let span = SourceSpan::new(start, end);
                let tok = match text {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => {
                        if let Some(idx) = parse_var_name(text) {
                            Tok::Var(idx)
                        } else {
                            Tok::Ident(text.to_string())
                        }
                    }
                };
                Ok((tok, span))
            }
            _ => Err(Error::parse(
                SourceSpan::new(start, start + 1),
                format!("unexpected character `{}`", c as char),
            )),
        }
    }
}

/// `x` followed by digits, value >= 1.
fn parse_var_name(s: &str) -> Option<usize> {
    let rest = s.strip_prefix('x')?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let idx: usize = rest.parse().ok()?;
    if idx >= 1 {
        Some(idx)
    } else {
        None
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    span: SourceSpan,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let (tok, span) = lexer.next_token()?;
        Ok(Parser { lexer, tok, span })
    }

    fn advance(&mut self) -> Result<()> {
        let (tok, span) = self.lexer.next_token()?;
        self.tok = tok;
        self.span = span;
        Ok(())
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.tok == want {
            self.advance()
        } else {
            Err(Error::parse(self.span, format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.implication()?;
        if self.tok == Tok::DArrow {
            self.advance()?;
            let rhs = self.formula()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.tok == Tok::Arrow {
            self.advance()?;
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.tok == Tok::Or {
            self.advance()?;
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.tok == Tok::And {
            self.advance()?;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.tok.clone() {
            Tok::Not => {
                self.advance()?;
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let is_forall = self.tok == Tok::Forall;
                self.advance()?;
                let v = match self.tok {
                    Tok::Var(v) => v,
                    _ => {
                        return Err(Error::parse(self.span, "expected a variable after quantifier"))
                    }
                };
                self.advance()?;
                self.expect(Tok::LParen, "`(` after quantified variable")?;
                let body = self.formula()?;
                self.expect(Tok::RParen, "`)` closing quantifier body")?;
                Ok(if is_forall {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                })
            }
            Tok::LParen => {
                self.advance()?;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if self.tok == Tok::LParen {
                    self.advance()?;
                    let mut args = Vec::new();
                    loop {
                        match self.tok {
                            Tok::Var(v) => {
                                args.push(v);
                                self.advance()?;
                            }
                            _ => {
                                return Err(Error::parse(
                                    self.span,
                                    "expected a variable argument",
                                ))
                            }
                        }
                        match self.tok {
                            Tok::Comma => self.advance()?,
                            Tok::RParen => {
                                self.advance()?;
                                break;
                            }
                            _ => return Err(Error::parse(self.span, "expected `,` or `)`")),
                        }
                    }
                    Ok(Formula::atom(&name, &args))
                } else {
                    Ok(Formula::prop(&name))
                }
            }
            Tok::Var(_) => Err(Error::parse(
                self.span,
                "variables cannot stand alone as formulas",
            )),
            _ => Err(Error::parse(self.span, "expected a formula")),
        }
    }
}

/// Parses the formula grammar; whitespace-insensitive.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    if p.tok != Tok::Eof {
        return Err(Error::parse(p.span, "trailing input after formula"));
    }
    Ok(f)
}

fn wrap(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(..) | Formula::Not(_) => render_into(f, out),
        _ => {
            out.push('(');
            render_into(f, out);
            out.push(')');
        }
    }
}

fn render_into(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(p, args) => {
            out.push_str(&p.name);
            if !args.is_empty() {
                out.push('(');
                for (i, v) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "x{v}");
                }
                out.push(')');
            }
        }
        Formula::Not(a) => {
            out.push('~');
            wrap(a, out);
        }
        Formula::And(a, b) => {
            wrap(a, out);
            out.push_str(" & ");
            wrap(b, out);
        }
        Formula::Or(a, b) => {
            wrap(a, out);
            out.push_str(" | ");
            wrap(b, out);
        }
        Formula::Implies(a, b) => {
            wrap(a, out);
            out.push_str(" -> ");
            wrap(b, out);
        }
        Formula::Iff(a, b) => {
            wrap(a, out);
            out.push_str(" <-> ");
            wrap(b, out);
        }
        Formula::Forall(v, a) => {
            let _ = write!(out, "forall x{v} (");
            render_into(a, out);
            out.push(')');
        }
        Formula::Exists(v, a) => {
            let _ = write!(out, "exists x{v} (");
            render_into(a, out);
            out.push(')');
        }
    }
}

/// Deterministic, fully parenthesized rendering; `parse_formula` of the
/// result is structurally identical to the input.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    render_into(f, &mut out);
    out
}

/// Number of lexical tokens in a rendered formula; the size measure used by
/// the growth laws.
pub fn token_count(text: &str) -> Result<usize> {
    let mut lexer = Lexer::new(text);
    let mut n = 0usize;
    loop {
        let (tok, _) = lexer.next_token()?;
        if tok == Tok::Eof {
            return Ok(n);
        }
        n += 1;
    }
}

/// Parses the line-oriented structure format: a `domain N` header, then one
/// line per true tuple (`pred: t1 t2 ...`, arity-0 truths as `pred:`).
/// Unlisted tuples are false.
pub fn parse_structure(text: &str) -> Result<Structure> {
    let mut lines = Vec::new();
    let mut offset = 0usize;
    for line in text.split('\n') {
        lines.push((offset, line));
        offset += line.len() + 1;
    }
    let mut structure: Option<Structure> = None;
    for (off, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let span = SourceSpan::new(off, off + raw.len());
        match &mut structure {
            None => {
                let rest = line
                    .strip_prefix("domain")
                    .ok_or_else(|| Error::parse(span, "expected `domain N` header"))?;
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(span, "invalid domain size"))?;
                if n == 0 {
                    return Err(Error::parse(span, "domain size must be positive"));
                }
                structure = Some(Structure::new(n, Signature::new()));
            }
            Some(s) => {
                let colon = line
                    .find(':')
                    .ok_or_else(|| Error::parse(span, "expected `pred: t1 t2 ...`"))?;
                let name = line[..colon].trim();
                if name.is_empty()
                    || !ident_start(name.as_bytes()[0])
                    || !name.bytes().all(ident_cont)
                {
                    return Err(Error::parse(span, "invalid predicate name"));
                }
                let mut tuple = Vec::new();
                for t in line[colon + 1..].split_whitespace() {
                    let v: usize = t
                        .parse()
                        .map_err(|_| Error::parse(span, "tuple elements must be integers"))?;
                    tuple.push(v);
                }
                s.add_tuple(name, tuple)?;
            }
        }
    }
    structure.ok_or_else(|| Error::parse(SourceSpan::new(0, 0), "missing `domain N` header"))
}

/// Canonical rendering: header, then tuple lines sorted lexicographically.
pub fn render_structure(s: &Structure) -> String {
    let mut lines: Vec<String> = Vec::new();
    for (pred, tuple) in s.all_tuples() {
        let mut line = format!("{pred}:");
        for t in tuple {
            let _ = write!(line, " {t}");
        }
        lines.push(line);
    }
    lines.sort();
    let mut out = format!("domain {}\n", s.domain_size());
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn tptp_name(name: &str) -> String {
    let plain = name
        .bytes()
        .next()
        .map(|c| c.is_ascii_lowercase())
        .unwrap_or(false)
        && name.bytes().all(|c| c.is_ascii_alphanumeric() || c == b'_');
    if plain {
        name.to_string()
    } else {
        let escaped = name.replace('\\', "\\\\").replace('\'', "\\'");
        format!("'{escaped}'")
    }
}

fn tptp_into(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(p, args) => {
            out.push_str(&tptp_name(&p.name));
            if !args.is_empty() {
                out.push('(');
                for (i, v) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "X{v}");
                }
                out.push(')');
            }
        }
        Formula::Not(a) => {
            out.push_str("~(");
            tptp_into(a, out);
            out.push(')');
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let op = match f {
                Formula::And(..) => " & ",
                Formula::Or(..) => " | ",
                Formula::Implies(..) => " => ",
                _ => " <=> ",
            };
            out.push('(');
            tptp_into(a, out);
            out.push_str(op);
            tptp_into(b, out);
            out.push(')');
        }
        Formula::Forall(v, a) => {
            let _ = write!(out, "![X{v}]: (");
            tptp_into(a, out);
            out.push(')');
        }
        Formula::Exists(v, a) => {
            let _ = write!(out, "?[X{v}]: (");
            tptp_into(a, out);
            out.push(')');
        }
    }
}

/// Emits a single TPTP FOF axiom unit for the sentence.
pub fn render_formula_tptp(name: &str, f: &Formula) -> String {
    let mut body = String::new();
    tptp_into(f, &mut body);
    format!("fof({name}, axiom, {body}).")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::fluted_status;

    #[test]
    fn parse_sentence_one() {
        let f = parse_formula(
            "forall x1 (student(x1) -> ~ forall x2 (prof(x2) -> admires(x1,x2)))",
        )
        .unwrap();
        let expect = Formula::forall(
            1,
            Formula::implies(
                Formula::atom("student", &[1]),
                Formula::not(Formula::forall(
                    2,
                    Formula::implies(
                        Formula::atom("prof", &[2]),
                        Formula::atom("admires", &[1, 2]),
                    ),
                )),
            ),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn parse_propositional() {
        let f = parse_formula("p & ~p").unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::prop("p"), Formula::not(Formula::prop("p")))
        );
    }

    #[test]
    fn parse_unbalanced() {
        assert!(matches!(
            parse_formula("forall x1 (p(x1)"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_formula("a & b | c").unwrap(),
            Formula::or(
                Formula::and(Formula::prop("a"), Formula::prop("b")),
                Formula::prop("c")
            )
        );
        assert_eq!(
            parse_formula("a -> b -> c").unwrap(),
            Formula::implies(
                Formula::prop("a"),
                Formula::implies(Formula::prop("b"), Formula::prop("c"))
            )
        );
        assert_eq!(
            parse_formula("~a & b").unwrap(),
            Formula::and(Formula::not(Formula::prop("a")), Formula::prop("b"))
        );
    }

    #[test]
    fn render_round_trip() {
        let texts = [
            "forall x1 (student(x1) -> ~ forall x2 (prof(x2) -> admires(x1,x2)))",
            "q",
            "p & (q | ~r) <-> s",
            "exists x1 (p(x1) & forall x2 (r(x1,x2)))",
        ];
        for t in texts {
            let f = parse_formula(t).unwrap();
            let r = render_formula(&f);
            let f2 = parse_formula(&r).unwrap();
            assert_eq!(f, f2, "round trip failed for {t}: rendered {r}");
        }
    }

    #[test]
    fn report_stable_under_rerendering() {
        let f =
            parse_formula("forall x1 (p(x1) -> exists x2 (r(x1,x2) & forall x3 (s(x1,x2,x3))))")
                .unwrap();
        let r1 = fluted_status(&f);
        let f2 = parse_formula(&render_formula(&f)).unwrap();
        assert_eq!(r1, fluted_status(&f2));
    }

    #[test]
    fn error_spans_within_input() {
        let bad = "forall x1 (p(x1) @@";
        match parse_formula(bad) {
            Err(Error::Parse { span, .. }) => {
                assert!(span.start <= span.end && span.end <= bad.len());
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn structure_round_trip() {
        let text = "domain 2\np: 0\n";
        let s = parse_structure(text).unwrap();
        assert!(s.holds("p", &[0]));
        assert!(!s.holds("p", &[1]));
        assert_eq!(render_structure(&s), text);
        // canonical form: unsorted input renders sorted
        let messy = "domain 3\n\nr: 2 1\np: 0\nr: 0 1\n";
        let s2 = parse_structure(messy).unwrap();
        assert_eq!(render_structure(&s2), "domain 3\np: 0\nr: 0 1\nr: 2 1\n");
        assert_eq!(parse_structure(&render_structure(&s2)).unwrap(), s2);
    }

    #[test]
    fn structure_out_of_range() {
        assert!(matches!(
            parse_structure("domain 2\np: 5\n"),
            Err(Error::ElementOutOfRange { .. })
        ));
    }

    #[test]
    fn tptp_output() {
        let f = parse_formula("forall x1 (p.1(x1) -> exists x2 (r(x1,x2)))").unwrap();
        let out = render_formula_tptp("f", &f);
        assert_eq!(
            out,
            "fof(f, axiom, ![X1]: (('p.1'(X1) => ?[X2]: (r(X1,X2))))).",
        );
    }
}
