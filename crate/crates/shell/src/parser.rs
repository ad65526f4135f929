//! Recursive-descent parsers for documents and kernel expressions.

use imp_core::kernelcat::{KernelExpr, Rational, SetExpr};

use crate::ast::{Decl, DeclBody, Ref, SetRef, Table};
use crate::error::{ErrorKind, ParseError, Pos};
use crate::lexer::{lex, Tok, Token};

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str, expr_mode: bool) -> PResult<Parser> {
        Ok(Parser {
            tokens: lex(text, expr_mode)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.at + 1).min(self.tokens.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::new(
            ErrorKind::Syntax,
            self.pos(),
            format!("expected {expected}, found {}", self.peek()),
        )
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn word(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(what)),
        }
    }

    fn name_ref(&mut self, what: &str) -> PResult<Ref> {
        let pos = self.pos();
        Ok(Ref {
            name: self.word(what)?,
            pos,
        })
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Tok::Word(w) if w == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&format!("`{kw}`"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w == kw)
    }

    /// `word | * | (element, element, ...)`
    fn element(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            Tok::Star => {
                self.bump();
                Ok("*".to_string())
            }
            Tok::LParen => {
                self.bump();
                let mut parts = vec![self.element()?];
                while self.eat(&Tok::Comma) {
                    parts.push(self.element()?);
                }
                if parts.len() < 2 {
                    return Err(self.error("`,` (tuples have at least two components)"));
                }
                self.expect(Tok::RParen)?;
                Ok(format!("({})", parts.join(",")))
            }
            _ => Err(self.error("an element")),
        }
    }

    /// A braced, comma-separated list; a trailing comma is allowed.
    fn braced<T>(&mut self, mut item: impl FnMut(&mut Parser) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while self.peek() != &Tok::RBrace {
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn elements(&mut self) -> PResult<Vec<String>> {
        self.braced(Parser::element)
    }

    fn table(&mut self) -> PResult<Table> {
        self.braced(|p| {
            let a = p.element()?;
            p.expect(Tok::Arrow)?;
            Ok((a, p.element()?))
        })
    }

    fn set_factor(&mut self) -> PResult<SetExpr> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(if w == "1" { SetExpr::Unit } else { SetExpr::Named(w) })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.set_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.error("a set name, `1` or `(`")),
        }
    }

    fn set_expr(&mut self) -> PResult<SetExpr> {
        let mut parts = vec![self.set_factor()?];
        while self.eat(&Tok::Star) {
            parts.push(self.set_factor()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one factor")
        } else {
            SetExpr::Product(parts)
        })
    }

    fn set_ref(&mut self) -> PResult<SetRef> {
        if self.peek() == &Tok::LBrace {
            Ok(SetRef::Literal(self.elements()?))
        } else {
            Ok(SetRef::Expr(self.set_expr()?))
        }
    }

    /// `: DOM -> COD`
    fn signature(&mut self) -> PResult<(SetRef, SetRef)> {
        self.expect(Tok::Colon)?;
        let dom = self.set_ref()?;
        self.expect(Tok::Arrow)?;
        Ok((dom, self.set_ref()?))
    }

    fn weight(&mut self) -> PResult<Rational> {
        let pos = self.pos();
        let mut text = self.word("a weight")?;
        if self.eat(&Tok::Slash) {
            text = format!("{text}/{}", self.word("a denominator")?);
        }
        text.parse::<Rational>()
            .map_err(|_| ParseError::new(ErrorKind::Syntax, pos, format!("`{text}` is not a rational number")))
    }

    fn decl(&mut self) -> PResult<Decl> {
        let pos = self.pos();
        let kw = self.word("a declaration keyword")?;
        let name = self.word("a declaration name")?;
        let body = match kw.as_str() {
            "set" => {
                self.expect(Tok::Equals)?;
                DeclBody::Set(self.set_ref()?)
            }
            "fn" => {
                let (dom, cod) = self.signature()?;
                DeclBody::Fn {
                    dom,
                    cod,
                    table: self.table()?,
                }
            }
            "system" => {
                self.expect(Tok::LBrace)?;
                self.keyword("states")?;
                let states = self.set_ref()?;
                let inputs = if self.at_keyword("inputs") {
                    self.bump();
                    self.set_ref()?
                } else {
                    SetRef::Expr(SetExpr::Unit)
                };
                self.keyword("update")?;
                let update = self.table()?;
                self.expect(Tok::RBrace)?;
                DeclBody::System { states, inputs, update }
            }
            "map" => {
                self.expect(Tok::Colon)?;
                let source = self.name_ref("a system name")?;
                self.expect(Tok::Arrow)?;
                let target = self.name_ref("a system name")?;
                self.expect(Tok::LBrace)?;
                self.keyword("states")?;
                let states = self.table()?;
                let inputs = if self.at_keyword("inputs") {
                    self.bump();
                    Some(self.table()?)
                } else {
                    None
                };
                self.expect(Tok::RBrace)?;
                DeclBody::Map {
                    source,
                    target,
                    states,
                    inputs,
                }
            }
            "relkernel" => {
                let (dom, cod) = self.signature()?;
                let rows = self.braced(|p| {
                    let x = p.element()?;
                    p.expect(Tok::Arrow)?;
                    Ok((x, p.elements()?))
                })?;
                DeclBody::RelKernel { dom, cod, rows }
            }
            "stochkernel" => {
                let (dom, cod) = self.signature()?;
                let rows = self.braced(|p| {
                    let x = p.element()?;
                    p.expect(Tok::Arrow)?;
                    let row = p.braced(|p| {
                        let y = p.element()?;
                        p.expect(Tok::Colon)?;
                        Ok((y, p.weight()?))
                    })?;
                    Ok((x, row))
                })?;
                DeclBody::StochKernel { dom, cod, rows }
            }
            "problem" => {
                self.expect(Tok::LBrace)?;
                self.keyword("env")?;
                let env = self.name_ref("a system name")?;
                self.keyword("plant")?;
                let plant = self.name_ref("a system name")?;
                self.keyword("controller")?;
                let controller = self.name_ref("a system name")?;
                self.keyword("targets")?;
                let targets = self.elements()?;
                let attractor = if self.at_keyword("attractor") {
                    self.bump();
                    Some(self.elements()?)
                } else {
                    None
                };
                self.expect(Tok::RBrace)?;
                DeclBody::Problem {
                    env,
                    plant,
                    controller,
                    targets,
                    attractor,
                }
            }
            "reasoner" => {
                self.expect(Tok::LBrace)?;
                self.keyword("params")?;
                let params = self.set_ref()?;
                self.keyword("observations")?;
                let observations = self.set_ref()?;
                self.keyword("hidden")?;
                let hidden = self.set_ref()?;
                self.keyword("update")?;
                let update = self.name_ref("a function name")?;
                self.keyword("interpretation")?;
                let interpretation = self.name_ref("a kernel name")?;
                self.keyword("model")?;
                let model = self.name_ref("a kernel name")?;
                self.expect(Tok::RBrace)?;
                DeclBody::Reasoner {
                    params,
                    observations,
                    hidden,
                    update,
                    interpretation,
                    model,
                }
            }
            _ => {
                return Err(ParseError::new(
                    ErrorKind::Syntax,
                    pos,
                    format!(
                        "expected a declaration keyword (set, fn, system, map, relkernel, \
                         stochkernel, problem, reasoner), found `{kw}`"
                    ),
                ))
            }
        };
        Ok(Decl { name, pos, body })
    }

    fn kernel_atom(&mut self) -> PResult<KernelExpr> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.kernel_expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Word(w) => {
                let bracketed = self.peek2() == &Tok::LBracket;
                let named = matches!(self.peek2(), Tok::Word(_));
                self.bump();
                match w.as_str() {
                    "id" | "copy" | "del" | "swap" if bracketed => {
                        self.bump();
                        let a = self.set_expr()?;
                        let e = match w.as_str() {
                            "id" => KernelExpr::Id(a),
                            "copy" => KernelExpr::Copy(a),
                            "del" => KernelExpr::Del(a),
                            _ => {
                                self.expect(Tok::Comma)?;
                                KernelExpr::Swap(a, self.set_expr()?)
                            }
                        };
                        self.expect(Tok::RBracket)?;
                        Ok(e)
                    }
                    "fn" | "pre" if named => {
                        let n = self.word("a function name")?;
                        Ok(if w == "fn" { KernelExpr::FromFn(n) } else { KernelExpr::Preimage(n) })
                    }
                    "fn" | "pre" => Err(self.error("a function name")),
                    _ => Ok(KernelExpr::Named(w)),
                }
            }
            _ => Err(self.error("a kernel expression")),
        }
    }

    fn kernel_term(&mut self) -> PResult<KernelExpr> {
        let mut e = self.kernel_atom()?;
        while self.eat(&Tok::Tensor) {
            e = KernelExpr::par(e, self.kernel_atom()?);
        }
        Ok(e)
    }

    fn kernel_expr(&mut self) -> PResult<KernelExpr> {
        let mut e = self.kernel_term()?;
        while self.eat(&Tok::Semi) {
            e = KernelExpr::seq(e, self.kernel_term()?);
        }
        Ok(e)
    }
}

/// Parses a document into declarations without resolving references.
pub fn parse_decls(text: &str) -> PResult<Vec<Decl>> {
    let mut p = Parser::new(text, false)?;
    let mut decls = Vec::new();
    while p.peek() != &Tok::Eof {
        decls.push(p.decl()?);
    }
    Ok(decls)
}

/// Parses `expr := term (';' term)*`, `term := atom ('⊗' atom)*`.
pub fn parse_kernel_expr(text: &str) -> PResult<KernelExpr> {
    let mut p = Parser::new(text, true)?;
    let e = p.kernel_expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error("`;`, `(x)` or end of input"));
    }
    Ok(e)
}
