//! Lexer and recursive-descent parser for the test-purpose DSL.
//!
//! Whitespace (including newlines) and `#` line comments are trivia, so
//! statements may share a line. Identifiers are `[A-Za-z0-9_]+`; keywords
//! are reserved.

use super::{
    Endpoint, Instance, InstanceKind, Message, MscDocument, MscError, Stmt, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Msc,
    Inst,
    Port,
    Sut,
    Msg,
    From,
    To,
    Coregion,
    Alt,
    Order,
    VerdictKw,
    Pass,
    Fail,
    Inconc,
    Env,
    LBrace,
    RBrace,
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s}"),
            Tok::Msc => "msc".into(),
            Tok::Inst => "inst".into(),
            Tok::Port => "port".into(),
            Tok::Sut => "sut".into(),
            Tok::Msg => "msg".into(),
            Tok::From => "from".into(),
            Tok::To => "to".into(),
            Tok::Coregion => "coregion".into(),
            Tok::Alt => "alt".into(),
            Tok::Order => "order".into(),
            Tok::VerdictKw => "verdict".into(),
            Tok::Pass => "pass".into(),
            Tok::Fail => "fail".into(),
            Tok::Inconc => "inconc".into(),
            Tok::Env => "env".into(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
            Tok::Arrow => "->".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, MscError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    loop {
        let (tline, tcol) = (line, col);
        let c = match chars.peek().copied() {
            Some(c) => c,
            None => {
                out.push(Lexed {
                    tok: Tok::Eof,
                    line,
                    col,
                });
                return Ok(out);
            }
        };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() || c == ';' {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                bump(&mut chars);
                if c == '\n' {
                    break;
                }
            }
            continue;
        }
        let tok = match c {
            '{' => {
                bump(&mut chars);
                Tok::LBrace
            }
            '}' => {
                bump(&mut chars);
                Tok::RBrace
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Arrow
                } else {
                    return Err(MscError::Syntax {
                        line: tline,
                        col: tcol,
                        expected: "->".into(),
                        found: "-".into(),
                    });
                }
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        word.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "msc" => Tok::Msc,
                    "inst" => Tok::Inst,
                    "port" => Tok::Port,
                    "sut" => Tok::Sut,
                    "msg" => Tok::Msg,
                    "from" => Tok::From,
                    "to" => Tok::To,
                    "coregion" => Tok::Coregion,
                    "alt" => Tok::Alt,
                    "order" => Tok::Order,
                    "verdict" => Tok::VerdictKw,
                    "pass" => Tok::Pass,
                    "fail" => Tok::Fail,
                    "inconc" => Tok::Inconc,
                    "env" => Tok::Env,
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(MscError::Syntax {
                    line: tline,
                    col: tcol,
                    expected: "statement or identifier".into(),
                    found: format!("{other:?}"),
                })
            }
        };
        out.push(Lexed {
            tok,
            line: tline,
            col: tcol,
        });
    }
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn advance(&mut self) -> &Tok {
        let tok = &self.toks[self.pos].tok;
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> MscError {
        let at = &self.toks[self.pos];
        MscError::Syntax {
            line: at.line,
            col: at.col,
            expected: expected.into(),
            found: at.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), MscError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, MscError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(name)
            }
            _ => Err(self.error(what)),
        }
    }

    fn endpoint(&mut self) -> Result<Endpoint, MscError> {
        match self.peek().clone() {
            Tok::Env => {
                self.advance();
                Ok(Endpoint::Env)
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(Endpoint::Inst(name))
            }
            _ => Err(self.error("instance name or env")),
        }
    }

    fn message(&mut self) -> Result<Message, MscError> {
        self.expect(Tok::Msg, "msg")?;
        let msg = self.ident("message name")?;
        self.expect(Tok::From, "from")?;
        let from = self.endpoint()?;
        self.expect(Tok::To, "to")?;
        let to = self.endpoint()?;
        Ok(Message { msg, from, to })
    }

    fn stmt(&mut self) -> Result<Stmt, MscError> {
        match self.peek() {
            Tok::Msg => Ok(Stmt::Message(self.message()?)),
            Tok::Coregion => {
                self.advance();
                let instance = self.ident("instance name")?;
                self.expect(Tok::LBrace, "{")?;
                let mut messages = Vec::new();
                while *self.peek() == Tok::Msg {
                    messages.push(self.message()?);
                }
                self.expect(Tok::RBrace, "msg or }")?;
                Ok(Stmt::Coregion { instance, messages })
            }
            Tok::Alt => {
                self.advance();
                self.expect(Tok::LBrace, "{")?;
                let mut branches = Vec::new();
                while *self.peek() == Tok::LBrace {
                    self.advance();
                    let mut body = Vec::new();
                    while *self.peek() != Tok::RBrace && *self.peek() != Tok::Eof {
                        body.push(self.stmt()?);
                    }
                    self.expect(Tok::RBrace, "}")?;
                    branches.push(body);
                }
                if branches.is_empty() {
                    return Err(self.error("{ opening an alt branch"));
                }
                self.expect(Tok::RBrace, "{ or }")?;
                Ok(Stmt::Alt { branches })
            }
            Tok::Order => {
                self.advance();
                let from = self.ident("instance name")?;
                self.expect(Tok::Arrow, "->")?;
                let to = self.ident("instance name")?;
                Ok(Stmt::Order { from, to })
            }
            Tok::VerdictKw => {
                self.advance();
                let v = match self.peek() {
                    Tok::Pass => Verdict::Pass,
                    Tok::Fail => Verdict::Fail,
                    Tok::Inconc => Verdict::Inconc,
                    _ => return Err(self.error("pass, fail or inconc")),
                };
                self.advance();
                Ok(Stmt::Verdict(v))
            }
            _ => Err(self.error("statement (msg, coregion, alt, order or verdict)")),
        }
    }
}

pub(super) fn parse_document(text: &str) -> Result<MscDocument, MscError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    p.expect(Tok::Msc, "msc")?;
    let name = p.ident("document name")?;
    let mut instances = Vec::new();
    while *p.peek() == Tok::Inst {
        p.advance();
        let iname = p.ident("instance name")?;
        let kind = match p.peek() {
            Tok::Port => InstanceKind::Port,
            Tok::Sut => InstanceKind::Sut,
            _ => return Err(p.error("port or sut")),
        };
        p.advance();
        instances.push(Instance { name: iname, kind });
    }
    let mut body = Vec::new();
    while *p.peek() != Tok::Eof {
        body.push(p.stmt()?);
    }
    Ok(MscDocument {
        name,
        instances,
        body,
    })
}
