//! Parser for the prefix expression notation used on the command line.
//!
//! The grammar mirrors the `Display` form of [`RusExpr`], so any printed
//! tree parses back to an equal tree:
//!
//! ```text
//! expr     := const(angle)
//!           | aff(input, scale, offset)
//!           | GB(expr, ...)
//!           | PAR(expr, ...)
//!           | neg(expr)
//!           | sum(expr, ...)
//!           | m4 | m6 | m8 | r2
//! ```
//!
//! Names are matched case-insensitively and whitespace may appear between
//! tokens; `m4`/`m6`/`m8`/`r2` expand to the built-in multiplier and
//! reciprocal trees. Errors carry the byte offset of the offending token.

use std::fmt;

use rus_core::synth::{assemble_r2, m4, m6, m8, RusExpr};

/// Maximum nesting depth accepted by the parser.
const MAX_DEPTH: usize = 64;

/// A syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.msg)
    }
}

/// Parses a complete expression; trailing input is an error.
pub fn parse_expr(src: &str) -> Result<RusExpr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let expr = p.expr(0)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", ch as char)))
        }
    }

    /// Lowercased identifier made of letters, digits, and underscores.
    fn ident(&mut self) -> Result<(usize, String), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an operator name"));
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .expect("ASCII identifier")
            .to_ascii_lowercase();
        Ok((start, name))
    }

    /// A float literal (optional sign, digits, '.', exponent).
    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        while let Some(c) = self.peek() {
            match c {
                b'0'..=b'9' | b'.' => self.pos += 1,
                b'e' | b'E' => {
                    self.pos += 1;
                    if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII number");
        text.parse().map_err(|_| ParseError {
            pos: start,
            msg: format!("expected a number, got '{text}'"),
        })
    }

    /// A nonnegative integer literal (used for input indices).
    fn index(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII digits");
        text.parse().map_err(|_| ParseError {
            pos: start,
            msg: "expected an input index".to_string(),
        })
    }

    /// One or more comma-separated child expressions, then ')'.
    fn children(&mut self, depth: usize) -> Result<Vec<RusExpr>, ParseError> {
        let mut ch = vec![self.expr(depth)?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    ch.push(self.expr(depth)?);
                }
                Some(b')') => {
                    self.pos += 1;
                    return Ok(ch);
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
    }

    fn expr(&mut self, depth: usize) -> Result<RusExpr, ParseError> {
        if depth >= MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        let (start, name) = self.ident()?;
        match name.as_str() {
            "m4" => return Ok(m4()),
            "m6" => return Ok(m6()),
            "m8" => return Ok(m8()),
            "r2" => return Ok(assemble_r2()),
            _ => {}
        }
        self.expect(b'(')?;
        let node = match name.as_str() {
            "const" => {
                let c = self.number()?;
                self.expect(b')')?;
                RusExpr::Const(c)
            }
            "aff" => {
                let input = self.index()?;
                self.expect(b',')?;
                let scale = self.number()?;
                self.expect(b',')?;
                let offset = self.number()?;
                self.expect(b')')?;
                RusExpr::Affine { input, scale, offset }
            }
            "gb" => RusExpr::GB(self.children(depth + 1)?),
            "par" => RusExpr::PAR(self.children(depth + 1)?),
            "sum" => RusExpr::Sum(self.children(depth + 1)?),
            "neg" => {
                let child = self.expr(depth + 1)?;
                self.expect(b')')?;
                RusExpr::Neg(Box::new(child))
            }
            _ => {
                return Err(ParseError {
                    pos: start,
                    msg: format!("unknown operator '{name}'"),
                })
            }
        };
        Ok(node)
    }
}
