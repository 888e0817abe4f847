//! Expression front end.
//!
//! Grammar (EBNF), lowest precedence first:
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = ("-" | "+") unary | power ;
//! power    = atom [ "^" unary ] ;          (* right-associative *)
//! atom     = number | identifier | "(" expr ")" ;
//! number   = digit { digit } [ "." digit { digit } ] [ ("e" | "E") ["+" | "-"] digit { digit } ] ;
//! identifier = (letter | "_") { letter | digit | "_" } ;
//! ```
//!
//! The exponent of `^` must fold to an integer constant with `|n| <= 64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExprError, Sym, SymbolTable};

pub const MAX_EXPONENT: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Int(BigInt),
    Rational(BigRational),
    Symbol(Sym),
    Neg(Box<Ast>),
    Binary(BinOp, Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v, _) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, i)),
            '-' => out.push((Tok::Minus, i)),
            '*' => out.push((Tok::Star, i)),
            '/' => out.push((Tok::Slash, i)),
            '^' => out.push((Tok::Caret, i)),
            '(' => out.push((Tok::LParen, i)),
            ')' => out.push((Tok::RParen, i)),
            c if c.is_ascii_digit() || c == '.' => {
                let (value, integral, end) = lex_number(text, i)?;
                out.push((Tok::Num(value, integral), start));
                i = end;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ExprError::Lex { pos: i, ch });
            }
        }
        i += 1;
    }
    Ok(out)
}

fn lex_number(text: &str, start: usize) -> Result<(BigRational, bool, usize), ExprError> {
    let b = text.as_bytes();
    let mut i = start;
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - s
    };
    let int_len = digits(&mut i);
    let int_part = &text[start..i];
    let mut frac_part = "";
    let mut integral = true;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let fs = i;
        let n = digits(&mut i);
        if n == 0 && int_len == 0 {
            return Err(ExprError::Lex {
                pos: start,
                ch: '.',
            });
        }
        frac_part = &text[fs..i];
        integral = false;
    }
    let mut exp: i64 = 0;
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let save = i;
        i += 1;
        let mut neg = false;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            neg = b[i] == b'-';
            i += 1;
        }
        let es = i;
        if digits(&mut i) == 0 {
            // `2e` is a number followed by an identifier; let the parser complain.
            i = save;
        } else {
            exp = text[es..i]
                .parse::<i64>()
                .map_err(|_| ExprError::Lex { pos: es, ch: 'e' })?;
            if exp.abs() > 4096 {
                return Err(ExprError::Lex { pos: es, ch: 'e' });
            }
            if neg {
                exp = -exp;
            }
            integral = false;
        }
    }
    let mantissa: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .unwrap_or_else(|_| BigInt::zero());
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
    };
    let integral = integral || value.is_integer();
    Ok((value, integral, i))
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    symbols: &'a SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Ast::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Ast::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let pos = self.here();
        let exponent = self.unary()?;
        let n = fold_integer(&exponent).ok_or(ExprError::NonIntegerExponent { pos })?;
        let n = n
            .to_i64()
            .filter(|n| n.abs() <= MAX_EXPONENT)
            .ok_or_else(|| ExprError::ExponentOutOfRange {
                pos,
                exponent: n.to_string(),
            })?;
        Ok(Ast::Pow(Box::new(base), n as i32))
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        let end = self.end;
        match self.bump() {
            Some((Tok::Num(v, true), _)) => Ok(Ast::Int(v.to_integer())),
            Some((Tok::Num(v, false), _)) => Ok(Ast::Rational(v)),
            Some((Tok::Ident(name), pos)) => self
                .symbols
                .lookup(&name)
                .map(Ast::Symbol)
                .ok_or(ExprError::UnknownSymbol { name, pos }),
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    Some((t, pos)) => Err(ExprError::UnexpectedToken {
                        pos,
                        found: t.describe(),
                    }),
                    None => Err(ExprError::UnexpectedEnd { pos: end }),
                }
            }
            Some((t, pos)) => Err(ExprError::UnexpectedToken {
                pos,
                found: t.describe(),
            }),
            None => Err(ExprError::UnexpectedEnd { pos: end }),
        }
    }
}

/// Integer value of a constant exponent sub-expression, if it has one.
fn fold_integer(ast: &Ast) -> Option<BigInt> {
    match ast {
        Ast::Int(n) => Some(n.clone()),
        Ast::Rational(r) if r.is_integer() => Some(r.to_integer()),
        Ast::Neg(a) => fold_integer(a).map(|n| -n),
        Ast::Binary(op, a, b) => {
            let (a, b) = (fold_integer(a)?, fold_integer(b)?);
            match op {
                BinOp::Add => Some(a + b),
                BinOp::Sub => Some(a - b),
                BinOp::Mul => Some(a * b),
                BinOp::Div => {
                    if b.is_zero() || !(&a % &b).is_zero() {
                        None
                    } else {
                        Some(a / b)
                    }
                }
            }
        }
        Ast::Pow(a, k) => {
            let a = fold_integer(a)?;
            if *k < 0 {
                if a.abs().is_one() {
                    Some(num_traits::pow(a, k.unsigned_abs() as usize))
                } else {
                    None
                }
            } else {
                Some(num_traits::pow(a, *k as usize))
            }
        }
        _ => None,
    }
}

/// Parse `text` against `symbols`.
pub fn parse(text: &str, symbols: &SymbolTable) -> Result<Ast, ExprError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ExprError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        symbols,
    };
    let ast = p.expr()?;
    if let Some((t, pos)) = p.bump() {
        return Err(ExprError::UnexpectedToken {
            pos,
            found: t.describe(),
        });
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        SymbolTable::with_parameters(&["x", "y", "r0", "px", "py"]).unwrap()
    }

    fn sym(t: &SymbolTable, n: &str) -> Box<Ast> {
        Box::new(Ast::Symbol(t.sym(n).unwrap()))
    }

    #[test]
    fn circle_constraint_shape() {
        let t = table();
        let ast = parse("x^2+y^2-r0^2", &t).unwrap();
        let sq = |n| Box::new(Ast::Pow(sym(&t, n), 2));
        let expected = Ast::Binary(
            BinOp::Sub,
            Box::new(Ast::Binary(BinOp::Add, sq("x"), sq("y"))),
            sq("r0"),
        );
        assert_eq!(ast, expected);
    }

    #[test]
    fn half_kinetic() {
        let t = table();
        let ast = parse("1/2*(px^2+py^2)", &t).unwrap();
        match ast {
            Ast::Binary(BinOp::Mul, lhs, _) => {
                assert_eq!(
                    *lhs,
                    Ast::Binary(
                        BinOp::Div,
                        Box::new(Ast::Int(1.into())),
                        Box::new(Ast::Int(2.into()))
                    )
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn power_binds_tighter_than_negation() {
        let t = table();
        assert_eq!(
            parse("-x^2", &t).unwrap(),
            Ast::Neg(Box::new(Ast::Pow(sym(&t, "x"), 2)))
        );
    }

    #[test]
    fn power_is_right_associative() {
        let t = table();
        assert_eq!(parse("x^2^3", &t).unwrap(), Ast::Pow(sym(&t, "x"), 8));
        assert_eq!(parse("x^-2", &t).unwrap(), Ast::Pow(sym(&t, "x"), -2));
    }

    #[test]
    fn symbolic_exponent_is_rejected() {
        let t = table();
        assert!(matches!(
            parse("x^y", &t),
            Err(ExprError::NonIntegerExponent { pos: 2 })
        ));
        assert!(matches!(
            parse("x^0.5", &t),
            Err(ExprError::NonIntegerExponent { .. })
        ));
    }

    #[test]
    fn exponent_range() {
        let t = table();
        assert!(parse("x^64", &t).is_ok());
        assert!(matches!(
            parse("x^65", &t),
            Err(ExprError::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn lexical_error_reports_position() {
        let t = table();
        assert!(matches!(
            parse("x + $y", &t),
            Err(ExprError::Lex { pos: 4, ch: '$' })
        ));
    }

    #[test]
    fn unknown_symbol() {
        let t = table();
        assert!(matches!(
            parse("x + z", &t),
            Err(ExprError::UnknownSymbol { ref name, pos: 4 }) if name == "z"
        ));
    }

    #[test]
    fn decimals_are_exact() {
        let t = table();
        assert_eq!(
            parse("0.25", &t).unwrap(),
            Ast::Rational(BigRational::new(1.into(), 4.into()))
        );
        assert_eq!(
            parse("1e-3", &t).unwrap(),
            Ast::Rational(BigRational::new(1.into(), 1000.into()))
        );
        assert_eq!(parse("2.0", &t).unwrap(), Ast::Int(2.into()));
    }

    #[test]
    fn structural_errors() {
        let t = table();
        assert!(matches!(parse("", &t), Err(ExprError::Empty)));
        assert!(matches!(
            parse("(x+y", &t),
            Err(ExprError::UnexpectedEnd { .. })
        ));
        assert!(matches!(
            parse("x y", &t),
            Err(ExprError::UnexpectedToken { pos: 2, .. })
        ));
        assert!(matches!(
            parse("x*", &t),
            Err(ExprError::UnexpectedEnd { .. })
        ));
    }
}
