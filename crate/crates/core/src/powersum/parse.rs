//! Recursive-descent parser for power-sum expressions.
//!
//! ```text
//! expr     := [sign] term (sign term)*
//! sign     := '+' | '-' | '−'
//! term     := factor (('*' | '/') factor)*
//! factor   := number ['^' int]
//!           | 'sqrt' '(' rational ')'
//!           | 'x' ['^' exponent]
//! exponent := ['-'] number | '(' ['-'] number ['/' number] ')'
//! rational := ['-'] number ['/' number]
//! int      := ['-'] digits | '(' ['-'] digits ')'
//! number   := digits ['.' digits] | '.' digits
//! ```
//!
//! Whitespace is ignored between tokens. `^` binds tighter than `*` and `/`,
//! so `x^-1/2` reads as `(x^-1)/2`; rational exponents need parentheses.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedSub, ToPrimitive, Zero};

use super::{decimal_to_rational, rational_to_exponent, Exponent, PowerSumExpr, Scalar, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    Unexpected(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("zero denominator in exponent")]
    ZeroDenominatorExponent,
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative argument to sqrt")]
    NegativeSqrt,
    #[error("exponent out of range")]
    ExponentOverflow,
    #[error("{0}")]
    MixedRadicands(String),
}

/// Parses and normalizes an expression such as `"x^2 + 1/x"` or
/// `"3/2*sqrt(2)*x^(1/2)"`.
pub fn parse_function(text: &str) -> Result<PowerSumExpr, ParseError> {
    let mut p = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        len: text.len(),
    };
    let terms = p.expr()?;
    p.skip_ws();
    if let Some((at, c)) = p.peek() {
        return Err(ParseError {
            position: at,
            kind: ParseErrorKind::Unexpected(c),
        });
    }
    PowerSumExpr::from_terms(terms).map_err(|e| ParseError {
        position: 0,
        kind: ParseErrorKind::MixedRadicands(e.to_string()),
    })
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, char)> {
        self.chars.get(self.pos).copied()
    }

    fn offset(&self) -> usize {
        self.peek().map(|(i, _)| i).unwrap_or(self.len)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some((_, c)) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.offset(),
            kind,
        })
    }

    fn unexpected<T>(&self) -> Result<T, ParseError> {
        match self.peek() {
            Some((_, c)) => self.err(ParseErrorKind::Unexpected(c)),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        match self.peek() {
            Some((_, c)) if c == want => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn expect(&mut self, want: char, what: &'static str) -> Result<(), ParseError> {
        if self.eat(want) {
            Ok(())
        } else {
            self.skip_ws();
            match self.peek() {
                None => self.err(ParseErrorKind::UnexpectedEnd),
                Some(_) => self.err(ParseErrorKind::Expected(what)),
            }
        }
    }

    fn sign(&mut self) -> Option<bool> {
        self.skip_ws();
        match self.peek() {
            Some((_, '+')) => {
                self.pos += 1;
                Some(false)
            }
            Some((_, '-')) | Some((_, '−')) => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut terms = Vec::new();
        let mut negative = self.sign().unwrap_or(false);
        loop {
            let mut term = self.term()?;
            if negative {
                term.coefficient = term.coefficient.neg();
            }
            terms.push(term);
            match self.sign() {
                Some(neg) => negative = neg,
                None => break,
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut coefficient = Scalar::one();
        let mut exponent = Exponent::from_integer(0);
        self.factor(&mut coefficient, &mut exponent, false)?;
        loop {
            if self.eat('*') {
                self.factor(&mut coefficient, &mut exponent, false)?;
            } else if self.eat('/') {
                self.factor(&mut coefficient, &mut exponent, true)?;
            } else {
                break;
            }
        }
        Ok(Term {
            coefficient,
            exponent,
        })
    }

    fn factor(&mut self, coefficient: &mut Scalar, exponent: &mut Exponent, divide: bool) -> Result<(), ParseError> {
        self.skip_ws();
        let start = self.offset();
        match self.peek() {
            Some((_, 'x')) => {
                self.pos += 1;
                let e = if self.eat('^') { self.exponent()? } else { Exponent::from_integer(1) };
                let updated = if divide { exponent.checked_sub(&e) } else { exponent.checked_add(&e) };
                *exponent = match updated {
                    Some(v) => v,
                    None => return self.err(ParseErrorKind::ExponentOverflow),
                };
            }
            Some((_, 's')) => {
                self.keyword("sqrt")?;
                self.expect('(', "'(' after sqrt")?;
                self.skip_ws();
                let arg_at = self.offset();
                let arg = self.rational()?;
                self.expect(')', "')'")?;
                let root = match Scalar::sqrt_of(&arg) {
                    Some(r) => r,
                    None => {
                        return Err(ParseError {
                            position: arg_at,
                            kind: ParseErrorKind::NegativeSqrt,
                        })
                    }
                };
                if divide {
                    if root.is_zero() {
                        return Err(ParseError {
                            position: start,
                            kind: ParseErrorKind::DivisionByZero,
                        });
                    }
                    // 1/(q√d) = √d / (q·d)
                    let d = BigRational::from_integer(BigInt::from(root.radicand().clone()));
                    let inv = Scalar::sqrt_of(&d)
                        .expect("positive")
                        .scale(&(root.rational_part() * &d).recip());
                    *coefficient = coefficient.mul(&inv);
                } else {
                    *coefficient = coefficient.mul(&root);
                }
            }
            Some((_, c)) if c.is_ascii_digit() || c == '.' => {
                let mut value = self.number()?;
                if self.eat('^') {
                    let power = self.int()?;
                    if value.is_zero() && power < 0 {
                        return Err(ParseError {
                            position: start,
                            kind: ParseErrorKind::DivisionByZero,
                        });
                    }
                    value = pow_rational(&value, power);
                }
                if divide {
                    if value.is_zero() {
                        return Err(ParseError {
                            position: start,
                            kind: ParseErrorKind::DivisionByZero,
                        });
                    }
                    value = value.recip();
                }
                *coefficient = coefficient.scale(&value);
            }
            _ => return self.unexpected(),
        }
        Ok(())
    }

    fn keyword(&mut self, word: &'static str) -> Result<(), ParseError> {
        for want in word.chars() {
            match self.peek() {
                Some((_, c)) if c == want => self.pos += 1,
                _ => return self.unexpected(),
            }
        }
        Ok(())
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some((_, c)) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn number(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let int_part = self.digits();
        let mut frac_part = String::new();
        if matches!(self.peek(), Some((_, '.'))) {
            self.pos += 1;
            frac_part = self.digits();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return match self.peek() {
                None => self.err(ParseErrorKind::UnexpectedEnd),
                Some(_) => self.err(ParseErrorKind::Expected("number")),
            };
        }
        Ok(decimal_to_rational(&int_part, &frac_part))
    }

    fn signed_number(&mut self) -> Result<BigRational, ParseError> {
        let negative = self.sign().unwrap_or(false);
        let v = self.number()?;
        Ok(if negative { -v } else { v })
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let numer = self.signed_number()?;
        if self.eat('/') {
            self.skip_ws();
            let at = self.offset();
            let denom = self.number()?;
            if denom.is_zero() {
                return Err(ParseError {
                    position: at,
                    kind: ParseErrorKind::DivisionByZero,
                });
            }
            return Ok(numer / denom);
        }
        Ok(numer)
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        self.skip_ws();
        let value = if self.eat('(') {
            let numer = self.signed_number()?;
            let value = if self.eat('/') {
                self.skip_ws();
                let at = self.offset();
                let denom = self.number()?;
                if denom.is_zero() {
                    return Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::ZeroDenominatorExponent,
                    });
                }
                numer / denom
            } else {
                numer
            };
            self.expect(')', "')'")?;
            value
        } else {
            self.signed_number()?
        };
        match rational_to_exponent(&value) {
            Some(e) => Ok(e),
            None => self.err(ParseErrorKind::ExponentOverflow),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let parenthesized = self.eat('(');
        let negative = self.sign().unwrap_or(false);
        self.skip_ws();
        let digits = self.digits();
        if digits.is_empty() {
            return self.err(ParseErrorKind::Expected("integer power"));
        }
        if parenthesized {
            self.expect(')', "')'")?;
        }
        let v: i64 = match digits.parse::<i64>() {
            Ok(v) if v <= 1 << 20 => v,
            _ => return self.err(ParseErrorKind::ExponentOverflow),
        };
        Ok(if negative { -v } else { v })
    }
}

fn pow_rational(base: &BigRational, power: i64) -> BigRational {
    let e = power.unsigned_abs().to_usize().unwrap_or(0);
    let v = BigRational::new(num_traits::pow(base.numer().clone(), e), num_traits::pow(base.denom().clone(), e));
    if power < 0 {
        v.recip()
    } else {
        v
    }
}
