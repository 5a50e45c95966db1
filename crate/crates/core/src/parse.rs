//! Tokenizer for the word grammar shared by every textual input:
//!
//! ```text
//! word := term (ws term)* | ""
//! term := gen ("^" signed-int)?
//! gen  := "x" int | "y(" int "," int ")" | "c(" int "," int ")"
//! ```
//!
//! Whitespace between terms is optional. Columns in errors are 1-based
//! character positions.

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gen {
    X(usize),
    Y(usize, usize),
    C(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub gen: Gen,
    pub exponent: i64,
    pub column: usize,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0 }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { column: self.column(), message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn uint(&mut self) -> Result<usize, Error> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits
            .parse()
            .map_err(|_| Error::Parse { column: start + 1, message: "integer too large".into() })
    }

    fn sint(&mut self) -> Result<i64, Error> {
        let negative = match self.peek() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let start = self.pos;
        let v = self.uint()? as i64;
        if v > 1_000_000 {
            return Err(Error::Parse { column: start + 1, message: "exponent too large".into() });
        }
        Ok(if negative { -v } else { v })
    }

    fn pair(&mut self) -> Result<(usize, usize), Error> {
        self.expect('(')?;
        self.skip_ws();
        let a = self.uint()?;
        self.skip_ws();
        self.expect(',')?;
        self.skip_ws();
        let b = self.uint()?;
        self.skip_ws();
        self.expect(')')?;
        Ok((a, b))
    }

    fn term(&mut self) -> Result<Term, Error> {
        let column = self.column();
        let gen = match self.peek() {
            Some('x') => {
                self.pos += 1;
                Gen::X(self.uint()?)
            }
            Some('y') => {
                self.pos += 1;
                let (a, b) = self.pair()?;
                Gen::Y(a, b)
            }
            Some('c') => {
                self.pos += 1;
                let (a, b) = self.pair()?;
                Gen::C(a, b)
            }
            _ => return Err(self.err("expected 'x', 'y(' or 'c('")),
        };
        let exponent = if self.peek() == Some('^') {
            self.pos += 1;
            self.sint()?
        } else {
            1
        };
        Ok(Term { gen, exponent, column })
    }
}

pub fn parse_terms(src: &str) -> Result<Vec<Term>, Error> {
    let mut cur = Cursor::new(src);
    let mut terms = Vec::new();
    cur.skip_ws();
    while cur.peek().is_some() {
        terms.push(cur.term()?);
        cur.skip_ws();
    }
    Ok(terms)
}

/// `letter` repeated `|exponent|` times, inverted for negative exponents.
pub fn expand(letter: i32, exponent: i64) -> impl Iterator<Item = i32> {
    let x = if exponent < 0 { -letter } else { letter };
    std::iter::repeat_n(x, exponent.unsigned_abs() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_generator_kinds() {
        let t = parse_terms("y(3,1) y(2,2)^-1 x1^3 c(1, 2)").unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[0].gen, Gen::Y(3, 1));
        assert_eq!(t[1].exponent, -1);
        assert_eq!(t[1].column, 8);
        assert_eq!(t[2], Term { gen: Gen::X(1), exponent: 3, column: 18 });
        assert_eq!(t[3].gen, Gen::C(1, 2));
    }

    #[test]
    fn empty_and_blank_input() {
        assert!(parse_terms("").unwrap().is_empty());
        assert!(parse_terms("   ").unwrap().is_empty());
    }

    #[test]
    fn error_columns() {
        let col = |s: &str| match parse_terms(s) {
            Err(Error::Parse { column, .. }) => column,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(col("y(3,"), 5);
        assert_eq!(col("x1 z2"), 4);
        assert_eq!(col("x"), 2);
        assert_eq!(col("x1^"), 4);
    }
}
