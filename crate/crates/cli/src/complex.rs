//! Complex literals such as `-1+3i`, `2i`, `0.5` or `1.5e-3 - i`.
//!
//! Whitespace is ignored anywhere. Reported positions are byte offsets into
//! the original text.

use dhstab::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid complex literal {text:?} at position {pos}: {msg}")]
pub struct ParseComplexError {
    pub text: String,
    pub pos: usize,
    pub msg: &'static str,
}

struct Cursor<'a> {
    text: &'a str,
    /// Non-whitespace characters with their byte offsets.
    chars: Vec<(usize, char)>,
    at: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let chars = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Cursor { text, chars, at: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.text.len(), |&(p, _)| p)
    }

    fn error(&self, msg: &'static str) -> ParseComplexError {
        ParseComplexError { text: self.text.to_string(), pos: self.pos(), msg }
    }

    fn sign(&mut self) -> Option<f64> {
        match self.peek() {
            Some('+') => {
                self.at += 1;
                Some(1.0)
            }
            Some('-') => {
                self.at += 1;
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn digits(&mut self, out: &mut String) -> usize {
        let mut count = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            out.push(c);
            self.at += 1;
            count += 1;
        }
        count
    }

    /// Unsigned decimal with optional fraction and exponent; `None` when no
    /// digits start here.
    fn number(&mut self) -> Result<Option<f64>, ParseComplexError> {
        let start = self.at;
        let mut s = String::new();
        let mut n = self.digits(&mut s);
        if self.peek() == Some('.') {
            s.push('.');
            self.at += 1;
            n += self.digits(&mut s);
        }
        if n == 0 {
            if self.at != start {
                self.at = start;
                return Err(self.error("expected digits"));
            }
            return Ok(None);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            s.push('e');
            self.at += 1;
            if let Some(sg) = self.sign() {
                s.push(if sg < 0.0 { '-' } else { '+' });
            }
            if self.digits(&mut s) == 0 {
                return Err(self.error("expected exponent digits"));
            }
        }
        s.parse().map(Some).map_err(|_| self.error("malformed number"))
    }

    fn finish(&self) -> Result<(), ParseComplexError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error("unexpected trailing character")),
        }
    }
}

pub fn parse_complex_literal(text: &str) -> Result<Complex64, ParseComplexError> {
    let mut cur = Cursor::new(text);
    if cur.peek().is_none() {
        return Err(cur.error("empty literal"));
    }
    let s1 = cur.sign().unwrap_or(1.0);
    let first = cur.number()?;
    if cur.peek() == Some('i') {
        cur.at += 1;
        cur.finish()?;
        return Ok(Complex64::new(0.0, s1 * first.unwrap_or(1.0)));
    }
    let re = s1 * first.ok_or_else(|| cur.error("expected a number or 'i'"))?;
    if cur.peek().is_none() {
        return Ok(Complex64::new(re, 0.0));
    }
    let s2 = cur.sign().ok_or_else(|| cur.error("expected '+' or '-' before the imaginary part"))?;
    let im = cur.number()?.unwrap_or(1.0);
    if cur.peek() != Some('i') {
        return Err(cur.error("imaginary part must end with 'i'"));
    }
    cur.at += 1;
    cur.finish()?;
    Ok(Complex64::new(re, s2 * im))
}

/// Inverse of [`parse_complex_literal`]; uses the shortest decimal that
/// reads back to the same bits.
pub fn format_complex_literal(z: Complex64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        return format!("{:?}", z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{sign}{:?}i", z.re, z.im.abs())
}
