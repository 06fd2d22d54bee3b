//! The function grammar used on the command line:
//!
//! ```text
//! max | min | proj(k) | wsum(w1,...,wn) | pnorm(p) | series(K) | dobos | jump | indicator
//!     | custom(zero | square | shift)
//! ```
//!
//! Names are case-insensitive and whitespace anywhere is ignored. Error
//! positions are byte offsets into the original text.

use super::AggregatorSpec;
use crate::error::{Error, Result};

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn err(&self, pos: usize, message: impl Into<String>) -> Error {
        Error::Parse { position: pos, message: message.into() }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(self.err(self.pos, format!("expected '{want}', found '{c}'"))),
            None => Err(self.err(self.pos, format!("expected '{want}', found end of input"))),
        }
    }

    /// A run of characters matching `pred`, with interior whitespace dropped.
    fn token(&mut self, pred: impl Fn(char) -> bool) -> (usize, String) {
        self.skip_ws();
        let start = self.pos;
        let mut out = String::new();
        loop {
            let rest = &self.text[self.pos..];
            let Some(c) = rest.chars().next() else { break };
            if pred(c) {
                out.push(c);
                self.pos += c.len_utf8();
            } else if c.is_whitespace() {
                // only keep consuming whitespace if the token continues after it
                let after = rest.trim_start();
                match after.chars().next() {
                    Some(n) if pred(n) && !out.is_empty() => self.pos += rest.len() - after.len(),
                    _ => break,
                }
            } else {
                break;
            }
        }
        (start, out)
    }

    fn number(&mut self) -> Result<(usize, f64)> {
        let (start, tok) = self.token(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
        if tok.is_empty() {
            return Err(self.err(start, "expected a number"));
        }
        let value: f64 = tok
            .parse()
            .map_err(|_| self.err(start, format!("'{tok}' is not a number")))?;
        if !value.is_finite() {
            return Err(self.err(start, "numbers must be finite"));
        }
        Ok((start, value))
    }

    fn integer(&mut self) -> Result<(usize, usize)> {
        let (start, tok) = self.token(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+'));
        if tok.is_empty() {
            return Err(self.err(start, "expected a positive integer"));
        }
        match tok.parse::<usize>() {
            Ok(v) if v >= 1 => Ok((start, v)),
            _ => Err(self.err(start, format!("'{tok}' is not a positive integer"))),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

pub fn parse_spec(text: &str) -> Result<AggregatorSpec> {
    let mut cur = Cursor { text, pos: 0 };
    if cur.at_end() {
        return Err(cur.err(0, "empty function expression"));
    }
    let (name_pos, name) = cur.token(|c| c.is_ascii_alphanumeric() || c == '_');
    if name.is_empty() {
        return Err(cur.err(name_pos, "expected a function name"));
    }
    let lowered = name.to_ascii_lowercase();
    let spec = match lowered.as_str() {
        "max" => AggregatorSpec::max(),
        "min" => AggregatorSpec::min(),
        "dobos" => AggregatorSpec::dobos(),
        "jump" => AggregatorSpec::jump(),
        "indicator" => AggregatorSpec::indicator(),
        "proj" => {
            cur.expect('(')?;
            let (_, k) = cur.integer()?;
            cur.expect(')')?;
            AggregatorSpec::projection(k)?
        }
        "series" => {
            cur.expect('(')?;
            let (_, k) = cur.integer()?;
            cur.expect(')')?;
            AggregatorSpec::series(k)?
        }
        "pnorm" => {
            cur.expect('(')?;
            let (pos, p) = cur.number()?;
            if p < 1.0 {
                return Err(cur.err(pos, format!("p-norm needs p >= 1, got {p}")));
            }
            cur.expect(')')?;
            AggregatorSpec::pnorm(p)?
        }
        "wsum" => {
            cur.expect('(')?;
            let mut weights = Vec::new();
            loop {
                let (pos, w) = cur.number()?;
                if w < 0.0 {
                    return Err(cur.err(pos, format!("weights must be nonnegative, got {w}")));
                }
                weights.push(w);
                match cur.peek() {
                    Some(',') => cur.expect(',')?,
                    _ => break,
                }
            }
            cur.expect(')')?;
            AggregatorSpec::weighted_sum(weights)?
        }
        "custom" => {
            cur.expect('(')?;
            let (pos, inner) = cur.token(|c| c.is_ascii_alphanumeric() || c == '_');
            let spec = match inner.to_ascii_lowercase().as_str() {
                "zero" => AggregatorSpec::constant_zero(),
                "square" => AggregatorSpec::square(),
                "shift" => AggregatorSpec::shift(),
                _ => return Err(cur.err(pos, format!("unknown custom function '{inner}'"))),
            };
            cur.expect(')')?;
            spec
        }
        _ => return Err(cur.err(name_pos, format!("unknown function '{name}'"))),
    };
    if !cur.at_end() {
        let pos = cur.pos;
        return Err(cur.err(pos, "unexpected trailing input"));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregators::{Arity, Kind};

    #[test]
    fn weighted_sum() {
        let f = parse_spec("wsum(0.5,0.5)").unwrap();
        match f.kind() {
            Kind::WeightedSum(w) => assert_eq!(w, &vec![0.5, 0.5]),
            k => panic!("{k:?}"),
        }
        assert_eq!(f.arity(), Arity::Fixed(2));
    }

    #[test]
    fn projection() {
        let f = parse_spec("proj(2)").unwrap();
        assert!(matches!(f.kind(), Kind::Projection(2)));
    }

    #[test]
    fn pnorm_below_one_rejected() {
        match parse_spec("pnorm(0.5)") {
            Err(Error::Parse { position: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn case_and_whitespace() {
        let f = parse_spec("  WSum ( 1 , 2.5e0 )  ").unwrap();
        assert_eq!(f.to_string(), "wsum(1,2.5)");
        assert!(matches!(parse_spec("Series( 16 )").unwrap().kind(), Kind::Series(16)));
        assert!(matches!(parse_spec("MAX").unwrap().kind(), Kind::Max));
        assert!(matches!(parse_spec("p norm(2)").unwrap().kind(), Kind::PNorm(_)));
    }

    #[test]
    fn error_positions() {
        let cases = [
            ("", 0),
            ("maxx", 0),
            ("  foo", 2),
            ("proj(0)", 5),
            ("proj(2.5)", 5),
            ("series(3", 8),
            ("wsum(1,-1)", 7),
            ("wsum()", 5),
            ("max)", 3),
            ("custom(cube)", 7),
        ];
        for (text, pos) in cases {
            match parse_spec(text) {
                Err(Error::Parse { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
