//! Reduced words of the free group F_d and their evaluation on matrix tuples.
//!
//! A [`Word`] is a list of syllables `(generator, exponent)` kept in reduced
//! form: adjacent syllables use distinct generators and no exponent is zero.
//! Evaluation substitutes invertible matrices for the generators, over any
//! backend implementing [`WordMatrix`].

use std::fmt;

use thiserror::Error;

/// Errors from parsing or evaluating words.
#[derive(Debug, Error)]
pub enum WordError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("generator index 0 at byte {pos} (generators start at x1)")]
    GeneratorZero { pos: usize },
    #[error("exponent overflow at byte {pos}")]
    ExponentOverflow { pos: usize },
    #[error("word has arity {arity} but only {given} arguments were given")]
    NotEnoughArguments { arity: usize, given: usize },
    #[error("cannot evaluate the empty word on an empty argument tuple (dimension unknown)")]
    EmptyNoDimension,
    #[error("argument matrices have mismatched dimensions")]
    DimensionMismatch,
    #[error("argument {index} is not invertible: {msg}")]
    SingularArgument { index: usize, msg: String },
}

/// One syllable `x_gen^exp` of a reduced word. `gen` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub gen: usize,
    pub exp: i64,
}

/// A reduced word in the free group on generators `x1, x2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    /// The empty word (identity).
    pub fn identity() -> Self {
        Word { syllables: Vec::new() }
    }

    /// Builds a word from raw syllables, freely reducing as it goes.
    pub fn from_syllables<I: IntoIterator<Item = (usize, i64)>>(iter: I) -> Self {
        let mut out: Vec<Syllable> = Vec::new();
        for (gen, exp) in iter {
            if exp == 0 {
                continue;
            }
            push_reduced(&mut out, Syllable { gen, exp });
        }
        Word { syllables: out }
    }

    /// The standard single-generator word `x1^k`.
    pub fn power(k: i64) -> Self {
        Word::from_syllables([(1, k)])
    }

    /// The commutator `[x1, x2] = x1 x2 x1^-1 x2^-1`.
    pub fn commutator() -> Self {
        Word::from_syllables([(1, 1), (2, 1), (1, -1), (2, -1)])
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of distinct generators referenced: the maximum index present.
    pub fn arity(&self) -> usize {
        self.syllables.iter().map(|s| s.gen).max().unwrap_or(0)
    }

    /// The word evaluating to the inverse: reverse the syllables and negate
    /// every exponent.
    pub fn inverse(&self) -> Word {
        let syl = self
            .syllables
            .iter()
            .rev()
            .map(|s| Syllable { gen: s.gen, exp: -s.exp })
            .collect();
        // Reversal of a reduced word is reduced.
        Word { syllables: syl }
    }

    /// Parses the word grammar:
    ///
    /// ```text
    /// word := term { WS term } ; term := atom [ "^" int ] ;
    /// atom := gen | "(" word ")" | "[" word "," word "]" | "1" ;
    /// gen  := "x" posint ; int := ["-"] posint.
    /// ```
    ///
    /// Juxtaposition is product and `[u,v]` expands to `u v u^-1 v^-1`.
    pub fn parse(text: &str) -> Result<Word, WordError> {
        let mut p = Parser { text: text.as_bytes(), pos: 0 };
        p.skip_ws();
        let w = p.parse_word()?;
        p.skip_ws();
        if p.pos != p.text.len() {
            return Err(WordError::Syntax {
                pos: p.pos,
                msg: format!("unexpected character {:?}", p.text[p.pos] as char),
            });
        }
        Ok(w)
    }

    /// Evaluates the word on a tuple of invertible matrices.
    ///
    /// Inverse powers are taken by inverting the argument once and then
    /// binary-powering, so large exponents stay cheap.
    pub fn evaluate<M: WordMatrix>(&self, args: &[M]) -> Result<M, WordError> {
        if args.len() < self.arity() {
            return Err(WordError::NotEnoughArguments { arity: self.arity(), given: args.len() });
        }
        let first = args.first().ok_or(WordError::EmptyNoDimension)?;
        if args.iter().any(|a| a.dim() != first.dim()) {
            return Err(WordError::DimensionMismatch);
        }
        let mut acc: Option<M> = None;
        for s in &self.syllables {
            let base = &args[s.gen - 1];
            let factor = if s.exp >= 0 {
                mat_pow(base, s.exp as u64)
            } else {
                let inv = base
                    .try_inverse()
                    .map_err(|msg| WordError::SingularArgument { index: s.gen, msg })?;
                mat_pow(&inv, s.exp.unsigned_abs())
            };
            acc = Some(match acc {
                Some(a) => a.mat_mul(&factor),
                None => factor,
            });
        }
        Ok(acc.unwrap_or_else(|| first.identity_like()))
    }
}

impl fmt::Display for Word {
    /// Canonical form: syllables `x<g>` / `x<g>^<e>` joined by single
    /// spaces, or `1` for the empty word. `parse(to_string())` is identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if s.exp == 1 {
                write!(f, "x{}", s.gen)?;
            } else {
                write!(f, "x{}^{}", s.gen, s.exp)?;
            }
        }
        Ok(())
    }
}

fn push_reduced(out: &mut Vec<Syllable>, s: Syllable) {
    if s.exp == 0 {
        return;
    }
    match out.last_mut() {
        Some(top) if top.gen == s.gen => {
            top.exp += s.exp;
            if top.exp == 0 {
                out.pop();
            }
        }
        _ => out.push(s),
    }
}

fn concat(a: &Word, b: &Word) -> Word {
    let mut out = a.syllables.clone();
    for s in &b.syllables {
        push_reduced(&mut out, *s);
    }
    Word { syllables: out }
}

fn word_pow(w: &Word, e: i64) -> Word {
    let base = if e < 0 { w.inverse() } else { w.clone() };
    let mut out = Word::identity();
    for _ in 0..e.unsigned_abs() {
        out = concat(&out, &base);
    }
    out
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn parse_word(&mut self) -> Result<Word, WordError> {
        let mut acc = self.parse_term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c == b'x' || c == b'(' || c == b'[' || c == b'1' => {
                    let t = self.parse_term()?;
                    acc = concat(&acc, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Word, WordError> {
        let atom = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.parse_int()?;
            Ok(word_pow(&atom, e))
        } else {
            Ok(atom)
        }
    }

    fn parse_atom(&mut self) -> Result<Word, WordError> {
        self.skip_ws();
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let g = self.parse_posint()?;
                if g == 0 {
                    return Err(WordError::GeneratorZero { pos: start });
                }
                Ok(Word::from_syllables([(g as usize, 1)]))
            }
            Some(b'(') => {
                self.pos += 1;
                let w = self.parse_word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let u = self.parse_word()?;
                self.expect(b',')?;
                let v = self.parse_word()?;
                self.expect(b']')?;
                Ok(concat(&concat(&u, &v), &concat(&u.inverse(), &v.inverse())))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(c) => Err(WordError::Syntax {
                pos: self.pos,
                msg: format!("expected atom, found {:?}", c as char),
            }),
            None => Err(WordError::Syntax { pos: self.pos, msg: "unexpected end of input".into() }),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), WordError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(WordError::Syntax { pos: self.pos, msg: format!("expected {:?}", c as char) })
        }
    }

    fn parse_posint(&mut self) -> Result<u64, WordError> {
        let start = self.pos;
        let mut val: u64 = 0;
        let mut any = false;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            any = true;
            val = val
                .checked_mul(10)
                .and_then(|v| v.checked_add((c - b'0') as u64))
                .ok_or(WordError::ExponentOverflow { pos: start })?;
            self.pos += 1;
        }
        if !any {
            return Err(WordError::Syntax { pos: self.pos, msg: "expected integer".into() });
        }
        Ok(val)
    }

    fn parse_int(&mut self) -> Result<i64, WordError> {
        let start = self.pos;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mag = self.parse_posint()?;
        if mag > i64::MAX as u64 {
            return Err(WordError::ExponentOverflow { pos: start });
        }
        Ok(if neg { -(mag as i64) } else { mag as i64 })
    }
}

/// Square-matrix interface the word evaluator needs. Implemented by the
/// exact cyclotomic matrices, the complex float matrices, and 2x2 matrices
/// over prime fields.
pub trait WordMatrix: Clone {
    fn dim(&self) -> usize;
    fn identity_like(&self) -> Self;
    fn mat_mul(&self, rhs: &Self) -> Self;
    /// Inverse, or a message describing why the matrix is singular.
    fn try_inverse(&self) -> Result<Self, String>;
}

fn mat_pow<M: WordMatrix>(base: &M, mut e: u64) -> M {
    let mut result: Option<M> = None;
    let mut sq = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                Some(r) => r.mat_mul(&sq),
                None => sq.clone(),
            });
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mat_mul(&sq);
        }
    }
    result.unwrap_or_else(|| base.identity_like())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syl(w: &Word) -> Vec<(usize, i64)> {
        w.syllables().iter().map(|s| (s.gen, s.exp)).collect()
    }

    #[test]
    fn parse_single_syllable() {
        assert_eq!(syl(&Word::parse("x1^2").unwrap()), vec![(1, 2)]);
    }

    #[test]
    fn parse_free_reduction() {
        assert_eq!(syl(&Word::parse("x1 x1^-1 x2").unwrap()), vec![(2, 1)]);
    }

    #[test]
    fn parse_commutator() {
        assert_eq!(
            syl(&Word::parse("[x1,x2]").unwrap()),
            vec![(1, 1), (2, 1), (1, -1), (2, -1)]
        );
    }

    #[test]
    fn parse_nested_and_powers() {
        // ([x1,x2] x1^2)^-1 = x1^-2 [x2,x1] reduced
        let w = Word::parse("([x1,x2] x1^2)^-1").unwrap();
        assert_eq!(syl(&w), vec![(1, -2), (2, 1), (1, 1), (2, -1), (1, -1)]);
    }

    #[test]
    fn parse_one_literal() {
        assert!(Word::parse("1").unwrap().is_empty());
        assert_eq!(syl(&Word::parse("1^5 x3").unwrap()), vec![(3, 1)]);
    }

    #[test]
    fn parse_rejects_generator_zero() {
        assert!(matches!(Word::parse("x0"), Err(WordError::GeneratorZero { .. })));
    }

    #[test]
    fn parse_reports_position() {
        match Word::parse("x1 )") {
            Err(WordError::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_exponent_overflow() {
        assert!(matches!(
            Word::parse("x1^99999999999999999999"),
            Err(WordError::ExponentOverflow { .. })
        ));
    }

    #[test]
    fn print_forms() {
        assert_eq!(Word::from_syllables([(1, 2)]).to_string(), "x1^2");
        assert_eq!(Word::identity().to_string(), "1");
        assert_eq!(Word::from_syllables([(2, 1), (1, -1)]).to_string(), "x2 x1^-1");
    }

    #[test]
    fn print_parse_round_trip() {
        let samples = ["x1^2", "1", "x2 x1^-1", "[x1,x2] x3^4", "(x1 x2)^3"];
        for s in samples {
            let w = Word::parse(s).unwrap();
            assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
        }
    }

    #[test]
    fn arity_is_max_generator() {
        assert_eq!(Word::parse("x1 x3").unwrap().arity(), 3);
        assert_eq!(Word::identity().arity(), 0);
    }

    #[test]
    fn inverse_is_involution() {
        let w = Word::parse("[x1,x2] x1^3 x2^-2").unwrap();
        assert_eq!(w.inverse().inverse(), w);
        assert_eq!(
            syl(&Word::commutator().inverse()),
            vec![(2, 1), (1, 1), (2, -1), (1, -1)]
        );
    }
}
