//! Provenance words: expression trees over the generators that reproduce
//! each basis operator of a collection.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{c, zero, Real, C};
use crate::tensor::{bend, Direction, InterOp, Side};

#[derive(Clone, Debug, PartialEq)]
pub enum Word<T: Real> {
    Identity(usize),
    /// The duality morphism `R`.
    R,
    /// The `i`-th extra generator.
    Generator(usize),
    Adjoint(Arc<Word<T>>),
    /// `outer ∘ inner`.
    Compose(Arc<Word<T>>, Arc<Word<T>>),
    Tensor(Arc<Word<T>>, Arc<Word<T>>),
    Bend(Side, Direction, Arc<Word<T>>),
    /// Linear combination of words of the same grading.
    Lin(Vec<(C<T>, Arc<Word<T>>)>),
}

/// Everything a word can refer to.
pub struct WordContext<'a, T: Real> {
    pub dim: usize,
    pub r: &'a InterOp<T>,
    pub generators: &'a [InterOp<T>],
}

impl<T: Real> Word<T> {
    pub fn depth(&self) -> usize {
        match self {
            Word::Identity(_) | Word::R | Word::Generator(_) => 1,
            Word::Adjoint(w) | Word::Bend(_, _, w) => 1 + w.depth(),
            Word::Compose(a, b) | Word::Tensor(a, b) => 1 + a.depth().max(b.depth()),
            Word::Lin(terms) => 1 + terms.iter().map(|(_, w)| w.depth()).max().unwrap_or(0),
        }
    }

    pub fn eval(&self, ctx: &WordContext<'_, T>) -> Result<InterOp<T>> {
        match self {
            Word::Identity(k) => Ok(InterOp::identity(ctx.dim, *k)),
            Word::R => Ok(ctx.r.clone()),
            Word::Generator(i) => ctx
                .generators
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("word refers to missing generator g{i}"))),
            Word::Adjoint(w) => Ok(w.eval(ctx)?.adjoint()),
            Word::Compose(a, b) => a.eval(ctx)?.compose(&b.eval(ctx)?),
            Word::Tensor(a, b) => a.eval(ctx)?.tensor(&b.eval(ctx)?),
            Word::Bend(side, dir, w) => bend(&w.eval(ctx)?, ctx.r, *side, *dir),
            Word::Lin(terms) => {
                let mut iter = terms.iter();
                let (c0, w0) = iter
                    .next()
                    .ok_or_else(|| Error::Invalid("empty linear combination".into()))?;
                let mut acc = w0.eval(ctx)?.scale(*c0);
                for (ci, wi) in iter {
                    acc = acc.add(&wi.eval(ctx)?.scale(*ci))?;
                }
                Ok(acc)
            }
        }
    }

    /// Parses the S-expression produced by `Display`.
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src);
        let mut pos = 0;
        let w = parse_word(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Invalid(format!("trailing tokens in word `{src}`")));
        }
        Ok(w)
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn dir_name(d: Direction) -> &'static str {
    match d {
        Direction::Up => "up",
        Direction::Down => "down",
    }
}

impl<T: Real> fmt::Display for Word<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Identity(k) => write!(f, "id{k}"),
            Word::R => write!(f, "R"),
            Word::Generator(i) => write!(f, "g{i}"),
            Word::Adjoint(w) => write!(f, "(adj {w})"),
            Word::Compose(a, b) => write!(f, "(comp {a} {b})"),
            Word::Tensor(a, b) => write!(f, "(tens {a} {b})"),
            Word::Bend(s, d, w) => write!(f, "(bend {} {} {w})", side_name(*s), dir_name(*d)),
            Word::Lin(terms) => {
                write!(f, "(lin")?;
                for (coef, w) in terms {
                    let re = coef.re.to_f64().unwrap_or(f64::NAN);
                    let im = coef.im.to_f64().unwrap_or(f64::NAN);
                    write!(f, " ({re:?} {im:?} {w})")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn tokenize(src: &str) -> Vec<String> {
    src.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}

fn expect(tokens: &[String], pos: &mut usize, want: &str) -> Result<()> {
    match tokens.get(*pos) {
        Some(t) if t == want => {
            *pos += 1;
            Ok(())
        }
        other => Err(Error::Invalid(format!(
            "expected `{want}`, found {other:?}"
        ))),
    }
}

fn next<'a>(tokens: &'a [String], pos: &mut usize) -> Result<&'a str> {
    let t = tokens
        .get(*pos)
        .ok_or_else(|| Error::Invalid("unexpected end of word".into()))?;
    *pos += 1;
    Ok(t)
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::Invalid(format!("bad number `{tok}` in word")))
}

fn parse_word<T: Real>(tokens: &[String], pos: &mut usize) -> Result<Word<T>> {
    let tok = next(tokens, pos)?;
    if tok != "(" {
        if tok == "R" {
            return Ok(Word::R);
        }
        if let Some(k) = tok.strip_prefix("id").and_then(|s| s.parse().ok()) {
            return Ok(Word::Identity(k));
        }
        if let Some(i) = tok.strip_prefix('g').and_then(|s| s.parse().ok()) {
            return Ok(Word::Generator(i));
        }
        return Err(Error::Invalid(format!("unknown word atom `{tok}`")));
    }
    let head = next(tokens, pos)?;
    let w = match head {
        "adj" => Word::Adjoint(Arc::new(parse_word(tokens, pos)?)),
        "comp" => {
            let a = parse_word(tokens, pos)?;
            Word::Compose(Arc::new(a), Arc::new(parse_word(tokens, pos)?))
        }
        "tens" => {
            let a = parse_word(tokens, pos)?;
            Word::Tensor(Arc::new(a), Arc::new(parse_word(tokens, pos)?))
        }
        "bend" => {
            let side = match next(tokens, pos)? {
                "left" => Side::Left,
                "right" => Side::Right,
                s => return Err(Error::Invalid(format!("bad bend side `{s}`"))),
            };
            let dir = match next(tokens, pos)? {
                "up" => Direction::Up,
                "down" => Direction::Down,
                s => return Err(Error::Invalid(format!("bad bend direction `{s}`"))),
            };
            Word::Bend(side, dir, Arc::new(parse_word(tokens, pos)?))
        }
        "lin" => {
            let mut terms = Vec::new();
            while tokens.get(*pos).map(String::as_str) == Some("(") {
                *pos += 1;
                let re = parse_f64(next(tokens, pos)?)?;
                let im = parse_f64(next(tokens, pos)?)?;
                let w = parse_word(tokens, pos)?;
                expect(tokens, pos, ")")?;
                let coef = if re == 0.0 && im == 0.0 {
                    zero()
                } else {
                    c(T::from_f64_lossy(re), T::from_f64_lossy(im))
                };
                terms.push((coef, Arc::new(w)));
            }
            Word::Lin(terms)
        }
        other => return Err(Error::Invalid(format!("unknown word head `{other}`"))),
    };
    expect(tokens, pos, ")")?;
    Ok(w)
}
