//! Stacking sequences and their text notation.
//!
//! The notation is slash-separated integer angles (`-81/-5/82`), with a few
//! conveniences for hand-written input: `±45` expands to `45/-45`, groups in
//! `[...]` or `(...)` may be repeated with `x3`, `×3` or `_3` and mirrored
//! with `_S` or `s`, e.g. `[(±45)_11]_S` or `[0]x8`. Angles are folded into
//! (-90, 90] on parsing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered ply orientations (deg), first ply at index 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StackingSequence {
    angles: Vec<i32>,
}

/// Fold any integer orientation into (-90, 90].
pub fn normalize_angle(deg: i32) -> i32 {
    let a = deg.rem_euclid(180);
    if a > 90 {
        a - 180
    } else {
        a
    }
}

impl StackingSequence {
    pub fn new(angles: Vec<i32>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::EmptyStack);
        }
        if let Some(&bad) = angles.iter().find(|a| **a <= -90 || **a > 90) {
            return Err(Error::AngleOutOfRange(bad));
        }
        Ok(StackingSequence { angles })
    }

    /// Build from arbitrary integer angles, folding each into (-90, 90].
    pub fn normalized(angles: impl IntoIterator<Item = i32>) -> Result<Self> {
        Self::new(angles.into_iter().map(normalize_angle).collect())
    }

    pub fn uniform(angle: i32, plies: usize) -> Result<Self> {
        Self::normalized(std::iter::repeat_n(angle, plies))
    }

    pub fn angles(&self) -> &[i32] {
        &self.angles
    }

    pub fn plies(&self) -> usize {
        self.angles.len()
    }

    pub fn reversed(&self) -> Self {
        let mut angles = self.angles.clone();
        angles.reverse();
        StackingSequence { angles }
    }

    /// Stack followed by its mirror image.
    pub fn symmetric(&self) -> Self {
        let mut angles = self.angles.clone();
        angles.extend(self.angles.iter().rev());
        StackingSequence { angles }
    }

    pub fn is_symmetric(&self) -> bool {
        self.angles.iter().eq(self.angles.iter().rev())
    }

    /// Every orientation shifted by `deg` and folded back into (-90, 90].
    pub fn rotated(&self, deg: i32) -> Self {
        StackingSequence {
            angles: self.angles.iter().map(|a| normalize_angle(a + deg)).collect(),
        }
    }
}

impl fmt::Display for StackingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.angles.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for StackingSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let angles = Parser::new(s).parse()?;
        Self::normalized(angles)
    }
}

impl TryFrom<String> for StackingSequence {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StackingSequence> for String {
    fn from(s: StackingSequence) -> String {
        s.to_string()
    }
}

/// Laminate coefficients `(b_k, d_k, c_k)` of ply `k` (1-based) in an
/// `n`-ply stack.
pub fn stacking_coefficients(k: usize, n: usize) -> Result<(i64, i64, i64)> {
    if k < 1 || k > n {
        return Err(Error::PlyIndexOutOfRange { index: k, plies: n });
    }
    Ok(coefficients_unchecked(k as i64, n as i64))
}

pub(crate) fn coefficients_unchecked(k: i64, n: i64) -> (i64, i64, i64) {
    let b = 2 * k - n - 1;
    let d = 12 * k * (k - n - 1) + 4 + 3 * n * (n + 2);
    let c = -2 * n * n - 12 * k * (k - n - 1) - 4 - 6 * n;
    (b, d, c)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            src,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let consumed: String = self.chars[..self.pos.min(self.chars.len())].iter().collect();
        let line = consumed.matches('\n').count() + 1;
        let column = consumed.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Vec<i32>> {
        if self.src.trim().is_empty() {
            return Err(Error::EmptyStack);
        }
        let out = self.sequence()?;
        self.skip_ws();
        if self.pos < self.chars.len() {
            return Err(self.error(format!("unexpected `{}`", self.chars[self.pos])));
        }
        Ok(out)
    }

    fn sequence(&mut self) -> Result<Vec<i32>> {
        let mut out = self.item()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('/') {
                self.pos += 1;
                out.extend(self.item()?);
            } else {
                return Ok(out);
            }
        }
    }

    fn item(&mut self) -> Result<Vec<i32>> {
        self.skip_ws();
        match self.peek() {
            Some(open @ ('[' | '(')) => {
                let close = if open == '[' { ']' } else { ')' };
                self.pos += 1;
                let mut inner = self.sequence()?;
                self.skip_ws();
                if self.peek() != Some(close) {
                    return Err(self.error(format!("expected `{close}`")));
                }
                self.pos += 1;
                self.suffixes(&mut inner)?;
                Ok(inner)
            }
            Some('/') | None => Err(self.error("empty ply slot")),
            _ => self.angle(),
        }
    }

    fn suffixes(&mut self, group: &mut Vec<i32>) -> Result<()> {
        loop {
            match self.peek() {
                Some('_') => {
                    self.pos += 1;
                    if matches!(self.peek(), Some('S' | 's')) {
                        self.pos += 1;
                        mirror(group);
                    } else {
                        let n = self.count()?;
                        repeat(group, n);
                    }
                }
                Some('S' | 's') => {
                    self.pos += 1;
                    mirror(group);
                }
                Some('x' | 'X' | '×' | '*') => {
                    self.pos += 1;
                    let n = self.count()?;
                    repeat(group, n);
                }
                _ => return Ok(()),
            }
        }
    }

    fn count(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a repetition count"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.error("repetition count too large"))
    }

    fn angle(&mut self) -> Result<Vec<i32>> {
        let mut sign = 1;
        let mut both = false;
        match self.peek() {
            Some('+') => self.pos += 1,
            Some('-') | Some('−') => {
                sign = -1;
                self.pos += 1;
            }
            Some('±') => {
                both = true;
                self.pos += 1;
            }
            _ => {}
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer angle"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let value: i32 = digits.parse().map_err(|_| self.error("angle out of range"))?;
        Ok(if both {
            vec![value, -value]
        } else {
            vec![sign * value]
        })
    }
}

fn mirror(group: &mut Vec<i32>) {
    let back: Vec<i32> = group.iter().rev().copied().collect();
    group.extend(back);
}

fn repeat(group: &mut Vec<i32>, n: usize) {
    let once = group.clone();
    group.clear();
    for _ in 0..n {
        group.extend_from_slice(&once);
    }
}
