//! Exact word calculus in free products of cyclic groups.
//!
//! A group is a free product of cyclic factors, each either `Z` or `Z/n`
//! (n >= 2). Elements are kept in free-product normal form: a sequence of
//! syllables `(factor, exponent)` with adjacent syllables in distinct
//! factors, and exponents of finite factors stored as least positive
//! residues `1..n-1`.

use std::fmt;

use crate::error::{Error, Result};

/// One cyclic factor of a free product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// Z/n with n >= 2.
    Finite(u64),
    /// Infinite cyclic.
    Infinite,
}

impl FactorKind {
    pub fn is_torsion_free(&self) -> bool {
        matches!(self, FactorKind::Infinite)
    }
}

/// A free product of cyclic factors. Generators are named positionally
/// `a, b, c, ...` (at most 26 factors).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<FactorKind>,
}

impl GroupSpec {
    pub fn new(factors: Vec<FactorKind>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Parse("a group needs at least one factor".into()));
        }
        if factors.len() > 26 {
            return Err(Error::TooManyFactors(factors.len()));
        }
        for f in &factors {
            if let FactorKind::Finite(n) = f {
                if *n < 2 {
                    return Err(Error::BadOrder(*n as i64));
                }
            }
        }
        Ok(GroupSpec { factors })
    }

    /// Grammar: `factor ( "*" factor )*` with factor `Z` or `Z/<n>`,
    /// whitespace-insensitive.
    pub fn parse(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for part in text.split('*') {
            let part = part.trim();
            if part == "Z" {
                factors.push(FactorKind::Infinite);
            } else if let Some(rest) = part.strip_prefix("Z/") {
                let n: i64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad factor '{part}'")))?;
                if n < 2 {
                    return Err(Error::BadOrder(n));
                }
                factors.push(FactorKind::Finite(n as u64));
            } else {
                return Err(Error::Parse(format!("bad factor '{part}'")));
            }
        }
        GroupSpec::new(factors)
    }

    pub fn factors(&self) -> &[FactorKind] {
        &self.factors
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn generator_name(&self, index: usize) -> char {
        (b'a' + index as u8) as char
    }

    pub fn factor_of_generator(&self, c: char) -> Result<usize> {
        let lower = c.to_ascii_lowercase();
        if !lower.is_ascii_lowercase() {
            return Err(Error::UnknownGenerator(c));
        }
        let idx = (lower as u8 - b'a') as usize;
        if idx >= self.factors.len() {
            return Err(Error::UnknownGenerator(c));
        }
        Ok(idx)
    }

    pub fn all_torsion_free(&self) -> bool {
        self.factors.iter().all(|f| f.is_torsion_free())
    }

    /// The identity element of this group.
    pub fn identity(&self) -> Word {
        Word {
            group: self.clone(),
            syllables: Vec::new(),
        }
    }

    /// `gen^exp` for one factor, reduced.
    pub fn generator_power(&self, factor: usize, exp: i64) -> Word {
        self.word_from_syllables(vec![(factor, exp)])
    }

    /// Normal form of an arbitrary syllable sequence over this group.
    pub fn word_from_syllables(&self, raw: Vec<(usize, i64)>) -> Word {
        let syllables = reduce_syllables(&self.factors, raw);
        Word {
            group: self.clone(),
            syllables,
        }
    }

    /// The single-factor group `G_i`, for factor transport.
    pub fn single_factor(&self, index: usize) -> GroupSpec {
        GroupSpec {
            factors: vec![self.factors[index]],
        }
    }

    fn normalize_exp(&self, factor: usize, exp: i64) -> i64 {
        normalize_exp(&self.factors, factor, exp)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            match fac {
                FactorKind::Finite(n) => write!(f, "Z/{n}")?,
                FactorKind::Infinite => write!(f, "Z")?,
            }
        }
        Ok(())
    }
}

fn normalize_exp(factors: &[FactorKind], factor: usize, exp: i64) -> i64 {
    match factors[factor] {
        FactorKind::Infinite => exp,
        FactorKind::Finite(n) => exp.rem_euclid(n as i64),
    }
}

/// Normal form of a raw syllable sequence: merge adjacent same-factor
/// syllables, reduce mod factor order, drop zero syllables. Idempotent.
fn reduce_syllables(factors: &[FactorKind], raw: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    let mut stack: Vec<(usize, i64)> = Vec::with_capacity(raw.len());
    for (factor, exp) in raw {
        let exp = normalize_exp(factors, factor, exp);
        if exp == 0 {
            continue;
        }
        match stack.last_mut() {
            Some((top_f, top_e)) if *top_f == factor => {
                let merged = normalize_exp(factors, factor, *top_e + exp);
                if merged == 0 {
                    stack.pop();
                } else {
                    *top_e = merged;
                }
            }
            _ => stack.push((factor, exp)),
        }
    }
    stack
}

/// A signed letter of the expansion used by counting quasimorphisms:
/// `(factor, sign)` where sign `0` marks a self-inverse half-order letter
/// (exponent exactly n/2 in Z/n). The expansion of an inverse is the
/// reversed, sign-negated expansion.
pub type Letter = (usize, i8);

/// A normal-form element of a free product of cyclic groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    group: GroupSpec,
    syllables: Vec<(usize, i64)>,
}

impl Word {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllable_len(&self) -> usize {
        self.syllables.len()
    }

    fn check_same_group(&self, other: &Word) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Word) -> Result<Word> {
        self.check_same_group(other)?;
        let mut raw = self.syllables.clone();
        raw.extend_from_slice(&other.syllables);
        Ok(self.group.word_from_syllables(raw))
    }

    pub fn invert(&self) -> Word {
        let raw: Vec<(usize, i64)> = self
            .syllables
            .iter()
            .rev()
            .map(|&(f, e)| (f, -e))
            .collect();
        self.group.word_from_syllables(raw)
    }

    /// `self^n` by repeated squaring on the reduced core.
    pub fn power(&self, n: i64) -> Word {
        if n == 0 {
            return self.group.identity();
        }
        if n < 0 {
            return self.invert().power(-n);
        }
        let mut base = self.clone();
        let mut acc = self.group.identity();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.multiply(&base).expect("same group");
            }
            base = base.multiply(&base).expect("same group");
            n >>= 1;
        }
        acc
    }

    pub fn conjugate_by(&self, h: &Word) -> Result<Word> {
        h.multiply(self)?.multiply(&h.invert())
    }

    /// Decomposes `self = c * core * c^-1` with `core` cyclically reduced
    /// and `c` the shortest such prefix conjugator.
    pub fn cyclically_reduce(&self) -> (Word, Word) {
        let mut conj: Vec<(usize, i64)> = Vec::new();
        let mut core = self.syllables.clone();
        while core.len() >= 2 && core.first().unwrap().0 == core.last().unwrap().0 {
            let first = core.remove(0);
            conj.push(first);
            core.push(first);
            core = reduce_syllables(self.group.factors(), core);
        }
        let c = self.group.word_from_syllables(conj);
        let w = Word {
            group: self.group.clone(),
            syllables: core,
        };
        (c, w)
    }

    /// Succeeds iff the cyclic core of `self` is a single syllable
    /// `gen_i^e`; returns `(i, c, e)` with `self = c * gen_i^e * c^-1`.
    pub fn conjugate_into_factor(&self) -> Result<Option<(usize, Word, i64)>> {
        if self.is_identity() {
            return Err(Error::TrivialInput);
        }
        let (c, core) = self.cyclically_reduce();
        if core.syllable_len() == 1 {
            let (factor, exp) = core.syllables[0];
            Ok(Some((factor, c, exp)))
        } else {
            Ok(None)
        }
    }

    /// Exponent-sum image in the abelianization (residue mod n per finite
    /// factor, plain integer per infinite factor).
    pub fn abelianize(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.group.factor_count()];
        for &(f, e) in &self.syllables {
            sums[f] += e;
        }
        for (f, s) in sums.iter_mut().enumerate() {
            *s = self.group.normalize_exp(f, *s);
        }
        sums
    }

    /// Order of the abelianized image: `None` means infinite.
    pub fn abelian_order(&self) -> Option<u64> {
        let ab = self.abelianize();
        let mut order: u64 = 1;
        for (f, &e) in ab.iter().enumerate() {
            match self.group.factors()[f] {
                FactorKind::Infinite => {
                    if e != 0 {
                        return None;
                    }
                }
                FactorKind::Finite(n) => {
                    let e = e as u64;
                    let component = n / gcd_u64(n, e);
                    order = lcm_u64(order, component);
                }
            }
        }
        Some(order)
    }

    /// Signed-letter expansion. Finite-factor exponents use the symmetric
    /// representative: e letters of sign `+` when 2e < n, n-e letters of
    /// sign `-` when 2e > n, and n/2 self-inverse letters of sign `0` when
    /// 2e = n. This makes the expansion of an inverse exactly the reversed
    /// negated expansion.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for &(f, e) in &self.syllables {
            match self.group.factors()[f] {
                FactorKind::Infinite => {
                    let sign = if e > 0 { 1 } else { -1 };
                    for _ in 0..e.unsigned_abs() {
                        out.push((f, sign));
                    }
                }
                FactorKind::Finite(n) => {
                    let n = n as i64;
                    let (count, sign) = if 2 * e < n {
                        (e, 1)
                    } else if 2 * e > n {
                        (n - e, -1)
                    } else {
                        (e, 0)
                    };
                    for _ in 0..count {
                        out.push((f, sign));
                    }
                }
            }
        }
        out
    }

    /// Length of the signed-letter expansion.
    pub fn letter_len(&self) -> usize {
        let mut total = 0usize;
        for &(f, e) in &self.syllables {
            total += match self.group.factors()[f] {
                FactorKind::Infinite => e.unsigned_abs() as usize,
                FactorKind::Finite(n) => {
                    let n = n as i64;
                    (if 2 * e > n { n - e } else { e }) as usize
                }
            };
        }
        total
    }

    /// Parses the word grammar over `group`: generator letters with
    /// optional `^` signed exponents, uppercase as inverse, parenthesized
    /// subwords with exponents, `1` or the empty string as the identity.
    pub fn parse(text: &str, group: &GroupSpec) -> Result<Word> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0usize;
        let raw = parse_subword(&chars, &mut pos, group, 0)?;
        skip_ws(&chars, &mut pos);
        if pos != chars.len() {
            return Err(Error::Parse(format!(
                "unexpected character '{}' at position {pos}",
                chars[pos]
            )));
        }
        Ok(group.word_from_syllables(raw))
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_int(chars: &[char], pos: &mut usize) -> Result<i64> {
    skip_ws(chars, pos);
    let mut s = String::new();
    if *pos < chars.len() && (chars[*pos] == '-' || chars[*pos] == '+') {
        s.push(chars[*pos]);
        *pos += 1;
    }
    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
        s.push(chars[*pos]);
        *pos += 1;
    }
    s.parse()
        .map_err(|_| Error::Parse(format!("expected integer at position {pos}")))
}

/// Parses atoms until an unmatched `)` or end of input. `depth` tracks
/// paren nesting for error reporting.
fn parse_subword(
    chars: &[char],
    pos: &mut usize,
    group: &GroupSpec,
    depth: usize,
) -> Result<Vec<(usize, i64)>> {
    let mut raw: Vec<(usize, i64)> = Vec::new();
    loop {
        skip_ws(chars, pos);
        if *pos >= chars.len() {
            if depth > 0 {
                return Err(Error::Parse("unbalanced parentheses".into()));
            }
            return Ok(raw);
        }
        let c = chars[*pos];
        match c {
            ')' => {
                if depth == 0 {
                    return Err(Error::Parse("unbalanced ')'".into()));
                }
                return Ok(raw);
            }
            '(' => {
                *pos += 1;
                let inner = parse_subword(chars, pos, group, depth + 1)?;
                if *pos >= chars.len() || chars[*pos] != ')' {
                    return Err(Error::Parse("unbalanced parentheses".into()));
                }
                *pos += 1;
                let exp = parse_optional_exponent(chars, pos)?;
                append_repeated(&mut raw, &inner, exp);
            }
            '1' => {
                *pos += 1;
            }
            c if c.is_ascii_alphabetic() => {
                *pos += 1;
                let factor = group.factor_of_generator(c)?;
                let base_sign: i64 = if c.is_ascii_uppercase() { -1 } else { 1 };
                let exp = parse_optional_exponent(chars, pos)?;
                raw.push((factor, base_sign * exp));
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character '{c}' at position {pos}"
                )));
            }
        }
    }
}

fn parse_optional_exponent(chars: &[char], pos: &mut usize) -> Result<i64> {
    let save = *pos;
    skip_ws(chars, pos);
    if *pos < chars.len() && chars[*pos] == '^' {
        *pos += 1;
        parse_int(chars, pos)
    } else {
        *pos = save;
        Ok(1)
    }
}

fn append_repeated(raw: &mut Vec<(usize, i64)>, inner: &[(usize, i64)], exp: i64) {
    if exp >= 0 {
        for _ in 0..exp {
            raw.extend_from_slice(inner);
        }
    } else {
        let inv: Vec<(usize, i64)> = inner.iter().rev().map(|&(f, e)| (f, -e)).collect();
        for _ in 0..-exp {
            raw.extend_from_slice(&inv);
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for &(factor, exp) in &self.syllables {
            let name = self.group.generator_name(factor);
            if exp == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
        }
        Ok(())
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}
