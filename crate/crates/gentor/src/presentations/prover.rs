//! Budgeted triviality prover for finitely presented groups.
//!
//! Words are freely reduced letter strings over signed generator indices:
//! letter `+(g+1)` is generator `g`, `-(g+1)` its inverse. The prover runs a
//! best-first search whose moves are cyclic permutation and insertion of any
//! rotation of a relator or its inverse at any position (free reduction is
//! applied after every move, so deletion is insertion of the inverse). On
//! success it returns a replayable [`Derivation`]; the independent
//! [`check_derivation`] replays it with a separate reduction routine.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};

/// Default number of node expansions before the search gives up.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Signed generator index: `+(g+1)` for generator `g`, negative for inverse.
pub type Letter = i32;

/// Free reduction by a single stack pass.
pub fn free_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        debug_assert!(l != 0);
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn invert_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|&l| -l).collect()
}

fn rotated(word: &[Letter], k: usize) -> Vec<Letter> {
    let mut out = Vec::with_capacity(word.len());
    out.extend_from_slice(&word[k..]);
    out.extend_from_slice(&word[..k]);
    out
}

/// One rewriting move, applied to the current word and followed by free
/// reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    /// Cyclic permutation: move the first `k` letters to the end.
    Cyc(usize),
    /// Insert `rotation` of relator `relator` (inverted first if `inverted`)
    /// before position `pos`.
    Insert {
        pos: usize,
        relator: usize,
        inverted: bool,
        rotation: usize,
    },
}

/// A replayable proof that the start word is trivial: applying the moves in
/// order, with free reduction after each, ends at the empty word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub start: Vec<Letter>,
    pub moves: Vec<Move>,
}

#[derive(Debug, Clone)]
pub enum ProveOutcome {
    Proved(Derivation),
    /// Budget exhausted or frontier emptied; says nothing about the word.
    Unknown { expansions: u64 },
}

fn apply_move(word: &[Letter], mv: &Move, relators: &[Vec<Letter>]) -> Result<Vec<Letter>> {
    match *mv {
        Move::Cyc(k) => {
            if k > word.len() {
                return Err(Error::BadParam(format!(
                    "cyclic shift {k} exceeds word length {}",
                    word.len()
                )));
            }
            Ok(free_reduce(&rotated(word, k)))
        }
        Move::Insert {
            pos,
            relator,
            inverted,
            rotation,
        } => {
            let r = relators
                .get(relator)
                .ok_or_else(|| Error::BadParam(format!("no relator with index {relator}")))?;
            if r.is_empty() {
                return Err(Error::BadParam(format!("relator {relator} is empty")));
            }
            if rotation >= r.len() {
                return Err(Error::BadParam(format!(
                    "rotation {rotation} out of range for relator of length {}",
                    r.len()
                )));
            }
            if pos > word.len() {
                return Err(Error::BadParam(format!(
                    "insert position {pos} exceeds word length {}",
                    word.len()
                )));
            }
            let base = if inverted { invert_word(r) } else { r.clone() };
            let ins = rotated(&base, rotation);
            let mut next = Vec::with_capacity(word.len() + ins.len());
            next.extend_from_slice(&word[..pos]);
            next.extend_from_slice(&ins);
            next.extend_from_slice(&word[pos..]);
            Ok(free_reduce(&next))
        }
    }
}

/// Best-first search for a triviality proof of `start` modulo `relators`.
///
/// The budget counts relator insertions performed (cyclic shifts are free).
/// Candidate words are capped in length and the visited map acts as a
/// transposition table, so `Unknown` never asserts nontriviality.
pub fn prove_trivial(start: &[Letter], relators: &[Vec<Letter>], budget: u64) -> ProveOutcome {
    let start = free_reduce(start);
    let relators: Vec<Vec<Letter>> = relators.iter().map(|r| free_reduce(r)).collect();
    if start.is_empty() {
        return ProveOutcome::Proved(Derivation {
            start,
            moves: Vec::new(),
        });
    }
    let rmax = relators.iter().map(|r| r.len()).max().unwrap_or(0);
    if rmax == 0 {
        // free group: a reduced nonempty word is nontrivial, but the
        // contract only allows Unknown
        return ProveOutcome::Unknown { expansions: 0 };
    }
    let cap = start.len() + 2 * rmax + 4;

    // parent[w] = (previous word, move that produced w)
    let mut parent: HashMap<Vec<Letter>, (Vec<Letter>, Move)> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(usize, Vec<Letter>)>> = BinaryHeap::new();
    parent.insert(start.clone(), (start.clone(), Move::Cyc(0)));
    heap.push(Reverse((start.len(), start.clone())));

    let mut expansions: u64 = 0;
    while let Some(Reverse((_, word))) = heap.pop() {
        if word.is_empty() {
            let mut moves = Vec::new();
            let mut cur = word;
            while cur != start {
                let (prev, mv) = parent[&cur].clone();
                moves.push(mv);
                cur = prev;
            }
            moves.reverse();
            return ProveOutcome::Proved(Derivation { start, moves });
        }
        let visit = |next: Vec<Letter>,
                         mv: Move,
                         parent: &mut HashMap<Vec<Letter>, (Vec<Letter>, Move)>,
                         heap: &mut BinaryHeap<Reverse<(usize, Vec<Letter>)>>| {
            if next.len() > cap || parent.contains_key(&next) {
                return;
            }
            parent.insert(next.clone(), (word.clone(), mv));
            heap.push(Reverse((next.len(), next)));
        };

        for k in 1..word.len() {
            let next = free_reduce(&rotated(&word, k));
            visit(next, Move::Cyc(k), &mut parent, &mut heap);
        }
        for (ri, r) in relators.iter().enumerate() {
            if r.is_empty() {
                continue;
            }
            for inverted in [false, true] {
                let base = if inverted { invert_word(r) } else { r.clone() };
                for rotation in 0..r.len() {
                    let ins = rotated(&base, rotation);
                    for pos in 0..=word.len() {
                        if expansions >= budget {
                            return ProveOutcome::Unknown { expansions };
                        }
                        expansions += 1;
                        let mut cand = Vec::with_capacity(word.len() + ins.len());
                        cand.extend_from_slice(&word[..pos]);
                        cand.extend_from_slice(&ins);
                        cand.extend_from_slice(&word[pos..]);
                        let next = free_reduce(&cand);
                        visit(
                            next,
                            Move::Insert {
                                pos,
                                relator: ri,
                                inverted,
                                rotation,
                            },
                            &mut parent,
                            &mut heap,
                        );
                    }
                }
            }
        }
    }
    ProveOutcome::Unknown { expansions }
}

/// Independent replay of a derivation. Deliberately does not share the
/// search's reduction code: reduction here is by repeated scanning.
pub fn check_derivation(
    start: &[Letter],
    relators: &[Vec<Letter>],
    derivation: &Derivation,
) -> Result<()> {
    fn scan_reduce(word: &[Letter]) -> Vec<Letter> {
        let mut cur: Vec<Letter> = word.to_vec();
        loop {
            let mut out: Vec<Letter> = Vec::with_capacity(cur.len());
            let mut i = 0;
            let mut changed = false;
            while i < cur.len() {
                if i + 1 < cur.len() && cur[i] == -cur[i + 1] {
                    i += 2;
                    changed = true;
                } else {
                    out.push(cur[i]);
                    i += 1;
                }
            }
            cur = out;
            if !changed {
                return cur;
            }
        }
    }

    let relators: Vec<Vec<Letter>> = relators.iter().map(|r| scan_reduce(r)).collect();
    if scan_reduce(start) != scan_reduce(&derivation.start) {
        return Err(Error::NotVerified);
    }
    let mut cur = scan_reduce(&derivation.start);
    for mv in &derivation.moves {
        cur = apply_move(&cur, mv, &relators).map_err(|_| Error::NotVerified)?;
        cur = scan_reduce(&cur);
    }
    if cur.is_empty() {
        Ok(())
    } else {
        Err(Error::NotVerified)
    }
}

/// Renders a word over single-letter generator names: lowercase for a
/// generator, uppercase for its inverse, `1` for the empty word.
pub fn word_to_string(word: &[Letter], generators: &[char]) -> Result<String> {
    if word.is_empty() {
        return Ok("1".to_string());
    }
    let mut s = String::with_capacity(word.len());
    for &l in word {
        let idx = (l.unsigned_abs() as usize)
            .checked_sub(1)
            .filter(|&i| i < generators.len())
            .ok_or_else(|| Error::Internal(format!("letter {l} has no generator name")))?;
        let c = generators[idx];
        s.push(if l > 0 {
            c
        } else {
            c.to_ascii_uppercase()
        });
    }
    Ok(s)
}

pub fn word_from_string(s: &str, generators: &[char]) -> Result<Vec<Letter>> {
    let s = s.trim();
    if s == "1" {
        return Ok(Vec::new());
    }
    let mut word = Vec::with_capacity(s.len());
    for ch in s.chars() {
        let lower = ch.to_ascii_lowercase();
        let idx = generators
            .iter()
            .position(|&g| g == lower)
            .ok_or(Error::UnknownGenerator(ch))?;
        let l = (idx + 1) as Letter;
        word.push(if ch.is_ascii_uppercase() { -l } else { l });
    }
    Ok(word)
}

/// Serializes a derivation: a `deriv v1` header, the start word, one
/// numbered line per move, and an `end` terminator.
pub fn derivation_to_string(derivation: &Derivation, generators: &[char]) -> Result<String> {
    let mut out = String::new();
    out.push_str("deriv v1\n");
    out.push_str("start: ");
    out.push_str(&word_to_string(&derivation.start, generators)?);
    out.push('\n');
    for (i, mv) in derivation.moves.iter().enumerate() {
        let n = i + 1;
        match *mv {
            Move::Cyc(k) => out.push_str(&format!("{n} cyc {k}\n")),
            Move::Insert {
                pos,
                relator,
                inverted,
                rotation,
            } => {
                let sign = if inverted { '-' } else { '+' };
                out.push_str(&format!("{n} ins {pos} {relator} {sign} {rotation}\n"));
            }
        }
    }
    out.push_str("end\n");
    Ok(out)
}

pub fn derivation_from_string(text: &str, generators: &[char]) -> Result<Derivation> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some("deriv v1") {
        return Err(Error::Parse("expected `deriv v1` header".into()));
    }
    let start_line = lines
        .next()
        .ok_or_else(|| Error::Parse("missing start line".into()))?;
    let start_word = start_line
        .strip_prefix("start:")
        .ok_or_else(|| Error::Parse("expected `start:` line".into()))?;
    let start = word_from_string(start_word, generators)?;
    let mut moves = Vec::new();
    let mut terminated = false;
    for line in lines.by_ref() {
        if line == "end" {
            terminated = true;
            break;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_usize = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad integer `{s}` in derivation")))
        };
        match fields.as_slice() {
            [n, "cyc", k] => {
                if parse_usize(n)? != moves.len() + 1 {
                    return Err(Error::Parse(format!("bad move number `{n}`")));
                }
                moves.push(Move::Cyc(parse_usize(k)?));
            }
            [n, "ins", pos, relator, sign, rotation] => {
                if parse_usize(n)? != moves.len() + 1 {
                    return Err(Error::Parse(format!("bad move number `{n}`")));
                }
                let inverted = match *sign {
                    "+" => false,
                    "-" => true,
                    other => {
                        return Err(Error::Parse(format!("bad sign `{other}` in derivation")))
                    }
                };
                moves.push(Move::Insert {
                    pos: parse_usize(pos)?,
                    relator: parse_usize(relator)?,
                    inverted,
                    rotation: parse_usize(rotation)?,
                });
            }
            _ => return Err(Error::Parse(format!("bad derivation line `{line}`"))),
        }
    }
    if !terminated {
        return Err(Error::Parse("derivation missing `end` line".into()));
    }
    if lines.next().is_some() {
        return Err(Error::Parse("trailing content after `end`".into()));
    }
    Ok(Derivation { start, moves })
}
