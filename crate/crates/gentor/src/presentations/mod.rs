//! Finite presentations of knot-exterior groups and their fillings:
//! twist-knot templates with peripheral pairs, connected sums, Dehn
//! fillings, integer homology, Alexander polynomials, and certificate
//! search through the triviality prover.

pub mod alexander;
pub mod prover;
pub mod snf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use alexander::{determinant, fox_derivative_evaluated, laurent_gcd, LaurentPoly};
use prover::{check_derivation, free_reduce, invert_word, Derivation, Letter, ProveOutcome};
use snf::{smith_normal_form, IntMatrix, Snf};

/// A finite presentation: named single-letter generators, freely reduced
/// nonempty relators, and an optional peripheral pair (meridian μ,
/// longitude λ) with λ trivial in H₁.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<char>,
    pub relators: Vec<Vec<Letter>>,
    pub peripheral: Option<(Vec<Letter>, Vec<Letter>)>,
}

impl Presentation {
    pub fn new(
        generators: Vec<char>,
        relators: Vec<Vec<Letter>>,
        peripheral: Option<(Vec<Letter>, Vec<Letter>)>,
    ) -> Result<Self> {
        for &g in &generators {
            if !g.is_ascii_lowercase() {
                return Err(Error::BadParam(format!(
                    "generator name `{g}` must be a lowercase ascii letter"
                )));
            }
        }
        for i in 0..generators.len() {
            if generators[i + 1..].contains(&generators[i]) {
                return Err(Error::BadParam(format!(
                    "duplicate generator name `{}`",
                    generators[i]
                )));
            }
        }
        let check_letters = |w: &[Letter]| -> Result<()> {
            for &l in w {
                let idx = l.unsigned_abs() as usize;
                if idx == 0 || idx > generators.len() {
                    return Err(Error::BadWord(format!(
                        "letter {l} is outside the generator range"
                    )));
                }
            }
            Ok(())
        };
        let mut reduced = Vec::with_capacity(relators.len());
        for r in &relators {
            check_letters(r)?;
            let r = free_reduce(r);
            if r.is_empty() {
                return Err(Error::BadParam("relator reduces to the identity".into()));
            }
            reduced.push(r);
        }
        if let Some((mu, lambda)) = &peripheral {
            check_letters(mu)?;
            check_letters(lambda)?;
        }
        let p = Presentation {
            generators,
            relators: reduced,
            peripheral,
        };
        if let Some((_, lambda)) = &p.peripheral {
            if element_order_in_h1(&p, lambda) != Some(BigInt::one()) {
                return Err(Error::BadParam(
                    "longitude is not trivial in the abelianization".into(),
                ));
            }
        }
        Ok(p)
    }

    pub fn parse_word(&self, s: &str) -> Result<Vec<Letter>> {
        prover::word_from_string(s, &self.generators)
    }

    pub fn render_word(&self, w: &[Letter]) -> Result<String> {
        prover::word_to_string(w, &self.generators)
    }

    /// Exponent-sum relation matrix: one row per relator, one column per
    /// generator.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.relators.len(), self.generators.len());
        for (i, r) in self.relators.iter().enumerate() {
            for &l in r {
                let j = l.unsigned_abs() as usize - 1;
                if l > 0 {
                    m[(i, j)] += BigInt::one();
                } else {
                    m[(i, j)] -= BigInt::one();
                }
            }
        }
        m
    }

    /// Line-oriented `pres v1` serialization.
    pub fn to_file_string(&self) -> Result<String> {
        let mut out = String::from("pres v1\n");
        out.push_str("gens:");
        for g in &self.generators {
            out.push(' ');
            out.push(*g);
        }
        out.push('\n');
        for r in &self.relators {
            out.push_str("rel: ");
            out.push_str(&self.render_word(r)?);
            out.push('\n');
        }
        if let Some((mu, lambda)) = &self.peripheral {
            out.push_str("mu: ");
            out.push_str(&self.render_word(mu)?);
            out.push('\n');
            out.push_str("lambda: ");
            out.push_str(&self.render_word(lambda)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_file_string(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("pres v1") {
            return Err(Error::Parse("expected `pres v1` header".into()));
        }
        let gens_line = lines
            .next()
            .and_then(|l| l.strip_prefix("gens:"))
            .ok_or_else(|| Error::Parse("expected `gens:` line".into()))?;
        let mut generators = Vec::new();
        for tok in gens_line.split_whitespace() {
            let mut chars = tok.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => generators.push(c),
                _ => {
                    return Err(Error::Parse(format!(
                        "generator name `{tok}` must be a single letter"
                    )))
                }
            }
        }
        let mut relators = Vec::new();
        let mut mu = None;
        let mut lambda = None;
        for line in lines {
            if let Some(w) = line.strip_prefix("rel:") {
                if mu.is_some() || lambda.is_some() {
                    return Err(Error::Parse("`rel:` lines must precede `mu:`".into()));
                }
                relators.push(prover::word_from_string(w, &generators)?);
            } else if let Some(w) = line.strip_prefix("mu:") {
                if mu.is_some() {
                    return Err(Error::Parse("duplicate `mu:` line".into()));
                }
                mu = Some(prover::word_from_string(w, &generators)?);
            } else if let Some(w) = line.strip_prefix("lambda:") {
                if lambda.is_some() {
                    return Err(Error::Parse("duplicate `lambda:` line".into()));
                }
                lambda = Some(prover::word_from_string(w, &generators)?);
            } else {
                return Err(Error::Parse(format!("bad presentation line `{line}`")));
            }
        }
        let peripheral = match (mu, lambda) {
            (Some(m), Some(l)) => Some((m, l)),
            (None, None) => None,
            _ => {
                return Err(Error::Parse(
                    "`mu:` and `lambda:` must appear together".into(),
                ))
            }
        };
        Presentation::new(generators, relators, peripheral)
    }
}

/// Integer first homology: invariant factors `> 1` (divisibility chain)
/// plus the free rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homology {
    pub invariants: Vec<BigInt>,
    pub free_rank: usize,
}

impl Homology {
    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty() && self.free_rank == 0
    }

    pub fn is_z(&self) -> bool {
        self.invariants.is_empty() && self.free_rank == 1
    }

    pub fn is_cyclic_of(&self, m: u64) -> bool {
        match m {
            0 => self.is_z(),
            1 => self.is_trivial(),
            _ => {
                self.free_rank == 0
                    && self.invariants.len() == 1
                    && self.invariants[0] == BigInt::from(m)
            }
        }
    }
}

impl std::fmt::Display for Homology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = vec!["Z".to_string(); self.free_rank];
        for d in &self.invariants {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" x "))
    }
}

/// H₁ of the presented group: Smith normal form of the exponent matrix.
pub fn homology_h1(p: &Presentation) -> Homology {
    let snf = smith_normal_form(&p.exponent_matrix());
    Homology {
        invariants: snf
            .diagonal
            .iter()
            .filter(|d| **d > BigInt::one())
            .cloned()
            .collect(),
        free_rank: snf.coker_free_rank(p.generators.len()),
    }
}

fn exponent_vector(word: &[Letter], gens: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); gens];
    for &l in word {
        let j = l.unsigned_abs() as usize - 1;
        if l > 0 {
            v[j] += BigInt::one();
        } else {
            v[j] -= BigInt::one();
        }
    }
    v
}

/// Coordinates of the word's image in `Z^g / rowspace(M)` after the
/// change of basis by the Smith column transform.
fn h1_coordinates(word: &[Letter], gens: usize, snf: &Snf) -> Vec<BigInt> {
    let u = exponent_vector(word, gens);
    let c = &snf.col_transform;
    (0..gens)
        .map(|j| (0..gens).map(|i| &u[i] * &c[(i, j)]).sum())
        .collect()
}

/// Order of the word's image in H₁; `None` means infinite order.
pub fn element_order_in_h1(p: &Presentation, word: &[Letter]) -> Option<BigInt> {
    let gens = p.generators.len();
    let snf = smith_normal_form(&p.exponent_matrix());
    let y = h1_coordinates(word, gens, &snf);
    for coord in y.iter().take(gens).skip(snf.rank) {
        if !coord.is_zero() {
            return None;
        }
    }
    let mut order = BigInt::one();
    for (d, yj) in snf.diagonal.iter().zip(&y) {
        let part = d / d.gcd(yj);
        order = order.lcm(&part);
    }
    Some(order)
}

/// Two-bridge template for the twist-knot group: `b(4p+1, 4p-1)` (odd
/// normalization of `b(4p+1, 2p)`) with
/// `w = b^{e_1} a^{e_2} ... a^{e_{4p}}`, `e_i = (-1)^{floor(i(4p-1)/(4p+1))}`,
/// relator `a w b^{-1} w^{-1}` (i.e. `a w = w b`), meridian `a`, and
/// longitude `w · reverse(w) · a^{-2e}` with `e` the exponent sum of `w`.
/// With this `beta` the sign sequence is palindromic, so `reverse(w)` is
/// `w` with the two generators swapped and the longitude commutes with
/// the meridian.
pub fn twist_knot_presentation(p: u64) -> Result<Presentation> {
    if p < 1 {
        return Err(Error::BadParam("twist parameter must be positive".into()));
    }
    let alpha = 4 * p + 1;
    let beta = 4 * p - 1;
    let a: Letter = 1;
    let b: Letter = 2;
    let mut w: Vec<Letter> = Vec::with_capacity((alpha - 1) as usize);
    for i in 1..alpha {
        let gen = if i % 2 == 1 { b } else { a };
        let sign = if ((i as u128 * beta as u128) / alpha as u128) % 2 == 0 {
            1
        } else {
            -1
        };
        w.push(gen * sign);
    }
    let mut relator = vec![a];
    relator.extend_from_slice(&w);
    relator.push(-b);
    relator.extend(invert_word(&w));
    let e: i64 = w.iter().map(|&l| if l > 0 { 1 } else { -1 }).sum();
    let mut lambda: Vec<Letter> = w.clone();
    lambda.extend(w.iter().rev().copied());
    for _ in 0..(2 * e).unsigned_abs() {
        lambda.push(if e > 0 { -a } else { a });
    }
    Presentation::new(
        vec!['a', 'b'],
        vec![free_reduce(&relator)],
        Some((vec![a], free_reduce(&lambda))),
    )
}

/// Connected sum: disjoint union of the presentations (second one's
/// generators renamed to fresh letters) plus the meridian identification
/// `μ₁ μ₂⁻¹`; peripheral pair `(μ₁, λ₁ λ₂)`.
pub fn connected_sum(p1: &Presentation, p2: &Presentation) -> Result<Presentation> {
    let (mu1, l1) = p1.peripheral.clone().ok_or(Error::NoPeripheral)?;
    let (mu2, l2) = p2.peripheral.clone().ok_or(Error::NoPeripheral)?;
    let mut generators = p1.generators.clone();
    for _ in &p2.generators {
        let fresh = ('a'..='z')
            .find(|c| !generators.contains(c))
            .ok_or_else(|| Error::TooManyFactors(generators.len() + 1))?;
        generators.push(fresh);
    }
    let offset = p1.generators.len() as Letter;
    let shift = |w: &[Letter]| -> Vec<Letter> {
        w.iter()
            .map(|&l| if l > 0 { l + offset } else { l - offset })
            .collect()
    };
    let mut relators = p1.relators.clone();
    relators.extend(p2.relators.iter().map(|r| shift(r)));
    let mut ident = mu1.clone();
    ident.extend(invert_word(&shift(&mu2)));
    relators.push(free_reduce(&ident));
    let mut lambda = l1;
    lambda.extend(shift(&l2));
    Presentation::new(generators, relators, Some((mu1, free_reduce(&lambda))))
}

/// Convenience: iterated connected sum of twist knots `K_{p_1} # ...`.
pub fn twist_sum(ps: &[u64]) -> Result<Presentation> {
    let first = ps
        .first()
        .ok_or_else(|| Error::BadParam("empty twist parameter list".into()))?;
    let mut acc = twist_knot_presentation(*first)?;
    for p in &ps[1..] {
        acc = connected_sum(&acc, &twist_knot_presentation(*p)?)?;
    }
    Ok(acc)
}

/// Dehn filling along slope `m/n`: adds the relator `μ^m λ^n`. The
/// peripheral pair is retained for reference.
pub fn dehn_filling(p: &Presentation, m: i64, n: i64) -> Result<Presentation> {
    let (mu, lambda) = p.peripheral.clone().ok_or(Error::NoPeripheral)?;
    if (m, n) == (0, 0) || m.unsigned_abs().gcd(&n.unsigned_abs()) != 1 {
        return Err(Error::BadSlope(m, n));
    }
    let mut filling = Vec::new();
    let mu_pow = if m >= 0 { mu.clone() } else { invert_word(&mu) };
    for _ in 0..m.unsigned_abs() {
        filling.extend_from_slice(&mu_pow);
    }
    let la_pow = if n >= 0 { lambda.clone() } else { invert_word(&lambda) };
    for _ in 0..n.unsigned_abs() {
        filling.extend_from_slice(&la_pow);
    }
    let filling = free_reduce(&filling);
    if filling.is_empty() {
        return Err(Error::BadSlope(m, n));
    }
    let mut relators = p.relators.clone();
    relators.push(filling);
    Presentation::new(p.generators.clone(), relators, Some((mu, lambda)))
}

fn letters_to_syllables(word: &[Letter]) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for &l in word {
        let g = l.unsigned_abs() as usize - 1;
        let e: i64 = if l > 0 { 1 } else { -1 };
        match out.last_mut() {
            Some((lg, le)) if *lg == g => *le += e,
            _ => out.push((g, e)),
        }
    }
    out.retain(|&(_, e)| e != 0);
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Alexander polynomial of a presentation with H₁ ≅ Z: gcd of the maximal
/// `(g-1)`-minors of the Fox-derivative matrix evaluated through the
/// abelianization onto Z, unit-normalized.
pub fn alexander_polynomial(p: &Presentation) -> Result<LaurentPoly> {
    let gens = p.generators.len();
    let snf = smith_normal_form(&p.exponent_matrix());
    let h = homology_h1(p);
    if !h.is_z() {
        return Err(Error::NotKnotLike);
    }
    // abelianization onto Z: generator i maps to t^{weights[i]}, read off
    // the free column of the Smith column transform
    let free_col = snf.rank;
    let mut weights = Vec::with_capacity(gens);
    for i in 0..gens {
        let w = snf.col_transform[(i, free_col)]
            .to_i64()
            .ok_or_else(|| Error::Internal("abelianization weight overflow".into()))?;
        weights.push(w);
    }
    if gens == 0 {
        return Err(Error::NotKnotLike);
    }
    let k = gens - 1;
    if p.relators.len() < k {
        return Err(Error::NotKnotLike);
    }
    let matrix: Vec<Vec<LaurentPoly>> = p
        .relators
        .iter()
        .map(|r| {
            let syl = letters_to_syllables(r);
            (0..gens)
                .map(|g| fox_derivative_evaluated(&syl, g, &weights))
                .collect()
        })
        .collect();
    let mut gcd = LaurentPoly::zero();
    for rows in combinations(p.relators.len(), k) {
        for cols in combinations(gens, k) {
            let minor: Vec<Vec<LaurentPoly>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| matrix[i][j].clone()).collect())
                .collect();
            gcd = laurent_gcd(&gcd, &determinant(&minor));
        }
    }
    Ok(gcd.normalized())
}

/// A presentation after Tietze simplification, with enough bookkeeping to
/// rewrite words over the original generators.
#[derive(Debug, Clone)]
pub struct Simplified {
    pub presentation: Presentation,
    /// Chronological eliminations: generator letter (original indexing,
    /// 1-based) and its replacement word, also in original indexing.
    steps: Vec<(Letter, Vec<Letter>)>,
    /// Original generator index -> surviving index, if the generator
    /// survived.
    compact: Vec<Option<usize>>,
}

impl Simplified {
    /// Rewrites a word over the original generators into the simplified
    /// presentation's lettering.
    pub fn rewrite(&self, word: &[Letter]) -> Result<Vec<Letter>> {
        let mut cur: Vec<Letter> = word.to_vec();
        for (gen, replacement) in &self.steps {
            let mut next = Vec::with_capacity(cur.len());
            for &l in &cur {
                if l == *gen {
                    next.extend_from_slice(replacement);
                } else if l == -*gen {
                    next.extend(invert_word(replacement));
                } else {
                    next.push(l);
                }
            }
            cur = next;
        }
        let mut out = Vec::with_capacity(cur.len());
        for &l in &cur {
            let idx = l.unsigned_abs() as usize - 1;
            let new = self
                .compact
                .get(idx)
                .copied()
                .flatten()
                .ok_or_else(|| Error::BadWord(format!("letter {l} has no surviving image")))?;
            let nl = (new + 1) as Letter;
            out.push(if l > 0 { nl } else { -nl });
        }
        Ok(free_reduce(&out))
    }
}

/// Tietze simplification: repeatedly eliminate a generator that occurs
/// exactly once (up to cyclic rotation) in some relator, substituting its
/// expression into the remaining relators and the peripheral words.
pub fn simplify(p: &Presentation) -> Result<Simplified> {
    let gens = p.generators.len();
    let mut alive: Vec<bool> = vec![true; gens];
    let mut relators: Vec<Vec<Letter>> = p.relators.clone();
    let mut peripheral = p.peripheral.clone();
    let mut steps: Vec<(Letter, Vec<Letter>)> = Vec::new();

    loop {
        let mut elim: Option<(usize, Letter, Vec<Letter>)> = None;
        'scan: for (ri, r) in relators.iter().enumerate() {
            for g in 1..=gens as Letter {
                if !alive[g as usize - 1] {
                    continue;
                }
                let hits: Vec<usize> = r
                    .iter()
                    .enumerate()
                    .filter(|&(_, &l)| l.abs() == g)
                    .map(|(i, _)| i)
                    .collect();
                if hits.len() != 1 {
                    continue;
                }
                // rotate so the g-letter leads: r' = g^s · w, hence
                // g = w^{-s}
                let i = hits[0];
                let mut rot: Vec<Letter> = Vec::with_capacity(r.len());
                rot.extend_from_slice(&r[i..]);
                rot.extend_from_slice(&r[..i]);
                let s_positive = rot[0] > 0;
                let tail = &rot[1..];
                let replacement = if s_positive {
                    invert_word(tail)
                } else {
                    tail.to_vec()
                };
                elim = Some((ri, g, free_reduce(&replacement)));
                break 'scan;
            }
        }
        let Some((ri, g, replacement)) = elim else {
            break;
        };
        alive[g as usize - 1] = false;
        relators.remove(ri);
        let substitute = |w: &[Letter]| -> Vec<Letter> {
            let mut out = Vec::with_capacity(w.len());
            for &l in w {
                if l == g {
                    out.extend_from_slice(&replacement);
                } else if l == -g {
                    out.extend(invert_word(&replacement));
                } else {
                    out.push(l);
                }
            }
            free_reduce(&out)
        };
        relators = relators.iter().map(|r| substitute(r)).collect();
        relators.retain(|r| !r.is_empty());
        if let Some((mu, lambda)) = &peripheral {
            peripheral = Some((substitute(mu), substitute(lambda)));
        }
        steps.push((g, replacement));
    }

    let mut compact: Vec<Option<usize>> = Vec::with_capacity(gens);
    let mut generators = Vec::new();
    for (i, &keep) in alive.iter().enumerate() {
        if keep {
            compact.push(Some(generators.len()));
            generators.push(p.generators[i]);
        } else {
            compact.push(None);
        }
    }
    let renumber = |w: &[Letter]| -> Vec<Letter> {
        w.iter()
            .map(|&l| {
                let new = compact[l.unsigned_abs() as usize - 1].expect("eliminated letter") + 1;
                if l > 0 {
                    new as Letter
                } else {
                    -(new as Letter)
                }
            })
            .collect()
    };
    let relators: Vec<Vec<Letter>> = relators.iter().map(|r| renumber(r)).collect();
    let peripheral = peripheral.map(|(mu, la)| (renumber(&mu), renumber(&la)));
    let presentation = Presentation::new(generators, relators, peripheral)?;
    Ok(Simplified {
        presentation,
        steps,
        compact,
    })
}

/// A successful triviality proof, carried together with the (simplified)
/// presentation and rewritten word the derivation refers to.
#[derive(Debug, Clone)]
pub struct Proof {
    pub presentation: Presentation,
    pub word: Vec<Letter>,
    pub derivation: Derivation,
}

impl Proof {
    /// Replays the derivation in the independent checker.
    pub fn check(&self) -> Result<()> {
        check_derivation(&self.word, &self.presentation.relators, &self.derivation)
    }
}

#[derive(Debug, Clone)]
pub enum TrivialityOutcome {
    Proved(Proof),
    Unknown { expansions: u64 },
}

/// Attempts to prove `word = 1` in the presented group within `budget`
/// relator-insertion expansions. Simplifies the presentation first to
/// shrink the branching factor.
pub fn prove_trivial(p: &Presentation, word: &[Letter], budget: u64) -> Result<TrivialityOutcome> {
    for &l in word {
        let idx = l.unsigned_abs() as usize;
        if idx == 0 || idx > p.generators.len() {
            return Err(Error::BadWord(format!(
                "letter {l} is outside the generator range"
            )));
        }
    }
    let s = simplify(p)?;
    let w = s.rewrite(word)?;
    match prover::prove_trivial(&w, &s.presentation.relators, budget) {
        ProveOutcome::Proved(derivation) => Ok(TrivialityOutcome::Proved(Proof {
            presentation: s.presentation,
            word: w,
            derivation,
        })),
        ProveOutcome::Unknown { expansions } => Ok(TrivialityOutcome::Unknown { expansions }),
    }
}

/// A generalized-torsion witness for the meridian in a filled group: the
/// product of the `k` conjugates `x_i μ x_i^{-1}` is trivial, certified by
/// a replayable derivation. Conjugators are words over the simplified
/// presentation carried in `proof`.
#[derive(Debug, Clone)]
pub struct MeridianRecord {
    pub k: u64,
    pub conjugators: Vec<Vec<Letter>>,
    pub product: Vec<Letter>,
    pub proof: Proof,
}

#[derive(Debug, Clone)]
pub enum MeridianOutcome {
    Found(Box<MeridianRecord>),
    Unknown,
}

/// Reduced words of letter length at most `max_len`, in shortlex order.
fn short_words(gens: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let letters: Vec<Letter> = (1..=gens as Letter).flat_map(|g| [g, -g]).collect();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut nw = w.clone();
                nw.push(l);
                next.push(nw);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

const MERIDIAN_CONJ_LEN: usize = 2;
const MERIDIAN_MIN_CANDIDATE_BUDGET: u64 = 500;

/// Searches for a generalized-torsion certificate for the meridian image
/// in a filled presentation: `k` steps through the first two multiples of
/// the H₁ order of μ, conjugator tuples run in shortlex order with
/// `x₁ = ε`, and each candidate product goes to the prover with a share of
/// the budget. First find in enumeration order wins; exhaustion is
/// `Unknown`.
pub fn meridian_gt_search(p: &Presentation, m: u64, budget: u64) -> Result<MeridianOutcome> {
    if m < 1 {
        return Err(Error::BadParam("slope numerator must be positive".into()));
    }
    let (mu, _) = p.peripheral.clone().ok_or(Error::NoPeripheral)?;
    let Some(h) = element_order_in_h1(p, &mu) else {
        // infinite order in H1: no finite product of conjugates dies
        return Ok(MeridianOutcome::Unknown);
    };
    let h = h.to_u64().ok_or_else(|| {
        Error::Internal("meridian H1 order does not fit in a machine word".into())
    })?;
    let h = h.max(1);
    if h % m != 0 && m % h != 0 {
        return Err(Error::Internal(
            "H1 order of the meridian is incompatible with the slope".into(),
        ));
    }

    let s = simplify(p)?;
    let mu = s.rewrite(&mu)?;
    let gens = s.presentation.generators.len();
    let pool = short_words(gens, MERIDIAN_CONJ_LEN);
    let ks = [h, 2 * h];
    let total_candidates: u64 = ks
        .iter()
        .map(|&k| (pool.len() as u64).saturating_pow(k.saturating_sub(1) as u32))
        .sum();
    let per_candidate = (budget / total_candidates.max(1)).max(MERIDIAN_MIN_CANDIDATE_BUDGET);

    let mut used: u64 = 0;
    for &k in &ks {
        let slots = (k - 1) as usize;
        // odometer over conjugator tuples, rightmost fastest; x1 = empty
        let mut idx = vec![0usize; slots];
        loop {
            let conjugators: Vec<Vec<Letter>> = std::iter::once(Vec::new())
                .chain(idx.iter().map(|&i| pool[i].clone()))
                .collect();
            let mut product: Vec<Letter> = Vec::new();
            for x in &conjugators {
                product.extend_from_slice(x);
                product.extend_from_slice(&mu);
                product.extend(invert_word(x));
            }
            let product = free_reduce(&product);
            if used >= budget {
                return Ok(MeridianOutcome::Unknown);
            }
            let allot = per_candidate.min(budget - used);
            match prover::prove_trivial(&product, &s.presentation.relators, allot) {
                ProveOutcome::Proved(derivation) => {
                    let proof = Proof {
                        presentation: s.presentation.clone(),
                        word: product.clone(),
                        derivation,
                    };
                    proof.check()?;
                    return Ok(MeridianOutcome::Found(Box::new(MeridianRecord {
                        k,
                        conjugators,
                        product,
                        proof,
                    })));
                }
                ProveOutcome::Unknown { expansions } => {
                    used += expansions.max(1);
                }
            }
            // advance odometer
            let mut pos = slots;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < pool.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if slots == 0 || (pos == 0 && idx[0] == 0) {
                break;
            }
        }
    }
    Ok(MeridianOutcome::Unknown)
}
