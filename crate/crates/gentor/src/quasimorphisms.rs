//! Counting quasimorphisms on free-product normal forms.
//!
//! A counting quasimorphism `phi_w(g) = c_w(g) - c_{w^-1}(g)` counts
//! overlapping occurrences of the signed-letter expansion of `w` in the
//! expansion of the reduced normal form of `g`. Homogenized values are
//! certified intervals `phi(g^N)/N +- Dbar/N`, valid whenever the
//! configured defect bound `Dbar` really bounds the defect. Every check in
//! this module is a necessary condition; a failure proves the configured
//! bound wrong and surfaces as `E_DEFECT_VIOLATION`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::words::{GroupSpec, Letter, Word};

/// Default defect bound multiplier: `Dbar = 6 * letter_len(w)`.
pub const DEFAULT_DEFECT_FACTOR: i64 = 6;

/// Default homogenization power.
pub const DEFAULT_N: i64 = 256;

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A certified enclosure of a homogenized value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub center: BigRational,
    pub radius: BigRational,
}

impl Interval {
    pub fn new(center: BigRational, radius: BigRational) -> Self {
        assert!(radius >= BigRational::zero());
        Interval { center, radius }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        (&self.center - x).abs() <= self.radius
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        (&self.center - &other.center).abs() <= &self.radius + &other.radius
    }

    pub fn negate(&self) -> Interval {
        Interval {
            center: -self.center.clone(),
            radius: self.radius.clone(),
        }
    }

    pub fn scale(&self, m: i64) -> Interval {
        let m = BigRational::from(BigInt::from(m));
        Interval {
            center: &self.center * &m,
            radius: &self.radius * m.abs(),
        }
    }
}

/// A counting quasimorphism `phi_w` with a configured defect bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingQm {
    w: Word,
    w_letters: Vec<Letter>,
    w_inv_letters: Vec<Letter>,
    defect_bound: BigRational,
}

impl CountingQm {
    pub fn new(w: Word, defect_bound: BigRational) -> Result<Self> {
        if w.is_identity() {
            return Err(Error::TrivialInput);
        }
        if defect_bound <= BigRational::zero() {
            return Err(Error::BadParam("defect bound must be positive".into()));
        }
        let w_letters = w.letters();
        let w_inv_letters = w.invert().letters();
        Ok(CountingQm {
            w,
            w_letters,
            w_inv_letters,
            defect_bound,
        })
    }

    /// `phi_w` with the default conservative bound `6 * letter_len(w)`.
    pub fn with_default_bound(w: Word) -> Result<Self> {
        let len = w.letter_len() as i64;
        CountingQm::new(w, rational(DEFAULT_DEFECT_FACTOR * len, 1))
    }

    pub fn word(&self) -> &Word {
        &self.w
    }

    pub fn defect_bound(&self) -> &BigRational {
        &self.defect_bound
    }

    pub fn group(&self) -> &GroupSpec {
        self.w.group()
    }

    /// `c_w(g) - c_{w^-1}(g)` on the reduced letter expansion of `g`.
    pub fn evaluate(&self, g: &Word) -> Result<i64> {
        if g.group() != self.w.group() {
            return Err(Error::GroupMismatch);
        }
        let text = g.letters();
        Ok(self.evaluate_letters(&text))
    }

    fn evaluate_letters(&self, text: &[Letter]) -> i64 {
        count_occurrences(&self.w_letters, text) - count_occurrences(&self.w_inv_letters, text)
    }

    /// Certified enclosure of the homogenization: center `phi(g^N)/N`,
    /// radius `Dbar/N`.
    pub fn homogenize(&self, g: &Word, n: i64) -> Result<Interval> {
        if n < 1 {
            return Err(Error::BadParam("homogenization power must be >= 1".into()));
        }
        let value = self.evaluate(&g.power(n))?;
        let n_rat = rational(n, 1);
        Ok(Interval::new(
            rational(value, 1) / &n_rat,
            &self.defect_bound / n_rat,
        ))
    }

    /// Max of `|phi(gh) - phi(g) - phi(h)|` over the sample. Exceeding the
    /// configured bound proves the bound wrong.
    pub fn defect_sample(&self, pairs: &[(Word, Word)]) -> Result<BigRational> {
        if pairs.is_empty() {
            return Err(Error::BadParam("defect sample must be nonempty".into()));
        }
        let mut worst: i64 = 0;
        for (g, h) in pairs {
            let gh = g.multiply(h)?;
            let d = (self.evaluate(&gh)? - self.evaluate(g)? - self.evaluate(h)?).abs();
            worst = worst.max(d);
        }
        let worst = rational(worst, 1);
        if worst > self.defect_bound {
            return Err(Error::DefectViolation(format!(
                "defect sample {worst} exceeds configured bound {} for w = {}",
                self.defect_bound, self.w
            )));
        }
        Ok(worst)
    }
}

/// Overlapping occurrences of `pattern` as a contiguous subsequence.
fn count_occurrences(pattern: &[Letter], text: &[Letter]) -> i64 {
    if pattern.is_empty() || text.len() < pattern.len() {
        return 0;
    }
    let mut count = 0i64;
    for start in 0..=(text.len() - pattern.len()) {
        if text[start..start + pattern.len()] == *pattern {
            count += 1;
        }
    }
    count
}

/// One axiom-check sample: a word, a conjugator, and a power.
#[derive(Debug, Clone)]
pub struct AxiomSample {
    pub g: Word,
    pub h: Word,
    pub m: i64,
}

/// Per-quasimorphism tallies from `axiom_checks`.
#[derive(Debug, Clone, Default)]
pub struct AxiomReport {
    pub samples: usize,
    pub antisymmetry_checked: usize,
    pub class_function_checked: usize,
    pub homogeneity_checked: usize,
    pub refinement_checked: usize,
}

/// Interval necessary-condition checks for a homogeneous quasimorphism:
/// antisymmetry, class function, homogeneity, and N-vs-2N refinement.
/// Any failure means the configured defect bound is too small.
pub fn axiom_checks(qm: &CountingQm, samples: &[AxiomSample], n: i64) -> Result<AxiomReport> {
    let mut report = AxiomReport {
        samples: samples.len(),
        ..AxiomReport::default()
    };
    for sample in samples {
        let ig = qm.homogenize(&sample.g, n)?;

        let ig_inv = qm.homogenize(&sample.g.invert(), n)?;
        if !ig_inv.intersects(&ig.negate()) {
            return Err(Error::DefectViolation(format!(
                "antisymmetry intervals disjoint for w = {}, g = {}",
                qm.word(),
                sample.g
            )));
        }
        report.antisymmetry_checked += 1;

        let conj = sample.g.conjugate_by(&sample.h)?;
        let iconj = qm.homogenize(&conj, n)?;
        if !iconj.intersects(&ig) {
            return Err(Error::DefectViolation(format!(
                "class-function intervals disjoint for w = {}, g = {}, h = {}",
                qm.word(),
                sample.g,
                sample.h
            )));
        }
        report.class_function_checked += 1;

        let ipow = qm.homogenize(&sample.g.power(sample.m), n)?;
        if !ipow.intersects(&ig.scale(sample.m)) {
            return Err(Error::DefectViolation(format!(
                "homogeneity intervals disjoint for w = {}, g = {}, m = {}",
                qm.word(),
                sample.g,
                sample.m
            )));
        }
        report.homogeneity_checked += 1;

        let i2n = qm.homogenize(&sample.g, 2 * n)?;
        if !i2n.intersects(&ig) {
            return Err(Error::DefectViolation(format!(
                "N vs 2N intervals disjoint for w = {}, g = {}",
                qm.word(),
                sample.g
            )));
        }
        report.refinement_checked += 1;
    }
    Ok(report)
}

/// Lower bound for scl from a finite quasimorphism family, or the
/// infinite flag when no power of `g` lies in the commutator subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SclLower {
    Infinite,
    Finite(BigRational),
}

/// Bavard-duality lower bound over a finite family, conditional on every
/// configured defect bound being a true upper bound. Uses the smallest
/// power `k0` of `g` lying in the commutator-subgroup coset lattice (its
/// abelianized order) and divides the certified bound for `g^{k0}` back
/// down by `k0`.
pub fn bavard_lower(g: &Word, family: &[CountingQm], n: i64) -> Result<SclLower> {
    if g.is_identity() {
        return Err(Error::TrivialInput);
    }
    let k0 = match g.abelian_order() {
        None => return Ok(SclLower::Infinite),
        Some(o) => o as i64,
    };
    let gk = g.power(k0);
    let k0_rat = rational(k0, 1);
    let zero = BigRational::zero();
    let best = family
        .par_iter()
        .map(|qm| {
            let interval = qm.homogenize(&gk, n)?;
            let gap = interval.center.abs() - &interval.radius;
            let candidate = if gap > zero {
                gap / (rational(2, 1) * qm.defect_bound()) / &k0_rat
            } else {
                zero.clone()
            };
            Ok(candidate)
        })
        .try_reduce(|| zero.clone(), |a, b| Ok(a.max(b)))?;
    Ok(SclLower::Finite(best))
}

/// The default family for a group: `phi_w` for every reduced word of
/// letter length 2 or 3, deduplicated up to inversion, with default
/// bounds. Ordered by (letter length, expansion) for determinism.
pub fn default_family(group: &GroupSpec) -> Vec<CountingQm> {
    let mut words = enumerate_by_letter_len(group, 3);
    words.retain(|w| w.letter_len() >= 2);
    // dedupe up to inversion: keep the lexicographically smaller expansion
    let mut kept: Vec<Word> = Vec::new();
    for w in words {
        let inv = w.invert();
        if w.letters() <= inv.letters() {
            kept.push(w);
        }
    }
    kept.sort_by_key(|w| (w.letter_len(), w.letters()));
    kept.into_iter()
        .map(|w| CountingQm::with_default_bound(w).expect("nonempty word"))
        .collect()
}

/// All normal-form words with letter expansion length at most `max_len`.
fn enumerate_by_letter_len(group: &GroupSpec, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<(usize, i64)>> = vec![Vec::new()];
    while let Some(stem) = stack.pop() {
        let word = group.word_from_syllables(stem.clone());
        if word.syllables().len() == stem.len() && word.letter_len() <= max_len {
            if !stem.is_empty() {
                out.push(word);
            }
        } else {
            continue;
        }
        let last = stem.last().map(|&(f, _)| f);
        for factor in 0..group.factor_count() {
            if Some(factor) == last {
                continue;
            }
            for exp in exponent_candidates(group, factor, max_len as i64) {
                let mut s = stem.clone();
                s.push((factor, exp));
                let candidate = group.word_from_syllables(s.clone());
                if candidate.letter_len() <= max_len {
                    stack.push(s);
                }
            }
        }
    }
    out
}

fn exponent_candidates(group: &GroupSpec, factor: usize, max_len: i64) -> Vec<i64> {
    match group.factors()[factor] {
        crate::words::FactorKind::Finite(n) => (1..n as i64).collect(),
        crate::words::FactorKind::Infinite => {
            let mut v = Vec::new();
            for e in 1..=max_len {
                v.push(e);
                v.push(-e);
            }
            v
        }
    }
}

/// CLI family syntax: comma-separated word strings with an optional
/// `:Dbar` rational suffix, e.g. `ab:6, aba:9`.
pub fn parse_family(text: &str, group: &GroupSpec) -> Result<Vec<CountingQm>> {
    let mut family = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (word_text, bound) = match item.split_once(':') {
            Some((w, b)) => (w, Some(parse_rational(b.trim())?)),
            None => (item, None),
        };
        let w = Word::parse(word_text, group)?;
        let qm = match bound {
            Some(b) => CountingQm::new(w, b)?,
            None => CountingQm::with_default_bound(w)?,
        };
        family.push(qm);
    }
    if family.is_empty() {
        return Err(Error::Parse("empty quasimorphism family".into()));
    }
    Ok(family)
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational '{text}'")))
    };
    match text.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{text}'")));
            }
            Ok(BigRational::new(parse_int(p)?, den))
        }
        None => Ok(BigRational::from(parse_int(text)?)),
    }
}

/// Prints a rational as `p/q` (or `p` when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn group(text: &str) -> GroupSpec {
        GroupSpec::parse(text).unwrap()
    }

    fn w(text: &str, g: &GroupSpec) -> Word {
        Word::parse(text, g).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let free = group("Z * Z");
        let phi = CountingQm::with_default_bound(w("ab", &free)).unwrap();
        assert_eq!(phi.evaluate(&w("abab", &free)).unwrap(), 2);
        assert_eq!(phi.evaluate(&free.identity()).unwrap(), 0);
        assert_eq!(phi.evaluate(&w("ab", &free)).unwrap(), 1);
    }

    #[test]
    fn evaluate_antisymmetric_exactly() {
        let g = group("Z/2 * Z/3");
        let free = group("Z * Z");
        for (grp, texts) in [
            (&g, vec!["ab", "ab^2a", "b^2ab"]),
            (&free, vec!["ab", "aab^-1", "b^2a^-3b"]),
        ] {
            for wt in ["ab", "ba", "ab^2"] {
                let phi = CountingQm::with_default_bound(w(wt, grp)).unwrap();
                for gt in &texts {
                    let u = w(gt, grp);
                    assert_eq!(
                        phi.evaluate(&u.invert()).unwrap(),
                        -phi.evaluate(&u).unwrap(),
                        "w={wt} g={gt}"
                    );
                }
            }
        }
    }

    #[test]
    fn homogenize_identity() {
        let free = group("Z * Z");
        let phi = CountingQm::with_default_bound(w("ab", &free)).unwrap();
        let interval = phi.homogenize(&free.identity(), 16).unwrap();
        assert!(interval.center.is_zero());
        assert!(interval.contains(&BigRational::zero()));
    }

    #[test]
    fn homogenize_ab_contains_one() {
        // direct counting oracle: (ab)^N contains N occurrences of ab and
        // none of its inverse, so the center is exactly 1
        let free = group("Z * Z");
        let phi = CountingQm::with_default_bound(w("ab", &free)).unwrap();
        let interval = phi.homogenize(&w("ab", &free), 64).unwrap();
        assert_eq!(interval.center, BigRational::one());
        assert!(interval.contains(&BigRational::one()));
        assert_eq!(interval.radius, rational(12, 64));
    }

    #[test]
    fn defect_sample_examples() {
        let free = group("Z * Z");
        let phi = CountingQm::with_default_bound(w("ab", &free)).unwrap();
        let zero_pair = vec![(free.identity(), free.identity())];
        assert!(phi.defect_sample(&zero_pair).unwrap().is_zero());

        let pair = vec![(w("a", &free), w("b", &free))];
        assert_eq!(phi.defect_sample(&pair).unwrap(), rational(1, 1));
    }

    #[test]
    fn defect_violation_detected() {
        // an absurdly small configured bound must be caught
        let free = group("Z * Z");
        let phi = CountingQm::new(w("ab", &free), rational(1, 2)).unwrap();
        let pair = vec![(w("a", &free), w("b", &free))];
        assert!(matches!(
            phi.defect_sample(&pair),
            Err(Error::DefectViolation(_))
        ));
    }

    #[test]
    fn axiom_checks_pass_on_simple_samples() {
        let g = group("Z/2 * Z/3");
        let phi = CountingQm::with_default_bound(w("ab", &g)).unwrap();
        let samples = vec![
            AxiomSample {
                g: g.identity(),
                h: w("b", &g),
                m: 2,
            },
            AxiomSample {
                g: w("ab", &g),
                h: w("b^2a", &g),
                m: 3,
            },
        ];
        let report = axiom_checks(&phi, &samples, 64).unwrap();
        assert_eq!(report.samples, 2);
        assert_eq!(report.class_function_checked, 2);
    }

    #[test]
    fn bavard_infinite_flag() {
        let free = group("Z * Z");
        let family = default_family(&free);
        assert_eq!(
            bavard_lower(&w("a", &free), &family, 32).unwrap(),
            SclLower::Infinite
        );
    }

    #[test]
    fn bavard_empty_family_is_zero() {
        let free = group("Z * Z");
        let got = bavard_lower(&w("abAB", &free), &[], 32).unwrap();
        assert_eq!(got, SclLower::Finite(BigRational::zero()));
    }

    #[test]
    fn bavard_commutator_positive_and_below_half() {
        let free = group("Z * Z");
        let family = default_family(&free);
        let comm = w("abAB", &free);
        match bavard_lower(&comm, &family, 256).unwrap() {
            SclLower::Finite(bound) => {
                assert!(bound > BigRational::zero());
                assert!(bound <= rational(1, 2));
            }
            SclLower::Infinite => panic!("commutator has abelian order 1"),
        }
    }

    #[test]
    fn default_family_contents() {
        let free = group("Z * Z");
        let family = default_family(&free);
        assert!(!family.is_empty());
        for qm in &family {
            let len = qm.word().letter_len();
            assert!(len == 2 || len == 3);
            // deduped up to inversion
            assert!(qm.word().letters() <= qm.word().invert().letters());
        }
        // ab present, its inverse is not
        assert!(family.iter().any(|q| q.word() == &w("ab", &free)));
    }

    #[test]
    fn family_syntax() {
        let free = group("Z * Z");
        let family = parse_family("ab:6, aba:9/2", &free).unwrap();
        assert_eq!(family.len(), 2);
        assert_eq!(family[0].defect_bound(), &rational(6, 1));
        assert_eq!(family[1].defect_bound(), &rational(9, 2));
        assert!(parse_family("", &free).is_err());
    }
}
