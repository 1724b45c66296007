//! Generalized-torsion certificates: a group element together with
//! conjugators witnessing that some product of its conjugates reduces to
//! the identity. Verification is by exact normal-form reduction only.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::words::{FactorKind, GroupSpec, Word};

/// An element `g` plus conjugators `x_1..x_k` asserting
/// `(x_1 g x_1^-1) ... (x_k g x_k^-1) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtCertificate {
    g: Word,
    conjugators: Vec<Word>,
    verified: bool,
}

impl GtCertificate {
    pub fn new(g: Word, conjugators: Vec<Word>) -> Result<Self> {
        if g.is_identity() {
            return Err(Error::TrivialInput);
        }
        if conjugators.is_empty() {
            return Err(Error::BadParam("a certificate needs k >= 1 conjugators".into()));
        }
        for x in &conjugators {
            if x.group() != g.group() {
                return Err(Error::GroupMismatch);
            }
        }
        Ok(GtCertificate {
            g,
            conjugators,
            verified: false,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        self.g.group()
    }

    pub fn element(&self) -> &Word {
        &self.g
    }

    pub fn conjugators(&self) -> &[Word] {
        &self.conjugators
    }

    pub fn k(&self) -> usize {
        self.conjugators.len()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Checks the defining identity by reduction. On success the verified
    /// flag is set and the abelianized order of `g` is asserted to divide
    /// `k` (forced by `g^k = 1` in the abelianization).
    pub fn verify(&mut self) -> Result<bool> {
        let product = evaluate_product(&self.g, &self.conjugators)?;
        if !product.is_identity() {
            return Ok(false);
        }
        match self.g.abelian_order() {
            Some(order) => {
                if self.k() as u64 % order != 0 {
                    return Err(Error::Internal(format!(
                        "verified product but abelian order {order} does not divide k={}",
                        self.k()
                    )));
                }
            }
            None => {
                return Err(Error::Internal(
                    "verified product but abelianized image has infinite order".into(),
                ));
            }
        }
        self.verified = true;
        Ok(true)
    }

    /// Convenience: build and verify, failing with `E_NOT_VERIFIED` if the
    /// product is not the identity.
    pub fn verified(g: Word, conjugators: Vec<Word>) -> Result<Self> {
        let mut cert = GtCertificate::new(g, conjugators)?;
        if !cert.verify()? {
            return Err(Error::NotVerified);
        }
        Ok(cert)
    }
}

/// `reduce( prod_i x_i g x_i^-1 )` in product order.
pub fn evaluate_product(g: &Word, conjugators: &[Word]) -> Result<Word> {
    let mut acc = g.group().identity();
    for x in conjugators {
        if x.group() != g.group() {
            return Err(Error::GroupMismatch);
        }
        acc = acc.multiply(&g.conjugate_by(x)?)?;
    }
    Ok(acc)
}

/// Left-translates the conjugators by `x_1^-1` so the first becomes the
/// identity. Preserves verification and k; idempotent.
pub fn normalize(cert: &GtCertificate) -> Result<GtCertificate> {
    if !cert.verified {
        return Err(Error::NotVerified);
    }
    let x1_inv = cert.conjugators[0].invert();
    let conjugators: Vec<Word> = cert
        .conjugators
        .iter()
        .map(|x| x1_inv.multiply(x).expect("same group"))
        .collect();
    let mut out = GtCertificate::new(cert.g.clone(), conjugators)?;
    if !out.verify()? {
        return Err(Error::Internal("normalization broke verification".into()));
    }
    Ok(out)
}

/// Bounds for the conjugator-tuple enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_k: u64,
    pub max_conj_syllables: usize,
    pub max_abs_exponent: i64,
}

/// Result of a bounded order search. `lower_bound = None` means the
/// abelianized image has infinite order, so no certificate can exist.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub certificate: Option<GtCertificate>,
    pub lower_bound: Option<u64>,
    pub bounds: SearchBounds,
}

/// All reduced words of at most `max_syllables` syllables whose stored
/// exponents have magnitude at most `max_exp`, in shortlex order (syllable
/// count first, then lexicographic on (factor, exponent rank)). The
/// identity comes first.
pub fn enumerate_words(group: &GroupSpec, max_syllables: usize, max_exp: i64) -> Vec<Word> {
    // exponent candidates per factor, in a fixed deterministic rank order
    let exp_choices: Vec<Vec<i64>> = group
        .factors()
        .iter()
        .map(|f| match f {
            FactorKind::Finite(n) => (1..=(*n as i64 - 1).min(max_exp)).collect(),
            FactorKind::Infinite => {
                let mut v = Vec::new();
                for e in 1..=max_exp {
                    v.push(e);
                    v.push(-e);
                }
                v
            }
        })
        .collect();

    let mut out = vec![group.identity()];
    let mut frontier: Vec<Vec<(usize, i64)>> = vec![Vec::new()];
    for _ in 0..max_syllables {
        let mut next = Vec::new();
        for stem in &frontier {
            let last = stem.last().map(|&(f, _)| f);
            for (factor, exps) in exp_choices.iter().enumerate() {
                if Some(factor) == last {
                    continue;
                }
                for &e in exps {
                    let mut s = stem.clone();
                    s.push((factor, e));
                    next.push(s);
                }
            }
        }
        for s in &next {
            out.push(group.word_from_syllables(s.clone()));
        }
        frontier = next;
    }
    out
}

/// Bounded minimal-order search. Enumerates k through multiples of the
/// abelianized order of `g` up to `max_k`; for each k the conjugator
/// tuples `(x_2, ..., x_k)` run in shortlex order with `x_1` pinned to the
/// identity. Returns the first verifying certificate, which is
/// shortlex-minimal and has minimal k within the bounds.
pub fn search_order(group: &GroupSpec, g: &Word, bounds: SearchBounds) -> Result<SearchOutcome> {
    if g.group() != group {
        return Err(Error::GroupMismatch);
    }
    if g.is_identity() {
        return Err(Error::TrivialInput);
    }
    if bounds.max_k == 0 || bounds.max_abs_exponent <= 0 {
        return Err(Error::BadParam("search bounds must be positive".into()));
    }
    let lower_bound = match g.abelian_order() {
        None => {
            return Ok(SearchOutcome {
                certificate: None,
                lower_bound: None,
                bounds,
            });
        }
        Some(o) => o,
    };

    let words = enumerate_words(group, bounds.max_conj_syllables, bounds.max_abs_exponent);
    let mut k = lower_bound;
    while k <= bounds.max_k {
        if let Some(cert) = search_fixed_k(g, k as usize, &words)? {
            return Ok(SearchOutcome {
                certificate: Some(cert),
                lower_bound: Some(lower_bound),
                bounds,
            });
        }
        k += lower_bound;
    }
    Ok(SearchOutcome {
        certificate: None,
        lower_bound: Some(lower_bound),
        bounds,
    })
}

const SEARCH_BATCH: usize = 4096;

/// Scans tuples `(x_2..x_k)` in odometer order over `words`, batched so
/// workers can verify candidates in parallel while the first-in-order
/// success is still selected deterministically.
fn search_fixed_k(g: &Word, k: usize, words: &[Word]) -> Result<Option<GtCertificate>> {
    let identity = g.group().identity();
    if k == 1 {
        // single conjugate: x_1 = identity, product is g itself
        if g.is_identity() {
            return Err(Error::TrivialInput);
        }
        return Ok(None);
    }
    let slots = k - 1;
    let mut odometer = vec![0usize; slots];
    let mut done = false;
    while !done {
        // collect one batch of index tuples
        let mut batch: Vec<Vec<usize>> = Vec::with_capacity(SEARCH_BATCH);
        while batch.len() < SEARCH_BATCH && !done {
            batch.push(odometer.clone());
            // advance odometer, most significant slot first for shortlex order
            let mut i = slots;
            loop {
                if i == 0 {
                    done = true;
                    break;
                }
                i -= 1;
                odometer[i] += 1;
                if odometer[i] < words.len() {
                    break;
                }
                odometer[i] = 0;
            }
        }
        let hit = batch
            .par_iter()
            .enumerate()
            .filter_map(|(pos, tuple)| {
                let mut conjugators = Vec::with_capacity(k);
                conjugators.push(identity.clone());
                for &wi in tuple {
                    conjugators.push(words[wi].clone());
                }
                match evaluate_product(g, &conjugators) {
                    Ok(p) if p.is_identity() => Some((pos, conjugators)),
                    _ => None,
                }
            })
            .min_by_key(|(pos, _)| *pos);
        if let Some((_, conjugators)) = hit {
            return Ok(Some(GtCertificate::verified(g.clone(), conjugators)?));
        }
    }
    Ok(None)
}

/// Transports a verified certificate whose element is conjugate into a
/// factor down to that factor group, by conjugating the witnessing
/// identity and deleting all other-factor syllables. The result verifies
/// in the factor with the same k.
pub fn transport_to_factor(cert: &GtCertificate) -> Result<GtCertificate> {
    if !cert.verified {
        return Err(Error::NotVerified);
    }
    let group = cert.group().clone();
    let located = cert.element().conjugate_into_factor()?;
    let (factor, c, exp) = match located {
        Some(t) => t,
        None => {
            if group.all_torsion_free() {
                // a verified certificate over torsion-free factors must be
                // conjugate into a factor; re-check the product to decide
                // whether the certificate itself was bogus
                let product = evaluate_product(cert.element(), cert.conjugators())?;
                if product.is_identity() {
                    return Err(Error::TheoremViolation(
                        "verified certificate over torsion-free factors with cyclic core of length >= 2"
                            .into(),
                    ));
                }
                return Err(Error::Internal(
                    "certificate flagged verified but its product is nontrivial".into(),
                ));
            }
            return Err(Error::NotConjugateIntoFactor);
        }
    };

    // y g y^-1 = gen_factor^exp with y = c^-1
    let y = c.invert();
    let factor_group = group.single_factor(factor);
    let g1 = factor_group.generator_power(0, exp);

    let project = |u: &Word| -> Word {
        let raw: Vec<(usize, i64)> = u
            .syllables()
            .iter()
            .filter(|&&(f, _)| f == factor)
            .map(|&(_, e)| (0usize, e))
            .collect();
        factor_group.word_from_syllables(raw)
    };

    let conjugators: Vec<Word> = cert
        .conjugators()
        .iter()
        .map(|x| {
            let conj = y
                .multiply(x)
                .and_then(|yx| yx.multiply(&y.invert()))
                .expect("same group");
            project(&conj)
        })
        .collect();

    let mut out = GtCertificate::new(g1, conjugators)?;
    if !out.verify()? {
        return Err(Error::Internal(
            "factor projection of a verified certificate failed to verify".into(),
        ));
    }
    Ok(out)
}

/// Serializes to the line-oriented `gtcert v1` format.
pub fn to_file_string(cert: &GtCertificate) -> String {
    let mut s = String::new();
    s.push_str("gtcert v1\n");
    s.push_str(&format!("group: {}\n", cert.group()));
    s.push_str(&format!("g: {}\n", cert.element()));
    s.push_str(&format!("k: {}\n", cert.k()));
    for x in cert.conjugators() {
        s.push_str(&format!("x: {x}\n"));
    }
    s
}

/// Parses the `gtcert v1` format. The certificate is returned unverified;
/// call `verify` to check it. Trailing garbage and k mismatches are
/// rejected.
pub fn from_file_string(text: &str) -> Result<GtCertificate> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty certificate file".into()))?;
    if header.trim() != "gtcert v1" {
        return Err(Error::Parse(format!("bad header '{header}'")));
    }
    let group_line = expect_field(lines.next(), "group")?;
    let group = GroupSpec::parse(group_line)?;
    let g_line = expect_field(lines.next(), "g")?;
    let g = Word::parse(g_line, &group)?;
    let k_line = expect_field(lines.next(), "k")?;
    let k: usize = k_line
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad k '{k_line}'")))?;
    let mut conjugators = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let x_line = expect_field(Some(line), "x")?;
        conjugators.push(Word::parse(x_line, &group)?);
    }
    if conjugators.len() != k {
        return Err(Error::Parse(format!(
            "k is {k} but found {} conjugator lines",
            conjugators.len()
        )));
    }
    GtCertificate::new(g, conjugators)
}

fn expect_field<'a>(line: Option<&'a str>, field: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing '{field}:' line")))?;
    let line = line.trim();
    line.strip_prefix(&format!("{field}:"))
        .map(str::trim)
        .ok_or_else(|| Error::Parse(format!("expected '{field}:' line, got '{line}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(text: &str) -> GroupSpec {
        GroupSpec::parse(text).unwrap()
    }

    fn w(text: &str, g: &GroupSpec) -> Word {
        Word::parse(text, g).unwrap()
    }

    #[test]
    fn remark_identity_product() {
        // (ab)(b^2(ab)b^-2)(b(ab)b^-1) = a^3 = a in Z/2 * Z/3
        let g = group("Z/2 * Z/3");
        let ab = w("ab", &g);
        let conj = vec![g.identity(), w("b^2", &g), w("b", &g)];
        let product = evaluate_product(&ab, &conj).unwrap();
        assert_eq!(product, w("a", &g));
    }

    #[test]
    fn single_conjugate() {
        let g = group("Z/2");
        let a = w("a", &g);
        assert_eq!(evaluate_product(&a, &[g.identity()]).unwrap(), a);
    }

    #[test]
    fn telescoping_product_q4() {
        // Z/3 * Z/4, q = 4: conjugators 1, b^3, b^2, b give a^4 = a
        let g = group("Z/3 * Z/4");
        let ab = w("ab", &g);
        let conj = vec![g.identity(), w("b^3", &g), w("b^2", &g), w("b", &g)];
        let product = evaluate_product(&ab, &conj).unwrap();
        assert_eq!(product, w("a", &g).power(4));
        assert_eq!(product, w("a", &g));
    }

    #[test]
    fn verify_examples() {
        let z2 = group("Z/2");
        let mut cert = GtCertificate::new(w("a", &z2), vec![z2.identity(), z2.identity()]).unwrap();
        assert!(cert.verify().unwrap());
        assert!(cert.is_verified());

        let g = group("Z/2 * Z/3");
        let ab = w("ab", &g);
        let six = vec![
            g.identity(),
            w("b^2", &g),
            w("b", &g),
            g.identity(),
            w("b^2", &g),
            w("b", &g),
        ];
        let mut cert6 = GtCertificate::new(ab.clone(), six).unwrap();
        assert!(cert6.verify().unwrap());

        let three = vec![g.identity(), w("b^2", &g), w("b", &g)];
        let mut cert3 = GtCertificate::new(ab, three).unwrap();
        assert!(!cert3.verify().unwrap());
        assert!(!cert3.is_verified());
    }

    #[test]
    fn normalize_examples() {
        let g = group("Z/2 * Z/3");
        let ab = w("ab", &g);
        let conj = vec![
            w("b", &g),
            w("b b^2", &g),
            w("b b", &g),
            w("b", &g),
            w("b b^2", &g),
            w("b b", &g),
        ];
        let cert = GtCertificate::verified(ab, conj).unwrap();
        let norm = normalize(&cert).unwrap();
        assert!(norm.conjugators()[0].is_identity());
        assert_eq!(norm.k(), cert.k());
        let again = normalize(&norm).unwrap();
        assert_eq!(again, norm);

        let z2 = group("Z/2");
        let cert2 = GtCertificate::verified(w("a", &z2), vec![w("a", &z2), w("a", &z2)]).unwrap();
        let norm2 = normalize(&cert2).unwrap();
        assert!(norm2.conjugators().iter().all(|x| x.is_identity()));
    }

    #[test]
    fn normalize_requires_verification() {
        let z2 = group("Z/2");
        let cert = GtCertificate::new(w("a", &z2), vec![z2.identity(), z2.identity()]).unwrap();
        assert_eq!(normalize(&cert).unwrap_err(), Error::NotVerified);
    }

    #[test]
    fn search_torsion() {
        let z2 = group("Z/2");
        let outcome = search_order(
            &z2,
            &w("a", &z2),
            SearchBounds {
                max_k: 4,
                max_conj_syllables: 1,
                max_abs_exponent: 1,
            },
        )
        .unwrap();
        assert_eq!(outcome.lower_bound, Some(2));
        let cert = outcome.certificate.unwrap();
        assert_eq!(cert.k(), 2);
        assert!(cert.conjugators().iter().all(|x| x.is_identity()));
    }

    #[test]
    fn search_free_group_returns_none() {
        let free = group("Z * Z");
        let outcome = search_order(
            &free,
            &w("ab", &free),
            SearchBounds {
                max_k: 8,
                max_conj_syllables: 2,
                max_abs_exponent: 2,
            },
        )
        .unwrap();
        assert!(outcome.certificate.is_none());
        assert_eq!(outcome.lower_bound, None);
    }

    #[test]
    fn transport_examples() {
        // Z/2 * Z with g = b a b^-1 (b the Z generator is factor 1)
        let g = group("Z/2 * Z");
        let u = w("b a b^-1", &g);
        let cert = GtCertificate::verified(u, vec![g.identity(), g.identity()]).unwrap();
        let factor_cert = transport_to_factor(&cert).unwrap();
        assert_eq!(factor_cert.k(), 2);
        assert_eq!(factor_cert.group().factors(), &[FactorKind::Finite(2)]);
        assert!(factor_cert.is_verified());

        // ab in Z/2 * Z/3 is not conjugate into a factor
        let g2 = group("Z/2 * Z/3");
        let ab = w("ab", &g2);
        let six = vec![
            g2.identity(),
            w("b^2", &g2),
            w("b", &g2),
            g2.identity(),
            w("b^2", &g2),
            w("b", &g2),
        ];
        let cert6 = GtCertificate::verified(ab, six).unwrap();
        assert_eq!(
            transport_to_factor(&cert6).unwrap_err(),
            Error::NotConjugateIntoFactor
        );
    }

    #[test]
    fn file_round_trip() {
        let g = group("Z/2 * Z/3");
        let ab = w("ab", &g);
        let six = vec![
            g.identity(),
            w("b^2", &g),
            w("b", &g),
            g.identity(),
            w("b^2", &g),
            w("b", &g),
        ];
        let cert = GtCertificate::verified(ab, six).unwrap();
        let text = to_file_string(&cert);
        let mut back = from_file_string(&text).unwrap();
        assert!(back.verify().unwrap());
        assert_eq!(back.conjugators(), cert.conjugators());

        // k mismatch rejected
        let broken = text.replace("k: 6", "k: 5");
        assert!(from_file_string(&broken).is_err());
        // trailing garbage rejected
        let garbage = format!("{text}oops\n");
        assert!(from_file_string(&garbage).is_err());
    }
}
