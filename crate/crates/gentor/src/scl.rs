//! Stable-commutator-length bounds and the decision gates built on them:
//! the certificate upper bound (k-2)/(2k), the infinite-abelian-order
//! gate, the torsion-free free-product gate via Chen's scl >= 1/2 theorem,
//! and the classification pipeline combining them with bounded search.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::certificates::{search_order, GtCertificate, SearchBounds, SearchOutcome};
use crate::error::{Error, Result};
use crate::quasimorphisms::{bavard_lower, format_rational, CountingQm, SclLower};
use crate::words::{FactorKind, GroupSpec, Word};

/// A nonnegative rational bound, possibly infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Finite(BigRational),
    Infinite,
}

impl Bound {
    pub fn render(&self) -> String {
        match self {
            Bound::Finite(r) => format_rational(r),
            Bound::Infinite => "inf".to_string(),
        }
    }
}

/// Aggregated scl bounds with their provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SclBounds {
    pub lower: Bound,
    pub upper: Bound,
    pub provenance: Vec<String>,
}

/// Why an element is not a generalized torsion element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    /// No power lies in the commutator subgroup (scl infinite).
    InfiniteAbelianOrder,
    /// Not conjugate into a factor over torsion-free factors, so
    /// scl >= 1/2 (Chen) while generalized torsion forces scl < 1/2.
    ChenSclGap,
    /// Conjugate into an infinite-cyclic (hence bi-orderable) factor.
    BiorderableFactor,
}

impl Reason {
    pub fn tag(&self) -> &'static str {
        match self {
            Reason::InfiniteAbelianOrder => "infinite-abelian-order",
            Reason::ChenSclGap => "chen-scl-gap",
            Reason::BiorderableFactor => "biorderable-factor",
        }
    }
}

/// Outcome of the classification pipeline.
#[derive(Debug, Clone)]
pub enum Verdict {
    Torsion {
        order: u64,
        certificate: GtCertificate,
    },
    GtFound(GtCertificate),
    NotGt(Reason),
    Unknown(SclBounds),
}

/// `(k-2)/(2k)` for a verified certificate of order witness k. Always
/// strictly below 1/2.
pub fn upper_from_certificate(cert: &GtCertificate) -> Result<BigRational> {
    if !cert.is_verified() {
        return Err(Error::NotVerified);
    }
    let k = cert.k() as i64;
    Ok(BigRational::new(BigInt::from(k - 2), BigInt::from(2 * k)))
}

/// Fires when no power of `g` lies in the commutator subgroup, which
/// rules out any product-of-conjugates identity.
pub fn infinite_order_gate(g: &Word) -> Result<Option<Reason>> {
    if g.is_identity() {
        return Err(Error::TrivialInput);
    }
    Ok(match g.abelian_order() {
        None => Some(Reason::InfiniteAbelianOrder),
        Some(_) => None,
    })
}

/// Over all-torsion-free factors every nontrivial element is excluded:
/// either it is not conjugate into a factor (scl >= 1/2, incompatible
/// with the certificate upper bound) or it lands in a bi-orderable
/// infinite-cyclic factor. The gate is a hard precondition error when a
/// finite-cyclic factor is present.
pub fn chen_gate(group: &GroupSpec, g: &Word) -> Result<Reason> {
    if !group.all_torsion_free() {
        return Err(Error::Precondition(
            "scl gap gate requires all factors torsion-free".into(),
        ));
    }
    if g.is_identity() {
        return Err(Error::TrivialInput);
    }
    Ok(match g.conjugate_into_factor()? {
        None => Reason::ChenSclGap,
        Some(_) => Reason::BiorderableFactor,
    })
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Classification pipeline, first hit wins: infinite-order gate, scl gap
/// gate (torsion-free groups), torsion detection in finite-cyclic
/// factors, bounded certificate search, and finally honest bounds.
pub fn classify(
    group: &GroupSpec,
    g: &Word,
    search: SearchBounds,
    family: &[CountingQm],
    n: i64,
) -> Result<Verdict> {
    if g.is_identity() {
        return Err(Error::TrivialInput);
    }
    if let Some(reason) = infinite_order_gate(g)? {
        return Ok(Verdict::NotGt(reason));
    }
    if group.all_torsion_free() {
        return Ok(Verdict::NotGt(chen_gate(group, g)?));
    }
    if let Some((factor, _, exp)) = g.conjugate_into_factor()? {
        if let FactorKind::Finite(order) = group.factors()[factor] {
            let torsion_order = order / gcd_u64(order, exp.unsigned_abs());
            let conjugators = vec![group.identity(); torsion_order as usize];
            let certificate = GtCertificate::verified(g.clone(), conjugators)?;
            return Ok(Verdict::Torsion {
                order: torsion_order,
                certificate,
            });
        }
    }
    let outcome = search_order(group, g, search)?;
    if let Some(cert) = outcome.certificate {
        return Ok(Verdict::GtFound(cert));
    }
    Ok(Verdict::Unknown(bounds_from_parts(
        g,
        family,
        n,
        None,
        Some(&outcome),
    )?))
}

/// Assembles scl bounds: lower from the quasimorphism family, upper from
/// the best known certificate (infinite when none is known).
pub fn bounds(
    group: &GroupSpec,
    g: &Word,
    family: &[CountingQm],
    search: SearchBounds,
    n: i64,
) -> Result<SclBounds> {
    if g.is_identity() {
        return Err(Error::TrivialInput);
    }
    let outcome = search_order(group, g, search)?;
    let cert = outcome.certificate.clone();
    bounds_from_parts(g, family, n, cert.as_ref(), Some(&outcome))
}

fn bounds_from_parts(
    g: &Word,
    family: &[CountingQm],
    n: i64,
    cert: Option<&GtCertificate>,
    outcome: Option<&SearchOutcome>,
) -> Result<SclBounds> {
    let mut provenance = Vec::new();
    let lower = match bavard_lower(g, family, n)? {
        SclLower::Infinite => {
            provenance.push("lower: infinite-abelian-order".to_string());
            Bound::Infinite
        }
        SclLower::Finite(r) => {
            provenance.push(format!("lower: quasimorphism-family({})", family.len()));
            Bound::Finite(r)
        }
    };
    let upper = match (&lower, cert) {
        (Bound::Infinite, _) => {
            provenance.push("upper: infinite-abelian-order".to_string());
            Bound::Infinite
        }
        (_, Some(c)) => {
            provenance.push(format!("upper: certificate-k({})", c.k()));
            Bound::Finite(upper_from_certificate(c)?)
        }
        (_, None) => {
            if let Some(o) = outcome {
                provenance.push(format!(
                    "upper: none (searched k<={} conj-len<={} exp<={})",
                    o.bounds.max_k, o.bounds.max_conj_syllables, o.bounds.max_abs_exponent
                ));
            } else {
                provenance.push("upper: none".to_string());
            }
            Bound::Infinite
        }
    };
    if let (Bound::Finite(lo), Bound::Finite(up)) = (&lower, &upper) {
        if lo > up {
            return Err(Error::DefectViolation(format!(
                "scl lower bound {} exceeds upper bound {}: some configured defect bound is wrong",
                format_rational(lo),
                format_rational(up)
            )));
        }
    }
    Ok(SclBounds {
        lower,
        upper,
        provenance,
    })
}

/// Single-line certificate rendering used inside verdict serialization.
pub fn render_certificate_inline(cert: &GtCertificate) -> String {
    let xs: Vec<String> = cert.conjugators().iter().map(|x| x.to_string()).collect();
    format!("g={} k={} x={}", cert.element(), cert.k(), xs.join(","))
}

/// Line-oriented verdict serialization for machine mode.
pub fn render_verdict(verdict: &Verdict) -> String {
    match verdict {
        Verdict::Torsion { order, certificate } => format!(
            "verdict: Torsion\norder: {order}\ncert: {}\n",
            render_certificate_inline(certificate)
        ),
        Verdict::GtFound(cert) => format!(
            "verdict: GTFound\ncert: {}\n",
            render_certificate_inline(cert)
        ),
        Verdict::NotGt(reason) => format!("verdict: NotGT\nreason: {}\n", reason.tag()),
        Verdict::Unknown(bounds) => format!(
            "verdict: Unknown\nscl_lower: {}\nscl_upper: {}\n",
            bounds.lower.render(),
            bounds.upper.render()
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasimorphisms::{default_family, rational};

    fn group(text: &str) -> GroupSpec {
        GroupSpec::parse(text).unwrap()
    }

    fn w(text: &str, g: &GroupSpec) -> Word {
        Word::parse(text, g).unwrap()
    }

    fn small_search() -> SearchBounds {
        SearchBounds {
            max_k: 6,
            max_conj_syllables: 1,
            max_abs_exponent: 2,
        }
    }

    #[test]
    fn upper_bound_formula() {
        let z2 = group("Z/2");
        let c2 = GtCertificate::verified(w("a", &z2), vec![z2.identity(); 2]).unwrap();
        assert_eq!(upper_from_certificate(&c2).unwrap(), rational(0, 1));

        let z3 = group("Z/3");
        let c3 = GtCertificate::verified(w("a", &z3), vec![z3.identity(); 3]).unwrap();
        assert_eq!(upper_from_certificate(&c3).unwrap(), rational(1, 6));

        let g = group("Z/2 * Z/3");
        let c6 = GtCertificate::verified(
            w("ab", &g),
            vec![
                g.identity(),
                w("b^2", &g),
                w("b", &g),
                g.identity(),
                w("b^2", &g),
                w("b", &g),
            ],
        )
        .unwrap();
        assert_eq!(upper_from_certificate(&c6).unwrap(), rational(1, 3));
        assert!(upper_from_certificate(&c6).unwrap() < rational(1, 2));
    }

    #[test]
    fn infinite_order_gate_cases() {
        let free = group("Z * Z");
        assert_eq!(
            infinite_order_gate(&w("a", &free)).unwrap(),
            Some(Reason::InfiniteAbelianOrder)
        );
        assert_eq!(infinite_order_gate(&w("abAB", &free)).unwrap(), None);
        let g = group("Z/2 * Z/3");
        assert_eq!(infinite_order_gate(&w("ab", &g)).unwrap(), None);
    }

    #[test]
    fn chen_gate_cases() {
        let free = group("Z * Z");
        assert_eq!(
            chen_gate(&free, &w("abab^-1", &free)).unwrap(),
            Reason::ChenSclGap
        );
        assert_eq!(
            chen_gate(&free, &w("ba^3b^-1", &free)).unwrap(),
            Reason::BiorderableFactor
        );
        let g = group("Z/2 * Z/3");
        assert!(matches!(
            chen_gate(&g, &w("ab", &g)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn classify_torsion() {
        let z2 = group("Z/2");
        let family = default_family(&z2);
        match classify(&z2, &w("a", &z2), small_search(), &family, 64).unwrap() {
            Verdict::Torsion { order, certificate } => {
                assert_eq!(order, 2);
                assert!(certificate.is_verified());
            }
            other => panic!("expected Torsion, got {other:?}"),
        }
    }

    #[test]
    fn classify_gt_found() {
        let g = group("Z/2 * Z/3");
        let family = default_family(&g);
        match classify(&g, &w("ab", &g), small_search(), &family, 64).unwrap() {
            Verdict::GtFound(cert) => assert_eq!(cert.k(), 6),
            other => panic!("expected GTFound, got {other:?}"),
        }
    }

    #[test]
    fn classify_free_group_not_gt() {
        let free = group("Z * Z");
        let family = default_family(&free);
        match classify(&free, &w("abAB", &free), small_search(), &family, 64).unwrap() {
            Verdict::NotGt(reason) => assert_eq!(reason, Reason::ChenSclGap),
            other => panic!("expected NotGT, got {other:?}"),
        }
        match classify(&free, &w("a", &free), small_search(), &family, 64).unwrap() {
            Verdict::NotGt(reason) => assert_eq!(reason, Reason::InfiniteAbelianOrder),
            other => panic!("expected NotGT, got {other:?}"),
        }
    }

    #[test]
    fn bounds_for_ab() {
        let g = group("Z/2 * Z/3");
        let family = default_family(&g);
        let search = SearchBounds {
            max_k: 6,
            max_conj_syllables: 1,
            max_abs_exponent: 2,
        };
        let b = bounds(&g, &w("ab", &g), &family, search, 64).unwrap();
        assert_eq!(b.upper, Bound::Finite(rational(1, 3)));
        match &b.lower {
            Bound::Finite(lo) => assert!(lo >= &rational(0, 1) && lo <= &rational(1, 3)),
            Bound::Infinite => panic!("finite lower expected"),
        }
    }

    #[test]
    fn bounds_infinite_order() {
        let free = group("Z * Z");
        let family = default_family(&free);
        let b = bounds(&free, &w("a", &free), &family, small_search(), 64).unwrap();
        assert_eq!(b.lower, Bound::Infinite);
        assert_eq!(b.upper, Bound::Infinite);
    }

    #[test]
    fn verdict_rendering() {
        let free = group("Z * Z");
        let v = Verdict::NotGt(Reason::ChenSclGap);
        assert_eq!(render_verdict(&v), "verdict: NotGT\nreason: chen-scl-gap\n");
        let _ = free;
    }
}
