//! Randomized structural invariants, cross-checking the word calculus,
//! certificates, quasimorphisms, and the prover against their contracts.

use proptest::prelude::*;

use gentor::certificates::evaluate_product;
use gentor::presentations::prover::{
    check_derivation, free_reduce, invert_word, prove_trivial, ProveOutcome,
};
use gentor::quasimorphisms::CountingQm;
use gentor::words::{GroupSpec, Word};

fn groups() -> Vec<GroupSpec> {
    ["Z/2 * Z/3", "Z * Z", "Z/4 * Z", "Z/3 * Z/5 * Z"]
        .iter()
        .map(|s| GroupSpec::parse(s).unwrap())
        .collect()
}

#[derive(Debug, Clone)]
struct RawWord {
    group_index: usize,
    syllables: Vec<(usize, i64)>,
}

fn raw_word() -> impl Strategy<Value = RawWord> {
    (0usize..4, prop::collection::vec((0usize..3, -4i64..=4), 0..6)).prop_map(
        |(group_index, syllables)| RawWord {
            group_index,
            syllables,
        },
    )
}

fn build(raw: &RawWord) -> (GroupSpec, Word) {
    let group = groups()[raw.group_index].clone();
    let fc = group.factor_count();
    let syllables = raw
        .syllables
        .iter()
        .map(|&(f, e)| (f % fc, e))
        .collect();
    let w = group.word_from_syllables(syllables);
    (group, w)
}

proptest! {
    #[test]
    fn display_parse_roundtrip(raw in raw_word()) {
        let (group, w) = build(&raw);
        let back = Word::parse(&w.to_string(), &group).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn inverse_laws(raw1 in raw_word(), raw2 in raw_word()) {
        let (group, u) = build(&raw1);
        let (_, v) = build(&RawWord { group_index: raw1.group_index, ..raw2 });
        prop_assert!(u.multiply(&u.invert()).unwrap().is_identity());
        let uv_inv = u.multiply(&v).unwrap().invert();
        let v_inv_u_inv = v.invert().multiply(&u.invert()).unwrap();
        prop_assert_eq!(uv_inv, v_inv_u_inv);
        prop_assert_eq!(group.identity().invert(), group.identity());
    }

    #[test]
    fn multiplication_is_associative(raw1 in raw_word(), raw2 in raw_word(), raw3 in raw_word()) {
        let (_, u) = build(&raw1);
        let (_, v) = build(&RawWord { group_index: raw1.group_index, ..raw2 });
        let (_, w) = build(&RawWord { group_index: raw1.group_index, ..raw3 });
        let left = u.multiply(&v).unwrap().multiply(&w).unwrap();
        let right = u.multiply(&v.multiply(&w).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn cyclic_reduction_is_exact(raw in raw_word()) {
        let (_, w) = build(&raw);
        let (c, core) = w.cyclically_reduce();
        let rebuilt = c.multiply(&core).unwrap().multiply(&c.invert()).unwrap();
        prop_assert_eq!(rebuilt, w.clone());
        // the core does not shrink further under one cyclic step
        let (c2, core2) = core.cyclically_reduce();
        prop_assert!(c2.is_identity());
        prop_assert_eq!(core2, core);
    }

    #[test]
    fn conjugate_into_factor_is_exact(raw in raw_word()) {
        let (group, w) = build(&raw);
        if w.is_identity() {
            return Ok(());
        }
        if let Some((factor, c, e)) = w.conjugate_into_factor().unwrap() {
            let core = group.generator_power(factor, e);
            let rebuilt = c.multiply(&core).unwrap().multiply(&c.invert()).unwrap();
            prop_assert_eq!(rebuilt, w);
        }
    }

    #[test]
    fn abelianize_is_a_homomorphism(raw1 in raw_word(), raw2 in raw_word()) {
        let (group, u) = build(&raw1);
        let (_, v) = build(&RawWord { group_index: raw1.group_index, ..raw2 });
        let uv = u.multiply(&v).unwrap();
        let sum: Vec<i64> = u
            .abelianize()
            .iter()
            .zip(v.abelianize())
            .zip(group.factors())
            .map(|((&a, b), kind)| match kind {
                gentor::words::FactorKind::Finite(n) => (a + b).rem_euclid(*n as i64),
                gentor::words::FactorKind::Infinite => a + b,
            })
            .collect();
        prop_assert_eq!(uv.abelianize(), sum);
    }

    #[test]
    fn abelian_order_is_conjugation_invariant(raw1 in raw_word(), raw2 in raw_word()) {
        let (_, g) = build(&raw1);
        let (_, h) = build(&RawWord { group_index: raw1.group_index, ..raw2 });
        let conj = g.conjugate_by(&h).unwrap();
        prop_assert_eq!(conj.abelian_order(), g.abelian_order());
    }

    #[test]
    fn letter_expansion_is_antisymmetric(raw in raw_word()) {
        let (_, w) = build(&raw);
        let mut mirrored: Vec<_> = w
            .invert()
            .letters()
            .iter()
            .map(|&(f, s)| (f, -s))
            .collect();
        mirrored.reverse();
        prop_assert_eq!(w.letters(), mirrored);
    }

    #[test]
    fn product_of_conjugates_is_translation_invariant(
        raw_g in raw_word(),
        raw_h in raw_word(),
        raws in prop::collection::vec(raw_word(), 1..4),
    ) {
        let (_, g) = build(&raw_g);
        if g.is_identity() {
            return Ok(());
        }
        let (_, h) = build(&RawWord { group_index: raw_g.group_index, ..raw_h });
        let xs: Vec<Word> = raws
            .iter()
            .map(|r| build(&RawWord { group_index: raw_g.group_index, ..r.clone() }).1)
            .collect();
        let shifted: Vec<Word> = xs.iter().map(|x| h.multiply(x).unwrap()).collect();
        let plain = evaluate_product(&g, &xs).unwrap();
        let moved = evaluate_product(&g, &shifted).unwrap();
        prop_assert_eq!(moved, plain.conjugate_by(&h).unwrap());
    }

    #[test]
    fn counting_qm_is_antisymmetric(raw_w in raw_word(), raw_g in raw_word()) {
        let (_, w) = build(&raw_w);
        if w.is_identity() {
            return Ok(());
        }
        let (_, g) = build(&RawWord { group_index: raw_w.group_index, ..raw_g });
        let phi = CountingQm::with_default_bound(w).unwrap();
        prop_assert_eq!(phi.evaluate(&g.invert()).unwrap(), -phi.evaluate(&g).unwrap());
    }

    #[test]
    fn free_reduction_is_idempotent(word in prop::collection::vec((-3i32..=3).prop_filter("nonzero", |l| *l != 0), 0..12)) {
        let once = free_reduce(&word);
        prop_assert_eq!(free_reduce(&once), once.clone());
        let cancel = free_reduce(&[word.clone(), invert_word(&word)].concat());
        prop_assert!(cancel.is_empty());
    }

    #[test]
    fn prover_output_always_replays(
        conj in prop::collection::vec((-2i32..=2).prop_filter("nonzero", |l| *l != 0), 0..4),
        exp in 1usize..3,
    ) {
        // words of the form c r^e c^-1 are trivial modulo r and within
        // easy reach of the prover
        let relator: Vec<i32> = vec![1, 2, -1, -2];
        let mut word = conj.clone();
        for _ in 0..exp {
            word.extend_from_slice(&relator);
        }
        word.extend(invert_word(&conj));
        let word = free_reduce(&word);
        let relators = vec![relator];
        match prove_trivial(&word, &relators, 200_000) {
            ProveOutcome::Proved(d) => {
                prop_assert!(check_derivation(&word, &relators, &d).is_ok());
            }
            ProveOutcome::Unknown { .. } => {
                return Err(TestCaseError::fail("conjugate of relator power unproved"));
            }
        }
    }
}
