//! Randomized invariants of types, substitutions, precision, printing
//! and the program generator.

use proptest::prelude::*;

use gradualhm::frontend::{parse_dti, parse_itgl, parse_type, print_dti, print_itgl, PrintOptions};
use gradualhm::harness::{generate_well_typed, SubstVocabulary};
use gradualhm::infer::infer_principal;
use gradualhm::pipeline::compile_term;
use gradualhm::precision::{infer_prec_subst, type_prec};
use gradualhm::{consistent, BaseType, GradualType, TyVar, TypeSubstitution};

const VARS: [&str; 3] = ["X", "Y", "Z"];

fn leaf(with_dyn: bool, with_vars: bool) -> BoxedStrategy<GradualType> {
    let mut leaves: Vec<BoxedStrategy<GradualType>> =
        vec![Just(GradualType::Base(BaseType::Int)).boxed(), Just(GradualType::Base(BaseType::Bool)).boxed()];
    if with_dyn {
        leaves.push(Just(GradualType::Dyn).boxed());
    }
    if with_vars {
        leaves.push(proptest::sample::select(&VARS[..]).prop_map(GradualType::var).boxed());
    }
    proptest::strategy::Union::new(leaves).boxed()
}

/// Types with at most `depth` nested arrows.
fn ty(depth: u32, with_dyn: bool, with_vars: bool) -> BoxedStrategy<GradualType> {
    leaf(with_dyn, with_vars)
        .prop_recursive(depth, 16, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| GradualType::arrow(a, b)))
        .boxed()
}

fn nesting(t: &GradualType) -> usize {
    match t {
        GradualType::Arrow(a, b) => 1 + nesting(a).max(nesting(b)),
        _ => 0,
    }
}

fn static_subst(vars: &[TyVar]) -> impl Strategy<Value = TypeSubstitution> {
    let vars = vars.to_vec();
    proptest::collection::vec(ty(2, false, false), vars.len()).prop_map(move |ts| {
        let mut s = TypeSubstitution::empty();
        for (x, t) in vars.iter().zip(ts) {
            s.insert(x.clone(), t);
        }
        s
    })
}

/// Every static substitution for `vars` whose types nest at most `depth` arrows.
fn all_substs(vars: &[TyVar], depth: usize) -> Vec<TypeSubstitution> {
    let types: Vec<GradualType> = SubstVocabulary::standard(3).types().into_iter().filter(|t| nesting(t) <= depth).collect();
    let mut out = vec![TypeSubstitution::empty()];
    for x in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                types.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(x.clone(), t.clone());
                    s
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn consistency_is_reflexive_and_symmetric(a in ty(3, true, true), b in ty(3, true, true)) {
        prop_assert!(consistent(&a, &a));
        prop_assert_eq!(consistent(&a, &b), consistent(&b, &a));
    }

    #[test]
    fn static_substitution_preserves_consistency(
        (a, b, s) in (ty(3, true, true), ty(3, true, true))
            .prop_flat_map(|(a, b)| {
                let vars: Vec<TyVar> = VARS.iter().map(|x| TyVar::new(*x)).collect();
                (Just(a), Just(b), static_subst(&vars))
            })
    ) {
        if consistent(&a, &b) {
            prop_assert!(consistent(&s.apply(&a), &s.apply(&b)));
        }
    }

    #[test]
    fn types_print_and_parse_back(t in ty(4, true, true)) {
        prop_assert_eq!(parse_type(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn least_precision_substitution_matches_brute_force(u in ty(2, true, false), u2 in ty(2, true, true)) {
        let vars = u2.ftv_ordered();
        let witnesses: Vec<TypeSubstitution> =
            all_substs(&vars, 2).into_iter().filter(|s| type_prec(&u, &u2, s)).collect();
        match infer_prec_subst(&u, &u2) {
            Ok(s) => {
                prop_assert!(type_prec(&u, &u2, &s), "{} is not a witness", s);
                // every witness agrees with the least one where it is defined
                for w in &witnesses {
                    for (x, t) in s.iter() {
                        prop_assert_eq!(w.get(x), Some(t));
                    }
                }
                if s.domain().count() == vars.len() {
                    prop_assert!(!witnesses.is_empty());
                }
            }
            Err(_) => prop_assert!(witnesses.is_empty(), "missed witness {}", witnesses[0]),
        }
    }

    #[test]
    fn precision_against_a_static_type_is_equality(
        (u, u2, s) in ty(2, true, true)
            .prop_flat_map(|u2| {
                let vars: Vec<TyVar> = VARS.iter().map(|x| TyVar::new(*x)).collect();
                (ty(2, true, false), Just(u2), static_subst(&vars))
            })
    ) {
        if u2.is_static() && type_prec(&u, &u2, &s) {
            prop_assert_eq!(u, s.apply(&u2));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_programs_are_well_typed_and_print_back(seed in any::<u64>(), size in 0usize..25) {
        let e = generate_well_typed(seed, size).unwrap();
        prop_assert!(infer_principal(&[], &e).is_ok());
        let printed = print_itgl(&e, PrintOptions::default());
        prop_assert_eq!(parse_itgl(&printed).unwrap(), e.clone(), "{}", printed);
        let f = compile_term(&e).unwrap().translation.term;
        let printed = print_dti(&f, PrintOptions::default());
        prop_assert_eq!(parse_dti(&printed).unwrap(), f, "{}", printed);
    }
}
