use proptest::prelude::*;
use stringbord_core::steenrod::{
    adem_reduce, admissible_form, basis, is_admissible, Algebra, MilnorMonomial, SteenrodElement,
};

const CAP: u32 = 40;

fn element(max_degree: u32) -> impl Strategy<Value = SteenrodElement> {
    (0..=max_degree).prop_flat_map(|d| {
        let b = basis(Algebra::Full { cap: CAP }, d);
        let n = b.len();
        proptest::collection::vec(any::<bool>(), n).prop_map(move |picks| {
            let terms = b
                .iter()
                .zip(picks)
                .filter(|(_, p)| *p)
                .map(|(m, _)| m.clone());
            SteenrodElement::from_terms(Algebra::Full { cap: CAP }, d, terms).unwrap()
        })
    })
}

fn fold(word: &[u32]) -> SteenrodElement {
    let alg = Algebra::Full {
        cap: word.iter().sum(),
    };
    word.iter().fold(SteenrodElement::one(alg), |acc, &a| {
        acc.multiply(&SteenrodElement::monomial(alg, MilnorMonomial::sq(a)).unwrap())
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn multiply_is_associative(a in element(13), b in element(13), c in element(13)) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn adem_matches_multiplication(word in proptest::collection::vec(1u32..=8, 0..=4)) {
        prop_assert_eq!(adem_reduce(&word), fold(&word));
        prop_assert!(admissible_form(&word).iter().all(|w| is_admissible(w)));
    }

    #[test]
    fn a2_is_closed_under_products(a in 0usize..64, b in 0usize..64) {
        let all: Vec<MilnorMonomial> = (0..=23).flat_map(|d| basis(Algebra::Sub(2), d)).collect();
        let alg = Algebra::Sub(2);
        let x = SteenrodElement::monomial(alg, all[a].clone()).unwrap();
        let y = SteenrodElement::monomial(alg, all[b].clone()).unwrap();
        let p = x.multiply(&y).unwrap();
        prop_assert!(p.terms().all(|m| m.in_subalgebra(2)));
    }
}
