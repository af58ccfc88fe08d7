use proptest::prelude::*;
use stringbord::builtins::{load_module, load_parts, MODULES, PARTS};
use stringbord::dsl::{parse_module, serialize_module, strip_comments};
use stringbord::pipeline::{twisted_module, Model};
use stringbord_core::module::GradedModule;
use stringbord_core::steenrod::{Algebra, MilnorMonomial, SteenrodElement};

#[test]
fn builtin_modules_round_trip() {
    for (name, text) in MODULES {
        let m = parse_module(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(m.is_validated(), "{name}");
        assert_eq!(serialize_module(&m), strip_comments(text), "{name}");
    }
}

#[test]
fn builtin_blocks_match_a_fresh_decomposition() {
    let t = twisted_module(Model::WreathKz4, "c1+c2", 14).unwrap();
    let blocks = load_parts("builtin:M1-M7").unwrap().decompose(&t).unwrap();
    assert_eq!(blocks.blocks.len(), 7);
    for (name, block) in &blocks.blocks {
        let shipped = load_module(&format!("builtin:{name}")).unwrap();
        assert!(shipped.is_isomorphic(block), "{name}");
        assert_eq!(&serialize_module(&shipped), &serialize_module(block), "{name}");
    }
}

#[test]
fn joker_is_cyclic() {
    let sq3 = SteenrodElement::monomial(Algebra::Sub(1), MilnorMonomial::sq(3)).unwrap();
    let cyclic = GradedModule::cyclic(1, "A(1)/A(1)Sq3", &[sq3]).unwrap();
    assert!(load_module("builtin:J").unwrap().is_isomorphic(&cyclic));
}

#[test]
fn abp_is_the_sum_of_its_parts() {
    let f2 = GradedModule::trivial(1);
    let j = load_module("builtin:mod.J").unwrap();
    let sum = f2.direct_sum(&f2.suspend(8)).unwrap().direct_sum(&j.suspend(10)).unwrap().validate().unwrap();
    assert!(load_module("builtin:ABP").unwrap().is_isomorphic(&sum));
}

#[test]
fn parts_files_parse() {
    for (name, _) in PARTS {
        load_parts(&format!("builtin:{name}")).unwrap();
    }
}

#[test]
fn chl_twist_is_untwisted_mod_two() {
    let a = twisted_module(Model::Kz4, "2c", 14).unwrap();
    let b = twisted_module(Model::Kz4, "0", 14).unwrap();
    assert!(a.is_isomorphic(&b));
    let c = twisted_module(Model::Kz4, "c", 14).unwrap();
    assert!(!c.is_isomorphic(&b));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shifted_and_truncated_modules_round_trip(pick in 0usize..13, k in -4i32..8, cut in 0i32..14) {
        let m = load_module(&format!("builtin:{}", MODULES[pick].0)).unwrap();
        let m = m.suspend(k).truncate_above(cut + k);
        let text = serialize_module(&m);
        let back = parse_module(&text).unwrap();
        prop_assert_eq!(serialize_module(&back), text);
        prop_assert!(back.is_isomorphic(&m));
    }
}
