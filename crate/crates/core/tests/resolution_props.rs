use proptest::prelude::*;
use stringbord_core::ext::{h_products_by_lifting, ExtChart, FreeResolution};
use stringbord_core::module::GradedModule;

fn two_cell(name: &str, n: u8, top: i32) -> GradedModule {
    let g = match top {
        1 => 0,
        2 => 1,
        4 => 2,
        _ => unreachable!(),
    };
    GradedModule::from_parts(name, n, &[("a".into(), 0), ("b".into(), top)], &[(g, 0, 0, vec![0])])
        .unwrap()
        .validate()
        .unwrap()
}

fn samples() -> Vec<GradedModule> {
    vec![GradedModule::trivial(2), two_cell("C2", 2, 1), two_cell("Ceta", 2, 2), two_cell("Cnu", 2, 4)]
}

fn same_window(a: &ExtChart, b: &ExtChart, s_max: usize, t_max: i32) -> bool {
    (0..=s_max).all(|s| (0..=t_max).all(|t| a.dim(s, t) == b.dim(s, t)))
        && (0..s_max).all(|s| {
            (0..=t_max).all(|t| (0..3).all(|i| t + (1 << i) > t_max || a.h_matrix(i, s, t) == b.h_matrix(i, s, t)))
        })
}

#[test]
fn resolutions_are_exact_and_minimal() {
    for m in samples() {
        FreeResolution::minimal(&m, 8, 20).unwrap().verify().unwrap();
    }
}

#[test]
fn enlarging_the_window_changes_nothing_inside_it() {
    for m in samples() {
        let small = FreeResolution::minimal(&m, 5, 16).unwrap().chart();
        let big = FreeResolution::minimal(&m, 8, 22).unwrap().chart();
        assert!(same_window(&small, &big, 5, 16), "{}", m.name());
    }
}

#[test]
fn coefficient_rule_matches_lifting() {
    let p = FreeResolution::minimal(&GradedModule::trivial(2), 2, 16).unwrap();
    for m in samples().into_iter().take(3) {
        let r = FreeResolution::minimal(&m, 6, 16).unwrap();
        let c = r.chart();
        for s in 0..6 {
            let lifted = h_products_by_lifting(&r, &p, s).unwrap();
            for i in 0..3 {
                for (j, &t) in r.generators(s).iter().enumerate() {
                    if t + (1 << i) <= 16 {
                        assert_eq!(lifted[i][j], c.products[i][s][j], "{} h{i} s={s} class {j}", m.name());
                    }
                }
            }
        }
    }
}

#[test]
fn change_of_rings_from_a0() {
    let m = GradedModule::trivial(0).induce(2).unwrap();
    assert_eq!(m.total_dim(), 32);
    let c = FreeResolution::minimal(&m, 12, 24).unwrap().chart();
    for s in 0..=12 {
        for t in 0..=24 {
            assert_eq!(c.dim(s, t), usize::from(t == s as i32), "(s,t) = ({s},{t})");
        }
    }
    for s in 0..12 {
        assert_eq!(c.products[0][s][0], vec![0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn suspension_shifts_the_chart(k in -3i32..6, pick in 0usize..4) {
        let m = samples()[pick].clone();
        let a = FreeResolution::minimal(&m, 4, 12).unwrap().chart();
        let b = FreeResolution::minimal(&m.suspend(k), 4, 12 + k).unwrap().chart();
        for s in 0..=4 {
            for t in -3..=12 {
                prop_assert_eq!(a.dim(s, t), b.dim(s, t + k));
            }
        }
    }

    #[test]
    fn direct_sums_add(i in 0usize..4, j in 0usize..4, k in 0i32..4) {
        let (x, y) = (samples()[i].clone(), samples()[j].suspend(k));
        let sum = x.direct_sum(&y).unwrap().validate().unwrap();
        let cs = FreeResolution::minimal(&sum, 4, 14).unwrap().chart();
        let cx = FreeResolution::minimal(&x, 4, 14).unwrap().chart();
        let cy = FreeResolution::minimal(&y, 4, 14).unwrap().chart();
        for s in 0..=4 {
            for t in 0..=14 {
                prop_assert_eq!(cs.dim(s, t), cx.dim(s, t) + cy.dim(s, t));
            }
        }
    }
}
