use stringbord::builtins::load_scenario_text;
use stringbord::chart::e2_report;
use stringbord::report::Report;
use stringbord::scenario::{parse_scenario, run_scenario};
use stringbord::svg;
use stringbord_core::adams::Aliases;
use stringbord_core::ext::FreeResolution;
use stringbord_core::module::GradedModule;

fn run(name: &str) -> Report {
    let (text, origin) = load_scenario_text(&format!("builtin:{name}")).unwrap();
    run_scenario(&parse_scenario(&text, &origin).unwrap()).unwrap()
}

fn single(r: &Report, degree: i32) -> Vec<String> {
    let g = r.groups(degree);
    assert!(g.windows(2).all(|w| w[0] == w[1]), "degree {degree} differs between branches");
    g[0].clone()
}

#[test]
fn json_round_trip() {
    let r = run("het");
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn runs_are_deterministic() {
    for name in ["het", "chl"] {
        assert_eq!(run(name).to_json(), run(name).to_json(), "{name}");
    }
}

#[test]
fn svg_is_deterministic() {
    let c = FreeResolution::minimal(&GradedModule::trivial(2), 8, 20).unwrap().chart();
    let a = svg::render(&e2_report(&c, &Aliases::new(), 12));
    let b = svg::render(&e2_report(&c, &Aliases::new(), 12));
    assert_eq!(a, b);
    assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
    assert_eq!(a.matches("<circle").count(), c.bidegrees().iter().filter(|(s, t)| t - *s as i32 <= 12).map(|&(s, t)| c.dim(s, t)).sum::<usize>());
}

#[test]
fn spin_bordism() {
    let r = run("spin");
    let want = ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0", "Z^2", "Z/2 (+) Z/2", "Z/2 (+) Z/2 (+) Z/2", "0"];
    for (d, w) in want.iter().enumerate() {
        assert_eq!(single(&r, d as i32), vec![w.to_string()], "degree {d}");
    }
}

#[test]
fn het_assertions_are_checked() {
    let r = run("het");
    let witnessed = r.assertions.iter().find(|a| a.statement.contains("witnessed")).unwrap();
    assert!(witnessed.checked.as_deref().unwrap().ends_with("= 1"));
    let order2 = r.assertions.iter().find(|a| a.statement.contains("order 2")).unwrap();
    assert!(order2.checked.as_deref().unwrap().contains("h1·"));
    assert_eq!(r.combined.len(), 2);
}
