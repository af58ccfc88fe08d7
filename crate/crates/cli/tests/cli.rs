use std::process::Command;

fn stringbord(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stringbord")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn scenario(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, err) = stringbord(&["resolve", "--module", "no/such/file.mod"]);
    assert_eq!(code, 1);
    assert!(err.contains("no/such/file.mod"));
}

#[test]
fn contradictory_assertions_exit_2() {
    let f = scenario(
        "smax 6\ntmax 18\nstems 10\nreport 9\n\
         decompose T = twist wreath-kz4 \"c1+c2\" cap 14 parts builtin:M1-M7\n\
         sequence Q {\n  summand T.M2\n  summand T.M4\n  summand T.M5\n  summand T.M7\n\
           alias a = (0,8,0)\n  alias p1 = (0,1,0)\n\
           assert d2 a -> 0 because \"first\"\n\
           assert d2 a -> h2^2 p1 because \"second\"\n}\n",
    );
    let (code, _, err) = stringbord(&["adams", f.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn scenario_syntax_errors_name_the_line() {
    let f = scenario("smax 6\nsequence s {\n  summand builtin:F2\n  assert tower x(0,0,0)\n}\n");
    let (code, _, err) = stringbord(&["adams", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains(":4:"), "{err}");
}

#[test]
fn module_errors_carry_positions() {
    let f = scenario("module M over A(2) {\n  class a : 0;\n  class b : 1;\n  action { Sq1 a = c; }\n}\n");
    let (code, _, err) = stringbord(&["resolve", "--module", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains(":4:"), "{err}");
}

#[test]
fn resolve_f2_over_a0_is_a_tower() {
    let (code, out, _) = stringbord(&["resolve", "--module", "builtin:F2", "--algebra", "A0", "--smax", "6", "--tmax", "8", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 7);
    assert!(cells.iter().all(|c| c["stem"] == 0 && c["classes"].as_array().unwrap().len() == 1));
}

#[test]
fn twist_emits_parseable_module_text() {
    let (code, out, _) = stringbord(&["twist", "--model", "kz4", "--mu", "0", "--cap", "12"]);
    assert_eq!(code, 0);
    stringbord::dsl::parse_module(&out).unwrap();
    let (code, out, _) = stringbord(&["twist", "--model", "kz4", "--mu", "2c", "--compare-untwisted"]);
    assert_eq!(code, 0);
    assert!(out.contains("isomorphic to the untwisted module: yes"));
}

#[test]
fn cap_above_the_model_limit_is_rejected() {
    let (code, _, err) = stringbord(&["twist", "--model", "kz4", "--mu", "0", "--cap", "15"]);
    assert_eq!(code, 1);
    assert!(err.contains("14"));
}

#[test]
fn out_and_chart_render() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c2.json");
    let (code, _, _) = stringbord(&["resolve", "--module", "builtin:C2", "--smax", "8", "--tmax", "20", "--format", "json", "--out", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, a, _) = stringbord(&["chart-render", json.to_str().unwrap(), "--format", "svg"]);
    assert_eq!(code, 0);
    let (_, b, _) = stringbord(&["resolve", "--module", "builtin:C2", "--smax", "8", "--tmax", "20", "--format", "svg"]);
    assert_eq!(a, b);
}

#[test]
fn basis_adem_charnum() {
    let (_, out, _) = stringbord(&["basis", "--algebra", "A2"]);
    assert!(out.ends_with("dim A(2) = 64\n"));
    let (_, out, _) = stringbord(&["adem", "Sq2", "Sq2"]);
    assert!(out.contains("Sq^3 Sq^1"));
    let (_, out, _) = stringbord(&["charnum", "--ring", "hp2", "--expr", "cP*cQ"]);
    assert!(out.trim_end().ends_with("= 2"));
}
