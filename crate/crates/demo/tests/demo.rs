use coset_qldpc_demo::{certify_report, decode_report, preset_names, preset_text};

#[test]
fn presets_load_and_certify() {
    assert!(preset_names().contains(&"(3,6) F7"));
    let text = preset_text("(3,8) F9").unwrap();
    let rep = certify_report(&text, 6).unwrap();
    assert!(!rep.contains("FAIL"), "{rep}");
    assert!(rep.contains("params [[72,22]]"), "{rep}");
    assert!(rep.contains("D 6 verdict accepted"), "{rep}");
    assert!(rep.contains("D 7 verdict rejected"), "{rep}");
}

#[test]
fn broken_coefficients_fail_a_certificate() {
    let text = preset_text("(3,6) F7").unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let a0 = lines.iter().position(|l| l.starts_with("a0")).unwrap();
    let b0 = lines.iter().position(|l| l.starts_with("b0")).unwrap();
    lines[a0] = lines[b0].replacen("b0", "a0", 1);
    let rep = certify_report(&lines.join("\n"), 0);
    match rep {
        Ok(r) => assert!(r.contains("FAIL"), "{r}"),
        Err(e) => assert!(!e.is_empty()),
    }
    assert!(certify_report("garbage", 0).is_err());
}

#[test]
fn decode_is_reproducible() {
    let a = decode_report("(3,6) F7", 0.05, 3).unwrap();
    assert_eq!(a, decode_report("(3,6) F7", 0.05, 3).unwrap());
    assert!(a.contains("verdict"));
    let clean = decode_report("(3,6) F7", 0.0, 1).unwrap();
    assert!(clean.contains("verdict Success"), "{clean}");
    assert!(decode_report("nope", 0.05, 1).is_err());
}
