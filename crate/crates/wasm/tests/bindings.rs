use ruq_wasm::{ext_report, normal_basis, resolution};

#[test]
fn ext_of_re_q() {
    let v = ext_report("1,2,3", "atomic:1:1", 2).unwrap();
    assert_eq!(v["ext"], serde_json::json!([0, 1, 0]));
    assert_eq!(v["lim"], serde_json::json!([0, 1, 0]));
    assert_eq!(v["agree"], true);
}

#[test]
fn ext_rejects_bad_input() {
    assert!(ext_report("2,4", "regular", 2).is_err());
    assert!(ext_report("divisors:12", "nope", 2).is_err());
    assert!(ext_report("divisors:360", "regular", 3).unwrap_err().contains("matrix entries"));
}

#[test]
fn normal_basis_scaled_and_unscaled() {
    let v = normal_basis("divisors:60", false).unwrap();
    assert_eq!(v["isomorphism"], true);
    assert_eq!(v["levels"].as_array().unwrap().len(), 12);
    let u = normal_basis("divisors:4", true).unwrap();
    assert_eq!(u["isomorphism"], false);
    assert!(u["violations"][0].as_str().unwrap().contains("naturality"));
}

#[test]
fn resolution_over_three_primes() {
    let v = resolution("2,3,5", 3).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["convention"], "OneBased");
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 2);
    assert!(v["witnesses"].as_array().unwrap().iter().all(|w| w["nontrivial"] == true));
    assert!(resolution("2,x", 2).is_err());
}
