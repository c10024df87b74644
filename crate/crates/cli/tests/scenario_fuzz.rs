use descent_cli::scenario::{resolve, Overrides, Scenario};
use proptest::prelude::*;

const VALID: &str = "{\"schema\": 1, \"name\": \"x\", \"spacetimes\": [{\"backend\": \"cylinder\", \"circumference\": 5, \"window\": [0, 4]}], \"checks\": [\"kg.time-slice\"]}";

proptest! {
    #[test]
    fn arbitrary_text_never_panics(s in ".{0,200}") {
        let _ = Scenario::parse(&s);
    }

    #[test]
    fn every_prefix_of_a_valid_file_is_rejected_or_resolves(cut in 0usize..VALID.len()) {
        if let Ok(s) = Scenario::parse(&VALID[..cut]) {
            prop_assert!(resolve(s, &Overrides::default()).is_ok());
        }
    }
}

#[test]
fn valid_file_resolves() {
    let r = resolve(Scenario::parse(VALID).unwrap(), &Overrides::default()).unwrap();
    assert_eq!(r.spacetimes.len(), 1);
    assert_eq!(r.config_json()["checks"][0], "kg.time-slice");
}
