//! Reading, checking and writing system files. The slope `p/q` is
//! conserved because drift and noise are both radial.

use sdefi::cli::{parse_system_str, serialize_system};
use sdefi::ito::check_weak;

const SRC: &str = r#"{
  "dim": 2,
  "var_names": ["p", "q"],
  "drift": ["p", "q"],
  "diffusion": [["1/2*p", "1/2*q"]],
  "candidates": {"slope": "p*q^-1"}
}"#;

fn main() -> sdefi::Result<()> {
    let loaded = parse_system_str(SRC)?;
    for (name, phi) in &loaded.candidates {
        let v = check_weak(&loaded.system, phi)?;
        println!("{name} = {}: weak {}", loaded.system.poly_text(phi), if v.holds { "holds" } else { "fails" });
    }
    let canonical = serialize_system(&loaded);
    assert_eq!(serialize_system(&parse_system_str(&canonical)?), canonical);
    println!("{canonical}");

    match parse_system_str(r#"{"dim": 1, "drift": [[{"c": "0.5", "e": [1]}]]}"#) {
        Ok(_) => println!("unexpectedly accepted a decimal"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
