//! Parameter sweep written as CSV, byte-identical for a fixed seed.

use attnrat::report::{sweep_command, Context};

const CONFIG: &str = r#"{
  "configurations": [
    {"family": "sawtooth", "n": 4},
    {"family": "sawtooth", "n": 8, "h": 2},
    {"family": "random", "n": 3, "m": 3, "ell": 1, "samples": 64},
    {"family": "random", "n": 2, "m": 2, "ell": 2, "samples": 64}
  ]
}"#;

fn main() -> attnrat::Result<()> {
    let ctx = Context {
        seed: 3,
        ..Default::default()
    };
    let first = sweep_command(CONFIG, &ctx)?;
    let second = sweep_command(CONFIG, &ctx)?;
    assert_eq!(first.text, second.text);
    print!("{}", first.text);
    Ok(())
}
