//! Prints the built-in taxonomy as JSON (regenerates `data/default_taxonomy.json`).
fn main() {
    print!("{}", creamkit::default_taxonomy().to_json());
}
