//! Prints the built-in field-to-macro-field map in its file form.
//!
//! Regenerate the shipped copy with:
//! `cargo run -p qualimetrics-core --example dump_macro_map > data/field_macro_map.csv`

fn main() {
    print!("{}", qualimetrics_core::sampling::MacroMap::builtin_csv());
}
