//! Writes a system back in the input format; `parse_system` reads it back
//! to the same model.

use std::fmt::Write;

use nilcenter_core::system::SystemModel;

pub fn print_system(s: &SystemModel) -> String {
    let mut out = String::new();
    if !s.params().is_empty() {
        let names: Vec<&str> = s.params().iter().map(|p| &**p).collect();
        writeln!(out, "params {};", names.join(", ")).unwrap();
    }
    writeln!(out, "order {};", s.order()).unwrap();
    for (name, f) in ["dx", "dy", "dz"].iter().zip(s.fields()) {
        writeln!(out, "{} = {};", name, f).unwrap();
    }
    out
}
