//! Holds the acceptance target only; see tests/acceptance.rs. It lives in its
//! own package so that `cargo test --workspace` reaches it after every other
//! suite has run.
