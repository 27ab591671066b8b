//! Acceptance suite for the workspace. The checks live in
//! `tests/acceptance.rs`; run them with `cargo test -p palo-verify`.
//!
//! The suite drives the `palo` binary, which `cargo test --workspace` builds
//! alongside it. Set `PALO_BIN` to use a binary elsewhere.
