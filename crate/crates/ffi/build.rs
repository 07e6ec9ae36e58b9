fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(format!("{crate_dir}/include/stn_sim.h"));
        }
        Err(e) => {
            // header generation must not break plain `cargo build` in
            // environments without a working cbindgen setup
            println!("cargo:warning=cbindgen skipped: {e}");
        }
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
