use std::env;
use std::fs;
use std::path::PathBuf;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("set by cargo"));
    let out_dir = PathBuf::from(env::var("OUT_DIR").expect("set by cargo"));

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml parses");
    let mut generated = Vec::new();
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation succeeds")
        .write(&mut generated);

    // The freshly generated header lands in OUT_DIR for the drift test; the
    // committed copy is only rewritten when its content changed, so normal
    // builds do not touch the source tree.
    fs::write(out_dir.join("resopt.h"), &generated).expect("OUT_DIR is writable");
    let committed = crate_dir.join("include/resopt.h");
    if fs::read(&committed).ok().as_deref() != Some(generated.as_slice()) {
        fs::write(&committed, &generated).expect("include/ is writable");
    }
}
