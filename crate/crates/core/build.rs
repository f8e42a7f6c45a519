fn main() {
    // LAPACK/BLAS provider for ndarray-linalg; the Debian openblas package
    // bundles the full LAPACK interface.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
