fn main() {
    std::process::exit(affine_gn::cli::run());
}
