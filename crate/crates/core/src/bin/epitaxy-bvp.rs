fn main() {
    std::process::exit(epitaxy_bvp::cli::main_with_args(std::env::args_os()));
}
