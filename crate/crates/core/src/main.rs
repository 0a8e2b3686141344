fn main() {
    std::process::exit(jl_lsh::cli::run(std::env::args_os()));
}
