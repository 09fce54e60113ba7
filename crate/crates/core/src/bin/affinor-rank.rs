fn main() {
    std::process::exit(affinor_rank::cli::run(std::env::args_os()));
}
