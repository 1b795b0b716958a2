fn main() {
    let env = std::env::var(aplab_cli::PRECISION_ENV).ok();
    std::process::exit(aplab_cli::run(std::env::args_os(), env.as_deref()));
}
