fn main() {
    frac_cli::init_logging();
    let code = frac_cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
