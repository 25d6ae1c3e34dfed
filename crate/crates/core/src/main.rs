fn main() {
    let code = qsl_core::cli::main_with(
        std::env::args_os(),
        std::env::var_os(qsl_core::cli::SEED_ENV),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
