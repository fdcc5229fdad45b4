fn main() {
    std::process::exit(rls_predict_cli::run(std::env::args_os()));
}
