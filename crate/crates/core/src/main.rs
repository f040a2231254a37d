fn main() {
    let code = fock_sobolev::cli::run(std::env::args_os());
    std::process::exit(code);
}
