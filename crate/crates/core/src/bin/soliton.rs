fn main() {
    std::process::exit(ricci_soliton::cli::run(std::env::args_os()));
}
