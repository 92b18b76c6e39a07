fn main() {
    std::process::exit(bouss2d::cli::main_with_args(std::env::args_os()));
}
