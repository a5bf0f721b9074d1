fn main() {
    std::process::exit(tiled_cubemap::cli::main(std::env::args_os()));
}
