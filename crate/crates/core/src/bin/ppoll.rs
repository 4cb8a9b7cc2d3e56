fn main() {
    pattern_poll::cli::main()
}
