fn main() {
    std::process::exit(stochastic_orders::cli::main());
}
