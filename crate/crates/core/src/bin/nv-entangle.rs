fn main() -> std::process::ExitCode {
    nv_entangle::cli::main()
}
