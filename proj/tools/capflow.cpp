#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <capflow/run.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Capillary mean-curvature-type flow in hyperbolic and spherical balls"};
    app.require_subcommand(1);
    std::string evolve_path, verify_path;
    auto* ev = app.add_subcommand("evolve", "run the flow from a TOML config");
    ev->add_option("config", evolve_path, "config file")->required();
    auto* vf = app.add_subcommand("verify", "run the residual and refinement suites");
    vf->add_option("config", verify_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : capflow::kExitError;
    }

    try {
        if (*ev) return capflow::run_evolve(capflow::load_config(evolve_path), std::cout);
        return capflow::run_verify(capflow::load_config(verify_path), std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return capflow::kExitError;
}
