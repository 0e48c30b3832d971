// sww: steady water waves over periodic bottoms.
// Usage: sww <config.json> [--stage NAME] [--output-dir DIR]

#include <CLI11.hpp>
#include <iostream>

#include "sww/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"steady water waves over periodic bottoms"};
    std::string config_path;
    std::string stage_override;
    std::string output_override;
    app.add_option("config", config_path, "JSON run configuration")->required();
    app.add_option("--stage", stage_override, "override the configured stage");
    app.add_option("--output-dir", output_override, "override the output directory");
    CLI11_PARSE(app, argc, argv);

    try {
        sww::RunConfig config = sww::load_config(config_path);
        if (!stage_override.empty()) config.stage = sww::stage_from_string(stage_override);
        if (!output_override.empty()) config.output_dir = output_override;

        std::string message;
        const int code = sww::run_with_exit_code(config, &message);
        if (code != 0) {
            std::cerr << "error (" << code << "): " << message << "\n";
        } else {
            std::cout << "stage " << sww::stage_to_string(config.stage) << " done, outputs in "
                      << config.output_dir.string() << "\n";
        }
        return code;
    } catch (const sww::ValidationError& e) {
        std::cerr << "error (2): " << e.what() << "\n";
        return sww::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
