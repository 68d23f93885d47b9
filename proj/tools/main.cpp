#include <CLI11.hpp>

#include <iostream>

#include "common.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ogsnet - optical ground station network analysis toolkit"};
    app.set_version_flag("--version", ogscli::kVersion);
    app.require_subcommand(1);
    app.set_config("--config", "", "Key/value config file ([subcommand] sections)");

    ogscli::RunContext ctx;
    for (int i = 0; i < argc; ++i) ctx.command_line.emplace_back(argv[i]);

    ogscli::register_data_commands(app, ctx);
    ogscli::register_model_commands(app, ctx);
    ogscli::register_orbit_commands(app, ctx);

    try {
        app.parse(argc, argv);
        for (const CLI::App* sub : app.get_subcommands())
            ctx.subcommand = sub->get_name();
        ctx.write_manifest();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints usage diagnostics to stderr
        return ogscli::kExitUsage;
    } catch (const ogscli::missing_input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ogscli::kExitMissingInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ogscli::kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ogscli::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return ogscli::kExitFailure;
    }
    return 0;
}
