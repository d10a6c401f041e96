// jumpgeo: batch runner for the verification experiments.
//
//   jumpgeo run [kind] [--config file] [--seed n] [--out dir] [--threads n] [--format csv|json]
//   jumpgeo replay <config> [--out dir] [--threads n] [--format csv|json]
//   jumpgeo list-kinds
//
// Exit status: 0 all clauses pass, 1 some clause failed, 2 invalid input,
// 3 numeric or accuracy failure.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "jumpgeo/errors.hpp"
#include "jumpgeo/experiments.hpp"

using jumpgeo::TableFormat;
using nlohmann::json;

namespace {

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw jumpgeo::ValidationError("cannot open config '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw jumpgeo::ValidationError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

int threads_from_env() {
    const char* env = std::getenv("JUMPGEO_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
        throw jumpgeo::ValidationError(std::string("JUMPGEO_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(n);
}

int execute(const json& raw, std::optional<std::uint64_t> seed, jumpgeo::RunOptions opts) {
    const json resolved = jumpgeo::resolve_config(raw, seed);
    const jumpgeo::ExperimentResult r = jumpgeo::run_experiment(resolved, opts);
    jumpgeo::print_clauses(std::cout, r);
    return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jumpgeo: experiments on jump processes in embedded manifolds"};
    app.require_subcommand(1);

    std::string kind, config_path, out_dir = ".", format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    auto add_output_flags = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--threads", threads, "Worker threads (default: JUMPGEO_THREADS or 1)")->check(CLI::Range(1, 4096));
        cmd->add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* run = app.add_subcommand("run", "Run an experiment from a kind's defaults or a config file");
    run->add_option("kind", kind, "Experiment kind (defaults are used for every parameter)");
    run->add_option("--config", config_path, "JSON experiment config");
    run->add_option("--seed", seed, "Master seed, overrides the config");
    add_output_flags(run);

    CLI::App* replay = app.add_subcommand("replay", "Re-run a resolved config, e.g. <name>.config.json");
    replay->add_option("config", config_path, "Config file")->required();
    replay->add_option("--seed", seed, "Master seed, overrides the config");
    add_output_flags(replay);

    app.add_subcommand("list-kinds", "Print the experiment kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("list-kinds")) {
            for (const auto& k : jumpgeo::experiment_kinds()) std::cout << k << '\n';
            return 0;
        }
        jumpgeo::RunOptions opts;
        opts.out_dir = out_dir;
        opts.format = format == "json" ? TableFormat::Json : TableFormat::Csv;
        opts.threads = threads ? *threads : threads_from_env();

        json raw;
        if (app.got_subcommand("replay")) {
            raw = load_config(config_path);
        } else if (!config_path.empty()) {
            raw = load_config(config_path);
            if (!kind.empty()) {
                if (!raw.is_object()) throw jumpgeo::ValidationError("config must be a JSON object");
                if (raw.contains("kind") && raw["kind"] != kind) {
                    throw jumpgeo::ValidationError("kind '" + kind + "' disagrees with the config's kind");
                }
                raw["kind"] = kind;
            }
        } else if (!kind.empty()) {
            raw = jumpgeo::default_config(kind);
        } else {
            throw jumpgeo::ValidationError("run needs a kind or --config");
        }
        return execute(raw, seed, opts);
    } catch (const jumpgeo::AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << '\n';
        return 3;
    } catch (const jumpgeo::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const jumpgeo::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const jumpgeo::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
