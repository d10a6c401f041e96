#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "jumpgeo/errors.hpp"

namespace jumpgeo {

/// Bad experiment configuration: unknown kind, missing or ill-typed key, or a
/// parameter outside the module's preconditions. The CLI maps it to status 2.
class ValidationError : public DomainError {
  public:
    using DomainError::DomainError;
};

enum class TableFormat { Csv, Json };

struct RunOptions {
    std::filesystem::path out_dir = ".";
    int threads = 1;
    TableFormat format = TableFormat::Csv;
};

/// One acceptance clause exercised by an experiment.
struct Clause {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentResult {
    std::string name;
    std::string kind;
    std::vector<Clause> clauses;
    std::vector<std::filesystem::path> artifacts;

    bool all_pass() const;
};

std::vector<std::string> experiment_kinds();

/// Defaults for `kind` with `name` and `seed` filled in.
nlohmann::json default_config(const std::string& kind);

/// Fills defaults into a user config and validates every parameter.
/// `seed_override` replaces the config seed. Throws ValidationError naming the
/// first offending key.
nlohmann::json resolve_config(const nlohmann::json& raw,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

/// Runs a resolved config. Writes `<name>.config.json` (the replayable
/// resolved config) and the kind's tables into opts.out_dir. Artifacts depend
/// only on the config, never on opts.threads.
ExperimentResult run_experiment(const nlohmann::json& resolved, const RunOptions& opts);

/// Prints `PASS name: detail` / `FAIL name: detail`, one line per clause.
void print_clauses(std::ostream& os, const ExperimentResult& r);

}  // namespace jumpgeo
