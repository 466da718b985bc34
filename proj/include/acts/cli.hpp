#pragma once

#include "acts/dataset.hpp"
#include "acts/trainer.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace acts {

inline constexpr const char* kToolVersion = "0.1.0";

/**
 * Settings shared by every subcommand. Read from a JSON document whose
 * top-level keys mirror the flags; training settings live under "train".
 */
struct RunConfig {
    std::string data;
    std::string features_static;
    std::string features_dynamic;
    std::optional<IncidenceKind> task;
    std::optional<Date> issue_date;
    std::string out;
    std::size_t weeks = 4;
    std::size_t jobs = 1;
    TrainConfig train;

    nlohmann::json to_json() const;
    /// Unknown keys are rejected at every level.
    static RunConfig from_json(const nlohmann::json& j);
};

/// Exit status: 0 success, 1 validation or usage error, 2 I/O error.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace acts
