#pragma once

// Shared output plumbing: RFC-4180 CSV fields, shortest round-trip numbers,
// and the gate report emitted by every validation command.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rrg {

std::string version_string();

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

// Quotes the field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

inline constexpr std::string_view kCsvEol = "\r\n";

// FNV-1a over the serialized config, printed as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

enum class GateKind { Statistical, Exact };

// One row of a validation report: a statistic, the value the theory predicts,
// the estimate (and its standard error for Monte Carlo rows), and the verdict.
struct GateResult {
    std::string statistic;
    double formula = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double score = 0.0;  // z-score, p-value, or residual depending on the gate
    std::string score_name = "z";
    bool passed = true;
    GateKind kind = GateKind::Statistical;
};

struct Report {
    std::string command;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<GateResult> gates;
    nlohmann::json extra = nlohmann::json::object();

    bool all_passed() const;
    bool statistical_failure() const;
    bool exact_failure() const;

    nlohmann::json to_json() const;
    // Aligned columns for humans.
    void write_text(std::ostream& out) const;
};

// Process exit codes shared by the command-line tools.
inline constexpr int kExitOk = 0;
inline constexpr int kExitStatistical = 2;
inline constexpr int kExitExact = 3;
inline constexpr int kExitBudget = 4;
inline constexpr int kExitUsage = 64;

// An exact failure outranks a statistical one.
int exit_code(const Report& report);

}  // namespace rrg
