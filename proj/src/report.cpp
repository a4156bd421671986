#include "rrg/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <iomanip>
#include <ostream>

#ifndef RRG_VERSION
#define RRG_VERSION "unknown"
#endif

namespace rrg {

std::string version_string() { return RRG_VERSION; }

std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) {
        return "nan";
    }
    return {buf.data(), ptr};
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

std::string config_hash(const nlohmann::json& config) {
    const std::string text = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
    return buf.data();
}

bool Report::all_passed() const {
    return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.passed; });
}

bool Report::statistical_failure() const {
    return std::any_of(gates.begin(), gates.end(),
                       [](const GateResult& g) { return !g.passed && g.kind == GateKind::Statistical; });
}

bool Report::exact_failure() const {
    return std::any_of(gates.begin(), gates.end(),
                       [](const GateResult& g) { return !g.passed && g.kind == GateKind::Exact; });
}

nlohmann::json Report::to_json() const {
    nlohmann::json doc;
    doc["command"] = command;
    doc["version"] = version_string();
    doc["seed"] = seed;
    doc["config"] = config;
    doc["config_hash"] = config_hash(config);
    auto rows = nlohmann::json::array();
    for (const auto& g : gates) {
        rows.push_back({{"statistic", g.statistic},
                        {"formula_value", g.formula},
                        {"mc_estimate", g.estimate},
                        {"stderr", g.stderr_},
                        {g.score_name, g.score},
                        {"passed", g.passed}});
    }
    doc["gates"] = rows;
    doc["passed"] = all_passed();
    if (!extra.empty()) {
        doc["extra"] = extra;
    }
    return doc;
}

void Report::write_text(std::ostream& out) const {
    out << "# " << command << "  version " << version_string() << "  seed " << seed << "  config "
        << config_hash(config) << '\n';
    std::size_t width = 9;
    for (const auto& g : gates) {
        width = std::max(width, g.statistic.size());
    }
    out << std::left << std::setw(static_cast<int>(width)) << "statistic" << std::right << std::setw(14)
        << "formula" << std::setw(14) << "estimate" << std::setw(12) << "stderr" << std::setw(12) << "score"
        << "  verdict\n";
    for (const auto& g : gates) {
        out << std::left << std::setw(static_cast<int>(width)) << g.statistic << std::right << std::setw(14)
            << std::setprecision(6) << g.formula << std::setw(14) << g.estimate << std::setw(12) << g.stderr_
            << std::setw(12) << g.score << "  " << (g.passed ? "pass" : "FAIL") << '\n';
    }
    out << (all_passed() ? "all gates pass" : "GATE FAILURE") << '\n';
}

int exit_code(const Report& report) {
    if (report.exact_failure()) {
        return kExitExact;
    }
    return report.statistical_failure() ? kExitStatistical : kExitOk;
}

}  // namespace rrg
