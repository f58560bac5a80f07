#pragma once

#include <json.hpp>

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace anilap {

enum class Verdict { Pass, Flag, Fail, Error };

[[nodiscard]] std::string to_string(Verdict v);
// Exit status: 0 pass, 1 flag, 2 fail, 3 error.
[[nodiscard]] int exit_status(Verdict v) noexcept;

struct Quantity {
    std::string name;
    double value = 0;
    double uncertainty = 0;
    // Bound or exponent from the theory side; NaN when there is none.
    double reference = std::numeric_limits<double>::quiet_NaN();
    double tolerance = 0;
};

// One CSV per curve; the first column is the parameter.
struct Curve {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
    std::string experiment;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<Quantity> measured;
    std::vector<Curve> curves;
    std::vector<std::string> notes;
    Verdict verdict = Verdict::Error;
    std::string reason;
    double runtime_seconds = 0;  // written to its own file so reports stay byte-identical
};

// "%.17g"; non-finite values become "inf", "-inf" or "nan".
[[nodiscard]] std::string format_double(double x);
// JSON text with every floating-point number at 17 significant digits.
[[nodiscard]] std::string dump_json(const nlohmann::json& j, int indent = 2);
[[nodiscard]] nlohmann::json to_json(const ExperimentReport& r);
[[nodiscard]] std::string to_csv(const Curve& c);

// Writes report.json, one <curve>.csv per curve, manifest.json and runtime.txt.
// Throws IoError if the directory cannot be written.
void emit_report(const ExperimentReport& r, const std::filesystem::path& dir, const nlohmann::json& manifest);

} // namespace anilap
