#include "anilap/report.hpp"

#include "anilap/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace anilap {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Flag: return "flag";
    case Verdict::Fail: return "fail";
    case Verdict::Error: return "error";
    }
    return "error";
}

int exit_status(Verdict v) noexcept {
    switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Flag: return 1;
    case Verdict::Fail: return 2;
    case Verdict::Error: return 3;
    }
    return 3;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void dump(const nlohmann::json& j, std::ostringstream& os, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{' << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',' << nl;
            first = false;
            os << pad << nlohmann::json(it.key()).dump() << (indent > 0 ? ": " : ":");
            dump(it.value(), os, indent, depth + 1);
        }
        os << nl << close << '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << '[' << nl;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ',' << nl;
            os << pad;
            dump(j[i], os, indent, depth + 1);
        }
        os << nl << close << ']';
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double x = j.get<double>();
        if (std::isfinite(x))
            os << format_double(x);
        else
            os << '"' << format_double(x) << '"';
        return;
    }
    default: os << j.dump(); return;
    }
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot open " + p.string() + " for writing");
    f << text;
    if (!f) throw Error(ErrorCode::IoError, "failed writing " + p.string());
}

} // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
    std::ostringstream os;
    dump(j, os, indent, 0);
    return os.str();
}

nlohmann::json to_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["parameters"] = r.parameters;
    auto& m = j["measured"] = nlohmann::json::array();
    for (const auto& q : r.measured) {
        nlohmann::json e;
        e["name"] = q.name;
        e["value"] = q.value;
        e["uncertainty"] = q.uncertainty;
        e["reference"] = q.reference;
        e["tolerance"] = q.tolerance;
        m.push_back(e);
    }
    auto& c = j["curves"] = nlohmann::json::array();
    for (const auto& cv : r.curves) c.push_back(cv.name + ".csv");
    j["notes"] = r.notes;
    j["verdict"] = to_string(r.verdict);
    j["reason"] = r.reason;
    return j;
}

std::string to_csv(const Curve& c) {
    std::ostringstream os;
    for (std::size_t i = 0; i < c.columns.size(); ++i) os << (i ? "," : "") << c.columns[i];
    os << '\n';
    for (const auto& row : c.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
    return os.str();
}

void emit_report(const ExperimentReport& r, const std::filesystem::path& dir, const nlohmann::json& manifest) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "report.json", dump_json(to_json(r)) + "\n");
    for (const auto& c : r.curves) write_file(dir / (c.name + ".csv"), to_csv(c));
    write_file(dir / "manifest.json", dump_json(manifest) + "\n");
    write_file(dir / "runtime.txt", format_double(r.runtime_seconds) + "\n");
}

} // namespace anilap
