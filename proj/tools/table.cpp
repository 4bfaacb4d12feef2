#include "table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace retrobell::cli {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string csv_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string quoted = "\"";
            for (char ch : s) {
                if (ch == '"') quoted += '"';
                quoted += ch;
            }
            return quoted + "\"";
        }
        std::string operator()(bool b) const { return b ? "1" : "0"; }
    };
    return std::visit(Visitor{}, c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(double d) const {
            // JSON has no inf/nan; keep them readable as strings.
            if (!std::isfinite(d)) return format_number(d);
            return d;
        }
        nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(bool b) const { return b; }
    };
    return std::visit(Visitor{}, c);
}

}  // namespace

void write_csv(const Table& t, std::ostream& out) {
    for (const auto& [key, value] : t.metadata) out << "# " << key << "=" << value << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << "\n";
    }
}

void write_json(const Table& t, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : t.metadata) doc["metadata"][key] = value;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            obj[t.columns[i]] = json_cell(row[i]);
        }
        doc["rows"].push_back(std::move(obj));
    }
    out << doc.dump(2) << "\n";
}

void write_table(const Table& t, Format f, std::ostream& out) {
    if (f == Format::Json) {
        write_json(t, out);
    } else {
        write_csv(t, out);
    }
}

}  // namespace retrobell::cli
