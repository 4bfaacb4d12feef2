#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace retrobell::cli {

// Empty cells are written as an empty CSV field / JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;  // insertion order kept
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_meta(std::string key, std::string value) {
        metadata.emplace_back(std::move(key), std::move(value));
    }
};

enum class Format { Csv, Json };

// `#`-prefixed metadata lines, header row, one line per row. Doubles use %.17g
// so they round-trip exactly.
void write_csv(const Table& t, std::ostream& out);
// {"metadata": {...}, "rows": [{column: value, ...}, ...]}
void write_json(const Table& t, std::ostream& out);
void write_table(const Table& t, Format f, std::ostream& out);

std::string format_number(double x);

}  // namespace retrobell::cli
