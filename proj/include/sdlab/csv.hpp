#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace sdlab::csv {

using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t>;

// Reals with 17 significant digits (round-trip exact).
std::string format_real(double v);
// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string quote(const std::string& field);

// Single-writer CSV file with '\n' line endings.
class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<Cell>& cells);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace sdlab::csv
