#include "sdlab/csv.hpp"

#include <cstdio>

#include "sdlab/errors.hpp"

namespace sdlab::csv {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

Writer::Writer(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    std::vector<Cell> cells(header.begin(), header.end());
    row(cells);
}

void Writer::row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) {
        throw InvalidParameterError("csv row for '" + path_ + "' has " +
                                    std::to_string(cells.size()) + " fields, expected " +
                                    std::to_string(columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::string>) out_ << quote(v);
                else if constexpr (std::is_same_v<T, double>) out_ << format_real(v);
                else out_ << v;
            },
            cells[i]);
    }
    out_ << '\n';
}

}  // namespace sdlab::csv
