#pragma once

// CSV emission: header row mandatory, comma delimiter, '\n' newlines,
// full double precision (17 significant digits) so convergence tables are
// reproducible bit-for-bit.

#include <cstdio>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "waveobs/errors.hpp"

namespace waveobs {

using CsvColumn = std::variant<std::vector<double>, std::vector<std::string>>;

inline std::string csv_format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<CsvColumn>& columns) {
    if (header.size() != columns.size())
        throw ValidationError("csv", "header/column count mismatch");
    std::size_t rows = 0;
    for (const auto& c : columns)
        rows = std::max(rows, std::visit([](const auto& v) { return v.size(); }, c));
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("csv", "cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    if (r < v.size()) {
                        if constexpr (std::is_same_v<
                                          std::decay_t<decltype(v[r])>, double>)
                            out << csv_format(v[r]);
                        else
                            out << v[r];
                    }
                },
                columns[i]);
            out << (i + 1 < columns.size() ? "," : "\n");
        }
    }
}

} // namespace waveobs
