#pragma once

#include <string>
#include <vector>

namespace pacbound {

// Shortest decimal that round-trips to the same double (via to_chars).
std::string format_double(double x);
std::string format_int(long long x);

// RFC-4180: quote fields containing comma, quote, or newline.
std::string csv_escape(const std::string& field);

// Rows of already-formatted cells plus a header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& table);
// Aligned fixed-width rendering of the same cells.
std::string to_text(const Table& table);

void write_file(const std::string& path, const std::string& content);

} // namespace pacbound
