#include "optomech/csv.hpp"

#include <array>
#include <charconv>
#include <ostream>

namespace optomech {

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

void write_csv_row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << format_number(v);
        first = false;
    }
    os << '\n';
}

void write_csv_header(std::ostream& os, std::string_view header) { os << header << '\n'; }

}  // namespace optomech
