#pragma once

#include <complex>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>

namespace optomech {

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double value);

/// Writes one comma-separated row terminated by LF.
void write_csv_row(std::ostream& os, std::initializer_list<double> values);
void write_csv_header(std::ostream& os, std::string_view header);

}  // namespace optomech
