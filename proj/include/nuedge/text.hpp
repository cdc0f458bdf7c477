#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nuedge::text {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);
bool parse_bool(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
/// Whitespace-separated doubles.
std::vector<double> parse_doubles(std::string_view s);
std::string join_doubles(const std::vector<double>& v, const char* sep = " ");

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
std::vector<KeyValue> parse_key_values(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace nuedge::text
