#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mmv {

/// `key = value` lines; `#` starts a comment; blank lines ignored.
/// Duplicate keys and lines without '=' are SpecErrors naming the line.
std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Accepts plain decimals and `10^x`.
double parse_real(std::string_view text, const std::string& key);
long long parse_integer(std::string_view text, const std::string& key);
std::vector<double> parse_real_list(std::string_view text, const std::string& key);
bool parse_bool(std::string_view text, const std::string& key);

} // namespace mmv
