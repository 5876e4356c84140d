#include "mmv/spec_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mmv/errors.hpp"

namespace mmv {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source) {
    std::map<std::string, std::string> out;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw SpecError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) {
            throw SpecError(source + ":" + std::to_string(lineno) + ": empty key");
        }
        if (!out.emplace(key, value).second) {
            throw SpecError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw SpecError("cannot open spec file '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_key_values(ss.str(), path.string());
}

double parse_real(std::string_view text, const std::string& key) {
    std::string s = trim(text);
    bool power_of_ten = false;
    if (s.starts_with("10^")) {
        power_of_ten = true;
        s = s.substr(3);
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) {
        throw SpecError("key '" + key + "': '" + std::string(text) + "' is not a number");
    }
    return power_of_ten ? std::pow(10.0, v) : v;
}

long long parse_integer(std::string_view text, const std::string& key) {
    const std::string s = trim(text);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) {
        throw SpecError("key '" + key + "': '" + std::string(text) + "' is not an integer");
    }
    return v;
}

std::vector<double> parse_real_list(std::string_view text, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::istringstream is{std::string(text)};
    while (std::getline(is, item, ',')) {
        out.push_back(parse_real(item, key));
    }
    if (out.empty()) {
        throw SpecError("key '" + key + "': empty list");
    }
    return out;
}

bool parse_bool(std::string_view text, const std::string& key) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    throw SpecError("key '" + key + "': expected true or false, got '" + s + "'");
}

} // namespace mmv
