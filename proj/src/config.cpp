#include "mooc/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <set>

#include "mooc/error.hpp"

namespace mooc {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
    KeyValueConfig cfg;
    cfg.source_ = source;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError(source, number, "<line>", "expected 'key = value'");
        std::string key = trim(std::string_view(text).substr(0, eq));
        if (key.empty()) throw ParseError(source, number, "<line>", "empty key");
        cfg.values_[key] = trim(std::string_view(text).substr(eq + 1));
        cfg.lines_[key] = number;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path.string());
    auto cfg = parse(in, path.string());
    cfg.base_dir_ = path.parent_path();
    return cfg;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

void KeyValueConfig::bad_value(const std::string& key, const std::string& why) const {
    auto it = lines_.find(key);
    throw ParseError(source_, it == lines_.end() ? 0 : it->second, key, why);
}

namespace {

template <class T>
bool parse_number(const std::string& text, T& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    // GCC 11 has floating-point from_chars; accept a leading '+' too.
    std::string text = *v;
    if (!text.empty() && text[0] == '+') text.erase(0, 1);
    double out = 0;
    if (!parse_number(text, out)) bad_value(key, "expected a number, got '" + *v + "'");
    return out;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::int64_t out = 0;
    if (!parse_number(*v, out)) bad_value(key, "expected an integer, got '" + *v + "'");
    return out;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    if (!parse_number(*v, out)) bad_value(key, "expected an unsigned integer, got '" + *v + "'");
    return out;
}

std::vector<std::int64_t> KeyValueConfig::get_int_list(const std::string& key,
                                                       std::vector<std::int64_t> fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::vector<std::int64_t> out;
    std::string_view rest = *v;
    while (true) {
        const auto comma = rest.find(',');
        const std::string item = trim(rest.substr(0, comma));
        std::int64_t n = 0;
        if (!parse_number(item, n)) bad_value(key, "expected a comma-separated integer list, got '" + *v + "'");
        out.push_back(n);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::vector<std::string> KeyValueConfig::subsections(const std::string& prefix) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    const std::string head = prefix + ".";
    for (const auto& [key, value] : values_) {
        if (!key.starts_with(head)) continue;
        std::string rest = key.substr(head.size());
        std::string name = rest.substr(0, rest.find('.'));
        if (seen.insert(name).second) out.push_back(name);
    }
    return out;
}

}  // namespace mooc
