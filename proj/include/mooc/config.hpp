#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mooc {

// Line-oriented `key = value` file. `#` starts a comment, blank lines are
// ignored, sections are spelled with dotted keys (`mine.min_recall`).
// Later assignments to the same key override earlier ones.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<std::int64_t> get_int_list(const std::string& key, std::vector<std::int64_t> fallback) const;

    // Distinct first components after `prefix.`, in key order: for keys
    // `planted.1.kind`, `planted.2.kind` and prefix `planted` yields {"1", "2"}.
    std::vector<std::string> subsections(const std::string& prefix) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }
    const std::filesystem::path& base_dir() const noexcept { return base_dir_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::size_t> lines_;
    std::string source_;
    std::filesystem::path base_dir_;

    [[noreturn]] void bad_value(const std::string& key, const std::string& why) const;
};

std::string trim(std::string_view s);

}  // namespace mooc
