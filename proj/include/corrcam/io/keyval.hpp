#pragma once
#include <optional>
#include <string>
#include <vector>

namespace corrcam {

// Plain-text `key = value` config files: one pair per line, '#' lines are
// comments, keys are dotted identifiers.  Parse errors and unknown-key
// rejection carry line numbers.
class KeyValueFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    static KeyValueFile parse(const std::string& text, const std::string& source_name = "<string>");
    static KeyValueFile load(const std::string& path);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;           // throws ConfigError if absent
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Rejects any key not in `allowed` (prefix match for entries ending in
    // '.'), reporting every offender with its line number.
    void check_known(const std::vector<std::string>& allowed) const;

    void set(const std::string& key, const std::string& value);
    const std::vector<Entry>& entries() const { return entries_; }
    std::string serialize() const;
    const std::string& source_name() const { return source_; }

private:
    const Entry* find(const std::string& key) const;
    std::vector<Entry> entries_;
    std::string source_;
};

} // namespace corrcam
