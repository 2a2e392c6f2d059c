#include "corrcam/io/keyval.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "corrcam/errors.hpp"

namespace corrcam {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-')
            return false;
    return true;
}

} // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& source_name) {
    KeyValueFile kv;
    kv.source_ = source_name;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + t + "'");
        Entry e;
        e.key = trim(t.substr(0, eq));
        e.value = trim(t.substr(eq + 1));
        e.line = lineno;
        if (!valid_key(e.key))
            throw ConfigError(source_name + ":" + std::to_string(lineno) + ": bad key '" + e.key + "'");
        if (kv.find(e.key))
            throw ConfigError(source_name + ":" + std::to_string(lineno) + ": duplicate key '" + e.key + "'");
        kv.entries_.push_back(std::move(e));
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

const KeyValueFile::Entry* KeyValueFile::find(const std::string& key) const {
    for (const auto& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

bool KeyValueFile::has(const std::string& key) const { return find(key) != nullptr; }

std::string KeyValueFile::get_string(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(source_ + ": missing required key '" + key + "'");
    return e->value;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

double KeyValueFile::get_double(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(source_ + ": missing required key '" + key + "'");
    char* end = nullptr;
    double v = std::strtod(e->value.c_str(), &end);
    if (end == e->value.c_str() || *end != '\0')
        throw ConfigError(source_ + ":" + std::to_string(e->line) + ": key '" + key +
                          "' is not a number: '" + e->value + "'");
    return v;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long KeyValueFile::get_int(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(source_ + ": missing required key '" + key + "'");
    char* end = nullptr;
    long v = std::strtol(e->value.c_str(), &end, 10);
    if (end == e->value.c_str() || *end != '\0')
        throw ConfigError(source_ + ":" + std::to_string(e->line) + ": key '" + key +
                          "' is not an integer: '" + e->value + "'");
    return v;
}

long KeyValueFile::get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    throw ConfigError(source_ + ":" + std::to_string(e->line) + ": key '" + key +
                      "' is not a boolean: '" + e->value + "'");
}

void KeyValueFile::check_known(const std::vector<std::string>& allowed) const {
    std::string bad;
    for (const auto& e : entries_) {
        bool ok = false;
        for (const auto& a : allowed) {
            if (!a.empty() && a.back() == '.') {
                if (e.key.rfind(a, 0) == 0) { ok = true; break; }
            } else if (e.key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            if (!bad.empty()) bad += "; ";
            bad += "'" + e.key + "' (line " + std::to_string(e.line) + ")";
        }
    }
    if (!bad.empty())
        throw ConfigError(source_ + ": unknown key(s): " + bad);
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ConfigError("bad key '" + key + "'");
    for (auto& e : entries_) {
        if (e.key == key) {
            e.value = value;
            return;
        }
    }
    entries_.push_back(Entry{key, value, 0});
}

std::string KeyValueFile::serialize() const {
    std::string out;
    for (const auto& e : entries_) {
        out += e.key;
        out += " = ";
        out += e.value;
        out += '\n';
    }
    return out;
}

} // namespace corrcam
