#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "trimol/types.hpp"

namespace trimol::cli {

struct ConfigError : Error {
    using Error::Error;
};

// Flat key=value store: optional config file, command-line --key value overrides win.
class RunConfig {
  public:
    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file: " + path);
        }
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (trim(line).empty()) continue;
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            }
            values_[key] = value;
        }
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    void require_known(const std::set<std::string>& allowed) const {
        for (const auto& [key, value] : values_) {
            if (!allowed.count(key)) {
                throw ConfigError("unknown key: " + key);
            }
        }
    }

    std::optional<std::string> raw(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto v = raw(key);
        return v ? *v : fallback;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto v = raw(key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const double parsed = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing characters");
            return parsed;
        } catch (const std::exception&) {
            throw ConfigError("key " + key + ": cannot parse '" + *v + "' as a number");
        }
    }

    int get_int(const std::string& key, int fallback) const {
        const auto v = raw(key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const int parsed = std::stoi(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing characters");
            return parsed;
        } catch (const std::exception&) {
            throw ConfigError("key " + key + ": cannot parse '" + *v + "' as an integer");
        }
    }

  private:
    static std::string trim(const std::string& s) {
        const auto begin = s.find_first_not_of(" \t\r\n");
        if (begin == std::string::npos) return "";
        const auto end = s.find_last_not_of(" \t\r\n");
        return s.substr(begin, end - begin + 1);
    }

    std::map<std::string, std::string> values_;
};

// 17 significant digits: round-trip safe and byte-stable across runs.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (v == 0.0) v = 0.0;  // collapse negative zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class OutputFile {
  public:
    explicit OutputFile(const std::string& path) : path_(path) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw ConfigError("cannot open output path: " + path);
            }
        }
    }

    std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

  private:
    std::string path_;
    std::ofstream file_;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline void write_table_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << "\n";
    }
}

inline std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 2) {
        throw ConfigError("grid counts must be >= 2");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

}  // namespace trimol::cli
