#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace hedgelab {

// Configuration and table I/O. The config format is line-oriented text with
// [section] headers and key = value pairs, one level deep; CSV output is
// comma-separated, header row, LF endings, UTF-8, numbers in shortest
// round-trip decimal so identical runs produce identical bytes.

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class RunConfig {
  public:
    static RunConfig parse(const std::string& text) {
        RunConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string s = trim(strip_comment(line));
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError("config line " + std::to_string(line_no) +
                                      ": unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError("config line " + std::to_string(line_no) +
                                      ": empty section name");
                cfg.sections_[section];
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected key = value");
            if (section.empty())
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": key outside any [section]");
            const std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
            cfg.sections_[section][key] = value;
        }
        return cfg;
    }

    static RunConfig parse_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    // Dotted override section.key=value, applied after the file parse.
    void apply_override(const std::string& spec) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + spec + "': expected key=value");
        const std::string dotted = trim(spec.substr(0, eq));
        const auto dot = dotted.find('.');
        if (dot == std::string::npos)
            throw ConfigError("override '" + spec + "': expected section.key=value");
        const std::string section = dotted.substr(0, dot);
        const std::string key = dotted.substr(dot + 1);
        if (!has(section, key))
            throw ConfigError("override '" + spec + "': unknown key " + section + "." + key);
        sections_[section][key] = trim(spec.substr(eq + 1));
    }

    bool has_section(const std::string& section) const {
        return sections_.count(section) > 0;
    }
    bool has(const std::string& section, const std::string& key) const {
        const auto it = sections_.find(section);
        return it != sections_.end() && it->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        const auto it = sections_.find(section);
        if (it == sections_.end() || !it->second.count(key))
            throw ConfigError("missing config key " + section + "." + key);
        return it->second.at(key);
    }
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        return has(section, key) ? get_string(section, key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return parse_double(get_string(section, key), section + "." + key);
    }
    double get_double(const std::string& section, const std::string& key, double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    long get_int(const std::string& section, const std::string& key) const {
        const std::string v = get_string(section, key);
        long out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            throw ConfigError("config key " + section + "." + key + ": not an integer: " + v);
        return out;
    }
    long get_int(const std::string& section, const std::string& key, long fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

  private:
    static std::string strip_comment(const std::string& s) {
        const auto h = s.find('#');
        return h == std::string::npos ? s : s.substr(0, h);
    }
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static double parse_double(const std::string& v, const std::string& where) {
        double out = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            throw ConfigError("config key " + where + ": not a number: " + v);
        return out;
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Shortest round-trip decimal rendering.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// A typed table serialized as CSV. Cells are stored as already-formatted
// strings; numeric cells go through format_double so output is
// locale-independent and byte-deterministic.
class ResultTable {
  public:
    explicit ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    class RowBuilder {
      public:
        explicit RowBuilder(ResultTable& t) : table_(t) {}
        RowBuilder& add(double v) {
            cells_.push_back(format_double(v));
            return *this;
        }
        RowBuilder& add(const std::string& v) {
            cells_.push_back(v);
            return *this;
        }
        ~RowBuilder() { table_.push_row(std::move(cells_)); }

      private:
        ResultTable& table_;
        std::vector<std::string> cells_;
    };

    RowBuilder row() { return RowBuilder(*this); }

    void push_row(std::vector<std::string> cells) {
        if (cells.size() != columns_.size())
            throw std::invalid_argument("ResultTable: row width mismatch");
        rows_.push_back(std::move(cells));
    }

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out += ',';
            out += columns_[i];
        }
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += row[i];
            }
            out += '\n';
        }
        return out;
    }

    void write_csv(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + path);
        out << to_csv();
    }

    static ResultTable read_csv(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open input file: " + path);
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
        ResultTable table(split(line));
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            table.push_row(split(line));
        }
        return table;
    }

    // Numeric view of one column; throws if a cell does not parse.
    std::vector<double> column_values(const std::string& name) const {
        std::size_t idx = columns_.size();
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == name) idx = i;
        if (idx == columns_.size())
            throw std::invalid_argument("ResultTable: no column named " + name);
        std::vector<double> out;
        out.reserve(rows_.size());
        for (const auto& row : rows_) {
            double v = 0.0;
            const auto& cell = row[idx];
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
                throw std::invalid_argument("ResultTable: non-numeric cell '" + cell +
                                            "' in column " + name);
            out.push_back(v);
        }
        return out;
    }

  private:
    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        out.push_back(cur);
        return out;
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace hedgelab
