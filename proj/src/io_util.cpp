#include "qadv/io_util.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qadv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    if (t.empty()) throw std::runtime_error("parse error: empty value for field '" + field + "'");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (errno != 0 || end != t.c_str() + t.size()) {
        throw std::runtime_error("parse error: field '" + field + "' is not a number: '" + t + "'");
    }
    return v;
}

long long parse_int(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    if (t.empty()) throw std::runtime_error("parse error: empty value for field '" + field + "'");
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(t.c_str(), &end, 10);
    if (errno != 0 || end != t.c_str() + t.size()) {
        throw std::runtime_error("parse error: field '" + field + "' is not an integer: '" + t +
                                 "'");
    }
    return v;
}

std::uint64_t parse_uint64(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    if (t.empty()) throw std::runtime_error("parse error: empty value for field '" + field + "'");
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (errno != 0 || end != t.c_str() + t.size()) {
        throw std::runtime_error("parse error: field '" + field + "' is not an unsigned integer: '" +
                                 t + "'");
    }
    return v;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_entire_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string expect_kv(const std::string& line, const std::string& expected_key,
                      const std::string& context) {
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
        throw std::runtime_error("parse error in " + context + ": expected 'key = value' line for field '" +
                                 expected_key + "', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key != expected_key) {
        throw std::runtime_error("parse error in " + context + ": expected field '" + expected_key +
                                 "', found '" + key + "'");
    }
    return trim(line.substr(eq + 1));
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::istringstream in(read_entire_file(path));
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.meta.push_back(trim(line.substr(1)));
            continue;
        }
        std::vector<std::string> cells = split(line, ',');
        for (std::string& c : cells) c = trim(c);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw std::runtime_error("parse error: CSV has no header row: " + path.string());
    return t;
}

std::string format_csv(const CsvTable& table) {
    std::ostringstream out;
    for (const std::string& m : table.meta) out << "# " << m << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    return out.str();
}

}  // namespace qadv
