#include "zeno/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "zeno/errors.hpp"

namespace zeno {

std::string fmt(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, size_t line) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw ConfigError("line " + std::to_string(line), "not a number: '" + s + "'");
    return v;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> parse_two_column_csv(
    const std::string& text, const std::string& h1, const std::string& h2) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> a, b;
    size_t n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        line = trim(line);
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ConfigError("line " + std::to_string(n), "expected two comma-separated columns");
        std::string c1 = trim(line.substr(0, comma)), c2 = trim(line.substr(comma + 1));
        if (!header) {
            if (c1 != h1 || c2 != h2)
                throw ConfigError("header", "expected '" + h1 + "," + h2 + "'");
            header = true;
            continue;
        }
        a.push_back(parse_number(c1, n));
        b.push_back(parse_number(c2, n));
    }
    if (!header) throw ConfigError("header", "empty file");
    return {std::move(a), std::move(b)};
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header) : columns_(header.size()) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

void CsvBuilder::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ',';
        text_ += fmt(values[i]);
    }
    text_ += '\n';
}

}  // namespace zeno
