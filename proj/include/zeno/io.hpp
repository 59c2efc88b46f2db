#pragma once

#include <string>
#include <utility>
#include <vector>

namespace zeno {

// Fixed 12-significant-digit rendering used for every exported number.
std::string fmt(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Parses a two-column CSV whose header must be exactly "<h1>,<h2>".
std::pair<std::vector<double>, std::vector<double>> parse_two_column_csv(
    const std::string& text, const std::string& h1, const std::string& h2);

class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    const std::string& str() const { return text_; }

private:
    std::string text_;
    size_t columns_;
};

}  // namespace zeno
