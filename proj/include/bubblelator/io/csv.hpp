#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bubblelator::io {

// Shortest decimal that reads back to the same double; NaN becomes an empty cell.
std::string format_number(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& values);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace bubblelator::io
