#ifndef GRINTRAP_TABLE_IO_HPP
#define GRINTRAP_TABLE_IO_HPP

#include <fstream>
#include <string>
#include <vector>

namespace grintrap {

// 17 significant digits: round-trip exact for IEEE doubles, locale-free.
std::string format_g17(double v);

// Comma-separated table with a header row. All numbers go through format_g17
// so repeated identical runs produce byte-identical files.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    void row(const std::vector<double>& values);
    // Mixed row for tables with text cells (e.g. classifications).
    void row(const std::vector<std::string>& cells);

    static std::string cell(double v) { return format_g17(v); }

  private:
    std::ofstream out_;
    std::size_t columns_;
};

// Creates the directory (and parents) if needed; returns the path.
std::string ensure_directory(const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace grintrap

#endif  // GRINTRAP_TABLE_IO_HPP
