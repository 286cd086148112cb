#ifndef HARBOR_UTIL_CSV_HPP
#define HARBOR_UTIL_CSV_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace harbor {

/// In-memory CSV table. Comment lines starting with '#' are skipped; the
/// first remaining line is the header. Quoted fields may contain commas.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws DataError if absent.
    std::size_t col(const std::string& name) const;
    /// Column index by name, or npos if absent.
    std::size_t col_optional(const std::string& name) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

CsvTable read_csv(const std::filesystem::path& path);
std::vector<std::string> split_csv_line(const std::string& line);

double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

/// CSV writer that stamps a provenance comment line before the header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& comment);
    void write_row(const std::vector<std::string>& fields);

    /// Shortest round-trip decimal representation.
    static std::string fmt(double v);

private:
    std::ofstream out_;
};

} // namespace harbor

#endif
