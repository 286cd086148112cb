#include "harbor/util/csv.hpp"

#include "harbor/util/errors.hpp"

#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <sstream>

namespace harbor {

std::size_t CsvTable::col(const std::string& name) const {
    const std::size_t i = col_optional(name);
    if (i == npos) throw DataError("csv: missing column '" + name + "'");
    return i;
}

std::size_t CsvTable::col_optional(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return npos;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("csv: cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != t.header.size()) {
                throw DataError("csv: ragged row in " + path.string() + " (" +
                                std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(t.header.size()) + ")");
            }
            t.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw DataError("csv: empty file " + path.string());
    return t;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("csv: bad number '" + s + "' in " + context);
    }
}

long parse_long(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("csv: bad integer '" + s + "' in " + context);
    }
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& comment) {
    out_.open(path);
    if (!out_) throw DataError("csv: cannot write " + path.string());
    if (!comment.empty()) out_ << "# " << comment << "\n";
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            out_ << '"';
            for (char c : f) {
                if (c == '"') out_ << "\"\"";
                else out_ << c;
            }
            out_ << '"';
        } else {
            out_ << f;
        }
    }
    out_ << '\n';
}

std::string CsvWriter::fmt(double v) {
    char buf[32];
    // %.17g round-trips doubles; trim to the shortest representation that
    // does. strtod rather than stod: subnormals must not throw.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace harbor
