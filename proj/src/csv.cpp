#include "repliq/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "repliq/errors.hpp"

namespace repliq {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {
    buf_.reserve(1 << 16);
    buf_ += "# ";
    buf_ += kToolVersion;
    buf_ += "\n";
}

void CsvWriter::comment(const std::string& line) {
    buf_ += "# ";
    buf_ += line;
    buf_ += "\n";
}

void CsvWriter::header(const std::vector<std::string>& cols) {
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += cols[i];
    }
    buf_ += '\n';
}

void CsvWriter::row(const std::vector<double>& vals) {
    for (size_t i = 0; i < vals.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += format_double(vals[i]);
    }
    buf_ += '\n';
}

void CsvWriter::row_raw(const std::string& line) {
    buf_ += line;
    buf_ += '\n';
}

void CsvWriter::close() {
    if (path_.empty()) return;
    const std::string tmp = path_ + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open output file " + tmp);
        out << buf_;
    }
    if (std::rename(tmp.c_str(), path_.c_str()) != 0)
        throw Error("cannot rename " + tmp + " to " + path_);
    path_.clear();
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

} // namespace repliq
