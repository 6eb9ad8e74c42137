#ifndef REPLIQ_CSV_HPP
#define REPLIQ_CSV_HPP

#include <string>
#include <vector>

namespace repliq {

inline constexpr const char* kToolVersion = "repliq 0.1.0";

// CSV with '#' comment header lines (tool version, effective config, seed),
// then a column header row. Written to a temp file and renamed into place.
class CsvWriter {
    std::string path_;
    std::string buf_;

public:
    explicit CsvWriter(std::string path);
    void comment(const std::string& line);
    void header(const std::vector<std::string>& cols);
    void row(const std::vector<double>& vals);
    void row_raw(const std::string& line);
    void close(); // atomic rename; called by the destructor if needed
    ~CsvWriter();
};

std::string format_double(double v);

} // namespace repliq

#endif
