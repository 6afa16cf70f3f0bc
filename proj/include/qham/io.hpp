#ifndef QHAM_IO_HPP_
#define QHAM_IO_HPP_

#include <fstream>
#include <string>
#include <vector>

namespace qham {

// Shortest round-trip decimal form, so repeated runs write identical bytes.
std::string format_double(double v);

class CsvWriter {
 public:
  // Lines in `comment` are written first, each prefixed with "# ".
  CsvWriter(const std::string& path, const std::vector<std::string>& header,
            const std::string& comment = "");
  CsvWriter& field(const std::string& s);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
void ensure_directory(const std::string& path);

}  // namespace qham

#endif  // QHAM_IO_HPP_
