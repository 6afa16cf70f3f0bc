#include "qham/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "qham/errors.hpp"

namespace qham {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header,
                     const std::string& comment)
    : out_(path) {
  require(out_.good(), "IoError", "cannot open " + path, ErrorKind::Other);
  std::istringstream lines(comment);
  std::string line;
  while (std::getline(lines, line)) out_ << "# " << line << "\n";
  for (const auto& h : header) field(h);
  end_row();
}

CsvWriter& CsvWriter::field(const std::string& s) {
  if (!first_) out_ << ',';
  out_ << s;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_double(v)); }
CsvWriter& CsvWriter::field(long long v) { return field(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  require(out.good(), "IoError", "cannot open " + path, ErrorKind::Other);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "IoError", "cannot read " + path, ErrorKind::Config);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  require(!ec, "IoError", "cannot create " + path + ": " + ec.message(), ErrorKind::Other);
}

}  // namespace qham
