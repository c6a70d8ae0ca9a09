#pragma once

#include <string>
#include <vector>

namespace vsys {

// CSV conventions: header row, comma separators, LF line endings, doubles
// printed with 17 significant digits so that read -> write round-trips are
// byte identical.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Canonical float formatting ("%.17g").
std::string format_double(double v);

std::string to_csv(const CsvTable& t);
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

// Git-style content hash of a byte string: sha1("blob <len>\0" + data).
std::string git_blob_sha1(const std::string& data);

}  // namespace vsys
