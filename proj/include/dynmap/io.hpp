#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dynmap/preprocess.hpp"
#include "dynmap/types.hpp"

namespace dynmap::io {

/// Parsed CSV with a header row. Fields are trimmed; double-quoted fields may
/// contain commas and doubled quotes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line of each row

  std::size_t column(const std::string& name) const;  // throws Error(config)
};

CsvTable read_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::string& path);

/// Parses a finite double; throws Error(parse) naming `source` and `line`.
double parse_double(const std::string& s, const std::string& source, std::size_t line);

struct EdgeColumns {
  std::string period = "period";
  std::string id_i = "id_i";
  std::string id_j = "id_j";
  std::string score = "score";
};

std::vector<EdgeRow> read_edgelist(const std::string& path, const EdgeColumns& cols);
void write_edgelist(std::ostream& out, const std::vector<EdgeRow>& rows);

/// Long format `period,row_label,col_label,value`. Only the upper triangle is
/// written; reading accepts either triangle and requires every pair.
void write_matrices(std::ostream& out, const DissimilaritySequence& d);
DissimilaritySequence read_matrices(const std::string& path);

/// `period,label,included`.
void write_mask(std::ostream& out, const InclusionMask& mask, const std::vector<std::string>& periods,
                const std::vector<std::string>& labels);
InclusionMask read_mask(const std::string& path, const std::vector<std::string>& periods,
                        const std::vector<std::string>& labels);

/// `period,label,dim1,...,dimd`.
struct LabeledConfiguration {
  ConfigurationSequence x;
  std::vector<std::string> labels;
  std::vector<std::string> periods;
};

void write_coordinates(std::ostream& out, const ConfigurationSequence& x, const std::vector<std::string>& periods,
                       const std::vector<std::string>& labels);
LabeledConfiguration read_coordinates(const std::string& path);

/// Ordered key=value text file.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(std::ostream& out) const;
  static Manifest read(std::istream& in);

  bool operator==(const Manifest& other) const { return entries_ == other.entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest round-tripping decimal form.
std::string format_double(double v);

/// Writes `text` to `path`, or to standard output when path is "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace dynmap::io
