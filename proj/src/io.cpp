#include "dynmap/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

namespace dynmap::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line, const std::string& source, std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          field += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && trim(field).empty()) {
      quoted = true;
      was_quoted = true;
      field.clear();
    } else if (c == ',') {
      out.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) fail(ErrorKind::parse, source + ":" + std::to_string(lineno) + ": unterminated quoted field");
  out.push_back(was_quoted ? field : trim(field));
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::parse, "cannot open '" + path + "'");
  return in;
}

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  fail(ErrorKind::config, "column '" + name + "' not found");
}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_line(line, source, lineno);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      fail(ErrorKind::parse, where(source, lineno) + "expected " + std::to_string(t.header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  if (!have_header) fail(ErrorKind::parse, source + ": empty file");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in = open(path);
  return read_csv(in, path);
}

double parse_double(const std::string& s, const std::string& source, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last != first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  const bool empty = first == last;
  if (!empty && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (empty || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    fail(ErrorKind::parse, where(source, line) + "'" + s + "' is not a finite number");
  }
  return v;
}

std::vector<EdgeRow> read_edgelist(const std::string& path, const EdgeColumns& cols) {
  const CsvTable t = read_csv_file(path);
  const std::size_t cp = t.column(cols.period);
  const std::size_t ci = t.column(cols.id_i);
  const std::size_t cj = t.column(cols.id_j);
  const std::size_t cs = t.column(cols.score);
  std::vector<EdgeRow> rows;
  rows.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    rows.push_back({f[cp], f[ci], f[cj], parse_double(f[cs], path, t.lines[r])});
  }
  return rows;
}

void write_edgelist(std::ostream& out, const std::vector<EdgeRow>& rows) {
  out << "period,id_i,id_j,score\n";
  for (const EdgeRow& r : rows) {
    out << quote(r.period) << ',' << quote(r.id_i) << ',' << quote(r.id_j) << ',' << format_double(r.score) << '\n';
  }
}

void write_matrices(std::ostream& out, const DissimilaritySequence& d) {
  out << "period,row_label,col_label,value\n";
  const Index n = d.objects();
  for (std::size_t t = 0; t < d.periods_count(); ++t) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        out << quote(d.periods[t]) << ',' << quote(d.labels[static_cast<std::size_t>(i)]) << ','
            << quote(d.labels[static_cast<std::size_t>(j)]) << ',' << format_double(d.matrices[t](i, j)) << '\n';
      }
    }
  }
}

DissimilaritySequence read_matrices(const std::string& path) {
  const CsvTable t = read_csv_file(path);
  const std::size_t cp = t.column("period");
  const std::size_t cr = t.column("row_label");
  const std::size_t cc = t.column("col_label");
  const std::size_t cv = t.column("value");

  std::vector<std::string> periods;
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> pidx;
  std::map<std::string, std::size_t> lidx;
  auto intern = [](const std::string& key, std::vector<std::string>& list, std::map<std::string, std::size_t>& idx) {
    auto [it, inserted] = idx.emplace(key, list.size());
    if (inserted) list.push_back(key);
    return it->second;
  };
  struct Entry {
    std::size_t p, i, j;
    double v;
    std::size_t line;
  };
  std::vector<Entry> entries;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    const std::size_t p = intern(f[cp], periods, pidx);
    const std::size_t i = intern(f[cr], labels, lidx);
    const std::size_t j = intern(f[cc], labels, lidx);
    entries.push_back({p, i, j, parse_double(f[cv], path, t.lines[r]), t.lines[r]});
  }
  if (periods.empty()) fail(ErrorKind::data, path + ": no matrix entries");

  const Index n = static_cast<Index>(labels.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Matrix> mats(periods.size(), Matrix::Constant(n, n, nan));
  for (Matrix& m : mats) m.diagonal().setZero();
  for (const Entry& e : entries) {
    Matrix& m = mats[e.p];
    const Index i = static_cast<Index>(e.i);
    const Index j = static_cast<Index>(e.j);
    if (i == j) {
      if (std::abs(e.v) > 1e-9) fail(ErrorKind::data, where(path, e.line) + "nonzero diagonal entry");
      continue;
    }
    if (!std::isnan(m(i, j)) && m(i, j) != e.v) {
      fail(ErrorKind::data, where(path, e.line) + "conflicting values for pair (" + labels[e.i] + ", " + labels[e.j] +
                                ") in period " + periods[e.p]);
    }
    m(i, j) = m(j, i) = e.v;
  }
  for (std::size_t p = 0; p < mats.size(); ++p) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        if (std::isnan(mats[p](i, j))) {
          fail(ErrorKind::data, path + ": missing value for pair (" + labels[static_cast<std::size_t>(i)] + ", " +
                                    labels[static_cast<std::size_t>(j)] + ") in period " + periods[p]);
        }
      }
    }
  }
  DissimilaritySequence d;
  d.matrices = std::move(mats);
  d.labels = std::move(labels);
  d.periods = std::move(periods);
  d.validate();
  return d;
}

void write_mask(std::ostream& out, const InclusionMask& mask, const std::vector<std::string>& periods,
                const std::vector<std::string>& labels) {
  out << "period,label,included\n";
  for (std::size_t t = 0; t < mask.included.size(); ++t) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out << quote(periods[t]) << ',' << quote(labels[i]) << ',' << static_cast<int>(mask.included[t][i]) << '\n';
    }
  }
}

InclusionMask read_mask(const std::string& path, const std::vector<std::string>& periods,
                        const std::vector<std::string>& labels) {
  const CsvTable t = read_csv_file(path);
  const std::size_t cp = t.column("period");
  const std::size_t cl = t.column("label");
  const std::size_t ci = t.column("included");
  std::map<std::string, std::size_t> pidx;
  std::map<std::string, std::size_t> lidx;
  for (std::size_t k = 0; k < periods.size(); ++k) pidx[periods[k]] = k;
  for (std::size_t k = 0; k < labels.size(); ++k) lidx[labels[k]] = k;

  InclusionMask mask;
  mask.included.assign(periods.size(), std::vector<unsigned char>(labels.size(), 2));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    auto p = pidx.find(f[cp]);
    auto l = lidx.find(f[cl]);
    if (p == pidx.end()) fail(ErrorKind::data, where(path, t.lines[r]) + "unknown period '" + f[cp] + "'");
    if (l == lidx.end()) fail(ErrorKind::data, where(path, t.lines[r]) + "unknown label '" + f[cl] + "'");
    if (f[ci] != "0" && f[ci] != "1") fail(ErrorKind::parse, where(path, t.lines[r]) + "included must be 0 or 1");
    mask.included[p->second][l->second] = f[ci] == "1" ? 1 : 0;
  }
  for (std::size_t p = 0; p < periods.size(); ++p) {
    for (std::size_t l = 0; l < labels.size(); ++l) {
      if (mask.included[p][l] == 2) {
        fail(ErrorKind::data, path + ": no entry for label '" + labels[l] + "' in period " + periods[p]);
      }
    }
  }
  mask.validate(periods.size(), static_cast<Index>(labels.size()));
  return mask;
}

void write_coordinates(std::ostream& out, const ConfigurationSequence& x, const std::vector<std::string>& periods,
                       const std::vector<std::string>& labels) {
  out << "period,label";
  for (Index k = 0; k < x.dims(); ++k) out << ",dim" << (k + 1);
  out << '\n';
  for (std::size_t t = 0; t < x.periods_count(); ++t) {
    for (Index i = 0; i < x.objects(); ++i) {
      out << quote(periods[t]) << ',' << quote(labels[static_cast<std::size_t>(i)]);
      for (Index k = 0; k < x.dims(); ++k) out << ',' << format_double(x.coords[t](i, k));
      out << '\n';
    }
  }
}

LabeledConfiguration read_coordinates(const std::string& path) {
  const CsvTable t = read_csv_file(path);
  const std::size_t cp = t.column("period");
  const std::size_t cl = t.column("label");
  std::vector<std::size_t> dims;
  for (int k = 1;; ++k) {
    const std::string name = "dim" + std::to_string(k);
    bool found = false;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (t.header[c] == name) {
        dims.push_back(c);
        found = true;
      }
    }
    if (!found) break;
  }
  if (dims.empty()) fail(ErrorKind::parse, path + ": no dim1 column");

  LabeledConfiguration lc;
  std::map<std::string, std::size_t> pidx;
  std::map<std::string, std::size_t> lidx;
  for (const auto& f : t.rows) {
    if (pidx.emplace(f[cp], lc.periods.size()).second) lc.periods.push_back(f[cp]);
    if (lidx.emplace(f[cl], lc.labels.size()).second) lc.labels.push_back(f[cl]);
  }
  const Index n = static_cast<Index>(lc.labels.size());
  const Index d = static_cast<Index>(dims.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  lc.x.coords.assign(lc.periods.size(), Matrix::Constant(n, d, nan));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    Matrix& m = lc.x.coords[pidx.at(f[cp])];
    const Index i = static_cast<Index>(lidx.at(f[cl]));
    if (!std::isnan(m(i, 0))) fail(ErrorKind::data, where(path, t.lines[r]) + "duplicate coordinates for '" + f[cl] + "'");
    for (Index k = 0; k < d; ++k) m(i, k) = parse_double(f[dims[static_cast<std::size_t>(k)]], path, t.lines[r]);
  }
  for (std::size_t p = 0; p < lc.periods.size(); ++p) {
    for (Index i = 0; i < n; ++i) {
      if (std::isnan(lc.x.coords[p](i, 0))) {
        fail(ErrorKind::data, path + ": no coordinates for '" + lc.labels[static_cast<std::size_t>(i)] +
                                  "' in period " + lc.periods[p]);
      }
    }
  }
  return lc;
}

void Manifest::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos) {
    fail(ErrorKind::config, "invalid manifest entry '" + key + "'");
  }
  for (auto& kv : entries_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

const std::string& Manifest::get(const std::string& key) const {
  for (const auto& kv : entries_) {
    if (kv.first == key) return kv.second;
  }
  fail(ErrorKind::config, "manifest has no key '" + key + "'");
}

bool Manifest::has(const std::string& key) const {
  for (const auto& kv : entries_) {
    if (kv.first == key) return true;
  }
  return false;
}

void Manifest::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

Manifest Manifest::read(std::istream& in) {
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::parse, "manifest line " + std::to_string(lineno) + " has no '='");
    m.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return m;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorKind::config, "cannot format number");
  return std::string(buf, ptr);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::config, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::config, "failed writing '" + path + "'");
}

}  // namespace dynmap::io
