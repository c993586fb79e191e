#include "exreg/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace exreg {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    rows.push_back(split_line(line));
  }
  return rows;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad numeric field '" + s + "' in " + path.string());
  return v;
}

int parse_int(const std::string& s, const std::filesystem::path& path) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad integer field '" + s + "' in " + path.string());
  return v;
}

}  // namespace

void write_locations_csv(const std::filesystem::path& path,
                         const std::vector<Location>& locations) {
  std::string out = "id,x,y\n";
  for (std::size_t i = 0; i < locations.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(locations[i].x);
    out += ',';
    out += format_double(locations[i].y);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<Location> read_locations_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty() || rows[0].size() != 3)
    throw std::runtime_error("locations CSV: expected header id,x,y in " + path.string());
  std::vector<Location> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) throw std::runtime_error("locations CSV: bad row in " + path.string());
    if (parse_int(rows[r][0], path) != static_cast<int>(r - 1))
      throw std::runtime_error("locations CSV: ids must be 0..n-1 in file order");
    out.push_back(Location{parse_double(rows[r][1], path), parse_double(rows[r][2], path)});
  }
  return out;
}

void write_observations_csv(const std::filesystem::path& path, const ObservationSet& obs) {
  std::string out;
  for (long c = 0; c < obs.size(); ++c) {
    if (c) out += ',';
    out += std::to_string(c);
  }
  out += '\n';
  for (long r = 0; r < obs.observations(); ++r) {
    for (long c = 0; c < obs.size(); ++c) {
      if (c) out += ',';
      out += format_double(obs.data(r, c));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

ObservationSet read_observations_csv(const std::filesystem::path& path,
                                     const std::vector<Location>& locations, Margins margins) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw std::runtime_error("observations CSV: empty file " + path.string());
  const std::size_t n = rows[0].size();
  if (n != locations.size())
    throw std::runtime_error("observations CSV: column count does not match locations");
  ObservationSet obs;
  obs.locations = locations;
  obs.margins = margins;
  obs.data.resize(static_cast<long>(rows.size() - 1), static_cast<long>(n));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != n)
      throw std::runtime_error("observations CSV: ragged row in " + path.string());
    for (std::size_t c = 0; c < n; ++c)
      obs.data(static_cast<long>(r - 1), static_cast<long>(c)) = parse_double(rows[r][c], path);
  }
  obs.validate();
  return obs;
}

void write_square_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                             const std::vector<int>& ids) {
  if (m.rows() != m.cols() || m.rows() != static_cast<long>(ids.size()))
    throw std::invalid_argument("write_square_matrix_csv: shape mismatch");
  std::string out = "id";
  for (const int id : ids) {
    out += ',';
    out += std::to_string(id);
  }
  out += '\n';
  for (long r = 0; r < m.rows(); ++r) {
    out += std::to_string(ids[r]);
    for (long c = 0; c < m.cols(); ++c) {
      out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

Eigen::MatrixXd read_square_matrix_csv(const std::filesystem::path& path, std::vector<int>* ids) {
  const auto rows = read_rows(path);
  if (rows.size() < 2) throw std::runtime_error("matrix CSV: too short " + path.string());
  const long n = static_cast<long>(rows.size() - 1);
  if (static_cast<long>(rows[0].size()) != n + 1)
    throw std::runtime_error("matrix CSV: header/row mismatch " + path.string());
  Eigen::MatrixXd m(n, n);
  if (ids) ids->clear();
  for (long r = 0; r < n; ++r) {
    const auto& row = rows[r + 1];
    if (static_cast<long>(row.size()) != n + 1)
      throw std::runtime_error("matrix CSV: ragged row " + path.string());
    if (ids) ids->push_back(parse_int(row[0], path));
    for (long c = 0; c < n; ++c) m(r, c) = parse_double(row[c + 1], path);
  }
  return m;
}

void write_labels_csv(const std::filesystem::path& path, const Clustering& clustering) {
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < clustering.labels.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(clustering.labels[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

Clustering read_labels_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty() || rows[0].size() != 2)
    throw std::runtime_error("labels CSV: expected header id,label in " + path.string());
  Clustering c;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw std::runtime_error("labels CSV: bad row in " + path.string());
    if (parse_int(rows[r][0], path) != static_cast<int>(r - 1))
      throw std::runtime_error("labels CSV: ids must be 0..n-1 in file order");
    const int label = parse_int(rows[r][1], path);
    c.labels.push_back(label);
    c.k = std::max(c.k, label);
  }
  return c;
}

void write_values_csv(const std::filesystem::path& path, const std::string& column_name,
                      const std::vector<double>& values) {
  std::string out = "id," + column_name + "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(values[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<double> read_values_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty() || rows[0].size() != 2)
    throw std::runtime_error("values CSV: expected header id,<name> in " + path.string());
  std::vector<double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw std::runtime_error("values CSV: bad row in " + path.string());
    out.push_back(parse_double(rows[r][1], path));
  }
  return out;
}

}  // namespace exreg
