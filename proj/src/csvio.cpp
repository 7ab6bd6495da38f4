#include "navfuse/csvio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "navfuse/errors.hpp"

namespace navfuse::io {

namespace {

double parse_double(const std::string& field, const std::string& path,
                    int lineno) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError(path + ":" + std::to_string(lineno) +
                    ": not a number: " + field);
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ',';
    out += parts[i];
  }
  return out;
}

// Reads a CSV file, checks the header verbatim, returns numeric rows.
std::vector<std::vector<double>> read_rows(const std::string& path,
                                           const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty csv file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw DataError(path + ": unexpected header `" + line + "`, expected `" +
                    expected_header + "`");
  }
  const std::size_t n_cols = split_line(expected_header).size();
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != n_cols) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(n_cols) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(n_cols);
    for (std::size_t i = 0; i < n_cols; ++i) {
      row[i] = parse_double(fields[i], path, lineno);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv file: " + path);
  return out;
}

void write_row(std::ofstream& out, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    out << format_double(row[i]);
  }
  out << '\n';
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_imu_csv(const std::string& path,
                   const std::vector<ins::ImuSample>& samples) {
  auto out = open_out(path);
  out << "t,fx,fy,fz,wx,wy,wz\n";
  for (const auto& s : samples) {
    write_row(out, {s.time, s.specific_force(0), s.specific_force(1),
                    s.specific_force(2), s.angular_rate(0), s.angular_rate(1),
                    s.angular_rate(2)});
  }
}

std::vector<ins::ImuSample> read_imu_csv(const std::string& path) {
  const auto rows = read_rows(path, "t,fx,fy,fz,wx,wy,wz");
  std::vector<ins::ImuSample> samples;
  samples.reserve(rows.size());
  for (const auto& r : rows) {
    ins::ImuSample s;
    s.time = r[0];
    s.specific_force = Vec3(r[1], r[2], r[3]);
    s.angular_rate = Vec3(r[4], r[5], r[6]);
    samples.push_back(s);
  }
  return samples;
}

void write_dvl_csv(const std::string& path,
                   const std::vector<dvl::DvlBeams>& epochs) {
  auto out = open_out(path);
  out << "t,b1,b2,b3,b4,v1_valid,v2_valid,v3_valid,v4_valid\n";
  for (const auto& e : epochs) {
    write_row(out,
              {e.time, e.along_beam(0), e.along_beam(1), e.along_beam(2),
               e.along_beam(3), e.valid[0] ? 1.0 : 0.0, e.valid[1] ? 1.0 : 0.0,
               e.valid[2] ? 1.0 : 0.0, e.valid[3] ? 1.0 : 0.0});
  }
}

std::vector<dvl::DvlBeams> read_dvl_csv(const std::string& path) {
  const auto rows =
      read_rows(path, "t,b1,b2,b3,b4,v1_valid,v2_valid,v3_valid,v4_valid");
  std::vector<dvl::DvlBeams> epochs;
  epochs.reserve(rows.size());
  for (const auto& r : rows) {
    dvl::DvlBeams e;
    e.time = r[0];
    e.along_beam = Vec4(r[1], r[2], r[3], r[4]);
    for (int i = 0; i < 4; ++i) {
      if (r[5 + i] != 0.0 && r[5 + i] != 1.0) {
        throw DataError(path + ": beam validity flags must be 0 or 1");
      }
      e.valid[static_cast<std::size_t>(i)] = r[5 + i] != 0.0;
    }
    epochs.push_back(e);
  }
  return epochs;
}

void write_truth_csv(const std::string& path,
                     const std::vector<metrics::TruthPoint>& points) {
  auto out = open_out(path);
  out << "t,pn,pe,pd,vn,ve,vd,qw,qx,qy,qz\n";
  for (const auto& p : points) {
    write_row(out, {p.time,
                    p.position(0), p.position(1), p.position(2),
                    p.velocity_nav(0), p.velocity_nav(1), p.velocity_nav(2),
                    p.attitude.w(), p.attitude.x(), p.attitude.y(),
                    p.attitude.z()});
  }
}

std::vector<metrics::TruthPoint> read_truth_csv(const std::string& path) {
  const auto rows = read_rows(path, "t,pn,pe,pd,vn,ve,vd,qw,qx,qy,qz");
  std::vector<metrics::TruthPoint> points;
  points.reserve(rows.size());
  for (const auto& r : rows) {
    metrics::TruthPoint p;
    p.time = r[0];
    p.position = Vec3(r[1], r[2], r[3]);
    p.velocity_nav = Vec3(r[4], r[5], r[6]);
    p.attitude = Quat(r[7], r[8], r[9], r[10]);
    points.push_back(p);
  }
  return points;
}

void write_run_csv(const std::string& path, const ekf::FilterRun& run) {
  auto out = open_out(path);
  out << "t";
  for (int i = 0; i < ekf::kStateDim; ++i) out << ",x" << i;
  for (int i = 0; i < ekf::kStateDim; ++i) out << ",pdiag" << i;
  out << ",innov0,innov1,innov2,vn,ve,vd\n";
  for (const auto& e : run.epochs) {
    std::vector<double> row;
    row.push_back(e.time);
    for (int i = 0; i < ekf::kStateDim; ++i) row.push_back(e.dx(i));
    for (int i = 0; i < ekf::kStateDim; ++i) row.push_back(e.p_diag(i));
    for (int i = 0; i < 3; ++i) row.push_back(e.innovation(i));
    for (int i = 0; i < 3; ++i) row.push_back(e.nav.velocity(i));
    write_row(out, row);
  }
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  if (header.empty()) throw std::invalid_argument("csv table needs a header");
  auto out = open_out(path);
  out << join(header) << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw std::invalid_argument("csv table row width mismatch");
    }
    write_row(out, row);
  }
}

std::vector<std::vector<double>> read_table_csv(
    const std::string& path, std::vector<std::string>* header_out) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty csv file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  if (header_out != nullptr) *header_out = header;

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": field count differs from header");
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row[i] = parse_double(fields[i], path, lineno);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace navfuse::io
