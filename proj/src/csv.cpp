#include "fqr/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "fqr/sampling.hpp"

namespace fqr {

std::string formatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parseNumber(const std::string& s, const std::string& path, size_t line_no) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": malformed number '" + s + "'");
  }
}

}  // namespace

FunctionalDataset readCurvesCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ":1: empty file");
  const auto header = splitCsvLine(line);
  if (header.size() < 3 || header[0] != "t") {
    throw std::runtime_error(path + ":1: expected header 't,<t_1>,...,<t_m>'");
  }
  const size_t m = header.size() - 1;
  Eigen::VectorXd grid(static_cast<Eigen::Index>(m));
  for (size_t j = 0; j < m; ++j) grid[static_cast<Eigen::Index>(j)] = parseNumber(header[j + 1], path, 1);

  std::vector<std::string> ids;
  std::vector<Eigen::VectorXd> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = splitCsvLine(line);
    if (fields.size() != m + 1) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(m + 1) + " fields, got " +
                               std::to_string(fields.size()));
    }
    ids.push_back(fields[0]);
    Eigen::VectorXd row(static_cast<Eigen::Index>(m));
    for (size_t j = 0; j < m; ++j) {
      row[static_cast<Eigen::Index>(j)] = parseNumber(fields[j + 1], path, line_no);
    }
    rows.push_back(std::move(row));
  }

  FunctionalDataset out;
  out.grid = grid;
  out.curves.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  for (size_t i = 0; i < rows.size(); ++i) {
    out.curves.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  out.ids = std::move(ids);
  out.validate();
  return out;
}

void writeCurvesCsv(const std::string& path, const FunctionalDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t";
  for (Eigen::Index j = 0; j < dataset.grid.size(); ++j) out << ',' << formatDouble(dataset.grid[j]);
  out << '\n';
  for (Eigen::Index i = 0; i < dataset.sampleCount(); ++i) {
    out << (i < static_cast<Eigen::Index>(dataset.ids.size()) ? dataset.ids[i]
                                                              : std::to_string(i));
    for (Eigen::Index j = 0; j < dataset.gridSize(); ++j) {
      out << ',' << formatDouble(dataset.curves(i, j));
    }
    out << '\n';
  }
}

void attachResponsesCsv(FunctionalDataset& dataset, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ":1: empty file");
  const auto header = splitCsvLine(line);
  if (header.size() != 2 || header[0] != "id" || header[1] != "y") {
    throw std::runtime_error(path + ":1: expected header 'id,y'");
  }
  std::unordered_map<std::string, double> table;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = splitCsvLine(line);
    if (fields.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'id,y'");
    }
    if (!table.emplace(fields[0], parseNumber(fields[1], path, line_no)).second) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate id '" +
                               fields[0] + "'");
    }
  }
  if (dataset.ids.size() != static_cast<size_t>(dataset.sampleCount())) {
    throw std::runtime_error("attachResponsesCsv: dataset has no ids to match against");
  }
  Eigen::VectorXd y(dataset.sampleCount());
  for (Eigen::Index i = 0; i < dataset.sampleCount(); ++i) {
    const auto it = table.find(dataset.ids[i]);
    if (it == table.end()) {
      throw std::runtime_error("attachResponsesCsv: no response for id '" + dataset.ids[i] + "'");
    }
    y[i] = it->second;
  }
  dataset.responses = y;
}

void writeResponsesCsv(const std::string& path, const FunctionalDataset& dataset) {
  if (!dataset.responses) throw std::runtime_error("writeResponsesCsv: no responses");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "id,y\n";
  for (Eigen::Index i = 0; i < dataset.sampleCount(); ++i) {
    out << (i < static_cast<Eigen::Index>(dataset.ids.size()) ? dataset.ids[i]
                                                              : std::to_string(i))
        << ',' << formatDouble((*dataset.responses)[i]) << '\n';
  }
}

void writePlanCsv(const std::string& path, const SubsamplePlan& plan) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "index,count,prob\n";
  for (size_t j = 0; j < plan.indices.size(); ++j) {
    out << plan.indices[j] << ',' << plan.counts[j] << ','
        << formatDouble(plan.probs[plan.indices[j]]) << '\n';
  }
}

}  // namespace fqr
