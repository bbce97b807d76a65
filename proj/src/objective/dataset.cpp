#include "gdlab/objective/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "gdlab/errors.hpp"

namespace gdlab::objective {

Dataset::Dataset(std::vector<Eigen::VectorXd> inputs, std::vector<Eigen::VectorXd> targets,
                 std::vector<double> weights)
    : inputs_(std::move(inputs)), targets_(std::move(targets)), weights_(std::move(weights)) {
  if (inputs_.empty()) throw ValidationError("dataset needs at least one sample");
  if (targets_.size() != inputs_.size() || weights_.size() != inputs_.size()) {
    throw ValidationError("dataset inputs, targets and weights must have equal counts");
  }
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    if (inputs_[i].size() != inputs_[0].size() || targets_[i].size() != targets_[0].size()) {
      throw ValidationError("dataset sample " + std::to_string(i) + " has inconsistent dimensions");
    }
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw ValidationError("dataset weights must be finite and nonnegative");
    }
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("dataset weights must sum to 1 (got " + std::to_string(total) + ")");
  }
}

Dataset Dataset::uniform(std::vector<Eigen::VectorXd> inputs, std::vector<Eigen::VectorXd> targets) {
  const std::size_t m = inputs.size();
  std::vector<double> w(m, m == 0 ? 0.0 : 1.0 / static_cast<double>(m));
  return Dataset(std::move(inputs), std::move(targets), std::move(w));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  return cells;
}

double parse_number(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ValidationError("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  }
  return v;
}

}  // namespace

Dataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset file " + path.string() + " is empty");
  const auto header = split_csv(line);
  std::vector<std::size_t> xcols, ycols;
  std::optional<std::size_t> wcol;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h == "weight") {
      wcol = c;
    } else if (!h.empty() && h[0] == 'x') {
      xcols.push_back(c);
    } else if (!h.empty() && h[0] == 'y') {
      ycols.push_back(c);
    } else {
      throw ValidationError("unknown dataset column '" + h + "'");
    }
  }
  if (xcols.empty() || ycols.empty()) throw ValidationError("dataset needs x and y columns");

  std::vector<Eigen::VectorXd> xs, ys;
  std::vector<double> ws;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells");
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(xcols.size()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(ycols.size()));
    for (std::size_t k = 0; k < xcols.size(); ++k) x(static_cast<Eigen::Index>(k)) = parse_number(cells[xcols[k]], line_no);
    for (std::size_t k = 0; k < ycols.size(); ++k) y(static_cast<Eigen::Index>(k)) = parse_number(cells[ycols[k]], line_no);
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
    if (wcol) ws.push_back(parse_number(cells[*wcol], line_no));
  }
  if (wcol) return Dataset(std::move(xs), std::move(ys), std::move(ws));
  return Dataset::uniform(std::move(xs), std::move(ys));
}

}  // namespace gdlab::objective
