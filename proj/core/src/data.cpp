#include "igb/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "igb/error.hpp"
#include "igb/format.hpp"

namespace igb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Config: return "config";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::NumericalBlowup: return "numerical_blowup";
    case ErrorKind::Unsupported: return "unsupported";
  }
  return "unknown";
}

PointSet::PointSet(std::size_t p, std::vector<double> coords)
    : p_(p), coords_(std::move(coords)) {
  if (p_ == 0) throw InputError("PointSet: dimension must be positive");
  if (coords_.size() % p_ != 0) throw InputError("PointSet: coordinate count not a multiple of p");
  n_ = coords_.size() / p_;
  if (n_ > std::numeric_limits<std::uint32_t>::max()) throw InputError("PointSet: too many points");
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const double v = coords_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("PointSet: feature x" + std::to_string(i % p_ + 1) + " of point " +
                       std::to_string(i / p_) + " outside [0,1]");
    }
  }

  order_.resize(n_ * p_);
  sorted_.resize(n_ * p_);
  rank_.resize(n_ * p_);
  for (std::size_t j = 0; j < p_; ++j) {
    auto ord = order_.begin() + static_cast<std::ptrdiff_t>(j * n_);
    std::iota(ord, ord + static_cast<std::ptrdiff_t>(n_), std::uint32_t{0});
    std::stable_sort(ord, ord + static_cast<std::ptrdiff_t>(n_),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return coords_[a * p_ + j] < coords_[b * p_ + j];
                     });
    for (std::size_t r = 0; r < n_; ++r) {
      const std::uint32_t i = order_[j * n_ + r];
      sorted_[j * n_ + r] = coords_[i * p_ + j];
      rank_[j * n_ + i] = static_cast<std::uint32_t>(r);
    }
  }
}

std::size_t PointSet::count_at_most(std::size_t j, double t) const {
  const auto s = sorted(j);
  return static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), t) - s.begin());
}

EmpiricalDistribution::EmpiricalDistribution(std::size_t p, std::vector<double> features,
                                             std::vector<double> y)
    : points_(p, std::move(features)), y_(std::move(y)) {
  if (points_.size() == 0) throw InputError("EmpiricalDistribution: need at least one sample");
  if (y_.size() != points_.size()) throw InputError("EmpiricalDistribution: label count mismatch");
  for (double v : y_) {
    if (!std::isfinite(v)) throw InputError("EmpiricalDistribution: non-finite response");
  }
}

EmpiricalDistribution EmpiricalDistribution::from_samples(std::span<const Sample> samples) {
  if (samples.empty()) throw InputError("EmpiricalDistribution: need at least one sample");
  const std::size_t p = samples.front().x.size();
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(samples.size() * p);
  ys.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.x.size() != p) throw InputError("EmpiricalDistribution: inconsistent feature count");
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.push_back(s.y);
  }
  return EmpiricalDistribution(p, std::move(xs), std::move(ys));
}

double restricted_moment(const EmpiricalDistribution& mu, const SampleFunction& g,
                         const Region& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (a.contains(mu.x(i))) sum += g(mu.x(i), mu.y(i));
  }
  return sum / static_cast<double>(mu.size());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("dataset line " + std::to_string(line_no) + ": cannot parse '" + s + "'");
  }
  return v;
}

}  // namespace

EmpiricalDistribution read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw InputError("dataset " + path.string() + " is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "y") {
    throw InputError("dataset header must be x1,...,xp,y");
  }
  const std::size_t p = header.size() - 1;
  for (std::size_t j = 0; j < p; ++j) {
    if (header[j] != "x" + std::to_string(j + 1)) {
      throw InputError("dataset header must be x1,...,xp,y (got '" + header[j] + "')");
    }
  }

  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != p + 1) {
      throw InputError("dataset line " + std::to_string(line_no) + ": expected " +
                       std::to_string(p + 1) + " fields");
    }
    for (std::size_t j = 0; j < p; ++j) {
      const double v = parse_double(cells[j], line_no);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError("dataset line " + std::to_string(line_no) + ": x" +
                         std::to_string(j + 1) + " outside [0,1]");
      }
      xs.push_back(v);
    }
    ys.push_back(parse_double(cells[p], line_no));
  }
  return EmpiricalDistribution(p, std::move(xs), std::move(ys));
}

void write_dataset_csv(const EmpiricalDistribution& mu, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  for (std::size_t j = 0; j < mu.dim(); ++j) out << 'x' << j + 1 << ',';
  out << "y\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (double v : mu.x(i)) out << format_double(v) << ',';
    out << format_double(mu.y(i)) << '\n';
  }
}

}  // namespace igb
