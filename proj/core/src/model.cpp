#include "igb/model.hpp"

#include <algorithm>

#include "igb/error.hpp"

namespace igb {

double Increment::operator()(Point x) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t(x);
  return step * (sum / static_cast<double>(trees.size()));
}

std::size_t EnsembleModel::tree_count() const {
  std::size_t n = 0;
  for (const auto& inc : increments_) n += inc.trees.size();
  return n;
}

double EnsembleModel::evaluate_prefix(Point x, std::size_t count) const {
  double value = base_;
  const std::size_t end = std::min(count, increments_.size());
  for (std::size_t k = 0; k < end; ++k) value += increments_[k](x);
  return value;
}

void EnsembleModel::append(double step, std::vector<TreeFunction> trees) {
  if (trees.empty()) throw InputError("EnsembleModel::append: empty increment");
  if (!(step > 0.0)) throw InputError("EnsembleModel::append: step must be positive");
  increments_.push_back(Increment{step, std::move(trees)});
}

void EnsembleModel::append(double step, TreeFunction tree) {
  std::vector<TreeFunction> trees;
  trees.push_back(std::move(tree));
  append(step, std::move(trees));
}

double evaluate_model(const EnsembleModel& model, Point x) { return model(x); }

}  // namespace igb
