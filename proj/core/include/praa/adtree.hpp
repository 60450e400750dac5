#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "praa/dataset.hpp"

namespace praa {

// Single-attribute test: `attr = label` for categorical columns and
// `attr < threshold` for integer and real columns.
struct Condition {
  enum class Op { kEquals, kLess };

  std::size_t attribute = 0;
  Op op = Op::kLess;
  std::string label;
  double threshold = 0.0;

  // nullopt when the attribute cell is missing.
  std::optional<bool> test(const Dataset::Row& row) const;
  // Text of the condition on the given branch, e.g. "CHLST < 166" or
  // "CHLST >= 166".
  std::string render(std::span<const std::string> names, bool holds) const;
};

// Prediction nodes are numbered 0 (root), then 2s+1 / 2s+2 for the true /
// false child of splitter s.
struct Splitter {
  std::size_t parent = 0;
  Condition condition;
  double true_value = 0.0;
  double false_value = 0.0;
};

inline std::size_t true_child(std::size_t splitter) { return 2 * splitter + 1; }
inline std::size_t false_child(std::size_t splitter) { return 2 * splitter + 2; }

struct AdTree {
  double root = 0.0;
  std::vector<Splitter> splitters;  // topological: parents precede children
  std::size_t iterations = 0;       // boosting rounds that added a splitter
  // labels[0] is scored positive, labels[1] negative.
  std::array<std::string, 2> labels;
  std::vector<std::string> attribute_names;
  std::string warning;
};

struct Margin {
  double score = 0.0;
  bool positive = false;
  std::string label;
};

struct TrainOptions {
  std::size_t iterations = 10;
  // Feature columns the tree may split on; nullopt means all. An empty
  // list yields a root-only tree.
  std::optional<std::vector<std::size_t>> features;
  // Label mapped to +1; defaults to the first label among the training rows.
  std::optional<std::string> positive_label;
};

// Boosted ADTree construction with exponential weight updates and
// prediction values 0.5 * ln((W+ + 1) / (W- + 1)). Requires observed cells
// in every allowed feature of the training rows.
AdTree train_adtree(const Dataset& data, std::span<const std::size_t> rows,
                    const TrainOptions& options = {});
AdTree train_adtree(const Dataset& data, const TrainOptions& options = {});

Margin score(const AdTree& tree, const Dataset::Row& row);

struct RuleStep {
  std::size_t splitter = 0;
  bool holds = true;
  double contribution = 0.0;
};

struct Rule {
  std::vector<RuleStep> steps;
  double score = 0.0;  // root plus every contribution on the path
  std::string text;
};

// One rule per root-to-leaf prediction path.
std::vector<Rule> extract_rules(const AdTree& tree);
void write_rules(std::ostream& out, const std::vector<Rule>& rules);

void write_tree(std::ostream& out, const AdTree& tree);
AdTree read_tree(std::istream& in);

}  // namespace praa
