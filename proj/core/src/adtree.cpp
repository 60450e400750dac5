#include "praa/adtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "praa/error.hpp"

namespace praa {
namespace {

constexpr const char* kModule = "adtree";
constexpr double kSmoothing = 1.0;

std::string format_number(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double prediction(double positive, double negative) {
  return 0.5 * std::log((positive + kSmoothing) / (negative + kSmoothing));
}

double z_value(double pos_c, double neg_c, double pos_nc, double neg_nc,
               double outside) {
  return 2.0 * (std::sqrt(pos_c * neg_c) + std::sqrt(pos_nc * neg_nc)) +
         outside;
}

struct Candidate {
  double z = std::numeric_limits<double>::infinity();
  std::size_t node = 0;
  Condition condition;
};

struct ColumnOrder {
  // Training positions sorted by value, and the values themselves.
  std::vector<std::size_t> positions;
  std::vector<double> values;
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    parts.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return parts;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DataError(kModule, "bad number '" + text + "' in tree file");
  }
  if (used != text.size()) {
    throw DataError(kModule, "bad number '" + text + "' in tree file");
  }
  return v;
}

std::size_t parse_index(const std::string& text) {
  const double v = parse_double(text);
  if (v < 0 || v != std::floor(v)) {
    throw DataError(kModule, "bad index '" + text + "' in tree file");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::optional<bool> Condition::test(const Dataset::Row& row) const {
  const auto& cell = row[attribute];
  if (is_missing(cell)) return std::nullopt;
  if (op == Op::kEquals) return std::get<std::string>(cell) == label;
  return numeric_value(cell) < threshold;
}

std::string Condition::render(std::span<const std::string> names,
                              bool holds) const {
  const std::string& name = names[attribute];
  if (op == Op::kEquals) return name + (holds ? " = " : " != ") + label;
  return name + (holds ? " < " : " >= ") + format_number(threshold, 6);
}

AdTree train_adtree(const Dataset& data, std::span<const std::size_t> rows,
                    const TrainOptions& options) {
  if (rows.empty()) throw DataError(kModule, "no training rows");
  if (options.iterations < 1) throw ConfigError("adtree: iterations must be >= 1");

  std::vector<std::size_t> features;
  if (options.features) {
    features = *options.features;
  } else {
    features.resize(data.feature_count());
    std::iota(features.begin(), features.end(), std::size_t{0});
  }
  std::sort(features.begin(), features.end());
  for (std::size_t f : features) {
    if (f >= data.feature_count()) {
      throw ConfigError("adtree: feature index out of range");
    }
    for (std::size_t r : rows) {
      if (data.missing(r, f)) {
        throw DataError(kModule, "training data has a missing value in column '" +
                                     data.schema()[f].name +
                                     "'; impute before training");
      }
    }
  }

  AdTree tree;
  for (const auto& attr : data.schema()) tree.attribute_names.push_back(attr.name);
  const auto& labels = data.class_labels();
  const std::string positive = options.positive_label.value_or(
      std::get<std::string>(data.cell(rows.front(), data.decision_column())));
  if (positive != labels[0] && positive != labels[1]) {
    throw ConfigError("adtree: unknown positive label '" + positive + "'");
  }
  tree.labels = {positive, positive == labels[0] ? labels[1] : labels[0]};

  const std::size_t m = rows.size();
  std::vector<double> y(m);
  std::vector<double> w(m, 1.0);
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const auto& label =
        std::get<std::string>(data.cell(rows[t], data.decision_column()));
    y[t] = label == positive ? 1.0 : -1.0;
    (y[t] > 0 ? pos : neg) += 1.0;
  }
  tree.root = prediction(pos, neg);
  if (pos == 0.0 || neg == 0.0) {
    tree.warning = "training rows contain a single class; tree has only a root";
    return tree;
  }
  for (std::size_t t = 0; t < m; ++t) w[t] *= std::exp(-y[t] * tree.root);

  std::map<std::size_t, ColumnOrder> orders;
  for (std::size_t f : features) {
    if (data.schema()[f].kind == Kind::kCategorical) continue;
    ColumnOrder order;
    order.positions.resize(m);
    std::iota(order.positions.begin(), order.positions.end(), std::size_t{0});
    std::vector<double> values(m);
    for (std::size_t t = 0; t < m; ++t) values[t] = numeric_value(data.cell(rows[t], f));
    std::stable_sort(order.positions.begin(), order.positions.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    order.values.resize(m);
    for (std::size_t t = 0; t < m; ++t) order.values[t] = values[order.positions[t]];
    orders.emplace(f, std::move(order));
  }

  // reach[node][t]: training row t satisfies the precondition of node.
  std::vector<std::vector<std::uint8_t>> reach;
  reach.emplace_back(m, 1);

  for (std::size_t round = 0; round < options.iterations; ++round) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    Candidate best;
    for (std::size_t node = 0; node < reach.size(); ++node) {
      const auto& in = reach[node];
      double node_pos = 0.0;
      double node_neg = 0.0;
      std::size_t node_count = 0;
      for (std::size_t t = 0; t < m; ++t) {
        if (!in[t]) continue;
        ++node_count;
        (y[t] > 0 ? node_pos : node_neg) += w[t];
      }
      if (node_count < 2) continue;
      const double outside = total - node_pos - node_neg;

      for (std::size_t f : features) {
        auto consider = [&](double pc, double nc, Condition cond) {
          const double z = z_value(pc, nc, node_pos - pc, node_neg - nc, outside);
          if (z < best.z) {
            best.z = z;
            best.node = node;
            best.condition = std::move(cond);
          }
        };
        if (data.schema()[f].kind == Kind::kCategorical) {
          // label -> (weight+, weight-, count)
          std::map<std::string, std::array<double, 3>> by_label;
          for (std::size_t t = 0; t < m; ++t) {
            if (!in[t]) continue;
            auto& acc = by_label[std::get<std::string>(data.cell(rows[t], f))];
            (y[t] > 0 ? acc[0] : acc[1]) += w[t];
            acc[2] += 1.0;
          }
          for (const auto& [label, acc] : by_label) {
            if (acc[2] == static_cast<double>(node_count)) continue;
            Condition cond;
            cond.attribute = f;
            cond.op = Condition::Op::kEquals;
            cond.label = label;
            consider(acc[0], acc[1], std::move(cond));
          }
          continue;
        }
        const auto& order = orders.at(f);
        double less_pos = 0.0;
        double less_neg = 0.0;
        std::size_t less_count = 0;
        for (std::size_t j = 0; j + 1 < m; ++j) {
          const std::size_t t = order.positions[j];
          if (in[t]) {
            (y[t] > 0 ? less_pos : less_neg) += w[t];
            ++less_count;
          }
          if (order.values[j] == order.values[j + 1]) continue;
          if (less_count == 0 || less_count == node_count) continue;
          Condition cond;
          cond.attribute = f;
          cond.op = Condition::Op::kLess;
          cond.threshold = 0.5 * (order.values[j] + order.values[j + 1]);
          consider(less_pos, less_neg, std::move(cond));
        }
      }
    }
    if (!std::isfinite(best.z)) break;

    Splitter split;
    split.parent = best.node;
    split.condition = best.condition;
    std::array<double, 4> sums{};  // true+, true-, false+, false-
    std::vector<std::uint8_t> in_true(m, 0);
    std::vector<std::uint8_t> in_false(m, 0);
    for (std::size_t t = 0; t < m; ++t) {
      if (!reach[best.node][t]) continue;
      const bool holds = *split.condition.test(data.rows()[rows[t]]);
      (holds ? in_true : in_false)[t] = 1;
      sums[(holds ? 0 : 2) + (y[t] > 0 ? 0 : 1)] += w[t];
    }
    split.true_value = prediction(sums[0], sums[1]);
    split.false_value = prediction(sums[2], sums[3]);
    for (std::size_t t = 0; t < m; ++t) {
      if (in_true[t]) w[t] *= std::exp(-y[t] * split.true_value);
      if (in_false[t]) w[t] *= std::exp(-y[t] * split.false_value);
    }
    tree.splitters.push_back(std::move(split));
    reach.push_back(std::move(in_true));
    reach.push_back(std::move(in_false));
    ++tree.iterations;
  }
  return tree;
}

AdTree train_adtree(const Dataset& data, const TrainOptions& options) {
  std::vector<std::size_t> rows(data.row_count());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return train_adtree(data, rows, options);
}

Margin score(const AdTree& tree, const Dataset::Row& row) {
  Margin margin;
  margin.score = tree.root;
  std::vector<std::uint8_t> reached(2 * tree.splitters.size() + 1, 0);
  reached[0] = 1;
  for (std::size_t s = 0; s < tree.splitters.size(); ++s) {
    const auto& split = tree.splitters[s];
    if (!reached[split.parent]) continue;
    const auto holds = split.condition.test(row);
    if (!holds) continue;  // missing: no contribution, subtree unreached
    margin.score += *holds ? split.true_value : split.false_value;
    reached[*holds ? true_child(s) : false_child(s)] = 1;
  }
  margin.positive = margin.score > 0.0;
  margin.label = tree.labels[margin.positive ? 0 : 1];
  return margin;
}

std::vector<Rule> extract_rules(const AdTree& tree) {
  std::vector<std::vector<std::size_t>> children(2 * tree.splitters.size() + 1);
  for (std::size_t s = 0; s < tree.splitters.size(); ++s) {
    children[tree.splitters[s].parent].push_back(s);
  }
  std::vector<Rule> rules;
  std::vector<RuleStep> path;
  auto walk = [&](auto&& self, std::size_t node, double total) -> void {
    if (children[node].empty()) {
      Rule rule;
      rule.steps = path;
      rule.score = total;
      std::string text;
      for (const auto& step : path) {
        if (!text.empty()) text += " AND ";
        text += tree.splitters[step.splitter].condition.render(tree.attribute_names,
                                                               step.holds);
      }
      if (text.empty()) text = "TRUE";
      rule.text = text + " => score " + format_number(total, 6);
      rules.push_back(std::move(rule));
      return;
    }
    for (std::size_t s : children[node]) {
      const auto& split = tree.splitters[s];
      for (bool holds : {true, false}) {
        const double value = holds ? split.true_value : split.false_value;
        path.push_back({s, holds, value});
        self(self, holds ? true_child(s) : false_child(s), total + value);
        path.pop_back();
      }
    }
  };
  walk(walk, 0, tree.root);
  return rules;
}

void write_rules(std::ostream& out, const std::vector<Rule>& rules) {
  for (const auto& rule : rules) out << rule.text << '\n';
}

// Format (tab separated):
//   adtree  1
//   labels  <positive>  <negative>
//   attributes  <name>...
//   root  <value>
//   iterations  <count>
//   node  <id>  <parent>  <attribute>  lt|eq  <threshold|label>  <true>  <false>
void write_tree(std::ostream& out, const AdTree& tree) {
  out << "# adtree: labels[0] scores positive; node lines are\n"
         "# id, parent prediction node, attribute, op, operand, true, false\n";
  out << "adtree\t1\n";
  out << "labels\t" << tree.labels[0] << '\t' << tree.labels[1] << '\n';
  out << "attributes";
  for (const auto& name : tree.attribute_names) out << '\t' << name;
  out << '\n';
  out << "root\t" << format_number(tree.root, 17) << '\n';
  out << "iterations\t" << tree.iterations << '\n';
  for (std::size_t s = 0; s < tree.splitters.size(); ++s) {
    const auto& split = tree.splitters[s];
    const auto& cond = split.condition;
    out << "node\t" << s << '\t' << split.parent << '\t' << cond.attribute << '\t'
        << (cond.op == Condition::Op::kLess ? "lt" : "eq") << '\t'
        << (cond.op == Condition::Op::kLess ? format_number(cond.threshold, 17)
                                            : cond.label)
        << '\t' << format_number(split.true_value, 17) << '\t'
        << format_number(split.false_value, 17) << '\n';
  }
}

AdTree read_tree(std::istream& in) {
  AdTree tree;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto parts = split_tabs(line);
    const auto& key = parts[0];
    if (key == "adtree") {
      if (parts.size() != 2 || parts[1] != "1") {
        throw DataError(kModule, "unsupported tree format version");
      }
      header = true;
    } else if (key == "labels" && parts.size() == 3) {
      tree.labels = {parts[1], parts[2]};
    } else if (key == "attributes") {
      tree.attribute_names.assign(parts.begin() + 1, parts.end());
    } else if (key == "root" && parts.size() == 2) {
      tree.root = parse_double(parts[1]);
    } else if (key == "iterations" && parts.size() == 2) {
      tree.iterations = parse_index(parts[1]);
    } else if (key == "node" && parts.size() == 8) {
      if (parse_index(parts[1]) != tree.splitters.size()) {
        throw DataError(kModule, "node ids must be consecutive from 0");
      }
      Splitter split;
      split.parent = parse_index(parts[2]);
      if (split.parent > 2 * tree.splitters.size()) {
        throw DataError(kModule, "node " + parts[1] + " refers to a later parent");
      }
      split.condition.attribute = parse_index(parts[3]);
      if (parts[4] == "lt") {
        split.condition.op = Condition::Op::kLess;
        split.condition.threshold = parse_double(parts[5]);
      } else if (parts[4] == "eq") {
        split.condition.op = Condition::Op::kEquals;
        split.condition.label = parts[5];
      } else {
        throw DataError(kModule, "unknown condition op '" + parts[4] + "'");
      }
      split.true_value = parse_double(parts[6]);
      split.false_value = parse_double(parts[7]);
      tree.splitters.push_back(std::move(split));
    } else {
      throw DataError(kModule, "unrecognized tree line: " + line);
    }
  }
  if (!header) throw DataError(kModule, "missing 'adtree' header line");
  for (const auto& split : tree.splitters) {
    if (split.condition.attribute >= tree.attribute_names.size()) {
      throw DataError(kModule, "condition attribute out of range");
    }
  }
  return tree;
}

}  // namespace praa
