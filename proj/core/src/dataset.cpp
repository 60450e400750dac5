#include "praa/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "praa/error.hpp"

namespace praa {
namespace {

constexpr const char* kModule = "dataset";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Kind parse_kind(std::string_view keyword, const std::string& column) {
  if (keyword == "categorical") return Kind::kCategorical;
  if (keyword == "integer") return Kind::kInteger;
  if (keyword == "real") return Kind::kReal;
  if (keyword == "decision") return Kind::kDecision;
  throw DataError(kModule, "unknown kind '" + std::string(keyword) +
                               "' for column '" + column +
                               "' (allowed: categorical, integer, real, "
                               "decision)");
}

bool parse_integer(std::string_view text, std::int64_t& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && !text.empty();
}

bool parse_real(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && !text.empty() && std::isfinite(out);
}

bool needs_quoting(std::string_view s) {
  return s.find_first_of(",\"\n") != std::string_view::npos ||
         (!s.empty() && (s.front() == ' ' || s.back() == ' '));
}

}  // namespace

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::kCategorical:
      return "categorical";
    case Kind::kInteger:
      return "integer";
    case Kind::kReal:
      return "real";
    case Kind::kDecision:
      return "decision";
  }
  return "unknown";
}

double numeric_value(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) {
    return static_cast<double>(*i);
  }
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  throw std::logic_error("numeric_value: cell is not numeric");
}

std::string format_cell(const Cell& cell, std::string_view missing_marker) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Missing>) {
          return std::string(missing_marker);
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!needs_quoting(v)) return v;
          std::string quoted = "\"";
          for (char c : v) {
            if (c == '"') quoted += '"';
            quoted += c;
          }
          return quoted + '"';
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else {
          char buf[32];
          const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
          return std::string(buf, ptr);
        }
      },
      cell);
}

void validate_schema(const Schema& schema) {
  std::set<std::string> names;
  std::size_t decisions = 0;
  for (const auto& attr : schema) {
    if (attr.name.empty()) throw DataError(kModule, "empty column name");
    if (!names.insert(attr.name).second) {
      throw DataError(kModule, "duplicate column name '" + attr.name + "'");
    }
    if (attr.kind == Kind::kDecision) ++decisions;
  }
  if (decisions == 0) throw DataError(kModule, "no decision column");
  if (decisions > 1) throw DataError(kModule, "multiple decision columns");
  if (schema.back().kind != Kind::kDecision) {
    throw DataError(kModule, "decision column '" +
                                 std::find_if(schema.begin(), schema.end(),
                                              [](const AttributeSchema& a) {
                                                return a.kind ==
                                                       Kind::kDecision;
                                              })->name +
                                 "' must be the last column");
  }
  if (schema.size() < 2) {
    throw DataError(kModule, "schema needs at least one feature column");
  }
}

Dataset::Dataset(Schema schema, std::vector<Row> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  validate_schema(schema_);
  if (rows_.empty()) throw DataError(kModule, "dataset has no records");
  const std::size_t n = schema_.size();
  classes_.reserve(rows_.size());
  std::size_t label_count = 0;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (row.size() != n) {
      throw DataError(kModule, "row " + std::to_string(r + 1) + ": expected " +
                                   std::to_string(n) + " fields, got " +
                                   std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < n; ++c) {
      const auto& cell = row[c];
      const auto& attr = schema_[c];
      if (is_missing(cell)) {
        if (attr.kind == Kind::kDecision) {
          throw DataError(kModule, "row " + std::to_string(r + 1) +
                                       ": missing value in decision column '" +
                                       attr.name + "'");
        }
        continue;
      }
      bool ok = false;
      switch (attr.kind) {
        case Kind::kCategorical:
        case Kind::kDecision:
          ok = std::holds_alternative<std::string>(cell);
          break;
        case Kind::kInteger:
          ok = std::holds_alternative<std::int64_t>(cell);
          break;
        case Kind::kReal:
          ok = std::holds_alternative<double>(cell) &&
               std::isfinite(std::get<double>(cell));
          break;
      }
      if (!ok) {
        throw DataError(kModule, "row " + std::to_string(r + 1) +
                                     ": cell does not match kind '" +
                                     std::string(to_string(attr.kind)) +
                                     "' of column '" + attr.name + "'");
      }
    }
    const auto& label = std::get<std::string>(row.back());
    int cls = -1;
    for (std::size_t j = 0; j < label_count; ++j) {
      if (labels_[j] == label) cls = static_cast<int>(j);
    }
    if (cls < 0) {
      if (label_count == 2) {
        throw DataError(kModule,
                        "decision column '" + schema_.back().name +
                            "' has more than two labels (found '" + label +
                            "'); only two-class data is supported");
      }
      labels_[label_count] = label;
      cls = static_cast<int>(label_count++);
    }
    classes_.push_back(cls);
  }
}

std::size_t Dataset::class_size(int cls) const {
  return static_cast<std::size_t>(
      std::count(classes_.begin(), classes_.end(), cls));
}

std::size_t Dataset::missing_count() const {
  std::size_t total = 0;
  for (std::size_t c = 0; c < column_count(); ++c) total += missing_count(c);
  return total;
}

std::size_t Dataset::missing_count(std::size_t column) const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(),
                    [column](const Row& row) { return is_missing(row[column]); }));
}

double skewness(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double m = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / m;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= m;
  m3 /= m;
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(std::sqrt(m2), 3);
}

ColumnStats column_stats(const Dataset& data, std::size_t column) {
  ColumnStats stats;
  stats.column = column;
  const Kind kind = data.schema()[column].kind;
  std::vector<double> numeric;
  for (const auto& row : data.rows()) {
    const auto& cell = row[column];
    if (is_missing(cell)) continue;
    if (kind == Kind::kInteger || kind == Kind::kReal) {
      numeric.push_back(numeric_value(cell));
    }
    if (kind != Kind::kReal) ++stats.cardinality[format_cell(cell, "")];
  }
  if (!numeric.empty()) {
    stats.mean = std::accumulate(numeric.begin(), numeric.end(), 0.0) /
                 static_cast<double>(numeric.size());
    stats.skewness = skewness(numeric);
  }
  return stats;
}

Schema parse_schema(std::istream& in) {
  Schema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    std::istringstream tokens{std::string(text)};
    std::vector<std::string> parts;
    for (std::string tok; tokens >> tok;) parts.push_back(tok);
    if (parts.size() < 2 || parts.size() > 3) {
      throw DataError(kModule, "schema line " + std::to_string(line_no) +
                                   ": expected 'name kind [missing-marker]'");
    }
    AttributeSchema attr;
    attr.name = parts[0];
    attr.kind = parse_kind(parts[1], parts[0]);
    if (parts.size() == 3) attr.missing_marker = parts[2];
    schema.push_back(std::move(attr));
  }
  if (schema.empty()) throw DataError(kModule, "schema is empty");
  validate_schema(schema);
  return schema;
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(kModule, "cannot open schema file " + path.string());
  return parse_schema(in);
}

void write_schema(std::ostream& out, const Schema& schema) {
  for (const auto& attr : schema) {
    out << attr.name << ' ' << to_string(attr.kind);
    if (attr.missing_marker != "?") out << ' ' << attr.missing_marker;
    out << '\n';
  }
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw DataError(kModule, "unterminated quoted field");
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

Dataset parse_csv(std::istream& in, const Schema& schema, bool has_header) {
  validate_schema(schema);
  std::vector<Dataset::Row> rows;
  std::string line;
  bool skip = has_header;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip) {
      skip = false;
      continue;
    }
    if (trim(line).empty()) continue;
    ++row_no;
    const auto fields = split_csv_line(line);
    if (fields.size() != schema.size()) {
      throw DataError(kModule, "row " + std::to_string(row_no) +
                                   ": expected " +
                                   std::to_string(schema.size()) +
                                   " fields, got " +
                                   std::to_string(fields.size()));
    }
    Dataset::Row row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& attr = schema[c];
      const auto& text = fields[c];
      if (text == attr.missing_marker || text.empty()) {
        if (attr.kind == Kind::kDecision) {
          throw DataError(kModule, "row " + std::to_string(row_no) +
                                       ": missing value in decision column '" +
                                       attr.name + "'");
        }
        row.emplace_back(Missing{});
        continue;
      }
      switch (attr.kind) {
        case Kind::kCategorical:
        case Kind::kDecision:
          row.emplace_back(text);
          break;
        case Kind::kInteger: {
          std::int64_t v = 0;
          if (!parse_integer(text, v)) {
            throw DataError(kModule, "row " + std::to_string(row_no) +
                                         ": column '" + attr.name +
                                         "': cannot parse '" + text +
                                         "' as integer");
          }
          row.emplace_back(v);
          break;
        }
        case Kind::kReal: {
          double v = 0;
          if (!parse_real(text, v)) {
            throw DataError(kModule, "row " + std::to_string(row_no) +
                                         ": column '" + attr.name +
                                         "': cannot parse '" + text +
                                         "' as real");
          }
          row.emplace_back(v);
          break;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  Dataset data(schema, std::move(rows));
  if (data.class_size(1) == 0) {
    throw DataError(kModule, "decision column '" + schema.back().name +
                                 "' must contain exactly two labels, found 1");
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema,
                 bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError(kModule, "cannot open data file " + path.string());
  return parse_csv(in, schema, has_header);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto& schema = data.schema();
  for (const auto& row : data.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_cell(row[c], schema[c].missing_marker);
    }
    out << '\n';
  }
}

Dataset generate_synthetic(std::size_t rows, std::size_t columns,
                           double missing_rate, std::uint64_t seed,
                           const SyntheticOptions& options) {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
    throw ConfigError("missing rate must lie in [0, 1)");
  }
  if (columns < 2) throw ConfigError("need at least 2 columns");
  if (rows < 2) throw ConfigError("need at least 2 rows");
  if (options.signal_strength < 0.0 || options.signal_strength > 1.0) {
    throw ConfigError("signal strength must lie in [0, 1]");
  }

  std::mt19937_64 rng(seed);
  const std::size_t features = columns - 1;

  Schema schema;
  for (std::size_t j = 0; j < features; ++j) {
    AttributeSchema attr;
    switch (j % 3) {
      case 0:
        attr.kind = Kind::kCategorical;
        attr.name = "cat" + std::to_string(j + 1);
        break;
      case 1:
        attr.kind = Kind::kInteger;
        attr.name = "int" + std::to_string(j + 1);
        break;
      default:
        attr.kind = Kind::kReal;
        attr.name = "real" + std::to_string(j + 1);
        break;
    }
    schema.push_back(std::move(attr));
  }
  schema.push_back({"class", Kind::kDecision, "?"});

  // Exactly balanced classes, shuffled.
  std::vector<int> classes(rows);
  for (std::size_t i = 0; i < rows; ++i) classes[i] = static_cast<int>(i % 2);
  std::shuffle(classes.begin(), classes.end(), rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick4(0, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  static const std::array<std::string, 4> kLevels = {"p", "q", "r", "s"};

  std::vector<Dataset::Row> data(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    auto& row = data[i];
    row.reserve(columns);
    const int cls = classes[i];
    for (std::size_t j = 0; j < features; ++j) {
      if (j == 0) {
        const bool agree = unit(rng) < options.signal_strength;
        const int level = agree ? cls : 1 - cls;
        row.emplace_back(std::string(level == 0 ? "a" : "b"));
        continue;
      }
      switch (j % 3) {
        case 0:
          row.emplace_back(kLevels[pick4(rng)]);
          break;
        case 1: {
          const double v = 4.0 + 1.5 * cls + 2.0 * normal(rng);
          row.emplace_back(static_cast<std::int64_t>(std::lround(v)));
          break;
        }
        default: {
          // Log-normal gives the right-skewed shape typical of lab values.
          const double v = std::exp(0.4 * cls + 0.5 * normal(rng));
          row.emplace_back(std::round(v * 1e4) / 1e4);
          break;
        }
      }
    }
    row.emplace_back(std::string(cls == 0 ? "1" : "0"));
  }

  // The epsilon keeps products like 0.3 * 10 from flooring to 2.
  const std::size_t cells = rows * features;
  const auto target = static_cast<std::size_t>(
      std::floor(missing_rate * static_cast<double>(cells) + 1e-9));
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t t = 0; t < target; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, cells - 1);
    std::swap(order[t], order[pick(rng)]);
    data[order[t] / features][order[t] % features] = Missing{};
  }

  return Dataset(std::move(schema), std::move(data));
}

}  // namespace praa
