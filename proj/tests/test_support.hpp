#pragma once

#include <random>
#include <sstream>
#include <string>

#include "praa/dataset.hpp"

namespace praa::testing {

inline Schema schema_from(const std::string& text) {
  std::istringstream in(text);
  return parse_schema(in);
}

inline Dataset dataset_from(const std::string& schema_text, const std::string& csv) {
  std::istringstream in(csv);
  return parse_csv(in, schema_from(schema_text));
}

// Random mixed-type dataset for property tests: `features` columns cycling
// categorical / integer / real with small domains (so ties and repeated
// values are common), MCAR missingness at `missing_rate`, both classes
// guaranteed present.
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t rows, std::size_t features,
                              double missing_rate) {
  Schema schema;
  for (std::size_t j = 0; j < features; ++j) {
    const Kind kind = j % 3 == 0 ? Kind::kCategorical
                      : j % 3 == 1 ? Kind::kInteger
                                   : Kind::kReal;
    schema.push_back({"c" + std::to_string(j), kind, "?"});
  }
  schema.push_back({"y", Kind::kDecision, "?"});

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 3);
  std::vector<Dataset::Row> data(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < features; ++j) {
      // Keep row 0 and row 1 fully observed so no column is empty.
      if (i > 1 && unit(rng) < missing_rate) {
        data[i].emplace_back(Missing{});
        continue;
      }
      switch (schema[j].kind) {
        case Kind::kCategorical:
          data[i].emplace_back(std::string(1, static_cast<char>('a' + small(rng))));
          break;
        case Kind::kInteger:
          data[i].emplace_back(static_cast<std::int64_t>(small(rng)));
          break;
        default: {
          // Mix of repeated and continuous values; exponential tail for skew.
          const double v = unit(rng) < 0.3 ? static_cast<double>(small(rng))
                                           : std::exp(2.0 * unit(rng));
          data[i].emplace_back(v);
        }
      }
    }
    const bool positive = i == 0 ? true : i == 1 ? false : unit(rng) < 0.5;
    data[i].emplace_back(std::string(positive ? "yes" : "no"));
  }
  return Dataset(std::move(schema), std::move(data));
}

}  // namespace praa::testing
