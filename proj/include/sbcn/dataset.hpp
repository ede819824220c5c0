#ifndef SBCN_DATASET_HPP
#define SBCN_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbcn {

// Binary sample-by-event matrix. Columns are the events v_1..v_n in canonical
// order, rows are samples. Immutable once constructed; stored column-major.
class Dataset {
 public:
  using Column = std::vector<std::uint8_t>;

  // Validates: n >= 1, m >= 1, unique event names, every column of length m,
  // every cell 0 or 1.
  Dataset(std::vector<std::string> event_names,
          std::vector<std::string> sample_ids, std::vector<Column> columns);

  std::size_t event_count() const noexcept { return event_names_.size(); }
  std::size_t sample_count() const noexcept { return sample_ids_.size(); }

  const std::vector<std::string>& event_names() const noexcept { return event_names_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::string& event_name(std::size_t v) const;

  std::span<const std::uint8_t> column(std::size_t v) const;
  std::uint8_t cell(std::size_t row, std::size_t v) const;
  std::vector<std::uint8_t> row(std::size_t row) const;

  std::optional<std::size_t> find_event(std::string_view name) const;

  // Events whose marginal is exactly 0 or 1.
  std::vector<std::size_t> degenerate_events() const;
  bool is_degenerate(std::size_t v) const;

  std::size_t count_ones(std::size_t v) const;
  std::size_t count_both(std::size_t i, std::size_t j) const;

  // New dataset made of the given rows (repetition allowed). Sample ids are
  // suffixed with the draw position so they stay informative.
  Dataset select_rows(std::span<const std::size_t> rows) const;

  // Appends columns; names must not collide with existing events.
  Dataset with_columns(std::vector<std::string> names,
                       std::vector<Column> columns) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> event_names_;
  std::vector<std::string> sample_ids_;
  std::vector<Column> columns_;
};

// Delimited text: header "<id>,<e1>,...,<en>" then one row per sample.
// Comma or tab is detected from the header; LF and CRLF accepted.
Dataset parse_dataset(std::string_view text);
Dataset load_dataset(const std::string& path);
std::string format_dataset(const Dataset& data, char delimiter = ',');
void save_dataset(const Dataset& data, const std::string& path, char delimiter = ',');

// Relative-frequency estimators. No smoothing.
double marginal(const Dataset& data, std::size_t v);
double joint(const Dataset& data, std::size_t i, std::size_t j);
// P(effect = 1 | cause = cause_value). Throws UndefinedConditional when no
// row has cause == cause_value.
double conditional(const Dataset& data, std::size_t effect, std::size_t cause,
                   int cause_value);

}  // namespace sbcn

#endif
