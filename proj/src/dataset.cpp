#include "sbcn/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "sbcn/error.hpp"

namespace sbcn {

Dataset::Dataset(std::vector<std::string> event_names,
                 std::vector<std::string> sample_ids, std::vector<Column> columns)
    : event_names_(std::move(event_names)),
      sample_ids_(std::move(sample_ids)),
      columns_(std::move(columns)) {
  if (event_names_.empty()) throw SchemaError("dataset has no events");
  if (sample_ids_.empty()) throw SchemaError("dataset has no samples");
  if (columns_.size() != event_names_.size()) {
    throw SchemaError("column count does not match event count");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& name : event_names_) {
    if (name.empty()) throw SchemaError("empty event name");
    if (!seen.insert(name).second) throw SchemaError("duplicate event name '" + name + "'");
  }
  for (std::size_t v = 0; v < columns_.size(); ++v) {
    if (columns_[v].size() != sample_ids_.size()) {
      throw SchemaError("column '" + event_names_[v] + "' has " +
                        std::to_string(columns_[v].size()) + " cells, expected " +
                        std::to_string(sample_ids_.size()));
    }
    for (std::size_t r = 0; r < columns_[v].size(); ++r) {
      if (columns_[v][r] > 1) {
        throw ParseError("non-binary cell at row " + std::to_string(r + 1) +
                             ", column " + event_names_[v],
                         r + 1, event_names_[v]);
      }
    }
  }
}

const std::string& Dataset::event_name(std::size_t v) const {
  if (v >= event_count()) throw IndexError("event index " + std::to_string(v) + " out of range");
  return event_names_[v];
}

std::span<const std::uint8_t> Dataset::column(std::size_t v) const {
  if (v >= event_count()) throw IndexError("event index " + std::to_string(v) + " out of range");
  return columns_[v];
}

std::uint8_t Dataset::cell(std::size_t row, std::size_t v) const {
  if (row >= sample_count()) throw IndexError("row " + std::to_string(row) + " out of range");
  return column(v)[row];
}

std::vector<std::uint8_t> Dataset::row(std::size_t r) const {
  if (r >= sample_count()) throw IndexError("row " + std::to_string(r) + " out of range");
  std::vector<std::uint8_t> out(event_count());
  for (std::size_t v = 0; v < event_count(); ++v) out[v] = columns_[v][r];
  return out;
}

std::optional<std::size_t> Dataset::find_event(std::string_view name) const {
  auto it = std::find(event_names_.begin(), event_names_.end(), name);
  if (it == event_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - event_names_.begin());
}

std::size_t Dataset::count_ones(std::size_t v) const {
  auto col = column(v);
  return static_cast<std::size_t>(std::count(col.begin(), col.end(), std::uint8_t{1}));
}

std::size_t Dataset::count_both(std::size_t i, std::size_t j) const {
  auto a = column(i);
  auto b = column(j);
  std::size_t n = 0;
  for (std::size_t r = 0; r < a.size(); ++r) n += a[r] & b[r];
  return n;
}

bool Dataset::is_degenerate(std::size_t v) const {
  const auto ones = count_ones(v);
  return ones == 0 || ones == sample_count();
}

std::vector<std::size_t> Dataset::degenerate_events() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < event_count(); ++v) {
    if (is_degenerate(v)) out.push_back(v);
  }
  return out;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= sample_count()) throw IndexError("row index out of range");
    ids.push_back(sample_ids_[rows[k]] + "#" + std::to_string(k + 1));
  }
  std::vector<Column> cols(event_count(), Column(rows.size()));
  for (std::size_t v = 0; v < event_count(); ++v) {
    for (std::size_t k = 0; k < rows.size(); ++k) cols[v][k] = columns_[v][rows[k]];
  }
  return Dataset(event_names_, std::move(ids), std::move(cols));
}

Dataset Dataset::with_columns(std::vector<std::string> names,
                              std::vector<Column> columns) const {
  if (names.size() != columns.size()) {
    throw InvalidArgument("name count does not match column count");
  }
  for (const auto& name : names) {
    if (find_event(name)) throw SchemaError("column name '" + name + "' collides with an existing event");
  }
  auto all_names = event_names_;
  all_names.insert(all_names.end(), std::make_move_iterator(names.begin()),
                   std::make_move_iterator(names.end()));
  auto all_columns = columns_;
  all_columns.insert(all_columns.end(), std::make_move_iterator(columns.begin()),
                     std::make_move_iterator(columns.end()));
  return Dataset(std::move(all_names), sample_ids_, std::move(all_columns));
}

namespace {

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

Dataset parse_dataset(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                 : pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (lines.empty()) throw SchemaError("missing header row");

  const char delimiter = lines[0].find('\t') != std::string_view::npos ? '\t' : ',';
  auto header = split(lines[0], delimiter);
  if (header.size() < 2) throw SchemaError("header must name a sample-id column and at least one event");

  std::vector<std::string> names;
  for (std::size_t c = 1; c < header.size(); ++c) names.emplace_back(header[c]);
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& name : names) {
      if (name.empty()) throw SchemaError("empty event name in header");
      if (!seen.insert(name).second) throw SchemaError("duplicate event name '" + name + "'");
    }
  }
  if (lines.size() < 2) throw SchemaError("dataset has no data rows");

  const std::size_t n = names.size();
  std::vector<std::string> ids;
  std::vector<Dataset::Column> columns(n);
  for (auto& col : columns) col.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto fields = split(lines[r], delimiter);
    if (fields.size() != n + 1) {
      throw SchemaError("row " + std::to_string(r) + " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(n + 1));
    }
    ids.emplace_back(fields[0]);
    for (std::size_t c = 0; c < n; ++c) {
      const auto f = fields[c + 1];
      if (f == "0") {
        columns[c].push_back(0);
      } else if (f == "1") {
        columns[c].push_back(1);
      } else {
        throw ParseError("non-binary value '" + std::string(f) + "' at row " +
                             std::to_string(r) + ", column " + names[c],
                         r, names[c]);
      }
    }
  }
  return Dataset(std::move(names), std::move(ids), std::move(columns));
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str());
}

std::string format_dataset(const Dataset& data, char delimiter) {
  std::string out = "sample";
  for (const auto& name : data.event_names()) {
    out += delimiter;
    out += name;
  }
  out += '\n';
  for (std::size_t r = 0; r < data.sample_count(); ++r) {
    out += data.sample_ids()[r];
    for (std::size_t v = 0; v < data.event_count(); ++v) {
      out += delimiter;
      out += data.column(v)[r] ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& data, const std::string& path, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << format_dataset(data, delimiter);
  if (!out) throw IoError("write failed for '" + path + "'");
}

double marginal(const Dataset& data, std::size_t v) {
  return static_cast<double>(data.count_ones(v)) / static_cast<double>(data.sample_count());
}

double joint(const Dataset& data, std::size_t i, std::size_t j) {
  if (i == j) throw InvalidArgument("joint requires two distinct events");
  return static_cast<double>(data.count_both(i, j)) / static_cast<double>(data.sample_count());
}

double conditional(const Dataset& data, std::size_t effect, std::size_t cause,
                   int cause_value) {
  if (effect == cause) throw InvalidArgument("conditional requires two distinct events");
  if (cause_value != 0 && cause_value != 1) throw InvalidArgument("cause_value must be 0 or 1");
  const auto cause_ones = data.count_ones(cause);
  const auto both = data.count_both(effect, cause);
  std::size_t support;
  std::size_t hits;
  if (cause_value == 1) {
    support = cause_ones;
    hits = both;
  } else {
    support = data.sample_count() - cause_ones;
    hits = data.count_ones(effect) - both;
  }
  if (support == 0) {
    throw UndefinedConditional("no sample has " + data.event_name(cause) + " = " +
                               std::to_string(cause_value));
  }
  return static_cast<double>(hits) / static_cast<double>(support);
}

}  // namespace sbcn
