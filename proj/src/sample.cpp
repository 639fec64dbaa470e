#include "bernmar/sample.hpp"

#include "bernmar/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace bernmar {

Dataset::Dataset(std::vector<Sample> samples, std::vector<std::string> cell_labels)
  : samples_(std::move(samples))
  , labels_(std::move(cell_labels))
{
  if (samples_.empty()) {
    throw InputError("dataset must contain at least one sample");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.y) {
      if (!(*s.y >= 0.0 && *s.y <= 1.0)) {
        throw InputError("sample " + std::to_string(i) + ": response " +
                         std::to_string(*s.y) + " outside [0, 1]");
      }
      ++observed_;
    }
    cells_.push_back(s.x);
  }
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
  if (!labels_.empty() && cells_.back() >= labels_.size()) {
    throw InputError("cell label table does not cover every cell code");
  }
}

double
Dataset::observed_fraction() const
{
  return static_cast<double>(observed_) / static_cast<double>(samples_.size());
}

std::string
Dataset::label(CellCode code) const
{
  if (code < labels_.size()) {
    return labels_[code];
  }
  return std::to_string(code);
}

RescaleSpec::RescaleSpec(double lower, double upper)
  : a(lower)
  , b(upper)
{
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InputError("rescale spec needs finite a < b");
  }
}

double
rescale(double value, const RescaleSpec& spec)
{
  const double t = (value - spec.a) / (spec.b - spec.a);
  return std::min(std::max(t, 0.0), 1.0);
}

CellCode
cross_factor(std::span<const std::uint32_t> codes, std::span<const std::uint32_t> dims)
{
  if (codes.size() != dims.size() || dims.empty()) {
    throw InputError("cross_factor: one code per declared dimension required");
  }
  std::uint64_t index = 0;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (dims[d] == 0) {
      throw InputError("cross_factor: empty dimension");
    }
    if (codes[d] >= dims[d]) {
      throw InputError("cross_factor: code " + std::to_string(codes[d]) +
                       " unseen in dimension " + std::to_string(d) + " of size " +
                       std::to_string(dims[d]));
    }
    index = index * dims[d] + codes[d];
    if (index > 0xffffffffULL) {
      throw InputError("cross_factor: grid too large");
    }
  }
  return static_cast<CellCode>(index);
}

std::vector<std::string>
split_csv_line(const std::string& line)
{
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  if (!fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

namespace {

std::string
trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool
parse_integer(const std::string& s, long long& out)
{
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

// Distinct labels in a stable order: numeric when every label is an
// integer, lexicographic otherwise.
std::vector<std::string>
ordered_levels(std::vector<std::string> labels)
{
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  bool numeric = true;
  for (const auto& l : labels) {
    long long v;
    if (!parse_integer(l, v)) {
      numeric = false;
      break;
    }
  }
  if (numeric) {
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      long long va = 0;
      long long vb = 0;
      parse_integer(a, va);
      parse_integer(b, vb);
      return va < vb;
    });
  }
  return labels;
}

std::string
row_context(std::size_t line)
{
  return "line " + std::to_string(line) + ": ";
}

std::string
format_double(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string
quote_if_needed(const std::string& field)
{
  if (field.find_first_of(",\"\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + '"';
}

} // namespace

Dataset
read_csv(std::istream& in, const ColumnMap& columns, const std::optional<RescaleSpec>& rescale_spec)
{
  if (columns.x.empty()) {
    throw InputError("at least one covariate column is required");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("empty CSV input: header row required");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  const auto header = split_csv_line(line);
  auto find_column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) {
        return i;
      }
    }
    throw InputError("missing column '" + name + "'");
  };
  const std::size_t y_col = find_column(columns.y);
  const std::size_t delta_col = find_column(columns.delta);
  std::vector<std::size_t> x_cols;
  for (const auto& name : columns.x) {
    x_cols.push_back(find_column(name));
  }

  struct RawRow
  {
    std::optional<double> y;
    std::vector<std::string> x;
  };
  std::vector<RawRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto fields = split_csv_line(line);
    const std::size_t needed =
      std::max({ y_col, delta_col, *std::max_element(x_cols.begin(), x_cols.end()) });
    if (fields.size() <= needed) {
      throw InputError(row_context(line_no) + "too few fields");
    }
    const std::string delta_text = trim(fields[delta_col]);
    int delta;
    if (delta_text == "0") {
      delta = 0;
    } else if (delta_text == "1") {
      delta = 1;
    } else {
      throw InputError(row_context(line_no) + "delta must be 0 or 1, got '" + delta_text + "'");
    }
    const std::string y_text = trim(fields[y_col]);
    RawRow row;
    if (y_text.empty()) {
      if (delta == 1) {
        throw InputError(row_context(line_no) + "schema violation: delta=1 but y is empty");
      }
    } else {
      if (delta == 0) {
        throw InputError(row_context(line_no) + "schema violation: y present with delta=0");
      }
      double v = 0.0;
      const char* begin = y_text.data();
      const char* end = begin + y_text.size();
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw InputError(row_context(line_no) + "cannot parse y value '" + y_text + "'");
      }
      if (rescale_spec) {
        v = rescale(v, *rescale_spec);
      } else if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError(row_context(line_no) + "y value " + y_text +
                         " outside [0, 1] (supply a rescale spec)");
      }
      row.y = v;
    }
    for (std::size_t c : x_cols) {
      std::string label = trim(fields[c]);
      if (label.empty()) {
        throw InputError(row_context(line_no) + "missing covariate in column '" + header[c] +
                         "'");
      }
      row.x.push_back(std::move(label));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw InputError("CSV input has no data rows");
  }

  // per-dimension level tables, then row-major crossing
  const std::size_t dims = x_cols.size();
  std::vector<std::map<std::string, std::uint32_t>> level_codes(dims);
  std::vector<std::vector<std::string>> level_names(dims);
  std::vector<std::uint32_t> dim_sizes(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    std::vector<std::string> labels;
    labels.reserve(rows.size());
    for (const auto& r : rows) {
      labels.push_back(r.x[d]);
    }
    level_names[d] = ordered_levels(std::move(labels));
    for (std::size_t j = 0; j < level_names[d].size(); ++j) {
      level_codes[d][level_names[d][j]] = static_cast<std::uint32_t>(j);
    }
    dim_sizes[d] = static_cast<std::uint32_t>(level_names[d].size());
  }

  std::vector<CellCode> crossed(rows.size());
  std::vector<std::uint32_t> tuple(dims);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      tuple[d] = level_codes[d].at(rows[i].x[d]);
    }
    crossed[i] = cross_factor(tuple, dim_sizes);
  }

  // densify the crossed codes, preserving their row-major order
  std::vector<CellCode> present(crossed);
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  std::vector<std::string> labels;
  labels.reserve(present.size());
  for (CellCode code : present) {
    std::string label;
    CellCode rest = code;
    std::vector<std::string> parts(dims);
    for (std::size_t d = dims; d-- > 0;) {
      parts[d] = level_names[d][rest % dim_sizes[d]];
      rest /= dim_sizes[d];
    }
    for (std::size_t d = 0; d < dims; ++d) {
      if (d > 0) {
        label += ':';
      }
      label += parts[d];
    }
    labels.push_back(std::move(label));
  }

  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto dense = static_cast<CellCode>(
      std::lower_bound(present.begin(), present.end(), crossed[i]) - present.begin());
    samples.push_back(Sample{ rows[i].y, dense });
  }
  return Dataset(std::move(samples), std::move(labels));
}

Dataset
ingest_csv(const std::filesystem::path& path,
           const ColumnMap& columns,
           const std::optional<RescaleSpec>& rescale_spec)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open '" + path.string() + "'");
  }
  return read_csv(in, columns, rescale_spec);
}

void
write_csv(std::ostream& out, const Dataset& data, const ColumnMap& columns)
{
  out << columns.y << ',' << columns.x.front() << ',' << columns.delta << '\n';
  for (const auto& s : data) {
    if (s.y) {
      out << format_double(*s.y);
    }
    out << ',' << quote_if_needed(data.label(s.x)) << ',' << s.delta() << '\n';
  }
}

void
write_csv(const std::filesystem::path& path, const Dataset& data, const ColumnMap& columns)
{
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write '" + path.string() + "'");
  }
  write_csv(out, data, columns);
}

} // namespace bernmar
