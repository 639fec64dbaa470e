#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bernmar {

using CellCode = std::uint32_t;

//! One unit: a response in [0, 1] that may be missing, and a fully observed
//! discrete covariate cell. The observation indicator is the presence of y.
struct Sample
{
  std::optional<double> y;
  CellCode x = 0;

  bool observed() const { return y.has_value(); }
  int delta() const { return y.has_value() ? 1 : 0; }
};

//! An ordered, validated collection of samples.
//!
//! Validation on construction: at least one sample, every present response
//! in [0, 1]. `cells()` lists the distinct covariate codes in increasing
//! order. Optional labels map codes back to the original covariate values.
class Dataset
{
public:
  explicit Dataset(std::vector<Sample> samples,
                   std::vector<std::string> cell_labels = {});

  std::size_t size() const { return samples_.size(); }
  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  const std::vector<CellCode>& cells() const { return cells_; }
  std::size_t observed_count() const { return observed_; }
  double observed_fraction() const;

  //! Label for a cell code; the decimal code when no label table exists.
  std::string label(CellCode code) const;
  const std::vector<std::string>& labels() const { return labels_; }

private:
  std::vector<Sample> samples_;
  std::vector<CellCode> cells_;
  std::vector<std::string> labels_;
  std::size_t observed_ = 0;
};

//! Monotone clamp-and-scale map from original units onto [0, 1].
struct RescaleSpec
{
  double a;
  double b;

  RescaleSpec(double lower, double upper);
};

//! min{max{(value - a) / (b - a), 0}, 1}.
double rescale(double value, const RescaleSpec& spec);

//! Row-major index of a tuple of per-dimension category codes. Throws
//! InputError when a code lies outside its dimension.
CellCode cross_factor(std::span<const std::uint32_t> codes,
                      std::span<const std::uint32_t> dims);

//! Column names used when reading and writing CSV files. Several covariate
//! columns are crossed into one cell code.
struct ColumnMap
{
  std::string y = "y";
  std::vector<std::string> x = { "x" };
  std::string delta = "delta";
};

Dataset read_csv(std::istream& in,
                 const ColumnMap& columns = {},
                 const std::optional<RescaleSpec>& rescale_spec = std::nullopt);

Dataset ingest_csv(const std::filesystem::path& path,
                   const ColumnMap& columns = {},
                   const std::optional<RescaleSpec>& rescale_spec = std::nullopt);

//! Writes `y,x,delta` (with the given column names; only the first covariate
//! column name is used). Missing responses are written as empty fields and
//! values are printed with 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data, const ColumnMap& columns = {});

void write_csv(const std::filesystem::path& path,
               const Dataset& data,
               const ColumnMap& columns = {});

//! Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace bernmar
