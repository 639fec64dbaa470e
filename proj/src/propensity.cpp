#include "bernmar/propensity.hpp"

#include "bernmar/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bernmar {

PropensityModel::PropensityModel(PropensityKind kind, std::vector<Cell> cells)
  : kind_(kind)
  , cells_(std::move(cells))
  , floor_(std::numeric_limits<double>::infinity())
{
  std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
    return a.code < b.code;
  });
  for (const auto& c : cells_) {
    floor_ = std::min(floor_, c.probability);
  }
}

bool
PropensityModel::covers(CellCode code) const
{
  auto it = std::lower_bound(cells_.begin(), cells_.end(), code, [](const Cell& c, CellCode v) {
    return c.code < v;
  });
  return it != cells_.end() && it->code == code;
}

const PropensityModel::Cell&
PropensityModel::cell(CellCode code) const
{
  auto it = std::lower_bound(cells_.begin(), cells_.end(), code, [](const Cell& c, CellCode v) {
    return c.code < v;
  });
  if (it == cells_.end() || it->code != code) {
    throw EstimationError("propensity model does not cover cell " + std::to_string(code));
  }
  return *it;
}

PropensityModel
estimate_propensity(const Dataset& data)
{
  const auto& codes = data.cells();
  std::vector<PropensityModel::Cell> cells(codes.size());
  for (std::size_t j = 0; j < codes.size(); ++j) {
    cells[j].code = codes[j];
  }
  auto index_of = [&](CellCode code) {
    return static_cast<std::size_t>(std::lower_bound(codes.begin(), codes.end(), code) -
                                    codes.begin());
  };
  for (const auto& s : data) {
    auto& c = cells[index_of(s.x)];
    ++c.size;
    if (s.observed()) {
      ++c.observed;
    }
  }
  for (auto& c : cells) {
    if (c.observed == 0) {
      throw EstimationError("cell " + data.label(c.code) + " (code " + std::to_string(c.code) +
                            ") has no observed response; merge cells or supply propensities");
    }
    c.probability = static_cast<double>(c.observed) / static_cast<double>(c.size);
    c.weight = static_cast<double>(c.size) / static_cast<double>(c.observed);
  }
  return PropensityModel(PropensityKind::estimated, std::move(cells));
}

PropensityModel
known_propensity(const std::map<CellCode, double>& probs)
{
  if (probs.empty()) {
    throw InputError("known propensity model needs at least one cell");
  }
  std::vector<PropensityModel::Cell> cells;
  for (const auto& [code, p] : probs) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw InputError("propensity for cell " + std::to_string(code) + " must lie in (0, 1]");
    }
    cells.push_back({ code, p, 1.0 / p, 0, 0 });
  }
  return PropensityModel(PropensityKind::known, std::move(cells));
}

std::vector<double>
ipw_weights(const Dataset& data, const PropensityModel& prop)
{
  std::vector<double> w(data.size(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].observed()) {
      w[i] = prop.weight(data[i].x);
    }
  }
  return w;
}

} // namespace bernmar
