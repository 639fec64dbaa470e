#pragma once

#include "sample.hpp"

#include <map>
#include <vector>

namespace bernmar {

enum class PropensityKind
{
  known,
  estimated
};

//! Observation probability per covariate cell.
//!
//! Known models come from the caller; estimated models are cell-wise observed
//! fractions and keep the underlying counts. Every probability lies in
//! (0, 1] and is at least `floor()`.
class PropensityModel
{
public:
  struct Cell
  {
    CellCode code;
    double probability;
    double weight; // 1 / probability
    std::size_t observed = 0;
    std::size_t size = 0;
  };

  PropensityKind kind() const { return kind_; }
  double floor() const { return floor_; }
  const std::vector<Cell>& cells() const { return cells_; }

  bool covers(CellCode code) const;
  //! Throws EstimationError for a cell the model does not cover.
  const Cell& cell(CellCode code) const;
  double probability(CellCode code) const { return cell(code).probability; }
  double weight(CellCode code) const { return cell(code).weight; }

  friend PropensityModel estimate_propensity(const Dataset& data);
  friend PropensityModel known_propensity(const std::map<CellCode, double>& probs);

private:
  PropensityModel(PropensityKind kind, std::vector<Cell> cells);

  PropensityKind kind_;
  std::vector<Cell> cells_; // sorted by code
  double floor_;
};

//! pi_hat(x) = (# observed units in cell x) / (# units in cell x). Throws
//! EstimationError naming the first cell without an observed response.
PropensityModel estimate_propensity(const Dataset& data);

//! Throws InputError unless every probability is in (0, 1].
PropensityModel known_propensity(const std::map<CellCode, double>& probs);

//! Per-unit inverse probability weights delta_i / pi(x_i); zero for
//! unobserved units. Throws EstimationError if an observed unit's cell is
//! not covered.
std::vector<double> ipw_weights(const Dataset& data, const PropensityModel& prop);

} // namespace bernmar
