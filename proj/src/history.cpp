#include "ulheat/history.hpp"

#include <cmath>
#include <sstream>

#include "ulheat/error.hpp"

namespace ulheat {

namespace {

bool same_exponent(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

}  // namespace

SupNormHistory::SupNormHistory(std::vector<UlocParams> uloc_params, std::vector<double> lr_exponents)
    : uloc_params_(std::move(uloc_params)), lr_exponents_(std::move(lr_exponents)) {}

void SupNormHistory::append(HistorySample sample) {
  if (!std::isfinite(sample.sup_norm)) fail("history sup_norm must be finite");
  if (!samples_.empty() && !(sample.t > samples_.back().t))
    fail("history times must be strictly increasing");
  if (sample.uloc.size() != uloc_params_.size() || sample.lr.size() != lr_exponents_.size())
    fail("history sample does not match the configured norm columns");
  samples_.push_back(std::move(sample));
}

std::size_t SupNormHistory::uloc_column(const UlocParams& params) const {
  for (std::size_t k = 0; k < uloc_params_.size(); ++k)
    if (same_exponent(uloc_params_[k].r, params.r) &&
        std::abs(uloc_params_[k].rho - params.rho) <= 1e-12 * params.rho)
      return k;
  std::ostringstream msg;
  msg << "history has no uloc norm recorded for r=" << params.r << " rho=" << params.rho;
  fail(msg.str());
}

std::size_t SupNormHistory::lr_column(double r) const {
  for (std::size_t k = 0; k < lr_exponents_.size(); ++k)
    if (same_exponent(lr_exponents_[k], r)) return k;
  std::ostringstream msg;
  msg << "history has no L^" << r << " norm recorded";
  fail(msg.str());
}

}  // namespace ulheat
