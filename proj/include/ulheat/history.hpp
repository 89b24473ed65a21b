#pragma once

#include <cstddef>
#include <vector>

namespace ulheat {

/// Uniformly local norm parameters. r = +infinity is allowed.
struct UlocParams {
  double r = 1.0;
  double rho = 1.0;
};

struct HistorySample {
  double t = 0.0;
  double sup_norm = 0.0;
  std::vector<double> uloc;  // ||u(t)||_{r,rho}, one per SupNormHistory::uloc_params entry
  std::vector<double> lr;    // ||u(t)||_{L^r}, one per SupNormHistory::lr_exponents entry
};

/// Time series of norms along one solver run. Times are strictly increasing
/// and every sup_norm is finite.
class SupNormHistory {
 public:
  SupNormHistory() = default;
  SupNormHistory(std::vector<UlocParams> uloc_params, std::vector<double> lr_exponents);

  void append(HistorySample sample);

  const std::vector<HistorySample>& samples() const noexcept { return samples_; }
  const std::vector<UlocParams>& uloc_params() const noexcept { return uloc_params_; }
  const std::vector<double>& lr_exponents() const noexcept { return lr_exponents_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  /// Column of the recorded uloc norm matching (r, rho); throws when absent.
  std::size_t uloc_column(const UlocParams& params) const;
  /// Column of the recorded L^r norm for r; throws when absent.
  std::size_t lr_column(double r) const;

 private:
  std::vector<UlocParams> uloc_params_;
  std::vector<double> lr_exponents_;
  std::vector<HistorySample> samples_;
};

}  // namespace ulheat
