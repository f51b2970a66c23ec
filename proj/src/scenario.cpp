#include "nfloc/scenario.hpp"

#include <cmath>

namespace nfloc {

void Scenario::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::ValidationError, what); };
  if (!(carrier > 0.0) || !std::isfinite(carrier)) fail("f_c must be positive");
  if (!(bandwidth >= 0.0) || !std::isfinite(bandwidth)) fail("b must be non-negative");
  if (subcarriers < 1) fail("m must be at least 1");
  if (subcarriers > 1 && !(bandwidth > 0.0)) fail("m > 1 requires b > 0");
  if (!(bandwidth < 2.0 * carrier)) fail("b must be below 2 f_c");
  if (snapshots < 1) fail("l must be at least 1");
  if (antennas < 1) fail("n must be at least 1");
  if (rf_chains < 1 || ttds_per_chain < 1) fail("n_d and n_t must be at least 1");
  if (antennas % (rf_chains * ttds_per_chain) != 0) fail("n must be divisible by n_d * n_t");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) fail("delta must be positive");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) fail("t_max must be non-negative");
  if (delay_grid_points < 1) fail("delay_grid must be at least 1");
  if (std::isnan(snr_db)) fail("snr_db must be a number");
  if (users.empty()) fail("users must list at least one position");
  try {
    validate_users(users);
  } catch (const Error& e) {
    fail(std::string("users: ") + e.what());
  }
}

}  // namespace nfloc
