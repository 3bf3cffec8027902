#include "embo/damage.hpp"

#include <algorithm>
#include <cmath>

#include "embo/common.hpp"

namespace embo {

double psi(const PsiCoefficients& beta, double x_ns, double x_wh) {
  const double ns2 = x_ns * x_ns;
  return beta[0] + beta[1] * ns2 + beta[2] * ns2 * x_wh;
}

double dissipated_energy(std::span<const double> drift, std::span<const double> force,
                         double k_unload) {
  if (drift.size() != force.size()) throw InputError("dissipated_energy: trace length mismatch");
  if (!(k_unload > 0.0)) throw InputError("dissipated_energy: unloading stiffness must be > 0");
  double e = 0.0;
  for (std::size_t k = 1; k < drift.size(); ++k) {
    const double df = force[k] - force[k - 1];
    const double inc = 0.5 * (force[k - 1] + force[k]) * ((drift[k] - drift[k - 1]) - df / k_unload);
    e += std::max(0.0, inc);
  }
  return e;
}

double damage_index_value(double delta_m, double e_hyst_total, double psi_value,
                          const WallDamageParams& dp) {
  return delta_m / dp.delta_u + psi_value * e_hyst_total / (dp.f_ey * dp.delta_u);
}

DamageIndexResult damage_index(std::span<const double> drift, std::span<const double> force,
                               const WallDamageParams& dp, const PsiCoefficients& beta,
                               double k_unload) {
  if (drift.empty() || force.empty()) throw InputError("damage_index: empty trace");
  dp.validate();
  DamageIndexResult r;
  for (double d : drift) r.delta_m = std::max(r.delta_m, std::abs(d));
  r.e_hyst_total = dissipated_energy(drift, force, k_unload);
  r.psi = psi(beta, dp.x_ns, dp.x_wh);
  r.di = damage_index_value(r.delta_m, r.e_hyst_total, r.psi, dp);
  r.collapse_range = r.di > 1.0;
  return r;
}

DamageReport damage_report(std::vector<DamageIndexResult> results, const FloorLayout& layout) {
  DamageReport rep;
  rep.stories.resize(layout.n_stories);
  for (int s = 0; s < layout.n_stories; ++s) rep.stories[s].story = s + 1;

  double total = 0.0;
  for (const auto& r : results) {
    if (r.story < 1 || r.story > layout.n_stories) {
      throw InputError("damage_report: wall " + r.wall_id + " references a missing story");
    }
    StoryDamage& st = rep.stories[r.story - 1];
    ++st.walls;
    st.mean_di += r.di;
    if (st.walls == 1 || r.di > st.max_di) {
      st.max_di = r.di;
      st.worst_wall = r.wall_id;
    }
    total += r.di;
    rep.building_max_di = std::max(rep.building_max_di, r.di);
  }
  for (auto& st : rep.stories) {
    if (st.walls > 0) st.mean_di /= st.walls;
  }
  if (!results.empty()) rep.building_mean_di = total / static_cast<double>(results.size());

  std::stable_sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    if (a.di != b.di) return a.di > b.di;
    return a.wall_id < b.wall_id;
  });
  rep.walls = std::move(results);
  return rep;
}

}  // namespace embo
