#include "uavtour/tours.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace uavtour {

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
  os << "}";
  return os.str();
}

}  // namespace

void MultiTour::validate(int k) const {
  if (k < 1) throw StructuralError("tour: instance must have at least one sensor");
  std::vector<char> seen(static_cast<std::size_t>(k) + 1, 0);
  int count = 0;
  for (const auto& cycle : cycles) {
    if (cycle.empty()) throw StructuralError("tour: empty cycle");
    for (int id : cycle) {
      if (id < 1 || id > k) {
        std::ostringstream os;
        os << "tour: sensor id " << id << " outside 1.." << k;
        throw StructuralError(os.str());
      }
      if (seen[id]) {
        std::ostringstream os;
        os << "tour: sensor " << id << " visited more than once";
        throw StructuralError(os.str());
      }
      seen[id] = 1;
      ++count;
    }
  }
  if (count != k) {
    std::vector<int> missing;
    for (int i = 1; i <= k; ++i)
      if (!seen[i]) missing.push_back(i);
    throw StructuralError("tour: sensors " + join_ids(missing) + " never visited");
  }
}

MultiTour MultiTour::canonical() const {
  MultiTour out = *this;
  std::sort(out.cycles.begin(), out.cycles.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return *std::min_element(a.begin(), a.end()) <
                     *std::min_element(b.begin(), b.end());
            });
  return out;
}

bool operator==(const MultiTour& a, const MultiTour& b) { return a.cycles == b.cycles; }
bool operator<(const MultiTour& a, const MultiTour& b) { return a.cycles < b.cycles; }

TourMetrics evaluate_tour(const MultiTour& tour, const WeightMatrix& w) {
  tour.validate(w.k);
  TourMetrics out;
  out.aoi_s.assign(static_cast<std::size_t>(w.k), 0.0);
  for (const auto& cycle : tour.cycles) {
    const int m = static_cast<int>(cycle.size());
    // Ages: backward suffix of edge times, ending with the return leg. The
    // age of the node in position r spans its own upload plus everything
    // after it, so A[last] = T(last,0) and A[r] = T(r, r+1) + A[r+1].
    double age = w.time(cycle[m - 1], 0);
    out.aoi_s[cycle[m - 1] - 1] = age;
    for (int r = m - 2; r >= 0; --r) {
      age += w.time(cycle[r], cycle[r + 1]);
      out.aoi_s[cycle[r] - 1] = age;
    }
    // Energy and flows along the traversal. The flow on an arc equals the
    // number of already-visited sensors, so avg AoI = sum f_ij T_ij / K.
    out.energy_j += w.energy(0, cycle[0]);
    out.flow[{0, cycle[0]}] = 0;
    for (int r = 0; r + 1 < m; ++r) {
      out.energy_j += w.energy(cycle[r], cycle[r + 1]);
      out.flow[{cycle[r], cycle[r + 1]}] = r + 1;
    }
    out.energy_j += w.energy(cycle[m - 1], 0);
    out.flow[{cycle[m - 1], 0}] = m;
  }
  out.avg_aoi_s =
      std::accumulate(out.aoi_s.begin(), out.aoi_s.end(), 0.0) / static_cast<double>(w.k);

  // The flow-weighted edge sum must reproduce the recursion's average.
  double flow_sum = 0.0;
  for (const auto& [arc, f] : out.flow) flow_sum += f * w.time(arc.first, arc.second);
  if (std::abs(flow_sum / w.k - out.avg_aoi_s) > 1e-9 * (1.0 + out.avg_aoi_s))
    throw std::logic_error("tour: recursion and flow-weighted AoI disagree");
  return out;
}

MultiTour decode_arcs(const std::vector<std::pair<int, int>>& arcs, int k) {
  if (k < 1) throw StructuralError("decode: instance must have at least one sensor");
  const int n = k + 1;
  std::vector<int> out_deg(n, 0), in_deg(n, 0);
  std::vector<int> succ(n, -1);       // unique successor of each sensor
  std::vector<int> depot_out;         // heads of arcs leaving the depot
  for (auto [i, j] : arcs) {
    if (i < 0 || i > k || j < 0 || j > k || i == j) {
      std::ostringstream os;
      os << "decode: invalid arc (" << i << "," << j << ")";
      throw StructuralError(os.str());
    }
    ++out_deg[i];
    ++in_deg[j];
    if (i == 0) {
      depot_out.push_back(j);
    } else {
      if (succ[i] != -1) {
        std::ostringstream os;
        os << "decode: sensor " << i << " has out-degree > 1";
        throw StructuralError(os.str());
      }
      succ[i] = j;
    }
  }
  for (int i = 1; i <= k; ++i) {
    if (out_deg[i] != 1 || in_deg[i] != 1) {
      std::ostringstream os;
      os << "decode: sensor " << i << " has degree (in=" << in_deg[i]
         << ", out=" << out_deg[i] << "), expected (1,1)";
      throw StructuralError(os.str());
    }
  }
  if (out_deg[0] != in_deg[0] || out_deg[0] < 1) {
    std::ostringstream os;
    os << "decode: depot has degree (in=" << in_deg[0] << ", out=" << out_deg[0]
       << "), expected equal and >= 1";
    throw StructuralError(os.str());
  }

  // Each walk from a depot arc must end back at the depot; with unit degrees
  // it cannot revisit a sensor.
  std::vector<char> visited(n, 0);
  MultiTour tour;
  std::sort(depot_out.begin(), depot_out.end());
  for (int start : depot_out) {
    std::vector<int> cycle;
    int at = start;
    while (at != 0) {
      if (visited[at]) {
        std::ostringstream os;
        os << "decode: arc set revisits sensor " << at;
        throw StructuralError(os.str());
      }
      visited[at] = 1;
      cycle.push_back(at);
      at = succ[at];
    }
    tour.cycles.push_back(std::move(cycle));
  }

  // Anything not reached from the depot sits on a depot-free cycle.
  std::vector<int> stranded;
  for (int i = 1; i <= k; ++i)
    if (!visited[i]) stranded.push_back(i);
  if (!stranded.empty()) {
    throw StructuralError("decode: vertices " + join_ids(stranded) +
                          " form cycles that never touch the depot");
  }
  tour.validate(k);
  return tour;
}

namespace {

/// Streaming Pareto archive over (aoi, energy), keeping one witness per point.
class ParetoArchive {
public:
  /// Returns true when (a, e) is not weakly dominated; `make_tour` is called
  /// only then to materialise the witness.
  template <typename MakeTour>
  void offer(double a, double e, MakeTour&& make_tour) {
    auto it = points_.lower_bound(a);
    if (it != points_.end() && it->first == a) {
      if (it->second.first <= e) return;        // same AoI, no better energy
      it->second = {e, make_tour()};
      trim_after(std::next(it), e);
      return;
    }
    if (it != points_.begin()) {
      auto prev = std::prev(it);
      if (prev->second.first <= e) return;      // dominated from the left
    }
    auto ins = points_.emplace_hint(it, a, std::make_pair(e, make_tour()));
    trim_after(std::next(ins), e);
  }

  std::vector<OraclePoint> take() const {
    std::vector<OraclePoint> out;
    out.reserve(points_.size());
    for (const auto& [a, rest] : points_)
      out.push_back({rest.second, a, rest.first});
    return out;
  }

private:
  void trim_after(std::map<double, std::pair<double, MultiTour>>::iterator from, double e) {
    while (from != points_.end() && from->second.first >= e) from = points_.erase(from);
  }

  std::map<double, std::pair<double, MultiTour>> points_;
};

}  // namespace

OracleResult oracle_pareto(const WeightMatrix& w) {
  const int k = w.k;
  if (k < 1) throw BoundError("oracle: instance must have at least one sensor");
  if (k > 8) throw BoundError("oracle: exhaustive enumeration is capped at 8 sensors");

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<int> starts;  // cycle start positions for the current split
  starts.reserve(static_cast<std::size_t>(k) + 1);

  ParetoArchive archive;
  const unsigned long splits = 1UL << (k - 1);
  do {
    for (unsigned long mask = 0; mask < splits; ++mask) {
      // Cycle boundaries: bit b set means a depot return between positions
      // b and b+1. Keep only the canonical representative (cycle minima
      // strictly increasing) so each multi-tour is evaluated exactly once.
      starts.clear();
      starts.push_back(0);
      for (int b = 0; b + 1 < k; ++b)
        if (mask >> b & 1UL) starts.push_back(b + 1);
      starts.push_back(k);

      bool canonical = true;
      int prev_min = 0;
      for (std::size_t c = 0; c + 1 < starts.size() && canonical; ++c) {
        int mn = perm[starts[c]];
        for (int p = starts[c] + 1; p < starts[c + 1]; ++p) mn = std::min(mn, perm[p]);
        if (mn < prev_min) canonical = false;
        prev_min = mn;
      }
      if (!canonical) continue;

      double aoi_sum = 0.0, energy = 0.0;
      for (std::size_t c = 0; c + 1 < starts.size(); ++c) {
        const int b = starts[c], e = starts[c + 1];
        double age = w.time(perm[e - 1], 0);
        aoi_sum += age;
        for (int r = e - 2; r >= b; --r) {
          age += w.time(perm[r], perm[r + 1]);
          aoi_sum += age;
        }
        energy += w.energy(0, perm[b]) + w.energy(perm[e - 1], 0);
        for (int r = b; r + 1 < e; ++r) energy += w.energy(perm[r], perm[r + 1]);
      }

      archive.offer(aoi_sum / k, energy, [&] {
        MultiTour t;
        for (std::size_t c = 0; c + 1 < starts.size(); ++c)
          t.cycles.emplace_back(perm.begin() + starts[c], perm.begin() + starts[c + 1]);
        return t;
      });
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  OracleResult out;
  out.pareto = archive.take();
  return out;
}

OracleResult oracle_pareto(const Instance& inst) {
  return oracle_pareto(build_edge_weights(inst));
}

const OraclePoint& OracleResult::scalarized_best(double lambda, const Normalization& n) const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("oracle: lambda must lie in [0,1]");
  if (pareto.empty()) throw std::logic_error("oracle: empty Pareto front");
  const double da = n.aoi_max - n.aoi_min;
  const double de = n.energy_max - n.energy_min;
  const OraclePoint* best = nullptr;
  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& p : pareto) {
    const double ta = da > 0.0 ? (p.avg_aoi_s - n.aoi_min) / da : 0.0;
    const double te = de > 0.0 ? (p.energy_j - n.energy_min) / de : 0.0;
    const double val = lambda * ta + (1.0 - lambda) * te;
    if (val < best_val) {
      best_val = val;
      best = &p;
    }
  }
  return *best;
}

double OracleResult::scalarized_min(double lambda, const Normalization& n) const {
  const OraclePoint& p = scalarized_best(lambda, n);
  const double da = n.aoi_max - n.aoi_min;
  const double de = n.energy_max - n.energy_min;
  return lambda * (da > 0.0 ? (p.avg_aoi_s - n.aoi_min) / da : 0.0) +
         (1.0 - lambda) * (de > 0.0 ? (p.energy_j - n.energy_min) / de : 0.0);
}

}  // namespace uavtour
