#include "morseb/boundarymap.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "morseb/config.hpp"
#include "morseb/contracting.hpp"
#include "morseb/crossratio.hpp"
#include "morseb/errors.hpp"

namespace morseb {

namespace {

std::string isometry_label(const GroupElement& g) {
  if (const auto* L = std::get_if<LatticeIsometry>(&g)) {
    const bool lin_id = L->lin == std::array<int, 4>{1, 0, 0, 1};
    std::ostringstream os;
    if (lin_id && L->tx == 0 && L->ty == 0) return "identity";
    if (lin_id) {
      os << "translation(" << L->tx << "," << L->ty << ")";
      return os.str();
    }
    if (L->lin == std::array<int, 4>{0, 1, 1, 0} && L->tx == 0 && L->ty == 0) return "axis_swap";
    os << "affine(" << L->lin[0] << " " << L->lin[1] << " " << L->lin[2] << " " << L->lin[3]
       << " | " << L->tx << " " << L->ty << ")";
    return os.str();
  }
  const auto& t = std::get<TreeTranslation>(g);
  return "left(" + word_to_string(t.w) + ")";
}

// Per-index engine so that sample i is independent of evaluation order.
std::mt19937_64 engine_for(unsigned seed, std::size_t i, std::uint64_t stream) {
  return std::mt19937_64(stream * (std::uint64_t(i) + 1) + seed);
}

double pair_gauge(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b) {
  return contracting_constant_analytic(X, X.bi_infinite_geodesic(a, b));
}

double ls_slope(const std::vector<double>& ys) {
  const std::size_t n = ys.size();
  if (n < 2) return 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sx += double(k);
    sy += ys[k];
    sxx += double(k) * double(k);
    sxy += double(k) * ys[k];
  }
  const double denom = double(n) * sxx - sx * sx;
  return denom == 0 ? 0 : (double(n) * sxy - sx * sy) / denom;
}

}  // namespace

BoundaryMap identity_map() {
  auto id = [](const BoundaryPoint& b) { return b; };
  return {id, id, "identity"};
}

BoundaryMap swap_map() {
  auto flip = [](const BoundaryPoint& b) {
    const auto* d = std::get_if<SpikeDirection>(&b);
    if (!d) throw incompatible_space_error("swap map acts on spike directions");
    if (d->n == 0) return make_direction(-d->m, 0);
    return b;
  };
  return {flip, flip, "swap"};
}

BoundaryMap induced_map(const Space& X, const GroupElement& g) {
  if (const auto* L = std::get_if<LatticeIsometry>(&g)) {
    if (!is_valid_lattice_isometry(*L))
      throw invalid_parameter_error("linear part must be a signed coordinate permutation");
    if (X.kind() != Space::Kind::spiked_plane)
      throw incompatible_space_error("lattice isometries act on the spiked plane");
  } else if (X.kind() != Space::Kind::tree) {
    throw incompatible_space_error("tree translations act on a tree");
  }
  const GroupElement gi = inverse(g);
  return {[&X, g](const BoundaryPoint& b) { return X.act(g, b); },
          [&X, gi](const BoundaryPoint& b) { return X.act(gi, b); }, isometry_label(g)};
}

BoundaryMap table_map(const std::vector<std::pair<BoundaryPoint, BoundaryPoint>>& pairs) {
  std::vector<BoundaryPoint> seen;
  for (const auto& [a, b] : pairs) {
    if (same_boundary_point(a, b))
      throw invalid_parameter_error("table pairs must join two distinct directions");
    for (const auto& s : seen)
      if (same_boundary_point(s, a) || same_boundary_point(s, b))
        throw invalid_parameter_error("exception table repeats a direction");
    seen.push_back(a);
    seen.push_back(b);
  }
  auto exchange = [pairs](const BoundaryPoint& p) {
    for (const auto& [a, b] : pairs) {
      if (same_boundary_point(p, a)) return b;
      if (same_boundary_point(p, b)) return a;
    }
    return p;
  };
  return {exchange, exchange, "table"};
}

BoundaryMap map_from_config(const Space& X, const std::string& path) {
  const Config cfg = Config::from_file(path);
  if (!cfg.has("map")) throw config_error("boundary map config needs a 'map' kind");
  const std::string kind = cfg.get("map");
  if (kind == "identity") return identity_map();

  if (X.kind() != Space::Kind::spiked_plane)
    throw config_error("boundary map '" + kind + "' needs the spiked plane");
  if (kind == "swap") return swap_map();
  if (kind == "affine") {
    LatticeIsometry g;
    std::istringstream lin(cfg.get_or("linear", "1 0 0 1"));
    if (!(lin >> g.lin[0] >> g.lin[1] >> g.lin[2] >> g.lin[3]))
      throw config_error("affine rule needs 'linear = a b c d'");
    std::istringstream tr(cfg.get_or("translate", "0 0"));
    if (!(tr >> g.tx >> g.ty)) throw config_error("affine rule needs 'translate = tx ty'");
    return induced_map(X, g);
  }
  if (kind == "table") {
    std::vector<std::pair<BoundaryPoint, BoundaryPoint>> pairs;
    if (cfg.has("swap")) {
      for (const std::string& line : cfg.get_all("swap")) {
        int m = 0, n = 0, m2 = 0, n2 = 0;
        std::istringstream row(line);
        if (!(row >> m >> n >> m2 >> n2))
          throw config_error("table rows read 'swap = m n m2 n2'");
        pairs.emplace_back(make_direction(m, n), make_direction(m2, n2));
      }
    }
    return table_map(pairs);
  }
  throw config_error("unknown boundary map: " + kind);
}

bool round_trips(const BoundaryMap& f, const std::vector<BoundaryPoint>& points) {
  for (const auto& p : points) {
    if (!same_boundary_point(f.inverse(f.forward(p)), p)) return false;
    if (!same_boundary_point(f.forward(f.inverse(p)), p)) return false;
  }
  return true;
}

PairSampler lattice_pair_sampler(unsigned seed, int window) {
  if (window < 1) throw invalid_parameter_error("window must be positive");
  return [seed, window](std::size_t i) {
    auto eng = engine_for(seed, i, 0x9E3779B97F4A7C15ull);
    std::uniform_int_distribution<int> c(-window, window);
    const int m1 = c(eng), n1 = c(eng);
    int m2 = m1, n2 = n1;
    while (m2 == m1 && n2 == n1) {
      m2 = c(eng);
      n2 = c(eng);
    }
    return std::make_pair(make_direction(m1, n1), make_direction(m2, n2));
  };
}

PairSampler adjacent_pair_family() {
  return [](std::size_t i) {
    const int n = int(i) + 1;
    return std::make_pair(make_direction(n, 0), make_direction(n, 1));
  };
}

TupleSampler lattice_tuple_sampler(const Space& X, unsigned seed, int window, double gauge_cap) {
  if (X.kind() != Space::Kind::spiked_plane)
    throw unsupported_space_error("lattice samplers need the spiked plane");
  if (window < 1) throw invalid_parameter_error("window must be positive");
  if (gauge_cap < 2) throw invalid_parameter_error("gauge cap must be at least 2");
  return [&X, seed, window, gauge_cap](std::size_t i) {
    auto eng = engine_for(seed, i, 0xBF58476D1CE4E5B9ull);
    std::uniform_int_distribution<int> c(-window, window);
    const int half = int(gauge_cap / 2);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const int m0 = c(eng), n0 = c(eng);
      std::uniform_int_distribution<int> dm(m0 - half, m0 + half);
      std::uniform_int_distribution<int> dn(n0 - half, n0 + half);
      std::array<BoundaryPoint, 4> t = {make_direction(m0, n0)};
      int got = 1;
      for (int tries = 0; got < 4 && tries < 64; ++tries) {
        const BoundaryPoint cand = make_direction(dm(eng), dn(eng));
        bool dup = false;
        for (int k = 0; k < got; ++k) dup = dup || same_boundary_point(t[k], cand);
        if (!dup) t[got++] = cand;
      }
      if (got < 4) continue;
      bool inside = true;
      for (int a = 0; a < 4 && inside; ++a)
        for (int b = a + 1; b < 4 && inside; ++b)
          inside = pair_gauge(X, t[a], t[b]) <= gauge_cap + 1e-9;
      if (inside) return t;
    }
    throw invalid_parameter_error("gauge stratum too tight to sample");
  };
}

TupleSampler adjacent_square_family() {
  return [](std::size_t i) {
    const int n = int(i) + 1;
    return std::array<BoundaryPoint, 4>{make_direction(n, 0), make_direction(n + 1, 0),
                                        make_direction(n, 1), make_direction(n + 1, 1)};
  };
}

StabilityProfile stability_profile(const Space& X, const BoundaryMap& f, const PairSampler& pairs,
                                   std::size_t sample_count, double verdict_bound) {
  if (sample_count == 0)
    throw insufficient_samples_error("stability profile needs at least one sampled pair");
  if (verdict_bound <= 0) throw invalid_parameter_error("verdict bound must be positive");

  StabilityProfile out;
  out.verdict_bound = verdict_bound;
  out.rows.reserve(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) {
    const auto [a, b] = pairs(i);
    StabilityRow row;
    row.pair = {a, b};
    row.D_in = pair_gauge(X, a, b);
    row.D_out = pair_gauge(X, f.forward(a), f.forward(b));
    out.rows.push_back(std::move(row));
  }

  std::vector<double> bounded_outs;
  for (const auto& row : out.rows) {
    if (row.D_in > verdict_bound) continue;
    bounded_outs.push_back(row.D_out);
    if (row.D_out > verdict_bound) out.witness.push_back(row);
  }
  out.growth_rate = ls_slope(bounded_outs);
  out.verdict = out.witness.empty() ? StabilityVerdict::stable_within_sample
                                    : StabilityVerdict::growth_detected;

  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const StabilityRow& x, const StabilityRow& y) { return x.D_in < y.D_in; });
  return out;
}

QmProfile qm_profile(const Space& X, const BoundaryMap& f, double gauge,
                     const TupleSampler& tuples, std::size_t sample_count) {
  if (sample_count == 0)
    throw insufficient_samples_error("quasi-mobius profile needs at least one sampled tuple");
  if (gauge <= 0) throw invalid_parameter_error("gauge must be positive");

  QmProfile out;
  out.gauge = gauge;
  out.rows.reserve(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i) {
    const auto t = tuples(i);
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (pair_gauge(X, t[a], t[b]) > gauge + 1e-9)
          throw invalid_parameter_error("sampled tuple leaves the gauge stratum");
    QmRow row;
    row.cr_in = cross_ratio_paulin(X, t[0], t[1], t[2], t[3]).value;
    row.cr_out = cross_ratio_paulin(X, f.forward(t[0]), f.forward(t[1]), f.forward(t[2]),
                                    f.forward(t[3]))
                     .value;
    out.rows.push_back(row);
  }

  out.slope = 0;
  for (const auto& row : out.rows)
    if (row.cr_in > 1e-12) out.slope = std::max(out.slope, row.cr_out / row.cr_in);
  out.intercept = 0;
  for (const auto& row : out.rows)
    out.intercept = std::max(out.intercept, row.cr_out - out.slope * row.cr_in);
  return out;
}

}  // namespace morseb
