#include "wdecay/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wdecay/errors.hpp"

namespace wdecay {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(k) + 1.0) * z * p1 - static_cast<double>(k) * p2) / (static_cast<double>(k) + 1.0);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

std::string to_string(QuadratureScheme scheme) {
  return scheme == QuadratureScheme::Midpoint ? "midpoint" : "gauss";
}

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::MassiveLepton: return "massive";
    case ChannelKind::Neutrino: return "neutrino";
    case ChannelKind::Boson: return "boson";
  }
  return "unknown";
}

QuadratureScheme scheme_from_string(const std::string& name) {
  if (name == "midpoint") return QuadratureScheme::Midpoint;
  if (name == "gauss") return QuadratureScheme::Gauss;
  throw Error(ErrorCode::BadParameters, "grid", "scheme_from_string", "unknown scheme '" + name + "'");
}

double ChannelSpec::dispersion(double radius) const {
  switch (kind) {
    case ChannelKind::Neutrino: return radius;
    case ChannelKind::MassiveLepton:
    case ChannelKind::Boson: return std::sqrt(radius * radius + mass * mass);
  }
  return 0.0;
}

RadialShells build_radial_grid(double pmax, std::size_t shells, QuadratureScheme scheme) {
  if (shells == 0) throw Error(ErrorCode::EmptyGrid, "grid", "build_radial_grid", "shells must be at least 1");
  if (!(pmax > 0.0)) throw Error(ErrorCode::NonPositiveBound, "grid", "build_radial_grid", "pmax must be positive");
  RadialShells out;
  out.pmax = pmax;
  out.scheme = scheme;
  out.radii.resize(shells);
  out.widths.resize(shells);
  out.weights.resize(shells);
  if (scheme == QuadratureScheme::Midpoint) {
    const double n = static_cast<double>(shells);
    for (std::size_t i = 0; i < shells; ++i) {
      out.radii[i] = pmax * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n);
      out.widths[i] = pmax / n;
    }
  } else {
    std::vector<double> x, w;
    gauss_legendre(shells, x, w);
    for (std::size_t i = 0; i < shells; ++i) {
      out.radii[i] = 0.5 * pmax * (x[i] + 1.0);
      out.widths[i] = 0.5 * pmax * w[i];
    }
  }
  for (std::size_t i = 0; i < shells; ++i) out.weights[i] = kFourPi * out.radii[i] * out.radii[i] * out.widths[i];
  return out;
}

int default_labels(ChannelKind kind) { return kind == ChannelKind::Boson ? 3 : 2; }

double ChannelGrid::label_value(std::size_t mode) const {
  if (labels == 1) return 0.0;
  const int l = label_index(mode);
  if (kind == ChannelKind::Boson) return static_cast<double>(l - 1);
  return l == 0 ? -0.5 : 0.5;
}

ModePoint ChannelGrid::point(std::size_t mode) const { return {kind, radius(mode), label_value(mode), weight(mode)}; }

std::vector<double> ChannelGrid::radii() const {
  std::vector<double> r(size());
  for (std::size_t m = 0; m < r.size(); ++m) r[m] = radius(m);
  return r;
}

std::vector<double> ChannelGrid::weights() const {
  std::vector<double> w(size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = weight(m);
  return w;
}

const ChannelGrid& ModeGrid::channel(ChannelKind kind) const {
  switch (kind) {
    case ChannelKind::MassiveLepton: return massive;
    case ChannelKind::Neutrino: return neutrino;
    case ChannelKind::Boson: return boson;
  }
  return neutrino;
}

std::vector<ModePoint> ModeGrid::points() const {
  std::vector<ModePoint> out;
  for (const ChannelGrid* c : {&massive, &neutrino, &boson}) {
    for (std::size_t m = 0; m < c->size(); ++m) out.push_back(c->point(m));
  }
  return out;
}

double ModeGrid::pmax() const { return std::max({massive.shells.pmax, neutrino.shells.pmax, boson.shells.pmax}); }

ModeGrid build_mode_grid(const GridSpec& spec) {
  ModeGrid g;
  g.massive.kind = ChannelKind::MassiveLepton;
  g.massive.shells = build_radial_grid(spec.massive_pmax, spec.massive_shells, spec.scheme);
  g.neutrino.kind = ChannelKind::Neutrino;
  g.neutrino.shells = build_radial_grid(spec.pmax, spec.shells, spec.scheme);
  g.boson.kind = ChannelKind::Boson;
  g.boson.shells = build_radial_grid(spec.boson_pmax, spec.boson_shells, spec.scheme);
  for (ChannelGrid* c : {&g.massive, &g.neutrino, &g.boson}) c->labels = spec.collapse_labels ? 1 : default_labels(c->kind);
  return g;
}

ModeGrid restrict_neutrinos(const ModeGrid& grid, double min_radius, std::vector<std::size_t>* kept) {
  ModeGrid out = grid;
  const RadialShells& src = grid.neutrino.shells;
  RadialShells& dst = out.neutrino.shells;
  dst.radii.clear();
  dst.widths.clear();
  dst.weights.clear();
  std::vector<std::size_t> shell_map;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src.radii[i] >= min_radius) {
      shell_map.push_back(i);
      dst.radii.push_back(src.radii[i]);
      dst.widths.push_back(src.widths[i]);
      dst.weights.push_back(src.weights[i]);
    }
  }
  if (kept) {
    kept->clear();
    for (int l = 0; l < grid.neutrino.labels; ++l) {
      for (std::size_t s : shell_map) kept->push_back(static_cast<std::size_t>(l) * src.size() + s);
    }
  }
  return out;
}

std::vector<double> dispersion_values(const ChannelGrid& grid, const ChannelSpec& spec) {
  if (grid.kind != spec.kind) {
    throw Error(ErrorCode::ChannelMismatch, "grid", "dispersion_values",
                "grid channel " + to_string(grid.kind) + " does not match spec " + to_string(spec.kind));
  }
  std::vector<double> e(grid.size());
  for (std::size_t m = 0; m < e.size(); ++m) e[m] = spec.dispersion(grid.radius(m));
  return e;
}

nlohmann::json to_json(const ChannelGrid& grid) {
  return {{"channel", to_string(grid.kind)},
          {"labels", grid.labels},
          {"pmax", grid.shells.pmax},
          {"scheme", to_string(grid.shells.scheme)},
          {"radii", grid.shells.radii},
          {"widths", grid.shells.widths},
          {"weights", grid.shells.weights}};
}

nlohmann::json to_json(const ModeGrid& grid) {
  return {{"massive", to_json(grid.massive)}, {"neutrino", to_json(grid.neutrino)}, {"boson", to_json(grid.boson)}};
}

ChannelGrid channel_grid_from_json(const nlohmann::json& j) {
  ChannelGrid g;
  const std::string ch = j.at("channel").get<std::string>();
  if (ch == "massive") g.kind = ChannelKind::MassiveLepton;
  else if (ch == "neutrino") g.kind = ChannelKind::Neutrino;
  else if (ch == "boson") g.kind = ChannelKind::Boson;
  else throw Error(ErrorCode::ParseError, "grid", "channel_grid_from_json", "unknown channel '" + ch + "'");
  g.labels = j.at("labels").get<int>();
  g.shells.pmax = j.at("pmax").get<double>();
  g.shells.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  g.shells.radii = j.at("radii").get<std::vector<double>>();
  g.shells.widths = j.at("widths").get<std::vector<double>>();
  g.shells.weights = j.at("weights").get<std::vector<double>>();
  return g;
}

ModeGrid mode_grid_from_json(const nlohmann::json& j) {
  return {channel_grid_from_json(j.at("massive")), channel_grid_from_json(j.at("neutrino")),
          channel_grid_from_json(j.at("boson"))};
}

}  // namespace wdecay
