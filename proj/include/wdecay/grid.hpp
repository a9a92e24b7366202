#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace wdecay {

enum class QuadratureScheme { Midpoint, Gauss };
enum class Statistics { Fermionic, Bosonic };
enum class ChannelKind { MassiveLepton, Neutrino, Boson };

std::string to_string(QuadratureScheme scheme);
std::string to_string(ChannelKind kind);
QuadratureScheme scheme_from_string(const std::string& name);

struct ChannelSpec {
  ChannelKind kind;
  Statistics statistics;
  double mass;

  static ChannelSpec massive_lepton(double mass) { return {ChannelKind::MassiveLepton, Statistics::Fermionic, mass}; }
  static ChannelSpec neutrino() { return {ChannelKind::Neutrino, Statistics::Fermionic, 0.0}; }
  static ChannelSpec boson(double mass) { return {ChannelKind::Boson, Statistics::Bosonic, mass}; }

  double dispersion(double radius) const;
};

struct RadialShells {
  double pmax = 0.0;
  QuadratureScheme scheme = QuadratureScheme::Midpoint;
  std::vector<double> radii;
  std::vector<double> widths;   // one-dimensional quadrature weight
  std::vector<double> weights;  // 4 pi r^2 * width

  std::size_t size() const { return radii.size(); }
};

RadialShells build_radial_grid(double pmax, std::size_t shells, QuadratureScheme scheme);

struct ModePoint {
  ChannelKind channel;
  double radius;
  double label;  // spin or polarization value; 0 when labels are collapsed
  double weight;
};

// One particle channel: shells times discrete labels. Mode index = label * shells + shell.
struct ChannelGrid {
  ChannelKind kind = ChannelKind::Neutrino;
  RadialShells shells;
  int labels = 1;

  std::size_t size() const { return shells.size() * static_cast<std::size_t>(labels); }
  std::size_t shell_of(std::size_t mode) const { return mode % shells.size(); }
  int label_index(std::size_t mode) const { return static_cast<int>(mode / shells.size()); }
  double radius(std::size_t mode) const { return shells.radii[shell_of(mode)]; }
  double weight(std::size_t mode) const { return shells.weights[shell_of(mode)]; }
  double label_value(std::size_t mode) const;
  ModePoint point(std::size_t mode) const;
  std::vector<double> radii() const;
  std::vector<double> weights() const;
};

int default_labels(ChannelKind kind);

struct ModeGrid {
  ChannelGrid massive;
  ChannelGrid neutrino;
  ChannelGrid boson;

  const ChannelGrid& channel(ChannelKind kind) const;
  std::vector<ModePoint> points() const;
  double pmax() const;
};

struct GridSpec {
  double pmax = 2.0;
  std::size_t shells = 6;
  QuadratureScheme scheme = QuadratureScheme::Midpoint;
  double massive_pmax = 1.0;
  std::size_t massive_shells = 1;
  double boson_pmax = 1.0;
  std::size_t boson_shells = 1;
  bool collapse_labels = true;
};

ModeGrid build_mode_grid(const GridSpec& spec);

// Keeps neutrino shells with radius >= min_radius. kept[i] is the original neutrino mode of new mode i.
ModeGrid restrict_neutrinos(const ModeGrid& grid, double min_radius, std::vector<std::size_t>* kept);

std::vector<double> dispersion_values(const ChannelGrid& grid, const ChannelSpec& spec);

nlohmann::json to_json(const ChannelGrid& grid);
nlohmann::json to_json(const ModeGrid& grid);
ChannelGrid channel_grid_from_json(const nlohmann::json& j);
ModeGrid mode_grid_from_json(const nlohmann::json& j);

}  // namespace wdecay
