#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wdecay/errors.hpp"
#include "wdecay/grid.hpp"

using namespace wdecay;

namespace {

double total(const RadialShells& s) {
  double t = 0.0;
  for (double w : s.weights) t += w;
  return t;
}

}  // namespace

TEST(Grid, GaussIntegratesBallVolumeExactly) {
  for (std::size_t n : {2u, 3u, 7u}) {
    const RadialShells s = build_radial_grid(1.5, n, QuadratureScheme::Gauss);
    EXPECT_NEAR(total(s), 4.0 * std::numbers::pi * std::pow(1.5, 3) / 3.0, 1e-12) << n;
  }
}

TEST(Grid, MidpointConvergesQuadratically) {
  const double exact = 4.0 * std::numbers::pi * 8.0 / 3.0;
  const double e6 = std::abs(total(build_radial_grid(2.0, 6, QuadratureScheme::Midpoint)) - exact);
  const double e12 = std::abs(total(build_radial_grid(2.0, 12, QuadratureScheme::Midpoint)) - exact);
  EXPECT_NEAR(e6 / e12, 4.0, 1e-9);
}

TEST(Grid, MidpointRadii) {
  const RadialShells s = build_radial_grid(2.0, 4, QuadratureScheme::Midpoint);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s.radii[0], 0.25);
  EXPECT_DOUBLE_EQ(s.radii[3], 1.75);
  for (double w : s.widths) EXPECT_DOUBLE_EQ(w, 0.5);
}

TEST(Grid, RejectsEmpty) {
  EXPECT_THROW(build_radial_grid(1.0, 0, QuadratureScheme::Midpoint), Error);
}

TEST(Grid, LabelsAndCollapse) {
  GridSpec spec;
  spec.collapse_labels = false;
  const ModeGrid g = build_mode_grid(spec);
  EXPECT_EQ(g.massive.labels, 2);
  EXPECT_EQ(g.boson.labels, 3);
  EXPECT_EQ(g.neutrino.size(), spec.shells * 2);
  spec.collapse_labels = true;
  EXPECT_EQ(build_mode_grid(spec).neutrino.size(), spec.shells);
}

TEST(Grid, RestrictNeutrinos) {
  GridSpec spec;
  spec.shells = 6;
  const ModeGrid g = build_mode_grid(spec);
  std::vector<std::size_t> kept;
  const ModeGrid r = restrict_neutrinos(g, 0.5, &kept);
  ASSERT_EQ(r.neutrino.size(), kept.size());
  EXPECT_EQ(kept.size(), 5u);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    EXPECT_GE(r.neutrino.radius(i), 0.5);
    EXPECT_EQ(r.neutrino.radius(i), g.neutrino.radius(kept[i]));
  }
}

TEST(Grid, JsonRoundTripIsExact) {
  GridSpec spec;
  spec.scheme = QuadratureScheme::Gauss;
  const ModeGrid g = build_mode_grid(spec);
  const ModeGrid back = mode_grid_from_json(nlohmann::json::parse(to_json(g).dump()));
  EXPECT_EQ(back.neutrino.shells.radii, g.neutrino.shells.radii);
  EXPECT_EQ(back.neutrino.shells.weights, g.neutrino.shells.weights);
  EXPECT_EQ(back.boson.labels, g.boson.labels);
}

TEST(Grid, Dispersion) {
  EXPECT_DOUBLE_EQ(ChannelSpec::neutrino().dispersion(0.7), 0.7);
  EXPECT_DOUBLE_EQ(ChannelSpec::massive_lepton(3.0).dispersion(4.0), 5.0);
}
