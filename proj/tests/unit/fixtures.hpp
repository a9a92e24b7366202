#pragma once

#include "wdecay/model.hpp"

namespace wdecay::fixture {

// 1 species, 4 neutrino shells, every cap 1: dimension 3 * 3 * 5 * 5 * 2 * 2 = 900 with 2 massive shells.
inline ModelSpec small_spec(std::size_t shells = 4, std::size_t massive_shells = 1) {
  ModelSpec s;
  s.grid.shells = shells;
  s.grid.massive_shells = massive_shells;
  s.caps = {1, 1, 1, 1, 1, 200000};
  s.nmax = 2;
  return s;
}

inline const Model& small_model() {
  static const Model m = build_model(small_spec(), RunMode::Explore);
  return m;
}

}  // namespace wdecay::fixture
