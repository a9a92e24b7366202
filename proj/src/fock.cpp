#include "wdecay/fock.hpp"

#include <cmath>
#include <functional>

#include "wdecay/errors.hpp"

namespace wdecay {

std::string to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::MassiveParticle: return "massive_particle";
    case BlockKind::MassiveAntiparticle: return "massive_antiparticle";
    case BlockKind::Neutrino: return "neutrino";
    case BlockKind::Antineutrino: return "antineutrino";
    case BlockKind::WMinus: return "w_minus";
    case BlockKind::WPlus: return "w_plus";
  }
  return "unknown";
}

BlockKind massive_block(Charge c) { return c == Charge::Plus ? BlockKind::MassiveParticle : BlockKind::MassiveAntiparticle; }
BlockKind neutrino_block(Charge c) { return c == Charge::Plus ? BlockKind::Neutrino : BlockKind::Antineutrino; }
BlockKind boson_block(Charge c) { return c == Charge::Plus ? BlockKind::WMinus : BlockKind::WPlus; }

std::size_t FockStateHash::operator()(const FockState& s) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  mix(s.fermions[0]);
  mix(s.fermions[1]);
  for (std::size_t i = 0; i < kMaxBosonModes; i += 8) {
    std::uint64_t w = 0;
    for (std::size_t k = 0; k < 8; ++k) w |= std::uint64_t{s.bosons[i + k]} << (8 * k);
    mix(w);
  }
  return static_cast<std::size_t>(h);
}

namespace {

struct Layout {
  std::vector<Block> blocks;
  std::size_t fermions = 0;
  std::size_t bosons = 0;
};

Layout make_layout(const ModeGrid& grid, int species, const TruncationCaps& caps) {
  if (species < 1 || species > 3) {
    throw Error(ErrorCode::BadParameters, "fock", "enumerate_basis", "species count must be 1, 2 or 3");
  }
  Layout l;
  const std::size_t nm = grid.massive.size();
  const std::size_t nn = grid.neutrino.size();
  for (int s = 0; s < species; ++s) {
    l.blocks.push_back({BlockKind::MassiveParticle, s, l.fermions, nm, caps.massive_particle, true, ChannelKind::MassiveLepton});
    l.fermions += nm;
    l.blocks.push_back({BlockKind::MassiveAntiparticle, s, l.fermions, nm, caps.massive_antiparticle, true, ChannelKind::MassiveLepton});
    l.fermions += nm;
    l.blocks.push_back({BlockKind::Neutrino, s, l.fermions, nn, caps.neutrino, true, ChannelKind::Neutrino});
    l.fermions += nn;
    l.blocks.push_back({BlockKind::Antineutrino, s, l.fermions, nn, caps.antineutrino, true, ChannelKind::Neutrino});
    l.fermions += nn;
  }
  if (l.fermions > kMaxFermionModes) {
    throw Error(ErrorCode::DimensionOverflow, "fock", "enumerate_basis", "too many fermionic modes for the state encoding");
  }
  const std::size_t nb = grid.boson.size();
  l.blocks.push_back({BlockKind::WMinus, -1, l.fermions, nb, caps.boson, false, ChannelKind::Boson});
  l.blocks.push_back({BlockKind::WPlus, -1, l.fermions + nb, nb, caps.boson, false, ChannelKind::Boson});
  l.bosons = 2 * nb;
  if (l.bosons > kMaxBosonModes) {
    throw Error(ErrorCode::DimensionOverflow, "fock", "enumerate_basis", "too many boson modes for the state encoding");
  }
  if (caps.boson > 255) throw Error(ErrorCode::BadParameters, "fock", "enumerate_basis", "boson cap above 255");
  return l;
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

double block_dimension(const Block& b) {
  if (b.fermionic) {
    double d = 0.0;
    for (std::size_t k = 0; k <= std::min<std::size_t>(b.cap, b.count); ++k) d += binomial(b.count, k);
    return d;
  }
  return std::pow(static_cast<double>(b.cap) + 1.0, static_cast<double>(b.count));
}

// Admissible block configurations in lexicographic order of the occupation vector.
std::vector<FockState> block_configurations(const Block& b, std::size_t fermion_total) {
  std::vector<FockState> out;
  FockState cur;
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t local, unsigned used) {
    if (local == b.count) {
      out.push_back(cur);
      return;
    }
    if (b.fermionic) {
      rec(local + 1, used);
      if (used < b.cap) {
        cur.flip(b.first + local);
        rec(local + 1, used + 1);
        cur.flip(b.first + local);
      }
    } else {
      const std::size_t slot = b.first + local - fermion_total;
      for (unsigned n = 0; n <= b.cap; ++n) {
        cur.bosons[slot] = static_cast<std::uint8_t>(n);
        rec(local + 1, used);
      }
      cur.bosons[slot] = 0;
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace

std::size_t FockBasis::predicted_dimension(const ModeGrid& grid, int species, const TruncationCaps& caps) {
  const Layout l = make_layout(grid, species, caps);
  double d = 1.0;
  for (const Block& b : l.blocks) d *= block_dimension(b);
  if (d > static_cast<double>(caps.max_dimension)) {
    throw Error(ErrorCode::DimensionOverflow, "fock", "enumerate_basis",
                "dimension " + std::to_string(static_cast<long long>(d)) + " exceeds limit " +
                    std::to_string(caps.max_dimension));
  }
  return static_cast<std::size_t>(d);
}

FockBasis FockBasis::enumerate(const ModeGrid& grid, int species, const TruncationCaps& caps) {
  const std::size_t dim = predicted_dimension(grid, species, caps);
  Layout l = make_layout(grid, species, caps);
  FockBasis basis;
  basis.grid_ = grid;
  basis.species_ = species;
  basis.caps_ = caps;
  basis.blocks_ = l.blocks;
  basis.fermion_modes_ = l.fermions;
  basis.boson_modes_ = l.bosons;

  std::vector<std::vector<FockState>> parts;
  for (const Block& b : l.blocks) parts.push_back(block_configurations(b, l.fermions));
  basis.states_.reserve(dim);
  basis.index_.reserve(dim);
  std::vector<std::size_t> odo(parts.size(), 0);
  while (true) {
    FockState s;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const FockState& c = parts[p][odo[p]];
      s.fermions[0] |= c.fermions[0];
      s.fermions[1] |= c.fermions[1];
      for (std::size_t k = 0; k < kMaxBosonModes; ++k) s.bosons[k] |= c.bosons[k];
    }
    basis.index_.emplace(s, basis.states_.size());
    basis.states_.push_back(s);
    std::size_t p = parts.size();
    while (p > 0) {
      --p;
      if (++odo[p] < parts[p].size()) break;
      odo[p] = 0;
      if (p == 0) return basis;
    }
    if (parts.empty()) return basis;
  }
}

std::optional<std::size_t> FockBasis::index(const FockState& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FockBasis::block_index(BlockKind kind, int species) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    if (b.kind == kind && (!b.fermionic || b.species == species)) return i;
  }
  throw Error(ErrorCode::UnknownBlock, "fock", "block", to_string(kind) + " for species " + std::to_string(species + 1));
}

std::size_t FockBasis::mode(BlockKind kind, int species, std::size_t local) const {
  const Block& b = block(kind, species);
  if (local >= b.count) throw Error(ErrorCode::UnknownMode, "fock", "mode", "local mode out of range");
  return b.first + local;
}

const Block& FockBasis::block_of_mode(std::size_t mode) const {
  for (const Block& b : blocks_) {
    if (mode >= b.first && mode < b.first + b.count) return b;
  }
  throw Error(ErrorCode::UnknownMode, "fock", "block_of_mode", "mode " + std::to_string(mode));
}

unsigned FockBasis::occupation(const FockState& s, std::size_t mode) const {
  if (mode < fermion_modes_) return s.occupied(mode) ? 1u : 0u;
  return s.bosons[mode - fermion_modes_];
}

unsigned FockBasis::block_occupation(const FockState& s, const Block& b) const {
  unsigned n = 0;
  for (std::size_t m = b.first; m < b.first + b.count; ++m) n += occupation(s, m);
  return n;
}

std::optional<Transition> FockBasis::apply_creation(const FockState& s, std::size_t mode) const {
  if (mode >= total_modes()) throw Error(ErrorCode::UnknownMode, "fock", "apply_creation", "mode " + std::to_string(mode));
  if (mode < fermion_modes_) {
    if (s.occupied(mode)) return std::nullopt;
    const Block& b = block_of_mode(mode);
    if (block_occupation(s, b) >= b.cap) return std::nullopt;
    Transition t{s, (s.count_below(mode) & 1) ? -1.0 : 1.0};
    t.state.flip(mode);
    return t;
  }
  const std::size_t slot = mode - fermion_modes_;
  const unsigned n = s.bosons[slot];
  if (n >= caps_.boson) return std::nullopt;
  Transition t{s, std::sqrt(static_cast<double>(n) + 1.0)};
  t.state.bosons[slot] = static_cast<std::uint8_t>(n + 1);
  return t;
}

std::optional<Transition> FockBasis::apply_annihilation(const FockState& s, std::size_t mode) const {
  if (mode >= total_modes()) {
    throw Error(ErrorCode::UnknownMode, "fock", "apply_annihilation", "mode " + std::to_string(mode));
  }
  if (mode < fermion_modes_) {
    if (!s.occupied(mode)) return std::nullopt;
    Transition t{s, (s.count_below(mode) & 1) ? -1.0 : 1.0};
    t.state.flip(mode);
    return t;
  }
  const std::size_t slot = mode - fermion_modes_;
  const unsigned n = s.bosons[slot];
  if (n == 0) return std::nullopt;
  Transition t{s, std::sqrt(static_cast<double>(n))};
  t.state.bosons[slot] = static_cast<std::uint8_t>(n - 1);
  return t;
}

nlohmann::json FockBasis::metadata() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (const Block& b : blocks_) {
    blocks.push_back({{"kind", to_string(b.kind)},
                      {"species", b.species + 1},
                      {"first_mode", b.first},
                      {"modes", b.count},
                      {"cap", b.cap}});
  }
  return {{"dimension", dimension()},
          {"species", species_},
          {"caps",
           {{"massive_particle", caps_.massive_particle},
            {"massive_antiparticle", caps_.massive_antiparticle},
            {"neutrino", caps_.neutrino},
            {"antineutrino", caps_.antineutrino},
            {"boson", caps_.boson}}},
          {"blocks", blocks}};
}

}  // namespace wdecay
