#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wdecay/grid.hpp"

namespace wdecay {

inline constexpr std::size_t kMaxFermionModes = 128;
inline constexpr std::size_t kMaxBosonModes = 32;

enum class Charge { Plus, Minus };
inline Charge opposite(Charge c) { return c == Charge::Plus ? Charge::Minus : Charge::Plus; }
inline int sign_of(Charge c) { return c == Charge::Plus ? 1 : -1; }

enum class BlockKind { MassiveParticle, MassiveAntiparticle, Neutrino, Antineutrino, WMinus, WPlus };
std::string to_string(BlockKind kind);

// b_{l,+} particle, b_{l,-} antiparticle; c_{l,+} neutrino, c_{l,-} antineutrino; a_+ = W-, a_- = W+
BlockKind massive_block(Charge c);
BlockKind neutrino_block(Charge c);
BlockKind boson_block(Charge c);

struct FockState {
  std::array<std::uint64_t, 2> fermions{};
  std::array<std::uint8_t, kMaxBosonModes> bosons{};

  bool occupied(std::size_t fermion_mode) const {
    return (fermions[fermion_mode >> 6] >> (fermion_mode & 63)) & 1u;
  }
  void flip(std::size_t fermion_mode) { fermions[fermion_mode >> 6] ^= std::uint64_t{1} << (fermion_mode & 63); }
  // occupied fermionic modes with index strictly below mode
  int count_below(std::size_t fermion_mode) const {
    const std::size_t w = fermion_mode >> 6;
    const std::uint64_t mask = (std::uint64_t{1} << (fermion_mode & 63)) - 1;
    int c = std::popcount(fermions[w] & mask);
    if (w == 1) c += std::popcount(fermions[0]);
    return c;
  }
  bool operator==(const FockState&) const = default;
};

struct FockStateHash {
  std::size_t operator()(const FockState& s) const noexcept;
};

struct Block {
  BlockKind kind;
  int species;  // -1 for boson blocks
  std::size_t first;  // global mode id of the first mode
  std::size_t count;
  unsigned cap;  // per-block fermion cap, per-mode boson cap
  bool fermionic;
  ChannelKind channel;
};

struct TruncationCaps {
  unsigned massive_particle = 1;
  unsigned massive_antiparticle = 1;
  unsigned neutrino = 2;
  unsigned antineutrino = 2;
  unsigned boson = 1;
  std::size_t max_dimension = 200000;
};

struct Transition {
  FockState state;
  double amplitude;  // fermionic sign, or bosonic sqrt factor
};

class FockBasis {
 public:
  FockBasis() = default;

  static FockBasis enumerate(const ModeGrid& grid, int species, const TruncationCaps& caps);
  static std::size_t predicted_dimension(const ModeGrid& grid, int species, const TruncationCaps& caps);

  std::size_t dimension() const { return states_.size(); }
  const FockState& state(std::size_t i) const { return states_[i]; }
  const std::vector<FockState>& states() const { return states_; }
  std::optional<std::size_t> index(const FockState& s) const;

  const ModeGrid& grid() const { return grid_; }
  int species() const { return species_; }
  const TruncationCaps& caps() const { return caps_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_index(BlockKind kind, int species) const;
  const Block& block(BlockKind kind, int species) const { return blocks_[block_index(kind, species)]; }
  std::size_t mode(BlockKind kind, int species, std::size_t local) const;
  const Block& block_of_mode(std::size_t mode) const;

  std::size_t fermion_modes() const { return fermion_modes_; }
  std::size_t boson_modes() const { return boson_modes_; }
  std::size_t total_modes() const { return fermion_modes_ + boson_modes_; }
  bool is_fermionic(std::size_t mode) const { return mode < fermion_modes_; }

  unsigned occupation(const FockState& s, std::size_t mode) const;
  unsigned block_occupation(const FockState& s, const Block& b) const;

  std::optional<Transition> apply_creation(const FockState& s, std::size_t mode) const;
  std::optional<Transition> apply_annihilation(const FockState& s, std::size_t mode) const;

  nlohmann::json metadata() const;

 private:
  ModeGrid grid_;
  int species_ = 1;
  TruncationCaps caps_;
  std::vector<Block> blocks_;
  std::size_t fermion_modes_ = 0;
  std::size_t boson_modes_ = 0;
  std::vector<FockState> states_;
  std::unordered_map<FockState, std::size_t, FockStateHash> index_;
};

}  // namespace wdecay
