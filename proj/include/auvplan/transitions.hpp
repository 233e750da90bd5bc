#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "auvplan/flowfield.hpp"
#include "auvplan/lattice.hpp"

namespace auvplan {

enum class Action : std::uint8_t { Drift, Forward, RotateLeft, RotateRight, Up, Down };

inline constexpr std::array<Action, 6> kAllActions = {
    Action::Drift, Action::Forward, Action::RotateLeft,
    Action::RotateRight, Action::Up, Action::Down};

/// Preference among equal-cost choices, most preferred first.
inline constexpr std::array<Action, 6> kActionsByPriority = {
    Action::Drift, Action::Up, Action::Down,
    Action::Forward, Action::RotateLeft, Action::RotateRight};

int priority_rank(Action a);  ///< position in kActionsByPriority
std::string_view action_name(Action a);  ///< DRIFT, FORWARD, ROTATE_LEFT, ...
std::optional<Action> parse_action(std::string_view name);

using Cost = std::int64_t;

/// Energy per action. Up/Down charge `glide`, both rotations charge `rotate`.
struct CostSet {
  Cost drift = 0;
  Cost glide = 2;
  Cost forward = 4;
  Cost rotate = 10;

  /// Requires 0 <= drift < glide < forward < rotate.
  void validate() const;
  CostSet scaled(Cost k) const { return {drift * k, glide * k, forward * k, rotate * k}; }
  bool operator==(const CostSet&) const = default;
};

Cost action_cost(Action a, const CostSet& costs);

/// min(|a - b|, 2 pi - |a - b|), in [0, pi].
double angular_distance(double theta, double theta_w);

/// Angular distance in degrees over 180, so aligned = 0 and opposed = 1.
double alignment_score(double theta, double theta_w);

/// Cells moved for an alignment score: <= 0.2 -> 2, <= 0.5 -> 1, else 0.
int displacement_cells(double score);

/// Direction from a cell center to its mapped cell center, in [0, 2 pi).
/// nullopt when the cell maps onto itself (still water).
std::optional<double> flow_direction(const FlowField& field, const Cell& cell, double dt);

/// Nearest of the 8 compass steps (0 = east, counterclockwise); exact ties
/// round counterclockwise.
int compass_step(double theta);

struct UncertaintyConfig {
  bool lateral_dispersal = true;
  bool operator==(const UncertaintyConfig&) const = default;
};

struct KinematicsConfig {
  double dt = 0.0;  ///< seconds per flow-mapping step
  UncertaintyConfig uncertainty;
  /// Forward also stays put when the alignment score exceeds 0.5.
  bool strict_paper_displacement = false;
};

/// Successors of one state-action pair: the nominal outcome plus lateral
/// dispersal. `members` is sorted, unique, and contains `nominal`.
struct OutcomeSet {
  StateIndex nominal = 0;
  std::vector<StateIndex> members;
  bool operator==(const OutcomeSet&) const = default;
};

/// Vehicle kinematics over one flow field. Holds a reference to the field,
/// which must outlive the model.
class TransitionModel {
 public:
  TransitionModel(const FlowField& field, KinematicsConfig config);

  const FlowField& field() const { return *field_; }
  const Lattice& lattice() const { return lattice_; }
  const KinematicsConfig& config() const { return config_; }

  /// nullopt when the action is unavailable (Up at the surface, Down at the
  /// bottom, or a glide into a land cell). Throws for invalid states.
  std::optional<OutcomeSet> try_successors(const State& s, Action a) const;

  /// Same, but throws ActionUnavailable instead of returning nullopt.
  OutcomeSet successors(const State& s, Action a) const;

 private:
  Cell step(const Cell& from, int dir) const;
  Cell advance(Cell from, int dir, int steps) const;
  OutcomeSet outcome(const State& from, const State& to, std::optional<int> motion_dir) const;

  const FlowField* field_;
  Lattice lattice_;
  KinematicsConfig config_;
};

}  // namespace auvplan
