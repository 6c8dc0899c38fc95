#pragma once

// Ports, power bonds, the connection graph and the subsimulator contract.
//
// A power bond joins one port of simulator S1 with one port of simulator S2.
// Each port takes one power variable as input and emits the conjugate one,
// so every input*output product along a bond is a power. The connection
// u1 = c1*y2, u2 = c2*y1 is restricted to the antisymmetric pattern
// c1*c2 = -1, which makes sigma = (c1 - c2)/2 a proper sign.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecco/error.hpp"

namespace ecco {

enum class PortRole { Effort, Flow };

[[nodiscard]] constexpr std::string_view to_string(PortRole role) {
  return role == PortRole::Effort ? "effort" : "flow";
}

struct PowerPort {
  std::size_t owner = 0;        ///< index of the simulator slot
  std::size_t input_index = 0;  ///< local input index in the owner
  std::size_t output_index = 0; ///< local output index in the owner
  PortRole input_role = PortRole::Effort;
  PortRole output_role = PortRole::Flow;
};

/// Orientation of the u*y products along a bond. OutOfPort means u*y is the
/// power leaving the simulator through the port; IntoPort means it is the
/// power entering it. Ledgers report every power as leaving S1 towards S2.
enum class PowerSense { OutOfPort, IntoPort };

struct PowerBond {
  PowerPort port1;
  PowerPort port2;
  int c1 = -1; ///< u1 = c1 * y2
  int c2 = +1; ///< u2 = c2 * y1
  PowerSense sense = PowerSense::OutOfPort;
  std::string name;

  /// (c1 - c2) / 2; only meaningful once the bond passed validation.
  [[nodiscard]] constexpr int sigma() const { return (c1 - c2) / 2; }

  /// +1 for OutOfPort, -1 for IntoPort.
  [[nodiscard]] constexpr int sense_sign() const { return sense == PowerSense::OutOfPort ? 1 : -1; }
};

struct ConnectionGraph {
  std::vector<PowerBond> bonds;
};

/// Named diagnostic value exposed by a subsimulator.
struct Probe {
  std::string_view name;
  double value = 0.0;
};

/// Contract every coupled subsimulator implements.
///
/// One macro step is set_inputs(u(t_i)), do_step(t_i, dt_i), get_outputs().
/// Inputs stay constant during do_step. get_outputs has no side effects and
/// before the first step returns the output map of the initial state.
class Subsimulator {
public:
  virtual ~Subsimulator() = default;

  [[nodiscard]] virtual std::size_t input_count() const = 0;
  [[nodiscard]] virtual std::size_t output_count() const = 0;

  virtual void set_inputs(std::span<const double> u) = 0;
  virtual void do_step(double t, double dt) = 0;
  virtual void get_outputs(std::span<double> y) const = 0;

  /// Internal state, used by the master only to detect non-finite values.
  [[nodiscard]] virtual std::vector<double> state() const = 0;

  [[nodiscard]] virtual std::vector<Probe> probes() const { return {}; }
};

using SlotList = std::vector<std::unique_ptr<Subsimulator>>;

/// Validated wiring: bonds plus the layout of the stacked input/output
/// vectors (all inputs of slot 0, then slot 1, ...).
class Wiring {
public:
  [[nodiscard]] const std::vector<PowerBond>& bonds() const { return bonds_; }
  [[nodiscard]] std::size_t bond_count() const { return bonds_.size(); }
  [[nodiscard]] std::size_t slot_count() const { return input_offset_.size(); }
  [[nodiscard]] std::size_t total_inputs() const { return total_inputs_; }
  [[nodiscard]] std::size_t total_outputs() const { return total_outputs_; }

  [[nodiscard]] std::size_t input_offset(std::size_t slot) const { return input_offset_.at(slot); }
  [[nodiscard]] std::size_t output_offset(std::size_t slot) const { return output_offset_.at(slot); }

  [[nodiscard]] std::size_t global_input(const PowerPort& p) const {
    return input_offset_[p.owner] + p.input_index;
  }
  [[nodiscard]] std::size_t global_output(const PowerPort& p) const {
    return output_offset_[p.owner] + p.output_index;
  }

  /// Builds a wiring from per-slot port counts. Throws on any violation.
  static Wiring validate(const ConnectionGraph& graph, std::span<const std::size_t> inputs_per_slot,
                         std::span<const std::size_t> outputs_per_slot);

private:
  std::vector<PowerBond> bonds_;
  std::vector<std::size_t> input_offset_;
  std::vector<std::size_t> output_offset_;
  std::size_t total_inputs_ = 0;
  std::size_t total_outputs_ = 0;
};

class PortRoleMismatch : public Error {
public:
  using Error::Error;
};

inline Wiring Wiring::validate(const ConnectionGraph& graph, std::span<const std::size_t> inputs_per_slot,
                               std::span<const std::size_t> outputs_per_slot) {
  if (inputs_per_slot.size() != outputs_per_slot.size()) {
    throw LengthMismatch("input and output count lists differ in length");
  }
  Wiring w;
  const std::size_t n_slots = inputs_per_slot.size();
  w.input_offset_.resize(n_slots);
  w.output_offset_.resize(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s) {
    w.input_offset_[s] = w.total_inputs_;
    w.output_offset_[s] = w.total_outputs_;
    w.total_inputs_ += inputs_per_slot[s];
    w.total_outputs_ += outputs_per_slot[s];
  }

  std::vector<bool> input_used(w.total_inputs_, false);
  std::vector<bool> output_used(w.total_outputs_, false);

  auto check_port = [&](const PowerBond& b, const PowerPort& p, std::string_view which) {
    const std::string label = "bond '" + b.name + "' " + std::string(which);
    if (p.owner >= n_slots) {
      throw DanglingPort(label + ": owner slot " + std::to_string(p.owner) + " does not exist");
    }
    if (p.input_index >= inputs_per_slot[p.owner]) {
      throw DanglingPort(label + ": input index " + std::to_string(p.input_index) + " out of range");
    }
    if (p.output_index >= outputs_per_slot[p.owner]) {
      throw DanglingPort(label + ": output index " + std::to_string(p.output_index) + " out of range");
    }
    if (p.input_role == p.output_role) {
      throw PortRoleMismatch(label + ": input and output carry the same power variable kind");
    }
    const std::size_t gi = w.global_input(p);
    const std::size_t go = w.global_output(p);
    if (input_used[gi]) {
      throw DuplicateConnection(label + ": input already connected");
    }
    if (output_used[go]) {
      throw DuplicateConnection(label + ": output already connected");
    }
    input_used[gi] = true;
    output_used[go] = true;
  };

  for (const auto& b : graph.bonds) {
    if ((b.c1 != 1 && b.c1 != -1) || (b.c2 != 1 && b.c2 != -1) || b.c1 * b.c2 != -1) {
      throw NonAntisymmetricBond("bond '" + b.name + "': coefficients must satisfy c1*c2 = -1 with |c| = 1");
    }
    if (b.port1.owner == b.port2.owner) {
      throw DuplicateConnection("bond '" + b.name + "' connects a simulator to itself");
    }
    check_port(b, b.port1, "port 1");
    check_port(b, b.port2, "port 2");
    if (b.port1.output_role != b.port2.input_role || b.port2.output_role != b.port1.input_role) {
      throw PortRoleMismatch("bond '" + b.name + "': output of one side must match the input role of the other");
    }
    w.bonds_.push_back(b);
  }
  return w;
}

/// Validates the graph against the port counts of the given slots.
[[nodiscard]] inline Wiring validate_graph(const ConnectionGraph& graph, const SlotList& slots) {
  std::vector<std::size_t> ins;
  std::vector<std::size_t> outs;
  ins.reserve(slots.size());
  outs.reserve(slots.size());
  for (const auto& s : slots) {
    ins.push_back(s->input_count());
    outs.push_back(s->output_count());
  }
  return Wiring::validate(graph, ins, outs);
}

/// u = L*y on the stacked vectors. Inputs not touched by any bond are zero.
inline void apply_connections(const Wiring& wiring, std::span<const double> y, std::span<double> u) {
  if (y.size() != wiring.total_outputs() || u.size() != wiring.total_inputs()) {
    throw LengthMismatch("apply_connections: stacked vector sizes do not match the wiring");
  }
  std::fill(u.begin(), u.end(), 0.0);
  for (const auto& b : wiring.bonds()) {
    u[wiring.global_input(b.port1)] = b.c1 * y[wiring.global_output(b.port2)];
    u[wiring.global_input(b.port2)] = b.c2 * y[wiring.global_output(b.port1)];
  }
}

[[nodiscard]] inline std::vector<double> apply_connections(const Wiring& wiring, std::span<const double> y) {
  std::vector<double> u(wiring.total_inputs(), 0.0);
  apply_connections(wiring, y, u);
  return u;
}

} // namespace ecco
