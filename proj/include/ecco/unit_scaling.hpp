#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "ecco/core_model.hpp"

namespace ecco {

/// Presents a subsimulator in rescaled units: effort-role signals are
/// multiplied by `effort_scale`, flow-role signals by `flow_scale`, on the
/// way out; inputs are converted back before they reach the wrapped slot.
/// With flow_scale = 1/effort_scale every power is unchanged.
class UnitScaledSlot final : public Subsimulator {
public:
  UnitScaledSlot(std::unique_ptr<Subsimulator> inner, std::vector<PortRole> input_roles,
                 std::vector<PortRole> output_roles, double effort_scale, double flow_scale)
      : inner_(std::move(inner)), input_roles_(std::move(input_roles)), output_roles_(std::move(output_roles)),
        effort_scale_(effort_scale), flow_scale_(flow_scale) {
    if (input_roles_.size() != inner_->input_count() || output_roles_.size() != inner_->output_count()) {
      throw LengthMismatch("UnitScaledSlot: role lists do not match the wrapped slot");
    }
    buffer_.resize(inner_->input_count());
  }

  [[nodiscard]] std::size_t input_count() const override { return inner_->input_count(); }
  [[nodiscard]] std::size_t output_count() const override { return inner_->output_count(); }

  void set_inputs(std::span<const double> u) override {
    for (std::size_t i = 0; i < u.size(); ++i) {
      buffer_[i] = u[i] / scale(input_roles_[i]);
    }
    inner_->set_inputs(buffer_);
  }

  void do_step(double t, double dt) override { inner_->do_step(t, dt); }

  void get_outputs(std::span<double> y) const override {
    inner_->get_outputs(y);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] *= scale(output_roles_[i]);
    }
  }

  [[nodiscard]] std::vector<double> state() const override { return inner_->state(); }
  [[nodiscard]] std::vector<Probe> probes() const override { return inner_->probes(); }

private:
  [[nodiscard]] double scale(PortRole r) const { return r == PortRole::Effort ? effort_scale_ : flow_scale_; }

  std::unique_ptr<Subsimulator> inner_;
  std::vector<PortRole> input_roles_;
  std::vector<PortRole> output_roles_;
  double effort_scale_;
  double flow_scale_;
  std::vector<double> buffer_;
};

/// Wraps every slot of a two-port-per-bond setup according to the roles
/// declared on the bonds.
inline void rescale_units(SlotList& slots, const ConnectionGraph& graph, double effort_scale, double flow_scale) {
  for (std::size_t s = 0; s < slots.size(); ++s) {
    std::vector<PortRole> in(slots[s]->input_count(), PortRole::Effort);
    std::vector<PortRole> out(slots[s]->output_count(), PortRole::Effort);
    for (const auto& b : graph.bonds) {
      for (const PowerPort* p : {&b.port1, &b.port2}) {
        if (p->owner == s) {
          in.at(p->input_index) = p->input_role;
          out.at(p->output_index) = p->output_role;
        }
      }
    }
    slots[s] = std::make_unique<UnitScaledSlot>(std::move(slots[s]), std::move(in), std::move(out), effort_scale,
                                                flow_scale);
  }
}

} // namespace ecco
