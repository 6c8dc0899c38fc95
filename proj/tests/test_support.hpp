#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "ecco/core_model.hpp"

namespace ecco::testing {

/// Counts do_step calls of the wrapped slot.
class CountingSlot final : public Subsimulator {
public:
  CountingSlot(std::unique_ptr<Subsimulator> inner, std::size_t* counter)
      : inner_(std::move(inner)), counter_(counter) {}

  [[nodiscard]] std::size_t input_count() const override { return inner_->input_count(); }
  [[nodiscard]] std::size_t output_count() const override { return inner_->output_count(); }
  void set_inputs(std::span<const double> u) override { inner_->set_inputs(u); }
  void do_step(double t, double dt) override {
    ++*counter_;
    inner_->do_step(t, dt);
  }
  void get_outputs(std::span<double> y) const override { inner_->get_outputs(y); }
  [[nodiscard]] std::vector<double> state() const override { return inner_->state(); }
  [[nodiscard]] std::vector<Probe> probes() const override { return inner_->probes(); }

private:
  std::unique_ptr<Subsimulator> inner_;
  std::size_t* counter_;
};

/// x' = -x with one explicit Euler step per macro step; no ports.
class Decay final : public Subsimulator {
public:
  explicit Decay(double x0) : x_(x0) {}
  [[nodiscard]] std::size_t input_count() const override { return 0; }
  [[nodiscard]] std::size_t output_count() const override { return 0; }
  void set_inputs(std::span<const double>) override {}
  void do_step(double, double dt) override { x_ += -x_ * dt; }
  void get_outputs(std::span<double>) const override {}
  [[nodiscard]] std::vector<double> state() const override { return {x_}; }
  [[nodiscard]] std::vector<Probe> probes() const override { return {{"x", x_}}; }

private:
  double x_;
};

/// Emits fixed outputs, ignores inputs; handy for wiring tests.
class FixedOutputs final : public Subsimulator {
public:
  FixedOutputs(std::size_t n_in, std::vector<double> y) : n_in_(n_in), y_(std::move(y)) {}
  [[nodiscard]] std::size_t input_count() const override { return n_in_; }
  [[nodiscard]] std::size_t output_count() const override { return y_.size(); }
  void set_inputs(std::span<const double>) override {}
  void do_step(double, double) override {}
  void get_outputs(std::span<double> y) const override {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = y_[i];
  }
  [[nodiscard]] std::vector<double> state() const override { return y_; }

private:
  std::size_t n_in_;
  std::vector<double> y_;
};

} // namespace ecco::testing
