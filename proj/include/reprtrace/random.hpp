#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace reprtrace {

// Source of uniform variates in [0, 1). Every consumer documents how many
// draws it takes so that recorded tapes can be replayed exactly.
class UniformSource {
public:
    virtual ~UniformSource() = default;
    virtual double next_uniform() = 0;
};

// Seedable generator with host-independent output: mt19937_64 is fully
// specified by the standard and the conversion to double is done by hand
// rather than through std::uniform_real_distribution.
class Rng final : public UniformSource {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double next_uniform() override {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal by Box-Muller; consumes two uniforms, caches nothing.
    double next_normal();

    // Lognormal multiplier with unit mean: exp(sigma*Z - sigma^2/2).
    double next_lognormal_unit_mean(double sigma);

    // Index drawn proportionally to `cumulative` (running sums of weights).
    std::size_t next_weighted_index(const std::vector<double>& cumulative);

private:
    std::mt19937_64 engine_;
};

// Replays a fixed sequence of uniforms; wraps around when exhausted.
class TapeSource final : public UniformSource {
public:
    explicit TapeSource(std::vector<double> tape) : tape_(std::move(tape)) {}

    double next_uniform() override {
        double u = tape_[pos_ % tape_.size()];
        ++pos_;
        return u;
    }

    std::size_t consumed() const noexcept { return pos_; }

private:
    std::vector<double> tape_;
    std::size_t pos_ = 0;
};

// Records every uniform it forwards, so a run can be re-driven from a tape.
class RecordingSource final : public UniformSource {
public:
    explicit RecordingSource(UniformSource& inner) : inner_(inner) {}

    double next_uniform() override {
        double u = inner_.next_uniform();
        tape_.push_back(u);
        return u;
    }

    const std::vector<double>& tape() const noexcept { return tape_; }

private:
    UniformSource& inner_;
    std::vector<double> tape_;
};

// splitmix64 finalizer, used to derive independent sub-generator seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace reprtrace
