#pragma once

// Deterministic randomness. Every random decision in the system draws from a
// ChoiceSource; the production implementation derives an independent stream
// per (seed, domain tag, robot, round) so replaying a trace never depends on
// evaluation order, and tests can substitute scripted values.

#include <cstdint>
#include <deque>
#include <stdexcept>

namespace mutvis {

// Domains keep streams for unrelated purposes independent even when they
// share (robot, round) keys.
enum class ChoiceTag : std::uint64_t {
    algorithm = 0xA1,
    scheduler = 0x5C,
    adversary = 0xAD,
    frame = 0xFA,
    generator = 0x6E,
};

class ChoiceSource {
public:
    virtual ~ChoiceSource() = default;
    // Uniform integer in [0, n).
    virtual std::uint32_t pick(std::uint32_t n) = 0;
    // Uniform real in [0, 1).
    virtual double unit_real() = 0;
};

namespace detail {

// splitmix64: tiny, well-mixed, and stateless enough to key by hashing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

} // namespace detail

// Keyed deterministic stream: the sequence depends only on the four key
// components, never on what other streams have consumed.
class ChoiceStream final : public ChoiceSource {
public:
    ChoiceStream(std::uint64_t seed, ChoiceTag tag, std::uint64_t robot,
                 std::uint64_t round) {
        std::uint64_t k = detail::mix_key(seed, static_cast<std::uint64_t>(tag));
        k = detail::mix_key(k, robot);
        k = detail::mix_key(k, round);
        state_ = k;
    }

    std::uint32_t pick(std::uint32_t n) override {
        if (n == 0) throw std::invalid_argument("ChoiceStream::pick: n == 0");
        // Rejection-free multiply-shift; bias is < 2^-32 and irrelevant here,
        // determinism is what matters.
        const std::uint64_t r = detail::splitmix64(state_);
        return static_cast<std::uint32_t>((static_cast<unsigned __int128>(r) * n) >> 64);
    }

    double unit_real() override {
        // 53 top bits -> [0, 1).
        return static_cast<double>(detail::splitmix64(state_) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_ = 0;
};

// Fixed sequence of outcomes for tests: pick() pops integers, unit_real()
// pops reals. Running past the script is a test bug and throws.
class ScriptedChoices final : public ChoiceSource {
public:
    ScriptedChoices() = default;
    explicit ScriptedChoices(std::deque<std::uint32_t> picks,
                             std::deque<double> reals = {})
        : picks_(std::move(picks)), reals_(std::move(reals)) {}

    std::uint32_t pick(std::uint32_t n) override {
        if (n == 0) throw std::invalid_argument("ScriptedChoices::pick: n == 0");
        if (picks_.empty()) throw std::logic_error("ScriptedChoices: pick script exhausted");
        const std::uint32_t v = picks_.front();
        picks_.pop_front();
        if (v >= n) throw std::logic_error("ScriptedChoices: scripted pick out of range");
        return v;
    }

    double unit_real() override {
        if (reals_.empty()) throw std::logic_error("ScriptedChoices: real script exhausted");
        const double v = reals_.front();
        reals_.pop_front();
        return v;
    }

    bool exhausted() const { return picks_.empty() && reals_.empty(); }

private:
    std::deque<std::uint32_t> picks_;
    std::deque<double> reals_;
};

} // namespace mutvis
