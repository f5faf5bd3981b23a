#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "isched/core.hpp"
#include "isched/rational.hpp"

namespace isched {

using BigInt = boost::multiprecision::cpp_int;

// Powers of a rational base > 1, used as the rounded-reward state ladder and
// as the job weight classes. States are integer exponents; comparisons
// against exact rationals go through big-integer cross multiplication, so
// round-down decisions are never subject to float drift. Realized double
// values are only used for reporting and for the dense combination sums.
class PowerLadder {
 public:
  explicit PowerLadder(Rat base) : base_(base) {
    if (!(base > Rat(1))) throw std::invalid_argument("ladder base must be > 1");
    num_.push_back(1);
    den_.push_back(1);
    val_.push_back(1.0);
  }

  Rat base() const { return base_; }

  // Largest i >= 0 with base^i <= x, or -1 when x < 1.
  int floor_index(const Rat& x) const {
    if (x.num() < x.den()) return -1;  // x < 1
    return floor_of(BigInt(x.num()), BigInt(x.den()));
  }

  // round-down-to-ladder of (value(i) + v); i = -1 stands for the zero state.
  int floor_index_sum(int i, const Rat& v) const {
    BigInt xn, xd;
    if (i < 0) {
      xn = v.num();
      xd = v.den();
    } else {
      ensure(i);
      xn = num_[i] * v.den() + BigInt(v.num()) * den_[i];
      xd = den_[i] * v.den();
    }
    if (xn < xd) return -1;
    return floor_of(xn, xd);
  }

  // round-down-to-ladder of (value(i) + other.value(c)).
  int floor_index_sum_power(int i, const PowerLadder& other, int c) const {
    other.ensure(c);
    BigInt xn, xd;
    if (i < 0) {
      xn = other.num_[c];
      xd = other.den_[c];
    } else {
      ensure(i);
      xn = num_[i] * other.den_[c] + other.num_[c] * den_[i];
      xd = den_[i] * other.den_[c];
    }
    if (xn < xd) return -1;
    return floor_of(xn, xd);
  }

  // Exact comparisons of the realized value against a rational bound.
  bool value_at_least(int i, const Rat& bound) const {
    if (i < 0) return !(Rat(0) < bound);
    ensure(i);
    return num_[i] * BigInt(bound.den()) >= BigInt(bound.num()) * den_[i];
  }
  bool value_at_most(int i, const Rat& bound) const {
    if (i < 0) return !(bound < Rat(0));
    ensure(i);
    return num_[i] * BigInt(bound.den()) <= BigInt(bound.num()) * den_[i];
  }

  double value(int i) const {
    if (i < 0) return 0.0;
    ensure(i);
    return val_[i];
  }

 private:
  void ensure(int i) const {
    while ((int)num_.size() <= i) {
      num_.push_back(num_.back() * base_.num());
      den_.push_back(den_.back() * base_.den());
      val_.push_back(val_.back() * base_.to_double());
    }
  }

  // Largest i with base^i <= xn/xd, given xn >= xd > 0.
  int floor_of(const BigInt& xn, const BigInt& xd) const {
    auto le = [&](int i) {
      ensure(i);
      return num_[i] * xd <= xn * den_[i];
    };
    int hi = 1;
    while (le(hi)) hi *= 2;
    int lo = hi / 2;  // le(lo) holds (le(0) always does), le(hi) fails
    while (lo + 1 < hi) {
      int mid = (lo + hi) / 2;
      (le(mid) ? lo : hi) = mid;
    }
    return lo;
  }

  Rat base_;
  mutable std::vector<BigInt> num_, den_;
  mutable std::vector<double> val_;
};

// Running total rounded down to the ladder after every addition. The final
// value underestimates the true sum by at most an epsilon fraction when at
// most K values are added to a ladder with base (1 + eps/K).
struct RoundedAccumulator {
  int exponent = -1;  // -1 encodes exact zero
};

inline RoundedAccumulator round_accumulate(const PowerLadder& ladder,
                                           RoundedAccumulator acc, Rat v) {
  if (v < Rat(1)) throw std::invalid_argument("accumulated values must be >= 1");
  return RoundedAccumulator{ladder.floor_index_sum(acc.exponent, v)};
}

// Ladder with base (1 + eps/K): the reward states of the sparse solver.
inline PowerLadder reward_ladder(const ApproxParams& params) {
  Rat eps = params.epsilon;
  Rat base = Rat(1) + eps / Rat(params.k);
  return PowerLadder(base);
}

}  // namespace isched
