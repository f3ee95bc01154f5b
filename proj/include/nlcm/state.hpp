#pragma once

#include <cstddef>
#include <string>

#include "nlcm/errors.hpp"
#include "nlcm/vec.hpp"

namespace nlcm {

/// Instantaneous state of a second-order system, plus the running values of
/// the time integrals carried alongside the motion (one per attached
/// nonlocal constant; all zero at the base time t0).
struct State {
    double t = 0.0;
    Vec q;
    Vec v;
    Vec acc_integrals;

    std::size_t dim() const { return q.size(); }
};

/// Build a state at base time: accumulators start at exactly zero.
inline State make_state(double t0, Vec q, Vec v, std::size_t n_constants = 0) {
    if (q.empty() || q.size() != v.size())
        throw ContractViolation("state requires equal-length q and v with n >= 1, got n_q=" +
                                std::to_string(q.size()) + " n_v=" + std::to_string(v.size()));
    State s;
    s.t = t0;
    s.q = std::move(q);
    s.v = std::move(v);
    s.acc_integrals = zeros(n_constants);
    return s;
}

}  // namespace nlcm
