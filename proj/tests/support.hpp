#ifndef GAPSCHED_TESTS_SUPPORT_HPP
#define GAPSCHED_TESTS_SUPPORT_HPP

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gapsched/model.hpp"

namespace gs = gapsched;

inline gs::Task mk_task(gs::TaskId id, std::int64_t length, double deadline, double submit = 0.0, int npe = 1) {
    gs::Task t;
    t.id = id;
    t.length = length;
    t.deadline = deadline;
    t.submit_time = submit;
    t.npe = npe;
    return t;
}

inline gs::FogNode mk_node(gs::NodeId id, double mips, int slots = 1) {
    gs::FogNode n;
    n.id = id;
    n.mips = mips;
    n.npe_slots = slots;
    return n;
}

inline ::testing::AssertionResult rel_near(double got, double want, double tol = 1e-9) {
    const double scale = std::max(std::abs(want), 1e-300);
    if (std::abs(got - want) <= tol * scale) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << got << " differs from " << want << " by more than " << tol
                                         << " relative";
}

#endif
