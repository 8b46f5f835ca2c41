#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tfim/two_qubit.hpp"

namespace tfim {

using StateVector = Eigen::VectorXcd;

struct SampleOptions {
    std::size_t every = 1;        // sample every this many segments
    std::vector<SitePair> pairs;  // reduced matrices recorded per sample
    bool store_states = false;    // keep full state vectors as well
};

struct StateTrajectory {
    std::vector<double> times;
    std::vector<double> fields;
    std::vector<StateVector> states;                     // empty unless store_states
    std::vector<SitePair> pairs;
    std::vector<std::vector<Eigen::Matrix4cd>> reduced; // [pair][sample]

    std::size_t size() const { return times.size(); }
};

struct DensityTrajectory {
    std::vector<double> times;
    std::vector<double> fields;
    std::vector<SitePair> pairs;
    std::vector<std::vector<Eigen::Matrix4cd>> reduced; // [pair][sample]

    std::size_t size() const { return times.size(); }
};

} // namespace tfim
