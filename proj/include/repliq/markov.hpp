#ifndef REPLIQ_MARKOV_HPP
#define REPLIQ_MARKOV_HPP

#include "repliq/arrival.hpp"

namespace repliq {

// Exponentially transformed transition matrix of the two-state arrival chain,
// ordered (inactive, active):
//
//   T_theta = |        0           l_act/(l_act+th) |
//             | p l_iact/(l_iact+th)  (1-p) l_act/(l_act+th) |
//
// At theta = 0 this is the transition matrix itself. xi is the spectral
// radius, h the positive right eigenvector normalized to h_act = 1.
struct MarkovTransform {
    double to_act = 0.0;        // (iact -> act) entry
    double to_iact = 0.0;       // (act -> iact) entry
    double stay_act = 0.0;      // (act -> act) entry
    double xi = 1.0;
    double h_act = 1.0;
    double h_iact = 1.0;
};

// theta must lie in [0, lambda_iact)
MarkovTransform markov_transform(const ArrivalProcess& a, double theta);

// stationary law (pi_act, pi_iact) = (1, p)/(1+p)
std::pair<double, double> stationary(const ArrivalProcess& a);

} // namespace repliq

#endif
