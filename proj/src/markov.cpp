#include "repliq/markov.hpp"

#include <cmath>

#include "repliq/errors.hpp"

namespace repliq {

MarkovTransform markov_transform(const ArrivalProcess& a, double theta) {
    if (a.kind != ArrivalProcess::Kind::MarkovModulated)
        throw WrongVariant("markov_transform needs MarkovModulated arrivals");
    if (!(theta >= 0.0 && theta < a.lambda_iact))
        throw DomainError("markov_transform needs theta in [0, lambda_iact)");

    MarkovTransform t;
    t.to_act = a.lambda_act / (a.lambda_act + theta);
    t.to_iact = a.p * a.lambda_iact / (a.lambda_iact + theta);
    t.stay_act = (1.0 - a.p) * a.lambda_act / (a.lambda_act + theta);
    // eigenvalues of ((0, a), (b, c)): (c +- sqrt(c^2 + 4ab)) / 2
    const double disc = t.stay_act * t.stay_act + 4.0 * t.to_act * t.to_iact;
    t.xi = 0.5 * (t.stay_act + std::sqrt(disc));
    t.h_act = 1.0;
    t.h_iact = t.to_act / t.xi;
    return t;
}

std::pair<double, double> stationary(const ArrivalProcess& a) {
    if (a.kind != ArrivalProcess::Kind::MarkovModulated)
        throw WrongVariant("stationary needs MarkovModulated arrivals");
    return {1.0 / (1.0 + a.p), a.p / (1.0 + a.p)};
}

} // namespace repliq
