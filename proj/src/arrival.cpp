#include "repliq/arrival.hpp"

#include "repliq/errors.hpp"

namespace repliq {

ArrivalProcess ArrivalProcess::renewal(Distribution inter) {
    ArrivalProcess a;
    a.kind = Kind::Renewal;
    a.inter = std::move(inter);
    return a;
}

ArrivalProcess ArrivalProcess::markov_modulated(double p, double lambda_act, double lambda_iact) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("markov_modulated needs p in (0,1]");
    if (!(lambda_act > 0.0 && lambda_iact > 0.0)) throw DomainError("markov_modulated rates must be > 0");
    if (!(lambda_iact < lambda_act)) throw DomainError("markov_modulated needs lambda_iact < lambda_act");
    ArrivalProcess a;
    a.kind = Kind::MarkovModulated;
    a.p = p;
    a.lambda_act = lambda_act;
    a.lambda_iact = lambda_iact;
    return a;
}

double mean_interarrival(const ArrivalProcess& a) {
    if (a.kind == ArrivalProcess::Kind::Renewal) return mean(a.inter);
    return (1.0 / a.lambda_act + a.p / a.lambda_iact) / (1.0 + a.p);
}

double laplace(const ArrivalProcess& a, double theta) {
    if (a.kind != ArrivalProcess::Kind::Renewal)
        throw WrongVariant("laplace is defined for renewal arrivals only");
    return laplace(a.inter, theta);
}

ArrivalGen::ArrivalGen(const ArrivalProcess& proc, Rng& rng) : proc_(proc), rng_(rng) {
    if (proc_.kind == ArrivalProcess::Kind::MarkovModulated) {
        // stationary start: pi_act = 1/(1+p)
        active_ = rng_.uniform() < 1.0 / (1.0 + proc_.p);
    }
}

double ArrivalGen::next() {
    if (proc_.kind == ArrivalProcess::Kind::Renewal) return sample(proc_.inter, rng_);
    double t;
    if (active_) {
        t = rng_.exponential(proc_.lambda_act);
        if (rng_.uniform() < proc_.p) active_ = false;
    } else {
        t = rng_.exponential(proc_.lambda_iact);
        active_ = true;
    }
    return t;
}

} // namespace repliq
