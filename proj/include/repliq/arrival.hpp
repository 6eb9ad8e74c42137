#ifndef REPLIQ_ARRIVAL_HPP
#define REPLIQ_ARRIVAL_HPP

#include "repliq/dist.hpp"

namespace repliq {

// Renewal stream, or the two-state Markov-modulated stream: while active,
// interarrivals are Exp(lambda_act) and the chain turns inactive w.p. p; an
// inactive period emits one Exp(lambda_iact) interarrival and flips back.
struct ArrivalProcess {
    enum class Kind { Renewal, MarkovModulated };

    Kind kind = Kind::Renewal;
    Distribution inter;               // Renewal only
    double p = 0.0;
    double lambda_act = 0.0;
    double lambda_iact = 0.0;

    static ArrivalProcess renewal(Distribution inter);
    static ArrivalProcess poisson(double rate) { return renewal(Distribution::exponential(rate)); }
    static ArrivalProcess markov_modulated(double p, double lambda_act, double lambda_iact);
};

double mean_interarrival(const ArrivalProcess& a);

// E[e^{-theta t}] of a renewal stream; WrongVariant for MarkovModulated
// (that case goes through the spectral radius of the transformed chain).
double laplace(const ArrivalProcess& a, double theta);

// Stateful interarrival generator; Markov chain starts in its stationary law.
class ArrivalGen {
    const ArrivalProcess& proc_;
    Rng& rng_;
    bool active_ = true;

public:
    ArrivalGen(const ArrivalProcess& proc, Rng& rng);
    double next();
};

} // namespace repliq

#endif
