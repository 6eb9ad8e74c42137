#ifndef REPLIQ_STABILITY_HPP
#define REPLIQ_STABILITY_HPP

#include <vector>

#include "repliq/arrival.hpp"
#include "repliq/replica.hpp"

namespace repliq {

// k-replication on K servers: replicas of a task go to one batch of k
// servers, jobs are handed to the K/k batches round robin.
struct ReplicationSpec {
    int K = 1;
    int k = 1;
    ReplicaModel service;
    ArrivalProcess arrivals;

    ReplicationSpec(int K_, int k_, ReplicaModel service_, ArrivalProcess arrivals_);
};

// E[min of k iid draws] = int survival^k; closed forms for the families
// where one exists, DivergentMean for Pareto with k*alpha <= 1.
double min_mean(const Distribution& d, int k);
double min_mean_numeric(const Distribution& d, int k); // quadrature path, for cross-checks

// delta E[shared] + (1-delta) min_mean(idio, k)
double min_mean_correlated(const ReplicaModel& m, int k);
double min_mean_service(const ReplicaModel& m, int k);

// rho = (k/K) E[min service] / E[t]; stable iff rho < 1
double utilization(const ReplicationSpec& spec);

// divisor k of K minimizing k * E[min of k]; ties go to the smaller k,
// divergent candidates are skipped, AllUnstable if none is finite.
int best_k(const ReplicaModel& service, int K);
int best_k(const Distribution& service, int K);

std::vector<int> divisors(int K);

} // namespace repliq

#endif
