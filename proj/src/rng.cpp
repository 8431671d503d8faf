#include "wcl/rng.hpp"

#include "wcl/error.hpp"

namespace wcl {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix64(seed ^ mix64(stream ^ 0x5851f42d4c957f2dULL))) {}

Rng Rng::derive(std::uint64_t sub) const {
  return Rng(seed_, mix64(stream_) ^ mix64(sub + 0x2545f4914f6cdd1dULL));
}

double Rng::uniform() { return uniform_(engine_); }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

double Rng::normal() { return normal_(engine_); }

double Rng::normal(double mean, double sd) { return mean + sd * normal_(engine_); }

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::zero_distance: return "zero distance";
    case ErrorCode::no_node_above_pmin: return "no node above P_min";
    case ErrorCode::empty_set: return "empty set";
    case ErrorCode::degenerate_geometry: return "degenerate geometry";
    case ErrorCode::denominator_not_sign_definite: return "denominator not sign-definite";
    case ErrorCode::quadrature_failed: return "quadrature failed";
    case ErrorCode::not_psd: return "matrix not positive semidefinite";
    case ErrorCode::degenerate_reduction: return "degenerate reduction";
    case ErrorCode::series_failed: return "series evaluation failed";
    case ErrorCode::isolated_cluster: return "isolated cluster";
    case ErrorCode::no_active_clusters: return "no active clusters";
    case ErrorCode::config: return "configuration error";
  }
  return "unknown";
}

}  // namespace wcl
