#pragma once

#include "tokentopics/sphere_cluster.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace tokentopics {

enum class ModelKind : std::uint32_t { cluster = 0, lda = 1 };

// Hard token -> topic state shared by cluster and LDA models, so topic
// summaries and metrics do not care which produced it.
//
// File layout ("TKAM", little-endian):
//   magic | version u32 | kind u32 | K u32 | dim u32 | seed u64 | iterations u32 |
//   converged u32 | objective f64 | alpha f64 | beta f64 | trace_len u64 | trace f64[] |
//   centroids f64[K*dim] | token_count u64 | assignments u32[]
struct AssignmentModel {
    ModelKind kind = ModelKind::cluster;
    std::uint32_t num_topics = 0;
    std::uint64_t seed = 0;
    std::uint32_t iterations = 0;
    bool converged = false;
    double objective = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> objective_trace;
    PointMatrix<double> centroids;  // empty for LDA
    std::vector<std::uint32_t> assignments;
};

void write_assignment_model(const std::filesystem::path& path, const AssignmentModel& model);
AssignmentModel read_assignment_model(const std::filesystem::path& path);

template <typename Scalar>
AssignmentModel to_assignment_model(const ClusterModel<Scalar>& m) {
    AssignmentModel out;
    out.kind = ModelKind::cluster;
    out.num_topics = static_cast<std::uint32_t>(m.num_clusters());
    out.seed = m.seed;
    out.iterations = m.iterations_run;
    out.converged = m.converged;
    out.objective = m.objective;
    out.objective_trace = m.objective_trace;
    out.centroids = m.centroids.template cast<double>();
    out.assignments = m.assignments;
    return out;
}

}  // namespace tokentopics
