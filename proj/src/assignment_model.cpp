#include "tokentopics/assignment_model.hpp"

#include "tokentopics/binary_io.hpp"

namespace tokentopics {

namespace {
constexpr std::array<char, 4> kMagic{'T', 'K', 'A', 'M'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_assignment_model(const std::filesystem::path& path, const AssignmentModel& m) {
    if (m.kind == ModelKind::cluster && m.centroids.rows() != m.num_topics)
        throw IntegrityError("cluster model centroid rows do not match topic count");
    detail::BinaryWriter w(path);
    w.put_bytes(kMagic.data(), 4);
    w.put<std::uint32_t>(kVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(m.kind));
    w.put<std::uint32_t>(m.num_topics);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(m.centroids.cols()));
    w.put<std::uint64_t>(m.seed);
    w.put<std::uint32_t>(m.iterations);
    w.put<std::uint32_t>(m.converged ? 1u : 0u);
    w.put<double>(m.objective);
    w.put<double>(m.alpha);
    w.put<double>(m.beta);
    w.put<std::uint64_t>(m.objective_trace.size());
    for (double v : m.objective_trace) w.put<double>(v);
    for (Eigen::Index r = 0; r < m.centroids.rows(); ++r)
        for (Eigen::Index c = 0; c < m.centroids.cols(); ++c) w.put<double>(m.centroids(r, c));
    w.put<std::uint64_t>(m.assignments.size());
    for (auto z : m.assignments) w.put<std::uint32_t>(z);
    w.close();
}

AssignmentModel read_assignment_model(const std::filesystem::path& path) {
    detail::BinaryReader r(path);
    r.expect_magic(kMagic, "assignment model");
    if (const auto v = r.get<std::uint32_t>(); v != kVersion)
        throw FormatError("unsupported model version " + std::to_string(v));
    AssignmentModel m;
    const auto kind = r.get<std::uint32_t>();
    if (kind > 1) throw FormatError("unknown model kind " + std::to_string(kind));
    m.kind = static_cast<ModelKind>(kind);
    m.num_topics = r.get<std::uint32_t>();
    const auto dim = r.get<std::uint32_t>();
    m.seed = r.get<std::uint64_t>();
    m.iterations = r.get<std::uint32_t>();
    m.converged = r.get<std::uint32_t>() != 0;
    m.objective = r.get<double>();
    m.alpha = r.get<double>();
    m.beta = r.get<double>();
    const auto trace = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < trace; ++i) m.objective_trace.push_back(r.get<double>());
    if (m.kind == ModelKind::cluster) {
        m.centroids.resize(m.num_topics, dim);
        for (Eigen::Index i = 0; i < m.centroids.rows(); ++i)
            for (Eigen::Index j = 0; j < m.centroids.cols(); ++j) m.centroids(i, j) = r.get<double>();
    } else if (dim != 0) {
        throw FormatError("LDA model must not carry centroids");
    }
    const auto n = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto z = r.get<std::uint32_t>();
        if (z >= m.num_topics)
            throw IntegrityError("assignment " + std::to_string(i) + " refers to topic " + std::to_string(z) +
                                 " of " + std::to_string(m.num_topics));
        m.assignments.push_back(z);
    }
    r.expect_end();
    return m;
}

}  // namespace tokentopics
