#pragma once

#include "tokentopics/errors.hpp"
#include "tokentopics/parallel.hpp"
#include "tokentopics/random.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace tokentopics {

template <typename Scalar = double>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar = double>
struct ClusterModel {
    PointMatrix<Scalar> centroids;            // K x k, unit rows
    std::vector<std::uint32_t> assignments;   // one cluster id per point
    double objective = 0.0;                   // sum of cos(x, centroid[assign(x)])
    std::vector<double> objective_trace;      // objective after every update step
    std::uint32_t iterations_run = 0;
    bool converged = false;
    std::uint64_t seed = 0;

    Eigen::Index num_clusters() const { return centroids.rows(); }
};

struct ClusterOptions {
    std::uint32_t max_iter = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    // Candidates drawn per seeding step; the one that most lowers the total
    // 1 - cos potential is kept. 1 gives plain spkm++, 0 selects 2 + floor(ln K).
    unsigned init_trials = 0;
};

inline unsigned resolve_init_trials(unsigned trials, Eigen::Index k) {
    if (trials > 0) return trials;
    return 2u + static_cast<unsigned>(std::floor(std::log(static_cast<double>(std::max<Eigen::Index>(k, 1)))));
}

// Copy of `points` with every row scaled to unit L2 norm. Zero rows are rejected.
template <typename Scalar = double, typename Derived>
PointMatrix<Scalar> normalize_rows(const Eigen::MatrixBase<Derived>& points) {
    PointMatrix<Scalar> out = points.template cast<Scalar>();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const Scalar norm = out.row(i).norm();
        if (!(norm > 0) || !std::isfinite(static_cast<double>(norm)))
            throw InputError("point " + std::to_string(i) + " is a zero or non-finite vector");
        out.row(i) /= norm;
    }
    return out;
}

template <typename Scalar>
struct SeedingResult {
    PointMatrix<Scalar> centroids;
    std::vector<Eigen::Index> indices;  // rows of the input chosen as seeds, in order
};

// spkm++ seeding on unit vectors: the first seed is uniform, later seeds are
// drawn with probability proportional to min over chosen seeds of 1 - cos.
template <typename Scalar>
SeedingResult<Scalar> spkmpp_init(const PointMatrix<Scalar>& points, Eigen::Index k, std::uint64_t seed,
                                  unsigned trials = 1, unsigned threads = 1) {
    const Eigen::Index n = points.rows();
    if (k < 1) throw InputError("cluster count must be >= 1");
    if (n < k)
        throw InputError("cannot seed " + std::to_string(k) + " clusters from " + std::to_string(n) + " points");
    trials = std::max(1u, trials);

    Rng rng(seed);
    SeedingResult<Scalar> out;
    out.centroids.resize(k, points.cols());
    out.indices.reserve(static_cast<std::size_t>(k));

    std::vector<double> weight(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<double> candidate(static_cast<std::size_t>(n));

    auto distances_to = [&](Eigen::Index c, std::vector<double>& into, bool take_min) {
        parallel_chunks(static_cast<std::size_t>(n), threads, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const double dist = std::max(
                    0.0, 1.0 - static_cast<double>(points.row(static_cast<Eigen::Index>(i)).dot(points.row(c))));
                into[i] = take_min ? std::min(weight[i], dist) : dist;
            }
        });
    };
    auto choose = [&](Eigen::Index idx) {
        out.centroids.row(static_cast<Eigen::Index>(out.indices.size())) = points.row(idx);
        out.indices.push_back(idx);
        distances_to(idx, weight, true);
    };

    choose(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));
    while (static_cast<Eigen::Index>(out.indices.size()) < k) {
        double total = 0.0;
        for (double w : weight) total += w;
        if (!(total > 0.0))
            throw InputError("fewer than " + std::to_string(k) + " distinct directions among the points");

        Eigen::Index best = -1;
        double best_potential = std::numeric_limits<double>::infinity();
        for (unsigned t = 0; t < trials; ++t) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            Eigen::Index pick = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double w = weight[static_cast<std::size_t>(i)];
                if (w <= 0.0) continue;
                pick = i;
                acc += w;
                if (acc > target) break;
            }
            if (trials == 1) {
                best = pick;
                break;
            }
            distances_to(pick, candidate, true);
            double potential = 0.0;
            for (double w : candidate) potential += w;
            if (potential < best_potential) {
                best_potential = potential;
                best = pick;
            }
        }
        choose(best);
    }
    return out;
}

namespace detail {

// Index of the most cosine-similar centroid; ties go to the lowest id.
template <typename Scalar, typename Row>
std::uint32_t nearest_centroid(const PointMatrix<Scalar>& centroids, const Row& x, Scalar& best_sim) {
    std::uint32_t best = 0;
    best_sim = centroids.row(0).dot(x);
    for (Eigen::Index j = 1; j < centroids.rows(); ++j) {
        const Scalar s = centroids.row(j).dot(x);
        if (s > best_sim) {
            best_sim = s;
            best = static_cast<std::uint32_t>(j);
        }
    }
    return best;
}

}  // namespace detail

// Recomputes sum_i cos(x_i, centroid[assign_i]) for unit points and centroids.
template <typename Scalar>
double cluster_objective(const PointMatrix<Scalar>& unit_points, const PointMatrix<Scalar>& centroids,
                         const std::vector<std::uint32_t>& assignments) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < unit_points.rows(); ++i)
        sum += static_cast<double>(unit_points.row(i).dot(centroids.row(assignments[static_cast<std::size_t>(i)])));
    return sum;
}

// Spherical k-means: alternate argmax-cosine assignment and normalized-mean
// centroid updates until no assignment changes or max_iter updates have run.
// Empty clusters are reseeded with the point least similar to its centroid.
template <typename Scalar = double, typename Derived>
ClusterModel<Scalar> fit(const Eigen::MatrixBase<Derived>& raw_points, Eigen::Index k, const ClusterOptions& opt) {
    if (k < 1) throw InputError("cluster count must be >= 1");
    if (opt.max_iter < 1) throw InputError("max_iter must be >= 1");
    const PointMatrix<Scalar> points = normalize_rows<Scalar>(raw_points);
    const Eigen::Index n = points.rows();
    const Eigen::Index dim = points.cols();

    ClusterModel<Scalar> m;
    m.seed = opt.seed;
    m.centroids = spkmpp_init<Scalar>(points, k, opt.seed, resolve_init_trials(opt.init_trials, k), opt.threads).centroids;
    m.assignments.assign(static_cast<std::size_t>(n), static_cast<std::uint32_t>(k));

    std::vector<Scalar> sim(static_cast<std::size_t>(n));
    std::vector<std::size_t> chunk_changes(chunk_count(static_cast<std::size_t>(n)));
    std::vector<std::uint32_t> members_offset(static_cast<std::size_t>(k) + 1);
    std::vector<std::uint32_t> members(static_cast<std::size_t>(n));

    for (std::uint32_t iter = 0; iter < opt.max_iter; ++iter) {
        parallel_chunks(static_cast<std::size_t>(n), opt.threads, [&](std::size_t c, std::size_t b, std::size_t e) {
            std::size_t changed = 0;
            for (std::size_t i = b; i < e; ++i) {
                Scalar s;
                const auto z = detail::nearest_centroid(m.centroids, points.row(static_cast<Eigen::Index>(i)), s);
                sim[i] = s;
                changed += (z != m.assignments[i]);
                m.assignments[i] = z;
            }
            chunk_changes[c] = changed;
        });
        std::size_t changes = 0;
        for (auto c : chunk_changes) changes += c;

        std::vector<std::uint32_t> counts(static_cast<std::size_t>(k), 0);
        for (auto z : m.assignments) ++counts[z];
        for (Eigen::Index j = 0; j < k; ++j) {
            if (counts[static_cast<std::size_t>(j)] > 0) continue;
            std::size_t worst = members.size();
            for (std::size_t i = 0; i < sim.size(); ++i)
                if (counts[m.assignments[i]] > 1 && (worst == members.size() || sim[i] < sim[worst])) worst = i;
            if (worst == members.size()) throw InputError("fewer points than clusters");
            --counts[m.assignments[worst]];
            m.assignments[worst] = static_cast<std::uint32_t>(j);
            ++counts[static_cast<std::size_t>(j)];
            sim[worst] = 1;
            ++changes;
        }
        if (changes == 0) {
            m.converged = true;
            break;
        }

        // Members of each cluster in ascending point order, so every centroid
        // sum has a fixed reduction order regardless of the thread count.
        members_offset.assign(members_offset.size(), 0);
        for (auto z : m.assignments) ++members_offset[z + 1];
        for (std::size_t j = 1; j < members_offset.size(); ++j) members_offset[j] += members_offset[j - 1];
        {
            auto cursor = members_offset;
            for (std::size_t i = 0; i < m.assignments.size(); ++i)
                members[cursor[m.assignments[i]]++] = static_cast<std::uint32_t>(i);
        }
        std::vector<double> cluster_norm(static_cast<std::size_t>(k), 0.0);
        parallel_chunks(
            static_cast<std::size_t>(k), opt.threads,
            [&](std::size_t, std::size_t b, std::size_t e) {
                Eigen::Matrix<Scalar, 1, Eigen::Dynamic> sum(dim);
                for (std::size_t j = b; j < e; ++j) {
                    sum.setZero();
                    for (auto p = members_offset[j]; p < members_offset[j + 1]; ++p) sum += points.row(members[p]);
                    const Scalar norm = sum.norm();
                    cluster_norm[j] = static_cast<double>(norm);
                    if (norm > 0) m.centroids.row(static_cast<Eigen::Index>(j)) = sum / norm;
                }
            },
            16);
        // sum_{x in C} x . (s / |s|) = |s|
        double objective = 0.0;
        for (double v : cluster_norm) objective += v;
        m.objective_trace.push_back(objective);
        m.iterations_run = iter + 1;
    }
    m.objective = cluster_objective(points, m.centroids, m.assignments);
    return m;
}

// Cluster id of the centroid most cosine-similar to `v` (lowest id on ties).
template <typename Scalar, typename Derived>
std::uint32_t assign(const ClusterModel<Scalar>& model, const Eigen::MatrixBase<Derived>& v) {
    if (v.size() != model.centroids.cols())
        throw DimensionError("vector has " + std::to_string(v.size()) + " components, model expects " +
                             std::to_string(model.centroids.cols()));
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> x = v.template cast<Scalar>().transpose();
    if (!(x.norm() > 0)) throw InputError("cannot assign a zero vector");
    Scalar s;
    return detail::nearest_centroid(model.centroids, x, s);
}

}  // namespace tokentopics
