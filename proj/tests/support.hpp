#pragma once

// Test-only helpers: scratch directories, synthetic data generators, and
// independent oracles (adjusted Rand index) shared by the unit and
// acceptance suites.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <tuple>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace tokentopics::testing {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tokentopics-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::VectorXd random_unit(std::mt19937_64& gen, Eigen::Index dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(gen);
    return v.normalized();
}

struct PlantedSphere {
    RowMatrix points;
    RowMatrix directions;
    std::vector<std::uint32_t> labels;
};

// n points split evenly over k random directions; each point is rotated away
// from its direction by a N(0, sigma) angle along a random tangent.
inline PlantedSphere planted_sphere(Eigen::Index n, Eigen::Index k, Eigen::Index dim, double sigma,
                                    std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> angle(0.0, sigma);
    PlantedSphere out;
    out.directions.resize(k, dim);
    for (Eigen::Index j = 0; j < k; ++j) out.directions.row(j) = random_unit(gen, dim).transpose();
    out.points.resize(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto label = static_cast<std::uint32_t>(i % k);
        const Eigen::VectorXd mu = out.directions.row(label).transpose();
        Eigen::VectorXd t = random_unit(gen, dim);
        t -= t.dot(mu) * mu;
        t.normalize();
        const double theta = angle(gen);
        out.points.row(i) = (std::cos(theta) * mu + std::sin(theta) * t).transpose();
        out.labels.push_back(label);
    }
    return out;
}

// Hubert-Arabie adjusted Rand index from the contingency table.
inline double adjusted_rand_index(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
    std::map<std::uint32_t, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1;
        ra[a[i]] += 1;
        rb[b[i]] += 1;
    }
    auto c2 = [](double x) { return x * (x - 1) / 2; };
    double index = 0, sa = 0, sb = 0;
    for (const auto& [k, v] : joint) index += c2(v);
    for (const auto& [k, v] : ra) sa += c2(v);
    for (const auto& [k, v] : rb) sb += c2(v);
    const double expected = sa * sb / c2(static_cast<double>(a.size()));
    const double max_index = (sa + sb) / 2;
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

inline std::vector<double> dirichlet(std::mt19937_64& gen, std::size_t n, double concentration) {
    std::gamma_distribution<double> gamma(concentration, 1.0);
    std::vector<double> v(n);
    double sum = 0;
    for (auto& x : v) sum += x = gamma(gen);
    for (auto& x : v) x /= sum;
    return v;
}

struct PlantedLda {
    std::vector<std::uint32_t> doc_ids, type_ids, topics;
    Eigen::MatrixXd phi;  // K x V
};

// Token stream drawn from the LDA generative process with the given priors.
inline PlantedLda planted_lda(std::uint32_t docs, std::uint32_t tokens_per_doc, std::uint32_t k, std::uint32_t v,
                              double alpha, double beta, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    PlantedLda out;
    out.phi.resize(k, v);
    std::vector<std::vector<double>> words;
    for (std::uint32_t z = 0; z < k; ++z) {
        words.push_back(dirichlet(gen, v, beta));
        for (std::uint32_t w = 0; w < v; ++w) out.phi(z, w) = words[z][w];
    }
    for (std::uint32_t d = 0; d < docs; ++d) {
        const auto theta = dirichlet(gen, k, alpha);
        std::discrete_distribution<std::uint32_t> pick_topic(theta.begin(), theta.end());
        for (std::uint32_t i = 0; i < tokens_per_doc; ++i) {
            const auto z = pick_topic(gen);
            std::discrete_distribution<std::uint32_t> pick_word(words[z].begin(), words[z].end());
            out.doc_ids.push_back(d);
            out.topics.push_back(z);
            out.type_ids.push_back(pick_word(gen));
        }
    }
    return out;
}

// Greedy one-to-one matching of estimated to planted rows by smallest total
// variation distance; returns the largest matched distance.
inline double greedy_matched_tv(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& planted) {
    const Eigen::Index k = planted.rows();
    std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index a = 0; a < estimated.rows(); ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            pairs.emplace_back(0.5 * (estimated.row(a) - planted.row(b)).cwiseAbs().sum(), a, b);
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> used_a(static_cast<std::size_t>(estimated.rows())), used_b(static_cast<std::size_t>(k));
    double worst = 0;
    for (const auto& [tv, a, b] : pairs) {
        if (used_a[static_cast<std::size_t>(a)] || used_b[static_cast<std::size_t>(b)]) continue;
        used_a[static_cast<std::size_t>(a)] = used_b[static_cast<std::size_t>(b)] = true;
        worst = std::max(worst, tv);
    }
    return worst;
}

}  // namespace tokentopics::testing
