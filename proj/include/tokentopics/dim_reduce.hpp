#pragma once

#include "tokentopics/binary_io.hpp"
#include "tokentopics/errors.hpp"
#include "tokentopics/random.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace tokentopics {

enum class ReductionMethod : std::uint32_t { pca = 0, srp = 1 };

struct ReductionConfig {
    Eigen::Index target_dim = 100;
    ReductionMethod method = ReductionMethod::pca;
    Eigen::Index batch_size = 0;  // 0 selects five times the input dimension
    double srp_density = 0.0;     // s; 0 selects sqrt(d)

    Eigen::Index batch_for(Eigen::Index d) const { return batch_size > 0 ? batch_size : 5 * d; }

    void validate(Eigen::Index d) const {
        if (target_dim < 1 || target_dim >= d)
            throw ConfigError("target dimension " + std::to_string(target_dim) + " must lie in [1, " +
                              std::to_string(d) + ")");
        if (batch_for(d) < target_dim)
            throw ConfigError("batch size " + std::to_string(batch_for(d)) + " is smaller than target dimension " +
                              std::to_string(target_dim));
        if (srp_density != 0.0 && srp_density < 1.0)
            throw ConfigError("SRP density parameter s must be >= 1");
    }
};

// Top principal directions of the data; rows of `components` are orthonormal
// and ordered by non-increasing explained variance.
template <typename Scalar = double>
struct PcaModel {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Vector mean;
    Matrix components;  // k x d
    Vector explained_variance;
    std::uint64_t samples = 0;

    Eigen::Index input_dim() const { return components.cols(); }
    Eigen::Index output_dim() const { return components.rows(); }
};

template <typename Scalar = double>
struct SrpModel {
    Eigen::SparseMatrix<Scalar, Eigen::RowMajor> projection;  // k x d
    double density = 1.0;                                     // s
    std::uint64_t seed = 0;

    Eigen::Index input_dim() const { return projection.cols(); }
    Eigen::Index output_dim() const { return projection.rows(); }
    Scalar magnitude() const { return static_cast<Scalar>(std::sqrt(density / static_cast<double>(output_dim()))); }
};

// Streaming PCA over batches of rows. Keeps a running mean and scatter matrix
// (pairwise-merge update), so memory is O(d^2) regardless of sample count and
// the result depends only on the batch order.
template <typename Scalar = double>
class IncrementalPca {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    IncrementalPca(Eigen::Index input_dim, ReductionConfig cfg)
        : cfg_(cfg), mean_(Vector::Zero(input_dim)), scatter_(Matrix::Zero(input_dim, input_dim)) {
        cfg_.validate(input_dim);
    }

    Eigen::Index input_dim() const { return mean_.size(); }
    std::uint64_t samples() const { return n_; }

    template <typename Derived>
    void partial_fit(const Eigen::MatrixBase<Derived>& batch) {
        if (batch.cols() != input_dim())
            throw DimensionError("batch has " + std::to_string(batch.cols()) + " columns, expected " +
                                 std::to_string(input_dim()));
        if (batch.rows() == 0) return;
        const Matrix x = batch.template cast<Scalar>();
        const auto nb = static_cast<Scalar>(x.rows());
        const Vector batch_mean = x.colwise().mean().transpose();
        const Matrix centered = x.rowwise() - batch_mean.transpose();
        Matrix batch_scatter = Matrix::Zero(input_dim(), input_dim());
        batch_scatter.template selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
        batch_scatter = batch_scatter.template selfadjointView<Eigen::Lower>();

        const auto na = static_cast<Scalar>(n_);
        const Scalar n = na + nb;
        const Vector delta = batch_mean - mean_;
        mean_ += delta * (nb / n);
        scatter_ += batch_scatter + (delta * delta.transpose()) * (na * nb / n);
        n_ += static_cast<std::uint64_t>(x.rows());
    }

    PcaModel<Scalar> model() const {
        const auto k = cfg_.target_dim;
        if (n_ < static_cast<std::uint64_t>(k))
            throw InsufficientDataError("incremental PCA saw " + std::to_string(n_) + " samples, needs at least " +
                                        std::to_string(k));
        const Scalar denom = static_cast<Scalar>(n_ > 1 ? n_ - 1 : 1);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter_ / denom);
        if (eig.info() != Eigen::Success) throw IntegrityError("covariance eigendecomposition failed");

        PcaModel<Scalar> m;
        m.mean = mean_;
        m.samples = n_;
        m.components.resize(k, input_dim());
        m.explained_variance.resize(k);
        const Eigen::Index d = input_dim();
        for (Eigen::Index r = 0; r < k; ++r) {
            // eigenvalues come back ascending
            Vector v = eig.eigenvectors().col(d - 1 - r);
            Eigen::Index pivot;
            v.cwiseAbs().maxCoeff(&pivot);
            if (v(pivot) < 0) v = -v;
            m.components.row(r) = v.transpose();
            m.explained_variance(r) = std::max<Scalar>(eig.eigenvalues()(d - 1 - r), 0);
        }
        return m;
    }

private:
    ReductionConfig cfg_;
    std::uint64_t n_ = 0;
    Vector mean_;
    Matrix scatter_;
};

// Fits over the rows of `data` in fixed batches, in row order.
template <typename Scalar = double, typename Derived>
PcaModel<Scalar> fit_incremental_pca(const Eigen::MatrixBase<Derived>& data, const ReductionConfig& cfg) {
    const Eigen::Index d = data.cols();
    IncrementalPca<Scalar> ipca(d, cfg);
    if (data.rows() < cfg.target_dim)
        throw InsufficientDataError("need at least " + std::to_string(cfg.target_dim) + " tokens, got " +
                                    std::to_string(data.rows()));
    const Eigen::Index batch = cfg.batch_for(d);
    for (Eigen::Index start = 0; start < data.rows(); start += batch)
        ipca.partial_fit(data.middleRows(start, std::min(batch, data.rows() - start)));
    return ipca.model();
}

// Very sparse random projection: entries are +-sqrt(s/k) with probability
// 1/(2s) each and 0 otherwise; s defaults to sqrt(d).
template <typename Scalar = double>
SrpModel<Scalar> fit_srp(Eigen::Index input_dim, const ReductionConfig& cfg, std::uint64_t seed) {
    cfg.validate(input_dim);
    SrpModel<Scalar> m;
    m.density = cfg.srp_density > 0 ? cfg.srp_density : std::sqrt(static_cast<double>(input_dim));
    m.seed = seed;
    const Eigen::Index k = cfg.target_dim;
    const Scalar value = static_cast<Scalar>(std::sqrt(m.density / static_cast<double>(k)));
    const double half = 0.5 / m.density;

    Rng rng(seed);
    std::vector<Eigen::Triplet<Scalar>> entries;
    entries.reserve(static_cast<std::size_t>(static_cast<double>(k * input_dim) / m.density * 1.2) + 16);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < input_dim; ++c) {
            const double u = rng.uniform();
            if (u < half)
                entries.emplace_back(r, c, value);
            else if (u < 2 * half)
                entries.emplace_back(r, c, -value);
        }
    }
    m.projection.resize(k, input_dim);
    m.projection.setFromTriplets(entries.begin(), entries.end());
    m.projection.makeCompressed();
    return m;
}

namespace detail {
inline void check_dim(Eigen::Index got, Eigen::Index want) {
    if (got != want)
        throw DimensionError("vector has " + std::to_string(got) + " components, model expects " +
                             std::to_string(want));
}
}  // namespace detail

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> transform(const PcaModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_dim(x.size(), m.input_dim());
    return m.components * (x.template cast<Scalar>() - m.mean);
}

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> transform(const SrpModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_dim(x.size(), m.input_dim());
    return m.projection * x.template cast<Scalar>();
}

// Row-wise transform of a token matrix (one token per row).
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> transform_rows(
    const PcaModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_dim(x.cols(), m.input_dim());
    return (x.template cast<Scalar>().rowwise() - m.mean.transpose()) * m.components.transpose();
}

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> transform_rows(
    const SrpModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_dim(x.cols(), m.input_dim());
    return x.template cast<Scalar>() * m.projection.transpose();
}

// Model file: "TKRD" | version | method | d | k | seed | payload (all f64).
using ReductionModel = std::variant<PcaModel<double>, SrpModel<double>>;

inline constexpr std::array<char, 4> kReductionMagic{'T', 'K', 'R', 'D'};
inline constexpr std::uint32_t kReductionVersion = 1;

inline void write_reduction_model(const std::filesystem::path& path, const ReductionModel& model) {
    detail::BinaryWriter w(path);
    w.put_bytes(kReductionMagic.data(), 4);
    w.put<std::uint32_t>(kReductionVersion);
    if (const auto* pca = std::get_if<PcaModel<double>>(&model)) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(ReductionMethod::pca));
        w.put<std::uint32_t>(static_cast<std::uint32_t>(pca->input_dim()));
        w.put<std::uint32_t>(static_cast<std::uint32_t>(pca->output_dim()));
        w.put<std::uint64_t>(0);
        w.put<std::uint64_t>(pca->samples);
        for (Eigen::Index i = 0; i < pca->mean.size(); ++i) w.put<double>(pca->mean(i));
        for (Eigen::Index r = 0; r < pca->components.rows(); ++r)
            for (Eigen::Index c = 0; c < pca->components.cols(); ++c) w.put<double>(pca->components(r, c));
        for (Eigen::Index i = 0; i < pca->explained_variance.size(); ++i) w.put<double>(pca->explained_variance(i));
    } else {
        const auto& srp = std::get<SrpModel<double>>(model);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(ReductionMethod::srp));
        w.put<std::uint32_t>(static_cast<std::uint32_t>(srp.input_dim()));
        w.put<std::uint32_t>(static_cast<std::uint32_t>(srp.output_dim()));
        w.put<std::uint64_t>(srp.seed);
        w.put<double>(srp.density);
        w.put<std::uint64_t>(static_cast<std::uint64_t>(srp.projection.nonZeros()));
        for (Eigen::Index r = 0; r < srp.projection.outerSize(); ++r)
            for (typename Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(srp.projection, r); it; ++it) {
                w.put<std::uint32_t>(static_cast<std::uint32_t>(it.row()));
                w.put<std::uint32_t>(static_cast<std::uint32_t>(it.col()));
                w.put<double>(it.value());
            }
    }
    w.close();
}

inline ReductionModel read_reduction_model(const std::filesystem::path& path) {
    detail::BinaryReader r(path);
    r.expect_magic(kReductionMagic, "reduction model");
    if (const auto v = r.get<std::uint32_t>(); v != kReductionVersion)
        throw FormatError("unsupported reduction model version " + std::to_string(v));
    const auto method = r.get<std::uint32_t>();
    const Eigen::Index d = r.get<std::uint32_t>();
    const Eigen::Index k = r.get<std::uint32_t>();
    const auto seed = r.get<std::uint64_t>();
    if (d == 0 || k == 0 || k >= d) throw FormatError("reduction model has invalid dims");
    if (method == static_cast<std::uint32_t>(ReductionMethod::pca)) {
        PcaModel<double> m;
        m.samples = r.get<std::uint64_t>();
        m.mean.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) m.mean(i) = r.get<double>();
        m.components.resize(k, d);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < d; ++j) m.components(i, j) = r.get<double>();
        m.explained_variance.resize(k);
        for (Eigen::Index i = 0; i < k; ++i) m.explained_variance(i) = r.get<double>();
        r.expect_end();
        return m;
    }
    if (method == static_cast<std::uint32_t>(ReductionMethod::srp)) {
        SrpModel<double> m;
        m.seed = seed;
        m.density = r.get<double>();
        const auto nnz = r.get<std::uint64_t>();
        std::vector<Eigen::Triplet<double>> entries;
        for (std::uint64_t i = 0; i < nnz; ++i) {
            const auto row = r.get<std::uint32_t>();
            const auto col = r.get<std::uint32_t>();
            const auto val = r.get<double>();
            if (row >= k || col >= d) throw FormatError("projection entry outside matrix bounds");
            entries.emplace_back(row, col, val);
        }
        r.expect_end();
        m.projection.resize(k, d);
        m.projection.setFromTriplets(entries.begin(), entries.end());
        m.projection.makeCompressed();
        return m;
    }
    throw FormatError("unknown reduction method tag " + std::to_string(method));
}

}  // namespace tokentopics
