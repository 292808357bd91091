#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cloe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;

/// Real descriptor realization G(s) = C (sE - A)^{-1} B + D.
///
/// E defaults to the identity and D to zero. A model of order zero is a
/// constant gain D. Construction validates dimensions and rejects pencils
/// that are singular at every probe point.
class StateSpaceModel {
public:
    StateSpaceModel(Matrix A, Matrix B, Matrix C, std::optional<Matrix> E = std::nullopt,
                    std::optional<Matrix> D = std::nullopt);

    /// Order-zero model G(s) = D.
    static StateSpaceModel constant(Matrix D);

    const Matrix& E() const noexcept { return E_; }
    const Matrix& A() const noexcept { return A_; }
    const Matrix& B() const noexcept { return B_; }
    const Matrix& C() const noexcept { return C_; }
    const Matrix& D() const noexcept { return D_; }

    Eigen::Index order() const noexcept { return A_.rows(); }
    Eigen::Index outputs() const noexcept { return D_.rows(); }
    Eigen::Index inputs() const noexcept { return D_.cols(); }

    friend bool operator==(const StateSpaceModel& a, const StateSpaceModel& b);

private:
    StateSpaceModel() = default;
    void validate() const;

    Matrix E_, A_, B_, C_, D_;
};

struct FrequencySample {
    double omega = 0.0;
    CMatrix response;
};

enum class GridSpacing { logarithmic, explicit_points };

/// Strictly increasing list of finite frequencies in rad/s.
class FrequencyGrid {
public:
    /// Validates ordering and finiteness; throws InvalidRange otherwise.
    explicit FrequencyGrid(std::vector<double> points,
                           GridSpacing spacing = GridSpacing::explicit_points);

    const std::vector<double>& points() const noexcept { return points_; }
    GridSpacing spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

private:
    std::vector<double> points_;
    GridSpacing spacing_;
};

/// Descriptor response C (sE - A)^{-1} B + D by a dense LU solve.
/// Throws SingularPencil(omega_tag) when the pencil is numerically singular at s.
CMatrix descriptor_response(const CMatrix& E, const CMatrix& A, const CMatrix& B,
                            const CMatrix& C, const CMatrix& D, Complex s,
                            double omega_tag);

CMatrix evaluate_at(const StateSpaceModel& model, Complex s);

/// G(jω). Negative ω is allowed and yields the conjugate response.
CMatrix evaluate_transfer(const StateSpaceModel& model, double omega);

/// Largest singular value; 0 for empty or zero matrices.
double spectral_norm(const CMatrix& m);

std::vector<FrequencySample> sample_response(const StateSpaceModel& model,
                                             const FrequencyGrid& grid);

/// n log10-equispaced points from omega_min to omega_max, endpoints exact.
FrequencyGrid log_grid(double omega_min, double omega_max, std::size_t n);

/// 64-bit linear congruential generator (Knuth's MMIX constants).
///
///   state <- 6364136223846793005 * state + 1442695040888963407  (mod 2^64)
///
/// The state starts at `seed` and is advanced once before the first draw.
/// uniform() returns the top 53 bits of the advanced state scaled to [0, 1).
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) { next(); }

    std::uint64_t next() noexcept
    {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

struct ModalModelSpec {
    std::uint64_t seed = 1;
    int n_modes = 3;
    std::pair<double, double> freq_range{1e-1, 1e1};
    std::pair<double, double> damping_range{0.01, 0.1};
    std::pair<double, double> gain_range{-1.0, 1.0};
    int m = 1;
    int p = 1;
};

/// Block-diagonal resonant model with one second-order block per mode:
///
///   [[0, w_i], [-w_i, -2 z_i w_i]]
///
/// Draw order from Lcg64(seed): for each mode, w_i (log-uniform) then z_i
/// (uniform); then B row-major; then C row-major. E = I, D = 0.
StateSpaceModel generate_modal_model(const ModalModelSpec& spec);

} // namespace cloe
