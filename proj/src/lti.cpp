#include "cloe/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "cloe/errors.hpp"

namespace cloe {

namespace {

// Pivoted LU reciprocal condition estimate below which the solve is refused.
constexpr double kSingularRcond = 1e-15;

std::string dims(const Matrix& m)
{
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void check_finite(const Matrix& m, const char* name)
{
    if (!m.allFinite()) throw InvalidRange(std::string("matrix ") + name + " has non-finite entries");
}

void check_range(std::pair<double, double> r, const char* name)
{
    if (!std::isfinite(r.first) || !std::isfinite(r.second) || r.first > r.second)
        throw InvalidRange(std::string(name) + " is empty or inverted");
}

} // namespace

StateSpaceModel::StateSpaceModel(Matrix A, Matrix B, Matrix C, std::optional<Matrix> E,
                                 std::optional<Matrix> D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C))
{
    const auto n = A_.rows();
    E_ = E ? std::move(*E) : Matrix::Identity(n, n);
    D_ = D ? std::move(*D) : Matrix::Zero(C_.rows(), B_.cols());
    validate();
}

StateSpaceModel StateSpaceModel::constant(Matrix D)
{
    StateSpaceModel model;
    model.E_ = Matrix(0, 0);
    model.A_ = Matrix(0, 0);
    model.B_ = Matrix(0, D.cols());
    model.C_ = Matrix(D.rows(), 0);
    model.D_ = std::move(D);
    model.validate();
    return model;
}

void StateSpaceModel::validate() const
{
    const auto n = A_.rows();
    const auto m = D_.rows();
    const auto p = D_.cols();
    if (A_.cols() != n) throw DimensionMismatch("A must be square, got " + dims(A_));
    if (E_.rows() != n || E_.cols() != n)
        throw DimensionMismatch("E must be " + std::to_string(n) + "x" + std::to_string(n) + ", got " + dims(E_));
    if (B_.rows() != n || B_.cols() != p)
        throw DimensionMismatch("B must be " + std::to_string(n) + "x" + std::to_string(p) + ", got " + dims(B_));
    if (C_.rows() != m || C_.cols() != n)
        throw DimensionMismatch("C must be " + std::to_string(m) + "x" + std::to_string(n) + ", got " + dims(C_));
    if (m == 0 || p == 0) throw DimensionMismatch("model needs at least one input and one output");
    check_finite(E_, "E");
    check_finite(A_, "A");
    check_finite(B_, "B");
    check_finite(C_, "C");
    check_finite(D_, "D");
    if (n == 0) return;

    // Regularity: the pencil must be invertible at one of three fixed probes.
    const double scale = std::max(1.0, A_.norm() / std::max(E_.norm(), 1e-300));
    const Complex probes[] = {{0.3, 1.7}, {-0.9, 0.4}, {1.3, -2.1}};
    const CMatrix Ec = E_.cast<Complex>();
    const CMatrix Ac = A_.cast<Complex>();
    for (const Complex probe : probes) {
        const CMatrix P = (scale * probe) * Ec - Ac;
        if (Eigen::PartialPivLU<CMatrix>(P).rcond() > kSingularRcond) return;
    }
    throw SingularPencil(std::numeric_limits<double>::quiet_NaN(), "pencil (sE - A) is singular at every probe point");
}

bool operator==(const StateSpaceModel& a, const StateSpaceModel& b)
{
    auto same = [](const Matrix& x, const Matrix& y) {
        return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
    };
    return same(a.E_, b.E_) && same(a.A_, b.A_) && same(a.B_, b.B_) && same(a.C_, b.C_) && same(a.D_, b.D_);
}

FrequencyGrid::FrequencyGrid(std::vector<double> points, GridSpacing spacing)
    : points_(std::move(points)), spacing_(spacing)
{
    if (points_.empty()) throw InvalidRange("frequency grid is empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i])) throw InvalidRange("frequency grid has a non-finite point");
        if (i > 0 && !(points_[i] > points_[i - 1]))
            throw InvalidRange("frequency grid is not strictly increasing at index " + std::to_string(i));
    }
}

CMatrix descriptor_response(const CMatrix& E, const CMatrix& A, const CMatrix& B, const CMatrix& C,
                            const CMatrix& D, Complex s, double omega_tag)
{
    if (A.rows() == 0) return D;
    const CMatrix P = s * E - A;
    const Eigen::PartialPivLU<CMatrix> lu(P);
    if (!(lu.rcond() > kSingularRcond)) throw SingularPencil(omega_tag);
    const CMatrix X = lu.solve(B);
    CMatrix out = C * X + D;
    if (!out.allFinite()) throw SingularPencil(omega_tag);
    return out;
}

CMatrix evaluate_at(const StateSpaceModel& model, Complex s)
{
    return descriptor_response(model.E().cast<Complex>(), model.A().cast<Complex>(), model.B().cast<Complex>(),
                               model.C().cast<Complex>(), model.D().cast<Complex>(), s, s.imag());
}

CMatrix evaluate_transfer(const StateSpaceModel& model, double omega)
{
    return evaluate_at(model, Complex(0.0, omega));
}

double spectral_norm(const CMatrix& m)
{
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

std::vector<FrequencySample> sample_response(const StateSpaceModel& model, const FrequencyGrid& grid)
{
    std::vector<FrequencySample> out;
    out.reserve(grid.size());
    for (const double w : grid.points()) out.push_back({w, evaluate_transfer(model, w)});
    return out;
}

FrequencyGrid log_grid(double omega_min, double omega_max, std::size_t n)
{
    if (!(omega_min > 0.0) || !std::isfinite(omega_max) || !(omega_min < omega_max))
        throw InvalidRange("log grid needs 0 < omega_min < omega_max");
    if (n < 2) throw InvalidRange("log grid needs at least 2 points");
    const double lo = std::log10(omega_min);
    const double step = (std::log10(omega_max) - lo) / static_cast<double>(n - 1);
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = std::pow(10.0, lo + step * static_cast<double>(i));
    pts.front() = omega_min;
    pts.back() = omega_max;
    return FrequencyGrid(std::move(pts), GridSpacing::logarithmic);
}

StateSpaceModel generate_modal_model(const ModalModelSpec& spec)
{
    if (spec.n_modes < 1) throw InvalidRange("n_modes must be >= 1");
    if (spec.m < 1 || spec.p < 1) throw InvalidRange("m and p must be >= 1");
    check_range(spec.freq_range, "freq_range");
    check_range(spec.damping_range, "damping_range");
    check_range(spec.gain_range, "gain_range");
    if (!(spec.freq_range.first > 0.0)) throw InvalidRange("freq_range must be positive");
    if (!(spec.damping_range.first > 0.0) || !(spec.damping_range.second < 1.0))
        throw InvalidRange("damping_range must lie in (0, 1)");

    Lcg64 rng(spec.seed);
    const auto n = 2 * static_cast<Eigen::Index>(spec.n_modes);
    Matrix A = Matrix::Zero(n, n);
    const double log_lo = std::log10(spec.freq_range.first);
    const double log_hi = std::log10(spec.freq_range.second);
    for (Eigen::Index i = 0; i < spec.n_modes; ++i) {
        const double w = std::pow(10.0, rng.uniform(log_lo, log_hi));
        const double z = rng.uniform(spec.damping_range.first, spec.damping_range.second);
        const auto k = 2 * i;
        A(k, k + 1) = w;
        A(k + 1, k) = -w;
        A(k + 1, k + 1) = -2.0 * z * w;
    }
    const auto [g_lo, g_hi] = spec.gain_range;
    Matrix B(n, spec.p);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < spec.p; ++c) B(r, c) = rng.uniform(g_lo, g_hi);
    Matrix C(spec.m, n);
    for (Eigen::Index r = 0; r < spec.m; ++r)
        for (Eigen::Index c = 0; c < n; ++c) C(r, c) = rng.uniform(g_lo, g_hi);
    return StateSpaceModel(std::move(A), std::move(B), std::move(C));
}

} // namespace cloe
