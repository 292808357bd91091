#include "cloe/loewner.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "cloe/errors.hpp"
#include "cloe/io.hpp"

namespace cloe {

namespace {

constexpr double kCoincidentTol = 1e-14;
constexpr double kRealifyTol = 1e-10;

struct Group {
    std::size_t first;
    std::size_t size; // 1 for a real point, 2 for a conjugate pair
    double magnitude;
};

std::vector<Group> conjugate_groups(const std::vector<AugmentedPoint>& points)
{
    std::vector<Group> groups;
    for (std::size_t i = 0; i < points.size();) {
        const Complex z = points[i].point;
        if (z.imag() == 0.0) {
            groups.push_back({i, 1, std::abs(z)});
            ++i;
            continue;
        }
        if (i + 1 >= points.size() || points[i + 1].point != std::conj(z))
            throw NotConjugateClosed("point " + std::to_string(i) + " has no adjacent conjugate partner");
        groups.push_back({i, 2, std::abs(z)});
        i += 2;
    }
    return groups;
}

double relative_imag(const CMatrix& m)
{
    if (m.size() == 0) return 0.0;
    const double imag = m.imag().cwiseAbs().maxCoeff();
    if (imag == 0.0) return 0.0;
    const double norm = m.norm();
    return norm > 0.0 ? imag / norm : imag;
}

std::vector<double> to_vector(const Eigen::VectorXd& v)
{
    return {v.data(), v.data() + v.size()};
}

Eigen::Index count_above(const Eigen::VectorXd& sv, double rank_tol)
{
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cut = rank_tol * sv(0);
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++count;
    return count;
}

bool negligible_loewner(const LoewnerPencil& pencil, double sigma_max, double rank_tol)
{
    const double l = pencil.L.norm();
    return l == 0.0 || l <= rank_tol * sigma_max;
}

std::vector<double> imaginary_axis_set(const LoewnerPencil& pencil)
{
    std::vector<double> out;
    for (const auto* list : {&pencil.right_points, &pencil.left_points})
        for (const Complex z : *list)
            if (z.imag() >= 0.0) out.push_back(z.imag());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

nlohmann::json real_matrix_json(const CMatrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<AugmentedPoint> conjugate_augment(std::vector<FrequencySample> samples)
{
    std::sort(samples.begin(), samples.end(),
              [](const FrequencySample& a, const FrequencySample& b) { return a.omega < b.omega; });
    std::vector<AugmentedPoint> out;
    out.reserve(2 * samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.omega) || s.omega < 0.0) throw InvalidRange("sample frequencies must be finite and >= 0");
        if (i > 0 && s.omega == samples[i - 1].omega)
            throw DuplicateFrequency("frequency " + format_double(s.omega) + " appears more than once");
        if (s.omega == 0.0) {
            out.push_back({Complex(0.0, 0.0), s.response.real().cast<Complex>()});
        } else {
            out.push_back({Complex(0.0, s.omega), s.response});
            out.push_back({Complex(0.0, -s.omega), s.response.conjugate()});
        }
    }
    return out;
}

TangentialDataset partition_tangential(const std::vector<AugmentedPoint>& points, Eigen::Index m, Eigen::Index p)
{
    if (m < 1 || p < 1) throw DimensionMismatch("m and p must be positive");
    for (const auto& pt : points)
        if (pt.response.rows() != m || pt.response.cols() != p)
            throw DimensionMismatch("response dimensions differ from (m, p)");

    auto groups = conjugate_groups(points);
    if (groups.size() < 2) throw InsufficientData("need at least one conjugate group per side");
    std::stable_sort(groups.begin(), groups.end(),
                     [](const Group& a, const Group& b) { return a.magnitude < b.magnitude; });

    TangentialDataset data;
    data.m = m;
    data.p = p;
    Eigen::Index right_units = 0;
    Eigen::Index left_units = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const bool right = g % 2 == 0;
        for (std::size_t k = 0; k < groups[g].size; ++k) {
            const auto& pt = points[groups[g].first + k];
            if (right) {
                CVector r = CVector::Zero(p);
                r(right_units % p) = 1.0;
                CVector w = pt.response * r;
                data.right.push_back({pt.point, std::move(r), std::move(w)});
            } else {
                CRowVector l = CRowVector::Zero(m);
                l(left_units % m) = 1.0;
                CRowVector v = l * pt.response;
                data.left.push_back({pt.point, std::move(l), std::move(v)});
            }
        }
        (right ? right_units : left_units) += 1;
    }
    return data;
}

LoewnerPencil build_pencil(const TangentialDataset& data)
{
    const auto k = static_cast<Eigen::Index>(data.right.size());
    const auto q = static_cast<Eigen::Index>(data.left.size());
    if (k == 0 || q == 0) throw InsufficientData("both right and left data are required");

    double scale = 0.0;
    for (const auto& r : data.right) scale = std::max(scale, std::abs(r.lambda));
    for (const auto& l : data.left) scale = std::max(scale, std::abs(l.mu));
    const double tol = kCoincidentTol * scale;

    LoewnerPencil out;
    out.L.resize(q, k);
    out.Ls.resize(q, k);
    out.V.resize(q, data.p);
    out.W.resize(data.m, k);
    out.M = CMatrix::Zero(q, q);
    out.Lam = CMatrix::Zero(k, k);
    out.Ldir.resize(q, data.m);
    out.Rdir.resize(data.p, k);

    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& rd = data.right[static_cast<std::size_t>(i)];
        out.W.col(i) = rd.w;
        out.Rdir.col(i) = rd.r;
        out.Lam(i, i) = rd.lambda;
        out.right_points.push_back(rd.lambda);
    }
    for (Eigen::Index j = 0; j < q; ++j) {
        const auto& ld = data.left[static_cast<std::size_t>(j)];
        out.V.row(j) = ld.v;
        out.Ldir.row(j) = ld.l;
        out.M(j, j) = ld.mu;
        out.left_points.push_back(ld.mu);
    }
    for (Eigen::Index j = 0; j < q; ++j) {
        const auto& ld = data.left[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < k; ++i) {
            const auto& rd = data.right[static_cast<std::size_t>(i)];
            const Complex gap = ld.mu - rd.lambda;
            if (std::abs(gap) <= tol)
                throw CoincidentPoints("left point " + std::to_string(j) + " coincides with right point " +
                                       std::to_string(i));
            const Complex vr = (ld.v * rd.r).value();
            const Complex lw = (ld.l * rd.w).value();
            out.L(j, i) = (vr - lw) / gap;
            out.Ls(j, i) = (ld.mu * vr - rd.lambda * lw) / gap;
        }
    }
    return out;
}

SylvesterResidual sylvester_residual(const LoewnerPencil& pencil)
{
    const double denom = pencil.Ls.norm();
    const double right = (pencil.Ls - pencil.L * pencil.Lam - pencil.V * pencil.Rdir).norm();
    const double left = (pencil.Ls - pencil.M * pencil.L - pencil.Ldir * pencil.W).norm();
    if (denom == 0.0) return {right, left};
    return {right / denom, left / denom};
}

CMatrix realification_transform(const std::vector<Complex>& points)
{
    const auto n = static_cast<Eigen::Index>(points.size());
    CMatrix J = CMatrix::Zero(n, n);
    const double h = 1.0 / std::sqrt(2.0);
    const Complex j(0.0, 1.0);
    for (Eigen::Index i = 0; i < n;) {
        const Complex z = points[static_cast<std::size_t>(i)];
        if (z.imag() == 0.0) {
            J(i, i) = 1.0;
            ++i;
            continue;
        }
        if (i + 1 >= n || points[static_cast<std::size_t>(i + 1)] != std::conj(z))
            throw NotConjugateClosed("point " + std::to_string(i) + " has no adjacent conjugate partner");
        J(i, i) = h;
        J(i, i + 1) = -j * h;
        J(i + 1, i) = h;
        J(i + 1, i + 1) = j * h;
        i += 2;
    }
    return J;
}

LoewnerPencil realify(const LoewnerPencil& pencil)
{
    if (pencil.is_real) return pencil;
    const CMatrix Jq = realification_transform(pencil.left_points);
    const CMatrix Jk = realification_transform(pencil.right_points);
    const CMatrix JqH = Jq.adjoint();
    const CMatrix JkH = Jk.adjoint();

    LoewnerPencil out;
    out.L = JqH * pencil.L * Jk;
    out.Ls = JqH * pencil.Ls * Jk;
    out.V = JqH * pencil.V;
    out.W = pencil.W * Jk;
    out.M = JqH * pencil.M * Jq;
    out.Lam = JkH * pencil.Lam * Jk;
    out.Ldir = JqH * pencil.Ldir;
    out.Rdir = pencil.Rdir * Jk;
    out.left_points = pencil.left_points;
    out.right_points = pencil.right_points;

    const std::pair<CMatrix*, const char*> parts[] = {{&out.L, "L"},   {&out.Ls, "Ls"}, {&out.V, "V"},
                                                      {&out.W, "W"},   {&out.M, "M"},   {&out.Lam, "Lam"},
                                                      {&out.Ldir, "Ldir"}, {&out.Rdir, "Rdir"}};
    for (const auto& [mat, name] : parts) {
        const double residual = relative_imag(*mat);
        if (residual > kRealifyTol)
            throw NotConjugateClosed(std::string("data are not conjugate symmetric: imaginary part of ") + name +
                                     " is " + format_double(residual) + " of its norm");
    }
    for (const auto& [mat, name] : parts) *mat = mat->real().cast<Complex>();
    out.is_real = true;
    return out;
}

PencilRank numerical_rank(const LoewnerPencil& pencil, double rank_tol)
{
    const auto q = pencil.L.rows();
    const auto k = pencil.L.cols();
    CMatrix row(q, 2 * k);
    row << pencil.L, pencil.Ls;
    CMatrix col(2 * q, k);
    col << pencil.L, pencil.Ls;
    const Eigen::VectorXd sv_row = Eigen::JacobiSVD<CMatrix>(row).singularValues();
    const Eigen::VectorXd sv_col = Eigen::JacobiSVD<CMatrix>(col).singularValues();

    PencilRank out;
    out.sv_row = to_vector(sv_row);
    out.sv_col = to_vector(sv_col);
    const double sigma_max = sv_row.size() > 0 ? sv_row(0) : 0.0;
    if (negligible_loewner(pencil, sigma_max, rank_tol)) return out;
    out.nu = std::min(count_above(sv_row, rank_tol), count_above(sv_col, rank_tol));
    return out;
}

Interpolant realize(const LoewnerPencil& pencil, double rank_tol)
{
    const auto q = pencil.L.rows();
    const auto k = pencil.L.cols();
    const PencilRank rank = numerical_rank(pencil, rank_tol);
    if (rank.nu == 0) throw RankZero("Loewner pencil carries no dynamics (constant data)");
    const auto nu = rank.nu;

    Interpolant h;
    if (pencil.is_real) {
        const Matrix L = pencil.L.real();
        const Matrix Ls = pencil.Ls.real();
        Matrix row(q, 2 * k);
        row << L, Ls;
        Matrix col(2 * q, k);
        col << L, Ls;
        const Matrix Y = Eigen::JacobiSVD<Matrix>(row, Eigen::ComputeThinU).matrixU().leftCols(nu);
        const Matrix X = Eigen::JacobiSVD<Matrix>(col, Eigen::ComputeThinV).matrixV().leftCols(nu);
        h.E = (-(Y.transpose() * L * X)).cast<Complex>();
        h.A = (-(Y.transpose() * Ls * X)).cast<Complex>();
        h.B = (Y.transpose() * pencil.V.real()).cast<Complex>();
        h.C = (pencil.W.real() * X).cast<Complex>();
    } else {
        CMatrix row(q, 2 * k);
        row << pencil.L, pencil.Ls;
        CMatrix col(2 * q, k);
        col << pencil.L, pencil.Ls;
        const CMatrix Y = Eigen::JacobiSVD<CMatrix>(row, Eigen::ComputeThinU).matrixU().leftCols(nu);
        const CMatrix X = Eigen::JacobiSVD<CMatrix>(col, Eigen::ComputeThinV).matrixV().leftCols(nu);
        h.E = -(Y.adjoint() * pencil.L * X);
        h.A = -(Y.adjoint() * pencil.Ls * X);
        h.B = Y.adjoint() * pencil.V;
        h.C = pencil.W * X;
    }
    h.D = CMatrix::Zero(pencil.W.rows(), pencil.V.cols());
    h.interpolation_set = imaginary_axis_set(pencil);
    h.sv_row = rank.sv_row;
    h.sv_col = rank.sv_col;
    h.rank_tol = rank_tol;
    h.is_real = pencil.is_real;
    return h;
}

CMatrix evaluate_interpolant_at(const Interpolant& h, Complex s)
{
    return descriptor_response(h.E, h.A, h.B, h.C, h.D, s, s.imag());
}

CMatrix evaluate_interpolant(const Interpolant& h, double omega)
{
    return evaluate_interpolant_at(h, Complex(0.0, omega));
}

Interpolant constant_interpolant(const std::vector<FrequencySample>& samples, double rank_tol)
{
    if (samples.empty()) throw InsufficientData("no samples");
    Matrix mean = Matrix::Zero(samples.front().response.rows(), samples.front().response.cols());
    std::vector<double> omegas;
    for (const auto& s : samples) {
        mean += s.response.real();
        omegas.push_back(s.omega);
    }
    mean /= static_cast<double>(samples.size());
    std::sort(omegas.begin(), omegas.end());

    Interpolant h;
    h.E = CMatrix(0, 0);
    h.A = CMatrix(0, 0);
    h.B = CMatrix(0, mean.cols());
    h.C = CMatrix(mean.rows(), 0);
    h.D = mean.cast<Complex>();
    h.interpolation_set = std::move(omegas);
    h.rank_tol = rank_tol;
    h.is_real = true;
    return h;
}

Interpolant interpolate(const std::vector<FrequencySample>& samples, double rank_tol)
{
    if (samples.empty()) throw InsufficientData("no samples");
    const auto m = samples.front().response.rows();
    const auto p = samples.front().response.cols();
    const auto data = partition_tangential(conjugate_augment(samples), m, p);
    const auto pencil = realify(build_pencil(data));
    try {
        return realize(pencil, rank_tol);
    } catch (const RankZero&) {
        Interpolant h = constant_interpolant(samples, rank_tol);
        const PencilRank rank = numerical_rank(pencil, rank_tol);
        h.sv_row = rank.sv_row;
        h.sv_col = rank.sv_col;
        return h;
    }
}

double tangential_residual(const Interpolant& h, const TangentialDataset& data)
{
    double scale = 0.0;
    for (const auto& r : data.right) scale = std::max(scale, r.w.norm());
    for (const auto& l : data.left) scale = std::max(scale, l.v.norm());
    double worst = 0.0;
    for (const auto& r : data.right)
        worst = std::max(worst, (evaluate_interpolant_at(h, r.lambda) * r.r - r.w).norm());
    for (const auto& l : data.left)
        worst = std::max(worst, (l.l * evaluate_interpolant_at(h, l.mu) - l.v).norm());
    return scale > 0.0 ? worst / scale : worst;
}

StateSpaceModel to_model(const Interpolant& h)
{
    for (const CMatrix* m : {&h.E, &h.A, &h.B, &h.C, &h.D})
        if (m->size() > 0 && m->imag().cwiseAbs().maxCoeff() != 0.0)
            throw Error("interpolant is complex; realify the pencil before exporting");
    if (h.order() == 0) return StateSpaceModel::constant(h.D.real());
    return StateSpaceModel(h.A.real(), h.B.real(), h.C.real(), Matrix(h.E.real()), Matrix(h.D.real()));
}

nlohmann::json interpolant_to_json(const Interpolant& h)
{
    to_model(h); // realness check
    nlohmann::json doc;
    doc["n"] = h.order();
    doc["m"] = h.outputs();
    doc["p"] = h.inputs();
    doc["E"] = real_matrix_json(h.E);
    doc["A"] = real_matrix_json(h.A);
    doc["B"] = real_matrix_json(h.B);
    doc["C"] = real_matrix_json(h.C);
    doc["D"] = real_matrix_json(h.D);
    doc["meta"] = {{"interpolation_set", h.interpolation_set},
                   {"sv_row", h.sv_row},
                   {"sv_col", h.sv_col},
                   {"rank_tol", h.rank_tol}};
    return doc;
}

} // namespace cloe
