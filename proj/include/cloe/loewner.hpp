#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "cloe/lti.hpp"

namespace cloe {

inline constexpr double kDefaultRankTol = 1e-10;

/// A complex interpolation point with its response matrix.
struct AugmentedPoint {
    Complex point;
    CMatrix response;
};

/// Mirrors imaginary-axis samples onto the negative axis.
///
/// Samples are sorted by frequency. Each ω > 0 yields (jω, Φ) followed by
/// (-jω, conj Φ); ω = 0 yields the single point (0, Re Φ). Throws
/// DuplicateFrequency on repeated ω and InvalidRange on negative ω.
std::vector<AugmentedPoint> conjugate_augment(std::vector<FrequencySample> samples);

struct RightDatum {
    Complex lambda;
    CVector r; ///< p-vector direction
    CVector w; ///< Φ(λ) r
};

struct LeftDatum {
    Complex mu;
    CRowVector l; ///< m-row direction
    CRowVector v; ///< l Φ(μ)
};

struct TangentialDataset {
    std::vector<RightDatum> right;
    std::vector<LeftDatum> left;
    Eigen::Index m = 0;
    Eigen::Index p = 0;
};

/// Splits conjugate-closed groups into right/left data.
///
/// Groups are taken in ascending |frequency| and alternate right, left,
/// right, ... The i-th right group uses direction e_{i mod p}, the j-th left
/// group e_{j mod m}; both members of a conjugate pair share the direction.
/// Throws InsufficientData with fewer than two groups.
TangentialDataset partition_tangential(const std::vector<AugmentedPoint>& points, Eigen::Index m,
                                       Eigen::Index p);

/// Loewner and shifted Loewner matrices with their generators.
///
/// Before realification M and Lam are diagonal and hold the left and right
/// points. The identities Ls = L Lam + V Rdir and Ls = M L + Ldir W hold.
struct LoewnerPencil {
    CMatrix L;    ///< q x k
    CMatrix Ls;   ///< q x k
    CMatrix V;    ///< q x p
    CMatrix W;    ///< m x k
    CMatrix M;    ///< q x q
    CMatrix Lam;  ///< k x k
    CMatrix Ldir; ///< q x m
    CMatrix Rdir; ///< p x k
    std::vector<Complex> left_points;
    std::vector<Complex> right_points;
    bool is_real = false;
};

/// Throws CoincidentPoints if a left and a right point are closer than
/// 1e-14 times the largest point modulus.
LoewnerPencil build_pencil(const TangentialDataset& data);

/// Relative Frobenius residuals of the two Sylvester identities.
struct SylvesterResidual {
    double right = 0.0; ///< ||Ls - L Lam - V Rdir|| / ||Ls||
    double left = 0.0;  ///< ||Ls - M L - Ldir W|| / ||Ls||
};
SylvesterResidual sylvester_residual(const LoewnerPencil& pencil);

/// Unitary change of basis turning a conjugate-symmetric pencil real.
///
/// Each adjacent pair (z, conj z) gets the block (1/√2)[[1, -j], [1, j]] and
/// real points keep an identity block; L <- Jq* L Jk, V <- Jq* V, W <- W Jk
/// and likewise for the other generators. Throws NotConjugateClosed if the
/// points are not paired or the transformed matrices keep an imaginary part
/// above 1e-10 of their Frobenius norm.
LoewnerPencil realify(const LoewnerPencil& pencil);

/// Block-diagonal transform used by realify for a list of conjugate-adjacent points.
CMatrix realification_transform(const std::vector<Complex>& points);

struct PencilRank {
    Eigen::Index nu = 0;
    std::vector<double> sv_row; ///< singular values of [L, Ls]
    std::vector<double> sv_col; ///< singular values of [L; Ls]
};

/// ν = min over [L, Ls] and [L; Ls] of the count of σ_i > rank_tol σ_1.
/// A pencil whose L is negligible at that tolerance carries no dynamics and
/// has ν = 0.
PencilRank numerical_rank(const LoewnerPencil& pencil, double rank_tol = kDefaultRankTol);

/// Projected descriptor interpolant H(s) = C (sE - A)^{-1} B + D.
struct Interpolant {
    CMatrix E;
    CMatrix A;
    CMatrix B;
    CMatrix C;
    CMatrix D; ///< nonzero only for order-zero constant interpolants
    std::vector<double> interpolation_set;
    std::vector<double> sv_row;
    std::vector<double> sv_col;
    double rank_tol = kDefaultRankTol;
    bool is_real = false;

    Eigen::Index order() const noexcept { return A.rows(); }
    Eigen::Index outputs() const noexcept { return D.rows(); }
    Eigen::Index inputs() const noexcept { return D.cols(); }
};

/// Truncates the pencil to its numerical rank ν and projects:
/// E = -Y* L X, A = -Y* Ls X, B = Y* V, C = W X. Throws RankZero when ν = 0.
Interpolant realize(const LoewnerPencil& pencil, double rank_tol = kDefaultRankTol);

CMatrix evaluate_interpolant(const Interpolant& h, double omega);
CMatrix evaluate_interpolant_at(const Interpolant& h, Complex s);

/// Order-zero interpolant holding the mean real response of the samples.
Interpolant constant_interpolant(const std::vector<FrequencySample>& samples, double rank_tol = kDefaultRankTol);

/// Full pipeline: augment, partition, build, realify, realize. Constant
/// data short-circuits to constant_interpolant.
Interpolant interpolate(const std::vector<FrequencySample>& samples, double rank_tol = kDefaultRankTol);

/// Largest tangential interpolation residual of h over the dataset, scaled
/// by the largest data norm.
double tangential_residual(const Interpolant& h, const TangentialDataset& data);

/// Real interpolants only; throws Error otherwise.
StateSpaceModel to_model(const Interpolant& h);

/// Model file layout plus a "meta" object (interpolation_set, sv_row, sv_col, rank_tol).
nlohmann::json interpolant_to_json(const Interpolant& h);

} // namespace cloe
