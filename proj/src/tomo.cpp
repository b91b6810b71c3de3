#include "qptomo/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "qptomo/linsolve.hpp"
#include "rng.hpp"

namespace qptomo {

namespace {

int probe_mode_count(const std::vector<Vec>& alphas) {
    if (alphas.empty())
        throw DimensionMismatch("probe list is empty");
    const int k = static_cast<int>(alphas.front().size());
    if (k < 1) throw DimensionMismatch("probes must have at least one mode");
    for (const Vec& a : alphas)
        if (a.size() != k)
            throw DimensionMismatch("probes have inconsistent mode counts");
    return k;
}

// Product of singular values (|det| for square systems), the Hadamard
// column-norm bound, and the condition number — the degeneracy triple used
// by both reconstruct() and probe_design().
struct VolumeReport {
    double volume = 0.0;
    double scale = 0.0;
    double cond = 0.0;
};

VolumeReport volume_report(const Mat& A) {
    Eigen::JacobiSVD<Mat> svd(A);
    VolumeReport r;
    r.volume = svd.singularValues().prod();
    r.scale = A.colwise().norm().prod();
    const double smin = svd.singularValues().minCoeff();
    r.cond = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                        : std::numeric_limits<double>::infinity();
    return r;
}

struct RecordChecks {
    int k = 0;
    Mat X_bb;  // pooled means
    Mat Y_bb;
    double spread = 0.0;
};

// The quadratic blocks are probe-independent; pool them and measure the
// largest per-record deviation from the mean.
RecordChecks pool_quadratic_blocks(const std::vector<ProbeRecord>& records) {
    if (records.empty())
        throw DimensionMismatch("record list is empty");
    RecordChecks rc;
    rc.k = static_cast<int>(records.front().alpha.size());
    const int k = rc.k;
    rc.X_bb = Mat::Zero(k, k);
    rc.Y_bb = Mat::Zero(k, k);
    for (const ProbeRecord& r : records) {
        if (r.alpha.size() != k || r.d.size() != k || r.X_bb.rows() != k ||
            r.X_bb.cols() != k || r.Y_bb.rows() != k || r.Y_bb.cols() != k)
            throw DimensionMismatch("record blocks disagree on mode count");
        rc.X_bb += r.X_bb;
        rc.Y_bb += r.Y_bb;
    }
    rc.X_bb /= static_cast<double>(records.size());
    rc.Y_bb /= static_cast<double>(records.size());
    for (const ProbeRecord& r : records) {
        rc.spread = std::max(rc.spread,
                             (r.X_bb - rc.X_bb).cwiseAbs().maxCoeff());
        rc.spread = std::max(rc.spread,
                             (r.Y_bb - rc.Y_bb).cwiseAbs().maxCoeff());
    }
    return rc;
}

}  // namespace

Mat build_K(const std::vector<Vec>& alphas) {
    const int k = probe_mode_count(alphas);
    const int n = static_cast<int>(alphas.size());
    if (n < 2 * k + 1)
        throw DimensionMismatch("linear system needs at least 2k+1 probes");
    Mat K(n, 2 * k + 1);
    for (int i = 0; i < n; ++i) {
        K(i, 0) = 1.0;
        K.row(i).segment(1, k) = alphas[i].conjugate().transpose();
        K.row(i).segment(1 + k, k) = alphas[i].transpose();
    }
    return K;
}

Mat build_J(const std::vector<Vec>& alphas) {
    const int k = probe_mode_count(alphas);
    const int n = static_cast<int>(alphas.size());
    const int cols = (k + 1) * (2 * k + 1);
    if (n < cols)
        throw DimensionMismatch(
            "constant-term system needs at least (k+1)(2k+1) probes");
    Mat J(n, cols);
    for (int i = 0; i < n; ++i) {
        const Vec& a = alphas[i];
        const Vec ac = a.conjugate();
        int col = 0;
        J(i, col++) = 1.0;
        for (int m = 0; m < k; ++m) J(i, col++) = ac(m);
        for (int m = 0; m < k; ++m) J(i, col++) = a(m);
        for (int m = 0; m < k; ++m)
            for (int nn = m; nn < k; ++nn) J(i, col++) = 0.5 * ac(m) * ac(nn);
        for (int m = 0; m < k; ++m)
            for (int nn = m; nn < k; ++nn) J(i, col++) = 0.5 * a(m) * a(nn);
        for (int m = 0; m < k; ++m)
            for (int nn = 0; nn < k; ++nn) J(i, col++) = a(m) * ac(nn);
    }
    return J;
}

namespace {

// Unpack the upper-triangle encoding of a symmetric matrix: the diagonal
// unknowns are the matrix entries, off-diagonal unknowns carry the doubled
// coefficient.
Mat decode_symmetric(const Vec& u, int k) {
    Mat X = Mat::Zero(k, k);
    int idx = 0;
    for (int m = 0; m < k; ++m)
        for (int n = m; n < k; ++n) {
            if (m == n) {
                X(m, m) = u(idx++);
            } else {
                const cxd half = 0.5 * u(idx++);
                X(m, n) = half;
                X(n, m) = half;
            }
        }
    return X;
}

}  // namespace

ChoiReconstruction reconstruct(const std::vector<ProbeRecord>& records,
                               bool trace_preserving,
                               const ReconstructOptions& opts) {
    const RecordChecks rc = pool_quadratic_blocks(records);
    const int k = rc.k;
    if (rc.spread > opts.quadratic_tol)
        throw QuadraticInconsistency(
            "quadratic blocks disagree across records");

    std::vector<Vec> alphas;
    alphas.reserve(records.size());
    for (const ProbeRecord& r : records) alphas.push_back(r.alpha);
    const int n = static_cast<int>(alphas.size());

    const Mat K = build_K(alphas);
    const VolumeReport volK = volume_report(K);
    if (volK.cond > opts.cond_limit || volK.volume < opts.det_tol * volK.scale)
        throw IllConditioned("probe set degenerate for the linear system");

    Mat D(n, k);
    for (int i = 0; i < n; ++i) D.row(i) = records[i].d.transpose();
    const LinearSolution solK = solve_linear(K, D, opts.cond_limit);

    ChoiBlocks blocks;
    blocks.k = k;
    blocks.Gamma_b = solK.x.row(0).transpose();
    blocks.X_ab = solK.x.block(1, 0, k, k);
    blocks.Y_ab = solK.x.block(1 + k, 0, k, k);
    blocks.X_bb = 0.5 * (rc.X_bb + rc.X_bb.transpose());
    blocks.Y_bb = 0.5 * (rc.Y_bb + rc.Y_bb.adjoint());

    ChoiReconstruction out{GaussianQForm(0.0, Vec::Zero(2), Mat::Zero(2, 2),
                                         Mat::Zero(2, 2))};
    out.residual_K = solK.residuals.norm();
    out.cond_K = volK.cond;
    out.quadratic_consistency = rc.spread;
    out.tp_assumed = trace_preserving;

    if (trace_preserving) {
        // The constants c are not used: a-side blocks stay unidentified
        // (zero) and c0 is pinned so the vacuum-probe output has unit trace.
        blocks.Gamma_a = Vec::Zero(k);
        blocks.X_aa = Mat::Zero(k, k);
        blocks.Y_aa = Mat::Zero(k, k);
        blocks.c0 = 0.0;
        try {
            const GaussianQForm vac(0.0, blocks.Gamma_b, blocks.X_bb,
                                    blocks.Y_bb);
            blocks.c0 = -log_gaussian_integral(vac);
        } catch (const NotIntegrable&) {
            // Output side carries no finite weight; leave c0 at zero.
        }
    } else {
        const Mat J = build_J(alphas);
        const VolumeReport volJ = volume_report(J);
        if (volJ.cond > opts.cond_limit ||
            volJ.volume < opts.det_tol * volJ.scale)
            throw IllConditioned(
                "probe set degenerate for the constant-term system");

        Mat cvec(n, 1);
        for (int i = 0; i < n; ++i) cvec(i, 0) = records[i].c;
        const LinearSolution solJ = solve_linear(J, cvec, opts.cond_limit);
        const Vec u = solJ.x.col(0);
        out.residual_J = solJ.residuals(0);
        out.cond_J = volJ.cond;

        const int npair = k * (k + 1) / 2;
        blocks.Gamma_a = u.segment(1, k);
        const Vec gamma_conj_copy = u.segment(1 + k, k);
        blocks.X_aa = decode_symmetric(u.segment(1 + 2 * k, npair), k);
        const Mat x_conj_copy =
            decode_symmetric(u.segment(1 + 2 * k + npair, npair), k);
        Mat y_raw(k, k);
        for (int m = 0; m < k; ++m)
            for (int nn = 0; nn < k; ++nn)
                y_raw(m, nn) = u(1 + 2 * k + 2 * npair + m * k + nn);

        // The conjugate copies were solved as free unknowns; their agreement
        // with the actual conjugates is a Gaussianity check on the data.
        double dev = std::abs(u(0).imag());
        dev = std::max(dev, (gamma_conj_copy - blocks.Gamma_a.conjugate())
                                .cwiseAbs().maxCoeff());
        dev = std::max(dev, (x_conj_copy - blocks.X_aa.conjugate())
                                .cwiseAbs().maxCoeff());
        dev = std::max(dev, (y_raw - y_raw.adjoint()).cwiseAbs().maxCoeff());
        out.conjugate_deviation = dev;
        if (dev > opts.conjugate_tol)
            throw ConjugateMismatch(
                "recovered conjugate pairs disagree; data is not a Gaussian "
                "channel's");

        blocks.c0 = u(0).real();
        blocks.Y_aa = 0.5 * (y_raw + y_raw.adjoint());
    }

    out.choi = assemble_choi(blocks);
    return out;
}

std::vector<Vec> default_probe_set(int k) {
    auto c = [](double re, double im) { return cxd{re, im}; };
    std::vector<Vec> probes;
    if (k == 1) {
        for (cxd z : {c(0, 0), c(1, 0), c(0, 1), c(-1, 0), c(0, -1), c(1, 1)})
            probes.push_back(Vec::Constant(1, z));
        return probes;
    }
    if (k == 2) {
        // Hand-picked fifteen-point set with cond(J) ~ 34: a 3x3 grid over
        // {0, 1, i} plus six points breaking modulus and phase degeneracies.
        const std::vector<std::pair<cxd, cxd>> pts = {
            {c(0, 0), c(0, 0)},   {c(0, 0), c(1, 0)},  {c(0, 0), c(0, 1)},
            {c(1, 0), c(0, 0)},   {c(1, 0), c(1, 0)},  {c(1, 0), c(0, 1)},
            {c(0, 1), c(0, 0)},   {c(0, 1), c(1, 0)},  {c(0, 1), c(0, 1)},
            {c(-1, 0), c(0, -1)}, {c(0, -1), c(-1, 0)}, {c(1, 0), c(-1, 0)},
            {c(-1, 0), c(0, 1)},  {c(1, 1), c(0, 0)},  {c(0, 0), c(1, 1)}};
        for (const auto& [z1, z2] : pts) {
            Vec a(2);
            a << z1, z2;
            probes.push_back(a);
        }
        return probes;
    }
    throw DomainError("no built-in probe set for this mode count");
}

ChoiReconstruction closed_form_default(
    const std::vector<ProbeRecord>& records) {
    const RecordChecks rc = pool_quadratic_blocks(records);
    if (rc.k != 1 || records.size() != 6)
        throw WrongProbeSet("explicit solution needs the six-probe set");
    const std::vector<Vec> expected = default_probe_set(1);
    for (int i = 0; i < 6; ++i)
        if (std::abs(records[i].alpha(0) - expected[i](0)) > 1e-12)
            throw WrongProbeSet(
                "explicit solution needs probes {0,1,i,-1,-i,1+i} in order");
    const ReconstructOptions opts;
    if (rc.spread > opts.quadratic_tol)
        throw QuadraticInconsistency(
            "quadratic blocks disagree across records");

    cxd d[7];
    double cc[7];
    for (int i = 0; i < 6; ++i) {
        d[i + 1] = records[i].d(0);
        cc[i + 1] = records[i].c;
    }

    ChoiBlocks blocks;
    blocks.k = 1;
    blocks.c0 = cc[1];
    blocks.Gamma_b = Vec::Constant(1, d[1]);
    blocks.X_ab = Mat::Constant(1, 1, 0.5 * (-(1.0 + iu) * d[1] + d[2] + iu * d[3]));
    blocks.Y_ab = Mat::Constant(1, 1, 0.5 * (-(1.0 - iu) * d[1] + d[2] - iu * d[3]));
    blocks.Gamma_a =
        Vec::Constant(1, 0.25 * (cc[2] + iu * cc[3] - cc[4] - iu * cc[5]));
    blocks.X_aa = Mat::Constant(
        1, 1,
        0.25 * (2.0 * iu * cc[1] + (1.0 - 2.0 * iu) * cc[2] -
                (1.0 + 2.0 * iu) * cc[3] + cc[4] - cc[5] + 2.0 * iu * cc[6]));
    blocks.Y_aa = Mat::Constant(
        1, 1, -cc[1] + 0.25 * (cc[2] + cc[3] + cc[4] + cc[5]));
    blocks.X_bb = 0.5 * (rc.X_bb + rc.X_bb.transpose());
    blocks.Y_bb = 0.5 * (rc.Y_bb + rc.Y_bb.adjoint());

    // Report the same figures of merit as the generic solver, evaluated for
    // the explicit solution against the full six-probe systems.
    std::vector<Vec> alphas;
    for (const ProbeRecord& r : records) alphas.push_back(r.alpha);
    const Mat K = build_K(alphas);
    const Mat J = build_J(alphas);
    Vec uK(3);
    uK << blocks.Gamma_b(0), blocks.X_ab(0, 0), blocks.Y_ab(0, 0);
    Vec uJ(6);
    uJ << cxd(blocks.c0), blocks.Gamma_a(0), std::conj(blocks.Gamma_a(0)),
        blocks.X_aa(0, 0), std::conj(blocks.X_aa(0, 0)), blocks.Y_aa(0, 0);
    Vec dvec(6), cvec(6);
    for (int i = 0; i < 6; ++i) {
        dvec(i) = d[i + 1];
        cvec(i) = cc[i + 1];
    }

    ChoiReconstruction out{assemble_choi(blocks)};
    out.residual_K = (K * uK - dvec).norm();
    out.residual_J = (J * uJ - cvec).norm();
    out.cond_K = volume_report(K).cond;
    out.cond_J = volume_report(J).cond;
    out.quadratic_consistency = rc.spread;
    out.conjugate_deviation = 0.0;  // copies are exact conjugates here
    out.tp_assumed = false;
    return out;
}

std::vector<ProbeSetReport> probe_design(
    const std::vector<std::vector<Vec>>& candidates, double det_tol) {
    std::vector<ProbeSetReport> reports;
    reports.reserve(candidates.size());
    for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
        const VolumeReport vk = volume_report(build_K(candidates[i]));
        const VolumeReport vj = volume_report(build_J(candidates[i]));
        ProbeSetReport r;
        r.index = i;
        r.abs_det_K = vk.volume;
        r.abs_det_J = vj.volume;
        // Clamp so degenerate sets stay representable in JSON output.
        r.cond_K = std::min(vk.cond, 1e300);
        r.cond_J = std::min(vj.cond, 1e300);
        r.admissible = vk.volume > det_tol * vk.scale &&
                       vj.volume > det_tol * vj.scale;
        reports.push_back(r);
    }
    std::stable_sort(reports.begin(), reports.end(),
                     [](const ProbeSetReport& a, const ProbeSetReport& b) {
                         return std::max(a.cond_K, a.cond_J) <
                                std::max(b.cond_K, b.cond_J);
                     });
    return reports;
}

std::vector<ProbeRecord> add_noise(const std::vector<ProbeRecord>& records,
                                   double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw DomainError("noise level must be >= 0");
    std::vector<ProbeRecord> out = records;
    if (sigma == 0.0) return out;
    detail::NormalSampler normal(seed);
    for (ProbeRecord& r : out) {
        for (Eigen::Index m = 0; m < r.d.size(); ++m)
            r.d(m) += sigma * cxd{normal(), normal()};
        r.c += sigma * normal();
    }
    return out;
}

}  // namespace qptomo
