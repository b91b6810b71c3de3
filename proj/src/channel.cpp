#include "qptomo/channel.hpp"

#include <cmath>

namespace qptomo {

ChoiBlocks split_choi(const GaussianQForm& form) {
    if (!form.partition())
        throw InvalidForm("form carries no a/b partition");
    const int ka = form.partition()->a_modes;
    const int kb = form.partition()->b_modes;
    if (ka != kb)
        throw DimensionMismatch("two-sided form needs equal a and b counts");
    ChoiBlocks b;
    b.k = ka;
    b.c0 = form.c0();
    b.Gamma_a = form.gamma().head(ka);
    b.Gamma_b = form.gamma().tail(kb);
    b.X_aa = form.X().topLeftCorner(ka, ka);
    b.X_ab = form.X().topRightCorner(ka, kb);
    b.X_bb = form.X().bottomRightCorner(kb, kb);
    b.Y_aa = form.Y().topLeftCorner(ka, ka);
    b.Y_ab = form.Y().topRightCorner(ka, kb);
    b.Y_bb = form.Y().bottomRightCorner(kb, kb);
    return b;
}

GaussianQForm assemble_choi(const ChoiBlocks& blocks) {
    const int k = blocks.k;
    Vec gamma(2 * k);
    gamma << blocks.Gamma_a, blocks.Gamma_b;
    Mat X = Mat::Zero(2 * k, 2 * k);
    X.topLeftCorner(k, k) = blocks.X_aa;
    X.topRightCorner(k, k) = blocks.X_ab;
    X.bottomLeftCorner(k, k) = blocks.X_ab.transpose();
    X.bottomRightCorner(k, k) = blocks.X_bb;
    Mat Y = Mat::Zero(2 * k, 2 * k);
    Y.topLeftCorner(k, k) = blocks.Y_aa;
    Y.topRightCorner(k, k) = blocks.Y_ab;
    Y.bottomLeftCorner(k, k) = blocks.Y_ab.adjoint();
    Y.bottomRightCorner(k, k) = blocks.Y_bb;
    return GaussianQForm(blocks.c0, gamma, X, Y, ChoiPartition{k, k});
}

GaussianQForm identity_choi_form(int k) {
    if (k < 1) throw DomainError("mode count must be positive");
    ChoiBlocks b;
    b.k = k;
    b.Gamma_a = Vec::Zero(k);
    b.Gamma_b = Vec::Zero(k);
    b.X_aa = Mat::Zero(k, k);
    b.X_ab = Mat::Identity(k, k);
    b.X_bb = Mat::Zero(k, k);
    b.Y_aa = -Mat::Identity(k, k);
    b.Y_ab = Mat::Zero(k, k);
    b.Y_bb = -Mat::Identity(k, k);
    return assemble_choi(b);
}

GaussianQForm beamsplitter_choi_form(double theta) {
    const double c = std::cos(theta);
    ChoiBlocks b;
    b.k = 1;
    b.Gamma_a = Vec::Zero(1);
    b.Gamma_b = Vec::Zero(1);
    b.X_aa = Mat::Zero(1, 1);
    b.X_ab = Mat::Constant(1, 1, c);
    b.X_bb = Mat::Zero(1, 1);
    b.Y_aa = Mat::Constant(1, 1, -c * c);
    b.Y_ab = Mat::Zero(1, 1);
    b.Y_bb = Mat::Constant(1, 1, -1.0);
    return assemble_choi(b);
}

GaussianQForm thermal_noise_choi_form(double nbar) {
    if (nbar < 0.0) throw DomainError("mean photon number must be >= 0");
    const double t = 1.0 / (nbar + 1.0);
    ChoiBlocks b;
    b.k = 1;
    b.Gamma_a = Vec::Zero(1);
    b.Gamma_b = Vec::Zero(1);
    b.X_aa = Mat::Zero(1, 1);
    b.X_ab = Mat::Constant(1, 1, t);
    b.X_bb = Mat::Zero(1, 1);
    b.Y_aa = Mat::Constant(1, 1, -t);
    b.Y_ab = Mat::Zero(1, 1);
    b.Y_bb = Mat::Constant(1, 1, -t);
    b.c0 = -std::log(nbar + 1.0);
    return assemble_choi(b);
}

GaussianQForm phase_shift_choi_form(double phi) {
    ChoiBlocks b;
    b.k = 1;
    b.Gamma_a = Vec::Zero(1);
    b.Gamma_b = Vec::Zero(1);
    b.X_aa = Mat::Zero(1, 1);
    b.X_ab = Mat::Constant(1, 1, std::exp(-iu * phi));
    b.X_bb = Mat::Zero(1, 1);
    b.Y_aa = Mat::Constant(1, 1, -1.0);
    b.Y_ab = Mat::Zero(1, 1);
    b.Y_bb = Mat::Constant(1, 1, -1.0);
    return assemble_choi(b);
}

ProbeOutput simulate_probe(const GaussianQForm& choi_form, const Vec& alpha) {
    const ChoiBlocks cb = split_choi(choi_form);
    if (alpha.size() != cb.k)
        throw DimensionMismatch("probe has wrong mode count");
    const Vec ac = alpha.conjugate();

    // Substitute Z_a = conj(alpha): constant, linear-in-Z_b, and quadratic
    // parts of the two-sided exponent collapse onto the b modes.
    const Vec d = cb.Gamma_b + cb.X_ab.transpose() * ac +
                  cb.Y_ab.transpose() * alpha;
    const cxd lin = cb.Gamma_a.cwiseProduct(ac).sum();
    const cxd qx = (ac.transpose() * cb.X_aa * ac).value();
    const cxd qy = (alpha.transpose() * cb.Y_aa * ac).value();
    const double c = cb.c0 + 2.0 * lin.real() + qx.real() + qy.real();

    ProbeOutput out{GaussianQForm(c, d, cb.X_bb, cb.Y_bb),
                    ProbeRecord{alpha, d, c, cb.X_bb, cb.Y_bb}};
    return out;
}

GaussianQForm predict_coherent(const GaussianQForm& choi_form,
                               const Vec& alpha) {
    return normalize(simulate_probe(choi_form, alpha).form);
}

GaussianQForm predict_coherent(const ProbeRecord& record) {
    return normalize(
        GaussianQForm(record.c, record.d, record.X_bb, record.Y_bb));
}

GaussianQForm tmss_output_form(const GaussianQForm& choi_form, double q) {
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("squeezing ratio must lie in (0, 1)");
    ChoiBlocks b = split_choi(choi_form);
    const int k = b.k;
    // The probe's a-side marginal reweights the a variables by q and adds a
    // thermal-like -(1 - q^2) to Y_aa; one normalization factor per pair.
    b.Gamma_a *= q;
    b.X_aa *= q * q;
    b.X_ab *= q;
    b.Y_aa = (q * q * b.Y_aa - (1.0 - q * q) * Mat::Identity(k, k)).eval();
    b.Y_ab *= q;
    b.c0 += k * std::log(1.0 - q * q);
    return assemble_choi(b);
}

double nq_factor(const Vec& alpha, double q) {
    if (!(q > 0.0 && q < 1.0))
        throw DomainError("squeezing ratio must lie in (0, 1)");
    const double a2 = alpha.squaredNorm();
    const double k = static_cast<double>(alpha.size());
    return std::exp(-0.5 * a2 * (1.0 - 1.0 / (q * q))) /
           std::pow(1.0 - q * q, 0.5 * k);
}

double nq_factor(cxd alpha, double q) {
    return nq_factor(Vec::Constant(1, alpha), q);
}

GaussianChannelSpec identity_channel(int k) {
    return {ChannelKind::Identity, static_cast<double>(k), k, "identity",
            identity_choi_form(k)};
}

GaussianChannelSpec bs_channel(double theta) {
    return {ChannelKind::BeamSplitter, theta, 1, "bs",
            beamsplitter_choi_form(theta)};
}

GaussianChannelSpec thermal_noise_channel(double nbar) {
    return {ChannelKind::ThermalNoise, nbar, 1, "thermal",
            thermal_noise_choi_form(nbar)};
}

GaussianChannelSpec phase_channel(double phi) {
    return {ChannelKind::PhaseShift, phi, 1, "phase",
            phase_shift_choi_form(phi)};
}

GaussianChannelSpec make_channel_spec(ChannelKind kind, double param) {
    switch (kind) {
        case ChannelKind::Identity:
            return identity_channel(param > 0.0 ? static_cast<int>(param) : 1);
        case ChannelKind::BeamSplitter:
            return bs_channel(param);
        case ChannelKind::ThermalNoise:
            return thermal_noise_channel(param);
        case ChannelKind::PhaseShift:
            return phase_channel(param);
        case ChannelKind::Gaussian:
            break;
    }
    throw DomainError("direct-form channels need an explicit form");
}

ProbeOutput simulate_probe(const GaussianChannelSpec& spec, const Vec& alpha) {
    return simulate_probe(spec.choi, alpha);
}

GaussianQForm predict_coherent(const GaussianChannelSpec& spec,
                               const Vec& alpha) {
    return predict_coherent(spec.choi, alpha);
}

GaussianQForm tmss_output_form(const GaussianChannelSpec& spec, double q) {
    return tmss_output_form(spec.choi, q);
}

}  // namespace qptomo
