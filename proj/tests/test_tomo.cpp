#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "qptomo/channel.hpp"
#include "qptomo/linsolve.hpp"
#include "qptomo/tomo.hpp"
#include "support.hpp"

using namespace qptomo;
using qptest::block_distance;
using qptest::random_valid_choi;
using qptest::simulate_set;
using qptest::single;

namespace {

std::vector<Vec> to_probes(std::initializer_list<cxd> zs) {
    std::vector<Vec> out;
    for (cxd z : zs) out.push_back(single(z));
    return out;
}

// 24-probe ring set used by the noise tests: three radii, eight angles.
std::vector<Vec> ring_probes() {
    std::vector<Vec> probes;
    for (double r : {0.7, 1.0, 1.3})
        for (int a = 0; a < 8; ++a) {
            const double phi = 2.0 * M_PI * a / 8.0;
            probes.push_back(single(r * std::exp(iu * phi)));
        }
    return probes;
}

}  // namespace

TEST_CASE("design matrices: frozen entries and determinants") {
    const Mat K = build_K(to_probes({0.0, 1.0, cxd{0, 1}}));
    REQUIRE(K.rows() == 3);
    REQUIRE(K.cols() == 3);
    CHECK(std::abs(K.determinant() - cxd{0, 2}) < 1e-14);
    CHECK(std::abs(std::abs(build_K(to_probes({0.0, 2.0, cxd{0, 2}}))
                                .determinant()) - 8.0) < 1e-13);

    // The last canonical probe is 1+i; its constant-system row is frozen.
    const Mat J = build_J(default_probe_set(1));
    REQUIRE(J.rows() == 6);
    REQUIRE(J.cols() == 6);
    Vec row(6);
    row << 1.0, cxd{1, -1}, cxd{1, 1}, cxd{0, -1}, cxd{0, 1}, 2.0;
    CHECK((J.row(5).transpose() - row).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("design matrices: conditioning of the canonical six probes") {
    const std::vector<Vec> probes = default_probe_set(1);
    CHECK(std::abs(condition_number(build_K(probes)) - 1.519544995837552) <
          1e-9);
    const Mat J = build_J(probes);
    CHECK(std::abs(condition_number(J) - 7.494509342748834) < 1e-9);
    CHECK(std::abs(std::abs(J.determinant()) - 16.0) < 1e-9);

    // Doubling every probe scales |det J| by 2^(sum of row degrees) = 2^8.
    std::vector<Vec> doubled;
    for (const Vec& p : probes) doubled.push_back(2.0 * p);
    CHECK(std::abs(std::abs(build_J(doubled).determinant()) - 4096.0) < 1e-6);
}

TEST_CASE("design matrices: probe-count preconditions") {
    CHECK_THROWS_AS(build_K(to_probes({0.0, 1.0})), DimensionMismatch);
    CHECK_THROWS_AS(build_J(to_probes({0.0, 1.0, cxd{0, 1}, -1.0, 2.0})),
                    DimensionMismatch);
    CHECK_THROWS_AS(build_K({}), DimensionMismatch);
    // Mixed mode counts are rejected.
    std::vector<Vec> mixed = {single(0.0), Vec::Zero(2), single(1.0)};
    CHECK_THROWS_AS(build_K(mixed), DimensionMismatch);
}

TEST_CASE("linear system recovers the cross blocks of a beam splitter") {
    const auto records = simulate_set(bs_channel(M_PI / 3.0).choi,
                                      to_probes({0.0, 1.0, cxd{0, 1}}));
    Mat d(3, 1);
    for (int i = 0; i < 3; ++i) d(i, 0) = records[i].d(0);
    const LinearSolution sol = solve_linear(build_K(to_probes(
                                                {0.0, 1.0, cxd{0, 1}})), d);
    CHECK(std::abs(sol.x(0, 0)) < 1e-14);          // Gamma_b
    CHECK(std::abs(sol.x(1, 0) - 0.5) < 1e-14);    // X_ab
    CHECK(std::abs(sol.x(2, 0)) < 1e-14);          // Y_ab
}

TEST_CASE("reconstruct recovers the beam splitter exactly") {
    const GaussianChannelSpec bs = bs_channel(M_PI / 3.0);
    const ChoiReconstruction rec =
        reconstruct(simulate_set(bs.choi, default_probe_set(1)));
    CHECK(block_distance(rec.choi, bs.choi) < 1e-12);
    CHECK(rec.residual_K < 1e-12);
    CHECK(rec.residual_J < 1e-12);
    CHECK(rec.quadratic_consistency == 0.0);
    CHECK(rec.conjugate_deviation < 1e-14);
    CHECK(!rec.tp_assumed);
    REQUIRE(rec.choi.partition().has_value());
    CHECK(rec.choi.partition()->a_modes == 1);
}

TEST_CASE("explicit six-probe solution: frozen values and equivalence") {
    const auto records = simulate_set(bs_channel(M_PI / 3.0).choi,
                                      default_probe_set(1));
    const ChoiReconstruction cf = closed_form_default(records);
    const ChoiBlocks b = split_choi(cf.choi);
    CHECK(std::abs(b.c0) < 1e-14);
    CHECK(std::abs(b.Gamma_a(0)) < 1e-14);
    CHECK(std::abs(b.Gamma_b(0)) < 1e-14);
    CHECK(std::abs(b.X_aa(0, 0)) < 1e-14);
    CHECK(std::abs(b.X_ab(0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(b.Y_ab(0, 0)) < 1e-14);
    CHECK(std::abs(b.Y_aa(0, 0) + 0.25) < 1e-14);
    CHECK(cf.conjugate_deviation == 0.0);
    CHECK(cf.residual_K < 1e-12);
    CHECK(cf.residual_J < 1e-12);

    const ChoiReconstruction generic = reconstruct(records);
    CHECK(block_distance(cf.choi, generic.choi) < 1e-12);
}

TEST_CASE("explicit solution rejects any other probe set") {
    auto records = simulate_set(bs_channel(0.4).choi, default_probe_set(1));
    auto swapped = records;
    std::swap(swapped[1], swapped[2]);
    CHECK_THROWS_AS(closed_form_default(swapped), WrongProbeSet);

    auto five = records;
    five.pop_back();
    CHECK_THROWS_AS(closed_form_default(five), WrongProbeSet);

    const auto k2 = simulate_set(random_valid_choi(2, 1), default_probe_set(2));
    CHECK_THROWS_AS(closed_form_default(k2), WrongProbeSet);
}

TEST_CASE("round trip on random channel forms") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GaussianQForm truth = random_valid_choi(1, seed);
        const auto records = simulate_set(truth, default_probe_set(1));
        CHECK(block_distance(reconstruct(records).choi, truth) < 1e-8);
        CHECK(block_distance(closed_form_default(records).choi,
                             reconstruct(records).choi) < 1e-12);
    }
}

TEST_CASE("reconstruction is probe-order invariant") {
    const GaussianQForm truth = random_valid_choi(1, 21);
    auto records = simulate_set(truth, default_probe_set(1));
    const ChoiReconstruction base = reconstruct(records);
    std::reverse(records.begin(), records.end());
    CHECK(block_distance(reconstruct(records).choi, base.choi) < 1e-12);
}

TEST_CASE("extra probes do not move an exact solution") {
    const GaussianQForm truth = random_valid_choi(1, 33);
    std::vector<Vec> probes = default_probe_set(1);
    for (cxd z : {cxd{2, 0}, cxd{0, 2}, cxd{1, -1}, cxd{-1, -1}, cxd{0.5, 0},
                  cxd{0, 1.5}})
        probes.push_back(single(z));
    const ChoiReconstruction with12 = reconstruct(simulate_set(truth, probes));
    const ChoiReconstruction with6 =
        reconstruct(simulate_set(truth, default_probe_set(1)));
    CHECK(block_distance(with12.choi, with6.choi) < 1e-10);
    CHECK(with12.residual_K < 1e-10);
    CHECK(with12.residual_J < 1e-10);
}

TEST_CASE("trace-preserving shortcut from three probes") {
    const GaussianChannelSpec bs = bs_channel(M_PI / 3.0);
    const auto records = simulate_set(bs.choi, to_probes({0.0, 1.0, cxd{0, 1}}));
    const ChoiReconstruction tp = reconstruct(records, true);
    CHECK(tp.tp_assumed);
    const ChoiBlocks b = split_choi(tp.choi);
    CHECK(std::abs(b.X_ab(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(b.Y_bb(0, 0) + 1.0) < 1e-12);
    CHECK(b.Gamma_a.cwiseAbs().maxCoeff() == 0.0);  // not identified
    CHECK(b.X_aa.cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.Y_aa.cwiseAbs().maxCoeff() == 0.0);
    CHECK(tp.residual_J == 0.0);
    CHECK(tp.cond_J == 0.0);

    // c0 is pinned by the vacuum probe having unit output trace.
    CHECK(std::abs(gaussian_integral(
              simulate_probe(tp.choi, single(0.0)).form) - 1.0) < 1e-12);

    // Predictions agree with the full reconstruction on held-out probes.
    const ChoiReconstruction full =
        reconstruct(simulate_set(bs.choi, default_probe_set(1)));
    for (cxd alpha : {cxd{-1, 0}, cxd{2, -1}}) {
        const GaussianQForm a = predict_coherent(tp.choi, single(alpha));
        const GaussianQForm b2 = predict_coherent(full.choi, single(alpha));
        for (cxd z : qptest::grid_points(0.5 * alpha, 1.5, 5))
            CHECK(std::abs(evaluate_q(a, single(z)) -
                           evaluate_q(b2, single(z))) < 1e-8);
    }
}

TEST_CASE("trace-preserving shortcut recovers a thermal channel's constant") {
    // The channel is trace preserving, so the vacuum-trace pin lands on the
    // true constant.
    const GaussianChannelSpec th = thermal_noise_channel(1.0);
    const ChoiReconstruction tp = reconstruct(
        simulate_set(th.choi, to_probes({0.0, 1.0, cxd{0, 1}})), true);
    CHECK(std::abs(split_choi(tp.choi).c0 + std::log(2.0)) < 1e-12);
}

TEST_CASE("inconsistent quadratic blocks are rejected") {
    auto records = simulate_set(bs_channel(1.0).choi, default_probe_set(1));
    records[3].X_bb(0, 0) += 1e-3;
    CHECK_THROWS_AS(reconstruct(records), QuadraticInconsistency);
    CHECK_THROWS_AS(closed_form_default(records), QuadraticInconsistency);
}

TEST_CASE("degenerate probe sets are refused with a conditioning error") {
    // Collinear probes make the two linear columns coincide.
    const auto collinear = to_probes({0.0, 1.0, 2.0, 3.0, -1.0, -2.0});
    CHECK_THROWS_AS(
        reconstruct(simulate_set(bs_channel(0.3).choi, collinear)),
        IllConditioned);

    // Unit-circle probes break only the constant-term system: |alpha|^2 = 1
    // duplicates the constant column.
    std::vector<Vec> roots;
    for (int a = 0; a < 6; ++a)
        roots.push_back(single(std::exp(iu * (2.0 * M_PI * a / 6.0))));
    CHECK_THROWS_AS(reconstruct(simulate_set(bs_channel(0.3).choi, roots)),
                    IllConditioned);
    // ... and the linear system alone stays fine for the same set.
    CHECK(reconstruct(simulate_set(bs_channel(0.3).choi, roots), true)
              .tp_assumed);
}

TEST_CASE("canonical probe sets") {
    const std::vector<Vec> six = default_probe_set(1);
    REQUIRE(six.size() == 6);
    const std::vector<cxd> expect = {0.0, 1.0, cxd{0, 1}, -1.0, cxd{0, -1},
                                     cxd{1, 1}};
    for (int i = 0; i < 6; ++i) CHECK(six[i](0) == expect[i]);

    const std::vector<Vec> fifteen = default_probe_set(2);
    REQUIRE(fifteen.size() == 15);
    for (const Vec& p : fifteen) CHECK(p.size() == 2);
    CHECK(condition_number(build_J(fifteen)) < 50.0);

    CHECK_THROWS_AS(default_probe_set(3), DomainError);
}

TEST_CASE("two-mode round trip over the canonical fifteen probes") {
    for (std::uint64_t seed : {2u, 5u}) {
        const GaussianQForm truth = random_valid_choi(2, seed);
        const ChoiReconstruction rec =
            reconstruct(simulate_set(truth, default_probe_set(2)));
        CHECK(block_distance(rec.choi, truth) < 1e-8);
    }
}

TEST_CASE("probe-set ranking separates good, scaled, and degenerate sets") {
    std::vector<Vec> roots;
    for (int a = 0; a < 6; ++a)
        roots.push_back(single(std::exp(iu * (2.0 * M_PI * a / 6.0))));
    std::vector<Vec> doubled;
    for (const Vec& p : default_probe_set(1)) doubled.push_back(2.0 * p);

    const std::vector<std::vector<Vec>> candidates = {
        doubled, default_probe_set(1), roots};
    const std::vector<ProbeSetReport> reports = probe_design(candidates);
    REQUIRE(reports.size() == 3);
    CHECK(std::is_sorted(reports.begin(), reports.end(),
                         [](const ProbeSetReport& a, const ProbeSetReport& b) {
                             return std::max(a.cond_K, a.cond_J) <
                                    std::max(b.cond_K, b.cond_J);
                         }));
    for (const ProbeSetReport& r : reports) {
        if (r.index == 1) {
            CHECK(r.admissible);
            CHECK(std::abs(r.abs_det_J - 16.0) < 1e-9);
        }
        if (r.index == 0) {
            CHECK(r.admissible);
            CHECK(std::abs(r.abs_det_J - 4096.0) < 1e-6);
        }
        if (r.index == 2) {
            CHECK(!r.admissible);
            CHECK(r.abs_det_J < 1e-10 * 16.0);
        }
    }
    // The canonical set is the best conditioned of the three.
    CHECK(reports.front().index == 1);

    // Candidates too small to build the systems are an error, not a report.
    CHECK_THROWS_AS(probe_design({to_probes({0.0, 1.0, cxd{0, 1}})}),
                    DimensionMismatch);
}

TEST_CASE("measurement noise: determinism and bookkeeping") {
    const auto records = simulate_set(bs_channel(1.1).choi, ring_probes());
    CHECK_THROWS_AS(add_noise(records, -1e-6, 1), DomainError);

    const auto same = add_noise(records, 0.0, 99);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(same[i].d(0) == records[i].d(0));
        CHECK(same[i].c == records[i].c);
    }

    const auto a = add_noise(records, 1e-6, 7);
    const auto b = add_noise(records, 1e-6, 7);
    const auto c = add_noise(records, 1e-6, 8);
    double max_same = 0.0, max_diff = 0.0, max_shift = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        max_same = std::max(max_same, std::abs(a[i].d(0) - b[i].d(0)));
        max_diff = std::max(max_diff, std::abs(a[i].d(0) - c[i].d(0)));
        max_shift = std::max(max_shift, std::abs(a[i].d(0) - records[i].d(0)));
        CHECK((a[i].X_bb - records[i].X_bb).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a[i].Y_bb - records[i].Y_bb).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(max_same == 0.0);
    CHECK(max_diff > 1e-8);
    CHECK(max_shift > 1e-8);
    CHECK(max_shift < 1e-5);
}

TEST_CASE("reconstruction degrades gracefully under small noise") {
    const GaussianChannelSpec bs = bs_channel(M_PI / 3.0);
    const auto noisy =
        add_noise(simulate_set(bs.choi, ring_probes()), 1e-6, 4242);
    const ChoiReconstruction rec = reconstruct(noisy);
    CHECK(block_distance(rec.choi, bs.choi) < 1e-4);
    CHECK(rec.residual_K > 0.0);
    CHECK(rec.residual_J > 0.0);
    // Real-valued measurements keep the recovered conjugate pairs exact.
    CHECK(rec.conjugate_deviation < 1e-10);
}
