#include <doctest.h>

#include <cmath>

#include <stdexcept>
#include "arithdyn/datagen.hpp"
#include "arithdyn/infotheory.hpp"
#include "arithdyn/rng.hpp"

using namespace arithdyn;

TEST_CASE("carry helpers") {
    CHECK(local_carry_out({0, 0, 0, 0}) == 0);
    CHECK(local_carry_out({9, 9, 9, 9}) == 3);
    CHECK(local_carry_out({3, 4, 2, 0}) == 0);
    CHECK_THROWS_AS(local_carry_out({10}), std::runtime_error);

    CHECK(incoming_carry({123, 456, 789, 12}, 3) == 0); // units never receive carry
    CHECK(incoming_carry({9, 19, 29, 39}, 2) == 3);     // four trailing 9s
    CHECK(incoming_carry({199, 299, 399, 499}, 1) == 3); // all 99 mod 100
    CHECK_THROWS_AS(incoming_carry({1, 2, 3, 4}, 0), std::runtime_error);
}

TEST_CASE("mi_from_table basics") {
    JointTable uni(10, 10);
    for (auto& v : uni.p) v = 0.01;
    CHECK(std::abs(mi_from_table(uni)) < 1e-12);

    JointTable diag(10, 10);
    for (int i = 0; i < 10; ++i) diag.at(i, i) = 0.1;
    CHECK(std::abs(mi_from_table(diag) - std::log(10.0)) < 1e-12);

    JointTable hand(2, 2);
    hand.at(0, 0) = 0.4; hand.at(0, 1) = 0.1;
    hand.at(1, 0) = 0.1; hand.at(1, 1) = 0.4;
    double expect = 2 * (0.4 * std::log(0.4 / 0.25) + 0.1 * std::log(0.1 / 0.25));
    CHECK(std::abs(mi_from_table(hand) - expect) < 1e-12);

    JointTable bad(2, 2);
    bad.at(0, 0) = 0.7;
    CHECK_THROWS_AS(mi_from_table(bad), std::runtime_error);
}

TEST_CASE("mi symmetry and self-information") {
    Rng rng(5);
    JointTable t(4, 4);
    double sum = 0;
    for (auto& v : t.p) sum += v = rng.uniform01();
    for (auto& v : t.p) v /= sum;
    JointTable tt(4, 4);
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) tt.at(y, x) = t.at(x, y);
    CHECK(mi_from_table(t) == doctest::Approx(mi_from_table(tt)).epsilon(1e-12));

    // Y = X: MI equals the entropy of X.
    JointTable self(5, 5);
    double marg[5] = {0.1, 0.3, 0.2, 0.25, 0.15};
    double h = 0;
    for (int i = 0; i < 5; ++i) {
        self.at(i, i) = marg[i];
        h -= marg[i] * std::log(marg[i]);
    }
    CHECK(mi_from_table(self) == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("cmi_from_table") {
    // X independent of Y inside every z-slice.
    JointTable ind(2, 2, 2);
    for (int z = 0; z < 2; ++z) {
        double pz = z == 0 ? 0.3 : 0.7;
        double px[2] = {0.6, 0.4}, py[2] = {0.2, 0.8};
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) ind.at(x, y, z) = pz * px[x] * py[y];
    }
    CHECK(std::abs(cmi_from_table(ind)) < 1e-12);

    // Constant z reduces to the 2-variable MI.
    JointTable hand(2, 2);
    hand.at(0, 0) = 0.4; hand.at(0, 1) = 0.1;
    hand.at(1, 0) = 0.1; hand.at(1, 1) = 0.4;
    JointTable lift(2, 2, 1);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) lift.at(x, y, 0) = hand.at(x, y);
    CHECK(cmi_from_table(lift) == doctest::Approx(mi_from_table(hand)).epsilon(1e-12));

    // Random table against a direct expansion of the definition.
    Rng rng(11);
    JointTable t(3, 3, 2);
    double sum = 0;
    for (auto& v : t.p) sum += v = rng.uniform01();
    for (auto& v : t.p) v /= sum;
    double direct = 0;
    for (int z = 0; z < 2; ++z) {
        double pz = 0;
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) pz += t.at(x, y, z);
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) {
                double pxz = 0, pyz = 0;
                for (int yy = 0; yy < 3; ++yy) pxz += t.at(x, yy, z);
                for (int xx = 0; xx < 3; ++xx) pyz += t.at(xx, y, z);
                double p = t.at(x, y, z);
                if (p > 0) direct += p * std::log(p * pz / (pxz * pyz));
            }
    }
    CHECK(cmi_from_table(t) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("empirical_joint") {
    std::vector<std::array<int, 2>> one = {{3, 7}};
    JointTable t = empirical_joint(one, 10, 10);
    CHECK(t.at(3, 7) == 1.0);
    CHECK(t.total() == doctest::Approx(1.0));

    CHECK_THROWS_AS(empirical_joint(std::vector<std::array<int, 2>>{}, 2, 2), std::runtime_error);
    std::vector<std::array<int, 2>> bad = {{11, 0}};
    CHECK_THROWS_AS(empirical_joint(bad, 10, 10), std::runtime_error);

    // Order invariance.
    std::vector<std::array<int, 2>> a = {{0, 0}, {1, 1}, {0, 1}};
    std::vector<std::array<int, 2>> b = {{0, 1}, {0, 0}, {1, 1}};
    CHECK(empirical_joint(a, 2, 2).p == empirical_joint(b, 2, 2).p);

    // 1M uniform pairs: every cell near 1/100.
    Rng rng(123);
    std::vector<std::array<int, 2>> big;
    big.reserve(1000000);
    for (int i = 0; i < 1000000; ++i) big.push_back({int(rng.uniform(10)), int(rng.uniform(10))});
    JointTable u = empirical_joint(big, 10, 10);
    double worst = 0;
    for (double v : u.p) worst = std::max(worst, std::abs(v - 0.01));
    CHECK(worst < 0.002);
}

TEST_CASE("plug-in estimator bias bound on an independent table") {
    // At independence the estimator's error is dominated by the
    // (cells-1)/(2n) bias; check three sample sizes with a margin of 3x.
    double px[4] = {0.1, 0.2, 0.3, 0.4}, py[3] = {0.5, 0.3, 0.2};
    Rng rng(7);
    for (int64_t n : {1000, 10000, 100000}) {
        std::vector<std::array<int, 2>> samples;
        samples.reserve(size_t(n));
        for (int64_t i = 0; i < n; ++i) {
            double ux = rng.uniform01(), uy = rng.uniform01();
            int x = 0, y = 0;
            double acc = 0;
            for (int k = 0; k < 4; ++k) { acc += px[k]; if (ux < acc) { x = k; break; } }
            acc = 0;
            for (int k = 0; k < 3; ++k) { acc += py[k]; if (uy < acc) { y = k; break; } }
            samples.push_back({x, y});
        }
        double mi = mi_from_table(empirical_joint(samples, 4, 3));
        CHECK(mi >= 0.0);
        CHECK(mi <= 3.0 * (4.0 * 3.0 - 1.0) / (2.0 * double(n)));
    }
}

TEST_CASE("probe_mi and probe_cmi") {
    // Identical distributions for every x: zero information.
    std::vector<std::vector<double>> dists(40, {0.25, 0.25, 0.25, 0.25});
    std::vector<int> x(40);
    for (size_t i = 0; i < x.size(); ++i) x[i] = int(i % 4);
    CHECK(std::abs(probe_mi(dists, x)) < 1e-12);

    // Deterministic one-hot per group: ln(#groups).
    std::vector<std::vector<double>> hot;
    std::vector<int> hx;
    for (int g = 0; g < 10; ++g)
        for (int r = 0; r < 5; ++r) {
            std::vector<double> d(10, 0.0);
            d[size_t(g)] = 1.0;
            hot.push_back(d);
            hx.push_back(g);
        }
    CHECK(probe_mi(hot, hx) == doctest::Approx(std::log(10.0)).epsilon(1e-12));

    // Constant z reduces probe_cmi to probe_mi.
    std::vector<int> z(hot.size(), 0);
    CHECK(probe_cmi(hot, hx, z) == doctest::Approx(probe_mi(hot, hx)).epsilon(1e-12));

    // Distributions that depend only on z carry no information about x.
    std::vector<std::vector<double>> zd;
    std::vector<int> zx, zz;
    Rng rng(19);
    for (int i = 0; i < 60; ++i) {
        int zi = i % 3;
        std::vector<double> d(4, 0.1);
        d[size_t(zi)] += 0.6;
        zd.push_back(d);
        zx.push_back(int(rng.uniform(5)));
        zz.push_back(zi);
    }
    CHECK(std::abs(probe_cmi(zd, zx, zz)) < 1e-12);

    // Random small instance vs direct definition expansion.
    std::vector<std::vector<double>> rd;
    std::vector<int> rx, rz;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> d(3);
        double s = 0;
        for (auto& v : d) s += v = rng.uniform01();
        for (auto& v : d) v /= s;
        rd.push_back(d);
        rx.push_back(int(rng.uniform(2)));
        rz.push_back(int(rng.uniform(2)));
    }
    double direct = 0;
    for (int zz2 = 0; zz2 < 2; ++zz2) {
        std::vector<std::vector<double>> slice;
        std::vector<int> xs;
        for (size_t i = 0; i < rd.size(); ++i)
            if (rz[i] == zz2) {
                slice.push_back(rd[i]);
                xs.push_back(rx[i]);
            }
        // weight * expected KL of group means against the slice mixture
        std::vector<double> mix(3, 0.0);
        std::vector<std::vector<double>> groups(2, std::vector<double>(3, 0.0));
        std::vector<double> gn(2, 0.0);
        for (size_t i = 0; i < slice.size(); ++i) {
            for (int j = 0; j < 3; ++j) groups[size_t(xs[i])][size_t(j)] += slice[i][size_t(j)];
            gn[size_t(xs[i])] += 1;
        }
        for (int g = 0; g < 2; ++g)
            for (int j = 0; j < 3; ++j) {
                if (gn[size_t(g)] > 0) groups[size_t(g)][size_t(j)] /= gn[size_t(g)];
                mix[size_t(j)] += (gn[size_t(g)] / double(slice.size())) * groups[size_t(g)][size_t(j)];
            }
        double inner = 0;
        for (int g = 0; g < 2; ++g) {
            if (gn[size_t(g)] == 0) continue;
            double kl = 0;
            for (int j = 0; j < 3; ++j)
                if (groups[size_t(g)][size_t(j)] > 0)
                    kl += groups[size_t(g)][size_t(j)] * std::log(groups[size_t(g)][size_t(j)] / mix[size_t(j)]);
            inner += (gn[size_t(g)] / double(slice.size())) * kl;
        }
        direct += (double(slice.size()) / double(rd.size())) * inner;
    }
    CHECK(probe_cmi(rd, rx, rz) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("exact theorem-1 verification") {
    Theorem1Report rep = exact_theorem1();
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
    CHECK(rep.runtime_seconds < 5.0);

    // Frozen values from an independent exact-fraction computation.
    CHECK(rep.i_ai_e0[0] == doctest::Approx(0.111953230340827).epsilon(1e-9));
    CHECK(rep.i_ai_e0[1] == doctest::Approx(0.001000989242575).epsilon(1e-9));
    CHECK(rep.i_ai_e0[2] == doctest::Approx(0.000010000110294).epsilon(1e-6));
    CHECK(rep.i_ai_ei_local[0] == doctest::Approx(0.023991925839994).epsilon(1e-9));
    CHECK(rep.i_ai_ei_local[1] == doctest::Approx(0.023960359426897).epsilon(1e-9));
    CHECK(rep.i_ai_ei_local[2] == doctest::Approx(0.034815077073764).epsilon(1e-9));
    CHECK(rep.i_ai_ei_full[0] == doctest::Approx(0.033083157087838).epsilon(1e-9));
    CHECK(rep.i_ai_ei_full[1] == doctest::Approx(0.033098393571166).epsilon(1e-9));
    CHECK(rep.i_ai_ei_full[2] == doctest::Approx(0.034815077073764).epsilon(1e-9));

    // The independence claims hold at exact numerical zero.
    for (auto& row : rep.i_ai_ej)
        for (double v : row) CHECK(v == 0.0);

    // Units place receives no carry, so both conventions coincide there.
    CHECK(rep.i_ai_ei_local[2] == rep.i_ai_ei_full[2]);

    // All positivity claims from the proof, including the small a2/a3 ones.
    for (double v : rep.i_ai_e0) CHECK(v > 0.0);
}

TEST_CASE("exact theorem-1 fault injection trips the assertions") {
    Theorem1Report rep = exact_theorem1(true);
    CHECK(!rep.ok);
    CHECK(!rep.violations.empty());
}

TEST_CASE("dataset baselines approach the exact values on 1M examples") {
    TaskSpec spec;
    spec.task = Task::Addition;
    spec.operand_count = 4;
    spec.sample_size = 1000000;
    spec.seed = 77;
    auto data = gen_addition(spec);
    MIBaselines base = dataset_mi_baselines(data);
    Theorem1Report rep = exact_theorem1();

    CHECK(std::abs(base.thousands - rep.i_ai_e0[0]) / rep.i_ai_e0[0] < 0.05);
    // place p corresponds to left-indexed i = 3 - p
    CHECK(std::abs(base.carry_cond[2] - rep.i_ai_ei_local[0]) / rep.i_ai_ei_local[0] < 0.05);
    CHECK(std::abs(base.carry_cond[1] - rep.i_ai_ei_local[1]) / rep.i_ai_ei_local[1] < 0.05);
    CHECK(std::abs(base.carry_cond[0] - rep.i_ai_ei_local[2]) / rep.i_ai_ei_local[2] < 0.05);

    // Cross-place dependence is pure estimator bias at this sample size.
    std::vector<std::array<int, 2>> a2e1;
    a2e1.reserve(data.size());
    for (const auto& e : data) {
        long long sum = e.answer_value;
        a2e1.push_back({digit_at(e.operands[0], 1), digit_at(sum, 2)});
    }
    CHECK(mi_from_table(empirical_joint(a2e1, 10, 10)) < 0.002);
}

TEST_CASE("verifier tables agree with the generic estimator path") {
    // Rebuild the (a1, e0) joint as a plain table and push it through
    // mi_from_table; both routes must land on the same number.
    Theorem1Report rep = exact_theorem1();
    TaskSpec spec;
    spec.task = Task::Addition;
    spec.operand_count = 4;
    spec.sample_size = 2000000;
    spec.seed = 1234;
    auto data = gen_addition(spec);
    std::vector<std::array<int, 2>> pairs;
    pairs.reserve(data.size());
    for (const auto& e : data) pairs.push_back({digit_at(e.operands[0], 2), digit_at(e.answer_value, 3)});
    double emp = mi_from_table(empirical_joint(pairs, 10, 10));
    CHECK(std::abs(emp - rep.i_ai_e0[0]) < 0.01);
}
