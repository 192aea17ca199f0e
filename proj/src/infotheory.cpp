#include "arithdyn/infotheory.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace arithdyn {

double JointTable::total() const {
    double s = 0;
    for (double v : p) s += v;
    return s;
}

static void check_normalized(const JointTable& t) {
    if (std::abs(t.total() - 1.0) > 1e-9)
        throw std::runtime_error("joint table masses sum to " + std::to_string(t.total()) + ", expected 1");
}

double mi_from_table(const JointTable& t) {
    if (t.is_joint3()) throw std::runtime_error("mi_from_table expects a 2-variable table");
    check_normalized(t);
    std::vector<double> px(size_t(t.nx), 0.0), py(size_t(t.ny), 0.0);
    for (int x = 0; x < t.nx; ++x)
        for (int y = 0; y < t.ny; ++y) {
            px[size_t(x)] += t.at(x, y);
            py[size_t(y)] += t.at(x, y);
        }
    double mi = 0;
    for (int x = 0; x < t.nx; ++x)
        for (int y = 0; y < t.ny; ++y) {
            double pxy = t.at(x, y);
            if (pxy > 0) mi += pxy * std::log(pxy / (px[size_t(x)] * py[size_t(y)]));
        }
    return mi;
}

double cmi_from_table(const JointTable& t) {
    check_normalized(t);
    double cmi = 0;
    for (int z = 0; z < t.nz; ++z) {
        double pz = 0;
        for (int x = 0; x < t.nx; ++x)
            for (int y = 0; y < t.ny; ++y) pz += t.at(x, y, z);
        if (pz <= 0) continue;
        std::vector<double> px(size_t(t.nx), 0.0), py(size_t(t.ny), 0.0);
        for (int x = 0; x < t.nx; ++x)
            for (int y = 0; y < t.ny; ++y) {
                px[size_t(x)] += t.at(x, y, z);
                py[size_t(y)] += t.at(x, y, z);
            }
        for (int x = 0; x < t.nx; ++x)
            for (int y = 0; y < t.ny; ++y) {
                double pxyz = t.at(x, y, z);
                if (pxyz > 0) cmi += pxyz * std::log(pxyz * pz / (px[size_t(x)] * py[size_t(y)]));
            }
    }
    return cmi;
}

JointTable empirical_joint(const std::vector<std::array<int, 2>>& samples, int nx, int ny) {
    if (samples.empty()) throw std::runtime_error("empirical_joint: no samples");
    JointTable t(nx, ny);
    for (const auto& s : samples) {
        if (s[0] < 0 || s[0] >= nx || s[1] < 0 || s[1] >= ny)
            throw std::runtime_error("empirical_joint: sample outside support");
        t.at(s[0], s[1]) += 1.0;
    }
    for (double& v : t.p) v /= double(samples.size());
    return t;
}

JointTable empirical_joint(const std::vector<std::array<int, 3>>& samples, int nx, int ny, int nz) {
    if (samples.empty()) throw std::runtime_error("empirical_joint: no samples");
    JointTable t(nx, ny, nz);
    for (const auto& s : samples) {
        if (s[0] < 0 || s[0] >= nx || s[1] < 0 || s[1] >= ny || s[2] < 0 || s[2] >= nz)
            throw std::runtime_error("empirical_joint: sample outside support");
        t.at(s[0], s[1], s[2]) += 1.0;
    }
    for (double& v : t.p) v /= double(samples.size());
    return t;
}

static double kl(const std::vector<double>& p, const std::vector<double>& q) {
    double v = 0;
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0) v += p[i] * std::log(p[i] / q[i]);
    return v;
}

double probe_mi(const std::vector<std::vector<double>>& pred_dists, const std::vector<int>& x) {
    if (pred_dists.size() != x.size() || pred_dists.empty())
        throw std::runtime_error("probe_mi: size mismatch or empty input");
    const size_t m = pred_dists[0].size();
    int nx = 0;
    for (int v : x) nx = std::max(nx, v + 1);
    std::vector<std::vector<double>> group(size_t(nx), std::vector<double>(m, 0.0));
    std::vector<double> weight(size_t(nx), 0.0);
    for (size_t n = 0; n < x.size(); ++n) {
        double s = 0;
        for (double v : pred_dists[n]) s += v;
        if (std::abs(s - 1.0) > 1e-6)
            throw std::runtime_error("probe_mi: prediction vector sums to " + std::to_string(s));
        for (size_t j = 0; j < m; ++j) group[size_t(x[n])][j] += pred_dists[n][j];
        weight[size_t(x[n])] += 1.0;
    }
    std::vector<double> mixture(m, 0.0);
    const double total = double(x.size());
    for (int g = 0; g < nx; ++g) {
        if (weight[size_t(g)] == 0) continue;
        for (size_t j = 0; j < m; ++j) {
            group[size_t(g)][j] /= weight[size_t(g)];
            mixture[j] += (weight[size_t(g)] / total) * group[size_t(g)][j];
        }
    }
    double mi = 0;
    for (int g = 0; g < nx; ++g)
        if (weight[size_t(g)] > 0) mi += (weight[size_t(g)] / total) * kl(group[size_t(g)], mixture);
    return mi;
}

double probe_cmi(const std::vector<std::vector<double>>& pred_dists, const std::vector<int>& x,
                 const std::vector<int>& z) {
    if (pred_dists.size() != x.size() || x.size() != z.size() || pred_dists.empty())
        throw std::runtime_error("probe_cmi: size mismatch or empty input");
    int nz = 0;
    for (int v : z) nz = std::max(nz, v + 1);
    double cmi = 0;
    const double total = double(x.size());
    for (int zz = 0; zz < nz; ++zz) {
        std::vector<std::vector<double>> slice;
        std::vector<int> xs;
        for (size_t n = 0; n < z.size(); ++n)
            if (z[n] == zz) {
                slice.push_back(pred_dists[n]);
                xs.push_back(x[n]);
            }
        if (slice.empty()) continue;
        cmi += (double(slice.size()) / total) * probe_mi(slice, xs);
    }
    return cmi;
}

int local_carry_out(const std::vector<int>& column_digits) {
    int s = 0;
    for (int d : column_digits) {
        if (d < 0 || d > 9) throw std::runtime_error("local_carry_out: digit outside 0..9");
        s += d;
    }
    return s / 10;
}

int incoming_carry(const std::vector<long long>& operands, int place_from_left) {
    if (place_from_left < 1 || place_from_left > 3)
        throw std::runtime_error("incoming_carry: place must be 1..3");
    long long mod = 1;
    for (int i = 0; i < 3 - place_from_left; ++i) mod *= 10;
    long long s = 0;
    for (long long op : operands) s += op % mod;
    return int(s / mod);
}

// --- exact verifier ---------------------------------------------------------

namespace {

using Counts = std::vector<int64_t>; // index = value, entry = exact multiplicity

Counts convolve(const Counts& a, const Counts& b) {
    Counts out(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

Counts uniform_counts(int n) { return Counts(size_t(n), 1); }

// MI over exact integer count tables. Independence shows up as an exact
// integer identity, so the j>0 zeros of the theorem stay at numerical zero.
double mi_from_counts(const std::vector<std::vector<int64_t>>& c) {
    const size_t nx = c.size(), ny = c[0].size();
    std::vector<int64_t> rx(nx, 0), ry(ny, 0);
    int64_t total = 0;
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < ny; ++y) {
            rx[x] += c[x][y];
            ry[y] += c[x][y];
            total += c[x][y];
        }
    double mi = 0;
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < ny; ++y) {
            if (!c[x][y]) continue;
            unsigned __int128 num = (unsigned __int128)(uint64_t)c[x][y] * (uint64_t)total;
            unsigned __int128 den = (unsigned __int128)(uint64_t)rx[x] * (uint64_t)ry[y];
            if (num == den) continue; // exact independence cell
            double pxy = double(c[x][y]) / double(total);
            mi += pxy * std::log((double(c[x][y]) * double(total)) / (double(rx[x]) * double(ry[y])));
        }
    return mi;
}

double cmi_from_counts(const std::vector<std::vector<std::vector<int64_t>>>& c) {
    const size_t nx = c.size(), ny = c[0].size(), nz = c[0][0].size();
    double cmi = 0;
    int64_t total = 0;
    for (size_t x = 0; x < nx; ++x)
        for (size_t y = 0; y < ny; ++y)
            for (size_t z = 0; z < nz; ++z) total += c[x][y][z];
    for (size_t z = 0; z < nz; ++z) {
        std::vector<int64_t> rx(nx, 0), ry(ny, 0);
        int64_t tz = 0;
        for (size_t x = 0; x < nx; ++x)
            for (size_t y = 0; y < ny; ++y) {
                rx[x] += c[x][y][z];
                ry[y] += c[x][y][z];
                tz += c[x][y][z];
            }
        if (!tz) continue;
        for (size_t x = 0; x < nx; ++x)
            for (size_t y = 0; y < ny; ++y) {
                if (!c[x][y][z]) continue;
                unsigned __int128 num = (unsigned __int128)(uint64_t)c[x][y][z] * (uint64_t)tz;
                unsigned __int128 den = (unsigned __int128)(uint64_t)rx[x] * (uint64_t)ry[y];
                if (num == den) continue;
                double p = double(c[x][y][z]) / double(total);
                cmi += p * std::log((double(c[x][y][z]) * double(tz)) / (double(rx[x]) * double(ry[y])));
            }
    }
    return cmi;
}

int digit_of(long long v, int j_from_left) {
    // Answer digits e_0..e_3 of a value below 4000.
    long long div = 1;
    for (int k = 0; k < 3 - j_from_left; ++k) div *= 10;
    return int((v / div) % 10);
}

} // namespace

Theorem1Report exact_theorem1(bool inject_fault) {
    auto t0 = std::chrono::steady_clock::now();
    Theorem1Report rep;

    // Exact count distribution of B + C + D over three uniform 0..999 addends.
    Counts u1000 = uniform_counts(1000);
    Counts bcd = convolve(convolve(u1000, u1000), u1000);
    // Self-test hook: shifting 1% of the mass onto one bin must trip the
    // independence assertions downstream.
    if (inject_fault) bcd[0] += 10000000;

    // Distribution of the non-a1 remainder for each operand digit of a:
    //   i=1: R = 10*a2 + a3 + B + C + D, with 10*a2+a3 uniform on 0..99
    //   i=2: R = 100*a1 + a3 + B + C + D
    //   i=3: R = 100*a1 + 10*a2 + B + C + D
    std::array<Counts, 3> rest;
    rest[0] = convolve(uniform_counts(100), bcd);
    {
        Counts two(910, 0);
        for (int a1 = 0; a1 < 10; ++a1)
            for (int a3 = 0; a3 < 10; ++a3) two[size_t(100 * a1 + a3)] += 1;
        rest[1] = convolve(two, bcd);
        Counts two2(991, 0);
        for (int a1 = 0; a1 < 10; ++a1)
            for (int a2 = 0; a2 < 10; ++a2) two2[size_t(100 * a1 + 10 * a2)] += 1;
        rest[2] = convolve(two2, bcd);
    }

    // Joint counts of (a_i, e_j) for every pair.
    for (int i = 1; i <= 3; ++i) {
        long long scale = 1;
        for (int k = 0; k < 3 - i; ++k) scale *= 10;
        std::array<std::vector<std::vector<int64_t>>, 4> joint;
        for (auto& j : joint) j.assign(10, std::vector<int64_t>(10, 0));
        const Counts& r = rest[size_t(i - 1)];
        for (int x = 0; x < 10; ++x)
            for (size_t rv = 0; rv < r.size(); ++rv) {
                if (!r[rv]) continue;
                long long s = scale * x + (long long)rv;
                for (int j = 0; j <= 3; ++j) joint[size_t(j)][size_t(x)][size_t(digit_of(s, j))] += r[rv];
            }
        rep.i_ai_e0[size_t(i - 1)] = mi_from_counts(joint[0]);
        for (int j = 1; j <= 3; ++j) rep.i_ai_ej[size_t(i - 1)][size_t(j - 1)] = mi_from_counts(joint[size_t(j)]);
    }

    // Conditional MI at each place under both carry conventions. The column
    // digits and the incoming carry are independent, so an exact product of
    // their count distributions covers the joint.
    Counts digit3 = convolve(convolve(uniform_counts(10), uniform_counts(10)), uniform_counts(10));
    for (int i = 1; i <= 3; ++i) {
        Counts cin(4, 0);
        if (i == 1) {
            Counts t = convolve(convolve(convolve(uniform_counts(100), uniform_counts(100)), uniform_counts(100)),
                                uniform_counts(100));
            for (size_t v = 0; v < t.size(); ++v) cin[v / 100] += t[v];
        } else if (i == 2) {
            Counts t = convolve(convolve(convolve(uniform_counts(10), uniform_counts(10)), uniform_counts(10)),
                                uniform_counts(10));
            for (size_t v = 0; v < t.size(); ++v) cin[v / 10] += t[v];
        } else {
            cin[0] = 1;
        }
        std::vector<std::vector<std::vector<int64_t>>> local(10, std::vector<std::vector<int64_t>>(10, std::vector<int64_t>(4, 0)));
        auto full = local;
        for (int x = 0; x < 10; ++x)
            for (size_t s3 = 0; s3 < digit3.size(); ++s3) {
                if (!digit3[s3]) continue;
                int col = x + int(s3);
                for (int cv = 0; cv < 4; ++cv) {
                    if (!cin[size_t(cv)]) continue;
                    int64_t w = digit3[s3] * cin[size_t(cv)];
                    int e = (col + cv) % 10;
                    local[size_t(x)][size_t(e)][size_t(col / 10)] += w;
                    full[size_t(x)][size_t(e)][size_t((col + cv) / 10)] += w;
                }
            }
        rep.i_ai_ei_local[size_t(i - 1)] = cmi_from_counts(local);
        rep.i_ai_ei_full[size_t(i - 1)] = cmi_from_counts(full);
    }

    // Assertions.
    auto fail = [&rep](const std::string& msg) { rep.violations.push_back(msg); };
    if (!(rep.i_ai_e0[0] > 1e-3))
        fail("I(a1;e0) = " + std::to_string(rep.i_ai_e0[0]) + " not > 1e-3");
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            double v = rep.i_ai_ej[size_t(i - 1)][size_t(j - 1)];
            if (!(std::abs(v) < 1e-10)) {
                std::ostringstream os;
                os << "I(a" << i << ";e" << j << ") = " << v << " not within 1e-10 of 0";
                fail(os.str());
            }
        }
    for (int i = 1; i <= 3; ++i) {
        if (!(rep.i_ai_ei_local[size_t(i - 1)] > 1e-3))
            fail("I(a" + std::to_string(i) + ";e" + std::to_string(i) + "|K) not > 1e-3");
        if (!(rep.i_ai_ei_full[size_t(i - 1)] > 1e-3))
            fail("I(a" + std::to_string(i) + ";e" + std::to_string(i) + "|c) not > 1e-3");
    }
    rep.ok = rep.violations.empty();
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string Theorem1Report::table_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "exact mutual information, uniform 4-operand 0..999 addition (nats)\n";
    for (int i = 1; i <= 3; ++i) os << "  I(a" << i << ";e0)          = " << i_ai_e0[size_t(i - 1)] << "\n";
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            os << "  I(a" << i << ";e" << j << ")          = " << i_ai_ej[size_t(i - 1)][size_t(j - 1)] << "\n";
    for (int i = 1; i <= 3; ++i)
        os << "  I(a" << i << ";e" << i << "|K" << i - 1 << ") [local] = " << i_ai_ei_local[size_t(i - 1)] << "\n";
    for (int i = 1; i <= 3; ++i)
        os << "  I(a" << i << ";e" << i << "|c" << i - 1 << ") [full]  = " << i_ai_ei_full[size_t(i - 1)] << "\n";
    return os.str();
}

MIBaselines dataset_mi_baselines(const std::vector<Example>& dataset) {
    if (dataset.empty()) throw std::runtime_error("dataset_mi_baselines: empty dataset");
    MIBaselines out;
    std::vector<std::array<int, 2>> thousands;
    std::array<std::vector<std::array<int, 3>>, 3> carry, higher;
    thousands.reserve(dataset.size());
    for (const auto& e : dataset) {
        long long sum = 0;
        for (long long op : e.operands) sum += op;
        int a_h = digit_at(e.operands[0], 2);
        thousands.push_back({a_h, digit_at(sum, 3)});
        for (int place = 0; place < 3; ++place) {
            std::vector<int> col;
            col.reserve(e.operands.size());
            for (long long op : e.operands) col.push_back(digit_at(op, place));
            int k = local_carry_out(col);
            carry[size_t(place)].push_back({digit_at(e.operands[0], place), digit_at(sum, place), k});
            higher[size_t(place)].push_back({digit_at(e.operands[0], place), digit_at(sum, place), digit_at(sum, place + 1)});
        }
    }
    int max_carry = int(dataset[0].operands.size()); // column sum < 10*n, carry < n
    out.thousands = mi_from_table(empirical_joint(thousands, 10, 10));
    for (int place = 0; place < 3; ++place) {
        out.carry_cond[size_t(place)] = cmi_from_table(empirical_joint(carry[size_t(place)], 10, 10, max_carry));
        out.higher_cond[size_t(place)] = cmi_from_table(empirical_joint(higher[size_t(place)], 10, 10, 10));
    }
    return out;
}

} // namespace arithdyn
