#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "arithdyn/task.hpp"

namespace arithdyn {

// Discrete joint probability table over (X, Y) or (X, Y, Z); nz == 1 means a
// plain 2-variable table. Masses are stored [x][y][z] row-major.
struct JointTable {
    int nx = 0, ny = 0, nz = 1;
    std::vector<double> p;

    JointTable() = default;
    JointTable(int x, int y, int z = 1) : nx(x), ny(y), nz(z), p(size_t(x) * y * z, 0.0) {}
    double& at(int x, int y, int z = 0) { return p[(size_t(x) * ny + y) * nz + z]; }
    double at(int x, int y, int z = 0) const { return p[(size_t(x) * ny + y) * nz + z]; }
    double total() const;
    bool is_joint3() const { return nz > 1; }
};

// Plug-in estimators in nats; 0*ln 0 = 0 throughout.
double mi_from_table(const JointTable& t);
double cmi_from_table(const JointTable& t);

JointTable empirical_joint(const std::vector<std::array<int, 2>>& samples, int nx, int ny);
JointTable empirical_joint(const std::vector<std::array<int, 3>>& samples, int nx, int ny, int nz);

// Expected-KL probe between a covariate and the model's predicted
// distributions: groups the vectors by x, averages within groups and returns
// sum_x p(x) KL(avg(.|x) || mixture).
double probe_mi(const std::vector<std::vector<double>>& pred_dists, const std::vector<int>& x);
double probe_cmi(const std::vector<std::vector<double>>& pred_dists, const std::vector<int>& x,
                 const std::vector<int>& z);

// Carry generated by one digit column (excludes any incoming carry).
int local_carry_out(const std::vector<int>& column_digits);

// Carry arriving into left-indexed place i (1 = hundreds, 2 = tens,
// 3 = units) from all less-significant places of the operands.
int incoming_carry(const std::vector<long long>& operands, int place_from_left);

// Digit of value at `place` counted from the right (0 = units).
inline int digit_at(long long value, int place) {
    for (int i = 0; i < place; ++i) value /= 10;
    return int(value % 10);
}

// Exact verification of the data-side independence structure of uniform
// 4-operand 0..999 addition, computed by integer convolution of digit-sum
// distributions (no enumeration of the 10^12 operand space).
struct Theorem1Report {
    bool ok = false;
    double runtime_seconds = 0.0;
    // Leading output digit vs each operand digit (left-indexed i = 1..3).
    std::array<double, 3> i_ai_e0{};
    // i_ai_ej[i-1][j-1] for left-indexed i, j in 1..3; all must be exactly ~0.
    std::array<std::array<double, 3>, 3> i_ai_ej{};
    // Conditional MI at each place under both carry conventions.
    std::array<double, 3> i_ai_ei_local{};  // condition on column carry-out K
    std::array<double, 3> i_ai_ei_full{};   // condition on full-sum carry c
    std::vector<std::string> violations;
    std::string table_text() const;
};

Theorem1Report exact_theorem1(bool inject_fault = false);

// Empirical counterparts of the theorem's quantities, measured on generated
// addition examples (first operand plays the role of `a`).
struct MIBaselines {
    double thousands = 0.0;               // I(a_hundreds ; e_thousands)
    std::array<double, 3> carry_cond{};   // [place 0..2] I(a_p ; e_p | K_p)
    std::array<double, 3> higher_cond{};  // [place 0..2] I(a_p ; e_p | e_{p+1})
};

MIBaselines dataset_mi_baselines(const std::vector<Example>& dataset);

} // namespace arithdyn
