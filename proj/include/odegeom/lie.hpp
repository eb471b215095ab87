#pragma once

#include "odegeom/curvature.hpp"
#include "odegeom/exterior.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace odegeom {

// a + b*sqrt(3), exact
class QSqrt3 {
public:
    QSqrt3() = default;
    QSqrt3(int a) : a_(a) {}
    QSqrt3(Rational a, Rational b = 0) : a_(std::move(a)), b_(std::move(b)) {}
    static QSqrt3 sqrt3() { return {Rational(0), Rational(1)}; }

    const Rational& rational_part() const { return a_; }
    const Rational& sqrt3_part() const { return b_; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }
    int sign() const;
    QSqrt3 inverse() const;

    QSqrt3 operator+(const QSqrt3& o) const { return {a_ + o.a_, b_ + o.b_}; }
    QSqrt3 operator-(const QSqrt3& o) const { return {a_ - o.a_, b_ - o.b_}; }
    QSqrt3 operator-() const { return {-a_, -b_}; }
    QSqrt3 operator*(const QSqrt3& o) const { return {a_ * o.a_ + 3 * b_ * o.b_, a_ * o.b_ + b_ * o.a_}; }
    QSqrt3 operator/(const QSqrt3& o) const { return *this * o.inverse(); }
    QSqrt3& operator+=(const QSqrt3& o) { return *this = *this + o; }
    QSqrt3& operator-=(const QSqrt3& o) { return *this = *this - o; }
    QSqrt3& operator*=(const QSqrt3& o) { return *this = *this * o; }
    bool operator==(const QSqrt3& o) const { return a_ == o.a_ && b_ == o.b_; }
    bool operator!=(const QSqrt3& o) const { return !(*this == o); }

    Expr to_expr() const;
    std::string str() const;  // re-parses with the formula grammar
    double approx() const;

private:
    Rational a_, b_;
};

// throws std::invalid_argument when e is not a constant of Q(sqrt 3)
QSqrt3 to_qsqrt3(const Expr& e);

class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    static QMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    QSqrt3& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const QSqrt3& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    const std::vector<QSqrt3>& flat() const { return a_; }

    QMatrix operator+(const QMatrix& o) const;
    QMatrix operator-(const QMatrix& o) const;
    QMatrix operator*(const QMatrix& o) const;
    QMatrix scaled(const QSqrt3& s) const;
    QMatrix transpose() const;
    bool is_zero() const;
    bool operator==(const QMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<QSqrt3> a_;
};

std::size_t rank(QMatrix m);
// basis of {x : m x = 0}
std::vector<std::vector<QSqrt3>> nullspace(QMatrix m);
// exact inertia of a symmetric matrix by symmetric elimination
Signature inertia(QMatrix m);
// a = lambda * b for some nonzero lambda
bool proportional(const QMatrix& a, const QMatrix& b);

// c^k_ij with c^k_ij = -c^k_ji; d theta^k = -1/2 c^k_ij theta^i ^ theta^j
class StructureConstantTable {
public:
    StructureConstantTable() = default;
    explicit StructureConstantTable(std::vector<std::string> labels);

    std::size_t dim() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    int index(const std::string& label) const;  // -1 when absent

    const QSqrt3& operator()(std::size_t k, std::size_t i, std::size_t j) const { return c_[(k * dim() + i) * dim() + j]; }
    void set(std::size_t k, std::size_t i, std::size_t j, const QSqrt3& v);
    bool operator==(const StructureConstantTable& o) const { return labels_ == o.labels_ && c_ == o.c_; }

private:
    std::vector<std::string> labels_;
    std::vector<QSqrt3> c_;
};

enum class FlatSystem { Syspoint, G2 };
std::string to_string(FlatSystem s);  // "syspoint", "g2-flat"

// flat specialization (all scalar invariants zero) of the quoted coframe systems
StructureConstantTable flat_structure_constants(FlatSystem s);

struct JacobiVerdict {
    bool ok = true;
    std::array<std::size_t, 3> triple{};  // first violating (i, j, k)
    std::size_t component = 0;
    QSqrt3 value;
};
JacobiVerdict jacobi_check(const StructureConstantTable& t);

struct KillingAnalysis {
    QMatrix form;  // K_ij = c^a_ib c^b_ja
    std::size_t rank = 0;
    bool nondegenerate = false;
    Signature signature;
};
KillingAnalysis killing_analysis(const StructureConstantTable& t);

// left-invariant d over the table's basis: d theta^k = -sum_{i<j} c^k_ij theta^i ^ theta^j
StructureDifferential structure_differential(const StructureConstantTable& t);
// basis indices k with d(d theta^k) != 0
std::vector<std::size_t> d_squared_failures(const StructureConstantTable& t);

enum class Connection { Conpoint, Caln, Ccg2 };
std::string to_string(Connection c);  // "conpoint", "caln", "ccg2"

struct MatrixBasis {
    std::vector<std::string> labels;
    std::vector<QMatrix> generators;
};

// printed entries, linear in the form names, invariants zeroed
const std::vector<std::vector<std::string>>& connection_entries(Connection c);
const std::vector<std::string>& connection_labels(Connection c);
// replace one label by 1 and all others by 0, for each label in turn; the
// specialization is substituted first
MatrixBasis extract_generators(const std::vector<std::vector<std::string>>& entries,
                               const std::vector<std::string>& labels,
                               const std::map<std::string, Expr>& specialization = {});
MatrixBasis matrix_rep(Connection c);
bool linearly_independent(const MatrixBasis& b);

MatrixBasis rotation_basis();
MatrixBasis random_basis(std::size_t count, std::size_t n, unsigned seed);

struct ClosureResult {
    bool closed = true;
    std::pair<std::size_t, std::size_t> failing{};  // first pair leaving the span
    StructureConstantTable constants;              // [X_i, X_j] = c^k_ij X_k, when closed
};
ClosureResult commutator_closure_check(const MatrixBasis& b);

// exact equality of brackets after matching generators by label; false when
// the label sets differ
bool same_bracket(const StructureConstantTable& a, const StructureConstantTable& b);

struct BilinearFormResult {
    std::vector<QMatrix> solutions;  // basis of {B = B^T : X^T B + B X = 0 for all X}
    std::optional<QMatrix> generic;
    Signature signature;
};
BilinearFormResult invariant_bilinear_form(const MatrixBasis& b);

// 3-forms on R^n as coefficients of e_a ^ e_b ^ e_c, a < b < c, lexicographic
std::vector<std::array<int, 3>> three_form_slots(std::size_t n);

struct ThreeFormResult {
    std::vector<std::vector<QSqrt3>> solutions;
    std::optional<QMatrix> induced;  // of the first solution
    bool generic = false;            // induced form nondegenerate
    Signature signature;
};
ThreeFormResult invariant_three_form(const MatrixBasis& b);
// (u, v) -> volume coefficient of (u _| phi) ^ (v _| phi) ^ phi, for n = 7
QMatrix induced_bilinear_form(const std::vector<QSqrt3>& phi);

}  // namespace odegeom
